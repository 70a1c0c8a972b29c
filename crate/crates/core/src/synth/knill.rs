//! Isometries through a unitary extension with few non-unit eigenvalues.

use num_complex::Complex64;

use super::multiplex::zero_phase_circuit;
use super::state_prep::prep_on;
use super::Isometry;
use crate::circuit::Circuit;
use crate::error::Result;
use crate::numerics::{c64, unitary_eig, unitary_extension_max_unit_eigs, CMatrix};

const UNIT_TOL: f64 = 1e-8;

/// `U = 1 + Σ (e^{iθ_k} − 1)|v_k⟩⟨v_k|` over the non-unit eigenvalues.
#[derive(Clone, Debug)]
pub struct KnillSpectrum {
    pub phases: Vec<f64>,
    /// One eigenvector per column.
    pub vectors: CMatrix,
}

impl KnillSpectrum {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.vectors.nrows();
        let mut u = CMatrix::identity(d, d);
        for (k, &t) in self.phases.iter().enumerate() {
            let v = self.vectors.column(k);
            u += (v * v.adjoint()) * (Complex64::from_polar(1.0, t) - c64(1.0, 0.0));
        }
        u
    }
}

/// Extension of `v` and its non-unit eigen-pairs.
pub fn knill_spectrum(v: &Isometry) -> Result<(CMatrix, KnillSpectrum)> {
    let u = unitary_extension_max_unit_eigs(v.matrix())?;
    let (vals, vecs) = unitary_eig(&u)?;
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| (vals[i] - c64(1.0, 0.0)).norm() > UNIT_TOL)
        .collect();
    let mut vectors = CMatrix::zeros(u.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        vectors.set_column(k, &vecs.column(i));
    }
    let phases = keep.iter().map(|&i| vals[i].arg()).collect();
    Ok((u, KnillSpectrum { phases, vectors }))
}

/// One block per non-unit eigenvalue: S_k†, a phase on |0…0⟩, S_k, with
/// `S_k |0…0⟩ = |v_k⟩`.
pub fn knill(v: &Isometry) -> Result<Circuit> {
    let n = v.n();
    let (_, spec) = knill_spectrum(v)?;
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n);
    for (k, &t) in spec.phases.iter().enumerate() {
        let s = prep_on(&spec.vectors.columns(k, 1).into_owned(), &qubits, n)?;
        c.append(&s.inverse()?);
        c.append(&zero_phase_circuit(t, &qubits, n)?);
        c.append(&s);
    }
    Ok(c.with_ancillas(0..n - v.m()))
}
