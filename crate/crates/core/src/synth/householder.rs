//! Isometries as products of Householder-type reflections, no ancilla.

use num_complex::Complex64;

use super::multiplex::zero_phase_circuit;
use super::state_prep::prep_on;
use super::Isometry;
use crate::circuit::Circuit;
use crate::error::Result;
use crate::numerics::{c64, frobenius, CMatrix};

/// `H = 1 − (1 − e^{iφ})|w⟩⟨w|`.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub w: CMatrix,
    pub phi: f64,
}

impl Reflection {
    pub fn matrix(&self) -> CMatrix {
        let d = self.w.nrows();
        CMatrix::identity(d, d)
            - (&self.w * self.w.adjoint()) * (c64(1.0, 0.0) - Complex64::from_polar(1.0, self.phi))
    }
}

/// Reflections `H_0, …, H_{M−1}` with `H_{M−1} ⋯ H_0 V = I_{N×M}`.
/// Columns already equal to `e_j` give no reflection.
pub fn householder_reflections(v: &Isometry) -> Vec<Reflection> {
    let mut work = v.matrix().clone();
    let mut out = Vec::new();
    for j in 0..v.matrix().ncols() {
        let mut x = work.column(j).into_owned();
        for i in 0..j {
            x[i] = c64(0.0, 0.0);
        }
        let mut d = x.clone();
        d[j] -= c64(1.0, 0.0);
        let norm = d.norm();
        if norm < 1e-10 {
            continue;
        }
        let z = c64(1.0, 0.0) - x[j];
        let phi = if z.norm() < 1e-14 {
            std::f64::consts::PI
        } else {
            (-z.conj() / z).arg()
        };
        let r = Reflection { w: CMatrix::from_column_slice(d.len(), 1, (d / c64(norm, 0.0)).as_slice()), phi };
        work = r.matrix() * work;
        out.push(r);
    }
    out
}

/// `V = H_0† ⋯ H_{M−1}†` applied to |0…0⟩ ⊗ inputs.
pub fn householder(v: &Isometry) -> Result<Circuit> {
    let n = v.n();
    let qubits: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n);
    for r in householder_reflections(v).iter().rev() {
        let s = prep_on(&r.w, &qubits, n)?;
        c.append(&s.inverse()?);
        c.append(&zero_phase_circuit(-r.phi, &qubits, n)?);
        c.append(&s);
    }
    Ok(c.with_ancillas(0..n - v.m()))
}

/// Largest deviation of `H_{M−1} ⋯ H_0 V` from the identity embedding.
pub fn reflection_defect(v: &Isometry) -> f64 {
    let mut w = v.matrix().clone();
    for r in householder_reflections(v) {
        w = r.matrix() * w;
    }
    frobenius(&(w - crate::numerics::identity_embedding(v.matrix().nrows(), v.matrix().ncols())))
}
