//! Quantum Shannon decomposition.

use num_complex::Complex64;

use super::multiplex::demultiplex_rotation;
use super::two_qubit::{two_qubit_ancilla_first, two_qubit_unitary};
use super::Isometry;
use crate::circuit::{Axis, Circuit};
use crate::error::{Error, Result};
use crate::numerics::{
    check_unitary, cosine_sine_decompose, decompose2, log2_exact, matrix2, orthonormal_completion,
    unitary_eig, Axes, CMatrix, INPUT_TOL,
};

/// C-NOT ceiling of the recursion: 0, 3, then `4·c(n−1) + 3·2^{n−1}`.
pub fn qsd_cnot_bound(n: usize) -> usize {
    match n {
        0 | 1 => 0,
        2 => 3,
        _ => 4 * qsd_cnot_bound(n - 1) + 3 * (1 << (n - 1)),
    }
}

/// Circuit implementing the 2^n × 2^n unitary `u` up to global phase.
pub fn qsd(u: &CMatrix) -> Result<Circuit> {
    check_unitary(u, INPUT_TOL)?;
    let n = log2_exact(u.nrows())
        .ok_or_else(|| Error::Dimension(format!("dimension {} is not a power of two", u.nrows())))?;
    let qubits: Vec<usize> = (0..n).collect();
    qsd_on(u, &qubits, n)
}

/// QSD of `u` placed on `qubits` (first most significant) of a
/// `num_qubits`-wide circuit.
pub(crate) fn qsd_on(u: &CMatrix, qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    let mut c = Circuit::new(num_qubits);
    match qubits.len() {
        0 => {}
        1 => {
            let f = decompose2(&matrix2(u), Axes::Zyz);
            c.extend(f.gates(qubits[0], 1e-12));
        }
        2 => {
            let body = two_qubit_unitary(u)?;
            c.append_on(&body, qubits);
        }
        _ => {
            let csd = cosine_sine_decompose(u)?;
            let rest = &qubits[1..];
            let (l1, l2) = &csd.left_blocks;
            let (r1, r2) = &csd.right_blocks;
            let ry: Vec<f64> = csd.angles.iter().map(|t| -2.0 * t).collect();
            c.append(&demultiplex_pair(r1, r2, qubits, num_qubits)?);
            c.append(&demultiplex_rotation(&ry, Axis::Y, rest, qubits[0], num_qubits)?);
            c.append(&demultiplex_pair(l1, l2, qubits, num_qubits)?);
        }
    }
    Ok(c)
}

/// `a ⊕ b = (V ⊕ V)(D ⊕ D†)(W ⊕ W)`, emitted as W, a multiplexed Rz on
/// the first qubit, then V.
fn demultiplex_pair(a: &CMatrix, b: &CMatrix, qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    let (vals, v) = unitary_eig(&(a * b.adjoint()))?;
    let d: Vec<Complex64> = vals.iter().map(|l| Complex64::from_polar(1.0, l.arg() / 2.0)).collect();
    let dmat = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
    let w = dmat * v.adjoint() * b;
    let rz: Vec<f64> = vals.iter().map(|l| l.arg()).collect();
    let rest = &qubits[1..];
    let mut c = qsd_on(&w, rest, num_qubits)?;
    c.append(&demultiplex_rotation(&rz, Axis::Z, rest, qubits[0], num_qubits)?);
    c.append(&qsd_on(&v, rest, num_qubits)?);
    Ok(c)
}

/// Completes the isometry to a unitary and decomposes that. The `n − m`
/// most significant qubits are ancillas.
pub fn qsd_isometry(v: &Isometry) -> Result<Circuit> {
    let (m, n) = (v.m(), v.n());
    let u = orthonormal_completion(v.matrix());
    let c = if n == 2 && m == 1 {
        two_qubit_ancilla_first(&u)?
    } else {
        qsd(&u)?
    };
    Ok(c.with_ancillas(0..n - m))
}
