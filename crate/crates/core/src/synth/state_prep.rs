//! State preparation from the Schmidt decomposition.

use super::qsd::qsd_on;
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::numerics::{
    c64, decompose2, orthonormal_completion, schmidt_decompose, Axes, CMatrix,
};
use crate::numerics::state_qubits;

const RANK_TOL: f64 = 1e-12;

/// Circuit mapping |0…0⟩ to `psi` up to global phase. Every qubit is
/// declared an ancilla, so `circuit_isometry` returns `psi` as a column.
pub fn state_prep_schmidt(psi: &CMatrix) -> Result<Circuit> {
    let n = state_qubits(psi)?;
    let qubits: Vec<usize> = (0..n).collect();
    Ok(prep_on(psi, &qubits, n)?.with_ancillas(0..n))
}

/// Preparation circuit for `psi` on `qubits` (first most significant).
pub(crate) fn prep_on(psi: &CMatrix, qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    let n = qubits.len();
    let mut c = Circuit::new(num_qubits);
    match n {
        0 => return Ok(c),
        1 => {
            let (a, b) = (psi[(0, 0)], psi[(1, 0)]);
            let u = nalgebra::Matrix2::new(a, -b.conj(), b, a.conj());
            c.extend(decompose2(&u, Axes::Zyz).gates(qubits[0], 1e-12));
            return Ok(c);
        }
        _ => {}
    }
    let k = n.div_ceil(2);
    let (a_reg, b_reg) = qubits.split_at(k);
    let s = schmidt_decompose(psi, k)?;
    let r = s.rank(RANK_TOL).max(1);

    if r == 1 {
        let l = s.left_basis.columns(0, 1).into_owned();
        let rv = s.right_basis.columns(0, 1).into_owned();
        c.append(&prep_on(&l, a_reg, num_qubits)?);
        c.append(&prep_on(&rv, b_reg, num_qubits)?);
        return Ok(c);
    }

    // Σ σ_i |i⟩ on the smaller register, copied into the larger one
    let db = 1usize << b_reg.len();
    let norm: f64 = s.coefficients[..r].iter().map(|x| x * x).sum::<f64>().sqrt();
    let sigma = CMatrix::from_fn(db, 1, |i, _| {
        if i < r {
            c64(s.coefficients[i] / norm, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    c.append(&prep_on(&sigma, b_reg, num_qubits)?);
    let nb = b_reg.len();
    for j in 0..nb {
        if r > 1 << (nb - 1 - j) {
            c.push(Gate::cnot(b_reg[j], a_reg[k - nb + j]));
        }
    }
    let ua = orthonormal_completion(&s.left_basis.columns(0, r).into_owned());
    let ub = orthonormal_completion(&s.right_basis.columns(0, r).into_owned());
    c.append(&qsd_on(&ua, a_reg, num_qubits)?);
    c.append(&qsd_on(&ub, b_reg, num_qubits)?);
    Ok(c)
}
