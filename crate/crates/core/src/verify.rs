//! Numerical checks of compiled circuits against their sources.

use num_complex::Complex64;

use crate::channel::ChoiState;
use crate::circuit::{circuit_isometry, Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{c64, frobenius, CMatrix};

/// `min_φ ‖a − e^{iφ} b‖_F`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PhaseDistance(f64);

impl PhaseDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Distance up to a global phase, with the optimal phase `arg tr(a†b)`.
pub fn phase_invariant_distance(a: &CMatrix, b: &CMatrix) -> Result<PhaseDistance> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{}x{} against {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(PhaseDistance(phase_distance(a, b)))
}

pub(crate) fn phase_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() == 0.0 {
        c64(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -overlap.arg())
    };
    let d2: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum();
    d2.sqrt()
}

/// Kraus operators of the circuit grouped by measurement outcome. Each
/// operator maps the inputs to the output wires (neither measured nor
/// traced); one operator per traced-wire basis value.
fn branch_kraus(c: &Circuit) -> Result<Vec<Vec<CMatrix>>> {
    let n = c.num_qubits();
    let iso = circuit_isometry(&c.unitary_part())?;
    let outs = c.output_qubits();
    let traced: Vec<usize> = c.traced_qubits().into_iter().collect();
    let measures: Vec<(usize, usize)> = c
        .gates()
        .iter()
        .filter_map(|g| match *g {
            Gate::Measure { target, classical_bit } => Some((target, classical_bit)),
            _ => None,
        })
        .collect();
    let nbits = measures.iter().map(|&(_, b)| b + 1).max().unwrap_or(0);
    let bit = |r: usize, q: usize| (r >> (n - 1 - q)) & 1;
    let pack = |r: usize, wires: &[usize]| wires.iter().fold(0, |acc, &q| (acc << 1) | bit(r, q));

    let dout = 1 << outs.len();
    let din = iso.ncols();
    let mut ops = vec![vec![CMatrix::zeros(dout, din); 1 << traced.len()]; 1 << nbits];
    for r in 0..iso.nrows() {
        let mut j = 0;
        for &(q, b) in &measures {
            j |= bit(r, q) << (nbits - 1 - b);
        }
        let t = pack(r, &traced);
        let o = pack(r, &outs);
        for x in 0..din {
            ops[j][t][(o, x)] = iso[(r, x)];
        }
    }
    Ok(ops)
}

/// Choi state of the channel realized by a circuit whose only
/// non-unitary gates are trace-outs.
pub fn circuit_choi(c: &Circuit) -> Result<ChoiState> {
    if c.gates().iter().any(|g| matches!(g, Gate::Measure { .. })) {
        return Err(Error::Unsupported(
            "measurement in a channel circuit; use instrument_distribution".into(),
        ));
    }
    Ok(circuit_branch_chois(c)?.remove(0))
}

/// Choi matrix of the map realized by each measurement outcome, indexed
/// by the outcome read from the classical bits (bit 0 most significant).
pub fn circuit_branch_chois(c: &Circuit) -> Result<Vec<ChoiState>> {
    let branches = branch_kraus(c)?;
    Ok(branches
        .iter()
        .map(|ops| ChoiState::from_matrix_unchecked(crate::channel::choi_of(ops), ops[0].ncols()))
        .collect())
}

/// Outcome probabilities and normalized post-measurement states for input
/// `rho`. Post-states live on the output wires; a zero matrix stands in
/// for outcomes of probability zero.
pub fn instrument_distribution(c: &Circuit, rho: &CMatrix) -> Result<(Vec<f64>, Vec<CMatrix>)> {
    if c.measured_qubits().is_empty() {
        return Err(Error::Precondition("circuit has no measurement".into()));
    }
    let branches = branch_kraus(c)?;
    let din = branches[0][0].ncols();
    if rho.shape() != (din, din) {
        return Err(Error::Dimension(format!(
            "input state is {}x{} but the circuit takes dimension {din}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut probs = Vec::with_capacity(branches.len());
    let mut states = Vec::with_capacity(branches.len());
    for ops in &branches {
        let dout = ops[0].nrows();
        let mut sigma = CMatrix::zeros(dout, dout);
        for a in ops {
            sigma += a * rho * a.adjoint();
        }
        let p = sigma.trace().re;
        probs.push(p.max(0.0));
        if p > 1e-14 {
            states.push(sigma / c64(p, 0.0));
        } else {
            states.push(CMatrix::zeros(dout, dout));
        }
    }
    Ok((probs, states))
}

/// Frobenius distance between two Choi states.
pub fn choi_distance(a: &ChoiState, b: &ChoiState) -> Result<f64> {
    if a.matrix().shape() != b.matrix().shape() {
        return Err(Error::Dimension("Choi states of different size".into()));
    }
    Ok(frobenius(&(a.matrix() - b.matrix())))
}
