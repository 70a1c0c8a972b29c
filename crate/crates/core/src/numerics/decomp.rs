use super::{c64, check_unitary, frobenius, log2_exact, svd, CMatrix, INPUT_TOL};
use crate::error::{Error, Result};

/// `state = Σ σ_i |l_i⟩ ⊗ |r_i⟩`.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    /// Non-increasing, one per column of the bases.
    pub coefficients: Vec<f64>,
    pub left_basis: CMatrix,
    pub right_basis: CMatrix,
}

impl SchmidtData {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let (dl, dr) = (self.left_basis.nrows(), self.right_basis.nrows());
        let mut out = CMatrix::zeros(dl * dr, 1);
        for (i, &s) in self.coefficients.iter().enumerate() {
            let l = self.left_basis.column(i);
            let r = self.right_basis.column(i);
            for a in 0..dl {
                for b in 0..dr {
                    out[(a * dr + b, 0)] += l[a] * r[b] * s;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition with the first factor on qubits `0..k`.
pub fn schmidt_decompose(state: &CMatrix, k: usize) -> Result<SchmidtData> {
    let n = state_qubits(state)?;
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!(
            "split {k} must lie between 1 and {} for {n} qubits",
            n.saturating_sub(1)
        )));
    }
    let (dl, dr) = (1usize << k, 1usize << (n - k));
    let psi = CMatrix::from_fn(dl, dr, |a, b| state[(a * dr + b, 0)]);
    let svd = svd(&psi);
    let u = svd.u;
    let vt = svd.v_t;
    Ok(SchmidtData {
        coefficients: svd.singular_values.iter().copied().collect(),
        left_basis: u,
        // rows of V† are the conjugated right factors
        right_basis: vt.transpose(),
    })
}

/// Number of qubits of a normalized column state.
pub(crate) fn state_qubits(state: &CMatrix) -> Result<usize> {
    if state.ncols() != 1 {
        return Err(Error::Dimension("a state must be a single column".into()));
    }
    let n = log2_exact(state.nrows())
        .ok_or_else(|| Error::Dimension(format!("state length {} is not a power of two", state.nrows())))?;
    let d = (frobenius(state) - 1.0).abs();
    if d > 1e-10 {
        return Err(Error::invariant("state is not normalized", d));
    }
    Ok(n)
}

/// `u = (L1 ⊕ L2) · CS(θ) · (R1 ⊕ R2)` with
/// `CS(θ) = [[diag cos θ, −diag sin θ], [diag sin θ, diag cos θ]]`.
#[derive(Clone, Debug)]
pub struct CsdFactors {
    pub left_blocks: (CMatrix, CMatrix),
    pub angles: Vec<f64>,
    pub right_blocks: (CMatrix, CMatrix),
}

fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// The cosine-sine middle factor for the given angles.
pub fn cs_matrix(angles: &[f64]) -> CMatrix {
    let n = angles.len();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for (j, &t) in angles.iter().enumerate() {
        let (s, c) = t.sin_cos();
        out[(j, j)] = c64(c, 0.0);
        out[(n + j, n + j)] = c64(c, 0.0);
        out[(j, n + j)] = c64(-s, 0.0);
        out[(n + j, j)] = c64(s, 0.0);
    }
    out
}

impl CsdFactors {
    pub fn reconstruct(&self) -> CMatrix {
        direct_sum(&self.left_blocks.0, &self.left_blocks.1)
            * cs_matrix(&self.angles)
            * direct_sum(&self.right_blocks.0, &self.right_blocks.1)
    }
}

/// Cosine-sine decomposition of an even-dimensional unitary; angles lie
/// in `[0, π/2]`.
pub fn cosine_sine_decompose(u: &CMatrix) -> Result<CsdFactors> {
    check_unitary(u, INPUT_TOL)?;
    let dim = u.nrows();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::Dimension(format!("CSD needs an even dimension, got {dim}")));
    }
    let n = dim / 2;
    let u00 = u.view((0, 0), (n, n)).into_owned();
    let u01 = u.view((0, n), (n, n)).into_owned();
    let u10 = u.view((n, 0), (n, n)).into_owned();
    let u11 = u.view((n, n), (n, n)).into_owned();

    // u00 = L1 C R1, cosines ascending
    let svd = svd(&u00);
    let su = svd.u;
    let svt = svd.v_t;
    let l1 = CMatrix::from_fn(n, n, |i, j| su[(i, n - 1 - j)]);
    let r1 = CMatrix::from_fn(n, n, |i, j| svt[(n - 1 - i, j)]);
    let cos: Vec<f64> = (0..n)
        .map(|j| svd.singular_values[n - 1 - j].min(1.0))
        .collect();

    // u10 R1† = L2 S, sines descending
    let x = &u10 * r1.adjoint();
    let qr = x.qr();
    let mut l2 = qr.q();
    let rr = qr.r();
    let mut sin = vec![0.0; n];
    for j in 0..n {
        let d = rr[(j, j)];
        sin[j] = d.norm();
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            let mut col = l2.column_mut(j);
            col *= ph;
        }
    }

    // −L1†U01 = S R2 and L2†U11 = C R2, so S·(−L1†U01) + C·(L2†U11) = R2
    let from_top = -(l1.adjoint() * &u01);
    let from_bottom = l2.adjoint() * &u11;
    let mut r2 = CMatrix::zeros(n, n);
    for j in 0..n {
        let row = from_top.row(j) * c64(sin[j], 0.0) + from_bottom.row(j) * c64(cos[j], 0.0);
        r2.set_row(j, &row);
    }
    let angles = (0..n).map(|j| sin[j].atan2(cos[j])).collect();
    Ok(CsdFactors {
        left_blocks: (l1, l2),
        angles,
        right_blocks: (r1, r2),
    })
}
