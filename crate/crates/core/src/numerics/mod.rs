//! Dense complex linear algebra used by the synthesis routines.

mod decomp;
mod extension;
mod single_qubit;

pub(crate) use decomp::state_qubits;
pub use decomp::{cosine_sine_decompose, cs_matrix, schmidt_decompose, CsdFactors, SchmidtData};
pub use extension::{unitary_extension_max_unit_eigs, unitary_from_matching_gram};

pub use single_qubit::{
    axis_decompose, r_rx_decompose, Axes, RRxFactors, ZyzFactors,
};
pub(crate) use single_qubit::{decompose2, matrix2, r_rx2};

use nalgebra::{DMatrix, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix, column-major storage.
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for accepting user-supplied unitaries and isometries.
pub const INPUT_TOL: f64 = 1e-8;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major `(re, im)` pairs.
pub fn from_rows(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_row_iterator(rows, cols, entries.iter().map(|&(a, b)| c64(a, b)))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖M†M − 1‖_F. Zero for isometries (and unitaries).
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    frobenius(&(g - CMatrix::identity(m.ncols(), m.ncols())))
}

/// Fails unless `m` is square and unitary within `tol`.
pub fn check_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    check_isometry(m, tol)
}

/// Fails unless V†V = 1 within `tol`.
pub fn check_isometry(m: &CMatrix, tol: f64) -> Result<()> {
    check_finite(m)?;
    if m.ncols() > m.nrows() {
        return Err(Error::Dimension(format!(
            "an isometry needs at least as many rows as columns, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let d = unitarity_defect(m);
    if d > tol {
        return Err(Error::invariant("V†V differs from the identity", d));
    }
    Ok(())
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Dimension("matrix has non-finite entries".into()))
    }
}

/// log2 of `d` if it is a power of two.
pub fn log2_exact(d: usize) -> Option<usize> {
    if d.is_power_of_two() {
        Some(d.trailing_zeros() as usize)
    } else {
        None
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// The rows×cols matrix with ones on the diagonal.
pub fn identity_embedding(rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| if i == j { ONE } else { ZERO })
}

fn project_out(q: &CMatrix, used: usize, v: &mut nalgebra::DVector<Complex64>) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for k in 0..used {
            let col = q.column(k);
            let p = col.dotc(v);
            *v -= col * p;
        }
    }
}

/// Extends orthonormal columns to a full unitary. New columns come from
/// standard basis vectors, picking the one with the largest residual first.
pub fn orthonormal_completion(v: &CMatrix) -> CMatrix {
    let n = v.nrows();
    let r = v.ncols();
    assert!(r <= n);
    let mut q = CMatrix::zeros(n, n);
    let mut used = 0;
    for j in 0..r {
        let mut col = v.column(j).into_owned();
        project_out(&q, used, &mut col);
        let nrm = col.norm();
        if nrm > 1e-10 {
            q.set_column(used, &(col / c64(nrm, 0.0)));
            used += 1;
        }
    }
    while used < n {
        let mut best = 0;
        let mut best_res = -1.0;
        for i in 0..n {
            let captured: f64 = (0..used).map(|k| q[(i, k)].norm_sqr()).sum();
            let res = 1.0 - captured;
            if res > best_res + 1e-12 {
                best_res = res;
                best = i;
            }
        }
        let mut col = nalgebra::DVector::from_element(n, ZERO);
        col[best] = ONE;
        project_out(&q, used, &mut col);
        let nrm = col.norm();
        q.set_column(used, &(col / c64(nrm, 0.0)));
        used += 1;
    }
    q
}

/// Thin SVD `a = U Σ V†`, singular values in decreasing order.
///
/// The default convergence threshold of the bidiagonal iteration can stop
/// early on matrices with exactly vanishing singular values, so the
/// factorization is checked and recomputed more tightly when it does not
/// reproduce `a`.
pub fn svd(a: &CMatrix) -> Svd {
    let scale = frobenius(a).max(1.0);
    let check = |f: &Svd| frobenius(&(&f.u * CMatrix::from_diagonal(&f.singular_values.map(|s| c64(s, 0.0))) * &f.v_t - a));
    let from = |d: SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>| Svd {
        u: d.u.expect("u requested"),
        singular_values: d.singular_values,
        v_t: d.v_t.expect("v_t requested"),
    };
    let first = from(SVD::new(a.clone(), true, true));
    let mut best_err = check(&first);
    let mut best = first;
    if best_err <= 1e-13 * scale {
        return best;
    }
    let mut candidates = Vec::new();
    if let Some(d) = SVD::try_new(a.clone(), true, true, 1e-17, 100_000) {
        candidates.push(from(d));
    }
    if let Some(d) = SVD::try_new(a.adjoint(), true, true, 1e-17, 100_000) {
        let t = from(d);
        candidates.push(Svd {
            u: t.v_t.adjoint(),
            singular_values: t.singular_values,
            v_t: t.u.adjoint(),
        });
    }
    for f in candidates {
        let err = check(&f);
        if err < best_err {
            best_err = err;
            best = f;
        }
    }
    best.sorted()
}

/// Result of [`svd`].
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: nalgebra::DVector<f64>,
    pub v_t: CMatrix,
}

impl Svd {
    fn sorted(self) -> Svd {
        let k = self.singular_values.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| self.singular_values[b].total_cmp(&self.singular_values[a]));
        Svd {
            u: CMatrix::from_fn(self.u.nrows(), k, |i, j| self.u[(i, order[j])]),
            singular_values: nalgebra::DVector::from_fn(k, |j, _| self.singular_values[order[j]]),
            v_t: CMatrix::from_fn(k, self.v_t.ncols(), |i, j| self.v_t[(order[i], j)]),
        }
    }
}

/// Orthonormal basis (as columns) of the nullspace of `a`.
pub fn nullspace_basis(a: &CMatrix) -> CMatrix {
    let c = a.ncols();
    if a.nrows() == 0 || frobenius(a) == 0.0 {
        return CMatrix::identity(c, c);
    }
    let svd = svd(a);
    let vt = svd.v_t;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-10 * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let row_space = vt.rows(0, rank).adjoint();
    let full = orthonormal_completion(&row_space);
    full.columns(rank, c - rank).into_owned()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in decreasing
/// order with matching eigenvector columns.
pub fn hermitian_eig(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (h + h.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Square root of a positive semidefinite matrix.
pub fn psd_sqrt(e: &CMatrix) -> Result<CMatrix> {
    if e.nrows() != e.ncols() {
        return Err(Error::Dimension("psd_sqrt needs a square matrix".into()));
    }
    let herm = frobenius(&(e - e.adjoint()));
    if herm > INPUT_TOL {
        return Err(Error::invariant("matrix is not Hermitian", herm));
    }
    let (vals, vecs) = hermitian_eig(e);
    if let Some(&min) = vals.last() {
        if min < -INPUT_TOL {
            return Err(Error::invariant("matrix is not PSD", -min));
        }
    }
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c64(l.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// Eigenvalues and an orthonormal eigenbasis (columns) of a unitary matrix.
pub fn unitary_eig(u: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    check_unitary(u, INPUT_TOL)?;
    let n = u.nrows();
    if let Some(schur) = Schur::try_new(u.clone(), 1e-15, 10_000) {
        let (q, t) = schur.unpack();
        // a unitary has a diagonal Schur form; anything else means the
        // iteration stalled
        let off = frobenius(&(&t - CMatrix::from_diagonal(&t.diagonal())));
        if off < 1e-9 {
            let vals = (0..n).map(|i| t[(i, i)]).collect();
            return Ok((vals, q));
        }
    }
    // Fallback: diagonalize the Hermitian part, then the anti-Hermitian
    // part inside each cluster of the first.
    let re = (u + u.adjoint()) * c64(0.5, 0.0);
    let im = (u - u.adjoint()) * c64(0.0, -0.5);
    let (rvals, mut vecs) = hermitian_eig(&re);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (rvals[end - 1] - rvals[end]).abs() < 1e-7 {
            end += 1;
        }
        if end - start > 1 {
            let block = vecs.columns(start, end - start).into_owned();
            let sub = block.adjoint() * &im * &block;
            let (_, w) = hermitian_eig(&sub);
            vecs.columns_mut(start, end - start).copy_from(&(block * w));
        }
        start = end;
    }
    let d = vecs.adjoint() * u * &vecs;
    let vals = (0..n).map(|i| d[(i, i)]).collect();
    Ok((vals, vecs))
}

/// Deterministic generator used for every seeded random draw.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    })
}

/// Haar-random isometry: orthonormalized complex Gaussian columns with
/// the QR phases fixed.
pub fn random_isometry_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(cols <= rows);
    let g = gaussian_matrix(rows, cols, rng);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..rows {
            out[(i, j)] *= ph;
        }
    }
    out
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    random_isometry_matrix(dim, dim, rng)
}

/// Random unit column vector of length `dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, 1, rng);
    let n = frobenius(&g);
    g / c64(n, 0.0)
}

/// Random full-rank density matrix (normalized Wishart draw).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}
