use super::{
    check_isometry, frobenius, svd, identity_embedding, nullspace_basis, orthonormal_completion,
    CMatrix, INPUT_TOL,
};
use crate::error::{Error, Result};

/// A unitary `U` with `U x = y`, given `x†x = y†y`.
///
/// Solved as an orthogonal Procrustes problem: with `y x† = P Σ Q†`,
/// `U = P Q†` maximizes `Re tr(U x y†)`, which reaches `‖y‖²` exactly when
/// the Gram matrices agree.
pub fn unitary_from_matching_gram(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "x is {}x{} but y is {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    let (n, m) = x.shape();
    let gram = frobenius(&(x.adjoint() * x - y.adjoint() * y));
    if gram > INPUT_TOL {
        return Err(Error::Precondition(format!(
            "Gram matrices differ by {gram:.3e}"
        )));
    }
    if m == 0 || n == 0 {
        return Ok(CMatrix::identity(n, n));
    }
    let f = svd(&(y * x.adjoint()));
    Ok(f.u * f.v_t)
}

/// Unitary `U` with `U|i⟩ = v|i⟩` for `i < M` and at least `N − M`
/// eigenvalues equal to one.
pub fn unitary_extension_max_unit_eigs(v: &CMatrix) -> Result<CMatrix> {
    check_isometry(v, INPUT_TOL)?;
    let (n, m) = v.shape();
    if m == n {
        return Ok(v.clone());
    }
    // vectors f with V†f equal to the first M components of f
    let a = v.adjoint() - identity_embedding(m, n);
    // at least N - M of them; all are kept fixed
    let x = nullspace_basis(&a);
    let x2 = x.rows(m, n - m).into_owned();

    // rows of w0 span the orthogonal complement of range(V)
    let full = orthonormal_completion(v);
    let w0 = full.columns(m, n - m).adjoint();
    let t = unitary_from_matching_gram(&(&w0 * &x), &x2)?;
    let w = t * w0;

    let mut u = CMatrix::zeros(n, n);
    u.view_mut((0, 0), (n, m)).copy_from(v);
    u.view_mut((0, m), (n, n - m)).copy_from(&w.adjoint());
    Ok(u)
}
