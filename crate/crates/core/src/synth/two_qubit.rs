//! Optimal two-qubit synthesis through the magic basis.
//!
//! A unitary is matched against a sequence of template circuits with 0,
//! 1, 2 and 3 C-NOTs. For a template `T` whose invariant spectrum agrees
//! with that of `U`, local unitaries `K1`, `K2` with `U = K1 T K2` follow
//! from simultaneously diagonalizing the two symmetric matrices
//! `M = (B†UB)ᵀ(B†UB)` by real orthogonal transforms.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::circuit::{circuit_matrix, Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{c64, check_unitary, decompose2, Axes, CMatrix, INPUT_TOL, ONE, ZERO};
use crate::verify::phase_distance;

/// Residual accepted when matching a template.
const MATCH_TOL: f64 = 1e-9;
/// Largest eigenvalue mismatch for which a template is attempted at all.
const SPECTRUM_TOL: f64 = 1e-6;
const MIXES: [f64; 3] = [0.618_033_988_749_895, 1.414_213_562_373_095, 0.271_828_182_845_904];

fn magic() -> CMatrix {
    let h = 1.0 / 2f64.sqrt();
    let z = ZERO;
    let o = c64(h, 0.0);
    let i = c64(0.0, h);
    CMatrix::from_row_slice(
        4,
        4,
        &[o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i],
    )
}

fn to_su4(u: &CMatrix) -> CMatrix {
    let det = u.determinant();
    u * Complex64::from_polar(1.0, -det.arg() / 4.0)
}

/// `M = U_Bᵀ U_B` together with `U_B`.
fn gamma(u: &CMatrix, b: &CMatrix) -> (CMatrix, CMatrix) {
    let ub = b.adjoint() * u * b;
    (ub.transpose() * &ub, ub)
}

/// Real orthogonal `Q` (columns) and eigenvalues with `M = Q Λ Qᵀ`, via
/// a generic real combination of Re M and Im M.
fn real_eig(m: &CMatrix, mix: f64) -> (Vec<Complex64>, DMatrix<f64>) {
    let a = DMatrix::from_fn(4, 4, |i, j| {
        let s = (m[(i, j)] + m[(j, i)]) * 0.5;
        s.re + mix * s.im
    });
    let eig = SymmetricEigen::new(a);
    let q = eig.eigenvectors;
    let qc = q.map(|x| c64(x, 0.0));
    let d = qc.transpose() * m * &qc;
    ((0..4).map(|k| d[(k, k)]).collect(), q)
}

/// Splits a 4×4 local unitary into `a ⊗ b`.
fn local_factors(k: &CMatrix) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
    let block = |r: usize, s: usize| {
        Matrix2::new(
            k[(2 * r, 2 * s)],
            k[(2 * r, 2 * s + 1)],
            k[(2 * r + 1, 2 * s)],
            k[(2 * r + 1, 2 * s + 1)],
        )
    };
    let mut best = (0, 0);
    let mut best_norm = -1.0;
    for r in 0..2 {
        for s in 0..2 {
            let n = block(r, s).norm();
            if n > best_norm {
                best_norm = n;
                best = (r, s);
            }
        }
    }
    let bm = block(best.0, best.1) / c64(best_norm / 2f64.sqrt(), 0.0);
    let mut a = Matrix2::zeros();
    for r in 0..2 {
        for s in 0..2 {
            a[(r, s)] = (bm.adjoint() * block(r, s)).trace() / c64(2.0, 0.0);
        }
    }
    (a, bm)
}

fn push_local(c: &mut Circuit, m: &Matrix2<Complex64>, q: usize) {
    let f = decompose2(m, Axes::Zyz);
    c.extend(f.gates(q, 1e-12));
}

/// Locals `(K1, K2)` with `u ≈ K1 t K2` up to phase, if the spectra match.
fn match_template(u: &CMatrix, template: &Circuit) -> Option<(Circuit, Circuit, f64)> {
    let t = &circuit_matrix(template).expect("unitary template");
    let b = magic();
    let us = to_su4(u);
    let (mu, ub) = gamma(&us, &b);
    let mut best: Option<(Circuit, Circuit, f64)> = None;
    for sign in [ONE, c64(0.0, 1.0)] {
        let ts = to_su4(t) * sign;
        let (mt, tb) = gamma(&ts, &b);
        for &mix in &MIXES {
            let (lu, mut qu) = real_eig(&mu, mix);
            let (lt, qt) = real_eig(&mt, mix);
            // pair each eigenvalue of M_U with the nearest unused one of M_T
            let mut used = [false; 4];
            let mut perm = [0usize; 4];
            let mut worst: f64 = 0.0;
            for k in 0..4 {
                let (j, d) = (0..4)
                    .filter(|&j| !used[j])
                    .map(|j| (j, (lu[k] - lt[j]).norm()))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("four eigenvalues");
                used[j] = true;
                perm[k] = j;
                worst = worst.max(d);
            }
            if worst > SPECTRUM_TOL {
                continue;
            }
            let qt_p = DMatrix::from_fn(4, 4, |i, k| qt[(i, perm[k])]);
            if (&qt_p * qu.transpose()).determinant() < 0.0 {
                for i in 0..4 {
                    qu[(i, 3)] = -qu[(i, 3)];
                }
            }
            let o2 = (&qt_p * qu.transpose()).map(|x| c64(x, 0.0));
            let o1 = (&ub * o2.transpose() * tb.adjoint()).map(|z| c64(z.re, 0.0));
            let k1 = &b * o1 * b.adjoint();
            let k2 = &b * o2 * b.adjoint();
            let (a1, b1) = local_factors(&k1);
            let (a2, b2) = local_factors(&k2);
            let mut pre = Circuit::new(2);
            push_local(&mut pre, &a2, 0);
            push_local(&mut pre, &b2, 1);
            let mut post = Circuit::new(2);
            push_local(&mut post, &a1, 0);
            push_local(&mut post, &b1, 1);
            let mut whole = pre.clone();
            whole.append(template);
            whole.append(&post);
            let res = phase_distance(&circuit_matrix(&whole).expect("unitary circuit"), u);
            if best.as_ref().is_none_or(|b| res < b.2) {
                best = Some((pre, post, res));
            }
            if res <= MATCH_TOL {
                return best;
            }
        }
    }
    best
}

fn try_template(u: &CMatrix, gates: Vec<Gate>) -> Option<(Circuit, f64)> {
    let mut t = Circuit::new(2);
    t.extend(gates);
    let (pre, post, res) = match_template(u, &t)?;
    let mut out = pre;
    out.append(&t);
    out.append(&post);
    Some((out, res))
}

/// Eigenphases of M for `u`, shifted so they sum to zero.
fn spectrum_phases(u: &CMatrix) -> Vec<f64> {
    let (m, _) = gamma(&to_su4(u), &magic());
    let (vals, _) = real_eig(&m, MIXES[0]);
    let mut ph: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    loop {
        let s: f64 = ph.iter().sum();
        if s > 0.5 {
            let i = (0..4).max_by(|&a, &b| ph[a].total_cmp(&ph[b])).unwrap();
            ph[i] -= two_pi;
        } else if s < -0.5 {
            let i = (0..4).min_by(|&a, &b| ph[a].total_cmp(&ph[b])).unwrap();
            ph[i] += two_pi;
        } else {
            break;
        }
    }
    ph
}

fn cnot_templates(u: &CMatrix, max_cnots: usize) -> Vec<Vec<Vec<Gate>>> {
    let ph = spectrum_phases(u);
    let mut by_count: Vec<Vec<Vec<Gate>>> = vec![vec![vec![]], vec![vec![Gate::cnot(0, 1)]]];
    // two C-NOTs: C01 (Rx(θ1) ⊗ Rz(θ2)) C01 with M-spectrum {e^{±iφ}, e^{±iψ}}
    let mut two = Vec::new();
    for k in 0..4 {
        for l in 0..4 {
            if k != l {
                let (p, q) = (ph[k], ph[l]);
                two.push(vec![
                    Gate::cnot(0, 1),
                    Gate::rx((p + q) / 2.0, 0),
                    Gate::rz((p - q) / 2.0, 1),
                    Gate::cnot(0, 1),
                ]);
            }
        }
    }
    by_count.push(two);
    // three C-NOTs realize the canonical gate exp(i(a XX + b YY + c ZZ))
    let mut three = Vec::new();
    for perm in PERMS {
        let l: Vec<f64> = perm.iter().map(|&i| ph[i] / 2.0).collect();
        let a = (l[0] + l[2]) / 2.0;
        let b = (l[1] + l[2]) / 2.0;
        let c = (l[0] + l[1]) / 2.0;
        three.push(vec![
            Gate::cnot(1, 0),
            Gate::rz(FRAC_PI_2 - 2.0 * c, 0),
            Gate::ry(2.0 * a - FRAC_PI_2, 1),
            Gate::cnot(0, 1),
            Gate::ry(FRAC_PI_2 + 2.0 * b, 1),
            Gate::cnot(1, 0),
        ]);
    }
    by_count.push(three);
    by_count.truncate(max_cnots + 1);
    by_count
}

const PERMS: [[usize; 4]; 6] = [
    [0, 1, 2, 3],
    [0, 2, 1, 3],
    [1, 0, 2, 3],
    [1, 2, 0, 3],
    [2, 0, 1, 3],
    [2, 1, 0, 3],
];

/// Synthesizes with the fewest C-NOTs among at most `max_cnots`. Returns
/// `None` when no template up to that count matches.
pub(crate) fn synthesize_bounded(u: &CMatrix, max_cnots: usize) -> Option<Circuit> {
    let mut best: Option<(Circuit, f64)> = None;
    for group in cnot_templates(u, max_cnots) {
        for gates in group {
            if let Some((c, res)) = try_template(u, gates) {
                if res <= MATCH_TOL {
                    return Some(c);
                }
                if best.as_ref().is_none_or(|b| res < b.1) {
                    best = Some((c, res));
                }
            }
        }
    }
    // accept a slightly worse 3-C-NOT match rather than failing outright
    best.filter(|(_, r)| max_cnots >= 3 && *r <= 1e-7).map(|(c, _)| c)
}

/// Circuit with at most three C-NOTs on qubits 0 and 1 implementing `u`
/// up to global phase.
pub fn two_qubit_unitary(u: &CMatrix) -> Result<Circuit> {
    if u.shape() != (4, 4) {
        return Err(Error::Dimension(format!("expected 4x4, got {}x{}", u.nrows(), u.ncols())));
    }
    check_unitary(u, INPUT_TOL)?;
    synthesize_bounded(u, 3).ok_or_else(|| Error::Numerical("two-qubit synthesis did not converge".into()))
}

/// Circuit on two qubits that agrees with `u` on inputs whose qubit 0 is
/// |0⟩, using at most two C-NOTs.
pub(crate) fn two_qubit_ancilla_first(u: &CMatrix) -> Result<Circuit> {
    check_unitary(u, INPUT_TOL)?;
    // V = U·D† with D = diag(e^{ix}, 1, e^{-ix}, 1) has a two-C-NOT
    // circuit iff tr(V (Y⊗Y) Vᵀ (Y⊗Y)) is real; that trace is
    // e^{-ix}·a + e^{ix}·b
    let yy = CMatrix::from_fn(4, 4, |i, j| if i + j == 3 { c64(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0) } else { ZERO });
    let part = |k: usize| CMatrix::from_fn(4, 4, |i, j| if i + j == 3 && (i == k || j == k) { yy[(i, j)] } else { ZERO });
    // the trace only has a meaning for det U = 1
    let us = to_su4(u);
    let a = (&us * part(0) * us.transpose() * &yy).trace();
    let b = (&us * part(1) * us.transpose() * &yy).trace();
    let x = (a.im + b.im).atan2(a.re - b.re);
    let mut best: Option<Circuit> = None;
    for xs in [x, x + std::f64::consts::PI] {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from_polar(1.0, xs),
            ONE,
            Complex64::from_polar(1.0, -xs),
            ONE,
        ]));
        // U = V·D and D acts as Rz(xs) on qubit 1 when qubit 0 is |0⟩
        let cdag = &us * d.adjoint();
        if let Some(body) = synthesize_bounded(&cdag, 2) {
            let mut c = Circuit::new(2);
            c.push(Gate::rz(xs, 1));
            c.append(&body);
            if best.as_ref().is_none_or(|b| c.cnot_count() < b.cnot_count()) {
                best = Some(c);
            }
        }
    }
    match best {
        Some(c) => Ok(c),
        None => two_qubit_unitary(u),
    }
}
