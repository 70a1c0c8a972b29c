//! Euler-angle factorizations of 2×2 unitaries.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{c64, check_unitary, CMatrix, INPUT_TOL};
use crate::circuit::{r_matrix, rotation_matrix, Angle, Axis, Gate};
use crate::error::{Error, Result};

// Below this the smaller of cos/sin(γ/2) is treated as exactly zero.
const DEGENERATE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axes {
    Zyz,
    Xyx,
}

impl Axes {
    /// The outer axis (Z for ZYZ, X for XYX).
    pub fn outer(self) -> Axis {
        match self {
            Axes::Zyz => Axis::Z,
            Axes::Xyx => Axis::X,
        }
    }
}

/// `u = e^{iα} A(β) Y(γ) A(δ)` with `A` the outer axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZyzFactors {
    pub alpha: Angle,
    pub beta: Angle,
    pub gamma: Angle,
    pub delta: Angle,
    pub axes: Axes,
}

impl ZyzFactors {
    pub fn matrix(&self) -> CMatrix {
        let a = self.axes.outer();
        let m = rotation_matrix(a, self.beta.radians())
            * rotation_matrix(Axis::Y, self.gamma.radians())
            * rotation_matrix(a, self.delta.radians())
            * Complex64::from_polar(1.0, self.alpha.radians());
        from_matrix2(&m)
    }

    /// The other solution `(β+π, −γ, δ+π)`, equal up to a sign.
    pub fn alternative(&self) -> ZyzFactors {
        let pi = Angle::new(std::f64::consts::PI);
        ZyzFactors {
            alpha: self.alpha + pi,
            beta: self.beta + pi,
            gamma: -self.gamma,
            delta: self.delta + pi,
            axes: self.axes,
        }
    }

    /// Gates in time order (δ first), omitting rotations that are the
    /// identity up to phase.
    pub fn gates(&self, target: usize, tol: f64) -> Vec<Gate> {
        let a = self.axes.outer();
        [(a, self.delta), (Axis::Y, self.gamma), (a, self.beta)]
            .into_iter()
            .filter(|(_, t)| !t.is_trivial_up_to_phase(tol))
            .map(|(ax, t)| Gate::rotation(ax, t, target))
            .collect()
    }
}

/// `u = e^{iα} R(θ, φ) Rx(δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RRxFactors {
    pub alpha: Angle,
    pub theta: Angle,
    pub phi: Angle,
    pub delta: Angle,
}

impl RRxFactors {
    pub fn matrix(&self) -> CMatrix {
        let m = r_matrix(self.theta.radians(), self.phi.radians())
            * rotation_matrix(Axis::X, self.delta.radians())
            * Complex64::from_polar(1.0, self.alpha.radians());
        from_matrix2(&m)
    }
}

pub(crate) fn matrix2(u: &CMatrix) -> Matrix2<Complex64> {
    Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
}

fn from_matrix2(m: &Matrix2<Complex64>) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

fn check_2x2(u: &CMatrix) -> Result<()> {
    if u.shape() != (2, 2) {
        return Err(Error::Dimension(format!("expected 2x2, got {}x{}", u.nrows(), u.ncols())));
    }
    check_unitary(u, INPUT_TOL)
}

/// Euler factorization of a 2×2 unitary about Z-Y-Z or X-Y-X.
pub fn axis_decompose(u: &CMatrix, axes: Axes) -> Result<ZyzFactors> {
    check_2x2(u)?;
    Ok(decompose2(&matrix2(u), axes))
}

fn zyz(u: &Matrix2<Complex64>) -> (f64, f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let v = u * Complex64::from_polar(1.0, -alpha);
    // v = [[a, b], [-b*, a*]]; average for accuracy
    let a = (v[(0, 0)] + v[(1, 1)].conj()) * 0.5;
    let b = (v[(0, 1)] - v[(1, 0)].conj()) * 0.5;
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let (beta, delta) = if b.norm() < DEGENERATE {
        (2.0 * a.arg(), 0.0)
    } else if a.norm() < DEGENERATE {
        (2.0 * b.arg(), 0.0)
    } else {
        (a.arg() + b.arg(), a.arg() - b.arg())
    };
    (alpha, beta, gamma, delta)
}

pub(crate) fn decompose2(u: &Matrix2<Complex64>, axes: Axes) -> ZyzFactors {
    let (alpha, beta, gamma, delta) = match axes {
        Axes::Zyz => zyz(u),
        Axes::Xyx => {
            // W Rz W† = Rx and W Ry W† = Ry for W = Ry(-π/2)
            let w = rotation_matrix(Axis::Y, -std::f64::consts::FRAC_PI_2);
            zyz(&(w.adjoint() * u * w))
        }
    };
    ZyzFactors {
        alpha: Angle::new(alpha),
        beta: Angle::new(beta),
        gamma: Angle::new(gamma),
        delta: Angle::new(delta),
        axes,
    }
}

/// Factorization `u = e^{iα} R(θ, φ) Rx(δ)`.
pub fn r_rx_decompose(u: &CMatrix) -> Result<RRxFactors> {
    check_2x2(u)?;
    Ok(r_rx2(&matrix2(u)))
}

pub(crate) fn r_rx2(u: &Matrix2<Complex64>) -> RRxFactors {
    let f = decompose2(u, Axes::Xyx);
    let (beta, gamma, delta) = (f.beta.radians(), f.gamma.radians(), f.delta.radians());
    if (gamma / 2.0).sin().abs() < DEGENERATE {
        // u = e^{iα} Rx(β + δ) up to the sign carried by cos(γ/2)
        let sign = if (gamma / 2.0).cos() < 0.0 { std::f64::consts::PI } else { 0.0 };
        return RRxFactors {
            alpha: Angle::new(f.alpha.radians() + sign),
            theta: Angle::ZERO,
            phi: Angle::ZERO,
            delta: Angle::new(beta + delta),
        };
    }
    // Rx(β) Ry(γ) Rx(β) has no Z component, so it is some R(θ, φ)
    let a = rotation_matrix(Axis::X, beta)
        * rotation_matrix(Axis::Y, gamma)
        * rotation_matrix(Axis::X, beta);
    let a01 = a[(0, 1)];
    let half = a01.norm().atan2(a[(0, 0)].re);
    let phi = if half.sin().abs() < DEGENERATE {
        0.0
    } else {
        -(c64(0.0, 1.0) * a01).arg()
    };
    RRxFactors {
        alpha: f.alpha,
        theta: Angle::new(2.0 * half),
        phi: Angle::new(phi),
        delta: Angle::new(delta - beta),
    }
}
