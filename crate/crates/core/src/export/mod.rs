//! Text formats: OpenQASM 2.0 and Qcircuit LaTeX.

mod latex;
mod qasm;

pub use latex::to_latex;
pub use qasm::{from_qasm, to_qasm, QasmDocument};

use std::f64::consts::PI;

/// `k` with `x = kπ/4` within 1e−12, if any.
fn quarter_pi_multiple(x: f64) -> Option<i64> {
    let k = (x / (PI / 4.0)).round();
    ((x - k * PI / 4.0).abs() < 1e-12).then_some(k as i64)
}

/// Reduced `(numerator, denominator)` of `k/4`.
fn quarters(k: i64) -> (i64, i64) {
    match k.rem_euclid(4) {
        0 => (k / 4, 1),
        2 => (k / 2, 2),
        _ => (k, 4),
    }
}

/// `pi/2`-style text with the given symbol for π.
fn symbolic(k: i64, pi: &str) -> String {
    if k == 0 {
        return "0".into();
    }
    let (num, den) = quarters(k);
    let sign = if num < 0 { "-" } else { "" };
    let body = if num.abs() == 1 {
        pi.to_string()
    } else if pi.starts_with('\\') {
        format!("{}{}", num.abs(), pi)
    } else {
        format!("{}*{}", num.abs(), pi)
    };
    if den == 1 {
        format!("{sign}{body}")
    } else {
        format!("{sign}{body}/{den}")
    }
}
