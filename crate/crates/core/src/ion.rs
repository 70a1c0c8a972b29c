//! Conversion between C-NOT circuits and the trapped-ion {R, XX} gate set.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::circuit::{r_matrix, single_qubit_matrix, Angle, Axis, Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{decompose2, r_rx2, Axes};

const TRIVIAL: f64 = 1e-12;

/// C-NOT(c, t) as Ry(−π/2) on c, XX(π/4), then Rx(π/2), Ry(π/2) on c and
/// Rx(π/2) on t.
pub fn cnot_as_xx(control: usize, target: usize) -> [Gate; 5] {
    [
        Gate::ry(-FRAC_PI_2, control),
        Gate::xx(FRAC_PI_4, control, target),
        Gate::rx(FRAC_PI_2, control),
        Gate::ry(FRAC_PI_2, control),
        Gate::rx(FRAC_PI_2, target),
    ]
}

/// Every C-NOT replaced by [`cnot_as_xx`], no merging.
pub fn cnot_to_xx_unmerged(c: &Circuit) -> Result<Circuit> {
    let mut out = Vec::with_capacity(c.len() * 5);
    for g in c.gates() {
        match *g {
            Gate::Cnot { control, target } => out.extend(cnot_as_xx(control, target)),
            Gate::Rx { .. }
            | Gate::Ry { .. }
            | Gate::Rz { .. }
            | Gate::R { .. }
            | Gate::Xx { .. }
            | Gate::Measure { .. }
            | Gate::TraceOut { .. } => out.push(*g),
        }
    }
    Ok(c.with_gates(out))
}

/// C-NOT circuit to {R, XX} followed by [`ion_merge`]. The XX count equals
/// the C-NOT count.
pub fn cnot_to_xx_circuit(c: &Circuit) -> Result<Circuit> {
    ion_merge(&cnot_to_xx_unmerged(c)?)
}

fn push_r(out: &mut Vec<Gate>, m: &Matrix2<Complex64>, q: usize) -> Angle {
    let f = r_rx2(m);
    if !f.theta.is_trivial_up_to_phase(TRIVIAL) {
        out.push(Gate::R { theta: f.theta, phi: f.phi, target: q });
    }
    f.delta
}

/// Leaves at most one R after each XX on each wire and one leading Rx per
/// wire. Works from the end: the single-qubit block after each XX is
/// written as R·Rx and the Rx is moved through the XX.
pub fn ion_merge(c: &Circuit) -> Result<Circuit> {
    let n = c.num_qubits();
    let mut pend = vec![Matrix2::<Complex64>::identity(); n];
    let mut out = Vec::new();
    let rx = |d: Angle| single_qubit_matrix(&Gate::rotation(Axis::X, d, 0)).expect("rotation");
    for g in c.gates().iter().rev() {
        if let Some(m) = single_qubit_matrix(g) {
            let q = g.qubits()[0];
            pend[q] *= m;
            continue;
        }
        match *g {
            Gate::Xx { qubit_a, qubit_b, .. } => {
                for q in [qubit_a, qubit_b] {
                    let d = push_r(&mut out, &pend[q], q);
                    pend[q] = rx(d);
                }
                out.push(*g);
            }
            // terminal on their wire, so nothing is pending there yet
            Gate::Measure { .. } | Gate::TraceOut { .. } => out.push(*g),
            _ => return Err(Error::Unsupported(format!("{} in an ion circuit", g.name()))),
        }
    }
    for (q, m) in pend.iter().enumerate() {
        let d = push_r(&mut out, m, q);
        if !d.is_trivial_up_to_phase(TRIVIAL) {
            out.push(Gate::rotation(Axis::X, d, q));
        }
    }
    out.reverse();
    Ok(c.with_gates(out))
}

/// XX(φ) as C-NOT, Rx(−2φ) on the first qubit, C-NOT; R gates as Rx, Ry
/// or a Z-Y-Z triple. Other gates are kept.
pub fn xx_to_cnot_circuit(c: &Circuit) -> Result<Circuit> {
    let mut out = Vec::new();
    for g in c.gates() {
        match *g {
            Gate::Xx { phi, qubit_a, qubit_b } => {
                out.push(Gate::cnot(qubit_a, qubit_b));
                out.push(Gate::rotation(Axis::X, Angle::new(-2.0 * phi.radians()), qubit_a));
                out.push(Gate::cnot(qubit_a, qubit_b));
            }
            Gate::R { theta, phi, target } => {
                if phi.is_trivial_up_to_phase(TRIVIAL) && phi.radians().cos() > 0.0 {
                    out.push(Gate::rotation(Axis::X, -theta, target));
                } else if (phi.radians() - FRAC_PI_2).rem_euclid(2.0 * std::f64::consts::PI) < TRIVIAL {
                    out.push(Gate::rotation(Axis::Y, -theta, target));
                } else {
                    let f = decompose2(&r_matrix(theta.radians(), phi.radians()), Axes::Zyz);
                    out.extend(f.gates(target, TRIVIAL));
                }
            }
            _ => out.push(*g),
        }
    }
    Ok(c.with_gates(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_matrix;
    use crate::verify::phase_invariant_distance;

    fn dist(a: &Circuit, b: &Circuit) -> f64 {
        phase_invariant_distance(&circuit_matrix(a).unwrap(), &circuit_matrix(b).unwrap())
            .unwrap()
            .value()
    }

    #[test]
    fn single_cnot_pattern() {
        let mut c = Circuit::new(2);
        c.push(Gate::cnot(0, 1));
        let raw = cnot_to_xx_unmerged(&c).unwrap();
        assert_eq!(raw.gates(), &cnot_as_xx(0, 1));
        assert!(dist(&c, &raw) < 1e-12);
        let merged = cnot_to_xx_circuit(&c).unwrap();
        assert_eq!(merged.xx_count(), 1);
        assert!(dist(&c, &merged) < 1e-12);
    }

    #[test]
    fn empty_stays_empty() {
        assert!(cnot_to_xx_circuit(&Circuit::new(2)).unwrap().is_empty());
    }

    #[test]
    fn rx_commutes_through_xx() {
        let mut c = Circuit::new(2);
        c.extend([Gate::xx(0.3, 0, 1), Gate::rx(0.5, 0), Gate::rx(0.7, 1)]);
        let m = ion_merge(&c).unwrap();
        assert_eq!(m.gates().last(), Some(&Gate::xx(0.3, 0, 1)));
        assert_eq!(m.gates().len(), 3);
        assert!(dist(&c, &m) < 1e-12);
    }

    #[test]
    fn r_expansions() {
        let mut c = Circuit::new(1);
        c.push(Gate::r(-0.4, 0.0, 0));
        let out = xx_to_cnot_circuit(&c).unwrap();
        assert_eq!(out.gates(), &[Gate::rx(0.4, 0)]);
        let mut c = Circuit::new(1);
        c.push(Gate::r(0.9, 1.3, 0));
        assert!(dist(&c, &xx_to_cnot_circuit(&c).unwrap()) < 1e-12);
    }

    #[test]
    fn xx_quarter_matches() {
        let mut c = Circuit::new(2);
        c.push(Gate::xx(FRAC_PI_4, 0, 1));
        let out = xx_to_cnot_circuit(&c).unwrap();
        assert_eq!(out.cnot_count(), 2);
        assert!(dist(&c, &out) < 1e-12);
    }

    #[test]
    fn terminal_gates_pass_through() {
        let mut c = Circuit::new(2);
        c.extend([Gate::ry(0.3, 0), Gate::cnot(0, 1), Gate::rz(0.2, 0), Gate::TraceOut { target: 0 }]);
        let out = cnot_to_xx_circuit(&c).unwrap();
        assert_eq!(out.gates().last(), Some(&Gate::TraceOut { target: 0 }));
        assert_eq!(out.xx_count(), 1);
        assert!(dist(&c.unitary_part(), &out.unitary_part()) < 1e-12);
    }
}
