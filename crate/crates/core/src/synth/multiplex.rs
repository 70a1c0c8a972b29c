//! Uniformly controlled rotations and diagonal gates.

use crate::circuit::{Axis, Circuit, Gate};
use crate::error::{Error, Result};

/// Rotation about `axis` on `target` by `angles[j]` when the controls read
/// `j` (first control most significant). `num_qubits` is the width of the
/// returned circuit.
///
/// Uses the Gray-code construction: 2^k rotations and 2^k C-NOTs for
/// k ≥ 1 controls.
pub fn demultiplex_rotation(
    angles: &[f64],
    axis: Axis,
    controls: &[usize],
    target: usize,
    num_qubits: usize,
) -> Result<Circuit> {
    let k = controls.len();
    if angles.len() != 1 << k {
        return Err(Error::Dimension(format!(
            "{} controls need {} angles, got {}",
            k,
            1usize << k,
            angles.len()
        )));
    }
    if axis == Axis::X {
        return Err(Error::Unsupported("multiplexed Rx".into()));
    }
    let mut c = Circuit::new(num_qubits);
    if k == 0 {
        c.try_push(Gate::rotation(axis, angles[0], target))?;
        return Ok(c);
    }
    let thetas = gray_transform(angles);
    for (i, &t) in thetas.iter().enumerate() {
        c.try_push(Gate::rotation(axis, t, target))?;
        let p = if i + 1 == thetas.len() {
            k - 1
        } else {
            (i + 1).trailing_zeros() as usize
        };
        c.try_push(Gate::cnot(controls[k - 1 - p], target))?;
    }
    Ok(c)
}

/// θ_i = 2^{-k} Σ_j (−1)^{|g(i) ∧ j|} α_j with g the Gray code.
fn gray_transform(alpha: &[f64]) -> Vec<f64> {
    let len = alpha.len();
    (0..len)
        .map(|i| {
            let g = i ^ (i >> 1);
            let s: f64 = alpha
                .iter()
                .enumerate()
                .map(|(j, &a)| if (g & j).count_ones() % 2 == 0 { a } else { -a })
                .sum();
            s / len as f64
        })
        .collect()
}

/// Circuit for `diag(e^{iφ_0}, …, e^{iφ_{2^n−1}})` on `qubits` (first most
/// significant), up to global phase. Uses 2^n − 2 C-NOTs.
pub fn diagonal_circuit(phases: &[f64], qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    let n = qubits.len();
    if phases.len() != 1 << n {
        return Err(Error::Dimension(format!(
            "{} qubits need {} phases, got {}",
            n,
            1usize << n,
            phases.len()
        )));
    }
    let mut c = Circuit::new(num_qubits);
    let mut cur = phases.to_vec();
    for level in (0..n).rev() {
        // pair (φ_{2j}, φ_{2j+1}) = average phase · Rz(φ_{2j} − φ_{2j+1}) on qubit `level`
        let diffs: Vec<f64> = cur.chunks(2).map(|p| p[0] - p[1]).collect();
        let avgs: Vec<f64> = cur.chunks(2).map(|p| (p[0] + p[1]) / 2.0).collect();
        if diffs.iter().any(|d| d.abs() > 1e-14) {
            let part = demultiplex_rotation(&diffs, Axis::Z, &qubits[..level], qubits[level], num_qubits)?;
            c.append(&part);
        }
        cur = avgs;
    }
    Ok(c)
}

/// `1 + (e^{iθ} − 1)|0…0⟩⟨0…0|` on `qubits`, up to global phase.
pub fn zero_phase_circuit(theta: f64, qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    let mut phases = vec![0.0; 1 << qubits.len()];
    phases[0] = theta;
    diagonal_circuit(&phases, qubits, num_qubits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_matrix, rotation_matrix};
    use crate::numerics::{c64, seeded_rng, CMatrix};
    use crate::verify::phase_invariant_distance;
    use rand::Rng;

    fn multiplexed_target(angles: &[f64], axis: Axis) -> CMatrix {
        // controls on qubits 0..k, target on the last qubit
        let k = angles.len().trailing_zeros() as usize;
        let dim = 2 << k;
        let mut m = CMatrix::zeros(dim, dim);
        for (j, &a) in angles.iter().enumerate() {
            let r = rotation_matrix(axis, a);
            for x in 0..2 {
                for y in 0..2 {
                    m[(2 * j + x, 2 * j + y)] = r[(x, y)];
                }
            }
        }
        m
    }

    #[test]
    fn no_controls_is_single_rotation() {
        let c = demultiplex_rotation(&[0.7], Axis::Y, &[], 0, 1).unwrap();
        assert_eq!(c.gates(), &[Gate::ry(0.7, 0)]);
    }

    #[test]
    fn equal_angles_give_zero_second_rotation() {
        let c = demultiplex_rotation(&[0.4, 0.4], Axis::Z, &[0], 1, 2).unwrap();
        assert_eq!(c.cnot_count(), 2);
        assert_eq!(c.rotation_count(), 2);
        assert_eq!(c.gates()[0], Gate::rz(0.4, 1));
        assert_eq!(c.gates()[2], Gate::rz(0.0, 1));
    }

    #[test]
    fn two_controls_match_block_diagonal() {
        let mut rng = seeded_rng(1);
        for axis in [Axis::Y, Axis::Z] {
            let angles: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let c = demultiplex_rotation(&angles, axis, &[0, 1], 2, 3).unwrap();
            assert_eq!(c.cnot_count(), 4);
            let m = circuit_matrix(&c).unwrap();
            assert!((m - multiplexed_target(&angles, axis)).norm() < 1e-10);
        }
    }

    #[test]
    fn three_controls_match_block_diagonal() {
        let mut rng = seeded_rng(2);
        let angles: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
        let c = demultiplex_rotation(&angles, Axis::Y, &[0, 1, 2], 3, 4).unwrap();
        let m = circuit_matrix(&c).unwrap();
        assert!((m - multiplexed_target(&angles, Axis::Y)).norm() < 1e-10);
    }

    #[test]
    fn length_mismatch() {
        assert!(demultiplex_rotation(&[0.1, 0.2, 0.3], Axis::Z, &[0], 1, 2).is_err());
    }

    #[test]
    fn diagonal_gate_matches() {
        let mut rng = seeded_rng(3);
        for n in 1..=4 {
            let phases: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let qubits: Vec<usize> = (0..n).collect();
            let c = diagonal_circuit(&phases, &qubits, n).unwrap();
            assert_eq!(c.cnot_count(), (1 << n) - 2);
            let want = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                1 << n,
                phases.iter().map(|&p| c64(0.0, p).exp()),
            ));
            let d = phase_invariant_distance(&circuit_matrix(&c).unwrap(), &want).unwrap();
            assert!(d.value() < 1e-10);
        }
    }

    #[test]
    fn zero_phase_pi_on_two_qubits() {
        let c = zero_phase_circuit(std::f64::consts::PI, &[0, 1], 2).unwrap();
        let mut want = CMatrix::identity(4, 4);
        want[(0, 0)] = c64(-1.0, 0.0);
        let d = phase_invariant_distance(&circuit_matrix(&c).unwrap(), &want).unwrap();
        assert!(d.value() < 1e-12);
    }
}
