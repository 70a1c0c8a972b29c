//! Gate algebra, circuit representation and exact matrix semantics.
//!
//! Rotation conventions:
//!
//! ```text
//! Rx(t) = [[cos t/2, i sin t/2], [i sin t/2, cos t/2]]
//! Ry(t) = [[cos t/2, sin t/2], [-sin t/2, cos t/2]]
//! Rz(t) = diag(e^{i t/2}, e^{-i t/2})
//! R(t, p) = [[cos t/2, -i e^{-ip} sin t/2], [-i e^{ip} sin t/2, cos t/2]]
//! XX(p) = cos p * 1 - i sin p * (X (x) X)
//! ```
//!
//! Qubit 0 is the most significant tensor factor. Global phase is not
//! tracked.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

const FOUR_PI: f64 = 4.0 * PI;

/// A rotation angle in radians, stored in `(-2π, 2π]`.
///
/// All rotation matrices used here are 4π-periodic, so reducing modulo 4π
/// does not change the gate.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        if !radians.is_finite() || (radians > -2.0 * PI && radians <= 2.0 * PI) {
            return Angle(radians);
        }
        let mut r = radians.rem_euclid(FOUR_PI);
        if r > 2.0 * PI {
            r -= FOUR_PI;
        }
        Angle(r)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// True when the angle is within `tol` of 0 modulo 4π.
    pub fn is_zero(self, tol: f64) -> bool {
        self.0.abs() <= tol || (self.0 - FOUR_PI).abs() <= tol || (self.0 + FOUR_PI).abs() <= tol
    }

    /// True when the rotation is proportional to the identity (angle ≡ 0 mod 2π).
    pub fn is_trivial_up_to_phase(self, tol: f64) -> bool {
        let r = self.0.rem_euclid(2.0 * PI);
        r <= tol || (2.0 * PI - r) <= tol
    }
}

impl std::ops::Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-self.0)
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl From<f64> for Angle {
    fn from(r: f64) -> Self {
        Angle::new(r)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rotation axis of a single-qubit rotation gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One circuit element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    Rx {
        angle: Angle,
        target: usize,
    },
    Ry {
        angle: Angle,
        target: usize,
    },
    Rz {
        angle: Angle,
        target: usize,
    },
    #[serde(rename = "cnot")]
    Cnot {
        control: usize,
        target: usize,
    },
    /// Trapped-ion single-qubit gate R(θ, φ).
    R {
        theta: Angle,
        phi: Angle,
        target: usize,
    },
    /// Mølmer–Sørensen gate XX(φ).
    Xx {
        phi: Angle,
        qubit_a: usize,
        qubit_b: usize,
    },
    Measure {
        target: usize,
        classical_bit: usize,
    },
    TraceOut {
        target: usize,
    },
}

impl Gate {
    pub fn rotation(axis: Axis, angle: impl Into<Angle>, target: usize) -> Gate {
        let angle = angle.into();
        match axis {
            Axis::X => Gate::Rx { angle, target },
            Axis::Y => Gate::Ry { angle, target },
            Axis::Z => Gate::Rz { angle, target },
        }
    }

    pub fn rx(angle: f64, target: usize) -> Gate {
        Gate::rotation(Axis::X, angle, target)
    }

    pub fn ry(angle: f64, target: usize) -> Gate {
        Gate::rotation(Axis::Y, angle, target)
    }

    pub fn rz(angle: f64, target: usize) -> Gate {
        Gate::rotation(Axis::Z, angle, target)
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn r(theta: f64, phi: f64, target: usize) -> Gate {
        Gate::R {
            theta: theta.into(),
            phi: phi.into(),
            target,
        }
    }

    pub fn xx(phi: f64, qubit_a: usize, qubit_b: usize) -> Gate {
        Gate::Xx {
            phi: phi.into(),
            qubit_a,
            qubit_b,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "rx",
            Gate::Ry { .. } => "ry",
            Gate::Rz { .. } => "rz",
            Gate::Cnot { .. } => "cnot",
            Gate::R { .. } => "r",
            Gate::Xx { .. } => "xx",
            Gate::Measure { .. } => "measure",
            Gate::TraceOut { .. } => "trace_out",
        }
    }

    /// Qubits the gate acts on, first qubit first (control before target).
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::R { target, .. }
            | Gate::Measure { target, .. }
            | Gate::TraceOut { target } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Xx {
                qubit_a, qubit_b, ..
            } => vec![qubit_a, qubit_b],
        }
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits().contains(&q)
    }

    /// Axis-aligned rotation data, if this is an Rx/Ry/Rz gate.
    pub fn as_rotation(&self) -> Option<(Axis, Angle, usize)> {
        match *self {
            Gate::Rx { angle, target } => Some((Axis::X, angle, target)),
            Gate::Ry { angle, target } => Some((Axis::Y, angle, target)),
            Gate::Rz { angle, target } => Some((Axis::Z, angle, target)),
            _ => None,
        }
    }

    /// Rx/Ry/Rz and R gates.
    pub fn is_rotation(&self) -> bool {
        matches!(
            self,
            Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. } | Gate::R { .. }
        )
    }

    pub fn is_single_qubit_unitary(&self) -> bool {
        self.is_rotation()
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Gate::Measure { .. } | Gate::TraceOut { .. })
    }

    /// The inverse gate, or `None` for measurements and trace-outs.
    pub fn inverse(&self) -> Option<Gate> {
        Some(match *self {
            Gate::Rx { angle, target } => Gate::Rx {
                angle: -angle,
                target,
            },
            Gate::Ry { angle, target } => Gate::Ry {
                angle: -angle,
                target,
            },
            Gate::Rz { angle, target } => Gate::Rz {
                angle: -angle,
                target,
            },
            g @ Gate::Cnot { .. } => g,
            Gate::R { theta, phi, target } => Gate::R {
                theta: -theta,
                phi,
                target,
            },
            Gate::Xx {
                phi,
                qubit_a,
                qubit_b,
            } => Gate::Xx {
                phi: -phi,
                qubit_a,
                qubit_b,
            },
            Gate::Measure { .. } | Gate::TraceOut { .. } => return None,
        })
    }

    /// Relabels the qubits of the gate.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Rx { angle, target } => Gate::Rx {
                angle,
                target: map(target),
            },
            Gate::Ry { angle, target } => Gate::Ry {
                angle,
                target: map(target),
            },
            Gate::Rz { angle, target } => Gate::Rz {
                angle,
                target: map(target),
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map(control),
                target: map(target),
            },
            Gate::R { theta, phi, target } => Gate::R {
                theta,
                phi,
                target: map(target),
            },
            Gate::Xx {
                phi,
                qubit_a,
                qubit_b,
            } => Gate::Xx {
                phi,
                qubit_a: map(qubit_a),
                qubit_b: map(qubit_b),
            },
            Gate::Measure {
                target,
                classical_bit,
            } => Gate::Measure {
                target: map(target),
                classical_bit,
            },
            Gate::TraceOut { target } => Gate::TraceOut {
                target: map(target),
            },
        }
    }

    fn angles_finite(&self) -> bool {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => {
                angle.radians().is_finite()
            }
            Gate::R { theta, phi, .. } => theta.radians().is_finite() && phi.radians().is_finite(),
            Gate::Xx { phi, .. } => phi.radians().is_finite(),
            _ => true,
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn rotation_matrix(axis: Axis, theta: f64) -> Matrix2<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    match axis {
        Axis::X => Matrix2::new(c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0)),
        Axis::Y => Matrix2::new(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)),
        Axis::Z => Matrix2::new(
            Complex64::from_polar(1.0, theta / 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, -theta / 2.0),
        ),
    }
}

pub(crate) fn r_matrix(theta: f64, phi: f64) -> Matrix2<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    let mi = c(0.0, -1.0);
    Matrix2::new(
        c(co, 0.0),
        mi * Complex64::from_polar(s, -phi),
        mi * Complex64::from_polar(s, phi),
        c(co, 0.0),
    )
}

fn xx_matrix(phi: f64) -> CMatrix {
    let (s, co) = phi.sin_cos();
    let d = c(co, 0.0);
    let o = c(0.0, -s);
    let z = c(0.0, 0.0);
    CMatrix::from_row_slice(4, 4, &[d, z, z, o, z, d, o, z, z, o, d, z, o, z, z, d])
}

/// 2×2 matrix of a single-qubit unitary gate.
pub(crate) fn single_qubit_matrix(g: &Gate) -> Option<Matrix2<Complex64>> {
    match *g {
        Gate::Rx { angle, .. } => Some(rotation_matrix(Axis::X, angle.radians())),
        Gate::Ry { angle, .. } => Some(rotation_matrix(Axis::Y, angle.radians())),
        Gate::Rz { angle, .. } => Some(rotation_matrix(Axis::Z, angle.radians())),
        Gate::R { theta, phi, .. } => Some(r_matrix(theta.radians(), phi.radians())),
        _ => None,
    }
}

/// Unitary matrix of a gate: 2×2 for single-qubit gates, 4×4 for C-NOT and
/// XX in the local ordering control⊗target (qubit_a⊗qubit_b).
pub fn gate_matrix(g: &Gate) -> Result<CMatrix> {
    if let Some(m) = single_qubit_matrix(g) {
        return Ok(CMatrix::from_iterator(2, 2, m.iter().copied()));
    }
    match *g {
        Gate::Cnot { .. } => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(1.0, 0.0);
            m[(2, 3)] = c(1.0, 0.0);
            m[(3, 2)] = c(1.0, 0.0);
            Ok(m)
        }
        Gate::Xx { phi, .. } => Ok(xx_matrix(phi.radians())),
        Gate::Measure { .. } => Err(Error::NoMatrix("measure")),
        Gate::TraceOut { .. } => Err(Error::NoMatrix("trace_out")),
        _ => unreachable!(),
    }
}

/// Ordered gate sequence on `num_qubits` wires with qubit-role metadata.
///
/// Measured and traced qubits are derived from the `Measure`/`TraceOut`
/// gates present, so they always agree with the gate list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    ancillas: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    num_qubits: usize,
    #[serde(default)]
    ancillas: Vec<usize>,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRepr) -> Result<Circuit> {
        Circuit::from_parts(r.num_qubits, r.gates, r.ancillas)
    }
}

impl From<Circuit> for CircuitRepr {
    fn from(c: Circuit) -> Self {
        CircuitRepr {
            num_qubits: c.num_qubits,
            ancillas: c.ancillas.into_iter().collect(),
            gates: c.gates,
        }
    }
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            ancillas: BTreeSet::new(),
        }
    }

    /// Builds and validates a circuit from untrusted parts.
    pub fn from_parts(
        num_qubits: usize,
        gates: Vec<Gate>,
        ancillas: impl IntoIterator<Item = usize>,
    ) -> Result<Circuit> {
        let mut c = Circuit::new(num_qubits);
        for a in ancillas {
            if a >= num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "ancilla {a} out of range for {num_qubits} qubits"
                )));
            }
            c.ancillas.insert(a);
        }
        for g in gates {
            c.try_push(g)?;
        }
        Ok(c)
    }

    pub fn with_ancillas(mut self, ancillas: impl IntoIterator<Item = usize>) -> Self {
        for a in ancillas {
            assert!(a < self.num_qubits, "ancilla {a} out of range");
            self.ancillas.insert(a);
        }
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn ancillas(&self) -> &BTreeSet<usize> {
        &self.ancillas
    }

    /// Non-ancilla qubits in increasing index order.
    pub fn input_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|q| !self.ancillas.contains(q))
            .collect()
    }

    pub fn measured_qubits(&self) -> BTreeSet<usize> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Measure { target, .. } => Some(target),
                _ => None,
            })
            .collect()
    }

    pub fn traced_qubits(&self) -> BTreeSet<usize> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::TraceOut { target } => Some(target),
                _ => None,
            })
            .collect()
    }

    /// Output wires: neither measured nor traced, increasing order.
    pub fn output_qubits(&self) -> Vec<usize> {
        let m = self.measured_qubits();
        let t = self.traced_qubits();
        (0..self.num_qubits)
            .filter(|q| !m.contains(q) && !t.contains(q))
            .collect()
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        let qs = g.qubits();
        for &q in &qs {
            if q >= self.num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "{} acts on qubit {q} but the circuit has {} qubits",
                    g.name(),
                    self.num_qubits
                )));
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidCircuit(format!(
                "{} acts twice on qubit {}",
                g.name(),
                qs[0]
            )));
        }
        if !g.angles_finite() {
            return Err(Error::InvalidCircuit(format!("{} has a non-finite angle", g.name())));
        }
        for prior in self.gates.iter().rev() {
            match *prior {
                Gate::TraceOut { target } | Gate::Measure { target, .. } if qs.contains(&target) => {
                    return Err(Error::InvalidCircuit(format!(
                        "{} acts on qubit {target} after it was {}",
                        g.name(),
                        if matches!(prior, Gate::TraceOut { .. }) {
                            "traced out"
                        } else {
                            "measured"
                        }
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn try_push(&mut self, g: Gate) -> Result<()> {
        self.check_gate(&g)?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends a gate; panics if the gate violates the circuit invariants.
    pub fn push(&mut self, g: Gate) {
        if let Err(e) = self.try_push(g) {
            panic!("{e}");
        }
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    /// Appends the gates of `other`, whose qubit `i` is placed on wire `wires[i]`.
    pub fn append_on(&mut self, other: &Circuit, wires: &[usize]) {
        assert_eq!(wires.len(), other.num_qubits, "wire map has wrong length");
        for g in &other.gates {
            self.push(g.remap(|q| wires[q]));
        }
    }

    /// Appends all gates of a circuit of the same width.
    pub fn append(&mut self, other: &Circuit) {
        assert_eq!(self.num_qubits, other.num_qubits);
        for g in &other.gates {
            self.push(*g);
        }
    }

    /// The inverse circuit (gates reversed and inverted). Ancillas are kept.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.num_qubits);
        out.ancillas = self.ancillas.clone();
        for g in self.gates.iter().rev() {
            let inv = g.inverse().ok_or(Error::NotUnitaryCircuit(g.name()))?;
            out.gates.push(inv);
        }
        Ok(out)
    }

    /// Same circuit with a different gate list (metadata kept). Used by
    /// rewriting passes that have already validated their output.
    pub(crate) fn with_gates(&self, gates: Vec<Gate>) -> Circuit {
        let mut out = Circuit::new(self.num_qubits);
        out.ancillas = self.ancillas.clone();
        for g in gates {
            out.push(g);
        }
        out
    }

    /// Copy without `Measure`/`TraceOut` gates. Valid because those gates
    /// are terminal on their wire.
    pub fn unitary_part(&self) -> Circuit {
        let mut out = Circuit::new(self.num_qubits);
        out.ancillas = self.ancillas.clone();
        out.gates = self.gates.iter().filter(|g| g.is_unitary()).copied().collect();
        out
    }

    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_rotation()).count()
    }

    pub fn xx_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Xx { .. }))
            .count()
    }

    fn first_non_unitary(&self) -> Option<&'static str> {
        self.gates.iter().find(|g| !g.is_unitary()).map(|g| g.name())
    }
}

/// Number of C-NOT gates.
pub fn cnot_count(c: &Circuit) -> usize {
    c.cnot_count()
}

/// Number of rotation gates (Rx, Ry, Rz and R).
pub fn rotation_count(c: &Circuit) -> usize {
    c.rotation_count()
}

#[inline]
fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Applies a unitary gate in place to every column of `states`
/// (each column a state vector on `n` qubits).
pub(crate) fn apply_gate(states: &mut CMatrix, g: &Gate, n: usize) {
    let dim = states.nrows();
    debug_assert_eq!(dim, 1 << n);
    let data = states.as_mut_slice();
    if let Some(u) = single_qubit_matrix(g) {
        let t = bit(n, g.qubits()[0]);
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for col in data.chunks_mut(dim) {
            for i in 0..dim {
                if i & t == 0 {
                    let a = col[i];
                    let b = col[i | t];
                    col[i] = u00 * a + u01 * b;
                    col[i | t] = u10 * a + u11 * b;
                }
            }
        }
        return;
    }
    match *g {
        Gate::Cnot { control, target } => {
            let cb = bit(n, control);
            let tb = bit(n, target);
            for col in data.chunks_mut(dim) {
                for i in 0..dim {
                    if i & cb != 0 && i & tb == 0 {
                        col.swap(i, i | tb);
                    }
                }
            }
        }
        Gate::Xx {
            phi,
            qubit_a,
            qubit_b,
        } => {
            let (s, co) = phi.radians().sin_cos();
            let d = c(co, 0.0);
            let o = c(0.0, -s);
            let ab = bit(n, qubit_a);
            let bb = bit(n, qubit_b);
            for col in data.chunks_mut(dim) {
                for i in 0..dim {
                    if i & ab == 0 && i & bb == 0 {
                        let (i00, i01, i10, i11) = (i, i | bb, i | ab, i | ab | bb);
                        let (a00, a01, a10, a11) = (col[i00], col[i01], col[i10], col[i11]);
                        col[i00] = d * a00 + o * a11;
                        col[i01] = d * a01 + o * a10;
                        col[i10] = o * a01 + d * a10;
                        col[i11] = o * a00 + d * a11;
                    }
                }
            }
        }
        _ => panic!("apply_gate called with non-unitary gate {}", g.name()),
    }
}

/// Applies every gate of a measure/trace-free circuit to the columns of `states`.
pub(crate) fn apply_circuit(states: &mut CMatrix, c: &Circuit) {
    for g in c.gates() {
        apply_gate(states, g, c.num_qubits());
    }
}

/// The 2^n × 2^n unitary implemented by the circuit.
pub fn circuit_matrix(c: &Circuit) -> Result<CMatrix> {
    if let Some(name) = c.first_non_unitary() {
        return Err(Error::NotUnitaryCircuit(name));
    }
    let dim = 1usize << c.num_qubits();
    let mut m = CMatrix::identity(dim, dim);
    apply_circuit(&mut m, c);
    Ok(m)
}

/// Basis index on all wires for input value `x` with ancillas in |0⟩.
pub(crate) fn embed_input_index(c: &Circuit, x: usize) -> usize {
    let n = c.num_qubits();
    let inputs = c.input_qubits();
    let m = inputs.len();
    let mut idx = 0;
    for (k, &q) in inputs.iter().enumerate() {
        if x & (1 << (m - 1 - k)) != 0 {
            idx |= bit(n, q);
        }
    }
    idx
}

/// The 2^n × 2^m isometry obtained by feeding |0⟩ into every ancilla.
///
/// Column `x` is the image of input value `x` read on the non-ancilla
/// qubits in increasing index order (most significant first).
pub fn circuit_isometry(c: &Circuit) -> Result<CMatrix> {
    if let Some(name) = c.first_non_unitary() {
        return Err(Error::NotUnitaryCircuit(name));
    }
    let n = c.num_qubits();
    let m = c.input_qubits().len();
    let mut states = CMatrix::zeros(1 << n, 1 << m);
    for x in 0..(1 << m) {
        states[(embed_input_index(c, x), x)] = Complex64::new(1.0, 0.0);
    }
    apply_circuit(&mut states, c);
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frobenius, unitarity_defect};
    use crate::verify::phase_invariant_distance;

    fn cm(rows: usize, cols: usize, v: &[(f64, f64)]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &v.iter().map(|&(a, b)| c(a, b)).collect::<Vec<_>>())
    }

    #[test]
    fn angle_canonical_interval() {
        assert_eq!(Angle::new(0.0).radians(), 0.0);
        assert!((Angle::new(4.0 * PI + 0.5).radians() - 0.5).abs() < 1e-12);
        assert!((Angle::new(-2.0 * PI).radians() - 2.0 * PI).abs() < 1e-12);
        assert!((Angle::new(2.0 * PI).radians() - 2.0 * PI).abs() < 1e-12);
        assert!((Angle::new(3.0 * PI).radians() + PI).abs() < 1e-12);
        for k in -20..20 {
            let a = Angle::new(k as f64 * 0.77).radians();
            assert!(a > -2.0 * PI && a <= 2.0 * PI);
        }
    }

    #[test]
    fn rx_zero_is_identity() {
        let m = gate_matrix(&Gate::rx(0.0, 0)).unwrap();
        assert!(frobenius(&(m - CMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn rz_pi_is_diag_i_minus_i() {
        let m = gate_matrix(&Gate::rz(PI, 0)).unwrap();
        let want = cm(2, 2, &[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, -1.0)]);
        assert!(frobenius(&(m - want)) < 1e-15);
    }

    #[test]
    fn cnot_matrix_rows() {
        let m = gate_matrix(&Gate::cnot(0, 1)).unwrap();
        let one = (1.0, 0.0);
        let z = (0.0, 0.0);
        let want = cm(4, 4, &[one, z, z, z, z, one, z, z, z, z, z, one, z, z, one, z]);
        assert_eq!(m, want);
    }

    #[test]
    fn measure_and_trace_have_no_matrix() {
        assert!(matches!(
            gate_matrix(&Gate::Measure {
                target: 0,
                classical_bit: 0
            }),
            Err(Error::NoMatrix(_))
        ));
        assert!(matches!(
            gate_matrix(&Gate::TraceOut { target: 0 }),
            Err(Error::NoMatrix(_))
        ));
    }

    #[test]
    fn every_gate_matrix_is_unitary() {
        let gates = [
            Gate::rx(0.3, 0),
            Gate::ry(-1.7, 0),
            Gate::rz(2.9, 0),
            Gate::r(1.1, -0.4, 0),
            Gate::xx(0.37, 0, 1),
            Gate::cnot(0, 1),
        ];
        for g in gates {
            assert!(unitarity_defect(&gate_matrix(&g).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(2);
        assert_eq!(circuit_matrix(&c).unwrap(), CMatrix::identity(4, 4));
        assert_eq!(c.cnot_count(), 0);
        assert_eq!(c.rotation_count(), 0);
    }

    #[test]
    fn single_cnot_circuit_matches_gate_matrix() {
        let mut c = Circuit::new(2);
        c.push(Gate::cnot(0, 1));
        assert_eq!(circuit_matrix(&c).unwrap(), gate_matrix(&Gate::cnot(0, 1)).unwrap());
    }

    #[test]
    fn reversed_cnot_embeds_correctly() {
        // control on the less significant wire
        let mut c = Circuit::new(2);
        c.push(Gate::cnot(1, 0));
        let m = circuit_matrix(&c).unwrap();
        // |01> -> |11>
        assert_eq!(m[(3, 1)], c_one());
        assert_eq!(m[(1, 3)], c_one());
        assert_eq!(m[(0, 0)], c_one());
        assert_eq!(m[(2, 2)], c_one());
    }

    fn c_one() -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn xx_realization_of_cnot() {
        // control: Ry(-π/2) before, Rx(π/2) and Ry(π/2) after; target: Rx(π/2) after
        let mut c = Circuit::new(2);
        c.push(Gate::ry(-PI / 2.0, 0));
        c.push(Gate::xx(PI / 4.0, 0, 1));
        c.push(Gate::rx(PI / 2.0, 0));
        c.push(Gate::ry(PI / 2.0, 0));
        c.push(Gate::rx(PI / 2.0, 1));
        let m = circuit_matrix(&c).unwrap();
        let cnot = gate_matrix(&Gate::cnot(0, 1)).unwrap();
        assert!(phase_invariant_distance(&m, &cnot).unwrap().value() < 1e-12);
    }

    #[test]
    fn isometry_with_single_ancilla_no_gates() {
        let circ = Circuit::new(1).with_ancillas([0]);
        let v = circuit_isometry(&circ).unwrap();
        assert_eq!(v.shape(), (2, 1));
        assert_eq!(v[(0, 0)], c_one());
        assert_eq!(v[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn isometry_ancilla_control_is_identity_on_inputs() {
        let mut c = Circuit::new(2).with_ancillas([0]);
        c.push(Gate::cnot(0, 1));
        let v = circuit_isometry(&c).unwrap();
        assert_eq!(v.shape(), (4, 2));
        let mut want = CMatrix::zeros(4, 2);
        want[(0, 0)] = c_one();
        want[(1, 1)] = c_one();
        assert_eq!(v, want);
    }

    #[test]
    fn non_unitary_circuits_rejected() {
        let mut c = Circuit::new(1);
        c.push(Gate::TraceOut { target: 0 });
        assert!(matches!(circuit_matrix(&c), Err(Error::NotUnitaryCircuit(_))));
        assert!(matches!(circuit_isometry(&c), Err(Error::NotUnitaryCircuit(_))));
    }

    #[test]
    fn invariants_enforced_on_push() {
        let mut c = Circuit::new(2);
        assert!(c.try_push(Gate::cnot(1, 1)).is_err());
        assert!(c.try_push(Gate::rz(0.1, 2)).is_err());
        assert!(c.try_push(Gate::xx(0.1, 0, 0)).is_err());
        c.push(Gate::TraceOut { target: 0 });
        assert!(c.try_push(Gate::rz(0.1, 0)).is_err());
        assert!(c.try_push(Gate::rz(0.1, 1)).is_ok());
        assert_eq!(c.traced_qubits().into_iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let mut c = Circuit::new(2).with_ancillas([0]);
        c.push(Gate::rz(0.25, 1));
        c.push(Gate::cnot(1, 0));
        c.push(Gate::Measure {
            target: 0,
            classical_bit: 0,
        });
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"kind\":\"rz\""));
        assert!(text.contains("\"kind\":\"cnot\""));
        let back: Circuit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"num_qubits":1,"gates":[{"kind":"cnot","control":0,"target":0}]}"#;
        assert!(serde_json::from_str::<Circuit>(bad).is_err());
    }

    #[test]
    fn inverse_circuit_undoes() {
        let mut c = Circuit::new(2);
        c.extend([Gate::rx(0.3, 0), Gate::cnot(0, 1), Gate::r(0.7, 0.2, 1), Gate::xx(0.4, 1, 0)]);
        let mut both = c.clone();
        both.append(&c.inverse().unwrap());
        let m = circuit_matrix(&both).unwrap();
        assert!(frobenius(&(m - CMatrix::identity(4, 4))) < 1e-12);
    }
}
