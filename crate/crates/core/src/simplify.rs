//! Single right-to-left rewriting pass: merges rotation runs, moves Rz
//! through C-NOT controls and Rx through targets, cancels C-NOT pairs.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::circuit::{single_qubit_matrix, Angle, Axis, Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{decompose2, Axes};

/// Rotations within this of a multiple of 2π are dropped.
pub const ZERO_TOL: f64 = 1e-10;

/// Role of the wire at the C-NOT just before the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideHint {
    Control,
    Target,
    None,
}

impl SideHint {
    fn commuting_axis(self) -> Option<Axis> {
        match self {
            SideHint::Control => Some(Axis::Z),
            SideHint::Target => Some(Axis::X),
            SideHint::None => None,
        }
    }
}

/// Result of merging a rotation run, in time order. `leading` commutes
/// with the preceding C-NOT on this wire and may be moved past it.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedRun {
    pub leading: Option<Gate>,
    pub rest: Vec<Gate>,
}

impl MergedRun {
    pub fn gates(&self) -> Vec<Gate> {
        self.leading.iter().chain(self.rest.iter()).copied().collect()
    }

    fn cost(&self) -> (usize, usize) {
        (self.leading.is_some() as usize + self.rest.len(), self.rest.len())
    }
}

fn nontrivial(a: Angle) -> bool {
    !a.is_trivial_up_to_phase(ZERO_TOL)
}

/// Merges rotations (time order) on one wire into at most three.
pub fn merge_single_qubit_run(gates: &[Gate], hint: SideHint) -> Result<MergedRun> {
    let mut target = None;
    let mut mat = Matrix2::identity();
    for g in gates {
        let (_, _, q) = g
            .as_rotation()
            .ok_or_else(|| Error::Unsupported(format!("{} in a rotation run", g.name())))?;
        if *target.get_or_insert(q) != q {
            return Err(Error::InvalidCircuit("rotation run spans several wires".into()));
        }
        mat = single_qubit_matrix(g).expect("rotation") * mat;
    }
    match target {
        None => Ok(MergedRun { leading: None, rest: vec![] }),
        Some(q) => Ok(merge_run(gates, &mat, q, hint)),
    }
}

fn merge_run(gates: &[Gate], mat: &Matrix2<Complex64>, target: usize, hint: SideHint) -> MergedRun {
    let carry = hint.commuting_axis();
    let place = |axis: Axis, angle: Angle| -> MergedRun {
        let g = Gate::rotation(axis, angle, target);
        if carry == Some(axis) {
            MergedRun { leading: Some(g), rest: vec![] }
        } else {
            MergedRun { leading: None, rest: vec![g] }
        }
    };

    // a run about a single axis: add the angles exactly
    let first = gates[0].as_rotation().expect("rotation").0;
    if gates.iter().all(|g| g.as_rotation().map(|r| r.0) == Some(first)) {
        let sum = gates
            .iter()
            .fold(Angle::ZERO, |acc, g| acc + g.as_rotation().expect("rotation").1);
        return if nontrivial(sum) {
            place(first, sum)
        } else {
            MergedRun { leading: None, rest: vec![] }
        };
    }

    let original = MergedRun { leading: None, rest: gates.to_vec() };
    let mut best = original.clone();
    for axes in [Axes::Zyz, Axes::Xyx] {
        let main = decompose2(mat, axes);
        for f in [main, main.alternative()] {
            let outer = axes.outer();
            let cand = if !nontrivial(f.gamma) {
                let s = f.beta + f.delta;
                if nontrivial(s) {
                    place(outer, s)
                } else {
                    MergedRun { leading: None, rest: vec![] }
                }
            } else {
                let lead = nontrivial(f.delta).then(|| Gate::rotation(outer, f.delta, target));
                let mut rest = vec![Gate::rotation(Axis::Y, f.gamma, target)];
                if nontrivial(f.beta) {
                    rest.push(Gate::rotation(outer, f.beta, target));
                }
                if carry == Some(outer) {
                    MergedRun { leading: lead, rest }
                } else {
                    MergedRun { leading: None, rest: lead.into_iter().chain(rest).collect() }
                }
            };
            if cand.cost() < best.cost() {
                best = cand;
            }
        }
    }
    best
}

#[derive(Clone, Default)]
struct Pending {
    gates: Vec<Gate>,
    mat: Option<Matrix2<Complex64>>,
}

impl Pending {
    fn mat(&self) -> Matrix2<Complex64> {
        self.mat.unwrap_or_else(Matrix2::identity)
    }

    /// Adds a gate earlier in time than everything pending.
    fn prepend(&mut self, g: Gate) {
        let m = single_qubit_matrix(&g).expect("rotation");
        self.mat = Some(self.mat() * m);
        self.gates.insert(0, g);
    }

    /// Adds gates (time order) later than everything pending.
    fn append(&mut self, gs: &[Gate]) {
        for g in gs {
            let m = single_qubit_matrix(g).expect("rotation");
            self.mat = Some(m * self.mat());
            self.gates.push(*g);
        }
    }

    /// Emits the run; a commuting leading rotation stays pending.
    fn flush(&mut self, target: usize, hint: SideHint) -> Vec<Gate> {
        if self.gates.is_empty() {
            return vec![];
        }
        let run = merge_run(&self.gates, &self.mat(), target, hint);
        *self = Pending::default();
        if let Some(l) = run.leading {
            self.prepend(l);
        }
        run.rest
    }
}

fn cnots_commute(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.0 || a.1 == b.1 || (a.0 != b.1 && a.1 != b.0 && a.0 != b.0 && a.1 != b.1)
}

/// Index in the reverse-time stack of a C-NOT that cancels `(c, t)`.
fn find_cancel(out: &[Gate], c: usize, t: usize) -> Option<usize> {
    for i in (0..out.len()).rev() {
        match out[i] {
            Gate::Cnot { control, target } => {
                if (control, target) == (c, t) {
                    return Some(i);
                }
                if !cnots_commute((control, target), (c, t)) {
                    return None;
                }
            }
            ref g if g.acts_on(c) || g.acts_on(t) => return None,
            _ => {}
        }
    }
    None
}

/// After removing a C-NOT at `i`, moves the rotations that followed it on
/// `c` and `t` back into the pending runs when nothing else separates them.
fn pull_back(out: &mut Vec<Gate>, i: usize, wires: [usize; 2], pend: &mut [Pending]) {
    let mut taken = Vec::new();
    for w in wires {
        if out[i..].iter().any(|g| g.acts_on(w)) {
            continue;
        }
        let mut run = Vec::new();
        for j in (0..i).rev() {
            match out[j].as_rotation() {
                Some((_, _, q)) if q == w => {
                    run.push(out[j]);
                    taken.push(j);
                }
                Some((_, _, q)) if wires.contains(&q) => {}
                _ => break,
            }
        }
        pend[w].append(&run);
    }
    taken.sort_unstable_by(|a, b| b.cmp(a));
    for j in taken {
        out.remove(j);
    }
}

/// Rewrites the circuit in one traversal from the end. The result has
/// the same unitary up to phase and never more C-NOTs or rotations.
pub fn simplify(c: &Circuit) -> Circuit {
    let n = c.num_qubits();
    let mut pend = vec![Pending::default(); n];
    // reverse time order: out[0] is the last gate
    let mut out: Vec<Gate> = Vec::with_capacity(c.len());
    for g in c.gates().iter().rev() {
        if let Some((_, angle, q)) = g.as_rotation() {
            if nontrivial(angle) {
                pend[q].prepend(*g);
            }
            continue;
        }
        match *g {
            Gate::Cnot { control, target } => {
                let ec = pend[control].flush(control, SideHint::Control);
                let et = pend[target].flush(target, SideHint::Target);
                if ec.is_empty() && et.is_empty() {
                    if let Some(i) = find_cancel(&out, control, target) {
                        out.remove(i);
                        pull_back(&mut out, i, [control, target], &mut pend);
                        continue;
                    }
                }
                out.extend(ec.into_iter().rev());
                out.extend(et.into_iter().rev());
                out.push(*g);
            }
            _ => {
                for q in g.qubits() {
                    let e = pend[q].flush(q, SideHint::None);
                    out.extend(e.into_iter().rev());
                }
                out.push(*g);
            }
        }
    }
    for (q, p) in pend.iter_mut().enumerate() {
        let e = p.flush(q, SideHint::None);
        out.extend(e.into_iter().rev());
    }
    out.reverse();
    c.with_gates(out)
}
