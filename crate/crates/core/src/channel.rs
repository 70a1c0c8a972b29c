//! Channels, POVMs and instruments, and their compilation through a
//! Stinespring dilation.
//!
//! Register layout of every dilation, most significant first: outcome
//! register (instruments only), environment, system.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, check_finite, frobenius, hermitian_eig, log2_exact, psd_sqrt, CMatrix, INPUT_TOL,
};
use crate::synth::{compile_isometry, Isometry, Method, SynthesisReport};
use crate::verify::{circuit_branch_chois, circuit_choi};

/// Eigenvalues of a Choi matrix above this count towards the rank.
pub const RANK_TOL: f64 = 1e-10;

fn qubits_of(d: usize, what: &str) -> Result<usize> {
    log2_exact(d).ok_or_else(|| Error::Dimension(format!("{what} dimension {d} is not a power of two")))
}

fn ceil_log2(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

fn check_shapes(ops: &[CMatrix], shape: (usize, usize)) -> Result<()> {
    for a in ops {
        if a.shape() != shape {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, expected {}x{}",
                a.nrows(),
                a.ncols(),
                shape.0,
                shape.1
            )));
        }
        check_finite(a)?;
    }
    Ok(())
}

fn completeness_defect<'a>(ops: impl IntoIterator<Item = &'a CMatrix>, d: usize) -> f64 {
    let mut sum = CMatrix::zeros(d, d);
    for a in ops {
        sum += a.adjoint() * a;
    }
    frobenius(&(sum - CMatrix::identity(d, d)))
}

/// `J = Σ_a |a⟩⟩⟨⟨a|` with `|a⟩⟩ = Σ_i |i⟩ ⊗ A|i⟩`, input factor first.
pub(crate) fn choi_of(ops: &[CMatrix]) -> CMatrix {
    let (dout, din) = ops[0].shape();
    let mut j = CMatrix::zeros(din * dout, din * dout);
    for a in ops {
        let v = CMatrix::from_fn(din * dout, 1, |r, _| a[(r % dout, r / dout)]);
        j += &v * v.adjoint();
    }
    j
}

/// Kraus operators from the eigen-decomposition of a Choi matrix.
fn kraus_of(j: &CMatrix, din: usize) -> Vec<CMatrix> {
    let dout = j.nrows() / din;
    let (vals, vecs) = hermitian_eig(j);
    let mut ops: Vec<CMatrix> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(k, &l)| CMatrix::from_fn(dout, din, |o, i| vecs[(i * dout + o, k)] * l.sqrt()))
        .collect();
    if ops.is_empty() {
        ops.push(CMatrix::zeros(dout, din));
    }
    ops
}

/// `E(ρ) = Σ A_i ρ A_i†` with `Σ A_i†A_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<CMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::Dimension("no Kraus operators".into()))?;
        let shape = first.shape();
        qubits_of(shape.0, "output")?;
        qubits_of(shape.1, "input")?;
        check_shapes(&kraus, shape)?;
        let d = completeness_defect(&kraus, shape.1);
        if d > INPUT_TOL {
            return Err(Error::invariant("Kraus operators are not trace preserving", d));
        }
        Ok(Channel { kraus })
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn kraus_rank(&self) -> usize {
        self.kraus.len()
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.output_dim();
        let mut out = CMatrix::zeros(d, d);
        for a in &self.kraus {
            out += a * rho * a.adjoint();
        }
        out
    }
}

/// Unnormalized Choi matrix; tracing out the output leaves the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    matrix: CMatrix,
    input_dim: usize,
}

impl ChoiState {
    pub fn new(matrix: CMatrix, input_dim: usize) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || input_dim == 0 || d % input_dim != 0 {
            return Err(Error::Dimension(format!(
                "{}x{} is not a Choi matrix with input dimension {input_dim}",
                d,
                matrix.ncols()
            )));
        }
        qubits_of(input_dim, "input")?;
        qubits_of(d / input_dim, "output")?;
        check_finite(&matrix)?;
        let herm = frobenius(&(&matrix - matrix.adjoint()));
        if herm > INPUT_TOL {
            return Err(Error::invariant("Choi matrix is not Hermitian", herm));
        }
        let (vals, _) = hermitian_eig(&matrix);
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -INPUT_TOL {
            return Err(Error::invariant("Choi matrix is not PSD", -min));
        }
        let cs = ChoiState { matrix, input_dim };
        let tp = frobenius(&(cs.input_marginal() - CMatrix::identity(input_dim, input_dim)));
        if tp > INPUT_TOL {
            return Err(Error::invariant("Choi matrix is not trace preserving", tp));
        }
        Ok(cs)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix, input_dim: usize) -> Self {
        ChoiState { matrix, input_dim }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.nrows() / self.input_dim
    }

    /// Partial trace over the output factor.
    pub fn input_marginal(&self) -> CMatrix {
        let (din, dout) = (self.input_dim, self.output_dim());
        CMatrix::from_fn(din, din, |i, j| {
            (0..dout).map(|o| self.matrix[(i * dout + o, j * dout + o)]).sum()
        })
    }

    pub fn rank(&self) -> usize {
        hermitian_eig(&self.matrix).0.iter().filter(|&&l| l > RANK_TOL).count()
    }
}

pub fn kraus_to_choi(ch: &Channel) -> ChoiState {
    ChoiState::from_matrix_unchecked(choi_of(&ch.kraus), ch.input_dim())
}

/// One Kraus operator per Choi eigenvalue above [`RANK_TOL`].
pub fn choi_to_kraus(cs: &ChoiState) -> Result<Channel> {
    Channel::new(kraus_of(&cs.matrix, cs.input_dim))
}

/// Equivalent channel with as many Kraus operators as the Choi rank.
pub fn minimize_kraus_rank(ch: &Channel) -> Channel {
    Channel {
        kraus: kraus_of(&choi_of(&ch.kraus), ch.input_dim()),
    }
}

/// `V = Σ_i |i⟩_env ⊗ A_i`, with the Kraus list padded by zeros to 2^k.
pub fn stinespring_isometry(ch: &Channel) -> Result<Isometry> {
    dilation(&[ch.kraus.clone()])
}

/// `V = Σ_j Σ_i |j⟩_out ⊗ |i⟩_env ⊗ A^j_i`; both registers padded to
/// powers of two, the environment to the longest branch.
fn dilation(branches: &[Vec<CMatrix>]) -> Result<Isometry> {
    let (dout, din) = branches[0][0].shape();
    let r = ceil_log2(branches.len());
    let k = ceil_log2(branches.iter().map(Vec::len).max().unwrap_or(1));
    let mut v = CMatrix::zeros((dout << k) << r, din);
    for (j, ops) in branches.iter().enumerate() {
        for (i, a) in ops.iter().enumerate() {
            let row = ((j << k) + i) * dout;
            v.view_mut((row, 0), (dout, din)).copy_from(a);
        }
    }
    Isometry::new(v)
}

fn channel_report(c: &Circuit, iso: SynthesisReport, residual: f64) -> SynthesisReport {
    SynthesisReport {
        method: iso.method,
        cnots: c.cnot_count(),
        rotations: c.rotation_count(),
        residual,
    }
}

/// Circuit for the channel, best method, simplified. The environment
/// wires are traced out at the end; the report's residual is the Choi
/// distance.
pub fn dec_channel(ch: &Channel) -> Result<(Circuit, SynthesisReport)> {
    dec_channel_with(ch, Method::Auto, true)
}

pub fn dec_channel_with(ch: &Channel, method: Method, simplified: bool) -> Result<(Circuit, SynthesisReport)> {
    let reduced;
    let ch = if ch.kraus_rank() > kraus_to_choi(ch).rank() {
        reduced = minimize_kraus_rank(ch);
        &reduced
    } else {
        ch
    };
    let v = stinespring_isometry(ch)?;
    let env = v.n() - qubits_of(ch.output_dim(), "output")?;
    let (mut c, rep) = compile_isometry(&v, method, simplified)?;
    for q in 0..env {
        c.try_push(Gate::TraceOut { target: q })?;
    }
    let got = circuit_choi(&c)?;
    let residual = frobenius(&(got.matrix() - kraus_to_choi(ch).matrix()));
    Ok((c.clone(), channel_report(&c, rep, residual)))
}

/// Positive effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects.first().ok_or_else(|| Error::Dimension("no effects".into()))?;
        let d = first.nrows();
        qubits_of(d, "effect")?;
        check_shapes(&effects, (d, d))?;
        for e in &effects {
            let herm = frobenius(&(e - e.adjoint()));
            if herm > INPUT_TOL {
                return Err(Error::invariant("effect is not Hermitian", herm));
            }
            let (vals, _) = hermitian_eig(e);
            if vals[d - 1] < -INPUT_TOL {
                return Err(Error::invariant("effect is not PSD", -vals[d - 1]));
            }
            if vals[0] > 1.0 + INPUT_TOL {
                return Err(Error::invariant("effect exceeds the identity", vals[0] - 1.0));
            }
        }
        let defect = effect_sum_defect(&effects);
        if defect > INPUT_TOL {
            return Err(Error::invariant("effects do not sum to the identity", defect));
        }
        Ok(Povm { effects })
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    /// `tr(E_i ρ)` for every effect.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| (e * rho).trace().re).collect()
    }

    pub fn effect_sum_defect(&self) -> f64 {
        effect_sum_defect(&self.effects)
    }
}

fn effect_sum_defect(effects: &[CMatrix]) -> f64 {
    let d = effects[0].nrows();
    let mut sum = CMatrix::zeros(d, d);
    for e in effects {
        sum += e;
    }
    frobenius(&(sum - CMatrix::identity(d, d)))
}

/// One list of Kraus operators per classical outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    branches: Vec<Vec<CMatrix>>,
}

impl Instrument {
    pub fn new(branches: Vec<Vec<CMatrix>>) -> Result<Self> {
        let first = branches
            .first()
            .and_then(|b| b.first())
            .ok_or_else(|| Error::Dimension("instrument without operators".into()))?;
        let shape = first.shape();
        qubits_of(shape.0, "output")?;
        qubits_of(shape.1, "input")?;
        for b in &branches {
            if b.is_empty() {
                return Err(Error::Dimension("empty branch".into()));
            }
            check_shapes(b, shape)?;
        }
        let d = completeness_defect(branches.iter().flatten(), shape.1);
        if d > INPUT_TOL {
            return Err(Error::invariant("instrument is not trace preserving", d));
        }
        Ok(Instrument { branches })
    }

    pub fn branches(&self) -> &[Vec<CMatrix>] {
        &self.branches
    }

    pub fn input_dim(&self) -> usize {
        self.branches[0][0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.branches[0][0].nrows()
    }

    /// Unnormalized `E^j(ρ)` for every outcome.
    pub fn apply(&self, rho: &CMatrix) -> Vec<CMatrix> {
        self.branches
            .iter()
            .map(|ops| {
                let d = self.output_dim();
                let mut out = CMatrix::zeros(d, d);
                for a in ops {
                    out += a * rho * a.adjoint();
                }
                out
            })
            .collect()
    }
}

/// Circuit for the instrument: measures on the outcome register (qubit
/// `q` into classical bit `q`), trace-outs on the environment. The
/// report's residual is the root sum of squared per-branch Choi distances.
pub fn dec_instrument(inst: &Instrument) -> Result<(Circuit, SynthesisReport)> {
    dec_instrument_with(inst, Method::Auto, true)
}

pub fn dec_instrument_with(
    inst: &Instrument,
    method: Method,
    simplified: bool,
) -> Result<(Circuit, SynthesisReport)> {
    let din = inst.input_dim();
    let branches: Vec<Vec<CMatrix>> = inst
        .branches
        .iter()
        .map(|ops| kraus_of(&choi_of(ops), din))
        .collect();
    let r = ceil_log2(branches.len());
    let k = ceil_log2(branches.iter().map(Vec::len).max().unwrap_or(1));
    let v = dilation(&branches)?;
    let (mut c, rep) = compile_isometry(&v, method, simplified)?;
    for q in 0..r {
        c.try_push(Gate::Measure { target: q, classical_bit: q })?;
    }
    for q in r..r + k {
        c.try_push(Gate::TraceOut { target: q })?;
    }
    let residual = instrument_residual(&c, &branches)?;
    Ok((c.clone(), channel_report(&c, rep, residual)))
}

fn instrument_residual(c: &Circuit, branches: &[Vec<CMatrix>]) -> Result<f64> {
    let got = circuit_branch_chois(c)?;
    let mut sq = 0.0;
    for (j, g) in got.iter().enumerate() {
        let d = match branches.get(j) {
            Some(ops) => frobenius(&(g.matrix() - choi_of(ops))),
            None => frobenius(g.matrix()),
        };
        sq += d * d;
    }
    Ok(sq.sqrt())
}

/// The instrument `{{√E_j}}` followed by a trace-out of the system, so
/// only the outcome register is left.
pub fn dec_povm(p: &Povm) -> Result<(Circuit, SynthesisReport)> {
    dec_povm_with(p, Method::Auto, true)
}

pub fn dec_povm_with(p: &Povm, method: Method, simplified: bool) -> Result<(Circuit, SynthesisReport)> {
    let branches = p
        .effects
        .iter()
        .map(|e| Ok(vec![psd_sqrt(e)?]))
        .collect::<Result<Vec<_>>>()?;
    let inst = Instrument::new(branches)?;
    let (mut c, rep) = dec_instrument_with(&inst, method, simplified)?;
    for q in c.output_qubits() {
        c.try_push(Gate::TraceOut { target: q })?;
    }
    // compare against the effects as rank-one-output branches
    let traced: Vec<Vec<CMatrix>> = p
        .effects
        .iter()
        .map(|e| {
            let s = psd_sqrt(e)?;
            Ok((0..s.nrows()).map(|o| s.rows(o, 1).into_owned()).collect())
        })
        .collect::<Result<_>>()?;
    let residual = instrument_residual(&c, &traced)?;
    Ok((c.clone(), channel_report(&c, rep, residual)))
}

/// Pretty-good measurement `M_i = p_i φ^{−1/2} φ_i φ^{−1/2}`, `φ = Σ p_i φ_i`,
/// with the inverse square root taken on the support of φ. A final effect
/// `1 − Π_supp(φ)` is added when φ is rank deficient.
pub fn pgm_effects(states: &[CMatrix], probs: &[f64]) -> Result<Povm> {
    if states.is_empty() || states.len() != probs.len() {
        return Err(Error::Dimension(format!(
            "{} states but {} probabilities",
            states.len(),
            probs.len()
        )));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::Precondition("probabilities must be non-negative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > INPUT_TOL {
        return Err(Error::invariant("probabilities do not sum to one", (total - 1.0).abs()));
    }
    let d = states[0].nrows();
    check_shapes(states, (d, d))?;
    for s in states {
        let tr = (s.trace() - c64(1.0, 0.0)).norm();
        if tr > INPUT_TOL {
            return Err(Error::invariant("state does not have unit trace", tr));
        }
        psd_sqrt(s)?;
    }
    let mut phi = CMatrix::zeros(d, d);
    for (s, &p) in states.iter().zip(probs) {
        phi += s * c64(p, 0.0);
    }
    let (vals, vecs) = hermitian_eig(&phi);
    let mut inv_sqrt = CMatrix::zeros(d, d);
    let mut proj = CMatrix::zeros(d, d);
    for (k, &l) in vals.iter().enumerate() {
        if l > RANK_TOL {
            let v = vecs.column(k);
            let outer = v * v.adjoint();
            inv_sqrt += &outer * c64(1.0 / l.sqrt(), 0.0);
            proj += outer;
        }
    }
    let mut effects: Vec<CMatrix> = states
        .iter()
        .zip(probs)
        .map(|(s, &p)| {
            let m = &inv_sqrt * s * &inv_sqrt * c64(p, 0.0);
            (&m + m.adjoint()) * c64(0.5, 0.0)
        })
        .collect();
    let rest = CMatrix::identity(d, d) - proj;
    if frobenius(&rest) > 1e-9 {
        effects.push(rest);
    }
    Povm::new(effects)
}
