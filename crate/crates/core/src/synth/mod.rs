//! Isometry synthesis.
//!
//! An isometry `V` from `m` to `n` qubits is realized on `n` wires; the
//! `n − m` most significant wires are ancillas starting in |0⟩ and the
//! inputs occupy the rest.

mod householder;
mod knill;
mod multiplex;
mod qsd;
mod state_prep;
mod two_qubit;

pub use householder::{householder, householder_reflections, reflection_defect, Reflection};
pub use knill::{knill, knill_spectrum, KnillSpectrum};
pub use multiplex::{demultiplex_rotation, diagonal_circuit, zero_phase_circuit};
pub use qsd::{qsd, qsd_cnot_bound, qsd_isometry};
pub use state_prep::state_prep_schmidt;
pub use two_qubit::two_qubit_unitary;

use serde::{Deserialize, Serialize};

use crate::circuit::{circuit_isometry, Circuit};
use crate::error::{Error, Result};
use crate::numerics::{check_finite, check_isometry, log2_exact, random_isometry_matrix, seeded_rng, CMatrix, INPUT_TOL};
use crate::simplify::simplify;
use crate::verify::phase_invariant_distance;

/// Residual above which a candidate is rejected.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// A `2^n × 2^m` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: CMatrix,
    m: usize,
    n: usize,
}

impl Isometry {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        let n = log2_exact(rows)
            .ok_or_else(|| Error::Dimension(format!("{rows} rows is not a power of two")))?;
        let m = log2_exact(cols)
            .ok_or_else(|| Error::Dimension(format!("{cols} columns is not a power of two")))?;
        if m > n {
            return Err(Error::Dimension(format!("{rows}x{cols} has more columns than rows")));
        }
        check_finite(&matrix)?;
        check_isometry(&matrix, INPUT_TOL)?;
        Ok(Isometry { matrix, m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Haar-distributed isometry from `m` to `n` qubits, fixed by `seed`.
pub fn random_isometry(m: usize, n: usize, seed: u64) -> Result<Isometry> {
    if m > n {
        return Err(Error::Dimension(format!("cannot embed {m} qubits in {n}")));
    }
    let mut rng = seeded_rng(seed);
    Isometry::new(random_isometry_matrix(1 << n, 1 << m, &mut rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    /// Best of all concrete methods.
    Auto,
    /// One method picked from the shape alone.
    Generic,
    Qsd,
    Knill,
    Householder,
    #[serde(rename = "STATEPREP")]
    StatePrep,
}

impl Method {
    pub const CONCRETE: [Method; 4] = [Method::Qsd, Method::Knill, Method::Householder, Method::StatePrep];

    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "AUTO",
            Method::Generic => "GENERIC",
            Method::Qsd => "QSD",
            Method::Knill => "KNILL",
            Method::Householder => "HOUSEHOLDER",
            Method::StatePrep => "STATEPREP",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        let all = [Method::Auto, Method::Generic, Method::Qsd, Method::Knill, Method::Householder, Method::StatePrep];
        all.into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown method {s}")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub method: Method,
    pub cnots: usize,
    pub rotations: usize,
    pub residual: f64,
}

/// Phase-invariant distance between the circuit's isometry and `v`.
pub fn isometry_residual(c: &Circuit, v: &CMatrix) -> Result<f64> {
    Ok(phase_invariant_distance(&circuit_isometry(c)?, v)?.value())
}

/// Raw output of one concrete method, without simplification.
pub fn synthesize(v: &Isometry, method: Method) -> Result<Circuit> {
    match method {
        Method::Qsd => qsd_isometry(v),
        Method::Knill => knill(v),
        Method::Householder => householder(v),
        Method::StatePrep => {
            if v.m() != 0 {
                return Err(Error::Precondition("state preparation needs a single column".into()));
            }
            state_prep_schmidt(v.matrix())
        }
        Method::Auto | Method::Generic => compile_isometry(v, method, false).map(|(c, _)| c),
    }
}

fn run(v: &Isometry, method: Method, simplified: bool) -> Result<(Circuit, SynthesisReport)> {
    let mut c = synthesize(v, method)?;
    if simplified {
        c = simplify(&c);
    }
    let residual = isometry_residual(&c, v.matrix())?;
    let report = SynthesisReport {
        method,
        cnots: c.cnot_count(),
        rotations: c.rotation_count(),
        residual,
    };
    Ok((c, report))
}

/// Runs every applicable method concurrently and keeps the circuit with
/// the fewest C-NOTs among those within [`RESIDUAL_TOL`]. Ties go to the
/// earlier method in QSD, KNILL, HOUSEHOLDER, STATEPREP order.
pub fn dec_isometry(v: &Isometry) -> Result<(Circuit, SynthesisReport)> {
    best_of(v, true)
}

fn best_of(v: &Isometry, simplified: bool) -> Result<(Circuit, SynthesisReport)> {
    let methods: Vec<Method> = Method::CONCRETE
        .into_iter()
        .filter(|&m| m != Method::StatePrep || v.m() == 0)
        .collect();
    let results: Vec<Result<(Circuit, SynthesisReport)>> = std::thread::scope(|s| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| s.spawn(move || run(v, m, simplified)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerical("synthesis thread panicked".into()))))
            .collect()
    });

    let mut first_err = None;
    let mut ok = Vec::new();
    for r in results {
        match r {
            Ok(x) => ok.push(x),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if ok.is_empty() {
        return Err(first_err.expect("at least one method runs"));
    }
    let passing = ok.iter().filter(|(_, r)| r.residual <= RESIDUAL_TOL).count();
    let pick = if passing > 0 {
        ok.into_iter()
            .filter(|(_, r)| r.residual <= RESIDUAL_TOL)
            .min_by_key(|(_, r)| (r.cnots, r.method))
    } else {
        ok.into_iter()
            .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual))
    };
    Ok(pick.expect("non-empty"))
}

/// Method chosen from the shape: STATEPREP for states, QSD when
/// `m ≥ n − 1`, HOUSEHOLDER otherwise.
pub fn generic_method(m: usize, n: usize) -> Method {
    if m == 0 {
        Method::StatePrep
    } else if m + 1 >= n {
        Method::Qsd
    } else {
        Method::Householder
    }
}

/// Runs only [`generic_method`] and simplifies.
pub fn dec_isometry_generic(v: &Isometry) -> Result<(Circuit, SynthesisReport)> {
    run(v, generic_method(v.m(), v.n()), true)
}

/// Entry point used by the command line: any method, optional simplify.
pub fn compile_isometry(v: &Isometry, method: Method, simplified: bool) -> Result<(Circuit, SynthesisReport)> {
    match method {
        Method::Auto => best_of(v, simplified),
        Method::Generic => run(v, generic_method(v.m(), v.n()), simplified),
        m => run(v, m, simplified),
    }
}
