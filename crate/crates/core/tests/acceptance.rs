//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! and the test fails if any of them does.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qcompile::channel::{
    dec_channel, dec_instrument, dec_povm, kraus_to_choi, minimize_kraus_rank, pgm_effects, Channel,
    Instrument, Povm,
};
use qcompile::circuit::{circuit_isometry, circuit_matrix};
use qcompile::export::{from_qasm, to_qasm};
use qcompile::ion::{cnot_to_xx_circuit, xx_to_cnot_circuit};
use qcompile::numerics::{
    c64, frobenius, haar_unitary, random_density, random_isometry_matrix, random_state, seeded_rng,
    unitary_eig, CMatrix,
};
use qcompile::simplify::simplify;
use qcompile::synth::{
    dec_isometry, dec_isometry_generic, householder, knill, knill_spectrum, qsd, qsd_isometry,
    state_prep_schmidt, Isometry,
};
use qcompile::verify::{instrument_distribution, phase_invariant_distance};
use qcompile::{Circuit, Gate};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    phase_invariant_distance(a, b).unwrap().value()
}

fn iso_residual(c: &Circuit, v: &CMatrix) -> f64 {
    dist(&circuit_isometry(c).unwrap(), v)
}

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.random_range(0..n);
        let t = rng.random_range(-PI..PI);
        match rng.random_range(0..4) {
            0 => c.push(Gate::rx(t, q)),
            1 => c.push(Gate::ry(t, q)),
            2 => c.push(Gate::rz(t, q)),
            _ if n > 1 => {
                let mut r = rng.random_range(0..n - 1);
                if r >= q {
                    r += 1;
                }
                c.push(Gate::cnot(q, r));
            }
            _ => c.push(Gate::rz(t, q)),
        }
    }
    c
}

fn iso(v: CMatrix) -> Isometry {
    Isometry::new(v).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let tol = 1e-8;
    for n in 1..=4usize {
        for seed in 0..100u64 {
            let mut rng = seeded_rng(1000 * n as u64 + seed);
            let m = (seed as usize) % (n + 1);
            let u = haar_unitary(1 << n, &mut rng);
            let r = iso_residual(&qsd(&u).unwrap(), &u);
            ensure(r <= tol, || format!("qsd n={n} seed={seed}: {r:e}"))?;

            let v = random_isometry_matrix(1 << n, 1 << m, &mut rng);
            let vi = iso(v.clone());
            let runs: [(&str, fn(&Isometry) -> qcompile::Result<Circuit>); 5] = [
                ("qsd_isometry", qsd_isometry),
                ("knill", knill),
                ("householder", householder),
                ("dec_isometry", |v| dec_isometry(v).map(|r| r.0)),
                ("dec_isometry_generic", |v| dec_isometry_generic(v).map(|r| r.0)),
            ];
            for (name, f) in runs {
                let c = f(&vi).map_err(|e| format!("{name} {m}->{n} seed={seed}: {e}"))?;
                let r = iso_residual(&c, &v);
                ensure(r <= tol, || format!("{name} {m}->{n} seed={seed}: {r:e}"))?;
            }

            let psi = random_state(1 << n, &mut rng);
            let r = iso_residual(&state_prep_schmidt(&psi).unwrap(), &psi);
            ensure(r <= tol, || format!("state_prep n={n} seed={seed}: {r:e}"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))
}

fn criterion_2() -> Check {
    let mut rng = seeded_rng(2);
    for k in 0..200 {
        let n = 1 + k % 4;
        let m = rng.random_range(0..=n);
        let v = iso(random_isometry_matrix(1 << n, 1 << m, &mut rng));
        let (u, spec) = knill_spectrum(&v).map_err(|e| e.to_string())?;
        let (vals, _) = unitary_eig(&u).unwrap();
        let non_unit = vals.iter().filter(|l| (*l - c64(1.0, 0.0)).norm() > 1e-8).count();
        ensure(non_unit <= 1 << m, || format!("{m}->{n}: {non_unit} non-unit eigenvalues"))?;
        ensure(spec.len() <= 1 << m, || format!("{m}->{n}: {} factors", spec.len()))?;
        let d = frobenius(&(spec.reconstruct() - &u));
        ensure(d <= 1e-10, || format!("{m}->{n}: product off by {d:e}"))?;
    }
    Ok(())
}

fn criterion_3() -> Check {
    for seed in 0..100 {
        let mut rng = seeded_rng(300 + seed);
        let u3 = haar_unitary(8, &mut rng);
        let c3 = qsd(&u3).unwrap();
        ensure(c3.cnot_count() <= 24, || format!("3 qubits: {} C-NOTs", c3.cnot_count()))?;
        ensure(iso_residual(&c3, &u3) <= 1e-8, || "3-qubit residual".into())?;
        let u2 = haar_unitary(4, &mut rng);
        let c2 = qsd(&u2).unwrap();
        ensure(c2.cnot_count() <= 3, || format!("2 qubits: {} C-NOTs", c2.cnot_count()))?;
        ensure(iso_residual(&c2, &u2) <= 1e-8, || "2-qubit residual".into())?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    for seed in 0..50 {
        let mut rng = seeded_rng(400 + seed);
        let psi2 = random_state(4, &mut rng);
        let c2 = simplify(&state_prep_schmidt(&psi2).unwrap());
        ensure(c2.cnot_count() == 1, || format!("2 qubits: {} C-NOTs", c2.cnot_count()))?;
        let r = iso_residual(&c2, &psi2);
        ensure(r <= 1e-8, || format!("2 qubits: residual {r:e}"))?;
        let psi4 = random_state(16, &mut rng);
        let c4 = simplify(&state_prep_schmidt(&psi4).unwrap());
        ensure(c4.cnot_count() <= 16, || format!("4 qubits: {} C-NOTs", c4.cnot_count()))?;
        let r = iso_residual(&c4, &psi4);
        ensure(r <= 1e-8, || format!("4 qubits: residual {r:e}"))?;
    }
    Ok(())
}

fn amplitude_damping(g: f64) -> Channel {
    let k0 = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64((1.0 - g).sqrt(), 0.0)]);
    let k1 = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(g.sqrt(), 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
    Channel::new(vec![k0, k1]).unwrap()
}

fn criterion_5() -> Check {
    let ch = amplitude_damping(1.0 / 3.0);
    let (c, rep) = dec_channel(&ch).map_err(|e| e.to_string())?;
    ensure(rep.residual <= 1e-8, || format!("Choi distance {:e}", rep.residual))?;
    let choi = qcompile::verify::circuit_choi(&c).map_err(|e| e.to_string())?;
    let d = qcompile::verify::choi_distance(&choi, &kraus_to_choi(&ch)).unwrap();
    ensure(d <= 1e-8, || format!("recomputed Choi distance {d:e}"))?;
    ensure(c.ancillas().len() == 1, || format!("{} ancillas", c.ancillas().len()))?;
    ensure(c.traced_qubits().len() == 1, || format!("{} traced", c.traced_qubits().len()))?;
    ensure(c.cnot_count() <= 2, || format!("{} C-NOTs", c.cnot_count()))
}

fn printed_pgm() -> Vec<CMatrix> {
    let s = 2f64.sqrt();
    let m = |a: f64, b: f64, d: f64, scale: f64| {
        CMatrix::from_row_slice(2, 2, &[c64(a * scale, 0.0), c64(b * scale, 0.0), c64(b * scale, 0.0), c64(d * scale, 0.0)])
    };
    vec![
        m(1.0, 1.0, 1.0, 0.25),
        m(3.0 + 2.0 * s, -1.0, 3.0 - 2.0 * s, 0.125),
        m(3.0 - 2.0 * s, -1.0, 3.0 + 2.0 * s, 0.125),
    ]
}

fn criterion_6() -> Check {
    let h = 1.0 / 2f64.sqrt();
    let ket = |a: f64, b: f64| CMatrix::from_column_slice(2, 1, &[c64(a, 0.0), c64(b, 0.0)]);
    let states: Vec<CMatrix> = [ket(1.0, 0.0), ket(0.0, 1.0), ket(h, h)]
        .iter()
        .map(|k| k * k.adjoint())
        .collect();
    let pgm = pgm_effects(&states, &[1.0 / 3.0; 3]).map_err(|e| e.to_string())?;
    let printed = printed_pgm();
    ensure(pgm.effects().len() == 3, || format!("{} effects", pgm.effects().len()))?;
    for p in &printed {
        let best = pgm.effects().iter().map(|e| frobenius(&(e - p))).fold(f64::INFINITY, f64::min);
        ensure(best <= 1e-8, || format!("printed effect missing, closest at {best:e}"))?;
    }

    let povm = Povm::new(printed.clone()).map_err(|e| e.to_string())?;
    let (c, _) = dec_povm(&povm).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(6);
    for _ in 0..100 {
        let rho = random_density(2, &mut rng);
        let (probs, _) = instrument_distribution(&c, &rho).map_err(|e| e.to_string())?;
        ensure(probs.len() == 4, || format!("{} outcomes", probs.len()))?;
        for (i, e) in printed.iter().enumerate() {
            let want = (e * &rho).trace().re;
            ensure((probs[i] - want).abs() <= 1e-8, || format!("outcome {i}: {} vs {want}", probs[i]))?;
        }
        ensure(probs[3] <= 1e-10, || format!("Pr(1,1) = {:e}", probs[3]))?;
    }
    Ok(())
}

fn worked_example(rng: &mut ChaCha8Rng) -> Circuit {
    let mut a = || rng.random_range(-PI..PI);
    let mut c = Circuit::new(3);
    c.extend([
        Gate::cnot(0, 1),
        Gate::rz(a(), 2),
        Gate::cnot(1, 0),
        Gate::rz(a(), 0),
        Gate::rx(a(), 1),
        Gate::cnot(0, 1),
        Gate::rz(a(), 0),
        Gate::cnot(2, 1),
        Gate::rx(a(), 1),
        Gate::ry(a(), 2),
        Gate::cnot(0, 1),
        Gate::rx(a(), 2),
        Gate::rz(a(), 2),
    ]);
    c
}

fn criterion_7() -> Check {
    let mut rng = seeded_rng(7);
    for _ in 0..20 {
        let c = worked_example(&mut rng);
        let s = simplify(&c);
        ensure(c.cnot_count() == 5 && c.rotation_count() == 8, || "bad example".into())?;
        ensure(s.cnot_count() == 3, || format!("{} C-NOTs", s.cnot_count()))?;
        ensure(s.rotation_count() == 5, || format!("{} rotations", s.rotation_count()))?;
        let d = dist(&circuit_matrix(&s).unwrap(), &circuit_matrix(&c).unwrap());
        ensure(d <= 1e-10, || format!("example unitary moved by {d:e}"))?;
    }
    for k in 0..500 {
        let n = 1 + k % 4;
        let len = rng.random_range(0..40);
        let c = random_circuit(n, len, &mut rng);
        let s = simplify(&c);
        ensure(s.cnot_count() <= c.cnot_count(), || format!("circuit {k}: C-NOTs grew"))?;
        ensure(s.rotation_count() <= c.rotation_count(), || format!("circuit {k}: rotations grew"))?;
        let bound = 4 * s.cnot_count() + 3 * n;
        ensure(s.rotation_count() <= bound, || {
            format!("circuit {k}: {} rotations for {} C-NOTs", s.rotation_count(), s.cnot_count())
        })?;
        let d = dist(&circuit_matrix(&s).unwrap(), &circuit_matrix(&c).unwrap());
        ensure(d <= 1e-9, || format!("circuit {k}: unitary moved by {d:e}"))?;
    }
    Ok(())
}

/// At most one R on each wire between consecutive XX gates touching it,
/// and nothing but a leading Rx before the first.
fn ion_normal_form(c: &Circuit) -> bool {
    let n = c.num_qubits();
    let mut seen_xx = vec![false; n];
    let mut singles = vec![0usize; n];
    for g in c.gates() {
        match *g {
            Gate::Xx { qubit_a, qubit_b, .. } => {
                for q in [qubit_a, qubit_b] {
                    seen_xx[q] = true;
                    singles[q] = 0;
                }
            }
            Gate::R { target, .. } => {
                singles[target] += 1;
                if singles[target] > 1 {
                    return false;
                }
            }
            Gate::Rx { target, .. } => {
                if seen_xx[target] {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

fn criterion_8() -> Check {
    let mut rng = seeded_rng(8);
    for k in 0..200 {
        let n = 2 + k % 3;
        let c = random_circuit(n, rng.random_range(1..30), &mut rng);
        let ion = cnot_to_xx_circuit(&c).map_err(|e| e.to_string())?;
        ensure(ion.xx_count() == c.cnot_count(), || format!("circuit {k}: XX count"))?;
        ensure(ion_normal_form(&ion), || format!("circuit {k}: not in normal form"))?;
        let back = xx_to_cnot_circuit(&ion).map_err(|e| e.to_string())?;
        let u = circuit_matrix(&c).unwrap();
        let d1 = dist(&circuit_matrix(&ion).unwrap(), &u);
        let d2 = dist(&circuit_matrix(&back).unwrap(), &u);
        ensure(d1.max(d2) <= 1e-10, || format!("circuit {k}: residual {d1:e} / {d2:e}"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let allowed = ["OPENQASM", "include", "qreg", "creg", "rx", "ry", "rz", "cx", "measure", "barrier", "//"];
    let mut rng = seeded_rng(9);
    for k in 0..100 {
        let n = 1 + k % 4;
        let c = random_circuit(n, rng.random_range(0..40), &mut rng);
        let doc = to_qasm(&c).map_err(|e| e.to_string())?;
        for line in doc.text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            ensure(allowed.iter().any(|a| line.starts_with(a)), || format!("unexpected line {line:?}"))?;
        }
        let back = from_qasm(&doc.text).map_err(|e| e.to_string())?;
        let d = dist(&circuit_matrix(&back).unwrap(), &circuit_matrix(&c).unwrap());
        ensure(d <= 1e-9, || format!("circuit {k}: residual {d:e}"))?;
    }
    Ok(())
}

fn random_kraus(din: usize, dout: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
    let v = random_isometry_matrix(dout * count, din, rng);
    (0..count).map(|i| v.rows(i * dout, dout).into_owned()).collect()
}

fn criterion_10() -> Check {
    let mut rng = seeded_rng(10);
    for _ in 0..50 {
        let d = 1 << rng.random_range(1..=2);
        let count = rng.random_range(1..=6);
        // redundant copies push the list above the Choi rank
        let mut ops = random_kraus(d, d, count, &mut rng);
        let extra: Vec<CMatrix> = ops.iter().map(|k| k * c64(0.6, 0.0)).collect();
        for k in ops.iter_mut() {
            *k *= c64(0.8, 0.0);
        }
        ops.extend(extra);
        let ch = Channel::new(ops).map_err(|e| e.to_string())?;
        let rank = kraus_to_choi(&ch).rank();
        let once = minimize_kraus_rank(&ch);
        let twice = minimize_kraus_rank(&once);
        ensure(once.kraus_rank() == rank, || format!("{} Kraus vs Choi rank {rank}", once.kraus_rank()))?;
        ensure(twice.kraus_rank() == once.kraus_rank(), || "not idempotent".into())?;
        let cd = frobenius(&(kraus_to_choi(&twice).matrix() - kraus_to_choi(&once).matrix()));
        ensure(cd <= 1e-10, || format!("second pass moved the Choi state by {cd:e}"))?;
    }

    for _ in 0..20 {
        let ops = random_kraus(2, 2, 4, &mut rng);
        let split = rng.random_range(1..4);
        let branches = vec![ops[..split].to_vec(), ops[split..].to_vec()];
        let inst = Instrument::new(branches.clone()).map_err(|e| e.to_string())?;
        let (c, _) = dec_instrument(&inst).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let rho = random_density(2, &mut rng);
            let (probs, states) = instrument_distribution(&c, &rho).map_err(|e| e.to_string())?;
            let total: f64 = probs.iter().sum();
            ensure((total - 1.0).abs() <= 1e-10, || format!("probabilities sum to {total}"))?;
            for (j, ops) in branches.iter().enumerate() {
                let mut want = CMatrix::zeros(2, 2);
                for a in ops {
                    want += a * &rho * a.adjoint();
                }
                let got = &states[j] * c64(probs[j], 0.0);
                let e = frobenius(&(got - &want));
                ensure(e <= 1e-8, || format!("branch {j}: post-state off by {e:e}"))?;
            }
            for p in probs.iter().skip(branches.len()) {
                ensure(*p <= 1e-10, || format!("unused outcome has probability {p:e}"))?;
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(usize, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (k, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => writeln!(err, "criterion {k}: PASS").unwrap(),
            Err(msg) => {
                writeln!(err, "criterion {k}: FAIL ({msg})").unwrap();
                failed.push(k);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
