use super::{quarter_pi_multiple, symbolic};
use crate::circuit::{Angle, Axis, Circuit, Gate};

#[derive(Clone, Copy, PartialEq)]
enum Wire {
    Quantum,
    Classical,
    Ended,
}

fn fmt_angle(a: Angle, precision: Option<usize>) -> Option<String> {
    let p = precision?;
    let x = a.radians();
    Some(match quarter_pi_multiple(x) {
        Some(k) => symbolic(k, "\\pi"),
        None => format!("{x:.p$}"),
    })
}

fn rotation_label(axis: Axis, a: Angle, precision: Option<usize>) -> String {
    let name = match axis {
        Axis::X => "R_x",
        Axis::Y => "R_y",
        Axis::Z => "R_z",
    };
    match fmt_angle(a, precision) {
        Some(t) => format!("\\gate{{{name}({t})}}"),
        None => format!("\\gate{{{name}}}"),
    }
}

/// Qcircuit source. Angles are printed with `precision` decimals (π
/// multiples symbolically) or left out when `precision` is `None`.
pub fn to_latex(c: &Circuit, precision: Option<usize>) -> String {
    let n = c.num_qubits();
    // ASAP placement over the vertical span of each gate
    let mut columns: Vec<Vec<(usize, String)>> = Vec::new();
    let mut depth = vec![0usize; n];
    for g in c.gates() {
        let qs = g.qubits();
        let lo = *qs.iter().min().expect("gate has a qubit");
        let hi = *qs.iter().max().expect("gate has a qubit");
        let col = (lo..=hi).map(|q| depth[q]).max().unwrap_or(0);
        for d in &mut depth[lo..=hi] {
            *d = col + 1;
        }
        if columns.len() <= col {
            columns.resize(col + 1, Vec::new());
        }
        let cells = &mut columns[col];
        match *g {
            Gate::Rx { angle, target } | Gate::Ry { angle, target } | Gate::Rz { angle, target } => {
                let axis = g.as_rotation().expect("rotation").0;
                cells.push((target, rotation_label(axis, angle, precision)));
            }
            Gate::R { theta, phi, target } => {
                let label = match (fmt_angle(theta, precision), fmt_angle(phi, precision)) {
                    (Some(t), Some(p)) => format!("\\gate{{R({t},{p})}}"),
                    _ => "\\gate{R}".into(),
                };
                cells.push((target, label));
            }
            Gate::Cnot { control, target } => {
                cells.push((control, format!("\\ctrl{{{}}}", target as i64 - control as i64)));
                cells.push((target, "\\targ".into()));
            }
            Gate::Xx { phi, qubit_a, qubit_b } => {
                let label = match fmt_angle(phi, precision) {
                    Some(p) => format!("XX({p})"),
                    None => "XX".into(),
                };
                cells.push((
                    qubit_a,
                    format!("\\gate{{{label}}} \\qwx[{}]", qubit_b as i64 - qubit_a as i64),
                ));
                cells.push((qubit_b, format!("\\gate{{{label}}}")));
            }
            Gate::Measure { target, .. } => cells.push((target, "\\meter".into())),
            Gate::TraceOut { target } => cells.push((target, "\\meter".into())),
        }
    }

    let ncols = columns.len() + 1;
    let mut grid = vec![vec![String::new(); ncols]; n];
    let mut state = vec![Wire::Quantum; n];
    let mut ends_at = vec![None; n];
    for (k, col) in columns.iter().enumerate() {
        for (q, cell) in col {
            grid[*q][k] = cell.clone();
        }
        for (q, cell) in col {
            if cell == "\\meter" {
                ends_at[*q] = Some(k);
            }
        }
    }
    // terminal gates decide the wire style after them
    for g in c.gates() {
        match *g {
            Gate::Measure { target, .. } => state[target] = Wire::Classical,
            Gate::TraceOut { target } => state[target] = Wire::Ended,
            _ => {}
        }
    }
    for q in 0..n {
        for (k, cell) in grid[q].iter_mut().enumerate() {
            if !cell.is_empty() {
                continue;
            }
            let after_end = ends_at[q].is_some_and(|e| k > e);
            *cell = match (after_end, state[q]) {
                (true, Wire::Classical) => "\\cw".into(),
                (true, Wire::Ended) => String::new(),
                _ => "\\qw".into(),
            };
        }
    }

    let mut out = String::from("\\Qcircuit @C=1em @R=.7em {\n");
    for q in 0..n {
        let label = if c.ancillas().contains(&q) {
            "\\lstick{\\ket{0}}".to_string()
        } else {
            format!("\\lstick{{q_{{{q}}}}}")
        };
        let row: Vec<&str> = grid[q].iter().map(String::as_str).collect();
        let end = if q + 1 < n { " \\\\" } else { "" };
        out.push_str(&format!("  {label} & {}{end}\n", row.join(" & ")));
    }
    out.push_str("}\n");
    out
}
