use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qcompile::channel::{dec_channel_with, dec_instrument_with, dec_povm_with};
use qcompile::export::{to_latex, to_qasm};
use qcompile::io;
use qcompile::ion::{cnot_to_xx_circuit, xx_to_cnot_circuit};
use qcompile::synth::{compile_isometry, random_isometry, Method, SynthesisReport};
use qcompile::{Circuit, Error};

#[derive(Parser)]
#[command(name = "qcompile", version, about = "Compile quantum operations into rotation and C-NOT circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit for an operation file.
    Compile {
        kind: Kind,
        input: PathBuf,
        #[command(flatten)]
        opts: CompileOpts,
    },
    /// Check the type invariants of an input file.
    Validate { kind: InputKind, input: PathBuf },
    /// Synthesize, simulate and print the report without writing a circuit.
    Roundtrip {
        kind: Kind,
        input: PathBuf,
        #[arg(long, default_value = "auto", value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        no_simplify: bool,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Retarget a circuit file between C-NOT and XX gate sets.
    Convert {
        direction: Direction,
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a circuit file as OpenQASM 2.0 or LaTeX.
    Export {
        format: ExportFormat,
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Digits shown for angles in LaTeX output.
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Draw random inputs.
    Sample {
        #[command(subcommand)]
        what: Sample,
    },
}

#[derive(Subcommand)]
enum Sample {
    /// Haar-random isometry from m to n qubits.
    Iso {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompileOpts {
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    method: Method,
    #[arg(long)]
    no_simplify: bool,
    #[arg(long, value_enum, default_value_t = Target::Cnot)]
    target: Target,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Accepted for reproducible scripting; synthesis itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Iso,
    Channel,
    Povm,
    Instrument,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputKind {
    Iso,
    Channel,
    Povm,
    Instrument,
    Circuit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Cnot,
    Xx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Qasm,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    ToXx,
    ToCnot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Qasm,
    Latex,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with the process exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Dimension(_) | Error::InvalidCircuit(_) => 2,
            Error::Invariant { .. } | Error::Precondition(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(1, format!("{}: {e}", p.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn synthesize(kind: Kind, text: &str, method: Method, simplified: bool) -> Result<(Circuit, SynthesisReport), Failure> {
    Ok(match kind {
        Kind::Iso => compile_isometry(&io::read_isometry(text)?, method, simplified)?,
        Kind::Channel => dec_channel_with(&io::read_channel(text)?, method, simplified)?,
        Kind::Povm => dec_povm_with(&io::read_povm(text)?, method, simplified)?,
        Kind::Instrument => dec_instrument_with(&io::read_instrument(text)?, method, simplified)?,
    })
}

fn report_json(rep: &SynthesisReport) -> String {
    serde_json::to_string(rep).expect("report serializes")
}

fn check_residual(rep: &SynthesisReport, tolerance: f64) -> Result<(), Failure> {
    if rep.residual > tolerance {
        return Err(fail(4, format!("residual {:.3e} exceeds tolerance {tolerance:.3e}", rep.residual)));
    }
    Ok(())
}

fn render(c: &Circuit, format: Format, precision: Option<usize>) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => io::write_circuit(c),
        Format::Qasm => to_qasm(c)?.text,
        Format::Latex => to_latex(c, precision),
    })
}

fn compile(kind: Kind, input: &Path, o: &CompileOpts) -> Result<(), Failure> {
    if o.target == Target::Xx && o.format == Format::Qasm {
        return Err(fail(2, "the QASM subset has no XX gate; use --format json or latex"));
    }
    let text = read(input)?;
    let (mut c, rep) = synthesize(kind, &text, o.method, !o.no_simplify)?;
    if o.target == Target::Xx {
        c = cnot_to_xx_circuit(&c)?;
    }
    check_residual(&rep, o.tolerance)?;
    write_out(o.output.as_deref(), &render(&c, o.format, None)?)?;
    println!("{}", report_json(&rep));
    Ok(())
}

fn validate(kind: InputKind, input: &Path) -> Result<(), Failure> {
    let text = read(input)?;
    let report = match kind {
        InputKind::Iso => {
            let v = io::read_isometry(&text)?;
            json!({"status": "ok", "kind": "isometry", "m": v.m(), "n": v.n()})
        }
        InputKind::Channel => {
            let ch = io::read_channel(&text)?;
            json!({"status": "ok", "kind": "channel", "kraus": ch.kraus().len(),
                   "input_dim": ch.input_dim(), "output_dim": ch.output_dim()})
        }
        InputKind::Povm => {
            let p = io::read_povm(&text)?;
            json!({"status": "ok", "kind": "povm", "effects": p.effects().len(), "dim": p.dim(),
                   "effect_sum_defect": p.effect_sum_defect()})
        }
        InputKind::Instrument => {
            let inst = io::read_instrument(&text)?;
            json!({"status": "ok", "kind": "instrument", "branches": inst.branches().len(),
                   "input_dim": inst.input_dim(), "output_dim": inst.output_dim()})
        }
        InputKind::Circuit => {
            let c = io::read_circuit(&text)?;
            json!({"status": "ok", "kind": "circuit", "num_qubits": c.num_qubits(),
                   "gates": c.len(), "cnots": c.cnot_count(), "rotations": c.rotation_count()})
        }
    };
    println!("{report}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { kind, input, opts } => compile(kind, &input, &opts),
        Command::Validate { kind, input } => validate(kind, &input),
        Command::Roundtrip { kind, input, method, no_simplify, tolerance } => {
            let (_, rep) = synthesize(kind, &read(&input)?, method, !no_simplify)?;
            println!("{}", report_json(&rep));
            check_residual(&rep, tolerance)
        }
        Command::Convert { direction, input, output } => {
            let c = io::read_circuit(&read(&input)?)?;
            let out = match direction {
                Direction::ToXx => cnot_to_xx_circuit(&c)?,
                Direction::ToCnot => xx_to_cnot_circuit(&c)?,
            };
            write_out(output.as_deref(), &io::write_circuit(&out))
        }
        Command::Export { format, input, output, precision } => {
            let c = io::read_circuit(&read(&input)?)?;
            let format = match format {
                ExportFormat::Qasm => Format::Qasm,
                ExportFormat::Latex => Format::Latex,
            };
            write_out(output.as_deref(), &render(&c, format, precision)?)
        }
        Command::Sample { what: Sample::Iso { m, n, seed, output } } => {
            let v = random_isometry(m, n, seed)?;
            write_out(output.as_deref(), &io::isometry_to_json(v.matrix()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
