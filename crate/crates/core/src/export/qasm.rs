use std::fmt;

use super::{quarter_pi_multiple, symbolic};
use crate::circuit::{Angle, Axis, Circuit, Gate};
use crate::error::{Error, Result};

/// OpenQASM 2.0 text. IR qubit `i` lives in register slot `n − 1 − i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QasmDocument {
    pub text: String,
    pub num_qubits: usize,
}

impl QasmDocument {
    pub fn register_index(&self, ir_qubit: usize) -> usize {
        self.num_qubits - 1 - ir_qubit
    }
}

impl fmt::Display for QasmDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn angle_text(x: f64) -> String {
    match quarter_pi_multiple(x) {
        Some(k) => symbolic(k, "pi"),
        None => format!("{x:.16e}"),
    }
}

/// Rotations become `r_a(−θ)`; trace-outs a barrier with a comment.
pub fn to_qasm(c: &Circuit) -> Result<QasmDocument> {
    let n = c.num_qubits();
    let reg = |q: usize| n - 1 - q;
    let nbits = c
        .gates()
        .iter()
        .filter_map(|g| match *g {
            Gate::Measure { classical_bit, .. } => Some(classical_bit + 1),
            _ => None,
        })
        .max();
    let mut text = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    text.push_str(&format!("qreg q[{n}];\n"));
    if let Some(nb) = nbits {
        text.push_str(&format!("creg c[{nb}];\n"));
    }
    for g in c.gates() {
        let line = match *g {
            Gate::Rx { angle, target } | Gate::Ry { angle, target } | Gate::Rz { angle, target } => {
                let name = match g.as_rotation().expect("rotation").0 {
                    Axis::X => "rx",
                    Axis::Y => "ry",
                    Axis::Z => "rz",
                };
                format!("{name}({}) q[{}];", angle_text(-angle.radians()), reg(target))
            }
            Gate::Cnot { control, target } => format!("cx q[{}],q[{}];", reg(control), reg(target)),
            Gate::Measure { target, classical_bit } => {
                let nb = nbits.expect("measure present");
                format!("measure q[{}] -> c[{}];", reg(target), nb - 1 - classical_bit)
            }
            Gate::TraceOut { target } => {
                format!("barrier q[{0}]; // trace out q[{0}]", reg(target))
            }
            Gate::R { .. } | Gate::Xx { .. } => {
                return Err(Error::Unsupported(format!(
                    "{} has no QASM form; convert gate set first",
                    g.name()
                )))
            }
        };
        text.push_str(&line);
        text.push('\n');
    }
    Ok(QasmDocument { text, num_qubits: n })
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col0 + self.pos + 1,
            message: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected identifier"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn uint(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| {
                self.pos = start;
                self.err("expected integer")
            })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'+' || c == b'-')
                && self.pos > start
                && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| {
                self.pos = start;
                self.err("expected number")
            })
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v += self.term()?;
            } else if self.eat(b'-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.factor()?;
        loop {
            if self.eat(b'*') {
                v *= self.factor()?;
            } else if self.eat(b'/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let id = self.ident()?;
                if id == "pi" {
                    Ok(std::f64::consts::PI)
                } else {
                    Err(self.err(format!("unknown constant {id}")))
                }
            }
            _ => self.number(),
        }
    }

    fn args(&mut self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        if self.eat(b'(') {
            if !self.eat(b')') {
                loop {
                    out.push(self.expr()?);
                    if self.eat(b')') {
                        break;
                    }
                    self.expect(b',')?;
                }
            }
        }
        Ok(out)
    }

    fn reg_ref(&mut self, name: &str) -> Result<usize> {
        let id = self.ident()?;
        if id != name {
            return Err(self.err(format!("unknown register {id}")));
        }
        self.expect(b'[')?;
        let i = self.uint()?;
        self.expect(b']')?;
        Ok(i)
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }
}

/// Parses the subset written by [`to_qasm`] plus `u1`, `u2`, `u3`/`U`
/// and plain barriers. A barrier whose line comment says "trace out"
/// becomes a trace-out.
pub fn from_qasm(text: &str) -> Result<Circuit> {
    let mut header = false;
    let mut qreg: Option<(String, usize)> = None;
    let mut creg: Option<(String, usize)> = None;
    let mut circuit: Option<Circuit> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let (code, comment) = match raw.find("//") {
            Some(i) => (&raw[..i], &raw[i + 2..]),
            None => (raw, ""),
        };
        let mut offset = 0;
        for stmt in code.split_inclusive(';') {
            let col0 = offset;
            offset += stmt.len();
            if stmt.trim().is_empty() {
                continue;
            }
            let body = match stmt.strip_suffix(';') {
                Some(b) => b,
                None => {
                    return Err(Error::Parse {
                        line,
                        column: col0 + 1,
                        message: "statement does not end with ';'".into(),
                    })
                }
            };
            let mut cur = Cursor { s: body.as_bytes(), pos: 0, line, col0 };
            let kw = cur.ident()?;
            if !header {
                if kw != "OPENQASM" {
                    return Err(Error::Parse { line, column: col0 + 1, message: "missing OPENQASM 2.0 header".into() });
                }
                let v = cur.number()?;
                if v != 2.0 {
                    return Err(cur.err("only OpenQASM 2.0 is supported"));
                }
                cur.end()?;
                header = true;
                continue;
            }
            match kw.as_str() {
                "include" => {}
                "qreg" | "creg" => {
                    let name = cur.ident()?;
                    cur.expect(b'[')?;
                    let size = cur.uint()?;
                    cur.expect(b']')?;
                    cur.end()?;
                    let slot = if kw == "qreg" { &mut qreg } else { &mut creg };
                    if slot.is_some() {
                        return Err(cur.err(format!("only one {kw} is supported")));
                    }
                    *slot = Some((name, size));
                    if kw == "qreg" {
                        circuit = Some(Circuit::new(size));
                    }
                }
                _ => {
                    let (qname, n) = qreg.clone().ok_or_else(|| cur.err("gate before qreg"))?;
                    let c = circuit.as_mut().expect("qreg seen");
                    let ir = |cur: &Cursor, k: usize| -> Result<usize> {
                        if k >= n {
                            Err(cur.err(format!("qubit index {k} out of range")))
                        } else {
                            Ok(n - 1 - k)
                        }
                    };
                    let mut gates = Vec::new();
                    match kw.as_str() {
                        "rx" | "ry" | "rz" | "u1" | "u2" | "u3" | "U" => {
                            let args = cur.args()?;
                            let want = match kw.as_str() {
                                "u2" => 2,
                                "u3" | "U" => 3,
                                _ => 1,
                            };
                            if args.len() != want {
                                return Err(cur.err(format!("{kw} takes {want} parameters")));
                            }
                            let k = cur.reg_ref(&qname)?;
                            let q = ir(&cur, k)?;
                            let rot = |axis, a: f64| Gate::rotation(axis, Angle::new(-a), q);
                            match kw.as_str() {
                                "rx" => gates.push(rot(Axis::X, args[0])),
                                "ry" => gates.push(rot(Axis::Y, args[0])),
                                "rz" | "u1" => gates.push(rot(Axis::Z, args[0])),
                                _ => {
                                    let (theta, phi, lambda) = if kw == "u2" {
                                        (std::f64::consts::FRAC_PI_2, args[0], args[1])
                                    } else {
                                        (args[0], args[1], args[2])
                                    };
                                    gates.push(rot(Axis::Z, lambda));
                                    gates.push(rot(Axis::Y, theta));
                                    gates.push(rot(Axis::Z, phi));
                                }
                            }
                        }
                        "cx" | "CX" => {
                            let a = cur.reg_ref(&qname)?;
                            cur.expect(b',')?;
                            let b = cur.reg_ref(&qname)?;
                            let (ca, cb) = (ir(&cur, a)?, ir(&cur, b)?);
                            if ca == cb {
                                return Err(cur.err("control and target coincide"));
                            }
                            gates.push(Gate::cnot(ca, cb));
                        }
                        "measure" => {
                            let k = cur.reg_ref(&qname)?;
                            let q = ir(&cur, k)?;
                            cur.expect(b'-')?;
                            cur.expect(b'>')?;
                            let (cname, nb) = creg.clone().ok_or_else(|| cur.err("measure before creg"))?;
                            let b = cur.reg_ref(&cname)?;
                            if b >= nb {
                                return Err(cur.err(format!("bit index {b} out of range")));
                            }
                            gates.push(Gate::Measure { target: q, classical_bit: nb - 1 - b });
                        }
                        "barrier" => {
                            let k = cur.reg_ref(&qname)?;
                            let mut qs = vec![ir(&cur, k)?];
                            while cur.eat(b',') {
                                let k = cur.reg_ref(&qname)?;
                                qs.push(ir(&cur, k)?);
                            }
                            if comment.contains("trace out") {
                                gates.extend(qs.into_iter().map(|target| Gate::TraceOut { target }));
                            }
                        }
                        other => return Err(Error::Parse { line, column: col0 + 1, message: format!("unsupported statement {other}") }),
                    }
                    cur.end()?;
                    for g in gates {
                        c.try_push(g).map_err(|e| cur.err(e.to_string()))?;
                    }
                }
            }
        }
    }
    if !header {
        return Err(Error::Parse { line: 1, column: 1, message: "missing OPENQASM 2.0 header".into() });
    }
    circuit.ok_or_else(|| Error::Parse { line: text.lines().count().max(1), column: 1, message: "no qreg declared".into() })
}
