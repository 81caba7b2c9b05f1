//! A line-oriented text format for qubit circuits and an evaluator that
//! multiplies the placed gates into a register unitary.
//!
//! ```text
//! qubits 3          # optional header, default 3
//! cnot 1 2          # control first
//! cnot 0 1
//! gate U8 0 1 2     # whole catalog gate
//! ```
//!
//! Lines run in time order from top to bottom, so the first line is the
//! rightmost factor of the evaluated product.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};
use crate::gates::{elementary, paper_gate, CATALOG_NAMES};
use crate::matrix::ComplexMatrix;

pub const DEFAULT_QUBITS: usize = 3;

/// A gate that can appear on a circuit line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
    Toffoli,
    Fredkin,
    /// A named entry of the gate catalog, applied as a whole.
    Catalog(String),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Toffoli | GateKind::Fredkin => 3,
            GateKind::Catalog(name) => paper_gate(name).map_or(0, |g| g.systems.len()),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            GateKind::H => elementary("H"),
            GateKind::X => elementary("X"),
            GateKind::Y => elementary("Y"),
            GateKind::Z => elementary("Z"),
            GateKind::Cnot => elementary("CNOT"),
            GateKind::Cz => elementary("CZ"),
            GateKind::Swap => elementary("SWAP"),
            GateKind::Toffoli => elementary("TOFFOLI"),
            GateKind::Fredkin => elementary("FREDKIN"),
            GateKind::Catalog(name) => Ok(paper_gate(name)?.matrix),
        }
    }

    /// Whether applying the gate twice gives the identity.
    pub fn is_involution(&self) -> bool {
        !matches!(self, GateKind::Catalog(_))
    }
}

impl FromStr for GateKind {
    type Err = ParseErrorKind;

    fn from_str(s: &str) -> std::result::Result<Self, ParseErrorKind> {
        Ok(match s {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "cnot" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            "toffoli" => GateKind::Toffoli,
            "fredkin" => GateKind::Fredkin,
            other => return Err(ParseErrorKind::UnknownGate(other.to_string())),
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Toffoli => "toffoli",
            GateKind::Fredkin => "fredkin",
            GateKind::Catalog(name) => return write!(f, "gate {name}"),
        };
        f.write_str(s)
    }
}

/// A gate applied to an ordered list of qubits (control first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedGate {
    pub gate: GateKind,
    pub positions: Vec<usize>,
}

impl PlacedGate {
    pub fn new(gate: GateKind, positions: Vec<usize>) -> Self {
        Self { gate, positions }
    }
}

/// An ordered list of placed gates on an `n_qubits` register.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    steps: Vec<PlacedGate>,
}

fn check_step(step: &PlacedGate, n_qubits: usize) -> std::result::Result<(), ParseErrorKind> {
    let expected = step.gate.arity();
    if step.positions.len() != expected {
        return Err(ParseErrorKind::ArityMismatch {
            gate: step.gate.to_string(),
            expected,
            found: step.positions.len(),
        });
    }
    if let Some(&index) = step.positions.iter().find(|&&q| q >= n_qubits) {
        return Err(ParseErrorKind::IndexOutOfRange { index, n_qubits });
    }
    let mut seen = HashSet::new();
    if let Some(&dup) = step.positions.iter().find(|q| !seen.insert(**q)) {
        return Err(ParseErrorKind::DuplicateIndex(dup));
    }
    Ok(())
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "a circuit needs at least one qubit");
        Self {
            n_qubits,
            steps: Vec::new(),
        }
    }

    /// Builds a circuit, validating every step.
    pub fn with_steps(n_qubits: usize, steps: Vec<PlacedGate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for s in steps {
            c.push(s)?;
        }
        Ok(c)
    }

    /// Appends a step; it runs after every step already present.
    pub fn push(&mut self, step: PlacedGate) -> Result<()> {
        check_step(&step, self.n_qubits).map_err(|kind| Error::Parse {
            line: self.steps.len() + 1,
            kind,
        })?;
        self.steps.push(step);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[PlacedGate] {
        &self.steps
    }

    pub fn evaluate(&self) -> Result<ComplexMatrix> {
        evaluate(self)
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

fn parse_index(tok: &str) -> std::result::Result<usize, ParseErrorKind> {
    tok.parse::<usize>()
        .map_err(|_| ParseErrorKind::BadIndex(tok.to_string()))
}

/// Parses circuit text. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut n_qubits = None;
    let mut steps: Vec<(usize, PlacedGate)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |kind| Error::Parse {
            line: line_no,
            kind,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().expect("non-empty line");

        if head == "qubits" {
            if n_qubits.is_some() || !steps.is_empty() {
                return Err(err(ParseErrorKind::BadHeader(
                    "`qubits` must appear once, before any gate".into(),
                )));
            }
            let n = toks
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| {
                    err(ParseErrorKind::BadHeader(
                        "expected `qubits N` with N > 0".into(),
                    ))
                })?;
            if toks.next().is_some() {
                return Err(err(ParseErrorKind::BadHeader("trailing tokens".into())));
            }
            n_qubits = Some(n);
            continue;
        }

        let gate = if head == "gate" {
            let name = toks
                .next()
                .ok_or_else(|| err(ParseErrorKind::UnknownGate("gate".into())))?;
            if !CATALOG_NAMES.contains(&name) {
                return Err(err(ParseErrorKind::UnknownGate(name.to_string())));
            }
            GateKind::Catalog(name.to_string())
        } else {
            head.parse::<GateKind>().map_err(err)?
        };
        let positions = toks
            .map(parse_index)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(err)?;
        steps.push((line_no, PlacedGate::new(gate, positions)));
    }

    let n = n_qubits.unwrap_or(DEFAULT_QUBITS);
    let mut circuit = Circuit::new(n);
    for (line, step) in steps {
        check_step(&step, n).map_err(|kind| Error::Parse { line, kind })?;
        circuit.steps.push(step);
    }
    Ok(circuit)
}

/// Canonical text: header line then one step per line.
pub fn format(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.n_qubits);
    for step in &c.steps {
        out.push_str(&step.gate.to_string());
        for q in &step.positions {
            out.push(' ');
            out.push_str(&q.to_string());
        }
        out.push('\n');
    }
    out
}

/// The `2^n` operator acting as `gate` on `positions` (in the listed order)
/// and as the identity elsewhere. Entries are copied, never recomputed.
pub fn embed(gate: &ComplexMatrix, positions: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
    let k = positions.len();
    if k == 0 || k > n_qubits || !gate.is_square() || gate.rows() != 1 << k {
        return Err(Error::DimensionMismatch(format!(
            "a {}x{} gate cannot act on {k} of {n_qubits} qubits",
            gate.rows(),
            gate.cols()
        )));
    }
    let mut seen = HashSet::new();
    for &q in positions {
        if q >= n_qubits || !seen.insert(q) {
            return Err(Error::DimensionMismatch(format!(
                "invalid positions {positions:?} for {n_qubits} qubits"
            )));
        }
    }

    let dim = 1usize << n_qubits;
    let shifts: Vec<usize> = positions.iter().map(|&q| n_qubits - 1 - q).collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let sub_index = |basis: usize| {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((basis >> s) & 1))
    };
    let scatter = |sub: usize| {
        shifts.iter().enumerate().fold(0usize, |acc, (i, &s)| {
            acc | (((sub >> (k - 1 - i)) & 1) << s)
        })
    };

    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let rest = col & !mask;
        let gc = sub_index(col);
        for gr in 0..(1usize << k) {
            let v = gate[(gr, gc)];
            if v != num_complex::Complex64::new(0.0, 0.0) {
                out[(rest | scatter(gr), col)] = v;
            }
        }
    }
    Ok(out)
}

/// Product of the embedded steps, first step applied first.
pub fn evaluate(c: &Circuit) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1 << c.n_qubits);
    for step in &c.steps {
        let m = embed(&step.gate.matrix()?, &step.positions, c.n_qubits)?;
        acc = m.matmul(&acc)?;
    }
    Ok(acc)
}
