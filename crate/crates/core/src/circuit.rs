//! Gates, layers, circuits and their text formats.
//!
//! Circuit files list one gate per line (`H 0`, `TDG 1`, `CX 0 1`,
//! `RZ(0.39269908169872414) 0`). Gates are scheduled ASAP; a `LAYER` line
//! forces a layer boundary. `# qubits: N` pins the register width, which
//! otherwise is one more than the largest index used.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::weights::{ExactW, Weight};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    I,
    H,
    S,
    Sdg,
    T,
    Tdg,
    CX,
    RZ(f64),
    Unitary(Arc<Unitary>),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX => 2,
            GateKind::Unitary(u) => u.num_qubits(),
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GateKind::I => "I".into(),
            GateKind::H => "H".into(),
            GateKind::S => "S".into(),
            GateKind::Sdg => "SDG".into(),
            GateKind::T => "T".into(),
            GateKind::Tdg => "TDG".into(),
            GateKind::CX => "CX".into(),
            GateKind::RZ(t) => format!("RZ({t:?})"),
            GateKind::Unitary(_) => "U".into(),
        }
    }

    pub fn parse(name: &str) -> Result<GateKind> {
        let upper = name.to_ascii_uppercase();
        Ok(match upper.as_str() {
            "I" | "ID" => GateKind::I,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "T" => GateKind::T,
            "TDG" => GateKind::Tdg,
            "CX" | "CNOT" => GateKind::CX,
            _ => {
                let angle = upper
                    .strip_prefix("RZ(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown gate `{name}`")))?;
                let theta: f64 = angle
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad rotation angle in `{name}`")))?;
                GateKind::RZ(theta)
            }
        })
    }

    pub fn adjoint(&self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::RZ(t) => GateKind::RZ(-t),
            GateKind::Unitary(u) => GateKind::Unitary(Arc::new(u.adjoint())),
            g => g.clone(),
        }
    }

    /// Matrix with qubit 0 of the gate's support as most significant bit.
    /// Exact for the Clifford+T gates.
    pub fn matrix(&self) -> Matrix<Weight> {
        let z = Weight::zero;
        let o = Weight::one;
        match self {
            GateKind::I => Matrix::identity(2),
            GateKind::H => {
                let h = Weight::inv_sqrt2_pow(1);
                Matrix::from_rows(vec![vec![h.clone(), h.clone()], vec![h.clone(), -&h]])
            }
            GateKind::S => Matrix::diag(vec![o(), Weight::omega_pow(2)]),
            GateKind::Sdg => Matrix::diag(vec![o(), Weight::omega_pow(-2)]),
            GateKind::T => Matrix::diag(vec![o(), Weight::omega_pow(1)]),
            GateKind::Tdg => Matrix::diag(vec![o(), Weight::omega_pow(-1)]),
            GateKind::CX => Matrix::from_rows(vec![
                vec![o(), z(), z(), z()],
                vec![z(), o(), z(), z()],
                vec![z(), z(), z(), o()],
                vec![z(), z(), o(), z()],
            ]),
            GateKind::RZ(t) => Matrix::diag(vec![
                Weight::Float(Complex64::from_polar(1.0, -t / 2.0)),
                Weight::Float(Complex64::from_polar(1.0, t / 2.0)),
            ]),
            GateKind::Unitary(u) => u.matrix().clone(),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A dense unitary. Entries are exact whenever every entry was recognised
/// as an element of `Z[ω]/√2^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    n: usize,
    m: Matrix<Weight>,
}

impl Unitary {
    pub fn new(m: Matrix<Weight>) -> Result<Unitary> {
        let n = m
            .num_qubits()
            .ok_or_else(|| Error::InvalidArgument(format!("dimension {} is not a power of two", m.dim())))?;
        let c = m.map(|w| w.to_complex());
        let dev = c.adjoint().matmul(&c).entries().fold(0.0f64, |acc, (i, j, v)| {
            let target = if i == j { 1.0 } else { 0.0 };
            acc.max((v - Complex64::new(target, 0.0)).norm())
        });
        if dev > 1e-9 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Unitary { n, m })
    }

    /// Builds from complex entries, promoting to exact weights when every
    /// entry is recognised within `1e-12`.
    pub fn from_complex(m: &Matrix<Complex64>) -> Result<Unitary> {
        let exact: Option<Vec<ExactW>> =
            m.entries().map(|(_, _, z)| ExactW::from_complex_approx(*z, 1e-12)).collect();
        let w = match exact {
            Some(es) => {
                let mut w = Matrix::zeros(m.dim());
                for (i, e) in es.into_iter().enumerate() {
                    w.set(i / m.dim(), i % m.dim(), Weight::Exact(e));
                }
                w
            }
            None => m.map(|z| Weight::Float(*z)),
        };
        Unitary::new(w)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<Weight> {
        &self.m
    }

    pub fn is_exact(&self) -> bool {
        self.m.entries().all(|(_, _, w)| w.is_exact())
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        self.m.map(|w| w.to_complex())
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { n: self.n, m: self.m.adjoint() }
    }

    /// Parses the unitary file format: `n`, then `2^n` rows of `2^n`
    /// entries written as `re+imj`.
    pub fn parse(text: &str) -> Result<Unitary> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, first) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty unitary file".into() })?;
        let n: usize = first.parse().map_err(|_| Error::Parse { line: ln, msg: "expected qubit count".into() })?;
        if n == 0 || n > 10 {
            return Err(Error::Parse { line: ln, msg: format!("unsupported qubit count {n}") });
        }
        let dim = 1 << n;
        let mut rows = Vec::with_capacity(dim);
        for (ln, l) in lines {
            let row: Vec<Complex64> = l
                .split_whitespace()
                .map(|t| parse_complex(t).ok_or_else(|| Error::Parse { line: ln, msg: format!("bad entry `{t}`") }))
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::Parse { line: ln, msg: format!("expected {dim} entries, found {}", row.len()) });
            }
            rows.push(row);
        }
        if rows.len() != dim {
            return Err(Error::Parse { line: 0, msg: format!("expected {dim} rows, found {}", rows.len()) });
        }
        Unitary::from_complex(&Matrix::from_rows(rows))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        let d = self.m.dim();
        for r in 0..d {
            let row: Vec<String> = (0..d)
                .map(|c| {
                    let z = self.m.get(r, c).to_complex();
                    format!("{:?}{:+?}j", z.re, z.im)
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

fn parse_complex(t: &str) -> Option<Complex64> {
    let t = t.trim();
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse().ok()?;
            let im_txt = &body[i..];
            let im = match im_txt {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => s.parse().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Gate> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidArgument(format!(
                "{} acts on {} qubits, got {}",
                kind,
                kind.arity(),
                qubits.len()
            )));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("repeated qubit in {kind} {qubits:?}")));
        }
        Ok(Gate { kind, qubits })
    }

    pub fn single(kind: GateKind, q: usize) -> Gate {
        Gate::new(kind, vec![q]).expect("single-qubit gate")
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::CX, vec![control, target]).expect("distinct CX qubits")
    }

    pub fn adjoint(&self) -> Gate {
        Gate { kind: self.kind.adjoint(), qubits: self.qubits.clone() }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

pub type Layer = Vec<Gate>;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(n: usize) -> Circuit {
        Circuit { n, layers: Vec::new() }
    }

    pub fn from_layers(n: usize, layers: Vec<Layer>) -> Result<Circuit> {
        let mut c = Circuit::new(n);
        for l in layers {
            c.push_layer(l)?;
        }
        Ok(c)
    }

    /// Single-qubit circuit applying `kinds` in order, one per layer.
    pub fn sequence(kinds: &[GateKind]) -> Circuit {
        let mut c = Circuit::new(1);
        for k in kinds {
            c.push_layer(vec![Gate::single(k.clone(), 0)]).expect("single-qubit layer");
        }
        c
    }

    /// Schedules `gates` greedily: each goes into the earliest layer after
    /// the last one touching any of its qubits.
    pub fn asap(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n);
        c.append_asap(gates, 0)?;
        Ok(c)
    }

    fn append_asap(&mut self, gates: impl IntoIterator<Item = Gate>, floor: usize) -> Result<()> {
        let mut frontier = vec![floor; self.n];
        for g in gates {
            self.check_gate(&g)?;
            let t = g.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(floor);
            while self.layers.len() <= t {
                self.layers.push(Vec::new());
            }
            for &q in &g.qubits {
                frontier[q] = t + 1;
            }
            self.layers[t].push(g);
        }
        Ok(())
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        match g.qubits.iter().find(|&&q| q >= self.n) {
            Some(q) => Err(Error::InvalidArgument(format!("qubit {q} out of range for {} qubits", self.n))),
            None => Ok(()),
        }
    }

    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        let mut used = vec![false; self.n];
        for g in &layer {
            self.check_gate(g)?;
            for &q in &g.qubits {
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::InvalidArgument(format!("qubit {q} used twice in one layer")));
                }
            }
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// Reversed layers with every gate replaced by its adjoint.
    pub fn dagger(&self) -> Circuit {
        Circuit {
            n: self.n,
            layers: self.layers.iter().rev().map(|l| l.iter().map(Gate::adjoint).collect()).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n != other.n {
            return Err(Error::WidthMismatch(self.n, other.n));
        }
        let mut c = self.clone();
        c.layers.extend(other.layers.iter().cloned());
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        let mut width: Option<usize> = None;
        let mut segments: Vec<Vec<Gate>> = vec![Vec::new()];
        let mut saw_separator = false;
        let mut max_q: Option<usize> = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(w) = comment.trim().strip_prefix("qubits:") {
                    width = Some(w.trim().parse().map_err(|_| Error::Parse { line: ln, msg: "bad qubit count".into() })?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if line.eq_ignore_ascii_case("LAYER") {
                saw_separator = true;
                segments.push(Vec::new());
                continue;
            }
            let mut toks = line.split_whitespace();
            let name = toks.next().unwrap_or_default();
            let kind = GateKind::parse(name).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            let qubits: Vec<usize> = toks
                .map(|t| t.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad qubit `{t}`") }))
                .collect::<Result<_>>()?;
            let g = Gate::new(kind, qubits).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            max_q = max_q.max(g.qubits.iter().copied().max());
            segments.last_mut().unwrap().push(g);
        }
        let n = match (width, max_q) {
            (Some(w), Some(m)) if m >= w => {
                return Err(Error::Parse { line: 0, msg: format!("qubit {m} exceeds declared width {w}") })
            }
            (Some(w), _) => w,
            (None, Some(m)) => m + 1,
            (None, None) => 1,
        };
        let mut c = Circuit::new(n);
        for seg in segments {
            let start = c.layers.len();
            let empty = seg.is_empty();
            c.append_asap(seg, start)?;
            if empty && saw_separator {
                c.layers.push(Vec::new());
            }
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.gates().flat_map(|g| g.qubits.iter()).max().map_or(true, |&m| m + 1 != self.n) {
            s.push_str(&format!("# qubits: {}\n", self.n));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 {
                s.push_str("LAYER\n");
            }
            for g in l {
                s.push_str(&format!("{g}\n"));
            }
        }
        s
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Something with a unitary meaning: a circuit or a dense matrix.
#[derive(Clone, Debug)]
pub enum Operator {
    Circuit(Circuit),
    Unitary(Arc<Unitary>),
}

impl Operator {
    pub fn num_qubits(&self) -> usize {
        match self {
            Operator::Circuit(c) => c.num_qubits(),
            Operator::Unitary(u) => u.num_qubits(),
        }
    }

    /// The adjoint as a circuit; a dense matrix becomes a single wide gate.
    pub fn dagger_circuit(&self) -> Circuit {
        match self {
            Operator::Circuit(c) => c.dagger(),
            Operator::Unitary(u) => {
                let mut c = Circuit::new(u.num_qubits());
                let g = Gate { kind: GateKind::Unitary(Arc::new(u.adjoint())), qubits: (0..u.num_qubits()).collect() };
                c.layers.push(vec![g]);
                c
            }
        }
    }

    pub fn as_circuit(&self) -> Circuit {
        match self {
            Operator::Circuit(c) => c.clone(),
            Operator::Unitary(u) => Operator::Unitary(Arc::new(u.adjoint())).dagger_circuit(),
        }
    }

    /// Reads a file in either format: unitary files start with a bare qubit
    /// count on their first non-comment line.
    pub fn parse(text: &str) -> Result<Operator> {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
        match first {
            Some(l) if l.parse::<usize>().is_ok() => Ok(Operator::Unitary(Arc::new(Unitary::parse(text)?))),
            _ => Ok(Operator::Circuit(Circuit::parse(text)?)),
        }
    }
}

impl From<Circuit> for Operator {
    fn from(c: Circuit) -> Self {
        Operator::Circuit(c)
    }
}

impl From<Unitary> for Operator {
    fn from(u: Unitary) -> Self {
        Operator::Unitary(Arc::new(u))
    }
}
