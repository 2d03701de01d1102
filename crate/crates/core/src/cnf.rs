//! Weighted CNF formulas over three kinds of variables: unbiased state
//! variables, weighted auxiliary variables, and gate-selecting variables
//! (the max-set of a Max#SAT query).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::Not;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::{ExactW, Weight};

pub type Var = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    State,
    Aux,
    Select,
}

impl VarKind {
    fn as_str(self) -> &'static str {
        match self {
            VarKind::State => "state",
            VarKind::Aux => "aux",
            VarKind::Select => "select",
        }
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit(v as i32)
    }

    pub fn neg(v: Var) -> Lit {
        Lit(-(v as i32))
    }

    pub fn new(v: Var, positive: bool) -> Lit {
        if positive {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    }

    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0);
        Lit(x)
    }

    pub fn var(self) -> Var {
        self.0.unsigned_abs()
    }

    pub fn is_pos(self) -> bool {
        self.0 > 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

pub type Clause = Vec<Lit>;

#[derive(Clone, Debug, Default)]
pub struct WeightedCnf {
    kinds: Vec<VarKind>,
    clauses: Vec<Clause>,
    weights: BTreeMap<Var, (Weight, Weight)>,
}

impl WeightedCnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn kind(&self, v: Var) -> VarKind {
        self.kinds[v as usize - 1]
    }

    pub fn vars_of_kind(&self, kind: VarKind) -> Vec<Var> {
        (1..=self.kinds.len() as Var).filter(|&v| self.kind(v) == kind).collect()
    }

    pub fn fresh_vars(&mut self, kind: VarKind, count: usize) -> Result<Vec<Var>> {
        if count == 0 {
            return Err(Error::InvalidArgument("fresh_vars needs count >= 1".into()));
        }
        Ok((0..count).map(|_| self.fresh(kind)).collect())
    }

    pub fn fresh(&mut self, kind: VarKind) -> Var {
        self.kinds.push(kind);
        self.kinds.len() as Var
    }

    /// Weights of `(v, ¬v)`; unweighted variables have `(1, 1)`.
    pub fn weight(&self, v: Var) -> (Weight, Weight) {
        self.weights.get(&v).cloned().unwrap_or((Weight::one(), Weight::one()))
    }

    pub fn lit_weight(&self, l: Lit) -> Weight {
        let (p, n) = self.weight(l.var());
        if l.is_pos() {
            p
        } else {
            n
        }
    }

    pub fn weighted_vars(&self) -> impl Iterator<Item = (Var, &(Weight, Weight))> {
        self.weights.iter().map(|(v, w)| (*v, w))
    }

    pub fn set_weight(&mut self, v: Var, pos: Weight, neg: Weight) {
        assert_eq!(self.kind(v), VarKind::Aux, "only auxiliary variables carry weights");
        self.weights.insert(v, (pos, neg));
    }

    /// True when every weight is an exact ring element.
    pub fn is_exact(&self) -> bool {
        self.weights.values().all(|(p, n)| p.is_exact() && n.is_exact())
    }

    pub fn to_float_weights(&mut self) {
        for (p, n) in self.weights.values_mut() {
            *p = p.to_float();
            *n = n.to_float();
        }
    }

    /// Adds a clause, dropping duplicate literals. Tautologies are skipped.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let mut c: Clause = lits.into_iter().collect();
        c.sort_by_key(|l| (l.var(), l.is_pos()));
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        debug_assert!(c.iter().all(|l| (l.var() as usize) <= self.kinds.len()));
        self.clauses.push(c);
    }

    pub fn add_unit(&mut self, l: Lit) {
        self.add_clause([l]);
    }

    pub fn add_iff(&mut self, a: Lit, b: Lit) {
        self.add_clause([!a, b]);
        self.add_clause([a, !b]);
    }

    pub fn add_iff_and(&mut self, a: Lit, bs: &[Lit]) {
        for &b in bs {
            self.add_clause([!a, b]);
        }
        self.add_clause(std::iter::once(a).chain(bs.iter().map(|&b| !b)));
    }

    /// `a ⊕ b ⊕ c = 0`.
    pub fn add_xor3(&mut self, a: Lit, b: Lit, c: Lit) {
        for mask in 0..8u8 {
            if mask.count_ones() % 2 == 1 {
                // forbid this odd-parity assignment
                let pick = |l: Lit, bit: u8| if mask >> bit & 1 == 1 { !l } else { l };
                self.add_clause([pick(a, 0), pick(b, 1), pick(c, 2)]);
            }
        }
    }

    /// Pairwise exactly-one: one at-least-one clause plus `C(n,2)` binary clauses.
    pub fn add_exactly_one(&mut self, vars: &[Var]) {
        assert!(!vars.is_empty(), "exactly-one over an empty set");
        self.add_clause(vars.iter().map(|&v| Lit::pos(v)));
        for (i, &u) in vars.iter().enumerate() {
            for &v in &vars[i + 1..] {
                self.add_clause([Lit::neg(u), Lit::neg(v)]);
            }
        }
    }

    /// Conjoins `other`, whose variables are identified with ours by index.
    pub fn conjoin(&mut self, other: &WeightedCnf) -> Result<()> {
        for (i, &k) in other.kinds.iter().enumerate() {
            match self.kinds.get(i) {
                Some(&mine) if mine != k => {
                    return Err(Error::InvalidArgument(format!(
                        "variable {} is {} here but {} in the conjunct",
                        i + 1,
                        mine.as_str(),
                        k.as_str()
                    )))
                }
                Some(_) => {}
                None => self.kinds.push(k),
            }
        }
        for (v, w) in &other.weights {
            if let Some(mine) = self.weights.get(v) {
                if mine != w {
                    return Err(Error::InvalidArgument(format!("conflicting weights on variable {v}")));
                }
            }
            self.weights.insert(*v, w.clone());
        }
        self.clauses.extend(other.clauses.iter().cloned());
        Ok(())
    }

    pub fn write_wcnf<W: Write>(&self, mut sink: W) -> Result<()> {
        sink.write_all(self.to_wcnf_string().as_bytes())?;
        Ok(())
    }

    pub fn to_wcnf_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p wcnf {} {}", self.num_vars(), self.num_clauses());
        for (i, k) in self.kinds.iter().enumerate() {
            let _ = writeln!(s, "c kind {} {}", i + 1, k.as_str());
        }
        for (v, (p, n)) in &self.weights {
            for (lit, w) in [(*v as i64, p), (-(*v as i64), n)] {
                let _ = match w {
                    Weight::Exact(e) => writeln!(s, "w {lit} exact {}", e.to_tuple_string()),
                    Weight::Float(z) => writeln!(s, "w {lit} float {:e} {:e}", z.re, z.im),
                };
            }
        }
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{} ", l.dimacs());
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn read_wcnf<R: BufRead>(source: R) -> Result<WeightedCnf> {
        let mut f = WeightedCnf::new();
        let mut declared: Option<(usize, usize)> = None;
        let mut pending: Vec<Lit> = Vec::new();
        let mut lit_weights: BTreeMap<i64, Weight> = BTreeMap::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let err = |msg: String| Error::Parse { line: lineno, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first().copied() {
                None => continue,
                Some("p") => {
                    if toks.len() != 4 || toks[1] != "wcnf" {
                        return Err(err("expected `p wcnf <vars> <clauses>`".into()));
                    }
                    let nv = toks[2].parse().map_err(|_| err("bad variable count".into()))?;
                    let nc = toks[3].parse().map_err(|_| err("bad clause count".into()))?;
                    f.kinds = vec![VarKind::State; nv];
                    declared = Some((nv, nc));
                }
                Some("c") => {
                    if toks.get(1) == Some(&"kind") {
                        let (nv, _) = declared.ok_or_else(|| err("kind line before header".into()))?;
                        if toks.len() != 4 {
                            return Err(err("expected `c kind <var> state|aux|select`".into()));
                        }
                        let v: usize = toks[2].parse().map_err(|_| err("bad variable".into()))?;
                        if v == 0 || v > nv {
                            return Err(err(format!("variable {v} out of range")));
                        }
                        f.kinds[v - 1] = match toks[3] {
                            "state" => VarKind::State,
                            "aux" => VarKind::Aux,
                            "select" => VarKind::Select,
                            other => return Err(err(format!("unknown kind `{other}`"))),
                        };
                    }
                }
                Some("w") => {
                    let (nv, _) = declared.ok_or_else(|| err("weight line before header".into()))?;
                    if toks.len() < 4 {
                        return Err(err("expected `w <lit> exact|float ...`".into()));
                    }
                    let lit: i64 = toks[1].parse().map_err(|_| err("bad literal".into()))?;
                    if lit == 0 || lit.unsigned_abs() as usize > nv {
                        return Err(err(format!("literal {lit} out of range")));
                    }
                    let w = match (toks[2], toks.len()) {
                        ("exact", 4) => Weight::Exact(toks[3].parse::<ExactW>()?),
                        ("float", 5) => {
                            let re: f64 = toks[3].parse().map_err(|_| Error::WeightSyntax(toks[3].into()))?;
                            let im: f64 = toks[4].parse().map_err(|_| Error::WeightSyntax(toks[4].into()))?;
                            Weight::Float(Complex64::new(re, im))
                        }
                        _ => return Err(Error::WeightSyntax(toks[2..].join(" "))),
                    };
                    lit_weights.insert(lit, w);
                }
                Some(_) => {
                    let (nv, _) = declared.ok_or_else(|| err("clause before header".into()))?;
                    for t in toks {
                        let x: i32 = t.parse().map_err(|_| err(format!("bad literal `{t}`")))?;
                        if x == 0 {
                            f.clauses.push(std::mem::take(&mut pending));
                        } else if x.unsigned_abs() as usize > nv {
                            return Err(err(format!("literal {x} out of range")));
                        } else {
                            pending.push(Lit(x));
                        }
                    }
                }
            }
        }
        let (_, nc) = declared.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        if !pending.is_empty() {
            return Err(Error::Parse { line: 0, msg: "last clause is not terminated by 0".into() });
        }
        if f.clauses.len() != nc {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {nc} clauses, found {}", f.clauses.len()),
            });
        }
        for (&lit, _) in &lit_weights {
            let v = lit.unsigned_abs() as Var;
            if f.kind(v) != VarKind::Aux {
                return Err(Error::Parse { line: 0, msg: format!("weighted variable {v} is not aux") });
            }
        }
        let vars: Vec<Var> = lit_weights.keys().map(|l| l.unsigned_abs() as Var).collect();
        for v in vars {
            let p = lit_weights.get(&(v as i64)).cloned().unwrap_or_else(Weight::one);
            let n = lit_weights.get(&-(v as i64)).cloned().unwrap_or_else(Weight::one);
            f.weights.insert(v, (p, n));
        }
        Ok(f)
    }
}

impl PartialEq for WeightedCnf {
    fn eq(&self, o: &Self) -> bool {
        self.kinds == o.kinds && self.clauses == o.clauses && self.weights == o.weights
    }
}
