//! Encodings of states, gates and circuits as weighted CNF.
//!
//! In the computational basis (CB) a register holds one variable per qubit
//! and model counts are amplitudes. In the Pauli basis (PB) it holds an
//! `(x, z)` pair per qubit and counts are Pauli conjugation coefficients.

mod table;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, Layer, Unitary};
use crate::cnf::{Lit, Var, VarKind, WeightedCnf};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::state::State;
use crate::weights::{pow2, Weight};

use table::GateTemplate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    CB,
    PB,
}

impl Basis {
    pub fn vars_per_qubit(self) -> usize {
        match self {
            Basis::CB => 1,
            Basis::PB => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::CB => "CB",
            Basis::PB => "PB",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Ring weights only; gates with non-ring entries are rejected.
    Exact,
    /// Every weight is converted to a complex double.
    Float,
}

/// Builds encodings in one basis and weight mode, caching gate templates.
#[derive(Debug)]
pub struct Encoder {
    basis: Basis,
    mode: WeightMode,
    max_unitary_qubits: usize,
    templates: HashMap<String, Arc<GateTemplate>>,
}

impl Encoder {
    pub fn new(basis: Basis, mode: WeightMode) -> Self {
        Encoder { basis, mode, max_unitary_qubits: 4, templates: HashMap::new() }
    }

    pub fn with_max_unitary_qubits(mut self, n: usize) -> Self {
        self.max_unitary_qubits = n;
        self
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    /// Fresh state variables for `n` qubits; PB lays them out `x0 z0 x1 z1 …`.
    pub fn register(&self, f: &mut WeightedCnf, n: usize) -> Vec<Var> {
        (0..n * self.basis.vars_per_qubit()).map(|_| f.fresh(VarKind::State)).collect()
    }

    /// The variables of qubit `q` inside a register.
    pub fn qubit<'a>(&self, reg: &'a [Var], q: usize) -> &'a [Var] {
        let w = self.basis.vars_per_qubit();
        &reg[q * w..(q + 1) * w]
    }

    fn num_qubits(&self, reg: &[Var]) -> usize {
        reg.len() / self.basis.vars_per_qubit()
    }

    fn weight(&self, w: Weight) -> Result<Weight> {
        match self.mode {
            WeightMode::Float => Ok(w.to_float()),
            WeightMode::Exact if w.is_exact() => Ok(w),
            WeightMode::Exact => Err(Error::Unsupported(format!("float weight {w} in exact mode"), self.basis.name())),
        }
    }

    /// Aux variable with `W(a) = w`, `W(¬a) = 1`.
    fn weighted_aux(&self, f: &mut WeightedCnf, w: Weight) -> Result<Var> {
        let a = f.fresh(VarKind::Aux);
        f.set_weight(a, self.weight(w)?, Weight::one());
        Ok(a)
    }

    /// A constant factor carried by a forced-true aux variable.
    fn constant(&self, f: &mut WeightedCnf, w: Weight) -> Result<()> {
        if w != Weight::one() {
            let a = self.weighted_aux(f, w)?;
            f.add_unit(Lit::pos(a));
        }
        Ok(())
    }

    pub fn new_state(&mut self, f: &mut WeightedCnf, s: &State, n: usize) -> Result<Vec<Var>> {
        s.check_width(n)?;
        let reg = self.register(f, n);
        self.encode_state(f, s, &reg)?;
        Ok(reg)
    }

    /// Constrains `reg` so the count reproduces the state's amplitudes (CB)
    /// or Pauli coefficients (PB) once the register is fixed.
    pub fn encode_state(&mut self, f: &mut WeightedCnf, s: &State, reg: &[Var]) -> Result<()> {
        let n = self.num_qubits(reg);
        s.check_width(n)?;
        let minus = Weight::int(-1);
        match self.basis {
            Basis::CB => {
                let q = |i: usize| Lit::pos(reg[i]);
                match s {
                    State::ZeroN => (0..n).for_each(|i| f.add_unit(!q(i))),
                    State::BasisState(b) => (0..n).for_each(|i| f.add_unit(Lit::new(reg[i], b[i]))),
                    State::Plus => self.constant(f, Weight::inv_sqrt2_pow(n as u32))?,
                    State::Minus | State::AState => {
                        self.constant(f, Weight::inv_sqrt2_pow(n as u32))?;
                        let w = if *s == State::Minus { minus } else { Weight::omega_pow(1) };
                        for i in 0..n {
                            let a = self.weighted_aux(f, w.clone())?;
                            f.add_iff(Lit::pos(a), q(i));
                        }
                    }
                    State::MaxEntangled => {
                        let h = n / 2;
                        for j in 0..h {
                            f.add_iff(q(j), q(j + h));
                        }
                        self.constant(f, Weight::inv_sqrt2_pow(h as u32))?;
                    }
                }
            }
            Basis::PB => {
                let x = |i: usize| Lit::pos(reg[2 * i]);
                let z = |i: usize| Lit::pos(reg[2 * i + 1]);
                match s {
                    State::ZeroN | State::BasisState(_) => {
                        for i in 0..n {
                            f.add_unit(!x(i));
                            if matches!(s, State::BasisState(b) if b[i]) {
                                let r = self.weighted_aux(f, minus.clone())?;
                                f.add_iff(Lit::pos(r), z(i));
                            }
                        }
                        self.constant(f, pow2(-(n as i32)))?;
                    }
                    State::Plus | State::Minus => {
                        for i in 0..n {
                            f.add_unit(!z(i));
                            if *s == State::Minus {
                                let r = self.weighted_aux(f, minus.clone())?;
                                f.add_iff(Lit::pos(r), x(i));
                            }
                        }
                        self.constant(f, pow2(-(n as i32)))?;
                    }
                    State::AState => {
                        // (I + (X + Y)/√2) / 2 per qubit
                        for i in 0..n {
                            f.add_clause([x(i), !z(i)]);
                            let h = self.weighted_aux(f, Weight::inv_sqrt2_pow(1))?;
                            f.add_iff(Lit::pos(h), x(i));
                        }
                        self.constant(f, pow2(-(n as i32)))?;
                    }
                    State::MaxEntangled => {
                        // each pair is (II + XX − YY + ZZ) / 4
                        let h = n / 2;
                        for j in 0..h {
                            f.add_iff(x(j), x(j + h));
                            f.add_iff(z(j), z(j + h));
                            let r = self.weighted_aux(f, minus.clone())?;
                            f.add_iff_and(Lit::pos(r), &[x(j), z(j)]);
                        }
                        self.constant(f, pow2(-2 * h as i32))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Unit clauses fixing a CB register to `bits`.
    pub fn select_basis_state(&self, f: &mut WeightedCnf, bits: &[bool], reg: &[Var]) -> Result<()> {
        if self.basis != Basis::CB {
            return Err(Error::Unsupported("basis-state selector".into(), self.basis.name()));
        }
        if bits.len() != reg.len() {
            return Err(Error::WidthMismatch(bits.len(), reg.len()));
        }
        for (&b, &v) in bits.iter().zip(reg) {
            f.add_unit(Lit::new(v, b));
        }
        Ok(())
    }

    /// Unit clauses fixing a PB register to `p`.
    pub fn select_pauli(&self, f: &mut WeightedCnf, p: &PauliString, reg: &[Var]) -> Result<()> {
        if self.basis != Basis::PB {
            return Err(Error::Unsupported("Pauli selector".into(), self.basis.name()));
        }
        if 2 * p.len() != reg.len() {
            return Err(Error::WidthMismatch(p.len(), reg.len() / 2));
        }
        for (i, l) in p.0.iter().enumerate() {
            let (x, z) = l.bits();
            f.add_unit(Lit::new(reg[2 * i], x));
            f.add_unit(Lit::new(reg[2 * i + 1], z));
        }
        Ok(())
    }

    fn template(&mut self, kind: &GateKind) -> Result<Arc<GateTemplate>> {
        if let GateKind::Unitary(u) = kind {
            if self.basis == Basis::PB {
                return Err(Error::Unsupported("dense unitary".into(), "PB"));
            }
            if u.num_qubits() > self.max_unitary_qubits {
                return Err(Error::InvalidArgument(format!(
                    "dense unitary on {} qubits exceeds the limit of {}",
                    u.num_qubits(),
                    self.max_unitary_qubits
                )));
            }
            return Ok(Arc::new(GateTemplate::build(kind, self.basis)));
        }
        let key = kind.name();
        if let Some(t) = self.templates.get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(GateTemplate::build(kind, self.basis));
        self.templates.insert(key, t.clone());
        Ok(t)
    }

    /// Encodes `kind` between local input and output variables (the gate's
    /// qubits in order). With a selector `p` every clause becomes `¬p ∨ C`
    /// and every auxiliary is pinned to its weight-1 literal when `p` is false.
    pub fn encode_gate(
        &mut self,
        f: &mut WeightedCnf,
        kind: &GateKind,
        ins: &[Var],
        outs: &[Var],
        selector: Option<Var>,
    ) -> Result<()> {
        let t = self.template(kind)?;
        if self.mode == WeightMode::Exact && !t.is_exact() {
            return Err(Error::Unsupported(format!("{kind} with exact weights"), self.basis.name()));
        }
        if ins.len() != t.width || outs.len() != t.width {
            return Err(Error::WidthMismatch(ins.len().max(outs.len()), t.width));
        }
        let mut local: Vec<Var> = ins.iter().chain(outs).copied().collect();
        for w in &t.aux {
            let a = self.weighted_aux(f, w.clone())?;
            if let Some(p) = selector {
                f.add_clause([Lit::pos(p), Lit::neg(a)]);
            }
            local.push(a);
        }
        for c in &t.clauses {
            let lits = c.iter().map(|&(i, pos)| Lit::new(local[i], pos));
            match selector {
                Some(p) => f.add_clause(std::iter::once(Lit::neg(p)).chain(lits)),
                None => f.add_clause(lits),
            }
        }
        Ok(())
    }

    pub fn encode_rz(&mut self, f: &mut WeightedCnf, theta: f64, ins: &[Var], outs: &[Var]) -> Result<()> {
        self.encode_gate(f, &GateKind::RZ(theta), ins, outs, None)
    }

    pub fn encode_unitary(&mut self, f: &mut WeightedCnf, u: &Unitary, ins: &[Var], outs: &[Var]) -> Result<()> {
        self.encode_gate(f, &GateKind::Unitary(Arc::new(u.clone())), ins, outs, None)
    }

    /// Places `g` between two full registers.
    pub fn encode_placed(&mut self, f: &mut WeightedCnf, g: &Gate, ins: &[Var], outs: &[Var], selector: Option<Var>) -> Result<()> {
        let gi: Vec<Var> = g.qubits.iter().flat_map(|&q| self.qubit(ins, q).to_vec()).collect();
        let go: Vec<Var> = g.qubits.iter().flat_map(|&q| self.qubit(outs, q).to_vec()).collect();
        self.encode_gate(f, &g.kind, &gi, &go, selector)
    }

    pub fn encode_layer(&mut self, f: &mut WeightedCnf, layer: &Layer, ins: &[Var], outs: &[Var]) -> Result<()> {
        let n = self.num_qubits(ins);
        let mut idle = vec![true; n];
        for g in layer {
            for &q in &g.qubits {
                if q >= n {
                    return Err(Error::WidthMismatch(q + 1, n));
                }
                idle[q] = false;
            }
            self.encode_placed(f, g, ins, outs, None)?;
        }
        for q in (0..n).filter(|&q| idle[q]) {
            for (&a, &b) in self.qubit(ins, q).iter().zip(self.qubit(outs, q)) {
                f.add_iff(Lit::pos(a), Lit::pos(b));
            }
        }
        Ok(())
    }

    /// Chains the layers of `c` starting at `ins`; returns the output register.
    pub fn encode_circuit(&mut self, f: &mut WeightedCnf, c: &Circuit, ins: &[Var]) -> Result<Vec<Var>> {
        if self.num_qubits(ins) != c.num_qubits() || ins.len() % self.basis.vars_per_qubit() != 0 {
            return Err(Error::WidthMismatch(c.num_qubits(), self.num_qubits(ins)));
        }
        let mut cur = ins.to_vec();
        for layer in c.layers() {
            let next = self.register(f, c.num_qubits());
            self.encode_layer(f, layer, &cur, &next)?;
            cur = next;
        }
        Ok(cur)
    }

    /// Encodes `c` on fresh input/output registers. An empty circuit is
    /// `q_in ⇔ q_out`.
    pub fn encode_circuit_fresh(&mut self, f: &mut WeightedCnf, c: &Circuit) -> Result<(Vec<Var>, Vec<Var>)> {
        let ins = self.register(f, c.num_qubits());
        let mut outs = self.encode_circuit(f, c, &ins)?;
        if c.depth() == 0 {
            outs = self.register(f, c.num_qubits());
            self.add_register_iff(f, &ins, &outs);
        }
        Ok((ins, outs))
    }

    pub fn add_register_iff(&self, f: &mut WeightedCnf, a: &[Var], b: &[Var]) {
        for (&x, &y) in a.iter().zip(b) {
            f.add_iff(Lit::pos(x), Lit::pos(y));
        }
    }
}

/// The weight mode an operator needs: exact unless some gate is not a ring
/// matrix.
pub fn natural_mode<'a>(circuits: impl IntoIterator<Item = &'a Circuit>) -> WeightMode {
    let exact = circuits
        .into_iter()
        .flat_map(|c| c.gates())
        .all(|g| g.kind.matrix().entries().all(|(_, _, w)| w.is_exact()));
    if exact {
        WeightMode::Exact
    } else {
        WeightMode::Float
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force weighted count, independent of the counter module.
    pub(crate) fn brute_count(f: &WeightedCnf) -> Weight {
        let n = f.num_vars();
        assert!(n <= 22, "too many variables for enumeration");
        let mut total = Weight::zero();
        for m in 0u64..1 << n {
            let val = |l: Lit| (m >> (l.var() - 1) & 1 == 1) == l.is_pos();
            if f.clauses().iter().all(|c| c.iter().any(|&l| val(l))) {
                let w = (1..=n as Var).fold(Weight::one(), |acc, v| &acc * &f.lit_weight(Lit::new(v, m >> (v - 1) & 1 == 1)));
                total = &total + &w;
            }
        }
        total
    }

    #[test]
    fn zero_state_cb() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::CB, WeightMode::Exact);
        let q = e.new_state(&mut f, &State::ZeroN, 1).unwrap();
        assert_eq!(f.clauses(), &[vec![Lit::neg(q[0])]]);
        assert_eq!(f.weighted_vars().count(), 0);
    }

    #[test]
    fn minus_state_cb_amplitude() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::CB, WeightMode::Exact);
        let q = e.new_state(&mut f, &State::Minus, 1).unwrap();
        let weights: Vec<Weight> = f.weighted_vars().map(|(_, (p, _))| p.clone()).collect();
        assert_eq!(weights, vec![Weight::inv_sqrt2_pow(1), Weight::int(-1)]);
        f.add_unit(Lit::pos(q[0]));
        assert_eq!(brute_count(&f), -&Weight::inv_sqrt2_pow(1));
    }

    #[test]
    fn zero_state_pb_shape() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::PB, WeightMode::Exact);
        let r = e.new_state(&mut f, &State::ZeroN, 2).unwrap();
        assert!(f.clauses().contains(&vec![Lit::neg(r[0])]));
        assert!(f.clauses().contains(&vec![Lit::neg(r[2])]));
    }

    #[test]
    fn pauli_and_basis_selectors() {
        let mut f = WeightedCnf::new();
        let e = Encoder::new(Basis::PB, WeightMode::Exact);
        let r = e.register(&mut f, 1);
        e.select_pauli(&mut f, &"Z".parse().unwrap(), &r).unwrap();
        assert_eq!(f.clauses(), &[vec![Lit::neg(r[0])], vec![Lit::pos(r[1])]]);
        let mut f = WeightedCnf::new();
        let e = Encoder::new(Basis::CB, WeightMode::Exact);
        let r = e.register(&mut f, 2);
        e.select_basis_state(&mut f, &[false, true], &r).unwrap();
        assert_eq!(f.clauses(), &[vec![Lit::neg(r[0])], vec![Lit::pos(r[1])]]);
    }

    #[test]
    fn cx_cb_is_a_permutation() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::CB, WeightMode::Exact);
        let a = e.register(&mut f, 2);
        let b = e.register(&mut f, 2);
        e.encode_gate(&mut f, &GateKind::CX, &a, &b, None).unwrap();
        assert_eq!(f.weighted_vars().count(), 0);
        // 4 models: q0' = q0, q1' = q1 ⊕ q0
        assert_eq!(brute_count(&f), Weight::int(4));
        let mut g = f.clone();
        e.select_basis_state(&mut g, &[true, false], &a).unwrap();
        e.select_basis_state(&mut g, &[true, true], &b).unwrap();
        assert_eq!(brute_count(&g), Weight::one());
    }

    #[test]
    fn rz_needs_float_mode() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::PB, WeightMode::Exact);
        let a = e.register(&mut f, 1);
        let b = e.register(&mut f, 1);
        assert!(matches!(e.encode_rz(&mut f, 0.3, &a, &b), Err(Error::Unsupported(..))));
        let mut e = Encoder::new(Basis::PB, WeightMode::Float);
        assert!(e.encode_rz(&mut f, 0.3, &a, &b).is_ok());
    }

    #[test]
    fn gated_gate_is_neutral_when_off() {
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::CB, WeightMode::Exact);
        let a = e.register(&mut f, 1);
        let b = e.register(&mut f, 1);
        let p = f.fresh(VarKind::Select);
        e.encode_gate(&mut f, &GateKind::H, &a, &b, Some(p)).unwrap();
        let mut off = f.clone();
        off.add_unit(Lit::neg(p));
        // q, q' free: 4 models of weight 1
        assert_eq!(brute_count(&off), Weight::int(4));
        f.add_unit(Lit::pos(p));
        f.add_unit(Lit::pos(a[0]));
        f.add_unit(Lit::pos(b[0]));
        assert_eq!(brute_count(&f), -&Weight::inv_sqrt2_pow(1));
    }

    #[test]
    fn unitary_rejected_in_pb() {
        let u = Unitary::new(GateKind::H.matrix()).unwrap();
        let mut f = WeightedCnf::new();
        let mut e = Encoder::new(Basis::PB, WeightMode::Exact);
        let a = e.register(&mut f, 1);
        let b = e.register(&mut f, 1);
        assert!(e.encode_unitary(&mut f, &u, &a, &b).is_err());
    }
}
