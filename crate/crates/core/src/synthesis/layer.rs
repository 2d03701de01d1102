//! Gate sets and the gated layer encoding.

use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::{Circuit, Gate, GateKind, Layer};
use crate::cnf::{Lit, Var, VarKind, WeightedCnf};
use crate::encoder::{Basis, Encoder, WeightMode};
use crate::error::{Error, Result};

/// Single-qubit gates `G(1)` (always containing `I`, listed first) and
/// two-qubit gates `G(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSetSpec {
    single: Vec<GateKind>,
    two: Vec<GateKind>,
}

impl Default for GateSetSpec {
    fn default() -> Self {
        GateSetSpec { single: vec![GateKind::I, GateKind::H, GateKind::T, GateKind::Tdg], two: vec![GateKind::CX] }
    }
}

impl GateSetSpec {
    pub fn new(gates: impl IntoIterator<Item = GateKind>) -> Result<GateSetSpec> {
        let mut single = vec![GateKind::I];
        let mut two = Vec::new();
        for g in gates {
            let list = match g.arity() {
                1 => &mut single,
                2 => &mut two,
                k => return Err(Error::InvalidArgument(format!("{k}-qubit gate {g} in a gate set"))),
            };
            if matches!(g, GateKind::Unitary(_)) {
                return Err(Error::InvalidArgument("dense unitaries cannot be gate-set members".into()));
            }
            if !list.contains(&g) {
                list.push(g);
            }
        }
        Ok(GateSetSpec { single, two })
    }

    /// Comma- or space-separated gate names, e.g. `H,T,Tdg,CX`.
    pub fn parse(s: &str) -> Result<GateSetSpec> {
        let kinds = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(GateKind::parse)
            .collect::<Result<Vec<_>>>()?;
        GateSetSpec::new(kinds)
    }

    pub fn single(&self) -> &[GateKind] {
        &self.single
    }

    pub fn two(&self) -> &[GateKind] {
        &self.two
    }

    /// Every gate except `I`.
    pub fn non_identity(&self) -> impl Iterator<Item = &GateKind> {
        self.single.iter().skip(1).chain(&self.two)
    }

    pub(crate) fn single_index(&self, g: &GateKind) -> Option<usize> {
        self.single.iter().position(|x| x == g)
    }

    pub(crate) fn two_index(&self, g: &GateKind) -> Option<usize> {
        self.two.iter().position(|x| x == g)
    }

    /// Selectors per qubit in one layer.
    pub fn choices_per_qubit(&self, n: usize) -> usize {
        self.single.len() + 2 * (n.saturating_sub(1)) * self.two.len()
    }

    pub fn is_exact(&self) -> bool {
        self.single.iter().chain(&self.two).all(|g| g.matrix().entries().all(|(_, _, w)| w.is_exact()))
    }
}

impl fmt::Display for GateSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.single.iter().chain(&self.two).map(GateKind::name).collect();
        f.write_str(&names.join(","))
    }
}

/// The select variables of one layer between registers `q_in` and `q_out`.
#[derive(Clone, Debug)]
pub struct LayerTemplate {
    pub depth: usize,
    pub n: usize,
    pub q_in: Vec<Var>,
    pub q_out: Vec<Var>,
    /// `single[i][g]` places `G(1)[g]` on qubit `i`.
    pub single: Vec<Vec<Var>>,
    /// `two[(i, j)][g]` places `G(2)[g]` on the ordered pair `(i, j)`.
    pub two: BTreeMap<(usize, usize), Vec<Var>>,
}

impl LayerTemplate {
    pub fn select_vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.single.iter().flatten().chain(self.two.values().flatten()).copied().collect();
        v.sort_unstable();
        v
    }

    /// The exactly-one group of qubit `i`.
    pub fn group(&self, i: usize) -> Vec<Var> {
        let mut g = self.single[i].clone();
        for (&(a, b), vs) in &self.two {
            if a == i || b == i {
                g.extend(vs);
            }
        }
        g
    }
}

/// Adds one gated layer on fresh output variables: `p_{G,i} ⇒ F_G`,
/// `p_{G,i,j} ⇒ F_G` for every ordered pair, and exactly-one per qubit.
pub(crate) fn add_layer(
    f: &mut WeightedCnf,
    enc: &mut Encoder,
    gs: &GateSetSpec,
    q_in: &[Var],
    depth: usize,
) -> Result<LayerTemplate> {
    let w = enc.basis().vars_per_qubit();
    let n = q_in.len() / w;
    let q_out = enc.register(f, n);
    let mut single = Vec::with_capacity(n);
    for _ in 0..n {
        let sel: Vec<Var> = gs.single().iter().map(|_| f.fresh(VarKind::Select)).collect();
        single.push(sel);
    }
    let mut two = BTreeMap::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let sel: Vec<Var> = gs.two().iter().map(|_| f.fresh(VarKind::Select)).collect();
            two.insert((i, j), sel);
        }
    }
    let t = LayerTemplate { depth, n, q_in: q_in.to_vec(), q_out, single, two };
    for i in 0..n {
        for (g, &p) in gs.single().iter().zip(&t.single[i]) {
            enc.encode_placed(f, &Gate::single(g.clone(), i), &t.q_in, &t.q_out, Some(p))?;
        }
    }
    for (&(i, j), sel) in &t.two {
        for (g, &p) in gs.two().iter().zip(sel) {
            enc.encode_placed(f, &Gate::new(g.clone(), vec![i, j])?, &t.q_in, &t.q_out, Some(p))?;
        }
    }
    for i in 0..n {
        f.add_exactly_one(&t.group(i));
    }
    Ok(t)
}

/// A single layer template on fresh registers.
pub fn build_layer_template(n: usize, gs: &GateSetSpec, basis: Basis) -> Result<(WeightedCnf, LayerTemplate)> {
    if n == 0 {
        return Err(Error::InvalidArgument("a layer needs at least one qubit".into()));
    }
    let mode = if gs.is_exact() { WeightMode::Exact } else { WeightMode::Float };
    let mut enc = Encoder::new(basis, mode);
    let mut f = WeightedCnf::new();
    let q_in = enc.register(&mut f, n);
    let t = add_layer(&mut f, &mut enc, gs, &q_in, 0)?;
    Ok((f, t))
}

/// Reads the circuit off a select assignment: per layer and qubit the one
/// true selector names the gate; `I` leaves the wire idle.
pub fn decode_circuit(assignment: &BTreeMap<Var, bool>, templates: &[LayerTemplate], gs: &GateSetSpec) -> Result<Circuit> {
    let is_true = |v: Var| assignment.get(&v).copied().unwrap_or(false);
    let n = templates.first().map_or(1, |t| t.n);
    let mut layers: Vec<Layer> = Vec::with_capacity(templates.len());
    for t in templates {
        for i in 0..t.n {
            if t.group(i).into_iter().filter(|&v| is_true(v)).count() != 1 {
                return Err(Error::ExoViolation { depth: t.depth, qubit: i });
            }
        }
        let mut layer = Vec::new();
        for i in 0..t.n {
            for (g, &p) in gs.single().iter().zip(&t.single[i]) {
                if is_true(p) && *g != GateKind::I {
                    layer.push(Gate::single(g.clone(), i));
                }
            }
        }
        for (&(i, j), sel) in &t.two {
            for (g, &p) in gs.two().iter().zip(sel) {
                if is_true(p) {
                    layer.push(Gate::new(g.clone(), vec![i, j])?);
                }
            }
        }
        layers.push(layer);
    }
    Circuit::from_layers(n, layers)
}

/// The select assignment that places `c` layer by layer; idle wires select
/// `I`. Inverse of [`decode_circuit`].
pub fn encode_selection(c: &Circuit, templates: &[LayerTemplate], gs: &GateSetSpec) -> Result<BTreeMap<Var, bool>> {
    if c.depth() != templates.len() {
        return Err(Error::InvalidArgument(format!("circuit depth {} vs {} layers", c.depth(), templates.len())));
    }
    let mut a: BTreeMap<Var, bool> = templates.iter().flat_map(|t| t.select_vars()).map(|v| (v, false)).collect();
    for (layer, t) in c.layers().iter().zip(templates) {
        let mut busy = vec![false; t.n];
        for g in layer {
            let missing = || Error::InvalidArgument(format!("{} is not in the gate set", g.kind));
            let v = match g.qubits[..] {
                [i] => t.single[i][gs.single_index(&g.kind).ok_or_else(missing)?],
                [i, j] => t.two[&(i, j)][gs.two_index(&g.kind).ok_or_else(missing)?],
                _ => return Err(missing()),
            };
            a.insert(v, true);
            g.qubits.iter().for_each(|&q| busy[q] = true);
        }
        for i in (0..t.n).filter(|&i| !busy[i]) {
            a.insert(t.single[i][0], true);
        }
    }
    Ok(a)
}

/// Unit clauses fixing the select variables to `a`.
pub fn fix_selection(f: &mut WeightedCnf, a: &BTreeMap<Var, bool>) {
    for (&v, &b) in a {
        f.add_unit(Lit::new(v, b));
    }
}
