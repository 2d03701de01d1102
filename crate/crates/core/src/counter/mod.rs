//! Weighted model counting and maximum weighted model counting with
//! negative and complex weights.
//!
//! [`Counter::count`] sums `Π W(literal)` over every model of a formula.
//! [`Counter::max_count`] chooses the assignment to the select variables
//! maximising the count over the remaining ones; ties go to the
//! lexicographically smallest assignment (ordered by variable id, false
//! before true).

mod cache;
mod engine;
mod maxsat;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_complex::Complex64;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::cnf::{Lit, Var, VarKind, WeightedCnf};
use crate::error::{Error, Result};
use crate::weights::{ExactW, Scalar, Weight};

use cache::ComponentCache;
use engine::{lit, ClassInfo, Engine, Occ, UNSET};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub decisions: u64,
    pub cache_hits: u64,
    pub components: u64,
    pub leaves: u64,
    pub bound_prunes: u64,
    pub elapsed_ms: u64,
}

impl Stats {
    fn absorb(&mut self, o: &Stats) {
        self.decisions += o.decisions;
        self.cache_hits += o.cache_hits;
        self.components += o.components;
        self.leaves += o.leaves;
        self.bound_prunes += o.bound_prunes;
    }
}

#[derive(Clone, Debug)]
pub struct CountResult {
    pub count: Weight,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// The real part; the count must be real.
    Real,
    /// `|c|²`.
    NormSq,
}

#[derive(Clone, Debug)]
pub struct MaxCountResult {
    pub best_assignment: BTreeMap<Var, bool>,
    pub best_count: Weight,
    pub objective: f64,
    pub threshold_hit: bool,
    pub stats: Stats,
}

const IMAG_TOL: f64 = 1e-9;
/// Slack applied when testing `objective ≥ threshold`.
pub const THRESHOLD_SLACK: f64 = 1e-9;

pub fn objective_of(c: &Weight, mode: Objective) -> Result<f64> {
    let z = c.to_complex();
    match mode {
        Objective::Real if z.im.abs() > IMAG_TOL => Err(Error::ImaginaryResidue(z.im)),
        Objective::Real => Ok(z.re),
        Objective::NormSq => Ok(z.norm_sqr()),
    }
}

#[derive(Clone, Debug)]
pub struct CounterOptions {
    /// Split residual formulas into variable-disjoint components.
    pub components: bool,
    /// Memoise component counts.
    pub cache: bool,
    pub threads: usize,
    /// Prune select branches whose summed count cannot beat the incumbent.
    /// Only sound, and only ever applied, when every weight is a
    /// non-negative real and the objective is [`Objective::Real`].
    pub upper_bound_pruning: bool,
    /// Cache size in 32-bit words before it is flushed.
    pub cache_budget_words: usize,
}

impl Default for CounterOptions {
    fn default() -> Self {
        CounterOptions {
            components: true,
            cache: true,
            threads: 1,
            upper_bound_pruning: false,
            cache_budget_words: 1 << 26,
        }
    }
}

#[derive(Default)]
struct Registry {
    ids: HashMap<(Weight, Weight, bool), u32>,
    list: Vec<(Weight, Weight, bool)>,
}

/// A counter with a component cache that persists across calls.
pub struct Counter {
    opts: CounterOptions,
    registry: Mutex<Registry>,
    exact_cache: ComponentCache<ExactW>,
    float_cache: ComponentCache<Complex64>,
}

impl Default for Counter {
    fn default() -> Self {
        Counter::new(CounterOptions::default())
    }
}

/// A formula lowered to the engine's flat representation.
pub(crate) struct Prepared<T> {
    pub n: usize,
    pub classes: Vec<u32>,
    pub table: Vec<ClassInfo<T>>,
    pub buf: Vec<u32>,
    pub unsat: bool,
    pub select: Vec<bool>,
    pub nonneg_real: bool,
}

trait CacheFor: Scalar {
    fn cache(c: &Counter) -> &ComponentCache<Self>;
}

impl CacheFor for ExactW {
    fn cache(c: &Counter) -> &ComponentCache<Self> {
        &c.exact_cache
    }
}

impl CacheFor for Complex64 {
    fn cache(c: &Counter) -> &ComponentCache<Self> {
        &c.float_cache
    }
}

impl Counter {
    pub fn new(opts: CounterOptions) -> Self {
        let budget = opts.cache_budget_words;
        Counter {
            opts,
            registry: Mutex::new(Registry::default()),
            exact_cache: ComponentCache::new(budget),
            float_cache: ComponentCache::new(budget),
        }
    }

    pub fn options(&self) -> &CounterOptions {
        &self.opts
    }

    pub fn with_threads(threads: usize) -> Self {
        Counter::new(CounterOptions { threads: threads.max(1), ..CounterOptions::default() })
    }

    pub fn clear_cache(&self) {
        self.exact_cache.clear();
        self.float_cache.clear();
    }

    /// Number of cached components across both scalar types.
    pub fn cache_entries(&self) -> usize {
        self.exact_cache.len() + self.float_cache.len()
    }

    fn prepare<T: Scalar>(&self, f: &WeightedCnf) -> Prepared<T> {
        let n = f.num_vars();
        let mut reg = self.registry.lock();
        let classes: Vec<u32> = (1..=n as Var)
            .map(|v| {
                let (p, q) = f.weight(v);
                let key = (p, q, f.kind(v) != VarKind::Aux);
                if let Some(&id) = reg.ids.get(&key) {
                    return id;
                }
                let id = reg.list.len() as u32;
                reg.list.push(key.clone());
                reg.ids.insert(key, id);
                id
            })
            .collect();
        let table = reg
            .list
            .iter()
            .map(|(p, q, s)| {
                // classes from formulas of the other scalar type are never referenced
                let conv = |w: &Weight| T::from_weight(w).unwrap_or_else(T::zero);
                let (pos, neg) = (conv(p), conv(q));
                ClassInfo { sum: pos.add(&neg), pos, neg, is_state: *s }
            })
            .collect();
        drop(reg);
        let mut buf = Vec::with_capacity(f.num_literals() + f.num_clauses());
        let mut unsat = false;
        for c in f.clauses() {
            unsat |= c.is_empty();
            buf.push(c.len() as u32);
            buf.extend(c.iter().map(|l| lit(l.var() as usize - 1, l.is_pos())));
        }
        let select = (1..=n as Var).map(|v| f.kind(v) == VarKind::Select).collect();
        let nonneg_real = f.weighted_vars().all(|(_, (p, q))| {
            [p, q].iter().all(|w| {
                let z = w.to_complex();
                w.as_exact().map_or(z.im == 0.0, ExactW::is_real) && z.re >= 0.0
            })
        });
        Prepared { n, classes, table, buf, unsat, select, nonneg_real }
    }

    fn engine<'a, T: CacheFor>(&'a self, p: &'a Prepared<T>) -> Engine<'a, T> {
        Engine {
            classes: &p.table,
            cache: self.opts.cache.then(|| T::cache(self)),
            split: self.opts.components,
            stats: Stats::default(),
        }
    }

    fn count_in<T: CacheFor>(&self, f: &WeightedCnf, assumptions: &[Lit]) -> (T, Stats) {
        let p = self.prepare::<T>(f);
        let mut e = self.engine(&p);
        if p.unsat {
            return (T::zero(), e.stats);
        }
        let mut init: Vec<u32> = engine::clauses_of(&p.buf).filter(|(_, c)| c.len() == 1).map(|(_, c)| c[0]).collect();
        init.extend(assumptions.iter().map(|l| lit(l.var() as usize - 1, l.is_pos())));
        let occ = Occ::build(&p.buf, p.n);
        let mut val = vec![UNSET; p.n];
        let mut trail = Vec::new();
        if !engine::propagate(&p.buf, &occ, &mut val, &init, &mut trail) {
            return (T::zero(), e.stats);
        }
        let mut w = e.trail_weight(&p.classes, &val, &trail);
        let mut present = vec![false; p.n];
        let res = engine::residual(&p.buf, &val, &mut present);
        for v in 0..p.n {
            if val[v] == UNSET && !present[v] {
                w = w.mul(&p.table[p.classes[v] as usize].sum);
            }
        }
        if !w.is_zero() {
            w = w.mul(&e.count_residual(p.n, &p.classes, &res, &present));
        }
        (w, e.stats)
    }

    /// Weighted count over every variable of `f`.
    pub fn count(&self, f: &WeightedCnf) -> CountResult {
        self.count_under(f, &[])
    }

    /// Weighted count of `f` conjoined with the unit literals `assumptions`.
    pub fn count_under(&self, f: &WeightedCnf, assumptions: &[Lit]) -> CountResult {
        let start = Instant::now();
        let (count, mut stats) = if f.is_exact() {
            let (c, s) = self.count_in::<ExactW>(f, assumptions);
            (Weight::Exact(c), s)
        } else {
            let (c, s) = self.count_in::<Complex64>(f, assumptions);
            (Weight::Float(c), s)
        };
        stats.elapsed_ms = start.elapsed().as_millis() as u64;
        CountResult { count, stats }
    }

    /// Maximises `objective(count)` over assignments to the select variables.
    /// With a threshold the search stops at the first assignment (in
    /// lexicographic order) whose objective reaches `threshold − 1e-9`.
    pub fn max_count(&self, f: &WeightedCnf, mode: Objective, threshold: Option<f64>) -> Result<MaxCountResult> {
        let start = Instant::now();
        let mut r = if f.is_exact() {
            maxsat::run::<ExactW>(self, f, mode, threshold)?
        } else {
            maxsat::run::<Complex64>(self, f, mode, threshold)?
        };
        r.stats.elapsed_ms = start.elapsed().as_millis() as u64;
        Ok(r)
    }
}

pub fn count(f: &WeightedCnf) -> CountResult {
    Counter::default().count(f)
}

pub fn max_count(f: &WeightedCnf, mode: Objective, threshold: Option<f64>) -> Result<MaxCountResult> {
    Counter::default().max_count(f, mode, threshold)
}

/// Reference enumeration over all `2^n` assignments. Intended for tests
/// and small formulas.
pub fn brute_force_count(f: &WeightedCnf) -> Weight {
    brute_force_under(f, &BTreeMap::new())
}

fn brute_force_under(f: &WeightedCnf, fixed: &BTreeMap<Var, bool>) -> Weight {
    let free: Vec<Var> = (1..=f.num_vars() as Var).filter(|v| !fixed.contains_key(v)).collect();
    assert!(free.len() <= 24, "brute force limited to 24 free variables");
    let mut val = vec![false; f.num_vars() + 1];
    for (&v, &b) in fixed {
        val[v as usize] = b;
    }
    let mut total = Weight::zero();
    for m in 0u64..1 << free.len() {
        for (i, &v) in free.iter().enumerate() {
            val[v as usize] = m >> i & 1 == 1;
        }
        if f.clauses().iter().all(|c| c.iter().any(|l| val[l.var() as usize] == l.is_pos())) {
            let w = free.iter().fold(Weight::one(), |acc, &v| &acc * &f.lit_weight(Lit::new(v, val[v as usize])));
            total = &total + &w;
        }
    }
    total
}

/// Reference Max#SAT by enumerating select assignments in lexicographic
/// order and counting the rest by brute force.
pub fn brute_force_max(f: &WeightedCnf, mode: Objective) -> Result<(BTreeMap<Var, bool>, Weight, f64)> {
    let sel = f.vars_of_kind(VarKind::Select);
    assert!(sel.len() <= 16, "brute force limited to 16 select variables");
    let mut best: Option<(BTreeMap<Var, bool>, Weight, f64)> = None;
    for m in 0u64..1 << sel.len() {
        // most significant bit = smallest id, so numeric order is lexicographic
        let fixed: BTreeMap<Var, bool> =
            sel.iter().enumerate().map(|(i, &v)| (v, m >> (sel.len() - 1 - i) & 1 == 1)).collect();
        let c = brute_force_under(f, &fixed);
        let o = objective_of(&c, mode)?;
        if best.as_ref().map_or(true, |b| o > b.2) {
            best = Some((fixed, c, o));
        }
    }
    Ok(best.expect("at least one select assignment"))
}

#[cfg(test)]
mod tests;
