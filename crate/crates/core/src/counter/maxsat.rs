//! Depth-first search over the select variables. Each leaf fixes every
//! select variable and is scored by counting the residual formula.
//!
//! Select variables are decided in increasing id order, false first, so
//! leaves are visited in lexicographic order. A multi-threaded run splits
//! the top of the tree into tasks in that same order and reduces their
//! results in order, which keeps the answer independent of the thread count.
//!
//! Select assignments without models count zero. When counts can be
//! negative they may still win, so every conflict and every select variable
//! forced by propagation leaves behind a zero-count candidate, scored at the
//! point of the walk where it was found.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use parking_lot::Mutex;

use crate::cnf::{Var, WeightedCnf};
use crate::error::{Error, Result};

use super::engine::{self, clauses_of, lit, Engine, Occ, ELIMINATED, FALSE, TRUE, UNSET};
use super::{objective_of, CacheFor, Counter, MaxCountResult, Objective, Prepared, Stats, THRESHOLD_SLACK};

#[derive(Clone)]
struct Node<T> {
    buf: Vec<u32>,
    val: Vec<i8>,
    acc: T,
    /// Set when propagation failed; every leaf below counts zero.
    dead: bool,
    /// A zero-count select assignment discovered on the way to this node.
    zero: Option<BTreeMap<Var, bool>>,
}

struct Best<T> {
    obj: f64,
    count: T,
    assignment: BTreeMap<Var, bool>,
}

struct Outcome<T> {
    best: Option<Best<T>>,
    hit: bool,
    err: Option<Error>,
    stats: Stats,
}

struct Search<'a, T> {
    p: &'a Prepared<T>,
    sel: &'a [usize],
    engine: Engine<'a, T>,
    mode: Objective,
    threshold: Option<f64>,
    bound: bool,
    track_zero: bool,
    task: usize,
    stop_at: &'a AtomicUsize,
    best: Option<Best<T>>,
    hit: bool,
    err: Option<Error>,
}

impl<'a, T: CacheFor> Search<'a, T> {
    fn stopped(&self) -> bool {
        self.hit || self.err.is_some() || self.stop_at.load(Ordering::Relaxed) < self.task
    }

    fn next_select(&self, node: &Node<T>) -> Option<usize> {
        self.sel.iter().copied().find(|&v| node.val[v] == UNSET)
    }

    /// Takes the weight of `trail`, shrinks the clause list, and settles
    /// every variable that no longer occurs: select variables become false,
    /// the others contribute their weight sum.
    fn settle(&self, buf: &[u32], mut val: Vec<i8>, trail: &[u32], acc: &T) -> Node<T> {
        let p = self.p;
        let mut acc = acc.mul(&self.engine.trail_weight(&p.classes, &val, trail));
        let mut present = vec![false; p.n];
        let res = engine::residual(buf, &val, &mut present);
        for v in 0..p.n {
            if val[v] == UNSET && !present[v] {
                if p.select[v] {
                    val[v] = FALSE;
                } else {
                    acc = acc.mul(&p.table[p.classes[v] as usize].sum);
                    val[v] = ELIMINATED;
                }
            }
        }
        Node { buf: res, val, acc, dead: false, zero: None }
    }

    fn wants_zero(&self) -> bool {
        self.track_zero && self.best.as_ref().map_or(true, |b| b.obj < 0.0)
    }

    /// Select values of `val` with unset variables false.
    fn assignment(&self, val: &[i8]) -> BTreeMap<Var, bool> {
        self.sel.iter().map(|&v| (v as Var + 1, val[v] == TRUE)).collect()
    }

    /// The smallest assignment that keeps the values of `pre` but
    /// contradicts one of the select values propagation forced in `trail`.
    fn forced_zero(&self, pre: &[i8], post: &[i8], trail: &[u32]) -> Option<BTreeMap<Var, bool>> {
        if !self.wants_zero() {
            return None;
        }
        trail
            .iter()
            .map(|&v| v as usize)
            .filter(|&v| self.p.select[v])
            .map(|v| {
                let mut a = self.assignment(pre);
                a.insert(v as Var + 1, post[v] != TRUE);
                a
            })
            .min()
    }

    fn root(&self) -> Option<Node<T>> {
        let p = self.p;
        if p.unsat {
            return None;
        }
        let units: Vec<u32> = clauses_of(&p.buf).filter(|(_, c)| c.len() == 1).map(|(_, c)| c[0]).collect();
        let occ = Occ::build(&p.buf, p.n);
        let mut val = vec![UNSET; p.n];
        let mut trail = Vec::new();
        if !engine::propagate(&p.buf, &occ, &mut val, &units, &mut trail) {
            return None;
        }
        let zero = self.forced_zero(&vec![UNSET; p.n], &val, &trail);
        Some(Node { zero, ..self.settle(&p.buf, val, &trail, &T::one()) })
    }

    fn child(&mut self, node: &Node<T>, occ: &Occ, v: usize, positive: bool) -> Node<T> {
        self.engine.stats.decisions += 1;
        let mut val = node.val.clone();
        let mut trail = Vec::new();
        let decided = || {
            let mut pre = node.val.clone();
            pre[v] = if positive { TRUE } else { FALSE };
            pre
        };
        if !engine::propagate(&node.buf, occ, &mut val, &[lit(v, positive)], &mut trail) {
            let zero = self.wants_zero().then(|| self.assignment(&decided()));
            return Node { buf: Vec::new(), val: Vec::new(), acc: T::zero(), dead: true, zero };
        }
        let zero = if trail[1..].iter().any(|&u| self.p.select[u as usize]) {
            self.forced_zero(&decided(), &val, &trail[1..])
        } else {
            None
        };
        Node { zero, ..self.settle(&node.buf, val, &trail, &node.acc) }
    }

    fn zero_leaf(&mut self, assignment: BTreeMap<Var, bool>) {
        if !self.wants_zero() {
            return;
        }
        self.best = Some(Best { obj: 0.0, count: T::zero(), assignment });
        if self.threshold.is_some_and(|t| 0.0 >= t - THRESHOLD_SLACK) {
            self.hit = true;
        }
    }

    fn residual_count(&mut self, node: &Node<T>) -> T {
        if node.buf.is_empty() || node.acc.is_zero() {
            return node.acc.clone();
        }
        let mut present = vec![false; self.p.n];
        for (_, c) in clauses_of(&node.buf) {
            for &l in c {
                present[(l >> 1) as usize] = true;
            }
        }
        node.acc.mul(&self.engine.count_residual(self.p.n, &self.p.classes, &node.buf, &present))
    }

    fn dfs(&mut self, mut node: Node<T>) {
        if self.stopped() {
            return;
        }
        if let Some(z) = node.zero.take() {
            self.zero_leaf(z);
        }
        if node.dead || self.stopped() {
            return;
        }
        let Some(v) = self.next_select(&node) else {
            return self.leaf(node);
        };
        if let Some(b) = &self.best {
            // every leaf below counts zero
            if node.acc.is_zero() && b.obj >= 0.0 {
                return;
            }
            if self.bound {
                let obj = b.obj;
                // with non-negative weights the sum over all completions
                // bounds every single one
                if self.residual_count(&node).to_complex().re <= obj {
                    self.engine.stats.bound_prunes += 1;
                    return;
                }
            }
        }
        let occ = Occ::build(&node.buf, self.p.n);
        for positive in [false, true] {
            let c = self.child(&node, &occ, v, positive);
            self.dfs(c);
            if self.stopped() {
                return;
            }
        }
    }

    fn leaf(&mut self, node: Node<T>) {
        self.engine.stats.leaves += 1;
        let count = self.residual_count(&node);
        let obj = match objective_of(&count.to_weight(), self.mode) {
            Ok(o) => o,
            Err(e) => {
                self.err = Some(e);
                return;
            }
        };
        if self.best.as_ref().map_or(true, |b| obj > b.obj) {
            let assignment = self.sel.iter().map(|&v| (v as Var + 1, node.val[v] == TRUE)).collect();
            self.best = Some(Best { obj, count, assignment });
        }
        if self.threshold.is_some_and(|t| obj >= t - THRESHOLD_SLACK) {
            self.hit = true;
        }
    }

    fn outcome(self) -> Outcome<T> {
        Outcome { best: self.best, hit: self.hit, err: self.err, stats: self.engine.stats }
    }
}

pub(super) fn run<T: CacheFor>(
    counter: &Counter,
    f: &WeightedCnf,
    mode: Objective,
    threshold: Option<f64>,
) -> Result<MaxCountResult> {
    let p = counter.prepare::<T>(f);
    let sel: Vec<usize> = (0..p.n).filter(|&v| p.select[v]).collect();
    let bound = counter.opts.upper_bound_pruning && mode == Objective::Real && p.nonneg_real;
    let track_zero = mode == Objective::Real && !p.nonneg_real;
    let threads = counter.opts.threads.max(1);
    let stop_at = AtomicUsize::new(usize::MAX);
    let search = |task| Search {
        p: &p,
        sel: &sel,
        engine: counter.engine(&p),
        mode,
        threshold,
        bound,
        track_zero,
        task,
        stop_at: &stop_at,
        best: None,
        hit: false,
        err: None,
    };

    let mut splitter = search(0);
    let mut outcomes = Vec::new();
    if let Some(root) = splitter.root() {
        if threads == 1 {
            splitter.dfs(root);
        } else {
            let mut tasks = vec![root];
            while tasks.len() < 8 * threads {
                let mut next = Vec::with_capacity(2 * tasks.len());
                let mut grew = false;
                for mut t in tasks {
                    match if t.dead { None } else { splitter.next_select(&t) } {
                        Some(v) => {
                            grew = true;
                            let occ = Occ::build(&t.buf, p.n);
                            let mut lo = splitter.child(&t, &occ, v, false);
                            // the parent's candidate precedes both subtrees
                            lo.zero = t.zero.take().or(lo.zero);
                            let hi = splitter.child(&t, &occ, v, true);
                            next.extend([lo, hi]);
                        }
                        _ => next.push(t),
                    }
                }
                tasks = next;
                if !grew {
                    break;
                }
            }
            let slots: Vec<Mutex<(Option<Node<T>>, Option<Outcome<T>>)>> =
                tasks.into_iter().map(|t| Mutex::new((Some(t), None))).collect();
            let next_task = AtomicUsize::new(0);
            std::thread::scope(|s| {
                for _ in 0..threads {
                    s.spawn(|| loop {
                        let i = next_task.fetch_add(1, Ordering::Relaxed);
                        if i >= slots.len() {
                            break;
                        }
                        if stop_at.load(Ordering::Relaxed) < i {
                            continue;
                        }
                        let node = slots[i].lock().0.take().expect("each task runs once");
                        let mut w = search(i);
                        w.dfs(node);
                        if w.hit {
                            stop_at.fetch_min(i, Ordering::Relaxed);
                        }
                        slots[i].lock().1 = Some(w.outcome());
                    });
                }
            });
            outcomes.extend(slots.into_iter().map(|m| m.into_inner().1));
        }
    }
    let mut stats = Stats::default();
    let first = splitter.outcome();
    let mut best: Option<Best<T>> = None;
    let mut hit = false;
    for o in std::iter::once(Some(first)).chain(outcomes) {
        let Some(o) = o else { continue };
        stats.absorb(&o.stats);
        if hit {
            continue;
        }
        if let Some(e) = o.err {
            return Err(e);
        }
        if let Some(b) = o.best {
            if best.as_ref().map_or(true, |x| b.obj > x.obj) {
                best = Some(b);
            }
        }
        hit = o.hit;
    }
    Ok(match best {
        Some(b) => MaxCountResult {
            best_assignment: b.assignment,
            best_count: b.count.to_weight(),
            objective: b.obj,
            threshold_hit: hit,
            stats,
        },
        // no select assignment admits a model
        None => MaxCountResult {
            best_assignment: sel.iter().map(|&v| (v as Var + 1, false)).collect(),
            best_count: T::zero().to_weight(),
            objective: 0.0,
            threshold_hit: threshold.is_some_and(|t| 0.0 >= t - THRESHOLD_SLACK),
            stats,
        },
    })
}
