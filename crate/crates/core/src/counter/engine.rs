//! Exhaustive DPLL counting with component decomposition and caching.
//!
//! Clause lists are flat `u32` buffers of `[len, lit, lit, …]` with
//! `lit = var << 1 | negated`. A component is encoded canonically as
//! `[n, class_0 … class_{n-1}, clauses…]` over local variables `0..n`
//! numbered in the order of their original ids; that encoding is the
//! cache key, and the count of a component depends only on it.

use crate::weights::Scalar;

use super::cache::ComponentCache;
use super::Stats;

pub(crate) const UNSET: i8 = 0;
pub(crate) const TRUE: i8 = 1;
pub(crate) const FALSE: i8 = -1;
/// Unassigned but absent from every remaining clause; its factor has been
/// taken already.
pub(crate) const ELIMINATED: i8 = 2;

#[derive(Clone, Debug)]
pub(crate) struct ClassInfo<T> {
    pub pos: T,
    pub neg: T,
    pub sum: T,
    pub is_state: bool,
}

#[inline]
pub(crate) fn lit(var: usize, positive: bool) -> u32 {
    (var as u32) << 1 | (!positive) as u32
}

#[inline]
fn lit_value(val: &[i8], l: u32) -> i8 {
    let v = val[(l >> 1) as usize];
    if v == TRUE || v == FALSE {
        if l & 1 == 1 {
            -v
        } else {
            v
        }
    } else {
        UNSET
    }
}

/// Iterates `(offset, literals)` over a flat clause buffer.
pub(crate) fn clauses_of(buf: &[u32]) -> impl Iterator<Item = (usize, &[u32])> {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= buf.len() {
            return None;
        }
        let len = buf[i] as usize;
        let off = i;
        i += len + 1;
        Some((off, &buf[off + 1..off + 1 + len]))
    })
}

/// Variable → clause-offset occurrence lists in CSR form.
pub(crate) struct Occ {
    start: Vec<u32>,
    items: Vec<u32>,
}

impl Occ {
    pub fn build(buf: &[u32], n: usize) -> Occ {
        let mut start = vec![0u32; n + 1];
        for (_, c) in clauses_of(buf) {
            for &l in c {
                start[(l >> 1) as usize + 1] += 1;
            }
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let mut items = vec![0u32; start[n] as usize];
        for (off, c) in clauses_of(buf) {
            for &l in c {
                let v = (l >> 1) as usize;
                items[fill[v] as usize] = off as u32;
                fill[v] += 1;
            }
        }
        Occ { start, items }
    }

    fn of(&self, v: usize) -> &[u32] {
        &self.items[self.start[v] as usize..self.start[v + 1] as usize]
    }
}

/// Unit propagation to fixpoint. Newly assigned variables are appended to
/// `trail`; returns false on conflict.
pub(crate) fn propagate(buf: &[u32], occ: &Occ, val: &mut [i8], init: &[u32], trail: &mut Vec<u32>) -> bool {
    let mut head = trail.len();
    for &l in init {
        match lit_value(val, l) {
            TRUE => continue,
            FALSE => return false,
            _ => {
                val[(l >> 1) as usize] = if l & 1 == 1 { FALSE } else { TRUE };
                trail.push(l >> 1);
            }
        }
    }
    while head < trail.len() {
        let v = trail[head] as usize;
        head += 1;
        for &off in occ.of(v) {
            let off = off as usize;
            let len = buf[off] as usize;
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in &buf[off + 1..off + 1 + len] {
                match lit_value(val, l) {
                    TRUE => {
                        sat = true;
                        break;
                    }
                    FALSE => {}
                    _ => {
                        n_open += 1;
                        open = Some(l);
                    }
                }
            }
            if sat || n_open > 1 {
                continue;
            }
            let Some(u) = open else { return false };
            val[(u >> 1) as usize] = if u & 1 == 1 { FALSE } else { TRUE };
            trail.push(u >> 1);
        }
    }
    true
}

/// Clauses not yet satisfied, restricted to their open literals. Marks the
/// variables that still occur in `present`.
pub(crate) fn residual(buf: &[u32], val: &[i8], present: &mut [bool]) -> Vec<u32> {
    let mut out = Vec::with_capacity(buf.len());
    for (_, c) in clauses_of(buf) {
        if c.iter().any(|&l| lit_value(val, l) == TRUE) {
            continue;
        }
        let at = out.len();
        out.push(0);
        for &l in c {
            if lit_value(val, l) == UNSET {
                out.push(l);
                present[(l >> 1) as usize] = true;
            }
        }
        out[at] = (out.len() - at - 1) as u32;
    }
    out
}

pub(crate) struct Engine<'a, T> {
    pub classes: &'a [ClassInfo<T>],
    pub cache: Option<&'a ComponentCache<T>>,
    pub split: bool,
    pub stats: Stats,
}

impl<'a, T: Scalar> Engine<'a, T> {
    pub fn weight_of(&self, class: u32, value: i8) -> &T {
        let c = &self.classes[class as usize];
        if value == TRUE {
            &c.pos
        } else {
            &c.neg
        }
    }

    /// Groups the residual clauses of an `n`-variable space into canonical
    /// component keys, ordered by smallest variable.
    pub fn components(&mut self, n: usize, classes: &[u32], res: &[u32], present: &[bool]) -> Vec<Vec<u32>> {
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        if self.split {
            for (_, c) in clauses_of(res) {
                let mut a = find(&mut parent, c[0] >> 1);
                for &l in &c[1..] {
                    let b = find(&mut parent, l >> 1);
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                        a = lo;
                    }
                }
            }
        } else {
            let first = (0..n).find(|&v| present[v]).map(|v| v as u32);
            if let Some(r) = first {
                for v in 0..n {
                    if present[v] {
                        parent[v] = r;
                    }
                }
            }
        }
        let mut group_of = vec![u32::MAX; n];
        let mut local = vec![0u32; n];
        let mut groups: Vec<(Vec<u32>, Vec<u32>)> = Vec::new(); // (vars, clause buffer)
        for v in 0..n {
            if !present[v] {
                continue;
            }
            let r = find(&mut parent, v as u32) as usize;
            if group_of[r] == u32::MAX {
                group_of[r] = groups.len() as u32;
                groups.push((Vec::new(), Vec::new()));
            }
            let g = group_of[r] as usize;
            local[v] = groups[g].0.len() as u32;
            groups[g].0.push(v as u32);
        }
        for (_, c) in clauses_of(res) {
            let r = find(&mut parent, c[0] >> 1) as usize;
            let g = &mut groups[group_of[r] as usize].1;
            g.push(c.len() as u32);
            g.extend(c.iter().map(|&l| local[(l >> 1) as usize] << 1 | (l & 1)));
        }
        self.stats.components += groups.len() as u64;
        groups
            .into_iter()
            .map(|(vars, body)| {
                let mut key = Vec::with_capacity(1 + vars.len() + body.len());
                key.push(vars.len() as u32);
                key.extend(vars.iter().map(|&v| classes[v as usize]));
                key.extend(body);
                key
            })
            .collect()
    }

    /// Weight of the assigned variables in `trail`.
    pub fn trail_weight(&self, classes: &[u32], val: &[i8], trail: &[u32]) -> T {
        trail.iter().fold(T::one(), |acc, &v| acc.mul(self.weight_of(classes[v as usize], val[v as usize])))
    }

    /// Count of a residual: the product over its components.
    pub fn count_residual(&mut self, n: usize, classes: &[u32], res: &[u32], present: &[bool]) -> T {
        let mut w = T::one();
        if res.is_empty() {
            return w;
        }
        for key in self.components(n, classes, res, present) {
            w = w.mul(&self.count_component(&key));
            if w.is_zero() {
                break;
            }
        }
        w
    }

    pub fn count_component(&mut self, key: &[u32]) -> T {
        if let Some(cache) = self.cache {
            if let Some(c) = cache.get(key) {
                self.stats.cache_hits += 1;
                return c;
            }
        }
        let n = key[0] as usize;
        let classes = &key[1..1 + n];
        let buf = &key[1 + n..];
        let occ = Occ::build(buf, n);
        let branch = self.pick(classes);
        let mut total = T::zero();
        let mut val = vec![UNSET; n];
        let mut trail = Vec::new();
        for positive in [true, false] {
            self.stats.decisions += 1;
            val.iter_mut().for_each(|x| *x = UNSET);
            trail.clear();
            if !propagate(buf, &occ, &mut val, &[lit(branch, positive)], &mut trail) {
                continue;
            }
            let mut w = self.trail_weight(classes, &val, &trail);
            if w.is_zero() {
                continue;
            }
            let mut present = vec![false; n];
            let res = residual(buf, &val, &mut present);
            for v in 0..n {
                if val[v] == UNSET && !present[v] {
                    w = w.mul(&self.classes[classes[v] as usize].sum);
                }
            }
            if !w.is_zero() {
                w = w.mul(&self.count_residual(n, classes, &res, &present));
            }
            total = total.add(&w);
        }
        if let Some(cache) = self.cache {
            cache.insert(key, total.clone());
        }
        total
    }

    /// State variables first, then the highest local index. Depends only on
    /// the key, which keeps component counts path independent.
    fn pick(&self, classes: &[u32]) -> usize {
        (0..classes.len())
            .rev()
            .find(|&v| self.classes[classes[v] as usize].is_state)
            .unwrap_or(classes.len() - 1)
    }
}
