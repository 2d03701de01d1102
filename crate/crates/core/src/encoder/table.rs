//! Gate templates: a CNF over `2w` point variables (inputs, then outputs)
//! plus auxiliary weight variables, generated from the gate's entry table.

use num_complex::Complex64;

use crate::circuit::GateKind;
use crate::linalg::Matrix;
use crate::pauli::PauliString;
use crate::weights::{pow2, ExactW, Weight};

use super::Basis;

const FLOAT_TOL: f64 = 1e-12;

/// A literal over template-local variables: indices below `2 * width` are
/// point bits, the rest are auxiliaries.
pub(crate) type LocalLit = (usize, bool);

#[derive(Clone, Debug)]
pub(crate) struct GateTemplate {
    pub width: usize,
    pub clauses: Vec<Vec<LocalLit>>,
    pub aux: Vec<Weight>,
}

impl GateTemplate {
    pub fn is_exact(&self) -> bool {
        self.aux.iter().all(Weight::is_exact)
    }

    pub fn build(kind: &GateKind, basis: Basis) -> GateTemplate {
        let k = kind.arity();
        let width = k * basis.vars_per_qubit();
        let values = match basis {
            Basis::CB => cb_table(&kind.matrix(), k),
            Basis::PB => pb_table(&kind.matrix(), k),
        };
        from_values(width, &values)
    }
}

/// Value at every point; bit `j` of a point is local variable `j`.
fn cb_table(u: &Matrix<Weight>, k: usize) -> Vec<Weight> {
    let idx = |bits: usize| (0..k).fold(0, |acc, j| acc << 1 | (bits >> j & 1));
    (0..1usize << (2 * k))
        .map(|p| {
            let (i, o) = (idx(p & ((1 << k) - 1)), idx(p >> k));
            u.get(o, i).clone()
        })
        .collect()
}

fn pb_table(u: &Matrix<Weight>, k: usize) -> Vec<Weight> {
    let pauli_of = |bits: usize| {
        let mut idx = 0;
        for j in 0..k {
            idx = idx << 2 | (bits >> (2 * j) & 1) << 1 | (bits >> (2 * j + 1) & 1);
        }
        PauliString::from_index(k, idx)
    };
    let scale = pow2(-(k as i32));
    let mask = (1usize << (2 * k)) - 1;
    let conj: Vec<Matrix<Weight>> = (0..1usize << (2 * k))
        .map(|b| u.matmul(&pauli_of(b).matrix()).matmul(&u.adjoint()))
        .collect();
    (0..1usize << (4 * k))
        .map(|p| {
            let m = &conj[p & mask];
            let out = pauli_of(p >> (2 * k)).matrix();
            let mut tr = Weight::zero();
            for (r, c, w) in out.entries() {
                if !w.is_zero() {
                    tr = &tr + &(w * m.get(c, r));
                }
            }
            &tr * &scale
        })
        .collect()
}

fn negligible(w: &Weight) -> bool {
    match w {
        Weight::Exact(e) => e.is_zero(),
        Weight::Float(z) => z.norm() <= FLOAT_TOL,
    }
}

fn same(a: &Weight, b: &Weight) -> bool {
    match (a, b) {
        (Weight::Exact(x), Weight::Exact(y)) => x == y,
        _ => (a.to_complex() - b.to_complex()).norm() <= FLOAT_TOL,
    }
}

/// Splits `v` into a real positive magnitude and a unit phase, exactly when
/// both are ring elements.
fn polar(v: &Weight) -> (Weight, Weight) {
    match v {
        Weight::Exact(e) => {
            let c = e.to_complex();
            let m = ExactW::from_complex_approx(Complex64::new(c.norm(), 0.0), FLOAT_TOL);
            let ph = ExactW::from_complex_approx(c / c.norm(), FLOAT_TOL);
            if let (Some(m), Some(ph)) = (m, ph) {
                if &m * &ph == *e {
                    return (Weight::Exact(m), Weight::Exact(ph));
                }
            }
            (Weight::Float(Complex64::new(c.norm(), 0.0)), Weight::Float(c / c.norm()))
        }
        Weight::Float(z) => (Weight::Float(Complex64::new(z.norm(), 0.0)), Weight::Float(z / z.norm())),
    }
}

fn from_values(width: usize, values: &[Weight]) -> GateTemplate {
    let nbits = 2 * width;
    let zero: Vec<bool> = values.iter().map(negligible).collect();
    let points: Vec<usize> = (0..values.len()).filter(|&p| !zero[p]).collect();
    // outputs first, so relations read as functions of the inputs
    let order: Vec<usize> = (width..nbits).chain(0..width).collect();

    let mut clauses: Vec<Vec<LocalLit>> = Vec::new();
    let forbidden: Vec<usize> = (0..values.len()).filter(|&p| zero[p]).collect();
    for (mask, val) in cover(&forbidden, |p| zero[p], nbits, &order) {
        clauses.push(negate_cube(mask, val, nbits, None));
    }

    // value classes, each tied to one auxiliary variable
    let mut classes: Vec<(Weight, Vec<usize>)> = Vec::new();
    let push = |classes: &mut Vec<(Weight, Vec<usize>)>, w: Weight, p: usize| {
        if same(&w, &Weight::one()) {
            return;
        }
        match classes.iter_mut().find(|(c, _)| same(c, &w)) {
            Some((_, ps)) => ps.push(p),
            None => classes.push((w, vec![p])),
        }
    };
    let polars: Vec<(Weight, Weight)> = points.iter().map(|&p| polar(&values[p])).collect();
    let uniform = polars.windows(2).all(|w| same(&w[0].0, &w[1].0))
        && polars.iter().all(|(m, ph)| m.is_exact() == ph.is_exact());
    if uniform && !polars.is_empty() {
        push(&mut classes, polars[0].0.clone(), usize::MAX);
        for (&p, (_, ph)) in points.iter().zip(&polars) {
            push(&mut classes, ph.clone(), p);
        }
    } else {
        for &p in &points {
            push(&mut classes, values[p].clone(), p);
        }
    }

    let mut aux = Vec::new();
    for (w, members) in classes {
        let a = nbits + aux.len();
        aux.push(w);
        if members == [usize::MAX] {
            clauses.push(vec![(a, true)]);
            continue;
        }
        let mut inside = vec![false; values.len()];
        for &p in &members {
            inside[p] = true;
        }
        let outside: Vec<usize> = points.iter().copied().filter(|&p| !inside[p]).collect();
        for (mask, val) in cover(&members, |p| inside[p] || zero[p], nbits, &order) {
            clauses.push(negate_cube(mask, val, nbits, Some((a, true))));
        }
        for (mask, val) in cover(&outside, |p| (!inside[p]) || zero[p], nbits, &order) {
            clauses.push(negate_cube(mask, val, nbits, Some((a, false))));
        }
    }
    clauses.sort();
    clauses.dedup();
    GateTemplate { width, clauses, aux }
}

fn negate_cube(mask: usize, val: usize, nbits: usize, extra: Option<LocalLit>) -> Vec<LocalLit> {
    let mut c: Vec<LocalLit> = extra.into_iter().collect();
    c.extend((0..nbits).filter(|b| mask >> b & 1 == 1).map(|b| (b, val >> b & 1 == 0)));
    c
}

/// Greedy cube cover of `targets`: every cube lies inside `allowed`, and
/// literals are dropped in `order` while that stays true.
fn cover(targets: &[usize], allowed: impl Fn(usize) -> bool, nbits: usize, order: &[usize]) -> Vec<(usize, usize)> {
    let full = (1usize << nbits) - 1;
    let fits = |mask: usize, val: usize| {
        let free = full & !mask;
        // enumerate subsets of the free bits
        let mut sub = free;
        loop {
            if !allowed(val | sub) {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & free;
        }
    };
    let mut cubes: Vec<(usize, usize)> = Vec::new();
    for &t in targets {
        if cubes.iter().any(|&(m, v)| t & m == v) {
            continue;
        }
        let mut mask = full;
        for &b in order {
            let m = mask & !(1 << b);
            if fits(m, t & m) {
                mask = m;
            }
        }
        cubes.push((mask, t & mask));
    }
    cubes
}

/// Brute-force check of a template against its table, used in tests.
#[cfg(test)]
pub(crate) fn template_value(t: &GateTemplate, point: usize) -> Weight {
    let nbits = 2 * t.width;
    let naux = t.aux.len();
    let mut total = Weight::zero();
    for a in 0..1usize << naux {
        let full = point | a << nbits;
        let sat = t.clauses.iter().all(|c| c.iter().any(|&(v, pos)| (full >> v & 1 == 1) == pos));
        if sat {
            let w = (0..naux).filter(|i| a >> i & 1 == 1).fold(Weight::one(), |acc, i| &acc * &t.aux[i]);
            total = &total + &w;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(kind: GateKind, basis: Basis) -> GateTemplate {
        let t = GateTemplate::build(&kind, basis);
        let k = kind.arity();
        let table = match basis {
            Basis::CB => cb_table(&kind.matrix(), k),
            Basis::PB => pb_table(&kind.matrix(), k),
        };
        for (p, v) in table.iter().enumerate() {
            let got = template_value(&t, p);
            assert!(got.approx_eq(v, 1e-12), "{kind} {basis:?} point {p}: {got} vs {v}");
            if v.is_exact() {
                assert_eq!(&got, v, "{kind} {basis:?} point {p}");
            }
        }
        t
    }

    #[test]
    fn all_gates_reproduce_their_tables() {
        for basis in [Basis::CB, Basis::PB] {
            for kind in [GateKind::I, GateKind::H, GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg, GateKind::CX] {
                check(kind, basis);
            }
            check(GateKind::RZ(0.3927), basis);
            check(GateKind::RZ(0.0), basis);
        }
    }

    #[test]
    fn hadamard_cb_shape() {
        let t = check(GateKind::H, Basis::CB);
        // h forced true, r ⇔ q ∧ q'
        assert_eq!(t.aux, vec![Weight::inv_sqrt2_pow(1), Weight::int(-1)]);
        assert_eq!(t.clauses.len(), 4);
    }

    #[test]
    fn t_cb_shape() {
        let t = check(GateKind::T, Basis::CB);
        assert_eq!(t.aux, vec![Weight::omega_pow(1)]);
        let mut expect = vec![
            vec![(0, true), (1, false)],
            vec![(0, false), (1, true)],
            vec![(2, true), (0, false)],
            vec![(2, false), (0, true)],
        ];
        expect.sort();
        assert_eq!(t.clauses, expect);
    }

    #[test]
    fn identity_has_no_aux() {
        for basis in [Basis::CB, Basis::PB] {
            let t = check(GateKind::I, basis);
            assert!(t.aux.is_empty());
            assert_eq!(t.clauses.len(), 2 * t.width);
        }
    }

    #[test]
    fn t_pb_table() {
        let table = pb_table(&GateKind::T.matrix(), 1);
        let h = Weight::inv_sqrt2_pow(1);
        // point bits: x_in, z_in, x_out, z_out
        let at = |pin: (bool, bool), pout: (bool, bool)| {
            table[pin.0 as usize | (pin.1 as usize) << 1 | (pout.0 as usize) << 2 | (pout.1 as usize) << 3].clone()
        };
        let (i, x, y, z) = ((false, false), (true, false), (true, true), (false, true));
        assert_eq!(at(i, i), Weight::one());
        assert_eq!(at(z, z), Weight::one());
        assert_eq!(at(x, x), h);
        assert_eq!(at(x, y), h);
        assert_eq!(at(y, x), -&h);
        assert_eq!(at(y, y), h);
        assert!(at(x, z).is_zero());
    }
}
