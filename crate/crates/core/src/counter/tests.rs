use super::*;
use crate::encoder::{Basis, Encoder, WeightMode};
use crate::state::State;
use proptest::prelude::*;

fn palette() -> Vec<Weight> {
    vec![
        Weight::int(-1),
        Weight::inv_sqrt2_pow(1),
        Weight::omega_pow(1),
        Weight::omega_pow(3),
        Weight::exact(1, 1, 0, 0, 1),
        Weight::int(2),
    ]
}

/// `kinds[i] = (kind, weight)`, weight index 0 meaning unweighted.
fn build(kinds: &[(u8, usize)], clauses: &[Vec<(usize, bool)>], float: bool) -> WeightedCnf {
    let mut f = WeightedCnf::new();
    let pal = palette();
    for &(k, w) in kinds {
        let kind = match k % 3 {
            0 => VarKind::State,
            1 => VarKind::Aux,
            _ => VarKind::Select,
        };
        let v = f.fresh(kind);
        if kind == VarKind::Aux && w > 0 {
            let w = pal[(w - 1) % pal.len()].clone();
            f.set_weight(v, if float { w.to_float() } else { w }, Weight::one());
        }
    }
    let n = kinds.len();
    for c in clauses {
        f.add_clause(c.iter().map(|&(v, pos)| Lit::new((v % n) as Var + 1, pos)));
    }
    f
}

fn formula(max_vars: usize) -> impl Strategy<Value = (Vec<(u8, usize)>, Vec<Vec<(usize, bool)>>)> {
    (1..=max_vars).prop_flat_map(|n| {
        (
            prop::collection::vec((0u8..3, 0usize..8), n),
            prop::collection::vec(prop::collection::vec((0..n, any::<bool>()), 1..=3), 0..2 * n),
        )
    })
}

fn opts(components: bool, cache: bool, threads: usize) -> CounterOptions {
    CounterOptions { components, cache, threads, ..CounterOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn count_matches_enumeration((kinds, clauses) in formula(12)) {
        let f = build(&kinds, &clauses, false);
        let expect = brute_force_count(&f);
        prop_assert_eq!(count(&f).count, expect.clone());
        for (c, k) in [(false, false), (true, false), (false, true)] {
            prop_assert_eq!(Counter::new(opts(c, k, 1)).count(&f).count, expect.clone());
        }
        let g = build(&kinds, &clauses, true);
        prop_assert!(count(&g).count.approx_eq(&expect, 1e-9));
    }

    #[test]
    fn max_count_matches_enumeration((kinds, clauses) in formula(10)) {
        let f = build(&kinds, &clauses, false);
        let (best, _, obj) = brute_force_max(&f, Objective::NormSq).unwrap();
        let r = max_count(&f, Objective::NormSq, None).unwrap();
        prop_assert!((r.objective - obj).abs() < 1e-9, "{} vs {}", r.objective, obj);
        if obj != 0.0 {
            // lexicographically smallest maximiser
            prop_assert_eq!(&r.best_assignment, &best);
        }
        // the reported count belongs to the reported assignment
        let mut g = f.clone();
        for (&v, &b) in &r.best_assignment {
            g.add_unit(Lit::new(v, b));
        }
        prop_assert_eq!(brute_force_count(&g), r.best_count);
    }

    #[test]
    fn signed_real_max_counts_zero_assignments((kinds, clauses) in formula(10), thr in prop::option::of(-2.0f64..2.0)) {
        // real weights of both signs: unsatisfiable selections score 0 and can win
        let kinds: Vec<(u8, usize)> = kinds.into_iter().map(|(k, w)| (k, [0, 1, 2, 6][w % 4])).collect();
        let f = build(&kinds, &clauses, false);
        let (best, _, obj) = brute_force_max(&f, Objective::Real).unwrap();
        let r = max_count(&f, Objective::Real, None).unwrap();
        prop_assert!((r.objective - obj).abs() < 1e-9, "{} vs {}", r.objective, obj);
        if obj != 0.0 {
            prop_assert_eq!(&r.best_assignment, &best);
        }
        let mut g = f.clone();
        for (&v, &b) in &r.best_assignment {
            g.add_unit(Lit::new(v, b));
        }
        prop_assert_eq!(brute_force_count(&g), r.best_count);
        let one = Counter::new(opts(true, true, 1)).max_count(&f, Objective::Real, thr).unwrap();
        let many = Counter::new(opts(true, true, 4)).max_count(&f, Objective::Real, thr).unwrap();
        prop_assert_eq!(&one.best_assignment, &many.best_assignment);
        prop_assert_eq!(one.threshold_hit, many.threshold_hit);
    }

    #[test]
    fn threads_do_not_change_the_answer((kinds, clauses) in formula(12), thr in prop::option::of(0.0f64..4.0)) {
        let f = build(&kinds, &clauses, true);
        let one = Counter::new(opts(true, true, 1)).max_count(&f, Objective::NormSq, thr).unwrap();
        let many = Counter::new(opts(true, true, 4)).max_count(&f, Objective::NormSq, thr).unwrap();
        prop_assert_eq!(&one.best_assignment, &many.best_assignment);
        prop_assert_eq!(one.objective.to_bits(), many.objective.to_bits());
        prop_assert_eq!(one.threshold_hit, many.threshold_hit);
    }

    #[test]
    fn bound_pruning_keeps_the_optimum((kinds, clauses) in formula(12)) {
        // only non-negative real weights
        let kinds: Vec<(u8, usize)> = kinds.into_iter().map(|(k, w)| (k, if w % 3 == 1 { 0 } else { [0, 2, 6, 6][w % 4] })).collect();
        let f = build(&kinds, &clauses, false);
        let plain = max_count(&f, Objective::Real, None).unwrap();
        let pruned = Counter::new(CounterOptions { upper_bound_pruning: true, ..CounterOptions::default() })
            .max_count(&f, Objective::Real, None)
            .unwrap();
        prop_assert_eq!(plain.best_count, pruned.best_count);
        prop_assert_eq!(plain.best_assignment, pruned.best_assignment);
    }
}

#[test]
fn minus_state_amplitude() {
    let mut f = WeightedCnf::new();
    let mut e = Encoder::new(Basis::CB, WeightMode::Exact);
    let q = e.new_state(&mut f, &State::Minus, 1).unwrap();
    let c = Counter::default();
    assert_eq!(c.count_under(&f, &[Lit::pos(q[0])]).count, -&Weight::inv_sqrt2_pow(1));
    assert_eq!(c.count_under(&f, &[Lit::neg(q[0])]).count, Weight::inv_sqrt2_pow(1));
    // ⟨+|−⟩ summed over both basis states
    assert!(c.count(&f).count.is_zero());
}

#[test]
fn repeated_count_hits_the_cache() {
    let mut f = WeightedCnf::new();
    let v: Vec<Var> = (0..12).map(|_| f.fresh(VarKind::State)).collect();
    for w in v.windows(3) {
        f.add_clause([Lit::pos(w[0]), Lit::neg(w[1]), Lit::pos(w[2])]);
    }
    let a = f.fresh(VarKind::Aux);
    f.set_weight(a, Weight::int(-1), Weight::one());
    f.add_iff(Lit::pos(a), Lit::pos(v[5]));
    let c = Counter::default();
    let first = c.count(&f);
    assert!(c.cache_entries() > 0);
    let second = c.count(&f);
    assert_eq!(first.count, second.count);
    assert!(second.stats.cache_hits > 0);
    assert!(second.stats.decisions < first.stats.decisions);
    assert_eq!(first.count, brute_force_count(&f));
}

#[test]
fn empty_and_trivial_formulas() {
    let f = WeightedCnf::new();
    assert_eq!(count(&f).count, Weight::one());
    let mut f = WeightedCnf::new();
    f.fresh(VarKind::State);
    f.fresh(VarKind::State);
    assert_eq!(count(&f).count, Weight::int(4));
    let x = f.fresh(VarKind::State);
    f.add_unit(Lit::pos(x));
    f.add_unit(Lit::neg(x));
    assert!(count(&f).count.is_zero());
}

#[test]
fn unsat_max_count() {
    let mut f = WeightedCnf::new();
    let p = f.fresh(VarKind::Select);
    let q = f.fresh(VarKind::State);
    f.add_unit(Lit::pos(q));
    f.add_unit(Lit::neg(q));
    let r = max_count(&f, Objective::NormSq, Some(1.0)).unwrap();
    assert_eq!(r.best_assignment, BTreeMap::from([(p, false)]));
    assert!(r.best_count.is_zero());
    assert!(!r.threshold_hit);
}

#[test]
fn ties_go_to_the_smallest_assignment() {
    let mut f = WeightedCnf::new();
    let p1 = f.fresh(VarKind::Select);
    let p2 = f.fresh(VarKind::Select);
    // exactly one of them: both choices count 1
    f.add_clause([Lit::pos(p1), Lit::pos(p2)]);
    f.add_clause([Lit::neg(p1), Lit::neg(p2)]);
    let r = max_count(&f, Objective::Real, None).unwrap();
    assert_eq!(r.best_assignment, BTreeMap::from([(p1, false), (p2, true)]));
    assert_eq!(r.objective, 1.0);
}

#[test]
fn threshold_stops_at_the_first_hit() {
    // count = (1 + p1)(1 + 2 p2) via weighted aux variables tied to the selects
    let mut f = WeightedCnf::new();
    let p1 = f.fresh(VarKind::Select);
    let p2 = f.fresh(VarKind::Select);
    for (p, w) in [(p1, 2), (p2, 3)] {
        let a = f.fresh(VarKind::Aux);
        f.set_weight(a, Weight::int(w), Weight::one());
        f.add_iff(Lit::pos(a), Lit::pos(p));
    }
    let full = max_count(&f, Objective::Real, None).unwrap();
    assert_eq!(full.best_count, Weight::int(6));
    assert_eq!(full.stats.leaves, 4);
    let r = max_count(&f, Objective::Real, Some(3.0)).unwrap();
    assert!(r.threshold_hit);
    assert_eq!(r.best_assignment, BTreeMap::from([(p1, false), (p2, true)]));
    assert_eq!(r.stats.leaves, 2);
}

#[test]
fn negative_weights_disable_bound_pruning() {
    let mut f = WeightedCnf::new();
    let ps: Vec<Var> = (0..4).map(|_| f.fresh(VarKind::Select)).collect();
    for &p in &ps {
        let a = f.fresh(VarKind::Aux);
        f.set_weight(a, Weight::int(-2), Weight::one());
        f.add_iff(Lit::pos(a), Lit::pos(p));
    }
    let c = Counter::new(CounterOptions { upper_bound_pruning: true, ..CounterOptions::default() });
    let r = c.max_count(&f, Objective::Real, None).unwrap();
    assert_eq!(r.stats.bound_prunes, 0);
    assert_eq!(r.best_count, Weight::int(16));
    assert_eq!(r.stats.leaves, 16);
}

#[test]
fn bound_pruning_fires_on_positive_weights() {
    let mut f = WeightedCnf::new();
    let ps: Vec<Var> = (0..6).map(|_| f.fresh(VarKind::Select)).collect();
    for (i, &p) in ps.iter().enumerate() {
        let a = f.fresh(VarKind::Aux);
        // the earliest selects dominate
        f.set_weight(a, Weight::int(1 << (6 - i)), Weight::one());
        f.add_iff(Lit::pos(a), Lit::neg(p));
    }
    let c = Counter::new(CounterOptions { upper_bound_pruning: true, ..CounterOptions::default() });
    let r = c.max_count(&f, Objective::Real, None).unwrap();
    assert!(r.stats.bound_prunes > 0);
    assert_eq!(r.best_assignment.values().filter(|&&b| b).count(), 0);
}

#[test]
fn real_objective_rejects_complex_counts() {
    let mut f = WeightedCnf::new();
    f.fresh(VarKind::Select);
    let a = f.fresh(VarKind::Aux);
    f.set_weight(a, Weight::omega_pow(2), Weight::one());
    f.add_unit(Lit::pos(a));
    assert!(matches!(max_count(&f, Objective::Real, None), Err(Error::ImaginaryResidue(_))));
    assert_eq!(max_count(&f, Objective::NormSq, None).unwrap().objective, 1.0);
}
