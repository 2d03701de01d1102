//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use countsyn::equivalence::cyclic_formula;
use countsyn::synthesis::{gen_random_benchmark, GateSetSpec, SynEncoding, SynMode, SynthesisProblem};
use countsyn::{Basis, Circuit, GateKind, Operator, WeightedCnf};

/// A seeded random circuit over `{H, T, Tdg, CX}` with full layers.
pub fn circuit(n: usize, d: usize, seed: u64) -> Circuit {
    gen_random_benchmark(n, d, &GateSetSpec::default(), seed, false).expect("valid benchmark shape")
}

/// The overlap formula `C ∧ (q ⇔ q')` of a random circuit.
pub fn trace_formula(n: usize, d: usize, basis: Basis, seed: u64) -> WeightedCnf {
    cyclic_formula(&circuit(n, d, seed), basis).expect("encodable circuit")
}

/// `S` with the linear-cyclic encoding: optimum at depth 2.
pub fn s_gate() -> SynthesisProblem {
    let spec = Operator::Circuit(Circuit::sequence(&[GateKind::S]));
    SynthesisProblem::new(spec, GateSetSpec::default(), Basis::PB, SynEncoding::LinearCyclic, SynMode::Exact)
}

/// `RZ(π/8)` to fidelity 0.95: `T` at depth 1.
pub fn rz_approx() -> SynthesisProblem {
    let spec = Operator::Circuit(Circuit::sequence(&[GateKind::RZ(PI / 8.0)]));
    SynthesisProblem::new(spec, GateSetSpec::default(), Basis::PB, SynEncoding::Cyclic, SynMode::Approx(0.05))
}

/// Exact synthesis of a random two-qubit circuit of depth `d`.
pub fn two_qubit(d: usize, seed: u64) -> SynthesisProblem {
    let spec = Operator::Circuit(circuit(2, d, seed));
    SynthesisProblem { max_depth: d, ..SynthesisProblem::new(spec, GateSetSpec::default(), Basis::PB, SynEncoding::Cyclic, SynMode::Exact) }
}
