//! Seeded random benchmark circuits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind, Operator};
use crate::encoder::Basis;
use crate::error::{Error, Result};
use crate::oracle;

use super::{synthesize, GateSetSpec, SynEncoding, SynMode, SynthesisProblem};

/// Resampling budget for the irreducibility filter.
pub const MAX_ATTEMPTS: usize = 1000;

/// One random circuit: every layer covers all qubits with uniformly chosen
/// non-identity gates. Qubits are visited in random order; a two-qubit
/// gate takes a second, uniformly chosen, still-free qubit.
pub fn random_circuit(n: usize, d: usize, gs: &GateSetSpec, rng: &mut impl Rng) -> Result<Circuit> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("benchmarks need n ≥ 1 and d ≥ 1".into()));
    }
    let ones: Vec<&GateKind> = gs.single().iter().skip(1).collect();
    let twos: Vec<&GateKind> = gs.two().iter().collect();
    if ones.is_empty() && (twos.is_empty() || n < 2) {
        return Err(Error::InvalidArgument(format!("gate set {gs} has no usable non-identity gate")));
    }
    let mut c = Circuit::new(n);
    for _ in 0..d {
        let mut free: Vec<usize> = (0..n).collect();
        let mut layer = Vec::new();
        while !free.is_empty() {
            let i = free.swap_remove(rng.gen_range(0..free.len()));
            let usable_two = if free.is_empty() { 0 } else { twos.len() };
            if ones.len() + usable_two == 0 {
                // a lone qubit with only two-qubit gates available stays idle
                continue;
            }
            let k = rng.gen_range(0..ones.len() + usable_two);
            if k < ones.len() {
                layer.push(Gate::single(ones[k].clone(), i));
            } else {
                let j = free.swap_remove(rng.gen_range(0..free.len()));
                let mut pair = [i, j];
                pair.shuffle(rng);
                layer.push(Gate::new(twos[k - ones.len()].clone(), pair.to_vec())?);
            }
        }
        c.push_layer(layer)?;
    }
    Ok(c)
}

/// True when no circuit over `gs` of depth below `c.depth()` implements
/// `c` up to a global phase.
pub fn is_irreducible(c: &Circuit, gs: &GateSetSpec) -> Result<bool> {
    let u = oracle::circuit_unitary(c);
    if oracle::equal_up_to_phase(&u, &oracle::circuit_unitary(&Circuit::new(c.num_qubits())), 1e-9) {
        return Ok(false);
    }
    if c.depth() <= 1 {
        return Ok(true);
    }
    let p = SynthesisProblem {
        max_depth: c.depth() - 1,
        ..SynthesisProblem::new(Operator::Circuit(c.clone()), gs.clone(), Basis::PB, SynEncoding::Cyclic, SynMode::Exact)
    };
    Ok(!synthesize(&p)?.found)
}

/// A deterministic random circuit for `seed`. With `irreducible`, samples
/// are drawn from the same stream until one cannot be synthesized at a
/// smaller depth.
pub fn gen_random_benchmark(n: usize, d: usize, gs: &GateSetSpec, seed: u64, irreducible: bool) -> Result<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let c = random_circuit(n, d, gs, &mut rng)?;
        if !irreducible || is_irreducible(&c, gs)? {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument(format!("no irreducible circuit found in {MAX_ATTEMPTS} samples (n={n}, d={d}, seed={seed})")))
}
