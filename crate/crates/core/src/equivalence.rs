//! Equivalence checking and Jamiołkowski fidelity by model counting.
//!
//! Both reduce to the operator `C = C₂·C₁†`, which is the identity up to a
//! global phase exactly when `C₁` and `C₂` are equivalent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Operator};
use crate::cnf::{Lit, Var, VarKind, WeightedCnf};
use crate::counter::Counter;
use crate::encoder::{natural_mode, Basis, Encoder};
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::weights::{pow2, Weight};

/// Score tolerance for float-mode verdicts.
pub const FLOAT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "basis")]
pub enum EqEncoding {
    /// One count per generator `X_j`, `Z_j`; each must be 1. Pauli basis.
    Linear,
    /// Overlap with the identity: `C ∧ (q ⇔ q')`.
    Cyclic(Basis),
    /// The generator counts summed in one formula; must equal `2n`. Pauli
    /// basis.
    LinearCyclic,
}

impl EqEncoding {
    pub fn basis(self) -> Basis {
        match self {
            EqEncoding::Cyclic(b) => b,
            _ => Basis::PB,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EqEncoding::Linear => "linear",
            EqEncoding::Cyclic(_) => "cyclic",
            EqEncoding::LinearCyclic => "linear-cyclic",
        }
    }
}

impl fmt::Display for EqEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqEncoding::Cyclic(b) => write!(f, "cyclic-{b}"),
            e => f.write_str(e.name()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EqVerdict {
    pub equivalent: bool,
    /// Normalised to `[0, 1]`; 1 means equivalent.
    pub score: f64,
    /// The raw count; for [`EqEncoding::Linear`] the sum of the counts.
    pub raw: Weight,
    /// Per-generator counts of the linear encoding, in `X_0 Z_0 X_1 …` order.
    pub counts: Vec<Weight>,
    /// Set when the computational-basis trace is not a positive real, i.e.
    /// the operators differ by a non-trivial global phase.
    pub global_phase_note: bool,
}

#[derive(Clone, Debug)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub raw: Weight,
}

/// `C₂·C₁†` as one circuit.
pub fn difference_circuit(c1: &Operator, c2: &Operator) -> Result<Circuit> {
    if c1.num_qubits() != c2.num_qubits() {
        return Err(Error::WidthMismatch(c1.num_qubits(), c2.num_qubits()));
    }
    c1.dagger_circuit().then(&c2.as_circuit())
}

/// The encoding of `c` with input and output registers.
fn encode(c: &Circuit, basis: Basis) -> Result<(WeightedCnf, Encoder, Vec<Var>, Vec<Var>)> {
    let mut e = Encoder::new(basis, natural_mode([c]));
    let mut f = WeightedCnf::new();
    let (ins, outs) = e.encode_circuit_fresh(&mut f, c)?;
    Ok((f, e, ins, outs))
}

/// Formula for the cyclic encoding: the circuit with its ends identified.
pub fn cyclic_formula(c: &Circuit, basis: Basis) -> Result<WeightedCnf> {
    let (mut f, e, ins, outs) = encode(c, basis)?;
    e.add_register_iff(&mut f, &ins, &outs);
    Ok(f)
}

/// Formula for the linear-cyclic encoding: the cyclic formula with the
/// input restricted to one generator, chosen by a one-hot selector block.
pub fn linear_cyclic_formula(c: &Circuit) -> Result<WeightedCnf> {
    let n = c.num_qubits();
    let (mut f, e, ins, outs) = encode(c, Basis::PB)?;
    e.add_register_iff(&mut f, &ins, &outs);
    add_generator_disjunction(&mut f, &ins, n);
    Ok(f)
}

/// `⋁_P (reg = P)` over the generators `X_j`, `Z_j`, through unbiased
/// one-hot selector variables.
pub(crate) fn add_generator_disjunction(f: &mut WeightedCnf, reg: &[Var], n: usize) {
    let gens = PauliString::generators(n);
    let sel: Vec<Var> = gens.iter().map(|_| f.fresh(VarKind::Aux)).collect();
    f.add_exactly_one(&sel);
    for (s, p) in sel.iter().zip(&gens) {
        for (i, l) in p.0.iter().enumerate() {
            let (x, z) = l.bits();
            f.add_clause([Lit::neg(*s), Lit::new(reg[2 * i], x)]);
            f.add_clause([Lit::neg(*s), Lit::new(reg[2 * i + 1], z)]);
        }
    }
}

fn four_pow(n: usize) -> Weight {
    pow2(2 * n as i32)
}

fn real(w: &Weight) -> f64 {
    w.to_complex().re
}

/// Checks whether `c2` implements `c1` up to a global phase.
pub fn check_equiv(c1: &Operator, c2: &Operator, enc: EqEncoding, counter: &Counter) -> Result<EqVerdict> {
    let c = difference_circuit(c1, c2)?;
    let n = c.num_qubits();
    let verdict = |raw: Weight, score: f64, target_hit: Option<bool>, counts: Vec<Weight>, note: bool| {
        let equivalent = target_hit.unwrap_or(score >= 1.0 - FLOAT_TOL);
        EqVerdict { equivalent, score, raw, counts, global_phase_note: note }
    };
    match enc {
        EqEncoding::Linear => {
            let (f, e, ins, outs) = encode(&c, Basis::PB)?;
            let mut counts = Vec::new();
            for p in PauliString::generators(n) {
                let mut g = f.clone();
                e.select_pauli(&mut g, &p, &ins)?;
                e.select_pauli(&mut g, &p, &outs)?;
                counts.push(counter.count(&g).count);
            }
            let raw = counts.iter().fold(Weight::zero(), |a, b| &a + b);
            let score = counts.iter().map(real).sum::<f64>() / (2 * n) as f64;
            let exact = counts.iter().all(Weight::is_exact).then(|| counts.iter().all(|w| *w == Weight::one()));
            let all_one = counts.iter().all(|w| (real(w) - 1.0).abs() <= FLOAT_TOL && w.to_complex().im.abs() <= FLOAT_TOL);
            Ok(verdict(raw, score, Some(exact.unwrap_or(all_one)), counts, false))
        }
        EqEncoding::Cyclic(basis) => {
            let raw = counter.count(&cyclic_formula(&c, basis)?).count;
            let target = four_pow(n);
            let (score, hit, note) = match basis {
                Basis::PB => (real(&raw) / real(&target), raw.is_exact().then(|| raw == target), false),
                Basis::CB => {
                    let z = raw.to_complex();
                    let note = z.norm() > 1e-12 && (z.im.abs() > 1e-9 * z.norm() || z.re < 0.0);
                    (z.norm_sqr() / real(&target), raw.is_exact().then(|| raw.norm_sq() == target), note)
                }
            };
            Ok(verdict(raw, score, hit, Vec::new(), note))
        }
        EqEncoding::LinearCyclic => {
            let raw = counter.count(&linear_cyclic_formula(&c)?).count;
            let target = Weight::int(2 * n as i64);
            let score = real(&raw) / (2 * n) as f64;
            let hit = raw.is_exact().then(|| raw == target);
            Ok(verdict(raw, score, hit, Vec::new(), false))
        }
    }
}

/// `|tr(U†V)|² / 4^n`: the cyclic count divided by `4^n` in the Pauli
/// basis, or its squared modulus divided by `4^n` in the computational one.
pub fn fidelity(u: &Operator, v: &Operator, basis: Basis, counter: &Counter) -> Result<FidelityResult> {
    let c = difference_circuit(u, v)?;
    let raw = counter.count(&cyclic_formula(&c, basis)?).count;
    let norm = real(&four_pow(c.num_qubits()));
    let fidelity = match basis {
        Basis::PB => real(&raw) / norm,
        Basis::CB => raw.to_complex().norm_sqr() / norm,
    };
    Ok(FidelityResult { fidelity, raw })
}
