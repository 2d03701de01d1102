//! Depth-optimal synthesis: for `d = 1, 2, …` build the formula
//! `Syn = F_{spec†} ∧ L¹ ∧ … ∧ Lᵈ ∧ (q ⇔ qᵈ)` of gated layers and ask the
//! Max#SAT counter for the select assignment maximising the overlap with
//! the identity. The first depth whose optimum reaches the target is
//! optimal, since every smaller depth has been refuted.

mod bench;
mod layer;
mod rules;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Operator};
use crate::cnf::{Var, WeightedCnf};
use crate::counter::{Counter, CounterOptions, Objective, Stats};
use crate::encoder::{natural_mode, Basis, Encoder, WeightMode};
use crate::equivalence::add_generator_disjunction;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::oracle;
use crate::weights::Weight;

pub use bench::{gen_random_benchmark, is_irreducible, random_circuit};
pub use layer::{build_layer_template, decode_circuit, encode_selection, fix_selection, GateSetSpec, LayerTemplate};
pub use rules::{add_pruning_rules, Rules};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynEncoding {
    Cyclic,
    /// Pauli basis only; exact synthesis only.
    LinearCyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynMode {
    Exact,
    /// Accept Jamiołkowski fidelity `≥ 1 − ε`.
    Approx(f64),
}

/// Tolerance of the oracle check on returned circuits.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    pub spec: Operator,
    pub gate_set: GateSetSpec,
    pub basis: Basis,
    pub encoding: SynEncoding,
    pub mode: SynMode,
    pub min_depth: usize,
    pub max_depth: usize,
    pub rules: Rules,
    pub counter: CounterOptions,
    /// Each depth's formula is written to `<prefix>.d<depth>.wcnf`.
    pub dump_cnf: Option<PathBuf>,
}

impl SynthesisProblem {
    pub fn new(spec: Operator, gate_set: GateSetSpec, basis: Basis, encoding: SynEncoding, mode: SynMode) -> Self {
        SynthesisProblem {
            spec,
            gate_set,
            basis,
            encoding,
            mode,
            min_depth: 1,
            max_depth: 8,
            rules: Rules::all(),
            counter: CounterOptions::default(),
            dump_cnf: None,
        }
    }

    fn num_qubits(&self) -> usize {
        self.spec.num_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        if self.encoding == SynEncoding::LinearCyclic && self.basis != Basis::PB {
            return Err(Error::Unsupported("linear-cyclic encoding".into(), self.basis.name()));
        }
        if let SynMode::Approx(eps) = self.mode {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::InvalidArgument(format!("ε = {eps} outside (0, 1]")));
            }
            if self.encoding == SynEncoding::LinearCyclic {
                return Err(Error::InvalidArgument("the linear-cyclic encoding supports exact synthesis only".into()));
            }
        }
        if matches!(self.spec, Operator::Unitary(_)) && self.basis == Basis::PB {
            return Err(Error::Unsupported("unitary specification".into(), "PB"));
        }
        if self.max_depth == 0 || self.min_depth == 0 || self.min_depth > self.max_depth {
            return Err(Error::InvalidArgument(format!("depth range {}..={}", self.min_depth, self.max_depth)));
        }
        Ok(())
    }

    pub fn objective(&self) -> Objective {
        match self.basis {
            Basis::PB => Objective::Real,
            Basis::CB => Objective::NormSq,
        }
    }

    /// Objective value that counts as success.
    pub fn threshold(&self) -> f64 {
        let n = self.num_qubits();
        let full = 4f64.powi(n as i32);
        match (self.encoding, self.mode) {
            (SynEncoding::LinearCyclic, _) => (2 * n) as f64,
            (SynEncoding::Cyclic, SynMode::Exact) => full,
            (SynEncoding::Cyclic, SynMode::Approx(eps)) => (1.0 - eps) * full,
        }
    }

    /// Objective scaled to `[0, 1]`.
    pub fn normalize(&self, objective: f64) -> f64 {
        let n = self.num_qubits();
        match self.encoding {
            SynEncoding::LinearCyclic => objective / (2 * n) as f64,
            SynEncoding::Cyclic => objective / 4f64.powi(n as i32),
        }
    }
}

/// The synthesis formula at depth `d` with its layer templates.
pub fn build_syn_formula(
    spec: &Operator,
    gs: &GateSetSpec,
    basis: Basis,
    enc: SynEncoding,
    d: usize,
) -> Result<(WeightedCnf, Vec<LayerTemplate>)> {
    if d == 0 {
        return Err(Error::InvalidArgument("synthesis depth must be at least 1".into()));
    }
    if enc == SynEncoding::LinearCyclic && basis != Basis::PB {
        return Err(Error::Unsupported("linear-cyclic encoding".into(), basis.name()));
    }
    let n = spec.num_qubits();
    let dagger = spec.dagger_circuit();
    let mode = match natural_mode([&dagger]) {
        WeightMode::Exact if gs.is_exact() => WeightMode::Exact,
        _ => WeightMode::Float,
    };
    let mut e = Encoder::new(basis, mode);
    let mut f = WeightedCnf::new();
    let q = e.register(&mut f, n);
    let mut cur = e.encode_circuit(&mut f, &dagger, &q)?;
    let mut templates = Vec::with_capacity(d);
    for t in 0..d {
        let l = layer::add_layer(&mut f, &mut e, gs, &cur, t)?;
        cur = l.q_out.clone();
        templates.push(l);
    }
    e.add_register_iff(&mut f, &q, &cur);
    if enc == SynEncoding::LinearCyclic {
        add_generator_disjunction(&mut f, &q, n);
    }
    Ok((f, templates))
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthLog {
    pub depth: usize,
    /// Best objective: the real count in the Pauli basis, `|c|²` in the
    /// computational basis.
    pub score_raw: f64,
    pub score_norm: f64,
    /// `|c| / 2^n`, reported for the computational basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_abs_norm: Option<f64>,
    /// The best count itself.
    pub count: String,
    pub threshold_hit: bool,
    pub elapsed_ms: u64,
    pub cnf_vars: usize,
    pub cnf_clauses: usize,
    pub select_vars: usize,
    pub stats: Stats,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub found: bool,
    pub circuit: Option<Circuit>,
    pub depth: Option<usize>,
    /// Normalised score of the returned (or, if none, the last) depth.
    pub score: f64,
    pub raw: Weight,
    /// Oracle Jamiołkowski fidelity of the returned circuit.
    pub fidelity: Option<f64>,
    pub log: Vec<DepthLog>,
}

pub fn synthesize(p: &SynthesisProblem) -> Result<SynthesisResult> {
    synthesize_with(p, &Counter::new(p.counter.clone()), |_| {})
}

/// Runs the depth loop with a caller-supplied counter; `on_depth` sees each
/// depth's log entry as soon as it is done.
pub fn synthesize_with(p: &SynthesisProblem, counter: &Counter, mut on_depth: impl FnMut(&DepthLog)) -> Result<SynthesisResult> {
    p.validate()?;
    let n = p.num_qubits();
    let spec_u = oracle::operator_unitary(&p.spec);
    let mut log = Vec::new();
    let mut last = (0.0, Weight::zero());
    for d in p.min_depth..=p.max_depth {
        let start = Instant::now();
        let (mut f, templates) = build_syn_formula(&p.spec, &p.gate_set, p.basis, p.encoding, d)?;
        add_pruning_rules(&mut f, &templates, &p.gate_set, p.rules);
        if let Some(prefix) = &p.dump_cnf {
            let path = PathBuf::from(format!("{}.d{d}.wcnf", prefix.display()));
            f.write_wcnf(BufWriter::new(File::create(path)?))?;
        }
        let r = counter.max_count(&f, p.objective(), Some(p.threshold()))?;
        let score_norm = p.normalize(r.objective);
        let entry = DepthLog {
            depth: d,
            score_raw: r.objective,
            score_norm,
            score_abs_norm: (p.basis == Basis::CB).then(|| r.best_count.abs() / 2f64.powi(n as i32)),
            count: r.best_count.to_string(),
            threshold_hit: r.threshold_hit,
            elapsed_ms: start.elapsed().as_millis() as u64,
            cnf_vars: f.num_vars(),
            cnf_clauses: f.num_clauses(),
            select_vars: templates.iter().map(|t| t.select_vars().len()).sum(),
            stats: r.stats.clone(),
        };
        on_depth(&entry);
        log.push(entry);
        last = (score_norm, r.best_count.clone());
        if !r.threshold_hit {
            continue;
        }
        let circuit = decode_circuit(&r.best_assignment, &templates, &p.gate_set)?;
        let fid = verify(p, &spec_u, &circuit)?;
        return Ok(SynthesisResult {
            found: true,
            circuit: Some(circuit),
            depth: Some(d),
            score: score_norm,
            raw: r.best_count,
            fidelity: Some(fid),
            log,
        });
    }
    Ok(SynthesisResult { found: false, circuit: None, depth: None, score: last.0, raw: last.1, fidelity: None, log })
}

/// Oracle check of a decoded circuit; a mismatch is a soundness failure.
fn verify(p: &SynthesisProblem, spec_u: &Matrix<Complex64>, c: &Circuit) -> Result<f64> {
    let u = oracle::circuit_unitary(c);
    let fid = oracle::jamiolkowski_fidelity(spec_u, &u);
    let ok = match p.mode {
        SynMode::Exact => oracle::equal_up_to_phase(spec_u, &u, ORACLE_TOL),
        SynMode::Approx(eps) => fid >= 1.0 - eps - ORACLE_TOL,
    };
    if !ok {
        return Err(Error::Soundness(format!("decoded circuit has oracle fidelity {fid}:\n{c}")));
    }
    Ok(fid)
}

/// Select variables of all templates in id order.
pub fn select_vars(templates: &[LayerTemplate]) -> Vec<Var> {
    templates.iter().flat_map(LayerTemplate::select_vars).collect()
}
