//! Command results in the text and JSON output formats. The JSON shapes
//! are documented in `docs/json-output.md`.

use std::fmt::Write;
use std::path::PathBuf;

use countsyn::counter::Stats;
use countsyn::synthesis::DepthLog;
use countsyn::Weight;
use serde::Serialize;

/// A count as JSON: complex value, modulus, and the exact ring element
/// `a,b,c,d,k` for `(a + bω + cω² + dω³)/√2^k` when the count is exact.
#[derive(Debug, Serialize)]
pub struct WeightJson {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub exact: Option<String>,
}

impl From<&Weight> for WeightJson {
    fn from(w: &Weight) -> Self {
        let z = w.to_complex();
        WeightJson { re: z.re, im: z.im, abs: z.norm(), exact: w.as_exact().map(|e| e.to_tuple_string()) }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Synth {
        basis: &'static str,
        encoding: &'static str,
        mode: &'static str,
        eps: Option<f64>,
        rules: String,
        gates: String,
        found: bool,
        depth: Option<usize>,
        circuit: Option<String>,
        /// Normalised score of the returned depth, or of the last one tried.
        score: f64,
        raw: WeightJson,
        fidelity: Option<f64>,
        log: Vec<DepthLog>,
    },
    CheckEq {
        encoding: String,
        equivalent: bool,
        score: f64,
        raw: WeightJson,
        counts: Vec<WeightJson>,
        global_phase_note: bool,
    },
    Fidelity {
        basis: &'static str,
        fidelity: f64,
        raw: WeightJson,
    },
    Count {
        vars: usize,
        clauses: usize,
        count: WeightJson,
        stats: Stats,
    },
    Bench {
        qubits: usize,
        depth: usize,
        seed: u64,
        irreducible: bool,
        gates: String,
        circuit: String,
        path: Option<PathBuf>,
    },
}

fn show(w: &WeightJson) -> String {
    match &w.exact {
        Some(e) => format!("{:.6}{:+.6}i (exact {e})", w.re, w.im),
        None => format!("{:.6}{:+.6}i", w.re, w.im),
    }
}

impl Report {
    /// False for negative verdicts, which exit with code 2.
    pub fn success(&self) -> bool {
        match self {
            Report::Synth { found, .. } => *found,
            Report::CheckEq { equivalent, .. } => *equivalent,
            _ => true,
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Synth { found, depth, circuit, score, raw, fidelity, log, .. } => {
                if let (true, Some(c), Some(d)) = (found, circuit, depth) {
                    s.push_str(c);
                    let _ = writeln!(s, "# depth {d}, score {score:.6}, fidelity {:.6}", fidelity.unwrap_or(f64::NAN));
                    let _ = writeln!(s, "# raw {}", show(raw));
                } else {
                    let last = log.last().map_or(0, |l| l.depth);
                    let _ = writeln!(s, "not found up to depth {last}; best score {score:.6}");
                }
            }
            Report::CheckEq { encoding, equivalent, score, raw, counts, global_phase_note } => {
                let _ = writeln!(s, "{}", if *equivalent { "equivalent" } else { "not equivalent" });
                let _ = writeln!(s, "encoding {encoding}, score {score:.6}, |raw| {:.6}", raw.abs);
                let _ = writeln!(s, "raw {}", show(raw));
                for (i, c) in counts.iter().enumerate() {
                    let _ = writeln!(s, "{}_{} {}", if i % 2 == 0 { "X" } else { "Z" }, i / 2, show(c));
                }
                if *global_phase_note {
                    s.push_str("note: the operators differ by a non-trivial global phase\n");
                }
            }
            Report::Fidelity { basis, fidelity, raw } => {
                let _ = writeln!(s, "fidelity {fidelity:.9} ({basis})");
                let _ = writeln!(s, "raw {}", show(raw));
            }
            Report::Count { vars, clauses, count, stats } => {
                let _ = writeln!(s, "count {}", show(count));
                let _ = writeln!(
                    s,
                    "{vars} vars, {clauses} clauses, {} decisions, {} cache hits, {} ms",
                    stats.decisions, stats.cache_hits, stats.elapsed_ms
                );
            }
            Report::Bench { circuit, path, .. } => match path {
                Some(p) => {
                    let _ = writeln!(s, "wrote {}", p.display());
                }
                None => s.push_str(circuit),
            },
        }
        s
    }
}

pub fn depth_line(l: &DepthLog) -> String {
    format!(
        "depth {}: score {:.6} (raw {:.6}){} in {} ms, {} vars, {} clauses, {} selectors",
        l.depth,
        l.score_norm,
        l.score_raw,
        if l.threshold_hit { ", target reached" } else { "" },
        l.elapsed_ms,
        l.cnf_vars,
        l.cnf_clauses,
        l.select_vars
    )
}

pub fn error_json(e: &anyhow::Error) -> String {
    serde_json::json!({ "error": format!("{e:#}") }).to_string()
}
