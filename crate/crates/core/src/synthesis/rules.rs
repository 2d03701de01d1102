//! Symmetry-breaking clauses over the select variables of consecutive
//! layers. None of them removes every circuit of a given unitary and depth,
//! so the optimal depth is unchanged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::GateKind;
use crate::cnf::{Lit, Var, WeightedCnf};
use crate::error::{Error, Result};

use super::layer::{GateSetSpec, LayerTemplate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rules {
    /// No `H H` on a qubit.
    pub r1: bool,
    /// No eight consecutive `T` on a qubit.
    pub r2: bool,
    /// No `CX_{i,j} CX_{i,j}`.
    pub r3: bool,
    /// After `I` only `I` or a two-qubit gate on that qubit.
    pub r4: bool,
    /// No two-qubit gate after `I` on both of its qubits.
    pub r5: bool,
    /// Extends R2 to windows of eight `T`/`Tdg` whose net power is a
    /// multiple of eight.
    pub r2_signed: bool,
}

impl Rules {
    pub fn all() -> Rules {
        Rules { r1: true, r2: true, r3: true, r4: true, r5: true, r2_signed: false }
    }

    pub fn none() -> Rules {
        Rules { r1: false, r2: false, r3: false, r4: false, r5: false, r2_signed: false }
    }
}

impl Default for Rules {
    fn default() -> Self {
        Rules::all()
    }
}

impl fmt::Display for Rules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<&str> = [
            (self.r1, "1"),
            (self.r2, "2"),
            (self.r3, "3"),
            (self.r4, "4"),
            (self.r5, "5"),
            (self.r2_signed, "2s"),
        ]
        .iter()
        .filter(|(b, _)| *b)
        .map(|(_, s)| *s)
        .collect();
        if on.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&on.join(","))
        }
    }
}

/// `none`, `all`, or a comma list of rule numbers such as `1,2,3` (`2s`
/// for the signed variant of rule 2).
impl FromStr for Rules {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rules> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "" => return Ok(Rules::none()),
            "all" => return Ok(Rules::all()),
            _ => {}
        }
        let mut r = Rules::none();
        for t in s.split(',').map(|t| t.trim().trim_start_matches(['r', 'R'])) {
            match t {
                "1" => r.r1 = true,
                "2" => r.r2 = true,
                "2s" => r.r2_signed = true,
                "3" => r.r3 = true,
                "4" => r.r4 = true,
                "5" => r.r5 = true,
                _ => return Err(Error::InvalidArgument(format!("unknown pruning rule `{t}`"))),
            }
        }
        Ok(r)
    }
}

fn single(t: &LayerTemplate, gs: &GateSetSpec, g: &GateKind, i: usize) -> Option<Var> {
    gs.single_index(g).map(|k| t.single[i][k])
}

/// Adds the enabled rule clauses over `templates` (consecutive layers).
/// Returns the number of clauses added.
pub fn add_pruning_rules(f: &mut WeightedCnf, templates: &[LayerTemplate], gs: &GateSetSpec, rules: Rules) -> usize {
    let before = f.num_clauses();
    let n = templates.first().map_or(0, |t| t.n);
    let cx = gs.two_index(&GateKind::CX);
    for w in templates.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for i in 0..n {
            if rules.r1 {
                if let (Some(x), Some(y)) = (single(a, gs, &GateKind::H, i), single(b, gs, &GateKind::H, i)) {
                    f.add_clause([Lit::neg(x), Lit::neg(y)]);
                }
            }
            if rules.r4 {
                // p_I^k ⇒ p_I^{k+1} ∨ (CX touching i at k+1)
                let mut c = vec![Lit::neg(a.single[i][0]), Lit::pos(b.single[i][0])];
                if let Some(k) = cx {
                    for (&(x, y), sel) in &b.two {
                        if x == i || y == i {
                            c.push(Lit::pos(sel[k]));
                        }
                    }
                }
                f.add_clause(c);
            }
        }
        if let Some(k) = cx {
            for (&(i, j), sel) in &b.two {
                if rules.r3 {
                    f.add_clause([Lit::neg(a.two[&(i, j)][k]), Lit::neg(sel[k])]);
                }
                if rules.r5 {
                    f.add_clause([Lit::neg(sel[k]), Lit::neg(a.single[i][0]), Lit::neg(a.single[j][0])]);
                }
            }
        }
    }
    if rules.r2 || rules.r2_signed {
        add_t_windows(f, templates, gs, rules);
    }
    f.num_clauses() - before
}

fn add_t_windows(f: &mut WeightedCnf, templates: &[LayerTemplate], gs: &GateSetSpec, rules: Rules) {
    let n = templates.first().map_or(0, |t| t.n);
    for w in templates.windows(8) {
        for i in 0..n {
            let t: Option<Vec<Var>> = w.iter().map(|l| single(l, gs, &GateKind::T, i)).collect();
            let td: Option<Vec<Var>> = w.iter().map(|l| single(l, gs, &GateKind::Tdg, i)).collect();
            if rules.r2 {
                if let Some(t) = &t {
                    f.add_clause(t.iter().map(|&v| Lit::neg(v)));
                }
            }
            if rules.r2_signed {
                let (Some(t), Some(td)) = (&t, &td) else { continue };
                // every sign pattern with net power ≡ 0 (mod 8): 8 T, 8 Tdg, or 4 of each
                for mask in 0u32..256 {
                    let ups = mask.count_ones() as i32;
                    if (2 * ups - 8).rem_euclid(8) != 0 {
                        continue;
                    }
                    f.add_clause((0..8).map(|j| Lit::neg(if mask >> j & 1 == 1 { t[j] } else { td[j] })));
                }
            }
        }
    }
}
