//! Depth-optimal Clifford+T circuit synthesis through maximum weighted model
//! counting.
//!
//! Circuits and unitaries are encoded as weighted CNF formulas whose weighted
//! model counts reproduce amplitudes (computational basis) or Pauli
//! conjugation coefficients (Pauli basis). Equivalence checking, fidelity and
//! synthesis then reduce to counting, and synthesis to a Max#SAT query over
//! gate-selecting variables.

pub mod circuit;
pub mod cnf;
pub mod counter;
pub mod encoder;
pub mod equivalence;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod state;
pub mod synthesis;
pub mod weights;

pub use circuit::{Circuit, Gate, GateKind, Layer, Operator, Unitary};
pub use cnf::{Clause, Lit, Var, VarKind, WeightedCnf};
pub use counter::{Counter, CounterOptions, Objective};
pub use encoder::{Basis, Encoder, WeightMode};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use pauli::{Pauli, PauliString};
pub use state::State;
pub use weights::{ExactW, Scalar, Weight};
