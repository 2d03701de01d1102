use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed weight `{0}`")]
    WeightSyntax(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not supported in the {1} basis")]
    Unsupported(String, &'static str),
    #[error("qubit count mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("select assignment violates exactly-one on qubit {qubit} at depth {depth}")]
    ExoViolation { depth: usize, qubit: usize },
    #[error("count has imaginary residue {0:e}; expected a real count")]
    ImaginaryResidue(f64),
    #[error("soundness failure: {0}")]
    Soundness(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
