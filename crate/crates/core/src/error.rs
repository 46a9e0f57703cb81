use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix rank deficient: expected {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("terms {i} and {j} do not commute")]
    NonCommutingPair { i: usize, j: usize },
    #[error("operator fails to commute with stabilizer row {index}")]
    NonCommutingStabilizer { index: usize },
    #[error("coefficient {index} is not a negative real weight (got {value})")]
    InvalidWeight { index: usize, value: num_complex::Complex64 },
    #[error("stabilizer set over-complete: {given} rows exceed {nqubits} qubits")]
    OverComplete { given: usize, nqubits: usize },
    #[error("term cap exceeded at order {order}: {count} terms > cap {cap}")]
    TermCapExceeded { order: usize, count: usize, cap: usize },
    #[error("generator orders 1..{needed} required, only {available} available")]
    MissingOrders { needed: usize, available: usize },
    #[error("translation groups differ between operands")]
    GroupMismatch,
    #[error("dense oracle supports at most {cap} qubits, got {n}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("{0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
