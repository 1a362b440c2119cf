use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    DuplicateQubit(usize),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{n} qubits exceeds the limit of {max} for this oracle")]
    SizeLimit { n: usize, max: usize },

    #[error("gates act outside the first {region} qubits")]
    SupportOutsideRegion { region: usize },

    #[error("fit window error: {0}")]
    FitWindow(String),

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
}
