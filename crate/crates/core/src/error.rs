use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid job (u={u}, t={t}, p={p}): {reason}")]
    InvalidJob {
        u: f64,
        t: f64,
        p: f64,
        reason: &'static str,
    },
    #[error("machine count must be at least {min}, got {got}")]
    TooFewMachines { min: usize, got: usize },
    #[error("number of components must be at least 1")]
    NoComponents,
    #[error("component index {index} out of range (0..={max})")]
    ComponentIndex { index: usize, max: usize },
    #[error("job {job} placed on machine {machine}, but only {m} machines exist")]
    MachineOutOfRange { job: usize, machine: usize, m: usize },
    #[error("expected {expected} decisions, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("instance too large for exact solve: {jobs} jobs exceeds cap {cap}")]
    ExactSolveCap { jobs: usize, cap: usize },
    #[error("enumeration cap exceeded: {jobs} jobs exceeds cap {cap}")]
    EnumerationCap { jobs: usize, cap: usize },
    #[error("invalid randomized family: {0}")]
    InvalidFamily(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
