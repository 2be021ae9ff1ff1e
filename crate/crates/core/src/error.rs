use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScpsError {
    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),
    #[error("infeasible arc: {0}")]
    InfeasibleArc(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("size cap exceeded: {what} is {actual}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ScpsError>;
