use thiserror::Error;

#[derive(Debug, Error)]
pub enum CapsymError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty domain: the outer region and the obstacle complement do not intersect")]
    EmptyDomain,
    #[error("domain is disconnected ({0} components)")]
    DisconnectedDomain(usize),
    #[error("under-resolved obstacle: {0}")]
    UnderResolved(String),
    #[error("gauge of Obstacle kind evaluated without a drift field")]
    MissingDrift,
    #[error("drift magnitude {0} >= 1; gauge positivity fails")]
    DriftTooLarge(f64),
    #[error("incompatible all-Neumann data: boundary flux defect {0:.3e}")]
    FluxDefect(f64),
    #[error("solver did not converge: {0}")]
    SolverDiverged(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CapsymError>;
