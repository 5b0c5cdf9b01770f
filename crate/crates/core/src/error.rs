use thiserror::Error;

/// Errors raised by the solver, diagnostics and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size mismatch: expected n = {expected}, got n = {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid grid resolution {0}: n must be even and at least 8")]
    InvalidResolution(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("CFL violation: dt = {dt}, CFL number {cfl} exceeds limit {limit}")]
    Cfl { dt: f64, cfl: f64, limit: f64 },

    #[error("instability guard tripped at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("empty mask: the region contains no lattice points")]
    EmptyMask,

    #[error("window [{start}, {end}] lies outside the sampled range [{first}, {last}]")]
    WindowOutsideSamples { start: f64, end: f64, first: f64, last: f64 },

    #[error("sampling too sparse: {0}")]
    TooSparse(String),

    #[error("degenerate quantity: {0}")]
    Degenerate(String),

    #[error("infeasible exponents: {0}")]
    Infeasible(String),

    #[error("test function support violation: {0}")]
    Support(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
