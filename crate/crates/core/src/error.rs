use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("site count {0} exceeds configured cap {1}")]
    SiteCap(u128, u128),
    #[error("scale {0} out of range (N = {1})")]
    ScaleRange(usize, usize),
    #[error("mass squared must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("degree cap exceeded: monomial degree {0} > cap {1}")]
    DegreeCap(usize, usize),
    #[error("window degree budget infeasible at scale {j}: achievable tolerance {achievable:.3e} > requested {requested:.3e}")]
    WindowBudget {
        j: usize,
        achievable: f64,
        requested: f64,
    },
    #[error("localisation undefined: {0}")]
    Loc(String),
    #[error("linear program: {0}")]
    LinProg(String),
    #[error("norm evaluation: {0}")]
    Norm(String),
    #[error("coupling extraction residual {0:.3e} exceeds tolerance {1:.3e}")]
    ExtractResidual(f64, f64),
    #[error("coalescence scale undefined: a = b")]
    CoalescenceUndefined,
    #[error("series order {0} exceeds configured cap {1}")]
    SeriesOrder(usize, usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    CacheFormat(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
