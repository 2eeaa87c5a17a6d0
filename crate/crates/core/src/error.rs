use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShallowError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("symbol is not finite at frequency {0:?}")]
    NonFiniteSymbol(Vec<f64>),
    #[error("field has nonzero mean (relative size {0:.3e})")]
    NonZeroMean(f64),
    #[error("mass data has nonzero mean (relative size {0:.3e})")]
    NonZeroMeanData(f64),
    #[error("depth 1+eta is not positive (min {0:.6e})")]
    NonPositiveDepth(f64),
    #[error("symbol evaluated at zero frequency")]
    ZeroFrequency,
    #[error("case {case} is not admissible for gamma={gamma}, mu={mu}, sigma={sigma}")]
    InvalidCase { case: u8, gamma: f64, mu: f64, sigma: f64 },
    #[error("matrix symbol singular at frequency {xi:?} (condition {cond:.3e})")]
    SingularSymbol { xi: Vec<f64>, cond: f64 },
    #[error("krylov iteration stagnated at relative residual {0:.3e}")]
    KrylovStagnation(f64),
    #[error("newton did not converge in {0} iterations")]
    MaxItersExceeded(usize),
    #[error("trial states lost positive depth after full backtracking")]
    DepthCollapse,
    #[error("backtracking failed to reduce the residual")]
    LineSearchFailed,
    #[error("sweep stalled at step {0} after exhausting step halvings")]
    SweepStalled(usize),
    #[error("physical quantity must be positive: {0}")]
    NonPositivePhysical(&'static str),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ShallowError {
    fn from(e: std::io::Error) -> Self {
        ShallowError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ShallowError>;
