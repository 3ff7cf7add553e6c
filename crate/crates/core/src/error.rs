use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} lies outside the open domain ({lo}, {hi})")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("t = {t} is a breakpoint where the function jumps; evaluate one-sided instead")]
    AmbiguousPoint { t: f64 },

    #[error("unsupported distribution: {0}")]
    UnsupportedDistribution(String),

    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {pieces}")]
    ArityMismatch {
        expected: usize,
        breakpoints: usize,
        pieces: usize,
    },

    #[error("invalid segmentation: {0}")]
    InvalidSegmentation(String),

    #[error("quadrature did not reach tolerance on [{a}, {b}]: estimated error {error:e}")]
    QuadratureFailure { a: f64, b: f64, error: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("degenerate plane: alpha^2 = {alpha_sq}, beta^2 = {beta_sq}")]
    DegeneratePlane { alpha_sq: f64, beta_sq: f64 },

    #[error("fiber {0} has no fiber Ricci coefficient")]
    MissingFiberRicci(usize),

    #[error("fiber indices must differ (got {0} twice)")]
    SameFiber(usize),

    #[error("fiber index {index} out of range ({count} fibers)")]
    FiberIndex { index: usize, count: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("segment index {index} out of range ({count} segments)")]
    SegmentIndex { index: usize, count: usize },

    #[error("t = {t} is a breakpoint; the brute-force oracle is undefined there")]
    BreakpointQuery { t: f64 },

    #[error("grid spacing h = {h} exceeds eps/20 = {limit}")]
    GridTooCoarse { h: f64, limit: f64 },

    #[error("invalid mollifier: {0}")]
    InvalidMollifier(String),
}
