use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: r = {r} is not exterior to the horizon 2m = {horizon}")]
    NotExterior { r: f64, horizon: f64 },
    #[error("inverse tortoise did not converge for r* = {rstar} after {iterations} iterations")]
    InverseTortoise { rstar: f64, iterations: usize },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("initial data support [{lo}, {hi}] leaves the initial ray [{ray_lo}, {ray_hi}]")]
    Support { lo: f64, hi: f64, ray_lo: f64, ray_hi: f64 },
    #[error("non-finite value produced in cell (i = {i}, j = {j})")]
    NonFinite { i: usize, j: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("slice does not intersect the grid: {0}")]
    EmptyIntersection(String),
    #[error("region outside the grid: {0}")]
    RegionOutsideGrid(String),
    #[error("r1 = {r1} violates the support window 2m < r1 and 1.2 r1 < 3m (m = {m})")]
    SupportWindow { r1: f64, m: f64 },
    #[error("missing constituent energy: {0}")]
    MissingConstituent(String),
    #[error("curve has {found} samples, at least {needed} required")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("nonpositive value {value} at abscissa {x} inside the fit window")]
    NonPositive { x: f64, value: f64 },
    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },
    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
