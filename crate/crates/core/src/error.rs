use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("B-spline order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("combination kernel needs r >= 2 and exactly r shifts (r = {r}, {shifts} shifts given)")]
    InvalidCombination { r: usize, shifts: usize },

    #[error("shifts must be finite and strictly increasing: {0:?}")]
    ShiftsNotIncreasing(Vec<f64>),

    #[error("moment system is numerically singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("missing lattice data at (k, j) = ({k}, {j})")]
    MissingData { k: i64, j: i64 },

    #[error("operator needs {expected} data but the field holds {found}")]
    WrongFieldKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("sampling rate mismatch: field w = {field}, evaluation grid w = {grid}")]
    RateMismatch { field: f64, grid: f64 },

    #[error("test function `{function}` has no closed-form partial of order ({i}, {j})")]
    CatalogMissingDerivative {
        function: String,
        i: usize,
        j: usize,
    },

    #[error("partial derivative order ({0}, {1}) exceeds catalog differentiability")]
    UnsupportedOrder(usize, usize),

    #[error("unknown function `{name}`; valid names: {}", valid.join(", "))]
    UnknownFunction { name: String, valid: Vec<String> },

    #[error("function profile has no sup norm for multi-index ({0}, {1})")]
    MissingProfileEntry(usize, usize),

    #[error("moment table does not cover order {0}")]
    MomentOrderOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
