use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("no singular coordinate: {0}")]
    NoSingularCoordinate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("generators {first} and {second} do not commute (|[X, Y]| = {norm:e})")]
    NonCommuting { first: usize, second: usize, norm: f64 },
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("not a regular point: {0}")]
    NotRegular(String),
    #[error("no return found: {0}")]
    NoReturn(String),
    #[error("rank-deficient lattice: {0}")]
    RankDeficient(String),
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("system file: {0}")]
    Format(String),
    #[error("unknown catalog id `{0}`")]
    UnknownCatalogId(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
