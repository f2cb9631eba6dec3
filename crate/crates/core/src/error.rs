use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),

    #[error("(N={n}, M={m}) is not informationally complete for d={d}: (M-1)N = {got}, need d^2-1 = {need}")]
    IncompleteLayout {
        d: usize,
        n: usize,
        m: usize,
        got: usize,
        need: usize,
    },

    #[error("t = {t} lies outside the admissible interval [{lo}, {hi}]")]
    TOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("degenerate dual frame: x = y = {0}")]
    DegenerateFrame(f64),

    #[error("malformed probability grid: {0}")]
    MalformedProbabilities(String),

    #[error("POVM shape (N={n}, M={m}) does not match the {family} family for d={d}")]
    FamilyMismatch {
        family: &'static str,
        d: usize,
        n: usize,
        m: usize,
    },

    #[error("party index {q} out of range for {n} parties")]
    PartyOutOfRange { q: usize, n: usize },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
