use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain accepted by an operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested 16-APSK geometry does not exist for this energy split
    /// (gamma beyond the feasibility limit).
    #[error("infeasible geometry: f(gamma={gamma}, rho_he={rho_he}) = {value} exceeds 1")]
    InfeasibleGeometry { gamma: f64, rho_he: f64, value: f64 },

    /// Two constellation points coincide.
    #[error("constellation symbols {first} and {second} coincide")]
    Overlap { first: usize, second: usize },

    #[error("unknown modulation '{0}'")]
    UnknownModulation(String),

    /// Mutual information never reaches the code's spectral efficiency
    /// inside the supported SNR range.
    #[error("threshold unreachable: target {target} bit/symbol not attained below {max_snr_db} dB")]
    Unreachable { target: f64, max_snr_db: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(
        "threshold monotonicity violated for {modulation}/{stream}: rate {lower_rate} at {lower_db} dB \
         is not below rate {upper_rate} at {upper_db} dB"
    )]
    Monotonicity {
        modulation: String,
        stream: String,
        lower_rate: String,
        lower_db: f64,
        upper_rate: String,
        upper_db: f64,
    },

    /// A receiver cannot decode any modcod, so its rate is zero.
    #[error("zero rate for receiver {index}")]
    ZeroRate { index: usize },

    /// No achievable rate for one side of an equal-rate computation.
    #[error("degenerate rate region: {0}")]
    Degenerate(String),

    #[error("population of {0} receivers is odd; pairing needs an even count")]
    OddPopulation(usize),

    #[error("brute-force matching is capped at {cap} receivers, got {got}")]
    TooLarge { cap: usize, got: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
