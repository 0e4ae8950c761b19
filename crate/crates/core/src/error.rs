use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet must contain at least one value")]
    EmptyAlphabet,

    #[error("pmf has {pmf} entries but the alphabet has {values} values")]
    PmfLengthMismatch { values: usize, pmf: usize },

    #[error("probability at position {index} is outside [0, 1]")]
    InvalidProbability { index: usize },

    #[error("pmf sums to {sum}, expected 1")]
    PmfNotNormalized { sum: f64 },

    #[error("key {key} out of range for a code with {key_count} keys")]
    KeyOutOfRange { key: usize, key_count: usize },

    #[error("value index {index} out of range for alphabet size {m}")]
    ValueOutOfRange { index: usize, m: usize },

    #[error("bin {bin} out of range for a code with {r} bins")]
    BinOutOfRange { bin: usize, r: usize },

    #[error("bin {bin} is not produced by key {key}")]
    NotInImage { key: usize, bin: usize },

    #[error("key {key} maps two values into bin {bin}; the receiver could not decode")]
    NotInjective { key: usize, bin: usize },

    #[error("malformed code: {0}")]
    MalformedCode(String),

    #[error("malformed binning: {0}")]
    MalformedBinning(String),

    #[error("code is for {code_m} values but the alphabet has {alphabet_m}")]
    DimensionMismatch { code_m: usize, alphabet_m: usize },

    #[error("operation requires a uniform pmf")]
    NonUniform,

    #[error("{r} bins cannot hold {m} values with the exchange encoder (only r = m is supported)")]
    UnsupportedBinCount { r: usize, m: usize },

    #[error("{what} is {requested}, above the configured cap of {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("witness not applicable: {0}")]
    NotApplicable(String),

    #[error("cannot parse {0:?} as a number")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
