use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("index {index} is beyond the table limit {max}")]
    OutOfRange { index: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change for t_{n} below 2^{limit_log2}; the pair violates the weak inequality chain")]
    Divergence { n: usize, limit_log2: u32 },

    #[error("missing dependency: {0}")]
    Dependency(String),

    #[error("cannot order t_{upper} and t_{lower} at the working tolerance; raise the precision")]
    Precision { upper: usize, lower: usize },

    #[error("shift would push a non-zero entry out of dimension {dim}")]
    DimensionOverflow { dim: usize },

    #[error("pair ({p}, {q}) is not compatible with N = {dim}")]
    Incompatible { p: u64, q: u64, dim: usize },

    #[error("numeric backend failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
