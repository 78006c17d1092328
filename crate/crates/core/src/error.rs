use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rational function with zero denominator")]
    ZeroDenominator,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("rewrite cutoff {cutoff} is above the starting measure {start}; nothing can be certified stable")]
    CutoffTooSmall { cutoff: i64, start: i64 },

    #[error("obstruction sum for M={m}, N={n}, s'={s_prime} has no terms")]
    EmptySum { m: u64, n: u64, s_prime: u64 },

    #[error(
        "certificate bound {bound} for M={m}, N={n} is below the vector-field lower bound {lower}"
    )]
    UnsoundCertificate {
        m: u64,
        n: u64,
        bound: u64,
        lower: u64,
    },

    #[error("inconsistent bounds for ({m}, {n}): upper {upper} ({source_name}) < lower {lower}")]
    InconsistentBounds {
        m: u64,
        n: u64,
        lower: u64,
        upper: u64,
        source_name: &'static str,
    },

    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
