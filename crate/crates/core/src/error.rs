use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    InvalidPrime(u64),

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("roots of f_{p} do not decompose into orbits: {detail}")]
    OrbitDecompositionFailure { p: u64, detail: String },

    #[error("witness construction failed for p = {p}: {detail}")]
    WitnessConstructionFailure { p: u64, detail: String },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("gcd({n}, {m}) > 1")]
    NotCoprime { n: u64, m: u64 },

    #[error("cache does not cover prime {0}")]
    IncompleteCache(u64),

    #[error("corrupt cache {path}:{line}: {detail}")]
    CacheCorrupt {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("scan interrupted after {completed} primes; partial cache is resumable")]
    Interrupted { completed: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
