use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A table or sieve request exceeded its configured memory cap.
    #[error("{what}: requested {requested} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("{n} is not invertible modulo {q} (gcd = {gcd})")]
    NotInvertible { n: i128, q: u64, gcd: u64 },

    #[error("batch entry {index} is not invertible modulo {q} (gcd = {gcd})")]
    NotInvertibleAt { index: usize, q: u64, gcd: u64 },

    #[error("coefficient rule value at ({p}, {k}) has modulus {modulus} > 1")]
    Unbounded { p: u64, k: u32, modulus: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),
}
