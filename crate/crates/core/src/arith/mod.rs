//! Sieves, factorization, modular inverses and unit-circle evaluation.

mod factor;
mod modular;
mod sieve;
mod unit_circle;

pub use factor::{arithmetic_functions, factorize, is_prime_u64, ArithmeticValues, Factorization};
pub use modular::{batch_mod_inverse, batch_mod_inverse_into, gcd, mod_inverse, mul_mod, reduce};
pub use sieve::{
    isqrt, primes_in_range, primes_in_range_capped, totient_table, SpfTable, DEFAULT_SIEVE_CAP,
};
pub use unit_circle::{e_frac, unit_root, UnitCircleTable, DEFAULT_TABLE_THRESHOLD};

