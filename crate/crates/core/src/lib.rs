//! Multiplicatively twisted incomplete Kloosterman sums
//! `Σ_{n≤N, (n,q)=1} f(n)·e(a·n̄/q)` together with the prime-band
//! decomposition, Cauchy–Schwarz step and gcd-pair sums used to bound them.
//!
//! Every exact identity in the decomposition is computed along two routes so
//! that the two can be compared, and every inequality is reported as a
//! left-side / right-side ratio.

pub mod arith;
pub mod decomp;
pub mod error;
pub mod expsum;
pub mod mult_func;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
