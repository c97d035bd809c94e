//! Multiplicative coefficient functions with `|f(n)| <= 1`.
//!
//! A function is described by its values on prime powers; `f(n)` follows by
//! multiplicativity. Values are validated when evaluated, never at construction.

use crate::arith::{factorize, SpfTable};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Slack allowed on `|f(p^k)| <= 1`.
pub const MODULUS_TOLERANCE: f64 = 1e-12;

pub type PrimePowerRule = Arc<dyn Fn(u64, u32) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Rule {
    One,
    Mobius,
    Liouville,
    /// `n^{iα}`
    Nit(f64),
    /// Seeded unimodular values; `per_power` draws each `p^k` independently.
    Random { seed: u64, per_power: bool },
    Custom(PrimePowerRule),
}

#[derive(Clone)]
pub struct MultiplicativeFunction {
    id: String,
    rule: Rule,
    completely_multiplicative: bool,
    conjugated: bool,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunction")
            .field("id", &self.id)
            .field("completely_multiplicative", &self.completely_multiplicative)
            .field("conjugated", &self.conjugated)
            .finish()
    }
}

/// The angle `θ ∈ [0, 1)` drawn for `(seed, p, k)`.
///
/// Stream `p` of a ChaCha8 generator seeded with `seed` is positioned at its
/// `(k-1)`-th 64-bit word (always word 0 for completely multiplicative
/// instances); the top 53 bits of that word, scaled by `2^-53`, give `θ`.
pub fn random_angle(seed: u64, p: u64, k: u32) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    rng.set_word_pos(2 * (k as u128 - 1));
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn cis_turns(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns.fract()).sin_cos();
    Complex64::new(c, s)
}

impl MultiplicativeFunction {
    pub fn one() -> Self {
        Self::builtin("one", Rule::One, true)
    }

    pub fn mobius() -> Self {
        Self::builtin("mobius", Rule::Mobius, false)
    }

    pub fn liouville() -> Self {
        Self::builtin("liouville", Rule::Liouville, true)
    }

    pub fn nit(alpha: f64) -> Self {
        Self::builtin(&format!("nit:{alpha}"), Rule::Nit(alpha), true)
    }

    /// Completely multiplicative with `f(p) = e(θ_p)`, see [`random_angle`].
    pub fn random_unimodular(seed: u64) -> Self {
        Self::builtin(
            &format!("rand:{seed}"),
            Rule::Random {
                seed,
                per_power: false,
            },
            true,
        )
    }

    /// Independent unimodular draws for every prime power.
    pub fn random_per_prime_power(seed: u64) -> Self {
        Self::builtin(
            &format!("randpp:{seed}"),
            Rule::Random {
                seed,
                per_power: true,
            },
            false,
        )
    }

    /// A user rule `(p, k) -> f(p^k)`. Its modulus is checked at evaluation.
    pub fn custom(
        id: impl Into<String>,
        completely_multiplicative: bool,
        rule: impl Fn(u64, u32) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            rule: Rule::Custom(Arc::new(rule)),
            completely_multiplicative,
            conjugated: false,
        }
    }

    fn builtin(id: &str, rule: Rule, complete: bool) -> Self {
        Self {
            id: id.to_string(),
            rule,
            completely_multiplicative: complete,
            conjugated: false,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    pub fn seed(&self) -> Option<u64> {
        match self.rule {
            Rule::Random { seed, .. } => Some(seed),
            _ => None,
        }
    }

    /// The function `n ↦ conj(f(n))`.
    pub fn conjugate(&self) -> Self {
        let mut g = self.clone();
        g.conjugated = !g.conjugated;
        g.id = if g.conjugated {
            format!("conj({})", self.id)
        } else {
            self.id.trim_start_matches("conj(").trim_end_matches(')').to_string()
        };
        g
    }

    fn raw_rule(&self, p: u64, k: u32) -> Complex64 {
        match &self.rule {
            Rule::One => Complex64::new(1.0, 0.0),
            Rule::Mobius => {
                if k == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Rule::Liouville => {
                if k % 2 == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            }
            Rule::Nit(alpha) => Complex64::from_polar(1.0, k as f64 * alpha * (p as f64).ln()),
            Rule::Random { seed, per_power } => {
                if *per_power {
                    cis_turns(random_angle(*seed, p, k))
                } else {
                    cis_turns(k as f64 * random_angle(*seed, p, 1))
                }
            }
            Rule::Custom(rule) => rule(p, k),
        }
    }

    /// `f(p^k)`, validated against the modulus bound.
    pub fn prime_power(&self, p: u64, k: u32) -> Result<Complex64> {
        let v = self.raw_rule(p, k);
        let v = if self.conjugated { v.conj() } else { v };
        let modulus = v.norm();
        if !(modulus <= 1.0 + MODULUS_TOLERANCE) {
            return Err(Error::Unbounded { p, k, modulus });
        }
        Ok(v)
    }

    /// `f(n)` by factorization.
    pub fn eval_at(&self, n: u64) -> Result<Complex64> {
        self.eval_with(n, None)
    }

    pub fn eval_with(&self, n: u64, table: Option<&SpfTable>) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::Domain("f(n) requires n >= 1".into()));
        }
        let fac = factorize(n, table);
        let mut acc = Complex64::new(1.0, 0.0);
        for &(p, k) in fac.pairs() {
            acc *= self.prime_power(p, k)?;
        }
        Ok(acc)
    }

    /// `f(1..=n)` by an smallest-prime-factor recursion.
    pub fn sieve_values(&self, n: u64, table: &SpfTable) -> Result<Coefficients> {
        table.require(n, "coefficient sieve")?;
        let len = n as usize + 1;
        let mut vals = vec![Complex64::new(0.0, 0.0); len];
        if len > 1 {
            vals[1] = Complex64::new(1.0, 0.0);
        }
        let spf = table.raw();
        if self.completely_multiplicative {
            for i in 2..len {
                let p = spf[i] as usize;
                vals[i] = if p == i {
                    self.prime_power(p as u64, 1)?
                } else {
                    vals[p] * vals[i / p]
                };
            }
        } else {
            // prime_part[i] = p^k with p = spf(i), p^k ∥ i
            let mut prime_part = vec![0u32; len];
            for i in 2..len {
                let p = spf[i] as usize;
                let m = i / p;
                let pk = if m % p == 0 {
                    prime_part[m] as usize * p
                } else {
                    p
                };
                prime_part[i] = pk as u32;
                vals[i] = if pk == i {
                    let k = pk.ilog(p);
                    self.prime_power(p as u64, k)?
                } else {
                    vals[pk] * vals[i / pk]
                };
            }
        }
        Ok(Coefficients { values: vals })
    }
}

impl FromStr for MultiplicativeFunction {
    type Err = Error;

    /// Grammar: `one`, `mobius`, `liouville`, `nit:<alpha>`, `rand:<seed>`, `randpp:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unknown multiplicative function `{s}`"));
        match s {
            "one" => return Ok(Self::one()),
            "mobius" | "mu" => return Ok(Self::mobius()),
            "liouville" | "lambda" => return Ok(Self::liouville()),
            _ => {}
        }
        let (head, arg) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "nit" => {
                let alpha: f64 = arg.parse().map_err(|_| bad())?;
                if !alpha.is_finite() {
                    return Err(bad());
                }
                Ok(Self::nit(alpha))
            }
            "rand" => Ok(Self::random_unimodular(parse_seed(arg).ok_or_else(bad)?)),
            "randpp" => Ok(Self::random_per_prime_power(parse_seed(arg).ok_or_else(bad)?)),
            _ => Err(bad()),
        }
    }
}

fn parse_seed(s: &str) -> Option<u64> {
    s.parse::<u64>()
        .ok()
        .or_else(|| s.parse::<i64>().ok().map(|v| v as u64))
}

/// `make_builtin` by name.
pub fn make_builtin(name: &str) -> Result<MultiplicativeFunction> {
    name.parse()
}

/// Values `f(1), …, f(N)`; `get(n)` is 1-based.
#[derive(Debug, Clone)]
pub struct Coefficients {
    values: Vec<Complex64>,
}

impl Coefficients {
    pub fn len(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, n: u64) -> Complex64 {
        self.values[n as usize]
    }

    /// `f(1..=N)` as a slice (slot `i` holds `f(i+1)`).
    pub fn as_slice(&self) -> &[Complex64] {
        &self.values[1..]
    }
}
