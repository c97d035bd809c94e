//! Exact evaluation of twisted inverse sums and of the closed-form
//! right-hand sides they are compared against.

use crate::arith::{
    batch_mod_inverse_into, factorize, gcd, mul_mod, reduce, unit_root, SpfTable,
    UnitCircleTable, DEFAULT_TABLE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::mult_func::{Coefficients, MultiplicativeFunction};
use crate::summation::SumValue;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Fixed summation block; partial sums are merged in block order, so results
/// do not depend on the number of workers.
pub const BLOCK_LEN: u64 = 1 << 14;

/// Largest `rad(q)` for which coprimality is read from a residue mask.
pub const RADICAL_MASK_LIMIT: u64 = 1_000_000;

pub const DEFAULT_EPSILON: f64 = 0.01;

/// Coprimality test against a fixed modulus.
#[derive(Debug, Clone)]
pub struct CoprimeFilter {
    radical: u64,
    mask: Option<Vec<bool>>,
    primes: Vec<u64>,
}

impl CoprimeFilter {
    pub fn new(q: u64) -> Self {
        let fac = factorize(q, None);
        let primes: Vec<u64> = fac.primes().collect();
        let radical = fac.radical();
        let mask = (radical <= RADICAL_MASK_LIMIT)
            .then(|| (0..radical).map(|r| gcd(r, radical) == 1).collect());
        Self {
            radical,
            mask,
            primes,
        }
    }

    #[inline]
    pub fn is_coprime(&self, n: u64) -> bool {
        match &self.mask {
            Some(mask) => mask[(n % self.radical) as usize],
            None => self.primes.iter().all(|&p| n % p != 0),
        }
    }
}

/// A modulus together with its cached unit-circle table and coprimality filter.
#[derive(Debug, Clone)]
pub struct Modulus {
    q: u64,
    table: Option<Arc<UnitCircleTable>>,
    filter: Arc<CoprimeFilter>,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_table_threshold(q, DEFAULT_TABLE_THRESHOLD)
    }

    pub fn with_table_threshold(q: u64, threshold: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        Ok(Self {
            q,
            table: UnitCircleTable::with_threshold(q, threshold).map(Arc::new),
            filter: Arc::new(CoprimeFilter::new(q)),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    #[inline]
    pub fn is_coprime(&self, n: u64) -> bool {
        self.filter.is_coprime(n)
    }

    /// `e(j/q)` for a reduced residue `j`.
    #[inline]
    pub fn e(&self, j: u64) -> Complex64 {
        match &self.table {
            Some(t) => t.get(j),
            None => unit_root(j, self.q),
        }
    }

    #[inline]
    pub fn reduce(&self, b: i128) -> u64 {
        reduce(b, self.q)
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        mul_mod(x, y, self.q)
    }
}

fn require_unit(a: i128, q: u64) -> Result<()> {
    let g = gcd(reduce(a, q), q);
    if g != 1 {
        return Err(Error::NotInvertible { n: a, q, gcd: g });
    }
    Ok(())
}

fn warn_q_range(q: u64, n: u64) {
    if (q as u128) > (n as u128) * (n as u128) {
        log::warn!("q = {q} exceeds N^2 = {}; outside the bound's stated range", n as u128 * n as u128);
    }
}

/// `Σ_{lo<n≤hi, (n,q)=1} w(n)·e(b·n̄/q)` over fixed blocks.
///
/// Terms with `w(n) = 0` are counted but skip the inversion.
pub fn weighted_inverse_sum<W>(lo: u64, hi: u64, m: &Modulus, b: i128, weight: W) -> SumValue
where
    W: Fn(u64) -> Complex64 + Sync,
{
    if hi <= lo {
        return SumValue::new();
    }
    let b = m.reduce(b);
    let blocks = (hi - lo).div_ceil(BLOCK_LEN);
    let parts: Vec<SumValue> = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let start = lo + 1 + k * BLOCK_LEN;
            let end = (start + BLOCK_LEN - 1).min(hi);
            block_sum(start, end, m, b, &weight)
        })
        .collect();
    SumValue::merge_all(&parts)
}

fn block_sum<W>(start: u64, end: u64, m: &Modulus, b: u64, weight: &W) -> SumValue
where
    W: Fn(u64) -> Complex64,
{
    let mut acc = SumValue::new();
    let cap = (end + 1 - start) as usize;
    let mut ns = Vec::with_capacity(cap);
    let mut ws = Vec::with_capacity(cap);
    for n in start..=end {
        if !m.is_coprime(n) {
            continue;
        }
        let w = weight(n);
        if w == Complex64::new(0.0, 0.0) {
            acc.push_zero();
        } else {
            ns.push(n);
            ws.push(w);
        }
    }
    let mut invs = vec![0u64; ns.len()];
    batch_mod_inverse_into(&ns, m.q, &mut invs).expect("filtered entries are units");
    for (w, inv) in ws.iter().zip(&invs) {
        acc.push(w * m.e(m.mul(b, *inv)));
    }
    acc
}

/// `Σ_{n≤N, (n,q)=1} f(n)·e(a·n̄/q)`.
pub fn twisted_sum(
    f: &MultiplicativeFunction,
    a: i64,
    q: u64,
    n: u64,
    table: &SpfTable,
) -> Result<SumValue> {
    let m = Modulus::new(q)?;
    require_unit(a as i128, q)?;
    warn_q_range(q, n);
    let coeffs = f.sieve_values(n, table)?;
    twisted_sum_coefficients(&coeffs, a, &m)
}

/// As [`twisted_sum`] with precomputed coefficients `f(1..=N)`.
pub fn twisted_sum_coefficients(coeffs: &Coefficients, a: i64, m: &Modulus) -> Result<SumValue> {
    require_unit(a as i128, m.q)?;
    Ok(weighted_inverse_sum(0, coeffs.len(), m, a as i128, |n| coeffs.get(n)))
}

/// `Σ_{X<n≤Z, (n,q)=1} e(b·n̄/q)`; `b` need not be coprime to `q`.
pub fn incomplete_inverse_sum(b: i64, q: u64, x: u64, z: u64) -> Result<SumValue> {
    if x > z {
        return Err(Error::Domain(format!("empty range requires X <= Z, got ({x}, {z}]")));
    }
    let m = Modulus::new(q)?;
    Ok(incomplete_inverse_sum_with(b, &m, x, z))
}

pub fn incomplete_inverse_sum_with(b: i64, m: &Modulus, x: u64, z: u64) -> SumValue {
    weighted_inverse_sum(x, z, m, b as i128, |_| Complex64::new(1.0, 0.0))
}

/// `gcd(b, q)` with `gcd(0, q) = q`.
pub fn gcd_signed(b: i64, q: u64) -> u64 {
    gcd(reduce(b as i128, q), q)
}

/// `C·(((Z−X)/q + 1)·gcd(b,q) + q^{1/2+ε})`.
pub fn lemma2_rhs(b: i64, q: u64, x: u64, z: u64, epsilon: f64, c: f64) -> f64 {
    let (range_term, power_term) = lemma2_terms(b, q, x, z, epsilon);
    c * (range_term + power_term)
}

/// The two summands of [`lemma2_rhs`] with unit constant.
pub fn lemma2_terms(b: i64, q: u64, x: u64, z: u64, epsilon: f64) -> (f64, f64) {
    let g = gcd_signed(b, q) as f64;
    let qf = q as f64;
    let len = z.saturating_sub(x) as f64;
    ((len / qf + 1.0) * g, qf.powf(0.5 + epsilon))
}

/// `φ(q)/φ(q/g)` as a reduced fraction next to its bound `g = gcd(b, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhiRatio {
    pub numerator: u64,
    pub denominator: u64,
    pub bound: u64,
}

impl PhiRatio {
    pub fn from_totients(phi_q: u64, phi_cofactor: u64, g: u64) -> Self {
        let d = gcd(phi_q, phi_cofactor);
        Self {
            numerator: phi_q / d,
            denominator: phi_cofactor / d,
            bound: g,
        }
    }

    /// `ratio <= bound`, decided in integers.
    pub fn holds(&self) -> bool {
        self.numerator as u128 <= self.bound as u128 * self.denominator as u128
    }
}

pub fn phi_ratio(b: i64, q: u64) -> PhiRatio {
    let g = gcd_signed(b, q);
    let phi_q = factorize(q, None).phi();
    let phi_cofactor = factorize(q / g, None).phi();
    PhiRatio::from_totients(phi_q, phi_cofactor, g)
}

/// Classical Ramanujan sum `c_q(b) = μ(q/g)·φ(q)/φ(q/g)`.
pub fn ramanujan_sum(b: i64, q: u64) -> i64 {
    let g = gcd_signed(b, q);
    let cofactor = factorize(q / g, None);
    let ratio = factorize(q, None).phi() / cofactor.phi();
    cofactor.mu() as i64 * ratio as i64
}

/// `S(a, b; q) = Σ_{x mod q, (x,q)=1} e((a·x + b·x̄)/q)`.
pub fn complete_kloosterman(a: i64, b: i64, q: u64) -> Result<SumValue> {
    let m = Modulus::new(q)?;
    let a = m.reduce(a as i128);
    let b = m.reduce(b as i128);
    let xs: Vec<u64> = (0..q).filter(|&x| m.is_coprime(x)).collect();
    let mut invs = vec![0u64; xs.len()];
    batch_mod_inverse_into(&xs, q, &mut invs)?;
    Ok(xs
        .iter()
        .zip(&invs)
        .map(|(&x, &xi)| {
            let ax = m.mul(a, x);
            let bx = m.mul(b, xi);
            // ax + bx < 2q fits since q < 2^63
            m.e((ax + bx) % q)
        })
        .collect())
}

/// The three right-side terms of the main bound and their scaled total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremRhs {
    pub term_sqrt: f64,
    pub term_q: f64,
    pub term_tail: f64,
    pub epsilon: f64,
    pub constant: f64,
    pub total: f64,
}

pub fn theorem_rhs(q: u64, n: u64, epsilon: f64, c: f64) -> TheoremRhs {
    let tau = factorize(q, None).tau() as f64;
    let qf = q as f64;
    let nf = n as f64;
    let log6n = (6.0 * nf).ln();
    let loglog = log6n.ln();
    let term_sqrt = (tau / qf).sqrt() * nf * loglog;
    let term_q = qf.powf(0.25 + epsilon / 2.0) * nf.sqrt() * log6n.sqrt();
    let term_tail = nf / loglog.sqrt();
    TheoremRhs {
        term_sqrt,
        term_q,
        term_tail,
        epsilon,
        constant: c,
        total: c * (term_sqrt + term_q + term_tail),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::e_frac;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn e(j: i128, q: u64) -> Complex64 {
        e_frac(j, q, None)
    }

    #[test]
    fn twisted_examples() {
        let t = SpfTable::build(100).unwrap();
        let one = MultiplicativeFunction::one();
        let s = twisted_sum(&one, 0, 1, 7, &t).unwrap();
        assert_eq!(s.value(), Complex64::new(7.0, 0.0));
        assert_eq!(s.terms(), 7);
        let s = twisted_sum(&one, 1, 2, 4, &t).unwrap();
        assert!(close(s.value(), Complex64::new(-2.0, 0.0), 1e-15));
        assert_eq!(s.terms(), 2);
        let mu = MultiplicativeFunction::mobius();
        let s = twisted_sum(&mu, 1, 5, 3, &t).unwrap();
        let want = e(1, 5) - e(3, 5) - e(2, 5);
        assert!(close(s.value(), want, 1e-15));
        assert!(close(s.value(), Complex64::new(1.9270509831248424, 0.9510565162951535), 1e-12));
    }

    #[test]
    fn twisted_rejects_non_unit() {
        let t = SpfTable::build(100).unwrap();
        let err = twisted_sum(&MultiplicativeFunction::one(), 4, 6, 10, &t).unwrap_err();
        assert!(matches!(err, Error::NotInvertible { gcd: 2, .. }));
    }

    #[test]
    fn twisted_counts_zero_coefficients_as_terms() {
        let t = SpfTable::build(100).unwrap();
        let s = twisted_sum(&MultiplicativeFunction::mobius(), 1, 7, 100, &t).unwrap();
        let coprime = (1..=100u64).filter(|n| n % 7 != 0).count() as u64;
        assert_eq!(s.terms(), coprime);
    }

    #[test]
    fn incomplete_examples() {
        let s = incomplete_inverse_sum(0, 6, 0, 6).unwrap();
        assert!(close(s.value(), Complex64::new(2.0, 0.0), 1e-15));
        let s = incomplete_inverse_sum(1, 7, 0, 7).unwrap();
        assert!(close(s.value(), Complex64::new(-1.0, 0.0), 1e-12));
        let s = incomplete_inverse_sum(1, 5, 0, 3).unwrap();
        assert!(close(s.value(), e(1, 5) + e(3, 5) + e(2, 5), 1e-15));
        assert!(close(s.value(), Complex64::new(-1.3090169943749475, 0.9510565162951535), 1e-12));
        assert_eq!(incomplete_inverse_sum(1, 5, 3, 3).unwrap().terms(), 0);
        assert!(incomplete_inverse_sum(1, 5, 4, 3).is_err());
    }

    #[test]
    fn lemma2_rhs_examples() {
        assert!((lemma2_rhs(0, 6, 0, 6, 0.01, 1.0) - 14.493774258445853).abs() < 1e-12);
        for (x, z) in [(0u64, 5u64), (3, 17)] {
            let want = (z - x + 1) as f64 + 1.0;
            assert!((lemma2_rhs(1, 1, x, z, 0.01, 1.0) - want).abs() < 1e-12);
        }
        assert!((lemma2_rhs(1, 10_000, 0, 10_000, 0.01, 1.0) - 111.64781961431851).abs() < 1e-9);
        assert!((lemma2_rhs(1, 7, 0, 7, 0.01, 2.0) - 2.0 * 4.697739434974796).abs() < 1e-12);
    }

    #[test]
    fn phi_ratio_examples() {
        assert_eq!(phi_ratio(4, 12), PhiRatio { numerator: 2, denominator: 1, bound: 4 });
        assert_eq!(phi_ratio(5, 12), PhiRatio { numerator: 1, denominator: 1, bound: 1 });
        assert_eq!(phi_ratio(13, 13), PhiRatio { numerator: 12, denominator: 1, bound: 13 });
        assert!(phi_ratio(0, 1).holds());
        assert!(phi_ratio(-6, 18).holds());
    }

    #[test]
    fn ramanujan_closed_form() {
        assert_eq!(ramanujan_sum(1, 7), -1);
        assert_eq!(ramanujan_sum(0, 12), 4);
        assert_eq!(ramanujan_sum(1, 12), 0);
        assert_eq!(ramanujan_sum(2, 12), 2); // g=2, q/g=6: μ(6)=1, φ(12)/φ(6)=2
        assert_eq!(ramanujan_sum(5, 1), 1);
    }

    fn brute_kloosterman(a: i64, b: i64, q: u64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for x in 0..q {
            if gcd(x, q) != 1 {
                continue;
            }
            let xi = (0..q).find(|&y| (x * y) % q == 1 % q).unwrap();
            s += e(a as i128 * x as i128 + b as i128 * xi as i128, q);
        }
        s
    }

    #[test]
    fn kloosterman_examples() {
        let s = complete_kloosterman(1, 1, 2).unwrap();
        assert!(close(s.value(), Complex64::new(1.0, 0.0), 1e-15));
        let s = complete_kloosterman(0, 0, 6).unwrap();
        assert!(close(s.value(), Complex64::new(2.0, 0.0), 1e-15));
        let s = complete_kloosterman(1, 1, 5).unwrap();
        assert!(close(s.value(), brute_kloosterman(1, 1, 5), 1e-12));
        assert!(close(s.value(), Complex64::new(0.3819660112501049, 0.0), 1e-12));
        for (a, b, q) in [(3, 7, 30), (-2, 5, 49), (1, 0, 12)] {
            let s = complete_kloosterman(a, b, q).unwrap();
            assert!(close(s.value(), brute_kloosterman(a, b, q), 1e-10));
        }
        assert_eq!(complete_kloosterman(1, 1, 1).unwrap().value(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn theorem_rhs_examples() {
        let r = theorem_rhs(101, 10_000, 0.01, 1.0);
        assert!((r.term_sqrt - 3374.575053307263).abs() < 1e-8);
        assert!((r.term_q - 1076.0680609585286).abs() < 1e-8);
        assert!((r.term_tail - 6457.54750348132).abs() < 1e-8);
        assert!((r.total - 10908.19061774711).abs() < 1e-7);
        assert!(r.total > 10_000.0);
        let r = theorem_rhs(1, 10, 0.01, 1.0);
        assert!((r.term_sqrt - 10.0 * 60f64.ln().ln()).abs() < 1e-12);
        let n = 1000u64;
        let r = theorem_rhs(n * n, n, 0.01, 3.0);
        assert!(r.term_q > r.term_sqrt && r.term_q > r.term_tail);
        let want = (n as f64).powf(1.01) * (6000f64).ln().sqrt();
        assert!((r.term_q - want).abs() < 1e-9 * want);
        let sum = r.term_sqrt + r.term_q + r.term_tail;
        assert!((r.total - 3.0 * sum).abs() <= 1e-12 * r.total);
    }

    #[test]
    fn filter_mask_and_prime_routes_agree() {
        let small = CoprimeFilter::new(2 * 3 * 5 * 7);
        assert!(small.mask.is_some());
        let big = CoprimeFilter::new(999_983 * 1_000_003);
        assert!(big.mask.is_none());
        for n in 0..5000u64 {
            assert_eq!(small.is_coprime(n), gcd(n, 210) == 1);
            assert_eq!(big.is_coprime(n * 999_983 + 1), gcd(n * 999_983 + 1, 999_983 * 1_000_003) == 1);
        }
        assert!(CoprimeFilter::new(1).is_coprime(0));
    }
}
