//! Prime-band decomposition of `[1, N]`.
//!
//! Integers are sorted into three classes relative to a [`BandScheme`]:
//! rough (no prime factor in any band), clean in band `r` (exactly one prime of
//! `P_r`, to the first power, and no prime from a lower band), and discarded
//! (everything else). Clean integers factor uniquely as `n = p·y`, which is
//! what makes the rearranged double sum an exact identity.

use crate::arith::{batch_mod_inverse_into, gcd, primes_in_range, SpfTable};
use crate::error::{Error, Result};
use crate::expsum::{Modulus, BLOCK_LEN};
use crate::mult_func::MultiplicativeFunction;
use crate::summation::SumValue;
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

/// `d0 = √(log log 6N)`, `D0 = e^{d0}`, `d1 = d0²`, `D1 = e^{d1} = log 6N`,
/// and the usable band indices `r_lo = ⌊d0⌋ + 1 ..= r_hi = ⌊d1⌋ − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandParams {
    pub n: Option<u64>,
    pub d0: f64,
    pub window_start: f64,
    pub d1: f64,
    pub window_end: f64,
    pub r_lo: i64,
    pub r_hi: i64,
}

impl BandParams {
    pub fn for_n(n: u64) -> Self {
        let mut p = Self::from_loglog((6.0 * n as f64).ln().ln());
        p.n = Some(n);
        p
    }

    /// Parameters from `log log 6N` directly, for `N` beyond integer range.
    pub fn from_loglog(loglog: f64) -> Self {
        let d0 = loglog.sqrt();
        let d1 = loglog;
        Self {
            n: None,
            d0,
            window_start: d0.exp(),
            d1,
            window_end: d1.exp(),
            r_lo: d0.floor() as i64 + 1,
            r_hi: d1.floor() as i64 - 1,
        }
    }

    /// No usable band index.
    pub fn is_empty(&self) -> bool {
        self.r_lo > self.r_hi
    }

    /// The integer window `[⌈D0⌉, ⌈D1⌉)`; an integer `p` satisfies
    /// `D0 <= p < D1` exactly when it lies in it.
    pub fn integer_window(&self) -> (u64, u64) {
        (self.window_start.ceil() as u64, self.window_end.ceil() as u64)
    }

    /// `N / √(log log 6N)`.
    pub fn lemma1_bound(&self) -> Option<f64> {
        self.n.map(|n| n as f64 / self.d0)
    }
}

pub fn band_params(n: u64) -> BandParams {
    BandParams::for_n(n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BandProvenance {
    /// `B_r = ⌈e^r⌉` for `r = r_lo ..= r_hi + 1`.
    Standard { n: u64, first_index: i64 },
    Custom,
}

/// Strictly increasing boundaries `B_0 < … < B_m`; band `i` holds the primes
/// in `[B_i, B_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandScheme {
    boundaries: Vec<u64>,
    provenance: BandProvenance,
}

impl BandScheme {
    /// A single boundary yields a scheme with no bands.
    pub fn custom(boundaries: Vec<u64>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::Config("band boundary list is empty".into()));
        }
        if boundaries[0] < 2 {
            return Err(Error::Config(format!(
                "first band boundary must be >= 2, got {}",
                boundaries[0]
            )));
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "band boundaries must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            boundaries,
            provenance: BandProvenance::Custom,
        })
    }

    pub fn standard(n: u64) -> Self {
        let params = BandParams::for_n(n);
        let boundaries = if params.is_empty() {
            Vec::new()
        } else {
            (params.r_lo..=params.r_hi + 1)
                .map(|r| (r as f64).exp().ceil() as u64)
                .collect()
        };
        Self {
            boundaries,
            provenance: BandProvenance::Standard {
                n,
                first_index: params.r_lo,
            },
        }
    }

    /// One band `[lo, hi)`.
    pub fn window(lo: u64, hi: u64) -> Result<Self> {
        Self::custom(vec![lo, hi])
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    pub fn provenance(&self) -> &BandProvenance {
        &self.provenance
    }

    pub fn band_count(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.band_count() == 0
    }

    /// `[B_i, B_{i+1})`.
    pub fn band(&self, i: usize) -> (u64, u64) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    /// The index `r` of band `i` in the `[e^r, e^{r+1})` numbering (equal to
    /// `i` for custom schemes).
    pub fn exponent_index(&self, i: usize) -> i64 {
        match self.provenance {
            BandProvenance::Standard { first_index, .. } => first_index + i as i64,
            BandProvenance::Custom => i as i64,
        }
    }

    #[inline]
    pub fn band_of(&self, p: u64) -> Option<usize> {
        let b = &self.boundaries;
        if b.len() < 2 || p < b[0] || p >= b[b.len() - 1] {
            return None;
        }
        Some(b.partition_point(|&x| x <= p) - 1)
    }

    pub fn band_primes(&self, i: usize) -> Result<Vec<u64>> {
        let (lo, hi) = self.band(i);
        primes_in_range(lo, hi)
    }

    /// `(B_0, B_m)` when the scheme has a band.
    pub fn span(&self) -> Option<(u64, u64)> {
        (!self.is_empty()).then(|| (self.boundaries[0], *self.boundaries.last().unwrap()))
    }

    fn validate_index(&self, i: usize) -> Result<()> {
        if i >= self.band_count() {
            return Err(Error::Domain(format!(
                "band index {i} out of range for {} band(s)",
                self.band_count()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BandScheme {
    /// `8;21;55`, or `default:…` for standard schemes (`default:empty` when vacuous).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = self
            .boundaries
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";");
        match self.provenance {
            BandProvenance::Standard { .. } if self.is_empty() => write!(f, "default:empty"),
            BandProvenance::Standard { .. } => write!(f, "default:{list}"),
            BandProvenance::Custom => write!(f, "{list}"),
        }
    }
}

/// Either the standard scheme for a given `N` or an explicit boundary list.
#[derive(Debug, Clone, PartialEq)]
pub enum BandSpec {
    Standard,
    Custom(Vec<u64>),
}

pub fn make_bands(spec: &BandSpec, n: u64) -> Result<BandScheme> {
    match spec {
        BandSpec::Standard => Ok(BandScheme::standard(n)),
        BandSpec::Custom(b) => BandScheme::custom(b.clone()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Rough,
    Clean { band: usize, prime: u64 },
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub n: u64,
    pub verdict: Verdict,
}

/// Verdict from a walk over the table's prime factors; `n <= table.limit()`.
#[inline]
fn verdict_of(mut n: u64, bands: &BandScheme, spf: &[u32]) -> Verdict {
    // primes arrive in increasing order, so the first band hit is the lowest band
    let mut lowest: Option<(usize, u64, bool)> = None;
    let mut shared = false;
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut e = 0u32;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if let Some(i) = bands.band_of(p) {
            match lowest {
                None => lowest = Some((i, p, e == 1)),
                Some((j, _, _)) if j == i => shared = true,
                Some(_) => break,
            }
        }
    }
    match lowest {
        None => Verdict::Rough,
        Some((band, prime, true)) if !shared => Verdict::Clean { band, prime },
        Some(_) => Verdict::Discard,
    }
}

/// Lowest band containing a prime factor of `n`.
#[inline]
fn lowest_band(mut n: u64, bands: &BandScheme, spf: &[u32]) -> Option<usize> {
    while n > 1 {
        let p = spf[n as usize] as u64;
        if let Some(i) = bands.band_of(p) {
            return Some(i);
        }
        while n % p == 0 {
            n /= p;
        }
    }
    None
}

pub fn classify(n: u64, bands: &BandScheme, table: &SpfTable) -> Result<Classification> {
    if n == 0 {
        return Err(Error::Domain("classify requires n >= 1".into()));
    }
    table.require(n, "classification")?;
    Ok(Classification {
        n,
        verdict: verdict_of(n, bands, table.raw()),
    })
}

/// The unique `(p, y)` with `n = p·y` for a clean `n`.
pub fn split(n: u64, bands: &BandScheme, table: &SpfTable) -> Result<(u64, u64)> {
    match classify(n, bands, table)?.verdict {
        Verdict::Clean { prime, .. } => Ok((prime, n / prime)),
        v => Err(Error::Domain(format!("{n} is not clean ({v:?}); no band factorization"))),
    }
}

/// Counts of each verdict over `[1, N]`; `clean_by_band[i]` counts band `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartitionCounts {
    pub rough: u64,
    pub clean: u64,
    pub discard: u64,
    pub clean_by_band: Vec<u64>,
}

impl PartitionCounts {
    pub fn total(&self) -> u64 {
        self.rough + self.clean + self.discard
    }

    fn merge(&mut self, other: &PartitionCounts) {
        self.rough += other.rough;
        self.clean += other.clean;
        self.discard += other.discard;
        for (a, b) in self.clean_by_band.iter_mut().zip(&other.clean_by_band) {
            *a += b;
        }
    }
}

fn block_ranges(n: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let blocks = n.div_ceil(BLOCK_LEN) as usize;
    (0..blocks).into_par_iter().map(move |k| {
        let k = k as u64;
        let start = 1 + k * BLOCK_LEN;
        (start, (start + BLOCK_LEN - 1).min(n))
    })
}

pub fn partition_counts(n: u64, bands: &BandScheme, table: &SpfTable) -> Result<PartitionCounts> {
    table.require(n, "partition")?;
    let spf = table.raw();
    let parts: Vec<PartitionCounts> = block_ranges(n)
        .map(|(lo, hi)| {
            let mut c = PartitionCounts {
                clean_by_band: vec![0; bands.band_count()],
                ..Default::default()
            };
            for m in lo..=hi {
                match verdict_of(m, bands, spf) {
                    Verdict::Rough => c.rough += 1,
                    Verdict::Discard => c.discard += 1,
                    Verdict::Clean { band, .. } => {
                        c.clean += 1;
                        c.clean_by_band[band] += 1;
                    }
                }
            }
            c
        })
        .collect();
    let mut total = PartitionCounts {
        clean_by_band: vec![0; bands.band_count()],
        ..Default::default()
    };
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughCount {
    pub count: u64,
    /// `N / √(log log 6N)`; meaningful for the standard window.
    pub lemma1_bound: f64,
}

impl RoughCount {
    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.lemma1_bound
    }
}

/// `#{n <= N : no prime factor in [B_0, B_m)}`.
pub fn rough_count(n: u64, bands: &BandScheme, table: &SpfTable) -> Result<RoughCount> {
    let count = partition_counts(n, bands, table)?.rough;
    Ok(RoughCount {
        count,
        lemma1_bound: n as f64 / (6.0 * n as f64).ln().ln().sqrt(),
    })
}

/// Sizes of the discarded sets for the standard construction at `N`:
/// `S` (a prime factor in `[⌈D0⌉, ⌈D1⌉)`), `S″` (a prime factor in a usable
/// band) and `S‴` (clean for the usable bands).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscardCounts {
    pub s: u64,
    pub s_minus_s2: u64,
    pub s2_minus_s3: u64,
}

pub fn discard_counts(n: u64, table: &SpfTable) -> Result<DiscardCounts> {
    table.require(n, "discard count")?;
    let (lo, hi) = BandParams::for_n(n).integer_window();
    let window = if lo < hi {
        BandScheme::window(lo.max(2), hi)?
    } else {
        BandScheme::custom(vec![lo.max(2)])?
    };
    let usable = BandScheme::standard(n);
    let spf = table.raw();
    let parts: Vec<DiscardCounts> = block_ranges(n)
        .map(|(a, b)| {
            let mut c = DiscardCounts { s: 0, s_minus_s2: 0, s2_minus_s3: 0 };
            for m in a..=b {
                let in_s = lowest_band(m, &window, spf).is_some();
                let v = verdict_of(m, &usable, spf);
                c.s += in_s as u64;
                if in_s && v == Verdict::Rough {
                    c.s_minus_s2 += 1;
                }
                if v == Verdict::Discard {
                    c.s2_minus_s3 += 1;
                }
            }
            c
        })
        .collect();
    Ok(parts.iter().fold(DiscardCounts { s: 0, s_minus_s2: 0, s2_minus_s3: 0 }, |acc, c| {
        DiscardCounts {
            s: acc.s + c.s,
            s_minus_s2: acc.s_minus_s2 + c.s_minus_s2,
            s2_minus_s3: acc.s2_minus_s3 + c.s2_minus_s3,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MertensProduct {
    pub product: f64,
    /// `log D0 / log D1`
    pub approx: f64,
}

/// `Π_{D0 <= p < D1} (1 − 1/p)` against `log D0 / log D1`.
pub fn mertens_product(d0: f64, d1: f64) -> Result<MertensProduct> {
    if !(2.0 <= d0 && d0 <= d1) {
        return Err(Error::Domain(format!("need 2 <= D0 <= D1, got ({d0}, {d1})")));
    }
    let primes = primes_in_range(d0.ceil() as u64, d1.ceil() as u64)?;
    let product = primes.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
    Ok(MertensProduct {
        product,
        approx: d0.ln() / d1.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCount {
    pub count: u64,
    pub pnt_ratio: f64,
}

/// `|P_i|` and its ratio to the prime-number-theorem scale of the band.
pub fn band_prime_count(bands: &BandScheme, i: usize) -> Result<BandCount> {
    bands.validate_index(i)?;
    let count = bands.band_primes(i)?.len() as u64;
    let pnt_ratio = match bands.provenance() {
        BandProvenance::Standard { .. } => {
            let r = bands.exponent_index(i) as f64;
            count as f64 * r / r.exp()
        }
        BandProvenance::Custom => {
            let (lo, hi) = bands.band(i);
            count as f64 / ((hi - lo) as f64 / (lo as f64).ln())
        }
    };
    Ok(BandCount { count, pnt_ratio })
}

fn require_unit(a: i64, q: u64) -> Result<()> {
    let g = gcd(crate::arith::reduce(a as i128, q), q);
    if g != 1 {
        return Err(Error::NotInvertible { n: a as i128, q, gcd: g });
    }
    Ok(())
}

/// Three-way split of the twisted sum plus the band-rearranged clean part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposedSum {
    pub clean: SumValue,
    pub rough: SumValue,
    pub discard: SumValue,
    /// `Σ_r Σ_{p∈P_r} Σ_{y ≤ N/p, y free of P_0..P_r} f(p)·f(y)·e(a·p̄·ȳ/q)`
    pub rearranged_clean: SumValue,
}

impl DecomposedSum {
    pub fn total(&self) -> SumValue {
        SumValue::merge_all([&self.clean, &self.rough, &self.discard])
    }
}

pub fn decomposed_sum(
    f: &MultiplicativeFunction,
    a: i64,
    q: u64,
    n: u64,
    bands: &BandScheme,
    table: &SpfTable,
) -> Result<DecomposedSum> {
    require_unit(a, q)?;
    table.require(n, "decomposition")?;
    let m = Modulus::new(q)?;
    let coeffs = f.sieve_values(n, table)?;
    let spf = table.raw();
    let a_red = m.reduce(a as i128);

    let parts: Vec<[SumValue; 3]> = block_ranges(n)
        .map(|(lo, hi)| {
            let mut acc = [SumValue::new(), SumValue::new(), SumValue::new()];
            let mut ns = Vec::new();
            let mut slot = Vec::new();
            for k in lo..=hi {
                if !m.is_coprime(k) {
                    continue;
                }
                let s = match verdict_of(k, bands, spf) {
                    Verdict::Clean { .. } => 0,
                    Verdict::Rough => 1,
                    Verdict::Discard => 2,
                };
                ns.push(k);
                slot.push(s);
            }
            let mut invs = vec![0u64; ns.len()];
            batch_mod_inverse_into(&ns, q, &mut invs).expect("filtered entries are units");
            for ((&k, &s), &inv) in ns.iter().zip(&slot).zip(&invs) {
                acc[s].push(coeffs.get(k) * m.e(m.mul(a_red, inv)));
            }
            acc
        })
        .collect();
    let mut split_sums = [SumValue::new(), SumValue::new(), SumValue::new()];
    for p in &parts {
        for (tot, part) in split_sums.iter_mut().zip(p) {
            tot.merge(part);
        }
    }

    // p-outer route through the unique factorization n = p·y
    let y_max = match bands.span() {
        Some((b0, _)) => n / b0,
        None => 0,
    };
    let y_inv = inverse_table(y_max, &m)?;
    let y_low: Vec<Option<usize>> = (0..=y_max)
        .map(|y| if y == 0 { None } else { lowest_band(y, bands, spf) })
        .collect();
    let mut band_primes = Vec::new();
    for i in 0..bands.band_count() {
        for p in bands.band_primes(i)? {
            if p <= n && m.is_coprime(p) {
                band_primes.push((i, p));
            }
        }
    }
    let per_prime: Vec<SumValue> = band_primes
        .par_iter()
        .map(|&(i, p)| {
            let p_inv = crate::arith::mod_inverse(p as i128, q).expect("coprime band prime");
            let scale = coeffs.get(p);
            let ap = m.mul(a_red, p_inv);
            let mut acc = SumValue::new();
            for y in 1..=n / p {
                let free = y_low[y as usize].is_none_or(|j| j > i);
                if free && m.is_coprime(y) {
                    let phase = m.e(m.mul(ap, y_inv[y as usize]));
                    acc.push(scale * coeffs.get(y) * phase);
                }
            }
            acc
        })
        .collect();

    Ok(DecomposedSum {
        clean: split_sums[0],
        rough: split_sums[1],
        discard: split_sums[2],
        rearranged_clean: SumValue::merge_all(&per_prime),
    })
}

/// `ȳ mod q` for `y <= y_max` coprime to `q` (0 elsewhere).
fn inverse_table(y_max: u64, m: &Modulus) -> Result<Vec<u64>> {
    let ys: Vec<u64> = (1..=y_max).filter(|&y| m.is_coprime(y)).collect();
    let mut invs = vec![0u64; ys.len()];
    batch_mod_inverse_into(&ys, m.q(), &mut invs)?;
    let mut table = vec![0u64; y_max as usize + 1];
    for (&y, &inv) in ys.iter().zip(&invs) {
        table[y as usize] = inv;
    }
    Ok(table)
}

/// The objects of one band `r` behind Σ₁ and Σ₂: the band primes `p ∈ P_r`
/// coprime to `q` (with `p <= N`), the `y <= Y = ⌊N/B_r⌋` coprime to `q`, and
/// the inner sums `Σ_{p <= N/y} f(p)·e(a·p̄·ȳ/q)`.
#[derive(Debug, Clone)]
pub struct BandSystem {
    pub band: usize,
    pub n: u64,
    pub y_max: u64,
    modulus: Modulus,
    a: u64,
    primes: Vec<u64>,
    prime_inv: Vec<u64>,
    prime_val: Vec<Complex64>,
    ys: Vec<u64>,
    y_inv: Vec<u64>,
}

impl BandSystem {
    pub fn new(
        f: &MultiplicativeFunction,
        a: i64,
        q: u64,
        band: usize,
        n: u64,
        bands: &BandScheme,
    ) -> Result<Self> {
        require_unit(a, q)?;
        bands.validate_index(band)?;
        let modulus = Modulus::new(q)?;
        let (lo, _) = bands.band(band);
        let y_max = n / lo;
        let primes: Vec<u64> = bands
            .band_primes(band)?
            .into_iter()
            .filter(|&p| p <= n && modulus.is_coprime(p))
            .collect();
        let mut prime_inv = vec![0u64; primes.len()];
        batch_mod_inverse_into(&primes, q, &mut prime_inv)?;
        let prime_val = primes
            .iter()
            .map(|&p| f.prime_power(p, 1))
            .collect::<Result<Vec<_>>>()?;
        let ys: Vec<u64> = (1..=y_max).filter(|&y| modulus.is_coprime(y)).collect();
        let mut y_inv = vec![0u64; ys.len()];
        batch_mod_inverse_into(&ys, q, &mut y_inv)?;
        Ok(Self {
            band,
            n,
            y_max,
            a: modulus.reduce(a as i128),
            modulus,
            primes,
            prime_inv,
            prime_val,
            ys,
            y_inv,
        })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// The `y <= Y` coprime to `q`, ascending.
    pub fn ys(&self) -> &[u64] {
        &self.ys
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Inner sum for the `j`-th admissible `y`.
    pub fn inner(&self, j: usize) -> Complex64 {
        let y = self.ys[j];
        let cap = self.n / y;
        let ay = self.modulus.mul(self.a, self.y_inv[j]);
        let mut acc = SumValue::new();
        for ((&p, &pi), &fp) in self.primes.iter().zip(&self.prime_inv).zip(&self.prime_val) {
            if p > cap {
                break;
            }
            acc.push(fp * self.modulus.e(self.modulus.mul(ay, pi)));
        }
        acc.value()
    }

    pub fn inner_sums(&self) -> Vec<Complex64> {
        (0..self.ys.len()).into_par_iter().map(|j| self.inner(j)).collect()
    }

    /// `(y_lim, Σ_{y <= y_lim, (y,q)=1} e(a(p̄₁ − p̄₂)ȳ/q))` with
    /// `y_lim = min(Y, N / max(p₁, p₂))`, for prime indices `i`, `j`.
    pub fn pair_sum(&self, i: usize, j: usize) -> (u64, i64, SumValue) {
        let q = self.modulus.q();
        let y_lim = self.y_max.min(self.n / self.primes[i].max(self.primes[j]));
        let diff = (self.prime_inv[i] + q - self.prime_inv[j]) % q;
        let c = self.modulus.mul(self.a, diff);
        let len = self.ys.partition_point(|&y| y <= y_lim);
        let s: SumValue = self.y_inv[..len]
            .iter()
            .map(|&yi| self.modulus.e(self.modulus.mul(c, yi)))
            .collect();
        (y_lim, c as i64, s)
    }

    /// `f(p_i)·conj(f(p_j))`.
    pub fn pair_weight(&self, i: usize, j: usize) -> Complex64 {
        self.prime_val[i] * self.prime_val[j].conj()
    }
}

/// Σ₁ = `Σ_{y <= Y, (y,q)=1} |inner(y)|`.
pub fn sigma1(
    f: &MultiplicativeFunction,
    a: i64,
    q: u64,
    band: usize,
    n: u64,
    bands: &BandScheme,
) -> Result<f64> {
    let sys = BandSystem::new(f, a, q, band, n, bands)?;
    Ok(crate::summation::real_sum(sys.inner_sums().iter().map(|z| z.norm())))
}

/// The band-`r` clean sum in y-outer form together with the intermediate
/// `Σ_y |inner(y)|` over band-free `y` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedSigma1 {
    pub signed: Complex64,
    pub absolute: f64,
}

pub fn sigma1_restricted(
    f: &MultiplicativeFunction,
    a: i64,
    q: u64,
    band: usize,
    n: u64,
    bands: &BandScheme,
    table: &SpfTable,
) -> Result<RestrictedSigma1> {
    let sys = BandSystem::new(f, a, q, band, n, bands)?;
    table.require(sys.y_max, "band-free test")?;
    restricted_from(&sys, f, bands, table)
}

pub(crate) fn restricted_from(
    sys: &BandSystem,
    f: &MultiplicativeFunction,
    bands: &BandScheme,
    table: &SpfTable,
) -> Result<RestrictedSigma1> {
    let inner = sys.inner_sums();
    let mut signed = SumValue::new();
    let mut absolute = Vec::new();
    for (j, &y) in sys.ys().iter().enumerate() {
        if lowest_band(y, bands, table.raw()).is_some_and(|i| i <= sys.band) {
            continue;
        }
        signed.push(f.eval_with(y, Some(table))? * inner[j]);
        absolute.push(inner[j].norm());
    }
    Ok(RestrictedSigma1 {
        signed: signed.value(),
        absolute: crate::summation::real_sum(absolute),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma2 {
    /// `Σ_y |inner(y)|²`
    pub direct: f64,
    /// `Σ_{p₁,p₂} f(p₁)·conj(f(p₂))·Σ_y e(a(p̄₁ − p̄₂)ȳ/q)`
    pub pair_expanded: Complex64,
}

pub fn sigma2(
    f: &MultiplicativeFunction,
    a: i64,
    q: u64,
    band: usize,
    n: u64,
    bands: &BandScheme,
) -> Result<Sigma2> {
    let sys = BandSystem::new(f, a, q, band, n, bands)?;
    Ok(sigma2_from(&sys))
}

pub(crate) fn sigma2_from(sys: &BandSystem) -> Sigma2 {
    let direct = crate::summation::real_sum(sys.inner_sums().iter().map(|z| z.norm_sqr()));
    let k = sys.primes().len();
    let rows: Vec<SumValue> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = SumValue::new();
            for j in 0..k {
                let (_, _, s) = sys.pair_sum(i, j);
                row.push(sys.pair_weight(i, j) * s.value());
            }
            row
        })
        .collect();
    Sigma2 {
        direct,
        pair_expanded: SumValue::merge_all(&rows).value(),
    }
}
