use crate::error::{Error, Result};

/// Default upper bound on `SpfTable::limit` and on segmented-sieve ranges.
pub const DEFAULT_SIEVE_CAP: u64 = 200_000_000;

const SEGMENT_LEN: u64 = 1 << 16;

/// Smallest-prime-factor table over `[0, limit]`, built by a linear sieve.
///
/// Entries 0 and 1 hold the sentinel 0.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn build_with_cap(limit: u64, cap: u64) -> Result<Self> {
        if limit > cap || limit > u32::MAX as u64 {
            return Err(Error::Resource {
                what: "smallest-prime-factor table",
                requested: limit,
                cap: cap.min(u32::MAX as u64),
            });
        }
        let limit = limit.max(1);
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::with_capacity(prime_count_estimate(limit));
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`; 0 for `n < 2`.
    #[inline]
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn raw(&self) -> &[u32] {
        &self.spf
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// All primes up to `limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn covers(&self, n: u64) -> bool {
        n <= self.limit
    }

    pub(crate) fn require(&self, n: u64, what: &'static str) -> Result<()> {
        if n > self.limit {
            Err(Error::Resource {
                what,
                requested: n,
                cap: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

fn prime_count_estimate(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}

/// Primes `p` with `lo <= p < hi`, ascending, via a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_range_capped(lo, hi, DEFAULT_SIEVE_CAP)
}

pub fn primes_in_range_capped(lo: u64, hi: u64, cap: u64) -> Result<Vec<u64>> {
    if hi > cap {
        return Err(Error::Resource {
            what: "segmented sieve range",
            requested: hi,
            cap,
        });
    }
    let lo = lo.max(2);
    if lo >= hi {
        return Ok(Vec::new());
    }
    let root = isqrt(hi - 1);
    let base = small_primes(root);
    let mut out = Vec::new();
    let mut seg = vec![true; SEGMENT_LEN as usize];
    let mut start = lo;
    while start < hi {
        let end = (start + SEGMENT_LEN).min(hi);
        let width = (end - start) as usize;
        seg[..width].fill(true);
        for &p in &base {
            let p2 = p * p;
            if p2 >= end {
                break;
            }
            let mut m = if p2 >= start {
                p2
            } else {
                start.div_ceil(p) * p
            };
            while m < end {
                seg[(m - start) as usize] = false;
                m += p;
            }
        }
        out.extend(
            seg[..width]
                .iter()
                .enumerate()
                .filter(|(_, &keep)| keep)
                .map(|(i, _)| start + i as u64),
        );
        start = end;
    }
    Ok(out)
}

/// Plain Eratosthenes up to and including `n`.
pub(crate) fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut mark = vec![true; n + 1];
    mark[0] = false;
    mark[1] = false;
    let mut i = 2;
    while i * i <= n {
        if mark[i] {
            let mut j = i * i;
            while j <= n {
                mark[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    mark.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Euler totient for every `n <= limit`, derived from an `SpfTable`.
pub fn totient_table(table: &SpfTable) -> Vec<u64> {
    let len = table.limit as usize + 1;
    let mut phi = vec![0u64; len];
    if len > 1 {
        phi[1] = 1;
    }
    for n in 2..len {
        let p = table.spf[n] as usize;
        let m = n / p;
        phi[n] = if m % p == 0 {
            phi[m] * p as u64
        } else {
            phi[m] * (p as u64 - 1)
        };
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_spf(n: u64) -> u64 {
        (2..=n).find(|d| n % d == 0).unwrap()
    }

    #[test]
    fn spf_small_table() {
        let t = SpfTable::build(10).unwrap();
        assert_eq!(t.raw(), &[0, 0, 2, 3, 2, 5, 2, 7, 2, 3, 2]);
        let t = SpfTable::build(2).unwrap();
        assert_eq!(t.spf(2), 2);
    }

    #[test]
    fn spf_matches_trial_division() {
        let t = SpfTable::build(97).unwrap();
        assert_eq!(t.spf(91), 7);
        for n in 2..=97 {
            assert_eq!(t.spf(n) as u64, trial_spf(n), "n = {n}");
        }
    }

    #[test]
    fn spf_cap_is_enforced() {
        let err = SpfTable::build_with_cap(1001, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource { cap: 1000, .. }));
        assert!(err.to_string().contains("1000"));
    }

    #[test]
    fn range_examples() {
        assert_eq!(primes_in_range(10, 30).unwrap(), vec![11, 13, 17, 19, 23, 29]);
        assert!(primes_in_range(14, 15).unwrap().is_empty());
        assert_eq!(primes_in_range(8, 21).unwrap(), vec![11, 13, 17, 19]);
        assert_eq!(primes_in_range(0, 3).unwrap(), vec![2]);
        assert!(primes_in_range(5, 5).unwrap().is_empty());
        assert!(primes_in_range_capped(0, 101, 100).is_err());
    }

    #[test]
    fn prime_counts() {
        for (x, pi) in [(100u64, 25usize), (10_000, 1229), (1_000_000, 78498)] {
            assert_eq!(primes_in_range(2, x).unwrap().len(), pi);
            // independent route: plain Eratosthenes
            assert_eq!(small_primes(x - 1).len(), pi);
        }
        let t = SpfTable::build(1_000_000).unwrap();
        assert_eq!(t.primes().len(), 78498);
    }

    #[test]
    fn segmented_matches_table_across_segments() {
        let t = SpfTable::build(400_000).unwrap();
        let lo = 123_457;
        let seg = primes_in_range(lo, 400_001).unwrap();
        let direct: Vec<u64> = (lo..=400_000).filter(|&n| t.is_prime(n)).collect();
        assert_eq!(seg, direct);
    }

    #[test]
    fn totients() {
        let t = SpfTable::build(1000).unwrap();
        let phi = totient_table(&t);
        for n in 1..=1000u64 {
            let brute = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
            assert_eq!(phi[n as usize], brute);
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }
}
