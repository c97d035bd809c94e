use super::modular::gcd;
use super::sieve::SpfTable;

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

/// Divisor count, totient and Möbius value of one integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithmeticValues {
    pub tau: u64,
    pub phi: u64,
    pub mu: i8,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn value(&self) -> u128 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    pub fn tau(&self) -> u64 {
        self.pairs.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn phi(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn mu(&self) -> i8 {
        if self.pairs.iter().any(|&(_, e)| e >= 2) {
            0
        } else if self.pairs.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    pub fn radical(&self) -> u64 {
        self.pairs.iter().map(|&(p, _)| p).product()
    }

    pub fn arithmetic_values(&self) -> ArithmeticValues {
        ArithmeticValues {
            tau: self.tau(),
            phi: self.phi(),
            mu: self.mu(),
        }
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.pairs {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match pairs.last_mut() {
                Some((last, e)) if *last == p => *e += 1,
                _ => pairs.push((p, 1)),
            }
        }
        Self { pairs }
    }
}

/// Factorizes `n >= 1`. Uses the table when it covers `n`, otherwise trial
/// division followed by Miller–Rabin and Pollard–Brent splitting.
pub fn factorize(n: u64, table: Option<&SpfTable>) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    match table {
        Some(t) if t.covers(n) => factorize_with_table(n, t),
        _ => factorize_general(n),
    }
}

pub fn arithmetic_functions(n: u64) -> ArithmeticValues {
    factorize(n, None).arithmetic_values()
}

pub(crate) fn factorize_with_table(mut n: u64, t: &SpfTable) -> Factorization {
    let mut pairs = Vec::new();
    while n > 1 {
        let p = t.spf(n) as u64;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        pairs.push((p, e));
    }
    Factorization { pairs }
}

const TRIAL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn factorize_general(mut n: u64) -> Factorization {
    let mut primes = Vec::new();
    for &p in &TRIAL_PRIMES {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    Factorization::from_primes(primes)
}

#[inline]
fn mul_mod_wide(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_wide(acc, base, m);
        }
        base = mul_mod_wide(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &TRIAL_PRIMES[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_wide(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_wide(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod_wide(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
