use crate::error::{Error, Result};

#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `a * b mod q` for `a, b < q`, with a 128-bit intermediate when `q` exceeds 32 bits.
#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    if q <= u32::MAX as u64 {
        a * b % q
    } else {
        ((a as u128 * b as u128) % q as u128) as u64
    }
}

/// Canonical residue of a signed integer.
#[inline]
pub fn reduce(n: i128, q: u64) -> u64 {
    n.rem_euclid(q as i128) as u64
}

/// Returns `(g, x)` with `g = gcd(r, q)` and `x*r ≡ g (mod q)`, `x` in `[0, q)`.
fn ext_gcd(r: u64, q: u64) -> (u64, u64) {
    let (mut old_r, mut cur_r) = (r as i128, q as i128);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let quot = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - quot * cur_r);
        (old_s, cur_s) = (cur_s, old_s - quot * cur_s);
    }
    (old_r as u64, reduce(old_s, q))
}

/// The residue `r` in `[0, q)` with `r*n ≡ 1 (mod q)`. For `q = 1` this is 0.
pub fn mod_inverse(n: i128, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if q == 1 {
        return Ok(0);
    }
    let r = reduce(n, q);
    let (g, x) = ext_gcd(r, q);
    if g != 1 {
        return Err(Error::NotInvertible { n, q, gcd: g });
    }
    Ok(x)
}

/// Elementwise inverses using prefix products and a single extended gcd.
pub fn batch_mod_inverse(ns: &[u64], q: u64) -> Result<Vec<u64>> {
    let mut out = vec![0u64; ns.len()];
    batch_mod_inverse_into(ns, q, &mut out)?;
    Ok(out)
}

/// As [`batch_mod_inverse`], writing into `out` (which must have `ns.len()` slots).
/// `out` doubles as the prefix-product scratch buffer.
pub fn batch_mod_inverse_into(ns: &[u64], q: u64, out: &mut [u64]) -> Result<()> {
    assert_eq!(ns.len(), out.len());
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if ns.is_empty() {
        return Ok(());
    }
    if q == 1 {
        out.fill(0);
        return Ok(());
    }
    // out[i] = n_0 * ... * n_i
    let mut acc = 1u64;
    for (slot, &n) in out.iter_mut().zip(ns) {
        acc = mul_mod(acc, n % q, q);
        *slot = acc;
    }
    let (g, mut running) = ext_gcd(acc, q);
    if g != 1 {
        let index = ns.iter().position(|&n| gcd(n % q, q) != 1).unwrap();
        return Err(Error::NotInvertibleAt {
            index,
            q,
            gcd: gcd(ns[index] % q, q),
        });
    }
    // running = (n_0 * ... * n_i)^{-1} at the top of each step
    for i in (1..ns.len()).rev() {
        let inv = mul_mod(running, out[i - 1], q);
        running = mul_mod(running, ns[i] % q, q);
        out[i] = inv;
    }
    out[0] = running;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_inverse(n: u64, q: u64) -> Option<u64> {
        (0..q).find(|&r| (r as u128 * n as u128) % q as u128 == 1 % q as u128)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        for q in 2..50 {
            assert_eq!(mod_inverse(1, q).unwrap(), 1);
        }
        assert_eq!(mod_inverse(10, 17).unwrap(), brute_inverse(10, 17).unwrap());
        assert_eq!(mod_inverse(10, 17).unwrap(), 12);
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
    }

    #[test]
    fn inverse_rejects_common_factor() {
        let err = mod_inverse(6, 9).unwrap_err();
        assert_eq!(err, Error::NotInvertible { n: 6, q: 9, gcd: 3 });
        let err = mod_inverse(0, 9).unwrap_err();
        assert!(matches!(err, Error::NotInvertible { gcd: 9, .. }));
    }

    #[test]
    fn batch_examples() {
        // elementwise extended-gcd oracle
        let want: Vec<u64> = [2u64, 3, 4].iter().map(|&n| brute_inverse(n, 7).unwrap()).collect();
        assert_eq!(want, vec![4, 5, 2]);
        assert_eq!(batch_mod_inverse(&[2, 3, 4], 7).unwrap(), want);
        assert_eq!(batch_mod_inverse(&[1], 97).unwrap(), vec![1]);
        assert_eq!(batch_mod_inverse(&[5, 7, 11], 6).unwrap(), vec![5, 1, 5]);
        assert!(batch_mod_inverse(&[], 6).unwrap().is_empty());
        assert_eq!(batch_mod_inverse(&[4, 9], 1).unwrap(), vec![0, 0]);
    }

    #[test]
    fn batch_reports_first_bad_index() {
        let err = batch_mod_inverse(&[1, 5, 4, 6, 3], 6).unwrap_err();
        assert_eq!(err, Error::NotInvertibleAt { index: 2, q: 6, gcd: 2 });
    }

    #[test]
    fn wide_modulus() {
        let q = (1u64 << 62) - 57;
        let n = 0x1234_5678_9abc_def1u64 % q;
        let inv = mod_inverse(n as i128, q).unwrap();
        assert_eq!(mul_mod(n, inv, q), 1);
        let ns = [n, 3, 5, q - 1];
        let b = batch_mod_inverse(&ns, q).unwrap();
        for (x, y) in ns.iter().zip(&b) {
            assert_eq!(mul_mod(*x, *y, q), 1);
        }
    }
}
