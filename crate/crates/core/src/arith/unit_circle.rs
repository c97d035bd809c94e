use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Largest modulus for which a full table of `e(j/q)` is materialized by default.
pub const DEFAULT_TABLE_THRESHOLD: u64 = 1 << 22;

/// `e(j/q) = exp(2πi j/q)` for `0 <= j < q`.
#[derive(Debug, Clone)]
pub struct UnitCircleTable {
    modulus: u64,
    values: Vec<Complex64>,
}

impl UnitCircleTable {
    /// Builds the table when `q <= DEFAULT_TABLE_THRESHOLD`.
    pub fn new(q: u64) -> Option<Self> {
        Self::with_threshold(q, DEFAULT_TABLE_THRESHOLD)
    }

    pub fn with_threshold(q: u64, threshold: u64) -> Option<Self> {
        if q == 0 || q > threshold {
            return None;
        }
        let values = (0..q).map(|j| unit_root(j, q)).collect();
        Some(Self { modulus: q, values })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `e(j/q)` for a residue `j < q`.
    #[inline]
    pub fn get(&self, j: u64) -> Complex64 {
        self.values[j as usize]
    }
}

/// `e(j/q)` computed directly for a reduced residue `0 <= j < q`.
///
/// The argument is folded into `[0, π/4]` with exact integer arithmetic and
/// rotated back by quarter turns, so the only rounding is one `sin_cos` of a
/// small angle.
pub fn unit_root(j: u64, q: u64) -> Complex64 {
    debug_assert!(j < q);
    if j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let eight_j = 8 * j as u128;
    let octant = (eight_j / q as u128) as u64;
    let rem = (eight_j % q as u128) as u64;
    // angle = octant·π/4 + (π/4)·rem/q
    let (quarter, folded, negate) = if octant % 2 == 0 {
        (octant / 2, rem, false)
    } else {
        ((octant + 1) / 2, q - rem, true)
    };
    let t = FRAC_PI_4 * (folded as f64 / q as f64);
    let (s, c) = t.sin_cos();
    let s = if negate { -s } else { s };
    match quarter % 4 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `e(j/q)` for any integer `j`; uses `table` when it matches `q`.
#[inline]
pub fn e_frac(j: i128, q: u64, table: Option<&UnitCircleTable>) -> Complex64 {
    let r = j.rem_euclid(q as i128) as u64;
    match table {
        Some(t) if t.modulus == q => t.get(r),
        _ => unit_root(r, q),
    }
}
