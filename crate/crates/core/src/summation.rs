//! Compensated (Kahan–Neumaier) accumulation of complex terms.

use num_complex::Complex64;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

/// A complex sum together with its term count and compensation residual.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SumValue {
    re: Neumaier,
    im: Neumaier,
    terms: u64,
}

impl SumValue {
    pub fn new() -> Self {
        Self::default()
    }

    /// The compensated value.
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.sum + self.re.comp, self.im.sum + self.im.comp)
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Pending correction not yet folded into the running sum.
    pub fn compensation(&self) -> Complex64 {
        Complex64::new(self.re.comp, self.im.comp)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }

    #[inline]
    pub fn push(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
        self.terms += 1;
    }

    /// Counts a term whose value is exactly zero without touching the sum.
    #[inline]
    pub fn push_zero(&mut self) {
        self.terms += 1;
    }

    pub fn merge(&mut self, other: &SumValue) {
        self.re.merge(other.re);
        self.im.merge(other.im);
        self.terms += other.terms;
    }

    /// Merges partial sums in slice order.
    pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a SumValue>) -> SumValue {
        let mut total = SumValue::new();
        for p in parts {
            total.merge(p);
        }
        total
    }
}

impl AddAssign<Complex64> for SumValue {
    fn add_assign(&mut self, z: Complex64) {
        self.push(z);
    }
}

impl FromIterator<Complex64> for SumValue {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = SumValue::new();
        for z in iter {
            s.push(z);
        }
        s
    }
}

/// Compensated sum of reals.
pub fn real_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for x in xs {
        acc.add(x);
    }
    acc.sum + acc.comp
}

/// Relative residual `|x - y| / max(|y|, 1)` used by all identity checks.
pub fn relative_residual(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}
