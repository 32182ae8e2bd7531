//! Floating-point support: compensated summation, exact phase reduction and
//! the unit character `e(x) = exp(2 pi i x)`.

use num_complex::Complex64;

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated complex accumulator (Kahan on both components).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sum with a fixed pairwise reduction tree. The tree shape depends only on
/// the length, so results are independent of thread count or chunking
/// decisions made by callers.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// `e(x) = exp(2 pi i x)`.
#[inline]
pub fn unit(x: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * x).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part of the exact product `n * alpha`, accurate to one ulp.
///
/// The rounded product `p = fl(n * alpha)` loses the low bits once
/// `n * alpha` is large; `fma` recovers them exactly as `e = n*alpha - p`,
/// and `frac(p)` itself is exact for nonnegative `p < 2^53`.
#[inline]
pub fn frac_of_product(n: f64, alpha: f64) -> f64 {
    let p = n * alpha;
    let e = n.mul_add(alpha, -p);
    ((p - p.floor()) + e).rem_euclid(1.0)
}

/// `e(n * alpha)` with the argument reduced exactly before the final sin/cos.
#[inline]
pub fn unit_of_product(n: f64, alpha: f64) -> Complex64 {
    unit(frac_of_product(n, alpha))
}

/// Distance from `x` to the nearest integer (metric on the circle R/Z).
#[inline]
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let f = (x - y).rem_euclid(1.0);
    f.min(1.0 - f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_adversarial_input() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-17);
        }
        assert!((k.value() - (1.0 + 1e-13)).abs() < 1e-16);
    }

    #[test]
    fn pairwise_matches_exact_on_small_input() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }

    #[test]
    fn frac_of_product_handles_large_n() {
        // fl(1/3) is off by ~1.9e-17, so the exact product of the two f64
        // inputs sits within n * 1.9e-17 < 2e-10 of a third
        let f = frac_of_product(9_999_999.0, 1.0 / 3.0);
        let nearest = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
            .iter()
            .map(|t| (f - t).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 5e-10, "frac {f} not near a third");

        // against slow exact reduction: frac(p) for p = k + g with small g
        let alpha = 0.5f64 + 2f64.powi(-30);
        let f = frac_of_product((1u64 << 20) as f64, alpha);
        // (2^20) * (1/2 + 2^-30) = 2^19 + 2^-10 exactly
        assert_eq!(f, 2f64.powi(-10));
    }

    #[test]
    fn circle_dist_wraps() {
        assert!((circle_dist(0.99, 0.01) - 0.02).abs() < 1e-15);
        assert_eq!(circle_dist(0.25, 0.25), 0.0);
        assert!((circle_dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_is_on_the_circle() {
        for i in 0..100 {
            let x = i as f64 * 0.013;
            let u = unit(x);
            assert!((u.norm() - 1.0).abs() < 1e-14);
        }
    }
}
