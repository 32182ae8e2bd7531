//! Fourier-analytic toolkit: the window kernel `phi` and its transform,
//! numerical verification of the transform pair and of Poisson summation,
//! and oscillatory integrals with first/second-derivative-test bounds.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::numeric::{unit, Kahan, KahanComplex};
use crate::{Error, Result};

/// `phi(x) = (sin(pi x) / (2x))^2`, extended continuously by
/// `phi(0) = pi^2 / 4`; nonnegative, and `>= 1` on `|x| <= 1/2`.
pub fn phi(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // (pi^2/4) * (1 - y/3 + 2y^2/45 - y^3/315), y = (pi x)^2;
        // truncation below 1e-28 in this range
        let y = (PI * x) * (PI * x);
        return PI * PI / 4.0 * (1.0 - y / 3.0 + 2.0 * y * y / 45.0 - y * y * y / 315.0);
    }
    let s = (PI * x).sin() / (2.0 * x);
    s * s
}

/// The Fourier transform of `phi`: `(pi^2/4) * max(1 - |s|, 0)`.
pub fn phi_hat(s: f64) -> f64 {
    PI * PI / 4.0 * (1.0 - s.abs()).max(0.0)
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre 15-point nodes and weights on [-1, 1], computed once by
/// Newton iteration on P_15.
fn gl15() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 15;
        (1..=n)
            .map(|i| {
                let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
                for _ in 0..64 {
                    let (p, dp) = legendre_and_deriv(n, x);
                    let dx = p / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, dp) = legendre_and_deriv(n, x);
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn gl15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in gl15() {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

fn adaptive_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> (Complex64, f64) {
    let whole = gl15_complex(f, a, b);
    let mid = 0.5 * (a + b);
    let refined = gl15_complex(f, a, mid) + gl15_complex(f, mid, b);
    let err = (whole - refined).norm();
    if err <= tol || depth == 0 {
        (refined, err)
    } else {
        let (l, el) = adaptive_complex(f, a, mid, 0.5 * tol, depth - 1);
        let (r, er) = adaptive_complex(f, mid, b, 0.5 * tol, depth - 1);
        (l + r, el + er)
    }
}

/// Integrate over [a, b] split into `n_panels` equal panels (callers align
/// panels with the integrand's oscillation period), each refined adaptively.
/// Returns the value and the summed error estimate.
fn integrate_panels<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    n_panels: usize,
    tol: f64,
) -> (Complex64, f64) {
    let n = n_panels.max(1);
    let width = (b - a) / n as f64;
    let panel_tol = tol / n as f64;
    let mut acc = KahanComplex::new();
    let mut err = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * width;
        let hi = if i == n - 1 { b } else { a + (i + 1) as f64 * width };
        let (v, e) = adaptive_complex(f, lo, hi, panel_tol, 20);
        acc.add(v);
        err += e;
    }
    (acc.value(), err)
}

// ---------------------------------------------------------------------------
// transform pair
// ---------------------------------------------------------------------------

/// Numerical Fourier transform `int_{-T}^{T} phi(y) e(s y) dy` by adaptive
/// panel quadrature; the imaginary part vanishes by symmetry, so the integral
/// is evaluated as `2 int_0^T phi(y) cos(2 pi s y) dy`. The tail beyond the
/// cutoff is below `1/(2T)` (since `phi(y) <= 1/(4 y^2)`), which is added to
/// the error estimate checked against `tol`.
pub fn numeric_fourier_phi(s: f64, cutoff: f64, tol: f64) -> Result<f64> {
    if !(cutoff >= 1e3) {
        return Err(Error::OutOfRange {
            what: "cutoff",
            value: cutoff,
            range: "[1e3, inf)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            what: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let freq = s.abs().max(1.0);
    let n_panels = (2.0 * cutoff * freq).ceil() as usize;
    let f = |y: f64| Complex64::new(phi(y) * (2.0 * PI * s * y).cos(), 0.0);
    let (value, quad_err) = integrate_panels(&f, 0.0, cutoff, n_panels, 0.25 * tol);
    let estimate = 2.0 * quad_err + 0.5 / cutoff;
    if estimate > tol {
        return Err(Error::NonConvergence {
            estimate,
            tolerance: tol,
        });
    }
    Ok(2.0 * value.re)
}

// ---------------------------------------------------------------------------
// Poisson summation spot check
// ---------------------------------------------------------------------------

/// Both sides of `sum_n phi((n - c)/w) = w sum_m e(m c) phi_hat(m w)`.
#[derive(Debug, Clone, Copy)]
pub struct PoissonCheck {
    pub w: f64,
    pub c: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    /// Rigorous bound on the truncation error of the reported `lhs`.
    pub err_bound: f64,
}

/// Euler-Maclaurin tail `sum_{k>=0} 1/(x+k)^2` for large `x`.
fn inv_square_tail(x: f64) -> f64 {
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    ix + 0.5 * ix2 + ix * ix2 / 6.0 - ix * ix2 * ix2 / 30.0 + ix * ix2 * ix2 * ix2 / 42.0
}

/// Tail `sum_{n > t} phi((n - c)/w)`, with a rigorous error bound.
///
/// Through `phi(x) = (1 - cos(2 pi x)) / (8 x^2)` the slowly decaying
/// `1/(8x^2)` part sums to a trigamma value; the oscillating part telescopes
/// (Abel summation) below `2 / (|sin(pi/w)| t^2)` unless `1/w` is an integer,
/// in which case its cosine factor is constant and the part sums exactly.
fn phi_tail(t: u64, c: f64, w: f64) -> (f64, f64) {
    let x0 = t as f64 + 1.0 - c;
    let base = inv_square_tail(x0);
    let m = (1.0 / w).round();
    let scale = w * w / 8.0;
    if (1.0 / w - m).abs() < 1e-12 {
        let cosc = (2.0 * PI * m * c).cos();
        (scale * (1.0 - cosc) * base, scale * 1e-12)
    } else {
        let partial_sum_cap = 1.0 / (PI / w).sin().abs();
        (scale * base, scale * 2.0 * partial_sum_cap / (x0 * x0))
    }
}

/// Verify the Poisson identity for the kernel: the spatial side is summed
/// directly over `|n| <= 2*10^5` plus analytic tails; the frequency side is
/// a finite sum because `phi_hat` is supported on `[-1, 1]`.
pub fn poisson_check(w: f64, c: f64) -> Result<PoissonCheck> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::OutOfRange {
            what: "w",
            value: w,
            range: "(0, inf)",
        });
    }
    const TRUNC: u64 = 200_000;
    let t = TRUNC as i64;
    let mut lhs = Kahan::new();
    for n in -t..=t {
        lhs.add(phi((n as f64 - c) / w));
    }
    let (tail_pos, err_pos) = phi_tail(TRUNC, c, w);
    let (tail_neg, err_neg) = phi_tail(TRUNC, -c, w);
    let lhs = lhs.value() + tail_pos + tail_neg;

    let m_max = (1.0 / w).ceil() as i64 + 1;
    let mut rhs = phi_hat(0.0);
    for m in 1..=m_max {
        rhs += 2.0 * (2.0 * PI * m as f64 * c).cos() * phi_hat(m as f64 * w);
    }
    let rhs = w * rhs;

    Ok(PoissonCheck {
        w,
        c,
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
        err_bound: err_pos + err_neg,
    })
}

// ---------------------------------------------------------------------------
// oscillatory integrals
// ---------------------------------------------------------------------------

fn validate_oscillatory(r_star: u64, z: f64, q0: f64) -> Result<()> {
    if r_star == 0 {
        return Err(Error::ZeroInput { what: "r_star" });
    }
    if !(q0 >= 1.0) || !q0.is_finite() {
        return Err(Error::OutOfRange {
            what: "q0",
            value: q0,
            range: "[1, inf)",
        });
    }
    if !z.is_finite() {
        return Err(Error::OutOfRange {
            what: "z",
            value: z,
            range: "finite",
        });
    }
    Ok(())
}

/// `int_{q0}^{2 q0} e(j y z - l sqrt(y) / r_star) dy` by adaptive quadrature
/// on panels no wider than half a phase period.
pub fn oscillatory_integral(
    j: i64,
    l: i64,
    r_star: u64,
    z: f64,
    q0: f64,
    tol: f64,
) -> Result<Complex64> {
    validate_oscillatory(r_star, z, q0)?;
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            what: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let jf = j as f64;
    let lf = l as f64;
    let rf = r_star as f64;
    let phase_span =
        jf.abs() * z.abs() * q0 + lf.abs() * ((2.0 * q0).sqrt() - q0.sqrt()) / rf;
    if phase_span > 5e6 {
        return Err(Error::Unsupported(format!(
            "oscillatory phase span {phase_span:.1e} too large for desk-scale quadrature"
        )));
    }
    let n_panels = (2.0 * phase_span).ceil() as usize + 4;
    let f = |y: f64| unit(jf * y * z - lf * y.sqrt() / rf);
    let (value, err) = integrate_panels(&f, q0, 2.0 * q0, n_panels, 0.5 * tol);
    if err > tol {
        return Err(Error::NonConvergence {
            estimate: err,
            tolerance: tol,
        });
    }
    Ok(value)
}

/// The case bound for `|int_{q0}^{2 q0} e(j y z - l sqrt(y)/r_star) dy|`,
/// with explicit constants:
///
/// * `(0, 0)`: the integrand is 1, the integral equals `q0`;
/// * `(j != 0, 0)`: exact linear-phase evaluation, `1 / (pi |j| z)`;
/// * `(0, l != 0)`: first-derivative test with `|F'| >= pi |l| / (r* sqrt(2 q0))`
///   and monotone `F'`, rounded up to the constant 4: `4 sqrt(q0) r* / (pi |l|)`;
/// * `(j != 0, l != 0)`: second-derivative test with
///   `|F''| >= pi^2 |l| / (r* (2 q0)^{3/2})`, rounded up to the constant 8:
///   `8 sqrt(r*) q0^{3/4} / sqrt(|l|)`.
pub fn integral_case_bounds(j: i64, l: i64, r_star: u64, z: f64, q0: f64) -> Result<f64> {
    validate_oscillatory(r_star, z, q0)?;
    let rf = r_star as f64;
    Ok(match (j, l) {
        (0, 0) => q0,
        (_, 0) => 1.0 / (PI * (j.unsigned_abs() as f64) * z.abs()),
        (0, _) => 4.0 * q0.sqrt() * rf / (PI * l.unsigned_abs() as f64),
        (_, _) => 8.0 * rf.sqrt() * q0.powf(0.75) / (l.unsigned_abs() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_special_values() {
        assert!((phi(0.0) - PI * PI / 4.0).abs() < 1e-15);
        assert!((phi(0.5) - 1.0).abs() < 1e-15);
        for m in 1..=8 {
            assert!(phi(m as f64).abs() < 1e-28);
            assert!(phi(-(m as f64)).abs() < 1e-28);
        }
    }

    #[test]
    fn phi_series_consistent_with_formula() {
        // compare the small-|x| series against the direct formula just
        // outside the switchover
        for i in 1..100 {
            let x = 1.0001e-4 * i as f64 / 100.0 + 1.0e-4;
            let direct = {
                let s = (PI * x).sin() / (2.0 * x);
                s * s
            };
            assert!((phi(x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_at_least_one_inside_half_window() {
        for i in 0..=1000 {
            let x = -0.5 + i as f64 / 1000.0;
            assert!(phi(x) >= 1.0, "phi({x}) = {} < 1", phi(x));
        }
    }

    #[test]
    fn phi_hat_shape() {
        assert!((phi_hat(0.0) - PI * PI / 4.0).abs() < 1e-15);
        assert_eq!(phi_hat(2.0), 0.0);
        assert_eq!(phi_hat(-1.0), 0.0);
        assert!((phi_hat(0.5) - PI * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn gl15_integrates_polynomials_exactly() {
        // degree <= 29 is exact for a 15-point rule
        let f = |x: f64| Complex64::new(x.powi(10) - 3.0 * x.powi(3) + 1.0, 0.0);
        let got = gl15_complex(&f, 0.0, 2.0);
        let expect = 2.0f64.powi(11) / 11.0 - 3.0 / 4.0 * 2.0f64.powi(4) + 2.0;
        assert!((got.re - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn fourier_pair_at_moderate_cutoff() {
        for &s in &[0.0, 0.5, 2.0] {
            let got = numeric_fourier_phi(s, 1e3, 5e-3).unwrap();
            assert!(
                (got - phi_hat(s)).abs() < 2e-3,
                "s={s}: {got} vs {}",
                phi_hat(s)
            );
        }
    }

    #[test]
    fn fourier_rejects_bad_input() {
        assert!(numeric_fourier_phi(0.0, 10.0, 1e-3).is_err());
        assert!(numeric_fourier_phi(0.0, 1e3, 0.0).is_err());
    }

    #[test]
    fn poisson_identity_spot_checks() {
        for &w in &[0.3, 1.0, 3.0] {
            for &c in &[0.0, 0.37] {
                let check = poisson_check(w, c).unwrap();
                assert!(
                    check.abs_diff <= 1e-6,
                    "w={w}, c={c}: |{} - {}| = {:e}",
                    check.lhs,
                    check.rhs,
                    check.abs_diff
                );
            }
        }
    }

    #[test]
    fn zero_frequency_integral_is_the_block_length() {
        for &q0 in &[1.0, 100.0, 1000.0] {
            let v = oscillatory_integral(0, 0, 1, 0.0, q0, 1e-6).unwrap();
            assert!((v - Complex64::new(q0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn linear_phase_matches_closed_form() {
        let (z, q0) = (0.013, 100.0);
        let v = oscillatory_integral(1, 0, 1, z, q0, 1e-9).unwrap();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let expect = (unit(2.0 * q0 * z) - unit(q0 * z)) / (two_pi_i * z);
        assert!((v - expect).norm() < 1e-8, "{v} vs {expect}");
    }

    #[test]
    fn sqrt_phase_matches_antiderivative() {
        // l-only phase: substitute u = sqrt(y), integrate u e(a u) by parts
        let q0 = 100.0;
        let v = oscillatory_integral(0, 1, 1, 0.0, q0, 1e-9).unwrap();
        let a = -1.0;
        let c1 = 1.0 / (Complex64::new(0.0, 2.0 * PI * a));
        let anti = |u: f64| unit(a * u) * (c1 * u - c1 * c1);
        let expect = 2.0 * (anti((2.0 * q0).sqrt()) - anti(q0.sqrt()));
        assert!((v - expect).norm() < 1e-8, "{v} vs {expect}");
    }

    #[test]
    fn case_bound_values() {
        assert_eq!(integral_case_bounds(0, 0, 1, 0.5, 100.0).unwrap(), 100.0);
        let b = integral_case_bounds(1, 0, 1, 0.013, 100.0).unwrap();
        assert!((b - 1.0 / (PI * 0.013)).abs() < 1e-12 * b);
        let b = integral_case_bounds(0, 2, 3, 0.0, 100.0).unwrap();
        assert!((b - 4.0 * 10.0 * 3.0 / (PI * 2.0)).abs() < 1e-12 * b);
        let b = integral_case_bounds(1, 4, 2, 0.01, 100.0).unwrap();
        assert!((b - 8.0 * 2f64.sqrt() * 100f64.powf(0.75) / 2.0).abs() < 1e-12 * b);
    }

    #[test]
    fn case_bounds_dominate_small_grid() {
        for j in -3i64..=3 {
            for l in -3i64..=3 {
                for &r_star in &[1u64, 2] {
                    let (z, q0) = (0.01, 100.0);
                    let v = oscillatory_integral(j, l, r_star, z, q0, 1e-8)
                        .unwrap()
                        .norm();
                    let bound = integral_case_bounds(j, l, r_star, z, q0).unwrap();
                    assert!(
                        v <= bound.min(q0) + 1e-6,
                        "|I| = {v} > bound {bound} at (j={j}, l={l}, r*={r_star})"
                    );
                }
            }
        }
    }
}
