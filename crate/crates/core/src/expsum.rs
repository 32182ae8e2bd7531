//! The trigonometric polynomial `S(alpha) = sum_{n<=N} a_n e(n alpha)`, its
//! mean value `Z = sum |a_n|^2`, and the sieve sum over Farey fractions with
//! square moduli.

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::arith::gcd;
use crate::farey::block_q_range;
use crate::numeric::{pairwise_sum, unit, unit_of_product, Kahan, KahanComplex};
use crate::{Error, Result};

/// Steps between exact re-anchorings of the rotation recurrence in `eval_s`.
const RENORM_INTERVAL: usize = 1 << 10;

/// Complex coefficients `a_1 ... a_N` with the cached mean value `Z`.
#[derive(Debug, Clone)]
pub struct CoefficientSequence {
    coeffs: Vec<Complex64>,
    z_value: f64,
}

impl CoefficientSequence {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroInput { what: "N" });
        }
        let mut z = Kahan::new();
        for a in &coeffs {
            z.add(a.norm_sqr());
        }
        Ok(Self {
            coeffs,
            z_value: z.value(),
        })
    }

    /// `a_n = 1` for all `n <= N`.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(1.0, 0.0); n])
    }

    /// Unit-modulus coefficients with uniform random phases; `Z = N` exactly.
    ///
    /// Phases are built from the raw ChaCha8 word stream so the sequence for
    /// a given seed is reproducible independently of any distribution-layer
    /// changes.
    pub fn random_phases(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroInput { what: "N" });
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..n)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                unit(u)
            })
            .collect();
        Ok(Self {
            coeffs,
            z_value: n as f64,
        })
    }

    /// Parse the one-complex-per-line text format: `re im` per line,
    /// whitespace separated; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (re, im) = match (parts.next(), parts.next(), parts.next()) {
                (Some(re), Some(im), None) => (re, im),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("expected `re im`, got `{line}`"),
                    })
                }
            };
            let re: f64 = re.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("{e}"),
            })?;
            let im: f64 = im.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("{e}"),
            })?;
            coeffs.push(Complex64::new(re, im));
        }
        Self::new(coeffs)
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Cached `Z = sum |a_n|^2`.
    pub fn z_value(&self) -> f64 {
        self.z_value
    }

    /// Recompute `Z` from scratch (used by the cache-consistency tests).
    pub fn recompute_z(&self) -> f64 {
        let mut z = Kahan::new();
        for a in &self.coeffs {
            z.add(a.norm_sqr());
        }
        z.value()
    }
}

/// Evaluate `S(alpha) = sum_{n=1}^{N} a_n e(n alpha)`.
///
/// `e(n alpha)` is advanced by one rotation per term and re-anchored every
/// `2^10` steps from an exactly reduced argument, keeping the phase drift
/// below 1e-10 out to `N = 10^7`. Accumulation is compensated.
pub fn eval_s(seq: &CoefficientSequence, alpha: f64) -> Complex64 {
    let w = unit(alpha);
    let mut rot = w;
    let mut acc = KahanComplex::new();
    for (idx, a) in seq.coeffs.iter().enumerate() {
        let n = idx + 1;
        if n % RENORM_INTERVAL == 0 {
            rot = unit_of_product(n as f64, alpha);
        }
        acc.add(a * rot);
        rot *= w;
    }
    acc.value()
}

/// The sieve sum `sum_{q <= q_max} sum_{a=1, (a,q)=1}^{q^2} |S(a/q^2)|^2`.
///
/// Moduli are processed in parallel and reduced with a fixed pairwise tree,
/// so the result does not depend on the number of worker threads.
pub fn sieve_sum_squares(seq: &CoefficientSequence, q_max: u64) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::ZeroInput { what: "q_max" });
    }
    if q_max > 1_000_000 {
        return Err(Error::OutOfRange {
            what: "q_max",
            value: q_max as f64,
            range: "[1, 1e6]",
        });
    }
    let per_q: Vec<f64> = (1..=q_max)
        .into_par_iter()
        .map(|q| modulus_contribution(seq, q))
        .collect();
    Ok(pairwise_sum(&per_q))
}

/// The sieve sum restricted to the dyadic block `q0 <= q^2 <= 2 q0`.
pub fn sieve_sum_dyadic(seq: &CoefficientSequence, q0: f64) -> Result<f64> {
    let (qmin, qmax) = block_q_range(q0)?;
    if qmin > qmax {
        return Ok(0.0);
    }
    let per_q: Vec<f64> = (qmin..=qmax)
        .into_par_iter()
        .map(|q| modulus_contribution(seq, q))
        .collect();
    Ok(pairwise_sum(&per_q))
}

fn modulus_contribution(seq: &CoefficientSequence, q: u64) -> f64 {
    let qq = q * q;
    let denom = qq as f64;
    let mut acc = Kahan::new();
    for a in 1..=qq {
        if gcd(a, q) == 1 {
            acc.add(eval_s(seq, a as f64 / denom).norm_sqr());
        }
    }
    acc.value()
}

/// Block bases whose closed blocks `[q0, 2 q0]` cover every square in
/// `[1, (2 * last base)]` exactly once: after the initial `[1, 2]` each base
/// is the previous upper end plus one half, so consecutive blocks are
/// separated by a gap `(m, m + 1/2)` containing no integer.
///
/// Returns the bases and the largest root modulus covered (at least `q_max`).
pub fn dyadic_cover(q_max: u64) -> Result<(Vec<f64>, u64)> {
    if q_max == 0 {
        return Err(Error::ZeroInput { what: "q_max" });
    }
    let target = (q_max * q_max) as f64;
    let mut bases = vec![1.0f64];
    let mut lo = 1.0f64;
    while 2.0 * lo < target {
        lo = 2.0 * lo + 0.5;
        bases.push(lo);
    }
    let q_end = ((2.0 * lo).sqrt().floor()) as u64;
    let q_end = if ((q_end + 1) * (q_end + 1)) as f64 <= 2.0 * lo {
        q_end + 1
    } else {
        q_end
    };
    Ok((bases, q_end))
}

/// Average of `|S(j/m)|^2` over `j = 0..m-1`; equals `Z` once `m > N` by
/// discrete orthogonality.
pub fn parseval_average(seq: &CoefficientSequence, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroInput { what: "m" });
    }
    let per_j: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| eval_s(seq, j as f64 / m as f64).norm_sqr())
        .collect();
    Ok(pairwise_sum(&per_j) / m as f64)
}
