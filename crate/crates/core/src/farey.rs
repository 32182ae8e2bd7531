//! Farey fractions with square moduli: enumeration of the dyadic block
//! `Q0 <= q^2 <= 2 Q0`, counting in closed circular windows, the exact
//! maximum window count, Dirichlet rational approximation, and the set of
//! square quotients `q^2 / t` inside a short interval.

use crate::arith::{gcd, split_square_divisor};
use crate::numeric::circle_dist;
use crate::{Error, Result};

/// A reduced fraction `a / q^2` identified by its root modulus `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FareyFraction {
    a: u64,
    q: u64,
}

impl FareyFraction {
    pub fn new(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroInput { what: "q" });
        }
        let qq = q.checked_mul(q).ok_or(Error::Overflow {
            op: "FareyFraction::new",
        })?;
        if a == 0 || a > qq {
            return Err(Error::OutOfRange {
                what: "a",
                value: a as f64,
                range: "[1, q^2]",
            });
        }
        let g = gcd(a, q);
        if g != 1 {
            return Err(Error::NotCoprime {
                what: "FareyFraction::new",
                gcd: g,
            });
        }
        Ok(Self { a, q })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn denominator(&self) -> u64 {
        self.q * self.q
    }

    pub fn value(&self) -> f64 {
        self.a as f64 / (self.q * self.q) as f64
    }

    /// Position on the circle R/Z in `[0, 1)`. The endpoint fraction
    /// `q^2 / q^2 = 1` (only `1/1`, since `gcd(q^2, q) = q`) is identified
    /// with 0.
    pub fn circle_pos(&self) -> f64 {
        if self.a == self.denominator() {
            0.0
        } else {
            self.value()
        }
    }

    /// Exact order by value via cross multiplication; no floating ties.
    pub fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = self.a as u128 * (other.q as u128 * other.q as u128);
        let rhs = other.a as u128 * (self.q as u128 * self.q as u128);
        lhs.cmp(&rhs)
    }
}

/// Root moduli `q` with `q0 <= q^2 <= 2 q0`; empty range gives `(1, 0)`.
///
/// `q0` is capped at 1e12 so every `q^2` involved stays below 2^53 and the
/// float comparisons against `q0` are exact.
pub fn block_q_range(q0: f64) -> Result<(u64, u64)> {
    if !(1.0..=1e12).contains(&q0) {
        return Err(Error::OutOfRange {
            what: "q0",
            value: q0,
            range: "[1, 1e12]",
        });
    }
    let mut qmin = (q0.sqrt().floor() as u64).max(1);
    while qmin > 1 && ((qmin - 1) * (qmin - 1)) as f64 >= q0 {
        qmin -= 1;
    }
    while ((qmin * qmin) as f64) < q0 {
        qmin += 1;
    }
    let mut qmax = ((2.0 * q0).sqrt().floor() as u64).max(1);
    while ((qmax + 1) * (qmax + 1)) as f64 <= 2.0 * q0 {
        qmax += 1;
    }
    while qmax > 0 && ((qmax * qmax) as f64) > 2.0 * q0 {
        qmax -= 1;
    }
    Ok((qmin, qmax))
}

/// One dyadic block of Farey fractions, sorted by value, with circle
/// positions cached for window counting. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FareyBlock {
    q0: f64,
    fractions: Vec<FareyFraction>,
    positions: Vec<f64>,
}

impl FareyBlock {
    /// Enumerate exactly the fractions `a/q^2` with `q0 <= q^2 <= 2 q0`,
    /// `1 <= a <= q^2` and `gcd(a, q) = 1`.
    pub fn enumerate(q0: f64) -> Result<Self> {
        let (qmin, qmax) = block_q_range(q0)?;
        let mut fractions = Vec::new();
        for q in qmin..=qmax {
            let qq = q * q;
            for a in 1..=qq {
                if gcd(a, q) == 1 {
                    fractions.push(FareyFraction { a, q });
                }
            }
        }
        fractions.sort_by(|x, y| x.cmp_exact(y));
        let mut positions: Vec<f64> = fractions.iter().map(FareyFraction::circle_pos).collect();
        positions.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(Self {
            q0,
            fractions,
            positions,
        })
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn fractions(&self) -> &[FareyFraction] {
        &self.fractions
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    /// Number of block fractions within circle distance `delta` of `alpha`
    /// (closed window; boundary ties included).
    pub fn count_in_interval(&self, alpha: f64, delta: f64) -> Result<u64> {
        validate_delta(delta)?;
        Ok(self
            .positions
            .iter()
            .filter(|&&p| in_window(p, alpha, delta))
            .count() as u64)
    }

    /// Exact maximum of `count_in_interval` over all window centers.
    ///
    /// The count as a function of the center is piecewise constant and, for
    /// closed windows, attains its maximum when the window boundary sits on a
    /// fraction; sweeping centers at every fraction and at every fraction
    /// plus `delta` with two pointers is therefore exhaustive.
    pub fn max_window_count(&self, delta: f64) -> Result<WindowCount> {
        validate_delta(delta)?;
        if self.positions.is_empty() {
            return Ok(WindowCount {
                delta,
                q0: self.q0,
                max_count: 0,
                argmax_alpha: 0.0,
            });
        }
        let mut anchors = Vec::with_capacity(2 * self.positions.len());
        let shifted = self.positions.iter().map(|&p| p + delta);
        let mut it_a = self.positions.iter().copied().peekable();
        let mut it_b = shifted.peekable();
        while let (Some(&x), Some(&y)) = (it_a.peek(), it_b.peek()) {
            if x <= y {
                anchors.push(x);
                it_a.next();
            } else {
                anchors.push(y);
                it_b.next();
            }
        }
        anchors.extend(it_a);
        anchors.extend(it_b);
        let (max_count, argmax_alpha) = sweep_max(&self.positions, delta, &anchors);
        Ok(WindowCount {
            delta,
            q0: self.q0,
            max_count,
            argmax_alpha,
        })
    }
}

fn validate_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::OutOfRange {
            what: "delta",
            value: delta,
            range: "(0, 1/2]",
        });
    }
    Ok(())
}

/// Boundary ties are part of the closed window, so the comparison carries a
/// 1e-12 cushion: forming a window edge like `value + delta` rounds by an
/// ulp, which would otherwise drop exact ties. Distinct fractions at desk
/// scale are at least `1/(2 q0)^2 ~ 2.5e-9` apart, so the cushion can never
/// pull in a second point.
const WINDOW_TIE_EPS: f64 = 1e-12;

#[inline]
pub(crate) fn in_window(pos: f64, alpha: f64, delta: f64) -> bool {
    circle_dist(pos, alpha) <= delta + WINDOW_TIE_EPS
}

/// Two-pointer sweep over weakly increasing anchors. `positions` is sorted;
/// windows are the closed arcs of radius `delta` around each anchor, and the
/// pointers track the contiguous run of in-window points, wrapping via index
/// arithmetic. The short backward guards absorb one-ulp rounding jitter at
/// window boundaries so the per-anchor count agrees exactly with a linear
/// scan of the same predicate.
fn sweep_max(positions: &[f64], delta: f64, anchors: &[f64]) -> (u64, f64) {
    let n = positions.len();
    let at = |k: usize| positions[k % n];
    let mut s = 0usize; // unwrapped inclusive start
    let mut e = 0usize; // unwrapped exclusive end, s <= e <= s + n
    let mut best_count = 0u64;
    let mut best_alpha = anchors[0];
    for &a in anchors {
        while s < e && !in_window(at(s), a, delta) {
            s += 1;
        }
        if s == e {
            let mut steps = 0;
            while steps < n && !in_window(at(s), a, delta) {
                s += 1;
                steps += 1;
            }
            e = s;
            if steps == n {
                continue; // no point within delta of this anchor
            }
        }
        while e - s < n && in_window(at(e), a, delta) {
            e += 1;
        }
        while e > s && !in_window(at(e - 1), a, delta) {
            e -= 1;
        }
        while e - s < n && s > 0 && in_window(at(s - 1), a, delta) {
            s -= 1;
        }
        let count = (e - s) as u64;
        if count > best_count {
            best_count = count;
            best_alpha = a;
        }
    }
    (best_count, best_alpha)
}

/// The exact maximum window count of one block and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCount {
    pub delta: f64,
    pub q0: f64,
    pub max_count: u64,
    pub argmax_alpha: f64,
}

/// Enumerate the block `q0 <= q^2 <= 2 q0` as a sorted fraction list.
pub fn enumerate_block(q0: f64) -> Result<Vec<FareyFraction>> {
    Ok(FareyBlock::enumerate(q0)?.fractions)
}

/// Count block fractions within circle distance `delta` of `alpha`.
pub fn count_in_interval(alpha: f64, delta: f64, q0: f64) -> Result<u64> {
    FareyBlock::enumerate(q0)?.count_in_interval(alpha, delta)
}

/// Exact maximum of `count_in_interval` over all centers, for one block.
pub fn max_window_count(delta: f64, q0: f64) -> Result<WindowCount> {
    FareyBlock::enumerate(q0)?.max_window_count(delta)
}

/// Dirichlet approximation `alpha = b/r + z` with `r <= tau`, `gcd(b,r) = 1`
/// and `|z| <= 1/(r tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalApprox {
    pub b: i64,
    pub r: u64,
    pub z: f64,
    pub tau: f64,
}

impl RationalApprox {
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::ZeroInput { what: "r" });
        }
        if (self.r as f64) > self.tau {
            return Err(Error::Postcondition {
                what: "RationalApprox",
                detail: format!("r = {} exceeds tau = {}", self.r, self.tau),
            });
        }
        let g = gcd(self.b.rem_euclid(self.r as i64) as u64, self.r);
        if g != 1 {
            return Err(Error::Postcondition {
                what: "RationalApprox",
                detail: format!("gcd(b, r) = {g}"),
            });
        }
        if self.z.abs() > 1.0 / (self.r as f64 * self.tau) {
            return Err(Error::Postcondition {
                what: "RationalApprox",
                detail: format!("|z| = {:e} exceeds 1/(r tau)", self.z.abs()),
            });
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.b as f64 / self.r as f64 + self.z
    }
}

/// Rational approximation of `alpha` at quality `tau >= 1`, from continued
/// fraction convergents: the last convergent with denominator `<= tau`.
/// When `alpha` is itself a convergent at that depth, `z` comes out as 0.
pub fn dirichlet_approx(alpha: f64, tau: f64) -> Result<RationalApprox> {
    if !(tau >= 1.0) || !tau.is_finite() {
        return Err(Error::OutOfRange {
            what: "tau",
            value: tau,
            range: "[1, inf)",
        });
    }
    if !alpha.is_finite() {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
            range: "finite",
        });
    }
    let a0 = alpha.floor();
    let (mut p_prev, mut q_prev): (i128, i128) = (1, 0);
    let (mut p, mut q): (i128, i128) = (a0 as i128, 1);
    let mut x = alpha - a0;
    for _ in 0..64 {
        if x.abs() < 1e-15 {
            break; // terminated: alpha is exactly the current convergent
        }
        let recip = 1.0 / x;
        let ai = recip.floor();
        if !(ai >= 1.0) || ai > 4.0e18 {
            break;
        }
        let (Some(pn), Some(qn)) = (
            (ai as i128).checked_mul(p).and_then(|v| v.checked_add(p_prev)),
            (ai as i128).checked_mul(q).and_then(|v| v.checked_add(q_prev)),
        ) else {
            break;
        };
        if qn as f64 > tau {
            break;
        }
        (p_prev, q_prev) = (p, q);
        (p, q) = (pn, qn);
        x = recip - ai;
    }
    let b = p as i64;
    let r = q as u64;
    let approx = RationalApprox {
        b,
        r,
        z: alpha - b as f64 / r as f64,
        tau,
    };
    approx.validate()?;
    Ok(approx)
}

/// The set `{ q^2 / t : sqrt(y) - delta/sqrt(q0) <= q <= sqrt(y) + delta/sqrt(q0),
/// t | q^2 }`, sorted. Candidates are exactly the multiples of the minimal
/// `f` with `t | q^2 iff f | q`, so each element is `(q/f)^2 * g` with `g`
/// the squarefree cofactor of the splitting.
pub fn square_quotient_set(t: u64, y: f64, delta: f64, q0: f64) -> Result<Vec<u64>> {
    if t == 0 {
        return Err(Error::ZeroInput { what: "t" });
    }
    if !(q0 >= 1.0) {
        return Err(Error::OutOfRange {
            what: "q0",
            value: q0,
            range: "[1, inf)",
        });
    }
    if !(delta > 0.0) {
        return Err(Error::OutOfRange {
            what: "delta",
            value: delta,
            range: "(0, inf)",
        });
    }
    if !(y >= 0.0) {
        return Err(Error::OutOfRange {
            what: "y",
            value: y,
            range: "[0, inf)",
        });
    }
    let split = split_square_divisor(t)?;
    let half = delta / q0.sqrt();
    let lo = y.sqrt() - half;
    let hi = y.sqrt() + half;
    if hi < 1.0 {
        return Ok(Vec::new());
    }
    let q_lo = lo.max(1.0).ceil() as u64;
    let q_hi = hi.floor() as u64;
    let first = q_lo.div_ceil(split.f) * split.f;
    let mut out = Vec::new();
    let mut q = first;
    while q <= q_hi {
        let q1 = q / split.f;
        let value = q1
            .checked_mul(q1)
            .and_then(|v| v.checked_mul(split.g))
            .ok_or(Error::Overflow {
                op: "square_quotient_set",
            })?;
        out.push(value);
        q += split.f;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_examples() {
        let b = enumerate_block(1.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!((b[0].a(), b[0].q()), (1, 1));

        let b = enumerate_block(4.0).unwrap();
        let pairs: Vec<(u64, u64)> = b.iter().map(|f| (f.a(), f.q())).collect();
        assert_eq!(pairs, vec![(1, 2), (3, 2)]);

        // [9, 18] contains the squares 9 and 16, so both q = 3 and q = 4
        // contribute, q phi(q) fractions each
        let b = enumerate_block(9.0).unwrap();
        assert_eq!(b.len(), 3 * 2 + 4 * 2);
        let a_q3: Vec<u64> = b.iter().filter(|f| f.q() == 3).map(|f| f.a()).collect();
        assert_eq!(a_q3, vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(b.iter().filter(|f| f.q() == 4).count(), 8);

        assert!(enumerate_block(0.5).is_err());
        // no square lands in [1.5, 3]
        assert!(enumerate_block(1.5).unwrap().is_empty());
    }

    #[test]
    fn block_sorted_and_distinct() {
        for q0 in [1.0, 4.0, 30.0, 100.0, 1234.5] {
            let b = enumerate_block(q0).unwrap();
            for w in b.windows(2) {
                assert_eq!(
                    w[0].cmp_exact(&w[1]),
                    std::cmp::Ordering::Less,
                    "block q0={q0} not strictly increasing"
                );
            }
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_in_interval(0.5, 0.3, 4.0).unwrap(), 2);
        assert_eq!(count_in_interval(0.5, 0.2, 4.0).unwrap(), 0);
        // window of radius 1/2 covers the whole circle
        let block = FareyBlock::enumerate(50.0).unwrap();
        assert_eq!(
            block.count_in_interval(0.1234, 0.5).unwrap(),
            block.len() as u64
        );
        assert!(count_in_interval(0.5, 0.0, 4.0).is_err());
        assert!(count_in_interval(0.5, 0.7, 4.0).is_err());
    }

    #[test]
    fn count_wraps_around() {
        // 3/4 is at circle distance 0.26 from 0.01
        assert_eq!(count_in_interval(0.01, 0.27, 4.0).unwrap(), 2);
        assert_eq!(count_in_interval(0.01, 0.25, 4.0).unwrap(), 1);
    }

    #[test]
    fn max_window_examples() {
        let w = max_window_count(0.3, 4.0).unwrap();
        assert_eq!(w.max_count, 2);
        let w = max_window_count(0.01, 4.0).unwrap();
        assert_eq!(w.max_count, 1);
        let block = FareyBlock::enumerate(77.0).unwrap();
        let w = block.max_window_count(0.5).unwrap();
        assert_eq!(w.max_count, block.len() as u64);
    }

    #[test]
    fn max_window_matches_anchor_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let q0 = rng.gen_range(1.0..400.0);
            let delta = 10f64.powf(rng.gen_range(-3.0..-0.31));
            let block = FareyBlock::enumerate(q0).unwrap();
            let sweep = block.max_window_count(delta).unwrap();
            let mut brute = 0u64;
            for f in block.fractions() {
                for anchor in [f.circle_pos(), f.circle_pos() + delta] {
                    brute = brute.max(block.count_in_interval(anchor, delta).unwrap());
                }
            }
            assert_eq!(sweep.max_count, brute, "q0={q0}, delta={delta}");
            assert_eq!(
                block.count_in_interval(sweep.argmax_alpha, delta).unwrap(),
                sweep.max_count,
                "argmax does not reproduce the count"
            );
        }
    }

    #[test]
    fn dirichlet_examples() {
        let a = dirichlet_approx(0.3, 10.0).unwrap();
        assert_eq!((a.b, a.r), (3, 10));
        assert_eq!(a.z, 0.0);

        let a = dirichlet_approx(std::f64::consts::PI - 3.0, 10.0).unwrap();
        assert_eq!((a.b, a.r), (1, 7));
        assert!(a.z.abs() <= 1.0 / 70.0);
        assert!((a.z.abs() - 0.00126).abs() < 1e-4);

        let a = dirichlet_approx(0.5, 1.0).unwrap();
        assert_eq!(a.r, 1);
        assert!((a.z.abs() - 0.5).abs() < 1e-15);

        assert!(dirichlet_approx(0.5, 0.9).is_err());
    }

    #[test]
    fn dirichlet_contract_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let alpha: f64 = rng.gen_range(0.0..1.0);
            let tau: f64 = rng.gen_range(1.0..1000.0);
            let a = dirichlet_approx(alpha, tau).unwrap();
            a.validate().unwrap();
            assert!(
                (a.alpha() - alpha).abs() <= 1e-12,
                "reconstruction off at alpha={alpha}, tau={tau}"
            );
        }
    }

    #[test]
    fn square_quotient_examples() {
        assert_eq!(square_quotient_set(1, 100.0, 5.0, 100.0).unwrap(), vec![100]);
        // t = 8: only q divisible by f = 4 contribute
        let s = square_quotient_set(8, 256.0, 80.0, 100.0).unwrap();
        // q in [8, 24] divisible by 4: 8, 12, 16, 20, 24 -> q^2/8
        assert_eq!(s, vec![8, 18, 32, 50, 72]);
        // window shorter than the f-spacing holds at most one element
        let s = square_quotient_set(3, 81.0, 0.01, 100.0).unwrap();
        assert!(s.len() <= 1);
        assert!(square_quotient_set(0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn square_quotient_matches_filter() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for t in 1..=60u64 {
            let y = rng.gen_range(1.0..5000.0);
            let delta = rng.gen_range(0.1..50.0);
            let q0 = rng.gen_range(1.0..200.0);
            let got = square_quotient_set(t, y, delta, q0).unwrap();
            let half = delta / q0.sqrt();
            let (lo, hi) = (y.sqrt() - half, y.sqrt() + half);
            let mut expect = Vec::new();
            let top = hi.max(0.0).floor() as u64 + 1;
            for q in 1..=top {
                if (q as f64) >= lo && (q as f64) <= hi && (q * q) % t == 0 {
                    expect.push(q * q / t);
                }
            }
            assert_eq!(got, expect, "t={t}, y={y}, delta={delta}, q0={q0}");
        }
    }
}
