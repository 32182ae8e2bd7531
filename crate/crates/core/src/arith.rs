//! Integer utilities: factorization, divisor counts, modular inverses and
//! the square-divisibility splitting `t | q^2  iff  f | q`.
//!
//! All arithmetic is checked 64-bit; overflow is reported as an error, never
//! wrapped.

use crate::{Error, Result};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }
}

#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic trial division with wheel-30 stepping.
///
/// Inputs are capped at `2^62`, where sqrt-bounded trial division is still
/// comfortably fast and needs no external primality machinery.
pub fn factorize(n: u64) -> Result<FactoredInt> {
    if n == 0 {
        return Err(Error::ZeroInput { what: "n" });
    }
    if n >= 1 << 62 {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as f64,
            range: "[1, 2^62)",
        });
    }
    let mut factors = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        if m.is_multiple_of(p) {
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    // Offsets of the residues coprime to 30, starting from 7.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut w = 0usize;
    while p.checked_mul(p).is_some_and(|pp| pp <= m) {
        if m.is_multiple_of(p) {
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(FactoredInt { n, factors })
}

/// Number of distinct prime divisors of `n`.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.omega())
}

/// Multiplicative inverse of `a` modulo `m`, in `[1, m)`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::OutOfRange {
            what: "m",
            value: m as f64,
            range: "[2, 2^63)",
        });
    }
    let a_red = a.rem_euclid(m as i64) as u64;
    // Extended Euclid on (a_red, m), tracking only the coefficient of a.
    let (mut r0, mut r1) = (a_red as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(s0.rem_euclid(m as i128) as u64)
}

/// The splitting of a positive integer `t` that controls when `t` divides a
/// square: `f` is minimal with `t | q^2 iff f | q`, and `g = f^2 / t` is its
/// squarefree cofactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitFactors {
    pub t: u64,
    pub f: u64,
    pub g: u64,
}

/// Compute the square-divisibility splitting of `t`.
///
/// For `t = prod p_i^{v_i}` put `u_i = v_i` rounded up to the next even
/// number; then `f = prod p_i^{u_i/2}` and `g = f^2 / t`.
pub fn split_square_divisor(t: u64) -> Result<SplitFactors> {
    let fac = factorize(t)?;
    let mut f = 1u64;
    let mut g = 1u64;
    for &(p, v) in fac.factors() {
        let u = if v % 2 == 0 { v } else { v + 1 };
        for _ in 0..u / 2 {
            f = f.checked_mul(p).ok_or(Error::Overflow {
                op: "split_square_divisor",
            })?;
        }
        if v % 2 == 1 {
            g = g.checked_mul(p).ok_or(Error::Overflow {
                op: "split_square_divisor",
            })?;
        }
    }
    Ok(SplitFactors { t, f, g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_multiplies_back() {
        // trial-division oracle: the product of prime powers reconstructs n,
        // every listed prime has no divisor below it
        let n = (1u64 << 40) + 1;
        let fac = factorize(n).unwrap();
        let mut prod = 1u64;
        for &(p, e) in fac.factors() {
            for d in 2..p.min(100_000) {
                assert_ne!(p % d, 0, "{p} not prime");
            }
            for _ in 0..e {
                prod *= p;
            }
        }
        assert_eq!(prod, n);
        let mut primes: Vec<u64> = fac.factors().iter().map(|&(p, _)| p).collect();
        let sorted = primes.clone();
        primes.sort_unstable();
        primes.dedup();
        assert_eq!(primes, sorted, "primes strictly increasing");
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(12).unwrap(), 2);
        assert_eq!(omega(30030).unwrap(), 6); // 2*3*5*7*11*13
        assert!(omega(0).is_err());
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 97).unwrap(), 1);
        let x = mod_inverse(17, 3120).unwrap();
        assert_eq!(17 * x % 3120, 1);
        assert!((1..3120).contains(&x));
        assert!(mod_inverse(6, 9).is_err());
        assert!(mod_inverse(0, 5).is_err());
        // negative representative
        assert_eq!(mod_inverse(-3, 7).unwrap(), mod_inverse(4, 7).unwrap());
    }

    #[test]
    fn split_examples() {
        let s = split_square_divisor(1).unwrap();
        assert_eq!((s.f, s.g), (1, 1));
        let s = split_square_divisor(8).unwrap();
        assert_eq!((s.f, s.g), (4, 2));
        let s = split_square_divisor(12).unwrap();
        assert_eq!((s.f, s.g), (6, 3));
        assert!(split_square_divisor(0).is_err());
    }

    #[test]
    fn split_invariants_small_range() {
        for t in 1..=500u64 {
            let s = split_square_divisor(t).unwrap();
            assert_eq!(s.f * s.f, t * s.g, "f^2 = t*g at t={t}");
            assert_eq!(t % s.f, 0, "f | t at t={t}");
            for q in 1..=5000u64 {
                assert_eq!(
                    (q * q) % t == 0,
                    q % s.f == 0,
                    "divisibility equivalence fails at t={t}, q={q}"
                );
            }
        }
    }

    #[test]
    fn split_cofactor_squarefree() {
        for t in 1..=10_000u64 {
            let s = split_square_divisor(t).unwrap();
            for &(_, e) in factorize(s.g).unwrap().factors() {
                assert_eq!(e, 1, "g={} not squarefree at t={t}", s.g);
            }
        }
    }

    #[test]
    fn mod_inverse_random_coprime_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 10_000 {
            let m = rng.gen_range(2u64..1 << 31);
            let a = rng.gen_range(1i64..1 << 31);
            if gcd(a as u64, m) != 1 {
                continue;
            }
            let x = mod_inverse(a, m).unwrap();
            assert_eq!((a as u128 * x as u128 % m as u128) as u64, 1 % m);
            done += 1;
        }
    }
}
