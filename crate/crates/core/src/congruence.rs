//! Quadratic congruences: exact solution sets of `x^2 = l (mod k)` for `l`
//! coprime to `k`, and solution counts of the scaled form `g x^2 = c (mod k)`.
//!
//! Prime-power moduli are solved by Tonelli-Shanks plus Hensel lifting (odd
//! primes) and by explicit case analysis with lifting (powers of two); the
//! general modulus is assembled by CRT. Every returned root is re-verified by
//! modular squaring before it leaves this module.

use crate::arith::{factorize, gcd, mod_inverse};
use crate::{Error, Result};

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Square root of `a` modulo an odd prime `p`, if one exists.
fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    // p = 1 mod 4: full algorithm on p - 1 = q * 2^s
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut n = 2u64;
    while powmod(n, (p - 1) / 2, p) != p - 1 {
        n += 1;
    }
    let mut m = s;
    let mut c = powmod(n, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Solutions of `x^2 = a (mod p^e)` for odd prime `p` and `gcd(a, p) = 1`.
fn roots_odd_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    let mut x = match tonelli_shanks(a % p, p) {
        Some(x) => x,
        None => return Vec::new(),
    };
    // Hensel: lift x from p^i to p^{i+1}
    let mut pe = p;
    for _ in 1..e {
        let next = pe * p;
        let diff = (a % next + next - mulmod(x % next, x % next, next)) % next;
        debug_assert_eq!(diff % pe, 0);
        let t = mulmod(diff / pe % p, mod_inverse((2 * (x % p)) as i64, p).unwrap(), p);
        x = (x + (t as u128 * pe as u128 % next as u128) as u64) % next;
        pe = next;
    }
    let other = pe - x;
    if x == other {
        vec![x]
    } else {
        let mut v = vec![x.min(other), x.max(other)];
        v.dedup();
        v
    }
}

/// Solutions of `x^2 = a (mod 2^e)` for odd `a`.
fn roots_power_of_two(a: u64, e: u32) -> Vec<u64> {
    let m = 1u64 << e;
    let a = a % m;
    match e {
        1 => vec![1],
        2 => {
            if a % 4 == 1 {
                vec![1, 3]
            } else {
                Vec::new()
            }
        }
        _ => {
            if a % 8 != 1 {
                return Vec::new();
            }
            // lift a base solution from 2^3 upward: at each step x or
            // x + 2^{i-1} solves the congruence one power higher
            let mut x = 1u64;
            for i in 3..e {
                let next = 1u64 << (i + 1);
                if !(mulmod(x, x, next) + next - a % next).is_multiple_of(next) {
                    x += 1 << (i - 1);
                }
            }
            let half = 1 << (e - 1);
            let mut v = vec![x % m, (m - x) % m, (x + half) % m, (m - x + half) % m];
            v.sort_unstable();
            v.dedup();
            v
        }
    }
}

fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> u64 {
    // x = r1 (mod m1), x = r2 (mod m2) with coprime moduli
    let inv = mod_inverse((m1 % m2) as i64, m2).unwrap_or(0); // m2 = 1 never occurs here
    let d = (r2 as u128 + m2 as u128 - r1 as u128 % m2 as u128) % m2 as u128;
    let t = d * inv as u128 % m2 as u128;
    (r1 as u128 + t * m1 as u128) as u64
}

/// All `x` in `[0, k)` with `x^2 = l (mod k)`, for `gcd(l, k) = 1`.
///
/// The returned list is sorted and every entry is re-verified by squaring.
pub fn square_roots_mod(l: i64, k: u64) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::ZeroInput { what: "k" });
    }
    let l_red = l.rem_euclid(k as i64) as u64;
    let g = gcd(l_red, k);
    if g != 1 {
        return Err(Error::NotCoprime {
            what: "square_roots_mod",
            gcd: g,
        });
    }
    if k == 1 {
        return Ok(vec![0]);
    }
    let fac = factorize(k)?;
    let mut roots: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for &(p, e) in fac.factors() {
        let pe = p.checked_pow(e).ok_or(Error::Overflow {
            op: "square_roots_mod",
        })?;
        let local = if p == 2 {
            roots_power_of_two(l_red % pe, e)
        } else {
            roots_odd_prime_power(l_red % pe, p, e)
        };
        if local.is_empty() {
            return Ok(Vec::new());
        }
        let mut combined = Vec::with_capacity(roots.len() * local.len());
        for &r in &roots {
            for &s in &local {
                combined.push(if modulus == 1 {
                    s
                } else {
                    crt_pair(r, modulus, s, pe)
                });
            }
        }
        roots = combined;
        modulus *= pe;
    }
    roots.sort_unstable();
    for &x in &roots {
        if mulmod(x, x, k) != l_red {
            return Err(Error::Postcondition {
                what: "square_roots_mod",
                detail: format!("{x}^2 != {l_red} mod {k}"),
            });
        }
    }
    Ok(roots)
}

const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// Number of `x` in `[0, k)` with `g x^2 = c (mod k)`.
///
/// When `gcd(g, k) = 1` the count reduces to `square_roots_mod` through the
/// inverse of `g`. When `gcd(g, k) > 1` and `gcd(c, k) = 1` the congruence
/// has no solution. The remaining cases fall back to a brute-force scan for
/// `k` up to 10^6 and are rejected above that.
pub fn count_scaled_roots(g: u64, c: i64, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::ZeroInput { what: "k" });
    }
    if g == 0 {
        return Err(Error::ZeroInput { what: "g" });
    }
    if k == 1 {
        return Ok(1);
    }
    let c_red = c.rem_euclid(k as i64) as u64;
    if gcd(g % k, k) == 1 {
        let l = mulmod(mod_inverse(g as i64, k)?, c_red, k);
        if gcd(l, k) == 1 {
            return Ok(square_roots_mod(l as i64, k)?.len() as u64);
        }
    } else if gcd(c_red, k) == 1 {
        return Ok(0);
    }
    if k > BRUTE_FORCE_LIMIT {
        return Err(Error::Unsupported(format!(
            "count_scaled_roots with shared factors needs k <= 10^6, got {k}"
        )));
    }
    let g_red = g % k;
    let mut count = 0;
    for x in 0..k {
        if (mulmod(g_red, mulmod(x, x, k), k) + k - c_red).is_multiple_of(k) {
            count += 1;
        }
    }
    Ok(count)
}
