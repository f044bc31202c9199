//! Exact integer helpers: gcd, Kronecker symbol, valuations, divisors,
//! integer square roots and a two-modulus CRT.
//!
//! Everything works on `i64`. Inputs stay at desk scale (|D| <= 10^6,
//! n <= 10^7, p <= 10^3); products that could leave that range go through
//! `i128` or checked arithmetic.

use crate::error::{Error, Result};

/// `q^exponent` exactly divides the valued integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Valuation {
    pub prime: i64,
    pub exponent: u32,
}

impl Valuation {
    pub fn of(prime: i64, n: i64) -> Result<Self> {
        Ok(Self {
            prime,
            exponent: valuation(prime, n)?,
        })
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Floor of the square root of `n >= 0`.
pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0, "isqrt of negative {n}");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `Some(s)` with `s >= 0` and `s*s = n`, otherwise `None`.
pub fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = isqrt(n);
    (s * s == n).then_some(s)
}

pub fn is_square(n: i64) -> bool {
    exact_sqrt(n).is_some()
}

/// Deterministic trial division.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

pub fn primes_up_to(n: i64) -> Vec<i64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as i64))
        .collect()
}

/// Prime factorization of `n >= 1` as `(prime, exponent)` pairs, ascending.
pub fn factorize(n: i64) -> Vec<(i64, u32)> {
    assert!(n >= 1, "factorize of non-positive {n}");
    let mut n = n;
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mod_pow(base: i64, exp: u64, modulus: i64) -> i64 {
    assert!(modulus > 0);
    let m = modulus as i128;
    let mut b = (base as i128).rem_euclid(m);
    let mut e = exp;
    let mut acc: i128 = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as i64
}

fn kronecker_prime(d: i64, q: i64) -> i32 {
    if q == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(q);
    if r == 0 {
        return 0;
    }
    if mod_pow(r, ((q - 1) / 2) as u64, q) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(d/k)` for `k >= 1`, extended multiplicatively over
/// the factorization of `k`.
pub fn kronecker(d: i64, k: i64) -> i32 {
    assert!(k >= 1, "kronecker symbol needs k >= 1, got {k}");
    factorize(k)
        .into_iter()
        .map(|(q, e)| kronecker_prime(d, q).pow(e))
        .product()
}

/// Largest `e` with `q^e | n`.
pub fn valuation(q: i64, n: i64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    if q < 2 {
        return Err(Error::NotPrime(q));
    }
    let mut n = n;
    let mut e = 0;
    while n % q == 0 {
        n /= q;
        e += 1;
    }
    Ok(e)
}

/// Positive divisors of `n >= 1`, ascending.
pub fn divisors(n: i64) -> Result<Vec<i64>> {
    if n <= 0 {
        return Err(Error::NonPositive(n));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Solves `x = r1 (mod m1)`, `x = r2 (mod m2)` for positive moduli that need
/// not be coprime. Returns `(x, lcm)` with `0 <= x < lcm`, or `None` when the
/// system is inconsistent.
pub fn crt(r1: i64, m1: i64, r2: i64, m2: i64) -> Option<(i64, i64)> {
    assert!(m1 > 0 && m2 > 0);
    let (g, s, _) = ext_gcd(m1, m2);
    let diff = r2 - r1;
    if diff % g != 0 {
        return None;
    }
    let lcm = m1 / g * m2;
    let step = (diff / g) as i128 * s as i128 % (m2 / g) as i128;
    let x = (r1 as i128 + m1 as i128 * step).rem_euclid(lcm as i128);
    Some((x as i64, lcm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_square_mod(d: i64, q: i64) -> bool {
        (1..q).any(|x| (x * x - d).rem_euclid(q) == 0)
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-56, 1), 1);
        assert_eq!(kronecker(-56, 3), 1);
        assert_eq!(kronecker(-56, 11), -1);
        // 2-adic rule
        assert_eq!(kronecker(-56, 2), 0);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-15, 2), 1);
        assert_eq!(kronecker(-11, 2), -1);
    }

    #[test]
    fn kronecker_is_multiplicative_exhaustive() {
        for d in [-3i64, -4, -23, -31, -56, -15, -400, -999] {
            let table: Vec<i32> = (0..=500)
                .map(|k| if k == 0 { 0 } else { kronecker(d, k) })
                .collect();
            for k1 in 1..=500i64 {
                for k2 in 1..=500i64 {
                    assert_eq!(
                        kronecker(d, k1 * k2),
                        table[k1 as usize] * table[k2 as usize],
                        "d={d} k1={k1} k2={k2}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_matches_quadratic_residuosity() {
        for q in primes_up_to(100).into_iter().filter(|&q| q > 2) {
            for d in -400..0i64 {
                if d % q == 0 {
                    continue;
                }
                let expected = if euler_square_mod(d, q) { 1 } else { -1 };
                assert_eq!(kronecker(d, q), expected, "d={d} q={q}");
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(3, 18), Ok(2));
        assert_eq!(valuation(3, 28), Ok(0));
        assert_eq!(valuation(7, 252), Ok(1));
        assert_eq!(valuation(3, -27), Ok(3));
        assert_eq!(valuation(3, 0), Err(Error::ZeroValuation));
        assert_eq!(Valuation::of(2, 40).unwrap().exponent, 3);
    }

    #[test]
    fn valuation_of_constructed_powers() {
        for q in [2i64, 3, 5, 7, 13] {
            for a in 0..6u32 {
                for m in (1..60i64).filter(|m| m % q != 0) {
                    assert_eq!(valuation(q, q.pow(a) * m), Ok(a));
                }
            }
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(9).unwrap(), vec![1, 3, 9]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(0), Err(Error::NonPositive(0)));
        assert_eq!(divisors(-4), Err(Error::NonPositive(-4)));
    }

    #[test]
    fn sqrt_helpers() {
        for n in 0..5000i64 {
            let s = isqrt(n);
            assert!(s * s <= n && (s + 1) * (s + 1) > n);
            assert_eq!(is_square(n), s * s == n);
        }
        assert_eq!(isqrt(i64::MAX / 4), 1_518_500_249);
        assert_eq!(exact_sqrt(-1), None);
    }

    #[test]
    fn ext_gcd_and_crt() {
        for a in -30..30i64 {
            for b in -30..30i64 {
                let (g, x, y) = ext_gcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(a * x + b * y, g);
            }
        }
        assert_eq!(crt(2, 3, 3, 5), Some((8, 15)));
        assert_eq!(crt(1, 4, 3, 6), Some((9, 12)));
        assert_eq!(crt(0, 4, 1, 6), None);
    }

    #[test]
    fn primes_and_factorization() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        for n in 1..2000i64 {
            assert_eq!(is_prime(n), primes_up_to(n).last() == Some(&n));
            let back: i64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
    }
}
