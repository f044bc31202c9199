//! Representation counts of positive definite binary forms.
//!
//! All enumeration rests on `4a f(x,y) = (2ax + by)^2 + |D| y^2`: for a
//! target `n` only `|y| <= sqrt(4an/|D|)` can occur, and for each such `y`
//! the value of `x` comes from a single square root.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::{divisors, exact_sqrt, gcd, gcd3, isqrt, kronecker};
use crate::qform::{omega, BinaryForm};

/// All `(x, y)` with `f(x, y) = n`, sorted lexicographically.
pub fn enumerate_solutions(f: &BinaryForm, n: i64) -> Result<Vec<(i64, i64)>> {
    if n <= 0 {
        return Err(Error::NonPositive(n));
    }
    let (a, b) = (f.a(), f.b());
    let abs_d = -f.discriminant();
    let four_an = 4i64
        .checked_mul(a)
        .and_then(|v| v.checked_mul(n))
        .ok_or(Error::Overflow("enumerate_solutions"))?;
    let y_max = isqrt(four_an / abs_d);
    let mut out = Vec::new();
    for y in -y_max..=y_max {
        let rest = four_an - abs_d * y * y;
        let Some(s) = exact_sqrt(rest) else { continue };
        // 2ax + by = ±s
        for root in if s == 0 { vec![0] } else { vec![-s, s] } {
            let num = root - b * y;
            if num % (2 * a) == 0 {
                out.push((num / (2 * a), y));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Representation record for one `(f, n, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepRecord {
    pub n: i64,
    pub p: Option<i64>,
    pub r: usize,
    pub r_flat_p: Option<usize>,
    pub r_star_p: Option<usize>,
    pub solutions: Vec<(i64, i64)>,
}

impl RepRecord {
    /// Solutions with `gcd(x, y, p) = 1`.
    pub fn p_primitive_solutions(&self) -> Vec<(i64, i64)> {
        match self.p {
            Some(p) => self
                .solutions
                .iter()
                .copied()
                .filter(|&(x, y)| gcd3(x, y, p) == 1)
                .collect(),
            None => self.solutions.clone(),
        }
    }

    pub fn r_star(&self) -> usize {
        self.r_star_p.unwrap_or(self.r)
    }
}

/// `r`, `r_p^*` and `r_p^flat = r - r_p^*` for `f(x,y) = n`.
pub fn rep_counts(f: &BinaryForm, n: i64, p: i64) -> Result<RepRecord> {
    let mut rec = represent(f, n)?;
    let star = rec
        .solutions
        .iter()
        .filter(|&&(x, y)| gcd3(x, y, p) == 1)
        .count();
    rec.p = Some(p);
    rec.r_star_p = Some(star);
    rec.r_flat_p = Some(rec.r - star);
    Ok(rec)
}

/// Like [`rep_counts`] without a prime.
pub fn represent(f: &BinaryForm, n: i64) -> Result<RepRecord> {
    let solutions = enumerate_solutions(f, n)?;
    Ok(RepRecord {
        n,
        p: None,
        r: solutions.len(),
        r_flat_p: None,
        r_star_p: None,
        solutions,
    })
}

/// Per-value counts of all lattice points with `f(x, y) <= bound`.
///
/// `r[n]`, `r_star_p[n]` and `primitive[n]` (number of solutions with
/// `gcd(x, y) = 1`) for `0 <= n <= bound`. Built in one pass over the
/// ellipse, so it is the cheap way to answer many `n` at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub bound: i64,
    pub p: i64,
    pub r: Vec<u32>,
    pub r_star_p: Vec<u32>,
    pub primitive: Vec<u32>,
}

impl Sweep {
    pub fn new(f: &BinaryForm, bound: i64, p: i64) -> Result<Self> {
        if bound < 0 {
            return Err(Error::NonPositive(bound));
        }
        let len = bound as usize + 1;
        let mut sweep = Self {
            bound,
            p,
            r: vec![0; len],
            r_star_p: vec![0; len],
            primitive: vec![0; len],
        };
        for_each_point(f, bound, |x, y, n| {
            let n = n as usize;
            sweep.r[n] += 1;
            if gcd3(x, y, p) == 1 {
                sweep.r_star_p[n] += 1;
            }
            if gcd(x, y) == 1 {
                sweep.primitive[n] += 1;
            }
        })?;
        Ok(sweep)
    }

    /// First `n >= 1` represented but never p-primitively.
    pub fn first_witness(&self) -> Option<i64> {
        (1..self.r.len())
            .find(|&n| self.r[n] > 0 && self.r_star_p[n] == 0)
            .map(|n| n as i64)
    }

    pub fn spectrum(&self) -> Spectrum {
        let pick = |counts: &[u32]| -> Vec<i64> {
            (1..counts.len())
                .filter(|&n| counts[n] > 0)
                .map(|n| n as i64)
                .collect()
        };
        Spectrum {
            bound: self.bound,
            p: self.p,
            q: pick(&self.r),
            q_star: pick(&self.primitive),
            qp_star: pick(&self.r_star_p),
        }
    }
}

/// Visits every `(x, y)` with `f(x, y) <= bound`, passing the value.
pub fn for_each_point(
    f: &BinaryForm,
    bound: i64,
    mut visit: impl FnMut(i64, i64, i64),
) -> Result<()> {
    let (a, b) = (f.a(), f.b());
    let abs_d = -f.discriminant();
    let four_ab = 4i64
        .checked_mul(a)
        .and_then(|v| v.checked_mul(bound))
        .ok_or(Error::Overflow("for_each_point"))?;
    let y_max = isqrt(four_ab / abs_d);
    for y in -y_max..=y_max {
        let rest = four_ab - abs_d * y * y;
        let s = isqrt(rest);
        // |2ax + by| <= s
        let lo = (-s - b * y).div_euclid(2 * a) - 1;
        let hi = (s - b * y).div_euclid(2 * a) + 1;
        for x in lo..=hi {
            let n = f.eval(x, y);
            if n <= bound {
                visit(x, y, n);
            }
        }
    }
    Ok(())
}

/// `Q(f)`, `Q^*(f)` and `Q_p^*(f)` intersected with `[1, bound]`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bound: i64,
    pub p: i64,
    #[serde(rename = "Q")]
    pub q: Vec<i64>,
    #[serde(rename = "Qp_star")]
    pub qp_star: Vec<i64>,
    #[serde(rename = "Qstar")]
    pub q_star: Vec<i64>,
}

impl Spectrum {
    pub fn in_q(&self, n: i64) -> bool {
        self.q.binary_search(&n).is_ok()
    }

    pub fn in_q_star(&self, n: i64) -> bool {
        self.q_star.binary_search(&n).is_ok()
    }

    pub fn in_qp_star(&self, n: i64) -> bool {
        self.qp_star.binary_search(&n).is_ok()
    }
}

pub fn spectrum(f: &BinaryForm, bound: i64, p: i64) -> Result<Spectrum> {
    Ok(Sweep::new(f, bound, p)?.spectrum())
}

/// Total number of representations of `n` by all classes of discriminant
/// `d`: `omega(d) * sum_{k | n} (d/k)`.
pub fn mass(n: i64, d: i64) -> Result<i64> {
    let w = omega(d)?;
    let s: i64 = divisors(n)?
        .into_iter()
        .map(|k| kronecker(d, k) as i64)
        .sum();
    Ok(w * s)
}
