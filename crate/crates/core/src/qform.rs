//! Positive definite binary quadratic forms `[a,b,c] = ax^2 + bxy + cy^2`
//! and the integer substitutions acting on them.
//!
//! Map convention, used everywhere in the crate: an [`IntMap2`]
//! `[[m11, m12], [m21, m22]]` is the substitution
//! `(x, y) -> (m11 x + m12 y, m21 x + m22 y)`, and
//! `apply_map(f, M)(x, y) = f(M(x, y))`. Consequently
//! `apply_map(apply_map(f, M1), M2) = apply_map(f, M1 * M2)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::gcd3;

pub fn is_negative_discriminant(d: i64) -> bool {
    d < 0 && matches!(d.rem_euclid(4), 0 | 1)
}

pub fn check_discriminant(d: i64) -> Result<i64> {
    if is_negative_discriminant(d) {
        Ok(d)
    } else {
        Err(Error::InvalidDiscriminant(d))
    }
}

/// Number of automorphs of a form of discriminant `d`.
pub fn omega(d: i64) -> Result<i64> {
    check_discriminant(d)?;
    Ok(match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    a: i64,
    b: i64,
    c: i64,
}

impl BinaryForm {
    /// A primitive positive definite form.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = Self::new_unchecked(a, b, c);
        f.check_definite()?;
        if gcd3(a, b, c) != 1 {
            return Err(Error::NotPrimitive { a, b, c });
        }
        Ok(f)
    }

    /// Positive definite, gcd not checked. Used for scaled images such as
    /// `p^2 f`.
    pub fn new_non_primitive(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = Self::new_unchecked(a, b, c);
        f.check_definite()?;
        Ok(f)
    }

    /// No checks at all.
    pub(crate) const fn new_unchecked(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// Builds `[a, b, (b^2 - d) / 4a]`, failing if the division is inexact.
    pub fn from_a_b_discriminant(a: i64, b: i64, d: i64) -> Result<Self> {
        check_discriminant(d)?;
        let num = b * b - d;
        if a <= 0 || num % (4 * a) != 0 {
            return Err(Error::Parse(format!(
                "no form [{a},{b},*] of discriminant {d}"
            )));
        }
        Self::new(a, b, num / (4 * a))
    }

    fn check_definite(&self) -> Result<()> {
        if self.a <= 0 || self.discriminant() >= 0 {
            return Err(Error::NotPositiveDefinite {
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        Ok(())
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn coeffs(&self) -> [i64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd3(self.a, self.b, self.c) == 1
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// Exact evaluation for vectors whose image may exceed `i64`.
    pub fn eval_wide(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// For a reduced form: its class equals its inverse class.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == self.b || self.a == self.c
    }

    /// Representative of the inverse class: `reduce([a, -b, c])`.
    pub fn inverse_rep(&self) -> Self {
        reduce(&Self::new_unchecked(self.a, -self.b, self.c))
            .map(|(r, _)| r)
            .expect("inverse of a definite form is definite")
    }

    pub fn reduce(&self) -> Self {
        reduce(self).expect("BinaryForm is positive definite").0
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for BinaryForm {
    type Err = Error;

    /// Accepts `a,b,c` or `[a,b,c]`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<i64> = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("form {s:?}: {e}")))?;
        match parts.as_slice() {
            &[a, b, c] => Self::new(a, b, c),
            _ => Err(Error::Parse(format!(
                "form {s:?}: expected three coefficients"
            ))),
        }
    }
}

/// JSON shape of a form: `{"D": d, "a": a, "b": b, "c": c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    #[serde(rename = "D")]
    pub d: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<&BinaryForm> for FormJson {
    fn from(f: &BinaryForm) -> Self {
        Self {
            d: f.discriminant(),
            a: f.a,
            b: f.b,
            c: f.c,
        }
    }
}

impl TryFrom<FormJson> for BinaryForm {
    type Error = Error;

    fn try_from(j: FormJson) -> Result<Self> {
        let f = BinaryForm::new(j.a, j.b, j.c)?;
        if f.discriminant() != j.d {
            return Err(Error::DiscriminantMismatch(f.discriminant(), j.d));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMap2 {
    pub m11: i64,
    pub m12: i64,
    pub m21: i64,
    pub m22: i64,
}

impl IntMap2 {
    pub const IDENTITY: Self = Self::new(1, 0, 0, 1);

    pub const fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn det(&self) -> i64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> i64 {
        self.m11 + self.m22
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.m11, self.m12], [self.m21, self.m22]]
    }

    pub fn apply(&self, x: i64, y: i64) -> (i64, i64) {
        (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)
    }

    /// Matrix product `self * rhs`; as substitutions, `rhs` acts first on
    /// the variables and `self` second.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }

    pub fn all_divisible_by(&self, p: i64) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|m| m % p == 0)
    }
}

impl fmt::Display for IntMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.m11, self.m12, self.m21, self.m22
        )
    }
}

/// Coefficients of `f(M(x, y))` without any validity checks.
pub fn substitute(f: &BinaryForm, m: &IntMap2) -> [i64; 3] {
    let (a, b, c) = (f.a, f.b, f.c);
    let na = f.eval(m.m11, m.m21);
    let nb = 2 * a * m.m11 * m.m12 + b * (m.m11 * m.m22 + m.m12 * m.m21) + 2 * c * m.m21 * m.m22;
    let nc = f.eval(m.m12, m.m22);
    [na, nb, nc]
}

/// `g(x, y) = f(m11 x + m12 y, m21 x + m22 y)`.
///
/// For `det M = ±1` the result is again primitive; for other maps it may be
/// an imprimitive multiple (e.g. `p^2 f`) and is returned as such.
pub fn apply_map(f: &BinaryForm, m: &IntMap2) -> BinaryForm {
    let [a, b, c] = substitute(f, m);
    BinaryForm::new_unchecked(a, b, c)
}

/// Gauss reduction. Returns the reduced form of the proper class of `f`
/// together with a determinant-one map `M` such that `apply_map(f, M)` is it.
pub fn reduce(f: &BinaryForm) -> Result<(BinaryForm, IntMap2)> {
    f.check_definite()?;
    let (mut a, mut b, mut c) = (f.a, f.b, f.c);
    let mut m = IntMap2::IDENTITY;
    loop {
        // translate b into (-a, a]: (x, y) -> (x + t y, y)
        if b <= -a || b > a {
            let t = (a - b).div_euclid(2 * a);
            let step = IntMap2::new(1, t, 0, 1);
            let nc = a * t * t + b * t + c;
            b += 2 * a * t;
            c = nc;
            m = m.compose(&step);
        }
        if a > c {
            // (x, y) -> (-y, x)
            (a, b, c) = (c, -b, a);
            m = m.compose(&IntMap2::new(0, -1, 1, 0));
            continue;
        }
        if a == c && b < 0 {
            b = -b;
            m = m.compose(&IntMap2::new(0, -1, 1, 0));
        }
        break;
    }
    Ok((BinaryForm::new_unchecked(a, b, c), m))
}

/// Determinant `-1` automorph of a reduced ambiguous form.
pub fn improper_automorph(f: &BinaryForm) -> Result<IntMap2> {
    let (a, b, c) = (f.a, f.b, f.c);
    if !f.is_reduced() || !f.is_ambiguous() {
        return Err(Error::NotAmbiguous { a, b, c });
    }
    Ok(if b == 0 {
        IntMap2::new(1, 0, 0, -1)
    } else if a == b {
        IntMap2::new(1, 1, 0, -1)
    } else {
        IntMap2::new(0, 1, 1, 0)
    })
}
