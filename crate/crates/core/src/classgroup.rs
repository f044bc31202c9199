//! The form class group of a negative discriminant: reduced-form census,
//! Dirichlet composition, element orders and ambiguous classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::{ext_gcd, gcd, gcd3, isqrt};
use crate::qform::{check_discriminant, reduce, BinaryForm};

/// A proper equivalence class, identified by its reduced representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProperClass {
    rep: BinaryForm,
}

impl ProperClass {
    /// Class of an arbitrary primitive definite form.
    pub fn of(f: &BinaryForm) -> Self {
        Self { rep: f.reduce() }
    }

    pub fn from_coeffs(a: i64, b: i64, c: i64) -> Result<Self> {
        Ok(Self::of(&BinaryForm::new(a, b, c)?))
    }

    pub fn rep(&self) -> &BinaryForm {
        &self.rep
    }

    pub fn discriminant(&self) -> i64 {
        self.rep.discriminant()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.a() == 1
    }

    pub fn inverse(&self) -> Self {
        Self {
            rep: self.rep.inverse_rep(),
        }
    }

    pub fn is_ambiguous(&self) -> bool {
        self.rep.is_ambiguous()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        compose(self, other)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = identity_form(self.discriminant())?;
        for _ in 0..k {
            acc = compose(&acc, self)?;
        }
        Ok(acc)
    }

    pub fn order(&self) -> Result<u32> {
        element_order(self)
    }
}

impl std::fmt::Display for ProperClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.rep.fmt(f)
    }
}

/// Principal class: `x^2 - (D/4) y^2` for even `D`,
/// `x^2 + xy + ((1 - D)/4) y^2` for odd `D`.
pub fn identity_form(d: i64) -> Result<ProperClass> {
    check_discriminant(d)?;
    let rep = if d % 2 == 0 {
        BinaryForm::new(1, 0, -d / 4)?
    } else {
        BinaryForm::new(1, 1, (1 - d) / 4)?
    };
    Ok(ProperClass { rep })
}

/// Solution of the composition congruence system
/// `B = b1 (mod 2a1/e)`, `B = b2 (mod 2a2/e)`, `B^2 = D (mod 4a1a2/e^2)`,
/// reduced into `[0, 2 a1 a2 / e^2)`.
pub fn composition_b(f: &BinaryForm, g: &BinaryForm) -> Result<(i64, i64, i64)> {
    let d = f.discriminant();
    let (a1, b1) = (f.a(), f.b());
    let (a2, b2) = (g.a(), g.b());
    let s = (b1 + b2) / 2;
    let (g1, x1, y1) = ext_gcd(a1, a2);
    let (e, x2, w) = ext_gcd(g1, s);
    let (u, v) = (x1 * x2, y1 * x2);
    let a3 = (a1 / e) * (a2 / e);
    let two_a3 = 2 * a3 as i128;
    // u a1 + v a2 + w s = e
    let num = u as i128 * a1 as i128 * b2 as i128
        + v as i128 * a2 as i128 * b1 as i128
        + w as i128 * ((b1 as i128 * b2 as i128 + d as i128) / 2);
    let raw = num / e as i128;
    let b3 = raw.rem_euclid(two_a3) as i64;

    let ok = (b3 - b1).rem_euclid(2 * a1 / e) == 0
        && (b3 - b2).rem_euclid(2 * a2 / e) == 0
        && (b3 as i128 * b3 as i128 - d as i128).rem_euclid(4 * a3 as i128) == 0;
    if !ok {
        return Err(Error::CompositionFailed(format!("{f} * {g}")));
    }
    Ok((e, a3, b3))
}

/// Dirichlet composition of two classes of the same discriminant.
pub fn compose(x: &ProperClass, z: &ProperClass) -> Result<ProperClass> {
    let (f, g) = (x.rep(), z.rep());
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::DiscriminantMismatch(d, g.discriminant()));
    }
    let (_, a3, b3) = composition_b(f, g)?;
    compose_with_b(d, a3, b3)
}

/// Reduces `[a3, b3, (b3^2 - D)/(4 a3)]`; any valid `b3` gives the same class.
pub fn compose_with_b(d: i64, a3: i64, b3: i64) -> Result<ProperClass> {
    let num = b3 as i128 * b3 as i128 - d as i128;
    let c3 = num / (4 * a3 as i128);
    let c3 = i64::try_from(c3).map_err(|_| Error::Overflow("compose"))?;
    let composite = BinaryForm::new(a3, b3, c3)?;
    let (rep, _) = reduce(&composite)?;
    Ok(ProperClass { rep })
}

/// Least `k >= 1` with `A^k` the identity.
pub fn element_order(x: &ProperClass) -> Result<u32> {
    let mut acc = *x;
    let mut k = 1;
    while !acc.is_identity() {
        acc = compose(&acc, x)?;
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup {
    d: i64,
    classes: Vec<ProperClass>,
    identity: ProperClass,
}

/// All primitive reduced forms of discriminant `d`, sorted by `(a, b, c)`.
pub fn enumerate_classes(d: i64) -> Result<ClassGroup> {
    check_discriminant(d)?;
    let mut classes = Vec::new();
    let a_max = isqrt(-d / 3);
    for a in 1..=a_max {
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) || gcd3(a, b, c) != 1 {
                continue;
            }
            classes.push(ProperClass {
                rep: BinaryForm::new(a, b, c)?,
            });
        }
    }
    classes.sort();
    Ok(ClassGroup {
        d,
        identity: identity_form(d)?,
        classes,
    })
}

impl ClassGroup {
    pub fn new(d: i64) -> Result<Self> {
        enumerate_classes(d)
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[ProperClass] {
        &self.classes
    }

    pub fn identity(&self) -> &ProperClass {
        &self.identity
    }

    pub fn contains(&self, x: &ProperClass) -> bool {
        self.classes.binary_search(x).is_ok()
    }

    pub fn compose(&self, x: &ProperClass, z: &ProperClass) -> Result<ProperClass> {
        compose(x, z)
    }

    /// Classes of order 1 or 2, sorted.
    pub fn ambiguous_classes(&self) -> Result<Vec<ProperClass>> {
        let mut out = Vec::new();
        for x in &self.classes {
            if compose(x, x)?.is_identity() {
                out.push(*x);
            }
        }
        Ok(out)
    }

    pub fn orders(&self) -> Result<Vec<u32>> {
        self.classes.iter().map(element_order).collect()
    }

    pub fn to_json(&self) -> Result<ClassGroupJson> {
        let orders = self.orders()?;
        Ok(ClassGroupJson {
            d: self.d,
            h: self.classes.len(),
            classes: self
                .classes
                .iter()
                .zip(orders)
                .map(|(x, order)| ClassEntry {
                    form: x.rep.coeffs(),
                    order,
                })
                .collect(),
            ambiguous: self
                .ambiguous_classes()?
                .iter()
                .map(|x| x.rep.coeffs())
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub form: [i64; 3],
    pub order: u32,
}

/// Output of the `classgroup` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupJson {
    #[serde(rename = "D")]
    pub d: i64,
    pub ambiguous: Vec<[i64; 3]>,
    pub classes: Vec<ClassEntry>,
    pub h: usize,
}

impl TryFrom<ClassGroupJson> for ClassGroup {
    type Error = Error;

    /// Rebuilds the group from its JSON form, rejecting listings that are not
    /// the complete census of reduced forms.
    fn try_from(j: ClassGroupJson) -> Result<Self> {
        let mut classes = Vec::with_capacity(j.classes.len());
        for entry in &j.classes {
            let [a, b, c] = entry.form;
            let f = BinaryForm::new(a, b, c)?;
            if f.discriminant() != j.d {
                return Err(Error::DiscriminantMismatch(f.discriminant(), j.d));
            }
            if !f.is_reduced() {
                return Err(Error::Parse(format!("{f} is not reduced")));
            }
            classes.push(ProperClass { rep: f });
        }
        let group = ClassGroup {
            d: j.d,
            identity: identity_form(j.d)?,
            classes,
        };
        if group != enumerate_classes(j.d)? || j.h != group.classes.len() {
            return Err(Error::Parse(format!(
                "incomplete class list for D = {}",
                j.d
            )));
        }
        Ok(group)
    }
}

/// `gcd(a1, a2, (b1 + b2)/2)` for two forms of the same discriminant.
pub fn composition_gcd(f: &BinaryForm, g: &BinaryForm) -> i64 {
    gcd(gcd(f.a(), g.a()), (f.b() + g.b()) / 2)
}
