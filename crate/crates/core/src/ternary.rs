//! Ternary forms `f_m = m^2 x^2 + 3y^2 + 2yz + 5z^2` and their sublattice
//! versions `f~_m(x, y, z) = f_m(3x + y - z, y, z)`, with enough lattice
//! point machinery to compare what they represent in the residue class
//! `1 mod 3`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::isqrt;

/// `Ax^2 + By^2 + Cz^2 + Ryz + Szx + Txy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TernaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

pub type Mat3 = [[i64; 3]; 3];

fn det3(m: &Mat3) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl TernaryForm {
    pub fn new(a: i64, b: i64, c: i64, r: i64, s: i64, t: i64) -> Result<Self> {
        let f = Self { a, b, c, r, s, t };
        if !f.is_positive_definite() {
            return Err(Error::HypothesisNotMet(format!(
                "{f} is not positive definite"
            )));
        }
        Ok(f)
    }

    pub fn eval(&self, x: i64, y: i64, z: i64) -> i64 {
        self.a * x * x
            + self.b * y * y
            + self.c * z * z
            + self.r * y * z
            + self.s * z * x
            + self.t * x * y
    }

    /// Twice the Gram matrix; integral for every integral form.
    pub fn gram2(&self) -> Mat3 {
        [
            [2 * self.a, self.t, self.s],
            [self.t, 2 * self.b, self.r],
            [self.s, self.r, 2 * self.c],
        ]
    }

    fn from_gram2(g: &Mat3) -> Self {
        Self {
            a: g[0][0] / 2,
            b: g[1][1] / 2,
            c: g[2][2] / 2,
            r: g[1][2],
            s: g[0][2],
            t: g[0][1],
        }
    }

    /// `8 det G`, always an integer.
    pub fn det_gram2(&self) -> i64 {
        det3(&self.gram2())
    }

    /// Determinant of the (half-integral) Gram matrix when it is an integer.
    pub fn gram_determinant(&self) -> Option<i64> {
        let d = self.det_gram2();
        (d % 8 == 0).then_some(d / 8)
    }

    pub fn is_positive_definite(&self) -> bool {
        let g = self.gram2();
        let m1 = g[0][0];
        let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        m1 > 0 && m2 > 0 && det3(&g) > 0
    }

    /// The form `v -> f(U v)`.
    pub fn substitute(&self, u: &Mat3) -> Self {
        let g = self.gram2();
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0;
                for k in 0..3 {
                    for l in 0..3 {
                        acc += u[k][i] * g[k][l] * u[l][j];
                    }
                }
                out[i][j] = acc;
            }
        }
        Self::from_gram2(&out)
    }

    /// Per-coordinate bounds of the ellipsoid `f <= bound`.
    fn box_bounds(&self, bound: i64) -> [i64; 3] {
        let g = self.gram2();
        let det = det3(&g);
        let cof = [
            g[1][1] * g[2][2] - g[1][2] * g[2][1],
            g[0][0] * g[2][2] - g[0][2] * g[2][0],
            g[0][0] * g[1][1] - g[0][1] * g[1][0],
        ];
        cof.map(|c| isqrt(2 * bound * c / det))
    }

    /// Calls `visit(x, y, z, value)` for every lattice point with value `<= bound`.
    pub fn for_each_point(&self, bound: i64, mut visit: impl FnMut(i64, i64, i64, i64)) {
        let [bx, by, bz] = self.box_bounds(bound);
        for x in -bx..=bx {
            for y in -by..=by {
                for z in -bz..=bz {
                    let v = self.eval(x, y, z);
                    if v <= bound {
                        visit(x, y, z, v);
                    }
                }
            }
        }
    }

    /// Representation numbers `r(n)` for `0 <= n <= bound`.
    pub fn theta_prefix(&self, bound: i64) -> Vec<u64> {
        let mut counts = vec![0u64; bound as usize + 1];
        self.for_each_point(bound, |_, _, _, v| counts[v as usize] += 1);
        counts
    }
}

impl std::fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x^2+{}y^2+{}z^2+{}yz+{}zx+{}xy",
            self.a, self.b, self.c, self.r, self.s, self.t
        )
    }
}

/// `(x, y, z) -> (3x + y - z, y, z)`.
pub const SUBLATTICE_MAP: Mat3 = [[3, 1, -1], [0, 1, 0], [0, 0, 1]];

fn check_m(m: i64) -> Result<()> {
    if m < 1 {
        return Err(Error::NonPositive(m));
    }
    if m % 3 == 0 {
        return Err(Error::MultipleOfThree(m));
    }
    Ok(())
}

/// `m^2 x^2 + 3y^2 + 2yz + 5z^2`.
pub fn build_fm(m: i64) -> Result<TernaryForm> {
    check_m(m)?;
    TernaryForm::new(m * m, 3, 5, 2, 0, 0)
}

/// `m^2 (3x + y - z)^2 + 3y^2 + 2yz + 5z^2`, expanded.
pub fn build_tilde_fm(m: i64) -> Result<TernaryForm> {
    Ok(build_fm(m)?.substitute(&SUBLATTICE_MAP))
}

/// `{n in [1, bound] : f represents n}`, ascending.
pub fn ternary_spectrum(f: &TernaryForm, bound: i64) -> Vec<i64> {
    f.theta_prefix(bound)
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &r)| r > 0)
        .map(|(n, _)| n as i64)
        .collect()
}

/// The shape `4x^2 + 6y^2 + 7z^2 + 6yz + 2zx` claimed for `f~_1`.
pub fn tilde_f1_reduced_shape() -> TernaryForm {
    TernaryForm {
        a: 4,
        b: 6,
        c: 7,
        r: 6,
        s: 2,
        t: 0,
    }
}

/// Residues `(x, y, z) mod 3` (as representatives in `{-1, 0, 1}`) with
/// `f_m(x, y, z) = 1 (mod 3)`, sorted.
pub fn residues_one_mod_three(m: i64) -> Result<Vec<(i64, i64, i64)>> {
    let f = build_fm(m)?;
    let mut out = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            for z in -1..=1 {
                if f.eval(x, y, z).rem_euclid(3) == 1 {
                    out.push((x, y, z));
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Searches `U` with entries in `[-entry_bound, entry_bound]`, `det U = ±1`
/// and `f(U v) = g(v)`. Columns of `U` must represent the diagonal of `g`,
/// which keeps the search small.
pub fn find_equivalence(f: &TernaryForm, g: &TernaryForm, entry_bound: i64) -> Option<Mat3> {
    let columns_for = |target: i64| -> Vec<[i64; 3]> {
        let mut v = Vec::new();
        for x in -entry_bound..=entry_bound {
            for y in -entry_bound..=entry_bound {
                for z in -entry_bound..=entry_bound {
                    if f.eval(x, y, z) == target {
                        v.push([x, y, z]);
                    }
                }
            }
        }
        v
    };
    let (c1, c2, c3) = (columns_for(g.a), columns_for(g.b), columns_for(g.c));
    let target = g.gram2();
    let fg = f.gram2();
    let bilinear = |u: &[i64; 3], w: &[i64; 3]| -> i64 {
        let mut acc = 0;
        for k in 0..3 {
            for l in 0..3 {
                acc += u[k] * fg[k][l] * w[l];
            }
        }
        acc
    };
    for u in &c1 {
        for v in &c2 {
            if bilinear(u, v) != target[0][1] {
                continue;
            }
            for w in &c3 {
                if bilinear(u, w) != target[0][2] || bilinear(v, w) != target[1][2] {
                    continue;
                }
                let mat = [[u[0], v[0], w[0]], [u[1], v[1], w[1]], [u[2], v[2], w[2]]];
                if det3(&mat).abs() == 1 {
                    return Some(mat);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub matrix: Mat3,
    pub det: i64,
}

/// Comparison of `Q(f_1)` and `Q(f~_1)` on integers `= 1 (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueOneReport {
    pub bound: i64,
    /// `Q(f_1)` restricted to `1 mod 3`.
    pub lhs: Vec<i64>,
    /// `Q(f~_1)` restricted to `1 mod 3`.
    pub rhs: Vec<i64>,
    pub symmetric_difference: Vec<i64>,
    /// `lhs - {1} == rhs`.
    pub identity_holds: bool,
    pub theta_bound: i64,
    pub theta_agree: bool,
    pub det_tilde: Option<i64>,
    pub det_shape: Option<i64>,
    pub equivalence: Option<Equivalence>,
    /// `certified` when an explicit change of variables was found,
    /// `consistent, not certified` otherwise.
    pub shape_status: String,
}

impl ResidueOneReport {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.theta_agree && self.det_tilde == self.det_shape
    }
}

pub const THETA_COMPARE_BOUND: i64 = 200;
pub const EQUIVALENCE_ENTRY_BOUND: i64 = 3;

/// Compares the two represented sets up to `bound` (at least 100), and
/// cross-checks the expansion of `f~_1` against its reduced shape.
pub fn check_residue_one_identity(bound: i64) -> Result<ResidueOneReport> {
    if bound < 100 {
        return Err(Error::HypothesisNotMet(format!("bound {bound} < 100")));
    }
    let f1 = build_fm(1)?;
    let tilde = build_tilde_fm(1)?;
    let shape = tilde_f1_reduced_shape();
    let in_s31 = |n: &i64| n % 3 == 1;

    let lhs: Vec<i64> = ternary_spectrum(&f1, bound)
        .into_iter()
        .filter(in_s31)
        .collect();
    let rhs: Vec<i64> = ternary_spectrum(&tilde, bound)
        .into_iter()
        .filter(in_s31)
        .collect();
    let (ls, rs): (BTreeSet<i64>, BTreeSet<i64>) =
        (lhs.iter().copied().collect(), rhs.iter().copied().collect());
    let symmetric_difference: Vec<i64> = ls.symmetric_difference(&rs).copied().collect();
    let mut lhs_minus_one = ls.clone();
    lhs_minus_one.remove(&1);
    let identity_holds = lhs_minus_one == rs;

    let theta_agree =
        tilde.theta_prefix(THETA_COMPARE_BOUND) == shape.theta_prefix(THETA_COMPARE_BOUND);
    let equivalence =
        find_equivalence(&tilde, &shape, EQUIVALENCE_ENTRY_BOUND).map(|matrix| Equivalence {
            det: det3(&matrix),
            matrix,
        });
    let shape_status = if equivalence.is_some() {
        "certified".to_string()
    } else {
        "consistent, not certified".to_string()
    };

    Ok(ResidueOneReport {
        bound,
        lhs,
        rhs,
        symmetric_difference,
        identity_holds,
        theta_bound: THETA_COMPARE_BOUND,
        theta_agree,
        det_tilde: tilde.gram_determinant(),
        det_shape: shape.gram_determinant(),
        equivalence,
        shape_status,
    })
}
