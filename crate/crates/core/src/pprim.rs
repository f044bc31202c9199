//! Deciding complete p-primitivity of proper classes.
//!
//! For a prime `p` not dividing `D`:
//!
//! * if `(D/p) = -1`, no multiple of `p` is p-primitively represented, so no
//!   class is completely p-primitive (`p^2 a` is always a witness);
//! * if `4p^2 = m^2 + |D| n^2` has a solution with `gcd(m, n, p) = 1`, every
//!   class is completely p-primitive;
//! * otherwise a class `A` is completely p-primitive exactly when `A` has
//!   order 4 and `p^2` is p-primitively represented by `A^2`.
//!
//! A solution `(m, n)` of the first equation also yields, for every form
//! `[a,b,c]` of discriminant `D`, an integer matrix `T` with `det T = p^2`
//! and `f(T v) = p^2 f(v)` that is not divisible by `p` ([`build_isometry`]).

use serde::{Deserialize, Serialize};

use crate::classgroup::{compose, element_order, enumerate_classes, identity_form, ProperClass};
use crate::error::{Error, Result};
use crate::intarith::{exact_sqrt, gcd3, is_prime, isqrt, kronecker};
use crate::qform::{check_discriminant, substitute, BinaryForm, IntMap2};
use crate::repcount::rep_counts;

/// `4p^2 = m^2 + |D| n^2` with `gcd(m, n, p) = 1` and `m, n >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSquareSolution {
    pub m: i64,
    pub n: i64,
    pub p: i64,
}

impl TwoSquareSolution {
    pub fn is_valid_for(&self, d: i64) -> bool {
        let (m, n, p) = (self.m, self.n, self.p);
        m >= 0 && n >= 0 && 4 * p * p == m * m - d * n * n && gcd3(m, n, p) == 1
    }
}

fn check_prime_for(d: i64, p: i64) -> Result<()> {
    check_discriminant(d)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d % p == 0 {
        return Err(Error::PDividesDiscriminant { p, d });
    }
    Ok(())
}

/// All solutions of `4p^2 = m^2 + |D| n^2`, `gcd(m, n, p) = 1`, `m, n >= 0`,
/// ordered by `n`. Empty exactly when `p^2` is not p-primitively represented
/// by the principal form.
pub fn solve_principal_square(d: i64, p: i64) -> Result<Vec<TwoSquareSolution>> {
    check_prime_for(d, p)?;
    if kronecker(d, p) == -1 {
        return Err(Error::InertPrime { p, d });
    }
    let target = 4 * p * p;
    let n_max = isqrt(target / -d);
    Ok((0..=n_max)
        .filter_map(|n| {
            let m = exact_sqrt(target + d * n * n)?;
            (gcd3(m, n, p) == 1).then_some(TwoSquareSolution { m, n, p })
        })
        .collect())
}

/// `T = [[(m + bn)/2, cn], [-an, (m - bn)/2]]` for `f = [a, b, c]`.
///
/// Under the substitution convention of [`IntMap2`], `f(T(x, y)) = p^2 f(x, y)`.
pub fn build_isometry(f: &BinaryForm, sol: &TwoSquareSolution) -> Result<IntMap2> {
    let d = f.discriminant();
    if !sol.is_valid_for(d) {
        return Err(Error::InvalidSolution(format!(
            "(m={}, n={}, p={}) for D = {d}",
            sol.m, sol.n, sol.p
        )));
    }
    let (a, b, c) = (f.a(), f.b(), f.c());
    let (m, n) = (sol.m, sol.n);
    if (m - b * n).rem_euclid(2) != 0 {
        return Err(Error::InvalidSolution(format!(
            "m = {m} and bn = {} differ in parity",
            b * n
        )));
    }
    Ok(IntMap2::new(
        (m + b * n) / 2,
        c * n,
        -a * n,
        (m - b * n) / 2,
    ))
}

/// Checked properties of a scaling map `T` for a form `f` and prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryCheck {
    pub det: i64,
    pub trace: i64,
    pub scales_form: bool,
    pub not_divisible_by_p: bool,
    pub trace_coprime_to_p: bool,
}

impl IsometryCheck {
    pub fn run(f: &BinaryForm, t: &IntMap2, p: i64) -> Self {
        let image = substitute(f, t);
        let scaled = f.coeffs().map(|x| p * p * x);
        Self {
            det: t.det(),
            trace: t.trace(),
            scales_form: image == scaled,
            not_divisible_by_p: !t.all_divisible_by(p),
            trace_coprime_to_p: t.trace() % p != 0,
        }
    }

    pub fn all_hold(&self, p: i64) -> bool {
        self.det == p * p && self.scales_form && self.not_divisible_by_p && self.trace_coprime_to_p
    }
}

/// The lexicographically largest p-primitive solution of `f(x, y) = p^2`
/// for the class rep, if any.
pub fn p_square_in_class(x: &ProperClass, p: i64) -> Result<Option<(i64, i64)>> {
    let rec = rep_counts(x.rep(), p * p, p)?;
    Ok(rec.p_primitive_solutions().into_iter().next_back())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SymbolMinusOne,
    PrincipalSquare,
    OrderFourPositive,
    OrderFourNegative,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::SymbolMinusOne => "symbol_minus_one",
            Route::PrincipalSquare => "principal_square",
            Route::OrderFourPositive => "order_four_positive",
            Route::OrderFourNegative => "order_four_negative",
        }
    }
}

/// Machine-checkable support for a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// `n = p^2 a` is represented by `(p, 0)` but never p-primitively.
    Counterexample { n: i64 },
    /// A solution of `4p^2 = m^2 + |D| n^2`.
    TwoSquare { m: i64, n: i64 },
    /// `f2(x, y) = p^2` with `gcd(x, y, p) = 1`, where `f2` represents `A^2`.
    PSquare {
        square_class: [i64; 3],
        x: i64,
        y: i64,
    },
    /// Which half of the order-four criterion failed.
    Failed {
        order: u32,
        p_square_in_square_class: bool,
        square_class: [i64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub class: ProperClass,
    pub p: i64,
    pub completely_p_primitive: bool,
    pub route: Route,
    pub evidence: Evidence,
}

/// JSON shape: `{"cpp", "evidence", "form", "p", "route"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub cpp: bool,
    pub evidence: Evidence,
    pub form: [i64; 3],
    pub p: i64,
    pub route: Route,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        Self {
            cpp: v.completely_p_primitive,
            evidence: v.evidence.clone(),
            form: v.class.rep().coeffs(),
            p: v.p,
            route: v.route,
        }
    }
}

/// Decides whether the proper class `x` is completely p-primitive.
pub fn classify(x: &ProperClass, p: i64) -> Result<Verdict> {
    let d = x.discriminant();
    check_prime_for(d, p)?;
    let verdict = |cpp, route, evidence| Verdict {
        class: *x,
        p,
        completely_p_primitive: cpp,
        route,
        evidence,
    };

    if kronecker(d, p) == -1 {
        let n = p * p * x.rep().a();
        return Ok(verdict(
            false,
            Route::SymbolMinusOne,
            Evidence::Counterexample { n },
        ));
    }

    if let Some(sol) = solve_principal_square(d, p)?.first() {
        return Ok(verdict(
            true,
            Route::PrincipalSquare,
            Evidence::TwoSquare { m: sol.m, n: sol.n },
        ));
    }

    let order = element_order(x)?;
    let square = compose(x, x)?;
    let sq_rep = square.rep().coeffs();
    let p_square = p_square_in_class(&square, p)?;
    Ok(match (order, p_square) {
        (4, Some((sx, sy))) => verdict(
            true,
            Route::OrderFourPositive,
            Evidence::PSquare {
                square_class: sq_rep,
                x: sx,
                y: sy,
            },
        ),
        _ => verdict(
            false,
            Route::OrderFourNegative,
            Evidence::Failed {
                order,
                p_square_in_square_class: p_square.is_some(),
                square_class: sq_rep,
            },
        ),
    })
}

/// [`classify`] over every class of discriminant `d`, sorted by class.
pub fn classify_all(d: i64, p: i64) -> Result<Vec<Verdict>> {
    check_prime_for(d, p)?;
    enumerate_classes(d)?
        .classes()
        .iter()
        .map(|x| classify(x, p))
        .collect()
}

/// Re-checks a verdict's evidence from scratch. Does not re-derive the
/// verdict itself.
pub fn evidence_is_valid(v: &Verdict) -> Result<bool> {
    let f = v.class.rep();
    let d = f.discriminant();
    let p = v.p;
    Ok(match (&v.evidence, v.route, v.completely_p_primitive) {
        (Evidence::Counterexample { n }, Route::SymbolMinusOne, false) => {
            let rec = rep_counts(f, *n, p)?;
            kronecker(d, p) == -1 && rec.r > 0 && rec.r_star_p == Some(0)
        }
        (Evidence::TwoSquare { m, n }, Route::PrincipalSquare, true) => {
            let sol = TwoSquareSolution { m: *m, n: *n, p };
            sol.is_valid_for(d) && rep_counts(identity_form(d)?.rep(), p * p, p)?.r_star() > 0
        }
        (Evidence::PSquare { square_class, x, y }, Route::OrderFourPositive, true) => {
            let [a, b, c] = *square_class;
            let g = BinaryForm::new(a, b, c)?;
            ProperClass::of(&g) == compose(&v.class, &v.class)?
                && g.eval(*x, *y) == p * p
                && gcd3(*x, *y, p) == 1
                && element_order(&v.class)? == 4
        }
        (
            Evidence::Failed {
                order,
                p_square_in_square_class,
                square_class,
            },
            Route::OrderFourNegative,
            false,
        ) => {
            let [a, b, c] = *square_class;
            let sq = ProperClass::from_coeffs(a, b, c)?;
            element_order(&v.class)? == *order
                && sq == compose(&v.class, &v.class)?
                && p_square_in_class(&sq, p)?.is_some() == *p_square_in_square_class
                && !(*order == 4 && *p_square_in_square_class)
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(a: i64, b: i64, c: i64) -> ProperClass {
        ProperClass::from_coeffs(a, b, c).unwrap()
    }

    fn sols(d: i64, p: i64) -> Vec<(i64, i64)> {
        solve_principal_square(d, p)
            .unwrap()
            .iter()
            .map(|s| (s.m, s.n))
            .collect()
    }

    #[test]
    fn principal_square_examples() {
        assert!(sols(-56, 3).is_empty());
        assert!(sols(-56, 23).contains(&(10, 6)));
        assert!(sols(-3, 7).contains(&(11, 5)));
        assert_eq!(
            solve_principal_square(-56, 7),
            Err(Error::PDividesDiscriminant { p: 7, d: -56 })
        );
        assert_eq!(
            solve_principal_square(-56, 11),
            Err(Error::InertPrime { p: 11, d: -56 })
        );
        assert_eq!(solve_principal_square(-56, 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn build_isometry_examples() {
        let cases = [
            ((1, 0, 1), (6, 4, 5), IntMap2::new(3, 4, -4, 3)),
            ((1, 1, 1), (11, 5, 7), IntMap2::new(8, 5, -5, 3)),
            ((1, 0, 14), (10, 6, 23), IntMap2::new(5, 84, -6, 5)),
        ];
        for ((a, b, c), (m, n, p), expected) in cases {
            let f = BinaryForm::new(a, b, c).unwrap();
            let t = build_isometry(&f, &TwoSquareSolution { m, n, p }).unwrap();
            assert_eq!(t, expected);
            assert_eq!(t.det(), p * p);
            let check = IsometryCheck::run(&f, &t, p);
            assert!(check.all_hold(p), "{check:?}");
        }
        let f = BinaryForm::new(1, 0, 1).unwrap();
        assert!(build_isometry(&f, &TwoSquareSolution { m: 6, n: 4, p: 7 }).is_err());
    }

    #[test]
    fn p_square_examples() {
        assert_eq!(p_square_in_class(&class(2, 0, 7), 3).unwrap(), Some((1, 1)));
        assert_eq!(p_square_in_class(&class(1, 0, 14), 3).unwrap(), None);
        assert_eq!(p_square_in_class(&class(2, 0, 7), 5).unwrap(), Some((3, 1)));
    }

    #[test]
    fn classify_examples() {
        let v = classify(&class(3, 2, 5), 3).unwrap();
        assert!(v.completely_p_primitive);
        assert_eq!(v.route, Route::OrderFourPositive);
        assert!(matches!(
            v.evidence,
            Evidence::PSquare {
                square_class: [2, 0, 7],
                ..
            }
        ));

        let v = classify(&class(1, 0, 14), 3).unwrap();
        assert!(!v.completely_p_primitive);
        assert_eq!(v.route, Route::OrderFourNegative);

        for v in classify_all(-56, 23).unwrap() {
            assert!(v.completely_p_primitive);
            assert_eq!(v.route, Route::PrincipalSquare);
        }
        assert!(matches!(
            classify(&class(3, 2, 5), 7),
            Err(Error::PDividesDiscriminant { .. })
        ));
    }

    #[test]
    fn classify_all_examples() {
        let got: Vec<([i64; 3], bool)> = classify_all(-56, 3)
            .unwrap()
            .iter()
            .map(|v| (v.class.rep().coeffs(), v.completely_p_primitive))
            .collect();
        assert_eq!(
            got,
            vec![
                ([1, 0, 14], false),
                ([2, 0, 7], false),
                ([3, -2, 5], true),
                ([3, 2, 5], true)
            ]
        );

        for v in classify_all(-56, 11).unwrap() {
            assert!(!v.completely_p_primitive);
            assert_eq!(v.route, Route::SymbolMinusOne);
        }

        let v = classify_all(-3, 7).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].completely_p_primitive);
        let Evidence::TwoSquare { m, n } = v[0].evidence else {
            panic!("{:?}", v[0].evidence)
        };
        assert_eq!(m * m + 3 * n * n, 196);
        assert!(sols(-3, 7).contains(&(11, 5)));
    }

    #[test]
    fn evidence_revalidates() {
        for (d, p) in [
            (-56, 3),
            (-56, 5),
            (-56, 11),
            (-56, 23),
            (-3, 7),
            (-23, 2),
            (-31, 7),
        ] {
            for v in classify_all(d, p).unwrap() {
                assert!(evidence_is_valid(&v).unwrap(), "{v:?}");
            }
        }
    }

    #[test]
    fn tampered_evidence_is_rejected() {
        let mut v = classify(&class(3, 2, 5), 3).unwrap();
        v.evidence = Evidence::PSquare {
            square_class: [2, 0, 7],
            x: 1,
            y: 0,
        };
        assert!(!evidence_is_valid(&v).unwrap());
        v.route = Route::PrincipalSquare;
        assert!(!evidence_is_valid(&v).unwrap());
    }

    #[test]
    fn verdict_json_field_order() {
        let v = classify(&class(1, 0, 14), 11).unwrap();
        let s = serde_json::to_string(&VerdictJson::from(&v)).unwrap();
        assert_eq!(
            s,
            r#"{"cpp":false,"evidence":{"kind":"counterexample","n":121},"form":[1,0,14],"p":11,"route":"symbol_minus_one"}"#
        );
    }
}
