//! Brute-force cross-checks. Everything here decides by enumeration and is
//! kept independent of the decision procedure in [`crate::pprim`]; all
//! results are truncations at an explicit bound and say so.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classgroup::{compose, enumerate_classes, identity_form, ProperClass};
use crate::error::{Error, Result};
use crate::intarith::{gcd3, is_prime, isqrt, kronecker, primes_up_to, valuation};
use crate::pprim::{
    build_isometry, classify, evidence_is_valid, solve_principal_square, Route, Verdict,
};
use crate::qform::{improper_automorph, is_negative_discriminant, substitute, BinaryForm, IntMap2};
use crate::repcount::{enumerate_solutions, rep_counts, spectrum, Sweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BruteStatus {
    NoWitnessUpToBound,
    WitnessFound,
}

/// Finite truncation of `Q(f) = Q_p^*(f)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteVerdict {
    pub form: [i64; 3],
    pub p: i64,
    pub bound: i64,
    pub witness: Option<i64>,
    pub status: BruteStatus,
}

impl BruteVerdict {
    fn from_sweep(f: &BinaryForm, sweep: &Sweep) -> Self {
        let witness = sweep.first_witness();
        Self {
            form: f.coeffs(),
            p: sweep.p,
            bound: sweep.bound,
            witness,
            status: if witness.is_some() {
                BruteStatus::WitnessFound
            } else {
                BruteStatus::NoWitnessUpToBound
            },
        }
    }
}

fn check_p_coprime(f: &BinaryForm, p: i64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let d = f.discriminant();
    if d % p == 0 {
        return Err(Error::PDividesDiscriminant { p, d });
    }
    Ok(())
}

/// Smallest `n <= bound` with `r(n) > 0` and `r_p^*(n) = 0`, if any.
pub fn brute_force_cpp(f: &BinaryForm, p: i64, bound: i64) -> Result<BruteVerdict> {
    check_p_coprime(f, p)?;
    Ok(BruteVerdict::from_sweep(f, &Sweep::new(f, bound, p)?))
}

/// Smallest witness `n <= p^2 m_max`, searching only multiples of `p^2`.
///
/// Exhaustive in that range: if `p` does not divide `n` every solution is
/// p-primitive, and `f(x, y) = n` with `p | x, y` forces `p^2 | n`.
pub fn witness_among_p_square_multiples(f: &BinaryForm, p: i64, m_max: i64) -> Result<Option<i64>> {
    check_p_coprime(f, p)?;
    let p2 = p * p;
    for m in 1..=m_max {
        let n = p2.checked_mul(m).ok_or(Error::Overflow("witness search"))?;
        let sols = enumerate_solutions(f, n)?;
        if !sols.is_empty() && sols.iter().all(|&(x, y)| gcd3(x, y, p) == p) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Result of searching all `T` with `det T = p^2`, `f(T v) = p^2 f(v)` and
/// `T` not divisible by `p`, for the principal form `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSearchReport {
    pub d: i64,
    pub p: i64,
    pub entry_bound: i64,
    pub matrices_found: usize,
    pub example: Option<[[i64; 2]; 2]>,
    pub principal_square: bool,
    /// Whether the matrix built from the first two-square solution lies in
    /// the search box; `None` when there is no such solution.
    pub constructed_in_box: Option<bool>,
    pub agree: bool,
}

/// Default box for [`verify_scaling_map_by_search`]:
/// `ceil(2p sqrt(max(a, c)))` for the principal form.
pub fn default_entry_bound(d: i64, p: i64) -> Result<i64> {
    let f = *identity_form(d)?.rep();
    let m = f.a().max(f.c());
    let r = isqrt(m);
    let root = if r * r == m { r } else { r + 1 };
    Ok(2 * p * root)
}

/// Existence of a proper p-primitive scaling map of the principal form,
/// found by exhaustive search, compared with solvability of
/// `4p^2 = m^2 + |D| n^2`.
///
/// The first column of such a `T` represents `p^2 a` and the second `p^2 c`,
/// so enumerating those two finite solution sets covers every candidate in
/// the box.
pub fn verify_scaling_map_by_search(
    d: i64,
    p: i64,
    entry_bound: i64,
) -> Result<MatrixSearchReport> {
    let f = *identity_form(d)?.rep();
    check_p_coprime(&f, p)?;
    let (a, c) = (f.a(), f.c());
    let p2 = p * p;
    let in_box = |v: &(i64, i64)| v.0.abs() <= entry_bound && v.1.abs() <= entry_bound;
    let first: Vec<(i64, i64)> = enumerate_solutions(&f, p2 * a)?
        .into_iter()
        .filter(in_box)
        .collect();
    let second: Vec<(i64, i64)> = enumerate_solutions(&f, p2 * c)?
        .into_iter()
        .filter(in_box)
        .collect();
    let target = f.coeffs().map(|x| p2 * x);

    let mut found = Vec::new();
    for &(m11, m21) in &first {
        for &(m12, m22) in &second {
            let t = IntMap2::new(m11, m12, m21, m22);
            if t.det() == p2 && !t.all_divisible_by(p) && substitute(&f, &t) == target {
                found.push(t);
            }
        }
    }

    let sols = if kronecker(d, p) == -1 {
        Vec::new()
    } else {
        solve_principal_square(d, p)?
    };
    let constructed_in_box = match sols.first() {
        Some(sol) => {
            let t = build_isometry(&f, sol)?;
            Some(
                [t.m11, t.m12, t.m21, t.m22]
                    .iter()
                    .all(|x| x.abs() <= entry_bound),
            )
        }
        None => None,
    };
    let principal_square = !sols.is_empty();
    Ok(MatrixSearchReport {
        d,
        p,
        entry_bound,
        matrices_found: found.len(),
        example: found.first().map(IntMap2::rows),
        principal_square,
        constructed_in_box,
        agree: principal_square == !found.is_empty() && constructed_in_box != Some(false),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityViolation {
    pub v: (i64, i64),
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionParityReport {
    pub form: [i64; 3],
    pub q: i64,
    pub vectors_checked: usize,
    pub violations: Vec<ParityViolation>,
}

impl ReflectionParityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For the improper automorph `s` of an ambiguous reduced form and a prime
/// `q` not dividing `D`: `ord_q f(v - s v)` and `ord_q f(v + s v)` are even,
/// and `s v != ±v` whenever `v` is not in `qZ^2` but `q | f(v)`.
pub fn verify_reflection_parity(
    f: &BinaryForm,
    q: i64,
    sample_bound: i64,
) -> Result<ReflectionParityReport> {
    let sigma = improper_automorph(f)?;
    check_p_coprime(f, q)?;
    let mut violations = Vec::new();
    let mut checked = 0;
    for x in -sample_bound..=sample_bound {
        for y in -sample_bound..=sample_bound {
            checked += 1;
            let (sx, sy) = sigma.apply(x, y);
            for (label, w) in [("v - sv", (x - sx, y - sy)), ("v + sv", (x + sx, y + sy))] {
                let value = f.eval(w.0, w.1);
                if value != 0 && valuation(q, value)? % 2 != 0 {
                    violations.push(ParityViolation {
                        v: (x, y),
                        detail: format!("ord_{q} f({label}) = ord_{q} {value} is odd"),
                    });
                }
            }
            let primitive_at_q = x % q != 0 || y % q != 0;
            let fixed_up_to_sign = (sx, sy) == (x, y) || (sx, sy) == (-x, -y);
            if primitive_at_q && f.eval(x, y) % q == 0 && fixed_up_to_sign {
                violations.push(ParityViolation {
                    v: (x, y),
                    detail: format!("s v = ±v although {q} | f(v) and v is not in {q}Z^2"),
                });
            }
        }
    }
    Ok(ReflectionParityReport {
        form: f.coeffs(),
        q,
        vectors_checked: checked,
        violations,
    })
}

/// One instance of the product rule: `a` p-primitive for `A`, `alpha`
/// p-primitive for `Z`, `gcd(a, alpha, D) = 1`; is `a alpha` p-primitively
/// represented by `A Z` or by `A Z^{-1}`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRuleInstance {
    pub class_a: [i64; 3],
    pub a: i64,
    pub class_z: [i64; 3],
    pub alpha: i64,
    pub product: [i64; 3],
    pub quotient: [i64; 3],
    pub in_product: bool,
    pub in_quotient: bool,
}

impl ProductRuleInstance {
    pub fn holds(&self) -> bool {
        self.in_product || self.in_quotient
    }
}

pub fn check_product_rule(
    class_a: &ProperClass,
    a: i64,
    class_z: &ProperClass,
    alpha: i64,
    p: i64,
) -> Result<ProductRuleInstance> {
    let d = class_a.discriminant();
    check_p_coprime(class_a.rep(), p)?;
    if gcd3(a, alpha, d) != 1 {
        return Err(Error::HypothesisNotMet(format!(
            "gcd({a}, {alpha}, {d}) != 1"
        )));
    }
    for (cls, n) in [(class_a, a), (class_z, alpha)] {
        if rep_counts(cls.rep(), n, p)?.r_star() == 0 {
            return Err(Error::HypothesisNotMet(format!(
                "{n} is not {p}-primitively represented by {cls}"
            )));
        }
    }
    let product = compose(class_a, class_z)?;
    let quotient = compose(class_a, &class_z.inverse())?;
    let n = a * alpha;
    Ok(ProductRuleInstance {
        class_a: class_a.rep().coeffs(),
        a,
        class_z: class_z.rep().coeffs(),
        alpha,
        product: product.rep().coeffs(),
        quotient: quotient.rep().coeffs(),
        in_product: rep_counts(product.rep(), n, p)?.r_star() > 0,
        in_quotient: rep_counts(quotient.rep(), n, p)?.r_star() > 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRuleReport {
    pub d: i64,
    pub p: i64,
    pub trials: usize,
    pub failures: Vec<ProductRuleInstance>,
}

impl ProductRuleReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

const PRODUCT_SAMPLE_MAX: i64 = 200;

/// Samples `trials` instances with `a, alpha <= 200`. The generator is
/// seeded from `(d, p)`, so runs are reproducible.
pub fn verify_product_rule(d: i64, p: i64, trials: usize) -> Result<ProductRuleReport> {
    let group = enumerate_classes(d)?;
    check_p_coprime(group.identity().rep(), p)?;
    let pools: Vec<(ProperClass, Vec<i64>)> = group
        .classes()
        .iter()
        .map(|x| Ok((*x, spectrum(x.rep(), PRODUCT_SAMPLE_MAX, p)?.qp_star)))
        .collect::<Result<_>>()?;
    let seed = ((-d) as u64) << 20 ^ p as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < trials * 50 {
        attempts += 1;
        let (xa, pool_a) = pools.choose(&mut rng).expect("class group is nonempty");
        let (xz, pool_z) = pools.choose(&mut rng).expect("class group is nonempty");
        let (Some(&a), Some(&alpha)) = (pool_a.choose(&mut rng), pool_z.choose(&mut rng)) else {
            continue;
        };
        if gcd3(a, alpha, d) != 1 {
            continue;
        }
        let inst = check_product_rule(xa, a, xz, alpha, p)?;
        if !inst.holds() {
            failures.push(inst);
        }
        done += 1;
    }
    Ok(ProductRuleReport {
        d,
        p,
        trials: done,
        failures,
    })
}

/// `x^2 + k y^2` for an odd prime `p` it represents, `gcd(p, 2k) = 1`.
pub fn verify_diagonal_form(k: i64, p: i64, bound: i64) -> Result<BruteVerdict> {
    if k < 1 {
        return Err(Error::NonPositive(k));
    }
    if !is_prime(p) || p == 2 || k % p == 0 {
        return Err(Error::HypothesisNotMet(format!(
            "need an odd prime p coprime to 2k, got p = {p}, k = {k}"
        )));
    }
    let f = BinaryForm::new(1, 0, k)?;
    if enumerate_solutions(&f, p)?.is_empty() {
        return Err(Error::HypothesisNotMet(format!(
            "{p} is not represented by {f}"
        )));
    }
    brute_force_cpp(&f, p, bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub dmin: i64,
    pub dmax: i64,
    pub pmax: i64,
    pub bound: i64,
    /// Negative verdicts without a witness up to `bound` are retried once
    /// over `n = p^2 m`, `m <= ceiling`.
    pub ceiling: i64,
}

impl GridConfig {
    pub fn new(dmin: i64, dmax: i64, pmax: i64, bound: i64) -> Self {
        Self {
            dmin,
            dmax,
            pmax,
            bound,
            ceiling: bound * 10,
        }
    }

    pub fn cells(&self) -> Vec<(i64, i64)> {
        let primes = primes_up_to(self.pmax);
        (self.dmin..=self.dmax)
            .filter(|&d| is_negative_discriminant(d))
            .flat_map(|d| {
                primes
                    .iter()
                    .filter(move |&&p| d % p != 0)
                    .map(move |&p| (d, p))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Positive verdict, no witness up to the bound.
    Consistent,
    /// Negative verdict with a brute-force witness.
    WitnessConfirmed,
    /// Negative verdict, no witness even after escalation.
    Unconfirmed,
    /// Positive verdict contradicted by a witness.
    Contradiction,
    /// The verdict's own evidence does not re-validate.
    BadEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub form: [i64; 3],
    pub cpp: bool,
    pub route: Route,
    pub witness: Option<i64>,
    pub searched_to: i64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub d: i64,
    pub p: i64,
    pub classes: Vec<ClassCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub config: GridConfig,
    pub cells: Vec<CellReport>,
    pub classes_checked: usize,
    pub positive: usize,
    pub negative_confirmed: usize,
    pub unconfirmed: usize,
    pub contradictions: usize,
    pub bad_evidence: usize,
}

impl GridReport {
    pub fn is_clean(&self) -> bool {
        self.contradictions == 0 && self.bad_evidence == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = (&CellReport, &ClassCheck)> {
        self.cells.iter().flat_map(|cell| {
            cell.classes
                .iter()
                .filter(|c| matches!(c.outcome, Outcome::Contradiction | Outcome::BadEvidence))
                .map(move |c| (cell, c))
        })
    }

    pub fn find(&self, d: i64, p: i64, form: [i64; 3]) -> Option<&ClassCheck> {
        self.cells
            .iter()
            .find(|c| c.d == d && c.p == p)?
            .classes
            .iter()
            .find(|c| c.form == form)
    }
}

/// Signature of the decision procedure under test.
pub type Classifier = dyn Fn(&ProperClass, i64) -> Result<Verdict> + Sync;

fn check_class(
    x: &ProperClass,
    p: i64,
    cfg: &GridConfig,
    classifier: &Classifier,
) -> Result<ClassCheck> {
    let v = classifier(x, p)?;
    let f = x.rep();
    let mut brute = brute_force_cpp(f, p, cfg.bound)?;
    if !v.completely_p_primitive && brute.witness.is_none() && cfg.ceiling > 0 {
        brute.witness = witness_among_p_square_multiples(f, p, cfg.ceiling)?;
        brute.bound = p * p * cfg.ceiling;
    }
    let outcome = if !evidence_is_valid(&v).unwrap_or(false) {
        Outcome::BadEvidence
    } else {
        match (v.completely_p_primitive, brute.witness) {
            (true, None) => Outcome::Consistent,
            (true, Some(_)) => Outcome::Contradiction,
            (false, Some(_)) => Outcome::WitnessConfirmed,
            (false, None) => Outcome::Unconfirmed,
        }
    };
    Ok(ClassCheck {
        form: f.coeffs(),
        cpp: v.completely_p_primitive,
        route: v.route,
        witness: brute.witness,
        searched_to: brute.bound,
        outcome,
    })
}

/// Runs `classifier` over every `(D, p)` cell of the grid and compares each
/// verdict with a brute-force witness search.
pub fn verify_grid_with(cfg: &GridConfig, classifier: &Classifier) -> Result<GridReport> {
    let cells: Vec<CellReport> = cfg
        .cells()
        .into_par_iter()
        .map(|(d, p)| {
            let group = enumerate_classes(d)?;
            let classes = group
                .classes()
                .iter()
                .map(|x| check_class(x, p, cfg, classifier))
                .collect::<Result<Vec<_>>>()?;
            Ok(CellReport { d, p, classes })
        })
        .collect::<Result<_>>()?;

    let all = || cells.iter().flat_map(|c| c.classes.iter());
    let count = |o: Outcome| all().filter(|c| c.outcome == o).count();
    Ok(GridReport {
        config: *cfg,
        classes_checked: all().count(),
        positive: count(Outcome::Consistent),
        negative_confirmed: count(Outcome::WitnessConfirmed),
        unconfirmed: count(Outcome::Unconfirmed),
        contradictions: count(Outcome::Contradiction),
        bad_evidence: count(Outcome::BadEvidence),
        cells,
    })
}

pub fn verify_classification_grid(cfg: &GridConfig) -> Result<GridReport> {
    verify_grid_with(cfg, &classify)
}
