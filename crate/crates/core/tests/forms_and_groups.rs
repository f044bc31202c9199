use proptest::prelude::*;
use qprim::classgroup::{
    compose_with_b, composition_b, enumerate_classes, ClassGroup, ProperClass,
};
use qprim::intarith::{ext_gcd, gcd, isqrt};
use qprim::qform::{
    apply_map, improper_automorph, is_negative_discriminant, reduce, BinaryForm, IntMap2,
};

fn discriminants(max_abs: i64) -> impl Iterator<Item = i64> {
    (3..=max_abs)
        .map(|d| -d)
        .filter(|&d| is_negative_discriminant(d))
}

fn unimodular_maps() -> Vec<IntMap2> {
    let r = -5..=5i64;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if a * d - b * c == 1 {
                        out.push(IntMap2::new(a, b, c, d));
                    }
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn reduction_is_invariant_under_unimodular_maps(
        k in 1i64..=500,
        zero_mod_four in any::<bool>(),
        class_pick in 0usize..1000,
        map_pick in 0usize..100_000,
    ) {
        let d = if zero_mod_four { -4 * k } else { -(4 * k - 1) };
        let group = enumerate_classes(d).unwrap();
        let f = *group.classes()[class_pick % group.class_number()].rep();
        let maps = unimodular_maps();
        let m = maps[map_pick % maps.len()];

        let moved = apply_map(&f, &m);
        prop_assert_eq!(moved.discriminant(), d);
        let (back, u) = reduce(&moved).unwrap();
        prop_assert_eq!(back, f);
        prop_assert_eq!(u.det(), 1);
        prop_assert_eq!(apply_map(&moved, &u), back);
        prop_assert_eq!(reduce(&back).unwrap().0, back);
    }
}

#[test]
fn reduced_forms_are_bounded_and_fixed() {
    for d in discriminants(2000) {
        let bound = isqrt(-d / 3);
        for x in enumerate_classes(d).unwrap().classes() {
            let f = x.rep();
            assert!(f.is_reduced());
            assert!(f.a() <= bound, "{f}");
            assert_eq!(reduce(f).unwrap(), (*f, IntMap2::IDENTITY));
        }
    }
}

#[test]
fn improper_automorphs_of_ambiguous_forms() {
    let mut seen = 0;
    for d in discriminants(2000) {
        for x in enumerate_classes(d).unwrap().classes() {
            let f = x.rep();
            if !f.is_ambiguous() {
                assert!(improper_automorph(f).is_err());
                continue;
            }
            let m = improper_automorph(f).unwrap();
            assert_eq!(m.det(), -1, "{f}");
            assert_eq!(apply_map(f, &m), *f, "{f}");
            seen += 1;
        }
    }
    assert!(seen > 1000);
}

fn check_group(g: &ClassGroup) {
    let cls = g.classes();
    let e = g.identity();
    for x in cls {
        assert_eq!(g.compose(x, e).unwrap(), *x);
        assert!(
            g.compose(x, &x.inverse()).unwrap().is_identity(),
            "{}",
            x.rep()
        );
        assert_eq!(x.is_ambiguous(), x.rep().is_ambiguous());
        for y in cls {
            let xy = g.compose(x, y).unwrap();
            assert!(g.contains(&xy));
            assert_eq!(xy, g.compose(y, x).unwrap());
        }
    }
    let amb = g.ambiguous_classes().unwrap();
    for x in cls {
        assert_eq!(amb.contains(x), x.rep().is_ambiguous());
        assert_eq!(amb.contains(x), x.pow(2).unwrap().is_identity());
    }
}

fn check_associativity(g: &ClassGroup, triples: impl Iterator<Item = (usize, usize, usize)>) {
    let cls = g.classes();
    for (i, j, k) in triples {
        let (x, y, z) = (&cls[i], &cls[j], &cls[k]);
        let left = g.compose(&g.compose(x, y).unwrap(), z).unwrap();
        let right = g.compose(x, &g.compose(y, z).unwrap()).unwrap();
        assert_eq!(
            left,
            right,
            "D={} {} {} {}",
            g.discriminant(),
            x.rep(),
            y.rep(),
            z.rep()
        );
    }
}

#[test]
fn group_axioms_up_to_2000() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for d in discriminants(2000) {
        let g = enumerate_classes(d).unwrap();
        check_group(&g);
        let h = g.class_number();
        if h <= 8 {
            check_associativity(&g, (0..h * h * h).map(|t| (t % h, t / h % h, t / (h * h))));
        } else {
            let triples: Vec<_> = (0..200)
                .map(|_| {
                    (
                        rng.gen_range(0..h),
                        rng.gen_range(0..h),
                        rng.gen_range(0..h),
                    )
                })
                .collect();
            check_associativity(&g, triples.into_iter());
        }
    }
}

/// `g` moved to an equivalent form whose first coefficient is coprime to `a`.
fn coprime_representative(g: &BinaryForm, a: i64) -> BinaryForm {
    for r in 1i64.. {
        for x in -r..=r {
            for y in [-r, r] {
                for (x, y) in [(x, y), (y, x)] {
                    if gcd(x, y) != 1 || gcd(g.eval(x, y), a) != 1 {
                        continue;
                    }
                    let (_, s, t) = ext_gcd(x, y);
                    let m = IntMap2::new(x, -t, y, s);
                    assert_eq!(m.det(), 1);
                    return apply_map(g, &m);
                }
            }
        }
    }
    unreachable!()
}

/// Composition by the classical system with coprime leading coefficients,
/// where every solution `B` gives the same class.
fn reference_compose(f: &BinaryForm, g: &BinaryForm) -> ProperClass {
    let d = f.discriminant();
    let g = coprime_representative(g, f.a());
    let a3 = f.a() * g.a();
    let sols: Vec<i64> = (0..2 * a3)
        .filter(|&b| {
            (b - f.b()).rem_euclid(2 * f.a()) == 0
                && (b - g.b()).rem_euclid(2 * g.a()) == 0
                && (b * b - d).rem_euclid(4 * a3) == 0
        })
        .collect();
    assert_eq!(sols.len(), 1, "{f} {g}");
    compose_with_b(d, a3, sols[0]).unwrap()
}

#[test]
fn composition_against_coprime_reference() {
    let mut with_common_factor = 0;
    for d in discriminants(400) {
        let g = enumerate_classes(d).unwrap();
        for x in g.classes() {
            for y in g.classes() {
                let (f1, f2) = (x.rep(), y.rep());
                let (e, a3, b3) = composition_b(f1, f2).unwrap();
                if e > 1 {
                    with_common_factor += 1;
                }
                assert!((b3 - f1.b()).rem_euclid(2 * f1.a() / e) == 0);
                assert!((b3 - f2.b()).rem_euclid(2 * f2.a() / e) == 0);
                assert!((b3 * b3 - d).rem_euclid(4 * a3) == 0);
                let got = g.compose(x, y).unwrap();
                assert_eq!(got, reference_compose(f1, f2), "D={d} {f1} * {f2}");
                assert_eq!(compose_with_b(d, a3, b3 + 4 * a3).unwrap(), got);
            }
        }
    }
    assert!(with_common_factor > 100);
}

/// The reduced-moduli congruences alone do not pin down the class when
/// `e > 1`; the closed formula picks the right solution among them.
#[test]
fn reduced_congruences_underdetermine_when_e_exceeds_one() {
    let f = BinaryForm::new(4, 2, 5).unwrap();
    let d = f.discriminant();
    let (e, a3, _) = composition_b(&f, &f).unwrap();
    assert!(e > 1);
    let classes: std::collections::BTreeSet<_> = (0..2 * a3)
        .filter(|&b| {
            (b - f.b()).rem_euclid(2 * f.a() / e) == 0 && (b * b - d).rem_euclid(4 * a3) == 0
        })
        .map(|b| compose_with_b(d, a3, b).unwrap())
        .collect();
    let x = ProperClass::of(&f);
    assert!(classes.len() > 1);
    assert!(classes.contains(&x.compose(&x).unwrap()));
}

#[test]
fn known_class_numbers() {
    for (d, h) in [
        (-3, 1),
        (-4, 1),
        (-23, 3),
        (-31, 3),
        (-47, 5),
        (-56, 4),
        (-71, 7),
        (-84, 4),
        (-163, 1),
        (-231, 12),
    ] {
        assert_eq!(enumerate_classes(d).unwrap().class_number(), h, "D={d}");
    }
}
