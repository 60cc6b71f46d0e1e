use proptest::prelude::*;
use weber_cm::arith::kronecker;
use weber_cm::quadratic::*;

/// h(d) = -(1/|d|) sum_{n<|d|} (d/n) n for fundamental d < -4.
fn dirichlet_class_number(d: i64) -> i64 {
    let s: i64 = (1..-d).map(|n| kronecker(d, n) as i64 * n).sum();
    assert_eq!(s % d, 0);
    s / d
}

#[test]
fn class_numbers_from_the_worked_example() {
    assert_eq!(reduced_forms(-31).unwrap().len(), 3);
    assert_eq!(reduced_forms(-127).unwrap().len(), 5);
    assert_eq!(reduced_forms(-55).unwrap().len(), 4);
}

#[test]
fn enumeration_matches_dirichlet_formula() {
    for d in (-2000i64..-4).filter(|&d| weber_cm::arith::is_fundamental_discriminant(d)) {
        assert_eq!(reduced_forms(d).unwrap().len() as i64, dirichlet_class_number(d), "d={d}");
    }
}

#[test]
fn enumeration_is_sorted_and_reduced() {
    let forms = reduced_forms(-271).unwrap();
    assert_eq!(forms.len(), 11);
    for w in forms.windows(2) {
        assert!((w[0].a, w[0].b) < (w[1].a, w[1].b));
    }
    for f in &forms {
        assert!(f.is_reduced());
        assert_eq!(f.disc(), -271);
    }
}

#[test]
fn invalid_discriminants_rejected() {
    assert!(reduced_forms(-6).is_err());
    assert!(reduced_forms(5).is_err());
}

#[test]
fn epsilon_d_examples() {
    assert_eq!(epsilon_d(-31).unwrap(), 1);
    assert_eq!(epsilon_d(-127).unwrap(), 1);
    assert_eq!(epsilon_d(-7).unwrap(), -1);
    assert!(epsilon_d(-11).is_err());
}

#[test]
fn cm_points() {
    let p = cm_point(&FormClass::from_ab(1, 1, -55).unwrap(), 128);
    assert!((p.tau.re_f64() + 0.5).abs() < 1e-15);
    assert!((p.tau.im_f64() - 55f64.sqrt() / 2.0).abs() < 1e-14);
    let p = cm_point(&FormClass::new(2, 1, 7).unwrap(), 128);
    assert!((p.tau.re_f64() + 0.25).abs() < 1e-15);
    assert!((p.tau.im_f64() - 55f64.sqrt() / 4.0).abs() < 1e-14);
    for f in reduced_forms(-127).unwrap() {
        assert!(cm_point(&f, 128).tau.im_f64() > 0.0);
    }
}

proptest! {
    #[test]
    fn reduction_lands_in_enumeration(idx in 0usize..5, n in -20i64..20, flips in 0usize..3) {
        let forms = reduced_forms(-127).unwrap();
        let mut f = forms[idx].translate(n);
        for _ in 0..flips {
            f = f.flip().translate(n / 3 + 1);
        }
        let r = f.reduce();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r, forms[idx]);
    }
}
