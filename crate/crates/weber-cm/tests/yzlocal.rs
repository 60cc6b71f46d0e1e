use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use weber_cm::arith::{divisors, factor, kronecker, DiscriminantPair};
use weber_cm::classpoly::{gz_lhs, yz_lhs, PolyCache};
use weber_cm::yzlocal::*;

const BATTERY: [i64; 8] = [-31, -55, -103, -127, -151, -199, -223, -271];
const ALL_S: [u64; 8] = [1, 2, 3, 4, 6, 8, 12, 24];

fn pair() -> DiscriminantPair {
    DiscriminantPair::new(-31, -127).unwrap()
}

fn battery() -> Vec<DiscriminantPair> {
    let mut out = Vec::new();
    for (i, &d1) in BATTERY.iter().enumerate() {
        for &d2 in &BATTERY[i + 1..] {
            if let Ok(p) = DiscriminantPair::new(d1, d2) {
                if p.admissible() {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// p-adic valuation of (D - a^2)/(4 d^2 D), computed from scratch.
fn norm_val(t: &TraceElement, p: i64) -> i64 {
    let v = |mut n: i64| {
        let mut k = 0;
        n = n.abs();
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        k
    };
    let d = t.d as i64;
    v(t.pair.big_d - t.a * t.a) - v(4 * d * d * t.pair.big_d)
}

fn find(pred: impl Fn(&TraceElement) -> bool) -> TraceElement {
    for p in battery() {
        for d in [1u64, 2, 3, 4, 6, 8, 12, 24] {
            for a in -300i64..=300 {
                let t = TraceElement::new(p, d, a).unwrap();
                if t.is_totally_positive() && pred(&t) {
                    return t;
                }
            }
        }
    }
    panic!("no element with the requested property");
}

/// Rows of the golden table as (a, [F columns as integers]).
fn fixture_rows() -> Vec<(u64, Vec<BigUint>)> {
    let text = include_str!("data/yz_table_31_127.tex");
    text.lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .map(|l| {
            let cells: Vec<&str> = l.trim_end_matches("\\\\ \\hline").split('&').collect();
            let a = cells[0].trim().parse().unwrap();
            let values = cells[3..]
                .iter()
                .map(|c| {
                    let c = c.trim().trim_matches('$').trim().replace(['{', '}'], "");
                    match c.split_once('^') {
                        None => c.parse::<BigUint>().unwrap(),
                        Some((b, e)) => b.parse::<BigUint>().unwrap().pow(e.parse().unwrap()),
                    }
                })
                .collect();
            (a, values)
        })
        .collect()
}

#[test]
fn trace_element_basics() {
    let t = TraceElement::new(pair(), 3, 5).unwrap();
    assert_eq!(t.trace(), num_rational::Ratio::new(1, 3));
    assert_eq!(t.norm(), num_rational::Ratio::new(3937 - 25, 4 * 9 * 3937));
    assert!(t.is_totally_positive());
    assert!(!TraceElement::new(pair(), 1, 63).unwrap().is_totally_positive());
    assert!(TraceElement::new(pair(), 5, 1).is_err());
}

#[test]
fn loglinear_arithmetic_and_display() {
    let x = LogLinear::log_of(&BigUint::from(81u32)).unwrap().scale_int(192);
    assert_eq!(x.to_string(), "768 * log(3)");
    let y = LogLinear::term(5, BigRational::new(BigInt::from(-1), BigInt::from(2)));
    assert_eq!(x.add(&y).to_string(), "768 * log(3) - 1/2 * log(5)");
    assert_eq!(y.to_string(), "-1/2 * log(5)");
    assert!(x.add(&x.scale_int(-1)).is_zero());
    assert_eq!(LogLinear::zero().to_string(), "0");
    assert_eq!(x.coeff(3), rat(768));
}

#[test]
fn valuations_of_first_row() {
    // (1 + sqrt D)/2 has norm -984 = -2^3 3 41.
    let t = TraceElement::new(pair(), 1, 1).unwrap();
    let vals = ideal_valuations(&t);
    let primes: Vec<u64> = vals.iter().filter(|(_, &k)| k != 0).map(|(q, _)| q.p).collect();
    assert_eq!(primes, vec![2, 3, 41]);
    let mut two: Vec<i64> = vals.iter().filter(|(q, _)| q.p == 2).map(|(_, &k)| k).collect();
    two.sort_unstable();
    assert_eq!(two, vec![0, 3]);
    assert_eq!(kronecker(pair().big_d, 41), 1);
    assert_eq!(vals.iter().filter(|(q, &k)| q.p == 41 && k == 1).count(), 1);
}

#[test]
fn valuation_bookkeeping_matches_norm() {
    for p in battery() {
        for d in [1u64, 2, 3, 4, 6, 8, 12, 24] {
            for a in trace_range(&p) {
                let t = TraceElement::new(p, d, a).unwrap();
                let vals = ideal_valuations(&t);
                let n = p.big_d - a * a;
                let mut qs: Vec<u64> = factor(n as u64).primes().collect();
                qs.extend([2, 3]);
                qs.sort_unstable();
                qs.dedup();
                for q in qs {
                    let total: i64 = vals
                        .iter()
                        .filter(|(f, _)| f.p == q)
                        .map(|(f, k)| k * f.residue_degree() as i64)
                        .sum();
                    // Nm(t sqrt D) = -D Nm(t).
                    let want = norm_val(&t, q as i64) + factor(p.big_d as u64).ord(q) as i64;
                    assert_eq!(total, want, "{p:?} d={d} a={a} q={q}");
                }
            }
        }
    }
}

#[test]
fn rho_examples() {
    let p = pair();
    assert_eq!(rho(&p, &Valuations::new(), RhoPart::All), 1);
    // 41 splits in F and (-31/41) = 1, so both primes above 41 split in E.
    assert_eq!(kronecker(-31, 41), 1);
    let q = FPrime { p: 41, kind: PrimeKind::Split(false) };
    let vals: Valuations = [(q, 2)].into_iter().collect();
    assert_eq!(rho(&p, &vals, RhoPart::All), 3);
    assert_eq!(rho(&p, &vals, RhoPart::PrimeTo(6)), 3);
    assert_eq!(rho(&p, &vals, RhoPart::At(3)), 1);
    // Above 3 both primes are inert in E: odd order kills rho.
    let three = FPrime { p: 3, kind: PrimeKind::Split(true) };
    assert!(!three.splits_in_e(&p));
    let vals: Valuations = [(three, 1)].into_iter().collect();
    assert_eq!(rho(&p, &vals, RhoPart::All), 0);
    assert_eq!(rho(&p, &vals, RhoPart::PrimeTo(6)), 1);
    let neg: Valuations = [(q, -1)].into_iter().collect();
    assert_eq!(rho(&p, &neg, RhoPart::All), 0);
}

#[test]
fn splitting_in_e_follows_genus_characters() {
    let p = pair();
    // An inert prime of F always splits in E.
    assert!(FPrime { p: 5, kind: PrimeKind::Inert }.splits_in_e(&p));
    // 31 | d1: split iff (d2/31) = 1.
    let r = FPrime { p: 31, kind: PrimeKind::Ramified };
    assert_eq!(r.splits_in_e(&p), kronecker(-127, 31) == 1);
    let r = FPrime { p: 127, kind: PrimeKind::Ramified };
    assert_eq!(r.splits_in_e(&p), kronecker(-31, 127) == 1);
}

#[test]
fn delta2_examples() {
    let t = find(|t| t.d == 1 && norm_val(t, 2) == 2);
    assert_eq!(delta2(1, &t), 2);
    let t = find(|t| t.d == 2 && norm_val(t, 2) == 0);
    assert_eq!(delta2(2, &t), 1);
    let t = find(|t| t.d == 2 && norm_val(t, 2) == 4);
    assert_eq!(delta2(2, &t), 1);
    // Nm(2t) = 1 mod 4.
    let t = find(|t| {
        t.d == 4 && norm_val(t, 2) == -2 && {
            let n = t.norm() * num_rational::Ratio::from_integer(4);
            (n.numer() * n.denom()).rem_euclid(4) == 1
        }
    });
    assert_eq!(delta2(4, &t), -1);
    let t = find(|t| {
        t.d == 4 && norm_val(t, 2) == -2 && {
            let n = t.norm() * num_rational::Ratio::from_integer(4);
            (n.numer() * n.denom()).rem_euclid(4) == 3
        }
    });
    assert_eq!(delta2(4, &t), 1);
    let t = find(|t| t.d == 1 && norm_val(t, 2) < 2);
    assert_eq!(delta2(1, &t), 0);
}

#[test]
fn delta3_examples() {
    // Nm(3t) = 2 mod 3 needs (D/3) = -1; the battery has D = 1 mod 3.
    let mixed = DiscriminantPair::new(-23, -31).unwrap();
    assert!(mixed.admissible());
    let t = (1..27)
        .map(|a| TraceElement::new(mixed, 3, a).unwrap())
        .find(|t| {
            norm_val(t, 3) == -2 && {
                let n = t.norm() * num_rational::Ratio::from_integer(9);
                (n.numer() * n.denom()).rem_euclid(3) == 2
            }
        })
        .unwrap();
    assert_eq!(delta3(3, &t), -1);
    // Both (dj/3) = -1 for (-31, -127).
    assert_eq!((kronecker(-31, 3), kronecker(-127, 3)), (-1, -1));
    let p = pair();
    let t = (1..62)
        .map(|a| TraceElement::new(p, 3, a).unwrap())
        .find(|t| {
            norm_val(t, 3) == -2 && {
                let n = t.norm() * num_rational::Ratio::from_integer(9);
                (n.numer() * n.denom()).rem_euclid(3) == 1
            }
        })
        .unwrap();
    assert_eq!(delta3(3, &t), -1);
    let t = find(|t| t.d == 3 && norm_val(t, 3) == 1);
    assert_eq!(delta3prime(3, &t), 5);
    assert_eq!(delta3prime(1, &t.with_d(1)), norm_val(&t.with_d(1), 3) + 1);
    assert_eq!(delta3prime(2, &t), 0);
}

#[test]
fn sign_exponent_only_matters_at_8_and_24() {
    let p = DiscriminantPair::new(-31, -55).unwrap();
    assert_eq!(pair_sign(&p), -1);
    assert_eq!(pair_sign(&pair()), 1);
    let odd: Vec<u64> = divisors(24).into_iter().filter(|d| (24 / d) % 2 == 1).collect();
    assert_eq!(odd, vec![8, 24]);
}

#[test]
fn coefficient_requires_total_positivity() {
    assert!(a_coefficient(&TraceElement::new(pair(), 1, 63).unwrap()).is_err());
}

#[test]
fn coefficient_support_is_a_single_place() {
    let mut two_inert = false;
    for p in battery() {
        for d in [1u64, 2, 3, 4, 6, 8, 12, 24] {
            for a in trace_range(&p) {
                let t = TraceElement::new(p, d, a).unwrap();
                let c = a_coefficient(&t).unwrap();
                let odd = odd_inert_primes(&t);
                if odd.len() >= 2 {
                    two_inert = true;
                    assert!(c.is_zero(), "{p:?} d={d} a={a}");
                }
                if let [q] = odd.as_slice() {
                    assert!(c.terms().all(|(l, _)| l == q.p), "{p:?} d={d} a={a}: {c}");
                }
                if odd.is_empty() {
                    assert!(c.terms().all(|(l, _)| l == 3), "{p:?} d={d} a={a}: {c}");
                }
            }
        }
    }
    assert!(two_inert);
}

#[test]
fn coefficients_per_trace_match_prime_powers() {
    // For fixed a the d-sum is 4 s kappa_3(s) sum_r log F(m).
    for p in [pair(), DiscriminantPair::new(-31, -55).unwrap()] {
        let eps = pair_sign(&p);
        for s in ALL_S {
            let k = p.kappa3(s);
            let kappa = BigRational::new(BigInt::from(*k.numer()), BigInt::from(*k.denom()));
            for a in trace_range(&p) {
                let mut lhs = LogLinear::zero();
                for d in divisors(s) {
                    let sign = if (24 / d) % 2 == 1 { eps } else { 1 };
                    let c = a_coefficient(&TraceElement::new(p, d, a).unwrap()).unwrap();
                    lhs = lhs.add(&c.scale_int(-sign));
                }
                let mut rhs = LogLinear::zero();
                let rest = p.big_d - a * a;
                for r in divisors(s) {
                    let r2 = (16 * r * r) as i64;
                    if rest % r2 != 0 {
                        continue;
                    }
                    let m = rest / r2;
                    if (m - 19 * (p.d1 + p.d2 - 1)).rem_euclid((s / r) as i64) == 0 {
                        rhs = rhs.add(&LogLinear::log_of(&p.frak_f(m as u64)).unwrap());
                    }
                }
                let rhs = rhs.scale(&(kappa.clone() * rat(4 * s as i64)));
                assert_eq!(lhs, rhs, "{p:?} s={s} a={a}");
            }
        }
    }
}

#[test]
fn yz_rhs_examples() {
    let p = pair();
    assert_eq!(yz_rhs(&p, 24).unwrap(), BigUint::from(81u32));
    // F(243) F(27) F(27) F(3) = 3^8 before the square root.
    assert_eq!(yz_product(&p, 24).unwrap(), BigUint::from(3u32).pow(8));
    let terms = yz_terms(&p, 24).unwrap();
    let ms: Vec<(u64, u64, u64)> = terms.iter().map(|t| (t.a, t.r, t.m)).collect();
    assert_eq!(ms, vec![(7, 1, 243), (7, 3, 27), (47, 2, 27), (47, 6, 3)]);
    // For s = 1 every a with 16 | D - a^2 contributes F((D - a^2)/16): the
    // F(m/2^2) column of the table.
    let col: BigUint = fixture_rows().iter().map(|(_, v)| v[1].clone()).product();
    assert_eq!(yz_rhs(&p, 1).unwrap(), col);
}

#[test]
fn gz_rhs_is_the_first_table_column() {
    let p = pair();
    let rows = fixture_rows();
    assert_eq!(rows.len(), 31);
    let col: BigUint = rows.iter().map(|(_, v)| v[0].clone()).product();
    assert_eq!(gz_rhs(&p).unwrap(), col);
    assert_eq!(gz_rhs_squared(&p), &col * &col);
    assert_eq!(gz_lhs(&p).unwrap().magnitude(), &col);
}

#[test]
fn main_theorem_for_the_worked_example() {
    let p = pair();
    for s in ALL_S {
        let lhs = yz_lhs(&p, s as u32).unwrap();
        assert_eq!(lhs.magnitude(), &yz_rhs(&p, s).unwrap(), "s={s}");
    }
    assert_eq!(yz_lhs(&p, 24).unwrap().magnitude(), &BigUint::from(81u32));
}

#[test]
fn main_theorem_on_battery() {
    let pairs = battery();
    assert!(pairs.len() >= 9);
    let cache = PolyCache::disabled();
    for p in &pairs {
        for c in yz_checks(p, &ALL_S, &cache).unwrap() {
            assert!(c.passed(), "{}: {:?}", c.name, c.witness);
        }
        let c = gz_check(p, &cache).unwrap();
        assert!(c.passed(), "{}: {:?}", c.name, c.witness);
    }
}

#[test]
fn bigcm_identity_for_worked_example() {
    let p = pair();
    let cache = PolyCache::disabled();
    for s in [1u64, 2, 8, 24] {
        let c = bigcm_check(&p, s, &cache).unwrap();
        assert!(c.passed(), "{}: {:?}", c.name, c.witness);
    }
    let c = bigcm_check(&p, 24, &cache).unwrap();
    assert_eq!(c.lhs.as_deref(), Some("768 * log(3)"));
    assert_eq!(c.rhs.as_deref(), Some("768 * log(3)"));
}

#[test]
fn bigcm_identity_on_battery() {
    let cache = PolyCache::disabled();
    for p in battery() {
        for s in ALL_S {
            let c = bigcm_check(&p, s, &cache).unwrap();
            assert!(c.passed(), "{}: {:?}", c.name, c.witness);
        }
    }
}

#[test]
fn count_identities_on_battery() {
    for p in battery() {
        for c in count_identities(&p).unwrap() {
            assert!(c.passed(), "{}: {:?}", c.name, c.witness);
        }
    }
}

#[test]
fn count2_trivial_case() {
    // s2 = 1: both sides are 2 (v2(Nm t~) + 1) whenever v2 >= 0.
    let p = pair();
    for a in trace_range(&p) {
        let t = TraceElement::new(p, 2, a).unwrap();
        let v = norm_val(&t, 2);
        let (l, r) = count2_sides(&p, 1, a);
        assert_eq!(l, r);
        if v >= 0 {
            assert_eq!(l, 2 * (v + 1), "a={a}");
        }
    }
}

#[test]
fn table_matches_golden_file() {
    let rows = yz_table(&pair());
    assert_eq!(rows.len(), 31);
    assert_eq!(table_latex(&rows), include_str!("data/yz_table_31_127.tex"));
}

#[test]
fn table_other_formats() {
    let rows = yz_table(&pair());
    let md = table_markdown(&rows);
    assert_eq!(md.lines().count(), 33);
    assert!(md.lines().nth(2).unwrap().starts_with("| 1 | 2^3 * 3 * 41 | 24 | 3^8 | 3^4 |"));
    let csv = table_csv(&rows);
    assert_eq!(csv.lines().nth(4).unwrap(), "7,2^2 * 3^5,12,3^9,3^3,1,1,1,3^2,1,1,1");
    let json: serde_json::Value = serde_json::from_str(&table_json(&rows)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 31);
    assert_eq!(json[8]["values"][0]["value"], "3^10");
}

proptest! {
    #[test]
    fn log_of_is_additive(a in 1u64..100_000, b in 1u64..100_000) {
        let la = LogLinear::log_of(&BigUint::from(a)).unwrap();
        let lb = LogLinear::log_of(&BigUint::from(b)).unwrap();
        let lab = LogLinear::log_of(&(BigUint::from(a) * BigUint::from(b))).unwrap();
        prop_assert_eq!(la.add(&lb), lab);
    }

    #[test]
    fn scaling_distributes(a in 1u64..10_000, n in -50i64..50, k in 1i64..20) {
        let x = LogLinear::log_of(&BigUint::from(a)).unwrap();
        let c = BigRational::new(BigInt::from(n), BigInt::from(k));
        prop_assert_eq!(x.scale(&c).add(&x.scale(&c)), x.scale(&(c * rat(2))));
        prop_assert_eq!(x.scale(&BigRational::one()), x);
    }
}

#[test]
fn identities_for_other_residues_mod_3() {
    // The battery has every dj = 2 mod 3; these pairs cover (dj/3) = 1.
    let cache = PolyCache::disabled();
    for (d1, d2) in [(-23, -31), (-23, -47), (-47, -71), (-23, -71), (-71, -127)] {
        let p = DiscriminantPair::new(d1, d2).unwrap();
        let mut checks = count_identities(&p).unwrap();
        for s in ALL_S {
            checks.push(bigcm_check(&p, s, &cache).unwrap());
        }
        checks.extend(yz_checks(&p, &ALL_S, &cache).unwrap());
        for c in checks {
            assert!(c.passed(), "{}: {:?}", c.name, c.witness);
        }
    }
}
