use num_bigint::BigUint;
use num_rational::Ratio;
use proptest::prelude::*;
use weber_cm::arith::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn brute_phi(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

fn brute_moebius(n: u64) -> i32 {
    let mut m = n;
    let mut count = 0;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            count += 1;
        }
        p += 1;
    }
    if count % 2 == 0 { 1 } else { -1 }
}

/// Legendre symbol via Euler's criterion, for odd primes.
fn euler_legendre(a: i64, p: i64) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut b = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 { 1 } else { -1 }
}

fn pair() -> DiscriminantPair {
    DiscriminantPair::new(-31, -127).unwrap()
}

#[test]
fn moebius_examples() {
    assert_eq!(moebius(1), 1);
    assert_eq!(moebius(6), 1);
    assert_eq!(moebius(12), 0);
}

#[test]
fn phi_examples() {
    assert_eq!(euler_phi(1), 1);
    assert_eq!(euler_phi(24), 8);
    assert_eq!(euler_phi(8), 4);
}

#[test]
fn kronecker_examples() {
    assert_eq!(kronecker(-31, 2), 1);
    assert_eq!(kronecker(-31, 3), -1);
    assert_eq!(kronecker(-31, 1), 1);
    assert_eq!(kronecker(-7, -1), -1);
    assert_eq!(kronecker(5, 2), -1);
}

#[test]
fn a_coeff_examples() {
    for d in DIVISORS_24 {
        assert_eq!(a_coeff(d, 0), euler_phi(d) as i64);
    }
    assert_eq!(a_coeff(2, 1), -1);
    assert_eq!(a_coeff(24, 1), 0);
}

#[test]
fn a_coeff_matches_ramanujan_sum() {
    for d in DIVISORS_24 {
        for j in 0..d as i64 {
            assert_eq!(a_coeff(d, j), ramanujan_sum(d, j), "d={d} j={j}");
        }
    }
}

#[test]
fn a_coeff_divisor_sums() {
    for s in DIVISORS_24 {
        for k in 0..48i64 {
            let total: i64 = DIVISORS_24
                .iter()
                .filter(|&&d| s % d == 0)
                .map(|&d| a_coeff(d, k))
                .sum();
            let expect = if k % s as i64 == 0 { s as i64 } else { 0 };
            assert_eq!(total, expect, "s={s} k={k}");
        }
    }
}

#[test]
fn epsilon_examples() {
    let p = pair();
    assert_eq!(p.epsilon_p(3), Some(-1));
    assert_eq!(p.epsilon_p(2), Some(1));
    assert_eq!(p.epsilon_p(41), Some(1));
    // (D/5) = (3937/5) = (2/5) = -1
    assert_eq!(p.epsilon_p(5), None);
}

#[test]
fn frak_f_examples() {
    let p = pair();
    assert_eq!(p.frak_f(984), BigUint::from(6561u32));
    assert_eq!(p.frak_f(1), BigUint::from(1u32));
    assert_eq!(p.frak_f(982), BigUint::from(491u32 * 491));
}

#[test]
fn gamma_examples() {
    let p = pair();
    assert_eq!(p.gamma_exponent(984), Some((3, 8)));
    assert_eq!(p.gamma_exponent(964), Some((241, 3)));
    assert_eq!(p.gamma_exponent(1), None);
}

#[test]
fn kappa3_examples() {
    let p = pair();
    assert_eq!(p.kappa3(24), Ratio::new(1, 2));
    assert_eq!(p.kappa3(8), Ratio::from_integer(1));
    let q = DiscriminantPair::new(-23, -31).unwrap();
    // (-23/3) = (1/3) = 1
    assert_eq!(q.kappa3(24), Ratio::from_integer(1));
}

#[test]
fn admissibility() {
    for d in [-31, -55, -103, -127, -151, -199, -223, -271] {
        assert!(is_admissible(d), "{d}");
    }
    assert!(!is_admissible(-7 * 3));
    assert!(!is_admissible(-10));
    assert!(is_admissible(-23));
    assert!(!is_admissible(-19));
    assert!(DiscriminantPair::new(-31, -31).is_err());
}

#[test]
fn factor_big_reassembles() {
    let n = BigUint::from(3u32).pow(40) * BigUint::from(491u32).pow(7) * BigUint::from(1_000_003u64);
    let f = factor_big(&n).unwrap();
    let back = f
        .iter()
        .fold(BigUint::from(1u32), |acc, (&p, &e)| acc * BigUint::from(p).pow(e));
    assert_eq!(back, n);
    assert_eq!(f[&3], 40);
}

#[test]
fn frak_f_two_definitions_agree() {
    for (d1, d2) in [(-31, -127), (-55, -103), (-151, -223)] {
        let p = DiscriminantPair::new(d1, d2).unwrap();
        for m in 1..=10_000u64 {
            let direct = p.frak_f_parts(m);
            let via_gamma = p.gamma_exponent(m);
            assert_eq!(direct, via_gamma, "pair ({d1},{d2}) m={m}");
        }
    }
}

#[test]
fn frak_f_divisibility_under_squares() {
    // Restricted to m on which epsilon is defined: the convention F(m) = 1
    // for undefined epsilon breaks divisibility (m = 75 = 3 * 5^2 here).
    let p = pair();
    for m in 1..=10_000u64 {
        if p.epsilon(&factor(m)).is_none() {
            continue;
        }
        let fm = p.frak_f(m);
        let mut r = 2u64;
        while r * r <= m {
            if m % (r * r) == 0 {
                let sub = p.frak_f(m / (r * r));
                assert!((&fm % &sub) == BigUint::from(0u32), "m={m} r={r}");
            }
            r += 1;
        }
    }
}

proptest! {
    #[test]
    fn phi_and_moebius_match_brute_force(n in 1u64..2000) {
        prop_assert_eq!(euler_phi(n), brute_phi(n));
        prop_assert_eq!(moebius(n), brute_moebius(n));
    }

    #[test]
    fn kronecker_matches_euler_criterion(d in -5000i64..5000, pi in 0usize..20) {
        let primes = [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73];
        let p = primes[pi];
        prop_assert_eq!(kronecker(d, p), euler_legendre(d, p));
    }

    #[test]
    fn kronecker_is_multiplicative_in_n(d in -3000i64..3000, a in 1i64..200, b in 1i64..200) {
        prop_assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
    }

    #[test]
    fn factor_reassembles(n in 1u64..u64::MAX / 2) {
        let f = factor(n);
        let back: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(back, n);
        for w in f.factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for &(p, _) in &f.factors {
            prop_assert!(is_prime(p as u128));
        }
    }
}
