//! Multiplicative number theory and the Gross-Zagier arithmetic functions.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn ord(&self, p: u64) -> u32 {
        self.factors.iter().find(|f| f.0 == p).map_or(0, |f| f.1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|f| f.0)
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let r = (BigUint::from(a) * BigUint::from(b)) % BigUint::from(m);
    r.to_u128().unwrap()
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin. The first thirteen primes as witnesses are
/// sufficient below 3.3e24.
pub fn is_prime(n: u128) -> bool {
    const WITNESSES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    assert!(
        n < 3_317_044_064_679_887_385_961_981,
        "primality certificate range exceeded"
    );
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u128, 2u128, 1u128);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = (x.max(y) - x.min(y)).gcd(&n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u128, out: &mut BTreeMap<u128, u32>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let g = pollard_rho(n);
    factor_into(g, out);
    factor_into(n / g, out);
}

fn factor_u128(mut n: u128) -> BTreeMap<u128, u32> {
    let mut out = BTreeMap::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut p = 41u128;
    while p * p <= n && p < 10_000 {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 2;
    }
    factor_into(n, &mut out);
    out
}

/// Prime factorization of a positive 64-bit integer.
pub fn factor(n: u64) -> Factorization {
    assert!(n >= 1, "factor: n must be positive");
    let factors = factor_u128(n as u128)
        .into_iter()
        .map(|(p, e)| (p as u64, e))
        .collect();
    Factorization { value: n, factors }
}

/// Prime factorization of an arbitrary positive integer. Small primes are
/// removed by trial division; the cofactor must fit in 128 bits.
pub fn factor_big(n: &BigUint) -> Result<BTreeMap<u64, u32>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut n = n.clone();
    let mut out: BTreeMap<u64, u32> = BTreeMap::new();
    let mut p = 2u64;
    while n.bits() > 120 {
        if p > 2_000_000 {
            return Err(Error::InvalidInput(
                "integer too large to factor at desk scale".into(),
            ));
        }
        let bp = BigUint::from(p);
        loop {
            let (q, r) = n.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            n = q;
            *out.entry(p).or_insert(0) += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    for (q, e) in factor_u128(n.to_u128().unwrap()) {
        let q = u64::try_from(q)
            .map_err(|_| Error::InvalidInput("prime factor exceeds 64 bits".into()))?;
        *out.entry(q).or_insert(0) += e;
    }
    Ok(out)
}

pub fn moebius(n: u64) -> i32 {
    let f = factor(n);
    if f.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// The Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Kronecker symbol (d/n).
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut sign = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && d < 0 {
        sign = -1;
    }
    let v = m.trailing_zeros();
    m >>= v;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && v % 2 == 1 {
            sign = -sign;
        }
    }
    sign * jacobi(d, m)
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let e = d / 4;
        let e4 = e.rem_euclid(4);
        return (e4 == 2 || e4 == 3) && squarefree(e.unsigned_abs());
    }
    false
}

fn squarefree(n: u64) -> bool {
    factor(n).factors.iter().all(|&(_, e)| e == 1)
}

/// a_d(j) = mu(d/(d,j)) phi(d) / phi(d/(d,j)).
pub fn a_coeff(d: u64, j: i64) -> i64 {
    let g = (j.rem_euclid(d as i64) as u64).gcd(&d);
    let q = d / g;
    moebius(q) as i64 * (euler_phi(d) / euler_phi(q)) as i64
}

/// The Ramanujan sum sum_{s in (Z/d)^x} zeta_d^{sj}, evaluated exactly in the
/// cyclotomic field of 48th roots of unity.
pub fn ramanujan_sum(d: u64, j: i64) -> i64 {
    use crate::cyclo::CycNum;
    assert!(48 % d == 0, "ramanujan_sum: d must divide 48");
    let mut acc = CycNum::zero();
    for s in 1..=d {
        if s.gcd(&d) == 1 {
            acc = acc + CycNum::root_of_unity((s as i64 * j) * (48 / d as i64));
        }
    }
    acc.to_integer().expect("Ramanujan sum is rational")
}

pub fn divisors(n: u64) -> Vec<u64> {
    factor(n).divisors()
}

/// A pair of coprime negative fundamental discriminants and D = d1 d2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscriminantPair {
    pub d1: i64,
    pub d2: i64,
    pub big_d: i64,
}

/// Condition d = 1 mod 8 and 3 does not divide d.
pub fn is_admissible(d: i64) -> bool {
    d < 0 && d.rem_euclid(8) == 1 && d % 3 != 0 && is_fundamental_discriminant(d)
}

impl DiscriminantPair {
    pub fn new(d1: i64, d2: i64) -> Result<Self> {
        for d in [d1, d2] {
            if d >= 0 || !is_fundamental_discriminant(d) {
                return Err(Error::InvalidDiscriminant(d));
            }
        }
        if d1.unsigned_abs().gcd(&d2.unsigned_abs()) != 1 {
            return Err(Error::InvalidInput(format!(
                "discriminants {d1} and {d2} are not coprime"
            )));
        }
        Ok(DiscriminantPair { d1, d2, big_d: d1 * d2 })
    }

    pub fn admissible(&self) -> bool {
        is_admissible(self.d1) && is_admissible(self.d2)
    }

    pub fn require_admissible(&self) -> Result<()> {
        for d in [self.d1, self.d2] {
            if !is_admissible(d) {
                return Err(Error::Inadmissible(d));
            }
        }
        Ok(())
    }

    /// epsilon(p) for a prime p, or None when (D/p) = -1.
    pub fn epsilon_p(&self, p: u64) -> Option<i32> {
        let p = p as i64;
        if kronecker(self.big_d, p) == -1 {
            return None;
        }
        if self.d1 % p != 0 {
            Some(kronecker(self.d1, p))
        } else {
            Some(kronecker(self.d2, p))
        }
    }

    /// epsilon(n) = prod epsilon(p)^ord_p(n), None if any factor is undefined.
    pub fn epsilon(&self, n: &Factorization) -> Option<i32> {
        let mut e = 1;
        for &(p, k) in &n.factors {
            let ep = self.epsilon_p(p)?;
            if ep == -1 && k % 2 == 1 {
                e = -e;
            }
        }
        Some(e)
    }

    /// F(m) from the divisor-product definition, as (prime, exponent); None
    /// stands for the value 1.
    pub fn frak_f_parts(&self, m: u64) -> Option<(u64, u32)> {
        let fm = factor(m);
        if self.epsilon(&fm) != Some(-1) {
            return None;
        }
        let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
        for n in fm.divisors() {
            let nf = factor(n);
            let sign = self.epsilon(&factor(m / n)).expect("defined on divisors") as i64;
            for &(p, k) in &nf.factors {
                *exps.entry(p).or_insert(0) += sign * k as i64;
            }
        }
        let nonzero: Vec<(u64, i64)> = exps.into_iter().filter(|&(_, e)| e != 0).collect();
        assert!(
            nonzero.len() <= 1 && nonzero.iter().all(|&(_, e)| e > 0),
            "F({m}) is not a prime power: {nonzero:?}"
        );
        nonzero.first().map(|&(p, e)| (p, e as u32))
    }

    /// F(m) as an integer.
    pub fn frak_f(&self, m: u64) -> BigUint {
        match self.frak_f_parts(m) {
            None => BigUint::one(),
            Some((p, e)) => BigUint::from(p).pow(e),
        }
    }

    /// (l, gamma(m)) with F(m) = l^gamma(m), computed from the local
    /// exponents gamma_p(m). None unless epsilon(m) = -1 with exactly one
    /// prime l of odd order and epsilon(l) = -1; when there are three or
    /// more such primes the divisor product collapses to 1.
    pub fn gamma_exponent(&self, m: u64) -> Option<(u64, u32)> {
        let fm = factor(m);
        if self.epsilon(&fm) != Some(-1) {
            return None;
        }
        let mut ell = Vec::new();
        let mut gamma = 1u32;
        for &(p, k) in &fm.factors {
            gamma *= match self.epsilon_p(p).unwrap() {
                1 => k + 1,
                _ if k % 2 == 0 => 1,
                _ => {
                    ell.push(p);
                    (k + 1) / 2
                }
            };
        }
        match ell.as_slice() {
            [l] => Some((*l, gamma)),
            _ => None,
        }
    }

    /// gamma_p(m), the local factor of gamma(m) at p (1 if p does not divide m).
    pub fn gamma_p(&self, m: u64, p: u64) -> Option<u32> {
        let fm = factor(m);
        self.epsilon(&fm)?;
        let k = fm.ord(p);
        if k == 0 {
            return Some(1);
        }
        Some(match self.epsilon_p(p)? {
            1 => k + 1,
            _ if k % 2 == 0 => 1,
            _ => (k + 1) / 2,
        })
    }

    /// kappa_3(s): 1/2 if (d1/3) = (d2/3) = -1 and 3 | s, else 1.
    pub fn kappa3(&self, s: u64) -> Ratio<u32> {
        if kronecker(self.d1, 3) == -1 && kronecker(self.d2, 3) == -1 && s % 3 == 0 {
            Ratio::new(1, 2)
        } else {
            Ratio::one()
        }
    }
}

pub const DIVISORS_24: [u64; 8] = [1, 2, 3, 4, 6, 8, 12, 24];

/// p-part of n.
pub fn p_part(n: u64, p: u64) -> u64 {
    let mut r = 1;
    let mut n = n;
    while n % p == 0 {
        n /= p;
        r *= p;
    }
    r
}

/// p-adic valuation of a nonzero integer.
pub fn val(n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Modular inverse of a modulo m (m >= 1), if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

/// Integer square root for nonnegative 128-bit integers.
pub fn isqrt(n: u128) -> u128 {
    num_integer::Roots::sqrt(&n)
}
