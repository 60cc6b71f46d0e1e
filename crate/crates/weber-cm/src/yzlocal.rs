//! Right-hand sides of the Yui-Zagier and Gross-Zagier factorizations, and
//! the local coefficients a(t, phi_d) of the big CM value formula.
//!
//! Throughout, F = Q(sqrt D) with D = d1 d2 and E = Q(sqrt d1, sqrt d2). An
//! element t = (a + sqrt D)/(2 d sqrt D) of F has trace 1/d, and the ideal
//! t sqrt D is ((a + sqrt D)/2)/d. Prime ideals of F are named by the
//! rational prime below them and a [`PrimeKind`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{divisors, factor, factor_big, kronecker, p_part, val, DiscriminantPair};
use crate::classpoly::{gz_lhs_with, yz_lhs_with, PolyCache};
use crate::error::{Error, Result};
use crate::report::Check;

/// t = (a + sqrt D)/(2 d sqrt D) in F.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceElement {
    pub pair: DiscriminantPair,
    pub d: u64,
    pub a: i64,
}

impl TraceElement {
    pub fn new(pair: DiscriminantPair, d: u64, a: i64) -> Result<Self> {
        if d == 0 || 24 % d != 0 {
            return Err(Error::InvalidInput(format!("d = {d} does not divide 24")));
        }
        Ok(TraceElement { pair, d, a })
    }

    pub fn trace(&self) -> Ratio<i128> {
        Ratio::new(1, self.d as i128)
    }

    /// Nm(t) = (D - a^2)/(4 d^2 D).
    pub fn norm(&self) -> Ratio<i128> {
        let big_d = self.pair.big_d as i128;
        let a = self.a as i128;
        let d = self.d as i128;
        Ratio::new(big_d - a * a, 4 * d * d * big_d)
    }

    pub fn is_totally_positive(&self) -> bool {
        (self.a as i128).pow(2) < self.pair.big_d as i128
    }

    /// The same a with trace 1/d' instead.
    pub fn with_d(&self, d: u64) -> Self {
        TraceElement { d, ..*self }
    }
}

/// Valuation of a nonzero rational at p.
fn rat_val(r: &Ratio<i128>, p: u64) -> i64 {
    val(*r.numer(), p) as i64 - val(*r.denom(), p) as i64
}

/// Residue of a p-adic unit rational modulo n (n a power of p).
fn unit_residue(r: &Ratio<i128>, n: i128) -> i128 {
    let inv = crate::arith::inv_mod((*r.denom() % n) as i64, n as i64).expect("unit denominator");
    (r.numer().rem_euclid(n) * inv as i128).rem_euclid(n)
}

/// Formal sum of c_p log p with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogLinear {
    coeffs: BTreeMap<u64, BigRational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        Self::default()
    }

    /// c log p.
    pub fn term(p: u64, c: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(p, c);
        out
    }

    /// log n for a positive integer n, via its factorization.
    pub fn log_of(n: &BigUint) -> Result<Self> {
        let mut out = Self::zero();
        for (p, e) in factor_big(n)? {
            out.add_term(p, BigRational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    pub fn add_term(&mut self, p: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(p).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&p);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, c) in &other.coeffs {
            out.add_term(p, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&p, x) in &self.coeffs {
            out.add_term(p, x * c);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn coeff(&self, p: u64) -> BigRational {
        self.coeffs.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.coeffs.iter().map(|(&p, c)| (p, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.coeffs.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            write!(f, "{} * log({p})", c.abs())?;
        }
        Ok(())
    }
}

/// How a rational prime decomposes in F. `Split(false)` is the prime on
/// which sqrt D is congruent to the reference root of D (the least root
/// mod p for odd p, the 2-adic root that is 1 mod 4 for p = 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PrimeKind {
    Split(bool),
    Inert,
    Ramified,
}

/// A prime ideal of F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FPrime {
    pub p: u64,
    pub kind: PrimeKind,
}

impl FPrime {
    pub fn residue_degree(&self) -> u32 {
        if self.kind == PrimeKind::Inert {
            2
        } else {
            1
        }
    }

    /// Whether this prime splits in E/F, from the genus characters. E/F is
    /// unramified at finite primes, so the alternative is inert.
    pub fn splits_in_e(&self, pair: &DiscriminantPair) -> bool {
        let p = self.p as i64;
        match self.kind {
            PrimeKind::Split(_) => kronecker(pair.d1, p) == 1,
            PrimeKind::Inert => true,
            PrimeKind::Ramified if pair.d1 % p == 0 => kronecker(pair.d2, p) == 1,
            PrimeKind::Ramified => kronecker(pair.d1, p) == 1,
        }
    }
}

impl fmt::Display for FPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PrimeKind::Split(false) => write!(f, "{}+", self.p),
            PrimeKind::Split(true) => write!(f, "{}-", self.p),
            PrimeKind::Inert => write!(f, "({})", self.p),
            PrimeKind::Ramified => write!(f, "r{}", self.p),
        }
    }
}

/// Valuations of a fractional ideal of F; absent primes have valuation 0.
pub type Valuations = BTreeMap<FPrime, i64>;

/// Least square root of n modulo an odd prime p, if n is a nonzero square.
fn sqrt_mod(n: i64, p: u64) -> Option<u64> {
    let r = n.rem_euclid(p as i64) as u64;
    (1..p).find(|&x| (x as u128 * x as u128 % p as u128) as u64 == r)
}

/// Valuations of the ideal t sqrt D = ((a + sqrt D)/2)/d. Primes above 2
/// and 3 are always listed, the others only where the valuation is nonzero.
pub fn ideal_valuations(t: &TraceElement) -> Valuations {
    let big_d = t.pair.big_d;
    let a = t.a;
    let n = big_d as i128 - (a as i128).pow(2);
    assert!(n != 0, "D is not a square");
    let mut primes: Vec<u64> = factor(n.unsigned_abs() as u64).primes().collect();
    primes.extend([2, 3]);
    primes.sort_unstable();
    primes.dedup();
    let mut out = Valuations::new();
    let mut put = |p: u64, kind: PrimeKind, v: i64| {
        if v != 0 || p <= 3 {
            out.insert(FPrime { p, kind }, v);
        }
    };
    for p in primes {
        let vn = val(n, p) as i64;
        let vd = val(t.d as i128, p) as i64;
        if p == 2 {
            // D = 1 mod 8, so 2 splits. For odd a one of a +- x has
            // valuation exactly 1; for even a both are units.
            let (v0, v1) = if a % 2 == 0 {
                (0, 0)
            } else if a.rem_euclid(4) == 3 {
                (vn - 1, 1)
            } else {
                (1, vn - 1)
            };
            put(2, PrimeKind::Split(false), v0 - 1 - vd);
            put(2, PrimeKind::Split(true), v1 - 1 - vd);
            continue;
        }
        match kronecker(big_d, p as i64) {
            0 => put(p, PrimeKind::Ramified, vn - 2 * vd),
            -1 => {
                assert!(vn % 2 == 0, "odd norm valuation at the inert prime {p}");
                put(p, PrimeKind::Inert, vn / 2 - vd);
            }
            _ => {
                // At most one of the two primes divides a + sqrt D.
                let x = sqrt_mod(big_d, p).expect("D is a square mod a split prime") as i64;
                let on0 = vn > 0 && (a + x).rem_euclid(p as i64) == 0;
                let on1 = vn > 0 && (a - x).rem_euclid(p as i64) == 0;
                put(p, PrimeKind::Split(false), if on0 { vn } else { 0 } - vd);
                put(p, PrimeKind::Split(true), if on1 { vn } else { 0 } - vd);
            }
        }
    }
    out
}

/// Which primes rho looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoPart {
    /// Every prime.
    All,
    /// Primes not dividing M (the prime-to-M part).
    PrimeTo(u64),
    /// Primes dividing M only.
    At(u64),
}

impl RhoPart {
    fn includes(self, p: u64) -> bool {
        match self {
            RhoPart::All => true,
            RhoPart::PrimeTo(m) => m % p != 0,
            RhoPart::At(m) => m % p == 0,
        }
    }
}

/// Number of integral ideals of E with relative norm the given part of the
/// ideal: 0 if some valuation is negative or an inert prime occurs to odd
/// order, else the product of (k + 1) over split primes.
pub fn rho(pair: &DiscriminantPair, vals: &Valuations, part: RhoPart) -> u64 {
    let mut out = 1u64;
    for (prime, &k) in vals {
        if !part.includes(prime.p) {
            continue;
        }
        if k < 0 {
            return 0;
        }
        if prime.splits_in_e(pair) {
            out *= k as u64 + 1;
        } else if k % 2 == 1 {
            return 0;
        }
    }
    out
}

/// Inert primes of E/F with odd valuation, excluding the primes above 2
/// and 3. The coefficient a(t, phi_d) vanishes unless this set, together
/// with the local conditions at 2 and 3, singles out one place.
pub fn odd_inert_primes(t: &TraceElement) -> Vec<FPrime> {
    ideal_valuations(t)
        .into_iter()
        .filter(|(q, k)| q.p > 3 && k % 2 != 0 && !q.splits_in_e(&t.pair))
        .map(|(q, _)| q)
        .collect()
}

/// delta_2(d2, t).
pub fn delta2(d2: u64, t: &TraceElement) -> i64 {
    let nm = t.norm();
    let v = rat_val(&nm, 2);
    let generic = |v: i64| match v {
        0 => 1,
        v if v >= 1 => v - 3,
        _ => 0,
    };
    match d2 {
        1 if v >= 2 => 2 * (v - 1),
        1 => 0,
        2 => generic(v),
        4 | 8 => {
            if d2 == 8 && v == -4 {
                return match unit_residue(&(nm * Ratio::from_integer(16)), 8) {
                    3 => 1,
                    7 => -1,
                    _ => 0,
                };
            }
            if v == -2 {
                return match unit_residue(&(nm * Ratio::from_integer(4)), 4) {
                    1 => -1,
                    _ => 1,
                };
            }
            generic(v)
        }
        _ => 0,
    }
}

/// delta_3(d3, t); the case d3 = 1 is rho of the 3-part of t sqrt D.
pub fn delta3(d3: u64, t: &TraceElement) -> i64 {
    let pair = &t.pair;
    let nm = t.norm();
    let v = rat_val(&nm, 3);
    match d3 {
        1 if v >= 0 => rho(pair, &ideal_valuations(t), RhoPart::At(3)) as i64,
        3 => {
            let chi1 = kronecker(pair.d1, 3) as i64;
            let chi2 = kronecker(pair.d2, 3) as i64;
            let v3t = v + 2;
            if v3t == 0 {
                match unit_residue(&(nm * Ratio::from_integer(9)), 3) {
                    1 => 2 - 3 * (1 - chi1) * (1 - chi2) / 4,
                    _ => -1,
                }
            } else if v3t >= 1 {
                let pow = if (v - 1).rem_euclid(2) == 0 { 1 } else { chi1 };
                (1 + chi1) * v + 1 - pow
            } else {
                0
            }
        }
        _ => 0,
    }
}

/// delta'_3(d3, t).
pub fn delta3prime(d3: u64, t: &TraceElement) -> i64 {
    let v = rat_val(&t.norm(), 3);
    match d3 {
        1 => v + 1,
        3 => 2 * v + 3,
        _ => 0,
    }
}

/// epsilon = (-1)^((d1 + d2 - 2)/8).
pub fn pair_sign(pair: &DiscriminantPair) -> i64 {
    if (pair.d1 + pair.d2 - 2).div_euclid(8) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn sign_pow(eps: i64, k: u64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        eps
    }
}

/// The coefficient a(t, phi_d) as a combination of logarithms:
/// -d2 eps^(24/d) delta_2(d2, t) times the sum over primes inert in E/F.
pub fn a_coefficient(t: &TraceElement) -> Result<LogLinear> {
    if !t.is_totally_positive() {
        return Err(Error::InvalidInput(format!("t with a = {} is not totally positive", t.a)));
    }
    let pair = &t.pair;
    let d2 = p_part(t.d, 2);
    let d3 = t.d / d2;
    let del2 = delta2(d2, t);
    if del2 == 0 {
        return Ok(LogLinear::zero());
    }
    let vals = ideal_valuations(t);
    // The 3-adic branch counts ideals of t sqrt D before the 1/d3 scaling.
    let unscaled = ideal_valuations(&t.with_d(d2));
    let mut total = LogLinear::zero();
    let del3 = delta3(d3, t);
    let del3p = delta3prime(d3, t);
    for (prime, &k) in &vals {
        if prime.splits_in_e(pair) || prime.p == 2 {
            continue;
        }
        let coef = if prime.p == 3 {
            let mut rest = unscaled.clone();
            *rest.get_mut(prime).unwrap() -= 1;
            rho(pair, &rest, RhoPart::PrimeTo(2)) as i64 * del3p
        } else {
            if k < 1 {
                continue;
            }
            let mut rest = vals.clone();
            *rest.get_mut(prime).unwrap() -= 1;
            (1 + k) * rho(pair, &rest, RhoPart::PrimeTo(6)) as i64 * del3
        };
        total.add_term(prime.p, BigRational::from_integer(BigInt::from(coef)));
    }
    let outer = -(d2 as i64) * sign_pow(pair_sign(pair), 24 / t.d) * del2;
    Ok(total.scale_int(outer))
}

/// Odd a with a^2 < D, negative and positive.
pub fn trace_range(pair: &DiscriminantPair) -> Vec<i64> {
    let big_d = pair.big_d;
    let top = (big_d as u64).sqrt() as i64;
    (-top..=top).filter(|a| a % 2 != 0 && a * a < big_d).collect()
}

/// One factor of the Yui-Zagier product: a^2 + 16 m r^2 = D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct YzTerm {
    pub a: u64,
    pub r: u64,
    pub m: u64,
}

/// Terms (a, r, m) with a, m >= 1, r | s, a^2 + 16 m r^2 = D and
/// m = 19 (d1 + d2 - 1) mod s/r.
pub fn yz_terms(pair: &DiscriminantPair, s: u64) -> Result<Vec<YzTerm>> {
    pair.require_admissible()?;
    if s == 0 || 24 % s != 0 {
        return Err(Error::InvalidInput(format!("s = {s} does not divide 24")));
    }
    let big_d = pair.big_d as u64;
    let target = 19 * (pair.d1 + pair.d2 - 1);
    let mut out = Vec::new();
    for a in 1..=big_d.sqrt() {
        let rest = big_d - a * a;
        if rest == 0 {
            continue;
        }
        for r in divisors(s) {
            if rest % (16 * r * r) != 0 {
                continue;
            }
            let m = rest / (16 * r * r);
            if (m as i64 - target).rem_euclid((s / r) as i64) == 0 {
                out.push(YzTerm { a, r, m });
            }
        }
    }
    Ok(out)
}

/// Product of F(m) over the Yui-Zagier terms, before the kappa_3 exponent.
pub fn yz_product(pair: &DiscriminantPair, s: u64) -> Result<BigUint> {
    Ok(yz_terms(pair, s)?.iter().map(|t| pair.frak_f(t.m)).product())
}

/// f_s(d1, d2) from the prime-power product.
pub fn yz_rhs(pair: &DiscriminantPair, s: u64) -> Result<BigUint> {
    let prod = yz_product(pair, s)?;
    if *pair.kappa3(s).denom() == 1 {
        return Ok(prod);
    }
    exact_sqrt(&prod)
}

fn exact_sqrt(n: &BigUint) -> Result<BigUint> {
    let r = n.sqrt();
    if &r * &r != *n {
        return Err(Error::NonSquare(n.to_string()));
    }
    Ok(r)
}

/// J^2 = prod of F((D - a^2)/4) over odd a in (-sqrt D, sqrt D).
pub fn gz_rhs_squared(pair: &DiscriminantPair) -> BigUint {
    trace_range(pair)
        .into_iter()
        .map(|a| pair.frak_f(((pair.big_d - a * a) / 4) as u64))
        .product()
}

/// J(d1, d2) from the Gross-Zagier prime powers.
pub fn gz_rhs(pair: &DiscriminantPair) -> Result<BigUint> {
    exact_sqrt(&gz_rhs_squared(pair))
}

/// sum_{d | s} eps^(24/d) sum_a a(t_{a,d}, phi_d).
pub fn bigcm_sum(pair: &DiscriminantPair, s: u64) -> Result<LogLinear> {
    let eps = pair_sign(pair);
    let mut total = LogLinear::zero();
    for d in divisors(s) {
        let mut inner = LogLinear::zero();
        for a in trace_range(pair) {
            inner = inner.add(&a_coefficient(&TraceElement::new(*pair, d, a)?)?);
        }
        total = total.add(&inner.scale_int(sign_pow(eps, 24 / d)));
    }
    Ok(total)
}

/// 8 s log f_s = -sum_{d | s} eps^(24/d) sum_t a(t, phi_d), with f_s from
/// the resultant of class polynomials.
pub fn bigcm_check(pair: &DiscriminantPair, s: u64, cache: &PolyCache) -> Result<Check> {
    pair.require_admissible()?;
    if s == 0 || 24 % s != 0 {
        return Err(Error::InvalidInput(format!("s = {s} does not divide 24")));
    }
    let fs = yz_lhs_with(pair, s as u32, cache)?;
    let lhs = LogLinear::log_of(fs.magnitude())?.scale_int(8 * s as i64);
    let rhs = bigcm_sum(pair, s)?.scale_int(-1);
    Ok(Check::compare(
        format!("bigcm d1={} d2={} s={s}", pair.d1, pair.d2),
        lhs.to_string(),
        rhs.to_string(),
    ))
}

/// gamma_p(m) for p = 2, 3 with epsilon(p) = (d1/p).
fn gamma_small(pair: &DiscriminantPair, m: u64, p: u64) -> i64 {
    let k = val(m as i128, p) as i64;
    if kronecker(pair.d1, p as i64) == 1 {
        k + 1
    } else if k % 2 == 0 {
        1
    } else {
        (k + 1) / 2
    }
}

/// Both sides of the 2-adic regrouping identity for one a.
pub fn count2_sides(pair: &DiscriminantPair, s: u64, a: i64) -> (i64, i64) {
    let s2 = p_part(s, 2);
    let lhs = divisors(s2)
        .into_iter()
        .map(|d2| d2 as i64 * delta2(d2, &TraceElement { pair: *pair, d: d2, a }))
        .sum();
    let rest = pair.big_d - a * a;
    let rhs: i64 = divisors(s2)
        .into_iter()
        .filter(|&r| rest % (16 * (r * r) as i64) == 0)
        .filter(|&r| {
            let m = rest / (16 * (r * r) as i64);
            (m - 3).rem_euclid((s2 / r) as i64) == 0
        })
        .map(|r| gamma_small(pair, (rest / (16 * (r * r) as i64)) as u64, 2))
        .sum();
    (lhs, 2 * s2 as i64 * rhs)
}

/// Both sides of the 3-adic regrouping identity for one a, as rationals.
pub fn count3_sides(pair: &DiscriminantPair, s: u64, a: i64) -> (Ratio<i64>, Ratio<i64>) {
    let s3 = p_part(s, 3);
    let rest = pair.big_d - a * a;
    let target = pair.d1 + pair.d2 - 1;
    let gsum: i64 = divisors(s3)
        .into_iter()
        .filter(|&r| rest % (16 * (r * r) as i64) == 0)
        .filter(|&r| {
            let m = rest / (16 * (r * r) as i64);
            (m - target).rem_euclid((s3 / r) as i64) == 0
        })
        .map(|r| gamma_small(pair, (rest / (16 * (r * r) as i64)) as u64, 3))
        .sum();
    let k = pair.kappa3(s);
    let lhs = Ratio::new(*k.numer() as i64, *k.denom() as i64) * (s3 as i64 * gsum);
    let both_inert = kronecker(pair.d1, 3) == -1 && kronecker(pair.d2, 3) == -1;
    let t1 = TraceElement { pair: *pair, d: 1, a };
    let rhs = if both_inert && val(rest as i128, 3) % 2 == 1 {
        let vals = ideal_valuations(&t1);
        let mut sum = 0i64;
        for d3 in divisors(s3) {
            let dp = delta3prime(d3, &t1.with_d(d3));
            for prime in vals.keys().filter(|q| q.p == 3) {
                let mut v = vals.clone();
                *v.get_mut(prime).unwrap() -= 1;
                sum += rho(pair, &v, RhoPart::At(3)) as i64 * dp;
            }
        }
        Ratio::new(sum, 2)
    } else {
        Ratio::from_integer(divisors(s3).into_iter().map(|d3| delta3(d3, &t1.with_d(d3))).sum())
    };
    (lhs, rhs)
}

/// The 2-adic and 3-adic regrouping identities for every s | 24. The 2-adic
/// one is checked for every odd a with a^2 < D, the 3-adic one for the a
/// with a^2 = D mod 16, where the 2-adic factor it multiplies is nonzero.
pub fn count_identities(pair: &DiscriminantPair) -> Result<Vec<Check>> {
    pair.require_admissible()?;
    let mut out = Vec::new();
    for s in divisors(24) {
        let range = trace_range(pair);
        out.push(Check::first_failure(
            format!("count2 d1={} d2={} s={s}", pair.d1, pair.d2),
            range.iter().filter_map(|&a| {
                let (l, r) = count2_sides(pair, s, a);
                (l != r).then(|| format!("a={a}: {l} != {r}"))
            }),
        ));
        out.push(Check::first_failure(
            format!("count3 d1={} d2={} s={s}", pair.d1, pair.d2),
            range.iter().filter(|&&a| (pair.big_d - a * a) % 16 == 0).filter_map(|&a| {
                let (l, r) = count3_sides(pair, s, a);
                (l != r).then(|| format!("a={a}: {l} != {r}"))
            }),
        ));
    }
    Ok(out)
}

/// f_s = yz_rhs for every s | 24.
pub fn yz_checks(pair: &DiscriminantPair, s_list: &[u64], cache: &PolyCache) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &s in s_list {
        let lhs = yz_lhs_with(pair, s as u32, cache)?;
        let rhs = yz_rhs(pair, s)?;
        out.push(Check::compare(
            format!("yz d1={} d2={} s={s}", pair.d1, pair.d2),
            lhs.magnitude().to_string(),
            rhs.to_string(),
        ));
    }
    Ok(out)
}

/// J from the resultant of Hilbert class polynomials against the prime powers.
pub fn gz_check(pair: &DiscriminantPair, cache: &PolyCache) -> Result<Check> {
    let lhs = gz_lhs_with(pair, cache)?;
    let rhs = gz_rhs(pair)?;
    Ok(Check::compare(
        format!("gz d1={} d2={}", pair.d1, pair.d2),
        lhs.magnitude().to_string(),
        rhs.to_string(),
    ))
}

/// Square divisors k^2 of the table columns, in column order.
pub const TABLE_COLUMNS: [u64; 9] = [1, 2, 4, 8, 16, 6, 12, 24, 48];

/// One row of the prime-power table: m = (D - a^2)/4 and F(m/k^2) per column
/// (None for the value 1, including when k^2 does not divide m).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub a: u64,
    pub m: u64,
    pub m_mod_96: u64,
    pub values: Vec<Option<(u64, u32)>>,
}

/// Rows for the positive odd a with a^2 < D.
pub fn yz_table(pair: &DiscriminantPair) -> Vec<TableRow> {
    trace_range(pair)
        .into_iter()
        .filter(|&a| a > 0)
        .map(|a| {
            let m = ((pair.big_d - a * a) / 4) as u64;
            let values = TABLE_COLUMNS
                .iter()
                .map(|&k| if m % (k * k) == 0 { pair.frak_f_parts(m / (k * k)) } else { None })
                .collect();
            TableRow { a: a as u64, m, m_mod_96: m % 96, values }
        })
        .collect()
}

/// "2^{3} \cdot 3 \cdot 41".
fn latex_factored(n: u64) -> String {
    let f = factor(n);
    if f.factors.is_empty() {
        return "1".into();
    }
    f.factors
        .iter()
        .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{{{e}}}") })
        .collect::<Vec<_>>()
        .join(" \\cdot ")
}

/// "3^8", "3^{10}", "241", "1".
fn latex_power(v: Option<(u64, u32)>) -> String {
    match v {
        None => "1".into(),
        Some((p, 1)) => p.to_string(),
        Some((p, e)) if e < 10 => format!("{p}^{e}"),
        Some((p, e)) => format!("{p}^{{{e}}}"),
    }
}

/// "2^3 * 3 * 41" and "3^10".
fn plain_factored(n: u64) -> String {
    let f = factor(n);
    if f.factors.is_empty() {
        return "1".into();
    }
    f.factors
        .iter()
        .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn plain_power(v: Option<(u64, u32)>) -> String {
    match v {
        None => "1".into(),
        Some((p, 1)) => p.to_string(),
        Some((p, e)) => format!("{p}^{e}"),
    }
}

const LATEX_HEADER: &str = r"  \begin{tabular}{|c|c|c|c|c|c|c|c|c|c|c|c|}
 \hline
$a$ & $m$ & $m \bmod 96$ &  $\mathfrak{F}(m)$ & $\mathfrak{F}(\tfrac{m}{2^2})$ & $\mathfrak{F}(\tfrac{m}{4^2})$  & $\mathfrak{F}(\tfrac{m}{8^2})$ & $\mathfrak{F}(\tfrac{m}{16^2})$  & $\mathfrak{F}(\tfrac{m}{6^2})$ & $\mathfrak{F}(\tfrac{m}{12^2})$  & $\mathfrak{F}(\tfrac{m}{24^2})$ & $\mathfrak{F}(\tfrac{m}{48^2})$ \\ \hline
";

/// LaTeX tabular in the layout of the published table.
pub fn table_latex(rows: &[TableRow]) -> String {
    let mut out = String::from(LATEX_HEADER);
    for row in rows {
        let cells: Vec<String> = row.values.iter().map(|&v| latex_power(v)).collect();
        out.push_str(&format!(
            "{} &$ {} $& {} &$ {} $ \\\\ \\hline\n",
            row.a,
            latex_factored(row.m),
            row.m_mod_96,
            cells.join(" $&$ ")
        ));
    }
    out.push_str("  \\end{tabular}\n");
    out
}

fn column_titles() -> Vec<String> {
    let mut out = vec!["a".to_string(), "m".into(), "m mod 96".into()];
    out.extend(TABLE_COLUMNS.iter().map(|&k| {
        if k == 1 {
            "F(m)".to_string()
        } else {
            format!("F(m/{k}^2)")
        }
    }));
    out
}

fn plain_cells(row: &TableRow) -> Vec<String> {
    let mut out = vec![row.a.to_string(), plain_factored(row.m), row.m_mod_96.to_string()];
    out.extend(row.values.iter().map(|&v| plain_power(v)));
    out
}

pub fn table_markdown(rows: &[TableRow]) -> String {
    let titles = column_titles();
    let mut out = format!("| {} |\n", titles.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(titles.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", plain_cells(row).join(" | ")));
    }
    out
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = column_titles().join(",") + "\n";
    for row in rows {
        out.push_str(&plain_cells(row).join(","));
        out.push('\n');
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> String {
    let objs: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            serde_json::json!({
                "a": row.a,
                "m": row.m,
                "m_factored": plain_factored(row.m),
                "m_mod_96": row.m_mod_96,
                "values": TABLE_COLUMNS.iter().zip(&row.values).map(|(&k, &v)| serde_json::json!({
                    "k": k,
                    "value": plain_power(v),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&objs).expect("serializable")
}
