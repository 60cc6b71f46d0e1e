//! Truncated two-variable Puiseux series and the Borcherds products Psi_d.
//!
//! A series in x = q1^{1/D}, y = q2^{1/D} keeps every term of total degree
//! i + j <= cutoff (degrees in units of 1/D). The Borcherds products, the
//! Weber differences and the checks between them run on a dense integer
//! kernel; [`PuiseuxSeries2`] is the exact rational type exposed to callers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{a_coeff, divisors, moebius, p_part};
use crate::cyclo::CycNum;
use crate::report::Check;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries2 {
    denom: u32,
    cutoff: i64,
    coeffs: BTreeMap<(i64, i64), BigRational>,
}

impl PuiseuxSeries2 {
    /// The zero series, known through total order `order`.
    pub fn zero(denom: u32, order: u32) -> Self {
        Self::with_cutoff(denom, order as i64 * denom as i64)
    }

    /// The zero series, known through total degree `cutoff` (units of 1/denom).
    pub fn with_cutoff(denom: u32, cutoff: i64) -> Self {
        assert!(denom > 0, "denominator must be positive");
        PuiseuxSeries2 { denom, cutoff, coeffs: BTreeMap::new() }
    }

    pub fn one(denom: u32, order: u32) -> Self {
        Self::monomial(denom, order, 0, 0, BigRational::one())
    }

    /// c q1^{i/denom} q2^{j/denom}.
    pub fn monomial(denom: u32, order: u32, i: i64, j: i64, c: BigRational) -> Self {
        let mut s = Self::zero(denom, order);
        s.add_term(i, j, c);
        s
    }

    pub fn from_terms<I>(denom: u32, order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = ((i64, i64), BigRational)>,
    {
        let mut s = Self::zero(denom, order);
        for ((i, j), c) in terms {
            s.add_term(i, j, c);
        }
        s
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Largest total degree (units of 1/denom) through which the series is exact.
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn order(&self) -> BigRational {
        BigRational::new(self.cutoff.into(), self.denom.into())
    }

    pub fn coeff(&self, i: i64, j: i64) -> BigRational {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigRational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, i: i64, j: i64, c: BigRational) {
        if i + j > self.cutoff || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((i, j)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    /// Smallest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().map(|&(i, j)| i + j).min()
    }

    /// The same series over a denominator that is a multiple of the current one.
    pub fn with_denom(&self, denom: u32) -> Result<Self> {
        if denom % self.denom != 0 {
            return Err(Error::InvalidInput(format!("{denom} is not a multiple of {}", self.denom)));
        }
        let f = (denom / self.denom) as i64;
        Ok(PuiseuxSeries2 {
            denom,
            cutoff: self.cutoff * f,
            coeffs: self.coeffs.iter().map(|(&(i, j), c)| ((i * f, j * f), c.clone())).collect(),
        })
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        let l = self.denom.lcm(&o.denom);
        (self.with_denom(l).expect("lcm"), o.with_denom(l).expect("lcm"))
    }

    pub fn truncate(&self, cutoff: i64) -> Self {
        let cutoff = cutoff.min(self.cutoff);
        PuiseuxSeries2 {
            denom: self.denom,
            cutoff,
            coeffs: self.coeffs.iter().filter(|(&(i, j), _)| i + j <= cutoff).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let mut out = a.truncate(b.cutoff);
        for (&(i, j), c) in &b.coeffs {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = Self::with_cutoff(self.denom, self.cutoff);
        for (&(i, j), c) in &self.coeffs {
            out.add_term(i, j, c * r);
        }
        out
    }

    /// Product, exact through min(Ka + ob, Kb + oa) for cutoffs K and
    /// minimal degrees o.
    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let oa = a.min_degree().unwrap_or(a.cutoff + 1);
        let ob = b.min_degree().unwrap_or(b.cutoff + 1);
        let cutoff = (a.cutoff + ob).min(b.cutoff + oa);
        let mut out = Self::with_cutoff(a.denom, cutoff);
        for (&(i1, j1), c1) in &a.coeffs {
            for (&(i2, j2), c2) in &b.coeffs {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    /// Multiplicative inverse. Requires a unique term of minimal total degree.
    pub fn inv(&self) -> Result<Self> {
        let o = self.min_degree().ok_or(Error::NotInvertible)?;
        let lead: Vec<_> = self.coeffs.iter().filter(|(&(i, j), _)| i + j == o).collect();
        if lead.len() != 1 {
            return Err(Error::NotInvertible);
        }
        let (&(i0, j0), c0) = lead[0];
        // self = c0 m (1 + h) with h of positive degree, exact through cutoff - o
        let kh = self.cutoff - o;
        if kh < 0 {
            return Err(Error::TruncationTooSmall("leading term lies beyond the cutoff".into()));
        }
        let mut h = Self::with_cutoff(self.denom, kh);
        for (&(i, j), c) in &self.coeffs {
            if (i, j) != (i0, j0) {
                h.add_term(i - i0, j - j0, c / c0);
            }
        }
        let one = {
            let mut s = Self::with_cutoff(self.denom, kh);
            s.add_term(0, 0, BigRational::one());
            s
        };
        // geometric series 1 - h + h^2 - ... by Horner
        let steps = match h.min_degree() {
            Some(m) if m > 0 => (kh / m) as usize,
            _ => 0,
        };
        let mut acc = one.clone();
        for _ in 0..steps {
            acc = one.sub(&h.mul(&acc).truncate(kh));
        }
        let mut out = Self::with_cutoff(self.denom, kh - o);
        let inv_c0 = c0.recip();
        for (&(i, j), c) in &acc.coeffs {
            out.add_term(i - i0, j - j0, c * &inv_c0);
        }
        Ok(out)
    }

    /// Integer power; negative exponents go through [`Self::inv`].
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = {
            let mut s = Self::with_cutoff(self.denom, base.cutoff);
            s.add_term(0, 0, BigRational::one());
            s
        };
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Exchange q1 and q2.
    pub fn swap(&self) -> Self {
        PuiseuxSeries2 {
            denom: self.denom,
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// Lines "i/D j/D num/den", sorted by exponent pair.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&(i, j), c) in &self.coeffs {
            writeln!(out, "{i}/{d} {j}/{d} {}/{}", c.numer(), c.denom(), d = self.denom).expect("write to string");
        }
        out
    }

    /// Inverse of [`Self::dump`]; the cutoff is not part of the format.
    pub fn parse_dump(text: &str, denom: u32, order: u32) -> Result<Self> {
        let bad = |l: &str| Error::InvalidInput(format!("malformed series line: {l}"));
        let mut s = Self::zero(denom, order);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(line));
            }
            let frac = |t: &str| -> Option<(BigInt, BigInt)> {
                let (n, d) = t.split_once('/')?;
                Some((n.parse().ok()?, d.parse().ok()?))
            };
            let (i, di) = frac(parts[0]).ok_or_else(|| bad(line))?;
            let (j, dj) = frac(parts[1]).ok_or_else(|| bad(line))?;
            let (n, d) = frac(parts[2]).ok_or_else(|| bad(line))?;
            if di != BigInt::from(denom) || dj != BigInt::from(denom) || d.is_zero() {
                return Err(bad(line));
            }
            let (i, j) = (i.to_i64().ok_or_else(|| bad(line))?, j.to_i64().ok_or_else(|| bad(line))?);
            s.add_term(i, j, BigRational::new(n, d));
        }
        Ok(s)
    }
}

/// Dense integer series in x, y truncated at total degree k.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dense {
    k: usize,
    data: Vec<BigInt>,
}

impl Dense {
    fn zero(k: usize) -> Self {
        Dense { k, data: vec![BigInt::zero(); (k + 1) * (k + 1)] }
    }

    fn one(k: usize) -> Self {
        let mut d = Self::zero(k);
        d.data[0] = BigInt::one();
        d
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.k + 1) + j
    }

    fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[self.idx(i, j)]
    }

    fn add_at(&mut self, i: usize, j: usize, v: &BigInt) {
        if i + j <= self.k {
            let n = self.idx(i, j);
            self.data[n] += v;
        }
    }

    fn nonzero(&self) -> Vec<(usize, usize, &BigInt)> {
        let mut out = Vec::new();
        for i in 0..=self.k {
            for j in 0..=self.k - i {
                let v = self.get(i, j);
                if !v.is_zero() {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    fn scale(&self, c: &BigInt) -> Self {
        Dense { k: self.k, data: self.data.iter().map(|v| v * c).collect() }
    }

    fn add(&self, o: &Self) -> Self {
        Dense { k: self.k, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.k);
        let b = o.nonzero();
        for (i1, j1, c1) in self.nonzero() {
            for &(i2, j2, c2) in &b {
                out.add_at(i1 + i2, j1 + j2, &(c1 * c2));
            }
        }
        out
    }

    /// self * (1 - sign x^a y^b)^e through degree k.
    fn mul_binomial(&self, a: usize, b: usize, sign: i64, e: &BigInt) -> Self {
        let step = a + b;
        assert!(step > 0, "monomial must have positive degree");
        let kmax = self.k / step;
        // g_t = binom(e, t) (-sign)^t
        let mut g = Vec::with_capacity(kmax + 1);
        let mut binom = BigInt::one();
        g.push(BigInt::one());
        for t in 1..=kmax {
            binom = binom * (e - BigInt::from(t - 1)) / BigInt::from(t);
            let s = if (t % 2 == 1) == (sign > 0) { -&binom } else { binom.clone() };
            g.push(s);
        }
        let mut out = self.clone();
        for (i, j, c) in self.nonzero() {
            for (t, gt) in g.iter().enumerate().skip(1) {
                if gt.is_zero() {
                    continue;
                }
                out.add_at(i + t * a, j + t * b, &(c * gt));
            }
        }
        out
    }

    /// Inverse of a series with constant term +-1.
    fn inv_unit(&self) -> Self {
        let c0 = self.get(0, 0).clone();
        assert!(c0.abs().is_one(), "constant term must be a unit");
        let mut out = Self::zero(self.k);
        let terms = self.nonzero();
        for deg in 0..=self.k {
            for i in 0..=deg {
                let j = deg - i;
                let mut acc = if deg == 0 { BigInt::one() } else { BigInt::zero() };
                for &(a, b, c) in &terms {
                    if (a, b) == (0, 0) || a > i || b > j {
                        continue;
                    }
                    acc -= c * out.get(i - a, j - b);
                }
                let n = out.idx(i, j);
                out.data[n] = acc * &c0;
            }
        }
        out
    }

    fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv_unit() } else { self.clone() };
        let mut acc = Self::one(self.k);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// x^i y^j -> x^{i f} y^{j f}, truncated at the new degree k.
    fn stretch(&self, f: usize, k: usize) -> Self {
        let mut out = Self::zero(k);
        for (i, j, c) in self.nonzero() {
            out.add_at(i * f, j * f, c);
        }
        out
    }

    fn outer(x: &[BigInt], y: &[BigInt], k: usize) -> Self {
        let mut out = Self::zero(k);
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().take((k + 1).saturating_sub(i)) {
                if !b.is_zero() {
                    out.add_at(i, j, &(a * b));
                }
            }
        }
        out
    }

    fn to_series(&self, denom: u32) -> PuiseuxSeries2 {
        let mut s = PuiseuxSeries2::with_cutoff(denom, self.k as i64);
        for (i, j, c) in self.nonzero() {
            s.add_term(i as i64, j as i64, BigRational::from_integer(c.clone()));
        }
        s
    }

    fn first_difference(&self, o: &Self) -> Option<(usize, usize)> {
        (0..=self.k).flat_map(|i| (0..=self.k - i).map(move |j| (i, j))).find(|&(i, j)| self.get(i, j) != o.get(i, j))
    }
}

/// Coefficients of prod_{n>=1} (1 + q^n)^k through q^{len-1}, via the
/// logarithmic-derivative recurrence n a_n = k sum_j s(j) a_{n-j} with
/// s(j) = sum_{t | j} t (-1)^{j/t + 1}.
pub fn one_plus_q_power(k: i64, len: usize) -> Vec<BigInt> {
    let mut s = vec![0i64; len];
    for t in 1..len {
        for j in (t..len).step_by(t) {
            s[j] += if (j / t) % 2 == 1 { t as i64 } else { -(t as i64) };
        }
    }
    let mut a: Vec<BigInt> = Vec::with_capacity(len);
    if len > 0 {
        a.push(BigInt::one());
    }
    for n in 1..len {
        let mut acc = BigInt::zero();
        for j in 1..=n {
            if s[j] != 0 {
                acc += &a[n - j] * s[j];
            }
        }
        acc *= k;
        let (q, r) = acc.div_rem(&BigInt::from(n));
        debug_assert!(r.is_zero(), "recurrence division must be exact");
        a.push(q);
    }
    a
}

fn check_divides_24(d: i64) -> Result<()> {
    if d > 0 && 24 % d == 0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{d} does not divide 24")))
    }
}

/// c_d(l) for l <= l_max: the coefficients of (eta(tau)/eta(2 tau))^{24/d} =
/// sum_{l = -1 mod d} c_d(l) q^{l/d}. For odd d | 24, c_{-d}(l) are the
/// coefficients of f_2(tau)^{24/d} = 2^{12/d} q^{1/d} prod (1 + q^n)^{24/d} =
/// sum_{l = 1 mod d} c_{-d}(l) q^{l/d}.
pub fn eta_quotient_coeffs(d: i64, l_max: i64) -> Result<BTreeMap<i64, BigInt>> {
    if d < 0 && (d == -1 || d == -3) {
        let e = -d;
        if l_max < 1 {
            return Ok(BTreeMap::new());
        }
        let len = ((l_max - 1) / e + 1) as usize;
        let p = one_plus_q_power(24 / e, len);
        let scale = two_pow((12 / e) as u32);
        return Ok(p.into_iter().enumerate().map(|(n, c)| (n as i64 * e + 1, c * &scale)).collect());
    }
    check_divides_24(d)?;
    if l_max < -1 {
        return Ok(BTreeMap::new());
    }
    let len = ((l_max + 1) / d + 1) as usize;
    let p = one_plus_q_power(-24 / d, len);
    Ok(p.into_iter().enumerate().map(|(n, c)| (n as i64 * d - 1, c)).collect())
}

/// Sign twist on the (m, n) factor of Psi_d.
pub fn psi_twist(d: u32, n: u64) -> i64 {
    let d2 = p_part(d as u64, 2);
    if d2 == 1 {
        return 1;
    }
    let e = (n * n - 1) / d2;
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exponents b mu(d/b) of the leading factors (q1^{1/b} - q2^{1/b}).
pub fn psi_leading_exponents(d: u32) -> Vec<(u32, i64)> {
    divisors(d as u64)
        .into_iter()
        .filter_map(|b| {
            let mu = moebius(d as u64 / b) as i64;
            (mu != 0).then_some((b as u32, b as i64 * mu))
        })
        .collect()
}

/// Psi_d = constant * prod_b (q1^{1/b} - q2^{1/b})^{e_b} * body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorcherdsProduct {
    pub d: u32,
    pub constant: BigInt,
    pub leading: Vec<(u32, i64)>,
    /// Power series with constant term 1 in q^{1/d}.
    pub body: PuiseuxSeries2,
}

impl BorcherdsProduct {
    /// The full expansion. Negative leading exponents need a series inverse of
    /// (q1^{1/b} - q2^{1/b}), which has no unique leading term.
    pub fn to_series(&self) -> Result<PuiseuxSeries2> {
        let mut acc = self.body.scale(&BigRational::from_integer(self.constant.clone()));
        for &(b, e) in &self.leading {
            let step = (self.d / b) as i64;
            let cut = acc.cutoff() + step * e.abs();
            let mut f = PuiseuxSeries2::with_cutoff(self.d, cut);
            f.add_term(step, 0, BigRational::one());
            f.add_term(0, step, -BigRational::one());
            let f = f.pow(e).map_err(|_| {
                Error::TruncationTooSmall(format!("leading factor (q1^(1/{b}) - q2^(1/{b}))^{e} is not a power series"))
            })?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }
}

/// Table of c_d(l) values keyed by d (with -1 for the f_2^24 coefficients).
struct CoeffTable(HashMap<i64, BTreeMap<i64, BigInt>>);

impl CoeffTable {
    fn new() -> Self {
        CoeffTable(HashMap::new())
    }

    fn get(&mut self, d: i64, l: i64) -> BigInt {
        let need = self.0.get(&d).and_then(|m| m.keys().next_back().copied()).unwrap_or(-2);
        if need < l {
            let table = eta_quotient_coeffs(d, (2 * l).max(64)).expect("valid d");
            self.0.insert(d, table);
        }
        self.0[&d].get(&l).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// Body of Psi_d as a dense series in x = q1^{1/denom}, d | denom, through
/// degree k.
fn psi_body_dense(d: u32, denom: u32, k: usize, table: &mut CoeffTable) -> Dense {
    let mut acc = Dense::one(k);
    let lead = psi_leading_exponents(d);
    let dd = d as u64;
    let bmax = lead.iter().map(|&(b, _)| b).max().unwrap_or(1) as usize;
    // (n + m) denom / b <= k for some b
    let nm_max = k * bmax / denom as usize;
    for n in 1..=nm_max {
        for m in 1..=nm_max - n {
            if (m as u64 * n as u64 + 1) % dd != 0 {
                continue;
            }
            let c = table.get(d as i64, (m * n) as i64);
            if c.is_zero() {
                continue;
            }
            let tw = psi_twist(d, n as u64);
            for &(b, e) in &lead {
                let f = (denom / b) as usize;
                if (n + m) * f > k {
                    continue;
                }
                let exp = &c * (tw * e);
                acc = acc.mul_binomial(n * f, m * f, 1, &exp);
            }
        }
    }
    if d % 2 == 1 {
        // factors at (2n, 2m) weighted by the coefficients of f_2^{24/d}
        for n in 1..=nm_max / 2 {
            for m in 1..=(nm_max / 2).saturating_sub(n) {
                if (2 * m as u64 * n as u64) % dd != 1 % dd {
                    continue;
                }
                let c = table.get(-(d as i64), (2 * m * n) as i64);
                for &(b, e) in &lead {
                    let f = (denom / b) as usize;
                    if 2 * (n + m) * f > k {
                        continue;
                    }
                    acc = acc.mul_binomial(2 * n * f, 2 * m * f, 1, &(&c * e));
                }
            }
        }
    }
    if d == 1 {
        // single-variable factors prod (1 + q_i^n)^24 = prod (1 - q_i^n)^-24 (1 - q_i^{2n})^24
        let f = denom as usize;
        let (minus, plus) = (BigInt::from(-24), BigInt::from(24));
        for n in 1..=k / f {
            acc = acc.mul_binomial(n * f, 0, 1, &minus).mul_binomial(0, n * f, 1, &minus);
            if 2 * n * f <= k {
                acc = acc.mul_binomial(2 * n * f, 0, 1, &plus).mul_binomial(0, 2 * n * f, 1, &plus);
            }
        }
    }
    acc
}

/// Psi_d through total order `order`.
///
/// The body is the product over m, n >= 1 with mn = -1 mod d of
/// prod_{b | d} (1 - q1^{n/b} q2^{m/b})^{b mu(d/b) c_d(mn) (-1)^{(n^2-1)/d_2}}.
/// For odd d it also carries the factors at (2n, 2m) with 2mn = 1 mod d,
/// weighted by c_{-d}(2mn), and for d = 1 the single-variable factors
/// prod (1 + q_i^n)^24.
pub fn psi_product(d: u32, order: u32) -> Result<BorcherdsProduct> {
    check_divides_24(d as i64)?;
    if order == 0 {
        return Err(Error::TruncationTooSmall("order must be positive".into()));
    }
    let k = (order * d) as usize;
    let body = psi_body_dense(d, d, k, &mut CoeffTable::new()).to_series(d);
    let constant = if d == 1 { BigInt::from(4096) } else { BigInt::one() };
    Ok(BorcherdsProduct { d, constant, leading: psi_leading_exponents(d), body })
}

/// Coefficients of q^{1/b} prod (1 + q^n)^{24/b} in the variable q^{1/b}
/// through degree `len - 1`.
fn weber_root_series(b: u32, len: usize) -> Vec<BigInt> {
    let p = one_plus_q_power(24 / b as i64, len / b as usize + 2);
    let mut out = vec![BigInt::zero(); len];
    for (n, c) in p.into_iter().enumerate() {
        let deg = 1 + n * b as usize;
        if deg < len {
            out[deg] = c;
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn two_pow(e: u32) -> BigInt {
    BigInt::one() << e
}

/// (f_2(z1)^{24/s} - (eps f_2(z2))^{24/s})^s as a series in q^{1/s}, dense.
fn weber_difference_dense(s: u32, eps: i32, k: usize) -> Result<Dense> {
    let a = weber_root_series(s, k + 1);
    let sign = if eps < 0 && (24 / s) % 2 == 1 { -1 } else { 1 };
    let b: Vec<BigInt> = a.iter().map(|c| c * sign).collect();
    // f_2^{24/s} = 2^{12/s} q^{1/s} prod (1 + q^n)^{24/s}: the power of 2 is
    // carried as an exponent and must be integral on every binomial term
    let half = Ratio::new(12i64, s as i64);
    let mut pa = vec![vec![BigInt::one()]];
    let mut pb = vec![vec![BigInt::one()]];
    let trunc_mul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); (x.len() + y.len() - 1).min(k + 1)];
        for (i, u) in x.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
            for (j, v) in y.iter().enumerate().take((k + 1).saturating_sub(i)) {
                out[i + j] += u * v;
            }
        }
        out
    };
    for t in 1..=s as usize {
        pa.push(trunc_mul(&pa[t - 1], &a));
        pb.push(trunc_mul(&pb[t - 1], &b));
    }
    let mut total = Dense::zero(k);
    for t in 0..=s {
        let exp = half * (s - t) as i64 + half * t as i64;
        if !exp.is_integer() {
            return Err(Error::SymbolicExponentLeak(format!("2^({exp}) on the term of degree {t} in the second variable")));
        }
        let mut coeff = binomial(s, t) * two_pow(exp.to_integer() as u32);
        if t % 2 == 1 {
            coeff = -coeff;
        }
        let term = Dense::outer(&pa[(s - t) as usize], &pb[t as usize], k).scale(&coeff);
        total = total.add(&term);
    }
    Ok(total)
}

/// (f_2(z1)^{24/s} - (eps f_2(z2))^{24/s})^s through total order `order`, as
/// a series in q^{1/s} with exact rational coefficients.
pub fn weber24s_series(s: u32, eps: i32, order: u32) -> Result<PuiseuxSeries2> {
    check_divides_24(s as i64)?;
    check_eps(eps)?;
    Ok(weber_difference_dense(s, eps, (order * s) as usize)?.to_series(s))
}

fn check_eps(eps: i32) -> Result<()> {
    if eps == 1 || eps == -1 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must be 1 or -1, got {eps}")))
    }
}

/// prod_b (x^{s/b} - y^{s/b})^{t_b} split into numerator and denominator
/// polynomials, each truncated at degree k.
fn leading_polys(exps: &BTreeMap<u32, i64>, s: u32, k: usize) -> (Dense, Dense) {
    let mut num = Dense::one(k);
    let mut den = Dense::one(k);
    for (&b, &t) in exps {
        let f = (s / b) as usize;
        let mut factor = Dense::zero(k);
        factor.add_at(f, 0, &BigInt::one());
        factor.add_at(0, f, &-BigInt::one());
        let target = if t > 0 { &mut num } else { &mut den };
        for _ in 0..t.unsigned_abs() {
            *target = target.mul(&factor);
        }
    }
    (num, den)
}

/// Exact check of (f_2(z1)^{24/s} - (eps f_2(z2))^{24/s})^s = prod_{d | s}
/// Psi_d^{eps^{24/d}} through total order `order`.
///
/// Leading factors are compared as polynomials. For the full series the
/// denominator of the combined leading factor is cleared on the left, so no
/// series inversion of (q1^{1/b} - q2^{1/b}) is needed.
pub fn blift_check(s: u32, eps: i32, order: u32) -> Result<Vec<Check>> {
    check_divides_24(s as i64)?;
    check_eps(eps)?;
    if order < 2 {
        return Err(Error::TruncationTooSmall(format!("order {order} < 2")));
    }
    let tag = format!("s={s} eps={eps} N={order}");
    let k = (order * s) as usize;
    let sign_of = |d: u32| if eps < 0 && (24 / d) % 2 == 1 { -1i64 } else { 1 };

    let mut lead_exps: BTreeMap<u32, i64> = BTreeMap::new();
    for d in divisors(s as u64) {
        for (b, e) in psi_leading_exponents(d as u32) {
            *lead_exps.entry(b).or_insert(0) += e * sign_of(d as u32);
        }
    }
    lead_exps.retain(|_, e| *e != 0);

    // leading factor identity as exact polynomials
    let deg: usize = lead_exps.iter().map(|(&b, &t)| (s / b) as usize * t.unsigned_abs() as usize).sum::<usize>() + s as usize;
    let (num, den) = leading_polys(&lead_exps, s, deg);
    let mut target = Dense::zero(deg);
    let eps_s = sign_of(s);
    for t in 0..=s as usize {
        let mut c = binomial(s, t as u32);
        if t % 2 == 1 {
            c = -c;
        }
        if eps_s < 0 && t % 2 == 1 {
            c = -c;
        }
        target.add_at(s as usize - t, t, &c);
    }
    let lead_ok = num == target.mul(&den);
    let lead_check = Check::expect(format!("borcherds leading factor {tag}"), lead_ok, || {
        format!("combined leading exponents {lead_exps:?} do not give (q1^(1/{s}) - eps q2^(1/{s}))^{s}")
    });

    let (num, den) = leading_polys(&lead_exps, s, k);
    let lhs = weber_difference_dense(s, eps, k)?.mul(&den);
    let mut table = CoeffTable::new();
    let mut rhs = num.scale(&BigInt::from(4096));
    for d in divisors(s as u64) {
        let body = psi_body_dense(d as u32, s, k, &mut table);
        let body = if sign_of(d as u32) < 0 { body.inv_unit() } else { body };
        rhs = rhs.mul(&body);
    }
    let series_check = match lhs.first_difference(&rhs) {
        None => Check::pass(format!("borcherds series {tag}")),
        Some((i, j)) => Check::fail(
            format!("borcherds series {tag}"),
            format!("coefficient of q1^({i}/{s}) q2^({j}/{s}): lhs {} rhs {}", lhs.get(i, j), rhs.get(i, j)),
        ),
    };
    Ok(vec![lead_check, series_check])
}

/// The body of Psi_d computed a second way, as prod_b U_b^{b mu(d/b)} where
/// f_2(z1)^{24/b} - f_2(z2)^{24/b} = 2^{12/b} (q1^{1/b} - q2^{1/b}) U_b.
pub fn psi_body_from_weber(d: u32, order: u32) -> Result<PuiseuxSeries2> {
    check_divides_24(d as i64)?;
    let k = (order * d) as usize;
    let mut acc = Dense::one(k);
    for (b, e) in psi_leading_exponents(d) {
        let f = (d / b) as usize;
        let kb = k / f;
        // x F(x^b) - y F(y^b) divided by x - y: sum_t c_t sum_{i+j=t-1} x^i y^j
        let w = weber_root_series(b, kb + 2);
        let mut u = Dense::zero(kb);
        for (t, c) in w.iter().enumerate().skip(1) {
            for i in 0..t {
                u.add_at(i, t - 1 - i, c);
            }
        }
        acc = acc.mul(&u.stretch(f, k).pow(e));
    }
    Ok(acc.to_series(d))
}

/// Both routes to the body of Psi_d agree through total order `order`.
pub fn verify_psi_paths(d: u32, order: u32) -> Result<Check> {
    let a = psi_product(d, order)?.body;
    let b = psi_body_from_weber(d, order)?;
    let name = format!("psi body d={d} N={order}: product vs weber differences");
    Ok(match a.sub(&b).terms().next() {
        None => Check::pass(name),
        Some(((i, j), c)) => Check::fail(name, format!("difference {c} at q1^({i}/{d}) q2^({j}/{d})")),
    })
}

/// Numerator and denominator of p_d(X) = prod_{b | d} (1 - X^{d/b})^{b mu(d/b)}.
pub fn p_d_rational(d: u64) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for b in divisors(d) {
        let e = b as i64 * moebius(d / b) as i64;
        let target = if e > 0 { &mut num } else { &mut den };
        for _ in 0..e.unsigned_abs() {
            *target = poly_mul_one_minus(target, (d / b) as usize);
        }
    }
    (num, den)
}

/// f(X) (1 - X^k).
fn poly_mul_one_minus(f: &[BigInt], k: usize) -> Vec<BigInt> {
    let mut out = f.to_vec();
    out.resize(f.len() + k, BigInt::zero());
    for (i, c) in f.iter().enumerate() {
        out[i + k] -= c;
    }
    out
}

fn poly_mul(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_trim(mut f: Vec<BigInt>) -> Vec<BigInt> {
    while f.len() > 1 && f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    f
}

/// prod_{j mod d} (1 - zeta_d^j X)^{a_d(j)} against the rational form of
/// p_d, as power series over Q(zeta_48) through X^{4d}. Requires d | 48.
pub fn verify_pol(d: u64) -> Result<Check> {
    if d == 0 || 48 % d != 0 {
        return Err(Error::InvalidInput(format!("{d} does not divide 48")));
    }
    let len = 4 * d as usize + 1;
    let mut lhs = vec![CycNum::zero(); len];
    lhs[0] = CycNum::one();
    for j in 0..d as i64 {
        let a = a_coeff(d, j);
        let root = j * (48 / d as i64);
        for _ in 0..a.unsigned_abs() {
            if a > 0 {
                // f (1 - zeta X)
                for n in (1..len).rev() {
                    let t = lhs[n - 1].mul_root(root);
                    lhs[n] = lhs[n].clone() - t;
                }
            } else {
                // f / (1 - zeta X): g_n = f_n + zeta g_{n-1}
                for n in 1..len {
                    let t = lhs[n - 1].mul_root(root);
                    lhs[n] = lhs[n].clone() + t;
                }
            }
        }
    }
    let (num, den) = p_d_rational(d);
    let inv_den = univariate_inverse(&den, len);
    let mut rhs = poly_mul(&num, &inv_den);
    rhs.resize(len.max(rhs.len()), BigInt::zero());
    let name = format!("p_d product over roots of unity, d={d}");
    Ok(Check::first_failure(
        name,
        (0..len).filter_map(|n| {
            let r = CycNum::from_rational(BigRational::from_integer(rhs[n].clone()));
            (lhs[n] != r).then(|| format!("coefficient of X^{n}: {} vs {}", lhs[n], rhs[n]))
        }),
    ))
}

/// 1/f through X^{len-1} for f(0) = 1.
fn univariate_inverse(f: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(f[0].is_one(), "constant term must be 1");
    let mut g = vec![BigInt::zero(); len];
    g[0] = BigInt::one();
    for n in 1..len {
        let mut acc = BigInt::zero();
        for k in 1..=n.min(f.len() - 1) {
            acc -= &f[k] * &g[n - k];
        }
        g[n] = acc;
    }
    g
}

/// prod_{d | s} p_d(X^{s/d}) = (1 - X)^s as an identity of polynomials.
pub fn verify_pol2(s: u64) -> Check {
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in divisors(s) {
        let (n, m) = p_d_rational(d);
        num = poly_mul(&num, &substitute_power(&n, (s / d) as usize));
        den = poly_mul(&den, &substitute_power(&m, (s / d) as usize));
    }
    let mut target = vec![BigInt::one()];
    for _ in 0..s {
        target = poly_mul_one_minus(&target, 1);
    }
    let ok = poly_trim(num) == poly_trim(poly_mul(&target, &den));
    Check::expect(format!("p_d composition identity, s={s}"), ok, || "numerator differs from (1 - X)^s times denominator".into())
}

/// f(X^k).
fn substitute_power(f: &[BigInt], k: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); (f.len() - 1) * k + 1];
    for (i, c) in f.iter().enumerate() {
        out[i * k] = c.clone();
    }
    out
}

/// Every check of the Borcherds section at the given orders.
pub fn borcherds_suite(s_list: &[u32], eps_list: &[i32], order: u32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &s in s_list {
        for &eps in eps_list {
            checks.extend(blift_check(s, eps, order)?);
        }
    }
    Ok(checks)
}
