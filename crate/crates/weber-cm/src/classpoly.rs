//! Integer polynomials: certified class polynomials, characteristic
//! polynomials of root powers, resultants, and the exact left-hand sides
//! f_s(d1, d2) and J(d1, d2).

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::DiscriminantPair;
use crate::bigcomplex::{BigComplex, MAX_PREC};
use crate::error::{Error, Result};
use crate::modeval::{class_invariant, j_invariant};
use crate::quadratic::{cm_point, reduced_forms};

/// Dense integer polynomial, coefficients in ascending degree, no trailing
/// zeros (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// x^k.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 and must be handled by callers.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division of every coefficient by k.
    pub fn div_exact(&self, k: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "inexact coefficient division");
                    q
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, x: &BigComplex) -> BigComplex {
        let p = x.prec();
        self.coeffs
            .iter()
            .rev()
            .fold(BigComplex::zero(p), |acc, c| acc.mul(x).add(&BigComplex::from_bigint(c, p)))
    }

    /// Pseudo-remainder lc(b)^(deg a - deg b + 1) a mod b.
    pub fn prem(&self, b: &Self) -> Self {
        assert!(!b.is_zero(), "pseudo-division by zero");
        if self.is_zero() || self.degree() < b.degree() {
            return self.clone();
        }
        let db = b.degree();
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut e = self.degree() - db + 1;
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1;
            let lr = r[k].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[k - db + j] -= &lr * bc;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            e -= 1;
        }
        let mut out = Self::new(r);
        if e > 0 {
            out = out.scale(&num_traits::pow(lb, e));
        }
        out
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = !a.is_one() || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Resultant by the subresultant algorithm, normalized so that
/// Res(a, b) = lc(a)^deg(b) prod b(alpha) over the roots alpha of a.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let (mut a, mut b, mut s) = (a.clone(), b.clone(), BigInt::one());
    if a.degree() < b.degree() {
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree() == 0 {
        return s * num_traits::pow(b.lc(), a.degree());
    }
    let ca = a.content();
    let cb = b.content();
    a = a.div_exact(&ca);
    b = b.div_exact(&cb);
    let t = num_traits::pow(ca, b.degree()) * num_traits::pow(cb, a.degree());
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = a.degree() - b.degree();
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            s = -s;
        }
        let r = a.prem(&b);
        a = b;
        if r.is_zero() {
            return BigInt::zero();
        }
        let den = &g * num_traits::pow(h.clone(), delta);
        b = r.div_exact(&den);
        g = a.lc();
        // h <- h^(1 - delta) g^delta
        h = if delta == 0 {
            h
        } else {
            let num = num_traits::pow(g.clone(), delta);
            let d = num_traits::pow(h, delta - 1);
            let (q, rem) = num.div_rem(&d);
            assert!(rem.is_zero());
            q
        };
        if b.degree() == 0 {
            let da = a.degree();
            let num = num_traits::pow(b.lc(), da);
            let hh = if da == 0 {
                h.clone() * num
            } else {
                let d = num_traits::pow(h, da - 1);
                let (q, rem) = num.div_rem(&d);
                assert!(rem.is_zero());
                q
            };
            return s * t * hh;
        }
    }
}

/// prod (x - alpha_i^k) over the roots of the monic g, as Res_y(g(y), x - y^k)
/// interpolated at deg g + 1 integer points.
pub fn power_charpoly(g: &IntPoly, k: u32) -> IntPoly {
    assert!(g.is_monic(), "power_charpoly needs a monic polynomial");
    let n = g.degree();
    if k == 1 {
        return g.clone();
    }
    let yk = IntPoly::monomial(k as usize);
    let xs: Vec<BigInt> = (0..=n as i64).map(BigInt::from).collect();
    let ys: Vec<BigInt> = xs
        .iter()
        .map(|x| resultant(g, &IntPoly::constant(x.clone()).sub(&yk)))
        .collect();
    interpolate(&xs, &ys)
}

/// Lagrange interpolation; the result must have integer coefficients.
fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> IntPoly {
    let n = xs.len();
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in 0..n {
        // basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (t, c) in basis.iter().enumerate() {
                next[t + 1] += c;
                next[t] -= c * BigRational::from_integer(xs[j].clone());
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let w = BigRational::new(ys[i].clone(), denom);
        for (t, c) in basis.iter().enumerate() {
            acc[t] += c * &w;
        }
    }
    IntPoly::new(
        acc.into_iter()
            .map(|c| {
                assert!(c.is_integer(), "interpolated coefficient is not an integer");
                c.to_integer()
            })
            .collect(),
    )
}

/// Which modular function's values form the roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolyKind {
    Weber,
    Hilbert,
}

impl PolyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolyKind::Weber => "weber",
            PolyKind::Hilbert => "hilbert",
        }
    }
}

impl std::str::FromStr for PolyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weber" => Ok(PolyKind::Weber),
            "hilbert" => Ok(PolyKind::Hilbert),
            _ => Err(Error::InvalidInput(format!("unknown polynomial kind {s}"))),
        }
    }
}

/// The root values, one per class, in the order of `reduced_forms`.
pub fn class_values(d: i64, kind: PolyKind, prec: u32) -> Result<Vec<BigComplex>> {
    if kind == PolyKind::Weber && !crate::arith::is_admissible(d) {
        return Err(Error::Inadmissible(d));
    }
    if kind == PolyKind::Hilbert && !crate::arith::is_fundamental_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    reduced_forms(d)?
        .iter()
        .map(|f| match kind {
            PolyKind::Weber => class_invariant(f, prec),
            PolyKind::Hilbert => j_invariant(&cm_point(f, prec + 16).tau, prec),
        })
        .collect()
}

/// prod (x - r) with certified rounding of every coefficient, or None.
fn round_product(roots: &[BigComplex], prec: u32) -> Option<IntPoly> {
    let mut c = vec![BigComplex::one(prec)];
    for r in roots {
        let mut next = vec![BigComplex::zero(prec); c.len() + 1];
        for (t, v) in c.iter().enumerate() {
            next[t + 1] = next[t + 1].add(v);
            next[t] = next[t].sub(&v.mul(r));
        }
        c = next;
    }
    let coeffs: Option<Vec<BigInt>> = c.iter().map(|v| v.round_integer()).collect();
    coeffs.map(IntPoly::new)
}

/// Class polynomial at a fixed working precision.
pub fn class_polynomial_at(d: i64, kind: PolyKind, prec: u32) -> Result<Option<IntPoly>> {
    let roots = class_values(d, kind, prec)?;
    Ok(round_product(&roots, prec))
}

/// Class polynomial with adaptive precision: the rounding must be certified
/// and reproduced 64 bits higher.
pub fn class_polynomial_kind(d: i64, kind: PolyKind) -> Result<IntPoly> {
    let mut prec = 256;
    loop {
        if prec + 64 > MAX_PREC {
            return Err(Error::RoundingUncertified(prec));
        }
        if let Some(p) = class_polynomial_at(d, kind, prec)? {
            if class_polynomial_at(d, kind, prec + 64)?.as_ref() == Some(&p) {
                return Ok(p);
            }
        }
        prec *= 2;
    }
}

/// The Yui-Zagier class polynomial of an admissible discriminant.
pub fn class_polynomial(d: i64) -> Result<IntPoly> {
    class_polynomial_kind(d, PolyKind::Weber)
}

pub fn hilbert_class_polynomial(d: i64) -> Result<IntPoly> {
    class_polynomial_kind(d, PolyKind::Hilbert)
}

/// f_s(d1, d2) = |Res(h1, h2)| with h_j the charpoly of the (24/s)-th powers
/// of the class invariants of d_j.
pub fn yz_lhs(pair: &DiscriminantPair, s: u32) -> Result<BigInt> {
    yz_lhs_with(pair, s, &PolyCache::disabled())
}

pub fn yz_lhs_with(pair: &DiscriminantPair, s: u32, cache: &PolyCache) -> Result<BigInt> {
    pair.require_admissible()?;
    if 24 % s != 0 {
        return Err(Error::InvalidInput(format!("s = {s} does not divide 24")));
    }
    let g1 = cache.get(pair.d1, PolyKind::Weber)?;
    let g2 = cache.get(pair.d2, PolyKind::Weber)?;
    let h1 = power_charpoly(&g1, 24 / s);
    let h2 = power_charpoly(&g2, 24 / s);
    Ok(resultant(&h1, &h2).abs())
}

/// prod |alpha^(24/s) - beta^(24/s)| evaluated numerically from the class
/// invariants themselves.
pub fn yz_lhs_numeric(pair: &DiscriminantPair, s: u32, prec: u32) -> Result<BigComplex> {
    let k = 24 / s;
    let a = class_values(pair.d1, PolyKind::Weber, prec)?;
    let b = class_values(pair.d2, PolyKind::Weber, prec)?;
    let mut prod = BigComplex::one(prec);
    for x in &a {
        let xk = x.pow(k);
        for y in &b {
            prod = prod.mul(&xk.sub(&y.pow(k)));
        }
    }
    Ok(prod)
}

/// J(d1, d2) = |Res(H_d1, H_d2)| for w1 = w2 = 2.
pub fn gz_lhs(pair: &DiscriminantPair) -> Result<BigInt> {
    gz_lhs_with(pair, &PolyCache::disabled())
}

pub fn gz_lhs_with(pair: &DiscriminantPair, cache: &PolyCache) -> Result<BigInt> {
    if pair.d1 >= -4 || pair.d2 >= -4 {
        return Err(Error::InvalidInput("J needs d1, d2 < -4".into()));
    }
    let h1 = cache.get(pair.d1, PolyKind::Hilbert)?;
    let h2 = cache.get(pair.d2, PolyKind::Hilbert)?;
    Ok(resultant(&h1, &h2).abs())
}

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "WEBER_CM_CACHE";

/// On-disk cache of class polynomials, one file per (kind, d). The cache is
/// an accelerator only: a missing or malformed file is recomputed.
#[derive(Clone, Debug)]
pub struct PolyCache {
    dir: Option<PathBuf>,
}

impl PolyCache {
    pub fn disabled() -> Self {
        PolyCache { dir: None }
    }

    pub fn at(dir: impl AsRef<Path>) -> Self {
        PolyCache { dir: Some(dir.as_ref().to_path_buf()) }
    }

    /// The directory named by the environment override, else `default`.
    pub fn from_env(default: Option<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => PolyCache { dir: Some(PathBuf::from(v)) },
            _ => PolyCache { dir: default },
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(d: i64, kind: PolyKind) -> String {
        let h = Sha256::digest(format!("classpoly:{}:{d}", kind.name()).as_bytes());
        let hex: String = h.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("{}-{hex}.txt", kind.name())
    }

    fn read(&self, path: &Path, d: i64, kind: PolyKind) -> Option<IntPoly> {
        let text = std::fs::read_to_string(path).ok()?;
        let mut lines = text.lines();
        if lines.next()? != format!("# {} {d}", kind.name()) {
            return None;
        }
        let coeffs: Option<Vec<BigInt>> =
            lines.next()?.split_whitespace().map(|t| t.parse().ok()).collect();
        let p = IntPoly::new(coeffs?);
        (!p.is_zero()).then_some(p)
    }

    pub fn get(&self, d: i64, kind: PolyKind) -> Result<IntPoly> {
        let Some(dir) = &self.dir else {
            return class_polynomial_kind(d, kind);
        };
        let path = dir.join(Self::key(d, kind));
        if let Some(p) = self.read(&path, d, kind) {
            return Ok(p);
        }
        let p = class_polynomial_kind(d, kind)?;
        let body: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
        let text = format!("# {} {d}\n{}\n", kind.name(), body.join(" "));
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, text).map_err(|e| Error::Io(e.to_string()))?;
        Ok(p)
    }
}
