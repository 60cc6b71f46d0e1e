//! Evaluation of eta, the Weber functions, j and the class invariants, plus
//! the character chi of Gamma_0(2) computed from words in its generators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bigcomplex::BigComplex;
use crate::error::{Error, Result};
use crate::quadratic::{cm_point, epsilon_d, FormClass};

/// Guard bits added to every evaluation.
pub const GUARD: u32 = 64;

fn check_upper(tau: &BigComplex) -> Result<()> {
    if tau.im_f64() * (1.0 - 1e-12) - tau.err() <= 0.0 {
        return Err(Error::NotInUpperHalfPlane);
    }
    Ok(())
}

/// prod_{n >= 1} (1 - q^n) by the pentagonal number series, with the tail
/// bound 2|q|^g / (1 - |q|) folded into the error.
pub fn euler_product(q: &BigComplex) -> Result<BigComplex> {
    let qa = q.abs_upper();
    if qa >= 1.0 {
        return Err(Error::NotInUpperHalfPlane);
    }
    let prec = q.prec();
    let mut sum = BigComplex::one(prec);
    if qa == 0.0 {
        return Ok(sum);
    }
    let lq = qa.log2();
    let target = -(prec as f64) - 4.0;
    let slack = (2.0 / (1.0 - qa)).log2();
    let q3 = q.pow(3);
    // step = q^(3k-2), pos = q^(k(3k-1)/2), qk = q^k, pos * qk = q^(k(3k+1)/2)
    let mut step = q.clone();
    let mut pos = BigComplex::one(prec);
    let mut qk = BigComplex::one(prec);
    let mut k = 1u64;
    loop {
        if k > 1 {
            step = step.mul(&q3);
        }
        pos = pos.mul(&step);
        qk = qk.mul(q);
        let neg = pos.mul(&qk);
        let term = pos.add(&neg);
        sum = if k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        let g_next = ((k + 1) * (3 * k + 2) / 2) as f64;
        if g_next * lq + slack < target {
            return Ok(sum.with_err(2f64.powf(g_next * lq + slack)));
        }
        k += 1;
    }
}

/// The Dedekind eta function, after a T-translation of tau to |Re tau| <= 1/2.
pub fn eta(tau: &BigComplex, prec: u32) -> Result<BigComplex> {
    check_upper(tau)?;
    let w = prec + GUARD;
    let n = tau.re_f64().round() as i64;
    let t = tau.set_prec(w).sub(&BigComplex::from_int(n, w));
    let two_pi_i_t = BigComplex::pi(w).mul(&t).mul_int(2).mul_i();
    let q = two_pi_i_t.exp();
    let q24 = two_pi_i_t.div_int(24).exp();
    let v = q24.mul(&euler_product(&q)?);
    Ok(BigComplex::e_rational(n, 24, w).mul(&v).set_prec(prec))
}

/// The three Weber functions at one point.
#[derive(Clone, Debug)]
pub struct Weber {
    pub f: BigComplex,
    pub f1: BigComplex,
    pub f2: BigComplex,
}

pub fn weber(tau: &BigComplex, prec: u32) -> Result<Weber> {
    check_upper(tau)?;
    let w = prec + GUARD;
    let pi_i_t = BigComplex::pi(w).mul(&tau.set_prec(w)).mul_i();
    let qh = pi_i_t.exp();
    let q = qh.square();
    let q2 = q.square();
    let q48 = pi_i_t.div_int(24).exp();
    let eh = euler_product(&qh)?;
    let e1 = euler_product(&q)?;
    let e2 = euler_product(&q2)?;
    let f = e1.square().div(&q48.mul(&eh).mul(&e2))?;
    let f1 = eh.div(&q48.mul(&e1))?;
    let f2 = BigComplex::sqrt_int(2, w).mul(&q48.square()).mul(&e2).div(&e1)?;
    Ok(Weber { f: f.set_prec(prec), f1: f1.set_prec(prec), f2: f2.set_prec(prec) })
}

/// j = (f2^24 + 16)^3 / f2^24.
pub fn j_invariant(tau: &BigComplex, prec: u32) -> Result<BigComplex> {
    let w = prec + GUARD;
    let x = weber(tau, w)?.f2.pow(24);
    let y = x.add(&BigComplex::from_int(16, w)).pow(3);
    Ok(y.div(&x)?.set_prec(prec))
}

/// The Yui-Zagier class invariant attached to a form of discriminant
/// d = 1 mod 8, 3 not dividing d. For odd a the root of unity is
/// zeta_48^(b(a - c + a^2 c)); this is the exponent that makes the value
/// independent of the representative.
pub fn class_invariant(form: &FormClass, prec: u32) -> Result<BigComplex> {
    let d = form.disc();
    if d.rem_euclid(8) != 1 || d % 3 == 0 {
        return Err(Error::Inadmissible(d));
    }
    let w = prec + GUARD;
    let tau = cm_point(form, w).tau;
    let wb = weber(&tau, w)?;
    let (a, b, c) = (form.a as i128, form.b as i128, form.c as i128);
    let eps = epsilon_d(d)? as i64;
    let (exp, sign, val) = if a % 2 == 0 && c % 2 == 0 {
        (b * (a - c - a * c * c), 1, wb.f)
    } else if a % 2 == 0 {
        (b * (a - c - a * c * c), eps, wb.f1)
    } else {
        (b * (a - c + a * a * c), eps, wb.f2)
    };
    let k = exp.rem_euclid(48) as i64;
    let zeta = BigComplex::e_rational(k, 48, w);
    Ok(zeta.mul(&val).mul_int(sign).set_prec(prec))
}

/// An element (a b; c d) of Gamma_0(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gamma02Element {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Generators of Gamma_0(2): T^n, B^n with B = (1 0; -2 1), and -I.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    T(i64),
    B(i64),
    NegI,
}

impl Gamma02Element {
    pub const IDENTITY: Self = Gamma02Element { a: 1, b: 0, c: 0, d: 1 };
    pub const T: Self = Gamma02Element { a: 1, b: 1, c: 0, d: 1 };
    pub const B: Self = Gamma02Element { a: 1, b: 0, c: -2, d: 1 };
    pub const NEG_I: Self = Gamma02Element { a: -1, b: 0, c: 0, d: -1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 || c % 2 != 0 {
            return Err(Error::NotInGamma02);
        }
        Ok(Gamma02Element { a, b, c, d })
    }

    pub fn mul(&self, o: &Self) -> Self {
        Gamma02Element {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Gamma02Element { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn gen(g: Gen) -> Self {
        match g {
            Gen::T(n) => Gamma02Element { a: 1, b: n, c: 0, d: 1 },
            Gen::B(n) => Gamma02Element { a: 1, b: 0, c: -2 * n, d: 1 },
            Gen::NegI => Self::NEG_I,
        }
    }

    /// Moebius action on the upper half plane.
    pub fn act(&self, tau: &BigComplex) -> Result<BigComplex> {
        let num = tau.mul_int(self.a).add(&BigComplex::from_int(self.b, tau.prec()));
        let den = tau.mul_int(self.c).add(&BigComplex::from_int(self.d, tau.prec()));
        num.div(&den)
    }
}

impl fmt::Display for Gamma02Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

pub fn word_product(word: &[Gen]) -> Gamma02Element {
    word.iter()
        .fold(Gamma02Element::IDENTITY, |acc, &g| acc.mul(&Gamma02Element::gen(g)))
}

/// Nearest integer to n/d.
fn round_div(n: i64, d: i64) -> i64 {
    let (n, d) = if d < 0 { (-(n as i128), -(d as i128)) } else { (n as i128, d as i128) };
    (2 * n + d).div_euclid(2 * d) as i64
}

/// Write g as a word in T, B and -I by Euclidean reduction of its bottom row.
pub fn gamma02_decompose(g: &Gamma02Element) -> Result<Vec<Gen>> {
    let g = Gamma02Element::new(g.a, g.b, g.c, g.d)?;
    let mut h = g;
    let mut right = Vec::new();
    while h.c != 0 {
        let n = -round_div(h.d, h.c);
        if n != 0 {
            h = h.mul(&Gamma02Element::gen(Gen::T(n)));
            right.push(Gen::T(n));
        }
        let n = round_div(h.c, 2 * h.d);
        if n != 0 {
            h = h.mul(&Gamma02Element::gen(Gen::B(n)));
            right.push(Gen::B(n));
        }
    }
    // now h = a (1 ab; 0 1) with a = +-1
    let mut word = Vec::new();
    if h.a == -1 {
        word.push(Gen::NegI);
    }
    let m = h.a * h.b;
    if m != 0 {
        word.push(Gen::T(m));
    }
    for g in right.iter().rev() {
        word.push(match *g {
            Gen::T(n) => Gen::T(-n),
            Gen::B(n) => Gen::B(-n),
            Gen::NegI => Gen::NegI,
        });
    }
    debug_assert_eq!(word_product(&word), g);
    Ok(word)
}

/// e with chi(g) = zeta_24^e, from chi(T) = zeta_24, chi(B) = zeta_24^-1 and
/// chi(-I) = 1.
pub fn chi_exponent(g: &Gamma02Element) -> Result<u32> {
    let word = gamma02_decompose(g)?;
    let e: i64 = word
        .iter()
        .map(|w| match *w {
            Gen::T(n) => n,
            Gen::B(n) => -n,
            Gen::NegI => 0,
        })
        .sum();
    Ok(e.rem_euclid(24) as u32)
}

/// F_d = sqrt(2)^(24/d) (f2^(-24/d), f1^(-24/d), f^(-24/d)) for d | 24.
pub fn f_d_vector(d: u32, tau: &BigComplex, prec: u32) -> Result<[BigComplex; 3]> {
    assert!(24 % d == 0, "d must divide 24");
    let w = prec + GUARD;
    let k = (24 / d) as i32;
    let wb = weber(tau, w)?;
    let s = BigComplex::sqrt_int(2, w).pow(k as u32);
    let comp = |x: &BigComplex| -> Result<BigComplex> { Ok(s.mul(&x.powi(-k)?).set_prec(prec)) };
    Ok([comp(&wb.f2)?, comp(&wb.f1)?, comp(&wb.f)?])
}

/// varrho_d(T) applied to a vector.
pub fn varrho_t(d: u32, v: &[BigComplex; 3]) -> [BigComplex; 3] {
    let p = v[0].prec();
    let z = BigComplex::e_rational(-1, d as i64, p);
    let z2 = BigComplex::e_rational(1, 2 * d as i64, p);
    [z.mul(&v[0]), z2.mul(&v[2]), z2.mul(&v[1])]
}

/// varrho_d(S) applied to a vector.
pub fn varrho_s(v: &[BigComplex; 3]) -> [BigComplex; 3] {
    [v[1].clone(), v[0].clone(), v[2].clone()]
}
