//! Fixed-point complex numbers with a certified absolute error bound.
//!
//! A value is `(re + i im) / 2^prec` with integer mantissas; `err` bounds the
//! distance to the exact quantity being approximated. Every operation
//! propagates the bound conservatively, including the rounding it performs.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported precision. Error bounds are kept in f64, so 2^-prec must
/// stay a normal double.
pub const MAX_PREC: u32 = 1000;

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    re: BigInt,
    im: BigInt,
    prec: u32,
    err: f64,
}

/// Inflate an f64 bound to absorb rounding in the bound computation itself.
fn up(x: f64) -> f64 {
    x * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

/// x * 2^e without intermediate overflow for |e| up to a few thousand.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// m / 2^prec as f64.
fn scaled_f64(m: &BigInt, prec: u32) -> f64 {
    let bits = m.bits() as i64;
    if bits <= 60 {
        return ldexp(m.to_f64().unwrap(), -(prec as i64));
    }
    let sh = bits - 60;
    ldexp((m >> sh as usize).to_f64().unwrap(), sh - prec as i64)
}

fn ulp(prec: u32) -> f64 {
    ldexp(1.0, -(prec as i64))
}

/// Round-to-nearest right shift.
fn shr_round(m: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (k - 1) as usize;
    (m + half) >> k as usize
}

/// Round-to-nearest integer division.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if (r * 2u32).abs() >= d.abs() {
        q + BigInt::one()
    } else {
        q
    }
}

impl BigComplex {
    pub fn from_parts(re: BigInt, im: BigInt, prec: u32, err: f64) -> Self {
        assert!(prec <= MAX_PREC, "precision {prec} exceeds {MAX_PREC}");
        BigComplex { re, im, prec, err }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::zero(), prec, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::one() << prec as usize, prec, 0.0)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        Self::from_parts(n << prec as usize, BigInt::zero(), prec, 0.0)
    }

    /// num / den rounded to the nearest ulp.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        assert!(den != 0);
        let n = BigInt::from(num) << prec as usize;
        let q = div_round(&n, &BigInt::from(den));
        Self::from_parts(q, BigInt::zero(), prec, ulp(prec))
    }

    /// Nearest fixed-point value to an f64; the f64 itself is taken as exact.
    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let conv = |x: f64| -> BigInt {
            let (m, e) = decompose(x);
            let sh = e + prec as i64;
            if sh >= 0 {
                m << sh as usize
            } else {
                shr_round(&m, (-sh) as u32)
            }
        };
        Self::from_parts(conv(re), conv(im), prec, ulp(prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn re_f64(&self) -> f64 {
        scaled_f64(&self.re, self.prec)
    }

    pub fn im_f64(&self) -> f64 {
        scaled_f64(&self.im, self.prec)
    }

    pub fn re_mantissa(&self) -> &BigInt {
        &self.re
    }

    pub fn im_mantissa(&self) -> &BigInt {
        &self.im
    }

    /// Upper bound on the modulus of the stored center.
    pub fn center_abs(&self) -> f64 {
        up(self.re_f64().hypot(self.im_f64()))
    }

    /// Upper bound on the modulus of the exact value.
    pub fn abs_upper(&self) -> f64 {
        up(self.center_abs() + self.err)
    }

    /// Lower bound on the modulus of the exact value (0 if undetermined).
    pub fn abs_lower(&self) -> f64 {
        let c = self.re_f64().hypot(self.im_f64()) * (1.0 - 1e-12);
        (c - self.err).max(0.0)
    }

    /// Upper bound on |self - other| for the exact values.
    pub fn dist_upper(&self, other: &Self) -> f64 {
        self.sub(other).abs_upper()
    }

    pub fn with_err(mut self, extra: f64) -> Self {
        self.err = up(self.err + extra);
        self
    }

    pub fn set_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            let sh = (prec - self.prec) as usize;
            Self::from_parts(&self.re << sh, &self.im << sh, prec, self.err)
        } else {
            let sh = self.prec - prec;
            Self::from_parts(
                shr_round(&self.re, sh),
                shr_round(&self.im, sh),
                prec,
                up(self.err + ulp(prec)),
            )
        }
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        if self.prec == o.prec {
            (self.clone(), o.clone())
        } else {
            let p = self.prec.min(o.prec);
            (self.set_prec(p), o.set_prec(p))
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self::from_parts(&a.re + &b.re, &a.im + &b.im, a.prec, up(a.err + b.err))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        Self::from_parts(&a.re - &b.re, &a.im - &b.im, a.prec, up(a.err + b.err))
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-&self.re, -&self.im, self.prec, self.err)
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.re.clone(), -&self.im, self.prec, self.err)
    }

    /// Multiplication by i is exact.
    pub fn mul_i(&self) -> Self {
        Self::from_parts(-&self.im, self.re.clone(), self.prec, self.err)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.align(o);
        let p = a.prec;
        let re = &a.re * &b.re - &a.im * &b.im;
        let im = &a.re * &b.im + &a.im * &b.re;
        let err = a.center_abs() * b.err + b.center_abs() * a.err + a.err * b.err + ulp(p);
        Self::from_parts(shr_round(&re, p), shr_round(&im, p), p, up(err))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Self::from_parts(
            &self.re * n,
            &self.im * n,
            self.prec,
            up(self.err * n.unsigned_abs() as f64),
        )
    }

    /// Exact multiplication by 2^k.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if k >= 0 {
            Self::from_parts(
                &self.re << k as usize,
                &self.im << k as usize,
                self.prec,
                up(ldexp(self.err, k as i64)),
            )
        } else {
            let k = (-k) as u32;
            Self::from_parts(
                shr_round(&self.re, k),
                shr_round(&self.im, k),
                self.prec,
                up(ldexp(self.err, -(k as i64)) + ulp(self.prec)),
            )
        }
    }

    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0);
        let d = BigInt::from(n);
        Self::from_parts(
            div_round(&self.re, &d),
            div_round(&self.im, &d),
            self.prec,
            up(self.err / n.unsigned_abs() as f64 + ulp(self.prec)),
        )
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let (a, b) = self.align(o);
        let p = a.prec;
        let bc = b.re_f64().hypot(b.im_f64()) * (1.0 - 1e-12);
        if bc <= b.err {
            return Err(Error::InvalidInput("division by a value not bounded away from zero".into()));
        }
        let n = &b.re * &b.re + &b.im * &b.im;
        let re = (&a.re * &b.re + &a.im * &b.im) << p as usize;
        let im = (&a.im * &b.re - &a.re * &b.im) << p as usize;
        let qabs = up(a.center_abs() / bc);
        let err = (a.err + qabs * b.err) / (bc - b.err) + ulp(p);
        Ok(Self::from_parts(div_round(&re, &n), div_round(&im, &n), p, up(err)))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one(self.prec).div(self)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.prec);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        result
    }

    pub fn powi(&self, k: i32) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            self.pow(k.unsigned_abs()).recip()
        }
    }

    /// sqrt(n) for a nonnegative integer.
    pub fn sqrt_int(n: u64, prec: u32) -> Self {
        let m = (BigInt::from(n) << (2 * prec) as usize).sqrt();
        Self::from_parts(m, BigInt::zero(), prec, ulp(prec))
    }

    /// Principal square root of a value whose center is real and positive.
    pub fn sqrt_real(&self) -> Result<Self> {
        if !self.im.is_zero() || self.re.sign() != Sign::Plus {
            return Err(Error::InvalidInput("sqrt_real needs a positive real center".into()));
        }
        let x = self.re_f64() * (1.0 - 1e-12);
        if x <= self.err {
            return Err(Error::InvalidInput("sqrt_real argument not bounded away from 0".into()));
        }
        let m = (&self.re << self.prec as usize).sqrt();
        let err = self.err / (x - self.err).sqrt() + ulp(self.prec);
        Ok(Self::from_parts(m, BigInt::zero(), self.prec, up(err)))
    }

    /// pi to the given precision.
    pub fn pi(prec: u32) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<u32, BigComplex>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().unwrap().get(&prec) {
            return v.clone();
        }
        let w = prec + 32;
        let (a5, n5) = atan_inv(5, w);
        let (a239, n239) = atan_inv(239, w);
        let m = a5 * 16 - a239 * 4;
        let err_units = 16.0 * (3.0 * n5 as f64 + 4.0) + 4.0 * (3.0 * n239 as f64 + 4.0);
        let v = Self::from_parts(m, BigInt::zero(), w, up(ldexp(err_units, -(w as i64))))
            .set_prec(prec);
        cache.lock().unwrap().insert(prec, v.clone());
        v
    }

    /// exp(z) via Taylor series on z/2^k followed by k squarings.
    pub fn exp(&self) -> Self {
        let r = self.abs_upper();
        let k = if r <= 1.0 / 256.0 {
            0
        } else {
            (r.log2().ceil() as i64 + 8).max(0) as u32
        };
        let w = (self.prec + 32 + k).min(MAX_PREC).max(self.prec);
        let z = self.set_prec(w).mul_pow2(-(k as i32));
        let rz = z.abs_upper();
        let mut sum = Self::one(w);
        let mut term = Self::one(w);
        let mut n = 1i64;
        // after including terms up to n-1, the tail is at most 2 rz^n / n!
        let mut tail_bound = 2.0 * rz;
        loop {
            term = term.mul(&z).div_int(n);
            sum = sum.add(&term);
            n += 1;
            tail_bound *= rz / n as f64;
            if tail_bound < ulp(w) / 4.0 || rz == 0.0 {
                break;
            }
        }
        let mut v = sum.with_err(tail_bound);
        for _ in 0..k {
            v = v.square();
        }
        v.set_prec(self.prec)
    }

    /// exp(2 pi i x) for the exact rational x = num/den.
    pub fn e_rational(num: i64, den: i64, prec: u32) -> Self {
        let w = prec + 16;
        let x = Self::from_ratio(2 * num.rem_euclid(den), den, w);
        Self::pi(w).mul(&x).mul_i().exp().set_prec(prec)
    }

    /// Certified nearest Gaussian integer: requires every coordinate to be
    /// within 1/4 of an integer, counting the error bound.
    pub fn round_gaussian(&self) -> Option<(BigInt, BigInt)> {
        let quarter = 0.25;
        let round = |m: &BigInt| -> (BigInt, f64) {
            let n = shr_round(m, self.prec);
            let diff = m - (&n << self.prec as usize);
            (n, scaled_f64(&diff, self.prec).abs())
        };
        let (nr, dr) = round(&self.re);
        let (ni, di) = round(&self.im);
        if up(dr + self.err) < quarter && up(di + self.err) < quarter {
            Some((nr, ni))
        } else {
            None
        }
    }

    /// Certified nearest rational integer.
    pub fn round_integer(&self) -> Option<BigInt> {
        match self.round_gaussian()? {
            (n, i) if i.is_zero() => Some(n),
            _ => None,
        }
    }
}

/// x = m * 2^e with integer m.
fn decompose(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    (BigInt::from(m) * sign, e)
}

/// atan(1/x) * 2^w, truncated, with the number of series terms used.
fn atan_inv(x: u64, w: u32) -> (BigInt, usize) {
    let x2 = BigInt::from(x * x);
    let mut p = (BigInt::one() << w as usize) / x;
    let mut sum = BigInt::zero();
    let mut n = 0usize;
    while !p.is_zero() {
        let t = &p / (2 * n as u64 + 1);
        if n % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        p = &p / &x2;
        n += 1;
    }
    (sum, n)
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.20e} {:+.20e}i ± {:.3e})",
            self.re_f64(),
            self.im_f64(),
            self.err
        )
    }
}
