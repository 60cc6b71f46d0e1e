//! Exact arithmetic in Q(zeta_48).
//!
//! Elements are stored in the power basis 1, z, ..., z^15 modulo the 48th
//! cyclotomic polynomial z^16 - z^8 + 1, with z = exp(2 pi i / 48).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const DEG: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    c: [BigRational; DEG],
}

fn reduce_into(buf: &mut [BigRational]) {
    // z^k = z^(k-8) - z^(k-16) for k >= 16
    for k in (DEG..buf.len()).rev() {
        if buf[k].is_zero() {
            continue;
        }
        let v = std::mem::replace(&mut buf[k], BigRational::zero());
        buf[k - 8] += &v;
        buf[k - 16] -= v;
    }
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum { c: std::array::from_fn(|_| BigRational::zero()) }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut x = Self::zero();
        x.c[0] = r;
        x
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// Build from integer coefficients of z^0..z^{n-1} (any n), reducing.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut buf: Vec<BigRational> = coeffs
            .iter()
            .map(|&v| BigRational::from_integer(v.into()))
            .collect();
        if buf.len() < DEG {
            buf.resize(DEG, BigRational::zero());
        }
        // reduce exponents >= 24 with z^24 = -1 first
        let mut k = buf.len();
        while k > 24 {
            k -= 1;
            let v = std::mem::replace(&mut buf[k], BigRational::zero());
            let target = k - 24;
            buf[target] -= v;
        }
        buf.truncate(k.max(DEG));
        reduce_into(&mut buf);
        CycNum { c: std::array::from_fn(|i| buf[i].clone()) }
    }

    /// zeta_48^k.
    pub fn root_of_unity(k: i64) -> Self {
        let k = k.rem_euclid(48) as usize;
        let (k, sign) = if k >= 24 { (k - 24, -1) } else { (k, 1) };
        let mut buf = vec![0i64; 24];
        buf[k] = sign;
        Self::from_coeffs(&buf)
    }

    /// Multiplication by zeta_48^k as a coefficient shift.
    pub fn mul_root(&self, k: i64) -> Self {
        let k = k.rem_euclid(48) as usize;
        let (k, negate) = if k >= 24 { (k - 24, true) } else { (k, false) };
        let mut buf = vec![BigRational::zero(); (DEG + k).max(24)];
        for (i, v) in self.c.iter().enumerate() {
            buf[i + k] = if negate { -v } else { v.clone() };
        }
        for i in (24..buf.len()).rev() {
            let v = std::mem::replace(&mut buf[i], BigRational::zero());
            buf[i - 24] -= v;
        }
        buf.truncate(24);
        reduce_into(&mut buf);
        CycNum { c: std::array::from_fn(|i| buf[i].clone()) }
    }

    /// e(x) = exp(2 pi i x) for x = num/den with den dividing 48.
    pub fn e(num: i64, den: i64) -> Self {
        assert!(den > 0 && 48 % den == 0, "e(x): denominator must divide 48");
        Self::root_of_unity(num * (48 / den))
    }

    pub fn coeffs(&self) -> &[BigRational; DEG] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycNum { c: std::array::from_fn(|i| &self.c[i] * r) }
    }

    /// Rational value if the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn to_integer(&self) -> Option<i64> {
        let r = self.to_rational()?;
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Complex conjugation z -> z^{-1}.
    pub fn conj(&self) -> Self {
        let mut acc = Self::zero();
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                acc = acc + Self::root_of_unity(-(k as i64)).scale(v);
            }
        }
        acc
    }

    /// Value under the embedding z -> exp(2 pi i / 48).
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, v) in self.c.iter().enumerate() {
            let x = v.to_f64().unwrap_or(f64::NAN);
            let t = std::f64::consts::PI * k as f64 / 24.0;
            re += x * t.cos();
            im += x * t.sin();
        }
        (re, im)
    }

    /// Multiplicative inverse via the norm to Q: x^{-1} = (prod of the other
    /// conjugates) / N(x).
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut others = Self::one();
        for u in [5i64, 7, 11, 13, 17, 19, 23, 25, 29, 31, 35, 37, 41, 43, 47] {
            others = others * self.galois(u);
        }
        let n = (self.clone() * others.clone()).to_rational()?;
        Some(others.scale(&(BigRational::one() / n)))
    }

    /// The Galois automorphism z -> z^u for u coprime to 48.
    pub fn galois(&self, u: i64) -> Self {
        let mut acc = Self::zero();
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                acc = acc + Self::root_of_unity(u * k as i64).scale(v);
            }
        }
        acc
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, o: CycNum) -> CycNum {
        CycNum { c: std::array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, o: CycNum) -> CycNum {
        CycNum { c: std::array::from_fn(|i| &self.c[i] - &o.c[i]) }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum { c: std::array::from_fn(|i| -&self.c[i]) }
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, o: CycNum) -> CycNum {
        let mut buf: Vec<BigRational> = vec![BigRational::zero(); 2 * DEG - 1];
        for i in 0..DEG {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..DEG {
                if !o.c[j].is_zero() {
                    buf[i + j] += &self.c[i] * &o.c[j];
                }
            }
        }
        reduce_into(&mut buf);
        CycNum { c: std::array::from_fn(|i| buf[i].clone()) }
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if v.is_negative() { '-' } else { '+' })?;
            } else if v.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = v.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "z^{k}")?,
                _ => write!(f, "{a}*z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Integer element of Z[x]/(x^24 + 1), which surjects onto Z[zeta_48].
/// Used for dense vectors where only root-of-unity multiples are needed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct ZCyc(pub [i64; 24]);

impl ZCyc {
    pub const ZERO: ZCyc = ZCyc([0; 24]);

    pub fn from_int(n: i64) -> Self {
        let mut z = Self::ZERO;
        z.0[0] = n;
        z
    }

    pub fn is_zero_raw(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// self += v * zeta_48^k.
    #[inline]
    pub fn add_rotated(&mut self, v: &ZCyc, k: usize) {
        let k = k % 48;
        let (k, neg) = if k >= 24 { (k - 24, true) } else { (k, false) };
        for i in 0..24 {
            let x = v.0[i];
            if x == 0 {
                continue;
            }
            let mut j = i + k;
            let mut s = neg;
            if j >= 24 {
                j -= 24;
                s = !s;
            }
            if s {
                self.0[j] -= x;
            } else {
                self.0[j] += x;
            }
        }
    }

    /// self += n * zeta_48^k for an integer n.
    #[inline]
    pub fn add_int_rotated(&mut self, n: i64, k: usize) {
        let k = k % 48;
        if k >= 24 {
            self.0[k - 24] -= n;
        } else {
            self.0[k] += n;
        }
    }

    pub fn rotate(&self, k: usize) -> ZCyc {
        let mut out = ZCyc::ZERO;
        out.add_rotated(self, k);
        out
    }

    pub fn scale(&self, n: i64) -> ZCyc {
        let mut out = *self;
        for x in out.0.iter_mut() {
            *x = x.checked_mul(n).expect("ZCyc overflow");
        }
        out
    }

    pub fn add(&self, o: &ZCyc) -> ZCyc {
        ZCyc(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn sub(&self, o: &ZCyc) -> ZCyc {
        ZCyc(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }

    pub fn mul(&self, o: &ZCyc) -> ZCyc {
        let mut out = ZCyc::ZERO;
        for (k, &x) in self.0.iter().enumerate() {
            if x != 0 {
                out.add_rotated(&o.scale(x), k);
            }
        }
        out
    }

    /// Complex conjugate, zeta_48^k -> zeta_48^-k.
    pub fn conj(&self) -> ZCyc {
        let mut out = ZCyc::ZERO;
        for (k, &x) in self.0.iter().enumerate() {
            out.add_int_rotated(x, (48 - k) % 48);
        }
        out
    }

    /// Canonical coefficients modulo the 48th cyclotomic polynomial.
    pub fn canonical(&self) -> [i64; 16] {
        let mut buf = self.0;
        for k in (16..24).rev() {
            let v = buf[k];
            if v != 0 {
                buf[k] = 0;
                buf[k - 8] += v;
                buf[k - 16] -= v;
            }
        }
        std::array::from_fn(|i| buf[i])
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(|&x| x == 0)
    }

    pub fn content(&self) -> i64 {
        use num_integer::Integer;
        self.canonical().iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn to_cycnum(&self) -> CycNum {
        CycNum::from_coeffs(&self.canonical())
    }

    pub fn from_cycnum(c: &CycNum) -> Option<ZCyc> {
        let mut z = ZCyc::ZERO;
        for (i, v) in c.coeffs().iter().enumerate() {
            if !v.is_integer() {
                return None;
            }
            z.0[i] = v.to_integer().to_i64()?;
        }
        Some(z)
    }
}

pub fn bigrat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
