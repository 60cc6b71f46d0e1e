//! Reduced binary quadratic forms of negative discriminant and their CM points.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bigcomplex::BigComplex;
use crate::error::{Error, Result};

/// The form ax^2 + bxy + cy^2, standing for the ideal [a, (-b + sqrt d)/2].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormClass {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl FormClass {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a <= 0 || b * b - 4 * a * c >= 0 {
            return Err(Error::InvalidInput(format!(
                "({a}, {b}, {c}) is not a positive definite form"
            )));
        }
        Ok(FormClass { a, b, c })
    }

    /// Build from a and b, solving for c.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Result<Self> {
        let n = b * b - d;
        if a <= 0 || n % (4 * a) != 0 {
            return Err(Error::InvalidInput(format!("no form ({a}, {b}, *) of discriminant {d}")));
        }
        Self::new(a, b, n / (4 * a))
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The equivalent form under x -> x + n y.
    pub fn translate(&self, n: i64) -> Self {
        let (a, b, c) = (self.a, self.b, self.c);
        FormClass { a, b: b + 2 * a * n, c: c + b * n + a * n * n }
    }

    /// The equivalent form under (x, y) -> (-y, x).
    pub fn flip(&self) -> Self {
        FormClass { a: self.c, b: -self.b, c: self.a }
    }

    /// The reduced form in the same proper equivalence class.
    pub fn reduce(&self) -> Self {
        let mut f = *self;
        loop {
            if f.b.abs() > f.a {
                let n = (f.a - f.b).div_euclid(2 * f.a);
                f = f.translate(n);
            } else if f.a > f.c {
                f = f.flip();
            } else {
                break;
            }
        }
        if (f.b.abs() == f.a || f.a == f.c) && f.b < 0 {
            f = if f.a == f.c { f.flip() } else { f.translate(1) };
        }
        f
    }
}

/// A CM point tau = (-b + i sqrt|d|)/(2a) together with its form.
#[derive(Clone, Debug)]
pub struct CmPoint {
    pub tau: BigComplex,
    pub source: FormClass,
}

/// One reduced primitive form per class, ordered lexicographically by (a, b).
pub fn reduced_forms(d: i64) -> Result<Vec<FormClass>> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(FormClass { a, b, c });
        }
        a += 1;
    }
    if d.rem_euclid(8) == 1 {
        for f in &out {
            assert!(f.a % 2 == 0 || f.c % 2 == 0, "form {f:?} escapes the parity cases");
        }
    }
    Ok(out)
}

/// epsilon_d = (-1)^((d-1)/8).
pub fn epsilon_d(d: i64) -> Result<i32> {
    if d.rem_euclid(8) != 1 {
        return Err(Error::NotOneMod8(d));
    }
    Ok(if ((d - 1) / 8).rem_euclid(2) == 0 { 1 } else { -1 })
}

pub fn cm_point(f: &FormClass, prec: u32) -> CmPoint {
    let d = f.disc();
    let re = BigComplex::from_ratio(-f.b, 2 * f.a, prec);
    let im = BigComplex::sqrt_int(d.unsigned_abs(), prec).div_int(2 * f.a).mul_i();
    CmPoint { tau: re.add(&im), source: *f }
}
