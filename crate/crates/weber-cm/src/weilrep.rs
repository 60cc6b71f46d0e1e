//! Weil representation on the discriminant modules A_d = L_d'/L_d of the
//! lattices L_d = {(a b; 2c d)} with quadratic form d·det, for d | 24.
//!
//! Coordinates are h = [h0, h1, h2, h3] with h0, h3 mod d and h1, h2 mod 2d,
//! and Q_d(h) = (2 h0 h3 - h1 h2) / 2d. Vectors in C[A_d] are dense arrays of
//! integers in Z[zeta_48] over a common denominator, which keeps every
//! operation exact: phases lie in (1/48)Z/Z and 1/sqrt|A_d| = 1/(2d^2).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_integer::Integer;

use crate::arith::{a_coeff, euler_phi, inv_mod, p_part};
use crate::cyclo::{CycNum, ZCyc};
use crate::modeval::{chi_exponent, Gamma02Element};
use crate::report::Check;
use crate::{Error, Result};

pub type Elem = [u32; 4];

/// Largest module materialized densely (A_12 has 82944 elements, A_24 has 1327104).
pub const DENSE_LIMIT: usize = 100_000;

/// Z/n0 x Z/n1 x Z/n2 x Z/n3 with Q(h) = c (2 h0 h3 - h1 h2) / den.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fqm {
    pub shape: [u32; 4],
    pub den: u32,
    pub c: u32,
}

impl Fqm {
    pub fn global(d: u32) -> Self {
        Fqm { shape: [d, 2 * d, 2 * d, d], den: 2 * d, c: 1 }
    }

    /// The 2-primary part A_{d,2}. Under reduction of coordinates the form
    /// acquires the factor d_3^{-1} mod 2 d_2.
    pub fn two_part(d: u32) -> Self {
        let (d2, d3) = split(d);
        let c = inv_mod(d3 as i64, 2 * d2 as i64).expect("d_3 is odd") as u32;
        Fqm { shape: [d2, 2 * d2, 2 * d2, d2], den: 2 * d2, c }
    }

    /// The 3-primary part A_{d,3}, with factor (2 d_2)^{-1} mod 3; trivial if 3 ∤ d.
    pub fn three_part(d: u32) -> Self {
        let (d2, d3) = split(d);
        if d3 == 1 {
            return Fqm { shape: [1; 4], den: 1, c: 0 };
        }
        let c = inv_mod(2 * d2 as i64, 3).expect("coprime") as u32;
        Fqm { shape: [3; 4], den: 3, c }
    }

    pub fn size(&self) -> usize {
        self.shape.iter().map(|&n| n as usize).product()
    }

    /// sqrt|A|, an integer since the shape is symmetric.
    pub fn sqrt_order(&self) -> i64 {
        self.shape[0] as i64 * self.shape[1] as i64
    }

    pub fn reduce(&self, h: [i64; 4]) -> Elem {
        std::array::from_fn(|i| h[i].rem_euclid(self.shape[i] as i64) as u32)
    }

    pub fn index(&self, h: &Elem) -> usize {
        let s = self.shape.map(|n| n as usize);
        ((h[0] as usize * s[1] + h[1] as usize) * s[2] + h[2] as usize) * s[3] + h[3] as usize
    }

    pub fn elem(&self, mut i: usize) -> Elem {
        let mut h = [0u32; 4];
        for k in (0..4).rev() {
            let n = self.shape[k] as usize;
            h[k] = (i % n) as u32;
            i /= n;
        }
        h
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size()).map(|i| self.elem(i))
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        std::array::from_fn(|i| (x[i] + y[i]) % self.shape[i])
    }

    pub fn neg(&self, h: &Elem) -> Elem {
        std::array::from_fn(|i| (self.shape[i] - h[i]) % self.shape[i])
    }

    pub fn scale(&self, s: i64, h: &Elem) -> Elem {
        self.reduce(h.map(|x| s * x as i64))
    }

    /// Q(h) = q_num(h) / den mod 1.
    pub fn q_num(&self, h: &Elem) -> u32 {
        let den = self.den as i64;
        let x = 2 * h[0] as i64 * h[3] as i64 - h[1] as i64 * h[2] as i64;
        (self.c as i64 * x).rem_euclid(den) as u32
    }

    /// (x, y) = Q(x + y) - Q(x) - Q(y) = b_num / den mod 1.
    pub fn b_num(&self, x: &Elem, y: &Elem) -> u32 {
        let den = self.den as i64;
        let v = 2 * x[0] as i64 * y[3] as i64 + 2 * x[3] as i64 * y[0] as i64
            - x[1] as i64 * y[2] as i64
            - x[2] as i64 * y[1] as i64;
        (self.c as i64 * v).rem_euclid(den) as u32
    }

    /// Exponent k with e(num/den) = zeta_48^k.
    pub fn phase(&self, num: u32) -> usize {
        (num as usize * 48 / self.den as usize) % 48
    }
}

/// (d_2, d_3) with d = d_2 d_3.
pub fn split(d: u32) -> (u32, u32) {
    let d2 = p_part(d as u64, 2) as u32;
    (d2, d / d2)
}

fn check_divisor(d: u32) -> Result<()> {
    if d == 0 || 24 % d != 0 {
        return Err(Error::InvalidInput(format!("{d} does not divide 24")));
    }
    Ok(())
}

/// Generators of SL_2(Z) used to spell out Weil-representation actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlGen {
    T(i64),
    S,
}

/// Word w with g = w[0] w[1] ... for g in SL_2(Z).
pub fn sl2_word(g: [i64; 4]) -> Result<Vec<SlGen>> {
    let [mut a, mut b, mut c, mut d] = g;
    if a * d - b * c != 1 {
        return Err(Error::InvalidInput(format!("{g:?} is not in SL_2(Z)")));
    }
    let mut word = Vec::new();
    while c != 0 {
        // g = T^n S g' with g' = S^{-1} T^{-n} g
        let n = Integer::div_floor(&a, &c);
        let (a1, b1) = (a - n * c, b - n * d);
        word.push(SlGen::T(n));
        word.push(SlGen::S);
        (a, b, c, d) = (c, d, -a1, -b1);
    }
    // g = a I T^{ab} with a = ±1
    if a == -1 {
        word.push(SlGen::S);
        word.push(SlGen::S);
    }
    word.push(SlGen::T(a * b));
    Ok(word)
}

/// Operations shared by dense global vectors and CRT tensor vectors.
pub trait WeilVector: Clone + PartialEq {
    fn omega_t(&self) -> Self;
    fn omega_s(&self) -> Self;
    /// e_h -> e_{-h}, which is omega(S^2).
    fn reflect(&self) -> Self;
    /// Multiplication by zeta_48^k.
    fn mul_root(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Hermitian inner product sum x_h conj(y_h).
    fn inner(&self, other: &Self) -> CycNum;

    fn omega_t_pow(&self, n: i64) -> Self {
        let mut v = self.clone();
        let steps = n.rem_euclid(self.t_order());
        for _ in 0..steps {
            v = v.omega_t();
        }
        v
    }

    /// Order of omega(T), used to reduce negative powers.
    fn t_order(&self) -> i64;

    fn omega_s_inv(&self) -> Self {
        self.reflect().omega_s()
    }

    /// omega(g) v for g in SL_2(Z).
    fn apply(&self, g: [i64; 4]) -> Result<Self> {
        let word = sl2_word(g)?;
        let mut v = self.clone();
        for gen in word.iter().rev() {
            v = match *gen {
                SlGen::T(n) => v.omega_t_pow(n),
                SlGen::S => v.omega_s(),
            };
        }
        Ok(v)
    }
}

/// Exact vector in C[A] stored as data / denom.
#[derive(Clone, Debug)]
pub struct FqmVector {
    fqm: Fqm,
    data: Vec<ZCyc>,
    denom: i64,
}

impl FqmVector {
    pub fn zero(fqm: Fqm) -> Self {
        assert!(fqm.size() <= DENSE_LIMIT, "module of size {} is too large for dense vectors", fqm.size());
        FqmVector { fqm, data: vec![ZCyc::ZERO; fqm.size()], denom: 1 }
    }

    pub fn basis(fqm: Fqm, h: &Elem) -> Self {
        let mut v = Self::zero(fqm);
        v.data[fqm.index(h)] = ZCyc::from_int(1);
        v
    }

    pub fn from_ints<I: IntoIterator<Item = (Elem, i64)>>(fqm: Fqm, entries: I) -> Self {
        let mut v = Self::zero(fqm);
        for (h, x) in entries {
            v.data[fqm.index(&h)].0[0] += x;
        }
        v.normalize()
    }

    /// Sum of e_h over a set.
    pub fn indicator<'a, I: IntoIterator<Item = &'a Elem>>(fqm: Fqm, set: I) -> Self {
        Self::from_ints(fqm, set.into_iter().map(|h| (*h, 1)))
    }

    pub fn fqm(&self) -> &Fqm {
        &self.fqm
    }

    pub fn get(&self, h: &Elem) -> CycNum {
        let r = num_rational::BigRational::new(1.into(), self.denom.into());
        self.data[self.fqm.index(h)].to_cycnum().scale(&r)
    }

    /// Integer coefficient at h, if it is a rational integer.
    pub fn get_int(&self, h: &Elem) -> Option<i64> {
        self.get(h).to_integer()
    }

    pub fn support(&self) -> BTreeSet<Elem> {
        (0..self.data.len()).filter(|&i| !self.data[i].is_zero()).map(|i| self.fqm.elem(i)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.fqm, o.fqm);
        let data = self.data.iter().zip(&o.data).map(|(x, y)| x.scale(o.denom).add(&y.scale(self.denom))).collect();
        FqmVector { fqm: self.fqm, data, denom: self.denom * o.denom }.normalize()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale_int(-1))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        FqmVector { fqm: self.fqm, data: self.data.iter().map(|x| x.scale(n)).collect(), denom: self.denom }.normalize()
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        let mut v = self.scale_int(num);
        v.denom *= den;
        v.normalize()
    }

    /// Coordinates permuted by a map on A: e_h -> e_{f(h)}.
    pub fn permute<F: Fn(&Elem) -> Elem>(&self, f: F) -> Self {
        let mut out = Self::zero(self.fqm);
        for (i, x) in self.data.iter().enumerate() {
            if !x.is_zero_raw() {
                let j = self.fqm.index(&f(&self.fqm.elem(i)));
                out.data[j] = out.data[j].add(x);
            }
        }
        out.denom = self.denom;
        out
    }

    fn normalize(mut self) -> Self {
        let mut g = 0i64;
        for x in self.data.iter_mut() {
            let c = x.canonical();
            *x = ZCyc(std::array::from_fn(|i| if i < 16 { c[i] } else { 0 }));
            for &v in &c {
                g = g.gcd(&v);
            }
        }
        if g == 0 {
            self.denom = 1;
            return self;
        }
        let g = g.gcd(&self.denom) * self.denom.signum();
        if g != 1 {
            for x in self.data.iter_mut() {
                for v in x.0.iter_mut() {
                    *v /= g;
                }
            }
            self.denom /= g;
        }
        self
    }
}

impl PartialEq for FqmVector {
    fn eq(&self, o: &Self) -> bool {
        self.fqm == o.fqm
            && self
                .data
                .iter()
                .zip(&o.data)
                .all(|(x, y)| x.scale(o.denom).sub(&y.scale(self.denom)).is_zero())
    }
}

/// One-dimensional DFT along `axis` with kernel zeta_48^{step m h}.
fn dft_axis(data: &mut [ZCyc], shape: [usize; 4], axis: usize, step: usize) {
    let len = shape[axis];
    if len == 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![ZCyc::ZERO; len];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * len * stride + i;
            for (h, l) in line.iter_mut().enumerate() {
                *l = data[base + h * stride];
            }
            if line.iter().all(|x| x.is_zero_raw()) {
                continue;
            }
            for m in 0..len {
                let mut acc = ZCyc::ZERO;
                for (h, l) in line.iter().enumerate() {
                    if !l.is_zero_raw() {
                        acc.add_rotated(l, step * m * h % 48);
                    }
                }
                data[base + m * stride] = acc;
            }
        }
    }
}

impl WeilVector for FqmVector {
    fn omega_t(&self) -> Self {
        let mut out = self.clone();
        for (i, x) in out.data.iter_mut().enumerate() {
            if !x.is_zero_raw() {
                let q = self.fqm.q_num(&self.fqm.elem(i));
                *x = x.rotate(48 - self.fqm.phase(q));
            }
        }
        out
    }

    fn omega_s(&self) -> Self {
        let f = &self.fqm;
        let shape = f.shape.map(|n| n as usize);
        let mut data = self.data.clone();
        // (x, y) couples x0 with y3 and x1 with y2, so each axis transforms
        // into its partner and the result is read back with reversed indices.
        let cross = f.phase((2 * f.c) % f.den.max(1));
        let skew = (48 - f.phase(f.c % f.den.max(1))) % 48;
        dft_axis(&mut data, shape, 0, cross);
        dft_axis(&mut data, shape, 1, skew);
        dft_axis(&mut data, shape, 2, skew);
        dft_axis(&mut data, shape, 3, cross);
        let mut out = vec![ZCyc::ZERO; data.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let [m0, m1, m2, m3] = f.elem(i);
            *o = data[f.index(&[m3, m2, m1, m0])];
        }
        FqmVector { fqm: *f, data: out, denom: self.denom * f.sqrt_order() }.normalize()
    }

    fn reflect(&self) -> Self {
        let f = self.fqm;
        self.permute(|h| f.neg(h))
    }

    fn mul_root(&self, k: i64) -> Self {
        let k = k.rem_euclid(48) as usize;
        FqmVector { fqm: self.fqm, data: self.data.iter().map(|x| x.rotate(k)).collect(), denom: self.denom }
            .normalize()
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn inner(&self, o: &Self) -> CycNum {
        let mut acc = ZCyc::ZERO;
        for (x, y) in self.data.iter().zip(&o.data) {
            if !x.is_zero_raw() && !y.is_zero_raw() {
                acc = acc.add(&x.mul(&y.conj()));
            }
        }
        let r = num_rational::BigRational::new(1.into(), (self.denom * o.denom).into());
        acc.to_cycnum().scale(&r)
    }

    fn t_order(&self) -> i64 {
        self.fqm.den.max(1) as i64
    }
}

/// Pure tensor x_2 ⊗ x_3 in C[A_{d,2}] ⊗ C[A_{d,3}] ≅ C[A_d].
#[derive(Clone, Debug)]
pub struct TensorVector {
    pub two: FqmVector,
    pub three: FqmVector,
}

impl TensorVector {
    pub fn new(two: FqmVector, three: FqmVector) -> Self {
        TensorVector { two, three }
    }

    /// Coefficient at the global element h of A_d.
    pub fn get(&self, h: &Elem) -> CycNum {
        let f2 = self.two.fqm;
        let f3 = self.three.fqm;
        let h2 = f2.reduce(h.map(|x| x as i64));
        let h3 = f3.reduce(h.map(|x| x as i64));
        self.two.get(&h2) * self.three.get(&h3)
    }

    /// Nonzero coefficients as a sparse map over A_d.
    pub fn to_sparse(&self, d: u32) -> BTreeMap<Elem, CycNum> {
        let g = Fqm::global(d);
        let f2 = self.two.fqm;
        let f3 = self.three.fqm;
        let s2 = self.two.support();
        let s3 = self.three.support();
        let mut out = BTreeMap::new();
        for h2 in &s2 {
            for h3 in &s3 {
                let h = crt_elem(&g, &f2, h2, &f3, h3);
                out.insert(h, self.two.get(h2) * self.three.get(h3));
            }
        }
        out
    }
}

/// Global element with prescribed 2- and 3-primary reductions.
pub fn crt_elem(g: &Fqm, f2: &Fqm, h2: &Elem, f3: &Fqm, h3: &Elem) -> Elem {
    std::array::from_fn(|i| {
        let n = g.shape[i];
        (0..n)
            .find(|&x| x % f2.shape[i] == h2[i] && x % f3.shape[i] == h3[i])
            .expect("CRT residue")
    })
}

impl PartialEq for TensorVector {
    fn eq(&self, o: &Self) -> bool {
        let (x2, x3, y2, y3) = (&self.two, &self.three, &o.two, &o.three);
        if x2.is_zero() || x3.is_zero() {
            return y2.is_zero() || y3.is_zero();
        }
        let i = x2.data.iter().position(|z| !z.is_zero()).expect("nonzero");
        // y2 = alpha x2 with alpha = y2[i] / x2[i], then x3 = alpha y3.
        let (xi, yi) = (x2.data[i], y2.data[i]);
        let two_ok = x2
            .data
            .iter()
            .zip(&y2.data)
            .all(|(x, y)| y.mul(&xi).sub(&x.mul(&yi)).is_zero());
        if !two_ok {
            return false;
        }
        if yi.is_zero() {
            return false;
        }
        let lhs_scale = y3.denom * y2.denom;
        let rhs_scale = x3.denom * x2.denom;
        x3.data
            .iter()
            .zip(&y3.data)
            .all(|(x, y)| x.mul(&xi).scale(lhs_scale).sub(&y.mul(&yi).scale(rhs_scale)).is_zero())
    }
}

impl WeilVector for TensorVector {
    fn omega_t(&self) -> Self {
        TensorVector { two: self.two.omega_t(), three: self.three.omega_t() }
    }

    fn omega_s(&self) -> Self {
        TensorVector { two: self.two.omega_s(), three: self.three.omega_s() }
    }

    fn reflect(&self) -> Self {
        TensorVector { two: self.two.reflect(), three: self.three.reflect() }
    }

    fn mul_root(&self, k: i64) -> Self {
        TensorVector { two: self.two.mul_root(k), three: self.three.clone() }
    }

    fn is_zero(&self) -> bool {
        self.two.is_zero() || self.three.is_zero()
    }

    fn inner(&self, o: &Self) -> CycNum {
        self.two.inner(&o.two) * self.three.inner(&o.three)
    }

    fn t_order(&self) -> i64 {
        self.two.t_order().lcm(&self.three.t_order())
    }
}

/// 2x2 matrix with entries reduced modulo a fixed modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMat {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl ModMat {
    pub fn new(g: [i64; 4], m: u32) -> Self {
        let r = |x: i64| x.rem_euclid(m as i64) as u32;
        ModMat { a: r(g[0]), b: r(g[1]), c: r(g[2]), d: r(g[3]) }
    }

    pub fn identity(m: u32) -> Self {
        Self::new([1, 0, 0, 1], m)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a as i64, self.b as i64, self.c as i64, self.d as i64]
    }

    pub fn mul(&self, o: &Self, m: u32) -> Self {
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = o.entries();
        Self::new([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], m)
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self, m: u32) -> Self {
        let [a, b, c, d] = self.entries();
        Self::new([d, -b, -c, a], m)
    }

    pub fn pow(&self, n: u32, m: u32) -> Self {
        (0..n).fold(Self::identity(m), |acc, _| acc.mul(self, m))
    }

    pub fn reduce(&self, m: u32) -> Self {
        Self::new(self.entries(), m)
    }
}

pub const MAT_T: [i64; 4] = [1, 1, 0, 1];
pub const MAT_S: [i64; 4] = [0, -1, 1, 0];
pub const MAT_B: [i64; 4] = [1, 0, -2, 1];
pub const MAT_NEG_I: [i64; 4] = [-1, 0, 0, -1];
pub const GEN_A: [i64; 4] = [3, 2, 4, 3];
pub const GEN_C: [i64; 4] = [5, 4, 16, 13];
pub const GEN_D: [i64; 4] = [-1, 1, -2, 1];

/// Subgroup of SL_2(Z/m) generated by `gens`.
pub fn closure(gens: &[ModMat], m: u32) -> BTreeSet<ModMat> {
    let id = ModMat::identity(m);
    let mut seen = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g, m);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Image of Gamma_0(2) in SL_2(Z/modulus) with each matrix labelled by its
/// chi-exponent mod `exp_mod`. Fails if some matrix receives two labels.
pub fn chi_classes(modulus: u32, exp_mod: u32) -> Result<HashMap<ModMat, u32>> {
    let gens = [
        (ModMat::new(MAT_T, modulus), 1u32 % exp_mod),
        (ModMat::new(MAT_B, modulus), (exp_mod - 1) % exp_mod),
        (ModMat::new(MAT_NEG_I, modulus), 0),
    ];
    let id = ModMat::identity(modulus);
    let mut seen = HashMap::from([(id, 0u32)]);
    let mut queue = VecDeque::from([(id, 0u32)]);
    while let Some((x, e)) = queue.pop_front() {
        for (g, eg) in &gens {
            let y = x.mul(g, modulus);
            let f = (e + eg) % exp_mod;
            match seen.get(&y) {
                Some(&old) if old != f => {
                    return Err(Error::InvalidInput(format!(
                        "chi-exponent not single valued mod {exp_mod} on {y:?} (mod {modulus})"
                    )))
                }
                Some(_) => {}
                None => {
                    seen.insert(y, f);
                    queue.push_back((y, f));
                }
            }
        }
    }
    Ok(seen)
}

/// kappa_d on a matrix reduced mod 2d: [a mod d, 2b mod 2d, c mod 2d, d mod d].
pub fn kappa_mat(d: u32, g: &ModMat) -> Elem {
    let f = Fqm::global(d);
    f.reduce([g.a as i64, 2 * g.b as i64, g.c as i64, g.d as i64])
}

/// kappa_d(g) = (1/d) g + L_d for g in Gamma_0(2).
pub fn kappa_d(g: &Gamma02Element, d: u32) -> Result<Elem> {
    check_divisor(d)?;
    if g.c.rem_euclid(2) != 0 {
        return Err(Error::NotInGamma02);
    }
    Ok(kappa_mat(d, &ModMat::new([g.a, g.b, g.c, g.d], 2 * d)))
}

/// Left action of a matrix (a b; c d), c even, on A_d: g · h.
pub fn act_left(f: &Fqm, g: &ModMat, h: &Elem) -> Elem {
    let [a, b, c, d] = g.entries();
    let c2 = c / 2;
    let [h0, h1, h2, h3] = h.map(|x| x as i64);
    f.reduce([a * h0 + b * h2, a * h1 + 2 * b * h3, c * h0 + d * h2, c2 * h1 + d * h3])
}

/// Right action h · g.
pub fn act_right(f: &Fqm, h: &Elem, g: &ModMat) -> Elem {
    let [a, b, c, d] = g.entries();
    let c2 = c / 2;
    let [h0, h1, h2, h3] = h.map(|x| x as i64);
    f.reduce([a * h0 + c2 * h1, 2 * b * h0 + d * h1, a * h2 + c * h3, b * h2 + d * h3])
}

/// Census of kappa_d(T^j Gamma_{chi,d}) for j mod d.
#[derive(Clone, Debug)]
pub struct CosetCensus {
    pub d: u32,
    /// chi-exponent mod d of each matrix in the image of Gamma_0(2) mod 2d.
    pub classes: HashMap<ModMat, u32>,
}

impl CosetCensus {
    pub fn new(d: u32) -> Result<Self> {
        check_divisor(d)?;
        Ok(CosetCensus { d, classes: chi_classes(2 * d, d)? })
    }

    /// Number of matrices mod 2d in each class T^j Gamma_{chi,d}.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.d as usize];
        for &e in self.classes.values() {
            sizes[e as usize] += 1;
        }
        sizes
    }

    pub fn image(&self, j: u32) -> BTreeSet<Elem> {
        self.classes
            .iter()
            .filter(|(_, &e)| e == j % self.d)
            .map(|(g, _)| kappa_mat(self.d, g))
            .collect()
    }

    /// Matrices mod 2d in Gamma_{chi,d}.
    pub fn kernel(&self) -> Vec<ModMat> {
        let mut v: Vec<ModMat> = self.classes.iter().filter(|(_, &e)| e == 0).map(|(g, _)| *g).collect();
        v.sort();
        v
    }

    /// Integer coefficients of u_d = sum_j a_d(j) sum_{h in kappa_d(T^j Gamma_{chi,d})} e_h.
    pub fn u_coeffs(&self) -> BTreeMap<Elem, i64> {
        let mut out = BTreeMap::new();
        for j in 0..self.d {
            let a = a_coeff(self.d as u64, j as i64);
            for h in self.image(j) {
                *out.entry(h).or_insert(0) += a;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

/// kappa_d(T^j Gamma_{chi,d}) as a set.
pub fn coset_image(d: u32, j: u32) -> Result<BTreeSet<Elem>> {
    Ok(CosetCensus::new(d)?.image(j))
}

/// {[r, r(2j + r^2 - 1), 0, r] : r in (Z/d)^x}, which is kappa_d(T^j Gamma_{chi,d})
/// intersected with A_d^0. The r^3 - r term is well defined mod 2d for d | 24.
pub fn lemma_coset_zero_set(d: u32, j: u32) -> BTreeSet<Elem> {
    let f = Fqm::global(d);
    (0..d as i64)
        .filter(|&r| r.gcd(&(d as i64)) == 1)
        .map(|r| f.reduce([r, r * (2 * j as i64 + r * r - 1), 0, r]))
        .collect()
}

/// Dense u_d on the global module.
pub fn build_u_d(d: u32) -> Result<FqmVector> {
    check_divisor(d)?;
    let f = Fqm::global(d);
    if f.size() > DENSE_LIMIT {
        return Err(Error::InvalidInput(format!("A_{d} is too large for a dense vector; use build_u_tensor")));
    }
    Ok(FqmVector::from_ints(f, CosetCensus::new(d)?.u_coeffs()))
}

/// v = omega(S) u and w = zeta_{2d}^{-1} omega(T) v.
pub fn build_vw<V: WeilVector>(d: u32, u: &V) -> (V, V) {
    let v = u.omega_s();
    let w = v.omega_t().mul_root(-(24 / d as i64));
    (v, w)
}

/// Local groups at 2: N'_{d,2} = <A, C, D> inside SL_2(Z/2d_2), with the
/// subgroup <T^{d_2}, C^{d_2/(2,d_2)}> that is divided out.
#[derive(Clone, Debug)]
pub struct LocalGroup2 {
    pub d2: u32,
    pub modulus: u32,
    pub elements: BTreeSet<ModMat>,
    pub kernel: BTreeSet<ModMat>,
}

impl LocalGroup2 {
    pub fn new(d2: u32) -> Self {
        let m = 2 * d2;
        let t = ModMat::new(MAT_T, m).pow(d2, m);
        let c = ModMat::new(GEN_C, m).pow(d2 / d2.gcd(&2), m);
        let kernel = closure(&[t, c], m);
        let gens = [GEN_A, GEN_C, GEN_D].map(|g| ModMat::new(g, m));
        let mut all: Vec<ModMat> = gens.to_vec();
        all.push(t);
        let elements = closure(&all, m);
        LocalGroup2 { d2, modulus: m, elements, kernel }
    }

    /// Order of N'_{d,2} as a quotient group.
    pub fn order(&self) -> usize {
        self.elements.len() / self.kernel.len()
    }

    pub fn gens(&self) -> [ModMat; 3] {
        [GEN_A, GEN_C, GEN_D].map(|g| ModMat::new(g, self.modulus))
    }

    /// T^j N'_{d,2}.
    pub fn coset(&self, j: u32) -> BTreeSet<ModMat> {
        let t = ModMat::new(MAT_T, self.modulus).pow(j, self.modulus);
        self.elements.iter().map(|g| t.mul(g, self.modulus)).collect()
    }
}

/// kappa_{d,2}(g) = d_3^{-1} [a mod d_2, 2b, c, d mod d_2] for g = (a b; c d), c even.
pub fn kappa_d2(d: u32, g: &ModMat) -> Elem {
    let f = Fqm::two_part(d);
    let (d2, d3) = split(d);
    let s = inv_mod(d3 as i64, 2 * d2 as i64).unwrap();
    let [a, b, c, dd] = g.entries();
    f.scale(s, &f.reduce([a, 2 * b, c, dd]))
}

/// kappa_{d,3}(g) = [a, -b, c, d] mod 3, i.e. the inverse of (h0 -h1; h2 h3).
pub fn kappa_d3(g: &ModMat) -> Elem {
    let f = Fqm { shape: [3; 4], den: 3, c: 1 };
    let [a, b, c, d] = g.entries();
    f.reduce([a, -b, c, d])
}

/// N'_3 = <(0 1; -1 0), (1 1; 1 -1)> in SL_2(F_3), the quaternion group.
pub fn n3_prime() -> BTreeSet<ModMat> {
    closure(&[ModMat::new([0, 1, -1, 0], 3), ModMat::new([1, 1, 1, -1], 3)], 3)
}

/// Convention for the map N_{d,2} -> A_{d,2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kappa2 {
    /// Reduction of the global kappa_d coordinates, compatible with A_d ≅ A_{d,2} × A_{d,3}.
    Reduction,
    /// The d_3^{-1}-scaled map, which reproduces the tabulated sets.
    Scaled,
}

/// u_{d,2} = sum_j a_{d_2}(j) sum_{h in kappa(T^j N'_{d,2})} e_h.
pub fn build_u_d2_with(d: u32, conv: Kappa2) -> Result<FqmVector> {
    check_divisor(d)?;
    let (d2, d3) = split(d);
    let grp = LocalGroup2::new(d2);
    let f = Fqm::two_part(d);
    let unscale = match conv {
        Kappa2::Reduction => d3 as i64,
        Kappa2::Scaled => 1,
    };
    let mut coeffs: BTreeMap<Elem, i64> = BTreeMap::new();
    for j in 0..d2 {
        let a = a_coeff(d2 as u64, j as i64);
        let set: BTreeSet<Elem> = grp.coset(j).iter().map(|g| f.scale(unscale, &kappa_d2(d, g))).collect();
        for h in set {
            *coeffs.entry(h).or_insert(0) += a;
        }
    }
    Ok(FqmVector::from_ints(f, coeffs))
}

/// u_{d,2} in the convention compatible with the global coset construction.
pub fn build_u_d2(d: u32) -> Result<FqmVector> {
    build_u_d2_with(d, Kappa2::Reduction)
}

/// w_i of the 3-part: orbit sums over kappa_{d,3}(T^i N'_3) for i = 0, 1, 2 and
/// over the nonzero elements with det = -i mod 3 for i = 3, 4.
pub fn w3_sets() -> [BTreeSet<Elem>; 5] {
    let n3 = n3_prime();
    let t = ModMat::new(MAT_T, 3);
    let coset = |i: u32| -> BTreeSet<Elem> {
        let ti = t.pow(i, 3);
        n3.iter().map(|g| kappa_d3(&ti.mul(g, 3))).collect()
    };
    let det_set = |r: i64| -> BTreeSet<Elem> {
        let f = Fqm { shape: [3; 4], den: 3, c: 1 };
        f.elements()
            .filter(|h| *h != [0; 4])
            .filter(|h| {
                // det (h0 -h1; h2 h3) = h0 h3 + h1 h2
                (h[0] as i64 * h[3] as i64 + h[1] as i64 * h[2] as i64 - r).rem_euclid(3) == 0
            })
            .collect()
    };
    [coset(0), coset(1), coset(2), det_set(0), det_set(-4)]
}

/// u_{d,3} = sum_j a_{d_3}(j) sum_{h in kappa_{d,3}(T^j N'_3)} e_h, or e_0 if 3 ∤ d.
pub fn build_u_d3(d: u32) -> Result<FqmVector> {
    check_divisor(d)?;
    let f = Fqm::three_part(d);
    let (_, d3) = split(d);
    if d3 == 1 {
        return Ok(FqmVector::basis(f, &[0; 4]));
    }
    let sets = w3_sets();
    let mut coeffs: BTreeMap<Elem, i64> = BTreeMap::new();
    for (j, set) in sets.iter().take(3).enumerate() {
        let a = a_coeff(3, j as i64);
        for h in set {
            *coeffs.entry(*h).or_insert(0) += a;
        }
    }
    Ok(FqmVector::from_ints(f, coeffs))
}

/// u_d as the tensor product u_{d,2} ⊗ u_{d,3}.
pub fn build_u_tensor(d: u32) -> Result<TensorVector> {
    Ok(TensorVector::new(build_u_d2(d)?, build_u_d3(d)?))
}

/// chi-exponent mod 24 of a matrix in Gamma_0(2).
fn chi_of(g: [i64; 4]) -> Result<i64> {
    let e = Gamma02Element::new(g[0], g[1], g[2], g[3])?;
    Ok(chi_exponent(&e)? as i64)
}

/// Hermitian Gram determinant; nonzero iff the vectors are independent.
pub fn gram_determinant<V: WeilVector>(vs: &[V]) -> CycNum {
    let n = vs.len();
    let g: Vec<Vec<CycNum>> = (0..n).map(|i| (0..n).map(|j| vs[i].inner(&vs[j])).collect()).collect();
    determinant(g)
}

fn determinant(mut m: Vec<Vec<CycNum>>) -> CycNum {
    let n = m.len();
    let mut det = CycNum::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return CycNum::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let inv = m[k][k].inv().expect("nonzero pivot");
        det = det * m[k][k].clone();
        for r in k + 1..n {
            let factor = m[r][k].clone() * inv.clone();
            for c in k..n {
                let sub = factor.clone() * m[k][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
        }
    }
    det
}

/// omega_d(g) u_d = chi(g)^{-24/d} u_d for g in {T, -I, TB}, plus any extra
/// matrices supplied by the caller.
pub fn verify_udinv_on<V: WeilVector>(d: u32, u: &V, extra: &[[i64; 4]]) -> Result<Vec<Check>> {
    let tb = [1, 1, 0, 1];
    let tb = mat_mul(tb, MAT_B);
    let mut gens = vec![("T", MAT_T), ("-I", MAT_NEG_I), ("TB", tb)];
    let named: Vec<String> = extra.iter().map(|g| format!("{g:?}")).collect();
    for (g, n) in extra.iter().zip(&named) {
        gens.push((n.as_str(), *g));
    }
    let mut out = Vec::new();
    for (name, g) in gens {
        let chi = chi_of(g)?;
        // chi(g)^{-24/d} = zeta_24^{-24 chi / d} = zeta_48^{-48 chi / d}
        let lhs = u.apply(g)?;
        let rhs = u.mul_root(-(48 * chi / d as i64));
        out.push(Check::expect(format!("udinv d={d} g={name}"), lhs == rhs, || {
            format!("omega({g:?}) u_{d} != chi^(-24/{d}) u_{d} with chi-exponent {chi}")
        }));
    }
    Ok(out)
}

pub fn mat_mul(x: [i64; 4], y: [i64; 4]) -> [i64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

/// The six relations of the embedding C^3 -> U_d and independence of u, v, w.
pub fn verify_repembed_on<V: WeilVector>(d: u32, u: &V) -> Vec<Check> {
    let (v, w) = build_vw(d, u);
    let z2d = 24 / d as i64;
    let rels = [
        ("T u = zeta_d^-1 u", u.omega_t() == u.mul_root(-2 * z2d)),
        ("T v = zeta_2d w", v.omega_t() == w.mul_root(z2d)),
        ("T w = zeta_2d v", w.omega_t() == v.mul_root(z2d)),
        ("S u = v", u.omega_s() == v),
        ("S v = u", v.omega_s() == *u),
        ("S w = w", w.omega_s() == w),
    ];
    let mut out: Vec<Check> = rels
        .iter()
        .map(|(name, ok)| Check::expect(format!("repembed d={d}: {name}"), *ok, || "relation fails".into()))
        .collect();
    let gram = gram_determinant(&[u.clone(), v, w]);
    out.push(Check::expect(format!("repembed d={d}: u, v, w independent"), !gram.is_zero(), || {
        "Gram determinant vanishes".into()
    }));
    out
}

/// Proposition-level checks for u_d: eigen-relations on Gamma_0(2)
/// generators and the representation embedding, on the tensor model for
/// every d and additionally on the dense global model when it fits.
pub fn verify_udinv(d: u32) -> Result<Vec<Check>> {
    let mut out = verify_udinv_on(d, &build_u_tensor(d)?, &[])?;
    if Fqm::global(d).size() <= DENSE_LIMIT {
        out.extend(verify_udinv_on(d, &build_u_d(d)?, &[])?.into_iter().map(|mut c| {
            c.name += " (dense model)";
            c
        }));
        out.push(verify_ufinv(d)?);
    }
    Ok(out)
}

/// All of [`verify_udinv`] folded into one check per level.
pub fn verify_udinv_summary(d: u32) -> Result<Check> {
    let failures = verify_udinv(d)?
        .into_iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}: {}", c.name, c.witness.unwrap_or_default()));
    Ok(Check::first_failure(format!("udinv d={d}"), failures))
}

pub fn verify_repembed(d: u32) -> Result<Vec<Check>> {
    let mut out = verify_repembed_on(d, &build_u_tensor(d)?);
    if Fqm::global(d).size() <= DENSE_LIMIT {
        let u = build_u_d(d)?;
        let (v, _) = build_vw(d, &u);
        out.extend(verify_repembed_on(d, &u));
        if d % 2 == 0 {
            let disjoint = u.support().is_disjoint(&v.support());
            out.push(Check::expect(format!("repembed d={d}: supp u ∩ supp v = ∅"), disjoint, || {
                "supports meet".into()
            }));
        }
    }
    if d == 1 {
        let f = Fqm::global(1);
        let c = FqmVector::from_ints(f, [([0, 0, 0, 0], 24), ([0, 1, 0, 0], 24)]);
        let inv = c.omega_t() == c && c.omega_s() == c;
        out.push(Check::expect("repembed d=1: constant shift 24(e_(0,0) + e_(1/2,0)) is invariant", inv, || {
            "shift vector is not SL_2(Z)-invariant".into()
        }));
    }
    Ok(out)
}

/// u_d is Gamma_{chi,r} x Gamma_{chi,r}-invariant exactly when d | r, for all r | 24.
pub fn verify_ufinv(d: u32) -> Result<Check> {
    let census = CosetCensus::new(d)?;
    let f = Fqm::global(d);
    let u = census.u_coeffs();
    let m = 2 * d;
    let invariant_under = |g: &ModMat| -> bool {
        let gi = g.inv(m);
        u.iter().all(|(h, &x)| {
            let left = act_left(&f, g, h);
            let right = act_right(&f, h, &gi);
            u.get(&left).copied().unwrap_or(0) == x && u.get(&right).copied().unwrap_or(0) == x
        })
    };
    for r in crate::arith::DIVISORS_24.map(|r| r as u32) {
        let l = d.lcm(&r);
        let classes = chi_classes(2 * l, r)?;
        let group: BTreeSet<ModMat> =
            classes.iter().filter(|(_, &e)| e == 0).map(|(g, _)| g.reduce(m)).collect();
        let inv = group.iter().all(|g| invariant_under(g));
        if inv != (r % d == 0) {
            return Ok(Check::fail(format!("ufinv d={d}"), format!("r={r}: invariant={inv}")));
        }
    }
    Ok(Check::pass(format!("ufinv d={d}")))
}

/// Coset-intersection lemma for every j mod d.
pub fn verify_coset_lemma(d: u32) -> Result<Check> {
    let census = CosetCensus::new(d)?;
    for j in 0..d {
        let got: BTreeSet<Elem> = census.image(j).into_iter().filter(|h| h[2] == 0).collect();
        let want = lemma_coset_zero_set(d, j);
        if got != want {
            return Ok(Check::fail(format!("coset lemma d={d}"), format!("j={j}: got {got:?}, expected {want:?}")));
        }
    }
    Ok(Check::pass(format!("coset lemma d={d}")))
}

/// Number of classes of the equivalence on 0..n generated by i ~ step(i).
pub fn count_classes<F: Fn(usize) -> Vec<usize>>(n: usize, step: F) -> usize {
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in step(i) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Orbit count on a module of shape (n, 2n, 2n, n) under pairs (g1, g2)
/// acting by h -> g1 h g2^{-1}.
pub fn orbit_count(f: &Fqm, gens: &[(ModMat, ModMat)], m: u32) -> usize {
    count_classes(f.size(), |i| {
        let h = f.elem(i);
        gens.iter().map(|(g1, g2)| f.index(&act_right(f, &act_left(f, g1, &h), &g2.inv(m)))).collect()
    })
}

/// (dim U_{d,2}^{H'_{d,2}}, dim U'_{d,2}).
pub fn orbit_dims(d: u32) -> Result<(usize, usize)> {
    check_divisor(d)?;
    let (d2, _) = split(d);
    let grp = LocalGroup2::new(d2);
    let m = grp.modulus;
    let f = Fqm::two_part(d);
    let id = ModMat::identity(m);
    let t = ModMat::new(MAT_T, m);
    let mut gens: Vec<(ModMat, ModMat)> = Vec::new();
    for g in grp.gens() {
        gens.push((g, id));
        gens.push((id, g));
    }
    gens.push((t, t));
    let orbits = orbit_count(&f, &gens, m);
    // For d_2 >= 2, sigma = (T^{d_2/2}, 1) normalizes H' and pairs up orbits;
    // U' is its (-1)-eigenspace, of dimension equal to the number of pairs.
    let dim_prime = if d2 == 1 {
        orbits - 1
    } else {
        gens.push((t.pow(d2 / 2, m), id));
        orbits - orbit_count(&f, &gens, m)
    };
    Ok((orbits, dim_prime))
}

/// phi(d_2) copies of the 3-dimensional representation.
pub fn expected_dim_prime(d: u32) -> usize {
    3 * euler_phi(split(d).0 as u64) as usize
}

/// u_d from the coset sums equals u_{d,2} ⊗ u_{d,3} under A_d ≅ A_{d,2} × A_{d,3}.
pub fn verify_tensor_split(d: u32) -> Result<Check> {
    let global = CosetCensus::new(d)?.u_coeffs();
    let tensor = build_u_tensor(d)?.to_sparse(d);
    let name = format!("u_{d} = u_{d},2 ⊗ u_{d},3");
    if global.len() != tensor.len() {
        return Ok(Check::fail(name, format!("support sizes {} and {}", global.len(), tensor.len())));
    }
    for (h, x) in &global {
        let y = tensor.get(h).and_then(|c| c.to_integer());
        if y != Some(*x) {
            return Ok(Check::fail(name, format!("at {h:?}: {x} vs {y:?}")));
        }
    }
    Ok(Check::pass(name))
}

/// Local coset lemmas: at 2, kappa_{d,2}(T^j N'_{d,2}) ∩ A^0 =
/// {[r, r(2j + (d_3 r)^2 - 1), 0, r]}; at 3, kappa_{d,3}(T^j N'_3) ∩ A^0 = {±[1, -j, 0, 1]}.
pub fn verify_local_coset_lemmas(d: u32) -> Result<Vec<Check>> {
    check_divisor(d)?;
    let (d2, d3) = split(d);
    let grp = LocalGroup2::new(d2);
    let f2 = Fqm::two_part(d);
    let mut out = Vec::new();
    let mut fails = Vec::new();
    for j in 0..d2 {
        let got: BTreeSet<Elem> = grp.coset(j).iter().map(|g| kappa_d2(d, g)).filter(|h| h[2] == 0).collect();
        let want: BTreeSet<Elem> = (0..d2 as i64)
            .filter(|r| r.gcd(&(d2 as i64)) == 1)
            .map(|r| {
                let s = d3 as i64 * r;
                f2.reduce([r, r * (2 * j as i64 + s * s - 1), 0, r])
            })
            .collect();
        if got != want {
            fails.push(format!("j={j}: got {got:?}, expected {want:?}"));
        }
    }
    out.push(Check::first_failure(format!("local coset lemma at 2, d={d}"), fails));
    if d3 == 3 {
        let sets = w3_sets();
        let f3 = Fqm { shape: [3; 4], den: 3, c: 1 };
        let mut fails = Vec::new();
        for (j, set) in sets.iter().take(3).enumerate() {
            let got: BTreeSet<Elem> = set.iter().copied().filter(|h| h[2] == 0).collect();
            let want: BTreeSet<Elem> =
                [1i64, -1].iter().map(|&e| f3.reduce([e, -e * j as i64, 0, e])).collect();
            if got != want {
                fails.push(format!("j={j}: got {got:?}, expected {want:?}"));
            }
        }
        out.push(Check::first_failure(format!("local coset lemma at 3, d={d}"), fails));
    }
    Ok(out)
}

/// The sets kappa_{d,2}(N'_{d,2}) as listed for d in {1, 2, 4, 8, 24}.
pub fn appendix_kappa_list(d: u32) -> Option<Vec<Elem>> {
    let list: &[Elem] = match d {
        1 => &[[0, 0, 0, 0]],
        2 => &[[1, 0, 0, 1], [1, 2, 2, 1]],
        4 => &[
            [1, 2, 6, 3], [1, 6, 2, 3], [1, 0, 0, 1], [1, 4, 4, 1],
            [3, 6, 2, 1], [3, 2, 6, 1], [3, 0, 0, 3], [3, 4, 4, 3],
        ],
        8 => &[
            [1, 2, 14, 7], [1, 6, 10, 7], [1, 10, 6, 7], [1, 14, 2, 7],
            [1, 0, 0, 1], [1, 4, 12, 1], [1, 8, 8, 1], [1, 12, 4, 1],
            [3, 14, 10, 5], [3, 2, 6, 5], [3, 6, 2, 5], [3, 10, 14, 5],
            [3, 8, 0, 3], [3, 12, 12, 3], [3, 0, 8, 3], [3, 4, 4, 3],
            [5, 2, 6, 3], [5, 6, 2, 3], [5, 10, 14, 3], [5, 14, 10, 3],
            [5, 8, 0, 5], [5, 12, 12, 5], [5, 0, 8, 5], [5, 4, 4, 5],
            [7, 14, 2, 1], [7, 2, 14, 1], [7, 6, 10, 1], [7, 10, 6, 1],
            [7, 0, 0, 7], [7, 4, 12, 7], [7, 8, 8, 7], [7, 12, 4, 7],
        ],
        24 => &[
            [3, 6, 10, 5], [3, 2, 14, 5], [3, 14, 2, 5], [3, 10, 6, 5],
            [3, 0, 0, 3], [3, 12, 4, 3], [3, 8, 8, 3], [3, 4, 12, 3],
            [1, 10, 14, 7], [1, 6, 2, 7], [1, 2, 6, 7], [1, 14, 10, 7],
            [1, 8, 0, 1], [1, 4, 4, 1], [1, 0, 8, 1], [1, 12, 12, 1],
            [7, 6, 2, 1], [7, 2, 6, 1], [7, 14, 10, 1], [7, 10, 14, 1],
            [7, 8, 0, 7], [7, 4, 4, 7], [7, 0, 8, 7], [7, 12, 12, 7],
            [5, 10, 6, 3], [5, 6, 10, 3], [5, 2, 14, 3], [5, 14, 2, 3],
            [5, 0, 0, 5], [5, 12, 4, 5], [5, 8, 8, 5], [5, 4, 12, 5],
        ],
        _ => return None,
    };
    Some(list.to_vec())
}

/// kappa_{d,2}(N'_{d,2}) as a set.
pub fn kappa_d2_image(d: u32) -> BTreeSet<Elem> {
    let grp = LocalGroup2::new(split(d).0);
    grp.elements.iter().map(|g| kappa_d2(d, g)).collect()
}

pub fn verify_appendix_lists() -> Vec<Check> {
    [1u32, 2, 4, 8, 24]
        .iter()
        .map(|&d| {
            let want: BTreeSet<Elem> = appendix_kappa_list(d).unwrap().into_iter().collect();
            let got = kappa_d2_image(d);
            Check::expect(format!("kappa_{d},2(N'_{d},2) list"), got == want, || {
                format!("computed {got:?}")
            })
        })
        .collect()
}

/// Additive subgroup of `f` generated by `gens`.
pub fn additive_span(f: &Fqm, gens: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    let mut seen = BTreeSet::from([[0u32; 4]]);
    let mut queue = VecDeque::from([[0u32; 4]]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = f.add(&x, g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Invariant factors of a finite abelian 2-group given as a subset of `f`,
/// read off from the sizes of its 2^k-torsion subgroups.
pub fn invariant_factors_2(f: &Fqm, group: &BTreeSet<Elem>) -> Vec<u32> {
    let torsion = |k: u32| group.iter().filter(|h| f.scale(1 << k, h) == [0; 4]).count();
    let mut sizes = vec![1usize];
    let mut k = 1;
    while *sizes.last().unwrap() < group.len() {
        sizes.push(torsion(k));
        k += 1;
    }
    // number of cyclic factors of order >= 2^k is log2(|G[2^k]| / |G[2^(k-1)]|)
    let at_least: Vec<u32> = sizes.windows(2).map(|w| (w[1] / w[0]).trailing_zeros()).collect();
    let mut factors = Vec::new();
    for (i, &n) in at_least.iter().enumerate() {
        let next = at_least.get(i + 1).copied().unwrap_or(0);
        for _ in 0..n - next {
            factors.push(1 << (i + 1));
        }
    }
    factors.sort();
    factors
}

/// Structure of the additive span A'_{d,2} of kappa_{d,2}(N'_{d,2}).
pub fn lemma_additive_check(d: u32) -> Result<Vec<Check>> {
    check_divisor(d)?;
    let (d2, d3) = split(d);
    let f = Fqm::two_part(d);
    let grp = LocalGroup2::new(d2);
    let m = grp.modulus;
    let image = kappa_d2_image(d);
    let span = additive_span(&f, &image);
    // all of N_{d,2}: determinant-one matrices mod 2 d_2 with even lower-left entry
    let full: Vec<ModMat> = (0..m.pow(4))
        .map(|i| ModMat { a: i % m, b: (i / m) % m, c: (i / m / m) % m, d: i / m / m / m })
        .filter(|g| g.c % 2 == 0 && (g.a as i64 * g.d as i64 - g.b as i64 * g.c as i64).rem_euclid(m as i64) == 1)
        .collect();
    let preimage: BTreeSet<ModMat> = full.iter().copied().filter(|g| span.contains(&kappa_d2(d, g))).collect();
    let mut out = Vec::new();
    if d2 == 8 {
        let gens: BTreeSet<Elem> = [[6, 4, 0, 2], [0, 8, 0, 0], [0, 2, 2, 0]].into_iter().collect();
        let perp: BTreeSet<Elem> =
            f.elements().filter(|h| gens.iter().all(|g| f.b_num(h, g) == 0)).collect();
        out.push(Check::expect(format!("additive d={d}: A' is the orthogonal complement"), perp == span, || {
            format!("|A'| = {}, |complement| = {}", span.len(), perp.len())
        }));
        let inv = invariant_factors_2(&f, &span);
        out.push(Check::expect(format!("additive d={d}: A' = (Z/2)^2 x (Z/8)^2"), inv == vec![2, 2, 8, 8], || {
            format!("invariant factors {inv:?}")
        }));
        let t4n = grp.coset(4);
        let union: BTreeSet<ModMat> = grp.elements.union(&t4n).copied().collect();
        out.push(Check::expect(
            format!("additive d={d}: preimage is N' ⊔ T^4 N'"),
            preimage == union && grp.elements.is_disjoint(&t4n),
            || format!("|preimage| = {}, |N' ∪ T^4 N'| = {}", preimage.len(), union.len()),
        ));
        let d3sq = (d3 * d3) as i64;
        let cong = |h: &Elem, shift: i64| {
            (h[0] as i64 * h[0] as i64 - d3sq - h[1] as i64 - h[2] as i64 - shift).rem_euclid(16) == 0
        };
        let fails: Vec<String> = grp
            .elements
            .iter()
            .map(|g| (kappa_d2(d, g), 0))
            .chain(t4n.iter().map(|g| (kappa_d2(d, g), 8)))
            .filter(|(h, shift)| !cong(h, *shift) || cong(h, 8 - shift))
            .map(|(h, shift)| format!("{h:?} (shift {shift})"))
            .collect();
        out.push(Check::first_failure(format!("additive d={d}: mod-16 congruence separates N' and T^4 N'"), fails));
    } else {
        let id = ModMat::identity(m);
        let dd = ModMat::new(GEN_D, m);
        let gens: BTreeSet<Elem> = [kappa_d2(d, &id), kappa_d2(d, &dd)].into_iter().collect();
        let gen_span = additive_span(&f, &gens);
        let inv = invariant_factors_2(&f, &span);
        let expect: Vec<u32> = if d2 == 1 { vec![] } else { vec![d2, d2] };
        out.push(Check::expect(
            format!("additive d={d}: A' = (Z/d_2)^2 spanned by kappa(I), kappa(D)"),
            gen_span == span && inv == expect,
            || format!("invariant factors {inv:?}, |span| = {}, |gen span| = {}", span.len(), gen_span.len()),
        ));
        out.push(Check::expect(format!("additive d={d}: preimage is N'"), preimage == grp.elements, || {
            format!("|preimage| = {}, |N'| = {}", preimage.len(), grp.elements.len())
        }));
    }
    Ok(out)
}

/// N'_3 equals {±I} ∪ {g in SL_2(F_3) : tr g = 0}, has 8 elements and
/// H'_3 cuts A_{d,3} \ {0} into the five orbits w_0, ..., w_4.
pub fn verify_n3() -> Vec<Check> {
    let n3 = n3_prime();
    let sl2: Vec<ModMat> = (0..81u32)
        .map(|i| ModMat { a: i % 3, b: (i / 3) % 3, c: (i / 9) % 3, d: i / 27 })
        .filter(|g| (g.a * g.d + 3 * 3 - g.b * g.c) % 3 == 1)
        .collect();
    let by_trace: BTreeSet<ModMat> = sl2
        .iter()
        .copied()
        .filter(|g| (g.a + g.d) % 3 == 0 || *g == ModMat::identity(3) || *g == ModMat::new(MAT_NEG_I, 3))
        .collect();
    let listed: BTreeSet<ModMat> = [
        [1, 0, 0, 1], [-1, -1, -1, 1], [0, 1, -1, 0], [-1, 1, 1, 1],
        [-1, 0, 0, -1], [1, 1, 1, -1], [0, -1, 1, 0], [1, -1, -1, -1],
    ]
    .iter()
    .map(|g| ModMat::new(*g, 3))
    .collect();
    let mut out = vec![
        Check::expect("N'_3 has order 8 and matches the listed elements", n3.len() == 8 && n3 == listed, || {
            format!("{n3:?}")
        }),
        Check::expect("N'_3 = {±I} ∪ {tr g = 0}", n3 == by_trace, || format!("{by_trace:?}")),
    ];
    // orbits of <N'_3 x N'_3, (T,T)> on M_2(F_3) \ {0}, in kappa_{d,3} coordinates
    let f = Fqm { shape: [3; 4], den: 3, c: 1 };
    let to_mat = |h: &Elem| ModMat::new([h[0] as i64, -(h[1] as i64), h[2] as i64, h[3] as i64], 3);
    let t = ModMat::new(MAT_T, 3);
    let id = ModMat::identity(3);
    let mut gens: Vec<(ModMat, ModMat)> = n3.iter().flat_map(|g| [(*g, id), (id, *g)]).collect();
    gens.push((t, t));
    let act = |h: &Elem, g1: &ModMat, g2: &ModMat| kappa_d3(&g1.mul(&to_mat(h), 3).mul(&g2.inv(3), 3));
    let sets = w3_sets();
    let mut fails = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        if set.iter().any(|h| gens.iter().any(|(g1, g2)| !set.contains(&act(h, g1, g2)))) {
            fails.push(format!("w_{i} is not a union of orbits"));
        }
    }
    let total: usize = sets.iter().map(|s| s.len()).sum();
    let union: BTreeSet<Elem> = sets.iter().flatten().copied().collect();
    if total != 80 || union.len() != 80 || union.contains(&[0; 4]) {
        fails.push(format!("w_i do not partition the 80 nonzero elements ({total})"));
    }
    let orbits = count_classes(81, |i| gens.iter().map(|(g1, g2)| f.index(&act(&f.elem(i), g1, g2))).collect());
    if orbits != 6 {
        fails.push(format!("{orbits} orbits including zero, expected 6"));
    }
    out.push(Check::first_failure("H'_3 orbits on A_{d,3} \\ {0} are w_0..w_4", fails));
    out
}

/// iota_j(alpha + beta e) = alpha I + beta (0 (d-1)/4; 1 -1), reduced mod m.
pub fn iota_explicit(d: i64, alpha: i64, beta: i64, m: u32) -> ModMat {
    let k = (d - 1) / 4;
    ModMat::new([alpha, beta * k, beta, alpha - beta], m)
}

fn pair_closure(gens: &[(ModMat, ModMat)], m: u32) -> BTreeSet<(ModMat, ModMat)> {
    let id = (ModMat::identity(m), ModMat::identity(m));
    let mut seen = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some((x, y)) = queue.pop_front() {
        for (g, h) in gens {
            let z = (x.mul(g, m), y.mul(h, m));
            if seen.insert(z) {
                queue.push_back(z);
            }
        }
    }
    seen
}

fn det_mod(g: &ModMat, m: u32) -> i64 {
    (g.a as i64 * g.d as i64 - g.b as i64 * g.c as i64).rem_euclid(m as i64)
}

/// Membership in N'_{8,2} through kappa_{8,2}: orthogonality to [6,4,0,2] and
/// [0,2,2,0] together with h0^2 - 1 = h1 + h2 mod 16.
pub fn n8_membership_by_congruence(g: &ModMat) -> bool {
    let f = Fqm::two_part(8);
    let h = kappa_d2(8, g);
    f.b_num(&h, &[6, 4, 0, 2]) == 0
        && f.b_num(&h, &[0, 2, 2, 0]) == 0
        && (h[0] as i64 * h[0] as i64 - 1 - h[1] as i64 - h[2] as i64).rem_euclid(16) == 0
}

/// The mod-16 half of the compact-subgroup lemma for one discriminant: for
/// all alpha odd and beta even mod 16, g = nu(delta)^{-1} T^{(delta-1)/2} iota(r)
/// lies in N'_{8,2}, both by direct membership and by the congruence test.
pub fn compact_check_mod16(d: i64) -> Check {
    let m = 16;
    let grp = LocalGroup2::new(8);
    let mut fails = Vec::new();
    for alpha in (1..16).step_by(2) {
        for beta in (0..16).step_by(2) {
            let i = iota_explicit(d, alpha, beta, m);
            let delta = det_mod(&i, m);
            let delta_inv = inv_mod(delta, 16).expect("odd determinant");
            let nu_inv = ModMat::new([1, 0, 0, delta_inv], m);
            let t = ModMat::new([1, (delta - 1) / 2, 0, 1], m);
            let g = nu_inv.mul(&t.mul(&i, m), m);
            let direct = grp.elements.contains(&g);
            let by_cong = n8_membership_by_congruence(&g);
            if !direct || !by_cong {
                fails.push(format!("d={d} alpha={alpha} beta={beta}: g={g:?} direct={direct} congruence={by_cong}"));
            }
        }
    }
    Check::first_failure(format!("compact lemma mod 16, d={d}"), fails)
}

/// Both halves of the compact-subgroup lemma for a pair of discriminants.
pub fn lemma_compact_check(d1: i64, d2: i64) -> Vec<Check> {
    let m = 3;
    let id = ModMat::identity(m);
    let n3 = n3_prime();
    let t = ModMat::new(MAT_T, m);
    let flip = ModMat::new([1, 0, 0, -1], m);
    let mut gens: Vec<(ModMat, ModMat)> = n3.iter().flat_map(|g| [(*g, id), (id, *g)]).collect();
    gens.push((t, t));
    gens.push((flip, flip));
    let k3 = pair_closure(&gens, m);
    let mut fails = Vec::new();
    let mut tested = 0;
    for a1 in 0..3 {
        for b1 in 0..3 {
            for a2 in 0..3 {
                for b2 in 0..3 {
                    let (i1, i2) = (iota_explicit(d1, a1, b1, m), iota_explicit(d2, a2, b2, m));
                    let (x1, x2) = (det_mod(&i1, m), det_mod(&i2, m));
                    if x1 == 0 || x1 != x2 {
                        continue;
                    }
                    tested += 1;
                    if !k3.contains(&(i1, i2)) {
                        fails.push(format!("alpha=({a1},{a2}) beta=({b1},{b2})"));
                    }
                }
            }
        }
    }
    let identity_case = n3.contains(&id) && n3.contains(&ModMat::new(MAT_NEG_I, m));
    vec![
        Check::expect(format!("compact lemma mod 3, ({d1},{d2}), {tested} cases"), fails.is_empty() && tested > 0, || {
            fails.join("; ")
        }),
        Check::expect("compact lemma mod 3: ±I in N'_3", identity_case, || "missing ±I".into()),
        compact_check_mod16(d1),
        compact_check_mod16(d2),
    ]
}

/// omega(S)^4 = 1, omega(S)^2 = e_h -> e_{-h} and (omega(S) omega(T))^3 =
/// omega(S)^2 on a few basis vectors of C[A_d]; A_24 goes through the
/// tensor split.
pub fn verify_relations(d: u32) -> Result<Vec<Check>> {
    fn run<V: WeilVector>(e: &V, minus: &V) -> [bool; 3] {
        let s2 = e.omega_s().omega_s();
        let st3 = e.omega_t().omega_s().omega_t().omega_s().omega_t().omega_s();
        [s2.omega_s().omega_s() == *e, s2 == *minus, st3 == s2]
    }
    if 24 % d != 0 {
        return Err(Error::InvalidInput(format!("d = {d} does not divide 24")));
    }
    let samples = |f: &Fqm| -> Vec<Elem> { (0..3).map(|k| f.elem((k * 7919 + 13) % f.size())).collect() };
    let mut results = Vec::new();
    if Fqm::global(d).size() <= DENSE_LIMIT {
        let f = Fqm::global(d);
        for h in samples(&f) {
            let e = FqmVector::basis(f, &h);
            results.push((h, run(&e, &FqmVector::basis(f, &f.neg(&h)))));
        }
    } else {
        let (f2, f3) = (Fqm::two_part(d), Fqm::three_part(d));
        for (h2, h3) in samples(&f2).into_iter().zip(samples(&f3)) {
            let e = TensorVector::new(FqmVector::basis(f2, &h2), FqmVector::basis(f3, &h3));
            let minus =
                TensorVector::new(FqmVector::basis(f2, &f2.neg(&h2)), FqmVector::basis(f3, &f3.neg(&h3)));
            results.push((crt_elem(&Fqm::global(d), &f2, &h2, &f3, &h3), run(&e, &minus)));
        }
    }
    let names = ["S^4 = 1", "S^2 = reflection", "(ST)^3 = S^2"];
    Ok(names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            Check::first_failure(
                format!("weil relation {name} d={d}"),
                results.iter().filter(|(_, ok)| !ok[i]).map(|(h, _)| format!("h = {h:?}")),
            )
        })
        .collect())
}

/// dim U_{d,2}^{H'} against 4, 16, 46, 118 for d_2 = 1, 2, 4, 8, and
/// dim U'_{d,2} against 3 phi(d_2).
pub fn verify_dims(d: u32) -> Result<Check> {
    let (orbits, dim_prime) = orbit_dims(d)?;
    let want = match split(d).0 {
        1 => 4,
        2 => 16,
        4 => 46,
        _ => 118,
    };
    Ok(Check::compare(
        format!("fixed-space dimensions d={d}"),
        format!("{orbits}, {dim_prime}"),
        format!("{want}, {}", expected_dim_prime(d)),
    ))
}
