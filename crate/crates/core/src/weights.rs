//! Complex scalars used for amplitudes, Pauli coefficients and model counts.
//!
//! [`ExactW`] is an element of the ring `Z[ω]/√2^k` with `ω = e^{iπ/4}`; every
//! weight produced by a Clifford+T encoding lives there. [`Weight`] is the
//! dual representation handed around by the encoders and the counter: exact
//! when it can be, a `Complex64` once a float operand shows up.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Numerator coefficients of `1, ω, ω², ω³`. Values that fit in `i64` are
/// always stored as `Small` so derived equality and hashing are sound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Coeffs {
    Small([i64; 4]),
    Big(Box<[BigInt; 4]>),
}

impl Coeffs {
    fn zero() -> Self {
        Coeffs::Small([0; 4])
    }

    fn from_wide(w: [i128; 4]) -> Self {
        match (
            i64::try_from(w[0]),
            i64::try_from(w[1]),
            i64::try_from(w[2]),
            i64::try_from(w[3]),
        ) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => Coeffs::Small([a, b, c, d]),
            _ => Coeffs::Big(Box::new(w.map(BigInt::from))),
        }
    }

    fn from_big(v: [BigInt; 4]) -> Self {
        let small: Option<Vec<i64>> = v.iter().map(|x| x.to_i64()).collect();
        match small {
            Some(s) => Coeffs::Small([s[0], s[1], s[2], s[3]]),
            None => Coeffs::Big(Box::new(v)),
        }
    }

    fn big(&self) -> [BigInt; 4] {
        match self {
            Coeffs::Small(s) => s.map(BigInt::from),
            Coeffs::Big(b) => (**b).clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Coeffs::Small(s) => s.iter().all(|&x| x == 0),
            Coeffs::Big(b) => b.iter().all(Zero::is_zero),
        }
    }

    fn add(&self, o: &Self) -> Self {
        if let (Coeffs::Small(x), Coeffs::Small(y)) = (self, o) {
            return Self::from_wide([0, 1, 2, 3].map(|i| x[i] as i128 + y[i] as i128));
        }
        let (x, y) = (self.big(), o.big());
        Self::from_big([0, 1, 2, 3].map(|i| &x[i] + &y[i]))
    }

    fn neg(&self) -> Self {
        match self {
            Coeffs::Small(x) => Self::from_wide(x.map(|v| -(v as i128))),
            Coeffs::Big(b) => Self::from_big(b.clone().map(|v| -v)),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        if let (Coeffs::Small(x), Coeffs::Small(y)) = (self, o) {
            let mut acc = [0i128; 4];
            let mut overflow = false;
            for i in 0..4 {
                for j in 0..4 {
                    let p = x[i] as i128 * y[j] as i128;
                    let (slot, p) = if i + j < 4 { (i + j, p) } else { (i + j - 4, -p) };
                    match acc[slot].checked_add(p) {
                        Some(v) => acc[slot] = v,
                        None => overflow = true,
                    }
                }
            }
            if !overflow {
                return Self::from_wide(acc);
            }
        }
        let (x, y) = (self.big(), o.big());
        let mut acc: [BigInt; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                let p = &x[i] * &y[j];
                if i + j < 4 {
                    acc[i + j] += p;
                } else {
                    acc[i + j - 4] -= p;
                }
            }
        }
        Self::from_big(acc)
    }

    /// Multiplication by `√2 = ω − ω³`.
    fn mul_sqrt2(&self) -> Self {
        match self {
            Coeffs::Small([a, b, c, d]) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Self::from_wide([b - d, a + c, b + d, c - a])
            }
            Coeffs::Big(v) => {
                let [a, b, c, d] = &**v;
                Self::from_big([b - d, a + c, b + d, c - a])
            }
        }
    }

    fn divisible_by_sqrt2(&self) -> bool {
        match self {
            Coeffs::Small([a, b, c, d]) => (a ^ c) & 1 == 0 && (b ^ d) & 1 == 0,
            Coeffs::Big(v) => {
                let [a, b, c, d] = &**v;
                (a - c).is_even() && (b - d).is_even()
            }
        }
    }

    /// Exact division by `√2`; caller checks [`Self::divisible_by_sqrt2`].
    fn div_sqrt2(&self) -> Self {
        match self {
            Coeffs::Small([a, b, c, d]) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Self::from_wide([(b - d) / 2, (a + c) / 2, (b + d) / 2, (c - a) / 2])
            }
            Coeffs::Big(v) => {
                let [a, b, c, d] = &**v;
                let two = BigInt::from(2);
                Self::from_big([(b - d) / &two, (a + c) / &two, (b + d) / &two, (c - a) / &two])
            }
        }
    }

    fn conj(&self) -> Self {
        match self {
            Coeffs::Small([a, b, c, d]) => {
                Self::from_wide([*a as i128, -(*d as i128), -(*c as i128), -(*b as i128)])
            }
            Coeffs::Big(v) => {
                let [a, b, c, d] = &**v;
                Self::from_big([a.clone(), -d, -c, -b])
            }
        }
    }

    fn to_f64s(&self) -> [f64; 4] {
        match self {
            Coeffs::Small(s) => s.map(|v| v as f64),
            Coeffs::Big(b) => b.clone().map(|v| v.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

/// Exact element `(a + bω + cω² + dω³) / √2^k`, kept in canonical form:
/// when `k > 0` the numerator is not divisible by `√2`, and zero is `k = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactW {
    num: Coeffs,
    k: u32,
}

impl ExactW {
    pub fn new(a: i64, b: i64, c: i64, d: i64, k: u32) -> Self {
        Self::canonical(Coeffs::Small([a, b, c, d]), k)
    }

    pub fn from_big(coeffs: [BigInt; 4], k: u32) -> Self {
        Self::canonical(Coeffs::from_big(coeffs), k)
    }

    pub fn zero() -> Self {
        ExactW { num: Coeffs::zero(), k: 0 }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        ExactW { num: Coeffs::Small([v, 0, 0, 0]), k: 0 }
    }

    /// `ω^p` for any integer power.
    pub fn omega_pow(p: i64) -> Self {
        let p = p.rem_euclid(8) as usize;
        let mut c = [0i64; 4];
        if p < 4 {
            c[p] = 1;
        } else {
            c[p - 4] = -1;
        }
        ExactW { num: Coeffs::Small(c), k: 0 }
    }

    /// `1/√2^k`.
    pub fn inv_sqrt2_pow(k: u32) -> Self {
        Self::new(1, 0, 0, 0, k)
    }

    fn canonical(mut num: Coeffs, mut k: u32) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        while k > 0 && num.divisible_by_sqrt2() {
            num = num.div_sqrt2();
            k -= 1;
        }
        ExactW { num, k }
    }

    /// Numerator coefficients `(a, b, c, d)` and the exponent `k`.
    pub fn parts(&self) -> ([BigInt; 4], u32) {
        (self.num.big(), self.k)
    }

    pub fn denominator_exp(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn lift(&self, k: u32) -> Coeffs {
        let mut n = self.num.clone();
        for _ in self.k..k {
            n = n.mul_sqrt2();
        }
        n
    }

    pub fn conj(&self) -> Self {
        ExactW { num: self.num.conj(), k: self.k }
    }

    /// `x · conj(x)`; always real.
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    pub fn to_complex(&self) -> Complex64 {
        let [a, b, c, d] = self.num.to_f64s();
        let re = a + (b - d) * FRAC_1_SQRT_2;
        let im = c + (b + d) * FRAC_1_SQRT_2;
        let scale = 2f64.powf(-(self.k as f64) / 2.0);
        Complex64::new(re * scale, im * scale)
    }

    /// True when the imaginary part is exactly zero (`c = 0`, `b = −d`).
    pub fn is_real(&self) -> bool {
        let ([_, b, c, d], _) = self.parts();
        c.is_zero() && (&b + &d).is_zero()
    }

    /// Recognises `z` as a ring element with small coefficients, if it is one.
    pub fn from_complex_approx(z: Complex64, tol: f64) -> Option<Self> {
        const MAX_K: u32 = 16;
        const MAX_S: i64 = 4096;
        for k in 0..=MAX_K {
            let scale = 2f64.powf(k as f64 / 2.0);
            let (re, im) = (z.re * scale, z.im * scale);
            let slack = tol * scale;
            let fits = |target: f64| -> Vec<(i64, i64)> {
                let bound = ((target.abs() * 2.0 + 4.0) * std::f64::consts::SQRT_2).ceil() as i64;
                let bound = bound.min(MAX_S);
                let mut out = Vec::new();
                for s in -bound..=bound {
                    let a = (target - s as f64 * FRAC_1_SQRT_2).round();
                    if (a + s as f64 * FRAC_1_SQRT_2 - target).abs() <= slack {
                        out.push((a as i64, s));
                    }
                }
                out
            };
            let re_fits = fits(re);
            if re_fits.is_empty() {
                continue;
            }
            let im_fits = fits(im);
            for &(a, s) in &re_fits {
                for &(c, t) in &im_fits {
                    if (s - t).rem_euclid(2) == 0 {
                        let b = (s + t) / 2;
                        let d = (t - s) / 2;
                        return Some(Self::new(a, b, c, d, k));
                    }
                }
            }
        }
        None
    }

    /// `a,b,c,d,k` as used in weighted-CNF files.
    pub fn to_tuple_string(&self) -> String {
        let ([a, b, c, d], k) = self.parts();
        format!("{a},{b},{c},{d},{k}")
    }
}

impl FromStr for ExactW {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::WeightSyntax(s.to_string()));
        }
        let bad = || Error::WeightSyntax(s.to_string());
        let mut coeffs: [BigInt; 4] = Default::default();
        for (slot, p) in coeffs.iter_mut().zip(&parts[..4]) {
            *slot = p.parse::<BigInt>().map_err(|_| bad())?;
        }
        let k = parts[4].parse::<u32>().map_err(|_| bad())?;
        Ok(Self::from_big(coeffs, k))
    }
}

impl fmt::Display for ExactW {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ([a, b, c, d], k) = self.parts();
        write!(f, "{a},{b},{c},{d}/√2^{k}")
    }
}

impl Add for &ExactW {
    type Output = ExactW;
    fn add(self, o: &ExactW) -> ExactW {
        let k = self.k.max(o.k);
        ExactW::canonical(self.lift(k).add(&o.lift(k)), k)
    }
}

impl Sub for &ExactW {
    type Output = ExactW;
    fn sub(self, o: &ExactW) -> ExactW {
        self + &(-o)
    }
}

impl Neg for &ExactW {
    type Output = ExactW;
    fn neg(self) -> ExactW {
        ExactW { num: self.num.neg(), k: self.k }
    }
}

impl Mul for &ExactW {
    type Output = ExactW;
    fn mul(self, o: &ExactW) -> ExactW {
        ExactW::canonical(self.num.mul(&o.num), self.k + o.k)
    }
}

/// Tagged union of an exact ring element and a complex double.
#[derive(Clone, Debug)]
pub enum Weight {
    Exact(ExactW),
    Float(Complex64),
}

impl Weight {
    pub fn zero() -> Self {
        Weight::Exact(ExactW::zero())
    }

    pub fn one() -> Self {
        Weight::Exact(ExactW::one())
    }

    pub fn int(v: i64) -> Self {
        Weight::Exact(ExactW::from_int(v))
    }

    pub fn exact(a: i64, b: i64, c: i64, d: i64, k: u32) -> Self {
        Weight::Exact(ExactW::new(a, b, c, d, k))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Weight::Float(Complex64::new(re, im))
    }

    pub fn omega_pow(p: i64) -> Self {
        Weight::Exact(ExactW::omega_pow(p))
    }

    pub fn inv_sqrt2_pow(k: u32) -> Self {
        Weight::Exact(ExactW::inv_sqrt2_pow(k))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weight::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Exact(e) => e.is_zero(),
            Weight::Float(z) => *z == Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Weight::Exact(e) => e.to_complex(),
            Weight::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Weight {
        Weight::Float(self.to_complex())
    }

    pub fn as_exact(&self) -> Option<&ExactW> {
        match self {
            Weight::Exact(e) => Some(e),
            Weight::Float(_) => None,
        }
    }

    pub fn conj(&self) -> Weight {
        match self {
            Weight::Exact(e) => Weight::Exact(e.conj()),
            Weight::Float(z) => Weight::Float(z.conj()),
        }
    }

    pub fn norm_sq(&self) -> Weight {
        match self {
            Weight::Exact(e) => Weight::Exact(e.norm_sq()),
            Weight::Float(z) => Weight::Float(Complex64::new(z.norm_sqr(), 0.0)),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// `|x − y| ≤ tol` after promotion; exact pairs compare exactly at `tol = 0`.
    pub fn approx_eq(&self, other: &Weight, tol: f64) -> bool {
        if let (Weight::Exact(a), Weight::Exact(b)) = (self, other) {
            if tol == 0.0 {
                return a == b;
            }
        }
        (self.to_complex() - other.to_complex()).norm() <= tol
    }

    /// Converts floats back into the ring when they are recognisably exact.
    pub fn exactify(&self, tol: f64) -> Weight {
        match self {
            Weight::Exact(_) => self.clone(),
            Weight::Float(z) => ExactW::from_complex_approx(*z, tol)
                .map(Weight::Exact)
                .unwrap_or_else(|| self.clone()),
        }
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => a == b,
            (Weight::Float(a), Weight::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Weight {}

impl Hash for Weight {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Weight::Exact(e) => {
                0u8.hash(state);
                e.hash(state);
            }
            Weight::Float(z) => {
                1u8.hash(state);
                // -0.0 and 0.0 compare equal, so hash them alike
                (z.re + 0.0).to_bits().hash(state);
                (z.im + 0.0).to_bits().hash(state);
            }
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Exact(e) => write!(f, "{e}"),
            Weight::Float(z) => {
                if z.im.is_sign_negative() {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

macro_rules! weight_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Weight {
            type Output = Weight;
            fn $method(self, o: &Weight) -> Weight {
                match (self, o) {
                    (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a $op b),
                    _ => Weight::Float(self.to_complex() $op o.to_complex()),
                }
            }
        }
        impl $trait for Weight {
            type Output = Weight;
            fn $method(self, o: Weight) -> Weight {
                &self $op &o
            }
        }
    };
}

weight_binop!(Add, add, +);
weight_binop!(Sub, sub, -);
weight_binop!(Mul, mul, *);

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        match self {
            Weight::Exact(e) => Weight::Exact(-e),
            Weight::Float(z) => Weight::Float(-z),
        }
    }
}

impl From<f64> for Weight {
    fn from(v: f64) -> Self {
        Weight::float(v, 0.0)
    }
}

impl From<Complex64> for Weight {
    fn from(z: Complex64) -> Self {
        Weight::Float(z)
    }
}

impl From<ExactW> for Weight {
    fn from(e: ExactW) -> Self {
        Weight::Exact(e)
    }
}

/// Arithmetic shared by dense matrices and the counter, so both can run
/// on exact ring elements, complex doubles, or the tagged [`Weight`].
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_complex(&self) -> Complex64;
    fn to_weight(&self) -> Weight;
    fn from_weight(w: &Weight) -> Option<Self>;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Scalar for ExactW {
    fn zero() -> Self {
        ExactW::zero()
    }
    fn one() -> Self {
        ExactW::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        ExactW::conj(self)
    }
    fn is_zero(&self) -> bool {
        ExactW::is_zero(self)
    }
    fn to_complex(&self) -> Complex64 {
        ExactW::to_complex(self)
    }
    fn to_weight(&self) -> Weight {
        Weight::Exact(self.clone())
    }
    fn from_weight(w: &Weight) -> Option<Self> {
        w.as_exact().cloned()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_weight(&self) -> Weight {
        Weight::Float(*self)
    }
    fn from_weight(w: &Weight) -> Option<Self> {
        Some(w.to_complex())
    }
}

impl Scalar for Weight {
    fn zero() -> Self {
        Weight::zero()
    }
    fn one() -> Self {
        Weight::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Weight::conj(self)
    }
    fn is_zero(&self) -> bool {
        Weight::is_zero(self)
    }
    fn to_complex(&self) -> Complex64 {
        Weight::to_complex(self)
    }
    fn to_weight(&self) -> Weight {
        self.clone()
    }
    fn from_weight(w: &Weight) -> Option<Self> {
        Some(w.clone())
    }
}

/// Integer power of two as an exact weight: `2^e = √2^{2e}` for negative `e`.
pub fn pow2(e: i32) -> Weight {
    if e >= 0 {
        Weight::Exact(ExactW::from_big([BigInt::one() << e as usize, BigInt::zero(), BigInt::zero(), BigInt::zero()], 0))
    } else {
        Weight::inv_sqrt2_pow((-2 * e) as u32)
    }
}
