//! Scalar fields used by the jet and matrix code, and the evaluation modes
//! that supply mode-specific primitives (trig values at a point, real powers).
//!
//! Three modes exist: arbitrary-precision complex ([`Numeric`]), exact radicals
//! at lambda = 0 ([`Exact`]), and a double-precision fast path ([`Fast`]).

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::bigfloat::{BigComplex, BigReal};
use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::radical::{rat, RadicalNumber, Rational};

/// Field operations shared by all coefficient types.
///
/// Constants are produced "like" an existing value so that numeric types can
/// inherit its precision.
pub trait Scalar: Clone + Send + Sync + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_q(&self, q: &Rational) -> Self;
    fn try_inv(&self) -> Result<Self>;
    fn is_exact_zero(&self) -> bool;

    fn rational_like(&self, q: &Rational) -> Self {
        self.one_like().scale_q(q)
    }
}

impl Scalar for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        BigComplex::one(self.prec())
    }
    fn add(&self, o: &Self) -> Self {
        BigComplex::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        BigComplex::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        BigComplex::mul(self, o)
    }
    fn neg(&self) -> Self {
        BigComplex::neg(self)
    }
    fn scale_q(&self, q: &Rational) -> Self {
        if q.is_integer() {
            if let Some(k) = q.numer().to_i64() {
                return self.mul_i64(k);
            }
        }
        self.scale(&BigReal::from_rational(q, self.prec()))
    }
    fn try_inv(&self) -> Result<Self> {
        self.inv().ok_or_else(|| Error::NotInvertible("zero complex number".into()))
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::zero()
    }
    fn one_like(&self) -> Self {
        Complex64::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_q(&self, q: &Rational) -> Self {
        self * q.to_f64().unwrap_or(f64::NAN)
    }
    fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::NotInvertible("zero complex number".into()))
        } else {
            Ok(self.inv())
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for RadicalNumber {
    fn zero_like(&self) -> Self {
        RadicalNumber::zero()
    }
    fn one_like(&self) -> Self {
        RadicalNumber::one()
    }
    fn add(&self, o: &Self) -> Self {
        RadicalNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RadicalNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RadicalNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        RadicalNumber::neg(self)
    }
    fn scale_q(&self, q: &Rational) -> Self {
        self.scale(q)
    }
    fn try_inv(&self) -> Result<Self> {
        self.inv()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Exponent of the form `r + k * lambda / 2` with `r` rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub r: Rational,
    pub half_lambda: i64,
}

impl Exponent {
    pub fn new(r: Rational, half_lambda: i64) -> Self {
        Exponent { r, half_lambda }
    }

    pub fn int(k: i64) -> Self {
        Exponent::new(rat(k, 1), 0)
    }

    /// `r/2 + k * lambda / 2`.
    pub fn halves(r: i64, half_lambda: i64) -> Self {
        Exponent::new(rat(r, 2), half_lambda)
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        Exponent::new(&self.r + &o.r, self.half_lambda + o.half_lambda)
    }

    pub fn scale(&self, k: i64) -> Exponent {
        Exponent::new(&self.r * Rational::from_integer(k.into()), self.half_lambda * k)
    }
}

/// Mode-specific primitives used by the generic jet, cocycle and matrix code.
pub trait Evaluator: Sync {
    type V: Scalar;

    fn rational(&self, q: &Rational) -> Self::V;

    /// The exponent `r + k lambda / 2` as a scalar.
    fn exponent(&self, e: &Exponent) -> Self::V;

    /// `x^e` for a positive real `x`, principal branch.
    fn pow_positive(&self, x: &Self::V, e: &Exponent) -> Result<Self::V>;

    /// `(cos 2 theta, sin 2 theta)` at the angle.
    fn double_angle_trig(&self, theta: &Angle) -> Result<(Self::V, Self::V)>;

    /// Precision used to represent angles produced along the way.
    fn angle_prec(&self) -> usize;

    fn one(&self) -> Self::V {
        self.rational(&Rational::one())
    }

    fn zero(&self) -> Self::V {
        self.rational(&Rational::zero())
    }
}

/// Arbitrary-precision complex evaluation at a fixed bit precision.
#[derive(Clone, Debug)]
pub struct Numeric {
    pub prec: usize,
    pub lambda: BigComplex,
}

impl Numeric {
    pub fn new(prec: usize, lambda: Complex64) -> Self {
        Numeric { prec, lambda: BigComplex::from_c64(lambda, prec) }
    }

    pub fn with_lambda(prec: usize, lambda: BigComplex) -> Self {
        Numeric { prec, lambda: lambda.with_prec(prec) }
    }
}

impl Evaluator for Numeric {
    type V = BigComplex;

    fn rational(&self, q: &Rational) -> BigComplex {
        BigComplex::from_rational(q, self.prec)
    }

    fn exponent(&self, e: &Exponent) -> BigComplex {
        let r = self.rational(&e.r);
        if e.half_lambda == 0 {
            return r;
        }
        r.add(&self.lambda.mul_i64(e.half_lambda).div_i64(2))
    }

    fn pow_positive(&self, x: &BigComplex, e: &Exponent) -> Result<BigComplex> {
        if x.re.signum() <= 0 || !x.im.is_zero() {
            return Err(Error::Precondition(format!("power base {x:?} is not a positive real")));
        }
        if e.half_lambda == 0 && e.r.is_integer() {
            if let Some(k) = e.r.numer().to_i64() {
                return pow_int(x, k);
            }
        }
        let ln = BigComplex::real(x.re.ln());
        Ok(self.exponent(e).mul(&ln).exp())
    }

    fn double_angle_trig(&self, theta: &Angle) -> Result<(BigComplex, BigComplex)> {
        let t2 = theta.theta().with_prec(self.prec).mul_i64(2);
        Ok((BigComplex::real(t2.cos()), BigComplex::real(t2.sin())))
    }

    fn angle_prec(&self) -> usize {
        self.prec
    }
}

fn pow_int<V: Scalar>(x: &V, k: i64) -> Result<V> {
    let base = if k < 0 { x.try_inv()? } else { x.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = x.one_like();
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    Ok(acc)
}

/// Exact evaluation in the radical field; lambda is zero and angles must carry slopes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exact;

impl Evaluator for Exact {
    type V = RadicalNumber;

    fn rational(&self, q: &Rational) -> RadicalNumber {
        RadicalNumber::from_rational(q.clone())
    }

    fn exponent(&self, e: &Exponent) -> RadicalNumber {
        RadicalNumber::from_rational(e.r.clone())
    }

    fn pow_positive(&self, x: &RadicalNumber, e: &Exponent) -> Result<RadicalNumber> {
        let two_r = &e.r * Rational::from_integer(2.into());
        if !two_r.is_integer() {
            return Err(Error::Unsupported(format!("exact power with exponent {}", e.r)));
        }
        let n = two_r.numer().to_i64().ok_or_else(|| Error::Unsupported("huge exponent".into()))?;
        if n % 2 == 0 {
            return x.pow_i(n / 2);
        }
        let q = x
            .as_rational()
            .ok_or_else(|| Error::Unsupported(format!("exact square root of irrational {x}")))?;
        RadicalNumber::sqrt_rational(&q)?.pow_i(n)
    }

    fn double_angle_trig(&self, theta: &Angle) -> Result<(RadicalNumber, RadicalNumber)> {
        let s = theta
            .slope()
            .ok_or_else(|| Error::Precondition("exact mode needs an angle with rational cotangent".into()))?;
        let (u, v) = (s.u(), s.v());
        let r = Rational::from_integer(u * u + v * v);
        let c = Rational::from_integer(u * u - v * v) / &r;
        let sn = Rational::from_integer(u * v * 2) / &r;
        Ok((RadicalNumber::from_rational(c), RadicalNumber::from_rational(sn)))
    }

    fn angle_prec(&self) -> usize {
        128
    }
}

/// Double-precision evaluation for grid work where 1e-10 accuracy is plenty.
#[derive(Clone, Copy, Debug)]
pub struct Fast {
    pub lambda: Complex64,
}

impl Evaluator for Fast {
    type V = Complex64;

    fn rational(&self, q: &Rational) -> Complex64 {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn exponent(&self, e: &Exponent) -> Complex64 {
        self.rational(&e.r) + self.lambda * (e.half_lambda as f64 / 2.0)
    }

    fn pow_positive(&self, x: &Complex64, e: &Exponent) -> Result<Complex64> {
        if x.re <= 0.0 || x.im != 0.0 {
            return Err(Error::Precondition(format!("power base {x} is not a positive real")));
        }
        if e.half_lambda == 0 && e.r.is_integer() {
            if let Some(k) = e.r.numer().to_i32() {
                return Ok(Complex64::new(x.re.powi(k), 0.0));
            }
        }
        Ok((self.exponent(e) * x.re.ln()).exp())
    }

    fn double_angle_trig(&self, theta: &Angle) -> Result<(Complex64, Complex64)> {
        let t2 = 2.0 * theta.theta().to_f64();
        Ok((Complex64::new(t2.cos(), 0.0), Complex64::new(t2.sin(), 0.0)))
    }

    fn angle_prec(&self) -> usize {
        64
    }
}
