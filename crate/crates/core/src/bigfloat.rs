//! Arbitrary-precision real and complex scalars.
//!
//! Thin wrappers around `astro_float_num::BigFloat` that carry their working
//! precision with them, so arithmetic reads like ordinary operator code. Binary
//! operations run at the larger of the two operand precisions and round to
//! nearest-even. Transcendental constants are cached per thread.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float_num::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("allocate constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Real number at a fixed binary precision.
#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN produced at {prec} bits");
        BigReal { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(i: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(i, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, prec), prec)
    }

    /// Rounds an arbitrary integer to `prec` bits.
    pub fn from_bigint(i: &BigInt, prec: usize) -> Self {
        if i.is_zero() {
            return Self::zero(prec);
        }
        let (sign, digits) = i.to_u64_digits();
        let e = (64 * digits.len()) as i32;
        let mut v = BigFloat::from_words(&digits, if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos }, e);
        v.set_precision(prec, RM).expect("set precision");
        Self::wrap(v, prec)
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        let n = Self::from_bigint(q.numer(), prec + 64);
        let d = Self::from_bigint(q.denom(), prec + 64);
        n.div(&d).with_prec(prec)
    }

    pub fn pi(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Same value re-rounded (or exactly extended) to `prec` bits.
    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("set precision");
        Self::wrap(v, prec)
    }

    fn p2(&self, o: &Self) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.add(&o.v, p, RM), p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.sub(&o.v, p, RM), p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.mul(&o.v, p, RM), p)
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.p2(o);
        Self::wrap(self.v.div(&o.v, p, RM), p)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, self.prec))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self.div(&Self::from_i64(k, self.prec))
    }

    pub fn neg(&self) -> Self {
        Self::wrap(BigFloat::neg(&self.v), self.prec)
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn sin(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.sin(p, RM, cc)), p)
    }

    pub fn cos(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.cos(p, RM, cc)), p)
    }

    pub fn atan(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.atan(p, RM, cc)), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    /// Natural logarithm; `self` must be positive.
    pub fn ln(&self) -> Self {
        let p = self.prec;
        Self::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn signum(&self) -> i32 {
        if self.v.is_zero() {
            0
        } else if self.v.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent()
        }
    }

    /// `log2 |x|` rounded down-ish; large negative for zero. Used for tolerance checks.
    pub fn log2_abs(&self) -> f64 {
        match self.exponent() {
            None => f64::NEG_INFINITY,
            Some(e) => {
                let m = self.abs().mantissa_f64();
                e as f64 + m.log2()
            }
        }
    }

    // mantissa in [0.5, 1)
    fn mantissa_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((m, _, _, _, _)) if !m.is_empty() => {
                let top = m[m.len() - 1] as f64 / 2f64.powi(64);
                let next = if m.len() > 1 { m[m.len() - 2] as f64 / 2f64.powi(128) } else { 0.0 };
                top + next
            }
            _ => 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.exponent() {
            None => 0.0,
            Some(e) => {
                let m = self.mantissa_f64();
                let mag = if e > 1100 {
                    f64::INFINITY
                } else if e < -1100 {
                    0.0
                } else {
                    m * 2f64.powi(e)
                };
                if self.is_negative() {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    /// `2^k` at precision `prec`.
    pub fn pow2(k: i32, prec: usize) -> Self {
        let mut v = BigFloat::from_i64(1, prec);
        v.set_exponent(k + 1);
        Self::wrap(v, prec)
    }

    /// Decimal scientific notation with enough digits to identify the value at its precision.
    pub fn to_decimal(&self) -> String {
        if self.v.is_zero() {
            return "0".to_string();
        }
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).expect("format")
    }

    /// Decimal string rounded to `digits` significant digits.
    pub fn to_decimal_digits(&self, digits: usize) -> String {
        let full = self.to_decimal();
        round_decimal(&full, digits)
    }

    pub fn parse(s: &str, prec: usize) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        if v.is_nan() {
            None
        } else {
            Some(Self::wrap(v, prec))
        }
    }
}

// Rounds a string like "-1.2345e+3" to `digits` significant digits without
// re-entering floating point.
fn round_decimal(s: &str, digits: usize) -> String {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (mant, exp) = match body.find('e') {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let mut ds: Vec<u8> = ip.bytes().chain(fp.bytes()).map(|b| b - b'0').collect();
    let mut exp10 = exp + ip.len() as i64 - 1;
    while ds.len() > 1 && ds[0] == 0 {
        ds.remove(0);
        exp10 -= 1;
    }
    if ds.len() > digits {
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && *ds.last().unwrap() == 0 {
        ds.pop();
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        out.push('.');
        out.extend(ds[1..].iter().map(|d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{exp10}"));
    out
}

impl PartialEq for BigReal {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_digits(24))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, o: &BigReal) -> BigReal {
                BigReal::$m(self, o)
            }
        }
    };
}
real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::neg(self)
    }
}

/// Complex number with [`BigReal`] parts.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex { re, im: BigReal::zero(p) }
    }

    pub fn zero(prec: usize) -> Self {
        Self::real(BigReal::zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Self::real(BigReal::one(prec))
    }

    pub fn from_i64(k: i64, prec: usize) -> Self {
        Self::real(BigReal::from_i64(k, prec))
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        Self::real(BigReal::from_rational(q, prec))
    }

    pub fn from_c64(z: Complex64, prec: usize) -> Self {
        BigComplex::new(BigReal::from_f64(z.re, prec), BigReal::from_f64(z.im, prec))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        BigComplex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn i(prec: usize) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::one(prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        BigComplex::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigComplex::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            let p = self.prec().max(o.prec());
            return BigComplex::new(&self.re * &o.re, BigReal::zero(p));
        }
        BigComplex::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    pub fn scale(&self, r: &BigReal) -> Self {
        BigComplex::new(&self.re * r, &self.im * r)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigComplex::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        BigComplex::new(self.re.div_i64(k), self.im.div_i64(k))
    }

    pub fn neg(&self) -> Self {
        BigComplex::new(-&self.re, -&self.im)
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `None` when `self` is exactly zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            let p = self.prec();
            return Some(BigComplex::new(&BigReal::one(p) / &self.re, BigReal::zero(p)));
        }
        let d = self.norm_sqr();
        Some(BigComplex::new(&self.re / &d, &(-&self.im) / &d))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|oi| self.mul(&oi))
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        if self.im.is_zero() {
            let p = r.prec();
            return BigComplex::new(r, BigReal::zero(p));
        }
        BigComplex::new(&r * &self.im.cos(), &r * &self.im.sin())
    }

    /// Principal logarithm of a nonzero number.
    pub fn ln(&self) -> Self {
        if self.im.is_zero() && !self.re.is_negative() {
            let p = self.prec();
            return BigComplex::new(self.re.ln(), BigReal::zero(p));
        }
        BigComplex::new(self.norm_sqr().ln().div_i64(2), arg(&self.re, &self.im))
    }

    /// Principal power `self^e`; `self` must be nonzero.
    pub fn powc(&self, e: &Self) -> Self {
        e.mul(&self.ln()).exp()
    }

    pub fn sqrt(&self) -> Self {
        if self.im.is_zero() && !self.re.is_negative() {
            let p = self.prec();
            return BigComplex::new(self.re.sqrt(), BigReal::zero(p));
        }
        let half = BigComplex::real(BigReal::one(self.prec()).div_i64(2));
        self.powc(&half)
    }

    pub fn max_abs_component(&self) -> BigReal {
        let a = self.re.abs();
        let b = self.im.abs();
        if a >= b {
            a
        } else {
            b
        }
    }
}

/// `atan2(y, x)` in `(-pi, pi]`.
pub fn arg(x: &BigReal, y: &BigReal) -> BigReal {
    let p = x.prec().max(y.prec());
    if x.is_zero() && y.is_zero() {
        return BigReal::zero(p);
    }
    let pi = BigReal::pi(p);
    if x.abs() >= y.abs() {
        let t = (y / x).atan();
        if x.is_negative() {
            if y.is_negative() {
                &t - &pi
            } else {
                &t + &pi
            }
        } else {
            t
        }
    } else {
        let half_pi = pi.div_i64(2);
        let t = (x / y).atan();
        if y.is_negative() {
            &(-&half_pi) - &t
        } else {
            &half_pi - &t
        }
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        BigComplex::add(self, o)
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        BigComplex::sub(self, o)
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        BigComplex::mul(self, o)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::neg(self)
    }
}

/// Absolute value of a rational as a big float, used for tolerance bookkeeping.
pub fn rational_abs_f64(q: &BigRational) -> f64 {
    BigReal::from_rational(&q.abs(), 64).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_roundtrip() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let r = BigReal::from_bigint(&big, 256);
        assert_eq!(r.to_decimal_digits(30), "1.2345678901234567890123456789e29");
        let neg = BigReal::from_bigint(&-big, 256);
        assert!(neg.is_negative());
    }

    #[test]
    fn to_f64_matches() {
        for &x in &[1.0, -2.5, std::f64::consts::PI, 1e-30, 6.02e23, -7.0 / 3.0] {
            assert_eq!(BigReal::from_f64(x, 128).to_f64(), x);
        }
        assert_eq!(BigReal::zero(128).to_f64(), 0.0);
    }

    #[test]
    fn arg_quadrants() {
        let p = 128;
        let c = |x: i64, y: i64| arg(&BigReal::from_i64(x, p), &BigReal::from_i64(y, p)).to_f64();
        assert!((c(1, 1) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((c(-1, 1) - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((c(-1, -1) + 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((c(0, 2) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((c(-3, 0) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn complex_power_identity() {
        let p = 160;
        let z = BigComplex::new(BigReal::from_i64(3, p), BigReal::from_i64(-2, p));
        let e = BigComplex::new(BigReal::from_f64(0.7, p), BigReal::from_f64(0.2, p));
        let lhs = z.powc(&e).mul(&z.powc(&e.neg()));
        let err = lhs.sub(&BigComplex::one(p)).abs();
        assert!(err.log2_abs() < -150.0, "{:?}", err);
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(round_decimal("9.999e+0", 3), "1e1");
        assert_eq!(round_decimal("-1.23456e-3", 4), "-1.235e-3");
        assert_eq!(round_decimal("2.5e+0", 4), "2.5e0");
        assert_eq!(BigReal::from_i64(5, 128).div_i64(2).to_decimal_digits(20), "2.5e0");
    }
}
