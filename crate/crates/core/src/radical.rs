//! Exact arithmetic in the field generated over Q by square roots of positive
//! integers, and on the rational projective line.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bigfloat::BigReal;
use crate::error::{Error, Result};
use crate::mat2::Mat2Q;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Writes `n = k^2 * m` with `m` squarefree and returns `(k, m)`.
///
/// Trial division runs only while `p^3 <= remaining`; what is left then has at
/// most two prime factors, so it is either squarefree or a perfect square.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::zero());
    }
    let mut rem = n.clone();
    let mut k = BigUint::one();
    let mut m = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p * &p <= rem {
        if (&rem % &p).is_zero() {
            let mut e = 0u32;
            while (&rem % &p).is_zero() {
                rem /= &p;
                e += 1;
            }
            k *= p.pow(e / 2);
            if e % 2 == 1 {
                m *= &p;
            }
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    let r = rem.sqrt();
    if &r * &r == rem {
        k *= r;
    } else {
        m *= rem;
    }
    (k, m)
}

pub fn is_squarefree(n: &BigUint) -> bool {
    !n.is_zero() && squarefree_split(n).0.is_one()
}

/// Exact value `sum q_n * sqrt(n)` over distinct squarefree `n`.
///
/// The map never stores zero coefficients, so equal values have equal
/// representations.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct RadicalNumber {
    terms: BTreeMap<BigUint, Rational>,
}

impl RadicalNumber {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut r = Self::zero();
        r.push(BigUint::one(), q);
        r
    }

    pub fn from_i64(k: i64) -> Self {
        Self::from_rational(rat_int(k))
    }

    /// `q * sqrt(n)` for any positive integer `n`.
    pub fn term(q: Rational, n: &BigUint) -> Self {
        let (k, m) = squarefree_split(n);
        let mut r = Self::zero();
        if !m.is_zero() {
            r.push(m, q * Rational::from_integer(BigInt::from(k)));
        }
        r
    }

    /// `sqrt(q)` for a nonnegative rational `q`.
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Precondition(format!("square root of negative rational {q}")));
        }
        // sqrt(a/b) = sqrt(a*b) / b
        let prod = (q.numer() * q.denom()).to_biguint().unwrap();
        Ok(Self::term(Rational::new(BigInt::one(), q.denom().clone()), &prod))
    }

    fn push(&mut self, n: BigUint, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(n) {
            Entry::Vacant(e) => {
                e.insert(q);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    /// Every key squarefree and every coefficient nonzero.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|(n, q)| is_squarefree(n) && !q.is_zero())
    }

    pub fn neg(&self) -> Self {
        RadicalNumber { terms: self.terms.iter().map(|(n, q)| (n.clone(), -q)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (n, q) in &o.terms {
            r.push(n.clone(), q.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        RadicalNumber { terms: self.terms.iter().map(|(n, q)| (n.clone(), q * k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (m, p) in &self.terms {
            for (n, q) in &o.terms {
                let g = m.gcd(n);
                let rad = (m / &g) * (n / &g);
                r.push(rad, p * q * Rational::from_integer(BigInt::from(g)));
            }
        }
        r
    }

    /// Multiplicative inverse for elements with at most two terms.
    pub fn inv(&self) -> Result<Self> {
        let t: Vec<_> = self.terms.iter().collect();
        match t.as_slice() {
            [] => Err(Error::NotInvertible("zero radical number".into())),
            [(n, q)] => {
                // 1/(q sqrt n) = sqrt(n) / (q n)
                let nq = Rational::from_integer(BigInt::from((*n).clone()));
                Ok(Self::term(Rational::one() / (*q * nq), n))
            }
            [(n1, q1), (n2, q2)] => {
                let r1 = Rational::from_integer(BigInt::from((*n1).clone()));
                let r2 = Rational::from_integer(BigInt::from((*n2).clone()));
                let den = *q1 * *q1 * r1 - *q2 * *q2 * r2;
                let conj = Self::term((*q1).clone(), n1).sub(&Self::term((*q2).clone(), n2));
                Ok(conj.scale(&(Rational::one() / den)))
            }
            _ => Err(Error::Unsupported(format!(
                "inverse of a radical number with {} terms",
                t.len()
            ))),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow_i(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
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

    /// Sign of the real value: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else {
            rad_to_float(self, 64).signum()
        }
    }
}

/// Embeds `a` into the reals at `precision_bits` bits, to within one ulp.
///
/// Working precision grows until the accumulated rounding error is below half
/// an ulp of the result. A nonzero canonical value is never zero as a real
/// number, so the loop terminates.
pub fn rad_to_float(a: &RadicalNumber, precision_bits: usize) -> BigReal {
    let prec = precision_bits.max(53);
    if a.is_zero() {
        return BigReal::zero(prec);
    }
    let mut work = prec + 32;
    loop {
        let mut sum = BigReal::zero(work);
        let mut mag = BigReal::zero(work);
        for (n, q) in &a.terms {
            let root = BigReal::from_bigint(&BigInt::from(n.clone()), work).sqrt();
            let t = BigReal::from_rational(q, work).mul(&root);
            mag = mag.add(&t.abs());
            sum = sum.add(&t);
        }
        // each term and each addition contributes at most a few ulps of `mag`
        let slack = 4 + 2 * a.terms.len() as i32;
        let err_log2 = mag.log2_abs() - work as f64 + (slack as f64).log2();
        if !sum.is_zero() && err_log2 < sum.log2_abs() - prec as f64 - 1.0 {
            return sum.with_prec(prec);
        }
        work *= 2;
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for RadicalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (n, q)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if n.is_one() {
                write!(f, "{}", fmt_rational(q))?;
            } else {
                write!(f, "{}*sqrt({})", fmt_rational(q), n)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RadicalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    q: String,
    n: serde_json::Value,
}

impl Serialize for RadicalNumber {
    /// A list of `{"q": "p/r", "n": radicand}` objects; radicands beyond `u64` are strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(n, q)| TermRepr {
                q: fmt_rational(q),
                n: match n.to_u64() {
                    Some(k) => serde_json::Value::from(k),
                    None => serde_json::Value::from(n.to_string()),
                },
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadicalNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<TermRepr>::deserialize(d)?;
        let mut r = RadicalNumber::zero();
        for t in v {
            let q: Rational = t.q.parse().map_err(|_| D::Error::custom(format!("bad rational {}", t.q)))?;
            let n: BigUint = match &t.n {
                serde_json::Value::Number(k) => k
                    .as_u64()
                    .map(BigUint::from)
                    .ok_or_else(|| D::Error::custom("radicand must be a positive integer"))?,
                serde_json::Value::String(s) => s.parse().map_err(D::Error::custom)?,
                _ => return Err(D::Error::custom("radicand must be a number or string")),
            };
            if n.is_zero() {
                return Err(D::Error::custom("radicand must be positive"));
            }
            r = r.add(&RadicalNumber::term(q, &n));
        }
        Ok(r)
    }
}

macro_rules! rad_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&RadicalNumber> for &RadicalNumber {
            type Output = RadicalNumber;
            fn $m(self, o: &RadicalNumber) -> RadicalNumber {
                RadicalNumber::$m(self, o)
            }
        }
    };
}
rad_binop!(Add, add);
rad_binop!(Sub, sub);
rad_binop!(Mul, mul);

impl Neg for &RadicalNumber {
    type Output = RadicalNumber;
    fn neg(self) -> RadicalNumber {
        RadicalNumber::neg(self)
    }
}

/// A point `(u : v)` of the rational projective line, read as `cot(theta) = u/v`.
///
/// Canonical form: `gcd(u, v) = 1` and either `v > 0` or `(u, v) = (1, 0)`.
/// `(1 : 0)` is the angle zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slope {
    #[serde(with = "crate::mat2::bigint_str")]
    u: BigInt,
    #[serde(with = "crate::mat2::bigint_str")]
    v: BigInt,
}

impl Slope {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>) -> Result<Self> {
        let (mut u, mut v) = (u.into(), v.into());
        if u.is_zero() && v.is_zero() {
            return Err(Error::Precondition("slope (0 : 0)".into()));
        }
        let g = u.gcd(&v);
        u /= &g;
        v /= &g;
        if v.is_negative() || (v.is_zero() && u.is_negative()) {
            u = -u;
            v = -v;
        }
        Ok(Slope { u, v })
    }

    /// The angle zero, `(1 : 0)`.
    pub fn zero_angle() -> Self {
        Slope { u: BigInt::one(), v: BigInt::zero() }
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    pub fn is_zero_angle(&self) -> bool {
        self.v.is_zero()
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.u, self.v)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Image of `x` under the Moebius action on cotangents: `cot(g.theta) = (a cot + b)/(c cot + d)`.
pub fn slope_mobius(g: &Mat2Q, x: &Slope) -> Result<Slope> {
    if !g.det().is_positive() {
        return Err(Error::Precondition(format!("matrix {g:?} must have positive determinant")));
    }
    let (_, m) = g.clear_denominators();
    Slope::new(&m.a * &x.u + &m.b * &x.v, &m.c * &x.u + &m.d * &x.v)
}

/// `(cos theta, sin theta)` for the angle in `[0, pi)` with cotangent `u/v`.
pub fn slope_trig(x: &Slope) -> (RadicalNumber, RadicalNumber) {
    if x.v.is_zero() {
        return (RadicalNumber::one(), RadicalNumber::zero());
    }
    let r2 = (&x.u * &x.u + &x.v * &x.v).to_biguint().unwrap();
    // 1/sqrt(r2) = sqrt(r2)/r2
    let inv_norm = RadicalNumber::term(Rational::new(BigInt::one(), BigInt::from(r2.clone())), &r2);
    let cos = inv_norm.scale(&Rational::from_integer(x.u.clone()));
    let sin = inv_norm.scale(&Rational::from_integer(x.v.clone()));
    (cos, sin)
}
