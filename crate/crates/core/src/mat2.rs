//! 2x2 matrices over Z and Q with unbounded entries.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Integral 2x2 matrix `(a b; c d)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2Z {
    #[serde(with = "bigint_str")]
    pub a: BigInt,
    #[serde(with = "bigint_str")]
    pub b: BigInt,
    #[serde(with = "bigint_str")]
    pub c: BigInt,
    #[serde(with = "bigint_str")]
    pub d: BigInt,
}

impl Mat2Z {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Mat2Z { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// `(1 k; 0 1)`.
    pub fn translation(k: impl Into<BigInt>) -> Self {
        Self::new(1, k, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2Z {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// `(d -b; -c a)`, so that `m * m.adjugate() = det * I`.
    pub fn adjugate(&self) -> Self {
        Mat2Z { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_sl2(&self) -> Option<Self> {
        if self.det().is_one() {
            Some(self.adjugate())
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Mat2Z { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    pub fn to_q(&self) -> Mat2Q {
        Mat2Q {
            a: BigRational::from_integer(self.a.clone()),
            b: BigRational::from_integer(self.b.clone()),
            c: BigRational::from_integer(self.c.clone()),
            d: BigRational::from_integer(self.d.clone()),
        }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|x| x.abs()).max().unwrap()
    }
}

impl fmt::Debug for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rational 2x2 matrix `(a b; c d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2Q {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mat2Q {
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2Z::new(a, b, c, d).to_q()
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn scalar(q: BigRational) -> Self {
        Mat2Q { a: q.clone(), b: BigRational::zero(), c: BigRational::zero(), d: q }
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat2Q {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// `None` for singular matrices.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        Some(Mat2Q {
            a: &self.d / &det,
            b: -&self.b / &det,
            c: -&self.c / &det,
            d: &self.a / &det,
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Entries `[a, b, c, d]` rounded to `f64`.
    pub fn to_f64(&self) -> [f64; 4] {
        [&self.a, &self.b, &self.c, &self.d].map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    /// Integral matrix if every entry is an integer.
    pub fn to_z(&self) -> Option<Mat2Z> {
        let e = [&self.a, &self.b, &self.c, &self.d];
        if e.iter().all(|x| x.is_integer()) {
            Some(Mat2Z::new(
                self.a.to_integer(),
                self.b.to_integer(),
                self.c.to_integer(),
                self.d.to_integer(),
            ))
        } else {
            None
        }
    }

    /// Positive integer `k` and integral matrix `m` with `self = m / k`, `k` minimal.
    pub fn clear_denominators(&self) -> (BigInt, Mat2Z) {
        let k = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let kq = BigRational::from_integer(k.clone());
        let m = Mat2Z::new(
            (&self.a * &kq).to_integer(),
            (&self.b * &kq).to_integer(),
            (&self.c * &kq).to_integer(),
            (&self.d * &kq).to_integer(),
        );
        (k, m)
    }
}

impl fmt::Debug for Mat2Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl From<&Mat2Z> for Mat2Q {
    fn from(m: &Mat2Z) -> Self {
        m.to_q()
    }
}

pub(crate) mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_gives_det() {
        let m = Mat2Z::new(3, -7, 5, 2);
        let p = m.mul(&m.adjugate());
        assert_eq!(p, Mat2Z::new(m.det(), 0, 0, m.det()));
    }

    #[test]
    fn rational_inverse() {
        let m = Mat2Q::from_i64(1, 1, 0, 2);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let (k, z) = inv.clear_denominators();
        assert_eq!(k, BigInt::from(2));
        assert_eq!(z, Mat2Z::new(2, -1, 0, 1));
    }

    #[test]
    fn json_roundtrip() {
        let m = Mat2Z::new(9, 2, 12, 3);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"a":"9","b":"2","c":"12","d":"3"}"#);
        let back: Mat2Z = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
