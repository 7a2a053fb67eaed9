//! Truncated Taylor expansions at a point.
//!
//! Coefficient `k` stores `f^(k)(t0) / k!`. Binary operations truncate to the
//! smaller of the two orders.

use crate::error::{Error, Result};
use crate::radical::{rat, Rational};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<V> {
    coeffs: Vec<V>,
}

impl<V: Scalar> Jet<V> {
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<V>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { coeffs }
    }

    pub fn constant(v: V, order: usize) -> Self {
        let z = v.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = v;
        Jet { coeffs }
    }

    /// The jet of `t -> v + t` (the identity shifted to `v`).
    pub fn variable(v: V, order: usize) -> Self {
        let mut j = Self::constant(v, order);
        if order >= 1 {
            j.coeffs[1] = j.coeffs[0].one_like();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[V] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<V> {
        self.coeffs
    }

    pub fn value(&self) -> &V {
        &self.coeffs[0]
    }

    /// `f^(k)(t0)`, i.e. coefficient `k` times `k!`.
    pub fn derivative_value(&self, k: usize) -> V {
        let mut f = Rational::from_integer(1.into());
        for i in 2..=k {
            f *= Rational::from_integer(i.into());
        }
        self.coeffs[k].scale_q(&f)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&V, &V) -> V) -> Self {
        Jet { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, k: &V) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|a| a.mul(k)).collect() }
    }

    pub fn scale_q(&self, q: &Rational) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|a| a.scale_q(q)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len().min(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = self.coeffs[0].mul(&o.coeffs[k]);
                for i in 1..=k {
                    acc = acc.add(&self.coeffs[i].mul(&o.coeffs[k - i]));
                }
                acc
            })
            .collect();
        Jet { coeffs }
    }

    /// `d/dt`; the order drops by one. A constant jet differentiates to an order-0 zero.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Jet { coeffs: vec![self.coeffs[0].zero_like()] };
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].scale_q(&rat(k as i64, 1)))
            .collect();
        Jet { coeffs }
    }

    /// `f + f'`; the order drops by one.
    pub fn d_plus_one(&self) -> Self {
        let d = self.derivative();
        if self.order() == 0 {
            return d;
        }
        self.truncate(self.order() - 1).add(&d)
    }

    /// Antiderivative with constant term `c0`; the order grows by one.
    pub fn integrate(&self, c0: V) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a.scale_q(&rat(1, k as i64 + 1)));
        }
        Jet { coeffs }
    }

    /// `f^e` given the exponent `e` as a scalar and the value `f(t0)^e`.
    ///
    /// Uses `f * (f^e)' = e f' f^e`, so only `1 / f(t0)` is needed beyond `c0`.
    pub fn pow_with(&self, e: &V, c0: V) -> Result<Self> {
        let a = &self.coeffs;
        let inv_a0 = a[0]
            .try_inv()
            .map_err(|_| Error::Precondition("power of a jet with zero value".into()))?;
        let mut c = Vec::with_capacity(a.len());
        c.push(c0);
        for k in 1..a.len() {
            let mut acc = c[0].zero_like();
            for i in 1..=k {
                // (e*i - (k - i)) a_i c_{k-i}
                let w = e.scale_q(&rat(i as i64, 1)).sub(&e.rational_like(&rat((k - i) as i64, 1)));
                acc = acc.add(&w.mul(&a[i]).mul(&c[k - i]));
            }
            c.push(acc.mul(&inv_a0).scale_q(&rat(1, k as i64)));
        }
        Ok(Jet { coeffs: c })
    }

    /// `1 / f`.
    pub fn recip(&self) -> Result<Self> {
        let a = &self.coeffs;
        let inv_a0 = a[0].try_inv()?;
        let mut c = Vec::with_capacity(a.len());
        c.push(inv_a0.clone());
        for k in 1..a.len() {
            let mut acc = a[1].mul(&c[k - 1]);
            for i in 2..=k {
                acc = acc.add(&a[i].mul(&c[k - i]));
            }
            c.push(acc.mul(&inv_a0).neg());
        }
        Ok(Jet { coeffs: c })
    }

    /// `exp(f)` given `exp(f(t0))`.
    pub fn exp_with(&self, c0: V) -> Self {
        let a = &self.coeffs;
        let mut c = Vec::with_capacity(a.len());
        c.push(c0);
        for k in 1..a.len() {
            let mut acc = c[0].zero_like();
            for i in 1..=k {
                acc = acc.add(&a[i].scale_q(&rat(i as i64, 1)).mul(&c[k - i]));
            }
            c.push(acc.scale_q(&rat(1, k as i64)));
        }
        Jet { coeffs: c }
    }

    /// `g(f(t))` where `g_jet` is the jet of `g` at `f(t0)`.
    pub fn compose(g_jet: &Self, f: &Self) -> Self {
        let n = f.coeffs.len().min(g_jet.coeffs.len());
        // Horner in the shifted series h = f - f(t0), which has no constant term.
        let mut h = f.truncate(n - 1);
        h.coeffs[0] = h.coeffs[0].zero_like();
        let mut acc = Jet::constant(g_jet.coeffs[n - 1].clone(), n - 1);
        for k in (0..n - 1).rev() {
            acc = acc.mul(&h);
            acc.coeffs[0] = acc.coeffs[0].add(&g_jet.coeffs[k]);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exp_and_log_roundtrip() {
        // f = 2 + t + t^2/3 ; (f^0.5)^2 = f and exp of a series matches e^{t} coefficients
        let f = Jet::new(vec![c(2.0), c(1.0), c(1.0 / 3.0), c(0.0), c(0.0)]);
        let half = c(0.5);
        let r = f.pow_with(&half, c(2f64.sqrt())).unwrap();
        let back = r.mul(&r);
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
        let t = Jet::variable(c(0.0), 5);
        let e = t.exp_with(c(1.0));
        let mut fact = 1.0;
        for k in 0..=5 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((e.coeffs()[k] - c(1.0 / fact)).norm() < 1e-15);
        }
    }

    #[test]
    fn recip_matches_power() {
        let f = Jet::new(vec![c(3.0), c(-1.0), c(0.5), c(2.0)]);
        let a = f.recip().unwrap();
        let b = f.pow_with(&c(-1.0), c(1.0 / 3.0)).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-15);
        }
        let one = f.mul(&a);
        assert!((one.coeffs()[0] - c(1.0)).norm() < 1e-15);
        for k in 1..=3 {
            assert!(one.coeffs()[k].norm() < 1e-15);
        }
    }

    #[test]
    fn derivative_and_integral() {
        let f = Jet::new(vec![c(1.0), c(2.0), c(3.0), c(4.0)]);
        let d = f.derivative();
        assert_eq!(d.coeffs(), &[c(2.0), c(6.0), c(12.0)]);
        assert_eq!(d.integrate(c(1.0)), f);
        assert_eq!(f.d_plus_one().coeffs(), &[c(3.0), c(8.0), c(15.0)]);
        assert_eq!(f.derivative_value(3), c(24.0));
    }

    proptest! {
        #[test]
        fn compose_sin_of_shift(a in -1.0f64..1.0, b in 0.1f64..2.0) {
            // sin(a + b t) via composition against the closed form
            let order = 6;
            let f = Jet::new(vec![c(a), c(b), c(0.0), c(0.0), c(0.0), c(0.0), c(0.0)]);
            let mut g = Vec::new();
            let mut fact = 1.0;
            for k in 0..=order {
                if k > 0 { fact *= k as f64; }
                let d = match k % 4 { 0 => a.sin(), 1 => a.cos(), 2 => -a.sin(), _ => -a.cos() };
                g.push(c(d / fact));
            }
            let h = Jet::compose(&Jet::new(g.clone()), &f);
            for k in 0..=order {
                let expect = g[k] * b.powi(k as i32);
                prop_assert!((h.coeffs()[k] - expect).norm() < 1e-12);
            }
        }

        #[test]
        fn product_rule(xs in proptest::collection::vec(-2.0f64..2.0, 5), ys in proptest::collection::vec(-2.0f64..2.0, 5)) {
            let f = Jet::new(xs.iter().map(|&x| c(x)).collect());
            let g = Jet::new(ys.iter().map(|&x| c(x)).collect());
            let lhs = f.mul(&g).derivative();
            let rhs = f.derivative().mul(&g.truncate(3)).add(&f.truncate(3).mul(&g.derivative()));
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
