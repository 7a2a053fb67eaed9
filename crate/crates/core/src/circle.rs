//! The action of GL2+(R) on the circle R/piZ.
//!
//! For `g = (a b; c d)` the factor `j(g, t)` is the length of
//! `(a cos t + b sin t, c cos t + d sin t)` and `g.t` is the direction of that
//! vector, taken in `[0, pi)`. Points with rational cotangent are tracked
//! exactly through their [`Slope`].

use std::fmt;

use crate::bigfloat::{arg, BigReal};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::mat2::Mat2Q;
use crate::radical::{rat, slope_mobius, Rational, Slope};
use crate::scalar::{Evaluator, Exponent, Scalar};

/// A point of the circle, `0 <= theta < pi`, optionally tagged with its exact slope.
#[derive(Clone)]
pub struct Angle {
    theta: BigReal,
    slope: Option<Slope>,
}

impl Angle {
    /// Reduces `theta` into `[0, pi)`.
    pub fn new(theta: BigReal) -> Self {
        Angle { theta: reduce_mod_pi(&theta), slope: None }
    }

    pub fn from_f64(theta: f64, prec: usize) -> Self {
        Self::new(BigReal::from_f64(theta, prec))
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_slope(Slope::zero_angle(), prec)
    }

    pub fn from_slope(s: Slope, prec: usize) -> Self {
        let theta = if s.is_zero_angle() {
            BigReal::zero(prec)
        } else {
            arg(&BigReal::from_bigint(s.u(), prec), &BigReal::from_bigint(s.v(), prec))
        };
        Angle { theta, slope: Some(s) }
    }

    pub fn theta(&self) -> &BigReal {
        &self.theta
    }

    pub fn slope(&self) -> Option<&Slope> {
        self.slope.as_ref()
    }

    pub fn prec(&self) -> usize {
        self.theta.prec()
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        match &self.slope {
            Some(s) => Self::from_slope(s.clone(), prec),
            None => Angle { theta: self.theta.with_prec(prec), slope: None },
        }
    }

    /// Equality of circle points: exact on slopes, otherwise within `2^(-p/2)` modulo pi.
    pub fn approx_eq(&self, o: &Angle) -> bool {
        if let (Some(a), Some(b)) = (&self.slope, &o.slope) {
            return a == b;
        }
        let p = self.prec().min(o.prec());
        let pi = BigReal::pi(p);
        let mut d = self.theta.sub(&o.theta).abs();
        let alt = pi.sub(&d);
        if alt < d {
            d = alt;
        }
        d.is_zero() || d.log2_abs() < -(p as f64) / 2.0
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.slope {
            Some(s) => write!(f, "Angle({:?} cot={:?})", self.theta, s),
            None => write!(f, "Angle({:?})", self.theta),
        }
    }
}

fn reduce_mod_pi(t: &BigReal) -> BigReal {
    let p = t.prec();
    let pi = BigReal::pi(p + 16);
    let k = (t.to_f64() / std::f64::consts::PI).floor();
    let mut r = if k == 0.0 || !k.is_finite() {
        t.with_prec(p + 16)
    } else {
        t.with_prec(p + 16).sub(&pi.mul(&BigReal::from_f64(k, 64)))
    };
    while r.is_negative() {
        r = r.add(&pi);
    }
    while r >= pi {
        r = r.sub(&pi);
    }
    r.with_prec(p)
}

fn entries(g: &Mat2Q, p: usize) -> [BigReal; 4] {
    [&g.a, &g.b, &g.c, &g.d].map(|x| BigReal::from_rational(x, p))
}

fn image_vector(g: &Mat2Q, theta: &BigReal) -> (BigReal, BigReal) {
    let p = theta.prec();
    let [a, b, c, d] = entries(g, p);
    let (cs, sn) = (theta.cos(), theta.sin());
    (a.mul(&cs).add(&b.mul(&sn)), c.mul(&cs).add(&d.mul(&sn)))
}

fn check_det(g: &Mat2Q) -> Result<()> {
    if num_traits::Signed::is_positive(&g.det()) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("matrix {g:?} must have positive determinant")))
    }
}

/// `j(g, theta)` at the precision of the angle.
pub fn j_factor(g: &Mat2Q, theta: &Angle) -> Result<BigReal> {
    check_det(g)?;
    let (x, y) = image_vector(g, theta.theta());
    Ok(x.mul(&x).add(&y.mul(&y)).sqrt())
}

/// `g.theta` in `[0, pi)`; a slope tag is carried through exactly.
pub fn circle_act(g: &Mat2Q, theta: &Angle) -> Result<Angle> {
    check_det(g)?;
    if let Some(s) = theta.slope() {
        return Ok(Angle::from_slope(slope_mobius(g, s)?, theta.prec()));
    }
    let (x, y) = image_vector(g, theta.theta());
    Ok(Angle::new(arg(&x, &y)))
}

/// Jet of `t -> j(g, t)^2`, a trigonometric polynomial in `2t`.
pub fn j2_jet<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, order: usize) -> Result<Jet<E::V>> {
    check_det(g)?;
    // j^2 = A + B cos 2t + C sin 2t
    let p = &g.a * &g.a + &g.c * &g.c;
    let q = &g.a * &g.b + &g.c * &g.d;
    let r = &g.b * &g.b + &g.d * &g.d;
    let half = rat(1, 2);
    let ca = (&p + &r) * &half;
    let cb = (&p - &r) * &half;
    let (c2, s2) = ev.double_angle_trig(theta)?;
    let b = ev.rational(&cb);
    let c = ev.rational(&q);
    let even = b.mul(&c2).add(&c.mul(&s2));
    let odd = c.mul(&c2).sub(&b.mul(&s2));
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(ev.rational(&ca).add(&even));
    let mut w = Rational::from_integer(1.into());
    for k in 1..=order {
        // w = 2^k / k!
        w *= rat(2, k as i64);
        let sign = if (k / 2) % 2 == 0 { w.clone() } else { -w.clone() };
        let base = if k % 2 == 0 { &even } else { &odd };
        coeffs.push(base.scale_q(&sign));
    }
    Ok(Jet::new(coeffs))
}

/// Raises a jet with positive real value to `e = r + k lambda/2`.
pub fn jet_pow_positive<E: Evaluator>(ev: &E, f: &Jet<E::V>, e: &Exponent) -> Result<Jet<E::V>> {
    let c0 = ev.pow_positive(f.value(), e)?;
    f.pow_with(&ev.exponent(e), c0)
}

/// Jet of `t -> j(g, t)` via a truncated square root of the `j^2` jet.
pub fn j_jet<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, order: usize) -> Result<Jet<E::V>> {
    let j2 = j2_jet(ev, g, theta, order)?;
    jet_pow_positive(ev, &j2, &Exponent::halves(1, 0))
}

/// Jet of `t -> g.t` around `theta`, using the continuous local lift of the image.
///
/// The value is an angle rather than a field element, so it is kept apart from
/// the higher coefficients.
#[derive(Clone, Debug)]
pub struct ActJet<V> {
    pub image: Angle,
    /// Jet of the derivative `det g / j(g, t)^2`; coefficient `k` of the full jet is `rate[k-1] / k`.
    pub rate: Jet<V>,
}

impl<V: Scalar> ActJet<V> {
    /// Full jet with constant term `c0`, usually the image angle in the scalar field.
    pub fn with_value(&self, c0: V) -> Jet<V> {
        self.rate.integrate(c0)
    }

    /// Coefficient `k >= 1` of the jet.
    pub fn coeff(&self, k: usize) -> V {
        self.rate.coeffs()[k - 1].scale_q(&rat(1, k as i64))
    }
}

/// Image point and derivative data of `t -> g.t`; `order >= 1`.
pub fn act_jet<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, order: usize) -> Result<ActJet<E::V>> {
    let order = order.max(1);
    let j2 = j2_jet(ev, g, theta, order - 1)?;
    let rate = j2.recip()?.scale(&ev.rational(&g.det()));
    let image = circle_act(g, &theta.with_prec(ev.angle_prec().max(theta.prec())))?;
    Ok(ActJet { image, rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radical::{rad_to_float, RadicalNumber};
    use crate::scalar::{Exact, Numeric};
    use num_complex::Complex64;
    use proptest::prelude::*;

    const P: usize = 128;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2Q {
        Mat2Q::from_i64(a, b, c, d)
    }

    fn close(x: &BigReal, y: f64, tol: f64) -> bool {
        (x.to_f64() - y).abs() < tol
    }

    #[test]
    fn j_examples() {
        for t in [0.0, 0.4, 2.0, 3.1] {
            assert!(close(&j_factor(&Mat2Q::identity(), &Angle::from_f64(t, P)).unwrap(), 1.0, 1e-30));
        }
        let g = m(1, 0, 0, 2);
        assert!(close(&j_factor(&g, &Angle::zero(P)).unwrap(), 1.0, 1e-30));
        let half_pi = Angle::from_slope(Slope::new(0, 1).unwrap(), P);
        assert!(close(&j_factor(&g, &half_pi).unwrap(), 2.0, 1e-30));
        assert!(j_factor(&m(0, 1, 1, 0), &half_pi).is_err());
    }

    #[test]
    fn act_examples() {
        let t = Angle::from_f64(0.7, P);
        assert!(circle_act(&Mat2Q::identity(), &t).unwrap().approx_eq(&t));
        let r = circle_act(&m(0, -1, 1, 0), &Angle::from_f64(0.0, P)).unwrap();
        assert!(close(r.theta(), std::f64::consts::FRAC_PI_2, 1e-30));
        let quarter = Angle::new(BigReal::pi(P).div_i64(4));
        let r = circle_act(&m(1, 0, 0, 2), &quarter).unwrap();
        assert!(close(r.theta(), 1.1071487177940904, 1e-15));
        // tagged path agrees with the numeric path
        let tagged = Angle::from_slope(Slope::new(1, 1).unwrap(), P);
        let r2 = circle_act(&m(1, 0, 0, 2), &tagged).unwrap();
        assert_eq!(r2.slope(), Some(&Slope::new(1, 2).unwrap()));
        assert!(r2.approx_eq(&r));
    }

    #[test]
    fn j_jet_examples() {
        let ev = Numeric::new(P, Complex64::new(0.0, 0.0));
        let id = j_jet(&ev, &Mat2Q::identity(), &Angle::from_f64(1.0, P), 3).unwrap();
        assert!(close(&id.coeffs()[0].re, 1.0, 1e-30));
        for c in &id.coeffs()[1..] {
            assert!(c.abs().to_f64() < 1e-35);
        }
        let u = m(1, 1, 0, 1);
        let jj = j_jet(&Exact, &u, &Angle::zero(P), 1).unwrap();
        assert_eq!(jj.coeffs(), &[RadicalNumber::one(), RadicalNumber::one()]);
        let at_half_pi = j_jet(&Exact, &u, &Angle::from_slope(Slope::new(0, 1).unwrap(), P), 0).unwrap();
        assert_eq!(at_half_pi.value().to_string(), "1*sqrt(2)");
    }

    #[test]
    fn act_jet_examples() {
        let ev = Numeric::new(P, Complex64::new(0.0, 0.0));
        let a = act_jet(&ev, &Mat2Q::identity(), &Angle::from_f64(0.5, P), 3).unwrap();
        assert!(close(&a.coeff(1).re, 1.0, 1e-30));
        assert!(a.coeff(2).abs().to_f64() < 1e-35);
        let a = act_jet(&Exact, &m(1, 0, 0, 2), &Angle::zero(P), 1).unwrap();
        assert_eq!(a.coeff(1), RadicalNumber::from_i64(2));
        let a = act_jet(&Exact, &m(2, 0, 0, 1), &Angle::zero(P), 1).unwrap();
        assert_eq!(a.coeff(1), RadicalNumber::from_rational(rat(1, 2)));
    }

    #[test]
    fn scalar_matrix_exact() {
        let g = Mat2Q::scalar(rat(3, 7));
        let t = Angle::from_slope(Slope::new(-4, 9).unwrap(), P);
        let jj = j_jet(&Exact, &g, &t, 2).unwrap();
        assert_eq!(jj.coeffs()[0], RadicalNumber::from_rational(rat(3, 7)));
        assert!(jj.coeffs()[1].is_zero() && jj.coeffs()[2].is_zero());
    }

    fn mat() -> impl Strategy<Value = Mat2Q> {
        (-10i64..=10, -10i64..=10, -10i64..=10, -10i64..=10)
            .prop_filter("positive det", |(a, b, c, d)| a * d - b * c > 0)
            .prop_map(|(a, b, c, d)| m(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cocycle_action_inverse(g1 in mat(), g2 in mat(), t in 0.0f64..std::f64::consts::PI) {
            let th = Angle::from_f64(t, P);
            let tol = -(P as f64) + 16.0;
            let g12 = g1.mul(&g2);
            let t2 = circle_act(&g2, &th).unwrap();
            let lhs = j_factor(&g12, &th).unwrap();
            let rhs = j_factor(&g1, &t2).unwrap().mul(&j_factor(&g2, &th).unwrap());
            prop_assert!(lhs.sub(&rhs).log2_abs() < tol + lhs.log2_abs().max(0.0));
            let a = circle_act(&g12, &th).unwrap();
            let b = circle_act(&g1, &t2).unwrap();
            prop_assert!(a.approx_eq(&b));
            let inv = g2.inverse().unwrap();
            let prod = j_factor(&inv, &t2).unwrap().mul(&j_factor(&g2, &th).unwrap());
            prop_assert!(prod.sub(&BigReal::one(P)).log2_abs() < tol);
        }

        #[test]
        fn exact_matches_numeric(g in mat(), u in -10i64..=10, v in 0i64..=10) {
            prop_assume!(u != 0 || v != 0);
            let s = Slope::new(u, v).unwrap();
            let th = Angle::from_slope(s, P);
            let ev = Numeric::new(P, Complex64::new(0.0, 0.0));
            let ex = j_jet(&Exact, &g, &th, 4).unwrap();
            let nu = j_jet(&ev, &g, &th, 4).unwrap();
            for (a, b) in ex.coeffs().iter().zip(nu.coeffs()) {
                prop_assert!(a.is_canonical());
                let d = rad_to_float(a, P).sub(&b.re);
                let scale = b.re.log2_abs().max(0.0);
                prop_assert!(d.log2_abs() < -(P as f64) + 24.0 + scale, "{:?} vs {:?}", a, b);
            }
        }

        #[test]
        fn j_jet_derivative_matches_finite_difference(g in mat(), t in 0.1f64..3.0) {
            let ev = Numeric::new(P, Complex64::new(0.0, 0.0));
            let th = Angle::from_f64(t, P);
            let jj = j_jet(&ev, &g, &th, 2).unwrap();
            let h = BigReal::from_f64(1e-12, P);
            let t0 = BigReal::from_f64(t, P);
            let jp = j_factor(&g, &Angle::new(t0.add(&h))).unwrap();
            let jm = j_factor(&g, &Angle::new(t0.sub(&h))).unwrap();
            let fd = jp.sub(&jm).div_i64(2).div(&h).to_f64();
            let d1 = jj.coeffs()[1].re.to_f64();
            prop_assert!((fd - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        }
    }
}
