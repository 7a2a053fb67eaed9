//! Iterated derivatives of the weight-lambda action, and the matrices lifting
//! that action to tuples of functions.
//!
//! With `D = 1 + d/dt`, the coefficient functions `u^{k,i}` satisfy
//! `D^k (phi|g)(t) = det^(1+lambda/2) * sum_i u^{k,i}(t) (D^i phi)(g.t)` and obey
//! the recursion
//!
//! ```text
//! u^{0,0}   = j^(-1-lambda)
//! u^{k+1,i} = D u^{k,i} + det * j^-2 * (u^{k,i-1} - u^{k,i})
//! ```
//!
//! They are computed as jets at one point: `u^{k,.}` needs order `s - k`.

use num_complex::Complex64;

use crate::bigfloat::{BigComplex, BigReal};
use crate::circle::{act_jet, circle_act, j2_jet, jet_pow_positive, Angle};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::mat2::Mat2Q;
use crate::matrix::Matrix;
use crate::scalar::{Evaluator, Exponent, Numeric, Scalar};

/// Jets of `u^{k,i}` for `0 <= i <= k <= s`; `rows[k][i]` has order `s - k`.
#[derive(Clone, Debug)]
pub struct UTable<V> {
    s: usize,
    rows: Vec<Vec<Jet<V>>>,
}

impl<V: Scalar> UTable<V> {
    pub fn s(&self) -> usize {
        self.s
    }

    /// Jet of `u^{k,i}`; `None` outside `i <= k <= s`.
    pub fn jet(&self, k: usize, i: usize) -> Option<&Jet<V>> {
        self.rows.get(k).and_then(|r| r.get(i))
    }

    /// Value `u^{k,i}(t)`, zero outside the table.
    pub fn value(&self, k: usize, i: usize) -> V {
        match self.jet(k, i) {
            Some(j) => j.value().clone(),
            None => self.rows[0][0].value().zero_like(),
        }
    }
}

/// Builds the `u`-table of `g` at `theta` up to level `s`.
pub fn u_table<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, s: usize) -> Result<UTable<E::V>> {
    let j2 = j2_jet(ev, g, theta, s)?;
    let seed = jet_pow_positive(ev, &j2, &Exponent::halves(-1, -1))?;
    let mut rows = vec![vec![seed]];
    if s == 0 {
        return Ok(UTable { s, rows });
    }
    let rate = j2.truncate(s - 1).recip()?.scale(&ev.rational(&g.det()));
    for k in 0..s {
        let order = s - k - 1;
        let prev = &rows[k];
        let w = rate.truncate(order);
        let zero = Jet::constant(prev[0].value().zero_like(), order);
        let next: Vec<Jet<E::V>> = (0..=k + 1)
            .map(|i| {
                let here = prev.get(i).map(|u| u.truncate(order));
                let left = if i >= 1 { Some(prev[i - 1].truncate(order)) } else { None };
                let diff = match (&left, &here) {
                    (Some(l), Some(h)) => l.sub(h),
                    (Some(l), None) => l.clone(),
                    (None, Some(h)) => h.neg(),
                    (None, None) => zero.clone(),
                };
                let mut out = w.mul(&diff);
                if let Some(u) = prev.get(i) {
                    out = out.add(&u.d_plus_one());
                }
                out
            })
            .collect();
        rows.push(next);
    }
    Ok(UTable { s, rows })
}

/// `|lhs - rhs|` for the iterated-derivative identity tested on `phi = exp(2 i m t)`.
///
/// The left side differentiates the transformed test function directly as a
/// jet; the right side uses the `u`-table.
pub fn derivative_rule_residual(g: &Mat2Q, theta: &Angle, s: usize, lambda: Complex64, m: i64, prec: usize) -> Result<BigReal> {
    let ev = Numeric::new(prec, lambda);
    let theta = theta.with_prec(prec);
    let det = ev.rational(&g.det());
    let pref = ev.pow_positive(&det, &Exponent::halves(2, 1))?;
    let two_i_m = BigComplex::new(BigReal::zero(prec), BigReal::from_i64(2 * m, prec));

    // transformed test function: det^(1+l/2) j^(-1-l) exp(2im g.t)
    let j2 = j2_jet(&ev, g, &theta, s)?;
    let weight = jet_pow_positive(&ev, &j2, &Exponent::halves(-1, -1))?;
    let act = act_jet(&ev, g, &theta, s.max(1))?;
    let image = BigComplex::real(act.image.theta().clone());
    let phase0 = two_i_m.mul(&image).exp();
    let phase = act.with_value(image).scale(&two_i_m).exp_with(phase0.clone()).truncate(s);
    let mut lhs = weight.mul(&phase).scale(&pref);
    for _ in 0..s {
        lhs = lhs.d_plus_one();
    }

    let table = u_table(&ev, g, &theta, s)?;
    let one_plus = BigComplex::one(prec).add(&two_i_m);
    let mut acc = BigComplex::zero(prec);
    let mut pw = BigComplex::one(prec);
    for i in 0..=s {
        acc = acc.add(&table.value(s, i).mul(&pw));
        pw = pw.mul(&one_plus);
    }
    let rhs = acc.mul(&phase0).mul(&pref);
    Ok(lhs.value().sub(&rhs).abs())
}

/// The `(s+1) x (s+1)` lower-triangular matrix lifting the action of `g` at `theta`.
///
/// Entry `(k, i)` is `det^(-lambda/2) j(g,t)^-2 u_{g^-1}^{k,i}(g.t)`; tuples
/// transform as `F~(t) = (f_0(g.t), ..., f_s(g.t)) * A`.
#[derive(Clone, Debug)]
pub struct AMatrix<V> {
    pub s: usize,
    pub m: Matrix<V>,
}

impl<V: Scalar> AMatrix<V> {
    pub fn get(&self, k: usize, i: usize) -> &V {
        self.m.get(k, i)
    }

    pub fn mul(&self, o: &Self) -> Self {
        AMatrix { s: self.s, m: self.m.mul(&o.m) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(AMatrix { s: self.s, m: self.m.lower_triangular_inverse()? })
    }

    /// The matrix of order `s - 1`, i.e. the leading `s x s` block.
    pub fn minor(&self) -> Option<Self> {
        (self.s > 0).then(|| AMatrix { s: self.s - 1, m: self.m.leading(self.s) })
    }
}

pub fn a_matrix<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, s: usize) -> Result<AMatrix<E::V>> {
    let gi = g
        .inverse()
        .ok_or_else(|| Error::Precondition(format!("singular matrix {g:?}")))?;
    let image = circle_act(g, &theta.with_prec(ev.angle_prec().max(theta.prec())))?;
    let table = u_table(ev, &gi, &image, s)?;
    let j2 = j2_jet(ev, g, theta, 0)?;
    let det = ev.rational(&g.det());
    let scalar = ev.pow_positive(&det, &Exponent::halves(0, -1))?.mul(&j2.value().try_inv()?);
    let m = Matrix::from_fn(s + 1, s + 1, |k, i| {
        if i > k {
            scalar.zero_like()
        } else {
            table.value(k, i).mul(&scalar)
        }
    });
    Ok(AMatrix { s, m })
}

/// The diagonal entry `(k, k)` in closed form: `det^(-k-lambda/2) j^(2k-1+lambda)`.
pub fn a_diagonal<E: Evaluator>(ev: &E, g: &Mat2Q, theta: &Angle, k: usize) -> Result<E::V> {
    let k = k as i64;
    let det = ev.rational(&g.det());
    let j2 = j2_jet(ev, g, theta, 0)?;
    let a = ev.pow_positive(&det, &Exponent::halves(-2 * k, -1))?;
    let b = ev.pow_positive(j2.value(), &Exponent::halves(2 * k - 1, 1))?;
    Ok(a.mul(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::BigComplex;
    use crate::radical::{rad_to_float, rat, RadicalNumber, Slope};
    use crate::scalar::Exact;
    use proptest::prelude::*;

    const P: usize = 128;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2Q {
        Mat2Q::from_i64(a, b, c, d)
    }

    fn ev(l: f64) -> Numeric {
        Numeric::new(P, Complex64::new(l, 0.0))
    }

    fn small(x: &BigComplex, bits: f64) -> bool {
        x.is_zero() || x.abs().log2_abs() < bits
    }

    #[test]
    fn identity_table_is_kronecker() {
        let t = u_table(&ev(0.4), &Mat2Q::identity(), &Angle::from_f64(0.9, P), 4).unwrap();
        for k in 0..=4 {
            for i in 0..=k {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((t.value(k, i).to_c64() - Complex64::new(expect, 0.0)).norm() < 1e-35);
            }
        }
    }

    #[test]
    fn first_level_by_hand() {
        // u^{1,0} = j^{-1-l} + (-1-l) j^{-2-l} j' - det j^{-3-l}
        let g = m(2, 3, -1, 4);
        let th = Angle::from_f64(1.1, P);
        let l = 0.7;
        let e = ev(l);
        let t = u_table(&e, &g, &th, 1).unwrap();
        let jj = crate::circle::j_jet(&e, &g, &th, 1).unwrap();
        let (j, dj) = (jj.coeffs()[0].re.to_f64(), jj.coeffs()[1].re.to_f64());
        let det = 11.0;
        let expect = j.powf(-1.0 - l) + (-1.0 - l) * j.powf(-2.0 - l) * dj - det * j.powf(-3.0 - l);
        assert!((t.value(1, 0).to_c64().re - expect).abs() < 1e-13);
        let seed = j.powf(-1.0 - l);
        assert!((t.value(0, 0).to_c64().re - seed).abs() < 1e-14);
    }

    #[test]
    fn residual_examples() {
        let r = derivative_rule_residual(&Mat2Q::identity(), &Angle::from_f64(0.3, P), 3, Complex64::new(0.5, 0.0), 2, P).unwrap();
        assert!(r.is_zero() || r.log2_abs() < -110.0);
        let r = derivative_rule_residual(&m(3, 1, 2, 5), &Angle::from_f64(2.0, P), 0, Complex64::new(0.2, 0.1), 3, P).unwrap();
        assert!(r.is_zero() || r.log2_abs() < -(P as f64) + 20.0);
        let r = derivative_rule_residual(&m(1, 1, 0, 2), &Angle::from_f64(0.8, P), 3, Complex64::new(0.7, 0.0), 2, P).unwrap();
        assert!(r.to_f64() < 1e-20, "{r:?}");
    }

    #[test]
    fn a_matrix_examples() {
        let th = Angle::from_f64(0.4, P);
        let a = a_matrix(&ev(0.3), &Mat2Q::identity(), &th, 3).unwrap();
        for k in 0..4 {
            for i in 0..4 {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((a.get(k, i).to_c64() - Complex64::new(expect, 0.0)).norm() < 1e-35);
            }
        }
        let g = m(1, 2, -3, 1);
        let a = a_matrix(&ev(0.3), &g, &th, 3).unwrap();
        for k in 0..4 {
            let d = a_diagonal(&ev(0.3), &g, &th, k).unwrap();
            assert!(small(&a.get(k, k).sub(&d), -110.0));
        }
        // s = 0, lambda = 0: 1/j
        let a0 = a_matrix(&ev(0.0), &g, &th, 0).unwrap();
        let j = crate::circle::j_factor(&g, &th).unwrap();
        assert!((a0.get(0, 0).re.mul(&j).to_f64() - 1.0).abs() < 1e-35);
        assert!(a.m.is_lower_triangular());
    }

    #[test]
    fn exact_closed_form_diagonal() {
        let g = m(2, 1, 1, 3);
        let th = Angle::from_slope(Slope::new(3, 2).unwrap(), P);
        let t = u_table(&Exact, &g, &th, 3).unwrap();
        let j2 = j2_jet(&Exact, &g, &th, 0).unwrap().value().clone();
        for k in 0..=3i64 {
            // j^{-1-2k} det^k
            let expect = Exact
                .pow_positive(&j2, &Exponent::halves(-1 - 2 * k, 0))
                .unwrap()
                .mul(&RadicalNumber::from_i64(5i64.pow(k as u32)));
            assert_eq!(t.value(k as usize, k as usize), expect);
        }
        assert!(matches!(
            u_table(&Exact, &g, &Angle::from_f64(0.5, P), 1),
            Err(Error::Precondition(_))
        ));
        let _ = rat(1, 1);
    }

    fn mat() -> impl Strategy<Value = Mat2Q> {
        (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6)
            .prop_filter("positive det", |(a, b, c, d)| a * d - b * c > 0)
            .prop_map(|(a, b, c, d)| m(a, b, c, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn composition_law(g1 in mat(), g2 in mat(), t in 0.0f64..std::f64::consts::PI, l in 0.0f64..1.0, s in 0usize..4) {
            let e = ev(l);
            let th = Angle::from_f64(t, P);
            let t2 = circle_act(&g2, &th).unwrap();
            let u12 = u_table(&e, &g1.mul(&g2), &th, s).unwrap();
            let u2 = u_table(&e, &g2, &th, s).unwrap();
            let u1 = u_table(&e, &g1, &t2, s).unwrap();
            for i in 0..=s {
                let mut acc = BigComplex::zero(P);
                for l in i..=s {
                    acc = acc.add(&u2.value(s, l).mul(&u1.value(l, i)));
                }
                let lhs = u12.value(s, i);
                let scale = lhs.abs().log2_abs().max(0.0);
                prop_assert!(small(&lhs.sub(&acc), -(P as f64) + 24.0 + scale));
            }
        }

        #[test]
        fn matrix_cocycle(g1 in mat(), g2 in mat(), t in 0.0f64..std::f64::consts::PI, l in 0.0f64..1.0, s in 0usize..4) {
            let e = ev(l);
            let th = Angle::from_f64(t, P);
            let t2 = circle_act(&g2, &th).unwrap();
            let lhs = a_matrix(&e, &g1.mul(&g2), &th, s).unwrap();
            let rhs = a_matrix(&e, &g1, &t2, s).unwrap().mul(&a_matrix(&e, &g2, &th, s).unwrap());
            for (x, y) in lhs.m.entries().zip(rhs.m.entries()) {
                let scale = x.abs().log2_abs().max(0.0);
                prop_assert!(small(&x.sub(y), -(P as f64) + 24.0 + scale));
            }
            if let Some(minor) = lhs.minor() {
                let direct = a_matrix(&e, &g1.mul(&g2), &th, s - 1).unwrap();
                prop_assert_eq!(minor.m, direct.m);
            }
        }

        #[test]
        fn exact_a_matrix_matches_numeric(g in mat(), u in -10i64..=10, v in 0i64..=10, s in 0usize..4) {
            prop_assume!(u != 0 || v != 0);
            let th = Angle::from_slope(Slope::new(u, v).unwrap(), P);
            let ex = a_matrix(&Exact, &g, &th, s).unwrap();
            let nu = a_matrix(&ev(0.0), &g, &th, s).unwrap();
            for (x, y) in ex.m.entries().zip(nu.m.entries()) {
                prop_assert!(x.is_canonical());
                let d = rad_to_float(x, P).sub(&y.re);
                let scale = y.re.log2_abs().max(0.0);
                prop_assert!(d.is_zero() || d.log2_abs() < -(P as f64) + 24.0 + scale);
            }
        }
    }
}
