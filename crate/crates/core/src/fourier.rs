//! Truncated Fourier models on the circle `R / pi Z`.
//!
//! Functions are finite sums `sum a_n e^{2 i n theta}`. Distributions are
//! stored by `a_n = L(e^{-2 i n theta})` and paired with test functions through
//! the trigonometric representative `sum a_n e^{2 i n theta}` and `(1/pi) int`.
//!
//! A tuple `(f_0, ..., f_s)` defines the distribution `phi -> (1/pi) int sum_j f_j
//! (d+1)^j phi`; with the test derivative moved onto `e^{-2 i n theta}` its
//! coefficients are `sum_j (1 - 2 i n)^j a_n(f_j)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bigfloat::BigComplex;
use crate::circle::{circle_act, Angle};
use crate::cocycle::a_matrix;
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::mat2::Mat2Q;
use crate::modular::CosetDecomposition;
use crate::par::{map_range, Exec};
use crate::scalar::Fast;

type Coeffs = BTreeMap<i64, Complex64>;

mod coeff_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Coeffs, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: BTreeMap<i64, [f64; 2]> = m.iter().map(|(k, c)| (*k, [c.re, c.im])).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Coeffs, D::Error> {
        let v = BTreeMap::<i64, [f64; 2]>::deserialize(d)?;
        Ok(v.into_iter().map(|(k, [re, im])| (k, Complex64::new(re, im))).collect())
    }
}

fn radius_of(c: &Coeffs) -> usize {
    c.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
}

fn eval_series(c: &Coeffs, theta: f64) -> Complex64 {
    c.iter().map(|(n, a)| a * Complex64::cis(2.0 * *n as f64 * theta)).sum()
}

/// `(1 - 2 i n)`: the factor one application of `1 + d/dtheta` on the test side contributes.
fn test_side_factor(n: i64) -> Complex64 {
    Complex64::new(1.0, -2.0 * n as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionClass {
    #[default]
    Plain,
    AbsSummable,
    /// `sum |n| |a_n| < infinity`.
    WClass,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierFunction {
    #[serde(with = "coeff_map")]
    pub coeffs: Coeffs,
    pub class: FunctionClass,
}

impl FourierFunction {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex64)>, class: FunctionClass) -> Result<Self> {
        let coeffs: Coeffs = coeffs.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect();
        if coeffs.values().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Precondition("non-finite Fourier coefficient".into()));
        }
        Ok(FourierFunction { coeffs, class })
    }

    pub fn zero() -> Self {
        FourierFunction::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::mode(0, c)
    }

    /// `c e^{2 i n theta}`.
    pub fn mode(n: i64, c: Complex64) -> Self {
        Self::new([(n, c)], FunctionClass::WClass).expect("finite")
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn radius(&self) -> usize {
        radius_of(&self.coeffs)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        eval_series(&self.coeffs, theta)
    }

    /// `sum |n| |a_n|`.
    pub fn weighted_l1(&self) -> f64 {
        self.coeffs.iter().map(|(n, a)| n.unsigned_abs() as f64 * a.norm()).sum()
    }

    /// `(1 + d/dtheta) f`, coefficientwise `(1 + 2 i n) a_n`.
    pub fn d_plus_one(&self) -> Self {
        let c = self.coeffs.iter().map(|(n, a)| (*n, a * Complex64::new(1.0, 2.0 * *n as f64)));
        Self::new(c, self.class).expect("finite")
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.coeffs.clone();
        for (n, a) in &o.coeffs {
            *c.entry(*n).or_default() += a;
        }
        Self::new(c, self.class.min_with(o.class)).expect("finite")
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|(n, a)| (*n, a * k)), self.class).expect("finite")
    }

    /// Largest coefficient difference.
    pub fn max_diff(&self, o: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(o.coeffs.keys())
            .map(|n| (self.coeff(*n) - o.coeff(*n)).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients from samples at `theta_k = pi k / G`, keeping `|n| <= keep`.
    /// The second value is the l1 mass of the discarded aliasing-free modes,
    /// an estimate of the truncation error.
    pub fn from_samples(samples: &[Complex64], keep: usize, class: FunctionClass) -> Result<(Self, f64)> {
        let g = samples.len();
        if g <= 4 * keep {
            return Err(Error::GridTooSmall { required: 4 * keep + 1 });
        }
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(g).process(&mut buf);
        let scale = 1.0 / g as f64;
        let at = |n: i64| buf[n.rem_euclid(g as i64) as usize] * scale;
        let k = keep as i64;
        let kept = (-k..=k).map(|n| (n, at(n)));
        let half = (g as i64 - 1) / 2;
        let tail: f64 = (k + 1..=half).map(|n| at(n).norm() + at(-n).norm()).sum();
        Ok((Self::new(kept, class)?, tail))
    }

    /// The minimum-norm trigonometric polynomial with modes `|n| <= radius`
    /// through the given points. Extra modes beyond the point count keep
    /// coefficients small when points cluster.
    pub fn interpolate(points: &[f64], values: &[Complex64], radius: usize) -> Result<Self> {
        assert_eq!(points.len(), values.len());
        if points.is_empty() {
            return Ok(Self::zero());
        }
        if 2 * radius + 1 < points.len() {
            return Err(Error::Precondition(format!("{} points need radius at least {}", points.len(), points.len() / 2)));
        }
        for (i, a) in points.iter().enumerate() {
            for b in &points[..i] {
                let d = (a - b).rem_euclid(PI);
                if d.min(PI - d) < 1e-12 {
                    return Err(Error::Precondition("interpolation points coincide modulo pi".into()));
                }
            }
        }
        // x = V^H (V V^H)^{-1} b with V[k][n] = e^{2 i n t_k}; the Gram matrix is a Dirichlet kernel
        let prec = 128;
        let r = radius as i64;
        let dirichlet = |d: f64| -> Complex64 { (-r..=r).map(|n| Complex64::cis(2.0 * n as f64 * d)).sum() };
        let gram: Vec<Vec<BigComplex>> = points
            .iter()
            .map(|tk| points.iter().map(|tl| BigComplex::from_c64(dirichlet(tk - tl), prec)).collect())
            .collect();
        let b: Vec<BigComplex> = values.iter().map(|v| BigComplex::from_c64(*v, prec)).collect();
        let y: Vec<Complex64> = solve(&gram, &b)?.iter().map(|c| c.to_c64()).collect();
        let coeffs = (-r..=r).map(|n| (n, points.iter().zip(&y).map(|(t, yk)| yk * Complex64::cis(-2.0 * n as f64 * t)).sum()));
        Self::new(coeffs, FunctionClass::WClass)
    }
}

impl FunctionClass {
    fn min_with(self, o: FunctionClass) -> FunctionClass {
        use FunctionClass::*;
        match (self, o) {
            (WClass, WClass) => WClass,
            (Plain, _) | (_, Plain) => Plain,
            _ => AbsSummable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionTuple {
    pub s: usize,
    pub components: Vec<FourierFunction>,
}

impl FunctionTuple {
    pub fn new(components: Vec<FourierFunction>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Precondition("a tuple needs at least one component".into()));
        }
        Ok(FunctionTuple { s: components.len() - 1, components })
    }

    pub fn zero(s: usize) -> Self {
        FunctionTuple { s, components: vec![FourierFunction::zero(); s + 1] }
    }

    pub fn radius(&self) -> usize {
        self.components.iter().map(|f| f.radius()).max().unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> Vec<Complex64> {
        self.components.iter().map(|f| f.eval(theta)).collect()
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        self.components.iter().zip(&o.components).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }
}

/// Coefficients `a_n = L(e^{-2 i n theta})` on a finite support.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionCoefficients {
    #[serde(with = "coeff_map")]
    pub coeffs: Coeffs,
    /// Modes beyond this radius were dropped.
    pub truncation_radius: usize,
}

impl DistributionCoefficients {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let coeffs: Coeffs = coeffs.into_iter().collect();
        let truncation_radius = radius_of(&coeffs);
        DistributionCoefficients { coeffs, truncation_radius }
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn radius(&self) -> usize {
        radius_of(&self.coeffs)
    }

    /// The trigonometric representative at `theta`.
    pub fn representative(&self, theta: f64) -> Complex64 {
        eval_series(&self.coeffs, theta)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.coeffs.clone();
        for (n, a) in &o.coeffs {
            *c.entry(*n).or_default() += a;
        }
        DistributionCoefficients { coeffs: c, truncation_radius: self.truncation_radius.max(o.truncation_radius) }
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(o.coeffs.keys())
            .map(|n| (self.coeff(*n) - o.coeff(*n)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// A grid re-expansion together with its truncation estimate.
#[derive(Clone, Debug)]
pub struct Expanded<T> {
    pub value: T,
    pub truncation: f64,
}

/// Image angle and `j` factor in double precision.
pub fn act_f64(g: &Mat2Q, theta: f64) -> (f64, f64) {
    let [a, b, c, d] = g.to_f64();
    let (cs, sn) = (theta.cos(), theta.sin());
    let x = a * cs + b * sn;
    let y = c * cs + d * sn;
    (y.atan2(x).rem_euclid(PI), x.hypot(y))
}

fn positive_det(g: &Mat2Q) -> Result<f64> {
    let det = g.det();
    if !num_traits::Signed::is_positive(&det) {
        return Err(Error::Precondition(format!("matrix {g:?} must have positive determinant")));
    }
    Ok(num_traits::ToPrimitive::to_f64(&det).unwrap_or(f64::NAN))
}

fn grid(g: usize) -> impl Iterator<Item = f64> {
    (0..g).map(move |k| PI * k as f64 / g as f64)
}

/// `F |_lambda g`: `(f_j(g.theta))_j * A_g(theta)` sampled on a grid of `grid_size` points and re-expanded.
pub fn tuple_action(f: &FunctionTuple, g: &Mat2Q, lambda: Complex64, grid_size: usize) -> Result<Expanded<FunctionTuple>> {
    positive_det(g)?;
    let required = 4 * f.radius() + 1;
    if grid_size < required {
        return Err(Error::GridTooSmall { required });
    }
    let ev = Fast { lambda };
    let s = f.s;
    let rows: Vec<Result<Vec<Complex64>>> = map_range(Exec::Parallel, grid_size, |k| {
        let theta = PI * k as f64 / grid_size as f64;
        let angle = Angle::from_f64(theta, 64);
        let image = circle_act(g, &angle)?.theta().to_f64();
        let x = f.eval(image);
        let a = a_matrix(&ev, g, &angle, s)?;
        Ok(a.m.left_apply(&x))
    });
    let rows: Vec<Vec<Complex64>> = rows.into_iter().collect::<Result<_>>()?;
    let keep = (grid_size - 1) / 4;
    let mut comps = Vec::with_capacity(s + 1);
    let mut trunc = 0.0f64;
    for l in 0..=s {
        let samples: Vec<Complex64> = rows.iter().map(|r| r[l]).collect();
        let (c, t) = FourierFunction::from_samples(&samples, keep, FunctionClass::AbsSummable)?;
        comps.push(c);
        trunc = trunc.max(t);
    }
    Ok(Expanded { value: FunctionTuple::new(comps)?, truncation: trunc })
}

/// `f |_{lambda,m} g = f(g.theta) det^{-m-lambda/2} j^{2m-1+lambda}` re-expanded on a grid.
pub fn w_action(f: &FourierFunction, g: &Mat2Q, lambda: Complex64, m: u32, grid_size: usize) -> Result<Expanded<FourierFunction>> {
    if m < 1 {
        return Err(Error::Precondition("weight index m must be at least 1".into()));
    }
    let det = positive_det(g)?;
    let required = 4 * f.radius() + 1;
    if grid_size < required {
        return Err(Error::GridTooSmall { required });
    }
    let m = m as f64;
    let dpow = (-(m + lambda / 2.0) * det.ln()).exp();
    let samples: Vec<Complex64> = grid(grid_size)
        .map(|t| {
            let (img, j) = act_f64(g, t);
            f.eval(img) * dpow * ((2.0 * m - 1.0 + lambda) * j.ln()).exp()
        })
        .collect();
    let (out, tail) = FourierFunction::from_samples(&samples, (grid_size - 1) / 4, FunctionClass::WClass)?;
    if !out.weighted_l1().is_finite() {
        return Err(Error::Internal("re-expanded function is not in the weighted class".into()));
    }
    Ok(Expanded { value: out, truncation: tail })
}

/// Coefficients of the distribution `sum_j (1 + d/dtheta)^j f_j`.
pub fn h_map(f: &FunctionTuple) -> DistributionCoefficients {
    let support: std::collections::BTreeSet<i64> = f.components.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
    DistributionCoefficients::new(support.into_iter().map(|n| {
        let w = test_side_factor(n);
        let mut acc = f.components[f.s].coeff(n);
        for j in (0..f.s).rev() {
            acc = acc * w + f.components[j].coeff(n);
        }
        (n, acc)
    }))
}

/// The tuple `(0, ..., 0, g, f)` with `h_map = 0` and last component `f`.
pub fn psi_section(f: &FourierFunction, s: usize) -> Result<FunctionTuple> {
    if s < 1 {
        return Err(Error::Precondition("psi_section needs s >= 1".into()));
    }
    let g = FourierFunction::new(f.coeffs.iter().map(|(n, a)| (*n, -(test_side_factor(*n) * a))), FunctionClass::AbsSummable)?;
    let mut t = FunctionTuple::zero(s);
    t.components[s - 1] = g;
    t.components[s] = f.clone();
    Ok(t)
}

/// The last component.
pub fn psi(f: &FunctionTuple) -> &FourierFunction {
    &f.components[f.s]
}

/// Whether `h_map(F)` vanishes to `tol`, with the largest coefficient.
pub fn v_membership(f: &FunctionTuple, tol: f64) -> (bool, f64) {
    let worst = h_map(f).max_abs();
    (worst <= tol, worst)
}

/// Options for quadrature with grid doubling.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub tol: f64,
    pub min_points: usize,
    pub max_points: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-12, min_points: 64, max_points: 1 << 20 }
    }
}

/// `L |_lambda g` on modes `|n| <= radius`, via `a'_n = L(e^{-2 i n .} |_lambda g^-1)`.
pub fn dist_action(
    l: &DistributionCoefficients,
    g: &Mat2Q,
    lambda: Complex64,
    radius: usize,
    opts: QuadOptions,
) -> Result<Expanded<DistributionCoefficients>> {
    positive_det(g)?;
    let gi = g.inverse().ok_or_else(|| Error::Precondition("singular matrix".into()))?;
    let det_inv = positive_det(&gi)?;
    let r = radius as i64;
    let pairing = |pts: usize| -> Vec<Complex64> {
        let dpow = ((1.0 + lambda / 2.0) * det_inv.ln()).exp();
        let mut acc = vec![Complex64::new(0.0, 0.0); 2 * radius + 1];
        for t in grid(pts) {
            let (img, j) = act_f64(&gi, t);
            let w = l.representative(t) * dpow * ((-1.0 - lambda) * j.ln()).exp();
            for n in -r..=r {
                acc[(n + r) as usize] += w * Complex64::cis(-2.0 * n as f64 * img);
            }
        }
        acc.iter().map(|a| a / pts as f64).collect()
    };
    let mut pts = opts.min_points.max(8 * (radius + l.radius() + 1));
    let mut prev = pairing(pts);
    loop {
        pts *= 2;
        if pts > opts.max_points {
            return Err(Error::NoConvergence(format!("distribution pairing did not reach {} with {} points", opts.tol, pts / 2)));
        }
        let next = pairing(pts);
        let err = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if err <= opts.tol {
            let out = DistributionCoefficients {
                coeffs: (-r..=r).zip(next).collect(),
                truncation_radius: radius,
            };
            return Ok(Expanded { value: out, truncation: err });
        }
        prev = next;
    }
}

/// `L | T_alpha = sum_i L |_lambda alpha_i`.
pub fn dist_hecke(
    l: &DistributionCoefficients,
    cosets: &CosetDecomposition,
    lambda: Complex64,
    radius: usize,
    opts: QuadOptions,
) -> Result<Expanded<DistributionCoefficients>> {
    let mut acc = DistributionCoefficients { coeffs: Coeffs::new(), truncation_radius: radius };
    let mut err = 0.0;
    for rep in &cosets.reps {
        let part = dist_action(l, &rep.to_q(), lambda, radius, opts)?;
        acc = acc.add(&part.value);
        err += part.truncation;
    }
    Ok(Expanded { value: acc, truncation: err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_function() -> FourierFunction {
        FourierFunction::new([(0, c(1.0, 0.0)), (1, c(0.3, -0.2)), (-2, c(0.1, 0.05)), (3, c(-0.02, 0.01))], FunctionClass::WClass).unwrap()
    }

    #[test]
    fn h_map_examples() {
        let f = sample_function();
        let h0 = h_map(&FunctionTuple::new(vec![f.clone()]).unwrap());
        for n in -3..=3 {
            assert_eq!(h0.coeff(n), f.coeff(n));
        }
        let h1 = h_map(&FunctionTuple::new(vec![FourierFunction::zero(), f.clone()]).unwrap());
        for n in -3..=3 {
            assert_eq!(h1.coeff(n), c(1.0, -2.0 * n as f64) * f.coeff(n));
        }
    }

    #[test]
    fn d_plus_one_rule() {
        let f = FourierFunction::mode(2, c(1.0, 0.0));
        assert_eq!(f.d_plus_one().coeff(2), c(1.0, 4.0));
        // pointwise: f + f' at a sample point
        let t = 0.37;
        let direct = f.eval(t) + c(0.0, 4.0) * f.eval(t);
        assert!((f.d_plus_one().eval(t) - direct).norm() < 1e-15);
    }

    #[test]
    fn psi_section_examples() {
        let z = psi_section(&FourierFunction::zero(), 2).unwrap();
        assert_eq!(z.max_diff(&FunctionTuple::zero(2)), 0.0);
        assert!(z.components.iter().all(|f| f.coeffs.is_empty()));
        let e = FourierFunction::mode(1, c(1.0, 0.0));
        let t = psi_section(&e, 1).unwrap();
        assert_eq!(t.components[0].coeff(1), -c(1.0, -2.0));
        assert_eq!(v_membership(&t, 0.0), (true, 0.0));
        assert_eq!(psi(&t), &e);
        assert!(psi_section(&e, 0).is_err());
        let (ok, worst) = v_membership(&FunctionTuple::new(vec![e.clone(), FourierFunction::zero()]).unwrap(), 1e-3);
        assert!(!ok && worst == 1.0);
    }

    #[test]
    fn reexpansion_roundtrip_and_refusal() {
        let f = sample_function();
        let samples: Vec<Complex64> = grid(64).map(|t| f.eval(t)).collect();
        let (back, tail) = FourierFunction::from_samples(&samples, 15, FunctionClass::WClass).unwrap();
        assert!(back.max_diff(&f) < 1e-15 && tail < 1e-14);
        assert!(matches!(FourierFunction::from_samples(&samples, 16, FunctionClass::WClass), Err(Error::GridTooSmall { required: 65 })));
        let t = FunctionTuple::new(vec![f]).unwrap();
        assert!(matches!(tuple_action(&t, &Mat2Q::identity(), c(0.0, 0.0), 12), Err(Error::GridTooSmall { required: 13 })));
    }

    #[test]
    fn tuple_action_examples() {
        let f = FunctionTuple::new(vec![sample_function(), sample_function().scale(c(0.0, 1.0))]).unwrap();
        let same = tuple_action(&f, &Mat2Q::identity(), c(0.4, 0.1), 256).unwrap();
        assert!(same.value.max_diff(&f) < 1e-14);

        let g = Mat2Q::from_i64(1, 0, 0, 2);
        let one = FunctionTuple::new(vec![FourierFunction::constant(c(1.0, 0.0))]).unwrap();
        let out = tuple_action(&one, &g, c(0.0, 0.0), 256).unwrap();
        for t in [0.0, 0.4, 1.3, 2.9] {
            let (_, j) = act_f64(&g, t);
            assert!((out.value.components[0].eval(t) - 1.0 / j).norm() < 1e-10);
        }
    }

    #[test]
    fn tuple_action_composes() {
        let lam = c(0.3, 0.5);
        let f = FunctionTuple::new(vec![sample_function(), sample_function().scale(c(0.5, 0.0)), FourierFunction::mode(-1, c(0.2, 0.0))]).unwrap();
        let g1 = Mat2Q::from_i64(2, 1, 1, 1);
        let g2 = Mat2Q::from_i64(1, 1, 0, 2);
        let seq = tuple_action(&tuple_action(&f, &g1, lam, 512).unwrap().value, &g2, lam, 1024).unwrap();
        let direct = tuple_action(&f, &g1.mul(&g2), lam, 1024).unwrap();
        // compare values pointwise; both are truncated expansions
        for t in [0.1, 0.8, 1.7, 2.5] {
            let a = seq.value.eval(t);
            let b = direct.value.eval(t);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn w_action_examples() {
        let f = sample_function();
        let id = w_action(&f, &Mat2Q::identity(), c(0.2, 0.0), 2, 256).unwrap();
        assert!(id.value.max_diff(&f) < 1e-14);
        let g = Mat2Q::from_i64(1, 0, 0, 2);
        let out = w_action(&FourierFunction::constant(c(1.0, 0.0)), &g, c(0.0, 0.0), 1, 256).unwrap();
        for t in [0.0, 0.7, 2.2] {
            let (_, j) = act_f64(&g, t);
            assert!((out.value.eval(t) - 0.5 * j).norm() < 1e-10);
        }
        assert!(w_action(&f, &g, c(0.0, 0.0), 0, 256).is_err());
    }

    #[test]
    fn psi_equivariance() {
        let lam = c(0.25, 0.0);
        let g = Mat2Q::from_i64(2, 1, 1, 3);
        let f = FourierFunction::new([(0, c(1.0, 0.0)), (1, c(0.2, 0.1)), (-1, c(0.05, 0.0))], FunctionClass::WClass).unwrap();
        for s in 1..=3 {
            let t = psi_section(&f, s).unwrap();
            let lhs = tuple_action(&t, &g, lam, 1024).unwrap();
            let rhs = w_action(&f, &g, lam, s as u32, 1024).unwrap();
            for th in [0.2, 1.1, 2.6] {
                assert!((psi(&lhs.value).eval(th) - rhs.value.eval(th)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn h_map_is_equivariant() {
        // h(F | g) = h(F) | g on low modes
        let lam = c(0.3, 0.2);
        let g = Mat2Q::from_i64(1, 1, 1, 2);
        let f = FunctionTuple::new(vec![sample_function(), FourierFunction::mode(1, c(0.4, -0.1)), FourierFunction::mode(0, c(0.2, 0.0))]).unwrap();
        let lhs = h_map(&tuple_action(&f, &g, lam, 2048).unwrap().value);
        let rhs = dist_action(&h_map(&f), &g, lam, 6, QuadOptions::default()).unwrap().value;
        for n in -6..=6 {
            assert!((lhs.coeff(n) - rhs.coeff(n)).norm() < 1e-8, "n={n}: {} vs {}", lhs.coeff(n), rhs.coeff(n));
        }
    }

    #[test]
    fn dist_hecke_examples() {
        let lam = c(0.7, -0.3);
        let l = DistributionCoefficients::new([(0, c(1.0, 0.0)), (2, c(0.3, 0.1)), (-1, c(-0.2, 0.0))]);
        let same = dist_hecke(&l, &CosetDecomposition::identity(3), lam, 4, QuadOptions::default()).unwrap();
        assert!(same.value.max_diff(&l) < 1e-12);

        // constant test function against (a_0 = 1): simpson oracle of det(g^-1)^{1+lam/2} j(g^-1, t)^{-1-lam}
        let g = Mat2Q::from_i64(2, 1, 1, 3);
        let one = DistributionCoefficients::new([(0, c(1.0, 0.0))]);
        let got = dist_action(&one, &g, lam, 0, QuadOptions::default()).unwrap().value.coeff(0);
        let gi = g.inverse().unwrap();
        let det_inv: f64 = 0.2;
        let n = 20000;
        let h = PI / n as f64;
        let mut simpson = c(0.0, 0.0);
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let (_, j) = act_f64(&gi, k as f64 * h);
            simpson += w * ((1.0 + lam / 2.0) * det_inv.ln()).exp() * ((-1.0 - lam) * j.ln()).exp();
        }
        simpson *= h / 3.0 / PI;
        assert!((got - simpson).norm() < 1e-10);

        let cos = crate::modular::hecke_coset_reps(1, 2).unwrap();
        let l2 = DistributionCoefficients::new([(1, c(0.0, 1.0)), (-3, c(0.5, 0.0))]);
        let a = dist_hecke(&l.add(&l2), &cos, lam, 5, QuadOptions::default()).unwrap().value;
        let b = dist_hecke(&l, &cos, lam, 5, QuadOptions::default()).unwrap().value.add(&dist_hecke(&l2, &cos, lam, 5, QuadOptions::default()).unwrap().value);
        assert!(a.max_diff(&b) < 1e-12);
    }

    #[test]
    fn interpolation_hits_points() {
        let pts = [0.0, 0.3, 1.0, 2.0];
        let vals = [c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.5), c(0.1, 0.1)];
        for radius in [2, 10] {
            let f = FourierFunction::interpolate(&pts, &vals, radius).unwrap();
            for (t, v) in pts.iter().zip(&vals) {
                assert!((f.eval(*t) - v).norm() < 1e-12);
            }
        }
        assert!(FourierFunction::interpolate(&pts, &vals, 1).is_err());
        assert!(FourierFunction::interpolate(&[0.5, 0.5 + PI, 1.0], &vals[..3], 4).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = sample_function();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"-2\":[0.1,0.05]"));
        assert_eq!(serde_json::from_str::<FourierFunction>(&s).unwrap(), f);
    }

    proptest! {
        #[test]
        fn psi_section_inverts_last_component(re in proptest::collection::vec(-1.0f64..1.0, 1..6), s in 1usize..4) {
            let f = FourierFunction::new(re.iter().enumerate().map(|(i, x)| (i as i64 - 2, c(*x, -x / 2.0))), FunctionClass::WClass).unwrap();
            let t = psi_section(&f, s).unwrap();
            prop_assert_eq!(psi(&t), &f);
            prop_assert_eq!(v_membership(&t, 0.0), (true, 0.0));
        }
    }
}
