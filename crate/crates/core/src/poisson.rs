//! Poisson transform of circle distributions and a finite-difference Laplacian check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::DistributionCoefficients;
use crate::par::{map_slice, Exec};

/// `b(x, y, theta) = ((cos - x sin)^2) / y + y sin^2`, positive for `y > 0`.
pub fn kernel_base(x: f64, y: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let u = c - x * s;
    u * u / y + y * s * s
}

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: Complex64,
    pub points: usize,
    /// Difference between the last two refinements.
    pub error_estimate: f64,
}

/// Periodic trapezoid rule on `[0, pi)` for `(1/pi) int f`, doubling the point
/// count (reusing earlier nodes) until two levels agree to `tol`.
pub fn periodic_mean(f: impl Fn(f64) -> Complex64, tol: f64, max_points: usize) -> Result<Quadrature> {
    let mut n = 16usize;
    let mut sum: Complex64 = (0..n).map(|k| f(PI * k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    loop {
        // new nodes are the odd multiples of pi / (2n)
        let extra: Complex64 = (0..n).map(|k| f(PI * (2 * k + 1) as f64 / (2 * n) as f64)).sum();
        sum += extra;
        n *= 2;
        let next = sum / n as f64;
        let err = (next - prev).norm();
        if err <= tol * next.norm().max(1.0) {
            return Ok(Quadrature { value: next, points: n, error_estimate: err });
        }
        if n >= max_points {
            return Err(Error::NoConvergence(format!("kernel quadrature stalled at {n} points, error {err:e}")));
        }
        prev = next;
    }
}

/// `(P_lambda L)(x + i y) = L(theta -> b^{(-1-lambda)/2})`.
pub fn poisson_eval(l: &DistributionCoefficients, lambda: Complex64, x: f64, y: f64, tol: f64) -> Result<Quadrature> {
    if y <= 0.0 || !y.is_finite() || !x.is_finite() {
        return Err(Error::Precondition(format!("point ({x}, {y}) is not in the upper half-plane")));
    }
    let e = (-1.0 - lambda) / 2.0;
    periodic_mean(|t| l.representative(t) * (e * kernel_base(x, y, t).ln()).exp(), tol, 1 << 22)
}

/// Spectral parameter `mu` of the fields `P_lambda L`, whose Laplace eigenvalue is `1/4 - mu^2`.
///
/// The kernel restricted to `theta = 0` is `y^{(1 + lambda)/2}`, so the
/// eigenvalue is `(1 - lambda^2)/4` and `mu = lambda / 2`.
pub fn field_spectral_parameter(lambda: Complex64) -> Complex64 {
    lambda / 2.0
}

/// `c_n = (1/pi) int b^{(-1-lambda)/2} e^{2 i n theta}`.
pub fn kernel_coefficient(n: i64, lambda: Complex64, x: f64, y: f64, tol: f64) -> Result<Complex64> {
    let one = DistributionCoefficients::new([(n, Complex64::new(1.0, 0.0))]);
    Ok(poisson_eval(&one, lambda, x, y, tol)?.value)
}

#[derive(Clone, Debug)]
pub struct LaplacianResidual {
    /// `max |-y^2 Delta_h g - (1/4 - lambda^2) g|` over the samples.
    pub max_residual: f64,
    pub residuals: Vec<f64>,
    /// Richardson estimate of the `O(h^2)` discretization part, from steps `h` and `2h`.
    pub discretization: f64,
}

fn stencil(field: &(impl Fn(f64, f64) -> Result<Complex64> + Sync), x: f64, y: f64, h: f64) -> Result<(Complex64, Complex64)> {
    let c = field(x, y)?;
    let lap = (field(x + h, y)? + field(x - h, y)? + field(x, y + h)? + field(x, y - h)? - 4.0 * c) / (h * h);
    Ok((c, lap))
}

/// Residual of the eigen-equation `-y^2 (g_xx + g_yy) = (1/4 - lambda^2) g`
/// with the five-point Laplacian of step `h`.
pub fn laplacian_residual(
    field: impl Fn(f64, f64) -> Result<Complex64> + Sync,
    lambda: Complex64,
    samples: &[(f64, f64)],
    h: f64,
) -> Result<LaplacianResidual> {
    if h <= 0.0 {
        return Err(Error::Precondition("step must be positive".into()));
    }
    let eig = 0.25 - lambda * lambda;
    let per: Vec<Result<(f64, f64)>> = map_slice(Exec::Parallel, samples, |&(x, y)| {
        if y - 2.0 * h <= 0.0 {
            return Err(Error::Precondition(format!("stencil at ({x}, {y}) leaves the half-plane")));
        }
        let (g, lap) = stencil(&field, x, y, h)?;
        let (_, lap2) = stencil(&field, x, y, 2.0 * h)?;
        let r = (-y * y * lap - eig * g).norm();
        let disc = (y * y * (lap2 - lap)).norm() / 3.0;
        Ok((r, disc))
    });
    let per: Vec<(f64, f64)> = per.into_iter().collect::<Result<_>>()?;
    Ok(LaplacianResidual {
        max_residual: per.iter().map(|p| p.0).fold(0.0, f64::max),
        residuals: per.iter().map(|p| p.0).collect(),
        discretization: per.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

/// `y^{1/2 + lambda}`, an exact eigenfunction with eigenvalue `1/4 - lambda^2`.
pub fn power_eigenfunction(lambda: Complex64) -> impl Fn(f64, f64) -> Result<Complex64> + Sync {
    move |_x, y| Ok(((0.5 + lambda) * y.ln()).exp())
}

/// `g.z` for a real `2 x 2` matrix of positive determinant.
pub fn mobius(g: [f64; 4], x: f64, y: f64) -> (f64, f64) {
    let [a, b, c, d] = g;
    let z = Complex64::new(x, y);
    let w = (a * z + b) / (c * z + d);
    (w.re, w.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{dist_action, QuadOptions};
    use crate::mat2::Mat2Q;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> DistributionCoefficients {
        DistributionCoefficients::new([(0, c(1.0, 0.0))])
    }

    // composite Gauss-Legendre (5 nodes per panel) on [0, pi)
    fn gauss_oracle(f: impl Fn(f64) -> f64, panels: usize) -> f64 {
        let nodes = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
        let weights = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
        let h = PI / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(weights) {
                acc += w * f(mid + x * h / 2.0) * h / 2.0;
            }
        }
        acc / PI
    }

    #[test]
    fn value_at_i_is_one() {
        let v = poisson_eval(&one(), c(0.37, 0.2), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.value - 1.0).norm() < 1e-12);
    }

    #[test]
    fn matches_independent_quadrature() {
        let v = poisson_eval(&one(), c(0.0, 0.0), 0.0, 2.0, 1e-13).unwrap().value;
        let oracle = gauss_oracle(|t| (t.cos().powi(2) / 2.0 + 2.0 * t.sin().powi(2)).powf(-0.5), 400);
        assert!((v.re - oracle).abs() < 1e-12 && v.im.abs() < 1e-15, "{v} vs {oracle}");
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(poisson_eval(&one(), c(0.0, 0.0), 0.0, -1.0, 1e-10).is_err());
    }

    #[test]
    fn closed_form_eigenfunction_is_second_order() {
        let lam = c(0.3, 0.0);
        let pts = [(0.0, 1.0), (0.3, 0.7), (-1.2, 2.5)];
        let r1 = laplacian_residual(power_eigenfunction(lam), lam, &pts, 1e-2).unwrap();
        let r2 = laplacian_residual(power_eigenfunction(lam), lam, &pts, 5e-3).unwrap();
        let c1 = r1.max_residual / 1e-4;
        let c2 = r2.max_residual / 2.5e-5;
        // O(h^2): the measured constants agree
        assert!((c1 / c2 - 1.0).abs() < 0.05, "{c1} {c2}");
        let constant = |_x: f64, _y: f64| Ok(c(1.0, 0.0));
        assert!(laplacian_residual(constant, c(0.5, 0.0), &pts, 1e-3).unwrap().max_residual < 1e-12);
        assert!(laplacian_residual(constant, c(0.0, 0.0), &pts, 1e-3).unwrap().max_residual > 0.2);
    }

    #[test]
    fn poisson_fields_are_eigenfunctions() {
        let l = DistributionCoefficients::new([(0, c(1.0, 0.0)), (1, c(0.3, 0.1)), (-2, c(0.05, 0.0))]);
        let pts = [(0.1, 1.0), (0.5, 0.6), (-0.4, 1.5)];
        for lam in [c(0.0, 0.0), c(0.3, 0.0), c(0.8, 0.0), c(0.25, 1.5)] {
            let field = |x: f64, y: f64| Ok(poisson_eval(&l, lam, x, y, 1e-10)?.value);
            let r = laplacian_residual(field, field_spectral_parameter(lam), &pts, 1e-3).unwrap();
            assert!(r.max_residual < 1e-4, "{lam}: {r:?}");
            if lam.re > 0.0 {
                // with mu = lambda the equation fails, so the check has teeth
                let wrong = laplacian_residual(field, lam, &pts, 1e-3).unwrap();
                assert!(wrong.max_residual > 1e-2, "{lam}: {wrong:?}");
            }
        }
    }

    #[test]
    fn kernel_at_zero_angle_is_a_power_of_y() {
        let lam = c(0.3, 0.2);
        let mode = kernel_base(0.4, 1.7, 0.0);
        assert!((mode - 1.0 / 1.7).abs() < 1e-15);
        let v = ((-1.0 - lam) / 2.0 * mode.ln()).exp();
        let expected = ((0.5 + field_spectral_parameter(lam)) * 1.7f64.ln()).exp();
        assert!((v - expected).norm() < 1e-14);
    }

    #[test]
    fn equivariance_under_sl2() {
        let lam = c(0.2, 0.4);
        let l = DistributionCoefficients::new([(0, c(1.0, 0.0)), (1, c(0.2, -0.1))]);
        let g = Mat2Q::from_i64(2, 1, 1, 1);
        let moved = dist_action(&l, &g, lam, 60, QuadOptions { tol: 1e-13, ..Default::default() }).unwrap().value;
        for (x, y) in [(0.1, 1.2), (-0.3, 0.8)] {
            let lhs = poisson_eval(&moved, lam, x, y, 1e-12).unwrap().value;
            let (gx, gy) = mobius(g.to_f64(), x, y);
            let rhs = poisson_eval(&l, lam, gx, gy, 1e-12).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn determinant_character_is_inverse_square_root() {
        // P(L |_lambda g)(z) = det(g)^{-1/2} P(L)(g.z) for det g != 1
        let lam = c(0.3, 0.0);
        let l = DistributionCoefficients::new([(0, c(1.0, 0.0)), (1, c(0.1, 0.0))]);
        let g = Mat2Q::from_i64(1, 0, 0, 2);
        let moved = dist_action(&l, &g, lam, 60, QuadOptions { tol: 1e-13, ..Default::default() }).unwrap().value;
        let (x, y) = (0.2, 1.1);
        let lhs = poisson_eval(&moved, lam, x, y, 1e-12).unwrap().value;
        let (gx, gy) = mobius(g.to_f64(), x, y);
        let rhs = poisson_eval(&l, lam, gx, gy, 1e-12).unwrap().value / 2f64.sqrt();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }
}
