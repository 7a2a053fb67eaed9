//! Dense eigenvalue computations in arbitrary precision.
//!
//! Eigenvalues come from balancing, Householder reduction to Hessenberg form
//! and shifted complex QR. Each eigenvalue is then refined into an eigenpair by
//! inverse iteration at twice the precision, which yields the residual and a
//! first-order error radius from the left/right eigenvector condition number.

use crate::bigfloat::{BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

type Cm = Vec<Vec<BigComplex>>;

fn to_rows(m: &Matrix<BigComplex>, prec: usize) -> Cm {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.with_prec(prec)).collect()).collect()
}

fn abs1(x: &BigComplex) -> BigReal {
    x.re.abs().add(&x.im.abs())
}

fn frobenius(a: &Cm) -> BigReal {
    let p = a[0][0].prec();
    let mut s = BigReal::zero(p);
    for row in a {
        for x in row {
            s = s.add(&x.norm_sqr());
        }
    }
    s.sqrt()
}

// Scales rows and columns by powers of two so that row and column norms are comparable.
fn balance(a: &mut Cm) {
    let n = a.len();
    let mut done = false;
    let mut rounds = 0;
    while !done && rounds < 50 {
        done = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0f64;
            let mut r = 0.0f64;
            for j in 0..n {
                if j != i {
                    c += abs1(&a[j][i]).to_f64();
                    r += abs1(&a[i][j]).to_f64();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 0i32;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f += 1;
            }
            while cc > rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f -= 1;
            }
            if f != 0 && (cc + rr) < 0.95 * (c + r) {
                done = false;
                let p = a[0][0].prec();
                let up = BigReal::pow2(f, p);
                let down = BigReal::pow2(-f, p);
                for j in 0..n {
                    a[j][i] = a[j][i].scale(&up);
                    a[i][j] = a[i][j].scale(&down);
                }
            }
        }
    }
}

fn hessenberg(a: &mut Cm) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let p = a[0][0].prec();
    for k in 0..n - 2 {
        let mut norm2 = BigReal::zero(p);
        for row in a.iter().skip(k + 1) {
            norm2 = norm2.add(&row[k].norm_sqr());
        }
        if norm2.is_zero() {
            continue;
        }
        let norm = norm2.sqrt();
        let x0 = a[k + 1][k].clone();
        let x0abs = x0.abs();
        let phase = if x0abs.is_zero() { BigComplex::one(p) } else { x0.scale(&BigReal::one(p).div(&x0abs)) };
        // v = x + phase*norm*e1, H = I - 2 v v* / (v* v)
        let mut v: Vec<BigComplex> = (k + 1..n).map(|i| a[i][k].clone()).collect();
        v[0] = v[0].add(&phase.scale(&norm));
        let mut vv = BigReal::zero(p);
        for x in &v {
            vv = vv.add(&x.norm_sqr());
        }
        let two_over = BigReal::from_i64(2, p).div(&vv);
        // left: A <- A - v (2/vv) (v* A)
        for j in 0..n {
            let mut dot = BigComplex::zero(p);
            for (t, vi) in v.iter().enumerate() {
                dot = dot.add(&vi.conj().mul(&a[k + 1 + t][j]));
            }
            let dot = dot.scale(&two_over);
            for (t, vi) in v.iter().enumerate() {
                a[k + 1 + t][j] = a[k + 1 + t][j].sub(&vi.mul(&dot));
            }
        }
        // right: A <- A - (A v)(2/vv) v*
        for row in a.iter_mut() {
            let mut dot = BigComplex::zero(p);
            for (t, vi) in v.iter().enumerate() {
                dot = dot.add(&row[k + 1 + t].mul(vi));
            }
            let dot = dot.scale(&two_over);
            for (t, vi) in v.iter().enumerate() {
                row[k + 1 + t] = row[k + 1 + t].sub(&dot.mul(&vi.conj()));
            }
        }
        for row in a.iter_mut().skip(k + 2) {
            row[k] = BigComplex::zero(p);
        }
    }
}

// Givens rotation (c real, s complex) mapping (x, y) to (r, 0).
fn givens(x: &BigComplex, y: &BigComplex) -> (BigReal, BigComplex) {
    let p = x.prec();
    let ax = x.abs();
    let r = ax.mul(&ax).add(&y.norm_sqr()).sqrt();
    if r.is_zero() {
        return (BigReal::one(p), BigComplex::zero(p));
    }
    if ax.is_zero() {
        return (BigReal::zero(p), BigComplex::one(p));
    }
    let c = ax.div(&r);
    let s = x.scale(&BigReal::one(p).div(&ax)).mul(&y.conj()).scale(&BigReal::one(p).div(&r));
    (c, s)
}

fn wilkinson_shift(a: &BigComplex, b: &BigComplex, c: &BigComplex, d: &BigComplex) -> BigComplex {
    // eigenvalue of [[a, b], [c, d]] closest to d
    let p = a.prec();
    let half = BigReal::one(p).div_i64(2);
    let tr_half = a.add(d).scale(&half);
    let diff_half = a.sub(d).scale(&half);
    let disc = diff_half.mul(&diff_half).add(&b.mul(c)).sqrt();
    let l1 = tr_half.add(&disc);
    let l2 = tr_half.sub(&disc);
    if l1.sub(d).abs() <= l2.sub(d).abs() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix at precision `prec`.
pub fn eigenvalues(m: &Matrix<BigComplex>, prec: usize) -> Result<Vec<BigComplex>> {
    let n = m.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut h = to_rows(m, prec);
    balance(&mut h);
    hessenberg(&mut h);
    let eps_log2 = -(prec as f64) + 4.0;
    let mut out = vec![BigComplex::zero(prec); n];
    let mut hi = n as isize - 1;
    let mut iter_since = 0usize;
    let mut total = 0usize;
    let cap = 100 * n.max(4);
    while hi >= 0 {
        let hiu = hi as usize;
        if hiu == 0 {
            out[0] = h[0][0].clone();
            break;
        }
        // find the start of the unreduced block ending at hi
        let mut l = hiu;
        while l > 0 {
            let sub = h[l][l - 1].abs();
            let diag = h[l][l].abs().add(&h[l - 1][l - 1].abs());
            let small = sub.is_zero() || (!diag.is_zero() && sub.log2_abs() < diag.log2_abs() + eps_log2) || (diag.is_zero() && sub.log2_abs() < eps_log2);
            if small {
                h[l][l - 1] = BigComplex::zero(prec);
                break;
            }
            l -= 1;
        }
        if l == hiu {
            out[hiu] = h[hiu][hiu].clone();
            hi -= 1;
            iter_since = 0;
            continue;
        }
        total += 1;
        iter_since += 1;
        if total > cap {
            return Err(Error::NoConvergence(format!("QR iteration exceeded {cap} steps at {prec} bits")));
        }
        let mu = if iter_since % 11 == 10 {
            // exceptional shift
            h[hiu][hiu].add(&BigComplex::real(h[hiu][hiu - 1].abs().mul(&BigReal::from_f64(0.75, prec))))
        } else {
            wilkinson_shift(&h[hiu - 1][hiu - 1], &h[hiu - 1][hiu], &h[hiu][hiu - 1], &h[hiu][hiu])
        };
        for k in l..=hiu {
            h[k][k] = h[k][k].sub(&mu);
        }
        let mut rots = Vec::with_capacity(hiu - l);
        for k in l..hiu {
            let (c, s) = givens(&h[k][k], &h[k + 1][k]);
            for j in k..=hiu {
                let x = h[k][j].clone();
                let y = h[k + 1][j].clone();
                h[k][j] = x.scale(&c).add(&s.mul(&y));
                h[k + 1][j] = y.scale(&c).sub(&s.conj().mul(&x));
            }
            rots.push((c, s));
        }
        for (t, (c, s)) in rots.iter().enumerate() {
            let k = l + t;
            for row in h.iter_mut().take((k + 2).min(hiu + 1)).skip(l) {
                let x = row[k].clone();
                let y = row[k + 1].clone();
                row[k] = x.scale(c).add(&s.conj().mul(&y));
                row[k + 1] = y.scale(c).sub(&s.mul(&x));
            }
        }
        for k in l..=hiu {
            h[k][k] = h[k][k].add(&mu);
        }
    }
    Ok(out)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Cm, b: &[BigComplex]) -> Result<Vec<BigComplex>> {
    let n = a.len();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| abs1(&m[i][k]).partial_cmp(&abs1(&m[j][k])).unwrap())
            .unwrap();
        if m[piv][k].is_zero() {
            return Err(Error::NotInvertible("singular system".into()));
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        let inv = m[k][k].inv().unwrap();
        for i in k + 1..n {
            let f = m[i][k].mul(&inv);
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                m[i][j] = m[i][j].sub(&f.mul(&m[k][j]));
            }
            rhs[i] = rhs[i].sub(&f.mul(&rhs[k]));
        }
    }
    let mut x = vec![BigComplex::zero(b[0].prec()); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.mul(&m[i][i].inv().unwrap());
    }
    Ok(x)
}

fn norm2(v: &[BigComplex]) -> BigReal {
    let mut s = BigReal::zero(v[0].prec());
    for x in v {
        s = s.add(&x.norm_sqr());
    }
    s.sqrt()
}

fn normalize(v: &mut [BigComplex]) {
    let n = norm2(v);
    if n.is_zero() {
        return;
    }
    let inv = BigReal::one(n.prec()).div(&n);
    for x in v.iter_mut() {
        *x = x.scale(&inv);
    }
}

fn mat_vec(a: &Cm, v: &[BigComplex]) -> Vec<BigComplex> {
    a.iter()
        .map(|row| {
            let mut acc = BigComplex::zero(v[0].prec());
            for (x, y) in row.iter().zip(v) {
                acc = acc.add(&x.mul(y));
            }
            acc
        })
        .collect()
}

fn inverse_iteration(a: &Cm, lambda: &BigComplex, tiny: &BigReal) -> Result<Vec<BigComplex>> {
    let n = a.len();
    let p = lambda.prec();
    let shift = lambda.add(&BigComplex::real(tiny.clone()));
    let mut shifted = a.clone();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] = row[i].sub(&shift);
    }
    // deterministic start vector with no special structure
    let mut v: Vec<BigComplex> = (0..n)
        .map(|i| BigComplex::new(BigReal::one(p), BigReal::from_f64(0.1 * ((i * 7 % 5) as f64 + 1.0), p)))
        .collect();
    normalize(&mut v);
    for _ in 0..3 {
        v = match solve(&shifted, &v) {
            Ok(x) => x,
            Err(_) => {
                // exactly singular at the shifted point: nudge further
                let mut s2 = shifted.clone();
                for (i, row) in s2.iter_mut().enumerate() {
                    row[i] = row[i].sub(&BigComplex::real(tiny.clone()));
                }
                solve(&s2, &v)?
            }
        };
        normalize(&mut v);
    }
    Ok(v)
}

/// One eigenvalue with its certificate data.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: BigComplex,
    /// `||A v - value v|| / ||v||` at twice the working precision.
    pub residual: BigReal,
    /// Error radius: condition number times residual plus a rounding allowance.
    pub radius: BigReal,
    pub condition: f64,
}

/// Eigenvalues with residuals and error radii.
pub fn eigenpairs(m: &Matrix<BigComplex>, prec: usize) -> Result<Vec<EigenPair>> {
    let n = m.rows();
    let vals = eigenvalues(m, prec)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let p2 = 2 * prec;
    let a = to_rows(m, p2);
    let ah: Cm = (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect();
    let norm = frobenius(&a);
    let ulp = BigReal::pow2(-(prec as i32), p2).mul(&norm.add(&BigReal::one(p2)));
    let tiny = BigReal::pow2(-(prec as i32) - 8, p2).mul(&norm.add(&BigReal::one(p2)));
    let mut out = Vec::with_capacity(n);
    for lam in vals {
        let lam2 = lam.with_prec(p2);
        let v = inverse_iteration(&a, &lam2, &tiny)?;
        let w = inverse_iteration(&ah, &lam2.conj(), &tiny)?;
        let av = mat_vec(&a, &v);
        let r: Vec<BigComplex> = av.iter().zip(&v).map(|(x, y)| x.sub(&lam2.mul(y))).collect();
        let residual = norm2(&r);
        let mut wv = BigComplex::zero(p2);
        for (x, y) in w.iter().zip(&v) {
            wv = wv.add(&x.conj().mul(y));
        }
        let wv_abs = wv.abs();
        let condition = if wv_abs.is_zero() { f64::INFINITY } else { BigReal::one(p2).div(&wv_abs).to_f64() };
        let first_order = if condition.is_finite() {
            residual.mul(&BigReal::from_f64(condition.max(1.0), p2))
        } else {
            residual.mul(&norm).sqrt()
        };
        let radius = first_order.add(&ulp).mul(&BigReal::from_i64(2, p2));
        out.push(EigenPair { value: lam.with_prec(prec), residual, radius, condition });
    }
    out.sort_by(|x, y| {
        y.value
            .re
            .partial_cmp(&x.value.re)
            .unwrap()
            .then(y.value.im.partial_cmp(&x.value.im).unwrap())
    });
    Ok(out)
}

/// Characteristic polynomial `det(x I - A)` by the Faddeev-LeVerrier recursion;
/// coefficient `k` multiplies `x^k`. Only integer divisions occur, so exact
/// scalars stay exact.
pub fn char_poly<V: Scalar>(a: &Matrix<V>) -> Vec<V> {
    let n = a.rows();
    let like = if n > 0 { a.get(0, 0).clone() } else { panic!("empty matrix") };
    let id = Matrix::identity_like(&like, n);
    let mut coeffs = vec![like.zero_like(); n + 1];
    coeffs[n] = like.one_like();
    let mut mk = Matrix::zeros_like(&like, n, n);
    for k in 1..=n {
        mk = a.mul(&mk).add(&id.scale(&coeffs[n - k + 1]));
        let am = a.mul(&mk);
        let mut tr = like.zero_like();
        for i in 0..n {
            tr = tr.add(am.get(i, i));
        }
        coeffs[n - k] = tr.scale_q(&crate::radical::rat(-1, k as i64));
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radical::{rat, RadicalNumber};
    use num_complex::Complex64;

    const P: usize = 128;

    fn cm(rows: &[&[f64]]) -> Matrix<BigComplex> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigComplex::from_c64(Complex64::new(x, 0.0), P)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_and_scalar() {
        let id = Matrix::identity_like(&BigComplex::one(P), 4);
        for e in eigenpairs(&id, P).unwrap() {
            assert!(e.value.sub(&BigComplex::one(P)).abs().to_f64() < 1e-35);
            assert!(e.residual < e.radius);
        }
        let m = cm(&[&[2.5]]);
        let e = eigenpairs(&m, P).unwrap();
        assert_eq!(e[0].value.re.to_f64(), 2.5);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let m = cm(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let e = eigenpairs(&m, P).unwrap();
        let ims: Vec<f64> = e.iter().map(|x| x.value.im.to_f64()).collect();
        assert!((ims[0] - 1.0).abs() < 1e-30 && (ims[1] + 1.0).abs() < 1e-30);
    }

    #[test]
    fn companion_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4), non-normal companion form
        let m = cm(&[
            &[0.0, 0.0, 0.0, -24.0],
            &[1.0, 0.0, 0.0, 50.0],
            &[0.0, 1.0, 0.0, -35.0],
            &[0.0, 0.0, 1.0, 10.0],
        ]);
        let e = eigenpairs(&m, P).unwrap();
        for (k, ep) in e.iter().enumerate() {
            let expect = 4.0 - k as f64;
            let err = ep.value.sub(&BigComplex::from_i64(4 - k as i64, P)).abs();
            assert!(err.log2_abs() < -100.0, "{expect}: {:?}", ep.value);
            assert!(ep.residual < ep.radius);
            assert!(err < ep.radius);
        }
    }

    #[test]
    fn char_poly_exact() {
        let r = |n, d| RadicalNumber::from_rational(rat(n, d));
        let sqrt2 = RadicalNumber::term(rat(1, 1), &2u32.into());
        // [[1, sqrt2], [sqrt2, 1]] has char poly x^2 - 2x - 1
        let m = Matrix::from_rows(vec![vec![r(1, 1), sqrt2.clone()], vec![sqrt2, r(1, 1)]]);
        assert_eq!(char_poly(&m), vec![r(-1, 1), r(-2, 1), r(1, 1)]);
    }
}
