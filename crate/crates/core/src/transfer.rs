//! The finite transfer matrix of a Hecke operator on cusp-value tuples, and its spectrum.
//!
//! Layout: index `nu * (s + 1) + j` for cusp `nu` and derivative order `j`. The
//! matrix acts on column vectors, so `T[(nu, l), (xi, j)]` is the weight of
//! input coordinate `(xi, j)` in output coordinate `(nu, l)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bigfloat::{BigComplex, BigReal};
use crate::circle::{circle_act, Angle};
use crate::fourier::{FourierFunction, FunctionTuple};
use crate::cocycle::a_matrix;
use crate::error::{Error, Result};
use crate::linalg::{char_poly, eigenpairs};
use crate::mat2::{Mat2Q, Mat2Z};
use crate::matrix::Matrix;
use crate::modular::{cusp_table, hecke_coset_reps, hecke_permutation_data, CosetDecomposition, CuspTable, Lift, Stabilizer};
use crate::par::{try_map_range, Exec};
use crate::radical::{rad_to_float, RadicalNumber};
use crate::scalar::{Evaluator, Exact, Fast, Numeric, Scalar};

/// Largest precision tried by automatic escalation.
pub const MAX_PRECISION: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    Numeric { precision: usize },
    Exact,
}

#[derive(Clone, Debug)]
pub struct TransferMatrix<V> {
    pub level: u64,
    pub alpha: Mat2Z,
    pub s: usize,
    pub lambda: Complex64,
    pub mode: Mode,
    /// Number of cusps.
    pub m: usize,
    pub matrix: Matrix<V>,
}

impl<V: Scalar> TransferMatrix<V> {
    pub fn dim(&self) -> usize {
        self.m * (self.s + 1)
    }

    /// Row/column permutation to `j`-major order: new index `j * m + nu`.
    pub fn j_major_perm(&self) -> Vec<usize> {
        let w = self.s + 1;
        (0..self.dim()).map(|k| (k % self.m) * w + k / self.m).collect()
    }

    pub fn j_major(&self) -> Matrix<V> {
        self.matrix.permute(&self.j_major_perm())
    }
}

/// Assembles the transfer matrix for the double coset described by `cosets`.
///
/// The `(mu, nu)` block contributions are independent and computed through `exec`;
/// they are summed in a fixed order, so the result does not depend on scheduling.
pub fn build_transfer<E: Evaluator>(
    ev: &E,
    cosets: &CosetDecomposition,
    table: &CuspTable,
    s: usize,
    lift: Lift,
    exec: Exec,
) -> Result<TransferMatrix<E::V>> {
    let perm = hecke_permutation_data(cosets, table, lift, exec)?;
    let m = table.len();
    let r = cosets.reps.len();
    let prec = ev.angle_prec();
    let points: Vec<Angle> = table.labels.iter().map(|l| Angle::from_slope(l.clone(), prec)).collect();
    let blocks = try_map_range(exec, r * m, |idx| {
        let (mu, nu) = (idx / m, idx % m);
        let e = &perm[mu][nu];
        let right = a_matrix(ev, &cosets.reps[mu].to_q(), &points[nu], s)?;
        let left = a_matrix(ev, &e.beta.to_q(), &points[e.xi], s)?.inverse()?;
        Ok::<_, Error>((e.xi, left.mul(&right).m))
    })?;
    let w = s + 1;
    let zero = ev.zero();
    let mut t = Matrix::zeros_like(&zero, m * w, m * w);
    for (idx, (xi, b)) in blocks.into_iter().enumerate() {
        let nu = idx % m;
        for l in 0..w {
            for j in 0..w {
                let (row, col) = (nu * w + l, xi * w + j);
                let v = t.get(row, col).add(b.get(j, l));
                t.set(row, col, v);
            }
        }
    }
    Ok(TransferMatrix { level: table.level, alpha: cosets.alpha.clone(), s, lambda: Complex64::new(0.0, 0.0), mode: Mode::Exact, m, matrix: t })
}

/// Transfer matrix of `T_p` at level `N` with numeric entries.
pub fn hecke_transfer_numeric(
    level: u64,
    p: u64,
    s: usize,
    lambda: Complex64,
    prec: usize,
    stabilizer: Stabilizer,
    exec: Exec,
) -> Result<TransferMatrix<BigComplex>> {
    let cosets = hecke_coset_reps(level, p)?;
    let table = cusp_table(level, stabilizer)?;
    let mut t = build_transfer(&Numeric::new(prec, lambda), &cosets, &table, s, Lift::Canonical, exec)?;
    t.lambda = lambda;
    t.mode = Mode::Numeric { precision: prec };
    Ok(t)
}

/// Transfer matrix of `T_p` at level `N` with entries in the radical field; `lambda = 0`.
pub fn hecke_transfer_exact(level: u64, p: u64, s: usize, stabilizer: Stabilizer, exec: Exec) -> Result<TransferMatrix<RadicalNumber>> {
    let cosets = hecke_coset_reps(level, p)?;
    let table = cusp_table(level, stabilizer)?;
    build_transfer(&Exact, &cosets, &table, s, Lift::Canonical, exec)
}

/// Numeric images of exact entries.
pub fn exact_to_numeric(t: &TransferMatrix<RadicalNumber>, prec: usize) -> TransferMatrix<BigComplex> {
    TransferMatrix {
        level: t.level,
        alpha: t.alpha.clone(),
        s: t.s,
        lambda: t.lambda,
        mode: Mode::Numeric { precision: prec },
        m: t.m,
        matrix: t.matrix.map(|x| BigComplex::real(rad_to_float(x, prec))),
    }
}

/// Largest entrywise difference between two numeric matrices of equal shape.
pub fn max_entry_diff(a: &Matrix<BigComplex>, b: &Matrix<BigComplex>) -> BigReal {
    let p = a.get(0, 0).prec();
    let mut worst = BigReal::zero(p);
    for (x, y) in a.entries().zip(b.entries()) {
        let d = x.sub(y).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Cusp values `F_j(g_nu . 0)`: one row per cusp.
pub fn phi_eval(f: &FunctionTuple, table: &CuspTable) -> Vec<Vec<Complex64>> {
    table
        .labels
        .iter()
        .map(|l| f.eval(Angle::from_slope(l.clone(), 64).theta().to_f64()))
        .collect()
}

/// `(F |_lambda g)(theta) = F(g.theta) A_g(theta)` at a single point, in double precision.
pub fn tuple_action_at(f: &FunctionTuple, g: &Mat2Q, theta: &Angle, lambda: Complex64) -> Result<Vec<Complex64>> {
    let image = circle_act(g, theta)?.theta().to_f64();
    let a = a_matrix(&Fast { lambda }, g, theta, f.s)?;
    Ok(a.m.left_apply(&f.eval(image)))
}

/// Largest violation of `phi(F | T_p) = t phi(F)` for a synthetic tuple `F`.
///
/// `F` takes random values at the cusp points and, at every point
/// `alpha_mu g_nu . 0 = beta g_xi . 0`, the value forced by invariance under
/// `beta`; each component is the minimum-norm trigonometric interpolant of
/// those values. The Hecke side is evaluated pointwise from `F`, the other
/// side through the assembled matrix.
pub fn intertwining_defect(level: u64, p: u64, s: usize, lambda: Complex64, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let cosets = hecke_coset_reps(level, p)?;
    let table = cusp_table(level, Stabilizer::WithSign)?;
    let perm = hecke_permutation_data(&cosets, &table, Lift::Canonical, Exec::Sequential)?;
    let ev = Fast { lambda };
    let m = table.len();
    let cusp_pts: Vec<Angle> = table.labels.iter().map(|l| Angle::from_slope(l.clone(), 64)).collect();
    let x: Vec<Vec<Complex64>> = (0..m)
        .map(|_| (0..=s).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .collect();
    let mut pts: Vec<(f64, Vec<Complex64>)> = (0..m).map(|k| (cusp_pts[k].theta().to_f64(), x[k].clone())).collect();
    let mut worst = 0.0f64;
    for (mu, row) in perm.iter().enumerate() {
        for (nu, e) in row.iter().enumerate() {
            let img = circle_act(&cosets.reps[mu].to_q(), &cusp_pts[nu])?.theta().to_f64();
            let a_inv = a_matrix(&ev, &e.beta.to_q(), &cusp_pts[e.xi], s)?.inverse()?;
            let forced = a_inv.m.left_apply(&x[e.xi]);
            match pts.iter().find(|(t, _)| (t - img).abs() < 1e-12) {
                // a repeated point must be assigned consistently
                Some((_, v)) => worst = v.iter().zip(&forced).map(|(a, b)| (a - b).norm()).fold(worst, f64::max),
                None => pts.push((img, forced)),
            }
        }
    }
    let thetas: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let comps = (0..=s)
        .map(|j| FourierFunction::interpolate(&thetas, &pts.iter().map(|p| p.1[j]).collect::<Vec<_>>(), 4 * thetas.len()))
        .collect::<Result<Vec<_>>>()?;
    let f = FunctionTuple::new(comps)?;
    let t = hecke_transfer_numeric(level, p, s, lambda, 128, Stabilizer::WithSign, Exec::Sequential)?;
    let phi: Vec<Complex64> = phi_eval(&f, &table).concat();
    for nu in 0..m {
        let mut lhs = vec![Complex64::new(0.0, 0.0); s + 1];
        for rep in &cosets.reps {
            let v = tuple_action_at(&f, &rep.to_q(), &cusp_pts[nu], lambda)?;
            for (a, b) in lhs.iter_mut().zip(v) {
                *a += b;
            }
        }
        for (l, lv) in lhs.iter().enumerate() {
            let row = nu * (s + 1) + l;
            let rhs: Complex64 = (0..t.dim()).map(|k| t.matrix.get(row, k).to_c64() * phi[k]).sum();
            worst = worst.max((lv - rhs).norm());
        }
    }
    Ok(worst)
}

/// Eigenvalue record with decimal strings at fixed digit counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub re: String,
    pub im: String,
    pub radius: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub schema: u32,
    pub level: u64,
    pub alpha: Mat2Z,
    pub s: usize,
    pub lambda: [f64; 2],
    pub mode: Mode,
    /// Precision at which the eigenvalues were obtained (after any escalation).
    pub precision: usize,
    pub dim: usize,
    /// Eigenvalues of the matrix as assembled (the tuple-side action, carrying `det^(-lambda/2)`).
    pub eigenvalues: Vec<EigenRecord>,
    /// The same eigenvalues times `normalization_factor`, i.e. the operator
    /// `g -> det(alpha)^(-1/2) sum g(alpha_i z)` on half-plane eigenfunctions.
    pub classical_eigenvalues: Vec<[String; 2]>,
    pub normalization_factor: [String; 2],
    /// Coefficients of `det(x I - T)`, constant term first; exact mode only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub char_poly: Option<Vec<RadicalNumber>>,
}

/// Digits printed for eigenvalues at precision `prec` bits.
pub fn value_digits(prec: usize) -> usize {
    ((prec as f64 * std::f64::consts::LOG10_2) as usize).saturating_sub(8).clamp(10, 60)
}

/// Factor between the tuple-side and the classical eigenvalues.
///
/// The Poisson transform intertwines the two actions exactly (scalar
/// matrices act on distributions by `t^-1` and trivially on the half-plane,
/// which pins the determinant character to `det^(-1/2)`), so the factor is 1;
/// it is kept explicit in the report so downstream comparisons do not guess.
pub fn classical_factor(_alpha: &Mat2Z, _lambda: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[allow(clippy::too_many_arguments)]
fn report_from_pairs(
    t_level: u64,
    alpha: &Mat2Z,
    s: usize,
    lambda: Complex64,
    mode: Mode,
    prec: usize,
    dim: usize,
    pairs: Vec<crate::linalg::EigenPair>,
    char_poly: Option<Vec<RadicalNumber>>,
) -> SpectrumReport {
    let d = value_digits(prec);
    let f = classical_factor(alpha, lambda);
    let fb = BigComplex::from_c64(f, prec);
    let eigenvalues = pairs
        .iter()
        .map(|e| EigenRecord {
            re: e.value.re.to_decimal_digits(d),
            im: e.value.im.to_decimal_digits(d),
            radius: e.radius.to_decimal_digits(6),
            residual: e.residual.to_decimal_digits(6),
        })
        .collect();
    let classical_eigenvalues = pairs
        .iter()
        .map(|e| {
            let v = e.value.mul(&fb);
            [v.re.to_decimal_digits(d), v.im.to_decimal_digits(d)]
        })
        .collect();
    SpectrumReport {
        schema: 1,
        level: t_level,
        alpha: alpha.clone(),
        s,
        lambda: [lambda.re, lambda.im],
        mode,
        precision: prec,
        dim,
        eigenvalues,
        classical_eigenvalues,
        normalization_factor: [fb.re.to_decimal_digits(d), fb.im.to_decimal_digits(d)],
        char_poly,
    }
}

/// Spectrum of a numeric matrix at the precision its entries carry.
pub fn spectrum(t: &TransferMatrix<BigComplex>, prec: usize) -> Result<SpectrumReport> {
    let pairs = eigenpairs(&t.matrix, prec)?;
    Ok(report_from_pairs(t.level, &t.alpha, t.s, t.lambda, Mode::Numeric { precision: prec }, prec, t.dim(), pairs, None))
}

/// Rebuilds and re-solves at doubled precision until the eigensolver converges.
pub fn spectrum_escalating<F>(build: F, prec: usize, cap: usize) -> Result<SpectrumReport>
where
    F: Fn(usize) -> Result<TransferMatrix<BigComplex>>,
{
    let mut p = prec;
    loop {
        match build(p).and_then(|t| spectrum(&t, p)) {
            Ok(r) => return Ok(r),
            Err(Error::NoConvergence(msg)) => {
                if p * 2 > cap {
                    return Err(Error::PrecisionExhausted { bits: p, detail: msg });
                }
                p *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Spectrum of an exact matrix: eigenvalues numerically, plus the exact characteristic polynomial.
pub fn spectrum_exact(t: &TransferMatrix<RadicalNumber>, prec: usize, cap: usize) -> Result<SpectrumReport> {
    let poly = char_poly(&t.matrix);
    let mut r = spectrum_escalating(|p| Ok(exact_to_numeric(t, p)), prec, cap)?;
    r.mode = Mode::Exact;
    r.char_poly = Some(poly);
    Ok(r)
}

/// Parsed eigenvalues of a report, for comparisons.
pub fn report_values(r: &SpectrumReport) -> Vec<Complex64> {
    r.eigenvalues
        .iter()
        .map(|e| Complex64::new(e.re.parse().unwrap_or(f64::NAN), e.im.parse().unwrap_or(f64::NAN)))
        .collect()
}

/// True if every value of `small` can be matched to a distinct value of `big` within `tol`.
pub fn multiset_contained(small: &[Complex64], big: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; big.len()];
    for x in small {
        let best = big
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) if d <= tol => used[i] = true,
            _ => return false,
        }
    }
    true
}
