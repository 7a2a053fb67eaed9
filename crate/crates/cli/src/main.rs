//! Command-line front end: coset and cusp tables, transfer matrices, spectra,
//! Poisson transforms and the verification suite.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use maass_hecke::cache::{TableCache, CACHE_DIR_ENV};
use maass_hecke::fourier::DistributionCoefficients;
use maass_hecke::modular::{cusp_table, hecke_coset_reps, is_prime, CosetDecomposition, CuspTable, Lift, Stabilizer};
use maass_hecke::par::{map_slice, Exec};
use maass_hecke::poisson::{field_spectral_parameter, laplacian_residual, poisson_eval};
use maass_hecke::report::{self, Format, PoissonPoint};
use maass_hecke::scalar::{Exact, Numeric};
use maass_hecke::transfer::{build_transfer, spectrum_escalating, spectrum_exact, Mode, TransferMatrix, MAX_PRECISION};
use maass_hecke::verify::{self, VerifyConfig};
use maass_hecke::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ESCALATION: u8 = 3;
const EXIT_UNWRITABLE: u8 = 4;

#[derive(Parser)]
#[command(name = "maass-hecke", version, about = "Hecke transfer matrices, spectra and invariant checks on Gamma_1(N)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Right coset representatives of the Hecke double coset for each prime.
    Cosets {
        #[command(flatten)]
        level: Level,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<u64>,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
    /// Cusp (double coset) representatives.
    Cusps {
        #[command(flatten)]
        level: Level,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
    /// The transfer matrix of T_p on cusp-value tuples.
    Transfer {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
    /// Certified eigenvalues of transfer matrices, one set per prime.
    Spectrum {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<u64>,
        /// Largest precision tried when the eigensolver fails to converge.
        #[arg(long, default_value_t = MAX_PRECISION)]
        max_precision: usize,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
    /// Poisson transform of a distribution on a rectangular grid of the upper half-plane.
    Poisson {
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_complex)]
        lambda: Complex64,
        /// Fourier coefficient `n=re[,im]`; repeatable. Defaults to the constant 1.
        #[arg(long = "coeff", allow_hyphen_values = true, value_parser = parse_coeff)]
        coeffs: Vec<(i64, Complex64)>,
        /// Distribution coefficients as JSON (overrides --coeff).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [-0.5, 0.5], allow_hyphen_values = true)]
        x_range: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.5, 2.0])]
        y_range: Vec<f64>,
        /// Points per axis.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also report the Laplacian eigen-equation residual with this finite-difference step.
        #[arg(long)]
        laplacian_step: Option<f64>,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
    /// Run the registered invariant checks; exits 1 if any fails.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 128, value_parser = parse_precision)]
        precision: usize,
        /// Levels used by the level-dependent checks.
        #[arg(long = "N", value_delimiter = ',', default_value = "1,3,4,5")]
        levels: Vec<u64>,
        /// Check names or groups to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Corrupt the j-cocycle check (negative control).
        #[arg(long, hide = true)]
        perturb: bool,
        /// List check names and groups, then exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        run: Runtime,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Level {
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
}

#[derive(Args)]
struct Problem {
    #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    /// Number of derivatives carried by the tuples.
    #[arg(long, default_value_t = 0)]
    s: usize,
    /// Spectral parameter `re[,im]`.
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: Complex64,
    #[arg(long, default_value_t = 128, value_parser = parse_precision)]
    precision: usize,
    /// Exact arithmetic in the radical field (requires lambda = 0).
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct Runtime {
    #[arg(long, value_enum, default_value = "with-sign")]
    stabilizer: StabilizerArg,
    /// Directory for cached cusp and coset tables.
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StabilizerArg {
    WithSign,
    Level,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl Runtime {
    fn stabilizer(&self) -> Stabilizer {
        match self.stabilizer {
            StabilizerArg::WithSign => Stabilizer::WithSign,
            StabilizerArg::Level => Stabilizer::Level,
        }
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    fn tables(&self, level: u64, primes: &[u64]) -> Result<(CuspTable, BTreeMap<u64, CosetDecomposition>), Failure> {
        for &p in primes {
            if !is_prime(p) || level.is_multiple_of(p) {
                return Err(Failure::usage(format!("p = {p} must be a prime not dividing N = {level}")));
            }
        }
        match TableCache::resolve(self.cache_dir.clone()) {
            Some(cache) => {
                let t = cache.load_or_build(level, self.stabilizer(), primes)?;
                let cosets = primes.iter().map(|p| (*p, t.cosets[p].clone())).collect();
                Ok((t.cusps, cosets))
            }
            None => {
                let cosets = primes.iter().map(|&p| Ok((p, hecke_coset_reps(level, p)?))).collect::<Result<_, Error>>()?;
                Ok((cusp_table(level, self.stabilizer())?, cosets))
            }
        }
    }
}

impl Output {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }

    fn emit(&self, doc: String) -> Result<(), Failure> {
        Ok(report::write_output(self.out.as_deref(), doc.as_bytes())?)
    }
}

impl Problem {
    fn check(&self) -> Result<(), Failure> {
        if self.exact && self.lambda != Complex64::new(0.0, 0.0) {
            return Err(Failure::usage("--exact requires --lambda 0".into()));
        }
        warn_lambda(self.lambda);
        Ok(())
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: EXIT_USAGE, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Precondition(_) | Error::Unsupported(_) | Error::GridTooSmall { .. } => EXIT_USAGE,
            Error::PrecisionExhausted { .. } | Error::NoConvergence(_) => EXIT_ESCALATION,
            Error::Io { .. } => EXIT_UNWRITABLE,
            _ => EXIT_FAILED,
        };
        Failure { code, message: e.to_string() }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().unwrap_or("").parse::<f64>().map_err(|e| format!("bad real part: {e}"))?;
    let im = match parts.next() {
        Some(x) => x.parse::<f64>().map_err(|e| format!("bad imaginary part: {e}"))?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err("expected re[,im] with finite parts".into());
    }
    Ok(Complex64::new(re, im))
}

fn parse_coeff(s: &str) -> Result<(i64, Complex64), String> {
    let (n, v) = s.split_once('=').ok_or("expected n=re[,im]")?;
    Ok((n.trim().parse().map_err(|e| format!("bad index: {e}"))?, parse_complex(v)?))
}

fn parse_precision(s: &str) -> Result<usize, String> {
    let p: usize = s.parse().map_err(|e| format!("{e}"))?;
    if p < 53 {
        return Err("precision must be at least 53 bits".into());
    }
    Ok(p)
}

fn warn_lambda(lambda: Complex64) {
    if lambda.re < 0.0 {
        eprintln!("warning: Re(lambda) < 0; the Poisson transform is only known to be an isomorphism for Re(lambda) >= 0");
    }
}

fn numeric_transfer(
    cosets: &CosetDecomposition,
    table: &CuspTable,
    problem: &Problem,
    prec: usize,
    exec: Exec,
) -> Result<TransferMatrix<maass_hecke::bigfloat::BigComplex>, Error> {
    let mut t = build_transfer(&Numeric::new(prec, problem.lambda), cosets, table, problem.s, Lift::Canonical, exec)?;
    t.lambda = problem.lambda;
    t.mode = Mode::Numeric { precision: prec };
    Ok(t)
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Cosets { level, p, run, out } => {
            let (_, cosets) = run.tables(level.level, &p)?;
            let decs: Vec<_> = cosets.into_values().collect();
            out.emit(report::cosets(level.level, &decs, out.format())?)?;
        }
        Command::Cusps { level, run, out } => {
            let (table, _) = run.tables(level.level, &[])?;
            out.emit(report::cusps(&table, out.format())?)?;
        }
        Command::Transfer { problem, p, run, out } => {
            problem.check()?;
            let (table, cosets) = run.tables(problem.level, &[p])?;
            let cosets = &cosets[&p];
            let doc = if problem.exact {
                let t = build_transfer(&Exact, cosets, &table, problem.s, Lift::Canonical, run.exec())?;
                report::transfer_exact(&t, out.format())?
            } else {
                report::transfer_numeric(&numeric_transfer(cosets, &table, &problem, problem.precision, run.exec())?, out.format())?
            };
            out.emit(doc)?;
        }
        Command::Spectrum { problem, p, max_precision, run, out } => {
            problem.check()?;
            if max_precision < problem.precision {
                return Err(Failure::usage("--max-precision is below --precision".into()));
            }
            let (table, cosets) = run.tables(problem.level, &p)?;
            let decs: Vec<&CosetDecomposition> = cosets.values().collect();
            // primes fan out; each build still uses the inner parallel loops
            let reports = map_slice(run.exec(), &decs, |d| {
                if problem.exact {
                    let t = build_transfer(&Exact, d, &table, problem.s, Lift::Canonical, run.exec())?;
                    spectrum_exact(&t, problem.precision, max_precision)
                } else {
                    spectrum_escalating(|prec| numeric_transfer(d, &table, &problem, prec, run.exec()), problem.precision, max_precision)
                }
            });
            let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
            out.emit(report::spectra(&reports, out.format())?)?;
        }
        Command::Poisson { lambda, coeffs, input, x_range, y_range, grid, tol, laplacian_step, run, out } => {
            warn_lambda(lambda);
            if grid == 0 || y_range[0] <= 0.0 || y_range[1] <= 0.0 {
                return Err(Failure::usage("need --grid >= 1 and a y-range inside the upper half-plane".into()));
            }
            let dist = match input {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
                    serde_json::from_str::<DistributionCoefficients>(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
                }
                None if coeffs.is_empty() => DistributionCoefficients::new([(0, Complex64::new(1.0, 0.0))]),
                None => DistributionCoefficients::new(coeffs),
            };
            let axis = |r: &[f64], k: usize| if grid == 1 { r[0] } else { r[0] + (r[1] - r[0]) * k as f64 / (grid - 1) as f64 };
            let pts: Vec<(f64, f64)> = (0..grid).flat_map(|i| (0..grid).map(move |j| (i, j))).map(|(i, j)| (axis(&x_range, i), axis(&y_range, j))).collect();
            let values = map_slice(run.exec(), &pts, |&(x, y)| {
                poisson_eval(&dist, lambda, x, y, tol).map(|q| PoissonPoint {
                    x,
                    y,
                    re: q.value.re,
                    im: q.value.im,
                    quadrature_points: q.points,
                    error_estimate: q.error_estimate,
                })
            });
            let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
            let lap = match laplacian_step {
                Some(h) => {
                    let field = |x: f64, y: f64| Ok(poisson_eval(&dist, lambda, x, y, tol)?.value);
                    Some(laplacian_residual(field, field_spectral_parameter(lambda), &pts, h)?.max_residual)
                }
                None => None,
            };
            if let (Some(r), Format::Csv) = (lap, out.format()) {
                eprintln!("laplacian max residual: {r:.3e}");
            }
            out.emit(report::poisson(lambda, &dist, &values, lap, out.format())?)?;
        }
        Command::Verify { seed, precision, levels, only, perturb, list, run, out } => {
            if list {
                for (name, group) in verify::names_and_groups() {
                    println!("{group:<14} {name}");
                }
                return Ok(0);
            }
            if levels.contains(&0) {
                return Err(Failure::usage("levels must be positive".into()));
            }
            let cfg = VerifyConfig { seed, precision, levels, only, perturb, exec: run.exec() };
            let r = verify::run(&cfg);
            for c in &r.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{mark} {:<28} cases={:<5} max_error={:<10} tol={:<10} {}", c.name, c.cases, c.max_error, c.tolerance, c.identity);
                if let Some(d) = &c.detail {
                    eprintln!("     {d}");
                }
            }
            out.emit(report::verify(&r, out.format())?)?;
            return Ok(if r.passed { 0 } else { EXIT_FAILED });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
