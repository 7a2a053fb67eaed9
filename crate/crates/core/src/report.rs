//! JSON and CSV artifacts.
//!
//! Every JSON document carries `"schema": 1` and fixed field order; numbers
//! that come from big floats are decimal strings at a stated digit count.
//! CSV output is UTF-8 with a header row and LF line endings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bigfloat::BigComplex;
use crate::fourier::DistributionCoefficients;
use crate::mat2::Mat2Z;
use crate::modular::{CosetDecomposition, CuspTable, Stabilizer};
use crate::radical::RadicalNumber;
use crate::transfer::{value_digits, Mode, SpectrumReport, TransferMatrix};
use crate::verify::VerifyReport;
use crate::{Error, Result};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Writes to `path` through a sibling temporary file and a rename, or to stdout.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err(Path::new("<stdout>")));
    };
    write_atomic(path, bytes)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a file path"),
    })?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes).map_err(io_err(path))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_doc(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

// ---- cosets

#[derive(Serialize)]
struct CosetsDoc<'a> {
    schema: u32,
    level: u64,
    decompositions: Vec<CosetsEntry<'a>>,
}

#[derive(Serialize)]
struct CosetsEntry<'a> {
    alpha: &'a Mat2Z,
    count: usize,
    reps: &'a [Mat2Z],
}

pub fn cosets(level: u64, decs: &[CosetDecomposition], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&CosetsDoc {
            schema: SCHEMA,
            level,
            decompositions: decs.iter().map(|d| CosetsEntry { alpha: &d.alpha, count: d.reps.len(), reps: &d.reps }).collect(),
        }),
        Format::Csv => csv_doc(
            &["det", "index", "a", "b", "c", "d"],
            decs.iter().flat_map(|d| {
                d.reps.iter().enumerate().map(|(i, r)| {
                    vec![r.det().to_string(), i.to_string(), r.a.to_string(), r.b.to_string(), r.c.to_string(), r.d.to_string()]
                })
            }),
        ),
    }
}

// ---- cusps

#[derive(Serialize)]
struct CuspsDoc<'a> {
    schema: u32,
    level: u64,
    stabilizer: Stabilizer,
    count: usize,
    representatives: Vec<CuspEntry<'a>>,
}

#[derive(Serialize)]
struct CuspEntry<'a> {
    cusp: String,
    matrix: &'a Mat2Z,
}

pub fn cusps(table: &CuspTable, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&CuspsDoc {
            schema: SCHEMA,
            level: table.level,
            stabilizer: table.stabilizer,
            count: table.len(),
            representatives: table
                .reps
                .iter()
                .zip(&table.labels)
                .map(|(r, l)| CuspEntry { cusp: l.to_string(), matrix: r })
                .collect(),
        }),
        Format::Csv => csv_doc(
            &["index", "cusp", "a", "b", "c", "d"],
            table.reps.iter().zip(&table.labels).enumerate().map(|(i, (r, l))| {
                vec![i.to_string(), l.to_string(), r.a.to_string(), r.b.to_string(), r.c.to_string(), r.d.to_string()]
            }),
        ),
    }
}

// ---- transfer matrices

#[derive(Serialize)]
struct TransferDoc<T> {
    schema: u32,
    level: u64,
    alpha: Mat2Z,
    s: usize,
    lambda: [f64; 2],
    mode: Mode,
    cusps: usize,
    dim: usize,
    /// Row/column index is `cusp * (s + 1) + derivative order`.
    layout: &'static str,
    matrix: Vec<Vec<T>>,
}

fn transfer_doc<V, T>(t: &TransferMatrix<V>, f: impl Fn(&V) -> T) -> TransferDoc<T>
where
    V: crate::scalar::Scalar,
{
    TransferDoc {
        schema: SCHEMA,
        level: t.level,
        alpha: t.alpha.clone(),
        s: t.s,
        lambda: [t.lambda.re, t.lambda.im],
        mode: t.mode,
        cusps: t.m,
        dim: t.dim(),
        layout: "cusp-major",
        matrix: t.matrix.to_rows().iter().map(|r| r.iter().map(&f).collect()).collect(),
    }
}

pub fn transfer_exact(t: &TransferMatrix<RadicalNumber>, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&transfer_doc(t, |x| x.clone())),
        Format::Csv => csv_doc(
            &["row", "col", "value"],
            (0..t.dim()).flat_map(|i| (0..t.dim()).map(move |j| (i, j))).map(|(i, j)| {
                vec![i.to_string(), j.to_string(), t.matrix.get(i, j).to_string()]
            }),
        ),
    }
}

pub fn transfer_numeric(t: &TransferMatrix<BigComplex>, format: Format) -> Result<String> {
    let d = match t.mode {
        Mode::Numeric { precision } => value_digits(precision),
        Mode::Exact => value_digits(128),
    };
    let cell = |x: &BigComplex| [x.re.to_decimal_digits(d), x.im.to_decimal_digits(d)];
    match format {
        Format::Json => to_json(&transfer_doc(t, cell)),
        Format::Csv => csv_doc(
            &["row", "col", "re", "im"],
            (0..t.dim()).flat_map(|i| (0..t.dim()).map(move |j| (i, j))).map(|(i, j)| {
                let [re, im] = cell(t.matrix.get(i, j));
                vec![i.to_string(), j.to_string(), re, im]
            }),
        ),
    }
}

// ---- spectra

#[derive(Serialize)]
struct SpectraDoc<'a> {
    schema: u32,
    spectra: &'a [SpectrumReport],
}

/// One JSON document for all spectra, or one CSV table (with the Hecke prime as a column when there are several).
pub fn spectra(reports: &[SpectrumReport], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&SpectraDoc { schema: SCHEMA, spectra: reports }),
        Format::Csv if reports.len() <= 1 => csv_doc(
            &["re", "im", "radius", "residual"],
            reports.iter().flat_map(|r| r.eigenvalues.iter()).map(|e| vec![e.re.clone(), e.im.clone(), e.radius.clone(), e.residual.clone()]),
        ),
        Format::Csv => csv_doc(
            &["det", "re", "im", "radius", "residual"],
            reports.iter().flat_map(|r| {
                let det = r.alpha.det().to_string();
                r.eigenvalues.iter().map(move |e| vec![det.clone(), e.re.clone(), e.im.clone(), e.radius.clone(), e.residual.clone()])
            }),
        ),
    }
}

// ---- Poisson grids

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonPoint {
    pub x: f64,
    pub y: f64,
    pub re: f64,
    pub im: f64,
    pub quadrature_points: usize,
    pub error_estimate: f64,
}

#[derive(Serialize)]
struct PoissonDoc<'a> {
    schema: u32,
    lambda: [f64; 2],
    distribution: &'a DistributionCoefficients,
    points: &'a [PoissonPoint],
    #[serde(skip_serializing_if = "Option::is_none")]
    laplacian_max_residual: Option<f64>,
}

pub fn poisson(
    lambda: num_complex::Complex64,
    dist: &DistributionCoefficients,
    points: &[PoissonPoint],
    laplacian: Option<f64>,
    format: Format,
) -> Result<String> {
    match format {
        Format::Json => to_json(&PoissonDoc {
            schema: SCHEMA,
            lambda: [lambda.re, lambda.im],
            distribution: dist,
            points,
            laplacian_max_residual: laplacian,
        }),
        Format::Csv => csv_doc(
            &["x", "y", "re", "im", "error_estimate"],
            points.iter().map(|p| {
                vec![format!("{:.6}", p.x), format!("{:.6}", p.y), format!("{:.15e}", p.re), format!("{:.15e}", p.im), format!("{:.3e}", p.error_estimate)]
            }),
        ),
    }
}

// ---- verification

pub fn verify(report: &VerifyReport, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => csv_doc(
            &["name", "group", "cases", "tolerance", "max_error", "passed", "identity"],
            report.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    c.group.clone(),
                    c.cases.to_string(),
                    c.tolerance.clone(),
                    c.max_error.clone(),
                    c.passed.to_string(),
                    c.identity.clone(),
                ]
            }),
        ),
    }
}
