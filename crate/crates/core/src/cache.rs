//! On-disk cache of cusp and coset tables, one JSON file per level and stabilizer.
//!
//! Loaded tables are revalidated before use; a file that fails validation is
//! rebuilt and overwritten.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::mat2::Mat2Z;
use crate::modular::{cusp_table, hecke_coset_reps, CosetDecomposition, CuspTable, Stabilizer};
use crate::report::{to_json, write_atomic, SCHEMA};
use crate::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "MAASS_HECKE_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub schema: u32,
    pub level: u64,
    pub stabilizer: Stabilizer,
    pub cusps: Vec<Mat2Z>,
    /// Coset representatives keyed by the Hecke prime.
    pub cosets: BTreeMap<u64, Vec<Mat2Z>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The file existed but failed to parse or revalidate.
    Rebuilt,
}

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

pub struct Tables {
    pub cusps: CuspTable,
    pub cosets: BTreeMap<u64, CosetDecomposition>,
    pub status: CacheStatus,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    /// An explicit directory wins over the environment; `None` if neither is set.
    pub fn resolve(explicit: Option<PathBuf>) -> Option<Self> {
        explicit.or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, level: u64, stabilizer: Stabilizer) -> PathBuf {
        let suffix = match stabilizer {
            Stabilizer::WithSign => "",
            Stabilizer::Level => "-level",
        };
        self.dir.join(format!("N{level}{suffix}.json"))
    }

    /// Tables for `level` with coset data for every prime in `primes`, from disk when possible.
    pub fn load_or_build(&self, level: u64, stabilizer: Stabilizer, primes: &[u64]) -> Result<Tables> {
        let path = self.path_for(level, stabilizer);
        let (mut file, mut status) = match std::fs::read_to_string(&path) {
            Ok(text) => match serde_json::from_str::<TableFile>(&text).map_err(Error::from).and_then(|f| revalidate(&f, level, stabilizer).map(|_| f)) {
                Ok(f) => (f, CacheStatus::Hit),
                Err(_) => (fresh(level, stabilizer)?, CacheStatus::Rebuilt),
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => (fresh(level, stabilizer)?, CacheStatus::Miss),
            Err(source) => return Err(Error::Io { path: path.display().to_string(), source }),
        };
        let mut dirty = status != CacheStatus::Hit;
        for &p in primes {
            if let std::collections::btree_map::Entry::Vacant(e) = file.cosets.entry(p) {
                e.insert(hecke_coset_reps(level, p)?.reps);
                dirty = true;
                if status == CacheStatus::Hit {
                    status = CacheStatus::Miss;
                }
            }
        }
        if dirty {
            std::fs::create_dir_all(&self.dir).map_err(|source| Error::Io { path: self.dir.display().to_string(), source })?;
            write_atomic(&path, to_json(&file)?.as_bytes())?;
        }
        let tables = revalidate(&file, level, stabilizer)?;
        Ok(Tables { status, ..tables })
    }
}

fn fresh(level: u64, stabilizer: Stabilizer) -> Result<TableFile> {
    Ok(TableFile { schema: SCHEMA, level, stabilizer, cusps: cusp_table(level, stabilizer)?.reps, cosets: BTreeMap::new() })
}

fn revalidate(f: &TableFile, level: u64, stabilizer: Stabilizer) -> Result<Tables> {
    if f.schema != SCHEMA || f.level != level || f.stabilizer != stabilizer {
        return Err(Error::Internal(format!("table header mismatch for level {level}")));
    }
    let cusps = CuspTable::from_reps(level, stabilizer, f.cusps.clone())?;
    let mut cosets = BTreeMap::new();
    for (&p, reps) in &f.cosets {
        let d = CosetDecomposition { level, alpha: Mat2Z::new(1, 0, 0, p), reps: reps.clone() };
        if reps.len() as u64 != p + 1 {
            return Err(Error::Internal(format!("{} cosets for p = {p}", reps.len())));
        }
        d.validate()?;
        cosets.insert(p, d);
    }
    Ok(Tables { cusps, cosets, status: CacheStatus::Hit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_revalidation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path().join("tables"));
        let a = cache.load_or_build(5, Stabilizer::WithSign, &[2, 3]).unwrap();
        assert_eq!(a.status, CacheStatus::Miss);
        let b = cache.load_or_build(5, Stabilizer::WithSign, &[2, 3]).unwrap();
        assert_eq!(b.status, CacheStatus::Hit);
        assert_eq!(a.cusps.reps, b.cusps.reps);
        assert_eq!(a.cosets, b.cosets);
        assert_eq!(b.cusps.len(), 4);

        // a new prime extends the file
        assert_eq!(cache.load_or_build(5, Stabilizer::WithSign, &[7]).unwrap().status, CacheStatus::Miss);
        assert_eq!(cache.load_or_build(5, Stabilizer::WithSign, &[2, 7]).unwrap().status, CacheStatus::Hit);
    }

    #[test]
    fn corrupt_files_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path());
        cache.load_or_build(4, Stabilizer::WithSign, &[3]).unwrap();
        let path = cache.path_for(4, Stabilizer::WithSign);

        // duplicate a cusp representative
        let mut f: TableFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        f.cusps[1] = f.cusps[0].clone();
        std::fs::write(&path, serde_json::to_string(&f).unwrap()).unwrap();
        let t = cache.load_or_build(4, Stabilizer::WithSign, &[3]).unwrap();
        assert_eq!(t.status, CacheStatus::Rebuilt);
        assert_eq!(t.cusps.len(), 3);

        std::fs::write(&path, "not json").unwrap();
        assert_eq!(cache.load_or_build(4, Stabilizer::WithSign, &[3]).unwrap().status, CacheStatus::Rebuilt);
        assert_eq!(cache.load_or_build(4, Stabilizer::WithSign, &[3]).unwrap().status, CacheStatus::Hit);
    }

    #[test]
    fn stabilizers_use_separate_files() {
        let cache = TableCache::new("/x");
        assert_ne!(cache.path_for(4, Stabilizer::WithSign), cache.path_for(4, Stabilizer::Level));
    }
}
