//! On-disk caching of differential matrices and homology results.
//!
//! One file per (complex id, degree, weight) matrix and per homology
//! summary. Matrix files carry a header with the dimensions, the ring and a
//! content hash of the basis labels, followed by coordinate triplets. All
//! writes go through a temporary file in the same directory and an atomic
//! rename; an index manifest records parameter hashes per key.

use crate::chaincore::Weight;
use crate::exactlin::{CoeffRing, HomologySummary, RingKind, Scalar, SparseMatrix};
use num::bigint::BigInt;
use num::Num;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt cache entry {0}: {1}")]
    Corrupt(PathBuf, String),
}

/// Environment variable selecting the cache directory for the command-line
/// tools.
pub const CACHE_DIR_ENV: &str = "PLANAR_LOOPS_CACHE";

/// Content hash of a basis, used to validate that a cached matrix belongs to
/// the basis being used.
pub fn basis_hash(labels: &[String]) -> String {
    let mut hasher = Sha256::new();
    for l in labels {
        hasher.update(l.as_bytes());
        hasher.update([0u8]);
    }
    hex_prefix(&hasher.finalize())
}

/// Hash of an arbitrary parameter string.
pub fn params_hash(params: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(params.as_bytes());
    hex_prefix(&hasher.finalize())
}

fn hex_prefix(bytes: &[u8]) -> String {
    bytes.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct MatrixHeader {
    rows: usize,
    cols: usize,
    ring: RingKind,
    basis_hash: String,
}

#[derive(Serialize, Deserialize, Default)]
struct Manifest {
    entries: BTreeMap<String, String>,
}

/// A directory-backed cache.
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(MatrixCache { dir })
    }

    /// The cache selected by [`CACHE_DIR_ENV`], when set.
    pub fn from_env() -> Result<Option<Self>, CacheError> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Ok(Some(Self::open(PathBuf::from(dir))?)),
            _ => Ok(None),
        }
    }

    fn file_name(key: &str, q: u32, w: Weight, ext: &str) -> String {
        let w = match w {
            Weight::All => "all".to_string(),
            Weight::W(v) => format!("w{v}"),
        };
        format!("{}__q{q}_{w}.{ext}", params_hash(key))
    }

    fn write_atomic(&self, name: &str, contents: &str) -> Result<(), CacheError> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        self.record_in_manifest(name)?;
        Ok(())
    }

    fn record_in_manifest(&self, name: &str) -> Result<(), CacheError> {
        let path = self.dir.join("manifest.json");
        let mut manifest: Manifest = match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s)
                .map_err(|e| CacheError::Corrupt(path.clone(), e.to_string()))?,
            Err(_) => Manifest::default(),
        };
        manifest
            .entries
            .insert(name.to_string(), params_hash(name));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string_pretty(&manifest).unwrap().as_bytes())?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Store a differential matrix under `(key, q, w)`.
    pub fn store_matrix(
        &self,
        key: &str,
        q: u32,
        w: Weight,
        basis_hash: &str,
        m: &SparseMatrix,
        ring: &CoeffRing,
    ) -> Result<(), CacheError> {
        let header = MatrixHeader {
            rows: m.rows(),
            cols: m.cols(),
            ring: ring.kind(),
            basis_hash: basis_hash.to_string(),
        };
        let mut out = serde_json::to_string(&header).unwrap();
        out.push('\n');
        for (r, c, v) in m.iter() {
            out.push_str(&format!("{r} {c} {v}\n"));
        }
        self.write_atomic(&Self::file_name(key, q, w, "mat"), &out)
    }

    /// Load a matrix if present and its basis hash matches.
    pub fn load_matrix(
        &self,
        key: &str,
        q: u32,
        w: Weight,
        basis_hash: &str,
        ring: &CoeffRing,
    ) -> Result<Option<SparseMatrix>, CacheError> {
        let path = self.dir.join(Self::file_name(key, q, w, "mat"));
        let contents = match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        let mut lines = contents.lines();
        let header: MatrixHeader = match lines.next().map(serde_json::from_str) {
            Some(Ok(h)) => h,
            _ => return Err(CacheError::Corrupt(path, "bad header".into())),
        };
        if header.basis_hash != basis_hash || header.ring != ring.kind() {
            return Ok(None);
        }
        let mut triplets = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, ' ');
            let mut parse = || -> Option<(usize, usize, Scalar)> {
                let r: usize = parts.next()?.parse().ok()?;
                let c: usize = parts.next()?.parse().ok()?;
                let v = parts.next()?;
                let scalar = match ring.kind() {
                    RingKind::Integers => Scalar::Int(BigInt::from_str(v).ok()?),
                    RingKind::Rationals => {
                        Scalar::Rat(num::BigRational::from_str_radix(v, 10).ok()?)
                    }
                    RingKind::PrimeField(_) => Scalar::Fp(v.parse().ok()?),
                };
                Some((r, c, scalar))
            };
            match parse() {
                Some(t) => triplets.push(t),
                None => return Err(CacheError::Corrupt(path, format!("bad line {line:?}"))),
            }
        }
        Ok(Some(SparseMatrix::from_triplets(
            header.rows,
            header.cols,
            triplets,
            ring,
        )))
    }

    /// Store a homology summary under `(key, q, w)`.
    pub fn store_summary(
        &self,
        key: &str,
        q: u32,
        w: Weight,
        summary: &HomologySummary,
    ) -> Result<(), CacheError> {
        let out = serde_json::to_string(summary).unwrap();
        self.write_atomic(&Self::file_name(key, q, w, "hom"), &out)
    }

    pub fn load_summary(
        &self,
        key: &str,
        q: u32,
        w: Weight,
    ) -> Result<Option<HomologySummary>, CacheError> {
        let path = self.dir.join(Self::file_name(key, q, w, "hom"));
        match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s)
                .map(Some)
                .map_err(|e| CacheError::Corrupt(path, e.to_string())),
            Err(_) => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}
