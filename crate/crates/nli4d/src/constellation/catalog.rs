use super::{normalize_energy, parse_constellation_file, Constellation4D, ConstellationError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable overriding the catalog directory.
pub const CATALOG_ENV: &str = "NLI4D_CATALOG";

/// One manifest row. `file` is empty for formats whose coordinates are not bundled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub source: String,
    pub file: String,
}

impl CatalogEntry {
    pub fn available(&self) -> bool {
        !self.file.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub dir: PathBuf,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: csv::Error },
    #[error("{0}: not in catalog")]
    Unknown(String),
    #[error("{name}: coordinates not bundled ({note})")]
    Unavailable { name: String, note: String },
    #[error("{name}: {err}")]
    Invalid { name: String, err: ConstellationError },
    #[error("{name}: manifest says M={expected}, file has {found}")]
    Cardinality { name: String, expected: usize, found: usize },
}

impl Catalog {
    /// Directory from the environment override or the bundled one.
    pub fn default_dir() -> PathBuf {
        std::env::var_os(CATALOG_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog"))
    }

    pub fn open_default() -> Result<Self, CatalogError> {
        Self::open(Self::default_dir())
    }

    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CatalogError> {
        let dir = dir.into();
        let path = dir.join("manifest.csv");
        let text = std::fs::read_to_string(&path).map_err(|source| CatalogError::Io { path: path.clone(), source })?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let entries = rdr
            .deserialize()
            .collect::<Result<Vec<CatalogEntry>, _>>()
            .map_err(|source| CatalogError::Manifest { path, source })?;
        Ok(Self { dir, entries })
    }

    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn available(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.available())
    }

    pub fn unavailable(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| !e.available())
    }

    /// Parse without normalizing.
    pub fn load_raw(&self, name: &str) -> Result<Constellation4D, CatalogError> {
        let e = self.entry(name).ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
        if !e.available() {
            return Err(CatalogError::Unavailable { name: name.to_string(), note: e.source.clone() });
        }
        let path = self.dir.join(&e.file);
        let text = std::fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source })?;
        let c = parse_constellation_file(&text, name).map_err(|err| CatalogError::Invalid { name: name.into(), err })?;
        if c.len() != e.m {
            return Err(CatalogError::Cardinality { name: name.into(), expected: e.m, found: c.len() });
        }
        Ok(c)
    }

    /// Parse and normalize to unit mean 4D energy.
    pub fn load(&self, name: &str) -> Result<Constellation4D, CatalogError> {
        let c = self.load_raw(name)?;
        normalize_energy(&c).map_err(|err| CatalogError::Invalid { name: name.into(), err })
    }

    /// Names matching a simple glob ('*' and '?').
    pub fn select(&self, pattern: &str) -> Vec<&CatalogEntry> {
        self.entries.iter().filter(|e| glob_match(pattern, &e.name)).collect()
    }
}

pub(crate) fn glob_match(pat: &str, s: &str) -> bool {
    fn rec(p: &[u8], s: &[u8]) -> bool {
        match (p.first(), s.first()) {
            (None, None) => true,
            (Some(b'*'), _) => rec(&p[1..], s) || (!s.is_empty() && rec(p, &s[1..])),
            (Some(b'?'), Some(_)) => rec(&p[1..], &s[1..]),
            (Some(a), Some(b)) if a == b => rec(&p[1..], &s[1..]),
            _ => false,
        }
    }
    rec(pat.as_bytes(), s.as_bytes())
}
