//! Dual-polarization 4D constellations: ingestion, generators, normalization,
//! polarization projections and exact moment extraction.

mod catalog;
mod generate;
mod moments;

pub use catalog::{Catalog, CatalogEntry, CatalogError, CATALOG_ENV};
pub use generate::{
    generate_120cell, generate_2a8psk, generate_dicyclic, generate_pm_bpsk, generate_pm_qam,
    generate_squared_phase,
};
pub use moments::{compute_moments, MomentSet, MAX_ORDER};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Tolerance on the mean 4D energy for a constellation to count as normalized.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConstellationError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cardinality {0} < 2")]
    Cardinality(usize),
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("point {0} is not finite")]
    NonFinite(usize),
    #[error("all-zero constellation")]
    ZeroEnergy,
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("constellation not normalized (mean 4D energy {0})")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pol {
    X,
    Y,
}

impl Pol {
    pub fn other(self) -> Pol {
        match self {
            Pol::X => Pol::Y,
            Pol::Y => Pol::X,
        }
    }
}

/// M points in R^4, ordered (x-I, x-Q, y-I, y-Q), equiprobable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation4D {
    pub name: String,
    points: Vec<[f64; 4]>,
}

impl Constellation4D {
    /// Validating constructor: M >= 2, finite, pairwise distinct.
    pub fn new(name: impl Into<String>, points: Vec<[f64; 4]>) -> Result<Self, ConstellationError> {
        if points.len() < 2 {
            return Err(ConstellationError::Cardinality(points.len()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(ConstellationError::NonFinite(i));
            }
        }
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&a, &b| {
            points[a]
                .iter()
                .zip(points[b].iter())
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in idx.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(ConstellationError::Duplicate(a, b));
            }
        }
        Ok(Self { name: name.into(), points })
    }

    pub fn from_complex_pairs(
        name: impl Into<String>,
        pts: &[(Complex64, Complex64)],
    ) -> Result<Self, ConstellationError> {
        let points = pts.iter().map(|(x, y)| [x.re, x.im, y.re, y.im]).collect();
        Self::new(name, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }

    pub fn complex(&self, i: usize) -> (Complex64, Complex64) {
        let p = &self.points[i];
        (Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]))
    }

    pub fn complex_points(&self) -> Vec<(Complex64, Complex64)> {
        (0..self.len()).map(|i| self.complex(i)).collect()
    }

    pub fn mean_energy(&self) -> f64 {
        let s: f64 = self.points.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>()).sum();
        s / self.len() as f64
    }

    pub fn is_normalized(&self) -> bool {
        (self.mean_energy() - 1.0).abs() <= NORM_TOL
    }

    /// Minimum pairwise Euclidean distance (O(M^2)).
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d: f64 = (0..4).map(|k| (self.points[i][k] - self.points[j][k]).powi(2)).sum();
                best = best.min(d);
            }
        }
        best.sqrt()
    }

    /// Exchange the x and y polarizations.
    pub fn swap_polarizations(&self) -> Self {
        Self {
            name: format!("{}-swapped", self.name),
            points: self.points.iter().map(|p| [p[2], p[3], p[0], p[1]]).collect(),
        }
    }

    /// Multiply one polarization by e^{j theta}.
    pub fn rotate(&self, pol: Pol, theta: f64) -> Self {
        let r = Complex64::from_polar(1.0, theta);
        let points = self
            .points
            .iter()
            .map(|p| match pol {
                Pol::X => {
                    let z = Complex64::new(p[0], p[1]) * r;
                    [z.re, z.im, p[2], p[3]]
                }
                Pol::Y => {
                    let z = Complex64::new(p[2], p[3]) * r;
                    [p[0], p[1], z.re, z.im]
                }
            })
            .collect();
        Self { name: self.name.clone(), points }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            name: self.name.clone(),
            points: self.points.iter().map(|p| p.map(|v| v * k)).collect(),
        }
    }

    /// Text serialization in the catalog format.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n# M = {}\n", self.name, self.len());
        for p in &self.points {
            let _ = writeln!(s, "{:.17e} {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2], p[3]);
        }
        s
    }
}

/// Projection of a 4D format onto one polarization, multiplicities retained.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation2D {
    pub points: Vec<Complex64>,
}

impl Constellation2D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// E[s^a conj(s)^b] over the stored points.
    pub fn moment(&self, a: u32, b: u32) -> Complex64 {
        let mut acc = moments::Neumaier::default();
        for z in &self.points {
            acc.add(z.powu(a) * z.conj().powu(b));
        }
        acc.sum() / self.len() as f64
    }
}

pub fn parse_constellation_file(text: &str, name: &str) -> Result<Constellation4D, ConstellationError> {
    let mut pts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(ConstellationError::Parse {
                line: i + 1,
                msg: format!("expected 4 columns, found {}", toks.len()),
            });
        }
        let mut p = [0.0; 4];
        for (k, t) in toks.iter().enumerate() {
            p[k] = t.parse::<f64>().map_err(|_| ConstellationError::Parse {
                line: i + 1,
                msg: format!("non-numeric token {t:?}"),
            })?;
            if !p[k].is_finite() {
                return Err(ConstellationError::Parse { line: i + 1, msg: format!("non-finite value {t:?}") });
            }
        }
        pts.push(p);
    }
    Constellation4D::new(name, pts)
}

/// Uniform scaling to unit mean 4D energy.
pub fn normalize_energy(c: &Constellation4D) -> Result<Constellation4D, ConstellationError> {
    let e = c.mean_energy();
    if e == 0.0 {
        return Err(ConstellationError::ZeroEnergy);
    }
    if e == 1.0 {
        return Ok(c.clone());
    }
    Ok(c.scaled(1.0 / e.sqrt()))
}

pub fn project_polarization(c: &Constellation4D, pol: Pol) -> Constellation2D {
    let points = (0..c.len())
        .map(|i| {
            let (x, y) = c.complex(i);
            match pol {
                Pol::X => x,
                Pol::Y => y,
            }
        })
        .collect();
    Constellation2D { points }
}
