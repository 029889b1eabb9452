use super::coefficients::{compute_modulation_coefficients_for, ModulationCoefficients};
use super::integrals::LinkIntegrals;
use super::link::LinkSpec;
use crate::constellation::{compute_moments, Constellation4D, ConstellationError, MomentSet, Pol};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MODEL_4D")]
    Model4D,
    #[serde(rename = "EGN_4D")]
    Egn4D,
    #[serde(rename = "SSFM")]
    Ssfm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Model4D => "MODEL_4D",
            Method::Egn4D => "EGN_4D",
            Method::Ssfm => "SSFM",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "MODEL_4D" | "MODEL" => Some(Method::Model4D),
            "EGN_4D" | "EGN" => Some(Method::Egn4D),
            "SSFM" => Some(Method::Ssfm),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error("non-positive eta_{pol:?} = {value:e}: inconsistent coefficients or integrals")]
    NonPositive { pol: Pol, value: f64 },
    #[error("integrals computed for link {found}, expected {expected}")]
    LinkMismatch { expected: String, found: String },
    #[error("metadata mismatch: {0}")]
    Metadata(String),
}

/// (eta_x, eta_y) in 1/W^2 with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta_x: f64,
    pub eta_y: f64,
    pub method: Method,
    pub constellation: String,
    pub m: usize,
    pub link_digest: String,
}

pub fn to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

impl EtaEstimate {
    pub fn eta_x_db(&self) -> f64 {
        to_db(self.eta_x)
    }

    pub fn eta_y_db(&self) -> f64 {
        to_db(self.eta_y)
    }

    /// Mean of eta_x and eta_y in linear units, returned in dB.
    pub fn eta_bar_db(&self) -> f64 {
        to_db(0.5 * (self.eta_x + self.eta_y))
    }
}

/// Closed-form evaluation of one polarization's NLI coefficient [1/W^2] for a
/// unit-energy format (the P^3 factor of the moments cancels).
pub fn eta_from_coefficients(c: &ModulationCoefficients, chi: &LinkIntegrals, link: &LinkSpec) -> f64 {
    let x = &chi.chi_bar;
    let rs = link.symbol_rate;
    let re2 = |a: Complex64, b: Complex64, k: usize| 2.0 * (a * x[k] + b * x[k].conj()).re;
    let r3 = (c.phi[0] * x[0] + c.phi[1] * x[1] + c.phi[2] * x[2]).re;
    let r2 = (c.psi[0] * x[3]).re
        + re2(c.psi[1], c.psi[2], 4)
        + (c.psi[3] * x[5]).re
        + re2(c.lambda[0], c.lambda[1], 6)
        + (c.lambda[2] * x[7]).re
        + re2(c.lambda[3], c.lambda[4], 8)
        + (c.lambda[5] * x[9]).re;
    let r1 = (c.xi * x[10]).re;
    let gain = c.omega[0] * chi.zeta_bar[0] + c.omega[1] * chi.zeta_bar[1];
    let da = if c.power > 0.0 { rs * rs * gain.norm_sqr() / c.power } else { 0.0 };
    let g = link.gamma_si();
    (8.0 / 9.0f64).powi(2) * g * g * (rs.powi(3) * r3 + rs * rs * r2 + rs * r1 - da)
}

fn check_link(link: &LinkSpec, chi: &LinkIntegrals) -> Result<(), ModelError> {
    let d = link.integral_digest();
    if d != chi.link_digest {
        return Err(ModelError::LinkMismatch { expected: d, found: chi.link_digest.clone() });
    }
    Ok(())
}

fn finish(eta: [f64; 2]) -> Result<(f64, f64), ModelError> {
    for (i, v) in eta.iter().enumerate() {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(ModelError::NonPositive { pol: [Pol::X, Pol::Y][i], value: *v });
        }
    }
    Ok((eta[0], eta[1]))
}

/// Model evaluation from a moment set.
pub fn eta_from_moments(m: &MomentSet, link: &LinkSpec, chi: &LinkIntegrals) -> Result<(f64, f64), ModelError> {
    check_link(link, chi)?;
    let cx = compute_modulation_coefficients_for(m, Pol::X)?;
    let cy = compute_modulation_coefficients_for(m, Pol::Y)?;
    finish([eta_from_coefficients(&cx, chi, link), eta_from_coefficients(&cy, chi, link)])
}

/// 4D model for a normalized constellation.
pub fn eta_4d(c: &Constellation4D, link: &LinkSpec, chi: &LinkIntegrals) -> Result<EtaEstimate, ModelError> {
    let m = compute_moments(c)?;
    let (eta_x, eta_y) = eta_from_moments(&m, link, chi)?;
    Ok(EtaEstimate {
        eta_x,
        eta_y,
        method: Method::Model4D,
        constellation: c.name.clone(),
        m: c.len(),
        link_digest: link.digest(),
    })
}

/// 4D-EGN baseline: each polarization evaluated as if the format were the
/// product of its two polarization projections.
pub fn eta_egn_projection(c: &Constellation4D, link: &LinkSpec, chi: &LinkIntegrals) -> Result<EtaEstimate, ModelError> {
    let m = compute_moments(c)?.marginal_product();
    let (eta_x, eta_y) = eta_from_moments(&m, link, chi)?;
    Ok(EtaEstimate {
        eta_x,
        eta_y,
        method: Method::Egn4D,
        constellation: c.name.clone(),
        m: c.len(),
        link_digest: link.digest(),
    })
}

/// Closed-form EGN for one polarization of a PM-2D format with circular
/// marginals, written directly in terms of per-polarization moments.
pub fn egn_closed_form(mx: [f64; 3], my: [f64; 3], link: &LinkSpec, chi: &LinkIntegrals) -> f64 {
    let (px, py) = (mx[0], my[0]);
    let k4 = |m: [f64; 3]| m[1] - 2.0 * m[0] * m[0];
    let k6 = |m: [f64; 3]| m[2] - 9.0 * m[1] * m[0] + 12.0 * m[0].powi(3);
    let j = |i: usize| chi.normalized(i).re;
    let sum = px * (2.0 * px * px + py * py) * j(0)
        + px * (4.0 * k4(mx) + k4(my)) * j(7)
        + px * k4(mx) * j(9)
        + k6(mx) * j(10)
        - (k4(mx) * chi.zeta_bar[0] * link.symbol_rate).norm_sqr() / px;
    let g = link.gamma_si();
    (8.0 / 9.0f64).powi(2) * g * g * sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaMetrics {
    pub d_eta_x: f64,
    pub d_eta_y: f64,
    pub d_eta_bar: f64,
    pub eta_bar_db: f64,
    pub eta_bar_ref_db: f64,
}

/// Absolute dB deviations of `a` against `r`, and both eta_bar values.
pub fn eta_metrics(a: &EtaEstimate, r: &EtaEstimate) -> Result<EtaMetrics, ModelError> {
    if a.constellation != r.constellation || a.m != r.m {
        return Err(ModelError::Metadata(format!("{} (M={}) vs {} (M={})", a.constellation, a.m, r.constellation, r.m)));
    }
    if a.link_digest != r.link_digest {
        return Err(ModelError::Metadata("different links".into()));
    }
    let dx = (a.eta_x_db() - r.eta_x_db()).abs();
    let dy = (a.eta_y_db() - r.eta_y_db()).abs();
    Ok(EtaMetrics { d_eta_x: dx, d_eta_y: dy, d_eta_bar: 0.5 * (dx + dy), eta_bar_db: a.eta_bar_db(), eta_bar_ref_db: r.eta_bar_db() })
}
