use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const C_LIGHT: f64 = 299_792_458.0;

/// beta2 [s^2/m] from dispersion D [ps/(nm km)] at wavelength lambda [nm].
pub fn beta2_from_dispersion(d_ps_nm_km: f64, lambda_nm: f64) -> f64 {
    let d = d_ps_nm_km * 1e-12 / (1e-9 * 1e3); // s/m^2
    let lambda = lambda_nm * 1e-9;
    -d * lambda * lambda / (2.0 * std::f64::consts::PI * C_LIGHT)
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid link: {0}")]
pub struct LinkError(pub String);

/// Homogeneous multi-span link with lumped amplification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    /// dB/km
    pub alpha_db_km: f64,
    /// ps/(nm km)
    pub dispersion: f64,
    /// nm
    pub wavelength_nm: f64,
    /// 1/(W km)
    pub gamma: f64,
    pub span_length_km: f64,
    pub span_count: u32,
    /// baud
    pub symbol_rate: f64,
    pub rolloff: f64,
    pub launch_power_dbm: f64,
}

impl Default for LinkSpec {
    fn default() -> Self {
        Self::reference()
    }
}

impl LinkSpec {
    /// 32 GBd single channel over 10 x 100 km SMF at -20 dBm.
    pub fn reference() -> Self {
        Self {
            alpha_db_km: 0.2,
            dispersion: 17.0,
            wavelength_nm: 1550.0,
            gamma: 1.3,
            span_length_km: 100.0,
            span_count: 10,
            symbol_rate: 32e9,
            rolloff: 0.01,
            launch_power_dbm: -20.0,
        }
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        let fin = [
            self.alpha_db_km,
            self.dispersion,
            self.wavelength_nm,
            self.gamma,
            self.span_length_km,
            self.symbol_rate,
            self.rolloff,
            self.launch_power_dbm,
        ];
        if fin.iter().any(|v| !v.is_finite()) {
            return Err(LinkError("non-finite parameter".into()));
        }
        if self.alpha_db_km < 0.0 {
            return Err(LinkError(format!("alpha {} < 0", self.alpha_db_km)));
        }
        if self.span_length_km <= 0.0 {
            return Err(LinkError(format!("span length {} <= 0", self.span_length_km)));
        }
        if self.span_count < 1 {
            return Err(LinkError("span count < 1".into()));
        }
        if self.symbol_rate <= 0.0 {
            return Err(LinkError(format!("symbol rate {} <= 0", self.symbol_rate)));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(LinkError(format!("rolloff {} outside [0, 1]", self.rolloff)));
        }
        if self.wavelength_nm <= 0.0 {
            return Err(LinkError("wavelength <= 0".into()));
        }
        Ok(())
    }

    /// Power attenuation coefficient [1/m].
    pub fn alpha(&self) -> f64 {
        self.alpha_db_km / (10.0 * std::f64::consts::E.log10()) / 1e3
    }

    /// [s^2/m]
    pub fn beta2(&self) -> f64 {
        beta2_from_dispersion(self.dispersion, self.wavelength_nm)
    }

    /// [1/(W m)]
    pub fn gamma_si(&self) -> f64 {
        self.gamma * 1e-3
    }

    pub fn span_length(&self) -> f64 {
        self.span_length_km * 1e3
    }

    pub fn launch_power(&self) -> f64 {
        1e-3 * 10f64.powf(self.launch_power_dbm / 10.0)
    }

    /// Dispersion phase scale 4 pi^2 beta2 L Rs^2 of the normalized kernel.
    pub fn kappa(&self) -> f64 {
        4.0 * std::f64::consts::PI.powi(2) * self.beta2() * self.span_length() * self.symbol_rate.powi(2)
    }

    pub fn with_power(&self, dbm: f64) -> Self {
        Self { launch_power_dbm: dbm, ..self.clone() }
    }

    /// Digest over every field.
    pub fn digest(&self) -> String {
        digest_json(&serde_json::to_value(self).unwrap())
    }

    /// Digest over the fields the band integrals depend on.
    pub fn integral_digest(&self) -> String {
        let v = serde_json::json!({
            "alpha": self.alpha_db_km,
            "dispersion": self.dispersion,
            "wavelength": self.wavelength_nm,
            "span_length": self.span_length_km,
            "span_count": self.span_count,
            "symbol_rate": self.symbol_rate,
        });
        digest_json(&v)
    }
}

pub(crate) fn digest_json(v: &serde_json::Value) -> String {
    let h = Sha256::digest(v.to_string().as_bytes());
    hex::encode(&h[..12])
}
