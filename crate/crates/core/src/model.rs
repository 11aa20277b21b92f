//! Dot parameters in scaled units and the field-dependent effective
//! quantities derived from them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dimension::TwoD => "2d",
            Dimension::ThreeD => "3d",
        })
    }
}

impl std::str::FromStr for Dimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "2d" | "twod" => Ok(Dimension::TwoD),
            "3d" | "threed" => Ok(Dimension::ThreeD),
            other => Err(Error::InvalidParameter(format!("dimension must be 2d or 3d, got {other:?}"))),
        }
    }
}

/// Scaled dot parameters.
///
/// `wz_ratio = ∞` selects the planar model, in which the vertical motion is
/// frozen in its ground state and dropped entirely (no `ħω_z/2` terms).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub wz_ratio: f64,
    /// Coulomb strength in `ħω₀ℓ₀`; equals the Wigner parameter at B = 0.
    pub lambda: f64,
    pub g_star: f64,
    pub mass_ratio: f64,
    pub hbar_omega0_mev: Option<f64>,
    pub dimension: Dimension,
}

impl ModelParams {
    pub fn new(wz_ratio: f64, lambda: f64, g_star: f64, mass_ratio: f64) -> Result<Self> {
        let dimension = if wz_ratio.is_infinite() { Dimension::TwoD } else { Dimension::ThreeD };
        let p = Self { wz_ratio, lambda, g_star, mass_ratio, hbar_omega0_mev: None, dimension };
        p.validate()?;
        Ok(p)
    }

    pub fn planar(lambda: f64, g_star: f64, mass_ratio: f64) -> Result<Self> {
        Self::new(f64::INFINITY, lambda, g_star, mass_ratio)
    }

    /// Typical GaAs dot: m* = 0.067 mₑ, ħω₀ = 3.165 meV, λ = 2, g* = -0.44, planar.
    pub fn gaas() -> Self {
        Self {
            wz_ratio: f64::INFINITY,
            lambda: 2.0,
            g_star: -0.44,
            mass_ratio: 0.067,
            hbar_omega0_mev: Some(3.165),
            dimension: Dimension::TwoD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.wz_ratio.is_nan() || self.wz_ratio <= 0.0 {
            return bad(format!("wz_ratio must be > 0 or inf, got {}", self.wz_ratio));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and ≥ 0, got {}", self.lambda));
        }
        if !self.g_star.is_finite() {
            return bad(format!("g_star must be finite, got {}", self.g_star));
        }
        if !(self.mass_ratio > 0.0 && self.mass_ratio.is_finite()) {
            return bad(format!("mass_ratio must be > 0, got {}", self.mass_ratio));
        }
        if let Some(e) = self.hbar_omega0_mev {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("hbar_omega0_meV must be > 0, got {e}"));
            }
        }
        match (self.dimension, self.wz_ratio.is_infinite()) {
            (Dimension::TwoD, false) => bad("2d model requires wz_ratio = inf".into()),
            (Dimension::ThreeD, true) => bad("3d model requires a finite wz_ratio".into()),
            _ => Ok(()),
        }
    }

    /// Vertical frequency ω_z/ω₀, or `None` in the planar model.
    pub fn omega_z(&self) -> Option<f64> {
        match self.dimension {
            Dimension::TwoD => None,
            Dimension::ThreeD => Some(self.wz_ratio),
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_g_star(mut self, g_star: f64) -> Self {
        self.g_star = g_star;
        self
    }
}

/// Magnetic field expressed through the Larmor frequency ω_L/ω₀.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub wl_ratio: f64,
}

impl FieldPoint {
    pub fn new(wl_ratio: f64) -> Result<Self> {
        if !(wl_ratio >= 0.0 && wl_ratio.is_finite()) {
            return Err(Error::InvalidParameter(format!("wl_ratio must be finite and ≥ 0, got {wl_ratio}")));
        }
        Ok(Self { wl_ratio })
    }
}

/// Ω/ω₀ = sqrt(1 + (ω_L/ω₀)²).
pub fn effective_frequency(field: FieldPoint) -> f64 {
    1.0f64.hypot(field.wl_ratio)
}

/// λ_Ω = λ (ω₀/Ω)^{1/2}: the interaction strength measured against the
/// effective confinement length ℓ_Ω.
pub fn effective_interaction(params: &ModelParams, field: FieldPoint) -> f64 {
    params.lambda / effective_frequency(field).sqrt()
}

/// Spin Zeeman energy g* (m*/mₑ) (ω_L/ω₀) M_S in ħω₀.
pub fn zeeman_shift(params: &ModelParams, field: FieldPoint, m_s: i32) -> f64 {
    debug_assert!((-1..=1).contains(&m_s));
    params.g_star * params.mass_ratio * field.wl_ratio * f64::from(m_s)
}

/// Convert an energy in ħω₀ to meV when the physical scale is known.
pub fn to_mev(params: &ModelParams, energy: f64) -> Option<f64> {
    params.hbar_omega0_mev.map(|s| s * energy)
}
