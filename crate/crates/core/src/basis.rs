//! Fock–Darwin and vertical oscillator states for single-particle,
//! center-of-mass, and relative coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{hermite_normalized, laguerre_normalized};
use crate::{Error, Result};

/// In-plane Fock–Darwin label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode2D {
    pub n: u32,
    pub m: i32,
}

impl Mode2D {
    pub const fn new(n: u32, m: i32) -> Self {
        Self { n, m }
    }

    /// Oscillator quanta 2n + |m|.
    pub fn quanta(self) -> u32 {
        2 * self.n + self.m.unsigned_abs()
    }
}

/// Vertical oscillator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeZ {
    pub nz: u32,
}

/// Full label of one oscillator: in-plane part plus the vertical part in
/// the 3D model (`None` in the planar model).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub planar: Mode2D,
    pub z: Option<ModeZ>,
}

impl Mode {
    pub const fn planar(n: u32, m: i32) -> Self {
        Self { planar: Mode2D::new(n, m), z: None }
    }

    pub const fn spatial(n: u32, m: i32, nz: u32) -> Self {
        Self { planar: Mode2D::new(n, m), z: Some(ModeZ { nz }) }
    }

    pub fn nz(self) -> u32 {
        self.z.map_or(0, |z| z.nz)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.z {
            None => write!(f, "({},{})", self.planar.n, self.planar.m),
            Some(z) => write!(f, "({},{};{})", self.planar.n, self.planar.m, z.nz),
        }
    }
}

/// Which coordinate a state lives in; fixes the oscillator length through
/// the effective mass (m*, 2m*, m*/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Single,
    CenterOfMass,
    Relative,
}

impl Role {
    /// Factor multiplying the frequency in the Gaussian exponent.
    pub fn scale(self) -> f64 {
        match self {
            Role::Single => 1.0,
            Role::CenterOfMass => 2.0,
            Role::Relative => 0.5,
        }
    }
}

/// Ω(2n + |m| + 1) − ω_L m.
pub fn fd_energy(mode: Mode2D, omega: f64, wl: f64) -> f64 {
    omega * f64::from(mode.quanta() + 1) - wl * f64::from(mode.m)
}

/// ω_z(n_z + 1/2); the planar model (ω_z = ∞) has no vertical quanta.
pub fn z_energy(mode: ModeZ, wz: f64) -> Result<f64> {
    if !wz.is_finite() {
        return Err(Error::NoVerticalMotion);
    }
    Ok(wz * (f64::from(mode.nz) + 0.5))
}

/// Energy of a full mode; `wz` is ignored when the mode has no z part.
pub fn mode_energy(mode: Mode, omega: f64, wl: f64, wz: Option<f64>) -> Result<f64> {
    let planar = fd_energy(mode.planar, omega, wl);
    match (mode.z, wz) {
        (None, _) => Ok(planar),
        (Some(z), Some(w)) => Ok(planar + z_energy(z, w)?),
        (Some(_), None) => Err(Error::NoVerticalMotion),
    }
}

/// Normalized Fock–Darwin function at (ρ, φ).
pub fn fd_eval(mode: Mode2D, role: Role, omega: f64, rho: f64, phi: f64) -> Complex64 {
    let s = omega * role.scale();
    let am = mode.m.unsigned_abs();
    let t = s * rho * rho;
    let radial = (s / std::f64::consts::PI).sqrt()
        * laguerre_normalized(mode.n, f64::from(am), t)
        * (s.sqrt() * rho).powi(am as i32)
        * (-0.5 * t).exp();
    Complex64::from_polar(radial, f64::from(mode.m) * phi)
}

/// Fock–Darwin function at a Cartesian point.
pub fn fd_eval_xy(mode: Mode2D, role: Role, omega: f64, x: f64, y: f64) -> Complex64 {
    fd_eval(mode, role, omega, x.hypot(y), y.atan2(x))
}

/// Normalized Hermite–Gaussian at z.
pub fn z_eval(mode: ModeZ, role: Role, wz: f64, z: f64) -> Result<f64> {
    if !wz.is_finite() {
        return Err(Error::NoVerticalMotion);
    }
    let s = wz * role.scale();
    let y = s.sqrt() * z;
    Ok((s / std::f64::consts::PI).powf(0.25) * hermite_normalized(mode.nz, y) * (-0.5 * y * y).exp())
}

/// All in-plane labels with exactly `q` quanta, ordered by (n, m).
pub fn planar_shell(q: u32) -> Vec<Mode2D> {
    let mut out: Vec<Mode2D> = (0..=q / 2)
        .flat_map(|n| {
            let am = (q - 2 * n) as i32;
            if am == 0 {
                vec![Mode2D::new(n, 0)]
            } else {
                vec![Mode2D::new(n, -am), Mode2D::new(n, am)]
            }
        })
        .collect();
    out.sort();
    out
}
