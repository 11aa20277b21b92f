//! Entanglement of the ground state recovered from the field dependence
//! of its energy.
//!
//! Keeping two terms of the relative expansion, the Hellmann–Feynman slope
//! of E_rel fixes F = 2√(m+1) b₀b₁ − 2b₁², which with b₀² + b₁² = 1 gives
//! a quadratic in b₁². The measure then follows from the two-term I
//! expansion.

use serde::{Deserialize, Serialize};

use crate::entangle::{closed_form_trace, integral_i, measure, spin_trace};
use crate::model::{effective_frequency, FieldPoint, ModelParams};
use crate::spectra::{addition_energy, mean_rho_sq, ChannelSpec, RelSolution};
use crate::{Error, Result};

fn omega_over_wl(wl: f64) -> Result<f64> {
    if wl <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(effective_frequency(FieldPoint { wl_ratio: wl }) / wl)
}

/// F from the slope of the relative energy.
pub fn f_from_erel(wl: f64, m: i32, derel_dwl: f64) -> Result<f64> {
    let r = omega_over_wl(wl)?;
    Ok(1.0 + (1.0 - r) * f64::from(m) - r * derel_dwl)
}

/// F from the slope of the addition energy.
pub fn f_from_ea(wl: f64, m: i32, m_s: i32, dea_dwl: f64, g_star: f64, mass_ratio: f64) -> Result<f64> {
    let r = omega_over_wl(wl)?;
    Ok((1.0 - r) * f64::from(m) + r * (g_star * mass_ratio * f64::from(m_s + 1) - dea_dwl))
}

/// Smaller root b₁² of (m+2)x² + (F−m−1)x + F²/4 = 0, and b₀ = √(1 − b₁²).
pub fn solve_b1(f: f64, m: i32) -> Result<(f64, f64)> {
    let mf = f64::from(m);
    let disc = (f - mf - 1.0).powi(2) - (mf + 2.0) * f * f;
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant(disc));
    }
    let b1_sq = ((mf + 1.0 - f) - disc.sqrt()) / (2.0 * (mf + 2.0));
    let b1_sq = b1_sq.max(0.0);
    Ok((b1_sq, (1.0 - b1_sq).sqrt()))
}

/// 1 − 2Tr[ρ_spin²][I₀b₀⁴ + I₁(4b₀² + b₁²)b₁²] with the spin state of the
/// lowest level of channel m.
pub fn first_order_measure(m: i32, b0: f64, b1_sq: f64) -> Result<f64> {
    let closure = b0 * b0 + b1_sq;
    if (closure - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(closure));
    }
    let s = m.rem_euclid(2);
    Ok(first_order_with_spin(m, s, b0, b1_sq))
}

fn first_order_with_spin(m: i32, m_s: i32, b0: f64, b1_sq: f64) -> f64 {
    let i0 = integral_i(0, 0, 0, 0, m);
    let i1 = integral_i(0, 0, 1, 1, m);
    let trace = i0 * b0.powi(4) + i1 * (4.0 * b0 * b0 + b1_sq) * b1_sq;
    measure(trace, spin_trace(m_s))
}

/// ⟨ρ₁₂²⟩ from the full tridiagonal sum and from its two-term reduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoSq {
    pub general: f64,
    pub two_term: f64,
}

pub fn mean_rho12_sq(sol: &RelSolution) -> Result<RhoSq> {
    let general = mean_rho_sq(sol, 0)?;
    let b0 = sol.b(0, 0, 0);
    let b1 = sol.b(0, 1, 0);
    let m1 = f64::from(sol.m.unsigned_abs()) + 1.0;
    let two_term = 2.0 / sol.basis_omega * (m1 - 2.0 * b0 * b1 * m1.sqrt() + 2.0 * b1 * b1);
    Ok(RhoSq { general, two_term })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSource {
    Simulated,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub wl_ratio: f64,
    pub e_a: f64,
    pub m: i32,
    pub m_s: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditionCurve {
    pub samples: Vec<CurveSample>,
    pub source: CurveSource,
}

impl AdditionCurve {
    pub fn new(samples: Vec<CurveSample>, source: CurveSource) -> Result<Self> {
        if samples.windows(2).any(|w| w[1].wl_ratio <= w[0].wl_ratio) {
            return Err(Error::InvalidParameter("wl_ratio must be strictly increasing".into()));
        }
        if samples.iter().any(|s| !s.wl_ratio.is_finite() || !s.e_a.is_finite() || s.wl_ratio < 0.0) {
            return Err(Error::InvalidParameter("curve samples must be finite with wl_ratio ≥ 0".into()));
        }
        if samples.iter().any(|s| !(-1..=1).contains(&s.m_s)) {
            return Err(Error::InvalidParameter("M_S must be -1, 0 or 1".into()));
        }
        Ok(Self { samples, source })
    }

    /// Index ranges of maximal runs with constant (m, M_S).
    pub fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = vec![];
        let mut start = 0;
        for i in 1..=self.samples.len() {
            let split = i == self.samples.len()
                || (self.samples[i].m, self.samples[i].m_s) != (self.samples[start].m, self.samples[start].m_s);
            if split {
                out.push(start..i);
                start = i;
            }
        }
        if self.samples.is_empty() {
            out.clear();
        }
        out
    }
}

/// Addition-energy curve generated from the spectra on a field grid.
pub fn simulate_curve(params: &ModelParams, grid: &[f64], spec: &ChannelSpec, m_max: i32) -> Result<AdditionCurve> {
    use rayon::prelude::*;
    let samples = grid
        .par_iter()
        .map(|&wl| {
            let a = addition_energy(params, FieldPoint::new(wl)?, spec, m_max)?;
            Ok(CurveSample { wl_ratio: wl, e_a: a.e_a, m: a.m, m_s: a.m_s })
        })
        .collect::<Result<Vec<_>>>()?;
    AdditionCurve::new(samples, CurveSource::Simulated)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub wl_ratio: f64,
    pub m: i32,
    pub m_s: i32,
    pub f: f64,
    pub b1_sq: f64,
    pub b0: f64,
    pub measure_0th: f64,
    pub measure_1st: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub wl_ratio: f64,
    pub reason: String,
    /// The sample was usable but fell outside the first-order regime.
    pub numerical: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub results: Vec<EstimateResult>,
    pub skipped: Vec<Skipped>,
}

/// Derivative at x[k] of the parabola through three points.
fn three_point_slope(x: [f64; 3], y: [f64; 3], k: usize) -> f64 {
    let t = x[k];
    let mut d = 0.0;
    for i in 0..3 {
        let mut basis_slope = 0.0;
        for j in 0..3 {
            if j == i {
                continue;
            }
            let mut term = 1.0 / (x[i] - x[j]);
            for l in 0..3 {
                if l != i && l != j {
                    term *= (t - x[l]) / (x[i] - x[l]);
                }
            }
            basis_slope += term;
        }
        d += y[i] * basis_slope;
    }
    d
}

/// Per-sample estimates along an addition-energy curve. Slopes are
/// three-point differences inside each (m, M_S) segment; samples adjacent
/// to a segment boundary are skipped because F jumps there.
pub fn estimate_curve(curve: &AdditionCurve, params: &ModelParams) -> EstimateReport {
    let mut report = EstimateReport::default();
    let segments = curve.segments();
    let nseg = segments.len();
    for (si, range) in segments.into_iter().enumerate() {
        let seg = &curve.samples[range.clone()];
        if seg.len() < 3 {
            for s in seg {
                report.skipped.push(Skipped { wl_ratio: s.wl_ratio, reason: format!("segment m={} has fewer than 3 samples", s.m), numerical: false });
            }
            continue;
        }
        for (k, s) in seg.iter().enumerate() {
            let at_left_boundary = k == 0 && si > 0;
            let at_right_boundary = k + 1 == seg.len() && si + 1 < nseg;
            if at_left_boundary || at_right_boundary {
                report.skipped.push(Skipped { wl_ratio: s.wl_ratio, reason: "adjacent to a segment boundary".into(), numerical: false });
                continue;
            }
            let (lo, pos) = match k {
                0 => (0, 0),
                _ if k + 1 == seg.len() => (k - 2, 2),
                _ => (k - 1, 1),
            };
            let xs = [seg[lo].wl_ratio, seg[lo + 1].wl_ratio, seg[lo + 2].wl_ratio];
            let ys = [seg[lo].e_a, seg[lo + 1].e_a, seg[lo + 2].e_a];
            let slope = three_point_slope(xs, ys, pos);
            match estimate_point(s, slope, params) {
                Ok(r) => report.results.push(r),
                Err(e) => report.skipped.push(Skipped { wl_ratio: s.wl_ratio, reason: e.to_string(), numerical: e.is_numerical() }),
            }
        }
    }
    report
}

fn estimate_point(s: &CurveSample, dea_dwl: f64, params: &ModelParams) -> Result<EstimateResult> {
    let f = f_from_ea(s.wl_ratio, s.m, s.m_s, dea_dwl, params.g_star, params.mass_ratio)?;
    let (b1_sq, b0) = solve_b1(f, s.m)?;
    Ok(EstimateResult {
        wl_ratio: s.wl_ratio,
        m: s.m,
        m_s: s.m_s,
        f,
        b1_sq,
        b0,
        measure_0th: measure(closed_form_trace(s.m), spin_trace(s.m_s)),
        measure_1st: first_order_with_spin(s.m, s.m_s, b0, b1_sq),
    })
}
