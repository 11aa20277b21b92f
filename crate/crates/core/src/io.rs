//! Text formats: the `key = value` dot config, field grids, and the
//! addition-energy CSV.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::estimator::{AdditionCurve, CurveSample, CurveSource};
use crate::model::{Dimension, ModelParams};
use crate::{Error, Result};

/// Upper bound on grid length; protects against `0:1e12:1e-12`.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Values present in a config file; absent keys keep their defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub wz_ratio: Option<f64>,
    pub lambda: Option<f64>,
    pub g_star: Option<f64>,
    pub mass_ratio: Option<f64>,
    pub hbar_omega0_mev: Option<f64>,
    pub dimension: Option<Dimension>,
}

impl ConfigOverrides {
    /// Layer `other` on top of `self`.
    pub fn merge(&mut self, other: &ConfigOverrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(wz_ratio, lambda, g_star, mass_ratio, hbar_omega0_mev, dimension);
    }

    /// Apply to the GaAs defaults. A finite `wz_ratio` without an explicit
    /// dimension selects the 3D model; `dimension = 2d` alone forces
    /// `wz_ratio = inf`.
    pub fn resolve(&self) -> Result<ModelParams> {
        let mut p = ModelParams::gaas();
        if let Some(v) = self.lambda {
            p.lambda = v;
        }
        if let Some(v) = self.g_star {
            p.g_star = v;
        }
        if let Some(v) = self.mass_ratio {
            p.mass_ratio = v;
        }
        if let Some(v) = self.hbar_omega0_mev {
            p.hbar_omega0_mev = Some(v);
        }
        match (self.wz_ratio, self.dimension) {
            (Some(w), Some(d)) => {
                p.wz_ratio = w;
                p.dimension = d;
            }
            (Some(w), None) => {
                p.wz_ratio = w;
                p.dimension = if w.is_infinite() { Dimension::TwoD } else { Dimension::ThreeD };
            }
            (None, Some(Dimension::TwoD)) => {
                p.wz_ratio = f64::INFINITY;
                p.dimension = Dimension::TwoD;
            }
            (None, Some(Dimension::ThreeD)) => {
                return Err(Error::InvalidParameter("dimension 3d needs a finite wz_ratio".into()));
            }
            (None, None) => {}
        }
        p.validate()?;
        Ok(p)
    }
}

fn parse_f64(text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text.trim().parse().map_err(|_| format!("not a number: {text:?}"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn parse_finite(text: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(text)?;
    if v.is_infinite() {
        return Err(format!("value must be finite: {text:?}"));
    }
    Ok(v)
}

/// Parse a dot config. Blank lines and `#` comments are ignored; keys are
/// case-sensitive except `hbar_omega0_meV`, which also accepts `..._mev`.
pub fn parse_config(text: &str) -> Result<ConfigOverrides> {
    let mut cfg = ConfigOverrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "wz_ratio" => cfg.wz_ratio = Some(parse_f64(value).map_err(err)?),
            "lambda" => cfg.lambda = Some(parse_finite(value).map_err(err)?),
            "g_star" => cfg.g_star = Some(parse_finite(value).map_err(err)?),
            "mass_ratio" => cfg.mass_ratio = Some(parse_finite(value).map_err(err)?),
            "hbar_omega0_meV" | "hbar_omega0_mev" => cfg.hbar_omega0_mev = Some(parse_finite(value).map_err(err)?),
            "dimension" => cfg.dimension = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    Ok(cfg)
}

/// Parse `lo:hi:step` (inclusive of `hi` up to rounding) or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let err = |msg: String| Error::Parse { line: 1, msg };
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_finite(v).map_err(err)?]),
        [lo, hi, step] => {
            let lo = parse_finite(lo).map_err(err)?;
            let hi = parse_finite(hi).map_err(err)?;
            let step = parse_finite(step).map_err(err)?;
            if step <= 0.0 {
                return Err(err(format!("grid step must be positive, got {step}")));
            }
            if hi < lo {
                return Err(err(format!("grid end {hi} is below its start {lo}")));
            }
            let span = (hi - lo) / step;
            if !span.is_finite() || span >= MAX_GRID_POINTS as f64 {
                return Err(err(format!("grid has more than {MAX_GRID_POINTS} points")));
            }
            let count = (span + 1e-9).floor() as usize + 1;
            // Round each point to 12 significant digits so 0.1 + 2·0.1 prints as 0.3.
            Ok((0..count).map(|k| round_sig(lo + k as f64 * step)).collect())
        }
        _ => Err(err(format!("expected `lo:hi:step` or a number, got {text:?}"))),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    wl_ratio: f64,
    #[serde(rename = "E_a")]
    e_a: f64,
    m: i32,
    #[serde(rename = "M_S")]
    m_s: i32,
}

pub const CURVE_HEADER: [&str; 4] = ["wl_ratio", "E_a", "m", "M_S"];

/// Read an addition-energy curve with header `wl_ratio,E_a,m,M_S`.
pub fn read_curve_csv<R: Read>(reader: R) -> Result<AdditionCurve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CURVE_HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("expected header {}, got {}", CURVE_HEADER.join(","), headers.iter().collect::<Vec<_>>().join(",")) });
    }
    let mut samples = vec![];
    for row in rdr.deserialize() {
        let row: CurveRow = row?;
        samples.push(CurveSample { wl_ratio: row.wl_ratio, e_a: row.e_a, m: row.m, m_s: row.m_s });
    }
    AdditionCurve::new(samples, CurveSource::File)
}

pub fn parse_curve_csv(text: &str) -> Result<AdditionCurve> {
    read_curve_csv(text.as_bytes())
}

pub fn write_curve_csv<W: Write>(curve: &AdditionCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for s in &curve.samples {
        w.write_record([fmt_f64(s.wl_ratio), fmt_f64(s.e_a), s.m.to_string(), s.m_s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Deterministic text for a float: 12 significant digits, trailing zeros
/// dropped, `inf`/`-inf`/`NaN` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let exp = r.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{r:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{r:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}
