//! `qdot` command line.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 for numerical
//! diagnostics (non-convergence, first-order regime violations, m_max
//! reached).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::basis::Mode;
use crate::entangle::{lowest_state_report, lowest_state_spin, Method};
use crate::estimator::{estimate_curve, simulate_curve};
use crate::io::{fmt_f64, parse_config, parse_grid, read_curve_csv, round_sig, write_curve_csv, ConfigOverrides};
use crate::model::{Dimension, FieldPoint, ModelParams};
use crate::mosh::{cm_to_ip, CmRelState, Sign};
use crate::ptlimit::{limit_state_table, solve_pt};
use crate::spectra::{ground_state_m, ground_state_scan, lowest_total_energy, ChannelSpec};
use crate::{Error, Result};

pub const CONFIG_ENV: &str = "QDOT_CONFIG";
pub const DEFAULT_CONFIG: &str = "dot.cfg";

#[derive(Debug, Parser)]
#[command(name = "qdot", version, about = "Spectra and entanglement of two electrons in a parabolic quantum dot")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Dot config file (`key = value`); falls back to $QDOT_CONFIG, then ./dot.cfg.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coulomb strength in ħω₀ℓ₀.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// ω_z/ω₀; `inf` selects the planar model.
    #[arg(long = "wz-ratio", global = true)]
    wz_ratio: Option<f64>,
    /// Effective Landé factor
    #[arg(long = "g-star", global = true, allow_hyphen_values = true)]
    g_star: Option<f64>,
    /// m*/mₑ.
    #[arg(long = "mass-ratio", global = true)]
    mass_ratio: Option<f64>,
    /// 2d or 3d
    #[arg(long, global = true)]
    dimension: Option<Dimension>,
    /// Radial truncation of each relative channel.
    #[arg(long, global = true)]
    nmax: Option<u32>,
    /// Vertical truncation (3D only).
    #[arg(long, global = true)]
    nzmax: Option<u32>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest total energy per relative m: wl_ratio,m,S,M_S,E_total.
    Spectrum {
        #[arg(long, default_value = "0")]
        wl: String,
        /// Restrict to one channel.
        #[arg(long)]
        m: Option<i32>,
        #[arg(long = "m-max", default_value_t = 8)]
        m_max: i32,
    },
    /// Ground-state segments: wl_lo,wl_hi,m,S,M_S.
    GroundState {
        #[arg(long, default_value = "0:3:0.01")]
        wl: String,
        #[arg(long = "m-max", default_value_t = 12)]
        m_max: i32,
    },
    /// Entanglement of the lowest state of channel m, as JSON.
    Entangle {
        #[arg(long)]
        m: i32,
        #[arg(long, default_value = "0")]
        wl: String,
        #[arg(long, default_value = "cm-ij")]
        method: String,
    },
    /// Ground-state entanglement along a field grid: wl_ratio,m,S,M_S,measure.
    ScanEntangle {
        #[arg(long, default_value = "0:3:0.01")]
        wl: String,
        #[arg(long = "m-max", default_value_t = 12)]
        m_max: i32,
    },
    /// First-order perturbation theory on the ground shell of M, as JSON.
    PtLimit {
        #[arg(long = "M")]
        big_m: u32,
    },
    /// IP expansion of a CM × relative state: n1,m1,nz1,n2,m2,nz2,amplitude.
    Transform {
        #[arg(long)]
        ncm: u32,
        #[arg(long, allow_hyphen_values = true)]
        mcm: i32,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        m: i32,
        /// Vertical quanta of the CM and relative parts (3D only).
        #[arg(long)]
        nzcm: Option<u32>,
        #[arg(long)]
        nz: Option<u32>,
    },
    /// Simulated addition energy: wl_ratio,E_a,m,M_S.
    AdditionEnergy {
        #[arg(long, visible_alias = "wl", default_value = "0:3:0.01")]
        grid: String,
        #[arg(long = "m-max", default_value_t = 12)]
        m_max: i32,
    },
    /// Entanglement estimate from an addition-energy CSV:
    /// wl_ratio,F,b1_sq,b0,measure_0th,measure_1st.
    Estimate {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Run with process stdout/stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut warnings = vec![];
    let result = execute(&cli, &mut warnings).and_then(|(text, numerical_warning)| {
        emit(&cli.common.out, &text, stdout)?;
        Ok(numerical_warning)
    });
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match result {
        Ok(false) => 0,
        Ok(true) => 3,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_config(explicit: &Option<PathBuf>) -> Result<ConfigOverrides> {
    let path = explicit
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
        .or_else(|| Path::new(DEFAULT_CONFIG).exists().then(|| PathBuf::from(DEFAULT_CONFIG)));
    match path {
        Some(p) => parse_config(&std::fs::read_to_string(&p)?),
        None => Ok(ConfigOverrides::default()),
    }
}

fn resolve_params(c: &Common) -> Result<ModelParams> {
    let mut cfg = load_config(&c.config)?;
    cfg.merge(&ConfigOverrides {
        wz_ratio: c.wz_ratio,
        lambda: c.lambda,
        g_star: c.g_star,
        mass_ratio: c.mass_ratio,
        hbar_omega0_mev: None,
        dimension: c.dimension,
    });
    cfg.resolve()
}

fn channel_spec(c: &Common, params: &ModelParams) -> ChannelSpec {
    let mut spec = ChannelSpec::default_for(params.dimension, 0);
    if let Some(n) = c.nmax {
        spec.nmax = n;
    }
    if let (Some(nz), Dimension::ThreeD) = (c.nzmax, params.dimension) {
        spec.nzmax = nz;
    }
    spec
}

fn single_wl(text: &str) -> Result<FieldPoint> {
    match parse_grid(text)?.as_slice() {
        [wl] => FieldPoint::new(*wl),
        _ => Err(Error::InvalidParameter("--wl must be a single value here".into())),
    }
}

fn field_grid(text: &str) -> Result<Vec<f64>> {
    let grid = parse_grid(text)?;
    for &wl in &grid {
        FieldPoint::new(wl)?;
    }
    Ok(grid)
}

/// Round every float to 12 significant digits so JSON output is stable.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(|x| json!(round_sig(x))).unwrap_or(Value::Number(n)),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn to_json(v: Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&rounded(v)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Output text and whether a numerical diagnostic was raised without
/// aborting.
fn execute(cli: &Cli, warnings: &mut Vec<String>) -> Result<(String, bool)> {
    let c = &cli.common;
    match &cli.command {
        Command::Spectrum { wl, m, m_max } => {
            let params = resolve_params(c)?;
            let spec = channel_spec(c, &params);
            let ms: Vec<i32> = match m {
                Some(m) => vec![*m],
                None => (0..=*m_max).collect(),
            };
            let grid = field_grid(wl)?;
            let rows: Vec<Vec<Vec<String>>> = grid
                .par_iter()
                .map(|&w| {
                    let field = FieldPoint::new(w)?;
                    ms.iter()
                        .map(|&m| {
                            let e = lowest_total_energy(m, &params, field, &spec)?;
                            let (s, m_s, _) = lowest_state_spin(m);
                            Ok(vec![fmt_f64(w), m.to_string(), s.to_string(), m_s.to_string(), fmt_f64(e)])
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            Ok((csv_text(&["wl_ratio", "m", "S", "M_S", "E_total"], rows.into_iter().flatten()), false))
        }
        Command::GroundState { wl, m_max } => {
            let params = resolve_params(c)?;
            let spec = channel_spec(c, &params);
            let segs = ground_state_scan(&field_grid(wl)?, *m_max, &params, &spec)?;
            let rows = segs.iter().map(|s| vec![fmt_f64(s.wl_lo), fmt_f64(s.wl_hi), s.m.to_string(), s.s.to_string(), s.m_s.to_string()]);
            Ok((csv_text(&["wl_lo", "wl_hi", "m", "S", "M_S"], rows), false))
        }
        Command::Entangle { m, wl, method } => {
            let params = resolve_params(c)?;
            let spec = channel_spec(c, &params);
            let method: Method = method.parse()?;
            let field = single_wl(wl)?;
            let rep = lowest_state_report(&params, field, &spec, *m, method)?;
            let (s, m_s, _) = lowest_state_spin(*m);
            let nzmax = match params.dimension {
                Dimension::TwoD => Value::Null,
                Dimension::ThreeD => json!(spec.nzmax),
            };
            let v = json!({
                "m": m, "S": s, "M_S": m_s, "wl_ratio": field.wl_ratio,
                "trace_orb": rep.trace_orb, "trace_spin": rep.trace_spin, "measure": rep.measure,
                "method": method.to_string(), "nmax": spec.nmax, "nzmax": nzmax,
            });
            Ok((to_json(v)?, false))
        }
        Command::ScanEntangle { wl, m_max } => {
            let params = resolve_params(c)?;
            let spec = channel_spec(c, &params);
            let grid = field_grid(wl)?;
            let rows: Vec<Vec<String>> = grid
                .par_iter()
                .map(|&w| {
                    let field = FieldPoint::new(w)?;
                    let m = ground_state_m(&params, field, &spec, *m_max)?;
                    let rep = lowest_state_report(&params, field, &spec, m, Method::CmIJ)?;
                    let (s, m_s, _) = lowest_state_spin(m);
                    Ok(vec![fmt_f64(w), m.to_string(), s.to_string(), m_s.to_string(), fmt_f64(rep.measure)])
                })
                .collect::<Result<_>>()?;
            Ok((csv_text(&["wl_ratio", "m", "S", "M_S", "measure"], rows), false))
        }
        Command::PtLimit { big_m } => {
            let mut blocks = vec![];
            for sign in [Sign::Plus, Sign::Minus] {
                let pt = match solve_pt(*big_m, sign) {
                    Ok(pt) => pt,
                    Err(Error::EmptySubspace { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let n = pt.v.dim();
                let v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| pt.v[(i, j)]).collect()).collect();
                let basis: Vec<String> = pt.subspace.basis.iter().map(|p| format!("{}{}", p.mode1, p.mode2)).collect();
                blocks.push(json!({
                    "sign": sign, "basis": basis, "v": v, "delta_e": pt.delta_e, "vectors": pt.vectors,
                }));
            }
            let rows = serde_json::to_value(limit_state_table(*big_m)?).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok((to_json(json!({ "M": big_m, "blocks": blocks, "rows": rows }))?, false))
        }
        Command::Transform { ncm, mcm, n, m, nzcm, nz } => {
            let params = resolve_params(c)?;
            let state = match (params.dimension, nzcm, nz) {
                (Dimension::TwoD, None, None) => CmRelState::new(Mode::planar(*ncm, *mcm), Mode::planar(*n, *m)),
                (Dimension::TwoD, _, _) => return Err(Error::NoVerticalMotion),
                (Dimension::ThreeD, a, b) => {
                    CmRelState::new(Mode::spatial(*ncm, *mcm, a.unwrap_or(0)), Mode::spatial(*n, *m, b.unwrap_or(0)))
                }
            };
            let map = cm_to_ip(state).pruned(1e-14);
            let rows = map.iter().map(|(k, &a)| {
                vec![
                    k.mode1.planar.n.to_string(),
                    k.mode1.planar.m.to_string(),
                    k.mode1.nz().to_string(),
                    k.mode2.planar.n.to_string(),
                    k.mode2.planar.m.to_string(),
                    k.mode2.nz().to_string(),
                    fmt_f64(a),
                ]
            });
            Ok((csv_text(&["n1", "m1", "nz1", "n2", "m2", "nz2", "amplitude"], rows), false))
        }
        Command::AdditionEnergy { grid, m_max } => {
            let params = resolve_params(c)?;
            let spec = channel_spec(c, &params);
            let curve = simulate_curve(&params, &field_grid(grid)?, &spec, *m_max)?;
            let mut buf = vec![];
            write_curve_csv(&curve, &mut buf)?;
            Ok((String::from_utf8(buf).expect("ASCII CSV"), false))
        }
        Command::Estimate { input } => {
            let params = resolve_params(c)?;
            let curve = read_curve_csv(std::fs::File::open(input)?)?;
            let report = estimate_curve(&curve, &params);
            let mut numerical = false;
            for s in &report.skipped {
                numerical |= s.numerical;
                warnings.push(format!("skipped wl_ratio={}: {}", fmt_f64(s.wl_ratio), s.reason));
            }
            let rows = report.results.iter().map(|r| {
                vec![fmt_f64(r.wl_ratio), fmt_f64(r.f), fmt_f64(r.b1_sq), fmt_f64(r.b0), fmt_f64(r.measure_0th), fmt_f64(r.measure_1st)]
            });
            Ok((csv_text(&["wl_ratio", "F", "b1_sq", "b0", "measure_0th", "measure_1st"], rows), numerical))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (vec![], vec![]);
        let argv = std::iter::once("qdot").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&[]).0, 2);
        assert_eq!(run_capture(&["bogus"]).0, 2);
        assert_eq!(run_capture(&["entangle"]).0, 2);
        assert_eq!(run_capture(&["entangle", "--m", "0", "--method", "nope"]).0, 2);
        assert_eq!(run_capture(&["entangle", "--m", "0", "--wl", "0:1:0.5"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn transform_identity() {
        let (code, out, _) = run_capture(&["transform", "--ncm", "0", "--mcm", "0", "--n", "0", "--m", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n1,m1,nz1,n2,m2,nz2,amplitude\n0,0,0,0,0,0,1\n");
    }

    #[test]
    fn transform_rejects_nz_in_2d() {
        let (code, _, err) = run_capture(&["transform", "--ncm", "0", "--mcm", "0", "--n", "0", "--m", "0", "--nz", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("vertical"));
    }

    #[test]
    fn json_is_rounded() {
        assert_eq!(rounded(json!({"a": [0.1 + 0.2]})), json!({"a": [0.3]}));
    }
}
