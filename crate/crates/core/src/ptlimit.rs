//! First-order degenerate perturbation theory on the radial ground shell
//! n₁ = n₂ = 0 of total angular momentum M.

use serde::{Deserialize, Serialize};

use crate::basis::Mode;
use crate::coulomb::ip_map_element;
use crate::entangle::{measure, orbital_trace_matrix, spin_trace};
use crate::linalg::{eigh, Matrix};
use crate::mosh::{cm_to_ip, symmetrize, CmRelState, CoeffMap, ProductState, Sign};
use crate::{Error, Result};

/// Span of u_k = {Φ_{0,M−m₂} Φ_{0,m₂}}± for m₂ = 0..=[M/2], k = m₂ + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerateSubspace {
    pub big_m: u32,
    pub sign: Sign,
    pub basis: Vec<ProductState>,
}

impl DegenerateSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// u_k as an IP amplitude table.
    pub fn state(&self, k: usize) -> CoeffMap<ProductState> {
        symmetrize(self.basis[k], self.sign)
    }
}

/// d± = [M/2] + 1/2 + (±1)^{M+1}/2.
pub fn degeneracy(big_m: u32, sign: Sign) -> usize {
    let half = (big_m / 2) as usize;
    match sign {
        Sign::Plus => half + 1,
        Sign::Minus if big_m.is_multiple_of(2) => half,
        Sign::Minus => half + 1,
    }
}

pub fn subspace(big_m: u32, sign: Sign) -> DegenerateSubspace {
    let basis = (0..=big_m / 2)
        .map(|m2| ProductState::new(Mode::planar(0, (big_m - m2) as i32), Mode::planar(0, m2 as i32)))
        .filter(|st| !(sign == Sign::Minus && st.mode1 == st.mode2))
        .collect();
    DegenerateSubspace { big_m, sign, basis }
}

#[derive(Clone, Debug)]
pub struct PtResult {
    pub subspace: DegenerateSubspace,
    /// ⟨u_k|1/r₁₂|u_l⟩ at Ω = ω₀.
    pub v: Matrix,
    /// First-order shifts per unit λ, ascending.
    pub delta_e: Vec<f64>,
    /// Coefficients on u_k, first nonzero component positive.
    pub vectors: Vec<Vec<f64>>,
}

impl PtResult {
    /// Eigenvector `idx` expanded over IP products.
    pub fn ip_state(&self, idx: usize) -> CoeffMap<ProductState> {
        let mut out = CoeffMap::new();
        for (k, &c) in self.vectors[idx].iter().enumerate() {
            out.add_scaled(&self.subspace.state(k), c);
        }
        out.pruned(1e-15)
    }
}

pub fn solve_pt(big_m: u32, sign: Sign) -> Result<PtResult> {
    let sub = subspace(big_m, sign);
    if sub.dim() == 0 {
        return Err(Error::EmptySubspace { m: big_m as i32, sign: sign.symbol() });
    }
    let states: Vec<_> = (0..sub.dim()).map(|k| sub.state(k)).collect();
    let v = Matrix::from_fn(sub.dim(), |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        ip_map_element(&states[a], &states[b], 1.0, None)
    });
    let eig = eigh(&v)?;
    Ok(PtResult { subspace: sub, v, delta_e: eig.values, vectors: eig.vectors })
}

/// A spin state compatible with the orbital exchange symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinOption {
    pub m_s: Vec<i32>,
    pub trace_spin: f64,
    pub measure: f64,
}

/// Amplitude on Φ_{0,m1}(r₁) Φ_{0,m2}(r₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellAmplitude {
    pub m1: i32,
    pub m2: i32,
    pub amplitude: f64,
}

/// One orbital state of the noninteracting limit in both representations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub big_m: u32,
    pub label: String,
    pub sign: Sign,
    pub delta_e: f64,
    /// Coefficients on u_k of the sign block.
    pub u_coefficients: Vec<f64>,
    pub ip_amplitudes: Vec<ShellAmplitude>,
    /// (m_cm, m) of the matching Φ^cm_{0,m_cm} Φ^rel_{0,m}, if one matches.
    pub cm_label: Option<(i32, i32)>,
    pub trace_orb: f64,
    pub s: i32,
    pub spin: Vec<SpinOption>,
}

fn row_label(big_m: u32, sign: Sign, idx: usize, dim: usize) -> String {
    let sub = match dim {
        1 => String::new(),
        2 => if idx == 0 { "_<" } else { "_>" }.to_string(),
        _ => format!("_{}", idx + 1),
    };
    format!("psi{sub}^({big_m},{})", sign.symbol())
}

/// CM×rel state on the shell that the vector coincides with up to sign.
pub fn match_cm_state(state: &CoeffMap<ProductState>, big_m: u32) -> Option<CmRelState> {
    (0..=big_m as i32)
        .map(|m_cm| CmRelState::new(Mode::planar(0, m_cm), Mode::planar(0, big_m as i32 - m_cm)))
        .find(|&cand| (cm_to_ip(cand).dot(state).abs() - 1.0).abs() < 1e-8)
}

fn spin_options(sign: Sign, trace_orb: f64) -> (i32, Vec<SpinOption>) {
    let opt = |m_s: Vec<i32>, t: f64| SpinOption { m_s, trace_spin: t, measure: measure(trace_orb, t) };
    match sign {
        Sign::Plus => (0, vec![opt(vec![0], spin_trace(0))]),
        Sign::Minus => (1, vec![opt(vec![0], spin_trace(0)), opt(vec![-1, 1], spin_trace(1))]),
    }
}

/// Rows for both sign blocks of shell M, ordered by m_cm of the matching
/// CM state (ties and unmatched rows fall back to ΔE).
pub fn limit_state_table(big_m: u32) -> Result<Vec<TableRow>> {
    let mut rows = vec![];
    for sign in [Sign::Plus, Sign::Minus] {
        let pt = match solve_pt(big_m, sign) {
            Ok(pt) => pt,
            Err(Error::EmptySubspace { .. }) => continue,
            Err(e) => return Err(e),
        };
        let dim = pt.subspace.dim();
        for idx in 0..dim {
            let ip = pt.ip_state(idx);
            let trace_orb = orbital_trace_matrix(&ip);
            let (s, spin) = spin_options(sign, trace_orb);
            let ip_amplitudes = ip
                .iter()
                .map(|(k, &a)| ShellAmplitude { m1: k.mode1.planar.m, m2: k.mode2.planar.m, amplitude: a })
                .collect();
            rows.push(TableRow {
                big_m,
                label: row_label(big_m, sign, idx, dim),
                sign,
                delta_e: pt.delta_e[idx],
                u_coefficients: pt.vectors[idx].clone(),
                ip_amplitudes,
                cm_label: match_cm_state(&ip, big_m).map(|c| (c.cm.planar.m, c.rel.planar.m)),
                trace_orb,
                s,
                spin,
            });
        }
    }
    rows.sort_by(|a, b| {
        let key = |r: &TableRow| r.cm_label.map_or(i32::MAX, |c| c.0);
        key(a).cmp(&key(b)).then(a.delta_e.total_cmp(&b.delta_e))
    });
    Ok(rows)
}
