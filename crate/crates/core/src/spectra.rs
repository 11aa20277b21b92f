//! Relative-motion channels, symmetrized IP blocks, ground-state scans,
//! and addition energies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{fd_energy, mode_energy, z_energy, Mode, ModeZ};
use crate::coulomb::{cm_map_element, rel_element};
use crate::entangle::{self, lowest_state_spin};
use crate::linalg::{eigh, Matrix};
use crate::model::{effective_frequency, zeeman_shift, Dimension, FieldPoint, ModelParams};
use crate::mosh::{ip_map_to_cm, symmetrize, CmRelState, CoeffMap, ProductState, Sign};
use crate::{Error, Result};

/// Parity of the vertical relative quanta kept in a channel. Lowest
/// states live in the even sector; odd sectors appear in excited CM
/// partners of the IP blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZParity {
    #[default]
    Even,
    Odd,
}

impl ZParity {
    fn start(self) -> u32 {
        match self {
            ZParity::Even => 0,
            ZParity::Odd => 1,
        }
    }
}

/// Truncation of one relative channel: radial n ≤ nmax and, in 3D,
/// n_z ≤ nzmax with the parity given by `nz_parity`.
///
/// The in-plane basis is built at the effective frequency Ω unless
/// `basis_omega` pins it to a field-independent value, in which case the
/// Hellmann–Feynman relation holds exactly for the truncated problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub m: i32,
    pub nmax: u32,
    pub nzmax: u32,
    pub nz_parity: ZParity,
    pub dimension: Dimension,
    pub basis_omega: Option<f64>,
}

impl ChannelSpec {
    pub fn planar(m: i32, nmax: u32) -> Self {
        Self { m, nmax, nzmax: 0, nz_parity: ZParity::Even, dimension: Dimension::TwoD, basis_omega: None }
    }

    pub fn spatial(m: i32, nmax: u32, nzmax: u32) -> Self {
        Self { m, nmax, nzmax, nz_parity: ZParity::Even, dimension: Dimension::ThreeD, basis_omega: None }
    }

    pub fn with_basis_omega(mut self, omega: f64) -> Self {
        self.basis_omega = Some(omega);
        self
    }

    /// nmax = 8 in 2D; nmax = 6 with n_z ∈ {0, 2, 4, 6} in 3D.
    pub fn default_for(dimension: Dimension, m: i32) -> Self {
        match dimension {
            Dimension::TwoD => Self::planar(m, 8),
            Dimension::ThreeD => Self::spatial(m, 6, 6),
        }
    }

    pub fn with_m(mut self, m: i32) -> Self {
        self.m = m;
        self
    }

    /// Relative modes spanned by the channel, ordered by (n, n_z).
    pub fn basis(&self) -> Vec<Mode> {
        let mut out = vec![];
        for n in 0..=self.nmax {
            match self.dimension {
                Dimension::TwoD => out.push(Mode::planar(n, self.m)),
                Dimension::ThreeD => {
                    let mut nz = self.nz_parity.start();
                    while nz <= self.nzmax {
                        out.push(Mode::spatial(n, self.m, nz));
                        nz += 2;
                    }
                }
            }
        }
        out
    }
}

/// Eigenpairs of one relative channel. `vectors[k][i]` is b for state k
/// on `basis[i]`.
#[derive(Clone, Debug)]
pub struct RelSolution {
    pub m: i32,
    pub omega: f64,
    /// Frequency the in-plane basis functions are built at.
    pub basis_omega: f64,
    pub basis: Vec<Mode>,
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub matrix_norm: f64,
    pub max_residual: f64,
}

impl RelSolution {
    pub fn lowest(&self) -> &[f64] {
        &self.vectors[0]
    }

    pub fn state(&self, k: usize) -> Result<&[f64]> {
        self.vectors
            .get(k)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Truncation(format!("state {k} requested from a basis of {}", self.basis.len())))
    }

    /// b_{n,n_z} of state k; zero outside the truncation.
    pub fn b(&self, k: usize, n: u32, nz: u32) -> f64 {
        self.basis
            .iter()
            .position(|mode| mode.planar.n == n && mode.nz() == nz)
            .map_or(0.0, |i| self.vectors[k][i])
    }
}

fn check_dimension(params: &ModelParams, dimension: Dimension) -> Result<()> {
    if params.dimension != dimension {
        return Err(Error::InvalidParameter(format!(
            "channel is {dimension} but the model is {}",
            params.dimension
        )));
    }
    Ok(())
}

/// Dense relative Hamiltonian of a channel.
pub fn channel_matrix(spec: &ChannelSpec, params: &ModelParams, field: FieldPoint) -> Result<(Vec<Mode>, Matrix)> {
    check_dimension(params, spec.dimension)?;
    let basis = spec.basis();
    if basis.is_empty() {
        return Err(Error::Truncation(format!("channel m={} holds no states", spec.m)));
    }
    let omega = effective_frequency(field);
    let wb = spec.basis_omega.unwrap_or(omega);
    if !(wb > 0.0 && wb.is_finite()) {
        return Err(Error::InvalidParameter(format!("basis frequency must be > 0, got {wb}")));
    }
    let wz = params.omega_z();
    let mut h = Matrix::zeros(basis.len());
    // μ(Ω² − ω_b²)ρ²/2 with ρ² = (2/ω_b) t for μ = 1/2
    let shift = (omega * omega - wb * wb) / (2.0 * wb);
    let am = f64::from(spec.m.unsigned_abs());
    for (i, &a) in basis.iter().enumerate() {
        h[(i, i)] = fd_energy(a.planar, wb, field.wl_ratio);
        if let (Some(z), Some(w)) = (a.z, wz) {
            h[(i, i)] += z_energy(z, w)?;
        }
        for (j, &b) in basis.iter().enumerate().take(i + 1) {
            let mut v = shift * t_element(a, b, am);
            if params.lambda != 0.0 {
                v += params.lambda * rel_element(a, b, wb, wz);
            }
            if v == 0.0 {
                continue;
            }
            h[(i, j)] += v;
            if i != j {
                h[(j, i)] += v;
            }
        }
    }
    Ok((basis, h))
}

/// ⟨a|t|b⟩ with t = sρ² in the normalized Laguerre basis of order |m|;
/// tridiagonal in n and diagonal in n_z.
fn t_element(a: Mode, b: Mode, am: f64) -> f64 {
    if a.nz() != b.nz() {
        return 0.0;
    }
    let (n, n2) = (a.planar.n.min(b.planar.n), a.planar.n.max(b.planar.n));
    if n == n2 {
        2.0 * f64::from(n) + am + 1.0
    } else if n2 == n + 1 {
        -(f64::from(n2) * (f64::from(n2) + am)).sqrt()
    } else {
        0.0
    }
}

/// ⟨ρ₁₂²⟩ of state k from the tridiagonal ρ² matrix.
pub fn mean_rho_sq(sol: &RelSolution, k: usize) -> Result<f64> {
    let b = sol.state(k)?;
    let am = f64::from(sol.m.unsigned_abs());
    let mut t = 0.0;
    for (i, &a) in sol.basis.iter().enumerate() {
        for (j, &c) in sol.basis.iter().enumerate() {
            t += b[i] * b[j] * t_element(a, c, am);
        }
    }
    Ok(2.0 / sol.basis_omega * t)
}

pub fn solve_channel(spec: &ChannelSpec, params: &ModelParams, field: FieldPoint) -> Result<RelSolution> {
    let (basis, h) = channel_matrix(spec, params, field)?;
    let eig = eigh(&h)?;
    let max_residual = eig.max_residual(&h);
    let omega = effective_frequency(field);
    Ok(RelSolution {
        m: spec.m,
        omega,
        basis_omega: spec.basis_omega.unwrap_or(omega),
        basis,
        energies: eig.values,
        vectors: eig.vectors,
        matrix_norm: h.frobenius_norm(),
        max_residual,
    })
}

/// Energy of the CM ground state (0,0; n_z = 0).
pub fn cm_ground_energy(params: &ModelParams, field: FieldPoint) -> f64 {
    let omega = effective_frequency(field);
    omega + params.omega_z().map_or(0.0, |w| 0.5 * w)
}

/// Lowest two-electron energy with relative angular momentum m, CM at
/// rest, and the spin state fixed by exchange parity.
pub fn lowest_total_energy(m: i32, params: &ModelParams, field: FieldPoint, spec: &ChannelSpec) -> Result<f64> {
    let sol = solve_channel(&spec.with_m(m), params, field)?;
    let (_, m_s, _) = lowest_state_spin(m);
    Ok(cm_ground_energy(params, field) + sol.energies[0] + zeeman_shift(params, field, m_s))
}

/// Index m ∈ [0, m_max] of the lowest state.
pub fn ground_state_m(params: &ModelParams, field: FieldPoint, spec: &ChannelSpec, m_max: i32) -> Result<i32> {
    let mut best = (0, f64::INFINITY);
    for m in 0..=m_max {
        let e = lowest_total_energy(m, params, field, spec)?;
        if e < best.1 {
            best = (m, e);
        }
    }
    if best.0 == m_max {
        return Err(Error::MMaxReached(m_max));
    }
    Ok(best.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSegment {
    pub wl_lo: f64,
    pub wl_hi: f64,
    pub m: i32,
    pub s: i32,
    pub m_s: i32,
    pub measure_lo: f64,
    pub measure_hi: f64,
}

pub const BOUNDARY_TOL: f64 = 1e-6;

/// Piecewise-constant ground-state labels over a sorted field grid, with
/// boundaries refined by bisection to `BOUNDARY_TOL`.
pub fn ground_state_scan(
    wl_grid: &[f64],
    m_max: i32,
    params: &ModelParams,
    spec: &ChannelSpec,
) -> Result<Vec<GroundStateSegment>> {
    if wl_grid.is_empty() {
        return Ok(vec![]);
    }
    if wl_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("field grid must be strictly increasing".into()));
    }
    let label = |wl: f64| -> Result<i32> { ground_state_m(params, FieldPoint::new(wl)?, spec, m_max) };
    let labels: Vec<i32> = wl_grid.par_iter().map(|&wl| label(wl)).collect::<Result<_>>()?;

    // (start of piece, label)
    let mut pieces = vec![(wl_grid[0], labels[0])];
    for i in 1..wl_grid.len() {
        if labels[i] != labels[i - 1] {
            refine(wl_grid[i - 1], labels[i - 1], wl_grid[i], labels[i], &label, &mut pieces)?;
        }
    }
    let last = *wl_grid.last().expect("non-empty grid");
    let mut segments = Vec::with_capacity(pieces.len());
    for (i, &(lo, m)) in pieces.iter().enumerate() {
        let hi = pieces.get(i + 1).map_or(last, |p| p.0);
        let (s, m_s, _) = lowest_state_spin(m);
        segments.push(GroundStateSegment { wl_lo: lo, wl_hi: hi, m, s, m_s, measure_lo: 0.0, measure_hi: 0.0 });
    }
    segments.par_iter_mut().try_for_each(|seg| -> Result<()> {
        seg.measure_lo = entangle::lowest_state_measure(params, FieldPoint::new(seg.wl_lo)?, spec, seg.m)?;
        seg.measure_hi = entangle::lowest_state_measure(params, FieldPoint::new(seg.wl_hi)?, spec, seg.m)?;
        Ok(())
    })?;
    Ok(segments)
}

fn refine(
    mut lo: f64,
    l_lo: i32,
    mut hi: f64,
    l_hi: i32,
    label: &dyn Fn(f64) -> Result<i32>,
    pieces: &mut Vec<(f64, i32)>,
) -> Result<()> {
    while hi - lo > BOUNDARY_TOL {
        let mid = 0.5 * (lo + hi);
        let l = label(mid)?;
        if l == l_lo {
            lo = mid;
        } else if l == l_hi {
            hi = mid;
        } else {
            refine(lo, l_lo, mid, l, label, pieces)?;
            return refine(mid, l, hi, l_hi, label, pieces);
        }
    }
    pieces.push((0.5 * (lo + hi), l_hi));
    Ok(())
}

/// Truncation of a symmetrized IP block by total oscillator quanta, which
/// keeps the block closed under the CM transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpTruncation {
    pub planar: u32,
    pub z: u32,
    pub dimension: Dimension,
}

impl IpTruncation {
    pub fn planar(quanta: u32) -> Self {
        Self { planar: quanta, z: 0, dimension: Dimension::TwoD }
    }

    pub fn spatial(quanta: u32, z: u32) -> Self {
        Self { planar: quanta, z, dimension: Dimension::ThreeD }
    }
}

#[derive(Clone, Debug)]
pub struct IpBlock {
    pub big_m: i32,
    pub sign: Sign,
    /// Unordered pairs with mode1 ≤ mode2.
    pub basis: Vec<ProductState>,
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub max_residual: f64,
}

fn single_modes(trunc: &IpTruncation) -> Vec<Mode> {
    let mut out = vec![];
    for q in 0..=trunc.planar {
        for planar in crate::basis::planar_shell(q) {
            match trunc.dimension {
                Dimension::TwoD => out.push(Mode { planar, z: None }),
                Dimension::ThreeD => {
                    for nz in 0..=trunc.z {
                        out.push(Mode { planar, z: Some(ModeZ { nz }) });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Unordered IP pairs with m₁ + m₂ = M inside the truncation.
pub fn ip_block_basis(big_m: i32, sign: Sign, trunc: &IpTruncation) -> Vec<ProductState> {
    let modes = single_modes(trunc);
    let mut out = vec![];
    for (i, &a) in modes.iter().enumerate() {
        for &b in &modes[i..] {
            let st = ProductState::new(a, b);
            if st.total_m() == big_m
                && st.planar_quanta() <= trunc.planar
                && st.z_quanta() <= trunc.z
                && !(sign == Sign::Minus && a == b)
            {
                out.push(st);
            }
        }
    }
    out
}

pub fn ip_block_solve(
    big_m: i32,
    sign: Sign,
    trunc: &IpTruncation,
    params: &ModelParams,
    field: FieldPoint,
) -> Result<IpBlock> {
    check_dimension(params, trunc.dimension)?;
    let basis = ip_block_basis(big_m, sign, trunc);
    let omega = effective_frequency(field);
    let wz = params.omega_z();
    let cm_maps: Vec<CoeffMap<CmRelState>> =
        basis.iter().map(|&st| ip_map_to_cm(&symmetrize(st, sign)).pruned(1e-15)).collect();
    let n = basis.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..=i)
                .map(|j| if params.lambda == 0.0 { 0.0 } else { params.lambda * cm_map_element(&cm_maps[i], &cm_maps[j], omega, wz) })
                .collect()
        })
        .collect();
    let mut h = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            h[(i, j)] = rows[i][j];
            h[(j, i)] = rows[i][j];
        }
        let st = basis[i];
        h[(i, i)] += mode_energy(st.mode1, omega, field.wl_ratio, wz)? + mode_energy(st.mode2, omega, field.wl_ratio, wz)?;
    }
    let eig = eigh(&h)?;
    let max_residual = eig.max_residual(&h);
    Ok(IpBlock { big_m, sign, basis, energies: eig.values, vectors: eig.vectors, max_residual })
}

/// The spectrum an IP block must reproduce by CM/relative separability:
/// E_cm + E_rel over every CM label in the truncation, with each relative
/// channel truncated to the remaining quanta and restricted to the
/// exchange parity of the block. Sorted ascending.
pub fn kohn_levels(
    big_m: i32,
    sign: Sign,
    trunc: &IpTruncation,
    params: &ModelParams,
    field: FieldPoint,
) -> Result<Vec<f64>> {
    check_dimension(params, trunc.dimension)?;
    let omega = effective_frequency(field);
    let wz = params.omega_z();
    let mut out = vec![];
    for qc in 0..=trunc.planar {
        for cm in crate::basis::planar_shell(qc) {
            let m_rel = big_m - cm.m;
            let room = trunc.planar - qc;
            if m_rel.unsigned_abs() > room {
                continue;
            }
            let nmax = (room - m_rel.unsigned_abs()) / 2;
            let nz_cms: Vec<u32> = match trunc.dimension {
                Dimension::TwoD => vec![0],
                Dimension::ThreeD => (0..=trunc.z).collect(),
            };
            for nz_cm in nz_cms {
                let spec = match trunc.dimension {
                    Dimension::TwoD => {
                        if Sign::from_parity(i64::from(m_rel)) != sign {
                            continue;
                        }
                        ChannelSpec::planar(m_rel, nmax)
                    }
                    Dimension::ThreeD => {
                        let nz_parity = if Sign::from_parity(i64::from(m_rel)) == sign { ZParity::Even } else { ZParity::Odd };
                        let nzmax = trunc.z - nz_cm;
                        if nz_parity.start() > nzmax {
                            continue;
                        }
                        ChannelSpec { m: m_rel, nmax, nzmax, nz_parity, dimension: Dimension::ThreeD, basis_omega: None }
                    }
                };
                let e_cm = fd_energy(cm, omega, field.wl_ratio) + wz.map_or(0.0, |w| w * (f64::from(nz_cm) + 0.5));
                let sol = solve_channel(&spec, params, field)?;
                out.extend(sol.energies.iter().map(|e| e + e_cm));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Two-electron ground state at one field value and its addition energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditionPoint {
    pub wl_ratio: f64,
    pub e_a: f64,
    pub m: i32,
    pub m_s: i32,
}

/// E_a = E_tot(2) − 2 E_tot(1) with the one-electron ground state
/// (0,0; n_z = 0) at spin projection −1/2.
pub fn addition_energy(params: &ModelParams, field: FieldPoint, spec: &ChannelSpec, m_max: i32) -> Result<AdditionPoint> {
    let m = ground_state_m(params, field, spec, m_max)?;
    let e2 = lowest_total_energy(m, params, field, spec)?;
    let e1 = cm_ground_energy(params, field) + params.g_star * params.mass_ratio * field.wl_ratio * (-0.5);
    let (_, m_s, _) = lowest_state_spin(m);
    Ok(AdditionPoint { wl_ratio: field.wl_ratio, e_a: e2 - 2.0 * e1, m, m_s })
}

/// Lowest total energy for each relative m in `ms`, in order.
pub fn level_table(params: &ModelParams, field: FieldPoint, spec: &ChannelSpec, ms: &[i32]) -> Result<Vec<(i32, f64)>> {
    ms.iter().map(|&m| Ok((m, lowest_total_energy(m, params, field, spec)?))).collect()
}
