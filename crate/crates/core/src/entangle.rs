//! Linear-entropy entanglement of two-electron states.
//!
//! The measure is 1 − 2 Tr[ρ_orb²] Tr[ρ_spin²]. The orbital purity of a
//! lowest state (CM at rest, relative part Σ b Φ^rel) is available by three
//! independent routes: the Schmidt spectrum of the IP coefficient matrix,
//! the trace of (CCᵀ)², and the CM expansion over I and J integrals.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::basis::Mode;
use crate::linalg::{eigh, Matrix};
use crate::model::{FieldPoint, ModelParams};
use crate::mosh::{cm_to_ip, CmRelState, CoeffMap, ProductState};
use crate::spectra::{solve_channel, ChannelSpec};
use crate::special::ln_factorial;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    IpDiagonal,
    CmIJ,
    MatrixTrace,
    ClosedForm,
    FirstOrder,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::IpDiagonal => "ip-diagonal",
            Method::CmIJ => "cm-ij",
            Method::MatrixTrace => "matrix-trace",
            Method::ClosedForm => "closed-form",
            Method::FirstOrder => "first-order",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ip-diagonal" => Ok(Method::IpDiagonal),
            "cm-ij" => Ok(Method::CmIJ),
            "matrix-trace" => Ok(Method::MatrixTrace),
            "closed-form" => Ok(Method::ClosedForm),
            "first-order" => Ok(Method::FirstOrder),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub trace_orb: f64,
    pub trace_spin: f64,
    pub measure: f64,
    pub method: Method,
}

impl EntanglementReport {
    pub fn new(trace_orb: f64, trace_spin: f64, method: Method) -> Self {
        Self { trace_orb, trace_spin, measure: measure(trace_orb, trace_spin), method }
    }
}

pub fn measure(trace_orb: f64, trace_spin: f64) -> f64 {
    1.0 - 2.0 * trace_orb * trace_spin
}

/// Tr[ρ_spin²] = (1 + |M_S|)/2.
pub fn spin_trace(m_s: i32) -> f64 {
    0.5 * (1.0 + f64::from(m_s.abs()))
}

/// (S, M_S, Tr[ρ_spin²]) of the lowest state with relative angular
/// momentum m: singlet for even m, M_S = 1 triplet for odd m.
pub fn lowest_state_spin(m: i32) -> (i32, i32, f64) {
    let s = m.rem_euclid(2);
    (s, s, spin_trace(s))
}

fn check_norm(norm_sq: f64) -> Result<()> {
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm_sq));
    }
    Ok(())
}

/// Σ a⁴ for a state whose reduced density matrix is diagonal with
/// entries a².
pub fn orbital_trace_ip(a: &[f64]) -> Result<f64> {
    check_norm(a.iter().map(|x| x * x).sum())?;
    Ok(a.iter().map(|x| x.powi(4)).sum())
}

/// Reduced density matrix of particle 1 over the modes it occupies.
fn reduced_density(c: &CoeffMap<ProductState>) -> (Vec<Mode>, Matrix) {
    let mut index: Vec<Mode> = c.keys().map(|k| k.mode1).collect();
    index.sort();
    index.dedup();
    let pos: HashMap<Mode, usize> = index.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut by_second: HashMap<Mode, Vec<(usize, f64)>> = HashMap::new();
    for (k, &v) in c.iter() {
        by_second.entry(k.mode2).or_default().push((pos[&k.mode1], v));
    }
    let mut rho = Matrix::zeros(index.len());
    for list in by_second.values() {
        for &(i, a) in list {
            for &(j, b) in list {
                rho[(i, j)] += a * b;
            }
        }
    }
    (index, rho)
}

/// Tr[(CCᵀ)²] for a two-particle amplitude table C.
pub fn orbital_trace_matrix(c: &CoeffMap<ProductState>) -> f64 {
    let (_, rho) = reduced_density(c);
    rho.frobenius_norm().powi(2)
}

/// Schmidt weights: eigenvalues of CCᵀ, descending.
pub fn schmidt_weights(c: &CoeffMap<ProductState>) -> Result<Vec<f64>> {
    let (_, rho) = reduced_density(c);
    let mut w = eigh(&rho)?.values;
    w.reverse();
    Ok(w)
}

/// Σ p² over the Schmidt weights; coincides with Σ a⁴ when C is already
/// diagonal on the shell.
pub fn orbital_trace_schmidt(c: &CoeffMap<ProductState>) -> Result<f64> {
    let w = schmidt_weights(c)?;
    check_norm(w.iter().sum())?;
    Ok(w.iter().map(|p| p * p).sum())
}

/// Tr[C₁ᵀ C₃ C₄ᵀ C₂].
fn contract4(c: [&CoeffMap<ProductState>; 4]) -> f64 {
    let product = |x: &CoeffMap<ProductState>, y: &CoeffMap<ProductState>| {
        let mut by_first: HashMap<Mode, Vec<(Mode, f64)>> = HashMap::new();
        for (k, &v) in y.iter() {
            by_first.entry(k.mode1).or_default().push((k.mode2, v));
        }
        let mut out: HashMap<(Mode, Mode), f64> = HashMap::new();
        for (k, &v) in x.iter() {
            if let Some(list) = by_first.get(&k.mode1) {
                for &(b2, w) in list {
                    *out.entry((k.mode2, b2)).or_insert(0.0) += v * w;
                }
            }
        }
        out
    };
    let a = product(c[0], c[2]);
    let b = product(c[1], c[3]);
    a.iter().map(|(k, v)| v * b.get(k).copied().unwrap_or(0.0)).sum()
}

type IntCache = Mutex<HashMap<(u32, u32, u32, u32, i32), f64>>;

fn memo(cache: &'static OnceLock<IntCache>, key: (u32, u32, u32, u32, i32), f: impl FnOnce() -> f64) -> f64 {
    let c = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = c.lock().expect("integral cache poisoned").get(&key) {
        return v;
    }
    let v = f();
    c.lock().expect("integral cache poisoned").insert(key, v);
    v
}

/// I(n₁,n₂,n₃,n₄; m), the in-plane overlap integral of four CM-ground ×
/// relative products.
pub fn integral_i(n1: u32, n2: u32, n3: u32, n4: u32, m: i32) -> f64 {
    static CACHE: OnceLock<IntCache> = OnceLock::new();
    if n1 + n4 != n2 + n3 {
        return 0.0;
    }
    memo(&CACHE, (n1, n2, n3, n4, m), || {
        let maps: Vec<_> =
            [n1, n2, n3, n4].iter().map(|&n| cm_to_ip(CmRelState::new(Mode::planar(0, 0), Mode::planar(n, m)))).collect();
        contract4([&maps[0], &maps[1], &maps[2], &maps[3]])
    })
}

/// J(n_z1,n_z2,n_z3,n_z4), the vertical analogue of I.
pub fn integral_j(nz1: u32, nz2: u32, nz3: u32, nz4: u32) -> f64 {
    static CACHE: OnceLock<IntCache> = OnceLock::new();
    if nz1 + nz4 != nz2 + nz3 {
        return 0.0;
    }
    memo(&CACHE, (nz1, nz2, nz3, nz4, 0), || {
        let maps: Vec<_> = [nz1, nz2, nz3, nz4]
            .iter()
            .map(|&nz| cm_to_ip(CmRelState::new(Mode::spatial(0, 0, 0), Mode::spatial(0, 0, nz))))
            .collect();
        contract4([&maps[0], &maps[1], &maps[2], &maps[3]])
    })
}

/// Φ^cm_{0,0} ⊗ Σ_i b_i Φ^rel_{basis[i]} over IP products.
pub fn assemble_ip(basis: &[Mode], b: &[f64]) -> CoeffMap<ProductState> {
    let mut out = CoeffMap::new();
    for (&rel, &bi) in basis.iter().zip(b) {
        if bi == 0.0 {
            continue;
        }
        let cm = Mode { planar: crate::basis::Mode2D::new(0, 0), z: rel.z.map(|_| crate::basis::ModeZ { nz: 0 }) };
        out.add_scaled(&cm_to_ip(CmRelState::new(cm, rel)), bi);
    }
    out
}

/// Orbital purity from the I/J expansion for a relative state on a
/// single-m channel basis.
pub fn orbital_trace_cm(basis: &[Mode], b: &[f64]) -> Result<f64> {
    check_norm(b.iter().map(|x| x * x).sum())?;
    let Some(first) = basis.first() else {
        return Err(Error::Truncation("empty relative basis".into()));
    };
    let m = first.planar.m;
    if basis.iter().any(|x| x.planar.m != m) {
        return Err(Error::InvalidParameter("relative basis mixes m values".into()));
    }
    let nmax = basis.iter().map(|x| x.planar.n).max().unwrap_or(0) as usize;
    let nzmax = basis.iter().map(|x| x.nz()).max().unwrap_or(0) as usize;
    let planar_only = first.z.is_none();

    let table = |size: usize, f: &dyn Fn(u32, u32, u32, u32) -> f64| -> Vec<f64> {
        let mut t = vec![0.0; size.pow(4)];
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    for l in 0..size {
                        t[((i * size + j) * size + k) * size + l] = f(i as u32, j as u32, k as u32, l as u32);
                    }
                }
            }
        }
        t
    };
    let sn = nmax + 1;
    let sz = nzmax + 1;
    let it = table(sn, &|a, b, c, d| integral_i(a, b, c, d, m));
    let jt = if planar_only { vec![1.0] } else { table(sz, &|a, b, c, d| integral_j(a, b, c, d)) };

    let idx: Vec<(usize, usize, f64)> = basis
        .iter()
        .zip(b)
        .filter(|(_, &v)| v != 0.0)
        .map(|(x, &v)| (x.planar.n as usize, x.nz() as usize, v))
        .collect();
    let mut total = 0.0;
    for &(n1, z1, b1) in &idx {
        for &(n2, z2, b2) in &idx {
            for &(n3, z3, b3) in &idx {
                for &(n4, z4, b4) in &idx {
                    if n1 + n4 != n2 + n3 || z1 + z4 != z2 + z3 {
                        continue;
                    }
                    let i = it[((n1 * sn + n2) * sn + n3) * sn + n4];
                    let j = if planar_only { 1.0 } else { jt[((z1 * sz + z2) * sz + z3) * sz + z4] };
                    total += b1 * b2 * b3 * b4 * i * j;
                }
            }
        }
    }
    Ok(total)
}

/// Orbital purity of a lowest-type state by the requested route.
pub fn orbital_trace(basis: &[Mode], b: &[f64], method: Method) -> Result<f64> {
    match method {
        Method::CmIJ => orbital_trace_cm(basis, b),
        Method::MatrixTrace => {
            check_norm(b.iter().map(|x| x * x).sum())?;
            Ok(orbital_trace_matrix(&assemble_ip(basis, b)))
        }
        Method::IpDiagonal => orbital_trace_schmidt(&assemble_ip(basis, b)),
        Method::ClosedForm => Ok(closed_form_trace(basis.first().map_or(0, |x| x.planar.m))),
        Method::FirstOrder => Err(Error::InvalidParameter("first-order traces come from the estimator".into())),
    }
}

/// (2|m|)! / (2^|m| |m|!)².
pub fn closed_form_trace(m: i32) -> f64 {
    let m = m.unsigned_abs();
    (ln_factorial(2 * m) - 2.0 * (f64::from(m) * std::f64::consts::LN_2 + ln_factorial(m))).exp()
}

/// Noninteracting measure of the lowest state with relative momentum m.
pub fn closed_form_lowest(m: i32) -> f64 {
    let (_, _, spin) = lowest_state_spin(m);
    measure(closed_form_trace(m), spin)
}

/// Entanglement of the lowest state in channel m at the given field.
pub fn lowest_state_report(
    params: &ModelParams,
    field: FieldPoint,
    spec: &ChannelSpec,
    m: i32,
    method: Method,
) -> Result<EntanglementReport> {
    let (_, _, spin) = lowest_state_spin(m);
    let trace_orb = if method == Method::ClosedForm {
        closed_form_trace(m)
    } else {
        let sol = solve_channel(&spec.with_m(m), params, field)?;
        orbital_trace(&sol.basis, sol.lowest(), method)?
    };
    Ok(EntanglementReport::new(trace_orb, spin, method))
}

pub fn lowest_state_measure(params: &ModelParams, field: FieldPoint, spec: &ChannelSpec, m: i32) -> Result<f64> {
    Ok(lowest_state_report(params, field, spec, m, Method::CmIJ)?.measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mosh::{symmetrize, Sign};

    fn p(n: u32, m: i32) -> Mode {
        Mode::planar(n, m)
    }

    #[test]
    fn spin_traces() {
        assert_eq!(spin_trace(0), 0.5);
        assert_eq!(spin_trace(1), 1.0);
        assert_eq!(spin_trace(-1), 1.0);
        assert_eq!(lowest_state_spin(0), (0, 0, 0.5));
        assert_eq!(lowest_state_spin(1), (1, 1, 1.0));
        assert_eq!(lowest_state_spin(4), (0, 0, 0.5));
    }

    #[test]
    fn ip_traces() {
        assert_eq!(orbital_trace_ip(&[1.0]).unwrap(), 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((orbital_trace_ip(&[0.5, -h, 0.5]).unwrap() - 0.375).abs() < 1e-15);
        let r3 = 3f64.sqrt();
        let a: Vec<f64> = [1.0, -r3, r3, -1.0].iter().map(|x| x / (2.0 * 2f64.sqrt())).collect();
        assert!((orbital_trace_ip(&a).unwrap() - 5.0 / 16.0).abs() < 1e-15);
        assert!(matches!(orbital_trace_ip(&[0.5, 0.5]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn matrix_traces() {
        assert_eq!(orbital_trace_matrix(&CoeffMap::single(ProductState::new(p(0, 1), p(0, 1)))), 1.0);
        let c = cm_to_ip(CmRelState::new(p(0, 0), p(0, 2)));
        assert!((orbital_trace_matrix(&c) - 0.375).abs() < 1e-12);
        let u = symmetrize(ProductState::new(p(0, 1), p(0, 0)), Sign::Minus);
        assert!((orbital_trace_matrix(&u) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn i_integrals() {
        for m in 0..=6 {
            let want = closed_form_trace(m);
            assert!((integral_i(0, 0, 0, 0, m) - want).abs() < 1e-12);
        }
        assert!((integral_i(0, 0, 0, 0, 2) - 0.375).abs() < 1e-15);
        for (m, want) in [(0, 0.25), (1, 3.0 / 16.0), (2, 5.0 / 32.0), (3, 35.0 / 256.0)] {
            assert!((integral_i(0, 0, 1, 1, m) - want).abs() < 1e-12, "m={m}");
        }
        assert_eq!(integral_i(0, 1, 0, 0, 1), 0.0);
    }

    #[test]
    fn i_integral_properties() {
        let tuples: Vec<[u32; 4]> = (0..81)
            .map(|k| [k / 27, (k / 9) % 3, (k / 3) % 3, k % 3])
            .collect();
        for m in 0..=3 {
            for t in &tuples {
                let v = integral_i(t[0], t[1], t[2], t[3], m);
                // full contraction without the selection-rule shortcut
                let maps: Vec<_> = t.iter().map(|&n| cm_to_ip(CmRelState::new(p(0, 0), p(n, m)))).collect();
                let raw = contract4([&maps[0], &maps[1], &maps[2], &maps[3]]);
                assert!((v - raw).abs() < 1e-12);
                if t[0] + t[3] != t[1] + t[2] {
                    assert!(raw.abs() < 1e-12);
                    continue;
                }
                for s in &tuples {
                    let same_multiset = {
                        let (mut a, mut b) = (*t, *s);
                        a.sort();
                        b.sort();
                        a == b
                    };
                    if same_multiset && s[0] + s[3] == s[1] + s[2] {
                        assert!((integral_i(s[0], s[1], s[2], s[3], m) - v).abs() < 1e-12);
                    }
                }
                if m == 0 {
                    let j = integral_j(t[0], t[1], t[2], t[3]);
                    assert!((v - j * j).abs() < 1e-12, "{t:?}");
                }
            }
        }
        assert_eq!(integral_j(0, 0, 0, 0), 1.0);
        assert_eq!(integral_j(0, 1, 0, 0), 0.0);
    }

    #[test]
    fn closed_forms() {
        let want = [0.0, 0.0, 0.625, 0.375];
        for (m, w) in want.iter().enumerate() {
            assert!((closed_form_lowest(m as i32) - w).abs() < 1e-12);
        }
        assert!(closed_form_lowest(20) > 0.87);
        for m in 0..18 {
            assert!(closed_form_lowest(m + 2) > closed_form_lowest(m));
        }
    }

    #[test]
    fn routes_agree_on_solved_states() {
        let params = ModelParams::gaas();
        let f = FieldPoint::new(0.0).unwrap();
        let spec = ChannelSpec::planar(0, 8);
        let sol = solve_channel(&spec, &params, f).unwrap();
        let a = orbital_trace(&sol.basis, sol.lowest(), Method::CmIJ).unwrap();
        let b = orbital_trace(&sol.basis, sol.lowest(), Method::MatrixTrace).unwrap();
        let c = orbital_trace(&sol.basis, sol.lowest(), Method::IpDiagonal).unwrap();
        assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);

        let basis = vec![Mode::spatial(0, 1, 0), Mode::spatial(0, 1, 2), Mode::spatial(1, 1, 0)];
        let b3 = [0.9, 0.3, (1.0f64 - 0.81 - 0.09).sqrt()];
        let a = orbital_trace(&basis, &b3, Method::CmIJ).unwrap();
        let b = orbital_trace(&basis, &b3, Method::MatrixTrace).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn slater_rank_one_states_are_unentangled() {
        let prod = CoeffMap::single(ProductState::new(p(0, 2), p(0, 2)));
        assert!(measure(orbital_trace_matrix(&prod), spin_trace(0)).abs() < 1e-12);
        let pair = symmetrize(ProductState::new(p(1, 0), p(0, 3)), Sign::Minus);
        assert!(measure(orbital_trace_matrix(&pair), spin_trace(1)).abs() < 1e-12);
    }

    #[test]
    fn noninteracting_report_is_closed_form() {
        let params = ModelParams::gaas().with_lambda(0.0);
        let f = FieldPoint::new(0.5).unwrap();
        for m in 0..4 {
            let r = lowest_state_report(&params, f, &ChannelSpec::planar(0, 4), m, Method::CmIJ).unwrap();
            assert!((r.measure - closed_form_lowest(m)).abs() < 1e-12);
        }
    }
}
