//! Matrix elements of 1/r₁₂ in the relative basis and, through the CM
//! transform, between IP products.
//!
//! Planar elements are a single Gauss–Laguerre sum. In 3D the identity
//! 1/r = (2/√π)∫₀^∞ e^{−u²r²} du turns the element into a one-dimensional
//! integral whose integrand is a product of closed-form Gaussian moment
//! sums for ρ and z. The outer integral is split at the two natural
//! scales u ~ √(Ω/2) and u ~ √(ω_z/2): Gauss–Legendre below the first,
//! Gauss–Legendre in ln u between them, and u = b/t above the second.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::basis::Mode;
use crate::mosh::{ip_to_cm, CmRelState, CoeffMap, ProductState};
use crate::quad::{gauss_hermite, gauss_laguerre, legendre_on};
use crate::special::{hermite_normalized_all, laguerre_normalized_all};
use crate::{Error, Result};

/// Outer-integral nodes per panel in 3D.
pub const U_NODES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelElementKey {
    pub n: u32,
    pub n2: u32,
    pub m: i32,
    pub nz: u32,
    pub nz2: u32,
}

impl RelElementKey {
    /// Same element with bra and ket in canonical order.
    fn canonical(self) -> Self {
        if (self.n, self.nz) <= (self.n2, self.nz2) {
            self
        } else {
            Self { n: self.n2, n2: self.n, nz: self.nz2, nz2: self.nz, m: self.m }
        }
    }
}

/// ⟨n,m|1/ρ|n',m⟩ for relative Fock–Darwin states at frequency Ω.
pub fn rel_element_2d(n: u32, n2: u32, m: i32, omega: f64) -> f64 {
    let (n, n2) = (n.min(n2), n.max(n2));
    let alpha = f64::from(m.unsigned_abs()) - 0.5;
    let rule = gauss_laguerre(n2 as usize + 2, alpha);
    let sum: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let l = laguerre_normalized_all(n2, alpha + 0.5, t);
            w * l[n as usize] * l[n2 as usize]
        })
        .sum();
    (0.5 * omega).sqrt() * sum
}

type Cache = Mutex<HashMap<(RelElementKey, u64, u64, usize), f64>>;

fn cache_3d() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// ⟨n,m;n_z|1/r|n',m;n_z'⟩ for relative states of the 3D model.
pub fn rel_element_3d(n: u32, nz: u32, n2: u32, nz2: u32, m: i32, omega: f64, wz: f64) -> Result<f64> {
    rel_element_3d_with(RelElementKey { n, n2, m, nz, nz2 }, omega, wz, U_NODES)
}

/// As [`rel_element_3d`] with an explicit outer node count per panel.
pub fn rel_element_3d_with(key: RelElementKey, omega: f64, wz: f64, nodes: usize) -> Result<f64> {
    if (key.nz + key.nz2) % 2 == 1 {
        return Err(Error::OddParity(key.nz + key.nz2));
    }
    if !wz.is_finite() || wz <= 0.0 {
        return Err(Error::NoVerticalMotion);
    }
    let key = key.canonical();
    let ck = (key, omega.to_bits(), wz.to_bits(), nodes);
    if let Some(&v) = cache_3d().lock().expect("element cache poisoned").get(&ck) {
        return Ok(v);
    }
    let v = integrate_u(key, omega, wz, nodes);
    cache_3d().lock().expect("element cache poisoned").insert(ck, v);
    Ok(v)
}

fn integrate_u(key: RelElementKey, omega: f64, wz: f64, nodes: usize) -> f64 {
    let sp = 0.5 * omega;
    let sz = 0.5 * wz;
    let am = f64::from(key.m.unsigned_abs());
    let lag = gauss_laguerre(key.n.max(key.n2) as usize + 2, am);
    let her = gauss_hermite(key.nz.max(key.nz2) as usize + 2);
    let nmax = key.n.max(key.n2);
    let nzmax = key.nz.max(key.nz2);

    let integrand = |u: f64| -> f64 {
        let c = 1.0 + u * u / sp;
        let planar: f64 = lag
            .nodes
            .iter()
            .zip(&lag.weights)
            .map(|(&x, &w)| {
                let l = laguerre_normalized_all(nmax, am, x / c);
                w * l[key.n as usize] * l[key.n2 as usize]
            })
            .sum::<f64>()
            * c.powf(-(am + 1.0));
        let cz = 1.0 + u * u / sz;
        let sc = cz.sqrt();
        let vertical: f64 = her
            .nodes
            .iter()
            .zip(&her.weights)
            .map(|(&x, &w)| {
                let h = hermite_normalized_all(nzmax, x / sc);
                w * h[key.nz as usize] * h[key.nz2 as usize]
            })
            .sum::<f64>()
            / (std::f64::consts::PI.sqrt() * sc);
        planar * vertical
    };

    let (a, b) = {
        let (x, y) = (sp.sqrt(), sz.sqrt());
        (x.min(y), x.max(y))
    };
    let mut total = legendre_on(nodes, 0.0, a).integrate(integrand);
    if b > a * (1.0 + 1e-12) {
        total += legendre_on(nodes, a.ln(), b.ln()).integrate(|v| {
            let u = v.exp();
            u * integrand(u)
        });
    }
    total += legendre_on(nodes, 0.0, 1.0).integrate(|t| {
        let u = b / t;
        b / (t * t) * integrand(u)
    });
    2.0 / std::f64::consts::PI.sqrt() * total
}

/// Element between two relative modes; zero unless m matches and, in 3D,
/// n_z + n_z' is even.
pub fn rel_element(a: Mode, b: Mode, omega: f64, wz: Option<f64>) -> f64 {
    if a.planar.m != b.planar.m {
        return 0.0;
    }
    match (a.z, b.z, wz) {
        (None, None, _) => rel_element_2d(a.planar.n, b.planar.n, a.planar.m, omega),
        (Some(za), Some(zb), Some(w)) => {
            if (za.nz + zb.nz) % 2 == 1 {
                0.0
            } else {
                rel_element_3d(a.planar.n, za.nz, b.planar.n, zb.nz, a.planar.m, omega, w)
                    .expect("even parity and finite ω_z checked")
            }
        }
        _ => panic!("relative modes and ω_z disagree on dimensionality"),
    }
}

/// ⟨a|1/r₁₂|b⟩ for states given in the CM×rel basis. The operator is the
/// identity on the CM factor.
pub fn cm_map_element(a: &CoeffMap<CmRelState>, b: &CoeffMap<CmRelState>, omega: f64, wz: Option<f64>) -> f64 {
    let mut by_cm: BTreeMap<Mode, Vec<(Mode, f64)>> = BTreeMap::new();
    for (k, &v) in b.iter() {
        by_cm.entry(k.cm).or_default().push((k.rel, v));
    }
    let mut total = 0.0;
    for (k, &va) in a.iter() {
        if let Some(list) = by_cm.get(&k.cm) {
            for &(rel, vb) in list {
                if rel.planar.m == k.rel.planar.m {
                    total += va * vb * rel_element(k.rel, rel, omega, wz);
                }
            }
        }
    }
    total
}

/// ⟨bra|1/r₁₂|ket⟩ between IP products, via the CM transform.
pub fn ip_element(bra: ProductState, ket: ProductState, omega: f64, wz: Option<f64>) -> f64 {
    if bra.total_m() != ket.total_m() {
        return 0.0;
    }
    let (x, y) = if bra <= ket { (bra, ket) } else { (ket, bra) };
    cm_map_element(&ip_to_cm(x), &ip_to_cm(y), omega, wz)
}

/// Element between arbitrary IP superpositions.
pub fn ip_map_element(bra: &CoeffMap<ProductState>, ket: &CoeffMap<ProductState>, omega: f64, wz: Option<f64>) -> f64 {
    let mut total = 0.0;
    for (a, va) in bra.iter() {
        for (b, vb) in ket.iter() {
            total += va * vb * ip_element(*a, *b, omega, wz);
        }
    }
    total
}
