//! Finite transformations between individual-particle products and
//! center-of-mass × relative states.
//!
//! Each Fock–Darwin state is written with two circular oscillator quanta
//! (d, g): for m ≥ 0, (d, g) = (n + m, n); for m < 0, (d, g) = (n, n + |m|).
//! A normalized ladder state (d†)^d (g†)^g |0⟩ differs from the Laguerre
//! form by (−1)^n. The CM and relative ladder operators are (a₁ ± a₂)/√2
//! for every mode family, so a CM×rel monomial expands binomially into
//! product monomials, independently for d, g, and z quanta. The same
//! expansion maps products back to CM×rel.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::basis::{Mode, Mode2D, ModeZ};
use crate::special::{binomial, ln_factorial};
use crate::{Error, Result};

/// Ordered product Φ_{mode1}(r₁) Φ_{mode2}(r₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProductState {
    pub mode1: Mode,
    pub mode2: Mode,
}

impl ProductState {
    pub const fn new(mode1: Mode, mode2: Mode) -> Self {
        Self { mode1, mode2 }
    }

    pub fn swapped(self) -> Self {
        Self { mode1: self.mode2, mode2: self.mode1 }
    }

    pub fn total_m(self) -> i32 {
        self.mode1.planar.m + self.mode2.planar.m
    }

    pub fn planar_quanta(self) -> u32 {
        self.mode1.planar.quanta() + self.mode2.planar.quanta()
    }

    pub fn z_quanta(self) -> u32 {
        self.mode1.nz() + self.mode2.nz()
    }
}

/// Φ^cm_{cm}(R) Φ^rel_{rel}(r₁₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CmRelState {
    pub cm: Mode,
    pub rel: Mode,
}

impl CmRelState {
    pub const fn new(cm: Mode, rel: Mode) -> Self {
        Self { cm, rel }
    }

    pub fn total_m(self) -> i32 {
        self.cm.planar.m + self.rel.planar.m
    }

    pub fn planar_quanta(self) -> u32 {
        self.cm.planar.quanta() + self.rel.planar.quanta()
    }

    pub fn z_quanta(self) -> u32 {
        self.cm.nz() + self.rel.nz()
    }
}

/// Symmetric (+) or antisymmetric (−) under particle exchange.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// Exchange sign of a relative state with parity (−1)^k.
    pub fn from_parity(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Sparse real amplitudes over an ordered key set.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMap<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord> Default for CoeffMap<K> {
    fn default() -> Self {
        Self { entries: BTreeMap::new() }
    }
}

impl<K: Ord + Copy> CoeffMap<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K) -> Self {
        let mut out = Self::new();
        out.add(key, 1.0);
        out
    }

    pub fn add(&mut self, key: K, value: f64) {
        *self.entries.entry(key).or_insert(0.0) += value;
    }

    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        for (&k, &v) in &other.entries {
            self.add(k, factor * v);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { entries: self.entries.iter().map(|(&k, &v)| (k, factor * v)).collect() }
    }

    pub fn get(&self, key: &K) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &f64)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.entries.iter().map(|(k, v)| v * large.get(k)).sum()
    }

    /// Drop entries with |amplitude| ≤ `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.entries.retain(|_, v| v.abs() > tol);
        self
    }

    /// Largest |a − b| over the union of keys.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let a = self.entries.iter().map(|(k, v)| (v - other.get(k)).abs());
        let b = other.entries.iter().map(|(k, v)| (v - self.get(k)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

impl<K: Ord + Copy> FromIterator<(K, f64)> for CoeffMap<K> {
    fn from_iter<I: IntoIterator<Item = (K, f64)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (k, v) in iter {
            out.add(k, v);
        }
        out
    }
}

fn circular(mode: Mode2D) -> (u32, u32) {
    let am = mode.m.unsigned_abs();
    if mode.m >= 0 {
        (mode.n + am, mode.n)
    } else {
        (mode.n, mode.n + am)
    }
}

fn from_circular(d: u32, g: u32) -> Mode2D {
    Mode2D { n: d.min(g), m: d as i32 - g as i32 }
}

type PairTable = Arc<Vec<(u32, u32, f64)>>;

/// |p⟩_A |s⟩_B with A, B = (a₁ ± a₂)/√2, expanded as Σ c |k₁⟩₁|k₂⟩₂.
fn pair_expand(p: u32, s: u32) -> PairTable {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), PairTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("pair cache poisoned").get(&(p, s)) {
        return Arc::clone(t);
    }
    let total = p + s;
    let mut out = Vec::with_capacity(total as usize + 1);
    for k2 in 0..=total {
        let k1 = total - k2;
        let mut sum: i128 = 0;
        for j in k2.saturating_sub(s)..=p.min(k2) {
            let k = k2 - j;
            let term = binomial(p, j) * binomial(s, k);
            sum += if k % 2 == 0 { term } else { -term };
        }
        if sum != 0 {
            let ln_norm = ln_factorial(k1) + ln_factorial(k2)
                - f64::from(total) * std::f64::consts::LN_2
                - ln_factorial(p)
                - ln_factorial(s);
            out.push((k1, k2, sum as f64 * (0.5 * ln_norm).exp()));
        }
    }
    let table = Arc::new(out);
    cache.lock().expect("pair cache poisoned").entry((p, s)).or_insert(table).clone()
}

fn parity(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Shared two-mode rotation: `x` carries the (a₁+a₂)-type quanta and `y`
/// the (a₁−a₂)-type quanta; results are (first, second, amplitude).
fn rotate(x: Mode, y: Mode) -> Vec<(Mode, Mode, f64)> {
    assert_eq!(x.z.is_some(), y.z.is_some(), "mixed planar and 3D modes");
    let (dx, gx) = circular(x.planar);
    let (dy, gy) = circular(y.planar);
    let d = pair_expand(dx, dy);
    let g = pair_expand(gx, gy);
    let z: PairTable = match (x.z, y.z) {
        (Some(a), Some(b)) => pair_expand(a.nz, b.nz),
        _ => Arc::new(vec![(0, 0, 1.0)]),
    };
    let in_phase = parity(x.planar.n + y.planar.n);
    let mut out = Vec::with_capacity(d.len() * g.len() * z.len());
    for &(d1, d2, cd) in d.iter() {
        for &(g1, g2, cg) in g.iter() {
            let p1 = from_circular(d1, g1);
            let p2 = from_circular(d2, g2);
            let phase = in_phase * parity(p1.n + p2.n);
            for &(z1, z2, cz) in z.iter() {
                let (m1, m2) = if x.z.is_some() {
                    (
                        Mode { planar: p1, z: Some(ModeZ { nz: z1 }) },
                        Mode { planar: p2, z: Some(ModeZ { nz: z2 }) },
                    )
                } else {
                    (Mode { planar: p1, z: None }, Mode { planar: p2, z: None })
                };
                out.push((m1, m2, phase * cd * cg * cz));
            }
        }
    }
    out
}

/// Expand a CM×rel state over IP products.
pub fn cm_to_ip(state: CmRelState) -> CoeffMap<ProductState> {
    rotate(state.cm, state.rel)
        .into_iter()
        .map(|(a, b, c)| (ProductState::new(a, b), c))
        .collect()
}

/// Expand an IP product over CM×rel states.
pub fn ip_to_cm(state: ProductState) -> CoeffMap<CmRelState> {
    rotate(state.mode1, state.mode2)
        .into_iter()
        .map(|(cm, rel, c)| (CmRelState::new(cm, rel), c))
        .collect()
}

pub fn cm_map_to_ip(map: &CoeffMap<CmRelState>) -> CoeffMap<ProductState> {
    let mut out = CoeffMap::new();
    for (&k, &v) in map.iter() {
        out.add_scaled(&cm_to_ip(k), v);
    }
    out
}

pub fn ip_map_to_cm(map: &CoeffMap<ProductState>) -> CoeffMap<CmRelState> {
    let mut out = CoeffMap::new();
    for (&k, &v) in map.iter() {
        out.add_scaled(&ip_to_cm(k), v);
    }
    out
}

/// Normalized (anti)symmetrized product; empty for an antisymmetrized
/// doubly occupied mode.
pub fn symmetrize(state: ProductState, sign: Sign) -> CoeffMap<ProductState> {
    if state.mode1 == state.mode2 {
        return match sign {
            Sign::Plus => CoeffMap::single(state),
            Sign::Minus => CoeffMap::new(),
        };
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [(state, h), (state.swapped(), sign.factor() * h)].into_iter().collect()
}

/// Single binomial term of the radial-ground-shell transform:
/// (−1)^k C(m_cm, j) C(m, k) √[(M−j−k)!(j+k)!/(2^M m_cm! m!)].
pub fn a_coeff(m_cm: u32, m: u32, j: u32, k: u32) -> Result<f64> {
    if j > m_cm || k > m {
        return Err(Error::OutOfRange(format!("a_coeff needs j ≤ {m_cm}, k ≤ {m}; got j={j}, k={k}")));
    }
    let total = m_cm + m;
    let ln_norm = ln_factorial(total - j - k) + ln_factorial(j + k)
        - f64::from(total) * std::f64::consts::LN_2
        - ln_factorial(m_cm)
        - ln_factorial(m);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * (binomial(m_cm, j) * binomial(m, k)) as f64 * (0.5 * ln_norm).exp())
}
