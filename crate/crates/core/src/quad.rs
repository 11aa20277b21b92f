//! Gaussian quadrature rules built from three-term recurrences.
//!
//! Nodes start from the eigenvalues of the symmetric Jacobi matrix and are
//! polished by Newton steps on the orthonormal polynomial; weights follow
//! from the Christoffel function `1 / Σ_k p_k(x)²`. Rules are memoized per
//! (family, order) behind a mutex and handed out as `Arc`s.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::linalg::{eigh, Matrix};
use crate::special::ln_gamma;

#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Family {
    /// weight t^α e^{-t} on [0, ∞); α stored as bits
    Laguerre(u64),
    /// weight e^{-x²} on ℝ
    Hermite,
    /// weight 1 on [-1, 1]
    Legendre,
}

impl Family {
    /// (a_k, b_k) of the monic recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1}.
    fn coeffs(self, k: usize) -> (f64, f64) {
        let kf = k as f64;
        match self {
            Family::Laguerre(bits) => {
                let alpha = f64::from_bits(bits);
                (2.0 * kf + alpha + 1.0, kf * (kf + alpha))
            }
            Family::Hermite => (0.0, kf / 2.0),
            Family::Legendre => (0.0, kf * kf / (4.0 * kf * kf - 1.0)),
        }
    }

    fn mu0(self) -> f64 {
        match self {
            Family::Laguerre(bits) => ln_gamma(f64::from_bits(bits) + 1.0).exp(),
            Family::Hermite => std::f64::consts::PI.sqrt(),
            Family::Legendre => 2.0,
        }
    }
}

type RuleCache = Mutex<HashMap<(Family, usize), Arc<Rule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(family: Family, n: usize) -> Arc<Rule> {
    if let Some(rule) = cache().lock().expect("quadrature cache poisoned").get(&(family, n)) {
        return Arc::clone(rule);
    }
    // built outside the lock; a racing duplicate build is harmless
    let rule = Arc::new(build(family, n));
    cache()
        .lock()
        .expect("quadrature cache poisoned")
        .entry((family, n))
        .or_insert(rule)
        .clone()
}

/// Generalized Gauss–Laguerre rule for ∫₀^∞ t^α e^{-t} f(t) dt, α > -1.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Arc<Rule> {
    assert!(alpha > -1.0, "Gauss–Laguerre needs α > -1");
    cached(Family::Laguerre(alpha.to_bits()), n)
}

/// Gauss–Hermite rule for ∫ e^{-x²} f(x) dx.
pub fn gauss_hermite(n: usize) -> Arc<Rule> {
    cached(Family::Hermite, n)
}

/// Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    cached(Family::Legendre, n)
}

/// Map a Gauss–Legendre rule onto [a, b].
pub fn legendre_on(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Rule {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    }
}

fn build(family: Family, n: usize) -> Rule {
    if n == 0 {
        return Rule { nodes: vec![], weights: vec![] };
    }
    let jac = Matrix::from_fn(n, |i, j| {
        if i == j {
            family.coeffs(i).0
        } else if i + 1 == j {
            family.coeffs(j).1.sqrt()
        } else if j + 1 == i {
            family.coeffs(i).1.sqrt()
        } else {
            0.0
        }
    });
    let eig = eigh(&jac).expect("Jacobi matrix diagonalization");
    let mu0 = family.mu0();

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &eig.values {
        let mut x = x0;
        for _ in 0..8 {
            let (p, dp, _) = orthonormal(family, n, x, mu0);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, sumsq) = orthonormal(family, n, x, mu0);
        nodes.push(x);
        weights.push(1.0 / sumsq);
    }
    Rule { nodes, weights }
}

/// Orthonormal p_n(x), its derivative, and Σ_{k<n} p_k(x)².
fn orthonormal(family: Family, n: usize, x: f64, mu0: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = 1.0 / mu0.sqrt();
    let mut d_prev = 0.0;
    let mut d = 0.0;
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += p * p;
        let (a, b) = family.coeffs(k);
        let sb = b.sqrt();
        let sb_next = family.coeffs(k + 1).1.sqrt();
        let p_next = ((x - a) * p - sb * p_prev) / sb_next;
        let d_next = (p + (x - a) * d - sb * d_prev) / sb_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d, sumsq)
}
