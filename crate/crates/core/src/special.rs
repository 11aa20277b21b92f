//! Factorials, binomials, gamma values, and orthonormalized Laguerre and
//! Hermite polynomials by upward recurrence.

use std::f64::consts::PI;

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Exact binomial coefficient. Panics on overflow of `i128`, which needs
/// `n` well above 120.
pub fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * i128::from(n - i) / i128::from(i + 1);
    }
    acc
}

/// Γ(x) for x > 0. Integer and half-integer arguments are evaluated from
/// exact factorial identities; anything else falls back to Lanczos.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    let twice = 2.0 * x;
    if twice.fract() == 0.0 && twice < 1e6 {
        let t = twice as u32;
        if t.is_multiple_of(2) {
            return ln_factorial(t / 2 - 1);
        }
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        let k = (t - 1) / 2;
        return ln_factorial(2 * k) + 0.5 * PI.ln() - f64::from(k) * 4f64.ln() - ln_factorial(k);
    }
    lanczos_ln_gamma(x)
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - lanczos_ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Plain generalized Laguerre polynomial L_n^α(t).
pub fn laguerre(n: u32, alpha: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - t;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + alpha + 1.0 - t) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Values `sqrt(k!/Γ(k+α+1)) L_k^α(t)` for k = 0..=n.
pub fn laguerre_normalized_all(n: u32, alpha: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push((-0.5 * ln_gamma(alpha + 1.0)).exp());
    for k in 0..n {
        let kf = f64::from(k);
        let prev = if k == 0 { 0.0 } else { out[k as usize - 1] };
        let cur = out[k as usize];
        let next = ((2.0 * kf + alpha + 1.0 - t) * cur - (kf * (kf + alpha)).sqrt() * prev)
            / ((kf + 1.0) * (kf + alpha + 1.0)).sqrt();
        out.push(next);
    }
    out
}

pub fn laguerre_normalized(n: u32, alpha: f64, t: f64) -> f64 {
    laguerre_normalized_all(n, alpha, t)[n as usize]
}

/// Physicists' Hermite polynomial H_n(y).
pub fn hermite(n: u32, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Values `H_k(y) / sqrt(2^k k!)` for k = 0..=n.
pub fn hermite_normalized_all(n: u32, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(1.0);
    for k in 0..n {
        let kf = f64::from(k);
        let prev = if k == 0 { 0.0 } else { out[k as usize - 1] };
        let next = (2.0 / (kf + 1.0)).sqrt() * y * out[k as usize] - (kf / (kf + 1.0)).sqrt() * prev;
        out.push(next);
    }
    out
}

pub fn hermite_normalized(n: u32, y: f64) -> f64 {
    hermite_normalized_all(n, y)[n as usize]
}
