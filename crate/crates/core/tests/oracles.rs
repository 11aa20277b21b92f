//! Brute-force quadrature checks of the I and J integrals against their
//! defining multidimensional integrals.
//!
//! With Ω = ω_z = 1 the four CM and four relative Gaussians multiply to
//! exp(−Σx²), so a tensor Gauss–Hermite rule is exact once it resolves the
//! polynomial prefactor.

use num_complex::Complex64;
use qdot::basis::{fd_eval_xy, z_eval, Mode2D, ModeZ, Role};
use qdot::entangle::{integral_i, integral_j};
use qdot::quad::gauss_hermite;

fn i_by_quadrature(n: [u32; 4], m: i32, nodes: usize) -> f64 {
    let rule = gauss_hermite(nodes);
    let (x, w) = (&rule.nodes, &rule.weights);
    let cm = |a: [f64; 2], b: [f64; 2]| fd_eval_xy(Mode2D::new(0, 0), Role::CenterOfMass, 1.0, 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]));
    let rel = |k: usize, a: [f64; 2], b: [f64; 2]| fd_eval_xy(Mode2D::new(n[k], m), Role::Relative, 1.0, a[0] - b[0], a[1] - b[1]);
    let k = nodes;
    let mut total = Complex64::new(0.0, 0.0);
    for idx in 0..k.pow(8) {
        let mut d = [0usize; 8];
        let mut r = idx;
        for slot in d.iter_mut() {
            *slot = r % k;
            r /= k;
        }
        let weight: f64 = d.iter().map(|&j| w[j]).product();
        let sq: f64 = d.iter().map(|&j| x[j] * x[j]).sum();
        let (r1, r1p, r2, r2p) = ([x[d[0]], x[d[1]]], [x[d[2]], x[d[3]]], [x[d[4]], x[d[5]]], [x[d[6]], x[d[7]]]);
        let f = cm(r1, r2) * cm(r1p, r2).conj() * cm(r1, r2p).conj() * cm(r1p, r2p)
            * rel(0, r1, r2)
            * rel(1, r1p, r2).conj()
            * rel(2, r1, r2p).conj()
            * rel(3, r1p, r2p);
        total += f * weight * sq.exp();
    }
    assert!(total.im.abs() < 1e-12);
    total.re
}

fn j_by_quadrature(n: [u32; 4], nodes: usize) -> f64 {
    let rule = gauss_hermite(nodes);
    let (x, w) = (&rule.nodes, &rule.weights);
    let cm = |a: f64, b: f64| z_eval(ModeZ { nz: 0 }, Role::CenterOfMass, 1.0, 0.5 * (a + b)).unwrap();
    let rel = |k: usize, a: f64, b: f64| z_eval(ModeZ { nz: n[k] }, Role::Relative, 1.0, a - b).unwrap();
    let mut total = 0.0;
    for a in 0..nodes {
        for b in 0..nodes {
            for c in 0..nodes {
                for d in 0..nodes {
                    let (z1, z1p, z2, z2p) = (x[a], x[b], x[c], x[d]);
                    let f = cm(z1, z2) * cm(z1p, z2) * cm(z1, z2p) * cm(z1p, z2p)
                        * rel(0, z1, z2)
                        * rel(1, z1p, z2)
                        * rel(2, z1, z2p)
                        * rel(3, z1p, z2p);
                    total += f * w[a] * w[b] * w[c] * w[d] * (z1 * z1 + z1p * z1p + z2 * z2 + z2p * z2p).exp();
                }
            }
        }
    }
    total
}

#[test]
fn i_ground_terms() {
    assert!((i_by_quadrature([0; 4], 0, 3) - 1.0).abs() < 1e-12);
    assert!((i_by_quadrature([0; 4], 1, 3) - 0.5).abs() < 1e-12);
    assert!((i_by_quadrature([0; 4], 1, 3) - integral_i(0, 0, 0, 0, 1)).abs() < 1e-12);
}

#[test]
fn i_first_excited_terms() {
    for m in 0..=1 {
        let q = i_by_quadrature([0, 0, 1, 1], m, 4);
        assert!((q - integral_i(0, 0, 1, 1, m)).abs() < 1e-12, "m={m}: {q}");
    }
}

#[test]
fn j_terms() {
    assert!((j_by_quadrature([0; 4], 4) - 1.0).abs() < 1e-12);
    for n in [[0, 0, 2, 2], [2, 2, 2, 2], [1, 0, 0, 1], [0, 1, 0, 1]] {
        let q = j_by_quadrature(n, 8);
        assert!((q - integral_j(n[0], n[1], n[2], n[3])).abs() < 1e-12, "{n:?}: {q}");
    }
}
