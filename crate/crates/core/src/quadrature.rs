//! Gauss–Legendre and Gauss–Hermite rules computed by Newton iteration on the
//! three-term recurrences.

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        let w = 2.0 * half / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// `n`-point Gauss–Hermite rule for the standard normal density:
/// `sum w_i f(x_i) ≈ E[f(X)]`, `X ~ N(0, 1)`. Exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_hermite_normal(n: usize) -> Rule {
    let phys = gauss_hermite_physicists(n);
    Rule {
        nodes: phys.nodes.iter().map(|x| x * 2f64.sqrt()).collect(),
        weights: phys.weights.iter().map(|w| w / PI.sqrt()).collect(),
    }
}

/// Rule for the weight `exp(-x^2)` on the real line, nodes descending.
fn gauss_hermite_physicists(n: usize) -> Rule {
    assert!(n > 0);
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    Rule { nodes, weights }
}
