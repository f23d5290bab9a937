//! Joint photon-number statistics of two-mode Gaussian states and the
//! measurement-induced disturbance (MID) of local Fock-basis detection.
//!
//! Two evaluation routes are provided. [`MidMethod::Recursion`] expands the
//! generating function `G(z1, z2) = sum p(n, m) z1^n z2^m`, which for a
//! Gaussian state equals `Q^{-1/2} exp(N / Q)` with polynomials `Q` and `N`,
//! and reads off the coefficients with a linear recurrence. It is exact up to
//! roundoff and cheap enough for large cutoffs. [`MidMethod::Quadrature`]
//! integrates the Wigner function against Fock-state Wigner kernels on a
//! tensor Gauss–Hermite grid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::entropy::mutual_information;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, ModeBipartition};
use crate::quadrature::gauss_hermite_normal;

/// Smallest accepted cutoff.
pub const MIN_N_MAX: usize = 10;
/// The table must capture at least `1 - MASS_TOL` of the probability.
pub const MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MidMethod {
    /// Generating-function recurrence.
    Recursion,
    /// Gauss–Hermite quadrature with `order` nodes per phase-space axis.
    /// `order >= 2 n_max + 1` makes the rule exact for every table entry.
    Quadrature { order: usize },
}

impl MidMethod {
    pub fn quadrature_for(n_max: usize) -> Self {
        MidMethod::Quadrature { order: 2 * n_max + 1 }
    }
}

/// `p(n, m)` for `0 <= n, m <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonTable {
    n_max: usize,
    p: Vec<f64>,
}

impl PhotonTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.p[n * (self.n_max + 1) + m]
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Photon-number distribution of mode A.
    pub fn marginal_a(&self) -> Vec<f64> {
        let d = self.n_max + 1;
        (0..d).map(|n| self.p[n * d..(n + 1) * d].iter().sum()).collect()
    }

    /// Photon-number distribution of mode B.
    pub fn marginal_b(&self) -> Vec<f64> {
        let d = self.n_max + 1;
        (0..d).map(|m| (0..d).map(|n| self.p[n * d + m]).sum()).collect()
    }

    /// Shannon mutual information (nats) of the tabulated joint distribution.
    /// Negative roundoff entries are treated as zero.
    pub fn mutual_information(&self) -> f64 {
        let d = self.n_max + 1;
        let pa = self.marginal_a();
        let pb = self.marginal_b();
        let mut total = 0.0;
        for n in 0..d {
            for m in 0..d {
                let p = self.p[n * d + m];
                if p > 0.0 && pa[n] > 0.0 && pb[m] > 0.0 {
                    total += p * (p / (pa[n] * pb[m])).ln();
                }
            }
        }
        total
    }

    /// `sum |p - q| / 2` over the common support.
    pub fn total_variation(&self, other: impl Fn(usize, usize) -> f64) -> f64 {
        let d = self.n_max + 1;
        let mut tv = 0.0;
        for n in 0..d {
            for m in 0..d {
                tv += (self.p[n * d + m] - other(n, m)).abs();
            }
        }
        0.5 * tv
    }
}

fn check_inputs(state: &GaussianState, n_max: usize) -> Result<()> {
    if state.n_modes() != 2 {
        return Err(Error::Unsupported(format!("photon statistics need two modes, got {}", state.n_modes())));
    }
    if n_max < MIN_N_MAX {
        return Err(Error::InvalidArgument(format!("n_max must be >= {MIN_N_MAX}, got {n_max}")));
    }
    Ok(())
}

/// Joint photon-number distribution truncated at `n_max` in each mode.
/// No mass check is applied here; see [`mid`].
pub fn photon_number_distribution(state: &GaussianState, n_max: usize, method: MidMethod) -> Result<PhotonTable> {
    check_inputs(state, n_max)?;
    match method {
        MidMethod::Recursion => Ok(by_recursion(state, n_max)),
        MidMethod::Quadrature { order } => {
            if order < 2 {
                return Err(Error::InvalidArgument("quadrature order must be >= 2".into()));
            }
            by_quadrature(state, n_max, order)
        }
    }
}

/// MID = quantum mutual information minus the Shannon mutual information of
/// local photon counting, in nats.
pub fn mid(state: &GaussianState, n_max: usize, method: MidMethod) -> Result<f64> {
    let table = photon_number_distribution(state, n_max, method)?;
    let mass = table.mass();
    if mass < 1.0 - MASS_TOL {
        return Err(Error::Truncation { mass, n_max });
    }
    let cut = ModeBipartition::one_vs_rest(0, 2)?;
    Ok(mutual_information(state, &cut)? - table.mutual_information())
}

/// [`mid`] with the recursion, doubling the cutoff from `start` until the
/// table holds enough mass or `cap` is exceeded.
pub fn mid_adaptive(state: &GaussianState, start: usize, cap: usize) -> Result<(f64, usize)> {
    let mut n_max = start.max(MIN_N_MAX);
    loop {
        match mid(state, n_max, MidMethod::Recursion) {
            Err(Error::Truncation { .. }) if n_max < cap => n_max = (2 * n_max).min(cap),
            other => return other.map(|v| (v, n_max)),
        }
    }
}

// ---------------------------------------------------------------------------
// generating-function recurrence

/// Dense bivariate polynomial, `c[i][j]` multiplies `z1^i z2^j`.
#[derive(Debug, Clone, PartialEq)]
struct BiPoly {
    c: Vec<Vec<f64>>,
}

impl BiPoly {
    fn zero() -> Self {
        Self { c: vec![vec![0.0]] }
    }

    /// `a + b * z_var` with `var` in {1, 2}.
    fn linear(a: f64, b: f64, var: usize) -> Self {
        if var == 1 {
            Self { c: vec![vec![a], vec![b]] }
        } else {
            Self { c: vec![vec![a, b]] }
        }
    }

    fn deg1(&self) -> usize {
        self.c.len() - 1
    }

    fn deg2(&self) -> usize {
        self.c[0].len() - 1
    }

    fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c.get(i).and_then(|row| row.get(j)).copied().unwrap_or(0.0)
    }

    fn with_shape(d1: usize, d2: usize) -> Self {
        Self { c: vec![vec![0.0; d2 + 1]; d1 + 1] }
    }

    fn add(&self, other: &BiPoly, sign: f64) -> BiPoly {
        let mut out = BiPoly::with_shape(self.deg1().max(other.deg1()), self.deg2().max(other.deg2()));
        for (i, row) in out.c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.coeff(i, j) + sign * other.coeff(i, j);
            }
        }
        out
    }

    fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::with_shape(self.deg1() + other.deg1(), self.deg2() + other.deg2());
        for (i, row) in self.c.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, orow) in other.c.iter().enumerate() {
                    for (l, &b) in orow.iter().enumerate() {
                        out.c[i + k][j + l] += a * b;
                    }
                }
            }
        }
        out
    }

    fn scale(&self, s: f64) -> BiPoly {
        BiPoly { c: self.c.iter().map(|row| row.iter().map(|v| v * s).collect()).collect() }
    }

    fn d1(&self) -> BiPoly {
        if self.deg1() == 0 {
            return BiPoly::with_shape(0, self.deg2());
        }
        BiPoly { c: (1..=self.deg1()).map(|i| self.c[i].iter().map(|v| v * i as f64).collect()).collect() }
    }

    fn d2(&self) -> BiPoly {
        if self.deg2() == 0 {
            return BiPoly::with_shape(self.deg1(), 0);
        }
        BiPoly { c: self.c.iter().map(|row| (1..row.len()).map(|j| row[j] * j as f64).collect()).collect() }
    }
}

/// Laplace expansion along the first row; fine for 4x4.
fn poly_det(m: &[Vec<BiPoly>]) -> BiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BiPoly::zero();
    for col in 0..n {
        let minor: Vec<Vec<BiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = m[0][col].mul(&poly_det(&minor));
        total = total.add(&term, if col % 2 == 0 { 1.0 } else { -1.0 });
    }
    total
}

fn by_recursion(state: &GaussianState, n_max: usize) -> PhotonTable {
    let gamma = state.cov();
    let mu = state.mean();
    // R(z) = (D_{1+z} + gamma D_{1-z}) / 2, column j carries z of mode j / 2
    let var = |j: usize| j / 2 + 1;
    let r: Vec<Vec<BiPoly>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    BiPoly::linear(0.5 * (delta + gamma[(i, j)]), 0.5 * (delta - gamma[(i, j)]), var(j))
                })
                .collect()
        })
        .collect();
    let q = poly_det(&r);
    let n = if mu.iter().all(|&v| v == 0.0) {
        BiPoly::zero()
    } else {
        // det(R + mu u^T) with u = D_{1-z} mu, via the matrix determinant lemma
        let shifted: Vec<Vec<BiPoly>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let w = mu[i] * mu[j];
                        r[i][j].add(&BiPoly::linear(w, -w, var(j)), 1.0)
                    })
                    .collect()
            })
            .collect();
        poly_det(&shifted).add(&q, -1.0).scale(-0.25)
    };

    // Q^2 dG/dz_k = G * B_k with B_k = -Q Q_k / 2 + N_k Q - N Q_k
    let a = q.mul(&q);
    let b_of = |qk: &BiPoly, nk: &BiPoly| q.mul(qk).scale(-0.5).add(&nk.mul(&q), 1.0).add(&n.mul(qk), -1.0);
    let b1 = b_of(&q.d1(), &n.d1());
    let b2 = b_of(&q.d2(), &n.d2());

    let d = n_max + 1;
    let mut g = vec![0.0; d * d];
    let q00 = q.coeff(0, 0);
    let a00 = a.coeff(0, 0);
    g[0] = (n.coeff(0, 0) / q00).exp() / q00.sqrt();
    let at = |g: &[f64], i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 {
            0.0
        } else {
            g[i as usize * d + j as usize]
        }
    };
    for i in 0..d {
        for j in 0..d {
            if i == 0 && j == 0 {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let mut acc = 0.0;
            if i > 0 {
                for (ai, row) in a.c.iter().enumerate() {
                    for (bj, &v) in row.iter().enumerate() {
                        if (ai, bj) != (0, 0) && v != 0.0 && ai <= i {
                            acc -= v * (i - ai) as f64 * at(&g, ii - ai as isize, jj - bj as isize);
                        }
                    }
                }
                for (ai, row) in b1.c.iter().enumerate() {
                    for (bj, &v) in row.iter().enumerate() {
                        if v != 0.0 {
                            acc += v * at(&g, ii - 1 - ai as isize, jj - bj as isize);
                        }
                    }
                }
                g[i * d + j] = acc / (a00 * i as f64);
            } else {
                for (bj, &v) in a.c[0].iter().enumerate().skip(1) {
                    if bj <= j {
                        acc -= v * (j - bj) as f64 * at(&g, 0, jj - bj as isize);
                    }
                }
                for (bj, &v) in b2.c[0].iter().enumerate() {
                    acc += v * at(&g, 0, jj - 1 - bj as isize);
                }
                g[j] = acc / (a00 * j as f64);
            }
        }
    }
    PhotonTable { n_max, p: g }
}

// ---------------------------------------------------------------------------
// Wigner-function quadrature

/// `L_0(x) .. L_n(x)` by the three-term recurrence.
fn laguerre_all(n: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n >= 1 {
        out[1] = 1.0 - x;
    }
    for k in 1..n {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// With unit-vacuum quadratures the Fock Wigner function is
/// `W_n = (-1)^n exp(-|xi|^2 / 2) L_n(|xi|^2) / (2 pi)` and
/// `Tr(rho sigma) = (4 pi)^2 ∫ W_rho W_sigma` for two modes, so
/// `p(n, m) = 4 (-1)^{n+m} ∫ W_rho(xi) exp(-|xi|^2/2) L_n(r_1^2) L_m(r_2^2)`.
/// `W_rho exp(-|xi|^2/2)` is itself a scaled Gaussian, which is sampled with
/// a Cholesky-transformed Gauss–Hermite grid.
fn by_quadrature(state: &GaussianState, n_max: usize, order: usize) -> Result<PhotonTable> {
    let v = state.cov();
    let mu = state.mean();
    let eye = DMatrix::<f64>::identity(4, 4);
    let v_inv = v.clone().try_inverse().ok_or_else(|| Error::Numerical("singular covariance".into()))?;
    let sigma = (&v_inv + &eye).try_inverse().ok_or_else(|| Error::Numerical("singular precision".into()))?;
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    let centre: DVector<f64> = &sigma * (&v_inv * mu);
    let v_plus = v + &eye;
    let shift = v_plus
        .clone()
        .try_inverse()
        .map(|inv| (mu.transpose() * inv * mu)[(0, 0)])
        .ok_or_else(|| Error::Numerical("singular gamma + 1".into()))?;
    let scale = 4.0 * (-0.5 * shift).exp() / v_plus.determinant().sqrt();
    let l =
        sigma.cholesky().ok_or_else(|| Error::Numerical("conditional covariance not positive definite".into()))?.l();

    let rule = gauss_hermite_normal(order);
    let d = n_max + 1;
    let mut p = vec![0.0; d * d];
    let mut la = vec![0.0; d];
    let mut lb = vec![0.0; d];
    let mut h = vec![0.0; d];
    for (&e0, &w0) in rule.nodes.iter().zip(&rule.weights) {
        for (&e1, &w1) in rule.nodes.iter().zip(&rule.weights) {
            let x1 = centre[0] + l[(0, 0)] * e0;
            let p1 = centre[1] + l[(1, 0)] * e0 + l[(1, 1)] * e1;
            laguerre_all(n_max, x1 * x1 + p1 * p1, &mut la);
            let x2_base = centre[2] + l[(2, 0)] * e0 + l[(2, 1)] * e1;
            let p2_base = centre[3] + l[(3, 0)] * e0 + l[(3, 1)] * e1;
            h.iter_mut().for_each(|v| *v = 0.0);
            for (&e2, &w2) in rule.nodes.iter().zip(&rule.weights) {
                let x2 = x2_base + l[(2, 2)] * e2;
                let p2_part = p2_base + l[(3, 2)] * e2;
                for (&e3, &w3) in rule.nodes.iter().zip(&rule.weights) {
                    let p2 = p2_part + l[(3, 3)] * e3;
                    laguerre_all(n_max, x2 * x2 + p2 * p2, &mut lb);
                    let w = w2 * w3;
                    for (hm, lbm) in h.iter_mut().zip(&lb) {
                        *hm += w * lbm;
                    }
                }
            }
            let w = w0 * w1;
            for n in 0..d {
                let wn = w * la[n];
                for m in 0..d {
                    p[n * d + m] += wn * h[m];
                }
            }
        }
    }
    for n in 0..d {
        for m in 0..d {
            let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
            p[n * d + m] *= sign * scale;
        }
    }
    Ok(PhotonTable { n_max, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels;

    fn thermal_pair(n1: f64, n2: f64) -> GaussianState {
        GaussianState::thermal(n1).unwrap().tensor(&GaussianState::thermal(n2).unwrap())
    }

    fn geometric(nbar: f64, n: usize) -> f64 {
        nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1)
    }

    #[test]
    fn thermal_marginals_are_geometric() {
        let s = thermal_pair(1.0, 0.0);
        let table = photon_number_distribution(&s, 40, MidMethod::Recursion).unwrap();
        let tv = table.total_variation(|n, m| if m == 0 { geometric(1.0, n) } else { 0.0 });
        assert!(tv < 1e-12, "{tv}");
    }

    #[test]
    fn tmsv_is_diagonal() {
        let r: f64 = 1.0;
        let s = GaussianState::tmsv(r);
        let table = photon_number_distribution(&s, 60, MidMethod::Recursion).unwrap();
        let t2 = r.tanh().powi(2);
        let oracle = |n: usize, m: usize| if n == m { t2.powi(n as i32) / r.cosh().powi(2) } else { 0.0 };
        assert!(table.total_variation(oracle) < 1e-10);
    }

    #[test]
    fn coherent_times_thermal() {
        let (re, im) = (0.8, -0.5);
        let s = GaussianState::coherent(re, im).tensor(&GaussianState::thermal(0.5).unwrap());
        let table = photon_number_distribution(&s, 30, MidMethod::Recursion).unwrap();
        let alpha2: f64 = re * re + im * im;
        let mut fact = 1.0;
        let poisson: Vec<f64> = (0..=30)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                (-alpha2).exp() * alpha2.powi(n) / fact
            })
            .collect();
        let tv = table.total_variation(|n, m| poisson[n] * geometric(0.5, m));
        assert!(tv < 1e-12, "{tv}");
    }

    #[test]
    fn quadrature_matches_recursion() {
        let s = channels::beam_splitter(
            &channels::squeeze(&GaussianState::thermal(0.3).unwrap(), 0, 0.4, 0.2)
                .unwrap()
                .tensor(&GaussianState::coherent(0.3, 0.1)),
            0,
            1,
            0.6,
            0.4,
        )
        .unwrap();
        let n_max = 10;
        let a = photon_number_distribution(&s, n_max, MidMethod::Recursion).unwrap();
        let b = photon_number_distribution(&s, n_max, MidMethod::quadrature_for(n_max)).unwrap();
        let tv = a.total_variation(|n, m| b.get(n, m));
        assert!(tv < 1e-10, "{tv}");
    }

    #[test]
    fn mid_of_tmsv_is_entanglement_entropy() {
        let r = 0.5;
        let s = GaussianState::tmsv(r);
        let m = mid(&s, 40, MidMethod::Recursion).unwrap();
        let want = crate::measures::entropy::entropy_function((2.0 * r).cosh());
        assert!((m - want).abs() < 1e-8);
    }

    #[test]
    fn mid_of_product_is_zero() {
        let m = mid(&thermal_pair(1.0, 0.5), 60, MidMethod::Recursion).unwrap();
        assert!(m.abs() < 1e-9);
    }

    #[test]
    fn truncation_and_argument_errors() {
        let s = thermal_pair(5.0, 5.0);
        assert!(matches!(mid(&s, 10, MidMethod::Recursion), Err(Error::Truncation { .. })));
        assert!(mid(&s, 5, MidMethod::Recursion).is_err());
        assert!(mid(&GaussianState::vacuum(3), 20, MidMethod::Recursion).is_err());
        let (v, n) = mid_adaptive(&s, 16, 1024).unwrap();
        assert!(v.abs() < 1e-9);
        assert!(n >= 64);
    }
}
