//! Gaussian unitaries and channels acting on [`GaussianState`] values.
//!
//! Beam splitter convention: for transmittance `t` and phase `phi`,
//! `a_i -> sqrt(t) a_i - sqrt(1-t) e^{-i phi} a_j` and
//! `a_j -> sqrt(1-t) e^{i phi} a_i + sqrt(t) a_j`.
//! With `phi = 0` a balanced splitter maps an x-squeezed mode `i` and a
//! p-squeezed mode `j` onto [`GaussianState::tmsv`].

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg;

const SYMPLECTIC_TOL: f64 = 1e-10;
const NOISE_PSD_TOL: f64 = 1e-12;

/// Real symplectic matrix: `S Omega S^T = Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp(DMatrix<f64>);

impl SymplecticOp {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if !dim.is_multiple_of(2) || matrix.ncols() != dim {
            return Err(Error::Dimension(format!("expected 2n x 2n, got {}x{}", dim, matrix.ncols())));
        }
        let omega = linalg::symplectic_form(dim / 2);
        let err = (&matrix * &omega * matrix.transpose() - &omega).amax();
        if err > SYMPLECTIC_TOL * matrix.amax().max(1.0).powi(2) {
            return Err(Error::InvalidArgument(format!("matrix is not symplectic (error {err:e})")));
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn identity(n_modes: usize) -> Self {
        Self(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    pub fn compose(&self, other: &SymplecticOp) -> SymplecticOp {
        SymplecticOp(&self.0 * &other.0)
    }

    pub fn beam_splitter(n_modes: usize, i: usize, j: usize, t: f64, phi: f64) -> Result<Self> {
        check_mode(i, n_modes)?;
        check_mode(j, n_modes)?;
        if i == j {
            return Err(Error::InvalidArgument("beam splitter needs two distinct modes".into()));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("transmittance {t} outside [0, 1]")));
        }
        let c = t.sqrt();
        let s = (1.0 - t).sqrt();
        let rot = rotation(phi);
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for a in 0..2 {
            for b in 0..2 {
                m[(2 * i + a, 2 * i + b)] = if a == b { c } else { 0.0 };
                m[(2 * j + a, 2 * j + b)] = if a == b { c } else { 0.0 };
                m[(2 * i + a, 2 * j + b)] = -s * rot[(b, a)];
                m[(2 * j + a, 2 * i + b)] = s * rot[(a, b)];
            }
        }
        Ok(Self(m))
    }

    /// Single-mode squeezer: variance `e^{-2r}` along the axis at `angle`.
    pub fn squeezer(n_modes: usize, mode: usize, r: f64, angle: f64) -> Result<Self> {
        check_mode(mode, n_modes)?;
        if !r.is_finite() {
            return Err(Error::InvalidArgument("squeezing must be finite".into()));
        }
        let rot = rotation(angle);
        let block = rot * Matrix2::new((-r).exp(), 0.0, 0.0, r.exp()) * rot.transpose();
        Ok(Self(embed_block(n_modes, mode, &block)))
    }

    /// Phase-space rotation `x -> x cos(theta) - p sin(theta)`.
    pub fn phase_rotation(n_modes: usize, mode: usize, theta: f64) -> Result<Self> {
        check_mode(mode, n_modes)?;
        Ok(Self(embed_block(n_modes, mode, &rotation(theta))))
    }
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn embed_block(n_modes: usize, mode: usize, block: &Matrix2<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for a in 0..2 {
        for b in 0..2 {
            m[(2 * mode + a, 2 * mode + b)] = block[(a, b)];
        }
    }
    m
}

fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode >= n_modes {
        return Err(Error::InvalidArgument(format!("mode {mode} out of range 0..{n_modes}")));
    }
    Ok(())
}

/// Ensemble covariance of classical Gaussian displacements.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseInjection(DMatrix<f64>);

impl NoiseInjection {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if !dim.is_multiple_of(2) || matrix.ncols() != dim {
            return Err(Error::Dimension(format!("expected 2n x 2n, got {}x{}", dim, matrix.ncols())));
        }
        let scale = matrix.amax().max(1.0);
        if linalg::max_asymmetry(&matrix) > 1e-12 * scale {
            return Err(Error::InvalidArgument("noise matrix is not symmetric".into()));
        }
        let min = linalg::symmetric_eigenvalues(&matrix)[0];
        if min < -NOISE_PSD_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "noise matrix is not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self((&matrix + matrix.transpose()) * 0.5))
    }

    /// Noise `sum_k variance_k * u_k u_k^T` from independent zero-mean
    /// displacements, each pushing the quadratures along `u_k`.
    pub fn from_directions(dim: usize, terms: &[(f64, DVector<f64>)]) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for (variance, u) in terms {
            if u.len() != dim {
                return Err(Error::Dimension(format!("direction has length {}, expected {dim}", u.len())));
            }
            if *variance < 0.0 {
                return Err(Error::InvalidArgument("negative displacement variance".into()));
            }
            m += u * u.transpose() * *variance;
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `cov -> S cov S^T`, `mean -> S mean`.
pub fn apply_symplectic(state: &GaussianState, op: &SymplecticOp) -> Result<GaussianState> {
    let s = op.matrix();
    if s.nrows() != state.cov().nrows() {
        return Err(Error::Dimension(format!(
            "operation acts on {} quadratures, state has {}",
            s.nrows(),
            state.cov().nrows()
        )));
    }
    let cov = s * state.cov() * s.transpose();
    let mean = s * state.mean();
    GaussianState::new_unchecked_physicality(mean, cov)
}

pub fn beam_splitter(state: &GaussianState, i: usize, j: usize, t: f64, phi: f64) -> Result<GaussianState> {
    let op = SymplecticOp::beam_splitter(state.n_modes(), i, j, t, phi)?;
    apply_symplectic(state, &op)
}

pub fn squeeze(state: &GaussianState, mode: usize, r: f64, angle: f64) -> Result<GaussianState> {
    let op = SymplecticOp::squeezer(state.n_modes(), mode, r, angle)?;
    apply_symplectic(state, &op)
}

pub fn phase_rotate(state: &GaussianState, mode: usize, theta: f64) -> Result<GaussianState> {
    let op = SymplecticOp::phase_rotation(state.n_modes(), mode, theta)?;
    apply_symplectic(state, &op)
}

/// Pure-loss channel of transmissivity `eta` on one mode.
pub fn attenuate(state: &GaussianState, mode: usize, eta: f64) -> Result<GaussianState> {
    check_mode(mode, state.n_modes())?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("transmissivity {eta} outside [0, 1]")));
    }
    let dim = state.cov().nrows();
    let root = eta.sqrt();
    let mut x = DMatrix::identity(dim, dim);
    let mut y = DMatrix::zeros(dim, dim);
    for q in [2 * mode, 2 * mode + 1] {
        x[(q, q)] = root;
        y[(q, q)] = 1.0 - eta;
    }
    let cov = &x * state.cov() * x.transpose() + y;
    let mean = &x * state.mean();
    GaussianState::new_unchecked_physicality(mean, cov)
}

/// Ensemble average over Gaussian-distributed displacements: `cov -> cov + N`.
pub fn add_classical_noise(state: &GaussianState, noise: &NoiseInjection) -> Result<GaussianState> {
    if noise.matrix().nrows() != state.cov().nrows() {
        return Err(Error::Dimension("noise matrix does not match the state".into()));
    }
    GaussianState::new_unchecked_physicality(state.mean().clone(), state.cov() + noise.matrix())
}

/// Deterministic displacement of the mean.
pub fn displace(state: &GaussianState, shift: &[f64]) -> Result<GaussianState> {
    if shift.len() != state.mean().len() {
        return Err(Error::Dimension(format!(
            "displacement has length {}, expected {}",
            shift.len(),
            state.mean().len()
        )));
    }
    let mean = state.mean() + DVector::from_column_slice(shift);
    GaussianState::new_unchecked_physicality(mean, state.cov().clone())
}
