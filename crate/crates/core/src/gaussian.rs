//! n-mode Gaussian states described by a mean vector and a covariance matrix.
//!
//! Quadratures are ordered `x1, p1, x2, p2, ...` and scaled so that the
//! vacuum has identity covariance (`[x, p] = 2i`, unit shot noise). Values
//! quoted in the `x = (a + a^dag)/2` convention, whose vacuum variance is 1/4,
//! convert to this one by multiplying every variance by 4.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Lower bound on the smallest eigenvalue of `cov + i*Omega`.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Relative symmetry tolerance on the covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues at or above `1 - SEPARABILITY_TOL` count as separable.
pub const SEPARABILITY_TOL: f64 = 1e-9;

/// A Gaussian state of `n_modes` bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Wire form used by every JSON file: `{"n_modes", "mean", "cov"}` with a
/// row-major covariance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianStateJson {
    pub n_modes: usize,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl GaussianState {
    /// Validates shape, symmetry and the uncertainty principle.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::new_unchecked_physicality(mean, cov)?;
        let min_eigenvalue = linalg::uncertainty_min_eigenvalue(&state.cov);
        if min_eigenvalue < -PHYSICALITY_TOL {
            return Err(Error::Unphysical { min_eigenvalue });
        }
        Ok(state)
    }

    /// Shape and symmetry checks only. Used by channels whose output is
    /// physical by construction.
    pub(crate) fn new_unchecked_physicality(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::Dimension(format!(
                "covariance must be 2n x 2n with n >= 1, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != dim {
            return Err(Error::Dimension(format!("mean has length {}, expected {dim}", mean.len())));
        }
        if cov.iter().chain(mean.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entry".into()));
        }
        let scale = cov.amax().max(1.0);
        let asym = linalg::max_asymmetry(&cov);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    pub fn from_cov(cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        Self::new(DVector::zeros(dim), cov)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { mean: DVector::zeros(2 * n_modes), cov: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Single-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidArgument(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(Self { mean: DVector::zeros(2), cov: DMatrix::identity(2, 2) * (2.0 * nbar + 1.0) })
    }

    /// Coherent state with amplitude `alpha = (x + i p) / 2`.
    pub fn coherent(re: f64, im: f64) -> Self {
        Self { mean: DVector::from_vec(vec![2.0 * re, 2.0 * im]), cov: DMatrix::identity(2, 2) }
    }

    /// Squeezed vacuum with x variance `e^{-2r}` along the axis rotated by `angle`.
    pub fn squeezed_vacuum(r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = nalgebra::Matrix2::new(c, -s, s, c);
        let d = nalgebra::Matrix2::new((-2.0 * r).exp(), 0.0, 0.0, (2.0 * r).exp());
        let m = rot * d * rot.transpose();
        Self { mean: DVector::zeros(2), cov: DMatrix::from_fn(2, 2, |i, j| m[(i, j)]) }
    }

    /// Two-mode squeezed vacuum. The x quadratures are anticorrelated and the
    /// p quadratures correlated, so `x_A + x_B` and `p_A - p_B` are squeezed.
    pub fn tmsv(r: f64) -> Self {
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c, 0.0, -s, 0.0,
            0.0, c, 0.0, s,
            -s, 0.0, c, 0.0,
            0.0, s, 0.0, c,
        ]);
        Self { mean: DVector::zeros(4), cov }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(a + b, a + b);
        cov.view_mut((0, 0), (a, a)).copy_from(&self.cov);
        cov.view_mut((a, a), (b, b)).copy_from(&other.cov);
        let mean = DVector::from_iterator(a + b, self.mean.iter().chain(other.mean.iter()).copied());
        GaussianState { mean, cov }
    }

    pub fn product(factors: &[GaussianState]) -> Result<GaussianState> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Smallest eigenvalue of `cov + i*Omega`; negative means unphysical.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        linalg::uncertainty_min_eigenvalue(&self.cov)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.mean.iter().all(|&v| v == 0.0)
    }

    pub fn to_json(&self) -> GaussianStateJson {
        GaussianStateJson {
            n_modes: self.n_modes(),
            mean: self.mean.iter().copied().collect(),
            cov: self.cov.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }

    pub fn from_json(raw: &GaussianStateJson) -> Result<Self> {
        let dim = 2 * raw.n_modes;
        if raw.cov.len() != dim || raw.cov.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!("cov must be {dim}x{dim} for n_modes = {}", raw.n_modes)));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| raw.cov[i][j]);
        Self::new(DVector::from_vec(raw.mean.clone()), cov)
    }
}

impl Serialize for GaussianState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GaussianStateJson::deserialize(d)?;
        GaussianState::from_json(&raw).map_err(serde::de::Error::custom)
    }
}

/// Split of the modes into two disjoint, covering index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeBipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl ModeBipartition {
    pub fn new(left: Vec<usize>, right: Vec<usize>, n_modes: usize) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidArgument("both sides of a cut must be nonempty".into()));
        }
        let mut seen = vec![false; n_modes];
        for &m in left.iter().chain(right.iter()) {
            if m >= n_modes {
                return Err(Error::InvalidArgument(format!("mode {m} out of range 0..{n_modes}")));
            }
            if seen[m] {
                return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
            }
            seen[m] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("cut does not cover every mode".into()));
        }
        Ok(Self { left, right })
    }

    /// Mode `k` against all the others.
    pub fn one_vs_rest(k: usize, n_modes: usize) -> Result<Self> {
        let rest = (0..n_modes).filter(|&m| m != k).collect();
        Self::new(vec![k], rest, n_modes)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_modes(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

fn check_cut(state: &GaussianState, cut: &ModeBipartition) -> Result<()> {
    if cut.n_modes() != state.n_modes() {
        return Err(Error::InvalidArgument(format!(
            "cut covers {} modes but state has {}",
            cut.n_modes(),
            state.n_modes()
        )));
    }
    Ok(())
}

/// Williamson symplectic eigenvalues, ascending.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    let min_eigenvalue = state.uncertainty_min_eigenvalue();
    if min_eigenvalue < -PHYSICALITY_TOL {
        return Err(Error::Unphysical { min_eigenvalue });
    }
    linalg::symplectic_spectrum(&state.cov)
}

/// Marginal state on `modes` (in the given order).
pub fn reduce(state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    if modes.is_empty() {
        return Err(Error::InvalidArgument("empty mode set".into()));
    }
    let n = state.n_modes();
    let mut seen = vec![false; n];
    for &m in modes {
        if m >= n {
            return Err(Error::InvalidArgument(format!("mode {m} out of range 0..{n}")));
        }
        if seen[m] {
            return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
        }
        seen[m] = true;
    }
    let idx = linalg::quadrature_indices(modes);
    let cov = linalg::submatrix(&state.cov, &idx, &idx);
    let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| state.mean[i]));
    Ok(GaussianState { mean, cov })
}

/// Covariance matrix after transposing the right-hand side of the cut:
/// the p rows and columns of every right-side mode change sign.
pub fn partial_transpose(state: &GaussianState, cut: &ModeBipartition) -> Result<DMatrix<f64>> {
    check_cut(state, cut)?;
    let mut sign = DVector::from_element(state.cov.nrows(), 1.0);
    for &m in cut.right() {
        sign[2 * m + 1] = -1.0;
    }
    Ok(DMatrix::from_fn(state.cov.nrows(), state.cov.ncols(), |i, j| sign[i] * sign[j] * state.cov[(i, j)]))
}

/// Outcome of the positive-partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub min_nu: f64,
    pub separable: bool,
    /// True when one side holds a single mode, where PPT is also sufficient.
    pub conclusive: bool,
}

pub fn ppt_separable(state: &GaussianState, cut: &ModeBipartition) -> Result<PptResult> {
    let pt = partial_transpose(state, cut)?;
    let min_nu = linalg::symplectic_spectrum(&pt)?[0];
    Ok(PptResult {
        min_nu,
        separable: min_nu >= 1.0 - SEPARABILITY_TOL,
        conclusive: cut.left().len() == 1 || cut.right().len() == 1,
    })
}

/// A Gaussian state has a regular P function iff `cov >= identity`.
pub fn is_p_classical(state: &GaussianState) -> bool {
    let dim = state.cov.nrows();
    let shifted = &state.cov - DMatrix::identity(dim, dim);
    linalg::symmetric_eigenvalues(&shifted)[0] >= -PHYSICALITY_TOL
}

/// `Tr rho^2 = 1 / sqrt(det cov)`.
pub fn purity(state: &GaussianState) -> f64 {
    1.0 / state.cov.determinant().sqrt()
}
