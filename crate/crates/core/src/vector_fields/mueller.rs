//! Mueller matrices, their Jones (Cloude) decomposition, and single-shot
//! versus four-probe polarimetry.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::field::CoherenceMatrix4;
use super::stokes::{pauli, raw_tdof_stokes, StokesVector};
use crate::error::{Error, Result};
use crate::linalg::rank;

/// Tolerance on the smallest coherency eigenvalue, relative to `M00`.
pub const COHERENCY_TOL: f64 = 1e-9;

/// Sign pattern of the radial probe's Stokes table.
pub const RADIAL_SIGNS: [f64; 4] = [1.0, 1.0, -1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuellerMatrix(Matrix4<f64>);

/// One term `w J X J†` of a decomposed Mueller matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesTerm {
    pub weight: f64,
    pub jones: Matrix2<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MuellerJson {
    m: [[f64; 4]; 4],
}

impl MuellerMatrix {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("Mueller matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Ideal horizontal linear polarizer.
    pub fn polarizer_h() -> Self {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).fill(0.5);
        Self(m)
    }

    /// `diag(1, d, d, d)`.
    pub fn depolarizer(d: f64) -> Self {
        Self(Matrix4::from_diagonal(&Vector4::new(1.0, d, d, d)))
    }

    /// `M_jk = ½ tr(σ_j J σ_k J†)`.
    pub fn from_jones(j: &Matrix2<Complex64>) -> Self {
        let ja = j.adjoint();
        Self(Matrix4::from_fn(|r, c| 0.5 * (pauli(r) * j * pauli(c) * ja).trace().re))
    }

    /// Convex mixture of `1..=4` Jones matrices with Gaussian entries,
    /// scaled to `M00 = 1`.
    pub fn random_physical<R: Rng>(rng: &mut R) -> Self {
        let terms = rng.random_range(1..=4);
        let mut m = Matrix4::zeros();
        for _ in 0..terms {
            let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let j = Matrix2::new(draw(), draw(), draw(), draw());
            m += Self::from_jones(&j).0 * rng.random_range(0.05..1.0);
        }
        Self(m / m[(0, 0)])
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[(i, j)]))
    }

    /// Cloude coherency matrix `¼ Σ M_jk σ_j ⊗ σ_k^T`, with the row index
    /// `(a, c)` laid out as `2a + c`.
    pub fn coherency(&self) -> Matrix4<Complex64> {
        let mut h = Matrix4::zeros();
        for j in 0..4 {
            let sj = pauli(j);
            for k in 0..4 {
                let skt = pauli(k).transpose();
                let w = 0.25 * self.0[(j, k)];
                h += Matrix4::from_fn(|r, c| sj[(r / 2, c / 2)] * skt[(r % 2, c % 2)] * w);
            }
        }
        (h + h.adjoint()).unscale(2.0)
    }

    pub fn min_coherency_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.coherency()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_physical(&self) -> bool {
        self.min_coherency_eigenvalue() >= -COHERENCY_TOL * self.0[(0, 0)].abs().max(1.0)
    }

    /// Jones terms with `Σ w J X J†` reproducing the action on polarization
    /// matrices. Fails when the coherency matrix is not PSD.
    pub fn jones_terms(&self) -> Result<Vec<JonesTerm>> {
        let eig = SymmetricEigen::new(self.coherency());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -COHERENCY_TOL * self.0[(0, 0)].abs().max(1.0) {
            return Err(Error::UnphysicalMueller(min));
        }
        let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        Ok((0..4)
            .filter(|&i| eig.eigenvalues[i] > 1e-14 * max)
            .map(|i| {
                let v = eig.eigenvectors.column(i);
                JonesTerm { weight: 2.0 * eig.eigenvalues[i], jones: Matrix2::new(v[0], v[1], v[2], v[3]) }
            })
            .collect())
    }

    pub fn apply_stokes(&self, s: &StokesVector) -> [f64; 4] {
        let out = self.0 * Vector4::from(s.0);
        [out[0], out[1], out[2], out[3]]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MuellerJson { m: self.rows() }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: MuellerJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("Mueller JSON: {e}")))?;
        Self::from_rows(raw.m)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).amax()
    }
}

fn act_on_polarization(terms: &[JonesTerm], x: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    terms.iter().map(|t| (t.jones * x * t.jones.adjoint()).scale(t.weight)).fold(Matrix2::zeros(), |a, b| a + b)
}

/// Sends `Γ` through the object, acting on the polarization index only.
pub fn apply_mueller(gamma: &CoherenceMatrix4, m: &MuellerMatrix) -> Result<CoherenceMatrix4> {
    let terms = m.jones_terms()?;
    let g = gamma.matrix();
    let mut out = Matrix4::zeros();
    for t in &terms {
        let l =
            Matrix4::from_fn(|r, c| if r / 2 == c / 2 { t.jones[(r % 2, c % 2)] } else { Complex64::new(0.0, 0.0) });
        out += (l * g * l.adjoint()).scale(t.weight);
    }
    CoherenceMatrix4::new((out + out.adjoint()).unscale(2.0))
}

/// Reads the Mueller matrix off the two-DoF Stokes table of the output of a
/// unit-trace radial probe: `M_jk = S_jk λ_k`.
pub fn recover_mueller_single_shot(gamma_out: &CoherenceMatrix4) -> MuellerMatrix {
    let s = raw_tdof_stokes(gamma_out);
    MuellerMatrix(Matrix4::from_fn(|j, k| s.get(j, k) * RADIAL_SIGNS[k]))
}

/// Simulates one measurement per probe and solves the linear system
/// `S_out(α) = M S_in(α)` for the 16 entries of `M`.
pub fn conventional_polarimetry(m: &MuellerMatrix, probes: &[StokesVector]) -> Result<MuellerMatrix> {
    let p = DMatrix::from_fn(4, probes.len(), |i, a| probes[a].0[i]);
    let r = rank(&p, 1e-10);
    if r < 4 {
        return Err(Error::RankDeficient(r));
    }
    let terms = m.jones_terms()?;
    let n = probes.len();
    let mut a = DMatrix::zeros(4 * n, 16);
    let mut b = DVector::zeros(4 * n);
    for (alpha, probe) in probes.iter().enumerate() {
        let out = StokesVector::from_polarization_matrix(&act_on_polarization(&terms, &probe.polarization_matrix()));
        for j in 0..4 {
            let row = 4 * alpha + j;
            b[row] = out.0[j];
            for k in 0..4 {
                a[(row, 4 * j + k)] = probe.0[k];
            }
        }
    }
    let x = if n == 4 {
        a.lu().solve(&b).ok_or_else(|| Error::Numerical("singular polarimetry system".into()))?
    } else {
        a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Numerical(e.into()))?
    };
    Ok(MuellerMatrix(Matrix4::from_fn(|j, k| x[4 * j + k])))
}

/// Unpolarized, horizontal, +45° and right-circular probes.
pub fn standard_probes() -> [StokesVector; 4] {
    [StokesVector::unpolarized(), StokesVector::horizontal(), StokesVector::diagonal(), StokesVector::circular()]
}
