//! Stokes parameters for polarization and for the joint two-DoF field.
//!
//! Polarization matrices act on `(V, H)`: `σ1 = |H)(H| - |V)(V|`, `σ2` is the
//! ±45° difference and `σ3` the circular one. The spatial set acts on
//! `(s0, s1)` with `s0` playing the role of H, and with `τ2`, `τ3` negated so
//! that the radial beam has `S = diag(1, 1, -1, 1)`.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{CoherenceMatrix4, Dof, C0};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polarization Pauli matrix `σ_j`, `j = 0..4`.
pub fn pauli(j: usize) -> Matrix2<Complex64> {
    match j {
        0 => Matrix2::identity(),
        1 => Matrix2::new(-ONE, C0, C0, ONE),
        2 => Matrix2::new(C0, ONE, ONE, C0),
        3 => Matrix2::new(C0, I, -I, C0),
        _ => panic!("Pauli index {j} out of range"),
    }
}

/// Spatial Pauli matrix `τ_k`, `k = 0..4`.
pub fn spatial_pauli(k: usize) -> Matrix2<Complex64> {
    match k {
        0 => Matrix2::identity(),
        1 => Matrix2::new(ONE, C0, C0, -ONE),
        2 => Matrix2::new(C0, -ONE, -ONE, C0),
        3 => Matrix2::new(C0, I, -I, C0),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// `σ_j ⊗ τ_k` in the field index layout `2 s + p`.
pub fn joint_pauli(j: usize, k: usize) -> Matrix4<Complex64> {
    let (s, t) = (pauli(j), spatial_pauli(k));
    Matrix4::from_fn(|r, c| t[(r / 2, c / 2)] * s[(r % 2, c % 2)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector(pub [f64; 4]);

impl StokesVector {
    pub fn new(s: [f64; 4]) -> Result<Self> {
        let v = Self(s);
        if s.iter().any(|x| !x.is_finite()) || v.s0() < v.vector_norm() - 1e-9 {
            return Err(Error::InvalidArgument(format!("not a Stokes vector: {s:?}")));
        }
        Ok(v)
    }

    pub fn unpolarized() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    pub fn horizontal() -> Self {
        Self([1.0, 1.0, 0.0, 0.0])
    }

    pub fn diagonal() -> Self {
        Self([1.0, 0.0, 1.0, 0.0])
    }

    pub fn circular() -> Self {
        Self([1.0, 0.0, 0.0, 1.0])
    }

    /// Stokes parameters `tr(X σ_j)` of a 2×2 polarization matrix.
    pub fn from_polarization_matrix(x: &Matrix2<Complex64>) -> Self {
        Self(std::array::from_fn(|j| (x * pauli(j)).trace().re))
    }

    pub fn polarization_matrix(&self) -> Matrix2<Complex64> {
        (0..4).map(|j| pauli(j).scale(0.5 * self.0[j])).fold(Matrix2::zeros(), |a, b| a + b)
    }

    pub fn s0(&self) -> f64 {
        self.0[0]
    }

    pub fn vector_norm(&self) -> f64 {
        self.0[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn degree_of_polarization(&self) -> f64 {
        if self.s0() > 0.0 {
            self.vector_norm() / self.s0()
        } else {
            0.0
        }
    }
}

/// Global polarization Stokes vector of a (not necessarily normalized) `Γ`.
pub fn polarization_stokes(gamma: &CoherenceMatrix4) -> StokesVector {
    StokesVector::from_polarization_matrix(&gamma.reduced(Dof::Polarization))
}

/// Table `S[j][k]` with `j` the polarization and `k` the spatial index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TDoFStokes(pub [[f64; 4]; 4]);

impl TDoFStokes {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[j][k]
    }

    /// `¼ Σ S_jk σ_j ⊗ τ_k`.
    pub fn to_coherence(&self) -> Result<CoherenceMatrix4> {
        if !(self.0[0][0] > 0.0) {
            return Err(Error::InvalidArgument("S00 must be positive".into()));
        }
        let mut m = Matrix4::zeros();
        for j in 0..4 {
            for k in 0..4 {
                m += joint_pauli(j, k).scale(0.25 * self.0[j][k]);
            }
        }
        CoherenceMatrix4::new(m)
    }
}

/// `tr(Γ σ_j ⊗ τ_k)` without normalization.
pub fn raw_tdof_stokes(gamma: &CoherenceMatrix4) -> TDoFStokes {
    let g = gamma.matrix();
    TDoFStokes(std::array::from_fn(|j| std::array::from_fn(|k| (g * joint_pauli(j, k)).trace().re)))
}

/// Two-DoF Stokes table of `Γ / tr Γ`; `S00 = 1`.
pub fn tdof_stokes(gamma: &CoherenceMatrix4) -> TDoFStokes {
    raw_tdof_stokes(&gamma.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector_fields::field::{SpatialBasis, TDoFField};

    fn is_pauli_triple(p: fn(usize) -> Matrix2<Complex64>) -> bool {
        (p(1) * p(2) - p(3) * I).norm() < 1e-15 && (1..4).all(|j| (p(j) * p(j) - Matrix2::identity()).norm() < 1e-15)
    }

    #[test]
    fn both_sets_are_right_handed() {
        assert!(is_pauli_triple(pauli));
        assert!(is_pauli_triple(spatial_pauli));
    }

    #[test]
    fn radial_beam_table_is_diagonal() {
        let s = tdof_stokes(&CoherenceMatrix4::pure(&TDoFField::radial()));
        let want = [1.0, 1.0, -1.0, 1.0];
        for j in 0..4 {
            for k in 0..4 {
                let w = if j == k { want[j] } else { 0.0 };
                assert!((s.get(j, k) - w).abs() < 1e-15, "S{j}{k} = {}", s.get(j, k));
            }
        }
    }

    #[test]
    fn fully_mixed_table() {
        let g = CoherenceMatrix4::new(Matrix4::identity().scale(0.25)).unwrap();
        let s = tdof_stokes(&g);
        for j in 0..4 {
            for k in 0..4 {
                let w = if j + k == 0 { 1.0 } else { 0.0 };
                assert!((s.get(j, k) - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn product_table_is_outer_product() {
        let h = [C0, ONE];
        let psi10 = [ONE, C0];
        let f = TDoFField::product(SpatialBasis::Hg, psi10, h).unwrap();
        let s = tdof_stokes(&CoherenceMatrix4::pure(&f));
        // Single-DoF expectations computed directly on the 2-vectors.
        let expect = |m: Matrix2<Complex64>, v: [Complex64; 2]| {
            let v = nalgebra::Vector2::from(v);
            (v.adjoint() * m * v)[0].re
        };
        for j in 0..4 {
            for k in 0..4 {
                let w = expect(pauli(j), h) * expect(spatial_pauli(k), psi10);
                assert!((s.get(j, k) - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stokes_vector_examples() {
        assert!(StokesVector::new([1.0, 0.6, 0.8, 0.0]).is_ok());
        assert!(StokesVector::new([1.0, 0.9, 0.8, 0.0]).is_err());
        let x = StokesVector::circular().polarization_matrix();
        let back = StokesVector::from_polarization_matrix(&x);
        assert_eq!(back, StokesVector::circular());
        assert!((StokesVector::horizontal().degree_of_polarization() - 1.0).abs() < 1e-15);
        let hx = StokesVector::horizontal().polarization_matrix();
        assert!((hx[(1, 1)].re - 1.0).abs() < 1e-15 && hx[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn table_inverts() {
        let f = TDoFField::new(
            SpatialBasis::Points,
            [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.7), ONE, Complex64::new(0.0, -0.4)],
        )
        .unwrap();
        let g = CoherenceMatrix4::pure(&f).normalized();
        let back = tdof_stokes(&g).to_coherence().unwrap();
        assert!((back.matrix() - g.matrix()).norm() < 1e-15);
    }
}
