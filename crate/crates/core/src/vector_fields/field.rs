//! Two-degree-of-freedom fields and their coherence measures.
//!
//! Amplitudes are stored as `[(s0,V), (s0,H), (s1,V), (s1,H)]`: the
//! polarization index varies fastest. The spatial labels are either two
//! points `x1, x2` or the Hermite-Gaussian pair `psi10, psi01`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialBasis {
    /// Two transverse points `x1, x2`.
    Points,
    /// First-order Hermite-Gaussian modes `psi10, psi01`.
    Hg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dof {
    Polarization,
    Spatial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TDoFField {
    basis: SpatialBasis,
    amps: Vector4<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    basis: SpatialBasis,
    amplitudes: [[f64; 2]; 4],
}

impl TDoFField {
    pub fn new(basis: SpatialBasis, amps: [Complex64; 4]) -> Result<Self> {
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("field amplitudes must be finite".into()));
        }
        let amps = Vector4::from(amps);
        if amps.norm() == 0.0 {
            return Err(Error::InvalidArgument("field has zero norm".into()));
        }
        Ok(Self { basis, amps })
    }

    pub fn from_real(basis: SpatialBasis, amps: [f64; 4]) -> Result<Self> {
        Self::new(basis, amps.map(|a| Complex64::new(a, 0.0)))
    }

    /// Product field `spatial ⊗ polarization`, with `spatial = (s0, s1)` and
    /// `polarization = (V, H)`.
    pub fn product(basis: SpatialBasis, spatial: [Complex64; 2], polarization: [Complex64; 2]) -> Result<Self> {
        let mut a = [C0; 4];
        for s in 0..2 {
            for p in 0..2 {
                a[2 * s + p] = spatial[s] * polarization[p];
            }
        }
        Self::new(basis, a)
    }

    /// Radially polarized beam `(psi10 H + psi01 V)/√2`.
    pub fn radial() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(SpatialBasis::Hg, [0.0, h, h, 0.0]).expect("nonzero")
    }

    /// Two beams at `x1`, `x2` with orthogonal polarizations V and H.
    pub fn two_point_bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(SpatialBasis::Points, [h, 0.0, 0.0, h]).expect("nonzero")
    }

    pub fn basis(&self) -> SpatialBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.amps[0], self.amps[1], self.amps[2], self.amps[3]]
    }

    /// `eps[s][p]`.
    pub fn amplitude_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.amps[0], self.amps[1], self.amps[2], self.amps[3])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalized(&self) -> Self {
        Self { basis: self.basis, amps: self.amps.unscale(self.amps.norm()) }
    }

    /// Applies a 2×2 matrix to the polarization index.
    pub fn apply_polarization(&self, u: &Matrix2<Complex64>) -> Result<Self> {
        let m = self.amplitude_matrix() * u.transpose();
        Self::new(self.basis, [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    }

    /// Applies a 2×2 matrix to the spatial index.
    pub fn apply_spatial(&self, u: &Matrix2<Complex64>) -> Result<Self> {
        let m = u * self.amplitude_matrix();
        Self::new(self.basis, [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    }

    pub fn to_json(&self) -> String {
        let amplitudes = self.amplitudes().map(|a| [a.re, a.im]);
        serde_json::to_string_pretty(&FieldJson { basis: self.basis, amplitudes }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FieldJson = serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("field JSON: {e}")))?;
        Self::new(raw.basis, raw.amplitudes.map(|[re, im]| Complex64::new(re, im)))
    }
}

/// Hermitian PSD matrix `Γ` on the four-dimensional field space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceMatrix4(Matrix4<Complex64>);

impl CoherenceMatrix4 {
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > 1e-12 * m.norm().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let m = (m + m.adjoint()).unscale(2.0);
        let min = min_eigenvalue(&m);
        if min < -1e-10 * m.trace().re.max(1.0) {
            return Err(Error::Unphysical { min_eigenvalue: min });
        }
        if !(m.trace().re > 0.0) {
            return Err(Error::InvalidArgument("coherence matrix has zero trace".into()));
        }
        Ok(Self(m))
    }

    pub fn pure(field: &TDoFField) -> Self {
        Self(field.amps * field.amps.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn normalized(&self) -> Self {
        Self(self.0.unscale(self.trace()))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        [e[0], e[1], e[2], e[3]]
    }

    /// Reduced 2×2 matrix of `dof`, tracing out the other one.
    pub fn reduced(&self, dof: Dof) -> Matrix2<Complex64> {
        let mut r = Matrix2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                r[(a, b)] = (0..2)
                    .map(|k| match dof {
                        Dof::Polarization => self.0[(2 * k + a, 2 * k + b)],
                        Dof::Spatial => self.0[(2 * a + k, 2 * b + k)],
                    })
                    .sum();
            }
        }
        r
    }
}

fn min_eigenvalue(m: &Matrix4<Complex64>) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `Σ w_k |ψ_k)(ψ_k|` for normalized copies of the fields.
pub fn coherence_matrix(fields: &[(f64, TDoFField)]) -> Result<CoherenceMatrix4> {
    if fields.is_empty() {
        return Err(Error::InvalidArgument("no fields given".into()));
    }
    if fields.iter().any(|(w, _)| !(*w >= 0.0)) {
        return Err(Error::InvalidArgument("weights must be non-negative".into()));
    }
    let total: f64 = fields.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
    }
    let m = fields
        .iter()
        .map(|(w, f)| CoherenceMatrix4::pure(&f.normalized()).0.scale(*w))
        .fold(Matrix4::zeros(), |acc, x| acc + x);
    CoherenceMatrix4::new(m)
}

fn purity_ratio(r: &Matrix2<Complex64>) -> f64 {
    let tr = r.trace().re;
    (r * r).trace().re / (tr * tr)
}

/// Linear-entropy entanglement `E`, from the reduced matrix of `dof`.
pub fn entanglement_degree(gamma: &CoherenceMatrix4, dof: Dof) -> f64 {
    let e2 = 2.0 * (1.0 - purity_ratio(&gamma.reduced(dof)));
    e2.clamp(0.0, 1.0).sqrt()
}

/// Degree of polarization `|S|/S0` of the reduced polarization matrix.
pub fn polarization_degree(gamma: &CoherenceMatrix4) -> f64 {
    let r = gamma.reduced(Dof::Polarization);
    let s1 = r[(1, 1)].re - r[(0, 0)].re;
    let s23 = 2.0 * r[(0, 1)].norm();
    (s1.hypot(s23) / r.trace().re).min(1.0)
}

/// Trace coherence `μ` between the two basis elements of `dof` and the
/// predictability `δ = (I1 - I2)/(I1 + I2)`.
pub fn coherence_and_predictability(gamma: &CoherenceMatrix4, dof: Dof) -> Result<(Complex64, f64)> {
    let r = gamma.reduced(dof);
    let (i1, i2) = (r[(0, 0)].re, r[(1, 1)].re);
    let scale = i1 + i2;
    if !(i1 > 1e-14 * scale) || !(i2 > 1e-14 * scale) {
        return Err(Error::InvalidArgument(format!("zero intensity on one element (I1 = {i1}, I2 = {i2})")));
    }
    Ok((r[(0, 1)] / (i1 * i2).sqrt(), (i1 - i2) / scale))
}

/// `|E² - (1 - δ²)(1 - |μ|²)|` with `E` from the polarization reduction and
/// `μ`, `δ` between the two spatial elements. Zero for pure fields.
pub fn verify_entanglement_identity(gamma: &CoherenceMatrix4) -> Result<f64> {
    let e = entanglement_degree(gamma, Dof::Polarization);
    let (mu, delta) = coherence_and_predictability(gamma, Dof::Spatial)?;
    Ok((e * e - (1.0 - delta * delta) * (1.0 - mu.norm_sqr())).abs())
}

/// Schmidt probabilities of the amplitude matrix, largest first.
pub fn schmidt_probabilities(field: &TDoFField) -> [f64; 2] {
    let m = field.amplitude_matrix();
    let e = SymmetricEigen::new(m * m.adjoint()).eigenvalues;
    let total = e[0] + e[1];
    let (a, b) = ((e[0] / total).max(0.0), (e[1] / total).max(0.0));
    if a >= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Schmidt weight `K = 1/Σλ²`, between 1 and 2.
pub fn schmidt_weight(field: &TDoFField) -> f64 {
    let [a, b] = schmidt_probabilities(field);
    1.0 / (a * a + b * b)
}

pub fn concurrence(field: &TDoFField) -> f64 {
    let m = field.amplitude_matrix();
    2.0 * m.determinant().norm() / field.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_like() -> TDoFField {
        TDoFField::from_real(SpatialBasis::Points, [0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap()
    }

    fn product() -> TDoFField {
        TDoFField::product(SpatialBasis::Points, [c(0.6), Complex64::new(0.0, 0.8)], [c(1.0), c(2.0)]).unwrap()
    }

    #[test]
    fn radial_gamma_is_bell_projector() {
        let g = coherence_matrix(&[(1.0, TDoFField::radial())]).unwrap();
        let m = g.matrix();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((m[(i, j)] - c(0.5)).norm() < 1e-15);
        }
        assert!((m.map(|z| z.norm()).sum() - 2.0).abs() < 1e-15);
        let e = g.eigenvalues();
        assert_eq!(e.iter().filter(|v| v.abs() > 1e-12).count(), 1);
    }

    #[test]
    fn orthogonal_product_mix_is_diagonal_rank_two() {
        let a = TDoFField::from_real(SpatialBasis::Points, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let b = TDoFField::from_real(SpatialBasis::Points, [0.0, 0.0, 0.0, 1.0]).unwrap();
        let g = coherence_matrix(&[(0.5, a), (0.5, b)]).unwrap();
        let d = Matrix4::from_diagonal(&Vector4::new(c(0.5), C0, C0, c(0.5)));
        assert!((g.matrix() - d).norm() < 1e-15);
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(TDoFField::from_real(SpatialBasis::Hg, [0.0; 4]).is_err());
        assert!(TDoFField::from_real(SpatialBasis::Hg, [f64::NAN, 0.0, 0.0, 1.0]).is_err());
        let f = TDoFField::radial();
        assert!(coherence_matrix(&[(0.7, f.clone())]).is_err());
        assert!(coherence_matrix(&[(1.5, f.clone()), (-0.5, f)]).is_err());
        assert!(coherence_matrix(&[]).is_err());
    }

    #[test]
    fn entanglement_examples() {
        let bell = coherence_matrix(&[(1.0, TDoFField::two_point_bell())]).unwrap();
        assert!((entanglement_degree(&bell, Dof::Polarization) - 1.0).abs() < 1e-12);
        let prod = CoherenceMatrix4::pure(&product());
        assert!(entanglement_degree(&prod, Dof::Polarization) < 1e-7);
        assert!(entanglement_degree(&prod, Dof::Spatial) < 1e-7);
        let g = CoherenceMatrix4::pure(&bell_like());
        assert!((entanglement_degree(&g, Dof::Polarization) - 0.8).abs() < 1e-12);
        assert!((entanglement_degree(&g, Dof::Spatial) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn polarization_degree_examples() {
        let radial = CoherenceMatrix4::pure(&TDoFField::radial());
        assert!(polarization_degree(&radial) < 1e-7);
        let h = TDoFField::product(SpatialBasis::Points, [c(1.0), c(1.0)], [C0, c(1.0)]).unwrap();
        assert!((polarization_degree(&CoherenceMatrix4::pure(&h)) - 1.0).abs() < 1e-12);
        assert!((polarization_degree(&CoherenceMatrix4::pure(&bell_like())) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn coherence_predictability_examples() {
        let same = TDoFField::product(SpatialBasis::Points, [c(1.0), c(1.0)], [c(0.3), c(0.7)]).unwrap();
        let (mu, delta) = coherence_and_predictability(&CoherenceMatrix4::pure(&same), Dof::Spatial).unwrap();
        assert!((mu.norm() - 1.0).abs() < 1e-12 && delta.abs() < 1e-12);

        let bell = CoherenceMatrix4::pure(&TDoFField::two_point_bell());
        let (mu, delta) = coherence_and_predictability(&bell, Dof::Spatial).unwrap();
        assert!(mu.norm() < 1e-15 && delta.abs() < 1e-15);

        let one = TDoFField::product(SpatialBasis::Points, [c(1.0), C0], [c(1.0), c(1.0)]).unwrap();
        assert!(coherence_and_predictability(&CoherenceMatrix4::pure(&one), Dof::Spatial).is_err());
    }

    #[test]
    fn identity_residual_vanishes_on_examples() {
        for f in [TDoFField::two_point_bell(), product(), bell_like()] {
            let r = verify_entanglement_identity(&CoherenceMatrix4::pure(&f)).unwrap();
            assert!(r < 1e-12, "{r}");
        }
    }

    #[test]
    fn schmidt_and_concurrence_examples() {
        assert!((schmidt_weight(&product()) - 1.0).abs() < 1e-12);
        assert!((schmidt_weight(&TDoFField::radial()) - 2.0).abs() < 1e-12);
        assert!((schmidt_weight(&bell_like()) - 1.0 / 0.68).abs() < 1e-12);
        assert!((concurrence(&TDoFField::radial()) - 1.0).abs() < 1e-15);
        assert!(concurrence(&product()) < 1e-15);
        assert!((concurrence(&bell_like()) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn local_operations_match_index_layout() {
        let f = bell_like();
        let swap = Matrix2::new(C0, c(1.0), c(1.0), C0);
        assert_eq!(f.apply_polarization(&swap).unwrap().amplitudes()[1], f.amplitudes()[0]);
        assert_eq!(f.apply_spatial(&swap).unwrap().amplitudes()[2], f.amplitudes()[0]);
    }

    #[test]
    fn json_round_trip() {
        let f = TDoFField::new(SpatialBasis::Hg, [c(1.0), Complex64::new(0.5, -0.25), C0, c(-2.0)]).unwrap();
        let s = f.to_json();
        assert!(s.contains("\"hg\""));
        assert_eq!(TDoFField::from_json(&s).unwrap(), f);
        assert!(TDoFField::from_json("{\"basis\": \"rings\", \"amplitudes\": []}").is_err());
    }
}
