//! Von Neumann and Rényi entropies of Gaussian states, in nats.

use crate::error::{Error, Result};
use crate::gaussian::{reduce, symplectic_eigenvalues, GaussianState, ModeBipartition};

/// Entropy of a single thermal mode with symplectic eigenvalue `nu`.
///
/// `nu` is clamped to 1 from below so roundoff on pure modes gives exactly 0.
pub fn entropy_function(nu: f64) -> f64 {
    let nu = nu.max(1.0);
    let plus = 0.5 * (nu + 1.0);
    let minus = 0.5 * (nu - 1.0);
    let tail = if minus > 0.0 { minus * minus.ln() } else { 0.0 };
    plus * plus.ln() - tail
}

pub fn von_neumann_entropy(state: &GaussianState) -> Result<f64> {
    Ok(symplectic_eigenvalues(state)?.into_iter().map(entropy_function).sum())
}

/// Entropy of a one-mode covariance block from its determinant.
pub(crate) fn single_mode_entropy_from_det(det: f64) -> f64 {
    entropy_function(det.max(1.0).sqrt())
}

/// Rényi-α entropy `ln(Tr rho^alpha) / (1 - alpha)`; α = 1 gives the von
/// Neumann entropy.
pub fn renyi_entropy(state: &GaussianState, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("Rényi order must be finite and > 0, got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return von_neumann_entropy(state);
    }
    let nus = symplectic_eigenvalues(state)?;
    let total = nus
        .into_iter()
        .map(|nu| {
            let nu = nu.max(1.0);
            // ln(((nu+1)^a - (nu-1)^a) / 2^a) without overflow
            let q = (nu - 1.0) / (nu + 1.0);
            alpha * ((nu + 1.0) / 2.0).ln() + (-q.powf(alpha)).ln_1p()
        })
        .sum::<f64>();
    Ok(total / (alpha - 1.0))
}

/// `S(left) + S(right) - S(all)`.
pub fn mutual_information(state: &GaussianState, cut: &ModeBipartition) -> Result<f64> {
    if cut.n_modes() != state.n_modes() {
        return Err(Error::InvalidArgument("cut does not match the state".into()));
    }
    let left = von_neumann_entropy(&reduce(state, cut.left())?)?;
    let right = von_neumann_entropy(&reduce(state, cut.right())?)?;
    Ok(left + right - von_neumann_entropy(state)?)
}

/// Rényi-2 analogue of [`mutual_information`].
pub fn renyi2_mutual_information(state: &GaussianState, cut: &ModeBipartition) -> Result<f64> {
    let left = renyi_entropy(&reduce(state, cut.left())?, 2.0)?;
    let right = renyi_entropy(&reduce(state, cut.right())?, 2.0)?;
    Ok(left + right - renyi_entropy(state, 2.0)?)
}
