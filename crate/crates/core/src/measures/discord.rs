//! Gaussian discord and the Gaussian ameliorated measurement-induced
//! disturbance (AMID), both optimized over pure general-dyne measurements.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::entropy::{single_mode_entropy_from_det, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::gaussian::{reduce, GaussianState};
use crate::linalg;
use crate::optimize::{multistart, MultistartPlan, NelderMeadOptions};

/// Bound on `|ln lambda|`; the edges stand in for homodyne detection.
pub const LN_LAMBDA_MAX: f64 = 15.0;
/// Negative results down to this value are roundoff and reported as 0.
pub const NEGATIVE_CLAMP: f64 = 1e-6;

/// Pure single-mode general-dyne measurement with seed covariance
/// `R(phi) diag(lambda, 1/lambda) R(phi)^T`.
///
/// `lambda = 1` is heterodyne; `lambda -> 0` measures the quadrature along
/// `phi` exactly (homodyne), `lambda -> inf` the conjugate one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeasurement {
    lambda: f64,
    phi: f64,
}

impl GaussianMeasurement {
    pub fn new(lambda: f64, phi: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("bad measurement seed ({lambda}, {phi})")));
        }
        Ok(Self { lambda, phi: phi.rem_euclid(PI) })
    }

    pub fn heterodyne() -> Self {
        Self { lambda: 1.0, phi: 0.0 }
    }

    /// Optimizer coordinates `(ln lambda, phi)`, clamped and wrapped into range.
    fn from_coords(ln_lambda: f64, phi: f64) -> Self {
        let t = ln_lambda.clamp(-LN_LAMBDA_MAX, LN_LAMBDA_MAX);
        Self { lambda: t.exp(), phi: phi.rem_euclid(PI) }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn seed_cov(&self) -> Matrix2<f64> {
        let (s, c) = self.phi.sin_cos();
        let rot = Matrix2::new(c, -s, s, c);
        rot * Matrix2::new(self.lambda, 0.0, 0.0, 1.0 / self.lambda) * rot.transpose()
    }
}

/// Which one-way discord to evaluate on a two-mode state `AB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscordDirection {
    /// `D<-`: mode B (index 1) is measured.
    Left,
    /// `D->`: mode A (index 0) is measured.
    Right,
}

impl DiscordDirection {
    fn measured_mode(self) -> usize {
        match self {
            DiscordDirection::Left => 1,
            DiscordDirection::Right => 0,
        }
    }
}

/// Covariance matrix of the unmeasured modes after measuring `measured_mode`,
/// `gamma_A - C (gamma_B + gamma_M)^{-1} C^T`. It does not depend on the outcome.
pub fn conditional_cm(state: &GaussianState, measured_mode: usize, meas: &GaussianMeasurement) -> Result<DMatrix<f64>> {
    let n = state.n_modes();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two modes".into()));
    }
    if measured_mode >= n {
        return Err(Error::InvalidArgument(format!("mode {measured_mode} out of range 0..{n}")));
    }
    let rest: Vec<usize> = (0..n).filter(|&m| m != measured_mode).collect();
    let ia = linalg::quadrature_indices(&rest);
    let ib = linalg::quadrature_indices(&[measured_mode]);
    let ga = linalg::submatrix(state.cov(), &ia, &ia);
    let c = linalg::submatrix(state.cov(), &ia, &ib);
    let gb = linalg::submatrix(state.cov(), &ib, &ib);
    let seed = meas.seed_cov();
    let sum = Matrix2::new(
        gb[(0, 0)] + seed[(0, 0)],
        gb[(0, 1)] + seed[(0, 1)],
        gb[(1, 0)] + seed[(1, 0)],
        gb[(1, 1)] + seed[(1, 1)],
    );
    let inv = sum.try_inverse().ok_or_else(|| Error::Numerical("singular gamma_B + gamma_M".into()))?;
    let inv = DMatrix::from_fn(2, 2, |i, j| inv[(i, j)]);
    let out = &ga - &c * inv * c.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

type Cov4 = [[f64; 4]; 4];

fn to_array(cov: &DMatrix<f64>) -> Cov4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = cov[(i, j)];
        }
    }
    out
}

/// Determinant of the conditional block of a two-mode covariance when the
/// quadrature pair starting at `b` is measured with `seed` and the pair at
/// `a` is kept. Inlined 2x2 algebra for the optimizer's inner loop.
fn conditional_det(g: &Cov4, a: usize, b: usize, seed: &Matrix2<f64>) -> f64 {
    let s00 = g[b][b] + seed[(0, 0)];
    let s01 = g[b][b + 1] + seed[(0, 1)];
    let s11 = g[b + 1][b + 1] + seed[(1, 1)];
    let det_s = s00 * s11 - s01 * s01;
    let (i00, i01, i11) = (s11 / det_s, -s01 / det_s, s00 / det_s);
    let c = [[g[a][b], g[a][b + 1]], [g[a + 1][b], g[a + 1][b + 1]]];
    let quad =
        |r: usize, q: usize| c[r][0] * (i00 * c[q][0] + i01 * c[q][1]) + c[r][1] * (i01 * c[q][0] + i11 * c[q][1]);
    let m00 = g[a][a] - quad(0, 0);
    let m01 = g[a][a + 1] - quad(0, 1);
    let m11 = g[a + 1][a + 1] - quad(1, 1);
    m00 * m11 - m01 * m01
}

/// Discord value together with the optimal measurement found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    pub value: f64,
    pub measurement: GaussianMeasurement,
}

fn require_two_modes(state: &GaussianState) -> Result<()> {
    if state.n_modes() != 2 {
        return Err(Error::Unsupported(format!("two-mode states only, got {} modes", state.n_modes())));
    }
    Ok(())
}

fn clamp_nonnegative(value: f64, what: &str) -> Result<f64> {
    if value < -NEGATIVE_CLAMP {
        return Err(Error::Numerical(format!("{what} came out negative ({value:e})")));
    }
    Ok(value.max(0.0))
}

fn discord_plan() -> MultistartPlan {
    MultistartPlan {
        bounds: vec![(-LN_LAMBDA_MAX, LN_LAMBDA_MAX), (0.0, PI)],
        grid: vec![vec![-12.0, -3.0, 0.0, 3.0, 12.0], vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]],
        random_starts: 4,
        seed: 0x5eed_d15c,
        step_fraction: 0.1,
        options: NelderMeadOptions::default(),
    }
}

/// One-way Gaussian discord of a two-mode state, in nats.
pub fn gaussian_discord(state: &GaussianState, direction: DiscordDirection) -> Result<f64> {
    Ok(gaussian_discord_detailed(state, direction)?.value)
}

pub fn gaussian_discord_detailed(state: &GaussianState, direction: DiscordDirection) -> Result<DiscordResult> {
    require_two_modes(state)?;
    let measured = direction.measured_mode();
    let kept = 1 - measured;
    let s_measured = von_neumann_entropy(&reduce(state, &[measured])?)?;
    let s_joint = von_neumann_entropy(state)?;

    let cov = to_array(state.cov());
    let (a, b) = (2 * kept, 2 * measured);
    let mut objective = |x: &[f64]| {
        let m = GaussianMeasurement::from_coords(x[0], x[1]);
        conditional_det(&cov, a, b, &m.seed_cov())
    };
    let best = multistart(&mut objective, &discord_plan());
    let measurement = GaussianMeasurement::from_coords(best.x[0], best.x[1]);
    let conditional = single_mode_entropy_from_det(best.value);
    let value = clamp_nonnegative(s_measured - s_joint + conditional, "discord")?;
    Ok(DiscordResult { value, measurement })
}

/// Discord of the cut `measured | rest` on a state with any number of modes,
/// with the single mode `measured` probed by a general-dyne measurement:
/// `S(measured) - S(all) + min S(rest | measured)`.
pub fn measured_mode_discord(state: &GaussianState, measured: usize) -> Result<f64> {
    if state.n_modes() == 2 && measured < 2 {
        let direction = if measured == 1 { DiscordDirection::Left } else { DiscordDirection::Right };
        return gaussian_discord(state, direction);
    }
    let s_measured = von_neumann_entropy(&reduce(state, &[measured])?)?;
    let s_joint = von_neumann_entropy(state)?;
    // validates the mode index
    conditional_cm(state, measured, &GaussianMeasurement::heterodyne())?;
    let mut objective = |x: &[f64]| {
        let m = GaussianMeasurement::from_coords(x[0], x[1]);
        conditional_cm(state, measured, &m)
            .and_then(|c| linalg::symplectic_spectrum(&c))
            .map(|nus| nus.into_iter().map(super::entropy::entropy_function).sum())
            .unwrap_or(f64::INFINITY)
    };
    let best = multistart(&mut objective, &discord_plan());
    clamp_nonnegative(s_measured - s_joint + best.value, "discord")
}

/// Two-way discord: the larger of the two one-way values.
pub fn two_way_discord(state: &GaussianState) -> Result<f64> {
    let left = gaussian_discord(state, DiscordDirection::Left)?;
    let right = gaussian_discord(state, DiscordDirection::Right)?;
    Ok(left.max(right))
}

/// Mutual information of the Gaussian outcome distribution when mode A is
/// measured with `ma` and mode B with `mb`.
pub fn gaussian_classical_information(
    state: &GaussianState,
    ma: &GaussianMeasurement,
    mb: &GaussianMeasurement,
) -> Result<f64> {
    require_two_modes(state)?;
    Ok(outcome_information(&to_array(state.cov()), &ma.seed_cov(), &mb.seed_cov()))
}

/// `ln det(Sigma_A) - ln det(Sigma_A - C Sigma_B^{-1} C^T)`, halved, with
/// `Sigma = gamma + gamma_MA (+) gamma_MB`.
fn outcome_information(cov: &Cov4, seed_a: &Matrix2<f64>, seed_b: &Matrix2<f64>) -> f64 {
    let mut sigma = *cov;
    for i in 0..2 {
        for j in 0..2 {
            sigma[i][j] += seed_a[(i, j)];
            sigma[i + 2][j + 2] += seed_b[(i, j)];
        }
    }
    let det_a = sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[1][0];
    let cond = conditional_det(&sigma, 0, 2, &Matrix2::zeros());
    0.5 * (det_a / cond).ln()
}

fn amid_plan() -> MultistartPlan {
    let t = vec![-12.0, 0.0, 12.0];
    let phi = vec![0.0, PI / 2.0];
    MultistartPlan {
        bounds: vec![(-LN_LAMBDA_MAX, LN_LAMBDA_MAX), (0.0, PI), (-LN_LAMBDA_MAX, LN_LAMBDA_MAX), (0.0, PI)],
        grid: vec![t.clone(), phi.clone(), t, phi],
        random_starts: 8,
        seed: 0xa41d,
        step_fraction: 0.1,
        options: NelderMeadOptions::default(),
    }
}

/// AMID value with the pair of local measurements that extracts the most
/// classical information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmidResult {
    pub value: f64,
    pub classical_information: f64,
    pub measurement_a: GaussianMeasurement,
    pub measurement_b: GaussianMeasurement,
}

/// Gaussian AMID: mutual information minus the largest classical mutual
/// information obtainable from local general-dyne measurements on both modes.
pub fn amid(state: &GaussianState) -> Result<f64> {
    Ok(amid_detailed(state)?.value)
}

pub fn amid_detailed(state: &GaussianState) -> Result<AmidResult> {
    require_two_modes(state)?;
    let cut = crate::gaussian::ModeBipartition::one_vs_rest(0, 2)?;
    let total = super::entropy::mutual_information(state, &cut)?;
    let cov = to_array(state.cov());
    let mut objective = |x: &[f64]| {
        let ma = GaussianMeasurement::from_coords(x[0], x[1]);
        let mb = GaussianMeasurement::from_coords(x[2], x[3]);
        -outcome_information(&cov, &ma.seed_cov(), &mb.seed_cov())
    };
    let best = multistart(&mut objective, &amid_plan());
    let classical = -best.value;
    let value = clamp_nonnegative(total - classical, "AMID")?;
    Ok(AmidResult {
        value,
        classical_information: classical,
        measurement_a: GaussianMeasurement::from_coords(best.x[0], best.x[1]),
        measurement_b: GaussianMeasurement::from_coords(best.x[2], best.x[3]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels;
    use crate::measures::entropy::entropy_function;

    fn correlated_thermal() -> GaussianState {
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            3.0, 0.0, 1.5, 0.0,
            0.0, 3.0, 0.0, 1.5,
            1.5, 0.0, 3.0, 0.0,
            0.0, 1.5, 0.0, 3.0,
        ]);
        GaussianState::from_cov(cov).unwrap()
    }

    #[test]
    fn conditional_cm_of_product_is_marginal() {
        let s = GaussianState::thermal(1.0).unwrap().tensor(&GaussianState::squeezed_vacuum(0.5, 0.2));
        let m = GaussianMeasurement::new(0.3, 1.0).unwrap();
        let c = conditional_cm(&s, 1, &m).unwrap();
        assert!((c - DMatrix::identity(2, 2) * 3.0).amax() < 1e-14);
    }

    #[test]
    fn heterodyne_reduces_conditional_det() {
        let s = GaussianState::tmsv(0.7);
        let c = conditional_cm(&s, 1, &GaussianMeasurement::heterodyne()).unwrap();
        let ga = reduce(&s, &[0]).unwrap();
        assert!(c.determinant() < ga.cov().determinant());
        // pure state and pure measurement leave a pure conditional state
        assert!((c.determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn homodyne_limit() {
        let s = correlated_thermal();
        // lambda -> inf sharpens the p measurement
        let m = GaussianMeasurement::new(LN_LAMBDA_MAX.exp(), 0.0).unwrap();
        let c = conditional_cm(&s, 1, &m).unwrap();
        let limit = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 3.0 - 1.5 * 1.5 / 3.0]);
        assert!((c - limit).amax() < 1e-5);
    }

    #[test]
    fn measurement_validation() {
        assert!(GaussianMeasurement::new(0.0, 0.0).is_err());
        assert!(GaussianMeasurement::new(f64::INFINITY, 0.0).is_err());
        let m = GaussianMeasurement::new(2.0, 4.0).unwrap();
        assert!((m.phi() - (4.0 - PI)).abs() < 1e-15);
        assert!((m.seed_cov().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_discord_is_entanglement_entropy() {
        for r in [0.2, 0.5, 1.0] {
            let s = GaussianState::tmsv(r);
            let want = entropy_function((2.0 * r).cosh());
            for dir in [DiscordDirection::Left, DiscordDirection::Right] {
                let d = gaussian_discord(&s, dir).unwrap();
                assert!((d - want).abs() < 1e-7, "r={r} {dir:?}: {d} vs {want}");
            }
        }
    }

    #[test]
    fn product_state_has_no_discord() {
        let s = GaussianState::thermal(2.0).unwrap().tensor(&GaussianState::squeezed_vacuum(0.8, 0.4));
        assert!(gaussian_discord(&s, DiscordDirection::Left).unwrap() < 1e-9);
        assert!(gaussian_discord(&s, DiscordDirection::Right).unwrap() < 1e-9);
        assert!(amid(&s).unwrap() < 1e-9);
    }

    #[test]
    fn correlated_thermal_has_discord() {
        let d = two_way_discord(&correlated_thermal()).unwrap();
        assert!(d > 1e-3);
    }

    #[test]
    fn discord_invariant_under_local_rotation() {
        let s = channels::beam_splitter(
            &channels::squeeze(&GaussianState::thermal(0.5).unwrap(), 0, 0.6, 0.0)
                .unwrap()
                .tensor(&GaussianState::thermal(1.5).unwrap()),
            0,
            1,
            0.6,
            0.3,
        )
        .unwrap();
        let base = gaussian_discord(&s, DiscordDirection::Left).unwrap();
        let rotated = channels::phase_rotate(&s, 1, 0.77).unwrap();
        let d = gaussian_discord(&rotated, DiscordDirection::Left).unwrap();
        assert!((base - d).abs() < 1e-6);
    }

    #[test]
    fn tmsv_amid_exceeds_entanglement_entropy() {
        let r = 1.0;
        let s = GaussianState::tmsv(r);
        let a = amid_detailed(&s).unwrap();
        // best local measurements are homodyne of the correlated quadratures
        let c = (2.0 * r).cosh();
        let homodyne = c.ln();
        assert!((a.classical_information - homodyne).abs() < 1e-5, "{}", a.classical_information);
        assert!(a.value > entropy_function(c));
    }

    #[test]
    fn measured_mode_discord_matches_two_mode_route() {
        let s = correlated_thermal();
        let a = measured_mode_discord(&s, 1).unwrap();
        let b = gaussian_discord(&s, DiscordDirection::Left).unwrap();
        assert_eq!(a, b);
        // an uncorrelated third mode changes nothing
        let s3 = s.tensor(&GaussianState::thermal(0.4).unwrap());
        let c = measured_mode_discord(&s3, 1).unwrap();
        assert!((c - b).abs() < 1e-6, "{c} vs {b}");
        assert!(measured_mode_discord(&s3, 2).unwrap() < 1e-6);
        assert!(measured_mode_discord(&s3, 3).is_err());
    }

    #[test]
    fn rejects_three_modes() {
        let s = GaussianState::vacuum(3);
        assert!(matches!(gaussian_discord(&s, DiscordDirection::Left), Err(Error::Unsupported(_))));
        assert!(matches!(amid(&s), Err(Error::Unsupported(_))));
    }
}
