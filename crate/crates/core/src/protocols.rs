//! Entanglement distribution with a separable ancilla, and entanglement
//! generated at a beam splitter from a discordant but P-classical input.
//!
//! Mode labels: A = 0, B = 1, C = 2.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::{self, NoiseInjection};
use crate::error::{Error, Result};
use crate::gaussian::{is_p_classical, ppt_separable, reduce, GaussianState, ModeBipartition, PptResult};
use crate::linalg;
use crate::measures::discord::measured_mode_discord;
use crate::optimize::golden_section;
use crate::random_states::fmt_float;

const MODE_NAMES: [&str; 3] = ["A", "B", "C"];

/// Normalized Duan product
/// `Var(g x_a + x_b) Var(g p_a - p_b) / (g^2 + 1)^2`; values below 1
/// certify entanglement between modes `a` and `b`.
pub fn duan_value(state: &GaussianState, g: f64, a: usize, b: usize) -> Result<f64> {
    let n = state.n_modes();
    if a >= n || b >= n || a == b {
        return Err(Error::InvalidArgument(format!("need two distinct modes below {n}, got {a} and {b}")));
    }
    let cov = state.cov();
    let var = |coeffs: [(usize, f64); 2]| {
        let mut v = 0.0;
        for &(i, ci) in &coeffs {
            for &(j, cj) in &coeffs {
                v += ci * cj * cov[(i, j)];
            }
        }
        v
    };
    let vx = var([(2 * a, g), (2 * b, 1.0)]);
    let vp = var([(2 * a + 1, g), (2 * b + 1, -1.0)]);
    Ok(vx * vp / (g * g + 1.0).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainOptimum {
    pub g_opt: f64,
    pub value: f64,
    /// The minimum lies on an end of the search interval.
    pub at_boundary: bool,
}

/// Minimizes [`duan_value`] over `g` in `[g_min, g_max]`: a coarse scan
/// locates the best bracket, golden-section search refines it to 1e-8.
pub fn optimize_gain(state: &GaussianState, a: usize, b: usize, g_min: f64, g_max: f64) -> Result<GainOptimum> {
    if !(g_min.is_finite() && g_max.is_finite() && g_min < g_max) {
        return Err(Error::InvalidArgument(format!("bad gain range [{g_min}, {g_max}]")));
    }
    duan_value(state, g_min, a, b)?;
    let f = |g: f64| duan_value(state, g, a, b).expect("modes validated");
    const SCAN: usize = 64;
    let step = (g_max - g_min) / SCAN as f64;
    let (best_k, _) = (0..=SCAN).map(|k| (k, f(g_min + k as f64 * step))).fold((0, f64::INFINITY), |acc, (k, v)| {
        if v < acc.1 {
            (k, v)
        } else {
            acc
        }
    });
    let lo = g_min + best_k.saturating_sub(1) as f64 * step;
    let hi = (g_min + (best_k + 1) as f64 * step).min(g_max);
    let line = golden_section(f, lo, hi, 1e-8);
    let at_boundary = (line.x - g_min).abs() < 1e-7 || (g_max - line.x).abs() < 1e-7;
    Ok(GainOptimum { g_opt: line.x, value: line.value, at_boundary })
}

/// Separability and discord of one bipartition at one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRecord {
    /// For example `"C|AB"`.
    pub label: String,
    pub ppt: PptResult,
    /// Discord with the single mode on the left measured.
    pub discord: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub state: GaussianState,
    /// Every one-vs-rest cut, in mode order.
    pub cuts: Vec<CutRecord>,
    /// PPT test of the reduced A–B state.
    pub reduced_ab: PptResult,
}

impl Stage {
    fn new(name: &str, state: GaussianState) -> Result<Self> {
        let n = state.n_modes();
        let mut cuts = Vec::with_capacity(n);
        for k in 0..n {
            let cut = ModeBipartition::one_vs_rest(k, n)?;
            let rest: String = (0..n).filter(|&m| m != k).map(|m| MODE_NAMES[m]).collect();
            cuts.push(CutRecord {
                label: format!("{}|{}", MODE_NAMES[k], rest),
                ppt: ppt_separable(&state, &cut)?,
                discord: measured_mode_discord(&state, k)?,
            });
        }
        let ab = reduce(&state, &[0, 1])?;
        let reduced_ab = ppt_separable(&ab, &ModeBipartition::one_vs_rest(0, 2)?)?;
        Ok(Self { name: name.to_string(), state, cuts, reduced_ab })
    }

    pub fn cut(&self, mode: usize) -> &CutRecord {
        &self.cuts[mode]
    }

    pub fn entangled_cuts(&self) -> Vec<&str> {
        self.cuts.iter().filter(|c| !c.ppt.separable).map(|c| c.label.as_str()).collect()
    }
}

/// Full record of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub protocol: String,
    pub parameters: Vec<(String, f64)>,
    pub stages: Vec<Stage>,
    /// Duan test between A and B on the final state (distribution protocol).
    pub duan: Option<GainOptimum>,
}

impl ProtocolTrace {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn final_stage(&self) -> &Stage {
        self.stages.last().expect("traces always hold at least one stage")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace is serializable")
    }
}

// ---------------------------------------------------------------------------
// distribution by a separable ancilla

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionConfig {
    pub r: f64,
    /// Displacement variance; `None` means `2 (e^{2r} - 1)`.
    pub v_d: Option<f64>,
    pub eta_b: f64,
    pub gain_min: f64,
    pub gain_max: f64,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        Self { r: 0.5, v_d: None, eta_b: 0.5, gain_min: 0.0, gain_max: 3.0 }
    }
}

impl DistributionConfig {
    pub fn displacement_variance(&self) -> f64 {
        self.v_d.unwrap_or_else(|| 2.0 * ((2.0 * self.r).exp() - 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidArgument(format!("r must be >= 0, got {}", self.r)));
        }
        let v = self.displacement_variance();
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("displacement variance must be >= 0, got {v}")));
        }
        if !(0.0..=1.0).contains(&self.eta_b) {
            return Err(Error::InvalidArgument(format!("eta_b must lie in [0, 1], got {}", self.eta_b)));
        }
        if !(self.gain_min.is_finite() && self.gain_max.is_finite() && self.gain_min < self.gain_max) {
            return Err(Error::InvalidArgument(format!("bad gain range [{}, {}]", self.gain_min, self.gain_max)));
        }
        Ok(())
    }
}

/// Displacement covariance of the distribution protocol.
///
/// Two independent zero-mean Gaussian variables `d_x`, `d_p` of variance
/// `v_d` displace the modes as `p_A += d_p`, `x_B += √2 d_x`,
/// `p_B += √2 d_p`, `x_C += d_x`. In the order `(x_A, p_A, x_B, p_B, x_C, p_C)`:
///
/// ```text
///         | 0    0     0     0    0     0 |
///         | 0    1     0    √2    0     0 |
/// N = v_d | 0    0     2     0   √2     0 |
///         | 0   √2     0     2    0     0 |
///         | 0    0    √2     0    1     0 |
///         | 0    0     0     0    0     0 |
/// ```
pub fn distribution_noise(v_d: f64) -> Result<NoiseInjection> {
    let s = 2f64.sqrt();
    NoiseInjection::from_directions(6, &distribution_displacements(v_d, s))
}

fn distribution_displacements(v_d: f64, s: f64) -> Vec<(f64, DVector<f64>)> {
    vec![
        (v_d, DVector::from_vec(vec![0.0, 0.0, s, 0.0, 1.0, 0.0])),
        (v_d, DVector::from_vec(vec![0.0, 1.0, 0.0, s, 0.0, 0.0])),
    ]
}

/// Noise-free input: A squeezed in p, B vacuum, C squeezed in x.
pub fn distribution_input(r: f64) -> GaussianState {
    GaussianState::squeezed_vacuum(-r, 0.0)
        .tensor(&GaussianState::vacuum(1))
        .tensor(&GaussianState::squeezed_vacuum(r, 0.0))
}

/// Applies the two balanced splitters and the loss on B to any prepared
/// three-mode state; returns the state after BS1 and the final state.
pub fn distribution_pipeline(prepared: &GaussianState, eta_b: f64) -> Result<(GaussianState, GaussianState)> {
    let after_bs1 = channels::beam_splitter(prepared, 0, 2, 0.5, 0.0)?;
    let after_bs2 = channels::beam_splitter(&after_bs1, 1, 2, 0.5, 0.0)?;
    let out = channels::attenuate(&after_bs2, 1, eta_b)?;
    Ok((after_bs1, out))
}

pub fn run_distribution(config: &DistributionConfig) -> Result<ProtocolTrace> {
    config.validate()?;
    let noise = distribution_noise(config.displacement_variance())?;
    let prepared = channels::add_classical_noise(&distribution_input(config.r), &noise)?;
    let (after_bs1, out) = distribution_pipeline(&prepared, config.eta_b)?;
    let duan = optimize_gain(&out, 0, 1, config.gain_min, config.gain_max)?;
    Ok(ProtocolTrace {
        protocol: "distribute".into(),
        parameters: vec![
            ("r".into(), config.r),
            ("v_d".into(), config.displacement_variance()),
            ("eta_b".into(), config.eta_b),
            ("gain_min".into(), config.gain_min),
            ("gain_max".into(), config.gain_max),
        ],
        stages: vec![
            Stage::new("prepared", prepared)?,
            Stage::new("after_bs1", after_bs1)?,
            Stage::new("after_bs2", out)?,
        ],
        duan: Some(duan),
    })
}

/// One row of an `r` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub g_opt: f64,
    pub duan: f64,
    pub gain_at_boundary: bool,
    /// A|BC entangled after the first splitter.
    pub a_entangled_after_bs1: bool,
    /// C|AB PPT-separable at every stage.
    pub c_separable_throughout: bool,
}

pub fn distribution_sweep(template: &DistributionConfig, r_values: &[f64]) -> Result<Vec<SweepRow>> {
    r_values
        .iter()
        .map(|&r| {
            let trace = run_distribution(&DistributionConfig { r, ..template.clone() })?;
            let duan = trace.duan.expect("distribution traces carry a Duan result");
            Ok(SweepRow {
                r,
                g_opt: duan.g_opt,
                duan: duan.value,
                gain_at_boundary: duan.at_boundary,
                a_entangled_after_bs1: !trace.stages[1].cut(0).ppt.separable,
                c_separable_throughout: trace.stages.iter().all(|s| s.cut(2).ppt.separable),
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "r,g_opt,duan,gain_at_boundary,a_entangled_after_bs1,c_separable_throughout";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(row.r),
            fmt_float(row.g_opt),
            fmt_float(row.duan),
            row.gain_at_boundary,
            row.a_entangled_after_bs1,
            row.c_separable_throughout
        )
        .expect("writing to a String");
    }
    out
}

// ---------------------------------------------------------------------------
// entanglement from discord at a beam splitter

/// Input of the beam-splitter protocol. `A_in` is vacuum. `B_in` and `C`
/// start x-squeezed, `diag(1/a, a)` with `a = 2 nbar + 1`; a shared classical
/// displacement `d` of variance `a - 1/a` adds `d` to `x_B` and `-kappa d` to
/// `x_C`. `B_in` ends up exactly thermal with mean photon number `nbar`.
pub fn bs_discord_input(nbar: f64, noise_correlation: f64) -> Result<GaussianState> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidArgument(format!("nbar must be > 0, got {nbar}")));
    }
    if !(0.0..=1.0).contains(&noise_correlation) {
        return Err(Error::InvalidArgument(format!("noise correlation must lie in [0, 1], got {noise_correlation}")));
    }
    let a = 2.0 * nbar + 1.0;
    let base = GaussianState::vacuum(1)
        .tensor(&GaussianState::squeezed_vacuum(0.5 * a.ln(), 0.0))
        .tensor(&GaussianState::squeezed_vacuum(0.5 * a.ln(), 0.0));
    let u = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, -noise_correlation, 0.0]);
    let noise = NoiseInjection::from_directions(6, &[(a - 1.0 / a, u)])?;
    channels::add_classical_noise(&base, &noise)
}

/// Checks on the two splitter inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputCheck {
    pub a_in_p_classical: bool,
    pub b_in_p_classical: bool,
    /// Smallest eigenvalue of each local covariance; >= 1 means no squeezing.
    pub a_in_min_variance: f64,
    pub b_in_min_variance: f64,
}

pub fn check_bs_inputs(prepared: &GaussianState) -> Result<InputCheck> {
    let a = reduce(prepared, &[0])?;
    let b = reduce(prepared, &[1])?;
    Ok(InputCheck {
        a_in_p_classical: is_p_classical(&a),
        b_in_p_classical: is_p_classical(&b),
        a_in_min_variance: linalg::symmetric_eigenvalues(a.cov())[0],
        b_in_min_variance: linalg::symmetric_eigenvalues(b.cov())[0],
    })
}

pub fn run_bs_discord_entanglement(nbar: f64, noise_correlation: f64) -> Result<ProtocolTrace> {
    let prepared = bs_discord_input(nbar, noise_correlation)?;
    let out = channels::beam_splitter(&prepared, 0, 1, 0.5, 0.0)?;
    Ok(ProtocolTrace {
        protocol: "bs".into(),
        parameters: vec![("nbar".into(), nbar), ("noise_correlation".into(), noise_correlation)],
        stages: vec![Stage::new("prepared", prepared)?, Stage::new("after_bs", out)?],
        duan: None,
    })
}

/// Ensemble covariance estimated by sampling explicit displacements through
/// the distribution pipeline. Returns the estimate and the per-entry
/// standard error. Used as an independent check of the second-moment route.
pub fn distribution_monte_carlo(
    config: &DistributionConfig,
    samples: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    config.validate()?;
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let (_, noiseless) = distribution_pipeline(&distribution_input(config.r), config.eta_b)?;
    let sd = config.displacement_variance().sqrt();
    let dirs = distribution_displacements(1.0, 2f64.sqrt());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dim = 6;
    let mut sum = DVector::<f64>::zeros(dim);
    let mut sum_sq = DMatrix::<f64>::zeros(dim, dim);
    let mut sum_4 = DMatrix::<f64>::zeros(dim, dim);
    let input = distribution_input(config.r);
    for _ in 0..samples {
        let mut shift = DVector::<f64>::zeros(dim);
        for (_, u) in &dirs {
            let z: f64 = StandardNormal.sample(&mut rng);
            shift += u * (sd * z);
        }
        let displaced = channels::displace(&input, shift.as_slice())?;
        let (_, out) = distribution_pipeline(&displaced, config.eta_b)?;
        let m = out.mean();
        sum += m;
        let outer = m * m.transpose();
        sum_4 += outer.component_mul(&outer);
        sum_sq += outer;
    }
    let n = samples as f64;
    let mean = &sum / n;
    let second = &sum_sq / n;
    let sample_cov = (&second - &mean * mean.transpose()) * (n / (n - 1.0));
    let var_of_products = &sum_4 / n - second.component_mul(&second);
    let stderr = var_of_products.map(|v| (v.max(0.0) / n).sqrt());
    Ok((noiseless.cov() + sample_cov, stderr))
}
