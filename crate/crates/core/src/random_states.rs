//! Random mixed two-mode Gaussian states and the batch correlation scatter.
//!
//! Each state is `S diag(nu1, nu1, nu2, nu2) S^T` with `S = O1 Z O2`, where
//! `O1`, `O2` are passive (beam splitter and phase) transformations and `Z`
//! squeezes both modes. State `i` draws from its own ChaCha stream, so the
//! output does not depend on how the work is split between threads.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::SymplecticOp;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::measures::report::{CorrelationReport, MidSettings};

/// Environment variable that caps the number of worker threads.
pub const THREADS_ENV: &str = "CVCORR_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub count: usize,
    pub seed: u64,
    /// Symplectic eigenvalues are drawn from `[1, nu_max]`.
    pub nu_max: f64,
    /// Single-mode squeezing parameters are drawn from `[0, squeeze_max]`.
    pub squeeze_max: f64,
    /// `nu = 1 + (nu_max - 1) u^nu_skew` with `u` uniform; 1 is uniform,
    /// larger values favour nearly pure states.
    pub nu_skew: f64,
    pub compute_mid: bool,
    pub mid_cap: usize,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self { count: 1000, seed: 1, nu_max: 5.0, squeeze_max: 1.5, nu_skew: 6.0, compute_mid: true, mid_cap: 2048 }
    }
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("count must be positive".into()));
        }
        if !(self.nu_max >= 1.0) || !self.nu_max.is_finite() {
            return Err(Error::InvalidArgument(format!("nu_max must be >= 1, got {}", self.nu_max)));
        }
        if !(self.squeeze_max >= 0.0) || !self.squeeze_max.is_finite() {
            return Err(Error::InvalidArgument(format!("squeeze_max must be >= 0, got {}", self.squeeze_max)));
        }
        if !(self.nu_skew > 0.0) || !self.nu_skew.is_finite() {
            return Err(Error::InvalidArgument(format!("nu_skew must be > 0, got {}", self.nu_skew)));
        }
        Ok(())
    }

    /// Generator for state number `index`.
    pub fn rng_for(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// A drawn state with the symplectic eigenvalues used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomState {
    pub state: GaussianState,
    pub nu: [f64; 2],
}

fn random_passive<R: Rng>(rng: &mut R) -> SymplecticOp {
    let phase =
        |rng: &mut R, mode| SymplecticOp::phase_rotation(2, mode, rng.random_range(0.0..2.0 * PI)).expect("valid mode");
    let before = phase(rng, 0).compose(&phase(rng, 1));
    let t: f64 = rng.random_range(0.0..1.0);
    let bs = SymplecticOp::beam_splitter(2, 0, 1, t, rng.random_range(0.0..2.0 * PI)).expect("valid splitter");
    let after = phase(rng, 0).compose(&phase(rng, 1));
    after.compose(&bs).compose(&before)
}

pub fn random_state<R: Rng>(rng: &mut R, spec: &SamplerSpec) -> RandomState {
    let mut draw_nu = || 1.0 + (spec.nu_max - 1.0) * rng.random_range(0.0..1.0f64).powf(spec.nu_skew);
    let nu = [draw_nu(), draw_nu()];
    let o1 = random_passive(rng);
    let o2 = random_passive(rng);
    let mut draw_r = || if spec.squeeze_max > 0.0 { rng.random_range(0.0..spec.squeeze_max) } else { 0.0 };
    let (r1, r2) = (draw_r(), draw_r());
    let z = SymplecticOp::squeezer(2, 0, r1, 0.0)
        .and_then(|a| SymplecticOp::squeezer(2, 1, r2, 0.0).map(|b| a.compose(&b)))
        .expect("finite squeezing");
    let s = o1.compose(&z).compose(&o2);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![nu[0], nu[0], nu[1], nu[1]]));
    let cov = s.matrix() * d * s.matrix().transpose();
    let state = GaussianState::from_cov((&cov + cov.transpose()) * 0.5).expect("Williamson construction is physical");
    RandomState { state, nu }
}

/// One row of the scatter output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    pub index: usize,
    pub nu1: f64,
    pub nu2: f64,
    pub report: CorrelationReport,
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Draws `spec.count` states and evaluates every measure on each, using at
/// most `threads` workers (all cores when `None`). Records are ordered by index.
pub fn scatter(spec: &SamplerSpec, threads: Option<usize>) -> Result<Vec<ScatterRecord>> {
    spec.validate()?;
    let settings = MidSettings { cap_n_max: spec.mid_cap, ..MidSettings::default() };
    let one = |index: usize| -> Result<ScatterRecord> {
        let drawn = random_state(&mut spec.rng_for(index), spec);
        let report = if spec.compute_mid {
            CorrelationReport::compute_with(&drawn.state, settings)?
        } else {
            CorrelationReport::compute_without_mid(&drawn.state)?
        };
        Ok(ScatterRecord { index, nu1: drawn.nu[0], nu2: drawn.nu[1], report })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| (0..spec.count).into_par_iter().map(one).collect())
}

pub const CSV_HEADER: &str = "index,nu1,nu2,I,D_left,D_right,D_two_way,MID,AMID,p_classical";

/// Floats with 17 significant digits so values round-trip exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header row plus one line per record; a missing MID is an empty field.
pub fn scatter_csv(records: &[ScatterRecord]) -> String {
    let mut out = String::with_capacity(200 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in records {
        let r = &rec.report;
        let mid = r.mid.map(fmt_float).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            rec.index,
            fmt_float(rec.nu1),
            fmt_float(rec.nu2),
            fmt_float(r.mutual_info),
            fmt_float(r.discord_left),
            fmt_float(r.discord_right),
            fmt_float(r.discord_two_way),
            mid,
            fmt_float(r.amid),
            r.p_classical
        )
        .expect("writing to a String");
    }
    out
}
