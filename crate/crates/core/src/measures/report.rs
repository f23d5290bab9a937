//! All correlation quantifiers of a two-mode state in one record.

use serde::{Deserialize, Serialize};

use super::discord::{amid, gaussian_discord, DiscordDirection};
use super::entropy::mutual_information;
use super::photon::mid_adaptive;
use crate::error::{Error, Result};
use crate::gaussian::{is_p_classical, GaussianState, ModeBipartition};

/// Discord values below this count as zero when classifying.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Correlation class by one-way discords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Both discords vanish; for Gaussian states this means a product state.
    Product,
    /// Exactly one one-way discord vanishes.
    QC,
    /// Both one-way discords are positive.
    QQ,
}

pub fn classify(discord_left: f64, discord_right: f64) -> Classification {
    match (discord_left < CLASSIFY_TOL, discord_right < CLASSIFY_TOL) {
        (true, true) => Classification::Product,
        (false, false) => Classification::QQ,
        _ => Classification::QC,
    }
}

/// Cutoff control for the MID part of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidSettings {
    pub start_n_max: usize,
    pub cap_n_max: usize,
}

impl Default for MidSettings {
    fn default() -> Self {
        Self { start_n_max: 32, cap_n_max: 2048 }
    }
}

/// Correlation quantifiers of a two-mode state, in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    /// `D<-`, mode B measured.
    pub discord_left: f64,
    /// `D->`, mode A measured.
    pub discord_right: f64,
    pub discord_two_way: f64,
    /// `None` when the photon-number table could not hold enough mass.
    pub mid: Option<f64>,
    pub amid: f64,
    pub p_classical: bool,
    pub classification: Classification,
}

impl CorrelationReport {
    pub fn compute(state: &GaussianState) -> Result<Self> {
        Self::compute_with(state, MidSettings::default())
    }

    pub fn compute_with(state: &GaussianState, settings: MidSettings) -> Result<Self> {
        Self::build(state, Some(settings))
    }

    /// Everything except MID, which is left as `None`.
    pub fn compute_without_mid(state: &GaussianState) -> Result<Self> {
        Self::build(state, None)
    }

    fn build(state: &GaussianState, mid_settings: Option<MidSettings>) -> Result<Self> {
        if state.n_modes() != 2 {
            return Err(Error::Unsupported(format!("two-mode states only, got {} modes", state.n_modes())));
        }
        let cut = ModeBipartition::one_vs_rest(0, 2)?;
        let mutual_info = mutual_information(state, &cut)?.max(0.0);
        let discord_left = gaussian_discord(state, DiscordDirection::Left)?;
        let discord_right = gaussian_discord(state, DiscordDirection::Right)?;
        let mid = match mid_settings.map(|s| mid_adaptive(state, s.start_n_max, s.cap_n_max)) {
            None | Some(Err(Error::Truncation { .. })) => None,
            Some(Ok((v, _))) => Some(v.max(0.0)),
            Some(Err(e)) => return Err(e),
        };
        Ok(Self {
            mutual_info,
            discord_left,
            discord_right,
            discord_two_way: discord_left.max(discord_right),
            mid,
            amid: amid(state)?,
            p_classical: is_p_classical(state),
            classification: classify(discord_left, discord_right),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_report_is_zero() {
        let r = CorrelationReport::compute(&GaussianState::vacuum(2)).unwrap();
        assert_eq!(r.mutual_info, 0.0);
        assert!(r.discord_two_way < 1e-12);
        assert!(r.mid.unwrap().abs() < 1e-12);
        assert!(r.amid < 1e-12);
        assert!(r.p_classical);
        assert_eq!(r.classification, Classification::Product);
    }

    #[test]
    fn tmsv_report() {
        let r = CorrelationReport::compute(&GaussianState::tmsv(0.5)).unwrap();
        assert_eq!(r.classification, Classification::QQ);
        assert!(!r.p_classical);
        assert!((r.mutual_info - 2.0 * r.discord_left).abs() < 1e-6);
        assert!(r.amid > r.mid.unwrap());
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(classify(0.0, 1e-7), Classification::Product);
        assert_eq!(classify(0.1, 1e-7), Classification::QC);
        assert_eq!(classify(1e-7, 0.1), Classification::QC);
        assert_eq!(classify(0.1, 0.2), Classification::QQ);
    }
}
