//! Entropies and correlation quantifiers of Gaussian states.

pub mod discord;
pub mod entropy;
pub mod photon;
pub mod report;

pub use discord::{amid, conditional_cm, gaussian_discord, two_way_discord, DiscordDirection, GaussianMeasurement};
pub use entropy::{entropy_function, mutual_information, renyi_entropy, von_neumann_entropy};
pub use photon::{mid, photon_number_distribution, MidMethod, PhotonTable};
pub use report::{classify, Classification, CorrelationReport};
