//! Classical entanglement between polarization and a two-element spatial
//! degree of freedom of one optical field.

pub mod field;
pub mod kinematics;
pub mod mueller;
pub mod stokes;

pub use field::{
    coherence_and_predictability, coherence_matrix, concurrence, entanglement_degree, polarization_degree,
    schmidt_probabilities, schmidt_weight, verify_entanglement_identity, CoherenceMatrix4, Dof, SpatialBasis,
    TDoFField,
};
pub use kinematics::{default_calibration, kinematic_sense, Calibration, KinematicReading, KnifeEdge};
pub use mueller::{
    apply_mueller, conventional_polarimetry, recover_mueller_single_shot, standard_probes, JonesTerm, MuellerMatrix,
};
pub use stokes::{polarization_stokes, raw_tdof_stokes, tdof_stokes, StokesVector, TDoFStokes};
