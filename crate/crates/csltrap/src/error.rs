use thiserror::Error;

use crate::modes::ModeId;

/// Physics-level failures: the request was well-formed but the configuration
/// does not support the computation (unconfined ion, misaligned crystal, ...).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("mass must be positive, got {0} kg")]
    NonPositiveMass(f64),

    #[error("charge must be nonzero")]
    ZeroCharge,

    #[error("ion charges must have the same sign for a Coulomb crystal")]
    OpposedCharges,

    #[error("ion {ion} is not axially confined: omega_z^2 = {omega_z_sq:.3e} <= 0")]
    AxialUnconfined { ion: usize, omega_z_sq: f64 },

    #[error("ion {ion} is not radially confined: q_x^2/2 + a = {pseudo:.3e} <= 0")]
    RadialUnconfined { ion: usize, pseudo: f64 },

    #[error(
        "crystal does not align on the trap axis (axial confinement too stiff relative to radial)"
    )]
    Misaligned,

    #[error("soft mode: squared frequency {omega_sq:.3e} <= 0 for {mode}")]
    SoftMode { mode: ModeId, omega_sq: f64 },

    #[error("zero motional coupling (Lamb-Dicke factor is 0); sideband readout impossible")]
    ZeroCoupling,

    #[error("heating rate vanishes for {mode} at every requested correlation length; no bound can be set")]
    DegenerateMode { mode: ModeId },

    #[error("r_C = {rc:.3e} m is not a grid point of both exclusion curves")]
    MissingRcEval { rc: f64 },

    #[error("scan base configuration fails its own feasibility flags: {0}")]
    InvalidBase(String),

    #[error("invalid scan grid: {0}")]
    InvalidScan(String),

    #[error("molecule must contain at least one ring")]
    EmptyMolecule,
}
