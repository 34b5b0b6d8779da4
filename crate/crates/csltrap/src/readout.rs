//! Sideband readout of a motional mode through the atomic ion: transfer the
//! mode quantum onto the optical qubit with a red-sideband pi-pulse, and keep
//! the off-resonant carrier excitation (a false positive) small.

use crate::modes::{lamb_dicke, ModeId, ModeSpectrum};
use crate::PhysicsError;

/// Excitation probability on the first red sideband after drive time `t`:
/// `sin^2(eta Omega0 t / 2)`.
pub fn sideband_prob(eta: f64, omega0: f64, t: f64) -> f64 {
    let s = (eta * omega0 * t / 2.0).sin();
    s * s
}

/// Peak of the off-resonant carrier Rabi oscillation when the drive is
/// detuned by a mode frequency `omega`: `Omega0^2 / (Omega0^2 + omega^2)`.
pub fn carrier_envelope(omega0: f64, omega: f64) -> f64 {
    omega0 * omega0 / (omega0 * omega0 + omega * omega)
}

/// Off-resonant carrier excitation probability at time `t`. The default
/// prefactor is the detuned-Rabi envelope `Omega0^2/(Omega0^2 + omega^2)`;
/// `strict_printed` instead reproduces a published variant with
/// `Omega0^2/sqrt(Omega0^2 + omega^2)`, which carries units of rad/s and is
/// kept only for traceability against that source.
pub fn carrier_prob(omega0: f64, omega: f64, t: f64, strict_printed: bool) -> f64 {
    let rabi = (omega0 * omega0 + omega * omega).sqrt();
    let prefactor = if strict_printed {
        omega0 * omega0 / rabi
    } else {
        carrier_envelope(omega0, omega)
    };
    let s = (rabi * t / 2.0).sin();
    prefactor * s * s
}

/// A sideband-readout plan for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutPlan {
    pub mode: ModeId,
    pub eta: f64,
    /// Pi-pulse duration on the sideband, s.
    pub tau_read_s: f64,
    /// Sideband excitation at `tau_read` (unity by construction).
    pub p_signal: f64,
    /// Worst-case carrier excitation during the pulse (the envelope).
    pub p_false: f64,
    pub discrimination: f64,
    pub feasible: bool,
}

/// Plans a red-sideband pi-pulse (`tau_read = pi / (eta Omega0)`) and scores
/// it against the carrier false-positive envelope. Feasible when
/// `p_signal / p_false >= min_discrimination`.
pub fn plan_readout(
    spectrum: &ModeSpectrum,
    mode: ModeId,
    wavelength_m: f64,
    m1_kg: f64,
    omega0: f64,
    min_discrimination: f64,
) -> Result<ReadoutPlan, PhysicsError> {
    let eta = lamb_dicke(spectrum, mode, wavelength_m, m1_kg);
    if eta == 0.0 {
        return Err(PhysicsError::ZeroCoupling);
    }
    let omega = spectrum.mode(mode).omega;
    let tau = std::f64::consts::PI / (eta * omega0);
    let p_false = carrier_envelope(omega0, omega);
    let discrimination = 1.0 / p_false;
    Ok(ReadoutPlan {
        mode,
        eta,
        tau_read_s: tau,
        p_signal: 1.0,
        p_false,
        discrimination,
        feasible: discrimination >= min_discrimination,
    })
}
