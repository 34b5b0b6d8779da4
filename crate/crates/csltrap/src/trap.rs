//! Single-ion physics of the linear Paul trap: Mathieu parameters, the first
//! stability region, and secular (pseudopotential) frequencies.
//!
//! Conventions: the RF drive is `V_rf cos(Omega t)` on the radial electrodes
//! at distance `r0`; the endcaps at distance `z0` carry a static `V_end`
//! screened by the geometric factor `kappa`. The dimensionless drive time is
//! `tau = Omega t / 2`, so one RF period spans `pi` in `tau`.

use serde::{Deserialize, Serialize};

use crate::species::IonSpecies;
use crate::PhysicsError;

/// Trap drive and geometry, SI units (`omega_rf` in rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Endcap screening factor, dimensionless.
    pub kappa: f64,
    /// RF drive angular frequency, rad/s.
    pub omega_rf: f64,
    /// Endcap distance from trap center, m.
    pub z0_m: f64,
    /// Radial electrode distance from trap axis, m.
    pub r0_m: f64,
    /// Endcap DC voltage, V.
    pub v_end: f64,
    /// RF amplitude, V.
    pub v_rf: f64,
}

impl TrapConfig {
    /// Experiment-friendly constructor: drive frequency in ordinary Hz,
    /// distances in mm.
    pub fn new(
        kappa: f64,
        omega_rf_hz: f64,
        z0_mm: f64,
        r0_mm: f64,
        v_end: f64,
        v_rf: f64,
    ) -> Self {
        TrapConfig {
            kappa,
            omega_rf: 2.0 * std::f64::consts::PI * omega_rf_hz,
            z0_m: z0_mm * 1e-3,
            r0_m: r0_mm * 1e-3,
            v_end,
            v_rf,
        }
    }
}

/// Operating point in the Mathieu stability chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuPoint {
    /// DC parameter `a = a_x = a_y`, set by the endcap potential.
    pub a: f64,
    /// RF parameter `q_x` (= -q_y).
    pub q: f64,
}

/// Axial and radial secular frequencies of a single trapped ion, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularFrequencies {
    pub omega_z: f64,
    pub omega_r: f64,
}

/// Why a point is (un)stable in the first region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityReason {
    Ok,
    /// `a >= 0`: no axial DC confinement for this charge sign.
    ANonNegative,
    /// `a <= a0(q)`: below the lower Mathieu boundary.
    BelowA0,
    /// `a >= b1(q)`: above the upper Mathieu boundary.
    AboveB1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub reason: StabilityReason,
}

/// Mathieu parameters of `ion` in `trap`:
/// `a = -4 q kappa V_end / (m z0^2 Omega^2)`, `q_x = 2 q V_rf / (m r0^2 Omega^2)`.
pub fn mathieu_params(trap: &TrapConfig, ion: &IonSpecies) -> MathieuPoint {
    let m = ion.mass_kg();
    let q = ion.charge_c();
    let om2 = trap.omega_rf * trap.omega_rf;
    MathieuPoint {
        a: -4.0 * q * trap.kappa * trap.v_end / (m * trap.z0_m * trap.z0_m * om2),
        q: 2.0 * q * trap.v_rf / (m * trap.r0_m * trap.r0_m * om2),
    }
}

/// Secular frequencies in the pseudopotential approximation:
/// `omega_z = sqrt(2 q kappa V_end / (m z0^2))`,
/// `omega_r = (Omega/2) sqrt(q_x^2/2 + a)`.
pub fn secular_frequencies(
    trap: &TrapConfig,
    ion: &IonSpecies,
) -> Result<SecularFrequencies, PhysicsError> {
    secular_frequencies_tagged(trap, ion, 0)
}

/// Same as [`secular_frequencies`] but labels errors with an ion index for
/// two-ion diagnostics.
pub(crate) fn secular_frequencies_tagged(
    trap: &TrapConfig,
    ion: &IonSpecies,
    ion_index: usize,
) -> Result<SecularFrequencies, PhysicsError> {
    let wz2 =
        2.0 * ion.charge_c() * trap.kappa * trap.v_end / (ion.mass_kg() * trap.z0_m * trap.z0_m);
    if wz2 <= 0.0 {
        return Err(PhysicsError::AxialUnconfined {
            ion: ion_index,
            omega_z_sq: wz2,
        });
    }
    let p = mathieu_params(trap, ion);
    let pseudo = p.q * p.q / 2.0 + p.a;
    if pseudo <= 0.0 {
        return Err(PhysicsError::RadialUnconfined {
            ion: ion_index,
            pseudo,
        });
    }
    Ok(SecularFrequencies {
        omega_z: wz2.sqrt(),
        omega_r: trap.omega_rf / 2.0 * pseudo.sqrt(),
    })
}

/// Trap anisotropy parameter
/// `eps^2 = q V_rf^2 z0^2 / (4 Omega^2 m r0^4 kappa V_end)`,
/// which satisfies `omega_r = sqrt(eps^2 - 1/2) omega_z` exactly.
pub fn epsilon_squared(trap: &TrapConfig, ion: &IonSpecies) -> f64 {
    ion.charge_c() * trap.v_rf * trap.v_rf * trap.z0_m * trap.z0_m
        / (4.0
            * trap.omega_rf
            * trap.omega_rf
            * ion.mass_kg()
            * trap.r0_m.powi(4)
            * trap.kappa
            * trap.v_end)
}

/// Series expansions of the first-region stability boundaries `a0(q)` (lower)
/// and `b1(q)` (upper), valid for `|q|` up to about 1.
pub fn stability_boundaries(q: f64) -> (f64, f64) {
    let q2 = q * q;
    let a0 = -q2 / 2.0 + 7.0 * q2 * q2 / 128.0 - 29.0 * q2 * q2 * q2 / 2304.0
        + 68687.0 * q2 * q2 * q2 * q2 / 18874368.0;
    let b1 = 1.0 - q - q2 / 8.0 + q2 * q / 64.0 - q2 * q2 / 1536.0 - 11.0 * q2 * q2 * q / 36864.0;
    (a0, b1)
}

/// First-region verdict for a positively confined ion: stable iff
/// `a < 0`, `a > a0(q)`, `a < b1(q)`. The boundaries are even in `q`; the
/// expansions are evaluated at `|q|`.
pub fn stability_classify(point: MathieuPoint) -> StabilityVerdict {
    let (a0, b1) = stability_boundaries(point.q.abs());
    if point.a >= 0.0 {
        StabilityVerdict {
            stable: false,
            reason: StabilityReason::ANonNegative,
        }
    } else if point.a <= a0 {
        StabilityVerdict {
            stable: false,
            reason: StabilityReason::BelowA0,
        }
    } else if point.a >= b1 {
        StabilityVerdict {
            stable: false,
            reason: StabilityReason::AboveB1,
        }
    } else {
        StabilityVerdict {
            stable: true,
            reason: StabilityReason::Ok,
        }
    }
}

/// Default amplitude beyond which a Mathieu trajectory counts as unbounded.
pub const DEFAULT_AMPLITUDE_THRESHOLD: f64 = 1e3;

/// Result of direct integration of the Mathieu equation
/// `rho'' + (a - 2 q cos 2 tau) rho = 0` from `rho(0) = 1`, `rho'(0) = 0`.
#[derive(Debug, Clone)]
pub struct MathieuTrace {
    pub bounded: bool,
    pub max_amplitude: f64,
    /// `(tau, rho)` at every accepted step (truncated on early exit).
    pub samples: Vec<(f64, f64)>,
}

/// Integrates the Mathieu equation with fixed-step RK4 over `n_periods` RF
/// periods (`pi` each in `tau`) and the default amplitude threshold.
pub fn mathieu_integrate(
    point: MathieuPoint,
    n_periods: u32,
    samples_per_period: u32,
) -> MathieuTrace {
    mathieu_integrate_with_threshold(
        point,
        n_periods,
        samples_per_period,
        DEFAULT_AMPLITUDE_THRESHOLD,
    )
}

/// Same with an explicit amplitude threshold; integration stops early once
/// `|rho|` exceeds it (the trajectory is then reported unbounded).
pub fn mathieu_integrate_with_threshold(
    point: MathieuPoint,
    n_periods: u32,
    samples_per_period: u32,
    threshold: f64,
) -> MathieuTrace {
    let steps = (n_periods as usize) * (samples_per_period as usize);
    let h = std::f64::consts::PI / samples_per_period as f64;
    let accel = |tau: f64, rho: f64| -(point.a - 2.0 * point.q * (2.0 * tau).cos()) * rho;

    let (mut rho, mut v) = (1.0_f64, 0.0_f64);
    let mut max_amp = 1.0_f64;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, rho));

    for i in 0..steps {
        let tau = i as f64 * h;
        let (k1r, k1v) = (v, accel(tau, rho));
        let (k2r, k2v) = (v + 0.5 * h * k1v, accel(tau + 0.5 * h, rho + 0.5 * h * k1r));
        let (k3r, k3v) = (v + 0.5 * h * k2v, accel(tau + 0.5 * h, rho + 0.5 * h * k2r));
        let (k4r, k4v) = (v + h * k3v, accel(tau + h, rho + h * k3r));
        rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        let tau_next = (i + 1) as f64 * h;
        samples.push((tau_next, rho));
        if !rho.is_finite() || rho.abs() > max_amp {
            max_amp = rho.abs();
        }
        if !rho.is_finite() || max_amp > threshold {
            return MathieuTrace {
                bounded: false,
                max_amplitude: max_amp,
                samples,
            };
        }
    }
    MathieuTrace {
        bounded: true,
        max_amplitude: max_amp,
        samples,
    }
}
