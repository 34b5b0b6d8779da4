//! Normal modes of a two-ion Coulomb crystal on the trap axis.
//!
//! Ion 1 is the light readout ion, ion 2 the heavy molecule. Because both sit
//! in the same static endcap potential, `m_i omega_{i,z}^2` is proportional to
//! the charge `q_i`, which fixes the equilibrium positions in closed form.
//! Small oscillations separate into an axial pair and a (doubly degenerate)
//! radial pair, each governed by a 2x2 mass-weighted stiffness matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{COULOMB, HBAR};
use crate::species::IonSpecies;
use crate::trap::{secular_frequencies_tagged, SecularFrequencies, TrapConfig};
use crate::PhysicsError;

/// A trap plus two ion species, with the single-ion secular frequencies
/// already resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoIonSystem {
    trap: TrapConfig,
    ion1: IonSpecies,
    ion2: IonSpecies,
    freqs1: SecularFrequencies,
    freqs2: SecularFrequencies,
}

impl TwoIonSystem {
    /// Fails if either ion is unconfined in this trap or the charges repel
    /// the trap rather than each other.
    pub fn new(trap: TrapConfig, ion1: IonSpecies, ion2: IonSpecies) -> Result<Self, PhysicsError> {
        if ion1.charge_c() * ion2.charge_c() <= 0.0 {
            return Err(PhysicsError::OpposedCharges);
        }
        let freqs1 = secular_frequencies_tagged(&trap, &ion1, 1)?;
        let freqs2 = secular_frequencies_tagged(&trap, &ion2, 2)?;
        Ok(TwoIonSystem {
            trap,
            ion1,
            ion2,
            freqs1,
            freqs2,
        })
    }

    pub fn trap(&self) -> &TrapConfig {
        &self.trap
    }

    pub fn ion1(&self) -> &IonSpecies {
        &self.ion1
    }

    pub fn ion2(&self) -> &IonSpecies {
        &self.ion2
    }

    pub fn freqs1(&self) -> SecularFrequencies {
        self.freqs1
    }

    pub fn freqs2(&self) -> SecularFrequencies {
        self.freqs2
    }

    /// `M = m2 / m1`.
    pub fn mass_ratio(&self) -> f64 {
        self.ion2.mass_kg() / self.ion1.mass_kg()
    }

    /// `Q = q2 / q1`.
    pub fn charge_ratio(&self) -> f64 {
        self.ion2.charge_c() / self.ion1.charge_c()
    }
}

/// Equilibrium positions along the trap axis, m. Ion 1 sits at positive z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub z1_m: f64,
    pub z2_m: f64,
    pub separation_m: f64,
}

/// Closed-form equilibrium:
/// `z1^3 = q1 q2 / (4 pi eps0 m1 omega_1z^2) * (1 + 1/Q)^-2`, `z2 = -z1/Q`.
pub fn equilibrium(system: &TwoIonSystem) -> Equilibrium {
    let q_ratio = system.charge_ratio();
    let w1z = system.freqs1.omega_z;
    let coulomb = COULOMB * system.ion1.charge_c() * system.ion2.charge_c();
    let z1 = (coulomb / (system.ion1.mass_kg() * w1z * w1z) / (1.0 + 1.0 / q_ratio).powi(2)).cbrt();
    let z2 = -z1 / q_ratio;
    Equilibrium {
        z1_m: z1,
        z2_m: z2,
        separation_m: z1 - z2,
    }
}

/// Whether the crystal prefers the axial arrangement: the reduced axial
/// stiffness must stay below the reduced radial stiffness,
/// `m1 m2 w1z^2 w2z^2 / (m1 w1z^2 + m2 w2z^2) < m1 m2 w1r^2 w2r^2 / (m1 w1r^2 + m2 w2r^2)`.
pub fn alignment_inequality(
    m1: f64,
    m2: f64,
    omega1z: f64,
    omega2z: f64,
    omega1r: f64,
    omega2r: f64,
) -> bool {
    let reduced = |wa: f64, wb: f64| {
        let (sa, sb) = (m1 * wa * wa, m2 * wb * wb);
        sa * sb / (sa + sb)
    };
    reduced(omega1z, omega2z) < reduced(omega1r, omega2r)
}

/// Axial alignment of the two-ion crystal in its trap.
pub fn alignment_check(system: &TwoIonSystem) -> bool {
    alignment_inequality(
        system.ion1.mass_kg(),
        system.ion2.mass_kg(),
        system.freqs1.omega_z,
        system.freqs2.omega_z,
        system.freqs1.omega_r,
        system.freqs2.omega_r,
    )
}

/// Mass-weighted stiffness matrix of the linearized crystal. Block-diagonal:
/// `(k11, k12, k22)` covers the axial pair, `(k33, k34, k44)` one radial
/// direction (x and y are degenerate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix {
    pub k11: f64,
    pub k12: f64,
    pub k22: f64,
    pub k33: f64,
    pub k34: f64,
    pub k44: f64,
}

/// Stiffness entries in closed form, in terms of the ratios `M`, `Q` and the
/// single-ion frequencies. Requires an axially aligned crystal.
pub fn stiffness(system: &TwoIonSystem) -> Result<StiffnessMatrix, PhysicsError> {
    if !alignment_check(system) {
        return Err(PhysicsError::Misaligned);
    }
    let m_ratio = system.mass_ratio();
    let q_ratio = system.charge_ratio();
    let w1z2 = system.freqs1.omega_z.powi(2);
    let w1r2 = system.freqs1.omega_r.powi(2);
    let w2r2 = system.freqs2.omega_r.powi(2);
    // 1/(1 + 1/Q): fraction of the Coulomb stiffness seen by ion 1
    let share = 1.0 / (1.0 + 1.0 / q_ratio);
    Ok(StiffnessMatrix {
        k11: w1z2 * (1.0 + 2.0 * share),
        k12: -2.0 * w1z2 * share / m_ratio.sqrt(),
        k22: w1z2 * (q_ratio / m_ratio) * (1.0 + 2.0 / (1.0 + q_ratio)),
        k33: w1r2 - w1z2 * share,
        k34: w1z2 * share / m_ratio.sqrt(),
        k44: w2r2 - w1z2 * share / m_ratio,
    })
}

/// Mode family: oscillation along the trap axis or transverse to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Axial,
    Radial,
}

/// Relative phase of the two ions in a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    InPhase,
    OutOfPhase,
}

/// One of the four motional modes of the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub axis: Axis,
    pub phase: Phase,
}

impl ModeId {
    pub const AXIAL_IN: ModeId = ModeId {
        axis: Axis::Axial,
        phase: Phase::InPhase,
    };
    pub const AXIAL_OUT: ModeId = ModeId {
        axis: Axis::Axial,
        phase: Phase::OutOfPhase,
    };
    pub const RADIAL_IN: ModeId = ModeId {
        axis: Axis::Radial,
        phase: Phase::InPhase,
    };
    pub const RADIAL_OUT: ModeId = ModeId {
        axis: Axis::Radial,
        phase: Phase::OutOfPhase,
    };

    pub const ALL: [ModeId; 4] = [
        Self::AXIAL_IN,
        Self::AXIAL_OUT,
        Self::RADIAL_IN,
        Self::RADIAL_OUT,
    ];

    /// Stable machine-readable name used in CSV columns and CLI flags.
    pub fn key(&self) -> &'static str {
        match (self.axis, self.phase) {
            (Axis::Axial, Phase::InPhase) => "axial_in",
            (Axis::Axial, Phase::OutOfPhase) => "axial_out",
            (Axis::Radial, Phase::InPhase) => "radial_in",
            (Axis::Radial, Phase::OutOfPhase) => "radial_out",
        }
    }

    pub fn parse_key(s: &str) -> Option<ModeId> {
        match s {
            "axial_in" | "axial-in" => Some(Self::AXIAL_IN),
            "axial_out" | "axial-out" => Some(Self::AXIAL_OUT),
            "radial_in" | "radial-in" => Some(Self::RADIAL_IN),
            "radial_out" | "radial-out" => Some(Self::RADIAL_OUT),
            _ => None,
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axis = match self.axis {
            Axis::Axial => "axial",
            Axis::Radial => "radial",
        };
        let phase = match self.phase {
            Phase::InPhase => "in-phase",
            Phase::OutOfPhase => "out-of-phase",
        };
        write!(f, "{axis} {phase}")
    }
}

/// One normal mode: frequency, mass-weighted eigenvector (ion-1, ion-2
/// components, second component positive), and spatial degeneracy (2 for
/// radial modes, one per transverse direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub id: ModeId,
    pub omega: f64,
    pub eigvec: [f64; 2],
    pub degeneracy: u8,
}

impl Mode {
    /// Phase classification read off the eigenvector signs.
    pub fn phase_by_sign(&self) -> Phase {
        if self.eigvec[0] * self.eigvec[1] > 0.0 {
            Phase::InPhase
        } else {
            Phase::OutOfPhase
        }
    }
}

/// The four motional modes, ordered axial in/out, radial in/out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub modes: [Mode; 4],
}

impl ModeSpectrum {
    pub fn mode(&self, id: ModeId) -> &Mode {
        self.modes
            .iter()
            .find(|m| m.id == id)
            .expect("all four modes are always present")
    }

    /// Modes whose in/out label (fixed by the eigenvalue branch) disagrees
    /// with the eigenvector-sign classification; callers should surface these.
    pub fn label_sign_mismatches(&self) -> Vec<ModeId> {
        self.modes
            .iter()
            .filter(|m| m.phase_by_sign() != m.id.phase)
            .map(|m| m.id)
            .collect()
    }
}

/// Eigenvalues of the symmetric 2x2 block `[[a, c], [c, b]]`, returned as
/// (low, high). The low eigenvalue comes from the determinant identity to
/// avoid cancellation.
fn eigenvalues_2x2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = ((a - b).powi(2) + 4.0 * c * c).sqrt();
    let hi = (a + b + disc) / 2.0;
    let lo = if hi != 0.0 {
        (a * b - c * c) / hi
    } else {
        (a + b - disc) / 2.0
    };
    (lo, hi)
}

/// Unit eigenvector of `[[a, c], [c, b]]` for eigenvalue `lam`, with the
/// better-conditioned component formula and the ion-2 component >= 0.
fn eigenvector_2x2(a: f64, b: f64, c: f64, lam: f64) -> [f64; 2] {
    let (x, y) = if (lam - b).abs() >= (lam - a).abs() {
        (lam - b, c)
    } else {
        (c, lam - a)
    };
    let n = x.hypot(y);
    let mut v = [x / n, y / n];
    if v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

/// Normal-mode spectrum from the 2x2 closed forms. The axial in-phase mode is
/// the lower axial root; the radial in-phase mode is the *higher* radial root
/// (for equal ions it is the center-of-mass mode at `omega_r`).
pub fn mode_spectrum(system: &TwoIonSystem) -> Result<ModeSpectrum, PhysicsError> {
    let k = stiffness(system)?;
    spectrum_from_stiffness(&k)
}

/// Spectrum assembly from an explicit stiffness matrix (axial functions never
/// touch the radial block and vice versa).
pub fn spectrum_from_stiffness(k: &StiffnessMatrix) -> Result<ModeSpectrum, PhysicsError> {
    let (ax_lo, ax_hi) = eigenvalues_2x2(k.k11, k.k22, k.k12);
    let (rad_lo, rad_hi) = eigenvalues_2x2(k.k33, k.k44, k.k34);

    let assignments = [
        (ModeId::AXIAL_IN, ax_lo, 1),
        (ModeId::AXIAL_OUT, ax_hi, 1),
        (ModeId::RADIAL_IN, rad_hi, 2),
        (ModeId::RADIAL_OUT, rad_lo, 2),
    ];
    for (id, w2, _) in assignments {
        if w2 <= 0.0 {
            return Err(PhysicsError::SoftMode {
                mode: id,
                omega_sq: w2,
            });
        }
    }

    let vec_for = |id: ModeId, w2: f64| match id.axis {
        Axis::Axial => eigenvector_2x2(k.k11, k.k22, k.k12, w2),
        Axis::Radial => eigenvector_2x2(k.k33, k.k44, k.k34, w2),
    };
    let modes = assignments.map(|(id, w2, degeneracy)| Mode {
        id,
        omega: w2.sqrt(),
        eigvec: vec_for(id, w2),
        degeneracy,
    });
    Ok(ModeSpectrum { modes })
}

/// Lamb-Dicke factor of `mode` for a laser of wavelength `wavelength_m`
/// addressing ion 1: `eta = (2 pi / lambda) |w_1| sqrt(hbar / (2 m1 omega))`.
pub fn lamb_dicke(spectrum: &ModeSpectrum, mode: ModeId, wavelength_m: f64, m1_kg: f64) -> f64 {
    let m = spectrum.mode(mode);
    let k = 2.0 * std::f64::consts::PI / wavelength_m;
    k * m.eigvec[0].abs() * (HBAR / (2.0 * m1_kg * m.omega)).sqrt()
}
