//! Heating from fluctuating electric fields, and the per-mode comparison that
//! separates it from collapse-model heating: field noise couples to charge
//! (rate ~ q^2/m), collapse noise couples to mass and is charge-blind.

use crate::constants::HBAR;
use crate::csl::{csl_heating_extended_scaled, CslParams, HeatingRate};
use crate::modes::{equilibrium, Axis, ModeId, ModeSpectrum, TwoIonSystem};
use crate::species::Orientation;

/// Electric-field noise power spectral density per axis, in (V/m)^2/Hz,
/// evaluated at an angular frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpectrum {
    /// Frequency-independent density per axis.
    Flat { sx: f64, sy: f64, sz: f64 },
    /// Tabulated density; rows sorted by frequency (ordinary Hz), linear
    /// interpolation, clamped outside the table.
    Table {
        freqs_hz: Vec<f64>,
        sx: Vec<f64>,
        sy: Vec<f64>,
        sz: Vec<f64>,
    },
}

/// Spatial axis of the field component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldAxis {
    X,
    Y,
    Z,
}

impl NoiseSpectrum {
    pub fn flat(s: f64) -> Self {
        NoiseSpectrum::Flat {
            sx: s,
            sy: s,
            sz: s,
        }
    }

    pub fn value(&self, axis: FieldAxis, omega: f64) -> f64 {
        match self {
            NoiseSpectrum::Flat { sx, sy, sz } => match axis {
                FieldAxis::X => *sx,
                FieldAxis::Y => *sy,
                FieldAxis::Z => *sz,
            },
            NoiseSpectrum::Table {
                freqs_hz,
                sx,
                sy,
                sz,
            } => {
                let col = match axis {
                    FieldAxis::X => sx,
                    FieldAxis::Y => sy,
                    FieldAxis::Z => sz,
                };
                interp_clamped(freqs_hz, col, omega / (2.0 * std::f64::consts::PI))
            }
        }
    }
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.iter().position(|&xi| xi >= x) {
        Some(0) => ys[0],
        None => *ys.last().expect("table rows validated nonempty"),
        Some(i) => {
            let (x0, x1) = (xs[i - 1], xs[i]);
            let t = (x - x0) / (x1 - x0);
            ys[i - 1] + t * (ys[i] - ys[i - 1])
        }
    }
}

/// Electric-field heating of one mode. The printed two-ion rate sums
/// `q_i q_j / sqrt(m_i m_j)` over ion pairs with the density of the mode's
/// family evaluated at the mode frequency (axial: S_z, radial: S_x + S_y);
/// `mode_projected` additionally weights each pair by the eigenvector
/// components (the form that reduces to the textbook single-ion rate).
pub fn electrical_heating(
    system: &TwoIonSystem,
    spectrum: &ModeSpectrum,
    noise: &NoiseSpectrum,
    mode: ModeId,
    mode_projected: bool,
) -> HeatingRate {
    electrical_heating_scaled(system, spectrum, noise, mode, mode_projected, 1.0, 1.0)
}

fn electrical_heating_scaled(
    system: &TwoIonSystem,
    spectrum: &ModeSpectrum,
    noise: &NoiseSpectrum,
    mode: ModeId,
    mode_projected: bool,
    charge_scale: f64,
    mass_scale: f64,
) -> HeatingRate {
    let m = spectrum.mode(mode);
    let s_family = match mode.axis {
        Axis::Axial => noise.value(FieldAxis::Z, m.omega),
        Axis::Radial => noise.value(FieldAxis::X, m.omega) + noise.value(FieldAxis::Y, m.omega),
    };
    let q = [
        system.ion1().charge_c() * charge_scale,
        system.ion2().charge_c() * charge_scale,
    ];
    let mass = [
        system.ion1().mass_kg() * mass_scale,
        system.ion2().mass_kg() * mass_scale,
    ];
    let w = m.eigvec;

    let mut pair_sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let projection = if mode_projected { w[i] * w[j] } else { 1.0 };
            pair_sum += q[i] * q[j] / (mass[i] * mass[j]).sqrt() * projection;
        }
    }
    let power = 0.5 * s_family * pair_sum;
    HeatingRate {
        mode,
        power_w: power,
        quanta_per_s: power / (HBAR * m.omega),
    }
}

/// Per-mode comparison of collapse heating against field-noise heating,
/// with the scaling exponents that tell them apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComparison {
    pub mode: ModeId,
    pub p_csl_w: f64,
    pub p_electrical_w: f64,
    /// `p_csl / p_electrical`.
    pub ratio: f64,
    /// d ln P / d ln q with both charges scaled together (collapse: 0).
    pub csl_charge_exponent: f64,
    /// d ln P / d ln m with both masses scaled together (collapse: +1).
    pub csl_mass_exponent: f64,
    /// Field noise: +2.
    pub electrical_charge_exponent: f64,
    /// Field noise: -1.
    pub electrical_mass_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationReport {
    pub rows: [ModeComparison; 4],
}

/// Symmetric log-space finite difference of `ln p(scale)` around 1.
fn log_exponent(p: impl Fn(f64) -> f64) -> f64 {
    let c = 2.0_f64;
    let hi = p(c);
    let lo = p(1.0 / c);
    if hi == lo {
        // exactly scale-free (covers hi == lo == 0 as well)
        return 0.0;
    }
    (hi.ln() - lo.ln()) / (2.0 * c.ln())
}

/// Builds the four-mode discrimination table. Exponents are evaluated at
/// formula level: masses and charges fed to the rate formulas are scaled
/// while the mode structure stays frozen.
pub fn discrimination_report(
    system: &TwoIonSystem,
    spectrum: &ModeSpectrum,
    csl: &CslParams,
    noise: &NoiseSpectrum,
    orientation: Orientation,
    mode_projected: bool,
) -> DiscriminationReport {
    let eq = equilibrium(system);
    let rows = ModeId::ALL.map(|mode| {
        let p_csl =
            csl_heating_extended_scaled(system, &eq, spectrum, csl, mode, orientation, 1.0).power_w;
        let p_elec = electrical_heating(system, spectrum, noise, mode, mode_projected).power_w;

        let csl_mass = log_exponent(|s| {
            csl_heating_extended_scaled(system, &eq, spectrum, csl, mode, orientation, s).power_w
        });
        // the collapse rate has no charge input at all; scaling charges can
        // only ever reproduce the same number
        let csl_charge = log_exponent(|_| p_csl);
        let elec_charge = log_exponent(|s| {
            electrical_heating_scaled(system, spectrum, noise, mode, mode_projected, s, 1.0).power_w
        });
        let elec_mass = log_exponent(|s| {
            electrical_heating_scaled(system, spectrum, noise, mode, mode_projected, 1.0, s).power_w
        });

        ModeComparison {
            mode,
            p_csl_w: p_csl,
            p_electrical_w: p_elec,
            ratio: p_csl / p_elec,
            csl_charge_exponent: csl_charge,
            csl_mass_exponent: csl_mass,
            electrical_charge_exponent: elec_charge,
            electrical_mass_exponent: elec_mass,
        }
    });
    DiscriminationReport { rows }
}
