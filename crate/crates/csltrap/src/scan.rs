//! Parameter scans around a base configuration. One variable is swept while
//! everything else stays at its base value; each grid point records
//! feasibility flags (gray regions), the four mode frequencies, the motional
//! coupling per mode, and the exclusion strength relative to the base setup.

use std::array;
use std::fmt;

use crate::config::{log_grid, RunConfig};
use crate::csl::{exclusion_bound, lambda_rel, reference_power, ExclusionCurve};
use crate::modes::{alignment_check, lamb_dicke, mode_spectrum, ModeId, TwoIonSystem};
use crate::species::{build_porphyrin_barrel, make_point_ion, IonSpecies, Orientation};
use crate::trap::{mathieu_params, secular_frequencies, stability_classify, TrapConfig};
use crate::PhysicsError;

/// Quantity being swept. Ratio sweeps treat the second ion as a point
/// species (total mass, total charge) since a fixed internal structure has no
/// meaning across a continuous mass or charge range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanVariable {
    /// Endcap voltage, V.
    VEnd,
    /// RF amplitude, V.
    VRf,
    /// m2 / m1.
    MassRatio,
    /// q2 / q1.
    ChargeRatio,
    /// Ring count of the molecular barrel (integer-valued grid).
    NRings,
}

impl ScanVariable {
    pub const ALL: [ScanVariable; 5] = [
        ScanVariable::VEnd,
        ScanVariable::VRf,
        ScanVariable::MassRatio,
        ScanVariable::ChargeRatio,
        ScanVariable::NRings,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ScanVariable::VEnd => "v_end",
            ScanVariable::VRf => "v_rf",
            ScanVariable::MassRatio => "mass_ratio",
            ScanVariable::ChargeRatio => "charge_ratio",
            ScanVariable::NRings => "n_rings",
        }
    }

    pub fn parse_key(s: &str) -> Option<ScanVariable> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        ScanVariable::ALL.into_iter().find(|v| v.key() == norm)
    }

    fn point_like(self) -> bool {
        matches!(self, ScanVariable::MassRatio | ScanVariable::ChargeRatio)
    }
}

impl fmt::Display for ScanVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A validated sweep: the variable and its grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub values: Vec<f64>,
}

impl ScanSpec {
    pub fn new(variable: ScanVariable, values: Vec<f64>) -> Result<Self, PhysicsError> {
        if values.is_empty() {
            return Err(PhysicsError::InvalidScan("needs at least one value".into()));
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(PhysicsError::InvalidScan(format!("non-finite value {v}")));
            }
            match variable {
                ScanVariable::NRings => {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(PhysicsError::InvalidScan(format!(
                            "n_rings values must be integers >= 1, got {v}"
                        )));
                    }
                }
                _ => {
                    if v <= 0.0 {
                        return Err(PhysicsError::InvalidScan(format!(
                            "{} values must be > 0, got {v}",
                            variable.key()
                        )));
                    }
                }
            }
        }
        Ok(ScanSpec { variable, values })
    }

    /// Log-spaced values from `center / factor` to `center * factor`; `n`
    /// must be odd so the center value sits exactly on the grid.
    pub fn span_about(
        variable: ScanVariable,
        center: f64,
        factor: f64,
        n: usize,
    ) -> Result<Self, PhysicsError> {
        if n < 3 || n % 2 == 0 {
            return Err(PhysicsError::InvalidScan(format!(
                "centered grid needs an odd point count >= 3, got {n}"
            )));
        }
        if !(center > 0.0) || !(factor > 1.0) {
            return Err(PhysicsError::InvalidScan(format!(
                "centered grid needs center > 0 and factor > 1, got {center} and {factor}"
            )));
        }
        let half = (n - 1) as i32 / 2;
        let step = factor.powf(1.0 / half as f64);
        let values = (0..n as i32)
            .map(|i| {
                if i == half {
                    center
                } else {
                    center * step.powi(i - half)
                }
            })
            .collect();
        ScanSpec::new(variable, values)
    }

    /// The default grid for each variable: two decades centered on the base
    /// value for the voltages (wide enough to chart the instability regions),
    /// `[0.1, 100]` for the ratios, rings 1 through 10.
    pub fn default_for(variable: ScanVariable, base: &RunConfig) -> Result<Self, PhysicsError> {
        match variable {
            ScanVariable::VEnd => ScanSpec::span_about(variable, base.trap.v_end, 10.0, 41),
            ScanVariable::VRf => ScanSpec::span_about(variable, base.trap.v_rf, 10.0, 41),
            ScanVariable::MassRatio | ScanVariable::ChargeRatio => {
                ScanSpec::new(variable, log_grid(0.1, 100.0, 31))
            }
            ScanVariable::NRings => ScanSpec::new(variable, (1..=10).map(|n| n as f64).collect()),
        }
    }
}

/// Feasibility flags for one grid point; a false flag grays the point out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanFlags {
    /// Ion 1 is Mathieu-stable and confined on all axes.
    pub stable1: bool,
    /// Same for ion 2.
    pub stable2: bool,
    /// The crystal aligns on the trap axis.
    pub aligned: bool,
    /// A normal mode has a non-positive squared frequency.
    pub soft_mode: bool,
}

impl ScanFlags {
    pub fn all_good(&self) -> bool {
        self.stable1 && self.stable2 && self.aligned && !self.soft_mode
    }
}

/// One grid point of a scan. Quantities that need a normal-mode spectrum are
/// absent on infeasible points; `lambda_rel[i] > 1` means this point bounds
/// the collapse rate more tightly than the base configuration does for mode
/// `ModeId::ALL[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub value: f64,
    pub flags: ScanFlags,
    /// Mode angular frequencies, ordered as [`ModeId::ALL`].
    pub omegas: Option<[f64; 4]>,
    /// Lamb-Dicke factors of ion 1's readout transition, same order.
    pub etas: Option<[f64; 4]>,
    pub lambda_rel: [Option<f64>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub variable: ScanVariable,
    /// Correlation length at which `lambda_rel` is evaluated, m.
    pub rc_eval_m: f64,
    /// Base-configuration collapse-rate bounds at `rc_eval_m`, per mode.
    pub reference_bounds: [Option<f64>; 4],
    pub rows: Vec<ScanRow>,
}

/// Frequency-table row: the four mode frequencies against the swept value.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqRow {
    pub value: f64,
    pub flags: ScanFlags,
    pub omegas: Option<[f64; 4]>,
}

struct Realization {
    trap: TrapConfig,
    ion1: IonSpecies,
    ion2: IonSpecies,
    orientation: Orientation,
}

/// Builds the trap and species for one grid point; `value = None` yields the
/// base configuration under the sweep's own representation (point-like for
/// ratio sweeps), so the reference and the grid share every code path.
fn realize(
    base: &RunConfig,
    variable: ScanVariable,
    value: Option<f64>,
) -> Result<Realization, PhysicsError> {
    let t = &base.trap;
    let trap = match (variable, value) {
        (ScanVariable::VEnd, Some(v)) => {
            TrapConfig::new(t.kappa, t.omega_rf_hz, t.z0_mm, t.r0_mm, v, t.v_rf)
        }
        (ScanVariable::VRf, Some(v)) => {
            TrapConfig::new(t.kappa, t.omega_rf_hz, t.z0_mm, t.r0_mm, t.v_end, v)
        }
        _ => base.build_trap(),
    };
    let ion1 = base
        .build_ion1()
        .map_err(|e| PhysicsError::InvalidBase(e.to_string()))?;
    let base_ion2 = base
        .build_ion2()
        .map_err(|e| PhysicsError::InvalidBase(e.to_string()))?;
    let ion2 = if variable.point_like() {
        let (mut mass, mut charge) = (base_ion2.mass_amu(), base_ion2.charge_e());
        match variable {
            ScanVariable::MassRatio => {
                let ratio = value.unwrap_or(mass / ion1.mass_amu());
                mass = ion1.mass_amu() * ratio;
            }
            ScanVariable::ChargeRatio => {
                let ratio = value.unwrap_or(charge / ion1.charge_e());
                charge = ion1.charge_e() * ratio;
            }
            _ => unreachable!(),
        }
        make_point_ion(mass, charge)?
    } else if variable == ScanVariable::NRings {
        match value {
            None => base_ion2,
            Some(v) => {
                let mol = base.ion2.molecule.as_ref().ok_or_else(|| {
                    PhysicsError::InvalidBase(
                        "ring-count sweep requires an [ion2.molecule] section".into(),
                    )
                })?;
                build_porphyrin_barrel(
                    v as usize,
                    mol.ring_radius_nm * 1e-9,
                    mol.ring_spacing_nm * 1e-9,
                    mol.per_ring_mass_amu,
                    mol.per_ring_charge_e,
                )?
            }
        }
    } else {
        base_ion2
    };
    Ok(Realization {
        trap,
        ion1,
        ion2,
        orientation: base.orientation(),
    })
}

struct Assessment {
    flags: ScanFlags,
    omegas: Option<[f64; 4]>,
    etas: Option<[f64; 4]>,
    curves: [Option<ExclusionCurve>; 4],
}

fn ion_confined(trap: &TrapConfig, ion: &IonSpecies) -> bool {
    stability_classify(mathieu_params(trap, ion)).stable && secular_frequencies(trap, ion).is_ok()
}

fn assess(real: Realization, base: &RunConfig, rc_eval: f64, with_bounds: bool) -> Assessment {
    let mut flags = ScanFlags {
        stable1: ion_confined(&real.trap, &real.ion1),
        stable2: ion_confined(&real.trap, &real.ion2),
        ..ScanFlags::default()
    };
    let bail = |flags: ScanFlags| Assessment {
        flags,
        omegas: None,
        etas: None,
        curves: array::from_fn(|_| None),
    };
    if !(flags.stable1 && flags.stable2) {
        return bail(flags);
    }
    let system = match TwoIonSystem::new(real.trap, real.ion1, real.ion2) {
        Ok(s) => s,
        Err(_) => return bail(flags),
    };
    flags.aligned = alignment_check(&system);
    if !flags.aligned {
        return bail(flags);
    }
    let spectrum = match mode_spectrum(&system) {
        Ok(sp) => sp,
        Err(e) => {
            flags.soft_mode = matches!(e, PhysicsError::SoftMode { .. });
            return bail(flags);
        }
    };
    let wavelength_m = base.readout.wavelength_nm * 1e-9;
    let m1_kg = system.ion1().mass_kg();
    let omegas = ModeId::ALL.map(|m| spectrum.mode(m).omega);
    let etas = ModeId::ALL.map(|m| lamb_dicke(&spectrum, m, wavelength_m, m1_kg));
    let curves = if with_bounds {
        ModeId::ALL.map(|m| {
            let p_exp = reference_power(
                spectrum.mode(m).omega,
                base.csl.p_exp_factor,
                base.csl.tau_s,
            );
            exclusion_bound(&system, &spectrum, m, &[rc_eval], p_exp, real.orientation).ok()
        })
    } else {
        array::from_fn(|_| None)
    };
    Assessment {
        flags,
        omegas: Some(omegas),
        etas: Some(etas),
        curves,
    }
}

/// Runs a sweep. The base configuration must itself be feasible (stable,
/// aligned, no soft mode) since every row is quoted relative to it; grid
/// points may fail freely and are reported through their flags.
pub fn run_scan(base: &RunConfig, spec: &ScanSpec) -> Result<ScanResult, PhysicsError> {
    let rc_eval = base.csl.lambda_rel_rc_m;
    let reference = assess(realize(base, spec.variable, None)?, base, rc_eval, true);
    if !reference.flags.all_good() {
        let f = reference.flags;
        return Err(PhysicsError::InvalidBase(format!(
            "stable1={} stable2={} aligned={} soft_mode={}",
            f.stable1, f.stable2, f.aligned, f.soft_mode
        )));
    }
    let reference_bounds = array::from_fn(|i| {
        reference.curves[i]
            .as_ref()
            .and_then(|c| c.points[0].lambda_upper)
    });

    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let a = assess(
            realize(base, spec.variable, Some(value))?,
            base,
            rc_eval,
            true,
        );
        let rel = array::from_fn(|i| match (&reference.curves[i], &a.curves[i]) {
            (Some(r), Some(c)) => lambda_rel(r, c, rc_eval).ok(),
            _ => None,
        });
        rows.push(ScanRow {
            value,
            flags: a.flags,
            omegas: a.omegas,
            etas: a.etas,
            lambda_rel: rel,
        });
    }
    Ok(ScanResult {
        variable: spec.variable,
        rc_eval_m: rc_eval,
        reference_bounds,
        rows,
    })
}

/// Full exclusion curves of one grid point; infeasible points and degenerate
/// modes carry `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCurves {
    pub value: f64,
    pub curves: [Option<ExclusionCurve>; 4],
}

/// The whole exclusion curve for every grid point and mode, over the base
/// configuration's correlation-length grid (quadratic cost).
pub fn scan_curves(base: &RunConfig, spec: &ScanSpec) -> Result<Vec<ScanCurves>, PhysicsError> {
    let rc_grid = base.rc_grid();
    spec.values
        .iter()
        .map(|&value| {
            let real = realize(base, spec.variable, Some(value))?;
            let orientation = real.orientation;
            let curves =
                if ion_confined(&real.trap, &real.ion1) && ion_confined(&real.trap, &real.ion2) {
                    match TwoIonSystem::new(real.trap, real.ion1, real.ion2)
                        .and_then(|sys| mode_spectrum(&sys).map(|sp| (sys, sp)))
                    {
                        Ok((sys, spectrum)) => ModeId::ALL.map(|m| {
                            let p_exp = reference_power(
                                spectrum.mode(m).omega,
                                base.csl.p_exp_factor,
                                base.csl.tau_s,
                            );
                            exclusion_bound(&sys, &spectrum, m, &rc_grid, p_exp, orientation).ok()
                        }),
                        Err(_) => array::from_fn(|_| None),
                    }
                } else {
                    array::from_fn(|_| None)
                };
            Ok(ScanCurves { value, curves })
        })
        .collect()
}

/// Mode frequencies against the swept value, without exclusion bookkeeping.
/// Unlike [`run_scan`] this does not require a feasible base, so it can chart
/// a sweep whose reference point is itself gray.
pub fn frequency_table(base: &RunConfig, spec: &ScanSpec) -> Result<Vec<FreqRow>, PhysicsError> {
    spec.values
        .iter()
        .map(|&value| {
            let a = assess(realize(base, spec.variable, Some(value))?, base, 0.0, false);
            Ok(FreqRow {
                value,
                flags: a.flags,
                omegas: a.omegas,
            })
        })
        .collect()
}
