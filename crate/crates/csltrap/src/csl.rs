//! Heating of the crystal's motional modes by a mass-proportional collapse
//! noise field with rate `lambda` and correlation length `r_C`, and the
//! exclusion bounds that follow from an experimental heating budget.
//!
//! The mode-energy gain factorizes into constituent pairs: each pair `(n, n')`
//! at lab positions `r_n`, `r_n'` contributes a Gaussian overlap
//! `exp(-|dr|^2 / 4 r_C^2)` times a geometric factor that depends on the mode
//! family (axial modes couple through `k_z`, radial through the transverse
//! components), weighted by the mode eigenvector and the constituent masses.

use crate::constants::{ATOMIC_MASS_KG, HBAR};
use crate::modes::{equilibrium, Axis, Equilibrium, ModeId, ModeSpectrum, TwoIonSystem};
use crate::species::{Orientation, PointMass};
use crate::PhysicsError;

/// Reference mass of the collapse model: one nucleon, taken as 1 amu.
pub const REFERENCE_MASS_KG: f64 = ATOMIC_MASS_KG;

/// Collapse-model parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CslParams {
    /// Collapse rate, 1/s.
    pub lambda_per_s: f64,
    /// Correlation length, m.
    pub rc_m: f64,
}

/// Steady energy-gain rate of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingRate {
    pub mode: ModeId,
    /// Power fed into the mode, W.
    pub power_w: f64,
    /// Same rate in motional quanta per second, `power / (hbar omega)`.
    pub quanta_per_s: f64,
}

/// One ion as the heating formula sees it: total mass, the eigenvector
/// component, the equilibrium position on the axis, and the constituent list
/// in lab-frame offsets.
struct HeatingBody {
    total_mass: f64,
    weight: f64,
    z_eq: f64,
    parts: Vec<PointMass>,
}

/// Shared pair sum. For each constituent pair the displacement
/// `dr = (z_i + o_n) - (z_j + o_n')` enters a Gaussian overlap and the
/// family-specific polynomial factor; masses enter as
/// `m_n m_n' / sqrt(m_i m_j)`.
fn pair_sum(bodies: &[HeatingBody; 2], axis: Axis, rc: f64) -> f64 {
    let rc2 = rc * rc;
    let mut total = 0.0;
    for bi in bodies {
        for bj in bodies {
            let mut geom = 0.0;
            for p in &bi.parts {
                for q in &bj.parts {
                    let dx = p.offset_m[0] - q.offset_m[0];
                    let dy = p.offset_m[1] - q.offset_m[1];
                    let dz = (bi.z_eq + p.offset_m[2]) - (bj.z_eq + q.offset_m[2]);
                    let d2 = dx * dx + dy * dy + dz * dz;
                    let factor = match axis {
                        Axis::Axial => 1.0 - dz * dz / (2.0 * rc2),
                        Axis::Radial => 1.0 - (dx * dx + dy * dy) / (4.0 * rc2),
                    };
                    geom += p.mass_kg * q.mass_kg * (-d2 / (4.0 * rc2)).exp() * factor;
                }
            }
            total += bi.weight * bj.weight * geom / (bi.total_mass * bj.total_mass).sqrt();
        }
    }
    total
}

fn heating_rate(
    bodies: &[HeatingBody; 2],
    spectrum: &ModeSpectrum,
    params: &CslParams,
    mode: ModeId,
) -> HeatingRate {
    let m = spectrum.mode(mode);
    let s = pair_sum(bodies, mode.axis, params.rc_m);
    let power = params.lambda_per_s * HBAR * HBAR
        / (4.0 * REFERENCE_MASS_KG * REFERENCE_MASS_KG * params.rc_m * params.rc_m)
        * s;
    HeatingRate {
        mode,
        power_w: power,
        quanta_per_s: power / (HBAR * m.omega),
    }
}

fn bodies_pointlike(
    system: &TwoIonSystem,
    eq: &Equilibrium,
    spectrum: &ModeSpectrum,
    mode: ModeId,
    mass_scale: f64,
) -> [HeatingBody; 2] {
    let w = spectrum.mode(mode).eigvec;
    let m1 = system.ion1().mass_kg() * mass_scale;
    let m2 = system.ion2().mass_kg() * mass_scale;
    [
        HeatingBody {
            total_mass: m1,
            weight: w[0],
            z_eq: eq.z1_m,
            parts: vec![PointMass {
                mass_kg: m1,
                offset_m: [0.0; 3],
            }],
        },
        HeatingBody {
            total_mass: m2,
            weight: w[1],
            z_eq: eq.z2_m,
            parts: vec![PointMass {
                mass_kg: m2,
                offset_m: [0.0; 3],
            }],
        },
    ]
}

fn bodies_extended(
    system: &TwoIonSystem,
    eq: &Equilibrium,
    spectrum: &ModeSpectrum,
    mode: ModeId,
    orientation: Orientation,
    mass_scale: f64,
) -> [HeatingBody; 2] {
    let w = spectrum.mode(mode).eigvec;
    let body = |ion: &crate::species::IonSpecies, weight: f64, z_eq: f64| {
        let parts = ion
            .constituents()
            .into_iter()
            .map(|p| PointMass {
                mass_kg: p.mass_kg * mass_scale,
                offset_m: orientation.to_lab(p.offset_m),
            })
            .collect();
        HeatingBody {
            total_mass: ion.mass_kg() * mass_scale,
            weight,
            z_eq,
            parts,
        }
    };
    [
        body(system.ion1(), w[0], eq.z1_m),
        body(system.ion2(), w[1], eq.z2_m),
    ]
}

/// Heating rate with both ions treated as point masses at their equilibrium
/// positions (any extended distribution is ignored).
pub fn csl_heating_pointlike(
    system: &TwoIonSystem,
    eq: &Equilibrium,
    spectrum: &ModeSpectrum,
    params: &CslParams,
    mode: ModeId,
) -> HeatingRate {
    heating_rate(
        &bodies_pointlike(system, eq, spectrum, mode, 1.0),
        spectrum,
        params,
        mode,
    )
}

/// Heating rate resolving the molecular mass distribution; point species
/// degenerate to [`csl_heating_pointlike`] exactly. `orientation` places the
/// molecule's body frame in the lab.
pub fn csl_heating_extended(
    system: &TwoIonSystem,
    eq: &Equilibrium,
    spectrum: &ModeSpectrum,
    params: &CslParams,
    mode: ModeId,
    orientation: Orientation,
) -> HeatingRate {
    heating_rate(
        &bodies_extended(system, eq, spectrum, mode, orientation, 1.0),
        spectrum,
        params,
        mode,
    )
}

/// Formula-level mass scaling hook for scaling-exponent diagnostics: every
/// mass is multiplied by `mass_scale` while the spectrum, eigenvectors and
/// equilibrium stay frozen.
pub(crate) fn csl_heating_extended_scaled(
    system: &TwoIonSystem,
    eq: &Equilibrium,
    spectrum: &ModeSpectrum,
    params: &CslParams,
    mode: ModeId,
    orientation: Orientation,
    mass_scale: f64,
) -> HeatingRate {
    heating_rate(
        &bodies_extended(system, eq, spectrum, mode, orientation, mass_scale),
        spectrum,
        params,
        mode,
    )
}

/// Experimental heating budget: the power that a fractional sensitivity
/// `p_exp_factor` (quanta per interrogation time `tau_s`) corresponds to for
/// a mode at `omega`.
pub fn reference_power(omega: f64, p_exp_factor: f64, tau_s: f64) -> f64 {
    p_exp_factor * HBAR * omega / tau_s
}

/// One point of an exclusion curve; `lambda_upper` is absent where the
/// heating rate vanishes and no bound exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionPoint {
    pub rc_m: f64,
    pub lambda_upper: Option<f64>,
}

/// Upper bound on the collapse rate versus correlation length for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionCurve {
    pub mode: ModeId,
    /// Experimental power budget used, W.
    pub p_exp_w: f64,
    pub points: Vec<ExclusionPoint>,
}

/// Exclusion bound `lambda_upper(r_C) = P_exp / P(lambda = 1, r_C)` using the
/// extended-mass heating rate. Grid points where the rate vanishes carry no
/// bound; if that happens everywhere the mode is degenerate for this purpose.
pub fn exclusion_bound(
    system: &TwoIonSystem,
    spectrum: &ModeSpectrum,
    mode: ModeId,
    rc_grid: &[f64],
    p_exp_w: f64,
    orientation: Orientation,
) -> Result<ExclusionCurve, PhysicsError> {
    let eq = equilibrium(system);
    let points: Vec<ExclusionPoint> = rc_grid
        .iter()
        .map(|&rc| {
            let params = CslParams {
                lambda_per_s: 1.0,
                rc_m: rc,
            };
            let rate = csl_heating_extended(system, &eq, spectrum, &params, mode, orientation);
            ExclusionPoint {
                rc_m: rc,
                lambda_upper: bound_from_power(rate.power_w, p_exp_w),
            }
        })
        .collect();
    if points.iter().all(|p| p.lambda_upper.is_none()) {
        return Err(PhysicsError::DegenerateMode { mode });
    }
    Ok(ExclusionCurve {
        mode,
        p_exp_w,
        points,
    })
}

fn bound_from_power(power_at_unit_lambda: f64, p_exp_w: f64) -> Option<f64> {
    (power_at_unit_lambda > 0.0).then(|| p_exp_w / power_at_unit_lambda)
}

/// Relative improvement of a candidate bound over a reference bound at one
/// correlation length: `lambda_rel = lambda_ref / lambda_candidate` (> 1 means
/// the candidate excludes more).
pub fn lambda_rel(
    reference: &ExclusionCurve,
    candidate: &ExclusionCurve,
    rc_eval_m: f64,
) -> Result<f64, PhysicsError> {
    let find = |curve: &ExclusionCurve| -> Option<ExclusionPoint> {
        curve
            .points
            .iter()
            .find(|p| (p.rc_m - rc_eval_m).abs() <= 1e-9 * rc_eval_m)
            .copied()
    };
    let (r, c) = match (find(reference), find(candidate)) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(PhysicsError::MissingRcEval { rc: rc_eval_m }),
    };
    match (r.lambda_upper, c.lambda_upper) {
        (Some(lr), Some(lc)) => Ok(lr / lc),
        (None, _) => Err(PhysicsError::DegenerateMode {
            mode: reference.mode,
        }),
        (_, None) => Err(PhysicsError::DegenerateMode {
            mode: candidate.mode,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::mode_spectrum;
    use crate::species::{build_porphyrin_barrel, make_point_ion};
    use crate::trap::TrapConfig;

    fn reference_trap() -> TrapConfig {
        TrapConfig::new(0.248, 5.2e6, 2.03, 2.63, 4.68, 720.4)
    }

    fn reference_system() -> TwoIonSystem {
        TwoIonSystem::new(
            reference_trap(),
            make_point_ion(138.0, 1.0).unwrap(),
            make_point_ion(8676.0, 24.0).unwrap(),
        )
        .unwrap()
    }

    fn barrel_system(n_rings: usize) -> TwoIonSystem {
        TwoIonSystem::new(
            reference_trap(),
            make_point_ion(138.0, 1.0).unwrap(),
            build_porphyrin_barrel(n_rings, 1e-9, 5e-10, 4338.0, 12.0).unwrap(),
        )
        .unwrap()
    }

    fn equal_ion_system() -> TwoIonSystem {
        TwoIonSystem::new(
            reference_trap(),
            make_point_ion(138.0, 1.0).unwrap(),
            make_point_ion(138.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn no_collapse_no_heating() {
        let sys = reference_system();
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 0.0,
            rc_m: 1e-7,
        };
        for id in ModeId::ALL {
            assert_eq!(
                csl_heating_pointlike(&sys, &eq, &s, &params, id).power_w,
                0.0
            );
        }
    }

    #[test]
    fn rates_are_positive_and_quanta_consistent() {
        let sys = reference_system();
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 1e-8,
            rc_m: 1e-7,
        };
        for id in ModeId::ALL {
            let r = csl_heating_pointlike(&sys, &eq, &s, &params, id);
            assert!(r.power_w > 0.0, "{id}: {r:?}");
            let omega = s.mode(id).omega;
            assert!((r.quanta_per_s - r.power_w / (HBAR * omega)).abs() <= 1e-12 * r.quanta_per_s);
        }
    }

    #[test]
    fn long_correlation_suppresses_equal_ion_stretch_mode() {
        // for equal masses the out-of-phase eigenvector is antisymmetric, so
        // the pair sum cancels once r_C dwarfs the ion spacing
        let sys = equal_ion_system();
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 1.0,
            rc_m: 1e6 * eq.separation_m,
        };
        let p_in = csl_heating_pointlike(&sys, &eq, &s, &params, ModeId::AXIAL_IN).power_w;
        let p_out = csl_heating_pointlike(&sys, &eq, &s, &params, ModeId::AXIAL_OUT).power_w;
        assert!(p_out / p_in < 1e-10, "ratio = {}", p_out / p_in);
    }

    #[test]
    fn extended_equals_pointlike_for_point_species() {
        let sys = reference_system();
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 1e-8,
            rc_m: 1e-7,
        };
        for id in ModeId::ALL {
            let a = csl_heating_pointlike(&sys, &eq, &s, &params, id);
            let b = csl_heating_extended(&sys, &eq, &s, &params, id, Orientation::Axial);
            assert_eq!(a.power_w, b.power_w);
        }
    }

    #[test]
    fn degenerate_barrel_heats_like_a_point() {
        let collapsed = TwoIonSystem::new(
            reference_trap(),
            make_point_ion(138.0, 1.0).unwrap(),
            build_porphyrin_barrel(2, 0.0, 0.0, 4338.0, 12.0).unwrap(),
        )
        .unwrap();
        let point = reference_system();
        let params = CslParams {
            lambda_per_s: 1e-8,
            rc_m: 1e-7,
        };
        for id in ModeId::ALL {
            let a = {
                let eq = equilibrium(&collapsed);
                let s = mode_spectrum(&collapsed).unwrap();
                csl_heating_extended(&collapsed, &eq, &s, &params, id, Orientation::Axial).power_w
            };
            let b = {
                let eq = equilibrium(&point);
                let s = mode_spectrum(&point).unwrap();
                csl_heating_pointlike(&point, &eq, &s, &params, id).power_w
            };
            assert_eq!(a, b);
        }
    }

    #[test]
    fn structure_is_invisible_above_the_molecule_size() {
        let sys = barrel_system(2);
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 1e-8,
            rc_m: 1e-7,
        };
        for id in ModeId::ALL {
            let point = csl_heating_pointlike(&sys, &eq, &s, &params, id).power_w;
            let ext = csl_heating_extended(&sys, &eq, &s, &params, id, Orientation::Axial).power_w;
            assert!((ext / point - 1.0).abs() < 0.01, "{id}: {ext} vs {point}");
        }
    }

    #[test]
    fn structure_matters_below_the_molecule_size() {
        let sys = barrel_system(2);
        let eq = equilibrium(&sys);
        let s = mode_spectrum(&sys).unwrap();
        let params = CslParams {
            lambda_per_s: 1e-8,
            rc_m: 3e-10,
        };
        let mut max_dev: f64 = 0.0;
        for id in ModeId::ALL {
            let point = csl_heating_pointlike(&sys, &eq, &s, &params, id).power_w;
            let ext = csl_heating_extended(&sys, &eq, &s, &params, id, Orientation::Axial).power_w;
            max_dev = max_dev.max((ext / point - 1.0).abs());
        }
        assert!(max_dev > 0.05, "max deviation only {max_dev}");
    }

    #[test]
    fn exclusion_bound_scales_linearly_with_budget() {
        let sys = barrel_system(2);
        let s = mode_spectrum(&sys).unwrap();
        let grid = [1e-8, 1e-7, 1e-6];
        let c1 =
            exclusion_bound(&sys, &s, ModeId::AXIAL_IN, &grid, 1e-25, Orientation::Axial).unwrap();
        let c2 =
            exclusion_bound(&sys, &s, ModeId::AXIAL_IN, &grid, 2e-25, Orientation::Axial).unwrap();
        for (a, b) in c1.points.iter().zip(&c2.points) {
            assert_eq!(b.lambda_upper.unwrap(), 2.0 * a.lambda_upper.unwrap());
        }
    }

    #[test]
    fn lambda_rel_identities() {
        let sys = barrel_system(2);
        let s = mode_spectrum(&sys).unwrap();
        let grid = [1e-7];
        let reference =
            exclusion_bound(&sys, &s, ModeId::AXIAL_IN, &grid, 1e-25, Orientation::Axial).unwrap();
        assert_eq!(lambda_rel(&reference, &reference, 1e-7).unwrap(), 1.0);

        // a candidate with ten times the heating rate is ten times better
        let better =
            exclusion_bound(&sys, &s, ModeId::AXIAL_IN, &grid, 1e-26, Orientation::Axial).unwrap();
        let r = lambda_rel(&reference, &better, 1e-7).unwrap();
        assert!((r - 10.0).abs() < 1e-12);

        assert!(matches!(
            lambda_rel(&reference, &better, 5e-7),
            Err(PhysicsError::MissingRcEval { .. })
        ));
    }
}
