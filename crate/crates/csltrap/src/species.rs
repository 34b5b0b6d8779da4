//! Ion species: point charges and extended molecular mass distributions.

use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_KG, ELEMENTARY_CHARGE};
use crate::PhysicsError;

/// One rigid constituent of an extended molecule: a point mass at a fixed
/// body-frame offset from the molecule's center of mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub mass_kg: f64,
    /// Body-frame offset (x, y, z) in meters. The canonical body frame stacks
    /// rings along z.
    pub offset_m: [f64; 3],
}

/// Rigid mass distribution of an extended molecule. Only the total charge is
/// tracked; individual constituents carry mass and position.
#[derive(Debug, Clone, PartialEq)]
pub struct MassDistribution {
    pub points: Vec<PointMass>,
}

impl MassDistribution {
    pub fn total_mass_kg(&self) -> f64 {
        self.points.iter().map(|p| p.mass_kg).sum()
    }

    /// Mass-weighted mean offset; zero for any distribution built here.
    pub fn center_of_mass(&self) -> [f64; 3] {
        let m = self.total_mass_kg();
        let mut c = [0.0; 3];
        for p in &self.points {
            for (ci, oi) in c.iter_mut().zip(p.offset_m) {
                *ci += p.mass_kg * oi;
            }
        }
        c.map(|ci| ci / m)
    }
}

/// How the molecule's stacking axis is oriented in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Stacking axis along the trap axis z.
    Axial,
    /// Stacking axis along the radial x direction.
    RadialX,
}

impl Orientation {
    /// Body frame -> lab frame. `Axial` is the identity; `RadialX` is the
    /// cyclic rotation sending the body z axis onto lab x.
    pub fn to_lab(self, r: [f64; 3]) -> [f64; 3] {
        match self {
            Orientation::Axial => r,
            Orientation::RadialX => [r[2], r[0], r[1]],
        }
    }
}

/// A trapped charge: either a point ion or an extended molecule.
#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies {
    mass_kg: f64,
    charge_c: f64,
    distribution: Option<MassDistribution>,
}

impl IonSpecies {
    /// Point species from raw SI values. Negative charge is allowed; zero is
    /// not.
    pub fn from_si(mass_kg: f64, charge_c: f64) -> Result<Self, PhysicsError> {
        if !(mass_kg > 0.0) {
            return Err(PhysicsError::NonPositiveMass(mass_kg));
        }
        if charge_c == 0.0 || !charge_c.is_finite() {
            return Err(PhysicsError::ZeroCharge);
        }
        Ok(IonSpecies {
            mass_kg,
            charge_c,
            distribution: None,
        })
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }

    pub fn mass_amu(&self) -> f64 {
        self.mass_kg / ATOMIC_MASS_KG
    }

    pub fn charge_c(&self) -> f64 {
        self.charge_c
    }

    pub fn charge_e(&self) -> f64 {
        self.charge_c / ELEMENTARY_CHARGE
    }

    pub fn distribution(&self) -> Option<&MassDistribution> {
        self.distribution.as_ref()
    }

    /// Constituents seen by the heating formulas: the distribution if there
    /// is one, otherwise the whole mass sitting at the center.
    pub fn constituents(&self) -> Vec<PointMass> {
        match &self.distribution {
            Some(d) => d.points.clone(),
            None => vec![PointMass {
                mass_kg: self.mass_kg,
                offset_m: [0.0; 3],
            }],
        }
    }
}

/// Point ion from mass in amu and charge in multiples of the elementary
/// charge.
pub fn make_point_ion(mass_amu: f64, charge_e: f64) -> Result<IonSpecies, PhysicsError> {
    IonSpecies::from_si(mass_amu * ATOMIC_MASS_KG, charge_e * ELEMENTARY_CHARGE)
}

/// Stacked-ring model of a porphyrin barrel: `n_rings` hexagonal rings of six
/// equal point masses each, ring plane perpendicular to the stacking axis,
/// rings spaced by `ring_spacing_m` and centered on the center of mass.
///
/// Offsets are stored in the body frame with the stacking axis along z; the
/// heating formulas take an [`Orientation`] to place them in the lab. A fully
/// degenerate geometry (`ring_radius_m == 0 && ring_spacing_m == 0`) collapses
/// to a point species with no distribution.
pub fn build_porphyrin_barrel(
    n_rings: usize,
    ring_radius_m: f64,
    ring_spacing_m: f64,
    per_ring_mass_amu: f64,
    per_ring_charge_e: f64,
) -> Result<IonSpecies, PhysicsError> {
    if n_rings == 0 {
        return Err(PhysicsError::EmptyMolecule);
    }
    if !(per_ring_mass_amu > 0.0) {
        return Err(PhysicsError::NonPositiveMass(
            per_ring_mass_amu * ATOMIC_MASS_KG,
        ));
    }
    if ring_radius_m < 0.0 || ring_spacing_m < 0.0 {
        return Err(PhysicsError::NonPositiveMass(
            ring_radius_m.min(ring_spacing_m),
        ));
    }

    let total_mass_kg = n_rings as f64 * per_ring_mass_amu * ATOMIC_MASS_KG;
    let total_charge_c = n_rings as f64 * per_ring_charge_e * ELEMENTARY_CHARGE;
    if total_charge_c == 0.0 {
        return Err(PhysicsError::ZeroCharge);
    }

    if ring_radius_m == 0.0 && ring_spacing_m == 0.0 {
        return IonSpecies::from_si(total_mass_kg, total_charge_c);
    }

    let unit_mass = per_ring_mass_amu * ATOMIC_MASS_KG / 6.0;
    let mut points = Vec::with_capacity(6 * n_rings);
    for k in 0..n_rings {
        // symmetric stacking keeps the center of mass at the origin
        let z = (k as f64 - (n_rings as f64 - 1.0) / 2.0) * ring_spacing_m;
        for j in 0..6 {
            let phi = std::f64::consts::FRAC_PI_3 * j as f64;
            let body = [ring_radius_m * phi.cos(), ring_radius_m * phi.sin(), z];
            points.push(PointMass {
                mass_kg: unit_mass,
                offset_m: body,
            });
        }
    }

    Ok(IonSpecies {
        mass_kg: total_mass_kg,
        charge_c: total_charge_c,
        distribution: Some(MassDistribution { points }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barium_point_ion() {
        let ba = make_point_ion(138.0, 1.0).unwrap();
        assert!((ba.mass_kg() - 2.291_543_911_908e-25).abs() / ba.mass_kg() < 1e-12);
        assert_eq!(ba.charge_c(), ELEMENTARY_CHARGE);
        assert!(ba.distribution().is_none());
    }

    #[test]
    fn amu_round_trip() {
        for amu in [1.0, 137.9, 138.0, 4338.0, 8676.0, 1.0e6] {
            let ion = make_point_ion(amu, 2.0).unwrap();
            assert!((ion.mass_amu() - amu).abs() / amu < 1e-14);
        }
    }

    #[test]
    fn rejects_unphysical_species() {
        assert!(make_point_ion(0.0, 1.0).is_err());
        assert!(make_point_ion(-5.0, 1.0).is_err());
        assert!(make_point_ion(138.0, 0.0).is_err());
        assert!(build_porphyrin_barrel(0, 1e-9, 5e-10, 4338.0, 12.0).is_err());
        assert!(build_porphyrin_barrel(2, 1e-9, 5e-10, 4338.0, 0.0).is_err());
    }

    #[test]
    fn two_ring_barrel_geometry() {
        let mol = build_porphyrin_barrel(2, 1e-9, 5e-10, 4338.0, 12.0).unwrap();
        assert!((mol.mass_amu() - 8676.0).abs() / 8676.0 < 1e-14);
        assert!((mol.charge_e() - 24.0).abs() < 1e-12);

        let d = mol.distribution().unwrap();
        assert_eq!(d.points.len(), 12);
        assert!((d.total_mass_kg() - mol.mass_kg()).abs() / mol.mass_kg() < 1e-14);
        for c in d.center_of_mass() {
            assert!(c.abs() < 1e-18, "center of mass off origin: {c:e}");
        }
        // rings sit at -+ spacing/2
        let mut zs: Vec<f64> = d.points.iter().map(|p| p.offset_m[2]).collect();
        zs.sort_by(f64::total_cmp);
        assert_eq!(zs[0], -2.5e-10);
        assert_eq!(zs[11], 2.5e-10);
        // every point on the ring radius
        for p in &d.points {
            let r = (p.offset_m[0].powi(2) + p.offset_m[1].powi(2)).sqrt();
            assert!((r - 1e-9).abs() < 1e-22);
        }
    }

    #[test]
    fn single_ring_lies_in_one_plane() {
        let mol = build_porphyrin_barrel(1, 1e-9, 5e-10, 4338.0, 12.0).unwrap();
        let d = mol.distribution().unwrap();
        assert_eq!(d.points.len(), 6);
        assert!(d.points.iter().all(|p| p.offset_m[2] == 0.0));
    }

    #[test]
    fn radial_orientation_swaps_stacking_axis() {
        let mol = build_porphyrin_barrel(2, 1e-9, 5e-10, 4338.0, 12.0).unwrap();
        let d = mol.distribution().unwrap();
        // the lab map sends body-frame stacking offsets onto x, ring plane onto (y, z)
        let lab: Vec<[f64; 3]> = d
            .points
            .iter()
            .map(|p| Orientation::RadialX.to_lab(p.offset_m))
            .collect();
        let mut xs: Vec<f64> = lab.iter().map(|r| r[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs[0], -2.5e-10);
        assert_eq!(xs[11], 2.5e-10);
        for r in &lab {
            let rad = (r[1].powi(2) + r[2].powi(2)).sqrt();
            assert!((rad - 1e-9).abs() < 1e-22);
        }
    }

    #[test]
    fn degenerate_barrel_is_a_point() {
        let mol = build_porphyrin_barrel(2, 0.0, 0.0, 4338.0, 12.0).unwrap();
        assert!(mol.distribution().is_none());
        let point = make_point_ion(8676.0, 24.0).unwrap();
        assert_eq!(mol.mass_kg(), point.mass_kg());
        assert_eq!(mol.charge_c(), point.charge_c());
    }
}
