//! Run configuration: a sectioned key = value text format (TOML syntax) in
//! experiment-friendly units. Every key has a default taken from the
//! reference barium + two-ring porphyrin-barrel setup, so an empty file is a
//! complete configuration. Unknown keys are rejected with their location;
//! out-of-range values are rejected naming the key and the constraint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modes::TwoIonSystem;
use crate::noise::NoiseSpectrum;
use crate::species::{build_porphyrin_barrel, make_point_ion, IonSpecies, Orientation};
use crate::trap::TrapConfig;
use crate::PhysicsError;

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Syntax or unknown-key error; the message carries line and column.
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("config value out of range: {key} = {value} ({constraint})")]
    Invalid {
        key: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("ion2.{0} conflicts with [ion2.molecule]; the molecule fixes it")]
    MoleculeConflict(&'static str),

    #[error("noise table: {0}")]
    NoiseTable(String),

    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    pub kappa: f64,
    /// RF drive frequency, ordinary Hz.
    pub omega_rf_hz: f64,
    pub z0_mm: f64,
    pub r0_mm: f64,
    pub v_end: f64,
    pub v_rf: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        TrapSection {
            kappa: 0.248,
            omega_rf_hz: 5.2e6,
            z0_mm: 2.03,
            r0_mm: 2.63,
            v_end: 4.68,
            v_rf: 720.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IonSection {
    pub mass_amu: f64,
    pub charge_e: f64,
}

impl Default for IonSection {
    fn default() -> Self {
        IonSection {
            mass_amu: 138.0,
            charge_e: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MoleculeSection {
    pub n_rings: usize,
    pub ring_radius_nm: f64,
    pub ring_spacing_nm: f64,
    pub per_ring_mass_amu: f64,
    pub per_ring_charge_e: f64,
    pub orientation: Orientation,
}

impl Default for MoleculeSection {
    fn default() -> Self {
        MoleculeSection {
            n_rings: 2,
            ring_radius_nm: 1.0,
            ring_spacing_nm: 0.5,
            per_ring_mass_amu: 4338.0,
            per_ring_charge_e: 12.0,
            orientation: Orientation::Axial,
        }
    }
}

/// Second ion: either a point species (`mass_amu` + `charge_e`) or a
/// molecular barrel (`[ion2.molecule]`). Writing any of the three suppresses
/// the default molecule; writing point fields *and* a molecule is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ion2Section {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub molecule: Option<MoleculeSection>,
}

impl Default for Ion2Section {
    fn default() -> Self {
        Ion2Section {
            mass_amu: None,
            charge_e: None,
            molecule: Some(MoleculeSection::default()),
        }
    }
}

impl Ion2Section {
    fn is_unset(&self) -> bool {
        self.mass_amu.is_none() && self.charge_e.is_none() && self.molecule.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CslSection {
    /// Collapse rate used when a single heating number is requested, 1/s.
    pub lambda_per_s: f64,
    /// Correlation length used for single heating numbers, m.
    pub rc_m: f64,
    /// Exclusion-curve grid (log-spaced, inclusive).
    pub rc_min_m: f64,
    pub rc_max_m: f64,
    pub rc_points: usize,
    /// Experimental budget: `p_exp_factor` quanta over `tau_s` seconds.
    pub p_exp_factor: f64,
    pub tau_s: f64,
    /// Correlation length at which relative improvements are quoted, m.
    pub lambda_rel_rc_m: f64,
}

impl Default for CslSection {
    fn default() -> Self {
        CslSection {
            lambda_per_s: 1e-8,
            rc_m: 1e-7,
            rc_min_m: 1e-10,
            rc_max_m: 1e-2,
            rc_points: 200,
            p_exp_factor: 1e-5,
            tau_s: 1.0,
            lambda_rel_rc_m: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Flat field-noise densities, (V/m)^2/Hz.
    pub psd_x: f64,
    pub psd_y: f64,
    pub psd_z: f64,
    /// Optional CSV table `freq_hz,sx,sy,sz` overriding the flat densities;
    /// resolved relative to the config file by the caller.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            psd_x: 1e-24,
            psd_y: 1e-24,
            psd_z: 1e-24,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutSection {
    pub wavelength_nm: f64,
    /// Carrier Rabi frequency, ordinary Hz.
    pub omega0_hz: f64,
    pub min_discrimination: f64,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        ReadoutSection {
            wavelength_nm: 1762.0,
            omega0_hz: 1e3,
            min_discrimination: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub trap: TrapSection,
    pub ion1: IonSection,
    pub ion2: Ion2Section,
    pub csl: CslSection,
    pub noise: NoiseSection,
    pub readout: ReadoutSection,
}

/// Parses and validates a configuration. An empty string yields the full
/// reference configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg: RunConfig = toml::from_str(text)?;
    if cfg.ion2.is_unset() {
        cfg.ion2 = Ion2Section::default();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn require(
    ok: bool,
    key: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            key,
            value,
            constraint,
        })
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.trap;
        require(
            t.kappa > 0.0 && t.kappa <= 1.0,
            "trap.kappa",
            t.kappa,
            "must be in (0, 1]",
        )?;
        require(
            t.omega_rf_hz > 0.0,
            "trap.omega_rf_hz",
            t.omega_rf_hz,
            "must be > 0",
        )?;
        require(t.z0_mm > 0.0, "trap.z0_mm", t.z0_mm, "must be > 0")?;
        require(t.r0_mm > 0.0, "trap.r0_mm", t.r0_mm, "must be > 0")?;
        require(t.v_end > 0.0, "trap.v_end", t.v_end, "must be > 0")?;
        require(t.v_rf > 0.0, "trap.v_rf", t.v_rf, "must be > 0")?;

        require(
            self.ion1.mass_amu > 0.0,
            "ion1.mass_amu",
            self.ion1.mass_amu,
            "must be > 0",
        )?;
        require(
            self.ion1.charge_e != 0.0,
            "ion1.charge_e",
            self.ion1.charge_e,
            "must be nonzero",
        )?;

        match (&self.ion2.molecule, self.ion2.mass_amu, self.ion2.charge_e) {
            (Some(_), Some(_), _) => return Err(ConfigError::MoleculeConflict("mass_amu")),
            (Some(_), _, Some(_)) => return Err(ConfigError::MoleculeConflict("charge_e")),
            (Some(mol), None, None) => {
                require(
                    mol.n_rings >= 1,
                    "ion2.molecule.n_rings",
                    mol.n_rings as f64,
                    "must be >= 1",
                )?;
                require(
                    mol.ring_radius_nm >= 0.0,
                    "ion2.molecule.ring_radius_nm",
                    mol.ring_radius_nm,
                    "must be >= 0",
                )?;
                require(
                    mol.ring_spacing_nm >= 0.0,
                    "ion2.molecule.ring_spacing_nm",
                    mol.ring_spacing_nm,
                    "must be >= 0",
                )?;
                require(
                    mol.per_ring_mass_amu > 0.0,
                    "ion2.molecule.per_ring_mass_amu",
                    mol.per_ring_mass_amu,
                    "must be > 0",
                )?;
                require(
                    mol.per_ring_charge_e != 0.0,
                    "ion2.molecule.per_ring_charge_e",
                    mol.per_ring_charge_e,
                    "must be nonzero",
                )?;
            }
            (None, mass, charge) => {
                let mass = mass.unwrap_or(0.0);
                let charge = charge.unwrap_or(0.0);
                require(
                    mass > 0.0,
                    "ion2.mass_amu",
                    mass,
                    "must be > 0 (or give a molecule)",
                )?;
                require(charge != 0.0, "ion2.charge_e", charge, "must be nonzero")?;
            }
        }

        let c = &self.csl;
        require(
            c.lambda_per_s >= 0.0,
            "csl.lambda_per_s",
            c.lambda_per_s,
            "must be >= 0",
        )?;
        require(c.rc_m > 0.0, "csl.rc_m", c.rc_m, "must be > 0")?;
        require(c.rc_min_m > 0.0, "csl.rc_min_m", c.rc_min_m, "must be > 0")?;
        require(
            c.rc_max_m > c.rc_min_m,
            "csl.rc_max_m",
            c.rc_max_m,
            "must be > csl.rc_min_m",
        )?;
        require(
            c.rc_points >= 2,
            "csl.rc_points",
            c.rc_points as f64,
            "must be >= 2",
        )?;
        require(
            c.p_exp_factor > 0.0,
            "csl.p_exp_factor",
            c.p_exp_factor,
            "must be > 0",
        )?;
        require(c.tau_s > 0.0, "csl.tau_s", c.tau_s, "must be > 0")?;
        require(
            c.lambda_rel_rc_m > 0.0,
            "csl.lambda_rel_rc_m",
            c.lambda_rel_rc_m,
            "must be > 0",
        )?;

        let n = &self.noise;
        require(n.psd_x >= 0.0, "noise.psd_x", n.psd_x, "must be >= 0")?;
        require(n.psd_y >= 0.0, "noise.psd_y", n.psd_y, "must be >= 0")?;
        require(n.psd_z >= 0.0, "noise.psd_z", n.psd_z, "must be >= 0")?;

        let r = &self.readout;
        require(
            r.wavelength_nm > 0.0,
            "readout.wavelength_nm",
            r.wavelength_nm,
            "must be > 0",
        )?;
        require(
            r.omega0_hz > 0.0,
            "readout.omega0_hz",
            r.omega0_hz,
            "must be > 0",
        )?;
        require(
            r.min_discrimination >= 1.0,
            "readout.min_discrimination",
            r.min_discrimination,
            "must be >= 1",
        )?;
        Ok(())
    }

    pub fn build_trap(&self) -> TrapConfig {
        TrapConfig::new(
            self.trap.kappa,
            self.trap.omega_rf_hz,
            self.trap.z0_mm,
            self.trap.r0_mm,
            self.trap.v_end,
            self.trap.v_rf,
        )
    }

    pub fn build_ion1(&self) -> Result<IonSpecies, PhysicsError> {
        make_point_ion(self.ion1.mass_amu, self.ion1.charge_e)
    }

    pub fn build_ion2(&self) -> Result<IonSpecies, PhysicsError> {
        match &self.ion2.molecule {
            Some(mol) => build_porphyrin_barrel(
                mol.n_rings,
                mol.ring_radius_nm * 1e-9,
                mol.ring_spacing_nm * 1e-9,
                mol.per_ring_mass_amu,
                mol.per_ring_charge_e,
            ),
            None => make_point_ion(
                self.ion2.mass_amu.expect("validated"),
                self.ion2.charge_e.expect("validated"),
            ),
        }
    }

    pub fn build_system(&self) -> Result<TwoIonSystem, PhysicsError> {
        TwoIonSystem::new(self.build_trap(), self.build_ion1()?, self.build_ion2()?)
    }

    /// Lab-frame orientation of the molecule (axial if there is none).
    pub fn orientation(&self) -> Orientation {
        self.ion2
            .molecule
            .as_ref()
            .map_or(Orientation::Axial, |m| m.orientation)
    }

    /// Flat noise spectrum from the config (a table, if named, is loaded
    /// separately with [`noise_table_from_csv`]).
    pub fn noise_spectrum(&self) -> NoiseSpectrum {
        NoiseSpectrum::Flat {
            sx: self.noise.psd_x,
            sy: self.noise.psd_y,
            sz: self.noise.psd_z,
        }
    }

    /// Log-spaced correlation-length grid for exclusion curves, inclusive of
    /// both ends.
    pub fn rc_grid(&self) -> Vec<f64> {
        log_grid(self.csl.rc_min_m, self.csl.rc_max_m, self.csl.rc_points)
    }

    /// Canonical text form with every resolved value; parsing it back yields
    /// an identical configuration.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes to TOML")
    }
}

/// Log-spaced grid with the end points held exactly at `min` and `max`.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && min > 0.0 && max > min);
    let (lo, hi) = (min.ln(), max.ln());
    (0..n)
        .map(|i| match i {
            0 => min,
            _ if i == n - 1 => max,
            _ => (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Parses a noise table CSV with header `freq_hz,sx,sy,sz` ((V/m)^2/Hz) into
/// a tabulated spectrum. Rows must come sorted by frequency.
pub fn noise_table_from_csv(text: &str) -> Result<NoiseSpectrum, ConfigError> {
    let mut freqs = Vec::new();
    let (mut sx, mut sy, mut sz) = (Vec::new(), Vec::new(), Vec::new());
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if idx == 0 || (freqs.is_empty() && line.starts_with("freq")) {
            // header row
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(ConfigError::NoiseTable(format!(
                "line {}: expected 4 comma-separated fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, ConfigError> {
            s.trim()
                .parse()
                .map_err(|_| ConfigError::NoiseTable(format!("line {}: bad number {s:?}", idx + 1)))
        };
        let f = parse(fields[0])?;
        if let Some(&last) = freqs.last() {
            if f <= last {
                return Err(ConfigError::NoiseTable(format!(
                    "line {}: frequencies must increase",
                    idx + 1
                )));
            }
        }
        freqs.push(f);
        sx.push(parse(fields[1])?);
        sy.push(parse(fields[2])?);
        sz.push(parse(fields[3])?);
    }
    if freqs.is_empty() {
        return Err(ConfigError::NoiseTable("no data rows".into()));
    }
    Ok(NoiseSpectrum::Table {
        freqs_hz: freqs,
        sx,
        sy,
        sz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_reference_setup() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.trap.v_end, 4.68);
        assert_eq!(cfg.trap.v_rf, 720.4);
        let sys = cfg.build_system().unwrap();
        assert!((sys.mass_ratio() - 8676.0 / 138.0).abs() < 1e-10);
        assert!((sys.charge_ratio() - 24.0).abs() < 1e-12);
        assert!(sys.ion2().distribution().is_some());
    }

    #[test]
    fn overriding_one_key_keeps_the_rest() {
        let cfg = parse_config("[trap]\nv_end = 9.0\n").unwrap();
        assert_eq!(cfg.trap.v_end, 9.0);
        assert_eq!(cfg.trap.v_rf, 720.4);
        assert_eq!(cfg.readout.wavelength_nm, 1762.0);
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let err = parse_config("[trap]\nvoltage = 5.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("voltage"), "message: {msg}");
        assert!(
            msg.contains("line 2"),
            "message should carry the line: {msg}"
        );
    }

    #[test]
    fn out_of_range_value_names_key_and_constraint() {
        let err = parse_config("[trap]\nv_end = -1.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("trap.v_end"), "message: {msg}");
        assert!(msg.contains("must be > 0"), "message: {msg}");
    }

    #[test]
    fn molecule_and_point_fields_conflict() {
        let err = parse_config("[ion2]\nmass_amu = 8676.0\nmolecule = {}\n").unwrap_err();
        assert!(matches!(err, ConfigError::MoleculeConflict("mass_amu")));

        // a point field alone suppresses the default molecule, so its partner
        // becomes mandatory
        let err = parse_config("[ion2]\nmass_amu = 8676.0\n").unwrap_err();
        assert!(err.to_string().contains("ion2.charge_e"), "got: {err}");

        let cfg = parse_config("ion2 = { mass_amu = 8676.0, charge_e = 24.0 }\n").unwrap();
        assert!(cfg.ion2.molecule.is_none());
        assert!(cfg.build_ion2().unwrap().distribution().is_none());

        // an explicitly empty [ion2.molecule] is the default barrel
        let cfg = parse_config("[ion2]\nmolecule = {}\n").unwrap();
        assert_eq!(cfg.ion2.molecule, Some(MoleculeSection::default()));
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = parse_config("[trap]\nv_rf = 600.0\n[ion2.molecule]\nn_rings = 3\n").unwrap();
        let text = cfg.to_toml_string();
        let back = parse_config(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(text, back.to_toml_string());
    }

    #[test]
    fn rc_grid_is_inclusive_log_spaced() {
        let cfg = parse_config("").unwrap();
        let grid = cfg.rc_grid();
        assert_eq!(grid.len(), 200);
        assert_eq!(grid[0], 1e-10);
        assert_eq!(*grid.last().unwrap(), 1e-2);
        let r01 = grid[1] / grid[0];
        let r12 = grid[2] / grid[1];
        assert!((r01 / r12 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn noise_table_parses_and_validates() {
        let t = "freq_hz,sx,sy,sz\n1e3,1e-24,1e-24,2e-24\n1e5,3e-24,1e-24,2e-24\n";
        let spectrum = noise_table_from_csv(t).unwrap();
        match &spectrum {
            NoiseSpectrum::Table { freqs_hz, .. } => assert_eq!(freqs_hz.len(), 2),
            _ => panic!("expected table"),
        }
        assert!(noise_table_from_csv("freq_hz,sx,sy,sz\n").is_err());
        assert!(noise_table_from_csv("freq_hz,sx,sy,sz\n1e3,1,1\n").is_err());
        assert!(
            noise_table_from_csv("freq_hz,sx,sy,sz\n1e5,1,1,1\n1e3,1,1,1\n").is_err(),
            "unsorted rows must be rejected"
        );
    }
}
