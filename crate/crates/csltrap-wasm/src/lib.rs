//! Browser bindings for the two-ion collapse-heating library. Each export
//! takes plain numbers from the page, runs the full physics pipeline, and
//! returns a JSON string; failures come back as `{"error": "..."}` so the
//! page can render them without exception plumbing. The crate also compiles
//! natively, which is how its tests run.

use csltrap::config::parse_config;
use csltrap::csl::{exclusion_bound, reference_power};
use csltrap::modes::{equilibrium, lamb_dicke, mode_spectrum, ModeId};
use csltrap::trap::{
    mathieu_params, secular_frequencies, stability_boundaries, stability_classify,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Resolved run configuration for the given voltages and ring count; all
/// other knobs keep their documented defaults.
fn config_for(v_end: f64, v_rf: f64, n_rings: u32) -> Result<csltrap::config::RunConfig, String> {
    let text = format!(
        "[trap]\nv_end = {v_end:?}\nv_rf = {v_rf:?}\n\n[ion2.molecule]\nn_rings = {n_rings}\n"
    );
    parse_config(&text).map_err(|e| e.to_string())
}

/// Mathieu stability data for both ions plus the boundary curves of the
/// lowest stability region: feed the sliders, draw the (q, a) plane.
#[wasm_bindgen]
pub fn stability_report(v_end: f64, v_rf: f64, n_rings: u32) -> String {
    let cfg = match config_for(v_end, v_rf, n_rings) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let trap = cfg.build_trap();
    let ions = [cfg.build_ion1(), cfg.build_ion2()];

    let mut ion_rows = Vec::new();
    for (name, ion) in ["atomic ion", "molecular ion"].iter().zip(ions) {
        let ion = match ion {
            Ok(i) => i,
            Err(e) => return err_json(e),
        };
        let point = mathieu_params(&trap, &ion);
        let verdict = stability_classify(point);
        let freqs = secular_frequencies(&trap, &ion).ok();
        ion_rows.push(json!({
            "name": name,
            "mass_amu": ion.mass_amu(),
            "charge_e": ion.charge_e(),
            "a": point.a,
            "q": point.q,
            "stable": verdict.stable,
            "reason": format!("{:?}", verdict.reason),
            "f_z_hz": freqs.map(|f| f.omega_z / std::f64::consts::TAU),
            "f_r_hz": freqs.map(|f| f.omega_r / std::f64::consts::TAU),
        }));
    }

    let qs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let (mut a0s, mut b1s) = (Vec::new(), Vec::new());
    for &q in &qs {
        let (a0, b1) = stability_boundaries(q);
        a0s.push(a0);
        b1s.push(b1);
    }

    let crystal: Value = match cfg.build_system() {
        Ok(sys) => {
            let eq = equilibrium(&sys);
            json!({
                "aligned": csltrap::modes::alignment_check(&sys),
                "z1_um": eq.z1_m * 1e6,
                "z2_um": eq.z2_m * 1e6,
                "separation_um": eq.separation_m * 1e6,
            })
        }
        Err(e) => json!({ "aligned": false, "error": e.to_string() }),
    };

    json!({
        "ions": ion_rows,
        "boundary": { "q": qs, "a0": a0s, "b1": b1s },
        "crystal": crystal,
    })
    .to_string()
}

/// Normal-mode table: frequencies, eigenvectors, and the Lamb-Dicke factor
/// seen by the readout laser on the atomic ion.
#[wasm_bindgen]
pub fn mode_report(v_end: f64, v_rf: f64, n_rings: u32) -> String {
    let cfg = match config_for(v_end, v_rf, n_rings) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let sys = match cfg.build_system() {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let spectrum = match mode_spectrum(&sys) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let eq = equilibrium(&sys);
    let wavelength_m = cfg.readout.wavelength_nm * 1e-9;

    let modes: Vec<Value> = ModeId::ALL
        .iter()
        .map(|&id| {
            let m = spectrum.mode(id);
            json!({
                "mode": id.key(),
                "freq_khz": m.omega / std::f64::consts::TAU / 1e3,
                "eigvec": m.eigvec,
                "degeneracy": m.degeneracy,
                "eta": lamb_dicke(&spectrum, id, wavelength_m, sys.ion1().mass_kg()),
            })
        })
        .collect();

    json!({
        "z1_um": eq.z1_m * 1e6,
        "z2_um": eq.z2_m * 1e6,
        "separation_um": eq.separation_m * 1e6,
        "modes": modes,
    })
    .to_string()
}

/// Collapse-rate exclusion curves `lambda_upper(r_C)` for all four modes at
/// the default experimental budget.
#[wasm_bindgen]
pub fn exclusion_report(v_end: f64, v_rf: f64, n_rings: u32) -> String {
    let mut cfg = match config_for(v_end, v_rf, n_rings) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    cfg.csl.rc_points = 120; // lighter payload for the page
    let sys = match cfg.build_system() {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let spectrum = match mode_spectrum(&sys) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let grid = cfg.rc_grid();

    let mut curves = Vec::new();
    for id in ModeId::ALL {
        let p_exp = reference_power(spectrum.mode(id).omega, cfg.csl.p_exp_factor, cfg.csl.tau_s);
        match exclusion_bound(&sys, &spectrum, id, &grid, p_exp, cfg.orientation()) {
            Ok(curve) => curves.push(json!({
                "mode": id.key(),
                "rc_m": curve.points.iter().map(|p| p.rc_m).collect::<Vec<_>>(),
                "lambda_upper_per_s":
                    curve.points.iter().map(|p| p.lambda_upper).collect::<Vec<_>>(),
            })),
            Err(e) => return err_json(e),
        }
    }

    json!({ "rc_points": grid.len(), "curves": curves }).to_string()
}
