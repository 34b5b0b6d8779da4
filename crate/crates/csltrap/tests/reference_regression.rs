//! Pins the full analysis chain for the reference configuration to frozen
//! values. These digits were produced by this library at a known-good state
//! and guard against silent numerical drift; the physics-level checks live
//! with the modules and in the acceptance suite.

use csltrap::config::parse_config;
use csltrap::csl::{csl_heating_extended, exclusion_bound, reference_power, CslParams};
use csltrap::modes::{equilibrium, lamb_dicke, mode_spectrum, ModeId};
use csltrap::noise::electrical_heating;
use csltrap::trap::{epsilon_squared, mathieu_params, secular_frequencies, stability_boundaries};

const REL: f64 = 1e-9;

fn assert_rel(got: f64, want: f64, what: &str) {
    assert!(
        (got / want - 1.0).abs() < REL,
        "{what}: got {got:.12e}, frozen {want:.12e}"
    );
}

#[test]
fn reference_chain_reproduces_frozen_values() {
    let cfg = parse_config("").unwrap();
    let sys = cfg.build_system().unwrap();
    let trap = sys.trap();

    let p1 = mathieu_params(trap, sys.ion1());
    let p2 = mathieu_params(trap, sys.ion2());
    assert_rel(p1.a, -7.378723479293e-4, "a1");
    assert_rel(p1.q, 1.364294061426e-1, "q1");
    assert_rel(p2.a, -2.816774108278e-4, "a2");
    assert_rel(p2.q, 5.208093512497e-2, "q2");

    let f1 = secular_frequencies(trap, sys.ion1()).unwrap();
    let f2 = secular_frequencies(trap, sys.ion2()).unwrap();
    let tpi = 2.0 * std::f64::consts::PI;
    assert_rel(f1.omega_z / tpi, 99_880.098839, "f_z1");
    assert_rel(f1.omega_r / tpi, 240_673.772971, "f_r1");
    assert_rel(f2.omega_z / tpi, 61_711.251765, "f_z2");
    assert_rel(f2.omega_r / tpi, 85_228.241555, "f_r2");

    let (a0, b1) = stability_boundaries(p1.q);
    assert_rel(a0, -9.287626049e-3, "a0(q1)");
    assert_rel(b1, 8.612834088e-1, "b1(q1)");
    assert_rel(epsilon_squared(trap, sys.ion1()), 6.306301798898, "eps^2");

    let eq = equilibrium(&sys);
    assert_rel(eq.z1_m, 3.838162441308e-5, "z1");
    assert_rel(eq.z2_m, -1.599234350545e-6, "z2");
    assert_rel(eq.separation_m, 3.998085876363e-5, "separation");

    let spectrum = mode_spectrum(&sys).unwrap();
    let frozen_khz = [62.304218545, 171.350940861, 219.959589763, 84.119992297];
    let frozen_w1 = [
        9.524225856113e-2,
        -9.954541235959e-1,
        9.995720181607e-1,
        -2.925372643290e-2,
    ];
    let frozen_w2 = [
        9.954541235959e-1,
        9.524225856113e-2,
        2.925372643290e-2,
        9.995720181607e-1,
    ];
    let frozen_eta = [
        8.234059099e-3,
        5.189446321e-2,
        4.599235632e-2,
        2.176579850e-3,
    ];
    for (i, id) in ModeId::ALL.into_iter().enumerate() {
        let m = spectrum.mode(id);
        assert_rel(m.omega / tpi / 1e3, frozen_khz[i], id.key());
        assert_rel(m.eigvec[0], frozen_w1[i], "w1");
        assert_rel(m.eigvec[1], frozen_w2[i], "w2");
        let eta = lamb_dicke(
            &spectrum,
            id,
            cfg.readout.wavelength_nm * 1e-9,
            sys.ion1().mass_kg(),
        );
        assert_rel(eta, frozen_eta[i], "eta");
    }

    let params = CslParams {
        lambda_per_s: 1e-8,
        rc_m: 1e-7,
    };
    let noise = cfg.noise_spectrum();
    let frozen_csl = [
        1.439602939509e-32,
        3.607266188572e-34,
        2.432912259297e-34,
        1.451282930266e-32,
    ];
    let frozen_quanta = [
        3.487138866e-4,
        3.177134997e-6,
        1.669273568e-6,
        2.603735316e-4,
    ];
    let frozen_elec = [
        5.411501555310e-37,
        2.800981798343e-38,
        1.326310287355e-37,
        1.005688918293e-36,
    ];
    let frozen_bound = [
        2.867680463393e-10,
        3.147489800764e-8,
        5.990629811964e-8,
        3.840636157215e-10,
    ];
    for (i, id) in ModeId::ALL.into_iter().enumerate() {
        let rate = csl_heating_extended(&sys, &eq, &spectrum, &params, id, cfg.orientation());
        assert_rel(rate.power_w, frozen_csl[i], "P_csl");
        assert_rel(rate.quanta_per_s, frozen_quanta[i], "quanta");
        let el = electrical_heating(&sys, &spectrum, &noise, id, true);
        assert_rel(el.power_w, frozen_elec[i], "P_elec");
        let p_exp = reference_power(spectrum.mode(id).omega, cfg.csl.p_exp_factor, cfg.csl.tau_s);
        let curve = exclusion_bound(
            &sys,
            &spectrum,
            id,
            &[cfg.csl.lambda_rel_rc_m],
            p_exp,
            cfg.orientation(),
        )
        .unwrap();
        assert_rel(
            curve.points[0].lambda_upper.unwrap(),
            frozen_bound[i],
            "lambda_upper",
        );
    }
}

#[test]
fn in_phase_axial_mode_dominates_collapse_heating() {
    // with the ions far apart compared to the correlation length the
    // cross-gaussians vanish and the heavy ion's in-phase weight wins by ~40x
    let cfg = parse_config("").unwrap();
    let sys = cfg.build_system().unwrap();
    let eq = equilibrium(&sys);
    let spectrum = mode_spectrum(&sys).unwrap();
    let params = CslParams {
        lambda_per_s: 1e-8,
        rc_m: 1e-7,
    };
    let p_in = csl_heating_extended(
        &sys,
        &eq,
        &spectrum,
        &params,
        ModeId::AXIAL_IN,
        cfg.orientation(),
    );
    let p_out = csl_heating_extended(
        &sys,
        &eq,
        &spectrum,
        &params,
        ModeId::AXIAL_OUT,
        cfg.orientation(),
    );
    let ratio = p_in.power_w / p_out.power_w;
    assert!((35.0..45.0).contains(&ratio), "suppression ratio {ratio}");
}
