//! Prints the full analysis chain for the reference configuration: trap
//! operating point, two-ion normal modes, collapse-noise and electrical
//! heating rates, and the collapse-rate bound at the reference correlation
//! length.

use csltrap::config::parse_config;
use csltrap::csl::{
    csl_heating_extended, csl_heating_pointlike, exclusion_bound, reference_power, CslParams,
};
use csltrap::modes::{equilibrium, lamb_dicke, mode_spectrum, ModeId};
use csltrap::noise::electrical_heating;
use csltrap::trap::{epsilon_squared, mathieu_params, secular_frequencies, stability_boundaries};

fn main() {
    let cfg = parse_config("").expect("default config");
    let sys = cfg.build_system().expect("reference system");
    let trap = sys.trap();

    let p1 = mathieu_params(trap, sys.ion1());
    let p2 = mathieu_params(trap, sys.ion2());
    let f1 = secular_frequencies(trap, sys.ion1()).unwrap();
    let f2 = secular_frequencies(trap, sys.ion2()).unwrap();
    let (a0, b1) = stability_boundaries(p1.q);
    println!("== single-ion operating points ==");
    println!("ion1: a = {:.12e}, q = {:.12e}", p1.a, p1.q);
    println!("ion2: a = {:.12e}, q = {:.12e}", p2.a, p2.q);
    println!(
        "ion1: f_z = {:.9} kHz, f_r = {:.9} kHz",
        f1.omega_z / TPI / 1e3,
        f1.omega_r / TPI / 1e3
    );
    println!(
        "ion2: f_z = {:.9} kHz, f_r = {:.9} kHz",
        f2.omega_z / TPI / 1e3,
        f2.omega_r / TPI / 1e3
    );
    println!("boundaries at |q1|: a0 = {:.9e}, b1 = {:.9e}", a0, b1);
    println!("eps^2(ion1) = {:.12e}", epsilon_squared(trap, sys.ion1()));

    let eq = equilibrium(&sys);
    println!("\n== crystal ==");
    println!(
        "z1 = {:.12e} m, z2 = {:.12e} m, d = {:.12e} m",
        eq.z1_m, eq.z2_m, eq.separation_m
    );

    let spectrum = mode_spectrum(&sys).unwrap();
    println!("\n== modes ==");
    for id in ModeId::ALL {
        let m = spectrum.mode(id);
        let eta = lamb_dicke(
            &spectrum,
            id,
            cfg.readout.wavelength_nm * 1e-9,
            sys.ion1().mass_kg(),
        );
        println!(
            "{:<10} f = {:.9} kHz  w = [{:.12e}, {:.12e}]  eta = {:.9e}",
            id.key(),
            m.omega / TPI / 1e3,
            m.eigvec[0],
            m.eigvec[1],
            eta
        );
    }

    let params = CslParams {
        lambda_per_s: cfg.csl.lambda_per_s,
        rc_m: cfg.csl.rc_m,
    };
    let noise = cfg.noise_spectrum();
    println!(
        "\n== heating at lambda = {:.1e}/s, rc = {:.1e} m ==",
        params.lambda_per_s, params.rc_m
    );
    for id in ModeId::ALL {
        let ext = csl_heating_extended(&sys, &eq, &spectrum, &params, id, cfg.orientation());
        let pt = csl_heating_pointlike(&sys, &eq, &spectrum, &params, id);
        let el = electrical_heating(&sys, &spectrum, &noise, id, true);
        println!(
            "{:<10} P_csl = {:.12e} W ({:.12e} point)  quanta/s = {:.9e}  P_elec = {:.12e} W",
            id.key(),
            ext.power_w,
            pt.power_w,
            ext.quanta_per_s,
            el.power_w
        );
    }

    println!(
        "\n== collapse-rate bounds at rc = {:.1e} m ==",
        cfg.csl.lambda_rel_rc_m
    );
    for id in ModeId::ALL {
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
        println!(
            "{:<10} p_exp = {:.9e} W  lambda_upper = {:.12e} /s",
            id.key(),
            p_exp,
            curve.points[0].lambda_upper.unwrap()
        );
    }
}

const TPI: f64 = 2.0 * std::f64::consts::PI;
