//! `csltrap`: collapse-model heating analysis for a mixed two-ion crystal in
//! a linear Paul trap. Every subcommand reads one configuration file (all
//! keys optional; the defaults are the barium + porphyrin-barrel reference
//! setup) and writes CSV files that embed the resolved configuration.
//!
//! Exit codes: 0 success, 1 configuration or I/O problem, 2 physics failure
//! (unconfined ion, misaligned crystal, soft mode, degenerate bound).

mod emit;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use csltrap::config::{noise_table_from_csv, parse_config, ConfigError, RunConfig};
use csltrap::csl::{
    csl_heating_extended, csl_heating_pointlike, exclusion_bound, reference_power, CslParams,
    ExclusionCurve,
};
use csltrap::modes::{
    alignment_check, equilibrium, lamb_dicke, mode_spectrum, stiffness, ModeId, TwoIonSystem,
};
use csltrap::noise::{discrimination_report, NoiseSpectrum};
use csltrap::readout::{carrier_prob, plan_readout};
use csltrap::scan::{frequency_table, run_scan, scan_curves, ScanSpec, ScanVariable};
use csltrap::trap::{
    mathieu_params, secular_frequencies, stability_boundaries, stability_classify,
};
use csltrap::PhysicsError;

use emit::{emit, num, opt_num};

#[derive(Debug)]
pub enum CliError {
    /// Configuration or I/O problem -> exit code 1.
    Config(String),
    /// The configuration is valid but the physics rejects it -> exit code 2.
    Physics(String),
}

impl CliError {
    fn io(path: &Path, err: &std::io::Error) -> CliError {
        CliError::Config(format!("{}: {err}", path.display()))
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Tags a physics failure with the operation that hit it.
fn phys(op: &str) -> impl Fn(PhysicsError) -> CliError + '_ {
    move |e| CliError::Physics(format!("{op}: {e}"))
}

#[derive(Parser)]
#[command(
    name = "csltrap",
    version,
    about = "Collapse-model heating analysis for a two-ion crystal in a linear Paul trap"
)]
struct Cli {
    /// Configuration file; omit for the built-in reference setup.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for the CSV output.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mathieu stability and confinement verdicts for both ions and the crystal
    Stability,
    /// Equilibrium positions, stiffness matrix, normal modes and couplings
    Modes,
    /// Collapse-noise heating per mode, point-like and extended
    CslHeating,
    /// Collapse-rate exclusion curves over the correlation-length grid
    Bounds(BoundsArgs),
    /// Electrical-noise heating with mechanism-discrimination exponents
    NoiseHeating(NoiseArgs),
    /// Sideband readout plans per mode
    Readout(ReadoutArgs),
    /// Sweep one variable; chart feasibility, frequencies and relative bounds
    Scan(ScanArgs),
    /// Emit every dataset (bounds, sweeps, frequency charts) in one pass
    ReproduceFigures,
}

#[derive(Args)]
struct BoundsArgs {
    /// Restrict output to one mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Smallest correlation length of the grid, m.
    #[arg(long)]
    rc_min: Option<f64>,
    /// Largest correlation length of the grid, m.
    #[arg(long)]
    rc_max: Option<f64>,
    /// Number of (log-spaced) grid points.
    #[arg(long)]
    rc_points: Option<usize>,
    /// Interrogation time entering the heating budget, s.
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Args)]
struct NoiseArgs {
    /// Project the field noise onto the mode eigenvector instead of summing
    /// the raw per-ion couplings.
    #[arg(long)]
    mode_projected: bool,
}

#[derive(Args)]
struct ReadoutArgs {
    /// Score the carrier false positive with the strictly-as-printed
    /// dimensional prefactor instead of the normalized envelope.
    #[arg(long)]
    strict_paper_formulas: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// Which quantity to sweep.
    #[arg(long, value_enum)]
    variable: VariableArg,
    /// Correlation length at which relative bounds are quoted, m.
    #[arg(long)]
    lambda_rel_rc: Option<f64>,
    /// Also emit the whole exclusion curve for every grid point
    /// (quadratic cost).
    #[arg(long)]
    full_curve: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AxialIn,
    AxialOut,
    RadialIn,
    RadialOut,
}

impl From<ModeArg> for ModeId {
    fn from(m: ModeArg) -> ModeId {
        match m {
            ModeArg::AxialIn => ModeId::AXIAL_IN,
            ModeArg::AxialOut => ModeId::AXIAL_OUT,
            ModeArg::RadialIn => ModeId::RADIAL_IN,
            ModeArg::RadialOut => ModeId::RADIAL_OUT,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    VEnd,
    VRf,
    MassRatio,
    ChargeRatio,
    NRings,
}

impl From<VariableArg> for ScanVariable {
    fn from(v: VariableArg) -> ScanVariable {
        match v {
            VariableArg::VEnd => ScanVariable::VEnd,
            VariableArg::VRf => ScanVariable::VRf,
            VariableArg::MassRatio => ScanVariable::MassRatio,
            VariableArg::ChargeRatio => ScanVariable::ChargeRatio,
            VariableArg::NRings => ScanVariable::NRings,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Physics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Loaded configuration plus everything derived from it that commands share.
struct Ctx {
    cfg: RunConfig,
    /// The resolved configuration text embedded in every CSV.
    cfg_toml: String,
    noise: NoiseSpectrum,
    out: PathBuf,
}

fn load(cli_config: &Option<PathBuf>, out: &Path) -> Result<Ctx, CliError> {
    let text = match cli_config {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::io(path, &e))?,
        None => String::new(),
    };
    let cfg = parse_config(&text)?;
    let noise = match &cfg.noise.table {
        Some(rel) => {
            // resolve the table next to the config file (or the working
            // directory when the config is built in)
            let base = cli_config
                .as_deref()
                .and_then(Path::parent)
                .unwrap_or_else(|| Path::new("."));
            let path = base.join(rel);
            let table = fs::read_to_string(&path).map_err(|e| CliError::io(&path, &e))?;
            noise_table_from_csv(&table)?
        }
        None => cfg.noise_spectrum(),
    };
    fs::create_dir_all(out).map_err(|e| CliError::io(out, &e))?;
    Ok(Ctx {
        cfg_toml: cfg.to_toml_string(),
        cfg,
        noise,
        out: out.to_path_buf(),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut ctx = load(&cli.config, &cli.out)?;
    match cli.command {
        Command::Stability => cmd_stability(&ctx),
        Command::Modes => cmd_modes(&ctx),
        Command::CslHeating => cmd_csl_heating(&ctx),
        Command::Bounds(args) => {
            if let Some(v) = args.rc_min {
                ctx.cfg.csl.rc_min_m = v;
            }
            if let Some(v) = args.rc_max {
                ctx.cfg.csl.rc_max_m = v;
            }
            if let Some(v) = args.rc_points {
                ctx.cfg.csl.rc_points = v;
            }
            if let Some(v) = args.tau {
                ctx.cfg.csl.tau_s = v;
            }
            revalidate(&mut ctx)?;
            let modes: Vec<ModeId> = match args.mode {
                Some(m) => vec![m.into()],
                None => ModeId::ALL.to_vec(),
            };
            cmd_bounds(&ctx, &modes)
        }
        Command::NoiseHeating(args) => cmd_noise_heating(&ctx, args.mode_projected),
        Command::Readout(args) => cmd_readout(&ctx, args.strict_paper_formulas),
        Command::Scan(args) => {
            if let Some(v) = args.lambda_rel_rc {
                ctx.cfg.csl.lambda_rel_rc_m = v;
            }
            revalidate(&mut ctx)?;
            cmd_scan(&ctx, args.variable.into(), args.full_curve)
        }
        Command::ReproduceFigures => cmd_reproduce_figures(&ctx),
    }
}

/// Re-checks the configuration after command-line overrides and refreshes the
/// embedded text.
fn revalidate(ctx: &mut Ctx) -> Result<(), CliError> {
    ctx.cfg.validate()?;
    ctx.cfg_toml = ctx.cfg.to_toml_string();
    Ok(())
}

fn build_system(ctx: &Ctx, op: &str) -> Result<TwoIonSystem, CliError> {
    ctx.cfg.build_system().map_err(phys(op))
}

fn cmd_stability(ctx: &Ctx) -> Result<(), CliError> {
    let trap = ctx.cfg.build_trap();
    let ion1 = ctx
        .cfg
        .build_ion1()
        .map_err(phys("stability: build_ion1"))?;
    let ion2 = ctx
        .cfg
        .build_ion2()
        .map_err(phys("stability: build_ion2"))?;

    let mut rows = Vec::new();
    let mut all_confined = true;
    for (label, ion) in [("ion1", &ion1), ("ion2", &ion2)] {
        let p = mathieu_params(&trap, ion);
        let (a0, b1) = stability_boundaries(p.q.abs());
        let verdict = stability_classify(p);
        let freqs = secular_frequencies(&trap, ion);
        all_confined &= verdict.stable && freqs.is_ok();
        let (fz, fr) = match freqs {
            Ok(f) => {
                let tpi = 2.0 * std::f64::consts::PI;
                (Some(f.omega_z / tpi), Some(f.omega_r / tpi))
            }
            Err(_) => (None, None),
        };
        rows.push(format!(
            "{label},{},{},{},{},{},{},{},{}",
            num(p.a),
            num(p.q),
            num(a0),
            num(b1),
            verdict.stable,
            reason_key(verdict),
            opt_num(fz),
            opt_num(fr),
        ));
    }

    let crystal = TwoIonSystem::new(trap, ion1, ion2);
    let (aligned, crystal_reason) = match &crystal {
        Ok(sys) => {
            let ok = alignment_check(sys);
            (ok, if ok { "aligned" } else { "misaligned" })
        }
        Err(_) => (false, "unconfined"),
    };
    rows.push(format!(
        "crystal,,,,,{},{crystal_reason},,",
        all_confined && aligned
    ));

    emit(
        &ctx.out,
        "stability.csv",
        &ctx.cfg_toml,
        &[],
        "subject,a,q,a0,b1,stable,reason,f_z_hz,f_r_hz",
        &rows,
    )
}

fn reason_key(v: csltrap::trap::StabilityVerdict) -> &'static str {
    use csltrap::trap::StabilityReason::*;
    match v.reason {
        Ok => "ok",
        ANonNegative => "a_non_negative",
        BelowA0 => "below_a0",
        AboveB1 => "above_b1",
    }
}

fn cmd_modes(ctx: &Ctx) -> Result<(), CliError> {
    let sys = build_system(ctx, "modes: build_system")?;
    let eq = equilibrium(&sys);
    let k = stiffness(&sys).map_err(phys("modes: stiffness"))?;
    let spectrum = mode_spectrum(&sys).map_err(phys("modes: mode_spectrum"))?;

    emit(
        &ctx.out,
        "crystal.csv",
        &ctx.cfg_toml,
        &[],
        "z1_m,z2_m,separation_m,k11,k12,k22,k33,k34,k44",
        &[format!(
            "{},{},{},{},{},{},{},{},{}",
            num(eq.z1_m),
            num(eq.z2_m),
            num(eq.separation_m),
            num(k.k11),
            num(k.k12),
            num(k.k22),
            num(k.k33),
            num(k.k34),
            num(k.k44)
        )],
    )?;

    let wavelength_m = ctx.cfg.readout.wavelength_nm * 1e-9;
    let m1 = sys.ion1().mass_kg();
    let rows: Vec<String> = ModeId::ALL
        .iter()
        .map(|&id| {
            let m = spectrum.mode(id);
            format!(
                "{},{},{},{},{},{},{}",
                id.key(),
                num(m.omega),
                num(m.omega / (2.0 * std::f64::consts::PI)),
                num(m.eigvec[0]),
                num(m.eigvec[1]),
                m.degeneracy,
                num(lamb_dicke(&spectrum, id, wavelength_m, m1)),
            )
        })
        .collect();
    emit(
        &ctx.out,
        "modes.csv",
        &ctx.cfg_toml,
        &[],
        "mode,omega_rad_s,freq_hz,w1,w2,degeneracy,eta",
        &rows,
    )
}

fn cmd_csl_heating(ctx: &Ctx) -> Result<(), CliError> {
    let sys = build_system(ctx, "csl-heating: build_system")?;
    let eq = equilibrium(&sys);
    let spectrum = mode_spectrum(&sys).map_err(phys("csl-heating: mode_spectrum"))?;
    let params = CslParams {
        lambda_per_s: ctx.cfg.csl.lambda_per_s,
        rc_m: ctx.cfg.csl.rc_m,
    };
    let rows: Vec<String> = ModeId::ALL
        .iter()
        .map(|&id| {
            let point = csl_heating_pointlike(&sys, &eq, &spectrum, &params, id);
            let ext =
                csl_heating_extended(&sys, &eq, &spectrum, &params, id, ctx.cfg.orientation());
            format!(
                "{},{},{},{},{},{}",
                id.key(),
                num(spectrum.mode(id).omega),
                num(point.power_w),
                num(point.quanta_per_s),
                num(ext.power_w),
                num(ext.quanta_per_s),
            )
        })
        .collect();
    emit(
        &ctx.out,
        "csl_heating.csv",
        &ctx.cfg_toml,
        &[],
        "mode,omega_rad_s,p_pointlike_w,quanta_pointlike_per_s,p_extended_w,quanta_extended_per_s",
        &rows,
    )
}

fn bounds_rows(curve: &ExclusionCurve) -> Vec<String> {
    curve
        .points
        .iter()
        .map(|p| format!("{},{}", num(p.rc_m), opt_num(p.lambda_upper)))
        .collect()
}

fn cmd_bounds(ctx: &Ctx, modes: &[ModeId]) -> Result<(), CliError> {
    let sys = build_system(ctx, "bounds: build_system")?;
    let spectrum = mode_spectrum(&sys).map_err(phys("bounds: mode_spectrum"))?;
    let grid = ctx.cfg.rc_grid();
    for &mode in modes {
        let p_exp = reference_power(
            spectrum.mode(mode).omega,
            ctx.cfg.csl.p_exp_factor,
            ctx.cfg.csl.tau_s,
        );
        let curve = exclusion_bound(&sys, &spectrum, mode, &grid, p_exp, ctx.cfg.orientation())
            .map_err(phys("bounds: exclusion_bound"))?;
        emit(
            &ctx.out,
            &format!("bounds_{}.csv", mode.key()),
            &ctx.cfg_toml,
            &[("mode", mode.key().to_string()), ("p_exp_w", num(p_exp))],
            "rc_m,lambda_upper_per_s",
            &bounds_rows(&curve),
        )?;
    }
    Ok(())
}

fn cmd_noise_heating(ctx: &Ctx, mode_projected: bool) -> Result<(), CliError> {
    let sys = build_system(ctx, "noise-heating: build_system")?;
    let spectrum = mode_spectrum(&sys).map_err(phys("noise-heating: mode_spectrum"))?;
    let params = CslParams {
        lambda_per_s: ctx.cfg.csl.lambda_per_s,
        rc_m: ctx.cfg.csl.rc_m,
    };
    let report = discrimination_report(
        &sys,
        &spectrum,
        &params,
        &ctx.noise,
        ctx.cfg.orientation(),
        mode_projected,
    );
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{}",
                r.mode.key(),
                num(spectrum.mode(r.mode).omega),
                num(r.p_csl_w),
                num(r.p_electrical_w),
                num(r.ratio),
                num(r.csl_charge_exponent),
                num(r.csl_mass_exponent),
                num(r.electrical_charge_exponent),
                num(r.electrical_mass_exponent),
            )
        })
        .collect();
    emit(
        &ctx.out,
        "noise_heating.csv",
        &ctx.cfg_toml,
        &[("mode_projected", mode_projected.to_string())],
        "mode,omega_rad_s,p_csl_w,p_electrical_w,csl_to_electrical,\
         csl_charge_exp,csl_mass_exp,elec_charge_exp,elec_mass_exp",
        &rows,
    )
}

fn cmd_readout(ctx: &Ctx, strict: bool) -> Result<(), CliError> {
    let sys = build_system(ctx, "readout: build_system")?;
    let spectrum = mode_spectrum(&sys).map_err(phys("readout: mode_spectrum"))?;
    let wavelength_m = ctx.cfg.readout.wavelength_nm * 1e-9;
    let omega0 = 2.0 * std::f64::consts::PI * ctx.cfg.readout.omega0_hz;
    let mut rows = Vec::new();
    for id in ModeId::ALL {
        let plan = plan_readout(
            &spectrum,
            id,
            wavelength_m,
            sys.ion1().mass_kg(),
            omega0,
            ctx.cfg.readout.min_discrimination,
        )
        .map_err(phys("readout: plan_readout"))?;
        let (p_false, discrimination, feasible) = if strict {
            // worst case of the strictly-printed carrier form over the pulse
            let p = carrier_prob(omega0, spectrum.mode(id).omega, plan.tau_read_s, true);
            (p, 1.0 / p, 1.0 / p >= ctx.cfg.readout.min_discrimination)
        } else {
            (plan.p_false, plan.discrimination, plan.feasible)
        };
        rows.push(format!(
            "{},{},{},{},{},{},{},{}",
            id.key(),
            num(spectrum.mode(id).omega),
            num(plan.eta),
            num(plan.tau_read_s),
            num(plan.p_signal),
            num(p_false),
            num(discrimination),
            feasible,
        ));
    }
    emit(
        &ctx.out,
        "readout.csv",
        &ctx.cfg_toml,
        &[("strict_paper_formulas", strict.to_string())],
        "mode,omega_rad_s,eta,tau_read_s,p_signal,p_false,discrimination,feasible",
        &rows,
    )
}

fn scan_header(variable: ScanVariable) -> String {
    let mut h = format!("{},stable1,stable2,aligned,soft_mode", variable.key());
    for prefix in ["omega", "eta", "lambda_rel"] {
        for id in ModeId::ALL {
            let _ = write!(h, ",{}_{}", prefix, id.key());
        }
    }
    h
}

fn scan_rows(result: &csltrap::scan::ScanResult) -> Vec<String> {
    result
        .rows
        .iter()
        .map(|r| {
            let mut line = format!(
                "{},{},{},{},{}",
                num(r.value),
                r.flags.stable1,
                r.flags.stable2,
                r.flags.aligned,
                r.flags.soft_mode
            );
            for i in 0..4 {
                let _ = write!(line, ",{}", opt_num(r.omegas.map(|o| o[i])));
            }
            for i in 0..4 {
                let _ = write!(line, ",{}", opt_num(r.etas.map(|e| e[i])));
            }
            for i in 0..4 {
                let _ = write!(line, ",{}", opt_num(r.lambda_rel[i]));
            }
            line
        })
        .collect()
}

fn cmd_scan(ctx: &Ctx, variable: ScanVariable, full_curve: bool) -> Result<(), CliError> {
    let spec = ScanSpec::default_for(variable, &ctx.cfg).map_err(phys("scan: default grid"))?;
    let result = run_scan(&ctx.cfg, &spec).map_err(phys("scan: run_scan"))?;
    let mut params = vec![
        ("variable", variable.key().to_string()),
        ("rc_eval_m", num(result.rc_eval_m)),
    ];
    for (i, id) in ModeId::ALL.iter().enumerate() {
        params.push((
            "reference_bound",
            format!("{} {}", id.key(), opt_num(result.reference_bounds[i])),
        ));
    }
    emit(
        &ctx.out,
        &format!("scan_{}.csv", variable.key()),
        &ctx.cfg_toml,
        &params,
        &scan_header(variable),
        &scan_rows(&result),
    )?;

    if full_curve {
        let curves = scan_curves(&ctx.cfg, &spec).map_err(phys("scan: scan_curves"))?;
        let mut rows = Vec::new();
        for c in &curves {
            for (i, id) in ModeId::ALL.iter().enumerate() {
                if let Some(curve) = &c.curves[i] {
                    for p in &curve.points {
                        rows.push(format!(
                            "{},{},{},{}",
                            num(c.value),
                            id.key(),
                            num(p.rc_m),
                            opt_num(p.lambda_upper)
                        ));
                    }
                }
            }
        }
        emit(
            &ctx.out,
            &format!("scan_{}_curves.csv", variable.key()),
            &ctx.cfg_toml,
            &[("variable", variable.key().to_string())],
            &format!("{},mode,rc_m,lambda_upper_per_s", variable.key()),
            &rows,
        )?;
    }
    Ok(())
}

fn cmd_freqs(ctx: &Ctx, variable: ScanVariable) -> Result<(), CliError> {
    let spec = ScanSpec::default_for(variable, &ctx.cfg).map_err(phys("scan: default grid"))?;
    let table = frequency_table(&ctx.cfg, &spec).map_err(phys("scan: frequency_table"))?;
    let mut header = format!("{},stable1,stable2,aligned,soft_mode", variable.key());
    for id in ModeId::ALL {
        let _ = write!(header, ",omega_{}", id.key());
    }
    let rows: Vec<String> = table
        .iter()
        .map(|r| {
            let mut line = format!(
                "{},{},{},{},{}",
                num(r.value),
                r.flags.stable1,
                r.flags.stable2,
                r.flags.aligned,
                r.flags.soft_mode
            );
            for i in 0..4 {
                let _ = write!(line, ",{}", opt_num(r.omegas.map(|o| o[i])));
            }
            line
        })
        .collect();
    emit(
        &ctx.out,
        &format!("freqs_{}.csv", variable.key()),
        &ctx.cfg_toml,
        &[("variable", variable.key().to_string())],
        &header,
        &rows,
    )
}

fn cmd_reproduce_figures(ctx: &Ctx) -> Result<(), CliError> {
    cmd_bounds(ctx, &ModeId::ALL)?;
    for variable in [
        ScanVariable::VEnd,
        ScanVariable::VRf,
        ScanVariable::MassRatio,
        ScanVariable::ChargeRatio,
        ScanVariable::NRings,
    ] {
        cmd_scan(ctx, variable, false)?;
    }
    for variable in [ScanVariable::VEnd, ScanVariable::VRf] {
        cmd_freqs(ctx, variable)?;
    }
    Ok(())
}
