//! Command-line front end: experiment planning, parameter sweeps, table
//! reproduction, damping breakdowns, coupled-mode trajectories, and scripted
//! Gaussian-state sessions.

use clap::{Parser, Subcommand, ValueEnum};

use gravbec::condensate::{self, AtomSpecies, CondensateSpec};
use gravbec::config::Config;
use gravbec::constants::DENSE_METAL_DENSITY;
use gravbec::damping;
use gravbec::grav_source::{self, SourceSphere};
use gravbec::metrology::NoiseModel;
use gravbec::mode_dynamics::{self, ModeSystem};
use gravbec::planner::{self, Constraints, ExperimentPlan, SweepAxis, Target, CSV_HEADER};
use gravbec::quantum_channels::GaussianState;
use gravbec::{config, Error, Result};

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Txt,
}

#[derive(Debug, Parser)]
#[command(name = "gravbec", version, about = "Plans and simulates phonon-mode \
responses of a box-trapped BEC to an oscillating source mass.")]
struct Cli {
    /// Configuration file (`[section]` headers, `key = value unit` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "txt")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan one experiment from the configured scheme and constraints.
    Plan,
    /// Sweep one parameter of the configured plan and emit a row per point.
    Sweep,
    /// Reproduce the reference result tables and report pass/fail per cell.
    Tables,
    /// Damping-rate breakdown for the configured mode.
    Damping,
    /// Integrate the coupled mode equations and dump the trajectory.
    Simulate,
    /// Run a scripted Gaussian-state session.
    State {
        /// Script file: one command per line
        /// (modes/thermal/displace/squeeze/two_mode_squeeze/beamsplit/dump).
        script: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let emit = if let Some(path) = &cli.out {
                fs::write(path, &output).map_err(Error::from)
            } else {
                print!("{output}");
                Ok(())
            };
            match emit {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::Config(_) => 2,
        Error::Infeasible(_) => 3,
        Error::Domain(_) | Error::Numeric(_) | Error::Resonance(_) | Error::Io(_) => 4,
    };
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Plan => {
            let cfg = load_config(cli)?;
            let plan = build_plan(&cfg)?;
            Ok(render_plans(std::slice::from_ref(&plan), cli.format))
        }
        Command::Sweep => {
            let cfg = load_config(cli)?;
            let template = build_plan(&cfg)?;
            let axis = build_axis(&cfg)?;
            let rows = planner::sweep(&template, &axis)?;
            Ok(render_plans(&rows, cli.format))
        }
        Command::Tables => {
            let report = planner::reproduce_tables()?;
            Ok(match cli.format {
                Format::Csv => report.to_csv(),
                Format::Txt => report.to_text(),
            })
        }
        Command::Damping => {
            let cfg = load_config(cli)?;
            damping_report(&cfg, cli.format)
        }
        Command::Simulate => {
            let cfg = load_config(cli)?;
            simulate(&cfg)
        }
        Command::State { script } => {
            let text = fs::read_to_string(script)?;
            state_session(&text)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this subcommand requires --config <file>".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Config::parse(&text)
}

fn render_plans(plans: &[ExperimentPlan], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for plan in plans {
                out.push_str(&plan.csv_row());
                out.push('\n');
            }
            out
        }
        Format::Txt => {
            let mut out = String::new();
            for plan in plans {
                out.push_str(&plan.to_text());
                out.push('\n');
            }
            out
        }
    }
}

fn species_from(cfg: &Config) -> Result<AtomSpecies> {
    let name = cfg.keyword("condensate", "species").unwrap_or("rb87");
    if let Some(builtin) = AtomSpecies::by_name(name) {
        return Ok(builtin);
    }
    let mass = cfg.number("condensate", "species_mass").ok_or_else(|| {
        Error::Config(format!(
            "unknown species `{name}`; define it with `species_mass` and `species_lambda`"
        ))
    })?;
    let lambda = cfg.number("condensate", "species_lambda").ok_or_else(|| {
        Error::Config(format!("custom species `{name}` needs `species_lambda`"))
    })?;
    AtomSpecies::new(name, mass, lambda)
}

fn source_from(cfg: &Config, omega: f64) -> Result<SourceSphere> {
    let source = SourceSphere {
        mass: cfg.require_number("source", "mass")?,
        density: cfg.number("source", "density").unwrap_or(DENSE_METAL_DENSITY),
        r_min: cfg.require_number("source", "r_min")?,
        delta_r: cfg.require_number("source", "delta_r")?,
        omega,
        phase: cfg.number("source", "phase").unwrap_or(0.0),
    };
    source.validate()?;
    Ok(source)
}

fn noise_from(cfg: &Config) -> Result<NoiseModel> {
    let defaults = NoiseModel::default();
    let noise = NoiseModel {
        delta_n_det: cfg.number("noise", "delta_n_det").unwrap_or(defaults.delta_n_det),
        atom_rel_fluct: cfg.number("noise", "atom_rel_fluct").unwrap_or(defaults.atom_rel_fluct),
        init_coherent_rel_fluct: cfg
            .number("noise", "init_coherent_rel_fluct")
            .unwrap_or(defaults.init_coherent_rel_fluct),
    };
    noise.validate()?;
    Ok(noise)
}

fn constraints_from(cfg: &Config) -> Result<Constraints> {
    let d = Constraints::default();
    Ok(Constraints {
        temperature: cfg.number("condensate", "temperature").unwrap_or(d.temperature),
        density: cfg.number("condensate", "density").unwrap_or(d.density),
        t_exp: cfg.number("run", "t_exp").unwrap_or(d.t_exp),
        reps: cfg.number("run", "reps").unwrap_or(d.reps),
        snr_target: cfg.number("run", "snr_target").unwrap_or(d.snr_target),
        omega_min: cfg.number("run", "omega_min").unwrap_or(d.omega_min),
        gamma_loss: cfg.number("run", "gamma_loss").unwrap_or(d.gamma_loss),
        max_d_over_l: cfg.number("run", "max_d_over_l").unwrap_or(d.max_d_over_l),
        length: cfg.number("condensate", "length"),
        noise: noise_from(cfg)?,
    })
}

fn target_from(cfg: &Config) -> Result<Target> {
    match cfg.keyword("run", "target").unwrap_or("acceleration") {
        "acceleration" => Ok(Target::Acceleration),
        "gradient" => Ok(Target::Gradient),
        other => Err(Error::Config(format!(
            "unknown target `{other}`; expected acceleration or gradient"
        ))),
    }
}

fn build_plan(cfg: &Config) -> Result<ExperimentPlan> {
    let species = species_from(cfg)?;
    let constraints = constraints_from(cfg)?;
    // The drive frequency is resolved by the planner; the placeholder only
    // satisfies the source validation.
    let source = source_from(cfg, 1.0)?;
    let scheme = cfg.keyword("run", "scheme").unwrap_or("direct");
    match scheme {
        "direct" => planner::plan_direct(&source, &species, &constraints),
        "two_mode_squeeze" => {
            planner::plan_two_mode(&source, &species, target_from(cfg)?, &constraints)
        }
        "single_mode_squeeze" => {
            planner::plan_single_mode(&source, &species, target_from(cfg)?, &constraints)
        }
        other => Err(Error::Config(format!(
            "unknown scheme `{other}`; expected direct, two_mode_squeeze, or single_mode_squeeze"
        ))),
    }
}

fn build_axis(cfg: &Config) -> Result<SweepAxis> {
    let parameter = cfg.require_keyword("sweep", "parameter")?.to_string();
    let unit = cfg.keyword("sweep", "unit");
    let from = config::convert_sweep_value(&parameter, cfg.require_number("sweep", "from")?, unit)?;
    let to = config::convert_sweep_value(&parameter, cfg.require_number("sweep", "to")?, unit)?;
    let points = cfg.require_number("sweep", "points")?;
    if points < 1.0 || points.fract() != 0.0 {
        return Err(Error::Config("sweep points must be a positive integer".into()));
    }
    let log = match cfg.keyword("sweep", "scale").unwrap_or("lin") {
        "lin" => false,
        "log" => true,
        other => {
            return Err(Error::Config(format!("unknown scale `{other}`; expected lin or log")))
        }
    };
    Ok(SweepAxis { parameter, from, to, points: points as usize, log })
}

fn spec_from(cfg: &Config) -> Result<CondensateSpec> {
    let species = species_from(cfg)?;
    let spec = CondensateSpec {
        species,
        length: cfg.require_number("condensate", "length")?,
        density: cfg.number("condensate", "density").unwrap_or(1e19),
        temperature: cfg.number("condensate", "temperature").unwrap_or(1e-9),
        atom_number: cfg.number("condensate", "atom_number"),
        cross_section: cfg.number("condensate", "cross_section"),
    };
    spec.validate()?;
    Ok(spec)
}

fn mode_index(cfg: &Config, key: &str) -> Result<Option<u32>> {
    match cfg.number("run", key) {
        None => Ok(None),
        Some(v) => {
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Error::Config(format!("`{key}` must be a positive integer")));
            }
            Ok(Some(v as u32))
        }
    }
}

fn damping_report(cfg: &Config, format: Format) -> Result<String> {
    let spec = spec_from(cfg)?;
    let params = condensate::derive_params(&spec)?;
    let n = mode_index(cfg, "mode_n")?.unwrap_or(1);
    let omega_n = condensate::mode_frequency(&params, spec.length, n)?;
    let k_n = condensate::wavenumber(spec.length, n)?;
    let gamma_loss =
        cfg.number("run", "gamma_loss").unwrap_or(damping::DEFAULT_LOSS_RATE);
    let b = damping::total_rate(&spec, &params, omega_n, k_n, gamma_loss)?;
    Ok(match format {
        Format::Csv => format!(
            "n,omega_n_rad_s,gamma_landau,gamma_beliaev,gamma_loss,gamma_total,regime\n\
             {n},{omega_n:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}\n",
            b.gamma_landau,
            b.gamma_beliaev,
            b.gamma_loss,
            b.gamma_total,
            b.regime.label()
        ),
        Format::Txt => format!(
            "damping breakdown, mode n = {n} (omega_n = {omega_n:.6e} rad/s)\n\
             landau  : {:.6e} 1/s\n\
             beliaev : {:.6e} 1/s\n\
             loss    : {:.6e} 1/s\n\
             total   : {:.6e} 1/s\n\
             regime  : {}\n",
            b.gamma_landau,
            b.gamma_beliaev,
            b.gamma_loss,
            b.gamma_total,
            b.regime.label()
        ),
    })
}

fn simulate(cfg: &Config) -> Result<String> {
    let spec = spec_from(cfg)?;
    let params = condensate::derive_params(&spec)?;
    let n = mode_index(cfg, "mode_n")?.unwrap_or(1);
    let l = mode_index(cfg, "mode_l")?;
    let omega_drive = cfg.require_number("run", "drive_frequency")?;
    let drive_phase = cfg.number("run", "drive_phase").unwrap_or(0.0);
    let t_span = cfg.require_number("run", "t_span")?;
    let gamma_loss =
        cfg.number("run", "gamma_loss").unwrap_or(damping::DEFAULT_LOSS_RATE);
    let source = source_from(cfg, omega_drive)?;
    let r0 = source.equilibrium_distance(spec.length)?;
    let amp = grav_source::oscillation_amplitudes(&source, r0)?;

    let mut indices = vec![n];
    if let Some(l) = l {
        if l == n {
            return Err(Error::Config("`mode_l` must differ from `mode_n`".into()));
        }
        indices.push(l);
    }
    let mut omega = Vec::new();
    let mut gamma = Vec::new();
    let mut f = Vec::new();
    let mut sbar = Vec::new();
    for &i in &indices {
        let omega_i = condensate::mode_frequency(&params, spec.length, i)?;
        let k_i = condensate::wavenumber(spec.length, i)?;
        let partner = indices.iter().copied().find(|&j| j != i).unwrap_or(i + 1);
        let moments =
            mode_dynamics::driving_moments(&amp, &spec, &params, omega_drive, i, partner, 0.0)?;
        omega.push(omega_i);
        gamma.push(damping::total_rate(&spec, &params, omega_i, k_i, gamma_loss)?.gamma_total);
        f.push(moments.f_n);
        sbar.push(moments.sbar_n);
    }
    let m = indices.len();
    let mut tbar = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                let moments = mode_dynamics::driving_moments(
                    &amp, &spec, &params, omega_drive, indices[a], indices[b], 0.0,
                )?;
                tbar[a][b] = moments.tbar_nl;
            }
        }
    }
    let system = ModeSystem { indices: indices.clone(), omega, gamma, f, sbar, tbar };
    let omega_max = system.omega.iter().cloned().fold(0.0, f64::max);
    let max_step = (2.0 * std::f64::consts::PI / omega_drive)
        .min(2.0 * std::f64::consts::PI / omega_max)
        / 200.0;
    let step = cfg.number("run", "step").unwrap_or(max_step * (1.0 - 1e-12));
    let initial = vec![(0.0, 0.0); m];
    let traj = mode_dynamics::integrate_coupled_modes(
        &system,
        omega_drive,
        drive_phase,
        &initial,
        t_span,
        step,
    )?;
    Ok(traj.to_csv(&indices))
}

fn state_session(script: &str) -> Result<String> {
    let mut state: Option<GaussianState> = None;
    let mut out = String::new();
    for (idx, raw) in script.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let cmd = parts.next().unwrap();
        let args: Vec<f64> = parts
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!("line {line}: `{s}` is not a number for `{cmd}`"))
                })
            })
            .collect::<Result<_>>()?;
        let need = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "line {line}: `{cmd}` takes {n} argument(s), got {}",
                    args.len()
                )))
            }
        };
        if cmd == "modes" {
            need(1)?;
            state = Some(GaussianState::new_vacuum(args[0] as usize)?);
            continue;
        }
        let st = state.as_mut().ok_or_else(|| {
            Error::Config(format!("line {line}: `{cmd}` before `modes <count>`"))
        })?;
        match cmd {
            "thermal" => {
                // Replaces the state with a thermal state of the given
                // per-mode occupations.
                need(st.modes)?;
                *st = GaussianState::new_thermal(&args)?;
            }
            "displace" => {
                need(3)?;
                st.apply_displacement(args[0] as usize, args[1], args[2])?;
            }
            "squeeze" => {
                need(3)?;
                st.apply_squeeze(args[0] as usize, args[1], args[2])?;
            }
            "two_mode_squeeze" => {
                need(3)?;
                st.apply_two_mode_squeeze(args[0] as usize, args[1] as usize, args[2])?;
            }
            "beamsplit" => {
                need(3)?;
                st.apply_beamsplitter(args[0] as usize, args[1] as usize, args[2])?;
            }
            "dump" => {
                need(0)?;
                st.assert_physical()?;
                for i in 0..st.modes {
                    out.push_str(&format!(
                        "mode {i}: N = {:.9e} (coherent part {:.9e})\n",
                        st.phonon_number(i)?,
                        st.coherent_number(i)?
                    ));
                }
                out.push_str(&format!(
                    "total phonons = {:.9e}, min symplectic eigenvalue = {:.9e}\n",
                    st.total_phonons(),
                    st.min_symplectic_eigenvalue()
                ));
                out.push_str(&st.to_csv());
            }
            other => {
                return Err(Error::Config(format!(
                    "line {line}: unknown command `{other}`; expected modes, thermal, \
                     displace, squeeze, two_mode_squeeze, beamsplit, or dump"
                )))
            }
        }
    }
    if out.is_empty() {
        out.push_str("session complete (no dump command in script)\n");
    }
    Ok(out)
}
