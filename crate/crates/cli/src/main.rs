//! `gridgas`: command-line driver for grid Lorentz gas experiments.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gridgas::homspace::Region;
use gridgas::lab::{exit, parse_config, run_experiment, ExperimentConfig, ExperimentKind, LabError, ModeSpec, XiGridSpec};

const EXIT_CODES: &str = "Exit codes: 0 pass, 2 acceptance failure, 3 config error, 4 numerical or orbit-cap error.";

#[derive(Parser, Debug)]
#[command(name = "gridgas", version, about = "Boltzmann–Grad experiments for Lorentz gases on unions of grids", after_help = EXIT_CODES)]
struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; outputs are bit-identical for a fixed seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file: CSV for sample streams, JSON for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit log records as JSON lines on stderr.
    #[arg(long, global = true)]
    json_logs: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Commensurability classes, admissible presentation and torus data (JSON).
    Analyze,
    /// Rescaled free path lengths in the finite-radius scatterer scene.
    #[command(after_help = "CSV columns: xi (rescaled free path), mark_j, mark_i (1-based grid hit, empty if censored), impact_w (impact parameter), censored (0/1). One file per radius when several are given.")]
    Simulate(SimulateArgs),
    /// Limiting free path tail estimated on random configurations.
    #[command(name = "limit-tail", after_help = "CSV columns: xi, F_raw (fraction of configurations with an empty cylinder), F_iso (isotonic nonincreasing fit), stderr (binomial), n (samples).")]
    LimitTail(TailArgs),
    /// Trajectories of the limiting random flight.
    #[command(after_help = "CSV columns: traj_id, step (1-based collision index), xi (path length before the collision), mark_j, mark_i (1-based grid hit), w (impact parameter), vx, vy (outgoing velocity), qx, qy (collision position), censored (0/1).")]
    Flight(FlightArgs),
    /// Monte Carlo point counts against the Siegel mean value formula (JSON).
    #[command(name = "siegel-check")]
    SiegelCheck(SiegelArgs),
    /// Scene tail against the limiting tail and the product of class tails.
    #[command(after_help = "CSV columns: xi, F_scene, stderr_scene, F_limit, stderr_limit, F_product, stderr_product (empty for one class).")]
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Scatterer radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    /// Number of samples (scientific notation accepted).
    #[arg(long, value_parser = parse_count)]
    samples: Option<usize>,
    /// Censoring horizon in rescaled units.
    #[arg(long)]
    xi_max: Option<f64>,
    /// Grid for the tail summary, lo:hi:(lin|log)[:count].
    #[arg(long)]
    xi: Option<XiGridSpec>,
}

#[derive(Args, Debug)]
struct TailArgs {
    /// generic, or mark:J,I[:SHIFT] with 1-based mark and |SHIFT| < 1.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<ModeSpec>,
    /// lo:hi:(lin|log)[:count]; log spacing defaults to 16 points per decade.
    #[arg(long)]
    xi: Option<XiGridSpec>,
    #[arg(long, value_parser = parse_count)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct FlightArgs {
    /// Collisions per trajectory.
    #[arg(long, value_parser = parse_count)]
    events: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    trajectories: Option<usize>,
    /// Censoring horizon; a censored step ends its trajectory.
    #[arg(long)]
    xi_max: Option<f64>,
}

#[derive(Args, Debug)]
struct SiegelArgs {
    /// generic, or mark:J,I (the counted grid is the mark's grid).
    #[arg(long, value_parser = parse_mode)]
    mode: Option<ModeSpec>,
    /// box:x0,x1,y0,y1 or ball:cx,cy,r.
    #[arg(long, value_parser = parse_region)]
    region: Option<Region>,
    #[arg(long, value_parser = parse_count)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Scatterer radius of the scene.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    samples: Option<usize>,
    /// Comparison points, lo:hi:(lin|log)[:count]; defaults to 0.5, 1, 2, 4.
    #[arg(long)]
    xi: Option<XiGridSpec>,
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() == n {
        Ok(v)
    } else {
        Err(format!("expected {n} comma-separated numbers in '{s}'"))
    }
}

fn parse_mode(s: &str) -> Result<ModeSpec, String> {
    if s == "generic" {
        return Ok(ModeSpec::Generic);
    }
    let rest = s.strip_prefix("mark:").ok_or_else(|| format!("mode '{s}' is not generic or mark:J,I[:SHIFT]"))?;
    let (mark, shift) = match rest.split_once(':') {
        Some((m, w)) => (m, w.parse::<f64>().map_err(|_| format!("bad shift '{w}'"))?),
        None => (rest, 0.0),
    };
    let idx: Vec<usize> = mark
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad mark index '{x}'")))
        .collect::<Result<_, _>>()?;
    match idx[..] {
        [j, i] => Ok(ModeSpec::Mark { mark: [j, i], shift }),
        _ => Err(format!("mark '{mark}' needs two indices")),
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    if let Some(rest) = s.strip_prefix("box:") {
        let v = parse_floats(rest, 4)?;
        Ok(Region::Box {
            x0: v[0],
            x1: v[1],
            y0: v[2],
            y1: v[3],
        })
    } else if let Some(rest) = s.strip_prefix("ball:") {
        let v = parse_floats(rest, 3)?;
        Ok(Region::Ball {
            center: [v[0], v[1]],
            radius: v[2],
        })
    } else {
        Err(format!("region '{s}' is not box:x0,x1,y0,y1 or ball:cx,cy,r"))
    }
}

fn init_logging(json: bool) {
    let mut b = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"));
    if json {
        b.format(|f, r| {
            let rec = serde_json::json!({
                "level": r.level().to_string(),
                "target": r.target(),
                "message": r.args().to_string(),
            });
            writeln!(f, "{rec}")
        });
    }
    let _ = b.try_init();
}

/// Applies command-line overrides on top of the configuration file.
fn configure(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| LabError::Invalid("--config is required".into()))?;
    let mut cfg = parse_config(path)?;
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.workers = cli.workers.or(cfg.workers);
    let mut csv_out = true;
    let kind = match &cli.command {
        Command::Analyze => {
            csv_out = false;
            ExperimentKind::Analyze
        }
        Command::Simulate(a) => {
            if !a.rho.is_empty() {
                cfg.rho = a.rho.clone();
            }
            cfg.samples = a.samples.or(cfg.samples);
            cfg.xi_max = a.xi_max.or(cfg.xi_max);
            cfg.xi = a.xi.or(cfg.xi);
            ExperimentKind::Simulate
        }
        Command::LimitTail(a) => {
            cfg.mode = a.mode.or(cfg.mode);
            cfg.xi = a.xi.or(cfg.xi);
            cfg.samples = a.samples.or(cfg.samples);
            ExperimentKind::LimitTail
        }
        Command::Flight(a) => {
            cfg.events = a.events.or(cfg.events);
            cfg.trajectories = a.trajectories.or(cfg.trajectories);
            cfg.xi_max = a.xi_max.or(cfg.xi_max);
            ExperimentKind::Flight
        }
        Command::SiegelCheck(a) => {
            csv_out = false;
            cfg.mode = a.mode.or(cfg.mode);
            cfg.region = a.region.or(cfg.region);
            cfg.samples = a.samples.or(cfg.samples);
            ExperimentKind::SiegelCheck
        }
        Command::Compare(a) => {
            if let Some(r) = a.rho {
                cfg.rho = vec![r];
            }
            cfg.samples = a.samples.or(cfg.samples);
            cfg.xi = a.xi.or(cfg.xi);
            ExperimentKind::Compare
        }
    };
    cfg.experiment = Some(kind);
    if let Some(out) = &cli.out {
        if csv_out {
            cfg.outputs.csv = Some(out.clone());
        } else {
            cfg.outputs.json = Some(out.clone());
        }
    }
    let text = serde_json::to_string(&cfg).map_err(LabError::Json)?;
    gridgas::lab::parse_config_str(&text, "<command line>")
}

fn run(cli: &Cli) -> Result<bool, LabError> {
    let cfg = configure(cli)?;
    log::info!("running {:?} with seed {}", cfg.experiment.expect("set"), cfg.seed.unwrap_or(0));
    let outcome = run_experiment(&cfg)?;
    outcome.write(&cfg.outputs)?;
    let summary = serde_json::to_string_pretty(&outcome.summary)?;
    let _ = writeln!(std::io::stdout().lock(), "{summary}");
    if let Some(stats) = &outcome.stats {
        for row in &stats.rows {
            log::info!(
                "{} {}: {} vs threshold {}",
                if row.pass { "PASS" } else { "FAIL" },
                row.name,
                row.statistic,
                row.threshold
            );
        }
    }
    Ok(outcome.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.json_logs);
    let code = match run(&cli) {
        Ok(true) => exit::PASS,
        Ok(false) => exit::ACCEPTANCE_FAILURE,
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
