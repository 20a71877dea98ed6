//! Batch front end: `recover` runs scenarios, `replay` re-simulates a
//! saved gait.
//!
//! Exit codes: 0 success, 1 unrecoverable morphology, 2 configuration or
//! I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::artifacts::{
    to_json, write_convergence_csv, write_file, ParamsFile, ResultFile, CONVERGENCE_FILE, PARAMS_FILE, RESULT_FILE,
    SCHEMA_VERSION, TRAJECTORY_FILE,
};
use crate::de::{self, RecoveryResult};
use crate::error::{Error, Result};
use crate::gait::GaitSchedule;
use crate::morphology::{validate_morphology, MorphologyVector, RobotGeometry};
use crate::objective::{extract_metrics, Metrics, ObjectiveWeights, RecoveryProblem};
use crate::scenario::{bundled, Scenario};
use crate::sim::{self, BodyTrajectory, SimConfig};
use crate::trajectory::GaitParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNRECOVERABLE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hexapod-recovery", version, about = "Gait recovery for hexapods with lost legs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimise gaits for a damage scenario and write per-seed artifacts.
    Recover(RecoverArgs),
    /// Re-simulate a saved gait and write its body trajectory.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    pub scenario: String,
    /// Seeds to run, comma separated; overrides the scenario's list.
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<u64>,
    /// Output root; artifacts go to <out>/<scenario>/seed_<n>/.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the planned gait schedule and exit.
    #[arg(long)]
    pub dry_run: bool,
    /// Show angles in degrees on the console. Files always use radians.
    #[arg(long)]
    pub degrees: bool,
    /// Worker threads for candidate evaluation.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A params.json written by `recover`.
    #[arg(long)]
    pub params: PathBuf,
    /// Morphology to walk with; defaults to the one stored with the params.
    #[arg(long)]
    pub morphology: Option<MorphologyVector>,
    /// Geometry JSON; defaults to the built-in robot.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Trajectory CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub degrees: bool,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unrecoverable(_) => EXIT_UNRECOVERABLE,
        _ => EXIT_CONFIG,
    }
}

/// Run a parsed command line and map the outcome to an exit code,
/// printing any error to stderr.
pub fn main_with(cli: Cli) -> i32 {
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Recover(args) => recover(&args),
        Command::Replay(args) => replay(&args),
    }
}

fn load_scenario(name_or_path: &str) -> Result<Scenario> {
    let path = Path::new(name_or_path);
    if !path.exists() {
        if let Some(s) = bundled(name_or_path) {
            return Ok(s);
        }
    }
    Scenario::load(path)
}

fn check_recoverable(m: &MorphologyVector) -> Result<()> {
    match validate_morphology(m).diagnostic() {
        Some(why) => Err(Error::Unrecoverable(format!("{m}: {why}"))),
        None => Ok(()),
    }
}

struct Angle(f64, bool);

impl std::fmt::Display for Angle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.1 {
            write!(f, "{:.2} deg", self.0.to_degrees())
        } else {
            write!(f, "{:.4} rad", self.0)
        }
    }
}

fn describe_schedule(s: &GaitSchedule) -> String {
    let mut out = format!(
        "gait: {} (sigma = {}, period = {} s, duty factor = {:.3})\n",
        s.kind().name(),
        s.sigma(),
        s.period(),
        s.duty_factor()
    );
    for leg in s.scheduled_legs() {
        let w = s.swing_window(leg).expect("scheduled leg");
        out.push_str(&format!("  leg {leg}: swing [{:.4}, {:.4})\n", w.start, w.end));
    }
    out
}

fn describe_metrics(m: &Metrics, fell: bool, degrees: bool) -> String {
    format!(
        "x_f = {:.4} m, y_f = {:.4} m, yaw_f = {}, roll amp = {}, pitch amp = {}{}",
        m.x_f,
        m.y_f,
        Angle(m.psi_f, degrees),
        Angle(m.d_phi, degrees),
        Angle(m.d_theta, degrees),
        if fell { ", FELL" } else { "" }
    )
}

/// The walk recorded for a gait: the plain simulation, without the
/// feasibility screen the optimiser applies.
pub fn walk(
    m: &MorphologyVector,
    period: f64,
    p: &GaitParams,
    g: &RobotGeometry,
    cfg: &SimConfig,
) -> Result<BodyTrajectory> {
    let s = crate::gait::plan_sequence(m, period)?;
    sim::simulate(m, &s, p, g, cfg)
}

fn trajectory_csv(traj: &BodyTrajectory) -> Vec<u8> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).expect("writing to memory");
    buf
}

fn recover(args: &RecoverArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    check_recoverable(&scenario.morphology)?;
    let geometry = scenario.geometry()?;
    let sim_cfg = scenario.sim_config();
    let weights = scenario.objective_weights();
    let problem =
        RecoveryProblem::with_period(scenario.morphology, geometry.clone(), sim_cfg, weights, scenario.gait_period)?;

    if args.dry_run {
        print!("scenario {} ({})\n{}", scenario.name, scenario.morphology, describe_schedule(&problem.schedule));
        return Ok(());
    }
    if args.parallel == 0 {
        return Err(Error::Config("--parallel must be at least 1".into()));
    }

    let seeds = if args.seed.is_empty() { scenario.seeds.clone() } else { args.seed.clone() };
    let root = match (&args.out, &scenario.output) {
        (Some(out), _) => out.clone(),
        (None, Some(out)) => scenario.resolve(out),
        (None, None) => PathBuf::from("runs"),
    };
    let pool = (args.parallel > 1)
        .then(|| rayon::ThreadPoolBuilder::new().num_threads(args.parallel).build())
        .transpose()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    for seed in seeds {
        let mut cfg = scenario.de_config(seed);
        cfg.parallel = pool.is_some();
        let progress = |p: &de::Progress| {
            info!(
                "{} seed {seed} gen {}: best {:.6} mean {:.6} feasible {}",
                scenario.name, p.generation, p.best_f, p.mean_f, p.feasible_count
            )
        };
        let result = match &pool {
            Some(pool) => pool.install(|| de::run(&problem, &cfg, progress))?,
            None => de::run(&problem, &cfg, progress)?,
        };
        let dir = root.join(&scenario.name).join(format!("seed_{seed}"));
        let traj = write_run(&dir, &scenario, &geometry, &sim_cfg, &result)?;
        println!(
            "{} seed {seed}: F = {:.6}; {}",
            scenario.name,
            result.best_f,
            describe_metrics(&extract_metrics(&traj), traj.fell, args.degrees)
        );
    }
    Ok(())
}

/// Write the four per-seed artifacts and return the recorded walk.
pub fn write_run(
    dir: &Path,
    scenario: &Scenario,
    geometry: &RobotGeometry,
    sim_cfg: &SimConfig,
    result: &RecoveryResult,
) -> Result<BodyTrajectory> {
    let m = scenario.morphology;
    let traj = walk(&m, scenario.gait_period, &result.best_params, geometry, sim_cfg)?;
    let mut conv = Vec::new();
    write_convergence_csv(&mut conv, &result.history).expect("writing to memory");
    let params = ParamsFile {
        schema_version: SCHEMA_VERSION,
        morphology: m,
        gait_period: scenario.gait_period,
        sim: *sim_cfg,
        params: result.best_params,
    };
    write_file(&dir.join(RESULT_FILE), to_json(&ResultFile::new(&scenario.name, m, result, traj.fell)).as_bytes())?;
    write_file(&dir.join(CONVERGENCE_FILE), &conv)?;
    write_file(&dir.join(TRAJECTORY_FILE), &trajectory_csv(&traj))?;
    write_file(&dir.join(PARAMS_FILE), to_json(&params).as_bytes())?;
    Ok(traj)
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let saved = ParamsFile::load(&args.params)?;
    let m = args.morphology.unwrap_or(saved.morphology);
    check_recoverable(&m)?;
    let geometry = match &args.geometry {
        Some(p) => RobotGeometry::load(p)?,
        None => RobotGeometry::default(),
    };
    let problem =
        RecoveryProblem::with_period(m, geometry.clone(), saved.sim, ObjectiveWeights::default(), saved.gait_period)?;
    if !problem.bounds.contains(&saved.params.to_array()) {
        warn!("parameters lie outside the search box for {m}; replaying anyway");
    }
    if m != saved.morphology {
        warn!("replaying parameters tuned for {} on {m}", saved.morphology);
    }
    let traj = walk(&m, saved.gait_period, &saved.params, &geometry, &saved.sim)?;
    let csv = trajectory_csv(&traj);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => std::io::stdout().write_all(&csv).map_err(|e| Error::io("<stdout>", e))?,
    }
    eprintln!("{}", describe_metrics(&extract_metrics(&traj), traj.fell, args.degrees));
    Ok(())
}
