use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use footplan::bench::{self, ReportFormat, SweepConfig, SweepReport};
use footplan::foothold::select_target;
use footplan::gridmap::sample_dual_map_noisy;
use footplan::scenario::{read_world, write_world, IndexedWorld, SizeConfig, TrackGenerator};
use footplan::simulator::{Simulator, TrialLogs};
use footplan::{Command, GridSpec, ObstacleMode, Pose2D, PolicyKind, World};
use rand::SeedableRng;

mod config;

use config::Config;

#[derive(Parser)]
#[command(name = "footplan", version, about = "Semantic foothold planning: worlds, plans, rollouts and sweeps")]
struct Cli {
    /// TOML file overriding behavior, search, simulator, policy and track defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded cluttered track and write it as a scenario file.
    GenWorld(GenWorld),
    /// Print the per-leg foothold plan at a pose.
    Plan(PlanArgs),
    /// Roll out one trial on a scenario.
    RunTrial(RunTrial),
    /// Run a policy by density sweep and write the report.
    RunSweep(RunSweep),
    /// Sample the elevation and semantic grids at a pose and write them as CSV.
    ExportMap(ExportMap),
    /// Render a sweep CSV as a table (or re-emit it as CSV).
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Virtual,
    Rigid,
}

impl From<Mode> for ObstacleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Virtual => ObstacleMode::Virtual,
            Mode::Rigid => ObstacleMode::Rigid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Args)]
struct GenWorld {
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Rigid)]
    mode: Mode,
    #[arg(long, default_value_t = 10.0)]
    length: f64,
    #[arg(long, default_value_t = 2.0)]
    width: f64,
    /// Allow overlapping footprints (heights add where they overlap).
    #[arg(long)]
    stacking: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "YAW"], allow_negative_numbers = true)]
    pose: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["VX", "VY", "WZ"], allow_negative_numbers = true)]
    cmd: Vec<f64>,
    /// Also write the plan as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunTrial {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "sem")]
    policy: PolicyKind,
    /// Forward speed; ignored when --cmd is given.
    #[arg(long, default_value_t = 0.7)]
    speed: f64,
    #[arg(long, num_args = 3, value_names = ["VX", "VY", "WZ"], allow_negative_numbers = true)]
    cmd: Option<Vec<f64>>,
    #[arg(long)]
    max_time: Option<f64>,
    /// Seed for optional velocity and map noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    log_rewards: Option<PathBuf>,
    #[arg(long)]
    log_traj: Option<PathBuf>,
}

#[derive(Args)]
struct RunSweep {
    #[arg(long, value_delimiter = ',', default_value = "blind,geo,sem")]
    policies: Vec<PolicyKind>,
    #[arg(long, value_delimiter = ',', default_value = "10,15,20,25")]
    densities: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Rigid)]
    mode: Mode,
    #[arg(long, default_value_t = 0.7)]
    speed: f64,
    /// Report path; the table is printed to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Per-trial CSV.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct ExportMap {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "YAW"], allow_negative_numbers = true)]
    pose: Vec<f64>,
    /// Uniform elevation noise amplitude (m).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_world(path: &Path) -> Result<World> {
    read_world(path).with_context(|| format!("reading scenario {}", path.display()))
}

fn pose(v: &[f64]) -> Pose2D {
    Pose2D::new(v[0], v[1], v[2])
}

fn gen_world(cfg: &Config, a: &GenWorld) -> Result<()> {
    let generator = TrackGenerator { sizes: cfg.sizes(SizeConfig::default()), ..TrackGenerator::default() };
    let world = generator.generate(a.density, a.seed, a.length, a.width, a.mode.into(), a.stacking)?;
    write_out(a.out.as_deref(), &write_world(&world))
}

fn plan(cfg: &Config, a: &PlanArgs) -> Result<()> {
    let world = load_world(&a.scenario)?;
    let params = cfg.behavior()?;
    let search = cfg.search()?;
    let cmd = Command::new(a.cmd[0], a.cmd[1], a.cmd[2]);
    footplan::CommandBounds::default().check(&cmd)?;
    let base = pose(&a.pose);
    let index = IndexedWorld::with_defaults(&world);
    let plan = select_target(&params, &cmd, &base, &index, &search);

    println!(
        "{:<3} {:>16} {:>16} {:>16} {:>16} {:>8} {:>5} {:>4}",
        "leg", "nominal", "raibert", "target", "target_world", "cost", "cand", "free"
    );
    let mut csv = String::from("leg,nom_x,nom_y,raibert_x,raibert_y,target_x,target_y,world_x,world_y,cost,candidate,collision_free\n");
    for lp in &plan.legs {
        let w = base.body_to_world(lp.p_target);
        let pt = |p: footplan::Vec2| format!("({:.3}, {:.3})", p.x, p.y);
        println!(
            "{:<3} {:>16} {:>16} {:>16} {:>16} {:>8.4} {:>5} {:>4}",
            lp.leg.short_name(),
            pt(lp.p_nom),
            pt(lp.p_raibert),
            pt(lp.p_target),
            pt(w),
            lp.cost,
            lp.candidate,
            if lp.collision_free { "yes" } else { "no" }
        );
        writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            lp.leg.short_name(),
            lp.p_nom.x,
            lp.p_nom.y,
            lp.p_raibert.x,
            lp.p_raibert.y,
            lp.p_target.x,
            lp.p_target.y,
            w.x,
            w.y,
            lp.cost,
            lp.candidate,
            lp.collision_free as u8
        )?;
    }
    if let Some(p) = &a.csv {
        write_out(Some(p), &csv)?;
    }
    Ok(())
}

fn run_trial(cfg: &Config, a: &RunTrial) -> Result<()> {
    let world = load_world(&a.scenario)?;
    let mut sim_cfg = cfg.sim()?;
    if let Some(t) = a.max_time {
        anyhow::ensure!(t > 0.0, "--max-time must be positive");
        sim_cfg.max_time = t;
    }
    let cmd = match &a.cmd {
        Some(v) => Command::new(v[0], v[1], v[2]),
        None => Command::forward(a.speed),
    };
    footplan::CommandBounds::default().check(&cmd)?;
    let policy = cfg.policy(a.policy)?;
    let mut sim = Simulator::new(&world, policy, sim_cfg, a.seed);
    let want_logs = a.log_rewards.is_some() || a.log_traj.is_some();
    let mut logs = TrialLogs::default();
    let r = sim.run(&cmd, want_logs.then_some(&mut logs));
    println!("policy       {}", r.policy);
    println!("termination  {}", r.termination);
    println!("distance     {:.3}", r.distance);
    println!("footsteps    {}", r.total_steps);
    println!("collisions   {}", r.colliding_steps);
    let rate = if r.total_steps == 0 { 0.0 } else { 100.0 * r.colliding_steps as f64 / r.total_steps as f64 };
    println!("C            {rate:.2}");
    if let Some(p) = &a.log_rewards {
        write_out(Some(p), &logs.rewards.to_csv())?;
    }
    if let Some(p) = &a.log_traj {
        write_out(Some(p), &logs.trajectory.to_csv())?;
    }
    Ok(())
}

fn run_sweep(cfg: &Config, a: &RunSweep) -> Result<()> {
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if a.policies.is_empty() {
        bail!("--policies must name at least one policy");
    }
    let mut sweep = SweepConfig::<f64> { speed: a.speed, sim: cfg.sim()?, ..SweepConfig::default() };
    sweep.generator.sizes = cfg.sizes(sweep.generator.sizes.clone());
    if let Some(l) = cfg.track.length {
        sweep.track_length = l;
    }
    if let Some(w) = cfg.track.width {
        sweep.track_width = w;
    }
    let policies = a.policies.iter().map(|k| cfg.policy(*k)).collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.threads).build()?;
    let report = pool.install(|| bench::run_sweep(&policies, &a.densities, a.trials, a.seed, a.mode.into(), &sweep))?;
    let text = bench::report(&report, a.format.into());
    match &a.out {
        Some(p) => {
            write_out(Some(p), &text)?;
            print!("{}", bench::report(&report, ReportFormat::Table));
        }
        None => print!("{text}"),
    }
    if let Some(p) = &a.trials_out {
        write_out(Some(p), &bench::trials_csv(&report.trials))?;
    }
    Ok(())
}

fn export_map(a: &ExportMap) -> Result<()> {
    let world = load_world(&a.scenario)?;
    let index = IndexedWorld::with_defaults(&world);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let map = sample_dual_map_noisy(&index, pose(&a.pose), GridSpec::default(), a.noise, &mut rng);
    write_out(a.out.as_deref(), &map.to_csv())
}

fn report(a: &ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let cells = bench::parse_report_csv(&text)?;
    print!("{}", bench::report(&SweepReport { cells, trials: vec![] }, a.format.into()));
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.cmd {
        Cmd::GenWorld(a) => gen_world(&cfg, a),
        Cmd::Plan(a) => plan(&cfg, a),
        Cmd::RunTrial(a) => run_trial(&cfg, a),
        Cmd::RunSweep(a) => run_sweep(&cfg, a),
        Cmd::ExportMap(a) => export_map(a),
        Cmd::Report(a) => report(a),
    }
}
