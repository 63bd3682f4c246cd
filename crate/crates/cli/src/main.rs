use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bcmpc::config::{NoiseFile, ScenarioFile};
use bcmpc::objective::{penalty, relative_geometry};
use bcmpc::obstacles::EstimateNoise;
use bcmpc::{scenarios, sim, PenaltyGeometry, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "bcmpc",
    version,
    about = "Branching-course MPC planner and scenario simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write logs, metrics and a summary.
    Run(ScenarioArgs),
    /// Run one planner solve from the scenario's initial state.
    Solve(ScenarioArgs),
    /// Write the obstacle penalty field as an x,y,value CSV.
    Raster(RasterArgs),
    /// Check scenario files without running them.
    Validate {
        /// Files to check.
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
    },
    /// Write a shipped scenario as a JSON file.
    Export {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Shipped scenario name.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the obstacle estimate noise.
    #[arg(long, value_enum)]
    noise: Option<NoisePreset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoisePreset {
    Radar,
    Ais,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryKind {
    Circular,
    Elliptical,
}

#[derive(Args)]
struct RasterArgs {
    /// Takes the penalty geometry from this scenario file instead of the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "elliptical")]
    geometry: GeometryKind,
    /// Obstacle course [rad]. Output is north/east around the obstacle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    course: f64,
    #[arg(long, default_value_t = 300.0)]
    half_extent: f64,
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run(a) => cmd_run(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Raster(a) => cmd_raster(&a),
        Command::Validate { configs } => cmd_validate(&configs),
        Command::Export { scenario, out } => {
            let cfg = scenarios::by_name::<f64>(&scenario)?;
            fs::write(&out, ScenarioFile::from_config(&cfg).to_json()?)
                .with_context(|| format!("writing {}", out.display()))
        }
    }
}

fn load(a: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut file = match (&a.config, &a.scenario) {
        (Some(path), _) => ScenarioFile::load(path)?,
        (None, Some(name)) => ScenarioFile::from_config(&scenarios::by_name::<f64>(name)?),
        (None, None) => bail!("either --config or --scenario is required"),
    };
    if let Some(seed) = a.seed {
        file.seed = seed;
    }
    if let Some(n) = a.noise {
        let noise = match n {
            NoisePreset::Radar => EstimateNoise::<f64>::radar(),
            NoisePreset::Ais => EstimateNoise::ais(),
            NoisePreset::None => EstimateNoise::none(),
        };
        file.noise = NoiseFile::from_noise(&noise);
    }
    Ok(file.to_config()?)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn cmd_run(a: &ScenarioArgs) -> Result<()> {
    let cfg = load(a)?;
    let log = sim::run(&cfg)?;
    let metrics = sim::compute_metrics(&log, &cfg.planner.geometry);
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    log.write_csv(create(&a.out, "trajectory.csv")?)?;
    log.write_planner_csv(create(&a.out, "planner.csv")?)?;
    let mut m = create(&a.out, "metrics.json")?;
    serde_json::to_writer_pretty(&mut m, &metrics)?;
    writeln!(m)?;
    m.flush()?;
    let summary = metrics.summary();
    fs::write(a.out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_solve(a: &ScenarioArgs) -> Result<()> {
    let cfg = load(a)?;
    let plan = sim::solve_snapshot(&cfg)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "scenario: {}", cfg.name)?;
    writeln!(out, "candidates: {}", plan.candidates.len())?;
    match plan.selected {
        None => {
            writeln!(
                out,
                "fail-safe: yes (no feasible candidate, holding current desired velocity)"
            )?;
            return Ok(());
        }
        Some(k) => {
            let c = &plan.candidates[k];
            writeln!(out, "fail-safe: no")?;
            writeln!(
                out,
                "selected: {k} {:?}{}",
                c.indices,
                if c.guidance_seeded { " (guidance-seeded)" } else { "" }
            )?;
        }
    }
    writeln!(out, "id,indices,guidance_seeded,align,avoid,tran,total")?;
    for (i, (c, cost)) in plan.candidates.iter().zip(&plan.costs).enumerate() {
        let idx: Vec<String> = c.indices.iter().map(|(u, x)| format!("{u}:{x}")).collect();
        writeln!(
            out,
            "{i},{},{},{:.6e},{:.6e},{},{:.6e}",
            idx.join(" "),
            c.guidance_seeded,
            cost.align,
            cost.avoid,
            cost.tran,
            cost.total
        )?;
    }
    Ok(())
}

fn cmd_raster(a: &RasterArgs) -> Result<()> {
    let geom = match &a.config {
        Some(path) => ScenarioFile::load(path)?.to_config::<f64>()?.planner.geometry,
        None => match a.geometry {
            GeometryKind::Circular => PenaltyGeometry::standard_circular(),
            GeometryKind::Elliptical => PenaltyGeometry::standard_elliptical(),
        },
    };
    geom.validate()?;
    if !(a.step > 0.0 && a.half_extent > 0.0) {
        bail!("--step and --half-extent must be positive");
    }
    let n = (2.0 * a.half_extent / a.step).round();
    if (n * a.step - 2.0 * a.half_extent).abs() > 1e-9 * a.half_extent {
        bail!("--half-extent must be a multiple of --step / 2");
    }
    let mut w = csv_writer(&a.out)?;
    w.write_record(["north_m", "east_m", "value"])?;
    let n = n as usize;
    for i in 0..=n {
        let north = a.half_extent - a.step * i as f64;
        for j in 0..=n {
            let east = -a.half_extent + a.step * j as f64;
            let (d, beta) = relative_geometry([north, east], [0.0, 0.0], a.course);
            let v = penalty(&geom, d, beta);
            w.write_record([north.to_string(), east.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn cmd_validate(paths: &[PathBuf]) -> Result<()> {
    let mut failed = 0;
    for p in paths {
        match ScenarioFile::load(p).and_then(|f| f.to_config::<f64>().map(|_| ())) {
            Ok(()) => println!("ok: {}", p.display()),
            Err(e) => {
                println!("invalid: {e}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} files invalid", paths.len());
    }
    Ok(())
}
