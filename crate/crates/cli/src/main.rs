use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ftl_core::bench::{run_bench, summary_table, to_csv, BenchMatrix};
use ftl_core::driver::{solve_observed, ColGenConfig, IterationEvent, GeneratorKind, InitKind, RunStatus, SolveError};
use ftl_core::instance::{generate_instance, validate_instance, GeneratorConfig, Instance};
use ftl_core::io::{parse_instance, parse_routes, parse_schedule, write_instance, write_routes, write_schedule};
use ftl_core::master::{add_incompatibility_cuts, build_rmp, RmpOptions};
use ftl_core::pricing::PricingMode;
use ftl_core::routing::{enumerate_routes, simulate_schedule, EnumerateOptions};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

#[derive(Parser)]
#[command(name = "ftl", version, about = "Multi-shift full-truckload routing by column generation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance
    Generate(GenerateArgs),
    /// Solve an instance and write the schedule
    Solve(SolveArgs),
    /// Enumerate all feasible routes into a route cache
    Enumerate(EnumerateArgs),
    /// Validate an instance, and optionally replay a schedule against it
    Check(CheckArgs),
    /// Run a configuration matrix over several instances
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Size preset by number of shifts (4, 6 or 8)
    #[arg(long, default_value_t = 4)]
    shifts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML generator configuration; overrides the preset
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "p2")]
    pricing: PricingMode,
    #[arg(long, default_value = "vns")]
    generator: GeneratorKind,
    #[arg(long, default_value = "insertion")]
    init: InitKind,
    #[arg(long, default_value_t = 1000)]
    max_columns: usize,
    #[arg(long, default_value_t = 30)]
    max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Route cache to price over instead of enumerating (enumerated generator)
    #[arg(long)]
    routes: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    cut_rounds: usize,
    /// Keep the fleet rows in the relaxed master during column generation
    #[arg(long)]
    fleet_in_colgen: bool,
    /// Seconds allowed to each integer solve
    #[arg(long, default_value_t = 60.0)]
    mip_time_limit: f64,
    /// Relative gap at which each integer solve stops
    #[arg(long, default_value_t = 1e-4)]
    mip_gap: f64,
    /// Write the schedule here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write run statistics as JSON
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write the final integer master in MPS format
    #[arg(long)]
    dump_mps: Option<PathBuf>,
    /// Print one line per column generation iteration
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 12)]
    max_legs: usize,
    #[arg(long, default_value_t = 2_000_000)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    matrix: PathBuf,
    /// Write per-run rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let res = match cli.cmd {
        Cmd::Generate(a) => generate(a),
        Cmd::Solve(a) => solve_cmd(a),
        Cmd::Enumerate(a) => enumerate(a),
        Cmd::Check(a) => check(a),
        Cmd::Bench(a) => bench(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let cfg = match &a.config {
        Some(p) => {
            let mut c: GeneratorConfig = toml::from_str(&fs::read_to_string(p)?).context("generator config")?;
            c.seed = a.seed;
            c
        }
        None => GeneratorConfig::preset(a.shifts, a.seed)?,
    };
    let inst = generate_instance(&cfg)?;
    emit(a.out.as_deref(), &write_instance(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(a: SolveArgs) -> Result<ExitCode> {
    let inst = read_instance(&a.instance)?;
    let routes = match &a.routes {
        Some(p) => Some(parse_routes(&fs::read_to_string(p)?, &inst.network).context("route cache")?),
        None => None,
    };
    let cfg = ColGenConfig {
        pricing: a.pricing,
        generator: a.generator,
        init: a.init,
        max_columns: a.max_columns,
        max_iterations: a.max_iterations,
        seed: a.seed,
        cut_rounds: a.cut_rounds,
        fleet_in_colgen: a.fleet_in_colgen,
        mip_time_limit_secs: Some(a.mip_time_limit),
        mip_gap: a.mip_gap,
        routes,
        ..ColGenConfig::default()
    };
    let verbose = a.verbose;
    let mut progress = |ev: &IterationEvent| {
        if verbose {
            let s = ev.stats;
            eprintln!(
                "iter {:>3}  lp {:>12.2}  pool {:>6}  added {:>5}  best {:>10.2}  {:>8.2}s",
                s.iteration,
                s.lp_objective,
                s.pool_size,
                s.columns_added,
                s.best_estimate.unwrap_or(0.0),
                s.elapsed_secs
            );
        }
    };
    let out = match solve_observed(&inst, &cfg, &mut progress) {
        Ok(o) => o,
        Err(SolveError::Infeasible(why)) => {
            for w in why {
                eprintln!("infeasible: {w}");
            }
            return Ok(ExitCode::from(EXIT_INFEASIBLE));
        }
        Err(SolveError::NoSchedule(why)) => {
            eprintln!("incomplete: {why}");
            return Ok(ExitCode::from(EXIT_INCOMPLETE));
        }
        Err(e) => bail!(e),
    };
    for w in &out.stats.warnings {
        eprintln!("warning: {w}");
    }
    let s = &out.stats;
    eprintln!(
        "{:?}: {} km, {} iterations, {} columns generated, {} cuts, {:.2}s",
        out.status,
        out.schedule.objective,
        s.iterations.len(),
        s.columns_generated,
        s.cuts,
        s.total_secs
    );
    emit(a.out.as_deref(), &write_schedule(&out.schedule, &inst))?;
    if let Some(p) = &a.stats {
        fs::write(p, serde_json::to_string_pretty(&out.stats)?)?;
    }
    if let Some(p) = &a.dump_mps {
        let opts = RmpOptions { relaxed: false, fleet_active: true, ..RmpOptions::default() };
        let mut rmp = build_rmp(&out.pool, &inst, opts)?;
        add_incompatibility_cuts(&mut rmp, &out.cuts)?;
        fs::write(p, ftl_lp::write_mps(&rmp.model, "MASTER"))?;
    }
    Ok(match out.status {
        RunStatus::Optimal | RunStatus::Feasible => ExitCode::SUCCESS,
        RunStatus::Incomplete => ExitCode::from(EXIT_INCOMPLETE),
    })
}

fn enumerate(a: EnumerateArgs) -> Result<ExitCode> {
    let inst = read_instance(&a.instance)?;
    let routes = enumerate_routes(&inst, &EnumerateOptions { max_legs: a.max_legs, budget: a.budget })?;
    eprintln!("{} routes", routes.len());
    emit(a.out.as_deref(), &write_routes(&routes))?;
    Ok(ExitCode::SUCCESS)
}

fn check(a: CheckArgs) -> Result<ExitCode> {
    let inst = read_instance(&a.instance)?;
    let mut bad = false;
    for v in validate_instance(&inst) {
        println!("instance: {:?}: {}", v.code, v.message);
        bad = true;
    }
    if let Some(p) = &a.schedule {
        let sched = parse_schedule(&fs::read_to_string(p)?, &inst).context("schedule")?;
        for m in sched.check(&inst, true) {
            println!("schedule: {m}");
            bad = true;
        }
        for v in simulate_schedule(&sched, &inst).violations {
            println!("replay: {v:?}");
            bad = true;
        }
    }
    if bad {
        return Ok(ExitCode::FAILURE);
    }
    println!("ok");
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let m = BenchMatrix::from_toml(&fs::read_to_string(&a.matrix)?)?;
    let base = a.matrix.parent().unwrap_or(Path::new("."));
    let instances = m.instances(base)?;
    let rows = run_bench(&instances, &m.config, &mut |r| {
        eprintln!("{} {} seed={} {} {:.2}s", r.instance, r.config, r.seed, r.status, r.secs);
    });
    print!("{}", summary_table(&rows));
    if let Some(p) = &a.csv {
        fs::write(p, to_csv(&rows))?;
    }
    Ok(ExitCode::SUCCESS)
}
