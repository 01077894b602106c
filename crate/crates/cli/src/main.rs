//! `trimoip` command-line harness.
//!
//! ```text
//! trimoip generate --kind knapsack --n 10 --count 10 --seed 1 --out inst/
//! trimoip oracle inst/knapsack_10_01.txt --out refs/knapsack_10_01.front
//! trimoip solve inst/*.txt --variant RD --variant PI --runs 10 \
//!     --ref-dir refs/ --out fronts/ --report runs.csv
//! trimoip report runs.csv --layout wide
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use trimoip::harness::{
    aggregate, append_reports, read_reports, reference_hv, write_aggregate_long,
    write_aggregate_wide, RunReport,
};
use trimoip::io::{read_instance, write_instance, FrontFile};
use trimoip::metrics::{exact_solutions, ReferenceFront};
use trimoip::model::generate::{generate_assignment, generate_knapsack};
use trimoip::{run, Point, PrConfig, Problem, Variant};

#[derive(Parser)]
#[command(
    name = "trimoip",
    version,
    about = "LP-relaxation matheuristic for tri-objective binary programs"
)]
struct Cli {
    /// Print warnings and progress to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded random instances.
    Generate(GenerateArgs),
    /// Run solver variants over instances and seeds.
    Solve(SolveArgs),
    /// Enumerate the exact nondominated front of a small instance.
    Oracle(OracleArgs),
    /// Aggregate a run CSV into per-subclass means.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Knapsack,
    Assignment,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Items for knapsack, tasks for assignment.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Instance `i` (from 0) uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min: i64,
    #[arg(long, default_value_t = 1000)]
    max: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// RD, PRrand, PRsim, PRdif, PI, PIsim or PIdif. Repeatable.
    #[arg(long = "variant", default_value = "PI")]
    variants: Vec<Variant>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeds `seed .. seed + runs` per instance and variant.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value_t = 50)]
    iter_mult: usize,
    #[arg(long, default_value_t = 0.7)]
    best_prob: f64,
    /// Also run path relinking on assignment instances.
    #[arg(long)]
    force_pr: bool,
    /// Exact front for a single instance.
    #[arg(long, conflicts_with = "ref_dir")]
    ref_front: Option<PathBuf>,
    /// Directory of `<instance stem>.front` exact fronts.
    #[arg(long)]
    ref_dir: Option<PathBuf>,
    /// Reference point in original objective sense, e.g. `0,0,0`, for raw
    /// hypervolume.
    #[arg(long, value_parser = parse_point)]
    ref_point: Option<Point>,
    /// Directory for front files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run CSV to append to.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Long,
    Wide,
}

#[derive(Args)]
struct ReportArgs {
    runs: PathBuf,
    /// Fill missing HV from front files and `<instance>.front` references.
    #[arg(long)]
    ref_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Layout::Wide)]
    layout: Layout,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let values: Vec<i64> = s
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<i64>| format!("expected 3 values, got {}", v.len()))
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_reference(path: &Path) -> anyhow::Result<ReferenceFront> {
    let front = FrontFile::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ReferenceFront::from_points(&front.integer_points()))
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let kind = match args.kind {
        Kind::Knapsack => "knapsack",
        Kind::Assignment => "assignment",
    };
    for i in 0..args.count {
        let seed = args.seed + i as u64;
        let problem = match args.kind {
            Kind::Knapsack => generate_knapsack(args.n, seed, args.min..=args.max)?,
            Kind::Assignment => generate_assignment(args.n, seed, args.min..=args.max)?,
        };
        let path = args.out.join(format!("{kind}_{}_{:02}.txt", args.n, i + 1));
        write_instance(&problem, &path).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

struct Job {
    instance: usize,
    variant: Variant,
    seed: u64,
}

struct Loaded {
    path: PathBuf,
    id: String,
    problem: Problem,
    reference: Option<ReferenceFront>,
}

fn solve_one(loaded: &Loaded, job: &Job, args: &SolveArgs) -> anyhow::Result<RunReport> {
    let mut config = PrConfig::new(job.variant, job.seed);
    config.iteration_multiplier = args.iter_mult;
    config.best_move_probability = args.best_prob;
    config.force_pr = args.force_pr;
    let output = run(&loaded.problem, &config)?;
    let ref_point = args
        .ref_point
        // sense conversion is its own inverse
        .map(|p| trimoip::model::to_original(loaded.problem.senses(), p));
    let mut report = RunReport::from_run(
        &loaded.id,
        &loaded.problem,
        &output,
        loaded.reference.as_ref(),
        ref_point.as_ref(),
    )?;
    if let Some(dir) = &args.out {
        let path = dir.join(format!("{}.{}.s{}.front", loaded.id, job.variant, job.seed));
        FrontFile::from_solutions(loaded.problem.senses(), &output.front)
            .write(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        report.front_file = Some(path.display().to_string());
    }
    Ok(report)
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<bool> {
    if args.ref_front.is_some() && args.instances.len() > 1 {
        bail!("--ref-front applies to a single instance; use --ref-dir for batches");
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut failures: Vec<String> = Vec::new();
    let mut loaded: Vec<Loaded> = Vec::new();
    for path in &args.instances {
        let problem = match read_instance(path) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        let id = instance_id(path);
        let ref_path = match (&args.ref_front, &args.ref_dir) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => Some(dir.join(format!("{id}.front"))).filter(|p| p.exists()),
            _ => None,
        };
        if args.ref_dir.is_some() && ref_path.is_none() {
            log::warn!("no reference front for {id}; HV left blank");
        }
        let reference = match ref_path.map(|p| load_reference(&p)).transpose() {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{}: {e:#}", path.display()));
                continue;
            }
        };
        loaded.push(Loaded {
            path: path.clone(),
            id,
            problem,
            reference,
        });
    }

    let jobs: Vec<Job> = (0..loaded.len())
        .flat_map(|instance| {
            args.variants.iter().flat_map(move |&variant| {
                (args.seed..args.seed + args.runs).map(move |seed| Job {
                    instance,
                    variant,
                    seed,
                })
            })
        })
        .collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.jobs {
        pool = pool.num_threads(n);
    }
    let results: Vec<anyhow::Result<RunReport>> = pool.build()?.install(|| {
        jobs.par_iter()
            .map(|job| solve_one(&loaded[job.instance], job, &args))
            .collect()
    });

    let mut reports = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(format!(
                "{} {} seed {}: {e:#}",
                loaded[job.instance].path.display(),
                job.variant,
                job.seed
            )),
        }
    }

    match &args.report {
        Some(path) => {
            append_reports(path, &reports).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for r in &reports {
                let hv = r
                    .hv_percent
                    .map(|v| format!("{v:.2}%"))
                    .unwrap_or("-".into());
                writeln!(
                    lock,
                    "{} {} seed {}: |Y| = {}, {:.3}s, HV {hv}",
                    r.instance, r.variant, r.seed, r.y_count, r.time_sec
                )?;
            }
        }
    }

    for f in &failures {
        eprintln!("failed: {f}");
    }
    Ok(failures.is_empty())
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<()> {
    let problem = read_instance(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let solutions = exact_solutions(&problem)?;
    FrontFile::from_solutions(problem.senses(), &solutions)
        .write(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    log::info!("{} nondominated points", solutions.len());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<()> {
    let mut reports =
        read_reports(&args.runs).with_context(|| format!("reading {}", args.runs.display()))?;
    if let Some(dir) = &args.ref_dir {
        let mut missing = BTreeSet::new();
        for r in reports.iter_mut().filter(|r| r.hv_percent.is_none()) {
            let Some(front_path) = &r.front_file else {
                continue;
            };
            let ref_path = dir.join(format!("{}.front", r.instance));
            if !ref_path.exists() {
                missing.insert(r.instance.clone());
                continue;
            }
            let reference = load_reference(&ref_path)?;
            let front = FrontFile::read(front_path)
                .with_context(|| format!("reading {front_path}"))?
                .integer_points();
            (r.hv, r.hv_percent) = reference_hv(&front, &reference, &r.instance)?;
        }
        for id in missing {
            log::warn!("no reference front for {id}; HV left blank");
        }
    }
    let rows = aggregate(&reports);
    let write = |out: &mut dyn Write| -> anyhow::Result<()> {
        match args.layout {
            Layout::Long => write_aggregate_long(&rows, out)?,
            Layout::Wide => write_aggregate_wide(&rows, out)?,
        }
        Ok(())
    };
    match &args.out {
        Some(path) => {
            let mut file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write(&mut file)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a).map(|_| true),
        Command::Report(a) => cmd_report(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
