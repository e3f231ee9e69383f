use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cfevrp::bench::{self, BenchConfig};
use cfevrp::encoder::{encode_with, EncodeOptions};
use cfevrp::generator::{self, Class, GenSpec};
use cfevrp::model::{Instance, Schedule};
use cfevrp::oracle::{oracle_solve, OracleResult};
use cfevrp::smt::{emit_smtlib, Mode, SolverConfig, SOLVER_ENV};
use cfevrp::validate::validate;

#[derive(Parser)]
#[command(name = "cfevrp", version, about = "Conflict-free electric vehicle routing via SMT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark instances and a suite manifest.
    Generate(GenerateArgs),
    /// Write the SMT-LIB2 document for an instance.
    Encode(EncodeArgs),
    /// Solve an instance with an external solver and validate the result.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Exhaustive search on a small instance.
    Oracle(OracleArgs),
    /// Run every instance of a suite manifest and print the summary table.
    Bench(BenchArgs),
    /// Draw a schedule as Graphviz DOT or SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Solver executable.
    #[arg(long, env = SOLVER_ENV, default_value = "z3")]
    solver: PathBuf,
    /// Per-instance wall-clock limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    /// satisfy, optimize (bound search) or native.
    #[arg(long, default_value = "satisfy")]
    mode: Mode,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip unsat core extraction.
    #[arg(long)]
    no_cores: bool,
    /// Leave out the road-segment capacity constraints.
    #[arg(long)]
    no_capacity: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<BenchConfig> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            bail!("--time-limit must be a positive number of seconds");
        }
        Ok(BenchConfig {
            solver: SolverConfig {
                solver: self.solver.clone(),
                time_limit: Duration::from_secs_f64(self.time_limit),
                mode: self.mode,
                seed: self.seed,
                unsat_cores: !self.no_cores,
            },
            encode: EncodeOptions {
                capacity: !self.no_capacity,
            },
            workers: 1,
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Comma-separated classes: 15-3-5, 25-4-7, 35-6-8.
    #[arg(long, value_delimiter = ',', default_value = "15-3-5")]
    class: Vec<Class>,
    /// Comma-separated edge reductions in percent: 0, 25, 50.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    reduction: Vec<u32>,
    /// Comma-separated deadlines.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    deadline: Vec<u32>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', conflicts_with = "seeds")]
    seed: Vec<u64>,
    /// Seeds 0..N per cell.
    #[arg(long)]
    seeds: Option<u64>,
    /// The full grid: all classes, reductions 0/25/50, deadlines 15..30, 5 seeds.
    #[arg(long, conflicts_with_all = ["class", "reduction", "deadline"])]
    full: bool,
    /// Write an oracle-sized instance for this seed instead.
    #[arg(long, conflicts_with = "full")]
    tiny: Option<u64>,
    #[arg(long, default_value = "instances")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    instance: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "satisfy")]
    mode: Mode,
    #[arg(long)]
    no_capacity: bool,
    /// Print assertion counts per constraint family to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the validated schedule here.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Write the validation report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    schedule: PathBuf,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    /// Report feasibility only; the search is exhaustive either way.
    #[arg(long)]
    decide: bool,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Results CSV; existing records are kept and their instances skipped.
    #[arg(long, default_value = "results.csv")]
    results: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct PlotArgs {
    instance: PathBuf,
    schedule: PathBuf,
    /// DOT output; stdout when neither output is given.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_schedule(path: &Path, instance: &Instance) -> Result<Schedule> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Schedule::from_json(&text, instance).with_context(|| format!("parsing {}", path.display()))
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    if let Some(seed) = args.tiny {
        std::fs::create_dir_all(&args.out_dir)?;
        let path = args.out_dir.join(format!("tiny_s{seed}.json"));
        generator::generate_tiny(seed).save(&path)?;
        println!("{}", path.display());
        return Ok(ExitCode::SUCCESS);
    }
    let (classes, reductions, deadlines) = if args.full {
        (Class::ALL.to_vec(), vec![0, 25, 50], vec![15, 20, 25, 30])
    } else {
        (args.class, args.reduction, args.deadline)
    };
    let seeds: Vec<u64> = match (args.seeds, args.full) {
        (Some(n), _) => (0..n).collect(),
        (None, true) => (0..5).collect(),
        (None, false) if args.seed.is_empty() => vec![0],
        (None, false) => args.seed,
    };
    let mut specs = Vec::new();
    for &class in &classes {
        for &reduction in &reductions {
            for &deadline in &deadlines {
                for &seed in &seeds {
                    specs.push(GenSpec {
                        class,
                        reduction,
                        deadline,
                        seed,
                    });
                }
            }
        }
    }
    let manifest = generator::generate_specs(&specs, &args.out_dir)?;
    println!(
        "wrote {} instances and {}",
        manifest.instances.len(),
        args.out_dir.join(generator::MANIFEST_FILE).display()
    );
    Ok(ExitCode::SUCCESS)
}

fn encode(args: EncodeArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let encoded = encode_with(
        &instance,
        EncodeOptions {
            capacity: !args.no_capacity,
        },
    );
    if args.stats {
        for (family, n) in &encoded.stats {
            eprintln!("{family:>8} {n}");
        }
    }
    write_or_print(args.output.as_deref(), &emit_smtlib(&encoded, args.mode))?;
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let config = args.solver.config()?;
    let instance = load(&args.instance)?;
    let id = bench::instance_id(&args.instance);
    let run = match bench::solve_instance(instance, &id, "-", &config) {
        Ok(run) => run,
        Err(bench::BenchError::Validate { failed, report }) => {
            eprint!("{}", report.render());
            bail!("solver schedule failed validation: {failed}");
        }
        Err(e) => return Err(e.into()),
    };
    let r = &run.record;
    println!("status: {}", r.status);
    println!("generation time: {:.3} s", r.gt_s);
    println!("solve time: {:.3} s", r.st_s);
    if let Some(cost) = r.cost {
        let proven = if run.outcome.optimal { " (optimal)" } else { "" };
        println!("cost: {cost}{proven}");
    }
    if !run.outcome.unsat_core.is_empty() {
        let families: Vec<String> = run.outcome.core_families().iter().map(|f| f.to_string()).collect();
        println!("unsat core families: {}", families.join(" "));
    }
    if let (Some(schedule), Some(path)) = (&run.schedule, &args.schedule) {
        std::fs::write(path, schedule.to_json(&run.instance))?;
    }
    if let (Some(report), Some(path)) = (&run.report, &args.report) {
        std::fs::write(path, report.to_json())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(args: ValidateArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let schedule = load_schedule(&args.schedule, &instance)?;
    let report = validate(&schedule, &instance);
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.render());
    }
    Ok(if report.overall { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    match oracle_solve(&instance, !args.decide)? {
        OracleResult::Sat { cost, schedule } => {
            println!("status: sat");
            println!("cost: {cost}");
            print!("{}", schedule.to_json(&instance));
        }
        OracleResult::Unsat => println!("status: unsat"),
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_cmd(args: BenchArgs) -> Result<ExitCode> {
    let mut config = args.solver.config()?;
    config.workers = args.workers.max(1);
    let manifest = generator::SuiteManifest::load(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let run = bench::bench(&manifest, base, &args.results, &config)?;
    if run.skipped > 0 {
        eprintln!("{} instances already recorded in {}", run.skipped, args.results.display());
    }
    for (id, err) in &run.failures {
        eprintln!("{id}: {err}");
    }
    print!("{}", bench::render_table(&bench::summarize(&run.records)));
    Ok(if run.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn plot(args: PlotArgs) -> Result<ExitCode> {
    let instance = load(&args.instance)?;
    let schedule = load_schedule(&args.schedule, &instance)?;
    if let Some(svg) = &args.svg {
        std::fs::write(svg, bench::plot_svg(&schedule, &instance))?;
    }
    if args.output.is_some() || args.svg.is_none() {
        write_or_print(args.output.as_deref(), &bench::plot_dot(&schedule, &instance))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Encode(a) => encode(a),
        Command::Solve(a) => solve(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
