use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use teamform::harness::sweep::{write_aggregates, write_rows, LambdaMode};
use teamform::harness::{
    calibrate_corpus, categorize_skills, generate_corpus, generate_task, load_experts, run_sweep,
    salary_bands, write_experts, Corpus, SweepConfig, SyntheticSpec, TaskSpec,
};
use teamform::oracle::{brute_force, Constraint, MAX_ORACLE_EXPERTS};
use teamform::{run_solver, ArrivalOrder, Budget, Instance, Matroid, RunParams, SkillId, Solution, SolverKind};

#[derive(Parser)]
#[command(name = "teamform", version, about = "Team formation: maximize lambda * coverage - cost")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance and print the solution as JSON.
    Solve(SolveArgs),
    /// Run a sweep described by a TOML config and write per-run CSV rows.
    Sweep(SweepArgs),
    /// Print the calibrated lambda for a task.
    Calibrate(InstanceArgs),
    /// Write a synthetic expert corpus.
    GenData(GenArgs),
    /// Exhaustive optimum for small instances.
    Oracle(OracleArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Expert file, one JSON object per line.
    #[arg(long, conflicts_with = "preset")]
    experts: Option<PathBuf>,
    /// Bundled synthetic corpus: freelancer or guru.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated task skill names; drawn at random when absent.
    #[arg(long, value_delimiter = ',')]
    task: Option<Vec<String>>,
    /// Skills in a generated task.
    #[arg(long, default_value_t = 50)]
    task_size: usize,
    /// Fraction of popular skills in a generated task.
    #[arg(long, default_value_t = 0.1)]
    fp: f64,
    /// Fraction of rare skills in a generated task.
    #[arg(long, default_value_t = 0.1)]
    fr: f64,
    /// Seed for task generation and randomized solvers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ConstraintArgs {
    /// Cardinality budget.
    #[arg(long)]
    k: Option<usize>,
    /// `uniform:<k>`, `partition:<b1>,<b2>,...` (one budget per salary band)
    /// or `partition:<bands>x<budget>`.
    #[arg(long, conflicts_with = "k")]
    matroid: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[arg(long, default_value = "cslg")]
    solver: String,
    /// Positive number or `auto` for greedy set-cover calibration.
    #[arg(long, default_value = "auto")]
    lambda: LambdaMode,
    /// Accuracy of the stochastic and streaming solvers.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Arrival order for stream solvers: natural, random:<seed>, file:<path>.
    #[arg(long, default_value = "natural")]
    order: String,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Per-run rows; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-grid-point summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Override the configured repetitions.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured lambda.
    #[arg(long)]
    lambda: Option<LambdaMode>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "freelancer")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of experts.
    #[arg(long)]
    num_experts: Option<usize>,
    /// Override the mean number of skills per expert.
    #[arg(long)]
    mean_skills: Option<f64>,
    /// Override the skill universe size.
    #[arg(long)]
    skills: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[arg(long, default_value = "auto")]
    lambda: LambdaMode,
}

fn load_corpus(args: &InstanceArgs) -> Result<Corpus> {
    match (&args.experts, &args.preset) {
        (Some(path), _) => {
            let report = load_experts(path)?;
            for err in &report.errors {
                eprintln!("{}:{}: {}", path.display(), err.line, err.message);
            }
            if !report.errors.is_empty() {
                bail!("{} malformed line(s) in {}", report.errors.len(), path.display());
            }
            Ok(Corpus::from_records(&report.records))
        }
        (None, Some(preset)) => Ok(Corpus::from_records(&generate_corpus(&SyntheticSpec::preset(preset)?)?)),
        (None, None) => bail!("pass --experts <file> or --preset <name>"),
    }
}

fn resolve_task(args: &InstanceArgs, corpus: &Corpus) -> Result<Vec<SkillId>> {
    match &args.task {
        Some(names) => Ok(corpus.task_from_names(names)?),
        None => {
            let spec = TaskSpec::new(args.task_size, args.fp, args.fr, args.seed);
            Ok(generate_task(&spec, &categorize_skills(corpus)?)?)
        }
    }
}

fn build_instance(args: &InstanceArgs, lambda: LambdaMode) -> Result<(Corpus, Instance)> {
    let corpus = load_corpus(args)?;
    let task = resolve_task(args, &corpus)?;
    let lambda = match lambda {
        LambdaMode::Fixed(v) => v,
        LambdaMode::Calibrate => calibrate_corpus(&corpus, &task)?,
    };
    let inst = corpus.instance(&task, lambda)?;
    Ok((corpus, inst))
}

fn parse_matroid(text: &str, inst: &Instance) -> Result<Matroid> {
    if let Some(k) = text.strip_prefix("uniform:") {
        return Ok(Matroid::uniform(k.trim().parse().context("uniform rank")?));
    }
    let Some(spec) = text.strip_prefix("partition:") else {
        bail!("matroid must be uniform:<k> or partition:<spec>, got `{text}`");
    };
    let budgets: Vec<usize> = match spec.split_once('x') {
        Some((bands, budget)) => {
            vec![budget.trim().parse().context("band budget")?; bands.trim().parse().context("band count")?]
        }
        None => spec
            .split(',')
            .map(|b| b.trim().parse().context("band budget"))
            .collect::<Result<_>>()?,
    };
    if budgets.is_empty() {
        bail!("partition needs at least one band");
    }
    let costs: Vec<f64> = inst.experts().iter().map(|e| e.cost).collect();
    let part_of = salary_bands(&costs, budgets.len())?;
    Ok(Matroid::partition(part_of, budgets)?)
}

fn solution_json(sol: &Solution, corpus: &Corpus, inst: &Instance) -> serde_json::Value {
    let names: Vec<&str> = sol
        .selected
        .iter()
        .map(|e| corpus.experts()[e.index()].name.as_str())
        .collect();
    json!({
        "solver": sol.telemetry.solver_name,
        "lambda": inst.lambda(),
        "task_skills": inst.task_len(),
        "selected": names,
        "objective": sol.objective,
        "coverage": sol.coverage,
        "cost": sol.cost,
        "oracle_evaluations": sol.telemetry.oracle_evaluations,
        "millis": sol.telemetry.wall_time.as_secs_f64() * 1e3,
    })
}

fn solve(args: SolveArgs) -> Result<()> {
    let kind: SolverKind = args.solver.parse()?;
    let (corpus, inst) = build_instance(&args.instance, args.lambda)?;
    let matroid = args
        .constraint
        .matroid
        .as_deref()
        .map(|m| parse_matroid(m, &inst))
        .transpose()?;
    let budget = match (&matroid, args.constraint.k) {
        (Some(m), _) => Budget::Matroid(m),
        (None, Some(k)) => Budget::Cardinality(k),
        (None, None) => Budget::Unconstrained,
    };
    let defaults = RunParams::default();
    let params = RunParams {
        epsilon_stochastic: args.epsilon.unwrap_or(defaults.epsilon_stochastic),
        epsilon_streaming: args.epsilon.unwrap_or(defaults.epsilon_streaming),
        seed: args.instance.seed,
        order: args.order.parse::<ArrivalOrder>()?,
    };
    let sol = run_solver(kind, &inst, budget, &params)?;
    println!("{}", serde_json::to_string_pretty(&solution_json(&sol, &corpus, &inst))?);
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut config = SweepConfig::load(&args.config)?;
    if let Some(r) = args.reps {
        config.repetitions = r;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(l) = args.lambda {
        config.lambda = l;
    }
    config.validate()?;
    let corpus = config.corpus.load()?;
    let outcome = run_sweep(&config, &corpus)?;
    for err in &outcome.errors {
        eprintln!("cell failed: {err}");
    }
    match &args.out {
        Some(path) => write_rows(create(path)?, &outcome.rows)?,
        None => write_rows(io::stdout().lock(), &outcome.rows)?,
    }
    if let Some(path) = &args.summary {
        write_aggregates(create(path)?, &outcome.aggregates)?;
    }
    eprintln!("lambda = {}", outcome.lambda);
    eprintln!("{:<32} {:>10} {:>14} {:>12}", "solver", "grid", "mean g", "+/-");
    for a in &outcome.aggregates {
        eprintln!(
            "{:<32} {:>10} {:>14.3} {:>12.3}",
            a.solver,
            a.grid_param,
            a.mean_objective,
            a.half_width()
        );
    }
    Ok(())
}

fn calibrate(args: InstanceArgs) -> Result<()> {
    let corpus = load_corpus(&args)?;
    let task = resolve_task(&args, &corpus)?;
    println!("{}", calibrate_corpus(&corpus, &task)?);
    Ok(())
}

fn gen_data(args: GenArgs) -> Result<()> {
    let mut spec = SyntheticSpec::preset(&args.preset)?;
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(n) = args.num_experts {
        spec.experts = n;
    }
    if let Some(m) = args.mean_skills {
        spec.mean_skills = m;
    }
    if let Some(u) = args.skills {
        spec.skill_universe = u;
    }
    let records = generate_corpus(&spec)?;
    write_experts(&args.out, &records)?;
    let corpus = Corpus::from_records(&records);
    eprintln!(
        "wrote {} experts, {} skills, {:.2} skills per expert",
        corpus.num_experts(),
        corpus.num_skills(),
        corpus.mean_skills_per_expert()
    );
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let (corpus, inst) = build_instance(&args.instance, args.lambda)?;
    if inst.num_experts() > MAX_ORACLE_EXPERTS {
        bail!(
            "oracle handles at most {MAX_ORACLE_EXPERTS} experts, instance has {}",
            inst.num_experts()
        );
    }
    let matroid = args
        .constraint
        .matroid
        .as_deref()
        .map(|m| parse_matroid(m, &inst))
        .transpose()?;
    let constraint = match (&matroid, args.constraint.k) {
        (Some(m), _) => Constraint::Matroid(m),
        (None, Some(k)) => Constraint::Cardinality(k),
        (None, None) => Constraint::None,
    };
    let r = brute_force(&inst, constraint)?;
    let names: Vec<&str> = r
        .best_set
        .iter()
        .map(|e| corpus.experts()[e.index()].name.as_str())
        .collect();
    let out = json!({
        "lambda": inst.lambda(),
        "best_set": names,
        "best_g": r.best_g,
        "f_opt": r.f_opt,
        "c_opt": r.c_opt,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Calibrate(a) => calibrate(a),
        Command::GenData(a) => gen_data(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
