//! Repeated solver runs over a constraint grid, with per-point aggregates.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bands::salary_band_matroid;
use super::calibrate::calibrate_corpus;
use super::ingest::{load_experts, Corpus};
use super::synth::{generate_corpus, SyntheticSpec};
use super::tasks::{categorize_skills, generate_task, TaskSpec};
use crate::error::{Error, Result};
use crate::model::{Instance, SkillId};
use crate::registry::{run_solver, Budget, RunParams, SolverKind};
use crate::streaming::ArrivalOrder;

pub const ROW_HEADER: [&str; 8] = [
    "solver", "grid_param", "rep", "objective", "coverage", "cost", "evals", "millis",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Grid {
    /// Cardinality budgets `k`.
    Cardinality { values: Vec<usize> },
    /// Fractions of the expert pool sampled per repetition; no constraint.
    SampleFraction { values: Vec<f64> },
    /// Salary-band partition with the same budget in each band.
    Partition {
        budgets: Vec<usize>,
        #[serde(default = "default_bands")]
        bands: usize,
    },
}

fn default_bands() -> usize {
    5
}

impl Grid {
    fn labels(&self) -> Vec<String> {
        match self {
            Grid::Cardinality { values } => values.iter().map(usize::to_string).collect(),
            Grid::SampleFraction { values } => values.iter().map(f64::to_string).collect(),
            Grid::Partition { budgets, .. } => budgets.iter().map(usize::to_string).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LambdaMode {
    Fixed(f64),
    /// Greedy set-cover calibration on a task drawn from the master seed.
    #[default]
    Calibrate,
}

impl Serialize for LambdaMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LambdaMode::Fixed(v) => s.serialize_f64(*v),
            LambdaMode::Calibrate => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(LambdaMode::Fixed(v)),
            Raw::Int(v) => Ok(LambdaMode::Fixed(v as f64)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for LambdaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(LambdaMode::Calibrate);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(LambdaMode::Fixed(v)),
            _ => Err(format!("lambda must be a positive number or `auto`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    /// `1.96 * sd / sqrt(r)` around the mean.
    #[default]
    Normal,
    /// Smallest and largest observed value.
    MinMax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskParams {
    #[serde(default = "default_task_size")]
    pub num_skills: usize,
    pub f_p: f64,
    pub f_r: f64,
}

fn default_task_size() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CorpusSource {
    Synthetic { preset: String },
    File { path: PathBuf },
}

impl CorpusSource {
    pub fn load(&self) -> Result<Corpus> {
        match self {
            CorpusSource::Synthetic { preset } => {
                Ok(Corpus::from_records(&generate_corpus(&SyntheticSpec::preset(preset)?)?))
            }
            CorpusSource::File { path } => {
                let report = load_experts(path)?;
                if let Some(first) = report.errors.first() {
                    return Err(Error::Config(format!(
                        "{}: {} malformed line(s), first at line {}: {}",
                        path.display(),
                        report.errors.len(),
                        first.line,
                        first.message
                    )));
                }
                Ok(Corpus::from_records(&report.records))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub solvers: Vec<String>,
    pub grid: Grid,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub lambda: LambdaMode,
    pub task: TaskParams,
    #[serde(default = "default_eps_stochastic")]
    pub epsilon_stochastic: f64,
    #[serde(default = "default_eps_streaming")]
    pub epsilon_streaming: f64,
    #[serde(default)]
    pub interval: IntervalMethod,
    pub corpus: CorpusSource,
}

fn default_reps() -> usize {
    5
}

fn default_eps_stochastic() -> f64 {
    0.01
}

fn default_eps_streaming() -> f64 {
    0.05
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn solver_kinds(&self) -> Result<Vec<SolverKind>> {
        self.solvers.iter().map(|s| s.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.solvers.is_empty() {
            return bad("no solvers listed");
        }
        self.solver_kinds()?;
        if self.grid.labels().is_empty() {
            return bad("grid has no values");
        }
        if let Grid::SampleFraction { values } = &self.grid {
            if values.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
                return bad("sample fractions must lie in (0, 1]");
            }
        }
        if let Grid::Partition { bands: 0, .. } = self.grid {
            return bad("partition grid needs at least one band");
        }
        if let LambdaMode::Fixed(v) = self.lambda {
            if !(v > 0.0 && v.is_finite()) {
                return bad("lambda must be positive");
            }
        }
        self.task_spec(0).validate()
    }

    fn task_spec(&self, seed: u64) -> TaskSpec {
        TaskSpec::new(self.task.num_skills, self.task.f_p, self.task.f_r, seed)
    }
}

/// One solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub solver: String,
    pub grid_param: String,
    pub rep: usize,
    pub objective: f64,
    pub coverage: usize,
    pub cost: f64,
    pub evals: u64,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellError {
    pub solver: String,
    pub grid_param: String,
    pub rep: usize,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {} (rep {}): {}",
            self.solver, self.grid_param, self.rep, self.message
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub solver: String,
    pub grid_param: String,
    pub reps: usize,
    pub mean_objective: f64,
    pub low: f64,
    pub high: f64,
    pub mean_coverage: f64,
    pub mean_cost: f64,
    pub mean_evals: f64,
    pub mean_millis: f64,
}

impl Aggregate {
    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub lambda: f64,
    /// Sorted by solver (config order), grid point, repetition.
    pub rows: Vec<SweepRow>,
    pub errors: Vec<CellError>,
    pub aggregates: Vec<Aggregate>,
}

impl SweepOutcome {
    pub fn aggregate(&self, solver: &str, grid_param: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.solver == solver && a.grid_param == grid_param)
    }
}

/// `1.96 * sd / sqrt(r)` with the sample standard deviation; 0 for one value.
pub fn normal_half_width(values: &[f64]) -> f64 {
    let r = values.len();
    if r < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    1.96 * var.sqrt() / (r as f64).sqrt()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn aggregate_rows(rows: &[SweepRow], method: IntervalMethod) -> Vec<Aggregate> {
    let mut groups: Vec<((&str, &str), Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        let key = (row.solver.as_str(), row.grid_param.as_str());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|((solver, grid_param), g)| {
            let objectives: Vec<f64> = g.iter().map(|r| r.objective).collect();
            let m = mean(objectives.iter().copied());
            let (low, high) = match method {
                IntervalMethod::Normal => {
                    let h = normal_half_width(&objectives);
                    (m - h, m + h)
                }
                IntervalMethod::MinMax => (
                    objectives.iter().copied().fold(f64::INFINITY, f64::min),
                    objectives.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ),
            };
            Aggregate {
                solver: solver.to_string(),
                grid_param: grid_param.to_string(),
                reps: g.len(),
                mean_objective: m,
                low,
                high,
                mean_coverage: mean(g.iter().map(|r| r.coverage as f64)),
                mean_cost: mean(g.iter().map(|r| r.cost)),
                mean_evals: mean(g.iter().map(|r| r.evals as f64)),
                mean_millis: mean(g.iter().map(|r| r.millis)),
            }
        })
        .collect()
}

/// Seeds for the repetitions, drawn from one ChaCha8 stream on the master seed.
pub fn repetition_seeds(master: u64, reps: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..reps).map(|_| rng.next_u64()).collect()
}

struct Prepared {
    task: Vec<SkillId>,
    seed: u64,
}

/// Runs the sweep on an already loaded corpus. Cells run in parallel; the
/// output does not depend on scheduling.
pub fn run_sweep(config: &SweepConfig, corpus: &Corpus) -> Result<SweepOutcome> {
    config.validate()?;
    let kinds = config.solver_kinds()?;
    let categories = categorize_skills(corpus)?;
    let lambda = match config.lambda {
        LambdaMode::Fixed(v) => v,
        LambdaMode::Calibrate => {
            let task = generate_task(&config.task_spec(config.master_seed), &categories)?;
            calibrate_corpus(corpus, &task)?
        }
    };

    let reps: Vec<Prepared> = repetition_seeds(config.master_seed, config.repetitions)
        .into_iter()
        .map(|seed| {
            Ok(Prepared {
                task: generate_task(&config.task_spec(seed), &categories)?,
                seed,
            })
        })
        .collect::<Result<_>>()?;

    let labels = config.grid.labels();
    let (num_grid, num_reps) = (labels.len(), reps.len());
    let cells: Vec<(usize, usize, usize)> = (0..kinds.len())
        .flat_map(|s| (0..num_grid).flat_map(move |g| (0..num_reps).map(move |r| (s, g, r))))
        .collect();

    let results: Vec<std::result::Result<SweepRow, CellError>> = cells
        .par_iter()
        .map(|&(s, g, r)| {
            let kind = kinds[s];
            let cell_error = |message: String| CellError {
                solver: kind.name().to_string(),
                grid_param: labels[g].clone(),
                rep: r,
                message,
            };
            run_cell(config, corpus, kind, g, &reps[r], lambda, s)
                .map(|sol| SweepRow {
                    solver: kind.name().to_string(),
                    grid_param: labels[g].clone(),
                    rep: r,
                    objective: sol.objective,
                    coverage: sol.coverage,
                    cost: sol.cost,
                    evals: sol.telemetry.oracle_evaluations,
                    millis: sol.telemetry.wall_time.as_secs_f64() * 1e3,
                })
                .map_err(|e| cell_error(e.to_string()))
        })
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for res in results {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(e),
        }
    }
    let aggregates = aggregate_rows(&rows, config.interval);
    Ok(SweepOutcome {
        lambda,
        rows,
        errors,
        aggregates,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    config: &SweepConfig,
    corpus: &Corpus,
    kind: SolverKind,
    grid_index: usize,
    rep: &Prepared,
    lambda: f64,
    solver_index: usize,
) -> Result<crate::model::Solution> {
    let params = RunParams {
        epsilon_stochastic: config.epsilon_stochastic,
        epsilon_streaming: config.epsilon_streaming,
        seed: rep.seed ^ (solver_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        order: ArrivalOrder::Natural,
    };
    match &config.grid {
        Grid::Cardinality { values } => {
            let inst = corpus.instance(&rep.task, lambda)?;
            run_solver(kind, &inst, Budget::Cardinality(values[grid_index]), &params)
        }
        Grid::SampleFraction { values } => {
            let inst = sampled_instance(corpus, &rep.task, lambda, values[grid_index], rep.seed)?;
            run_solver(kind, &inst, Budget::Unconstrained, &params)
        }
        Grid::Partition { budgets, bands } => {
            let inst = corpus.instance(&rep.task, lambda)?;
            let m = salary_band_matroid(&inst, *bands, budgets[grid_index])?;
            run_solver(kind, &inst, Budget::Matroid(&m), &params)
        }
    }
}

/// Instance over `round(fraction * n)` experts sampled uniformly without
/// replacement with the repetition seed, kept in corpus order.
pub fn sampled_instance(
    corpus: &Corpus,
    task: &[SkillId],
    lambda: f64,
    fraction: f64,
    seed: u64,
) -> Result<Instance> {
    let n = corpus.num_experts();
    let m = ((fraction * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, m).into_vec();
    picked.sort_unstable();
    corpus.instance_for(&picked, task, lambda)
}

pub fn write_rows(w: impl Write, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROW_HEADER)?;
    for r in rows {
        out.write_record([
            r.solver.clone(),
            r.grid_param.clone(),
            r.rep.to_string(),
            r.objective.to_string(),
            r.coverage.to_string(),
            r.cost.to_string(),
            r.evals.to_string(),
            format!("{:.3}", r.millis),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_aggregates(w: impl Write, aggregates: &[Aggregate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for a in aggregates {
        out.serialize(a)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

/// Mean objective per grid point for each solver, in grid order.
pub fn means_by_solver(outcome: &SweepOutcome) -> BTreeMap<String, Vec<(String, f64)>> {
    let mut out: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for a in &outcome.aggregates {
        out.entry(a.solver.clone())
            .or_default()
            .push((a.grid_param.clone(), a.mean_objective));
    }
    out
}
