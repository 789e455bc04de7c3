//! Data side of the experiments: expert files, synthetic corpora, task
//! generation, lambda calibration, salary bands and the sweep runner.

pub mod bands;
pub mod calibrate;
pub mod ingest;
pub mod sweep;
pub mod synth;
pub mod tasks;

pub use bands::{salary_band_matroid, salary_bands};
pub use calibrate::{calibrate_corpus, calibrate_lambda, greedy_set_cover};
pub use ingest::{load_experts, parse_experts, write_experts, Corpus, ExpertRecord, LineError, LoadReport};
pub use sweep::{run_sweep, SweepConfig, SweepOutcome, SweepRow};
pub use synth::{generate_corpus, SyntheticSpec};
pub use tasks::{categorize_skills, generate_task, SkillCategories, TaskSpec};
