//! Problem instances, solutions and solver telemetry.
//!
//! An [`Instance`] is immutable once built: the raw [`InstanceData`] is
//! validated and every expert's skill list is projected onto the task, so the
//! solvers only ever touch task-relevant skills.

use std::collections::HashSet;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index into an instance's skill universe.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SkillId(pub u32);

impl SkillId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SkillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense index of an expert; equal to its position in the instance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpertId(pub u32);

impl ExpertId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        ExpertId(i as u32)
    }
}

impl fmt::Display for ExpertId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expert {
    pub id: ExpertId,
    pub skills: Vec<SkillId>,
    pub cost: f64,
}

impl Expert {
    pub fn new(id: usize, skills: impl IntoIterator<Item = u32>, cost: f64) -> Self {
        Expert {
            id: ExpertId::from_index(id),
            skills: skills.into_iter().map(SkillId).collect(),
            cost,
        }
    }
}

/// Unvalidated instance contents, as read from or written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub experts: Vec<Expert>,
    pub num_skills: usize,
    pub task: Vec<SkillId>,
    pub lambda: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn error(message: String) -> Self {
        Violation {
            severity: Severity::Error,
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => f.write_str(&self.message),
            Severity::Warning => write!(f, "warning: {}", self.message),
        }
    }
}

/// Collects every invariant violation in `data`. An empty task is reported as a
/// warning only.
pub fn validate_instance(data: &InstanceData) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::with_capacity(data.experts.len());
    for (pos, expert) in data.experts.iter().enumerate() {
        if !seen.insert(expert.id) {
            out.push(Violation::error(format!("expert {}: duplicate id", expert.id)));
        } else if expert.id.index() != pos {
            out.push(Violation::error(format!(
                "expert {}: id does not match position {pos}",
                expert.id
            )));
        }
        if !(expert.cost.is_finite() && expert.cost >= 0.0) {
            out.push(Violation::error(format!("expert {}: negative cost", expert.id)));
        }
        for skill in &expert.skills {
            if skill.index() >= data.num_skills {
                out.push(Violation::error(format!(
                    "expert {}: skill {skill} out of range (num_skills = {})",
                    expert.id, data.num_skills
                )));
            }
        }
    }
    let mut task_seen = HashSet::with_capacity(data.task.len());
    for skill in &data.task {
        if skill.index() >= data.num_skills {
            out.push(Violation::error(format!(
                "task skill {skill} out of range (num_skills = {})",
                data.num_skills
            )));
        } else if !task_seen.insert(*skill) {
            out.push(Violation::error(format!("task skill {skill} listed twice")));
        }
    }
    if !(data.lambda.is_finite() && data.lambda > 0.0) {
        out.push(Violation::error(format!(
            "lambda must be positive and finite, got {}",
            data.lambda
        )));
    }
    if data.task.is_empty() {
        out.push(Violation {
            severity: Severity::Warning,
            message: "task is empty".to_string(),
        });
    }
    out
}

/// A validated problem instance.
#[derive(Clone, Debug)]
pub struct Instance {
    data: InstanceData,
    /// Per expert: sorted, deduplicated task-local indices of its task skills.
    relevant: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        let errors: Vec<String> = validate_instance(&data)
            .into_iter()
            .filter(|v| v.severity == Severity::Error)
            .map(|v| v.message)
            .collect();
        if !errors.is_empty() {
            return Err(Error::InvalidInstance(errors));
        }

        let mut local = vec![u32::MAX; data.num_skills];
        for (i, skill) in data.task.iter().enumerate() {
            local[skill.index()] = i as u32;
        }
        let relevant = data
            .experts
            .iter()
            .map(|e| {
                let mut idx: Vec<u32> = e
                    .skills
                    .iter()
                    .map(|s| local[s.index()])
                    .filter(|&l| l != u32::MAX)
                    .collect();
                idx.sort_unstable();
                idx.dedup();
                idx
            })
            .collect();
        Ok(Instance { data, relevant })
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn into_data(self) -> InstanceData {
        self.data
    }

    #[inline]
    pub fn num_experts(&self) -> usize {
        self.data.experts.len()
    }

    pub fn num_skills(&self) -> usize {
        self.data.num_skills
    }

    #[inline]
    pub fn task_len(&self) -> usize {
        self.data.task.len()
    }

    pub fn task(&self) -> &[SkillId] {
        &self.data.task
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.data.lambda
    }

    pub fn experts(&self) -> &[Expert] {
        &self.data.experts
    }

    pub fn expert_ids(&self) -> impl Iterator<Item = ExpertId> + '_ {
        (0..self.num_experts()).map(ExpertId::from_index)
    }

    #[inline]
    pub fn cost(&self, e: ExpertId) -> f64 {
        self.data.experts[e.index()].cost
    }

    /// Task-local indices of the task skills `e` possesses.
    #[inline]
    pub fn task_skills(&self, e: ExpertId) -> &[u32] {
        &self.relevant[e.index()]
    }

    /// Same instance with a different coverage coefficient.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut data = self.data.clone();
        data.lambda = lambda;
        Instance::new(data)
    }

    /// Evaluates a set of experts from scratch, ignoring duplicates.
    pub fn evaluate(&self, set: &[ExpertId]) -> Evaluation {
        let mut covered = vec![false; self.task_len()];
        let mut seen = HashSet::with_capacity(set.len());
        let mut coverage = 0usize;
        let mut cost = 0.0;
        for &e in set {
            if !seen.insert(e) {
                continue;
            }
            cost += self.cost(e);
            for &s in self.task_skills(e) {
                if !covered[s as usize] {
                    covered[s as usize] = true;
                    coverage += 1;
                }
            }
        }
        Evaluation {
            coverage,
            cost,
            objective: self.lambda() * coverage as f64 - cost,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Unscaled number of covered task skills.
    pub coverage: usize,
    pub cost: f64,
    /// `lambda * coverage - cost`.
    pub objective: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Telemetry {
    pub solver_name: String,
    pub oracle_evaluations: u64,
    #[serde(with = "duration_secs")]
    pub wall_time: Duration,
}

mod duration_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Selected experts in insertion order.
    pub selected: Vec<ExpertId>,
    /// `g` of every prefix `selected[..=i]`.
    pub prefix_objectives: Vec<f64>,
    pub objective: f64,
    pub coverage: usize,
    pub cost: f64,
    pub telemetry: Telemetry,
}

impl Solution {
    pub fn empty(solver_name: &str) -> Self {
        Solution {
            selected: Vec::new(),
            prefix_objectives: Vec::new(),
            objective: 0.0,
            coverage: 0,
            cost: 0.0,
            telemetry: Telemetry {
                solver_name: solver_name.to_string(),
                ..Telemetry::default()
            },
        }
    }

    /// Builds a solution by replaying `selected` from scratch.
    pub fn from_selection(inst: &Instance, selected: Vec<ExpertId>, telemetry: Telemetry) -> Self {
        let mut covered = vec![false; inst.task_len()];
        let mut coverage = 0usize;
        let mut cost = 0.0;
        let mut prefix_objectives = Vec::with_capacity(selected.len());
        for &e in &selected {
            cost += inst.cost(e);
            for &s in inst.task_skills(e) {
                if !covered[s as usize] {
                    covered[s as usize] = true;
                    coverage += 1;
                }
            }
            prefix_objectives.push(inst.lambda() * coverage as f64 - cost);
        }
        Solution {
            objective: inst.lambda() * coverage as f64 - cost,
            selected,
            prefix_objectives,
            coverage,
            cost,
            telemetry,
        }
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Checks the stored fields against a from-scratch recomputation.
    pub fn verify(&self, inst: &Instance, tol: f64) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for e in &self.selected {
            if e.index() >= inst.num_experts() {
                return Err(format!("expert {e} out of range"));
            }
            if !seen.insert(*e) {
                return Err(format!("expert {e} selected twice"));
            }
        }
        let eval = inst.evaluate(&self.selected);
        if eval.coverage != self.coverage {
            return Err(format!("coverage {} != recomputed {}", self.coverage, eval.coverage));
        }
        if (eval.cost - self.cost).abs() > tol {
            return Err(format!("cost {} != recomputed {}", self.cost, eval.cost));
        }
        if (eval.objective - self.objective).abs() > tol {
            return Err(format!(
                "objective {} != recomputed {}",
                self.objective, eval.objective
            ));
        }
        let direct = inst.lambda() * self.coverage as f64 - self.cost;
        if (direct - self.objective).abs() > tol {
            return Err(format!("objective {} != lambda*coverage - cost {direct}", self.objective));
        }
        Ok(())
    }
}
