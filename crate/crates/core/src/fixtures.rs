//! Small hand-built and random instances for tests, benchmarks and demos.

use rand::Rng;

use crate::matroid::Matroid;
use crate::model::{Expert, Instance, InstanceData, SkillId};

/// Three skills `{a, b, c}`, task = all of them, `lambda = 2`, and experts
/// `e1 = ({a,b}, 1)`, `e2 = ({b,c}, 1)`, `e3 = ({a,b,c}, 2.5)`.
pub fn instance_a() -> Instance {
    Instance::new(InstanceData {
        experts: vec![
            Expert::new(0, [0, 1], 1.0),
            Expert::new(1, [1, 2], 1.0),
            Expert::new(2, [0, 1, 2], 2.5),
        ],
        num_skills: 3,
        task: vec![SkillId(0), SkillId(1), SkillId(2)],
        lambda: 2.0,
    })
    .expect("fixture is valid")
}

pub fn empty_instance() -> Instance {
    Instance::new(InstanceData {
        experts: vec![],
        num_skills: 0,
        task: vec![],
        lambda: 1.0,
    })
    .expect("fixture is valid")
}

#[derive(Clone, Debug)]
pub struct RandomInstanceParams {
    pub experts: usize,
    pub skills: usize,
    /// Each expert holds each skill independently with this probability.
    pub skill_density: f64,
    /// Probability that a skill is part of the task.
    pub task_density: f64,
    pub max_cost: f64,
    pub lambda: f64,
}

impl RandomInstanceParams {
    pub fn small(experts: usize, lambda: f64) -> Self {
        RandomInstanceParams {
            experts,
            skills: 10,
            skill_density: 0.3,
            task_density: 0.8,
            max_cost: 3.0,
            lambda,
        }
    }
}

/// Random instance with uniform costs in `[0, max_cost)`, rounded to 1/100.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, p: &RandomInstanceParams) -> Instance {
    let experts = (0..p.experts)
        .map(|i| {
            let skills = (0..p.skills as u32).filter(|_| rng.random_bool(p.skill_density));
            let skills: Vec<u32> = skills.collect();
            let cost = (rng.random_range(0.0..p.max_cost) * 100.0).round() / 100.0;
            Expert::new(i, skills, cost)
        })
        .collect();
    let task = (0..p.skills as u32)
        .filter(|_| rng.random_bool(p.task_density))
        .map(SkillId)
        .collect();
    Instance::new(InstanceData {
        experts,
        num_skills: p.skills,
        task,
        lambda: p.lambda,
    })
    .expect("generated instance is valid")
}

/// Random partition matroid on `n` experts with `parts` parts and budgets in
/// `0..=max_budget`.
pub fn random_partition<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    parts: usize,
    max_budget: usize,
) -> Matroid {
    let part_of = (0..n).map(|_| rng.random_range(0..parts)).collect();
    let budgets = (0..parts).map(|_| rng.random_range(0..=max_budget)).collect();
    Matroid::partition(part_of, budgets).expect("parts in range")
}
