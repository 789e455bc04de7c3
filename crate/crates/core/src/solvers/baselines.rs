//! Comparison baselines: top-k by singleton weight and the distorted greedy
//! family.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{better, finish};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::model::{ExpertId, Instance, Solution};
use crate::objective::{distortion, ObjectiveState};

/// Experts with their singleton weight `f({e}) - c(e)`, heaviest first (ties
/// to the lowest id).
fn by_weight(state: &ObjectiveState<'_>) -> Vec<(f64, ExpertId)> {
    let inst = state.instance();
    let mut weighted: Vec<(f64, ExpertId)> = inst
        .expert_ids()
        .map(|e| (state.marginal_gain(e), e))
        .collect();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    weighted
}

/// The `k` experts with the largest positive singleton weight.
pub fn top_k_experts(inst: &Instance, k: usize) -> Solution {
    let start = Instant::now();
    let mut state = ObjectiveState::new(inst);
    if k > 0 {
        let chosen: Vec<ExpertId> = by_weight(&state)
            .into_iter()
            .take_while(|(w, _)| *w > 0.0)
            .take(k)
            .map(|(_, e)| e)
            .collect();
        for e in chosen {
            state.insert(e).expect("distinct experts");
        }
    }
    finish(&state, "top-k-experts", start)
}

/// Scans experts by singleton weight and keeps each one that is feasible and
/// has positive marginal gain `g(e | Q)`.
pub fn top_k_experts_matroid(inst: &Instance, matroid: &Matroid) -> Result<Solution> {
    matroid.check_ground(inst.num_experts())?;
    let start = Instant::now();
    let mut state = ObjectiveState::new(inst);
    let mut tracker = matroid.tracker();
    for (_, e) in by_weight(&state) {
        if !tracker.fits(e) {
            continue;
        }
        if state.marginal_gain(e) > 0.0 {
            state.insert(e)?;
            tracker.insert(e)?;
        }
    }
    Ok(finish(&state, "top-k-experts-matroid", start))
}

/// One distorted-greedy step over `candidates`: adds the argmax of the
/// distorted marginal if it is strictly positive.
fn distorted_step(
    state: &mut ObjectiveState<'_>,
    candidates: impl Iterator<Item = ExpertId>,
    iteration: usize,
    budget: usize,
) {
    let weight = distortion(iteration, budget).expect("iteration < budget");
    let inst = state.instance();
    let mut best: Option<(f64, ExpertId)> = None;
    for e in candidates {
        if state.contains(e) {
            continue;
        }
        let gain = weight * state.marginal_coverage(e) - inst.cost(e);
        if better(gain, e, best) {
            best = Some((gain, e));
        }
    }
    if let Some((gain, e)) = best {
        if gain > 0.0 {
            state.insert(e).expect("candidate not yet selected");
        }
    }
}

/// Distorted greedy: `k` iterations, iteration `i` maximizing
/// `(1 - 1/k)^(k-(i+1)) f(e|Q) - c(e)`.
pub fn distorted_greedy(inst: &Instance, k: usize) -> Solution {
    let start = Instant::now();
    let mut state = ObjectiveState::new(inst);
    for i in 0..k {
        distorted_step(&mut state, inst.expert_ids(), i, k);
    }
    finish(&state, "distorted-greedy", start)
}

/// Per-iteration sample size `min(n, ceil((n/k) ln(1/eps)))`.
pub fn stochastic_sample_size(n: usize, k: usize, epsilon: f64) -> usize {
    if k == 0 {
        return n;
    }
    let raw = (n as f64 / k as f64) * (1.0 / epsilon).ln();
    (raw.ceil() as usize).min(n)
}

/// Distorted greedy restricted, in each iteration, to a fresh uniform sample
/// of experts drawn with replacement. A sample size of at least `n` uses every
/// expert.
pub fn stochastic_distorted_greedy(
    inst: &Instance,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<Solution> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let start = Instant::now();
    let n = inst.num_experts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ObjectiveState::new(inst);
    let size = stochastic_sample_size(n, k, epsilon);
    let mut sample = Vec::with_capacity(size.min(n));
    for i in 0..k {
        if size >= n {
            distorted_step(&mut state, inst.expert_ids(), i, k);
        } else {
            sample.clear();
            sample.extend((0..size).map(|_| rng.random_range(0..n)));
            sample.sort_unstable();
            sample.dedup();
            distorted_step(&mut state, sample.iter().map(|&e| ExpertId::from_index(e)), i, k);
        }
    }
    Ok(finish(&state, "stochastic-distorted-greedy", start))
}

/// `n` iterations; each draws one expert uniformly (with replacement) and adds
/// it if its distorted marginal with budget `n` is positive.
pub fn unconstrained_distorted_greedy(inst: &Instance, seed: u64) -> Solution {
    let start = Instant::now();
    let n = inst.num_experts();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ObjectiveState::new(inst);
    for i in 0..n {
        let e = ExpertId::from_index(rng.random_range(0..n));
        if state.contains(e) {
            continue;
        }
        let gain = state.distorted_marginal(e, i, n).expect("i < n");
        if gain > 0.0 {
            state.insert(e).expect("not yet selected");
        }
    }
    finish(&state, "unconstrained-distorted-greedy", start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{empty_instance, instance_a, random_instance, RandomInstanceParams};
    use crate::model::{Expert, InstanceData, SkillId};

    fn ids(sol: &Solution) -> Vec<u32> {
        sol.selected.iter().map(|e| e.0).collect()
    }

    fn single(cost: f64) -> Instance {
        Instance::new(InstanceData {
            experts: vec![Expert::new(0, [0, 1], cost)],
            num_skills: 2,
            task: vec![SkillId(0), SkillId(1)],
            lambda: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn top_k_examples() {
        let inst = instance_a();
        let sol = top_k_experts(&inst, 2);
        assert_eq!(ids(&sol), vec![2, 0]);
        assert_eq!(sol.objective, 2.5);
        assert!(top_k_experts(&inst, 0).is_empty());
        assert!(top_k_experts(&inst.with_lambda(0.2).unwrap(), 3).is_empty());
    }

    #[test]
    fn top_k_matroid_examples() {
        let inst = instance_a();
        let sol = top_k_experts_matroid(&inst, &Matroid::uniform(2)).unwrap();
        assert_eq!(ids(&sol), vec![2]);
        let zero = Matroid::partition(vec![0, 1, 1], vec![0, 0]).unwrap();
        assert!(top_k_experts_matroid(&inst, &zero).unwrap().is_empty());
        let sol = top_k_experts_matroid(&single(1.0), &Matroid::uniform(1)).unwrap();
        assert_eq!(ids(&sol), vec![0]);
    }

    #[test]
    fn distorted_greedy_examples() {
        let inst = instance_a();
        let sol = distorted_greedy(&inst, 1);
        assert_eq!(ids(&sol), vec![2]);
        assert_eq!(sol.objective, 3.5);
        assert!(distorted_greedy(&inst, 0).is_empty());
        assert_eq!(ids(&distorted_greedy(&single(1.0), 1)), vec![0]);
        assert!(distorted_greedy(&empty_instance(), 3).is_empty());
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(stochastic_sample_size(1000, 10, 0.01), 461);
        assert_eq!(stochastic_sample_size(10, 10, 1e-9), 10);
    }

    #[test]
    fn stochastic_saturated_sample_equals_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &RandomInstanceParams::small(12, 2.0));
            for k in 1..5 {
                let a = distorted_greedy(&inst, k);
                let b = stochastic_distorted_greedy(&inst, k, 1e-12, 9).unwrap();
                assert_eq!(a.selected, b.selected);
            }
        }
    }

    #[test]
    fn stochastic_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(&mut rng, &RandomInstanceParams::small(60, 2.0));
        let a = stochastic_distorted_greedy(&inst, 5, 0.2, 77).unwrap();
        let b = stochastic_distorted_greedy(&inst, 5, 0.2, 77).unwrap();
        assert_eq!(a.selected, b.selected);
        assert!(stochastic_distorted_greedy(&inst, 5, 0.0, 1).is_err());
        assert!(stochastic_distorted_greedy(&inst, 5, 1.0, 1).is_err());
    }

    #[test]
    fn unconstrained_distorted_examples() {
        let sol = unconstrained_distorted_greedy(&single(0.5), 1);
        assert_eq!(ids(&sol), vec![0]);
        assert!(unconstrained_distorted_greedy(&empty_instance(), 1).is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let inst = random_instance(&mut rng, &RandomInstanceParams::small(40, 2.0));
        let a = unconstrained_distorted_greedy(&inst, 5);
        let b = unconstrained_distorted_greedy(&inst, 5);
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.telemetry.oracle_evaluations, b.telemetry.oracle_evaluations);
        assert!(a.telemetry.oracle_evaluations <= 40);
    }
}
