use std::time::Instant;

use super::{better, finish, finish_with};
use crate::error::Result;
use crate::matroid::Matroid;
use crate::model::{ExpertId, Instance, Solution};
use crate::objective::{ObjectiveState, ScaleFactor};

/// Eager greedy on `f - s*c` over the independent sets of `matroid`.
///
/// With `stop_at_nonpositive` the run ends at the first iteration whose best
/// scaled gain is `<= 0`; otherwise it continues until no feasible candidate
/// is left.
fn eager_greedy<'a>(
    inst: &'a Instance,
    matroid: &Matroid,
    scale: ScaleFactor,
    stop_at_nonpositive: bool,
) -> ObjectiveState<'a> {
    let mut state = ObjectiveState::new(inst);
    let mut tracker = matroid.tracker();
    let mut candidates: Vec<ExpertId> = inst.expert_ids().filter(|&e| tracker.fits(e)).collect();

    while !candidates.is_empty() {
        let mut best: Option<(f64, ExpertId)> = None;
        let mut best_pos = 0;
        for (pos, &e) in candidates.iter().enumerate() {
            let gain = state.scaled_marginal(e, scale);
            if better(gain, e, best) {
                best = Some((gain, e));
                best_pos = pos;
            }
        }
        let (gain, e) = best.expect("candidates is non-empty");
        if stop_at_nonpositive && gain <= 0.0 {
            break;
        }
        candidates.swap_remove(best_pos);
        state.insert(e).expect("candidate not yet selected");
        tracker.insert(e).expect("candidate is feasible");
        candidates.retain(|&c| tracker.fits(c));
    }
    state
}

/// Cost-scaled greedy under a cardinality budget `k`.
pub fn csg(inst: &Instance, k: usize) -> Solution {
    let start = Instant::now();
    let state = eager_greedy(inst, &Matroid::uniform(k), ScaleFactor::OFFLINE, true);
    finish(&state, "csg", start)
}

/// Cost-scaled greedy under a matroid constraint.
pub fn mcsg(inst: &Instance, matroid: &Matroid) -> Result<Solution> {
    matroid.check_ground(inst.num_experts())?;
    let start = Instant::now();
    let state = eager_greedy(inst, matroid, ScaleFactor::OFFLINE, true);
    Ok(finish(&state, "mcsg", start))
}

/// Plain greedy on `g = f - c` (scale 1), cardinality version.
pub fn greedy_baseline(inst: &Instance, k: usize) -> Solution {
    let start = Instant::now();
    let state = eager_greedy(inst, &Matroid::uniform(k), ScaleFactor::UNIT, true);
    finish(&state, "greedy", start)
}

/// Plain greedy on `g = f - c` (scale 1), matroid version.
pub fn greedy_baseline_matroid(inst: &Instance, matroid: &Matroid) -> Result<Solution> {
    matroid.check_ground(inst.num_experts())?;
    let start = Instant::now();
    let state = eager_greedy(inst, matroid, ScaleFactor::UNIT, true);
    Ok(finish(&state, "greedy", start))
}

/// Runs the scaled greedy to exhaustion and keeps the prefix with the largest
/// `g`; ties go to the shorter prefix, and the empty prefix is a candidate.
fn best_prefix(inst: &Instance, matroid: &Matroid, name: &str) -> Solution {
    let start = Instant::now();
    let state = eager_greedy(inst, matroid, ScaleFactor::OFFLINE, false);
    let full = Solution::from_selection(inst, state.selected().to_vec(), Default::default());
    let mut best_len = 0;
    let mut best_g = 0.0;
    for (i, &g) in full.prefix_objectives.iter().enumerate() {
        if g > best_g {
            best_g = g;
            best_len = i + 1;
        }
    }
    let mut selected = full.selected;
    selected.truncate(best_len);
    finish_with(&state, selected, state.evaluations(), name, start)
}

pub fn csg_prefix(inst: &Instance, k: usize) -> Solution {
    best_prefix(inst, &Matroid::uniform(k), "csg-prefix")
}

pub fn mcsg_prefix(inst: &Instance, matroid: &Matroid) -> Result<Solution> {
    matroid.check_ground(inst.num_experts())?;
    Ok(best_prefix(inst, matroid, "mcsg-prefix"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{empty_instance, instance_a};
    use crate::model::{Expert, InstanceData, SkillId};

    fn ids(sol: &Solution) -> Vec<u32> {
        sol.selected.iter().map(|e| e.0).collect()
    }

    #[test]
    fn csg_on_fixture_picks_e1_then_stops() {
        let inst = instance_a();
        let sol = csg(&inst, 3);
        assert_eq!(ids(&sol), vec![0]);
        assert_eq!(sol.objective, 3.0);
        sol.verify(&inst, 1e-9).unwrap();
        // iteration 1 evaluates 3 experts, iteration 2 the remaining 2
        assert_eq!(sol.telemetry.oracle_evaluations, 5);
    }

    #[test]
    fn csg_zero_budget_and_nonpositive_singletons() {
        let inst = instance_a();
        assert!(csg(&inst, 0).is_empty());
        let costly = inst.with_lambda(0.5).unwrap();
        let sol = csg(&costly, 3);
        assert!(sol.is_empty());
        assert_eq!(sol.objective, 0.0);
        assert!(csg(&empty_instance(), 4).is_empty());
    }

    #[test]
    fn mcsg_uniform_matches_csg() {
        let inst = instance_a();
        let sol = mcsg(&inst, &Matroid::uniform(3)).unwrap();
        assert_eq!(ids(&sol), vec![0]);
    }

    #[test]
    fn mcsg_partition_fixture() {
        let inst = instance_a();
        let m = Matroid::partition(vec![0, 0, 1], vec![0, 1]).unwrap();
        let sol = mcsg(&inst, &m).unwrap();
        assert_eq!(ids(&sol), vec![2]);
        assert_eq!(sol.objective, 3.5);
    }

    #[test]
    fn mcsg_rejects_mismatched_partition() {
        let inst = instance_a();
        let m = Matroid::partition(vec![0, 0], vec![1]).unwrap();
        assert!(mcsg(&inst, &m).is_err());
    }

    #[test]
    fn prefix_variant_finds_fixture_optimum() {
        let inst = instance_a();
        let sol = csg_prefix(&inst, 3);
        assert_eq!(ids(&sol), vec![0, 1]);
        assert_eq!(sol.objective, 4.0);
        assert!(csg_prefix(&inst, 0).is_empty());
        let m = Matroid::uniform(3);
        assert_eq!(ids(&mcsg_prefix(&inst, &m).unwrap()), vec![0, 1]);
    }

    #[test]
    fn prefix_variant_can_return_empty() {
        // single expert with g({e}) < 0
        let inst = Instance::new(InstanceData {
            experts: vec![Expert::new(0, [0], 5.0)],
            num_skills: 1,
            task: vec![SkillId(0)],
            lambda: 1.0,
        })
        .unwrap();
        let sol = csg_prefix(&inst, 1);
        assert!(sol.is_empty());
        assert_eq!(sol.telemetry.oracle_evaluations, 1);
    }

    #[test]
    fn greedy_baseline_on_fixture() {
        let inst = instance_a();
        let sol = greedy_baseline(&inst, 3);
        assert_eq!(ids(&sol), vec![2]);
        assert_eq!(sol.objective, 3.5);
        assert!(greedy_baseline(&inst, 0).is_empty());
        assert!(greedy_baseline(&inst.with_lambda(0.1).unwrap(), 3).is_empty());
        let m = Matroid::uniform(3);
        assert_eq!(ids(&greedy_baseline_matroid(&inst, &m).unwrap()), vec![2]);
    }
}
