//! Lazy (priority-queue) evaluation of the cost-scaled greedy.
//!
//! Keys are stale scaled gains. Because `f - s*c` is submodular they only
//! overestimate the current gain, so an element whose fresh gain still beats
//! the top key is the true argmax.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::finish;
use crate::error::Result;
use crate::matroid::Matroid;
use crate::model::{ExpertId, Instance, Solution};
use crate::objective::{ObjectiveState, ScaleFactor};

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    id: ExpertId,
    /// Solution size at which `key` was computed.
    round: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap order: larger key first, then lower id
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn lazy_greedy<'a>(inst: &'a Instance, matroid: &Matroid, scale: ScaleFactor) -> ObjectiveState<'a> {
    let mut state = ObjectiveState::new(inst);
    let mut tracker = matroid.tracker();
    let mut queue: BinaryHeap<Entry> = inst
        .expert_ids()
        .filter(|&e| tracker.fits(e))
        .map(|e| Entry {
            key: state.scaled_marginal(e, scale),
            id: e,
            round: 0,
        })
        .collect();

    while let Some(top) = queue.pop() {
        if !tracker.fits(top.id) {
            continue;
        }
        if top.key <= 0.0 {
            break;
        }
        let fresh = if top.round == state.len() {
            top
        } else {
            Entry {
                key: state.scaled_marginal(top.id, scale),
                round: state.len(),
                ..top
            }
        };
        let wins = match queue.peek() {
            None => true,
            Some(next) => fresh >= *next,
        };
        if !wins {
            queue.push(fresh);
            continue;
        }
        if fresh.key <= 0.0 {
            break;
        }
        debug_assert!(queue.peek().is_none_or(|n| fresh.key >= n.key));
        state.insert(fresh.id).expect("queued expert not yet selected");
        tracker.insert(fresh.id).expect("feasibility checked above");
    }
    state
}

/// Lazy-evaluation version of [`csg`](super::csg); returns the same selection.
pub fn cslg(inst: &Instance, k: usize) -> Solution {
    let start = Instant::now();
    let state = lazy_greedy(inst, &Matroid::uniform(k), ScaleFactor::OFFLINE);
    finish(&state, "cslg", start)
}

/// Lazy-evaluation version of [`mcsg`](super::mcsg). Infeasible experts are
/// discarded when they reach the top of the queue.
pub fn mcslg(inst: &Instance, matroid: &Matroid) -> Result<Solution> {
    matroid.check_ground(inst.num_experts())?;
    let start = Instant::now();
    let state = lazy_greedy(inst, matroid, ScaleFactor::OFFLINE);
    Ok(finish(&state, "mcslg", start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{instance_a, random_instance, random_partition, RandomInstanceParams};
    use crate::solvers::{csg, mcsg};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixture_matches_eager() {
        let inst = instance_a();
        let sol = cslg(&inst, 3);
        assert_eq!(sol.selected, vec![ExpertId(0)]);
        assert_eq!(sol.objective, 3.0);
        assert!(cslg(&inst, 0).is_empty());
        let m = Matroid::partition(vec![0, 0, 1], vec![0, 1]).unwrap();
        assert_eq!(mcslg(&inst, &m).unwrap().selected, vec![ExpertId(2)]);
    }

    #[test]
    fn queue_orders_by_key_then_lowest_id() {
        let mut q = BinaryHeap::new();
        for (key, id) in [(1.0, 3), (2.0, 5), (2.0, 1), (0.5, 0)] {
            q.push(Entry {
                key,
                id: ExpertId(id),
                round: 0,
            });
        }
        let order: Vec<u32> = std::iter::from_fn(|| q.pop()).map(|e| e.id.0).collect();
        assert_eq!(order, vec![1, 5, 3, 0]);
    }

    #[test]
    fn fewer_evaluations_on_larger_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = RandomInstanceParams {
            experts: 200,
            skills: 300,
            skill_density: 0.03,
            task_density: 0.9,
            max_cost: 4.0,
            lambda: 1.0,
        };
        let inst = random_instance(&mut rng, &params);
        let eager = csg(&inst, 20);
        let lazy = cslg(&inst, 20);
        assert_eq!(eager.selected, lazy.selected);
        assert!(lazy.telemetry.oracle_evaluations <= eager.telemetry.oracle_evaluations);
        assert!(eager.len() > 1);
    }

    #[test]
    fn matroid_variant_matches_eager_on_random_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let inst = random_instance(&mut rng, &RandomInstanceParams::small(15, 2.0));
            let m = random_partition(&mut rng, 15, 3, 3);
            let a = mcsg(&inst, &m).unwrap();
            let b = mcslg(&inst, &m).unwrap();
            assert_eq!(a.selected, b.selected);
            assert!(b.telemetry.oracle_evaluations <= a.telemetry.oracle_evaluations);
        }
    }
}
