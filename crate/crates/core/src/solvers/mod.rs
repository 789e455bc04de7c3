//! Offline solvers: cost-scaled greedy (eager and lazy, cardinality and
//! matroid), the prefix variants, and the comparison baselines.
//!
//! Every argmax breaks ties towards the lowest expert id, so eager and lazy
//! implementations select identical sequences.

mod baselines;
mod greedy;
mod lazy;

use std::time::Instant;

pub use baselines::{
    distorted_greedy, stochastic_distorted_greedy, stochastic_sample_size, top_k_experts,
    top_k_experts_matroid, unconstrained_distorted_greedy,
};
pub use greedy::{csg, csg_prefix, greedy_baseline, greedy_baseline_matroid, mcsg, mcsg_prefix};
pub use lazy::{cslg, mcslg};

use crate::model::{ExpertId, Solution, Telemetry};
use crate::objective::ObjectiveState;

pub(crate) fn finish(state: &ObjectiveState<'_>, name: &str, start: Instant) -> Solution {
    finish_with(state, state.selected().to_vec(), state.evaluations(), name, start)
}

pub(crate) fn finish_with(
    state: &ObjectiveState<'_>,
    selected: Vec<ExpertId>,
    evaluations: u64,
    name: &str,
    start: Instant,
) -> Solution {
    let telemetry = Telemetry {
        solver_name: name.to_string(),
        oracle_evaluations: evaluations,
        wall_time: start.elapsed(),
    };
    Solution::from_selection(state.instance(), selected, telemetry)
}

/// `(gain, id)` beats `(best_gain, best_id)` under "larger gain, then lower id".
#[inline]
pub(crate) fn better(gain: f64, id: ExpertId, best: Option<(f64, ExpertId)>) -> bool {
    match best {
        None => true,
        Some((bg, bid)) => gain > bg || (gain == bg && id < bid),
    }
}
