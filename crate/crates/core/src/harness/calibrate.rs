//! Coverage-to-cost coefficient from a greedy set cover.

use super::ingest::Corpus;
use crate::error::{Error, Result};
use crate::model::{ExpertId, Instance, SkillId};
use crate::objective::ObjectiveState;

/// Classical greedy set cover of the instance task: repeatedly take the
/// expert covering the most uncovered task skills, ties to the lower cost and
/// then the lower id. Fails with the skills nobody holds.
pub fn greedy_set_cover(inst: &Instance) -> Result<Vec<ExpertId>> {
    let mut held = vec![false; inst.task_len()];
    for e in inst.expert_ids() {
        for &s in inst.task_skills(e) {
            held[s as usize] = true;
        }
    }
    let missing: Vec<SkillId> = inst
        .task()
        .iter()
        .zip(&held)
        .filter(|(_, &h)| !h)
        .map(|(&s, _)| s)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Uncoverable(missing));
    }

    let mut state = ObjectiveState::new(inst);
    while state.covered_count() < inst.task_len() {
        let mut best: Option<(usize, f64, ExpertId)> = None;
        for e in inst.expert_ids() {
            let gain = state.marginal_count(e);
            if gain == 0 {
                continue;
            }
            let cost = inst.cost(e);
            let wins = match best {
                None => true,
                Some((bg, bc, _)) => gain > bg || (gain == bg && cost < bc),
            };
            if wins {
                best = Some((gain, cost, e));
            }
        }
        let (_, _, e) = best.expect("every task skill is held by someone");
        state.insert(e)?;
    }
    Ok(state.selected().to_vec())
}

/// `lambda = c(Q) / |T|` for the greedy cover `Q` of the task `T`. The
/// instance's own lambda is ignored.
pub fn calibrate_lambda(inst: &Instance) -> Result<f64> {
    if inst.task_len() == 0 {
        return Err(Error::InvalidParameter("cannot calibrate on an empty task".into()));
    }
    let cover = greedy_set_cover(inst)?;
    let cost: f64 = cover.iter().map(|&e| inst.cost(e)).sum();
    Ok(cost / inst.task_len() as f64)
}

/// [`calibrate_lambda`] over a whole corpus; uncoverable skills are reported
/// by name.
pub fn calibrate_corpus(corpus: &Corpus, task: &[SkillId]) -> Result<f64> {
    let inst = corpus.instance(task, 1.0)?;
    calibrate_lambda(&inst).map_err(|e| match e {
        Error::Uncoverable(ids) => {
            Error::UncoverableNamed(ids.iter().map(|&s| corpus.skill_name(s).to_string()).collect())
        }
        other => other,
    })
}
