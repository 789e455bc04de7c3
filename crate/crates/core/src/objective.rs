//! Incremental evaluation of the coverage objective.
//!
//! Throughout, `f(Q)` means `lambda * |covered task skills|`, `c(Q)` the summed
//! cost, `g = f - c` the combined objective and `f - s*c` the scaled objective
//! the greedy family optimizes.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::model::{ExpertId, Instance};

/// Cost multiplier of the scaled objective `f - s*c`; always `>= 1`.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd)]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    /// `s = 1`: the combined objective itself.
    pub const UNIT: ScaleFactor = ScaleFactor(1.0);
    /// `s = 2`, used by the offline and online algorithms.
    pub const OFFLINE: ScaleFactor = ScaleFactor(2.0);

    pub fn new(s: f64) -> Result<Self> {
        if s >= 1.0 && s.is_finite() {
            Ok(ScaleFactor(s))
        } else {
            Err(Error::InvalidParameter(format!("scale factor must be >= 1, got {s}")))
        }
    }

    /// `s = (3 + sqrt 5) / 2`, used by the threshold streaming algorithm.
    pub fn streaming() -> Self {
        ScaleFactor((3.0 + 5f64.sqrt()) / 2.0)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// `(3 - sqrt 5) / 2`, the coverage weight of the streaming guarantee.
pub fn streaming_alpha() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// `((3 - sqrt 5) / 2) * cov - cost`.
pub fn guess_objective(cov: f64, cost: f64) -> f64 {
    streaming_alpha() * cov - cost
}

/// Weight `(1 - 1/k)^(k - (i+1))` applied to coverage in iteration `i` of the
/// distorted greedy family.
pub fn distortion(iteration: usize, budget: usize) -> Result<f64> {
    if budget == 0 {
        return Err(Error::InvalidParameter("distortion budget must be >= 1".into()));
    }
    if iteration >= budget {
        return Err(Error::InvalidParameter(format!(
            "distortion iteration {iteration} outside 0..{budget}"
        )));
    }
    let base = 1.0 - 1.0 / budget as f64;
    Ok(base.powi((budget - (iteration + 1)) as i32))
}

/// Covered task skills and accumulated cost of a partial solution.
///
/// Every marginal query bumps the evaluation counter by exactly one.
#[derive(Debug, Clone)]
pub struct ObjectiveState<'a> {
    inst: &'a Instance,
    covered: Vec<bool>,
    covered_count: usize,
    total_cost: f64,
    selected: Vec<ExpertId>,
    member: Vec<bool>,
    evals: Cell<u64>,
}

impl<'a> ObjectiveState<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        ObjectiveState {
            inst,
            covered: vec![false; inst.task_len()],
            covered_count: 0,
            total_cost: 0.0,
            selected: Vec::new(),
            member: vec![false; inst.num_experts()],
            evals: Cell::new(0),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    /// Number of task skills `e` would newly cover.
    #[inline]
    pub fn marginal_count(&self, e: ExpertId) -> usize {
        self.evals.set(self.evals.get() + 1);
        self.inst
            .task_skills(e)
            .iter()
            .filter(|&&s| !self.covered[s as usize])
            .count()
    }

    /// `f(e | Q)`.
    #[inline]
    pub fn marginal_coverage(&self, e: ExpertId) -> f64 {
        self.inst.lambda() * self.marginal_count(e) as f64
    }

    /// `f(e | Q) - s * c(e)`.
    #[inline]
    pub fn scaled_marginal(&self, e: ExpertId, s: ScaleFactor) -> f64 {
        self.marginal_coverage(e) - s.get() * self.inst.cost(e)
    }

    /// `g(e | Q) = f(e | Q) - c(e)`.
    #[inline]
    pub fn marginal_gain(&self, e: ExpertId) -> f64 {
        self.scaled_marginal(e, ScaleFactor::UNIT)
    }

    /// `(1 - 1/k)^(k-(i+1)) * f(e | Q) - c(e)`.
    pub fn distorted_marginal(&self, e: ExpertId, iteration: usize, budget: usize) -> Result<f64> {
        let w = distortion(iteration, budget)?;
        Ok(w * self.marginal_coverage(e) - self.inst.cost(e))
    }

    pub fn insert(&mut self, e: ExpertId) -> Result<()> {
        if e.index() >= self.inst.num_experts() {
            return Err(Error::ExpertOutOfRange {
                expert: e,
                size: self.inst.num_experts(),
            });
        }
        if self.member[e.index()] {
            return Err(Error::DuplicateInsert(e));
        }
        self.member[e.index()] = true;
        for &s in self.inst.task_skills(e) {
            let slot = &mut self.covered[s as usize];
            if !*slot {
                *slot = true;
                self.covered_count += 1;
            }
        }
        self.total_cost += self.inst.cost(e);
        self.selected.push(e);
        Ok(())
    }

    #[inline]
    pub fn contains(&self, e: ExpertId) -> bool {
        self.member[e.index()]
    }

    pub fn covered_count(&self) -> usize {
        self.covered_count
    }

    /// Task-local indices of the covered skills.
    pub fn covered(&self) -> impl Iterator<Item = usize> + '_ {
        self.covered
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
    }

    /// `f(Q) = lambda * |covered|`.
    pub fn coverage_value(&self) -> f64 {
        self.inst.lambda() * self.covered_count as f64
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    /// `g(Q) = f(Q) - c(Q)`.
    pub fn objective(&self) -> f64 {
        self.coverage_value() - self.total_cost
    }

    pub fn selected(&self) -> &[ExpertId] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn evaluations(&self) -> u64 {
        self.evals.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::instance_a;

    const E1: ExpertId = ExpertId(0);
    const E2: ExpertId = ExpertId(1);
    const E3: ExpertId = ExpertId(2);

    #[test]
    fn marginal_coverage_examples() {
        let inst = instance_a();
        let mut st = ObjectiveState::new(&inst);
        assert_eq!(st.marginal_coverage(E1), 4.0);
        st.insert(E1).unwrap();
        assert_eq!(st.marginal_coverage(E2), 2.0);

        let mut st = ObjectiveState::new(&inst);
        st.insert(E3).unwrap();
        assert_eq!(st.marginal_coverage(E1), 0.0);
        assert_eq!(st.covered_count(), 3);
    }

    #[test]
    fn marginal_query_counts_and_does_not_mutate() {
        let inst = instance_a();
        let st = ObjectiveState::new(&inst);
        st.marginal_coverage(E1);
        st.scaled_marginal(E2, ScaleFactor::OFFLINE);
        st.marginal_gain(E3);
        assert_eq!(st.evaluations(), 3);
        assert_eq!(st.covered_count(), 0);
    }

    #[test]
    fn scaled_marginal_examples() {
        let inst = instance_a();
        let mut st = ObjectiveState::new(&inst);
        assert_eq!(st.scaled_marginal(E1, ScaleFactor::OFFLINE), 2.0);
        assert_eq!(st.scaled_marginal(E3, ScaleFactor::OFFLINE), 1.0);
        st.insert(E1).unwrap();
        assert_eq!(st.scaled_marginal(E2, ScaleFactor::OFFLINE), 0.0);
    }

    #[test]
    fn insert_tracks_coverage_and_cost() {
        let inst = instance_a();
        let mut st = ObjectiveState::new(&inst);
        st.insert(E1).unwrap();
        assert_eq!(st.covered().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(st.total_cost(), 1.0);
        st.insert(E2).unwrap();
        assert_eq!(st.covered().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(st.total_cost(), 2.0);
        assert_eq!(st.coverage_value(), 6.0);
        assert!(matches!(st.insert(E1), Err(Error::DuplicateInsert(e)) if e == E1));
    }

    #[test]
    fn distorted_marginal_examples() {
        let inst = instance_a();
        let st = ObjectiveState::new(&inst);
        assert_eq!(st.distorted_marginal(E1, 0, 1).unwrap(), 3.0);
        assert_eq!(st.distorted_marginal(E1, 0, 2).unwrap(), 1.0);
        for k in 1..20 {
            assert_eq!(st.distorted_marginal(E1, k - 1, k).unwrap(), 3.0);
        }
        assert!(st.distorted_marginal(E1, 0, 0).is_err());
        assert!(st.distorted_marginal(E1, 3, 3).is_err());
    }

    #[test]
    fn guess_objective_examples() {
        assert_eq!(guess_objective(0.0, 0.0), 0.0);
        assert!((guess_objective(1.0, 0.0) - 0.381_966_011_250_105_1).abs() < 1e-15);
        // singleton e1 of the fixture: cov 4, cost 1
        assert!((guess_objective(4.0, 1.0) - 0.527_864_045).abs() < 1e-9);
    }

    #[test]
    fn streaming_constants_are_reciprocal() {
        let s = ScaleFactor::streaming().get();
        assert!((s * streaming_alpha() - 1.0).abs() < 1e-15);
        assert!((s * s - 3.0 * s + 1.0).abs() < 1e-12);
    }

    #[test]
    fn scale_factor_rejects_below_one() {
        assert!(ScaleFactor::new(0.5).is_err());
        assert!(ScaleFactor::new(f64::NAN).is_err());
        assert_eq!(ScaleFactor::new(2.0).unwrap(), ScaleFactor::OFFLINE);
    }
}
