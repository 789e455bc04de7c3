//! Uniform and partition matroids behind an incremental independence oracle.
//!
//! Solvers only ever grow a set, so the contract is `can_extend` on a
//! [`MatroidTracker`] that keeps the remaining per-part budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ExpertId;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformMatroid {
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMatroid {
    part_of: Vec<usize>,
    budgets: Vec<usize>,
    part_sizes: Vec<usize>,
}

impl PartitionMatroid {
    /// `part_of[e]` is the part of expert `e`; `budgets[i]` the capacity of part `i`.
    pub fn new(part_of: Vec<usize>, budgets: Vec<usize>) -> Result<Self> {
        let mut part_sizes = vec![0; budgets.len()];
        for (e, &p) in part_of.iter().enumerate() {
            if p >= budgets.len() {
                return Err(Error::InvalidParameter(format!(
                    "expert {e} assigned to part {p}, but only {} parts exist",
                    budgets.len()
                )));
            }
            part_sizes[p] += 1;
        }
        Ok(PartitionMatroid {
            part_of,
            budgets,
            part_sizes,
        })
    }

    pub fn part_of(&self, e: ExpertId) -> usize {
        self.part_of[e.index()]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn num_parts(&self) -> usize {
        self.budgets.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn ground_size(&self) -> usize {
        self.part_of.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Matroid {
    Uniform(UniformMatroid),
    Partition(PartitionMatroid),
}

impl Matroid {
    pub fn uniform(k: usize) -> Self {
        Matroid::Uniform(UniformMatroid { k })
    }

    pub fn partition(part_of: Vec<usize>, budgets: Vec<usize>) -> Result<Self> {
        PartitionMatroid::new(part_of, budgets).map(Matroid::Partition)
    }

    /// Size of the largest independent set.
    pub fn rank_upper_bound(&self) -> usize {
        match self {
            Matroid::Uniform(u) => u.k,
            Matroid::Partition(p) => p
                .budgets
                .iter()
                .zip(&p.part_sizes)
                .map(|(&b, &size)| b.min(size))
                .sum(),
        }
    }

    /// Checks that the matroid's ground set is the instance's expert set.
    pub fn check_ground(&self, n: usize) -> Result<()> {
        match self {
            Matroid::Uniform(_) => Ok(()),
            Matroid::Partition(p) if p.ground_size() == n => Ok(()),
            Matroid::Partition(p) => Err(Error::MatroidMismatch(format!(
                "partition covers {} experts, instance has {n}",
                p.ground_size()
            ))),
        }
    }

    pub fn tracker(&self) -> MatroidTracker<'_> {
        let remaining = match self {
            Matroid::Uniform(u) => vec![u.k],
            Matroid::Partition(p) => p.budgets.clone(),
        };
        MatroidTracker {
            matroid: self,
            remaining,
            members: Vec::new(),
        }
    }

    #[inline]
    fn part(&self, e: ExpertId) -> usize {
        match self {
            Matroid::Uniform(_) => 0,
            Matroid::Partition(p) => p.part_of[e.index()],
        }
    }
}

/// Remaining budgets of a growing independent set.
#[derive(Clone, Debug)]
pub struct MatroidTracker<'m> {
    matroid: &'m Matroid,
    remaining: Vec<usize>,
    members: Vec<bool>,
}

impl MatroidTracker<'_> {
    #[inline]
    fn is_member(&self, e: ExpertId) -> bool {
        self.members.get(e.index()).copied().unwrap_or(false)
    }

    /// Whether `current ∪ {e}` is independent. O(1).
    pub fn can_extend(&self, e: ExpertId) -> Result<bool> {
        if self.is_member(e) {
            return Err(Error::AlreadySelected(e));
        }
        Ok(self.fits(e))
    }

    /// `can_extend` without the membership check, for callers that already
    /// exclude selected experts.
    #[inline]
    pub(crate) fn fits(&self, e: ExpertId) -> bool {
        self.remaining[self.matroid.part(e)] > 0
    }

    pub fn insert(&mut self, e: ExpertId) -> Result<()> {
        if !self.can_extend(e)? {
            return Err(Error::InvalidParameter(format!(
                "adding expert {e} breaks independence"
            )));
        }
        let part = self.matroid.part(e);
        self.remaining[part] -= 1;
        if self.members.len() <= e.index() {
            self.members.resize(e.index() + 1, false);
        }
        self.members[e.index()] = true;
        Ok(())
    }

    pub fn remaining(&self) -> &[usize] {
        &self.remaining
    }
}
