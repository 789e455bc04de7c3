//! Solvers by name, and a single entry point that runs any of them under a
//! budget.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::model::{Instance, Solution};
use crate::solvers;
use crate::streaming::{self, ArrivalOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Csg,
    Cslg,
    CsgPrefix,
    Mcsg,
    Mcslg,
    McsgPrefix,
    Greedy,
    TopKExperts,
    TopKExpertsMatroid,
    DistortedGreedy,
    StochasticDistortedGreedy,
    UnconstrainedDistortedGreedy,
    OnlineCsg,
    StreamingKCsg,
}

impl SolverKind {
    pub const ALL: [SolverKind; 14] = [
        SolverKind::Csg,
        SolverKind::Cslg,
        SolverKind::CsgPrefix,
        SolverKind::Mcsg,
        SolverKind::Mcslg,
        SolverKind::McsgPrefix,
        SolverKind::Greedy,
        SolverKind::TopKExperts,
        SolverKind::TopKExpertsMatroid,
        SolverKind::DistortedGreedy,
        SolverKind::StochasticDistortedGreedy,
        SolverKind::UnconstrainedDistortedGreedy,
        SolverKind::OnlineCsg,
        SolverKind::StreamingKCsg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Csg => "csg",
            SolverKind::Cslg => "cslg",
            SolverKind::CsgPrefix => "csg-prefix",
            SolverKind::Mcsg => "mcsg",
            SolverKind::Mcslg => "mcslg",
            SolverKind::McsgPrefix => "mcsg-prefix",
            SolverKind::Greedy => "greedy",
            SolverKind::TopKExperts => "top-k-experts",
            SolverKind::TopKExpertsMatroid => "top-k-experts-matroid",
            SolverKind::DistortedGreedy => "distorted-greedy",
            SolverKind::StochasticDistortedGreedy => "stochastic-distorted-greedy",
            SolverKind::UnconstrainedDistortedGreedy => "unconstrained-distorted-greedy",
            SolverKind::OnlineCsg => "online-csg",
            SolverKind::StreamingKCsg => "streaming-k-csg",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownSolver(s.to_string()))
    }
}

/// Constraint a solver runs under.
#[derive(Clone, Copy, Debug)]
pub enum Budget<'m> {
    Unconstrained,
    Cardinality(usize),
    Matroid(&'m Matroid),
}

impl fmt::Display for Budget<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Unconstrained => f.write_str("no constraint"),
            Budget::Cardinality(k) => write!(f, "cardinality {k}"),
            Budget::Matroid(Matroid::Uniform(u)) => write!(f, "uniform matroid of rank {}", u.k),
            Budget::Matroid(Matroid::Partition(_)) => f.write_str("partition matroid"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunParams {
    /// Sampling accuracy of the stochastic distorted greedy.
    pub epsilon_stochastic: f64,
    /// Guess-grid accuracy of the streaming solver.
    pub epsilon_streaming: f64,
    pub seed: u64,
    pub order: ArrivalOrder,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            epsilon_stochastic: 0.01,
            epsilon_streaming: 0.05,
            seed: 0,
            order: ArrivalOrder::Natural,
        }
    }
}

fn unsupported(kind: SolverKind, budget: Budget<'_>) -> Error {
    Error::InvalidParameter(format!("solver {kind} does not support {budget}"))
}

/// Runs `kind` on `inst`. Cardinality solvers given no constraint use `k = n`;
/// matroid solvers given a cardinality use the uniform matroid; cardinality
/// solvers with a matroid counterpart switch to it under a matroid.
pub fn run_solver(kind: SolverKind, inst: &Instance, budget: Budget<'_>, params: &RunParams) -> Result<Solution> {
    use SolverKind as S;
    let n = inst.num_experts();
    let k = match budget {
        Budget::Unconstrained => n,
        Budget::Cardinality(k) => k,
        Budget::Matroid(_) => 0,
    };
    let uniform;
    let matroid = match budget {
        Budget::Matroid(m) => m,
        _ => {
            uniform = Matroid::uniform(k);
            &uniform
        }
    };
    let is_matroid = matches!(budget, Budget::Matroid(_));

    match kind {
        S::Csg if is_matroid => solvers::mcsg(inst, matroid),
        S::Csg => Ok(solvers::csg(inst, k)),
        S::Cslg if is_matroid => solvers::mcslg(inst, matroid),
        S::Cslg => Ok(solvers::cslg(inst, k)),
        S::CsgPrefix if is_matroid => solvers::mcsg_prefix(inst, matroid),
        S::CsgPrefix => Ok(solvers::csg_prefix(inst, k)),
        S::Mcsg => solvers::mcsg(inst, matroid),
        S::Mcslg => solvers::mcslg(inst, matroid),
        S::McsgPrefix => solvers::mcsg_prefix(inst, matroid),
        S::Greedy if is_matroid => solvers::greedy_baseline_matroid(inst, matroid),
        S::Greedy => Ok(solvers::greedy_baseline(inst, k)),
        S::TopKExperts if is_matroid => solvers::top_k_experts_matroid(inst, matroid),
        S::TopKExperts => Ok(solvers::top_k_experts(inst, k)),
        S::TopKExpertsMatroid => solvers::top_k_experts_matroid(inst, matroid),
        S::DistortedGreedy | S::StochasticDistortedGreedy | S::StreamingKCsg if is_matroid => {
            Err(unsupported(kind, budget))
        }
        S::DistortedGreedy => Ok(solvers::distorted_greedy(inst, k)),
        S::StochasticDistortedGreedy => {
            solvers::stochastic_distorted_greedy(inst, k, params.epsilon_stochastic, params.seed)
        }
        S::StreamingKCsg => {
            let order = params.order.resolve(n)?;
            streaming::streaming_guess(inst, order, k, params.epsilon_streaming)
        }
        S::UnconstrainedDistortedGreedy | S::OnlineCsg if !matches!(budget, Budget::Unconstrained) => {
            Err(unsupported(kind, budget))
        }
        S::UnconstrainedDistortedGreedy => Ok(solvers::unconstrained_distorted_greedy(inst, params.seed)),
        S::OnlineCsg => streaming::online_csg(inst, &params.order.resolve(n)?),
    }
}
