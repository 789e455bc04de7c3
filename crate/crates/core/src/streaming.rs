//! Single-pass solvers: the online accept/reject rule, the thresholded
//! streaming rule, and the geometric threshold-guessing wrapper around it.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ExpertId, Instance, Solution};
use crate::objective::{streaming_alpha, ObjectiveState, ScaleFactor};
use crate::solvers::finish_with;

/// How experts arrive in a stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrivalOrder {
    /// Ascending expert id.
    Natural,
    /// Uniform random permutation from the given seed.
    Random(u64),
    /// Permutation read from a file, one id per line.
    File(PathBuf),
    Explicit(Vec<ExpertId>),
}

impl FromStr for ArrivalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "natural" {
            return Ok(ArrivalOrder::Natural);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed = seed
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad order seed `{seed}`")))?;
            return Ok(ArrivalOrder::Random(seed));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ArrivalOrder::File(PathBuf::from(path)));
        }
        Err(Error::InvalidParameter(format!(
            "order must be natural, random:<seed> or file:<path>, got `{s}`"
        )))
    }
}

impl ArrivalOrder {
    /// Materializes the order for an instance of `n` experts and checks that it
    /// is a permutation of `0..n`.
    pub fn resolve(&self, n: usize) -> Result<Vec<ExpertId>> {
        let order = match self {
            ArrivalOrder::Natural => (0..n).map(ExpertId::from_index).collect(),
            ArrivalOrder::Random(seed) => {
                let mut ids: Vec<ExpertId> = (0..n).map(ExpertId::from_index).collect();
                ids.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                ids
            }
            ArrivalOrder::File(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_order(&text, n)?
            }
            ArrivalOrder::Explicit(ids) => ids.clone(),
        };
        check_permutation(&order, n)?;
        Ok(order)
    }
}

fn parse_order(text: &str, n: usize) -> Result<Vec<ExpertId>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<u32>().map(ExpertId).map_err(|_| Error::InvalidOrder {
                n,
                reason: format!("line {}: `{}` is not an expert id", i + 1, l.trim()),
            })
        })
        .collect()
}

pub fn check_permutation(order: &[ExpertId], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidOrder {
            n,
            reason: format!("{} ids given", order.len()),
        });
    }
    let mut seen = vec![false; n];
    for e in order {
        match seen.get_mut(e.index()) {
            None => {
                return Err(Error::InvalidOrder {
                    n,
                    reason: format!("id {e} out of range"),
                })
            }
            Some(true) => {
                return Err(Error::InvalidOrder {
                    n,
                    reason: format!("id {e} repeated"),
                })
            }
            Some(slot) => *slot = true,
        }
    }
    Ok(())
}

/// Rejects ids that are out of range or arrive twice.
struct StreamGuard {
    seen: Vec<bool>,
}

impl StreamGuard {
    fn new(n: usize) -> Self {
        StreamGuard { seen: vec![false; n] }
    }

    fn admit(&mut self, e: ExpertId) -> Result<()> {
        let n = self.seen.len();
        match self.seen.get_mut(e.index()) {
            None => Err(Error::ExpertOutOfRange { expert: e, size: n }),
            Some(true) => Err(Error::InvalidOrder {
                n,
                reason: format!("id {e} arrives twice"),
            }),
            Some(slot) => {
                *slot = true;
                Ok(())
            }
        }
    }
}

/// Accepts every arriving expert whose gain on `f - 2c` is strictly positive.
pub fn online_csg(inst: &Instance, order: &[ExpertId]) -> Result<Solution> {
    check_permutation(order, inst.num_experts())?;
    let start = Instant::now();
    let mut state = ObjectiveState::new(inst);
    for &e in order {
        if state.scaled_marginal(e, ScaleFactor::OFFLINE) > 0.0 {
            state.insert(e)?;
        }
    }
    Ok(finish_with(&state, state.selected().to_vec(), state.evaluations(), "online-csg", start))
}

/// One copy of the thresholded streaming rule.
#[derive(Debug, Clone)]
pub struct ThresholdRun<'a> {
    guess: f64,
    tau: f64,
    k: usize,
    scale: ScaleFactor,
    state: ObjectiveState<'a>,
}

impl<'a> ThresholdRun<'a> {
    pub fn new(inst: &'a Instance, k: usize, scale: ScaleFactor, tau: f64) -> Self {
        ThresholdRun {
            guess: tau * k as f64,
            tau,
            k,
            scale,
            state: ObjectiveState::new(inst),
        }
    }

    fn for_guess(inst: &'a Instance, k: usize, guess: f64) -> Self {
        let mut run = ThresholdRun::new(inst, k, ScaleFactor::streaming(), guess / k as f64);
        run.guess = guess;
        run
    }

    /// Offers the next stream element; returns whether it was accepted.
    pub fn offer(&mut self, e: ExpertId) -> bool {
        if self.state.len() >= self.k {
            return false;
        }
        if self.state.scaled_marginal(e, self.scale) >= self.tau {
            self.state.insert(e).expect("stream elements are distinct");
            true
        } else {
            false
        }
    }

    pub fn guess(&self) -> f64 {
        self.guess
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn selected(&self) -> &[ExpertId] {
        self.state.selected()
    }

    pub fn objective(&self) -> f64 {
        self.state.objective()
    }

    pub fn evaluations(&self) -> u64 {
        self.state.evaluations()
    }
}

/// Accepts `e` when `|Q| < k` and its gain on `f - s*c` is at least `tau`.
pub fn streaming_threshold(
    inst: &Instance,
    stream: impl IntoIterator<Item = ExpertId>,
    k: usize,
    scale: ScaleFactor,
    tau: f64,
) -> Result<Solution> {
    let start = Instant::now();
    let mut guard = StreamGuard::new(inst.num_experts());
    let mut run = ThresholdRun::new(inst, k, scale, tau);
    for e in stream {
        guard.admit(e)?;
        run.offer(e);
    }
    Ok(finish_with(
        &run.state,
        run.selected().to_vec(),
        run.evaluations(),
        "streaming-threshold",
        start,
    ))
}

/// Result of [`streaming_guess_with_stats`].
#[derive(Clone, Debug)]
pub struct GuessOutcome {
    pub solution: Solution,
    /// Guess `(1+eps)^j` of the copy whose solution was returned, if any.
    pub chosen_guess: Option<f64>,
    /// Largest number of experts held across live copies at any time.
    pub peak_stored: usize,
    pub peak_live_copies: usize,
    /// Stream position (0-based) at which each surviving copy was spawned,
    /// keyed by its guess exponent.
    pub spawned_at: BTreeMap<i32, usize>,
}

/// Largest `j` with `base^j <= x`, for `x > 0`.
fn floor_exponent(x: f64, base: f64) -> i32 {
    let mut j = (x.ln() / base.ln()).floor() as i32;
    while base.powi(j + 1) <= x {
        j += 1;
    }
    while base.powi(j) > x {
        j -= 1;
    }
    j
}

/// Streaming algorithm for the cardinality problem without knowledge of the
/// optimum: parallel threshold copies over guesses `(1+eps)^j`.
pub fn streaming_guess(
    inst: &Instance,
    stream: impl IntoIterator<Item = ExpertId>,
    k: usize,
    epsilon: f64,
) -> Result<Solution> {
    streaming_guess_with_stats(inst, stream, k, epsilon).map(|o| o.solution)
}

/// [`streaming_guess`] plus memory statistics.
///
/// `v` is the largest singleton value of `((3-sqrt 5)/2) f - c` seen so far. The
/// live copies are those with guesses in `(v/(1+eps), k*v]`, i.e. exponents
/// from the largest power not above `v` to the largest power not above `k*v`.
/// Copies that fall below the window are discarded; copies entering at the top
/// start empty.
pub fn streaming_guess_with_stats(
    inst: &Instance,
    stream: impl IntoIterator<Item = ExpertId>,
    k: usize,
    epsilon: f64,
) -> Result<GuessOutcome> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("streaming budget must be >= 1".into()));
    }
    let start = Instant::now();
    let base = 1.0 + epsilon;
    let alpha = streaming_alpha();
    let probe = ObjectiveState::new(inst);
    let mut guard = StreamGuard::new(inst.num_experts());

    let mut best_singleton = 0.0f64;
    let mut copies: BTreeMap<i32, ThresholdRun<'_>> = BTreeMap::new();
    let mut spawned_at: BTreeMap<i32, usize> = BTreeMap::new();
    let mut retired_evals = 0u64;
    let mut peak_stored = 0usize;
    let mut peak_live = 0usize;

    for (pos, e) in stream.into_iter().enumerate() {
        guard.admit(e)?;
        let singleton = alpha * probe.marginal_coverage(e) - inst.cost(e);
        if singleton > best_singleton {
            best_singleton = singleton;
            let lo = floor_exponent(best_singleton, base);
            let hi = floor_exponent(k as f64 * best_singleton, base);
            let keep = copies.split_off(&lo);
            for (j, run) in std::mem::replace(&mut copies, keep) {
                retired_evals += run.evaluations();
                spawned_at.remove(&j);
            }
            for j in lo..=hi {
                copies
                    .entry(j)
                    .or_insert_with(|| ThresholdRun::for_guess(inst, k, base.powi(j)));
                spawned_at.entry(j).or_insert(pos);
            }
        }
        for run in copies.values_mut() {
            run.offer(e);
        }
        peak_live = peak_live.max(copies.len());
        peak_stored = peak_stored.max(copies.values().map(|r| r.selected().len()).sum());
    }

    let evaluations =
        probe.evaluations() + retired_evals + copies.values().map(|r| r.evaluations()).sum::<u64>();
    // ascending guess order, strict improvement: ties go to the lowest guess
    let mut best: Option<&ThresholdRun<'_>> = None;
    for run in copies.values() {
        if best.is_none_or(|b| run.objective() > b.objective()) {
            best = Some(run);
        }
    }
    let (selected, chosen_guess) = match best {
        Some(run) if run.objective() > 0.0 => {
            (run.selected().to_vec(), Some(run.guess()))
        }
        _ => (Vec::new(), None),
    };
    let solution = finish_with(&probe, selected, evaluations, "streaming-k-csg", start);
    Ok(GuessOutcome {
        solution,
        chosen_guess,
        peak_stored,
        peak_live_copies: peak_live,
        spawned_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{empty_instance, instance_a};
    use crate::model::{Expert, InstanceData, SkillId};

    fn ids(v: &[u32]) -> Vec<ExpertId> {
        v.iter().copied().map(ExpertId).collect()
    }

    #[test]
    fn online_examples() {
        let inst = instance_a();
        let sol = online_csg(&inst, &ids(&[2, 0, 1])).unwrap();
        assert_eq!(sol.selected, ids(&[2]));
        assert_eq!(sol.objective, 3.5);
        let sol = online_csg(&inst, &ids(&[0, 1, 2])).unwrap();
        assert_eq!(sol.selected, ids(&[0]));
        assert_eq!(sol.objective, 3.0);
        assert!(online_csg(&empty_instance(), &[]).unwrap().is_empty());
    }

    #[test]
    fn online_rejects_non_permutations() {
        let inst = instance_a();
        assert!(online_csg(&inst, &ids(&[0, 1])).is_err());
        assert!(online_csg(&inst, &ids(&[0, 1, 1])).is_err());
        assert!(online_csg(&inst, &ids(&[0, 1, 3])).is_err());
    }

    #[test]
    fn threshold_examples() {
        let inst = instance_a();
        let s = ScaleFactor::streaming();
        let sol = streaming_threshold(&inst, ids(&[0, 1, 2]), 2, s, 0.1).unwrap();
        assert_eq!(sol.selected, ids(&[0]));
        let sol = streaming_threshold(&inst, ids(&[0, 1, 2]), 3, s, 100.0).unwrap();
        assert!(sol.is_empty());
        let sol = streaming_threshold(&inst, ids(&[0, 1, 2]), 0, s, -10.0).unwrap();
        assert!(sol.is_empty());
        assert!(streaming_threshold(&inst, ids(&[0, 0]), 2, s, 0.1).is_err());
    }

    #[test]
    fn threshold_accepts_on_equality() {
        let inst = instance_a();
        // g~(e1 | {}) with s = 2 is exactly 2.0
        let sol =
            streaming_threshold(&inst, ids(&[0]), 1, ScaleFactor::OFFLINE, 2.0).unwrap();
        assert_eq!(sol.selected, ids(&[0]));
    }

    #[test]
    fn guess_examples() {
        let single = Instance::new(InstanceData {
            experts: vec![Expert::new(0, [0, 1, 2], 1.0)],
            num_skills: 3,
            task: vec![SkillId(0), SkillId(1), SkillId(2)],
            lambda: 2.0,
        })
        .unwrap();
        let sol = streaming_guess(&single, ids(&[0]), 1, 0.05).unwrap();
        assert_eq!(sol.selected, ids(&[0]));
        assert!(streaming_guess(&empty_instance(), vec![], 3, 0.05).unwrap().is_empty());
        assert!(streaming_guess(&single, ids(&[0]), 1, 0.0).is_err());
        assert!(streaming_guess(&single, ids(&[0]), 1, 1.5).is_err());
    }

    #[test]
    fn floor_exponent_brackets() {
        for &x in &[1e-6, 0.3, 1.0, 1.05, 2.0, 1234.5, 1e9] {
            for &base in &[1.01, 1.05, 1.5] {
                let j = floor_exponent(x, base);
                assert!(base.powi(j) <= x && base.powi(j + 1) > x, "{x} {base} {j}");
            }
        }
    }

    #[test]
    fn order_parsing() {
        assert_eq!("natural".parse::<ArrivalOrder>().unwrap(), ArrivalOrder::Natural);
        assert_eq!("random:9".parse::<ArrivalOrder>().unwrap(), ArrivalOrder::Random(9));
        assert!("random:x".parse::<ArrivalOrder>().is_err());
        assert!("sideways".parse::<ArrivalOrder>().is_err());
        let a = ArrivalOrder::Random(4).resolve(50).unwrap();
        assert_eq!(a, ArrivalOrder::Random(4).resolve(50).unwrap());
        check_permutation(&a, 50).unwrap();
        assert_eq!(parse_order("2\n0\n\n1\n", 3).unwrap(), ids(&[2, 0, 1]));
        assert!(parse_order("2\nx\n", 3).is_err());
    }
}
