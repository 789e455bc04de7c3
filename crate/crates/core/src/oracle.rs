//! Exhaustive optimizer used as ground truth in the approximation tests.

use crate::error::{Error, Result};
use crate::matroid::{Matroid, MatroidTracker};
use crate::model::{ExpertId, Instance};

pub const MAX_ORACLE_EXPERTS: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_set: Vec<ExpertId>,
    /// `f - c` of `best_set`.
    pub best_g: f64,
    /// `lambda * coverage` of `best_set`.
    pub f_opt: f64,
    pub c_opt: f64,
}

impl OracleResult {
    fn empty() -> Self {
        OracleResult {
            best_set: Vec::new(),
            best_g: 0.0,
            f_opt: 0.0,
            c_opt: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Constraint<'m> {
    None,
    Cardinality(usize),
    Matroid(&'m Matroid),
}

/// Expert coverage as multi-word bitmasks over the task.
struct Masks {
    words: usize,
    bits: Vec<u64>,
}

impl Masks {
    fn new(inst: &Instance) -> Self {
        let words = inst.task_len().div_ceil(64).max(1);
        let mut bits = vec![0u64; words * inst.num_experts()];
        for e in inst.expert_ids() {
            for &s in inst.task_skills(e) {
                bits[e.index() * words + s as usize / 64] |= 1 << (s % 64);
            }
        }
        Masks { words, bits }
    }

    fn of(&self, e: usize) -> &[u64] {
        &self.bits[e * self.words..(e + 1) * self.words]
    }
}

/// Candidate ordering: larger `g`, then smaller size, then lexicographically
/// smaller id list.
fn improves(g: f64, set: &[ExpertId], best: &OracleResult) -> bool {
    g > best.best_g
        || (g == best.best_g
            && (set.len(), set) < (best.best_set.len(), best.best_set.as_slice()))
}

struct Search<'a> {
    inst: &'a Instance,
    masks: Masks,
    /// Best set of each exact size.
    by_size: Vec<Option<OracleResult>>,
    max_size: usize,
}

impl Search<'_> {
    fn visit(
        &mut self,
        next: usize,
        set: &mut Vec<ExpertId>,
        union: &mut Vec<u64>,
        cost: f64,
        tracker: Option<&MatroidTracker<'_>>,
    ) {
        let coverage: u32 = union.iter().map(|w| w.count_ones()).sum();
        let f = self.inst.lambda() * coverage as f64;
        let g = f - cost;
        let slot = &mut self.by_size[set.len()];
        let replace = match slot {
            None => true,
            Some(best) => improves(g, set, best),
        };
        if replace {
            *slot = Some(OracleResult {
                best_set: set.clone(),
                best_g: g,
                f_opt: f,
                c_opt: cost,
            });
        }
        if set.len() == self.max_size {
            return;
        }
        let saved = union.clone();
        for e in next..self.inst.num_experts() {
            let id = ExpertId::from_index(e);
            let child = match tracker {
                Some(t) if !t.fits(id) => continue,
                Some(t) => {
                    let mut t = t.clone();
                    t.insert(id).expect("fits");
                    Some(t)
                }
                None => None,
            };
            for (u, m) in union.iter_mut().zip(self.masks.of(e)) {
                *u |= m;
            }
            set.push(id);
            self.visit(e + 1, set, union, cost + self.inst.cost(id), child.as_ref());
            set.pop();
            union.copy_from_slice(&saved);
        }
    }
}

fn search_by_size<'a>(
    inst: &'a Instance,
    max_size: usize,
    matroid: Option<&'a Matroid>,
) -> Result<Vec<Option<OracleResult>>> {
    let n = inst.num_experts();
    if n > MAX_ORACLE_EXPERTS {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_ORACLE_EXPERTS,
        });
    }
    if let Some(m) = matroid {
        m.check_ground(n)?;
    }
    let masks = Masks::new(inst);
    let words = masks.words;
    let mut search = Search {
        inst,
        masks,
        by_size: vec![None; n + 1],
        max_size: max_size.min(n),
    };
    let tracker = matroid.map(Matroid::tracker);
    search.visit(0, &mut Vec::new(), &mut vec![0; words], 0.0, tracker.as_ref());
    Ok(search.by_size)
}

fn pick_best(by_size: impl IntoIterator<Item = Option<OracleResult>>) -> OracleResult {
    let mut best = OracleResult::empty();
    for cand in by_size.into_iter().flatten() {
        if improves(cand.best_g, &cand.best_set, &best) {
            best = cand;
        }
    }
    best
}

/// Exact maximizer of `g = f - c` over the sets allowed by `constraint`.
///
/// Ties go to the smaller set, then the lexicographically smaller id list.
/// Rejects instances with more than [`MAX_ORACLE_EXPERTS`] experts.
pub fn brute_force(inst: &Instance, constraint: Constraint<'_>) -> Result<OracleResult> {
    let by_size = match constraint {
        Constraint::None => search_by_size(inst, usize::MAX, None)?,
        Constraint::Cardinality(k) => search_by_size(inst, k, None)?,
        Constraint::Matroid(m) => search_by_size(inst, usize::MAX, Some(m))?,
    };
    Ok(pick_best(by_size))
}

/// Cardinality optima for every budget: entry `k` is the optimum over sets of
/// size at most `k`, for `k = 0..=n`. One enumeration for all budgets.
pub fn cardinality_profile(inst: &Instance) -> Result<Vec<OracleResult>> {
    let by_size = search_by_size(inst, usize::MAX, None)?;
    let mut out = Vec::with_capacity(by_size.len());
    let mut best = OracleResult::empty();
    for cand in by_size.into_iter() {
        if let Some(cand) = cand {
            if improves(cand.best_g, &cand.best_set, &best) {
                best = cand;
            }
        }
        out.push(best.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{empty_instance, instance_a, random_instance, random_partition, RandomInstanceParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Plain bitmask enumeration, independent of the recursive search.
    fn naive(inst: &Instance, allowed: impl Fn(&[ExpertId]) -> bool) -> f64 {
        let n = inst.num_experts();
        (0u32..1 << n)
            .map(|mask| {
                (0..n as u32)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(ExpertId)
                    .collect::<Vec<_>>()
            })
            .filter(|s| allowed(s))
            .map(|s| inst.evaluate(&s).objective)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn fixture_optima() {
        let inst = instance_a();
        let r = brute_force(&inst, Constraint::None).unwrap();
        assert_eq!(r.best_set, vec![ExpertId(0), ExpertId(1)]);
        assert_eq!(r.best_g, 4.0);
        assert_eq!((r.f_opt, r.c_opt), (6.0, 2.0));
        let r = brute_force(&inst, Constraint::Cardinality(1)).unwrap();
        assert_eq!(r.best_set, vec![ExpertId(2)]);
        assert_eq!(r.best_g, 3.5);
        let m = Matroid::partition(vec![0, 0, 1], vec![0, 1]).unwrap();
        let r = brute_force(&inst, Constraint::Matroid(&m)).unwrap();
        assert_eq!(r.best_set, vec![ExpertId(2)]);
    }

    #[test]
    fn empty_instance_gives_empty_set() {
        let r = brute_force(&empty_instance(), Constraint::None).unwrap();
        assert!(r.best_set.is_empty());
        assert_eq!(r.best_g, 0.0);
    }

    #[test]
    fn rejects_large_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let inst = random_instance(&mut rng, &RandomInstanceParams::small(26, 1.0));
        assert!(matches!(
            brute_force(&inst, Constraint::None),
            Err(Error::OracleTooLarge { n: 26, .. })
        ));
    }

    #[test]
    fn ties_prefer_smaller_then_lexicographic() {
        // two identical experts and a zero-cost duplicate
        let inst = crate::model::Instance::new(crate::model::InstanceData {
            experts: vec![
                crate::model::Expert::new(0, [0], 1.0),
                crate::model::Expert::new(1, [0], 1.0),
                crate::model::Expert::new(2, [1], 0.0),
            ],
            num_skills: 2,
            task: vec![crate::model::SkillId(0)],
            lambda: 3.0,
        })
        .unwrap();
        let r = brute_force(&inst, Constraint::None).unwrap();
        assert_eq!(r.best_set, vec![ExpertId(0)]);
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let inst = random_instance(&mut rng, &RandomInstanceParams::small(9, 2.0));
            let profile = cardinality_profile(&inst).unwrap();
            for (k, entry) in profile.iter().enumerate() {
                let expect = naive(&inst, |s| s.len() <= k);
                assert!((entry.best_g - expect).abs() < 1e-9);
                let direct = brute_force(&inst, Constraint::Cardinality(k)).unwrap();
                assert_eq!(&direct, entry);
            }
            let full = brute_force(&inst, Constraint::None).unwrap();
            assert_eq!(full, profile[9]);

            let m = random_partition(&mut rng, 9, 3, 2);
            let Matroid::Partition(p) = &m else { unreachable!() };
            let expect = naive(&inst, |s| {
                let mut used = vec![0; p.num_parts()];
                s.iter().for_each(|e| used[p.part_of(*e)] += 1);
                used.iter().zip(p.budgets()).all(|(u, b)| u <= b)
            });
            let got = brute_force(&inst, Constraint::Matroid(&m)).unwrap();
            assert!((got.best_g - expect).abs() < 1e-9);
            assert!((got.best_g - (got.f_opt - got.c_opt)).abs() < 1e-9);
        }
    }
}
