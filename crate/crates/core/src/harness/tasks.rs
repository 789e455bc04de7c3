//! Skill popularity categories and seeded task generation.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ingest::Corpus;
use crate::error::{Error, Result};
use crate::model::SkillId;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SkillCategories {
    pub popular: Vec<SkillId>,
    pub common: Vec<SkillId>,
    pub rare: Vec<SkillId>,
}

/// Number of experts holding each skill.
pub fn skill_frequencies(corpus: &Corpus) -> Vec<usize> {
    let mut freq = vec![0usize; corpus.num_skills()];
    for e in corpus.experts() {
        for s in &e.skills {
            freq[s.index()] += 1;
        }
    }
    freq
}

/// Ranks skills by the number of experts holding them (ties by name). The top
/// tenth (rounded up) is popular, the bottom tenth is rare unless already
/// popular, the rest is common.
pub fn categorize_skills(corpus: &Corpus) -> Result<SkillCategories> {
    let m = corpus.num_skills();
    if m == 0 {
        return Err(Error::NoSkills);
    }
    let freq = skill_frequencies(corpus);
    let mut ranked: Vec<SkillId> = (0..m as u32).map(SkillId).collect();
    ranked.sort_by(|&a, &b| {
        freq[b.index()]
            .cmp(&freq[a.index()])
            .then_with(|| corpus.skill_name(a).cmp(corpus.skill_name(b)))
    });
    let tenth = m.div_ceil(10);
    let popular = ranked[..tenth].to_vec();
    let rare_from = (m - tenth).max(tenth);
    Ok(SkillCategories {
        common: ranked[tenth..rare_from].to_vec(),
        rare: ranked[rare_from..].to_vec(),
        popular,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub num_skills: usize,
    pub f_p: f64,
    pub f_r: f64,
    pub f_c: f64,
    pub seed: u64,
}

impl TaskSpec {
    /// Spec with `f_c = 1 - f_p - f_r`.
    pub fn new(num_skills: usize, f_p: f64, f_r: f64, seed: u64) -> Self {
        TaskSpec {
            num_skills,
            f_p,
            f_r,
            f_c: 1.0 - f_p - f_r,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_skills == 0 {
            return Err(Error::InvalidParameter("task needs at least one skill".into()));
        }
        for (name, f) in [("f_p", self.f_p), ("f_r", self.f_r), ("f_c", self.f_c)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParameter(format!("{name} = {f} is outside [0, 1]")));
            }
        }
        let sum = self.f_p + self.f_r + self.f_c;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "task fractions sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// `(popular, rare, common)` quotas: half-up rounding for the first two,
    /// the remainder for common.
    pub fn quotas(&self) -> Result<(usize, usize, usize)> {
        let round = |f: f64| (f * self.num_skills as f64 + 0.5).floor() as usize;
        let (p, r) = (round(self.f_p), round(self.f_r));
        if p + r > self.num_skills {
            return Err(Error::InvalidParameter(format!(
                "popular and rare quotas {p} + {r} exceed {} skills",
                self.num_skills
            )));
        }
        Ok((p, r, self.num_skills - p - r))
    }
}

/// Draws the task: a uniform sample without replacement from each category,
/// in the order popular, rare, common, from one ChaCha8 stream seeded with
/// `spec.seed`. The result is sorted by skill id.
pub fn generate_task(spec: &TaskSpec, categories: &SkillCategories) -> Result<Vec<SkillId>> {
    spec.validate()?;
    let (p, r, c) = spec.quotas()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut task = Vec::with_capacity(spec.num_skills);
    for (category, pool, quota) in [
        ("popular", &categories.popular, p),
        ("rare", &categories.rare, r),
        ("common", &categories.common, c),
    ] {
        if pool.len() < quota {
            return Err(Error::CategoryTooSmall {
                category,
                available: pool.len(),
                needed: quota,
            });
        }
        task.extend(index::sample(&mut rng, pool.len(), quota).into_iter().map(|i| pool[i]));
    }
    task.sort_unstable();
    Ok(task)
}
