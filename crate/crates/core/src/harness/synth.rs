//! Synthetic expert corpora with a given size and mean skills per expert.
//!
//! Skill popularity follows a Zipf law over the skill universe and hourly
//! rates are log-normal. Every generated corpus is a pure function of its
//! [`SyntheticSpec`].

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Zipf};
use serde::{Deserialize, Serialize};

use super::ingest::ExpertRecord;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Prefix of generated expert ids.
    pub name: String,
    pub experts: usize,
    pub mean_skills: f64,
    pub skill_universe: usize,
    pub zipf_exponent: f64,
    pub cost_median: f64,
    pub cost_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// 1212 experts, 1.46 skills each on average.
    pub fn freelancer() -> Self {
        SyntheticSpec {
            name: "freelancer".into(),
            experts: 1212,
            mean_skills: 1.46,
            skill_universe: 500,
            zipf_exponent: 1.0,
            cost_median: 25.0,
            cost_sigma: 0.6,
            seed: 1212,
        }
    }

    /// 6120 experts, 13.07 skills each on average.
    pub fn guru() -> Self {
        SyntheticSpec {
            name: "guru".into(),
            experts: 6120,
            mean_skills: 13.07,
            skill_universe: 1500,
            zipf_exponent: 1.0,
            cost_median: 30.0,
            cost_sigma: 0.7,
            seed: 6120,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "freelancer" => Ok(Self::freelancer()),
            "guru" => Ok(Self::guru()),
            other => Err(Error::InvalidParameter(format!(
                "unknown corpus preset `{other}` (expected freelancer or guru)"
            ))),
        }
    }

    /// Total number of (expert, skill) pairs the corpus will contain.
    pub fn total_slots(&self) -> usize {
        (self.mean_skills * self.experts as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.skill_universe == 0 {
            return bad("skill universe must be non-empty".into());
        }
        if !(self.mean_skills >= 1.0 && self.mean_skills <= self.skill_universe as f64) {
            return bad(format!(
                "mean skills {} must lie in [1, {}]",
                self.mean_skills, self.skill_universe
            ));
        }
        if !(self.zipf_exponent >= 0.0 && self.cost_median > 0.0 && self.cost_sigma >= 0.0) {
            return bad("zipf exponent, cost median and cost sigma must be non-negative".into());
        }
        Ok(())
    }
}

/// Generates the corpus. Expert `i < skill_universe` always holds skill `i`,
/// so each skill appears once the corpus has at least as many experts as
/// skills. The total number of skill slots is exactly
/// `round(mean_skills * experts)`.
pub fn generate_corpus(spec: &SyntheticSpec) -> Result<Vec<ExpertRecord>> {
    spec.validate()?;
    let n = spec.experts;
    let universe = spec.skill_universe;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut counts = vec![1usize; n];
    let extra = spec.total_slots().saturating_sub(n);
    let mut placed = 0;
    while placed < extra {
        let i = rng.random_range(0..n);
        if counts[i] < universe {
            counts[i] += 1;
            placed += 1;
        }
    }

    let zipf = Zipf::new(universe as f64, spec.zipf_exponent)
        .map_err(|e| Error::InvalidParameter(format!("zipf: {e}")))?;
    let lognormal = LogNormal::new(spec.cost_median.ln(), spec.cost_sigma)
        .map_err(|e| Error::InvalidParameter(format!("cost distribution: {e}")))?;
    // rank r of the Zipf law maps to skill rank_to_skill[r - 1]
    let rank_to_skill = index::sample(&mut rng, universe, universe).into_vec();

    let width = (n.max(1) - 1).to_string().len();
    let mut records = Vec::with_capacity(n);
    for (i, &count) in counts.iter().enumerate() {
        let mut skills: Vec<usize> = Vec::with_capacity(count);
        if i < universe {
            skills.push(i);
        }
        while skills.len() < count {
            let rank = zipf.sample(&mut rng) as usize;
            let s = rank_to_skill[rank.clamp(1, universe) - 1];
            if !skills.contains(&s) {
                skills.push(s);
            }
        }
        let cost = (lognormal.sample(&mut rng) * 100.0).round() / 100.0;
        records.push(ExpertRecord {
            id: format!("{}-{i:0width$}", spec.name),
            skills: skills.into_iter().map(skill_name).collect(),
            cost: cost.max(1.0),
        });
    }
    Ok(records)
}

fn skill_name(s: usize) -> String {
    format!("skill-{s:04}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ingest::Corpus;

    #[test]
    fn freelancer_scale() {
        let spec = SyntheticSpec::freelancer();
        let recs = generate_corpus(&spec).unwrap();
        assert_eq!(recs.len(), 1212);
        let corpus = Corpus::from_records(&recs);
        assert!((corpus.mean_skills_per_expert() - 1.46).abs() < 0.005);
        assert_eq!(corpus.num_skills(), 500);
        assert!(recs.iter().all(|r| r.cost >= 1.0));
        assert_eq!(recs, generate_corpus(&spec).unwrap());
    }

    #[test]
    fn small_custom_spec() {
        let spec = SyntheticSpec {
            name: "t".into(),
            experts: 30,
            mean_skills: 3.0,
            skill_universe: 10,
            zipf_exponent: 1.2,
            cost_median: 10.0,
            cost_sigma: 0.0,
            seed: 3,
        };
        let recs = generate_corpus(&spec).unwrap();
        let slots: usize = recs.iter().map(|r| r.skills.len()).sum();
        assert_eq!(slots, 90);
        assert!(recs.iter().all(|r| r.cost == 10.0));
        assert_eq!(recs[0].id, "t-00");
        assert!(generate_corpus(&SyntheticSpec { mean_skills: 0.5, ..spec.clone() }).is_err());
        assert!(SyntheticSpec::preset("nope").is_err());
    }
}
