//! Line-delimited expert files and the skill-name interning table.
//!
//! Each non-blank line is a JSON object `{"id": "...", "skills": [...], "cost": 12.5}`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Expert, Instance, InstanceData, SkillId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpertRecord {
    pub id: String,
    pub skills: Vec<String>,
    /// Dollars per hour.
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct LoadReport {
    pub records: Vec<ExpertRecord>,
    pub errors: Vec<LineError>,
}

pub fn load_experts(path: impl AsRef<Path>) -> Result<LoadReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_experts(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses expert lines; malformed lines are collected, not fatal.
pub fn parse_experts(reader: impl BufRead) -> Result<LoadReport> {
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ExpertRecord>(&line) {
            Ok(rec) if !(rec.cost >= 0.0 && rec.cost.is_finite()) => report.errors.push(LineError {
                line: i + 1,
                message: format!("expert `{}`: cost must be a non-negative number", rec.id),
            }),
            Ok(rec) => report.records.push(rec),
            Err(e) => report.errors.push(LineError {
                line: i + 1,
                message: e.to_string(),
            }),
        }
    }
    Ok(report)
}

pub fn write_experts(path: impl AsRef<Path>, records: &[ExpertRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_records(&mut w, records).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records(w: &mut impl Write, records: &[ExpertRecord]) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut *w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusExpert {
    pub name: String,
    pub skills: Vec<SkillId>,
    pub cost: f64,
}

/// Expert records with skill names interned to dense ids in order of first
/// appearance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    skill_names: Vec<String>,
    skill_index: HashMap<String, SkillId>,
    experts: Vec<CorpusExpert>,
}

impl Corpus {
    pub fn from_records(records: &[ExpertRecord]) -> Self {
        let mut corpus = Corpus::default();
        for rec in records {
            let mut skills = Vec::with_capacity(rec.skills.len());
            for name in &rec.skills {
                let id = corpus.intern(name);
                if !skills.contains(&id) {
                    skills.push(id);
                }
            }
            corpus.experts.push(CorpusExpert {
                name: rec.id.clone(),
                skills,
                cost: rec.cost,
            });
        }
        corpus
    }

    fn intern(&mut self, name: &str) -> SkillId {
        if let Some(&id) = self.skill_index.get(name) {
            return id;
        }
        let id = SkillId(self.skill_names.len() as u32);
        self.skill_names.push(name.to_string());
        self.skill_index.insert(name.to_string(), id);
        id
    }

    pub fn to_records(&self) -> Vec<ExpertRecord> {
        self.experts
            .iter()
            .map(|e| ExpertRecord {
                id: e.name.clone(),
                skills: e.skills.iter().map(|&s| self.skill_name(s).to_string()).collect(),
                cost: e.cost,
            })
            .collect()
    }

    pub fn num_skills(&self) -> usize {
        self.skill_names.len()
    }

    pub fn num_experts(&self) -> usize {
        self.experts.len()
    }

    pub fn experts(&self) -> &[CorpusExpert] {
        &self.experts
    }

    pub fn skill_name(&self, id: SkillId) -> &str {
        &self.skill_names[id.index()]
    }

    pub fn skill_id(&self, name: &str) -> Option<SkillId> {
        self.skill_index.get(name).copied()
    }

    pub fn mean_skills_per_expert(&self) -> f64 {
        if self.experts.is_empty() {
            return 0.0;
        }
        let total: usize = self.experts.iter().map(|e| e.skills.len()).sum();
        total as f64 / self.experts.len() as f64
    }

    /// Instance over all experts.
    pub fn instance(&self, task: &[SkillId], lambda: f64) -> Result<Instance> {
        let all: Vec<usize> = (0..self.experts.len()).collect();
        self.instance_for(&all, task, lambda)
    }

    /// Instance over the experts at `positions`, renumbered densely in the
    /// given order.
    pub fn instance_for(&self, positions: &[usize], task: &[SkillId], lambda: f64) -> Result<Instance> {
        let experts = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let e = &self.experts[p];
                Expert::new(i, e.skills.iter().map(|s| s.0), e.cost)
            })
            .collect();
        Instance::new(InstanceData {
            experts,
            num_skills: self.skill_names.len(),
            task: task.to_vec(),
            lambda,
        })
    }

    /// Task given as skill names; unknown names are an error.
    pub fn task_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<SkillId>> {
        let mut unknown = Vec::new();
        let mut task = Vec::new();
        for name in names {
            match self.skill_id(name.as_ref()) {
                Some(id) if !task.contains(&id) => task.push(id),
                Some(_) => {}
                None => unknown.push(name.as_ref().to_string()),
            }
        }
        if unknown.is_empty() {
            Ok(task)
        } else {
            Err(Error::UncoverableNamed(unknown))
        }
    }
}
