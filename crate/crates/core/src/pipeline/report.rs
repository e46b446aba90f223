use std::collections::BTreeMap;

use serde::Serialize;

use crate::kripke::{KripkeStructure, StateId, ACTION_PREFIX};
use crate::logic::Evidence;
use crate::weaver::ConcernValuation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EvidenceReport {
    Assignment {
        valuation: ConcernValuation,
    },
    Path {
        states: Vec<StateId>,
        /// Action labels met along the path, in order.
        actions: Vec<String>,
    },
    Lasso {
        prefix: Vec<StateId>,
        cycle: Vec<StateId>,
    },
}

fn actions_along(m: &KripkeStructure, states: &[StateId]) -> Vec<String> {
    states
        .iter()
        .filter_map(|&id| m.index_of(id))
        .filter(|&i| m.is_action_state(i))
        .flat_map(|i| m.labels(i).iter())
        .filter_map(|l| l.strip_prefix(ACTION_PREFIX))
        .map(str::to_string)
        .collect()
}

impl EvidenceReport {
    pub fn new(evidence: &Evidence, model: Option<&KripkeStructure>) -> Option<Self> {
        Some(match evidence {
            Evidence::None => return None,
            Evidence::Assignment(v) => EvidenceReport::Assignment { valuation: v.clone() },
            Evidence::FinitePath(states) => EvidenceReport::Path {
                states: states.clone(),
                actions: model.map_or_else(Vec::new, |m| actions_along(m, states)),
            },
            Evidence::Lasso { prefix, cycle } => EvidenceReport::Lasso {
                prefix: prefix.clone(),
                cycle: cycle.clone(),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub kind: String,
    pub target: Option<String>,
    pub holds: bool,
    pub evidence: Option<EvidenceReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub states: usize,
    pub transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Stats {
    pub models: BTreeMap<String, ModelStats>,
    pub valuation: ConcernValuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub version: u32,
    pub entries: Vec<EntryReport>,
    pub stats: Stats,
    pub warnings: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn new(entries: Vec<EntryReport>, stats: Stats, warnings: Vec<String>) -> Self {
        let status = if entries.iter().all(|e| e.holds) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            version: 1,
            entries,
            stats,
            warnings,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn entry(&self, name: &str) -> Option<&EntryReport> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_layout() {
        let ok = EntryReport {
            name: "a".into(),
            kind: "config".into(),
            target: None,
            holds: true,
            evidence: None,
        };
        let r = Report::new(vec![ok.clone()], Stats::default(), vec![]);
        assert!(r.passed());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["status"], "pass");
        assert!(v["entries"][0]["target"].is_null());
        assert!(v["entries"][0]["evidence"].is_null());

        let bad = EntryReport {
            holds: false,
            evidence: EvidenceReport::new(&Evidence::Lasso { prefix: vec![0], cycle: vec![1] }, None),
            ..ok
        };
        let r = Report::new(vec![bad], Stats::default(), vec![]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["entries"][0]["evidence"]["kind"], "lasso");
        assert_eq!(v["entries"][0]["evidence"]["cycle"][0], 1);
        assert!(Report::new(vec![], Stats::default(), vec![]).passed());
    }
}
