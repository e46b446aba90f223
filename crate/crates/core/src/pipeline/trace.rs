//! Conformance of observed event logs against a model.

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::kripke::{KripkeStructure, ACTION_PREFIX};
use crate::logic::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace {0} is empty")]
    EmptyTrace(usize),
    #[error("trace {trace} has an empty event at position {event}")]
    EmptyEvent { trace: usize, event: usize },
}

/// Nonempty sequence of observed action labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace(Vec<String>);

impl Trace {
    pub fn new(events: Vec<String>) -> Result<Self, TraceError> {
        if events.is_empty() {
            return Err(TraceError::EmptyTrace(0));
        }
        if let Some(i) = events.iter().position(|e| e.is_empty()) {
            return Err(TraceError::EmptyEvent { trace: 0, event: i });
        }
        Ok(Trace(events))
    }

    pub fn events(&self) -> &[String] {
        &self.0
    }
}

/// One event label per line; blank lines and `#` comments are skipped.
pub fn parse_trace(text: &str) -> Result<Trace, TraceError> {
    let events = text
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    Trace::new(events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TraceVerdict {
    Conforming,
    NonConforming { divergence: usize },
}

impl TraceVerdict {
    pub fn conforms(self) -> bool {
        self == TraceVerdict::Conforming
    }
}

/// Action states reachable from `seeds` through non-action states. A seed
/// that is itself an action state is returned as is.
fn next_actions(m: &KripkeStructure, seeds: impl IntoIterator<Item = usize>) -> StateSet {
    let mut found = StateSet::empty(m.len());
    let mut seen = StateSet::empty(m.len());
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in seeds {
        if seen.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if m.is_action_state(s) {
            found.insert(s);
            continue;
        }
        for &t in m.successors(s) {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    found
}

/// Frontier simulation: tracks every state that may have produced the events
/// seen so far.
pub fn check_trace(m: &KripkeStructure, t: &Trace) -> TraceVerdict {
    let mut candidates = next_actions(m, m.initial().iter().copied());
    for (i, event) in t.events().iter().enumerate() {
        let label = format!("{ACTION_PREFIX}{event}");
        let matched: Vec<usize> = candidates.iter().filter(|&s| m.has_label(s, &label)).collect();
        if matched.is_empty() {
            return TraceVerdict::NonConforming { divergence: i };
        }
        candidates = next_actions(m, matched.iter().flat_map(|&s| m.successors(s).iter().copied()));
    }
    TraceVerdict::Conforming
}

fn serialize_fraction<S: Serializer>(f: &Option<Ratio<usize>>, s: S) -> Result<S::Ok, S::Error> {
    match f {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub verdict: TraceVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub version: u32,
    pub traces: Vec<TraceEntry>,
    pub conforming: usize,
    pub total: usize,
    /// Exact conforming fraction; undefined for an empty trace set.
    #[serde(serialize_with = "serialize_fraction")]
    pub fraction: Option<Ratio<usize>>,
    pub warnings: Vec<String>,
}

impl TraceReport {
    pub fn all_conform(&self) -> bool {
        self.conforming == self.total
    }
}

pub fn check_trace_set(m: &KripkeStructure, traces: &[Trace]) -> TraceReport {
    let verdicts: Vec<TraceEntry> = traces
        .iter()
        .enumerate()
        .map(|(index, t)| TraceEntry {
            index,
            name: None,
            verdict: check_trace(m, t),
        })
        .collect();
    let conforming = verdicts.iter().filter(|v| v.verdict.conforms()).count();
    let total = verdicts.len();
    let mut warnings = Vec::new();
    let fraction = if total == 0 {
        warnings.push("no traces given; conforming fraction is undefined".to_string());
        None
    } else {
        Some(Ratio::new(conforming, total))
    };
    TraceReport {
        version: 1,
        traces: verdicts,
        conforming,
        total,
        fraction,
        warnings,
    }
}

/// Builds traces from raw event lists, reporting the index of an empty one.
pub fn traces_from_events(raw: Vec<Vec<String>>) -> Result<Vec<Trace>, TraceError> {
    raw.into_iter()
        .enumerate()
        .map(|(i, events)| {
            Trace::new(events).map_err(|e| match e {
                TraceError::EmptyTrace(_) => TraceError::EmptyTrace(i),
                TraceError::EmptyEvent { event, .. } => TraceError::EmptyEvent { trace: i, event },
            })
        })
        .collect()
}
