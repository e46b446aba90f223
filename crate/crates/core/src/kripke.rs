//! State-labeled Kripke structures built from control-flow graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flowgraph::{dot_escape, Cfg, NodeKind, Origin};

pub type StateId = u64;

pub const ENTRY: &str = "entry";
pub const EXIT: &str = "exit";
pub const ERROR: &str = "error";
pub const TERMINATED: &str = "terminated";
pub const ACTION_PREFIX: &str = "action:";
pub const BRANCH_PREFIX: &str = "action:branch:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("state {0} has no successor")]
    Totality(StateId),
    #[error("model has no initial state")]
    EmptyInitial,
}

/// Finite Kripke structure with a total transition relation. States are kept
/// sorted by id and addressed internally by dense index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    ids: Vec<StateId>,
    labels: Vec<BTreeSet<String>>,
    initial: Vec<usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl KripkeStructure {
    pub fn new<I, T>(states: I, initial: &[StateId], transitions: T) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (StateId, BTreeSet<String>)>,
        T: IntoIterator<Item = (StateId, StateId)>,
    {
        let mut by_id: BTreeMap<StateId, BTreeSet<String>> = BTreeMap::new();
        for (id, labels) in states {
            if by_id.insert(id, labels).is_some() {
                return Err(ModelError::Schema(format!("duplicate state id {id}")));
            }
        }
        let ids: Vec<StateId> = by_id.keys().copied().collect();
        let labels: Vec<BTreeSet<String>> = by_id.into_values().collect();
        let index = |id: StateId| {
            ids.binary_search(&id)
                .map_err(|_| ModelError::Schema(format!("unknown state id {id}")))
        };

        let mut init = BTreeSet::new();
        for &id in initial {
            init.insert(index(id)?);
        }
        if init.is_empty() {
            return Err(ModelError::EmptyInitial);
        }
        let mut succ = vec![BTreeSet::new(); ids.len()];
        for (from, to) in transitions {
            succ[index(from)?].insert(index(to)?);
        }
        if let Some(i) = succ.iter().position(|s| s.is_empty()) {
            return Err(ModelError::Totality(ids[i]));
        }
        let succ: Vec<Vec<usize>> = succ.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut pred = vec![Vec::new(); ids.len()];
        for (from, targets) in succ.iter().enumerate() {
            for &to in targets {
                pred[to].push(from);
            }
        }
        Ok(KripkeStructure {
            ids,
            labels,
            initial: init.into_iter().collect(),
            succ,
            pred,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> StateId {
        self.ids[index]
    }

    pub fn index_of(&self, id: StateId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn ids(&self) -> &[StateId] {
        &self.ids
    }

    /// Initial states by index, ascending.
    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn labels(&self, index: usize) -> &BTreeSet<String> {
        &self.labels[index]
    }

    pub fn has_label(&self, index: usize, label: &str) -> bool {
        self.labels[index].contains(label)
    }

    /// Successors by index, ascending.
    pub fn successors(&self, index: usize) -> &[usize] {
        &self.succ[index]
    }

    pub fn predecessors(&self, index: usize) -> &[usize] {
        &self.pred[index]
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(f, ts)| ts.iter().map(move |&t| (self.ids[f], self.ids[t])))
    }

    /// All labels used anywhere in the model.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.labels
            .iter()
            .flat_map(|ls| ls.iter().map(String::as_str))
            .collect()
    }

    /// Whether the state stands for an executed operation (branches excluded).
    pub fn is_action_state(&self, index: usize) -> bool {
        self.labels[index]
            .iter()
            .any(|l| l.starts_with(ACTION_PREFIX) && !l.starts_with(BRANCH_PREFIX))
    }
}

fn state_labels(node: &crate::flowgraph::CfgNode) -> BTreeSet<String> {
    let mut labels = BTreeSet::new();
    match node.kind {
        NodeKind::Entry => {
            labels.insert(ENTRY.to_string());
        }
        NodeKind::Exit => {
            labels.insert(EXIT.to_string());
            labels.insert(TERMINATED.to_string());
        }
        NodeKind::Error => {
            labels.insert(ERROR.to_string());
            labels.insert(TERMINATED.to_string());
        }
        NodeKind::Action => {
            labels.insert(format!("{ACTION_PREFIX}{}", node.label));
            if let Some(call) = &node.call {
                labels.insert(format!("call:{call}"));
            }
            for p in &node.props {
                labels.insert(format!("prop:{p}"));
            }
        }
        NodeKind::Branch => {
            labels.insert(format!("{BRANCH_PREFIX}{}", node.label));
        }
    }
    if let Origin::Advice { aspect, kind } = &node.origin {
        labels.insert(format!("advice:{aspect}.{kind}"));
        labels.insert(format!("aspect:{aspect}"));
    }
    labels
}

/// One state per node, one transition per edge, plus self-loops on the
/// terminal states.
pub fn from_cfg(cfg: &Cfg) -> KripkeStructure {
    let states = cfg.nodes.iter().map(|n| (n.id as StateId, state_labels(n)));
    let mut transitions: Vec<(StateId, StateId)> = cfg
        .edges
        .iter()
        .map(|e| (e.from as StateId, e.to as StateId))
        .collect();
    for n in &cfg.nodes {
        if matches!(n.kind, NodeKind::Exit | NodeKind::Error) {
            transitions.push((n.id as StateId, n.id as StateId));
        }
    }
    KripkeStructure::new(states, &[cfg.entry as StateId], transitions)
        .expect("a well-formed cfg yields a total model")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonState {
    id: StateId,
    labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModel {
    version: u32,
    states: Vec<JsonState>,
    initial: Vec<StateId>,
    transitions: Vec<[StateId; 2]>,
}

pub fn to_json(model: &KripkeStructure) -> String {
    let doc = JsonModel {
        version: 1,
        states: (0..model.len())
            .map(|i| JsonState {
                id: model.id(i),
                labels: model.labels(i).iter().cloned().collect(),
            })
            .collect(),
        initial: model.initial().iter().map(|&i| model.id(i)).collect(),
        transitions: model.transitions().map(|(a, b)| [a, b]).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
    text.push('\n');
    text
}

pub fn to_dot(model: &KripkeStructure) -> String {
    let mut out = String::from("digraph kripke {\n  node [shape=box];\n");
    for i in 0..model.len() {
        let mut label = model.id(i).to_string();
        for l in model.labels(i) {
            label.push('\n');
            label.push_str(l);
        }
        let _ = write!(out, "  s{} [label=\"{}\"", model.id(i), dot_escape(&label).replace('\n', "\\n"));
        if model.initial().contains(&i) {
            out.push_str(", shape=doublecircle");
        }
        out.push_str("];\n");
    }
    for (a, b) in model.transitions() {
        let _ = writeln!(out, "  s{a} -> s{b};");
    }
    out.push_str("}\n");
    out
}

pub fn load(text: &str) -> Result<KripkeStructure, ModelError> {
    let doc: JsonModel =
        serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    if doc.version != 1 {
        return Err(ModelError::Schema(format!("unsupported version {}", doc.version)));
    }
    let mut states = Vec::with_capacity(doc.states.len());
    for s in doc.states {
        let n = s.labels.len();
        let labels: BTreeSet<String> = s.labels.into_iter().collect();
        if labels.len() != n {
            return Err(ModelError::Schema(format!("state {} repeats a label", s.id)));
        }
        states.push((s.id, labels));
    }
    KripkeStructure::new(states, &doc.initial, doc.transitions.into_iter().map(|[a, b]| (a, b)))
}
