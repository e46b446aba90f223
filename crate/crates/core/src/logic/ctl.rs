//! Explicit-state CTL checking by fixpoint labeling.

use std::collections::BTreeSet;

use super::formula::CtlFormula;
use super::{Evidence, SatResult};
use crate::kripke::{KripkeStructure, StateId};

/// Subset of a model's states, indexed like the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet(Vec<bool>);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        StateSet(vec![true; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> bool) -> Self {
        StateSet((0..n).map(f).collect())
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn insert(&mut self, index: usize) -> bool {
        !std::mem::replace(&mut self.0[index], true)
    }

    pub fn remove(&mut self, index: usize) {
        self.0[index] = false;
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    /// Member indices, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Member state ids, ascending.
    pub fn ids(&self, m: &KripkeStructure) -> Vec<StateId> {
        self.iter().map(|i| m.id(i)).collect()
    }

    pub fn complement(&self) -> Self {
        StateSet(self.0.iter().map(|b| !b).collect())
    }

    fn zip(&self, other: &StateSet, f: impl Fn(bool, bool) -> bool) -> Self {
        StateSet(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn intersect(&self, other: &StateSet) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn union(&self, other: &StateSet) -> Self {
        self.zip(other, |a, b| a || b)
    }
}

/// States with at least one successor in `target`.
fn pre_exists(m: &KripkeStructure, target: &StateSet) -> StateSet {
    let mut out = StateSet::empty(m.len());
    for s in target.iter() {
        for &p in m.predecessors(s) {
            out.insert(p);
        }
    }
    out
}

/// Least fixpoint of `goal ∪ (hold ∩ pre(X))`.
fn exists_until(m: &KripkeStructure, hold: &StateSet, goal: &StateSet) -> StateSet {
    let mut x = goal.clone();
    let mut work: Vec<usize> = goal.iter().collect();
    while let Some(s) = work.pop() {
        for &p in m.predecessors(s) {
            if hold.contains(p) && x.insert(p) {
                work.push(p);
            }
        }
    }
    x
}

/// Greatest fixpoint of `hold ∩ pre(X)`.
fn exists_globally(m: &KripkeStructure, hold: &StateSet) -> StateSet {
    let mut x = hold.clone();
    let mut live: Vec<usize> = (0..m.len())
        .map(|s| m.successors(s).iter().filter(|&&t| x.contains(t)).count())
        .collect();
    let mut work: Vec<usize> = x.iter().filter(|&s| live[s] == 0).collect();
    while let Some(s) = work.pop() {
        if !x.contains(s) {
            continue;
        }
        x.remove(s);
        for &p in m.predecessors(s) {
            if x.contains(p) {
                live[p] -= 1;
                if live[p] == 0 {
                    work.push(p);
                }
            }
        }
    }
    x
}

/// Satisfaction set of `f`. Atoms that label no state hold nowhere.
pub fn sat_set(m: &KripkeStructure, f: &CtlFormula) -> StateSet {
    use CtlFormula::*;
    let n = m.len();
    match f {
        True => StateSet::full(n),
        False => StateSet::empty(n),
        Atom(a) => StateSet::from_fn(n, |s| m.has_label(s, a)),
        Not(x) => sat_set(m, x).complement(),
        And(a, b) => sat_set(m, a).intersect(&sat_set(m, b)),
        Or(a, b) => sat_set(m, a).union(&sat_set(m, b)),
        Implies(a, b) => sat_set(m, a).complement().union(&sat_set(m, b)),
        Iff(a, b) => {
            let (a, b) = (sat_set(m, a), sat_set(m, b));
            a.zip(&b, |x, y| x == y)
        }
        EX(x) => pre_exists(m, &sat_set(m, x)),
        AX(x) => pre_exists(m, &sat_set(m, x).complement()).complement(),
        EF(x) => exists_until(m, &StateSet::full(n), &sat_set(m, x)),
        AF(x) => exists_globally(m, &sat_set(m, x).complement()).complement(),
        EG(x) => exists_globally(m, &sat_set(m, x)),
        AG(x) => exists_until(m, &StateSet::full(n), &sat_set(m, x).complement()).complement(),
        EU(a, b) => exists_until(m, &sat_set(m, a), &sat_set(m, b)),
        AU(a, b) => {
            let not_a = sat_set(m, a).complement();
            let not_b = sat_set(m, b).complement();
            let stuck = exists_until(m, &not_b, &not_a.intersect(&not_b));
            stuck.union(&exists_globally(m, &not_b)).complement()
        }
    }
}

/// Atoms of `f` that label no state of `m`.
pub fn unknown_atoms(m: &KripkeStructure, f: &CtlFormula) -> Vec<String> {
    let vocab = m.vocabulary();
    f.atoms()
        .into_iter()
        .filter(|a| !vocab.contains(a))
        .map(str::to_string)
        .collect()
}

/// Existential shapes that have path evidence.
enum Shape {
    Next(CtlFormula),
    Until(CtlFormula, CtlFormula),
    Globally(CtlFormula),
}

fn shape_of(f: &CtlFormula) -> Option<Shape> {
    use CtlFormula::*;
    Some(match f {
        EX(x) => Shape::Next((**x).clone()),
        EF(x) => Shape::Until(True, (**x).clone()),
        EU(a, b) => Shape::Until((**a).clone(), (**b).clone()),
        EG(x) => Shape::Globally((**x).clone()),
        Not(inner) => match &**inner {
            AX(x) => Shape::Next(CtlFormula::not((**x).clone())),
            AG(x) => Shape::Until(True, CtlFormula::not((**x).clone())),
            AF(x) => Shape::Globally(CtlFormula::not((**x).clone())),
            Not(y) => return shape_of(y),
            _ => return None,
        },
        _ => return None,
    })
}

/// Shortest path from `sources` through `hold` states to a `goal` state.
/// Among shortest paths the goal with the smallest id wins.
pub(crate) fn shortest_path(
    m: &KripkeStructure,
    sources: &[usize],
    hold: &StateSet,
    goal: &StateSet,
) -> Option<Vec<usize>> {
    let mut parent: Vec<Option<usize>> = vec![None; m.len()];
    let mut seen = StateSet::empty(m.len());
    let mut level: Vec<usize> = Vec::new();
    for &s in sources {
        if seen.insert(s) {
            level.push(s);
        }
    }
    level.sort_unstable();
    while !level.is_empty() {
        if let Some(&hit) = level.iter().filter(|&&s| goal.contains(s)).min() {
            let mut path = vec![hit];
            let mut cur = hit;
            while let Some(p) = parent[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        let mut next = Vec::new();
        for &s in &level {
            if !hold.contains(s) {
                continue;
            }
            for &t in m.successors(s) {
                if seen.insert(t) {
                    parent[t] = Some(s);
                    next.push(t);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    None
}

/// Path that stays inside `within` and closes a cycle, following the
/// smallest-id successor in `within` at every step.
fn lasso(m: &KripkeStructure, start: usize, within: &StateSet) -> (Vec<usize>, Vec<usize>) {
    let mut path = Vec::new();
    let mut at = vec![None; m.len()];
    let mut cur = start;
    loop {
        if let Some(pos) = at[cur] {
            let cycle = path.split_off(pos);
            return (path, cycle);
        }
        at[cur] = Some(path.len());
        path.push(cur);
        cur = *m
            .successors(cur)
            .iter()
            .find(|&&t| within.contains(t))
            .expect("every state of an EG set has a successor inside it");
    }
}

fn witness(m: &KripkeStructure, shape: &Shape, sources: &[usize]) -> Evidence {
    let ids = |p: Vec<usize>| p.into_iter().map(|i| m.id(i)).collect::<Vec<_>>();
    match shape {
        Shape::Next(x) => {
            let target = sat_set(m, x);
            for &s in sources {
                if let Some(&t) = m.successors(s).iter().find(|&&t| target.contains(t)) {
                    return Evidence::FinitePath(ids(vec![s, t]));
                }
            }
            Evidence::None
        }
        Shape::Until(a, b) => {
            match shortest_path(m, sources, &sat_set(m, a), &sat_set(m, b)) {
                Some(p) => Evidence::FinitePath(ids(p)),
                None => Evidence::None,
            }
        }
        Shape::Globally(x) => {
            let within = exists_globally(m, &sat_set(m, x));
            match sources.iter().find(|&&s| within.contains(s)) {
                Some(&s) => {
                    let (prefix, cycle) = lasso(m, s, &within);
                    Evidence::Lasso {
                        prefix: ids(prefix),
                        cycle: ids(cycle),
                    }
                }
                None => Evidence::None,
            }
        }
    }
}

/// Checks `f` on every initial state. A violated formula carries a
/// counterexample and a satisfied existential formula carries a witness,
/// when its top-level shape admits one.
pub fn check_ctl(m: &KripkeStructure, f: &CtlFormula) -> SatResult {
    let sat = sat_set(m, f);
    let failing: Vec<usize> = m.initial().iter().copied().filter(|&s| !sat.contains(s)).collect();
    let holds = failing.is_empty();
    let evidence = if holds {
        shape_of(f).map_or(Evidence::None, |sh| witness(m, &sh, m.initial()))
    } else {
        shape_of(&CtlFormula::not(f.clone())).map_or(Evidence::None, |sh| witness(m, &sh, &failing))
    };
    SatResult { holds, evidence }
}

/// Checks that `path` starts at an initial state and follows transitions.
pub fn is_model_path(m: &KripkeStructure, path: &[StateId]) -> bool {
    let Some(idx) = path.iter().map(|&id| m.index_of(id)).collect::<Option<Vec<_>>>() else {
        return false;
    };
    match idx.first() {
        Some(s0) if m.initial().contains(s0) => {}
        _ => return false,
    }
    idx.windows(2).all(|w| m.successors(w[0]).contains(&w[1]))
}

/// Labels of the states along a path, for reports.
pub fn path_labels(m: &KripkeStructure, path: &[StateId]) -> Vec<BTreeSet<String>> {
    path.iter()
        .filter_map(|&id| m.index_of(id).map(|i| m.labels(i).clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_ctl;

    fn model(states: &[(StateId, &[&str])], initial: &[StateId], trans: &[(StateId, StateId)]) -> KripkeStructure {
        KripkeStructure::new(
            states
                .iter()
                .map(|(id, ls)| (*id, ls.iter().map(|s| s.to_string()).collect())),
            initial,
            trans.iter().copied(),
        )
        .unwrap()
    }

    /// 0 -> 1 -> 2(p) -> 2, 1 -> 3 -> 3
    fn diamond() -> KripkeStructure {
        model(
            &[(0, &["start"]), (1, &[]), (2, &["p"]), (3, &["q"])],
            &[0],
            &[(0, 1), (1, 2), (1, 3), (2, 2), (3, 3)],
        )
    }

    fn sat(m: &KripkeStructure, text: &str) -> Vec<StateId> {
        sat_set(m, &parse_ctl(text).unwrap()).ids(m)
    }

    #[test]
    fn basic_operators() {
        let m = diamond();
        assert_eq!(sat(&m, "AG true"), [0, 1, 2, 3]);
        assert_eq!(sat(&m, "EF p"), [0, 1, 2]);
        assert_eq!(sat(&m, "AF p"), [2]);
        assert_eq!(sat(&m, "EX p"), [1, 2]);
        assert_eq!(sat(&m, "AX p"), [2]);
        assert_eq!(sat(&m, "EG !q"), [0, 1, 2]);
        assert_eq!(sat(&m, "AG !q"), [2]);
        assert_eq!(sat(&m, "E[!q U p]"), [0, 1, 2]);
        assert_eq!(sat(&m, "A[!q U p]"), [2]);
        assert_eq!(sat(&m, "A[true U (p | q)]"), [0, 1, 2, 3]);
        assert_eq!(sat(&m, "missing"), Vec::<StateId>::new());
    }

    #[test]
    fn ag_counterexample_is_shortest() {
        let m = diamond();
        let r = check_ctl(&m, &parse_ctl("AG !q").unwrap());
        assert!(!r.holds);
        assert_eq!(r.evidence, Evidence::FinitePath(vec![0, 1, 3]));
        let r = check_ctl(&m, &parse_ctl("AG (p -> false)").unwrap());
        assert_eq!(r.evidence, Evidence::FinitePath(vec![0, 1, 2]));
    }

    #[test]
    fn witnesses() {
        let m = diamond();
        let r = check_ctl(&m, &parse_ctl("EF q").unwrap());
        assert!(r.holds);
        assert_eq!(r.evidence, Evidence::FinitePath(vec![0, 1, 3]));
        let r = check_ctl(&m, &parse_ctl("EX true").unwrap());
        assert_eq!(r.evidence, Evidence::FinitePath(vec![0, 1]));
        let r = check_ctl(&m, &parse_ctl("EG !q").unwrap());
        assert_eq!(r.evidence, Evidence::Lasso { prefix: vec![0, 1], cycle: vec![2] });
        let r = check_ctl(&m, &parse_ctl("AF p").unwrap());
        assert!(!r.holds);
        assert_eq!(r.evidence, Evidence::Lasso { prefix: vec![0, 1], cycle: vec![3] });
        let r = check_ctl(&m, &parse_ctl("!E[!q U p]").unwrap());
        assert!(!r.holds);
        assert_eq!(r.evidence, Evidence::FinitePath(vec![0, 1, 2]));
        let r = check_ctl(&m, &parse_ctl("AG true").unwrap());
        assert_eq!(r, SatResult { holds: true, evidence: Evidence::None });
    }

    #[test]
    fn path_validation() {
        let m = diamond();
        assert!(is_model_path(&m, &[0, 1, 3, 3]));
        assert!(!is_model_path(&m, &[1, 2]));
        assert!(!is_model_path(&m, &[0, 2]));
        assert!(!is_model_path(&m, &[]));
        assert!(!is_model_path(&m, &[0, 9]));
    }

    #[test]
    fn unknown_atom_listing() {
        let m = diamond();
        assert_eq!(unknown_atoms(&m, &parse_ctl("AG (p -> EF nope)").unwrap()), ["nope"]);
    }
}
