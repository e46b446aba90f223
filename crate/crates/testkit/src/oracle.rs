use std::collections::{BTreeMap, VecDeque};

use osm_core::frontend::{AdviceKind, AdviceTarget, AritySpec, CallPattern, Cond, Program, Stmt};
use osm_core::kripke::KripkeStructure;
use osm_core::logic::CtlFormula;

/// `*` matches any run of characters; anchored at both ends.
pub fn glob_dp(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    // m[i][j]: p[..i] matches t[..j]
    let mut m = vec![vec![false; t.len() + 1]; p.len() + 1];
    m[0][0] = true;
    for i in 1..=p.len() {
        for j in 0..=t.len() {
            m[i][j] = if p[i - 1] == '*' {
                m[i - 1][j] || (j > 0 && m[i][j - 1])
            } else {
                j > 0 && m[i - 1][j - 1] && p[i - 1] == t[j - 1]
            };
        }
    }
    m[p.len()][t.len()]
}

pub fn pattern_matches(p: &CallPattern, receiver: &str, method: &str, arity: u32) -> bool {
    glob_dp(&p.receiver, receiver)
        && glob_dp(&p.method, method)
        && match p.arity {
            AritySpec::Any => true,
            AritySpec::Exact(n) => n == arity,
        }
}

/// One call site: the aspect owning the code (if advice) and the callee.
#[derive(Debug, Clone)]
pub struct Site {
    pub aspect: Option<String>,
    pub receiver: String,
    pub method: String,
    pub arity: u32,
}

fn sites_in(stmts: &[Stmt], aspect: Option<&str>, out: &mut Vec<Site>) {
    let push = |c: &osm_core::frontend::Call, out: &mut Vec<Site>| {
        out.push(Site {
            aspect: aspect.map(str::to_string),
            receiver: c.receiver.clone(),
            method: c.method.clone(),
            arity: c.args,
        })
    };
    for s in stmts {
        match s {
            Stmt::Call(c) => push(c, out),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if let Cond::Call(c) = cond {
                    push(c, out);
                }
                sites_in(then_branch, aspect, out);
                if let Some(e) = else_branch {
                    sites_in(e, aspect, out);
                }
            }
            Stmt::While { cond, body } => {
                if let Cond::Call(c) = cond {
                    push(c, out);
                }
                sites_in(body, aspect, out);
            }
            _ => {}
        }
    }
}

pub fn call_sites(p: &Program) -> Vec<Site> {
    let mut out = Vec::new();
    for t in p.types() {
        for m in &t.methods {
            sites_in(&m.body, None, &mut out);
        }
    }
    for a in p.aspects() {
        for adv in &a.advice {
            sites_in(&adv.body, Some(&a.name), &mut out);
        }
    }
    out
}

fn resolve<'a>(p: &'a Program, aspect: &str, target: &'a AdviceTarget) -> &'a CallPattern {
    match target {
        AdviceTarget::Inline(pat) => pat,
        AdviceTarget::Named(n) => {
            let a = p.aspect(aspect).expect("aspect");
            &a.pointcuts.iter().find(|pc| &pc.name == n).expect("pointcut").pattern
        }
    }
}

/// Advice `(aspect, kind, body)` that apply at a site.
fn applicable<'a>(p: &'a Program, site: &Site) -> Vec<(&'a str, AdviceKind, &'a [Stmt])> {
    let mut out = Vec::new();
    for a in p.aspects() {
        if site.aspect.as_deref() == Some(a.name.as_str()) {
            continue;
        }
        for adv in &a.advice {
            if pattern_matches(resolve(p, &a.name, &adv.target), &site.receiver, &site.method, site.arity) {
                out.push((a.name.as_str(), adv.kind, adv.body.as_slice()));
            }
        }
    }
    out
}

/// Number of (call site, advice) pairs that match.
pub fn brute_force_binding_count(p: &Program) -> usize {
    call_sites(p).iter().map(|s| applicable(p, s).len()).sum()
}

/// Action nodes of advice origin in the woven graph of `Type.method`, by
/// direct expansion. Only meaningful for programs without `throw`/`return`
/// (every expanded node is then reachable) whose graph builds.
pub fn advice_action_count(p: &Program, type_name: &str, method: &str) -> usize {
    let m = p.method(type_name, method).expect("method exists");
    let mut cx = Counter { p, depth: 0 };
    cx.block(&m.body, None, false, None)
}

struct Counter<'a> {
    p: &'a Program,
    depth: usize,
}

/// Pending inner part of an around chain.
struct Inner<'a, 'b> {
    site: &'b Site,
    advice_origin: bool,
    arounds: &'b [(&'a str, AdviceKind, &'a [Stmt])],
}

impl<'a> Counter<'a> {
    fn block(&mut self, stmts: &'a [Stmt], aspect: Option<&str>, origin: bool, inner: Option<&Inner<'a, '_>>) -> usize {
        let mut n = 0;
        for s in stmts {
            n += match s {
                Stmt::Call(c) => self.site(c, aspect, origin),
                Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    self.cond(cond, aspect, origin)
                        + self.block(then_branch, aspect, origin, inner)
                        + else_branch
                            .as_ref()
                            .map_or(0, |e| self.block(e, aspect, origin, inner))
                }
                Stmt::While { cond, body } => self.cond(cond, aspect, origin) + self.block(body, aspect, origin, inner),
                Stmt::Atomic(_) | Stmt::Throw(_) => origin as usize,
                Stmt::Return => 0,
                Stmt::Proceed => match inner {
                    Some(i) => self.chain(i.site, i.advice_origin, i.arounds),
                    None => 0,
                },
            };
        }
        n
    }

    fn cond(&mut self, cond: &Cond, aspect: Option<&str>, origin: bool) -> usize {
        match cond {
            Cond::Call(c) => self.site(c, aspect, origin),
            Cond::Label(_) => 0,
        }
    }

    fn site(&mut self, c: &osm_core::frontend::Call, aspect: Option<&str>, origin: bool) -> usize {
        self.depth += 1;
        assert!(self.depth < 64, "expansion too deep");
        let site = Site {
            aspect: aspect.map(str::to_string),
            receiver: c.receiver.clone(),
            method: c.method.clone(),
            arity: c.args,
        };
        let adv = applicable(self.p, &site);
        let arounds: Vec<_> = adv.iter().copied().filter(|a| a.1 == AdviceKind::Around).collect();
        let mut n = 0;
        for (name, kind, body) in adv.iter().copied() {
            if kind != AdviceKind::Around {
                n += self.block(body, Some(name), true, None);
            }
        }
        n += self.chain(&site, origin, &arounds);
        self.depth -= 1;
        n
    }

    fn chain(&mut self, site: &Site, origin: bool, arounds: &[(&'a str, AdviceKind, &'a [Stmt])]) -> usize {
        match arounds.split_first() {
            None => match self.p.method(&site.receiver, &site.method) {
                Some(m) => self.block(&m.body, None, origin, None),
                None => origin as usize,
            },
            Some(((name, _, body), rest)) => {
                let inner = Inner {
                    site,
                    advice_origin: origin,
                    arounds: rest,
                };
                self.block(body, Some(name), true, Some(&inner))
            }
        }
    }
}

fn sat_naive(m: &KripkeStructure, f: &CtlFormula) -> Vec<bool> {
    use CtlFormula::*;
    let n = m.len();
    let ex = |x: &[bool]| -> Vec<bool> { (0..n).map(|s| m.successors(s).iter().any(|&t| x[t])).collect() };
    let ax = |x: &[bool]| -> Vec<bool> { (0..n).map(|s| m.successors(s).iter().all(|&t| x[t])).collect() };
    let lfp = |step: &dyn Fn(&[bool]) -> Vec<bool>| {
        let mut z = vec![false; n];
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let gfp = |step: &dyn Fn(&[bool]) -> Vec<bool>| {
        let mut z = vec![true; n];
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let zip = |a: &[bool], b: &[bool], op: fn(bool, bool) -> bool| -> Vec<bool> {
        a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(a) => (0..n).map(|s| m.has_label(s, a)).collect(),
        Not(x) => sat_naive(m, x).into_iter().map(|b| !b).collect(),
        And(a, b) => zip(&sat_naive(m, a), &sat_naive(m, b), |x, y| x && y),
        Or(a, b) => zip(&sat_naive(m, a), &sat_naive(m, b), |x, y| x || y),
        Implies(a, b) => zip(&sat_naive(m, a), &sat_naive(m, b), |x, y| !x || y),
        Iff(a, b) => zip(&sat_naive(m, a), &sat_naive(m, b), |x, y| x == y),
        EX(x) => ex(&sat_naive(m, x)),
        AX(x) => ax(&sat_naive(m, x)),
        EF(x) => {
            let p = sat_naive(m, x);
            lfp(&|z| zip(&p, &ex(z), |a, b| a || b))
        }
        AF(x) => {
            let p = sat_naive(m, x);
            lfp(&|z| zip(&p, &ax(z), |a, b| a || b))
        }
        EG(x) => {
            let p = sat_naive(m, x);
            gfp(&|z| zip(&p, &ex(z), |a, b| a && b))
        }
        AG(x) => {
            let p = sat_naive(m, x);
            gfp(&|z| zip(&p, &ax(z), |a, b| a && b))
        }
        EU(a, b) => {
            let (p, q) = (sat_naive(m, a), sat_naive(m, b));
            lfp(&|z| {
                let step = zip(&p, &ex(z), |a, b| a && b);
                zip(&q, &step, |a, b| a || b)
            })
        }
        AU(a, b) => {
            let (p, q) = (sat_naive(m, a), sat_naive(m, b));
            lfp(&|z| {
                let step = zip(&p, &ax(z), |a, b| a && b);
                zip(&q, &step, |a, b| a || b)
            })
        }
    }
}

/// Per-state truth of `f`, indexed like the model's dense state indices.
pub fn naive_ctl(m: &KripkeStructure, f: &CtlFormula) -> Vec<bool> {
    sat_naive(m, f)
}

/// Length in transitions of the shortest path from an initial state to a
/// state satisfying `goal`.
pub fn bfs_distance(m: &KripkeStructure, goal: &[bool]) -> Option<usize> {
    let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
    let mut q = VecDeque::new();
    for &s in m.initial() {
        if dist.insert(s, 0).is_none() {
            q.push_back(s);
        }
    }
    while let Some(s) = q.pop_front() {
        if goal[s] {
            return Some(dist[&s]);
        }
        for &t in m.successors(s) {
            if !dist.contains_key(&t) {
                dist.insert(t, dist[&s] + 1);
                q.push_back(t);
            }
        }
    }
    None
}

/// Longest prefix of `events` that some path from an initial state can
/// produce, skipping states that carry no action label. Exhaustive DFS over
/// (state, matched-count) pairs.
pub fn longest_trace_prefix(m: &KripkeStructure, events: &[String]) -> usize {
    let is_action = |s: usize| {
        m.labels(s)
            .iter()
            .any(|l| l.starts_with("action:") && !l.starts_with("action:branch:"))
    };
    let mut best = 0;
    let mut seen = std::collections::BTreeSet::new();
    let mut stack: Vec<(usize, usize)> = m.initial().iter().map(|&s| (s, 0)).collect();
    while let Some((s, k)) = stack.pop() {
        if !seen.insert((s, k)) {
            continue;
        }
        let k = if is_action(s) {
            if k < events.len() && m.has_label(s, &format!("action:{}", events[k])) {
                k + 1
            } else {
                continue;
            }
        } else {
            k
        };
        best = best.max(k);
        if k == events.len() {
            continue;
        }
        for &t in m.successors(s) {
            stack.push((t, k));
        }
    }
    best
}

/// Every sequence over `alphabet` of length `1..=max_len`.
pub fn all_sequences(alphabet: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &layer {
            for a in alphabet {
                let mut s = prefix.clone();
                s.push(a.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_glob() {
        assert!(glob_dp("*", ""));
        assert!(glob_dp("a*c", "abbc"));
        assert!(!glob_dp("a*c", "abcd"));
        assert!(glob_dp("**", "x"));
        assert!(!glob_dp("", "x"));
    }

    #[test]
    fn sequences() {
        let ab = vec!["a".to_string(), "b".to_string()];
        assert_eq!(all_sequences(&ab, 3).len(), 2 + 4 + 8);
    }
}
