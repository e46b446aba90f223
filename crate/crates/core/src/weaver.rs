//! Static weaving: call join points, pointcut matching and advice bindings.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use crate::frontend::{AdviceKind, AritySpec, CallPattern};
use crate::frontend::{Call, Cond, Decl, Program, Stmt, BODY_CHILD, COND_CHILD, ELSE_CHILD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeaveError {
    #[error("precedence names undeclared aspect `{0}`")]
    Precedence(String),
    #[error("alias names `{0}`, which is neither an aspect nor a class")]
    Alias(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub receiver: String,
    pub method: String,
    pub arity: u32,
}

impl From<&Call> for Signature {
    fn from(c: &Call) -> Self {
        Signature {
            receiver: c.receiver.clone(),
            method: c.method.clone(),
            arity: c.args,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}/{}", self.receiver, self.method, self.arity)
    }
}

/// Code unit that contains a join point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Method { type_name: String, method: String },
    Advice { aspect: String, ordinal: usize },
}

impl Owner {
    pub fn aspect(&self) -> Option<&str> {
        match self {
            Owner::Advice { aspect, .. } => Some(aspect),
            Owner::Method { .. } => None,
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Method { type_name, method } => write!(f, "{type_name}.{method}"),
            Owner::Advice { aspect, ordinal } => write!(f, "{aspect}.advice#{ordinal}"),
        }
    }
}

impl Serialize for Owner {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A call site. `path` indexes statements within blocks; inside `if`/`while`
/// the child indices are [`COND_CHILD`], [`BODY_CHILD`] and [`ELSE_CHILD`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct JoinPoint {
    pub owner: Owner,
    /// Position of the owner in declaration order, used for sorting.
    #[serde(skip)]
    pub owner_index: (usize, usize),
    pub path: Vec<usize>,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdviceBinding {
    pub joinpoint: JoinPoint,
    pub aspect: String,
    pub ordinal: usize,
    pub kind: AdviceKind,
    pub rank: usize,
}

impl Serialize for AdviceKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WovenProgram {
    pub program: Program,
    pub bindings: Vec<AdviceBinding>,
}

impl WovenProgram {
    /// Bindings at one join point, in precedence order.
    pub fn bindings_at<'a>(
        &'a self,
        owner: &'a Owner,
        path: &'a [usize],
    ) -> impl Iterator<Item = &'a AdviceBinding> + 'a {
        self.bindings
            .iter()
            .filter(move |b| &b.joinpoint.owner == owner && b.joinpoint.path == path)
    }

    pub fn is_woven(&self, aspect: &str) -> bool {
        self.bindings.iter().any(|b| b.aspect == aspect)
    }
}

/// Anchored glob match where `*` stands for zero or more characters.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if pi < p.len() && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if let Some((sp, st)) = star {
            // let the last star absorb one more character
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

/// Whether `pattern` selects a call with signature `sig`.
pub fn matches(pattern: &CallPattern, sig: &Signature) -> bool {
    let arity_ok = match pattern.arity {
        AritySpec::Any => true,
        AritySpec::Exact(n) => n == sig.arity,
    };
    arity_ok && glob_match(&pattern.receiver, &sig.receiver) && glob_match(&pattern.method, &sig.method)
}

fn collect_calls(stmts: &[Stmt], prefix: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Signature)>) {
    for (i, s) in stmts.iter().enumerate() {
        prefix.push(i);
        match s {
            Stmt::Call(c) => out.push((prefix.clone(), c.into())),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if let Cond::Call(c) = cond {
                    prefix.push(COND_CHILD);
                    out.push((prefix.clone(), c.into()));
                    prefix.pop();
                }
                prefix.push(BODY_CHILD);
                collect_calls(then_branch, prefix, out);
                prefix.pop();
                if let Some(e) = else_branch {
                    prefix.push(ELSE_CHILD);
                    collect_calls(e, prefix, out);
                    prefix.pop();
                }
            }
            Stmt::While { cond, body } => {
                if let Cond::Call(c) = cond {
                    prefix.push(COND_CHILD);
                    out.push((prefix.clone(), c.into()));
                    prefix.pop();
                }
                prefix.push(BODY_CHILD);
                collect_calls(body, prefix, out);
                prefix.pop();
            }
            _ => {}
        }
        prefix.pop();
    }
}

/// Every call site (statements and conditions) in method and advice bodies,
/// in declaration order and statement preorder.
pub fn enumerate_join_points(program: &Program) -> Vec<JoinPoint> {
    let mut out = Vec::new();
    for (di, decl) in program.declarations.iter().enumerate() {
        let bodies: Vec<(Owner, &[Stmt])> = match decl {
            Decl::Type(t) => t
                .methods
                .iter()
                .map(|m| {
                    let owner = Owner::Method {
                        type_name: t.name.clone(),
                        method: m.name.clone(),
                    };
                    (owner, m.body.as_slice())
                })
                .collect(),
            Decl::Aspect(a) => a
                .advice
                .iter()
                .enumerate()
                .map(|(i, adv)| {
                    let owner = Owner::Advice {
                        aspect: a.name.clone(),
                        ordinal: i,
                    };
                    (owner, adv.body.as_slice())
                })
                .collect(),
        };
        for (mi, (owner, body)) in bodies.into_iter().enumerate() {
            let mut calls = Vec::new();
            collect_calls(body, &mut Vec::new(), &mut calls);
            out.extend(calls.into_iter().map(|(path, signature)| JoinPoint {
                owner: owner.clone(),
                owner_index: (di, mi),
                path,
                signature,
            }));
        }
    }
    out
}

/// Precedence rank per aspect: listed aspects first in directive order, then
/// the rest in declaration order.
pub fn precedence_ranks(program: &Program) -> Result<HashMap<String, usize>, WeaveError> {
    let mut ranks = HashMap::new();
    if let Some(prec) = &program.precedence {
        for name in prec {
            if program.aspect(name).is_none() {
                return Err(WeaveError::Precedence(name.clone()));
            }
            let next = ranks.len();
            ranks.entry(name.clone()).or_insert(next);
        }
    }
    for a in program.aspects() {
        let next = ranks.len();
        ranks.entry(a.name.clone()).or_insert(next);
    }
    Ok(ranks)
}

fn binding_order(a: &AdviceBinding, b: &AdviceBinding) -> Ordering {
    (a.joinpoint.owner_index, &a.joinpoint.path, a.rank, a.ordinal).cmp(&(
        b.joinpoint.owner_index,
        &b.joinpoint.path,
        b.rank,
        b.ordinal,
    ))
}

/// Binds every advice to every join point its pattern selects. An aspect
/// never advises join points inside its own advice.
pub fn weave(program: &Program) -> Result<WovenProgram, WeaveError> {
    let ranks = precedence_ranks(program)?;
    let join_points = enumerate_join_points(program);
    let mut bindings = Vec::new();
    for jp in &join_points {
        for aspect in program.aspects() {
            if jp.owner.aspect() == Some(aspect.name.as_str()) {
                continue;
            }
            for (ordinal, adv) in aspect.advice.iter().enumerate() {
                let Some(pattern) = aspect.pattern_of(adv) else {
                    continue;
                };
                if matches(pattern, &jp.signature) {
                    bindings.push(AdviceBinding {
                        joinpoint: jp.clone(),
                        aspect: aspect.name.clone(),
                        ordinal,
                        kind: adv.kind,
                        rank: ranks[&aspect.name],
                    });
                }
            }
        }
    }
    bindings.sort_by(binding_order);
    Ok(WovenProgram {
        program: program.clone(),
        bindings,
    })
}

/// Truth value of each concern in a woven system.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct ConcernValuation(pub BTreeMap<String, bool>);

impl ConcernValuation {
    pub fn get(&self, id: &str) -> Option<bool> {
        self.0.get(id).copied()
    }
}

pub const CORE_CONCERN: &str = "P";

/// Concern presence: an aspect counts when it is bound at least once; the core
/// concern counts when some class declares a method. Aliases may also name a
/// class, which then counts when it declares a method.
pub fn presence_valuation(
    woven: &WovenProgram,
    aliases: &BTreeMap<String, String>,
) -> Result<ConcernValuation, WeaveError> {
    let program = &woven.program;
    for name in aliases.keys() {
        if program.aspect(name).is_none() && program.type_decl(name).is_none() {
            return Err(WeaveError::Alias(name.clone()));
        }
    }
    let mut values = BTreeMap::new();
    let core = program.types().any(|t| !t.methods.is_empty());
    values.insert(CORE_CONCERN.to_string(), core);
    for a in program.aspects() {
        let key = aliases.get(&a.name).unwrap_or(&a.name).clone();
        let present = woven.is_woven(&a.name);
        let slot = values.entry(key).or_insert(false);
        *slot = *slot || present;
    }
    for t in program.types() {
        if let Some(key) = aliases.get(&t.name) {
            let slot = values.entry(key.clone()).or_insert(false);
            *slot = *slot || !t.methods.is_empty();
        }
    }
    Ok(ConcernValuation(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, pretty_print};

    fn sig(r: &str, m: &str, n: u32) -> Signature {
        Signature {
            receiver: r.into(),
            method: m.into(),
            arity: n,
        }
    }

    fn pat(r: &str, m: &str, arity: AritySpec) -> CallPattern {
        CallPattern {
            receiver: r.into(),
            method: m.into(),
            arity,
        }
    }

    #[test]
    fn glob_basics() {
        assert!(glob_match("*", ""));
        assert!(glob_match("get*", "getMedicalHistory"));
        assert!(glob_match("*History", "getMedicalHistory"));
        assert!(glob_match("g*t*y", "getMedicalHistory"));
        assert!(!glob_match("get", "getX"));
        assert!(!glob_match("x*", "y"));
        assert!(glob_match("a*b*c", "aXbYbc"));
        assert!(!glob_match("a*b*c", "aXbYbd"));
    }

    #[test]
    fn figure_patterns() {
        let target = sig("PatientData", "getMedicalHistory", 1);
        assert!(matches(&pat("PatientData", "*", AritySpec::Any), &target));
        assert!(matches(&pat("PatientData", "get*", AritySpec::Any), &target));
        assert!(!matches(&pat("Foo", "bar", AritySpec::Exact(0)), &sig("Baz", "bar", 0)));
        assert!(!matches(&pat("PatientData", "*", AritySpec::Exact(0)), &target));
    }

    #[test]
    fn join_points_include_conditions_and_advice() {
        let p = parse(
            "class T { m() { X.a(1); if (Y.ok()) { Z.b(); } } }
             aspect A { before(): call(* Q.*(..)) { W.c(); } }",
        )
        .unwrap();
        let jps = enumerate_join_points(&p);
        let listed: Vec<(String, Vec<usize>)> =
            jps.iter().map(|j| (j.owner.to_string(), j.path.clone())).collect();
        assert_eq!(
            listed,
            vec![
                ("T.m".to_string(), vec![0]),
                ("T.m".to_string(), vec![1, COND_CHILD]),
                ("T.m".to_string(), vec![1, BODY_CHILD, 0]),
                ("A.advice#0".to_string(), vec![0]),
            ]
        );
        assert!(enumerate_join_points(&parse("class T { m() { atomic a; } }").unwrap()).is_empty());
    }

    #[test]
    fn declaration_order_without_precedence() {
        let p = parse(
            "class T { m() { S.go(); } }
             aspect X { before(): call(* S.*(..)) { atomic x; } }
             aspect Y { before(): call(* S.*(..)) { atomic y; } }",
        )
        .unwrap();
        let w = weave(&p).unwrap();
        let order: Vec<&str> = w.bindings.iter().map(|b| b.aspect.as_str()).collect();
        assert_eq!(order, ["X", "Y"]);
    }

    #[test]
    fn precedence_directive_reorders() {
        let p = parse(
            "class T { m() { S.go(); } }
             aspect X { before(): call(* S.*(..)) { atomic x; } }
             aspect Y { before(): call(* S.*(..)) { atomic y; } }
             precedence Y;",
        )
        .unwrap();
        let w = weave(&p).unwrap();
        let order: Vec<&str> = w.bindings.iter().map(|b| b.aspect.as_str()).collect();
        assert_eq!(order, ["Y", "X"]);
        assert_eq!(w.bindings[0].rank, 0);
    }

    #[test]
    fn precedence_error_on_constructed_program() {
        let mut p = parse("aspect X { }").unwrap();
        p.precedence = Some(vec!["Nope".into()]);
        assert_eq!(weave(&p).unwrap_err(), WeaveError::Precedence("Nope".into()));
    }

    #[test]
    fn no_self_advice() {
        let p = parse(
            "aspect X { before(): call(* S.*(..)) { S.again(); } }
             aspect Y { after(): call(* S.*(..)) { atomic y; } }",
        )
        .unwrap();
        let w = weave(&p).unwrap();
        assert_eq!(w.bindings.len(), 1);
        assert_eq!(w.bindings[0].aspect, "Y");
        assert_eq!(w.bindings[0].joinpoint.owner.to_string(), "X.advice#0");
    }

    #[test]
    fn aspect_free_and_oblivious() {
        let p = parse("class T { m() { S.go(); } }").unwrap();
        let w = weave(&p).unwrap();
        assert!(w.bindings.is_empty());
        assert_eq!(pretty_print(&w.program), pretty_print(&p));
    }

    #[test]
    fn presence_means_woven() {
        let p = parse(
            "class T { m() { S.go(); } }
             aspect Used { before(): call(* S.*(..)) {} }
             aspect Idle { before(): call(* Nothing.*(..)) {} }",
        )
        .unwrap();
        let w = weave(&p).unwrap();
        let aliases = BTreeMap::from([("Used".to_string(), "U".to_string())]);
        let v = presence_valuation(&w, &aliases).unwrap();
        assert_eq!(v.get("P"), Some(true));
        assert_eq!(v.get("U"), Some(true));
        assert_eq!(v.get("Idle"), Some(false));
        assert_eq!(v.get("Used"), None);

        let bad = BTreeMap::from([("Ghost".to_string(), "G".to_string())]);
        assert_eq!(presence_valuation(&w, &bad), Err(WeaveError::Alias("Ghost".into())));
    }
}
