//! Per-method control-flow graphs with advice expanded at join points and
//! in-program callees inlined.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;
use std::rc::Rc;

use thiserror::Error;

use crate::frontend::{AdviceKind, Call, Cond, Stmt, BODY_CHILD, COND_CHILD, ELSE_CHILD};
use crate::weaver::{AdviceBinding, Owner, WovenProgram};

pub const DEFAULT_INLINE_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("recursive inlining: {}", .0.join(" -> "))]
    Recursion(Vec<String>),
    #[error("inline depth limit {limit} exceeded at `{at}`")]
    Depth { limit: usize, at: String },
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Entry,
    Exit,
    Error,
    Action,
    Branch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Base,
    Advice { aspect: String, kind: AdviceKind },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgNode {
    pub id: usize,
    pub kind: NodeKind,
    /// Executed call/atomic/throw label for actions, condition label for
    /// branches, empty otherwise.
    pub label: String,
    /// `Receiver.method` when the action is an external call.
    pub call: Option<String>,
    pub origin: Origin,
    /// `@prop` annotations of the enclosing method.
    pub props: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    Eps,
    Then,
    Else,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CfgEdge {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub method: String,
    /// Indexed by node id.
    pub nodes: Vec<CfgNode>,
    /// Sorted by `(from, to, guard)`.
    pub edges: Vec<CfgEdge>,
    pub entry: usize,
    pub exit: usize,
    pub error: Option<usize>,
}

impl Cfg {
    pub fn successors(&self, id: usize) -> impl Iterator<Item = &CfgEdge> + '_ {
        self.edges.iter().filter(move |e| e.from == id)
    }

    pub fn action_labels(&self) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Action)
            .map(|n| n.label.as_str())
    }
}

/// Open edges waiting for their target.
type Dangling = Vec<(usize, Guard)>;

#[derive(Clone)]
struct Ctx {
    owner: Owner,
    origin: Origin,
    props: Rc<BTreeSet<String>>,
    proceed: Option<Rc<Chain>>,
}

/// Remaining around-chain at one join point; `next == arounds.len()` means
/// the wrapped call itself.
struct Chain {
    call: Call,
    site: Ctx,
    arounds: Vec<AdviceBinding>,
    next: usize,
}

struct Builder<'a> {
    woven: &'a WovenProgram,
    index: HashMap<(&'a Owner, &'a [usize]), Vec<&'a AdviceBinding>>,
    limit: usize,
    nodes: Vec<CfgNode>,
    edges: Vec<CfgEdge>,
    exit: usize,
    error: Option<usize>,
    /// Frames being expanded (methods and advice), outermost first.
    stack: Vec<String>,
    /// Return edges collected per frame.
    returns: Vec<Dangling>,
}

impl<'a> Builder<'a> {
    fn add(&mut self, kind: NodeKind, label: String, call: Option<String>, ctx: Option<&Ctx>) -> usize {
        let id = self.nodes.len();
        let (origin, props) = match ctx {
            Some(c) if kind == NodeKind::Action => (c.origin.clone(), (*c.props).clone()),
            Some(c) => (c.origin.clone(), BTreeSet::new()),
            None => (Origin::Base, BTreeSet::new()),
        };
        self.nodes.push(CfgNode {
            id,
            kind,
            label,
            call,
            origin,
            props,
        });
        id
    }

    fn connect(&mut self, preds: &Dangling, to: usize) {
        for &(from, guard) in preds {
            self.edges.push(CfgEdge { from, to, guard });
        }
    }

    fn node(&mut self, preds: Dangling, kind: NodeKind, label: String, call: Option<String>, ctx: &Ctx) -> usize {
        let id = self.add(kind, label, call, Some(ctx));
        self.connect(&preds, id);
        id
    }

    fn error_node(&mut self) -> usize {
        match self.error {
            Some(e) => e,
            None => {
                let e = self.add(NodeKind::Error, String::new(), None, None);
                self.error = Some(e);
                e
            }
        }
    }

    fn enter(&mut self, frame: String) -> Result<(), CfgError> {
        if let Some(pos) = self.stack.iter().position(|f| *f == frame) {
            let mut cycle = self.stack[pos..].to_vec();
            cycle.push(frame);
            return Err(CfgError::Recursion(cycle));
        }
        // the root method does not count against the limit
        if self.stack.len() > self.limit {
            return Err(CfgError::Depth {
                limit: self.limit,
                at: frame,
            });
        }
        self.stack.push(frame);
        self.returns.push(Vec::new());
        Ok(())
    }

    fn leave(&mut self, mut exits: Dangling) -> Dangling {
        self.stack.pop();
        exits.extend(self.returns.pop().unwrap_or_default());
        exits
    }

    fn block(&mut self, stmts: &'a [Stmt], path: &mut Vec<usize>, ctx: &Ctx, mut preds: Dangling) -> Result<Dangling, CfgError> {
        for (i, s) in stmts.iter().enumerate() {
            path.push(i);
            preds = self.stmt(s, path, ctx, preds)?;
            path.pop();
        }
        Ok(preds)
    }

    fn stmt(&mut self, s: &'a Stmt, path: &mut Vec<usize>, ctx: &Ctx, preds: Dangling) -> Result<Dangling, CfgError> {
        match s {
            Stmt::Call(c) => self.join_point(c, path, ctx, preds),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let branch = self.condition(cond, path, ctx, preds)?;
                path.push(BODY_CHILD);
                let mut out = self.block(then_branch, path, ctx, vec![(branch, Guard::Then)])?;
                path.pop();
                match else_branch {
                    Some(e) => {
                        path.push(ELSE_CHILD);
                        out.extend(self.block(e, path, ctx, vec![(branch, Guard::Else)])?);
                        path.pop();
                    }
                    None => out.push((branch, Guard::Else)),
                }
                Ok(out)
            }
            Stmt::While { cond, body } => {
                // The condition is re-evaluated on every iteration. A placeholder
                // head finds the first node of the condition's expansion.
                let head = self.add(NodeKind::Action, String::new(), None, None);
                let branch = self.condition(cond, path, ctx, vec![(head, Guard::Eps)])?;
                path.push(BODY_CHILD);
                let back = self.block(body, path, ctx, vec![(branch, Guard::Then)])?;
                path.pop();
                let targets: Vec<usize> = self
                    .edges
                    .iter()
                    .filter(|e| e.from == head)
                    .map(|e| e.to)
                    .collect();
                self.edges.retain(|e| e.from != head);
                for t in targets {
                    self.connect(&preds, t);
                    self.connect(&back, t);
                }
                Ok(vec![(branch, Guard::Else)])
            }
            Stmt::Throw(exc) => {
                let id = self.node(preds, NodeKind::Action, format!("throw:{exc}"), None, ctx);
                let err = self.error_node();
                self.connect(&vec![(id, Guard::Eps)], err);
                Ok(Vec::new())
            }
            Stmt::Return => {
                if let Some(r) = self.returns.last_mut() {
                    r.extend(preds);
                }
                Ok(Vec::new())
            }
            Stmt::Atomic(label) => {
                let id = self.node(preds, NodeKind::Action, label.clone(), None, ctx);
                Ok(vec![(id, Guard::Eps)])
            }
            Stmt::Proceed => match ctx.proceed.clone() {
                Some(chain) => self.chain(&chain, preds),
                // proceed outside around advice is rejected by the parser
                None => Ok(preds),
            },
        }
    }

    /// Expands a condition and returns the branch node.
    fn condition(&mut self, cond: &'a Cond, path: &mut Vec<usize>, ctx: &Ctx, preds: Dangling) -> Result<usize, CfgError> {
        let preds = match cond {
            Cond::Call(c) => {
                path.push(COND_CHILD);
                let out = self.join_point(c, path, ctx, preds)?;
                path.pop();
                out
            }
            Cond::Label(_) => preds,
        };
        Ok(self.node(preds, NodeKind::Branch, cond.label().to_string(), None, ctx))
    }

    fn join_point(&mut self, call: &'a Call, path: &[usize], ctx: &Ctx, mut preds: Dangling) -> Result<Dangling, CfgError> {
        let bound: Vec<&AdviceBinding> = self
            .index
            .get(&(&ctx.owner, path))
            .cloned()
            .unwrap_or_default();
        for b in bound.iter().filter(|b| b.kind == AdviceKind::Before) {
            preds = self.advice(b, None, preds)?;
        }
        let chain = Rc::new(Chain {
            call: call.clone(),
            site: ctx.clone(),
            arounds: bound
                .iter()
                .filter(|b| b.kind == AdviceKind::Around)
                .map(|b| (*b).clone())
                .collect(),
            next: 0,
        });
        preds = self.chain(&chain, preds)?;
        for b in bound.iter().rev().filter(|b| b.kind == AdviceKind::After) {
            preds = self.advice(b, None, preds)?;
        }
        Ok(preds)
    }

    fn chain(&mut self, chain: &Rc<Chain>, preds: Dangling) -> Result<Dangling, CfgError> {
        if chain.next == chain.arounds.len() {
            return self.invoke(&chain.call, &chain.site, preds);
        }
        let inner = Rc::new(Chain {
            call: chain.call.clone(),
            site: chain.site.clone(),
            arounds: chain.arounds.clone(),
            next: chain.next + 1,
        });
        let binding = &chain.arounds[chain.next];
        self.advice(binding, Some(inner), preds)
    }

    fn advice(&mut self, b: &AdviceBinding, proceed: Option<Rc<Chain>>, preds: Dangling) -> Result<Dangling, CfgError> {
        let woven = self.woven;
        let Some(decl) = woven
            .program
            .aspect(&b.aspect)
            .and_then(|a| a.advice.get(b.ordinal))
        else {
            return Ok(preds);
        };
        let owner = Owner::Advice {
            aspect: b.aspect.clone(),
            ordinal: b.ordinal,
        };
        self.enter(owner.to_string())?;
        let ctx = Ctx {
            owner,
            origin: Origin::Advice {
                aspect: b.aspect.clone(),
                kind: b.kind,
            },
            props: Rc::new(BTreeSet::new()),
            proceed,
        };
        let out = self.block(&decl.body, &mut Vec::new(), &ctx, preds)?;
        Ok(self.leave(out))
    }

    fn invoke(&mut self, call: &Call, site: &Ctx, preds: Dangling) -> Result<Dangling, CfgError> {
        let woven = self.woven;
        match woven.program.method(&call.receiver, &call.method) {
            Some(m) => {
                let owner = Owner::Method {
                    type_name: call.receiver.clone(),
                    method: call.method.clone(),
                };
                self.enter(owner.to_string())?;
                let ctx = Ctx {
                    owner,
                    origin: site.origin.clone(),
                    props: Rc::new(m.annotations.clone()),
                    proceed: None,
                };
                let out = self.block(&m.body, &mut Vec::new(), &ctx, preds)?;
                Ok(self.leave(out))
            }
            None => {
                let id = self.node(
                    preds,
                    NodeKind::Action,
                    call.method.clone(),
                    Some(format!("{}.{}", call.receiver, call.method)),
                    site,
                );
                Ok(vec![(id, Guard::Eps)])
            }
        }
    }
}

/// Builds the woven control-flow graph of `Type.method`.
pub fn build_cfg(woven: &WovenProgram, method: &str, inline_depth: usize) -> Result<Cfg, CfgError> {
    let (type_name, method_name) = method
        .split_once('.')
        .ok_or_else(|| CfgError::UnknownMethod(method.to_string()))?;
    let decl = woven
        .program
        .method(type_name, method_name)
        .ok_or_else(|| CfgError::UnknownMethod(method.to_string()))?;

    let mut index: HashMap<(&Owner, &[usize]), Vec<&AdviceBinding>> = HashMap::new();
    for b in &woven.bindings {
        index
            .entry((&b.joinpoint.owner, b.joinpoint.path.as_slice()))
            .or_default()
            .push(b);
    }

    let mut builder = Builder {
        woven,
        index,
        limit: inline_depth,
        nodes: Vec::new(),
        edges: Vec::new(),
        exit: 0,
        error: None,
        stack: Vec::new(),
        returns: Vec::new(),
    };
    let entry = builder.add(NodeKind::Entry, String::new(), None, None);
    builder.exit = builder.add(NodeKind::Exit, String::new(), None, None);

    let owner = Owner::Method {
        type_name: type_name.to_string(),
        method: method_name.to_string(),
    };
    builder.enter(owner.to_string())?;
    let ctx = Ctx {
        owner,
        origin: Origin::Base,
        props: Rc::new(decl.annotations.clone()),
        proceed: None,
    };
    let out = builder.block(&decl.body, &mut Vec::new(), &ctx, vec![(entry, Guard::Eps)])?;
    let out = builder.leave(out);
    let exit = builder.exit;
    builder.connect(&out, exit);

    Ok(renumber(method, builder, entry))
}

/// Assigns ids in depth-first preorder from entry and drops unreachable nodes.
/// Exit is kept even when every path throws.
fn renumber(method: &str, b: Builder<'_>, entry: usize) -> Cfg {
    let mut edges: Vec<CfgEdge> = b.edges;
    edges.sort_by_key(|e| (e.from, e.guard, e.to));
    edges.dedup();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); b.nodes.len()];
    for e in &edges {
        out[e.from].push(e.to);
    }

    let mut new_id = vec![usize::MAX; b.nodes.len()];
    let mut order = Vec::new();
    let mut stack = vec![entry];
    while let Some(n) = stack.pop() {
        if new_id[n] != usize::MAX {
            continue;
        }
        new_id[n] = order.len();
        order.push(n);
        for &s in out[n].iter().rev() {
            if new_id[s] == usize::MAX {
                stack.push(s);
            }
        }
    }
    if new_id[b.exit] == usize::MAX {
        new_id[b.exit] = order.len();
        order.push(b.exit);
    }

    let nodes: Vec<CfgNode> = order
        .iter()
        .enumerate()
        .map(|(id, &old)| CfgNode {
            id,
            ..b.nodes[old].clone()
        })
        .collect();
    let mut edges: Vec<CfgEdge> = edges
        .into_iter()
        .filter(|e| new_id[e.from] != usize::MAX && new_id[e.to] != usize::MAX)
        .map(|e| CfgEdge {
            from: new_id[e.from],
            to: new_id[e.to],
            guard: e.guard,
        })
        .collect();
    edges.sort();
    Cfg {
        method: method.to_string(),
        nodes,
        edges,
        entry: new_id[entry],
        exit: new_id[b.exit],
        error: b.error.map(|e| new_id[e]).filter(|&e| e != usize::MAX),
    }
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; nodes by ascending id, edges in `(from, to, guard)` order.
pub fn to_dot(cfg: &Cfg) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(&cfg.method));
    for n in &cfg.nodes {
        let (label, shape) = match n.kind {
            NodeKind::Entry => ("entry".to_string(), "ellipse"),
            NodeKind::Exit => ("exit".to_string(), "ellipse"),
            NodeKind::Error => ("error".to_string(), "octagon"),
            NodeKind::Branch => (format!("branch:{}", n.label), "diamond"),
            NodeKind::Action => match &n.call {
                Some(c) => (format!("call:{c}"), "box"),
                None => (n.label.clone(), "box"),
            },
        };
        let _ = write!(out, "  n{} [label=\"{}\", shape={}", n.id, dot_escape(&label), shape);
        if let Origin::Advice { aspect, .. } = &n.origin {
            let _ = write!(out, ", group=\"{}\"", dot_escape(aspect));
        }
        out.push_str("];\n");
    }
    for e in &cfg.edges {
        let _ = write!(out, "  n{} -> n{}", e.from, e.to);
        match e.guard {
            Guard::Eps => {}
            Guard::Then => out.push_str(" [label=\"then\"]"),
            Guard::Else => out.push_str(" [label=\"else\"]"),
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;
    use crate::weaver::weave;

    fn cfg_of(src: &str, method: &str) -> Result<Cfg, CfgError> {
        let w = weave(&parse(src).unwrap()).unwrap();
        build_cfg(&w, method, DEFAULT_INLINE_DEPTH)
    }

    fn kinds(cfg: &Cfg) -> Vec<NodeKind> {
        cfg.nodes.iter().map(|n| n.kind).collect()
    }

    #[test]
    fn empty_method() {
        let cfg = cfg_of("class A { m() {} }", "A.m").unwrap();
        assert_eq!(kinds(&cfg), [NodeKind::Entry, NodeKind::Exit]);
        assert_eq!(cfg.edges, [CfgEdge { from: 0, to: 1, guard: Guard::Eps }]);
        assert_eq!(cfg.error, None);
    }

    #[test]
    fn while_loop_shape() {
        let cfg = cfg_of("class A { m() { while (c) { atomic a; } } }", "A.m").unwrap();
        // entry, branch c, action a, exit
        assert_eq!(
            kinds(&cfg),
            [NodeKind::Entry, NodeKind::Branch, NodeKind::Action, NodeKind::Exit]
        );
        assert_eq!(cfg.nodes[1].label, "c");
        assert_eq!(
            cfg.edges,
            [
                CfgEdge { from: 0, to: 1, guard: Guard::Eps },
                CfgEdge { from: 1, to: 2, guard: Guard::Then },
                CfgEdge { from: 1, to: 3, guard: Guard::Else },
                CfgEdge { from: 2, to: 1, guard: Guard::Eps },
            ]
        );
    }

    #[test]
    fn throw_reaches_error_and_return_reaches_exit() {
        let cfg = cfg_of(
            "class A { m() { if (c) { throw Boom; } else { return; } atomic dead; } }",
            "A.m",
        )
        .unwrap();
        let err = cfg.error.unwrap();
        assert!(cfg.edges.iter().any(|e| e.to == err));
        // the statement after if/else is unreachable and dropped
        assert!(cfg.action_labels().all(|l| l != "dead"));
        assert!(cfg.edges.iter().any(|e| e.from == 1 && e.to == cfg.exit && e.guard == Guard::Else));
    }

    #[test]
    fn external_and_inlined_calls() {
        let cfg = cfg_of(
            "class A { m() { B.n(); Ext.go(2); } }
             class B { @prop(secret) n() { atomic inner; } }",
            "A.m",
        )
        .unwrap();
        let labels: Vec<&str> = cfg.action_labels().collect();
        assert_eq!(labels, ["inner", "go"]);
        let inner = &cfg.nodes[1];
        assert!(inner.props.contains("secret"));
        assert_eq!(cfg.nodes[2].call.as_deref(), Some("Ext.go"));
    }

    #[test]
    fn recursion_is_rejected() {
        let err = cfg_of(
            "class A { m() { B.n(); } } class B { n() { A.m(); } }",
            "A.m",
        )
        .unwrap_err();
        assert_eq!(
            err,
            CfgError::Recursion(vec!["A.m".into(), "B.n".into(), "A.m".into()])
        );
    }

    #[test]
    fn depth_limit() {
        let src = "class A { a() { A.b(); } b() { A.c(); } c() { atomic x; } }";
        let w = weave(&parse(src).unwrap()).unwrap();
        assert!(build_cfg(&w, "A.a", 2).is_ok());
        assert!(matches!(build_cfg(&w, "A.a", 1), Err(CfgError::Depth { limit: 1, .. })));
    }

    #[test]
    fn unknown_method() {
        assert_eq!(
            cfg_of("class A { m() {} }", "A.zz").unwrap_err(),
            CfgError::UnknownMethod("A.zz".into())
        );
        assert!(matches!(cfg_of("", "nodot"), Err(CfgError::UnknownMethod(_))));
    }

    #[test]
    fn advice_ordering_at_join_point() {
        let cfg = cfg_of(
            "class A { m() { S.go(); } }
             aspect X { before(): call(* S.*(..)) { atomic xb; }
                        after(): call(* S.*(..)) { atomic xa; }
                        around(): call(* S.*(..)) { atomic xr1; proceed(); atomic xr2; } }
             aspect Y { before(): call(* S.*(..)) { atomic yb; }
                        after(): call(* S.*(..)) { atomic ya; }
                        around(): call(* S.*(..)) { atomic yr1; proceed(); atomic yr2; } }",
            "A.m",
        )
        .unwrap();
        let labels: Vec<&str> = cfg.action_labels().collect();
        assert_eq!(
            labels,
            ["xb", "yb", "xr1", "yr1", "go", "yr2", "xr2", "ya", "xa"]
        );
    }

    #[test]
    fn around_without_proceed_suppresses_call() {
        let cfg = cfg_of(
            "class A { m() { S.go(); } }
             aspect X { around(): call(* S.*(..)) { atomic instead; } }",
            "A.m",
        )
        .unwrap();
        let labels: Vec<&str> = cfg.action_labels().collect();
        assert_eq!(labels, ["instead"]);
        assert_eq!(
            cfg.nodes[1].origin,
            Origin::Advice { aspect: "X".into(), kind: AdviceKind::Around }
        );
    }

    #[test]
    fn return_in_advice_ends_the_advice() {
        let cfg = cfg_of(
            "class A { m() { S.go(); atomic after-call; } }
             aspect X { before(): call(* S.*(..)) { return; atomic skipped; } }",
            "A.m",
        )
        .unwrap();
        let labels: Vec<&str> = cfg.action_labels().collect();
        assert_eq!(labels, ["go", "after-call"]);
    }

    #[test]
    fn dot_rendering() {
        let cfg = cfg_of("class A { m() {} }", "A.m").unwrap();
        let dot = to_dot(&cfg);
        assert_eq!(
            dot,
            "digraph \"A.m\" {\n  n0 [label=\"entry\", shape=ellipse];\n  n1 [label=\"exit\", shape=ellipse];\n  n0 -> n1;\n}\n"
        );
        assert_eq!(dot, to_dot(&cfg));
    }
}
