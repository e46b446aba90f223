use serde::Serialize;

use super::ast::*;

/// Per-node callbacks for a program walk. Default methods do nothing.
pub trait Visitor {
    fn visit_type(&mut self, _decl: &TypeDecl) {}
    fn visit_method(&mut self, _owner: &TypeDecl, _method: &MethodDecl) {}
    fn visit_aspect(&mut self, _decl: &AspectDecl) {}
    fn visit_pointcut(&mut self, _aspect: &AspectDecl, _pointcut: &PointcutDecl) {}
    fn visit_advice(&mut self, _aspect: &AspectDecl, _advice: &AdviceDecl) {}
    fn visit_stmt(&mut self, _stmt: &Stmt) {}
}

/// Walks declarations in source order, descending into statement bodies.
pub fn walk_program<V: Visitor + ?Sized>(v: &mut V, program: &Program) {
    for decl in &program.declarations {
        match decl {
            Decl::Type(t) => {
                v.visit_type(t);
                for m in &t.methods {
                    v.visit_method(t, m);
                    walk_stmts(v, &m.body);
                }
            }
            Decl::Aspect(a) => {
                v.visit_aspect(a);
                for p in &a.pointcuts {
                    v.visit_pointcut(a, p);
                }
                for adv in &a.advice {
                    v.visit_advice(a, adv);
                    walk_stmts(v, &adv.body);
                }
            }
        }
    }
}

pub fn walk_stmts<V: Visitor + ?Sized>(v: &mut V, stmts: &[Stmt]) {
    for s in stmts {
        v.visit_stmt(s);
        match s {
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                walk_stmts(v, then_branch);
                if let Some(e) = else_branch {
                    walk_stmts(v, e);
                }
            }
            Stmt::While { body, .. } => walk_stmts(v, body),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AspectInfo {
    pub name: String,
    pub pointcuts: usize,
    pub before: usize,
    pub after: usize,
    pub around: usize,
}

impl AspectInfo {
    pub fn advice_total(&self) -> usize {
        self.before + self.after + self.around
    }
}

#[derive(Default)]
struct AspectInfoCollector {
    infos: Vec<AspectInfo>,
}

impl Visitor for AspectInfoCollector {
    fn visit_aspect(&mut self, decl: &AspectDecl) {
        self.infos.push(AspectInfo {
            name: decl.name.clone(),
            pointcuts: 0,
            before: 0,
            after: 0,
            around: 0,
        });
    }

    fn visit_pointcut(&mut self, _aspect: &AspectDecl, _pointcut: &PointcutDecl) {
        if let Some(info) = self.infos.last_mut() {
            info.pointcuts += 1;
        }
    }

    fn visit_advice(&mut self, _aspect: &AspectDecl, advice: &AdviceDecl) {
        if let Some(info) = self.infos.last_mut() {
            match advice.kind {
                AdviceKind::Before => info.before += 1,
                AdviceKind::After => info.after += 1,
                AdviceKind::Around => info.around += 1,
            }
        }
    }
}

/// One record per aspect, in declaration order.
pub fn collect_aspect_info(program: &Program) -> Vec<AspectInfo> {
    let mut collector = AspectInfoCollector::default();
    walk_program(&mut collector, program);
    collector.infos
}
