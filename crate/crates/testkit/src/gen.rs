use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use osm_core::frontend::{
    AdviceDecl, AdviceKind, AdviceTarget, AritySpec, AspectDecl, Call, CallPattern, Cond, Decl, MethodDecl,
    PointcutDecl, Pos, Program, Stmt, TypeDecl,
};
use osm_core::kripke::{KripkeStructure, StateId};
use osm_core::logic::CtlFormula;

const METHODS: &[&str] = &["get", "getData", "put", "run", "save", "load-all", "fetch"];
const EXTERNAL: &[&str] = &["Db", "Log", "Net"];
const LABELS: &[&str] = &["a0", "a1", "log-start", "check"];
const CONDS: &[&str] = &["ok", "more", "valid"];

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_classes: usize,
    pub max_methods: usize,
    pub max_aspects: usize,
    /// Total budget of call statements and condition calls.
    pub max_calls: usize,
    /// Emit `throw`/`return` statements.
    pub jumps: bool,
    /// Advice bodies may call in-program methods.
    pub advice_calls_classes: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_classes: 3,
            max_methods: 3,
            max_aspects: 4,
            max_calls: 10,
            jumps: true,
            advice_calls_classes: true,
        }
    }
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    cfg: GenConfig,
    calls_left: usize,
    /// (class name, method names)
    classes: Vec<(String, Vec<String>)>,
}

impl<R: Rng> Gen<'_, R> {
    fn call(&mut self, min_class: usize, in_advice: bool) -> Call {
        self.calls_left -= 1;
        let internal = self.rng.gen_bool(0.5) && (!in_advice || self.cfg.advice_calls_classes);
        let candidates: Vec<usize> = if in_advice { 0..self.classes.len() } else { min_class..self.classes.len() }
            .filter(|&i| !self.classes[i].1.is_empty())
            .collect();
        if internal && !candidates.is_empty() {
            let (c, ms) = &self.classes[*candidates.choose(self.rng).unwrap()];
            return Call {
                receiver: c.clone(),
                method: ms.choose(self.rng).unwrap().clone(),
                args: self.rng.gen_range(0..=2),
            };
        }
        Call {
            receiver: EXTERNAL.choose(self.rng).unwrap().to_string(),
            method: METHODS.choose(self.rng).unwrap().to_string(),
            args: self.rng.gen_range(0..=2),
        }
    }

    fn cond(&mut self, min_class: usize, in_advice: bool) -> Cond {
        if self.calls_left > 0 && self.rng.gen_bool(0.5) {
            Cond::Call(self.call(min_class, in_advice))
        } else {
            Cond::Label(CONDS.choose(self.rng).unwrap().to_string())
        }
    }

    /// `proceed` is placed at most once, when `proceed` is set.
    fn block(&mut self, depth: usize, min_class: usize, in_advice: bool, proceed: &mut bool) -> Vec<Stmt> {
        let n = self.rng.gen_range(0..=3);
        let mut out = Vec::new();
        for _ in 0..n {
            let roll = self.rng.gen_range(0..10);
            let s = match roll {
                0..=3 if self.calls_left > 0 => Stmt::Call(self.call(min_class, in_advice)),
                4 if depth < 2 => {
                    let cond = self.cond(min_class, in_advice);
                    let then_branch = self.block(depth + 1, min_class, in_advice, proceed);
                    let else_branch = if self.rng.gen_bool(0.5) {
                        Some(self.block(depth + 1, min_class, in_advice, proceed))
                    } else {
                        None
                    };
                    Stmt::If {
                        cond,
                        then_branch,
                        else_branch,
                    }
                }
                5 if depth < 2 => {
                    let cond = self.cond(min_class, in_advice);
                    let body = self.block(depth + 1, min_class, in_advice, proceed);
                    Stmt::While { cond, body }
                }
                6 if self.cfg.jumps => Stmt::Throw("Failure".to_string()),
                7 if self.cfg.jumps => Stmt::Return,
                8 if *proceed => {
                    *proceed = false;
                    Stmt::Proceed
                }
                _ => Stmt::Atomic(LABELS.choose(self.rng).unwrap().to_string()),
            };
            out.push(s);
        }
        out
    }

    fn glob(&mut self, exact: &str) -> String {
        match self.rng.gen_range(0..5) {
            0 => "*".to_string(),
            1 => format!("{}*", &exact[..1]),
            2 => format!("*{}", &exact[exact.len() - 1..]),
            _ => exact.to_string(),
        }
    }

    fn pattern(&mut self) -> CallPattern {
        let mut receivers: Vec<String> = self.classes.iter().map(|c| c.0.clone()).collect();
        receivers.extend(EXTERNAL.iter().map(|s| s.to_string()));
        let r = receivers.choose(self.rng).unwrap().clone();
        let m = METHODS.choose(self.rng).unwrap().to_string();
        CallPattern {
            receiver: self.glob(&r),
            method: self.glob(&m),
            arity: if self.rng.gen_bool(0.6) {
                AritySpec::Any
            } else {
                AritySpec::Exact(self.rng.gen_range(0..=2))
            },
        }
    }
}

pub fn random_program<R: Rng>(rng: &mut R, cfg: GenConfig) -> Program {
    let n_classes = rng.gen_range(1..=cfg.max_classes);
    let classes: Vec<(String, Vec<String>)> = (0..n_classes)
        .map(|i| {
            let k = rng.gen_range(0..=cfg.max_methods);
            let mut names: Vec<String> = METHODS.iter().map(|s| s.to_string()).collect();
            names.shuffle(rng);
            names.truncate(k);
            (format!("C{i}"), names)
        })
        .collect();
    let mut g = Gen {
        rng,
        cfg,
        calls_left: cfg.max_calls,
        classes,
    };
    let mut declarations = Vec::new();
    for i in 0..g.classes.len() {
        let (name, methods) = g.classes[i].clone();
        let methods = methods
            .into_iter()
            .map(|m| {
                let mut annotations = BTreeSet::new();
                if g.rng.gen_bool(0.2) {
                    annotations.insert("sensitive".to_string());
                }
                MethodDecl {
                    name: m,
                    arity: g.rng.gen_range(0..=2),
                    annotations,
                    // callees have a higher class index, so method calls never recurse
                    body: g.block(0, i + 1, false, &mut false),
                    pos: Pos::default(),
                }
            })
            .collect();
        declarations.push(Decl::Type(TypeDecl {
            name,
            methods,
            pos: Pos::default(),
        }));
    }
    let n_aspects = g.rng.gen_range(0..=cfg.max_aspects);
    let mut aspect_names = Vec::new();
    for i in 0..n_aspects {
        let name = format!("X{i}");
        let pointcuts: Vec<PointcutDecl> = (0..g.rng.gen_range(0..=2))
            .map(|k| PointcutDecl {
                name: format!("p{k}"),
                pattern: g.pattern(),
                pos: Pos::default(),
            })
            .collect();
        let advice = (0..g.rng.gen_range(1..=3))
            .map(|_| {
                let kind = *[AdviceKind::Before, AdviceKind::After, AdviceKind::Around]
                    .choose(g.rng)
                    .unwrap();
                let target = if !pointcuts.is_empty() && g.rng.gen_bool(0.7) {
                    AdviceTarget::Named(pointcuts.choose(g.rng).unwrap().name.clone())
                } else {
                    AdviceTarget::Inline(g.pattern())
                };
                let mut proceed = kind == AdviceKind::Around && g.rng.gen_bool(0.85);
                let mut body = g.block(0, 0, true, &mut proceed);
                if proceed {
                    let at = g.rng.gen_range(0..=body.len());
                    body.insert(at, Stmt::Proceed);
                }
                AdviceDecl {
                    kind,
                    target,
                    body,
                    pos: Pos::default(),
                }
            })
            .collect();
        aspect_names.push(name.clone());
        declarations.push(Decl::Aspect(AspectDecl {
            name,
            pointcuts,
            advice,
            pos: Pos::default(),
        }));
    }
    let precedence = if !aspect_names.is_empty() && g.rng.gen_bool(0.5) {
        aspect_names.shuffle(g.rng);
        let k = g.rng.gen_range(1..=aspect_names.len());
        Some(aspect_names[..k].to_vec())
    } else {
        None
    };
    Program {
        declarations,
        precedence,
    }
}

/// Total model with `1..=max_states` states labelled from `atoms`.
pub fn random_kripke<R: Rng>(rng: &mut R, max_states: usize, atoms: &[&str]) -> KripkeStructure {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n).map(|i| {
        let labels: BTreeSet<String> = atoms.iter().filter(|_| rng.gen_bool(0.4)).map(|a| a.to_string()).collect();
        (i as StateId, labels)
    });
    let states: Vec<_> = states.collect();
    let mut transitions = Vec::new();
    for s in 0..n {
        let k = rng.gen_range(1..=3.min(n));
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(rng);
        for &t in &targets[..k] {
            transitions.push((s as StateId, t as StateId));
        }
    }
    let mut initial: Vec<StateId> = (0..n as StateId).filter(|_| rng.gen_bool(0.3)).collect();
    if initial.is_empty() {
        initial.push(rng.gen_range(0..n) as StateId);
    }
    KripkeStructure::new(states, &initial, transitions).expect("generated model is valid")
}

pub fn random_ctl<R: Rng>(rng: &mut R, depth: usize, atoms: &[&str]) -> CtlFormula {
    use CtlFormula::*;
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => True,
            1 => False,
            _ => Atom(atoms.choose(rng).unwrap().to_string()),
        };
    }
    let sub = |rng: &mut R| Box::new(random_ctl(rng, depth - 1, atoms));
    match rng.gen_range(0..13) {
        0 => Not(sub(rng)),
        1 => And(sub(rng), sub(rng)),
        2 => Or(sub(rng), sub(rng)),
        3 => Implies(sub(rng), sub(rng)),
        4 => Iff(sub(rng), sub(rng)),
        5 => EX(sub(rng)),
        6 => AX(sub(rng)),
        7 => EF(sub(rng)),
        8 => AF(sub(rng)),
        9 => EG(sub(rng)),
        10 => AG(sub(rng)),
        11 => EU(sub(rng), sub(rng)),
        _ => AU(sub(rng), sub(rng)),
    }
}
