use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Renders a program in canonical form. Declarations are separated by a blank
/// line and the precedence directive, if any, comes last.
pub fn pretty_print(program: &Program) -> String {
    let mut blocks = Vec::new();
    for decl in &program.declarations {
        let mut out = String::new();
        match decl {
            Decl::Type(t) => type_decl(&mut out, t),
            Decl::Aspect(a) => aspect_decl(&mut out, a),
        }
        blocks.push(out);
    }
    if let Some(prec) = &program.precedence {
        blocks.push(format!("precedence {};\n", prec.join(", ")));
    }
    blocks.join("\n")
}

fn type_decl(out: &mut String, t: &TypeDecl) {
    if t.methods.is_empty() {
        let _ = writeln!(out, "class {} {{}}", t.name);
        return;
    }
    let _ = writeln!(out, "class {} {{", t.name);
    for (i, m) in t.methods.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for a in &m.annotations {
            let _ = writeln!(out, "{INDENT}@prop({a})");
        }
        let _ = write!(out, "{INDENT}{}(", m.name);
        if m.arity > 0 {
            let _ = write!(out, "{}", m.arity);
        }
        out.push_str(") ");
        block(out, &m.body, 1);
        out.push('\n');
    }
    out.push_str("}\n");
}

fn aspect_decl(out: &mut String, a: &AspectDecl) {
    if a.pointcuts.is_empty() && a.advice.is_empty() {
        let _ = writeln!(out, "aspect {} {{}}", a.name);
        return;
    }
    let _ = writeln!(out, "aspect {} {{", a.name);
    for p in &a.pointcuts {
        let _ = writeln!(out, "{INDENT}pointcut {}(): call({});", p.name, p.pattern);
    }
    for adv in &a.advice {
        let _ = write!(out, "{INDENT}{}(): ", adv.kind);
        match &adv.target {
            AdviceTarget::Named(n) => {
                let _ = write!(out, "{n}()");
            }
            AdviceTarget::Inline(p) => {
                let _ = write!(out, "call({p})");
            }
        }
        out.push(' ');
        block(out, &adv.body, 1);
        out.push('\n');
    }
    out.push_str("}\n");
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    if stmts.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for s in stmts {
        stmt(out, s, depth + 1);
    }
    out.push_str(&INDENT.repeat(depth));
    out.push('}');
}

fn cond(c: &Cond) -> String {
    match c {
        Cond::Call(call) => call.to_string(),
        Cond::Label(l) => l.clone(),
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    out.push_str(&pad);
    match s {
        Stmt::Call(c) => {
            let _ = write!(out, "{c};");
        }
        Stmt::If {
            cond: c,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "if ({}) ", cond(c));
            block(out, then_branch, depth);
            if let Some(e) = else_branch {
                out.push_str(" else ");
                block(out, e, depth);
            }
        }
        Stmt::While { cond: c, body } => {
            let _ = write!(out, "while ({}) ", cond(c));
            block(out, body, depth);
        }
        Stmt::Throw(e) => {
            let _ = write!(out, "throw {e};");
        }
        Stmt::Return => out.push_str("return;"),
        Stmt::Atomic(l) => {
            let _ = write!(out, "atomic {l};");
        }
        Stmt::Proceed => out.push_str("proceed();"),
    }
    out.push('\n');
}
