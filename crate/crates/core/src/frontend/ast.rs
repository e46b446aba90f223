use std::collections::BTreeSet;
use std::fmt;

/// Source position of a declaration. Positions are diagnostic only and never
/// take part in structural equality.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub declarations: Vec<Decl>,
    pub precedence: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Type(TypeDecl),
    Aspect(AspectDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Type(t) => &t.name,
            Decl::Aspect(a) => &a.name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Decl::Type(t) => t.pos,
            Decl::Aspect(a) => a.pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub methods: Vec<MethodDecl>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub arity: u32,
    pub annotations: BTreeSet<String>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Call {
    pub receiver: String,
    pub method: String,
    pub args: u32,
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}(", self.receiver, self.method)?;
        if self.args > 0 {
            write!(f, "{}", self.args)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Call(Call),
    Label(String),
}

impl Cond {
    /// Text used to label the branch on this condition.
    pub fn label(&self) -> &str {
        match self {
            Cond::Call(c) => &c.method,
            Cond::Label(l) => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Call(Call),
    If {
        cond: Cond,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
    },
    While {
        cond: Cond,
        body: Vec<Stmt>,
    },
    Throw(String),
    Return,
    Atomic(String),
    Proceed,
}

/// Child index of an `if`/`while` condition within a statement path.
pub const COND_CHILD: usize = 0;
/// Child index of the `then` block (or loop body).
pub const BODY_CHILD: usize = 1;
/// Child index of the `else` block.
pub const ELSE_CHILD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdviceKind {
    Before,
    After,
    Around,
}

impl AdviceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdviceKind::Before => "before",
            AdviceKind::After => "after",
            AdviceKind::Around => "around",
        }
    }
}

impl fmt::Display for AdviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AritySpec {
    Any,
    Exact(u32),
}

/// A `call(...)` pointcut pattern. Globs use `*` as a zero-or-more wildcard.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CallPattern {
    pub receiver: String,
    pub method: String,
    pub arity: AritySpec,
}

impl fmt::Display for CallPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "* {}.{}(", self.receiver, self.method)?;
        match self.arity {
            AritySpec::Any => f.write_str("..")?,
            AritySpec::Exact(0) => {}
            AritySpec::Exact(n) => write!(f, "{n}")?,
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointcutDecl {
    pub name: String,
    pub pattern: CallPattern,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdviceTarget {
    Named(String),
    Inline(CallPattern),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdviceDecl {
    pub kind: AdviceKind,
    pub target: AdviceTarget,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectDecl {
    pub name: String,
    pub pointcuts: Vec<PointcutDecl>,
    pub advice: Vec<AdviceDecl>,
    pub pos: Pos,
}

impl AspectDecl {
    pub fn pointcut(&self, name: &str) -> Option<&PointcutDecl> {
        self.pointcuts.iter().find(|p| p.name == name)
    }

    /// Resolves an advice target to its pattern.
    pub fn pattern_of<'a>(&'a self, advice: &'a AdviceDecl) -> Option<&'a CallPattern> {
        match &advice.target {
            AdviceTarget::Named(n) => self.pointcut(n).map(|p| &p.pattern),
            AdviceTarget::Inline(p) => Some(p),
        }
    }
}

impl Program {
    pub fn types(&self) -> impl Iterator<Item = &TypeDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Decl::Type(t) => Some(t),
            Decl::Aspect(_) => None,
        })
    }

    pub fn aspects(&self) -> impl Iterator<Item = &AspectDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Decl::Aspect(a) => Some(a),
            Decl::Type(_) => None,
        })
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types().find(|t| t.name == name)
    }

    pub fn aspect(&self, name: &str) -> Option<&AspectDecl> {
        self.aspects().find(|a| a.name == name)
    }

    /// Looks up `Type.method`.
    pub fn method(&self, receiver: &str, method: &str) -> Option<&MethodDecl> {
        self.type_decl(receiver)?
            .methods
            .iter()
            .find(|m| m.name == method)
    }
}
