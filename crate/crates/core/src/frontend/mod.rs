//! Lexing, parsing and pretty-printing of the `.osm` aspect language.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod visit;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use pretty::pretty_print;
pub use visit::{collect_aspect_info, AspectInfo, Visitor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: unexpected character `{ch}`")]
    Lex { line: usize, col: usize, ch: char },
    #[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{col}: duplicate name `{name}`")]
    DuplicateName { name: String, line: usize, col: usize },
    #[error("{line}:{col}: aspect `{aspect}` has no pointcut named `{name}`")]
    UnknownPointcut {
        aspect: String,
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: `proceed()` is only allowed in around advice")]
    MisplacedProceed { line: usize, col: usize },
    #[error("{line}:{col}: around advice may proceed at most once")]
    MultipleProceed { line: usize, col: usize },
    #[error("precedence lists aspect `{0}` more than once")]
    DuplicatePrecedence(String),
}

impl FrontendError {
    /// Source position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match *self {
            FrontendError::Lex { line, col, .. }
            | FrontendError::Parse { line, col, .. }
            | FrontendError::DuplicateName { line, col, .. }
            | FrontendError::UnknownPointcut { line, col, .. }
            | FrontendError::MisplacedProceed { line, col }
            | FrontendError::MultipleProceed { line, col } => Some((line, col)),
            _ => None,
        }
    }
}

/// Parses and validates one source text.
pub fn parse(source: &str) -> Result<Program, FrontendError> {
    let program = parser::parse_unchecked(source)?;
    program.validate()?;
    Ok(program)
}

/// Parses several sources as one program: declarations are concatenated in
/// the given order and precedence directives are joined.
/// Errors carry the index of the offending source, or `None` for
/// cross-file validation failures.
pub fn parse_all<'a, I>(sources: I) -> Result<Program, (Option<usize>, FrontendError)>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut merged = Program::default();
    for (i, src) in sources.into_iter().enumerate() {
        let p = parser::parse_unchecked(src).map_err(|e| (Some(i), e))?;
        merged.declarations.extend(p.declarations);
        if let Some(names) = p.precedence {
            merged.precedence.get_or_insert_with(Vec::new).extend(names);
        }
    }
    merged.validate().map_err(|e| (None, e))?;
    Ok(merged)
}

impl Program {
    /// Checks cross-declaration invariants.
    pub fn validate(&self) -> Result<(), FrontendError> {
        let mut seen = BTreeSet::new();
        for d in &self.declarations {
            if !seen.insert(d.name()) {
                let pos = d.pos();
                return Err(FrontendError::DuplicateName {
                    name: d.name().to_string(),
                    line: pos.line,
                    col: pos.col,
                });
            }
            match d {
                Decl::Type(t) => {
                    let mut methods = BTreeSet::new();
                    for m in &t.methods {
                        if !methods.insert(&m.name) {
                            return Err(FrontendError::DuplicateName {
                                name: format!("{}.{}", t.name, m.name),
                                line: m.pos.line,
                                col: m.pos.col,
                            });
                        }
                    }
                }
                Decl::Aspect(a) => {
                    let mut pointcuts = BTreeMap::new();
                    for p in &a.pointcuts {
                        if pointcuts.insert(&p.name, p).is_some() {
                            return Err(FrontendError::DuplicateName {
                                name: format!("{}.{}", a.name, p.name),
                                line: p.pos.line,
                                col: p.pos.col,
                            });
                        }
                    }
                    for adv in &a.advice {
                        if let AdviceTarget::Named(n) = &adv.target {
                            if !pointcuts.contains_key(n) {
                                return Err(FrontendError::UnknownPointcut {
                                    aspect: a.name.clone(),
                                    name: n.clone(),
                                    line: adv.pos.line,
                                    col: adv.pos.col,
                                });
                            }
                        }
                        let proceeds = parser::count_proceed(&adv.body);
                        if adv.kind != AdviceKind::Around && proceeds > 0 {
                            return Err(FrontendError::MisplacedProceed {
                                line: adv.pos.line,
                                col: adv.pos.col,
                            });
                        }
                        if proceeds > 1 {
                            return Err(FrontendError::MultipleProceed {
                                line: adv.pos.line,
                                col: adv.pos.col,
                            });
                        }
                    }
                }
            }
        }
        if let Some(prec) = &self.precedence {
            let mut listed = BTreeSet::new();
            for name in prec {
                if !listed.insert(name) {
                    return Err(FrontendError::DuplicatePrecedence(name.clone()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_program() {
        let p = parse("").unwrap();
        assert!(p.declarations.is_empty());
        assert!(p.precedence.is_none());
    }

    #[test]
    fn duplicate_declarations() {
        let err = parse("class A { }\naspect A { }").unwrap_err();
        assert!(matches!(err, FrontendError::DuplicateName { ref name, line: 2, col: 1 } if name == "A"));
        assert!(matches!(
            parse("class A { m() {} m() {} }"),
            Err(FrontendError::DuplicateName { .. })
        ));
        assert!(matches!(
            parse("aspect A { pointcut p: call(* X.y(..)); pointcut p: call(* X.z(..)); }"),
            Err(FrontendError::DuplicateName { .. })
        ));
    }

    #[test]
    fn precedence_names_are_checked_by_the_weaver() {
        // a precedence file may name aspects declared in other files
        assert!(parse("precedence A, B;").is_ok());
        assert!(matches!(
            parse("aspect A { } precedence A, A;"),
            Err(FrontendError::DuplicatePrecedence(_))
        ));
    }

    #[test]
    fn multi_file_merge() {
        let p = parse_all(["aspect A { }", "precedence A;", "class T { m() {} }"]).unwrap();
        assert_eq!(p.declarations.len(), 2);
        assert_eq!(p.precedence.as_deref(), Some(&["A".to_string()][..]));
        let err = parse_all(["class T { }", "class T { }"]).unwrap_err();
        assert!(matches!(err.1, FrontendError::DuplicateName { .. }));
        let err = parse_all(["class T { }", "class ( "]).unwrap_err();
        assert_eq!(err.0, Some(1));
    }
}
