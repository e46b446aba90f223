//! Recursive-descent parser for `.osm` sources.

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::FrontendError;

/// Parses a single source text. Cross-declaration checks (duplicate names,
/// repeated precedence entries) are left to [`Program::validate`].
pub fn parse_unchecked(source: &str) -> Result<Program, FrontendError> {
    let tokens = tokenize(source)?;
    Parser { tokens, pos: 0 }.program()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(FrontendError::Parse {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.to_string(),
        })
    }

    fn expect_symbol(&mut self, sym: &str) -> PResult<Token> {
        if self.peek().is_symbol(sym) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("`{sym}`")])
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.peek().is_keyword(kw) {
            Ok(self.bump())
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    fn ident(&mut self) -> PResult<Token> {
        if self.peek().kind == TokenKind::Identifier {
            Ok(self.bump())
        } else {
            self.error(&["identifier"])
        }
    }

    fn integer(&mut self) -> PResult<u32> {
        let t = self.peek().clone();
        if t.kind != TokenKind::Integer {
            return self.error(&["integer"]);
        }
        match t.lexeme.parse() {
            Ok(n) => {
                self.bump();
                Ok(n)
            }
            Err(_) => Err(FrontendError::Parse {
                line: t.line,
                col: t.col,
                expected: vec!["integer that fits in 32 bits".into()],
                found: t.to_string(),
            }),
        }
    }

    fn optional_integer(&mut self) -> PResult<u32> {
        if self.peek().kind == TokenKind::Integer {
            self.integer()
        } else {
            Ok(0)
        }
    }

    /// Optional empty parameter list after a pointcut name: `name()`.
    fn optional_unit(&mut self) -> PResult<()> {
        if self.peek().is_symbol("(") {
            self.bump();
            self.expect_symbol(")")?;
        }
        Ok(())
    }

    fn program(&mut self) -> PResult<Program> {
        let mut program = Program::default();
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Eof {
                return Ok(program);
            } else if t.is_keyword("class") {
                let decl = self.type_decl()?;
                program.declarations.push(Decl::Type(decl));
            } else if t.is_keyword("aspect") {
                let decl = self.aspect_decl()?;
                program.declarations.push(Decl::Aspect(decl));
            } else if t.is_keyword("precedence") {
                let names = self.precedence()?;
                program.precedence.get_or_insert_with(Vec::new).extend(names);
            } else {
                return self.error(&["`class`", "`aspect`", "`precedence`", "end of input"]);
            }
        }
    }

    fn precedence(&mut self) -> PResult<Vec<String>> {
        self.expect_keyword("precedence")?;
        let mut names = vec![self.ident()?.lexeme];
        while self.peek().is_symbol(",") {
            self.bump();
            names.push(self.ident()?.lexeme);
        }
        self.expect_symbol(";")?;
        Ok(names)
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let kw = self.expect_keyword("class")?;
        let name = self.ident()?.lexeme;
        self.expect_symbol("{")?;
        let mut methods = Vec::new();
        while !self.peek().is_symbol("}") {
            if self.peek().kind != TokenKind::Identifier && !self.peek().is_keyword("@prop") {
                return self.error(&["`@prop`", "method name", "`}`"]);
            }
            methods.push(self.method()?);
        }
        self.bump();
        Ok(TypeDecl {
            name,
            methods,
            pos: Pos::new(kw.line, kw.col),
        })
    }

    fn method(&mut self) -> PResult<MethodDecl> {
        let start = self.peek().clone();
        let mut annotations = BTreeSet::new();
        while self.peek().is_keyword("@prop") {
            self.bump();
            self.expect_symbol("(")?;
            annotations.insert(self.ident()?.lexeme);
            self.expect_symbol(")")?;
        }
        let name = self.ident()?.lexeme;
        self.expect_symbol("(")?;
        let arity = self.optional_integer()?;
        self.expect_symbol(")")?;
        let body = self.block()?;
        Ok(MethodDecl {
            name,
            arity,
            annotations,
            body,
            pos: Pos::new(start.line, start.col),
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_symbol("{")?;
        let mut stmts = Vec::new();
        while !self.peek().is_symbol("}") {
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let t = self.peek().clone();
        match t.kind {
            TokenKind::Identifier => {
                let call = self.call()?;
                self.expect_symbol(";")?;
                Ok(Stmt::Call(call))
            }
            TokenKind::Keyword => match t.lexeme.as_str() {
                "if" => {
                    self.bump();
                    let cond = self.cond()?;
                    let then_branch = self.block()?;
                    let else_branch = if self.peek().is_keyword("else") {
                        self.bump();
                        Some(self.block()?)
                    } else {
                        None
                    };
                    Ok(Stmt::If {
                        cond,
                        then_branch,
                        else_branch,
                    })
                }
                "while" => {
                    self.bump();
                    let cond = self.cond()?;
                    let body = self.block()?;
                    Ok(Stmt::While { cond, body })
                }
                "throw" => {
                    self.bump();
                    let name = self.ident()?.lexeme;
                    self.expect_symbol(";")?;
                    Ok(Stmt::Throw(name))
                }
                "return" => {
                    self.bump();
                    self.expect_symbol(";")?;
                    Ok(Stmt::Return)
                }
                "atomic" => {
                    self.bump();
                    let label = self.ident()?.lexeme;
                    self.expect_symbol(";")?;
                    Ok(Stmt::Atomic(label))
                }
                "proceed" => {
                    self.bump();
                    self.expect_symbol("(")?;
                    self.expect_symbol(")")?;
                    self.expect_symbol(";")?;
                    Ok(Stmt::Proceed)
                }
                _ => self.error(STMT_START),
            },
            _ => self.error(STMT_START),
        }
    }

    fn cond(&mut self) -> PResult<Cond> {
        self.expect_symbol("(")?;
        let cond = if self.peek_at(1).is_symbol(".") {
            Cond::Call(self.call()?)
        } else {
            Cond::Label(self.ident()?.lexeme)
        };
        self.expect_symbol(")")?;
        Ok(cond)
    }

    fn call(&mut self) -> PResult<Call> {
        let receiver = self.ident()?.lexeme;
        self.expect_symbol(".")?;
        let method = self.ident()?.lexeme;
        self.expect_symbol("(")?;
        let args = self.optional_integer()?;
        self.expect_symbol(")")?;
        Ok(Call {
            receiver,
            method,
            args,
        })
    }

    fn aspect_decl(&mut self) -> PResult<AspectDecl> {
        let kw = self.expect_keyword("aspect")?;
        let name = self.ident()?.lexeme;
        self.expect_symbol("{")?;
        let mut aspect = AspectDecl {
            name,
            pointcuts: Vec::new(),
            advice: Vec::new(),
            pos: Pos::new(kw.line, kw.col),
        };
        loop {
            let t = self.peek().clone();
            if t.is_symbol("}") {
                self.bump();
                break;
            } else if t.is_keyword("pointcut") {
                self.bump();
                let name_tok = self.ident()?;
                self.optional_unit()?;
                self.expect_symbol(":")?;
                let pattern = self.call_pattern()?;
                self.expect_symbol(";")?;
                if aspect.pointcut(&name_tok.lexeme).is_some() {
                    return Err(FrontendError::DuplicateName {
                        name: format!("{}.{}", aspect.name, name_tok.lexeme),
                        line: name_tok.line,
                        col: name_tok.col,
                    });
                }
                aspect.pointcuts.push(PointcutDecl {
                    name: name_tok.lexeme,
                    pattern,
                    pos: Pos::new(t.line, t.col),
                });
            } else if t.kind == TokenKind::Keyword
                && matches!(t.lexeme.as_str(), "before" | "after" | "around")
            {
                let advice = self.advice(&aspect)?;
                aspect.advice.push(advice);
            } else {
                return self.error(&["`pointcut`", "`before`", "`after`", "`around`", "`}`"]);
            }
        }
        Ok(aspect)
    }

    fn advice(&mut self, aspect: &AspectDecl) -> PResult<AdviceDecl> {
        let t = self.bump();
        let kind = match t.lexeme.as_str() {
            "before" => AdviceKind::Before,
            "after" => AdviceKind::After,
            _ => AdviceKind::Around,
        };
        self.expect_symbol("(")?;
        self.expect_symbol(")")?;
        self.expect_symbol(":")?;
        let target = if self.peek().is_keyword("call") {
            AdviceTarget::Inline(self.call_pattern()?)
        } else {
            let name_tok = self.ident()?;
            self.optional_unit()?;
            if aspect.pointcut(&name_tok.lexeme).is_none() {
                return Err(FrontendError::UnknownPointcut {
                    aspect: aspect.name.clone(),
                    name: name_tok.lexeme,
                    line: name_tok.line,
                    col: name_tok.col,
                });
            }
            AdviceTarget::Named(name_tok.lexeme)
        };
        let body_start = self.peek().clone();
        let body = self.block()?;
        let proceeds = count_proceed(&body);
        if kind != AdviceKind::Around && proceeds > 0 {
            return Err(FrontendError::MisplacedProceed {
                line: body_start.line,
                col: body_start.col,
            });
        }
        if proceeds > 1 {
            return Err(FrontendError::MultipleProceed {
                line: body_start.line,
                col: body_start.col,
            });
        }
        Ok(AdviceDecl {
            kind,
            target,
            body,
            pos: Pos::new(t.line, t.col),
        })
    }

    /// `call ( ["*"] glob "." glob "(" [".." | integer] ")" )`
    fn call_pattern(&mut self) -> PResult<CallPattern> {
        self.expect_keyword("call")?;
        self.expect_symbol("(")?;
        let first = self.glob()?;
        let receiver = if self.peek().is_symbol(".") {
            first
        } else if first == "*" {
            // leading return-type wildcard
            self.glob()?
        } else {
            return self.error(&["`.`"]);
        };
        self.expect_symbol(".")?;
        let method = self.glob()?;
        self.expect_symbol("(")?;
        let arity = if self.peek().is_symbol("..") {
            self.bump();
            AritySpec::Any
        } else {
            AritySpec::Exact(self.optional_integer()?)
        };
        self.expect_symbol(")")?;
        self.expect_symbol(")")?;
        Ok(CallPattern {
            receiver,
            method,
            arity,
        })
    }

    /// A glob is a run of adjacent identifier and `*` tokens.
    fn glob(&mut self) -> PResult<String> {
        let is_part = |t: &Token| t.kind == TokenKind::Identifier || t.is_symbol("*");
        if !is_part(self.peek()) {
            return self.error(&["name pattern"]);
        }
        let mut prev = self.bump();
        let mut glob = prev.lexeme.clone();
        // a digit run may continue a glob, as in `*1`
        let continues = |t: &Token| is_part(t) || t.kind == TokenKind::Integer;
        while continues(self.peek()) && prev.touches(self.peek()) {
            prev = self.bump();
            glob.push_str(&prev.lexeme);
        }
        Ok(glob)
    }
}

const STMT_START: &[&str] = &[
    "call",
    "`if`",
    "`while`",
    "`throw`",
    "`return`",
    "`atomic`",
    "`proceed`",
    "`}`",
];

pub(crate) fn count_proceed(stmts: &[Stmt]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            Stmt::Proceed => 1,
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => count_proceed(then_branch) + else_branch.as_deref().map_or(0, count_proceed),
            Stmt::While { body, .. } => count_proceed(body),
            _ => 0,
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_method_with_annotations() {
        let p = parse_unchecked(
            "class PatientData { @prop(sensitive) @prop(core) getMedicalHistory(1) { Database.fetch(1); return; } }",
        )
        .unwrap();
        let m = p.method("PatientData", "getMedicalHistory").unwrap();
        assert_eq!(m.arity, 1);
        assert_eq!(m.annotations.len(), 2);
        assert_eq!(
            m.body,
            vec![
                Stmt::Call(Call {
                    receiver: "Database".into(),
                    method: "fetch".into(),
                    args: 1
                }),
                Stmt::Return
            ]
        );
    }

    #[test]
    fn parses_patterns() {
        let p = parse_unchecked(
            "aspect E { pointcut s(): call(* PatientData.get*(..)); pointcut t: call(Foo.bar(0)); pointcut u: call(*Svc.*x*()); }",
        )
        .unwrap();
        let a = p.aspect("E").unwrap();
        assert_eq!(a.pointcuts[0].pattern.receiver, "PatientData");
        assert_eq!(a.pointcuts[0].pattern.method, "get*");
        assert_eq!(a.pointcuts[0].pattern.arity, AritySpec::Any);
        assert_eq!(a.pointcuts[1].pattern.arity, AritySpec::Exact(0));
        assert_eq!(a.pointcuts[2].pattern.receiver, "*Svc");
        assert_eq!(a.pointcuts[2].pattern.method, "*x*");
    }

    #[test]
    fn conditions() {
        let p = parse_unchecked(
            "class A { m() { if (Auth.ok()) { atomic a; } else { throw X; } while (more) { } } }",
        )
        .unwrap();
        let body = &p.method("A", "m").unwrap().body;
        assert!(matches!(&body[0], Stmt::If { cond: Cond::Call(c), else_branch: Some(_), .. } if c.method == "ok"));
        assert!(matches!(&body[1], Stmt::While { cond: Cond::Label(l), .. } if l == "more"));
    }

    #[test]
    fn unknown_pointcut() {
        let err = parse_unchecked("aspect A { before(): q() {} }").unwrap_err();
        assert!(matches!(err, FrontendError::UnknownPointcut { ref name, .. } if name == "q"));
    }

    #[test]
    fn proceed_rules() {
        assert!(matches!(
            parse_unchecked("aspect A { before(): call(* X.y(..)) { proceed(); } }"),
            Err(FrontendError::MisplacedProceed { .. })
        ));
        assert!(matches!(
            parse_unchecked(
                "aspect A { around(): call(* X.y(..)) { proceed(); if (c) { proceed(); } } }"
            ),
            Err(FrontendError::MultipleProceed { .. })
        ));
        assert!(parse_unchecked("aspect A { around(): call(* X.y(..)) { proceed(); } }").is_ok());
    }

    #[test]
    fn parse_error_expected_set() {
        match parse_unchecked("class A { m() { atomic ; } }") {
            Err(FrontendError::Parse {
                line,
                col,
                expected,
                ..
            }) => {
                assert_eq!((line, col), (1, 24));
                assert_eq!(expected, vec!["identifier".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_at_end_of_input_points_inside() {
        let src = "aspect A {";
        match parse_unchecked(src) {
            Err(FrontendError::Parse { line, col, .. }) => assert_eq!((line, col), (1, 10)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multiple_precedence_directives_concatenate() {
        let p = parse_unchecked("precedence A, B; precedence C;").unwrap();
        assert_eq!(p.precedence.unwrap(), vec!["A", "B", "C"]);
    }
}
