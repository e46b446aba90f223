//! ASCII formula syntax. Binding strength, tightest first: `!` and the
//! temporal unaries, `&`, `|`, `->`, `<->`; the last two associate to the right.

use thiserror::Error;

use super::formula::{CtlFormula, PropFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {position}: expected {expected}")]
pub struct FormulaParseError {
    /// 1-based character column.
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    /// `A[` or `E[`
    PathOpen(char),
    RBracket,
    Until,
    Unary(&'static str),
    End,
}

const UNARIES: &[&str] = &["AX", "EX", "AF", "EF", "AG", "EG"];

fn is_atom_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | ':' | '-')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else {
            match c {
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ']' => (Tok::RBracket, 1),
                c if is_atom_start(c) => {
                    let mut j = i;
                    while j < chars.len() && is_atom_char(chars[j]) {
                        // `-` followed by `>` starts an implication
                        if chars[j] == '-' && chars.get(j + 1) == Some(&'>') {
                            break;
                        }
                        j += 1;
                    }
                    let word: String = chars[i..j].iter().collect();
                    let mut k = j;
                    while k < chars.len() && chars[k].is_whitespace() {
                        k += 1;
                    }
                    if (word == "A" || word == "E") && chars.get(k) == Some(&'[') {
                        out.push((Tok::PathOpen(c), pos));
                        i = k + 1;
                        continue;
                    }
                    let tok = match word.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "U" => Tok::Until,
                        w => match UNARIES.iter().find(|u| **u == w) {
                            Some(u) => Tok::Unary(u),
                            None => Tok::Atom(word.clone()),
                        },
                    };
                    (tok, j - i)
                }
                _ => {
                    return Err(FormulaParseError {
                        position: pos,
                        expected: "atom, constant, operator or parenthesis".into(),
                    })
                }
            }
        };
        out.push((tok, pos));
        i += len;
    }
    out.push((Tok::End, chars.len().max(1)));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, FormulaParseError> {
        Err(FormulaParseError {
            position: self.toks[self.pos].1,
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn iff(&mut self) -> Result<CtlFormula, FormulaParseError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(CtlFormula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<CtlFormula, FormulaParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(CtlFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<CtlFormula, FormulaParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = CtlFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<CtlFormula, FormulaParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = CtlFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CtlFormula, FormulaParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(CtlFormula::Not(Box::new(self.unary()?)))
            }
            Tok::Unary(op) => {
                self.bump();
                let f = Box::new(self.unary()?);
                Ok(match op {
                    "AX" => CtlFormula::AX(f),
                    "EX" => CtlFormula::EX(f),
                    "AF" => CtlFormula::AF(f),
                    "EF" => CtlFormula::EF(f),
                    "AG" => CtlFormula::AG(f),
                    _ => CtlFormula::EG(f),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<CtlFormula, FormulaParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(CtlFormula::True)
            }
            Tok::False => {
                self.bump();
                Ok(CtlFormula::False)
            }
            Tok::Atom(a) => {
                self.bump();
                Ok(CtlFormula::Atom(a))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::PathOpen(q) => {
                self.bump();
                let lhs = Box::new(self.iff()?);
                self.expect(Tok::Until, "`U`")?;
                let rhs = Box::new(self.iff()?);
                self.expect(Tok::RBracket, "`]`")?;
                Ok(if q == 'A' {
                    CtlFormula::AU(lhs, rhs)
                } else {
                    CtlFormula::EU(lhs, rhs)
                })
            }
            _ => self.err("atom, constant, `!`, temporal operator or `(`"),
        }
    }
}

pub fn parse_ctl(text: &str) -> Result<CtlFormula, FormulaParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return p.err("operator or end of formula");
    }
    Ok(f)
}

pub fn parse_prop(text: &str) -> Result<PropFormula, FormulaParseError> {
    let f = parse_ctl(text)?;
    f.to_prop().ok_or_else(|| FormulaParseError {
        position: 1,
        expected: "propositional formula without temporal operators".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CtlFormula::*;

    fn atom(s: &str) -> Box<CtlFormula> {
        Box::new(Atom(s.into()))
    }

    #[test]
    fn implication_with_conjunction() {
        assert_eq!(
            parse_ctl("C -> (A & B)").unwrap(),
            Implies(atom("C"), Box::new(And(atom("A"), atom("B"))))
        );
        assert_eq!(
            parse_prop("A -> (L & E)").unwrap().to_ctl(),
            Implies(atom("A"), Box::new(And(atom("L"), atom("E"))))
        );
    }

    #[test]
    fn unary_binds_tightest() {
        assert_eq!(
            parse_ctl("AG p -> q").unwrap(),
            Implies(Box::new(AG(atom("p"))), atom("q"))
        );
        assert_eq!(parse_ctl("!a & b").unwrap(), And(Box::new(Not(atom("a"))), atom("b")));
    }

    #[test]
    fn associativity() {
        assert_eq!(
            parse_ctl("a -> b -> c").unwrap(),
            Implies(atom("a"), Box::new(Implies(atom("b"), atom("c"))))
        );
        assert_eq!(
            parse_ctl("a | b | c").unwrap(),
            Or(Box::new(Or(atom("a"), atom("b"))), atom("c"))
        );
        assert_eq!(
            parse_ctl("a | b & c <-> d").unwrap(),
            Iff(Box::new(Or(atom("a"), Box::new(And(atom("b"), atom("c"))))), atom("d"))
        );
    }

    #[test]
    fn until_and_namespaced_atoms() {
        assert_eq!(
            parse_ctl("!E[!action:isUserAuthorized U action:fetch]").unwrap(),
            Not(Box::new(EU(
                Box::new(Not(atom("action:isUserAuthorized"))),
                atom("action:fetch")
            )))
        );
        assert_eq!(parse_ctl("A [a U b]").unwrap(), AU(atom("a"), atom("b")));
        assert_eq!(parse_ctl("action:log-start->x").unwrap(), Implies(atom("action:log-start"), atom("x")));
        // `A` and `E` are ordinary atoms unless a bracket follows
        assert_eq!(parse_ctl("A & E").unwrap(), And(atom("A"), atom("E")));
    }

    #[test]
    fn errors() {
        let e = parse_ctl("a &").unwrap_err();
        assert_eq!(e.position, 3);
        assert!(parse_ctl("(a").is_err());
        assert!(parse_ctl("a b").is_err());
        assert!(parse_ctl("E[a b]").is_err());
        assert!(parse_ctl("a # b").is_err());
        assert!(parse_prop("AG a").is_err());
        assert!(parse_ctl("").is_err());
    }

    #[test]
    fn display_reparses() {
        for text in ["C -> (A & B)", "AG (p -> AF q)", "!E[!a U b] <-> A[true U false]", "EX EG !x | y"] {
            let f = parse_ctl(text).unwrap();
            assert_eq!(parse_ctl(&f.to_string()).unwrap(), f);
        }
    }
}
