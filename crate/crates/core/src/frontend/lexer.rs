use std::fmt;

use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Integer,
    Symbol,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.is(TokenKind::Keyword, kw)
    }

    pub fn is_symbol(&self, sym: &str) -> bool {
        self.is(TokenKind::Symbol, sym)
    }

    /// Whether `next` starts on the same line immediately after this token.
    pub fn touches(&self, next: &Token) -> bool {
        self.line == next.line && self.col + self.lexeme.chars().count() == next.col
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Eof => f.write_str("end of input"),
            _ => write!(f, "`{}`", self.lexeme),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "class",
    "aspect",
    "pointcut",
    "call",
    "before",
    "after",
    "around",
    "proceed",
    "if",
    "else",
    "while",
    "throw",
    "return",
    "atomic",
    "precedence",
    "@prop",
];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Whether `s` is a valid DSL identifier (and not a keyword).
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    chars.all(is_ident_continue) && !s.ends_with('-') && !KEYWORDS.contains(&s)
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
    last: (usize, usize),
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.last = (self.line, self.col);
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
        last: (1, 1),
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, col) = (cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' {
            cur.bump();
            if cur.peek() == Some('/') {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                continue;
            }
            return Err(FrontendError::Lex { line, col, ch: '/' });
        }

        let (kind, lexeme) = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                cur.bump();
            }
            if s.ends_with('-') {
                // a trailing hyphen is not part of any identifier
                return Err(FrontendError::Lex {
                    line: cur.last.0,
                    col: cur.last.1,
                    ch: '-',
                });
            }
            let kind = if KEYWORDS.contains(&s.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            (kind, s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                cur.bump();
            }
            (TokenKind::Integer, s)
        } else if c == '@' {
            cur.bump();
            let mut s = String::from("@");
            while let Some(c) = cur.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                cur.bump();
            }
            if s != "@prop" {
                return Err(FrontendError::Lex { line, col, ch: '@' });
            }
            (TokenKind::Keyword, s)
        } else if c == '.' {
            cur.bump();
            if cur.peek() == Some('.') {
                cur.bump();
                (TokenKind::Symbol, "..".to_string())
            } else {
                (TokenKind::Symbol, ".".to_string())
            }
        } else if "{}();:,*".contains(c) {
            cur.bump();
            (TokenKind::Symbol, c.to_string())
        } else {
            return Err(FrontendError::Lex { line, col, ch: c });
        };
        tokens.push(Token {
            kind,
            lexeme,
            line,
            col,
        });
    }

    // End of input sits on the last character so diagnostics stay inside the text.
    let (line, col) = if source.is_empty() { (1, 1) } else { cur.last };
    tokens.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        line,
        col,
    });
    Ok(tokens)
}
