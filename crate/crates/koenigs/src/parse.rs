//! Recursive-descent parser for map expressions.
//!
//! Grammar (standard precedence, `^` for powers, implicit multiplication
//! disallowed):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ('^' exponent)?
//! base     := number | 'i' | 'z' | '(' expr ')' | func '(' expr ')'
//! func     := 'exp' | 'log'
//! exponent := '-'? number
//! ```
//!
//! Numbers are decimal literals. An exponent written without a decimal
//! point or exponent marker parses as an integer power; otherwise it is a
//! real power taken on the principal branch.

use std::fmt;

use num_complex::Complex64;

use crate::expr::{MapExpr, Node};

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnknownIdentifier(String),
    InvalidNumber(String),
    ExponentOutOfRange(f64),
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected '{found}', expected {expected}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "unexpected end of input, expected {expected}")
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier '{name}'"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number literal '{s}'"),
            ParseErrorKind::ExponentOutOfRange(x) => {
                write!(f, "integer exponent {x} out of range")
            }
            ParseErrorKind::ArityMismatch {
                name,
                expected,
                got,
            } => {
                write!(f, "'{name}' takes {expected} argument(s), got {got}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses a map expression in the variable `z`; total on valid input.
pub fn parse_map(source: &str) -> Result<MapExpr, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_offset: source.len(),
    };
    let root = parser.parse_expr()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedToken {
                found: tok.text(),
                expected: "end of input",
            },
            offset: tok.offset,
        });
    }
    Ok(MapExpr::new(source.trim(), root))
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Number { value: f64, integral: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug, PartialEq)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

impl Token {
    fn text(&self) -> String {
        match &self.kind {
            TokenKind::Number { value, .. } => format!("{value}"),
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Slash => "/".into(),
            TokenKind::Caret => "^".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                tokens.push(Token {
                    kind: TokenKind::Plus,
                    offset,
                });
                i += 1;
            }
            '-' => {
                tokens.push(Token {
                    kind: TokenKind::Minus,
                    offset,
                });
                i += 1;
            }
            '*' => {
                tokens.push(Token {
                    kind: TokenKind::Star,
                    offset,
                });
                i += 1;
            }
            '/' => {
                tokens.push(Token {
                    kind: TokenKind::Slash,
                    offset,
                });
                i += 1;
            }
            '^' => {
                tokens.push(Token {
                    kind: TokenKind::Caret,
                    offset,
                });
                i += 1;
            }
            '(' => {
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    offset,
                });
                i += 1;
            }
            ')' => {
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    offset,
                });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                let mut integral = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integral = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::InvalidNumber(text.to_string()),
                    offset: start,
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number { value, integral },
                    offset: start,
                });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(source[start..i].to_string()),
                    offset: start,
                });
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(other),
                    offset,
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_error(&self, expected: &'static str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::UnexpectedEnd { expected },
            offset: self.end_offset,
        }
    }

    fn expect(&mut self, kind: TokenKind, expected: &'static str) -> Result<(), ParseError> {
        match self.advance() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.text(),
                    expected,
                },
                offset: t.offset,
            }),
            None => Err(self.eof_error(expected)),
        }
    }

    fn parse_expr(&mut self) -> Result<Node, ParseError> {
        let mut node = self.parse_term()?;
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Plus) => {
                    self.advance();
                    node = Node::add(node, self.parse_term()?);
                }
                Some(TokenKind::Minus) => {
                    self.advance();
                    node = Node::sub(node, self.parse_term()?);
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Node, ParseError> {
        let mut node = self.parse_factor()?;
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Star) => {
                    self.advance();
                    node = Node::mul(node, self.parse_factor()?);
                }
                Some(TokenKind::Slash) => {
                    self.advance();
                    node = Node::div(node, self.parse_factor()?);
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Node, ParseError> {
        let base = self.parse_base()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.advance();
            return self.parse_exponent(base);
        }
        Ok(base)
    }

    fn parse_exponent(&mut self, base: Node) -> Result<Node, ParseError> {
        let negative = if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.advance();
            true
        } else {
            false
        };
        match self.advance() {
            Some(Token {
                kind: TokenKind::Number { value, integral },
                offset,
            }) => {
                let value = if negative { -value } else { value };
                if integral {
                    if value.abs() > i32::MAX as f64 {
                        return Err(ParseError {
                            kind: ParseErrorKind::ExponentOutOfRange(value),
                            offset,
                        });
                    }
                    Ok(Node::pow_int(base, value as i32))
                } else {
                    Ok(Node::pow_real(base, value))
                }
            }
            Some(t) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.text(),
                    expected: "a numeric exponent",
                },
                offset: t.offset,
            }),
            None => Err(self.eof_error("a numeric exponent")),
        }
    }

    fn parse_base(&mut self) -> Result<Node, ParseError> {
        match self.advance() {
            Some(Token {
                kind: TokenKind::Number { value, .. },
                ..
            }) => Ok(Node::real(value)),
            Some(Token {
                kind: TokenKind::Ident(name),
                offset,
            }) => match name.as_str() {
                "z" => Ok(Node::Var),
                "i" => Ok(Node::constant(Complex64::new(0.0, 1.0))),
                "exp" => {
                    self.expect(TokenKind::LParen, "'(' after exp")?;
                    let arg = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    Ok(Node::exp(arg))
                }
                "log" => {
                    self.expect(TokenKind::LParen, "'(' after log")?;
                    let arg = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    Ok(Node::log(arg))
                }
                _ => Err(ParseError {
                    kind: ParseErrorKind::UnknownIdentifier(name),
                    offset,
                }),
            },
            Some(Token {
                kind: TokenKind::LParen,
                ..
            }) => {
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            Some(t) => Err(ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.text(),
                    expected: "a number, 'i', 'z', '(', or a function",
                },
                offset: t.offset,
            }),
            None => Err(self.eof_error("a number, 'i', 'z', '(', or a function")),
        }
    }
}
