use std::fmt;

use thiserror::Error;

use super::{AgentSet, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LAngle,
    RAngle,
    LParen,
    RParen,
    Bar,
    Amp,
    Tilde,
    Comma,
    Nat(usize),
    Ident(String),
    Kw(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LAngle => f.write_str("'<<'"),
            Tok::RAngle => f.write_str("'>>'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Bar => f.write_str("'|'"),
            Tok::Amp => f.write_str("'&'"),
            Tok::Tilde => f.write_str("'~'"),
            Tok::Comma => f.write_str("','"),
            Tok::Nat(n) => write!(f, "number {n}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Kw(k) => write!(f, "keyword '{k}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: [&str; 7] = ["true", "false", "U", "R", "X", "F", "G"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'<' if bytes.get(i + 1) == Some(&b'<') => {
                i += 2;
                Tok::LAngle
            }
            b'>' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::RAngle
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'|' => {
                i += 1;
                Tok::Bar
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'~' => {
                i += 1;
                Tok::Tilde
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["agent number".into()],
                    found: "number out of range".into(),
                })?;
                Tok::Nat(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                match KEYWORDS.iter().find(|k| **k == word) {
                    Some(k) => Tok::Kw(k),
                    None => Tok::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    expected: vec!["a formula token".into()],
                    found: format!("'{ch}'"),
                });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
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

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conj()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::LAngle => self.coop(),
            _ => self.fail(&["'~'", "'true'", "'false'", "identifier", "'('", "'<<'"]),
        }
    }

    fn coop(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LAngle, "'<<'")?;
        let mut agents = Vec::new();
        if let Tok::Nat(n) = *self.peek() {
            self.bump();
            agents.push(n);
            while *self.peek() == Tok::Comma {
                self.bump();
                match *self.peek() {
                    Tok::Nat(n) => {
                        self.bump();
                        agents.push(n);
                    }
                    _ => return self.fail(&["agent number"]),
                }
            }
        }
        if *self.peek() != Tok::RAngle {
            return if agents.is_empty() {
                self.fail(&["agent number", "'>>'"])
            } else {
                self.fail(&["','", "'>>'"])
            };
        }
        self.bump();
        let coalition = AgentSet::new(agents);
        match self.peek().clone() {
            Tok::Kw("X") => {
                self.bump();
                Ok(Formula::next(coalition, self.unary()?))
            }
            Tok::Kw("F") => {
                self.bump();
                Ok(Formula::eventually(coalition, self.unary()?))
            }
            Tok::Kw("G") => {
                self.bump();
                Ok(Formula::always(coalition, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let lhs = self.formula()?;
                let op = match self.peek() {
                    Tok::Kw("U") => 'U',
                    Tok::Kw("R") => 'R',
                    _ => return self.fail(&["'U'", "'R'"]),
                };
                self.bump();
                let rhs = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(if op == 'U' {
                    Formula::until(coalition, lhs, rhs)
                } else {
                    Formula::release(coalition, lhs, rhs)
                })
            }
            _ => self.fail(&["'X'", "'F'", "'G'", "'('"]),
        }
    }
}

/// Parses the concrete formula syntax.
///
/// `|` is left-associative, `&` binds tighter than `|` and is rewritten by De
/// Morgan, `~` binds tightest. Infix `U`/`R` must sit inside the parentheses
/// that follow a coalition.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["'|'", "'&'", "end of input"]);
    }
    Ok(f)
}
