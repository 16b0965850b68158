//! Recursive-descent parser for formulas and explanation terms.
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "K" "[" ident "]" unary
//!          | "Ky" "[" ident "]" ( "(" formula "," formula ")" | unary ) | atom
//! atom    := ident | "top" | "bot" | "(" formula ")"
//! term    := "e" | ident | "(" term "." term ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::{Agent, Formula, RESERVED_PROP, RESERVED_WORDS};
use crate::terms::Term;

/// A syntax error with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted at this position.
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Bar,
    Arrow,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

/// Parser over a single piece of text. Positions can be offset so that
/// errors inside an embedded fragment point into the enclosing file.
pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, ParseError> {
        Parser::with_origin(text, 1, 1)
    }

    /// `line`/`column` give the position of the first character of `text`.
    pub fn with_origin(text: &str, line: usize, column: usize) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text, line, column)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().tok.to_string();
        let msg = if expected.len() == 1 {
            format!("expected {}, found {found}", expected[0])
        } else {
            format!("expected one of {}, found {found}", expected.join(", "))
        };
        self.error_here(msg, expected)
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    /// Fails unless all input has been consumed.
    pub fn finish(&self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["`&`", "`|`", "`->`", "end of input"]))
        }
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek().tok == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek().tok == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        self.expect(Tok::LBracket, "`[`")?;
        let name = match &self.peek().tok {
            Tok::Ident(s) if !RESERVED_WORDS.contains(&s.as_str()) => s.clone(),
            Tok::Ident(s) => {
                return Err(self.error_here(format!("reserved word `{s}` cannot name an agent"), &["agent name"]))
            }
            _ => return Err(self.unexpected(&["agent name"])),
        };
        self.bump();
        self.expect(Tok::RBracket, "`]`")?;
        Ok(Agent::new(name))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok.clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) if s == "K" => {
                self.bump();
                let agent = self.agent()?;
                Ok(Formula::k(agent, self.unary()?))
            }
            Tok::Ident(s) if s == "Ky" => {
                self.bump();
                let agent = self.agent()?;
                if self.peek().tok == Tok::LParen {
                    self.bump();
                    let first = self.formula()?;
                    match self.peek().tok {
                        Tok::Comma => {
                            self.bump();
                            let body = self.formula()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Formula::ky_cond(agent, first, body))
                        }
                        Tok::RParen => {
                            self.bump();
                            Ok(Formula::ky(agent, first))
                        }
                        _ => Err(self.unexpected(&["`,`", "`)`", "`&`", "`|`", "`->`"])),
                    }
                } else {
                    Ok(Formula::ky(agent, self.unary()?))
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        const STARTS: [&str; 6] = ["proposition", "`top`", "`bot`", "`(`", "`~`", "`K`/`Ky`"];
        match self.peek().tok.clone() {
            Tok::Ident(s) => match s.as_str() {
                "top" => {
                    self.bump();
                    Ok(Formula::top())
                }
                "bot" => {
                    self.bump();
                    Ok(Formula::bot())
                }
                "K" | "Ky" | "e" => {
                    Err(self.error_here(format!("reserved word `{s}` cannot be used as a proposition"), &STARTS))
                }
                RESERVED_PROP => Err(self.error_here(format!("proposition `{RESERVED_PROP}` is reserved"), &STARTS)),
                _ => {
                    self.bump();
                    Ok(Formula::prop(s))
                }
            },
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.unexpected(&STARTS)),
        }
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) if s == "e" => {
                self.bump();
                Ok(Term::SelfEvident)
            }
            Tok::Ident(s) if !RESERVED_WORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Term::base(s))
            }
            Tok::LParen => {
                self.bump();
                let l = self.term()?;
                self.expect(Tok::Dot, "`.`")?;
                let r = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::app(l, r))
            }
            _ => Err(self.unexpected(&["`e`", "term name", "`(`"])),
        }
    }
}

/// Parses a complete formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (line0, col0);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: l,
                column: col,
            })
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                column += s.len();
                push(&mut out, Tok::Ident(s));
                continue;
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    column += 2;
                    push(&mut out, Tok::Arrow);
                    continue;
                }
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: "expected `->`".into(),
                    expected: vec!["`->`".into()],
                });
            }
            _ => {}
        }
        let tok = match c {
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                    expected: vec![],
                })
            }
        };
        chars.next();
        column += 1;
        push(&mut out, tok);
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn knowing_that() {
        assert_eq!(parse_formula("K[i] p").unwrap(), Formula::k(Agent::new("i"), p("p")));
        assert_eq!(parse_formula("K[i]p").unwrap(), Formula::k(Agent::new("i"), p("p")));
    }

    #[test]
    fn conditional_knowing_why() {
        assert_eq!(
            parse_formula("Ky[i](q, p)").unwrap(),
            Formula::ky_cond(Agent::new("i"), p("q"), p("p"))
        );
        // a parenthesised body is an ordinary Ky
        assert_eq!(
            parse_formula("Ky[i](q & p)").unwrap(),
            Formula::ky(Agent::new("i"), Formula::and(p("q"), p("p")))
        );
    }

    #[test]
    fn implication_desugars() {
        assert_eq!(
            parse_formula("(p -> q)").unwrap(),
            Formula::not(Formula::and(p("p"), Formula::not(p("q"))))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("p -> q -> r").unwrap();
        assert_eq!(f, Formula::implies(p("p"), Formula::implies(p("q"), p("r"))));
        let g = parse_formula("p & q | r -> s").unwrap();
        assert_eq!(
            g,
            Formula::implies(Formula::or(Formula::and(p("p"), p("q")), p("r")), p("s"))
        );
        let h = parse_formula("~K[i] p & q").unwrap();
        assert_eq!(
            h,
            Formula::and(Formula::not(Formula::k(Agent::new("i"), p("p"))), p("q"))
        );
    }

    #[test]
    fn top_and_bot() {
        assert_eq!(parse_formula("top").unwrap(), Formula::top());
        assert_eq!(parse_formula("bot").unwrap(), Formula::bot());
    }

    #[test]
    fn truncated_input_reports_end() {
        let err = parse_formula("Ky[i").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(err.message.contains("end of input"), "{}", err.message);
        assert_eq!(err.expected, vec!["`]`".to_string()]);
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_formula("p0").unwrap_err().message.contains("reserved"));
        assert!(parse_formula("K & p").is_err());
        assert!(parse_formula("K[top] p").is_err());
        assert!(parse_formula("e").is_err());
    }

    #[test]
    fn trailing_garbage() {
        let err = parse_formula("p q").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(parse_formula("p $").is_err());
        assert!(parse_formula("p - q").is_err());
    }

    #[test]
    fn multiline_positions() {
        let err = parse_formula("(p &\n  )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn terms() {
        let mut parser = Parser::new("((s . t) . e)").unwrap();
        let t = parser.term().unwrap();
        assert_eq!(
            t,
            Term::app(Term::app(Term::base("s"), Term::base("t")), Term::SelfEvident)
        );
        assert!(Parser::new("(s t)").unwrap().term().is_err());
    }
}
