use crate::error::{Error, Result};

use super::formula::Formula;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    Less,
    Eq,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'<' => Tok::Less,
            b'=' => Tok::Eq,
            b'-' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => return Err(Error::Parse { pos: i, msg: format!("unexpected character `{}`", c as char) }),
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Set,
    First,
}

const KEYWORDS: [&str; 12] = ["true", "false", "sub", "sing", "before", "letter", "ex", "all", "ex1", "all1", "in", "lab"];

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    alphabet: &'a [String],
    scope: Vec<(String, Kind)>,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.offset(), msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn var_name(&mut self) -> Result<String> {
        let v = self.ident()?;
        if KEYWORDS.contains(&v.as_str()) {
            return Err(Error::Parse { pos: self.toks[self.pos - 1].0, msg: format!("`{v}` is a keyword") });
        }
        Ok(v)
    }

    fn lookup(&self, v: &str) -> Result<Kind> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, k)| *k)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn any_var(&mut self) -> Result<String> {
        let v = self.var_name()?;
        self.lookup(&v)?;
        Ok(v)
    }

    fn first_var(&mut self) -> Result<String> {
        let at = self.offset();
        let v = self.var_name()?;
        match self.lookup(&v)? {
            Kind::First => Ok(v),
            Kind::Set => Err(Error::Parse { pos: at, msg: format!("`{v}` is a set variable, expected a first-order one") }),
        }
    }

    fn letter(&mut self) -> Result<String> {
        let a = self.ident()?;
        if !self.alphabet.contains(&a) {
            return Err(Error::UnknownLetter(a));
        }
        Ok(a)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if let Some(Tok::Ident(kw)) = self.peek() {
            let kind = match kw.as_str() {
                "ex" | "all" => Some(Kind::Set),
                "ex1" | "all1" => Some(Kind::First),
                _ => None,
            };
            if let Some(kind) = kind {
                let kw = kw.clone();
                self.pos += 1;
                let v = self.var_name()?;
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                self.scope.push((v.clone(), kind));
                let body = self.implies();
                self.scope.pop();
                let body = body?;
                return Ok(match kw.as_str() {
                    "ex" => Formula::exists(v, body),
                    "all" => Formula::forall(v, body),
                    "ex1" => Formula::exists1(v, body),
                    _ => Formula::forall1(v, body),
                });
            }
        }
        self.primary()
    }

    fn args2(&mut self, first: impl FnOnce(&mut Self) -> Result<String>, second: impl FnOnce(&mut Self) -> Result<String>) -> Result<(String, String)> {
        self.expect(Tok::LParen, "`(`")?;
        let a = first(self)?;
        self.expect(Tok::Comma, "`,`")?;
        let b = second(self)?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((a, b))
    }

    fn primary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::LParen) {
            let f = self.implies()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let at = self.offset();
        let word = self.ident()?;
        Ok(match word.as_str() {
            "true" => Formula::True,
            "false" => Formula::False,
            "sub" => {
                let (x, y) = self.args2(Self::any_var, Self::any_var)?;
                Formula::Sub(x, y)
            }
            "before" => {
                let (x, y) = self.args2(Self::any_var, Self::any_var)?;
                Formula::Before(x, y)
            }
            "sing" => {
                self.expect(Tok::LParen, "`(`")?;
                let x = self.any_var()?;
                self.expect(Tok::RParen, "`)`")?;
                Formula::Sing(x)
            }
            "letter" => {
                let (a, x) = self.args2(Self::letter, Self::any_var)?;
                Formula::Letter(a, x)
            }
            "lab" => {
                let (a, x) = self.args2(Self::letter, Self::first_var)?;
                Formula::Lab(a, x)
            }
            _ if KEYWORDS.contains(&word.as_str()) => {
                return Err(Error::Parse { pos: at, msg: format!("unexpected keyword `{word}`") });
            }
            _ => {
                let x = word;
                match self.peek() {
                    Some(Tok::Less) | Some(Tok::Eq) => {
                        let less = self.peek() == Some(&Tok::Less);
                        self.pos += 1;
                        if self.lookup(&x)? != Kind::First {
                            return Err(Error::Parse { pos: at, msg: format!("`{x}` is a set variable, expected a first-order one") });
                        }
                        let y = self.first_var()?;
                        if less {
                            Formula::Less(x, y)
                        } else {
                            Formula::Equal(x, y)
                        }
                    }
                    Some(Tok::Ident(kw)) if kw == "in" => {
                        self.pos += 1;
                        if self.lookup(&x)? != Kind::First {
                            return Err(Error::Parse { pos: at, msg: format!("`{x}` is a set variable, expected a first-order one") });
                        }
                        let y = self.any_var()?;
                        Formula::In(x, y)
                    }
                    _ => return Err(Error::Parse { pos: at, msg: format!("unexpected `{x}`") }),
                }
            }
        })
    }
}

/// Parses a closed formula over `alphabet`.
pub fn parse_formula(text: &str, alphabet: &[String]) -> Result<Formula> {
    parse_formula_with_free(text, alphabet, &[])
}

/// Parses a formula whose free variables (all set variables) are `free`.
pub fn parse_formula_with_free(text: &str, alphabet: &[String], free: &[&str]) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        alphabet,
        scope: free.iter().map(|v| (v.to_string(), Kind::Set)).collect(),
    };
    if p.toks.is_empty() {
        return Err(p.error("empty formula"));
    }
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}
