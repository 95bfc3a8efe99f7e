//! Finite expressions denoting countable words, their text form and evaluation.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::Elem;
use crate::error::{Error, Result};
use crate::recognizer::{Letter, Recognizer};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordExpr {
    Eps,
    Letter(Letter),
    /// At least two children, none of them a concatenation.
    Concat(Vec<WordExpr>),
    Omega(Box<WordExpr>),
    OmegaOp(Box<WordExpr>),
    /// Sorted and duplicate-free, at least one child.
    Shuffle(Vec<WordExpr>),
}

impl WordExpr {
    pub fn letter(name: &str) -> WordExpr {
        WordExpr::Letter(Letter::plain(name))
    }

    /// Flattening concatenation. Zero parts give `eps`, one part is returned as is.
    pub fn concat(parts: impl IntoIterator<Item = WordExpr>) -> WordExpr {
        let mut out = Vec::new();
        for p in parts {
            match p {
                WordExpr::Concat(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => WordExpr::Eps,
            1 => out.pop().unwrap(),
            _ => WordExpr::Concat(out),
        }
    }

    pub fn omega(e: WordExpr) -> WordExpr {
        WordExpr::Omega(Box::new(e))
    }

    pub fn omega_op(e: WordExpr) -> WordExpr {
        WordExpr::OmegaOp(Box::new(e))
    }

    /// Panics on an empty argument list; use the parser for untrusted input.
    pub fn shuffle(parts: impl IntoIterator<Item = WordExpr>) -> WordExpr {
        let set: BTreeSet<WordExpr> = parts.into_iter().collect();
        assert!(!set.is_empty(), "shuffle needs at least one argument");
        WordExpr::Shuffle(set.into_iter().collect())
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<Letter>) {
        match self {
            WordExpr::Eps => {}
            WordExpr::Letter(l) => {
                out.insert(l.clone());
            }
            WordExpr::Concat(cs) | WordExpr::Shuffle(cs) => cs.iter().for_each(|c| c.collect_letters(out)),
            WordExpr::Omega(e) | WordExpr::OmegaOp(e) => e.collect_letters(out),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            WordExpr::Eps | WordExpr::Letter(_) => 1,
            WordExpr::Concat(cs) | WordExpr::Shuffle(cs) => 1 + cs.iter().map(WordExpr::size).sum::<usize>(),
            WordExpr::Omega(e) | WordExpr::OmegaOp(e) => 1 + e.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            WordExpr::Eps | WordExpr::Letter(_) => 0,
            WordExpr::Concat(cs) | WordExpr::Shuffle(cs) => 1 + cs.iter().map(WordExpr::depth).max().unwrap_or(0),
            WordExpr::Omega(e) | WordExpr::OmegaOp(e) => 1 + e.depth(),
        }
    }

    /// Applies `f` to every letter.
    pub fn map_letters(&self, f: &impl Fn(&Letter) -> Letter) -> WordExpr {
        match self {
            WordExpr::Eps => WordExpr::Eps,
            WordExpr::Letter(l) => WordExpr::Letter(f(l)),
            WordExpr::Concat(cs) => WordExpr::concat(cs.iter().map(|c| c.map_letters(f))),
            WordExpr::Shuffle(cs) => WordExpr::shuffle(cs.iter().map(|c| c.map_letters(f))),
            WordExpr::Omega(e) => WordExpr::omega(e.map_letters(f)),
            WordExpr::OmegaOp(e) => WordExpr::omega_op(e.map_letters(f)),
        }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Eps => write!(f, "eps"),
            WordExpr::Letter(l) => write!(f, "{l}"),
            WordExpr::Concat(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            WordExpr::Omega(e) => write!(f, "omega({e})"),
            WordExpr::OmegaOp(e) => write!(f, "omegaR({e})"),
            WordExpr::Shuffle(cs) => {
                write!(f, "shuffle(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn print_expr(e: &WordExpr) -> String {
    e.to_string()
}

pub fn parse_expr(text: &str) -> Result<WordExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", b as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_ident_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<WordExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let mut parts = vec![self.expr()?];
                while self.peek() != Some(b')') {
                    if self.peek().is_none() {
                        return Err(self.error("unclosed `(`"));
                    }
                    parts.push(self.expr()?);
                }
                self.pos += 1;
                Ok(WordExpr::concat(parts))
            }
            Some(b) if is_ident_byte(b) => {
                let word = self.ident()?;
                match word.as_str() {
                    "eps" => Ok(WordExpr::Eps),
                    "omega" | "omegaR" => {
                        self.expect(b'(')?;
                        let inner = self.expr()?;
                        self.expect(b')')?;
                        Ok(if word == "omega" { WordExpr::omega(inner) } else { WordExpr::omega_op(inner) })
                    }
                    "shuffle" => {
                        self.expect(b'(')?;
                        if self.peek() == Some(b')') {
                            return Err(self.error("empty shuffle"));
                        }
                        let mut parts = vec![self.expr()?];
                        while self.peek() == Some(b',') {
                            self.pos += 1;
                            parts.push(self.expr()?);
                        }
                        self.expect(b')')?;
                        Ok(WordExpr::shuffle(parts))
                    }
                    _ => {
                        // marks must follow the letter without whitespace
                        let mut marks = Vec::new();
                        if self.src.get(self.pos) == Some(&b'[') {
                            self.pos += 1;
                            if self.peek() != Some(b']') {
                                marks.push(self.ident()?);
                                while self.peek() == Some(b',') {
                                    self.pos += 1;
                                    marks.push(self.ident()?);
                                }
                            }
                            self.expect(b']')?;
                        }
                        Ok(WordExpr::Letter(Letter::marked(word, marks)))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}

/// Value of an expression in a recognizer's algebra.
pub fn eval_expr(rec: &Recognizer, e: &WordExpr) -> Result<Elem> {
    let alg = rec.algebra();
    Ok(match e {
        WordExpr::Eps => alg.unit(),
        WordExpr::Letter(l) => rec.image(l).ok_or_else(|| Error::UnknownLetter(l.to_string()))?,
        WordExpr::Concat(cs) => {
            let mut acc = eval_expr(rec, &cs[0])?;
            for c in &cs[1..] {
                acc = alg.dot(acc, eval_expr(rec, c)?);
            }
            acc
        }
        WordExpr::Omega(x) => alg.tau(eval_expr(rec, x)?),
        WordExpr::OmegaOp(x) => alg.tauop(eval_expr(rec, x)?),
        WordExpr::Shuffle(cs) => {
            let vals = cs.iter().map(|c| eval_expr(rec, c)).collect::<Result<Vec<_>>>()?;
            alg.kappa(&vals)
        }
    })
}
