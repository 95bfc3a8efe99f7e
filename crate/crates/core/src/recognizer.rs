use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Algebra, Elem};
use crate::error::{Error, Result};

/// A letter of a (possibly expanded) alphabet: a base token plus the set variables marked at it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub name: String,
    pub marks: Vec<String>,
}

impl Letter {
    pub fn plain(name: impl Into<String>) -> Letter {
        Letter { name: name.into(), marks: Vec::new() }
    }

    pub fn marked<S: Into<String>>(name: impl Into<String>, marks: impl IntoIterator<Item = S>) -> Letter {
        let mut marks: Vec<String> = marks.into_iter().map(Into::into).collect();
        marks.sort();
        marks.dedup();
        Letter { name: name.into(), marks }
    }

    pub fn has_mark(&self, var: &str) -> bool {
        self.marks.binary_search_by(|m| m.as_str().cmp(var)).is_ok()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.marks.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}[{}]", self.name, self.marks.join(","))
        }
    }
}

/// Algebra, letter morphism and accepting set.
#[derive(Clone, Debug)]
pub struct Recognizer {
    algebra: Arc<Algebra>,
    alphabet: Vec<Letter>,
    morphism: Vec<Elem>,
    accept: BTreeSet<Elem>,
}

impl Recognizer {
    pub fn new(
        algebra: Arc<Algebra>,
        letters: impl IntoIterator<Item = (Letter, Elem)>,
        accept: impl IntoIterator<Item = Elem>,
    ) -> Result<Recognizer> {
        let mut pairs: Vec<(Letter, Elem)> = letters.into_iter().collect();
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!("letter `{}` is mapped twice", w[0].0)));
            }
        }
        let n = algebra.size();
        let accept: BTreeSet<Elem> = accept.into_iter().collect();
        for e in pairs.iter().map(|p| p.1).chain(accept.iter().copied()) {
            if e.index() >= n {
                return Err(Error::Invalid(format!("element {e} is outside the carrier")));
            }
        }
        let (alphabet, morphism) = pairs.into_iter().unzip();
        Ok(Recognizer { algebra, alphabet, morphism, accept })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    /// Letters in sorted order.
    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn letters(&self) -> impl Iterator<Item = (&Letter, Elem)> {
        self.alphabet.iter().zip(self.morphism.iter().copied())
    }

    pub fn image(&self, letter: &Letter) -> Option<Elem> {
        self.alphabet.binary_search(letter).ok().map(|i| self.morphism[i])
    }

    pub fn accept(&self) -> &BTreeSet<Elem> {
        &self.accept
    }

    pub fn accepts(&self, e: Elem) -> bool {
        self.accept.contains(&e)
    }

    pub fn with_accept(&self, accept: impl IntoIterator<Item = Elem>) -> Recognizer {
        Recognizer {
            algebra: self.algebra.clone(),
            alphabet: self.alphabet.clone(),
            morphism: self.morphism.clone(),
            accept: accept.into_iter().collect(),
        }
    }

    /// Same algebra and letters, accepting set complemented within the carrier.
    pub fn complement(&self) -> Recognizer {
        self.with_accept(self.algebra.elements().filter(|e| !self.accept.contains(e)))
    }
}
