//! JSON documents describing explicit algebras and recognizers.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{elems_of_mask, Algebra, Elem, KappaSpec, Provenance};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, WordExpr};
use crate::recognizer::{Letter, Recognizer};

/// Largest carrier an explicit document may describe.
pub const DOCUMENT_MAX: usize = 12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaEntry {
    pub set: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub elements: Vec<String>,
    pub unit: String,
    pub dot: Vec<Vec<String>>,
    pub tau: Vec<String>,
    pub tauop: Vec<String>,
    pub kappa: Vec<KappaEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecognizerDoc {
    #[serde(flatten)]
    pub algebra: AlgebraDoc,
    pub alphabet: Vec<String>,
    pub morphism: BTreeMap<String, String>,
    pub accept: Vec<String>,
}

fn lookup(index: &HashMap<&str, u32>, name: &str) -> Result<Elem> {
    index.get(name).map(|&i| Elem(i)).ok_or_else(|| Error::UnknownElement(name.to_string()))
}

impl AlgebraDoc {
    pub fn build(&self) -> Result<Algebra> {
        let n = self.elements.len();
        if n == 0 {
            return Err(Error::Document("carrier is empty".into()));
        }
        if n > DOCUMENT_MAX {
            return Err(Error::Document(format!("explicit tables are limited to {DOCUMENT_MAX} elements, got {n}")));
        }
        let mut index: HashMap<&str, u32> = HashMap::new();
        for (i, name) in self.elements.iter().enumerate() {
            if index.insert(name.as_str(), i as u32).is_some() {
                return Err(Error::Document(format!("duplicate element name `{name}`")));
            }
        }
        let unit = lookup(&index, &self.unit)?;
        if self.dot.len() != n || self.dot.iter().any(|row| row.len() != n) {
            return Err(Error::Document(format!("dot must be a {n}x{n} table")));
        }
        if self.tau.len() != n || self.tauop.len() != n {
            return Err(Error::Document(format!("tau and tauop must list {n} values")));
        }
        let mut dot = Vec::with_capacity(n * n);
        for row in &self.dot {
            for v in row {
                dot.push(lookup(&index, v)?);
            }
        }
        let tau = self.tau.iter().map(|v| lookup(&index, v)).collect::<Result<Vec<_>>>()?;
        let tauop = self.tauop.iter().map(|v| lookup(&index, v)).collect::<Result<Vec<_>>>()?;
        let mut table: Vec<Option<Elem>> = vec![None; 1 << n];
        for entry in &self.kappa {
            if entry.set.is_empty() {
                return Err(Error::Document("kappa entry with an empty set".into()));
            }
            let mut mask = 0usize;
            for name in &entry.set {
                mask |= 1 << lookup(&index, name)?.0;
            }
            let v = lookup(&index, &entry.value)?;
            if table[mask].replace(v).is_some() {
                return Err(Error::Document(format!("duplicate kappa entry for {{{}}}", entry.set.join(","))));
            }
        }
        let mut full = vec![unit; 1 << n];
        for mask in 1..1usize << n {
            match table[mask] {
                Some(v) => full[mask] = v,
                None => {
                    let names: Vec<&str> = elems_of_mask(mask as u64).iter().map(|e| self.elements[e.index()].as_str()).collect();
                    return Err(Error::MissingKappa(names.join(",")));
                }
            }
        }
        Algebra::from_tables(self.elements.clone(), unit, dot, tau, tauop, KappaSpec::Table(full), Provenance::Explicit)
    }

    pub fn from_algebra(alg: &Algebra) -> Result<AlgebraDoc> {
        let n = alg.size();
        if n > DOCUMENT_MAX {
            return Err(Error::Document(format!("only carriers up to {DOCUMENT_MAX} elements can be exported, got {n}")));
        }
        let name = |e: Elem| alg.name(e);
        Ok(AlgebraDoc {
            elements: alg.elements().map(name).collect(),
            unit: name(alg.unit()),
            dot: alg.elements().map(|a| alg.elements().map(|b| name(alg.dot(a, b))).collect()).collect(),
            tau: alg.elements().map(|a| name(alg.tau(a))).collect(),
            tauop: alg.elements().map(|a| name(alg.tauop(a))).collect(),
            kappa: (1u64..1 << n)
                .map(|mask| {
                    let set = elems_of_mask(mask);
                    KappaEntry { set: set.iter().map(|&e| name(e)).collect(), value: name(alg.kappa(&set)) }
                })
                .collect(),
        })
    }
}

fn parse_letter(text: &str) -> Result<Letter> {
    match parse_expr(text)? {
        WordExpr::Letter(l) => Ok(l),
        _ => Err(Error::Document(format!("`{text}` is not a letter"))),
    }
}

impl RecognizerDoc {
    pub fn build(&self) -> Result<Recognizer> {
        let alg = Arc::new(self.algebra.build()?);
        let elem = |name: &str| alg.elem_by_name(name).ok_or_else(|| Error::UnknownElement(name.to_string()));
        let mut letters = Vec::new();
        for l in &self.alphabet {
            let v = self.morphism.get(l).ok_or_else(|| Error::Document(format!("letter `{l}` has no image")))?;
            letters.push((parse_letter(l)?, elem(v)?));
        }
        if let Some(extra) = self.morphism.keys().find(|k| !self.alphabet.contains(k)) {
            return Err(Error::Document(format!("morphism maps `{extra}`, which is not in the alphabet")));
        }
        let accept = self.accept.iter().map(|a| elem(a)).collect::<Result<Vec<_>>>()?;
        Recognizer::new(alg.clone(), letters, accept)
    }

    pub fn from_recognizer(rec: &Recognizer) -> Result<RecognizerDoc> {
        let alg = rec.algebra();
        Ok(RecognizerDoc {
            algebra: AlgebraDoc::from_algebra(alg)?,
            alphabet: rec.alphabet().iter().map(|l| l.to_string()).collect(),
            morphism: rec.letters().map(|(l, e)| (l.to_string(), alg.name(e))).collect(),
            accept: rec.accept().iter().map(|&e| alg.name(e)).collect(),
        })
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

/// Reads an algebra document. Checks shape only, not the axioms.
pub fn load_algebra(text: &str) -> Result<Algebra> {
    parse_json::<AlgebraDoc>(text)?.build()
}

pub fn load_recognizer(text: &str) -> Result<Recognizer> {
    parse_json::<RecognizerDoc>(text)?.build()
}

/// True when the document carries recognizer fields.
pub fn is_recognizer_document(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("alphabet").is_some())
        .unwrap_or(false)
}

pub fn algebra_to_json(alg: &Algebra) -> Result<String> {
    Ok(serde_json::to_string_pretty(&AlgebraDoc::from_algebra(alg)?).expect("documents serialize"))
}

pub fn recognizer_to_json(rec: &Recognizer) -> Result<String> {
    Ok(serde_json::to_string_pretty(&RecognizerDoc::from_recognizer(rec)?).expect("documents serialize"))
}
