use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::{product_algebra, Algebra, Elem};
use crate::builtins::{before_elem, sing_alg, subset_alg, trivial_algebra, BAD, O, OK, Z};
use crate::error::{Error, Result};
use crate::expr::{eval_expr, WordExpr};
use crate::minimize::minimize;
use crate::powerset::project_recognizer;
use crate::recognizer::{Letter, Recognizer};
use crate::saturate::{is_empty, trim_reachable, Emptiness, Limits};

use super::desugar::desugar;
use super::formula::Formula;

/// Recognizer over the base alphabet expanded by the marks of `vars` (sorted).
#[derive(Clone, Debug)]
pub struct CompiledRecognizer {
    pub recognizer: Recognizer,
    pub vars: Vec<String>,
    pub alphabet: Vec<String>,
}

/// Working form: letter `(b, mask)` has image `images[b << |vars| | mask]`.
struct Comp {
    alg: Arc<Algebra>,
    vars: Vec<String>,
    images: Vec<Elem>,
    accept: BTreeSet<Elem>,
}

struct Compiler<'a> {
    base: &'a [String],
    limits: &'a Limits,
}

fn marks_of(vars: &[String], mask: usize) -> impl Iterator<Item = &String> {
    vars.iter().enumerate().filter(move |(i, _)| mask >> i & 1 == 1).map(|(_, v)| v)
}

impl Comp {
    fn recognizer(&self, base: &[String]) -> Recognizer {
        let w = self.vars.len();
        let letters = base.iter().enumerate().flat_map(|(b, name)| {
            (0..1usize << w).map(move |mask| (Letter::marked(name.clone(), marks_of(&self.vars, mask).cloned()), self.images[b << w | mask]))
        });
        Recognizer::new(self.alg.clone(), letters.collect::<Vec<_>>(), self.accept.iter().copied()).expect("compiled recognizers are well formed")
    }

    fn from_recognizer(rec: &Recognizer, vars: Vec<String>, base: &[String]) -> Comp {
        let w = vars.len();
        let mut images = Vec::with_capacity(base.len() << w);
        for name in base {
            for mask in 0..1usize << w {
                let l = Letter::marked(name.clone(), marks_of(&vars, mask).cloned());
                images.push(rec.image(&l).expect("every expanded letter has an image"));
            }
        }
        Comp { alg: rec.algebra().clone(), vars, images, accept: rec.accept().clone() }
    }

    /// Images over a larger variable list; marks of the new variables are ignored.
    fn cylindrify(&self, vars: &[String], nbase: usize) -> Vec<Elem> {
        let w = vars.len();
        let old = self.vars.len();
        let place: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|u| u == v).unwrap()).collect();
        let mut out = Vec::with_capacity(nbase << w);
        for b in 0..nbase {
            for mask in 0..1usize << w {
                let m: usize = (0..old).filter(|&i| mask >> place[i] & 1 == 1).map(|i| 1 << i).sum();
                out.push(self.images[b << old | m]);
            }
        }
        out
    }

    fn accepts_everything(&self) -> bool {
        self.accept.len() == self.alg.size()
    }
}

impl Compiler<'_> {
    fn atom(&self, alg: Algebra, vars: Vec<String>, accept: Vec<Elem>, image: impl Fn(&str, &dyn Fn(&str) -> bool) -> Elem) -> Comp {
        let w = vars.len();
        let mut images = Vec::new();
        for b in self.base {
            for mask in 0..1usize << w {
                let has = |v: &str| vars.iter().position(|u| u == v).is_some_and(|i| mask >> i & 1 == 1);
                images.push(image(b, &has));
            }
        }
        Comp { alg: Arc::new(alg), vars, images, accept: accept.into_iter().collect() }
    }

    fn constant(&self, value: bool, vars: Vec<String>) -> Comp {
        let accept = if value { vec![Elem(0)] } else { vec![] };
        self.atom(trivial_algebra(), vars, accept, |_, _| Elem(0))
    }

    fn reduce(&self, rec: &Recognizer) -> Result<Recognizer> {
        minimize(&trim_reachable(rec, self.limits)?, self.limits)
    }

    fn compile(&self, f: &Formula) -> Result<Comp> {
        let vars = |xs: &[&String]| -> Vec<String> {
            let set: BTreeSet<String> = xs.iter().map(|s| s.to_string()).collect();
            set.into_iter().collect()
        };
        Ok(match f {
            Formula::True => self.constant(true, vec![]),
            Formula::False => self.constant(false, vec![]),
            Formula::Sub(x, y) => self.atom(subset_alg(), vars(&[x, y]), vec![OK], |_, has| {
                if has(x) && !has(y) {
                    BAD
                } else {
                    OK
                }
            }),
            Formula::Letter(a, x) => self.atom(subset_alg(), vars(&[x]), vec![OK], |b, has| {
                if has(x) && b != a {
                    BAD
                } else {
                    OK
                }
            }),
            Formula::Sing(x) => self.atom(sing_alg(), vars(&[x]), vec![O], |_, has| if has(x) { O } else { Z }),
            Formula::Before(x, y) => {
                let accept = (0..8).map(Elem).filter(|e| e.0 & 1 == 0).collect();
                self.atom(crate::builtins::before_alg(), vars(&[x, y]), accept, |_, has| {
                    let (hx, hy) = (has(x), has(y));
                    before_elem(hx, hy, hx && hy)
                })
            }
            Formula::Not(g) => {
                let c = self.compile(g)?;
                let accept = c.alg.elements().filter(|e| !c.accept.contains(e)).collect();
                Comp { accept, ..c }
            }
            Formula::And(a, b) => {
                let c1 = self.compile(a)?;
                let c2 = self.compile(b)?;
                let vs = vars(&c1.vars.iter().chain(&c2.vars).collect::<Vec<_>>());
                if c1.accept.is_empty() || c2.accept.is_empty() {
                    return Ok(self.constant(false, vs));
                }
                if c1.accepts_everything() {
                    return Ok(Comp { images: c2.cylindrify(&vs, self.base.len()), vars: vs, ..c2 });
                }
                if c2.accepts_everything() {
                    return Ok(Comp { images: c1.cylindrify(&vs, self.base.len()), vars: vs, ..c1 });
                }
                self.conjunction(&c1, &c2, vs).map_err(|e| e.in_context(|| f.to_string()))?
            }
            Formula::Exists(x, g) => {
                let c = self.compile(g)?;
                if !c.vars.contains(x) {
                    return Ok(c);
                }
                let rest: Vec<String> = c.vars.iter().filter(|v| *v != x).cloned().collect();
                if c.accept.is_empty() {
                    return Ok(self.constant(false, rest));
                }
                let rec = c.recognizer(self.base);
                let projected = project_recognizer(&rec, |l| Letter::marked(l.name.clone(), l.marks.iter().filter(|m| *m != x).cloned()), self.limits)
                    .and_then(|p| minimize(&p, self.limits))
                    .map_err(|e| e.in_context(|| f.to_string()))?;
                Comp::from_recognizer(&projected, rest, self.base)
            }
            other => return Err(Error::Invalid(format!("`{other}` is not in core form"))),
        })
    }

    fn conjunction(&self, c1: &Comp, c2: &Comp, vs: Vec<String>) -> Result<Comp> {
        let prod = Arc::new(product_algebra(&c1.alg, &c2.alg)?);
        let n2 = c2.alg.size() as u32;
        let i1 = c1.cylindrify(&vs, self.base.len());
        let i2 = c2.cylindrify(&vs, self.base.len());
        let images: Vec<Elem> = i1.iter().zip(&i2).map(|(a, b)| Elem(a.0 * n2 + b.0)).collect();
        let accept: Vec<Elem> = c1.accept.iter().flat_map(|a| c2.accept.iter().map(move |b| Elem(a.0 * n2 + b.0))).collect();
        let comp = Comp { alg: prod, vars: vs, images, accept: accept.into_iter().collect() };
        let reduced = self.reduce(&comp.recognizer(self.base))?;
        Ok(Comp::from_recognizer(&reduced, comp.vars, self.base))
    }
}

fn base_alphabet(alphabet: &[String]) -> Result<Vec<String>> {
    let set: BTreeSet<String> = alphabet.iter().cloned().collect();
    if set.is_empty() {
        return Err(Error::Invalid("the alphabet is empty".into()));
    }
    Ok(set.into_iter().collect())
}

/// Builds a recognizer for the models of `f`. Sugar is expanded first if present.
pub fn compile(f: &Formula, alphabet: &[String], limits: &Limits) -> Result<CompiledRecognizer> {
    let base = base_alphabet(alphabet)?;
    let core = if f.is_core() { f.clone() } else { desugar(f) };
    let c = Compiler { base: &base, limits }.compile(&core)?;
    Ok(CompiledRecognizer { recognizer: c.recognizer(&base), vars: c.vars, alphabet: base })
}

fn compile_closed(f: &Formula, alphabet: &[String], limits: &Limits) -> Result<CompiledRecognizer> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect::<Vec<_>>().join(", ")));
    }
    compile(f, alphabet, limits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(WordExpr),
    Unsat,
}

pub fn decide_sat(f: &Formula, alphabet: &[String], limits: &Limits) -> Result<SatResult> {
    let c = compile_closed(f, alphabet, limits)?;
    Ok(match is_empty(&c.recognizer, limits)? {
        Emptiness::Empty => SatResult::Unsat,
        Emptiness::Nonempty(w) => SatResult::Sat(w),
    })
}

pub fn decide_valid(f: &Formula, alphabet: &[String], limits: &Limits) -> Result<bool> {
    Ok(decide_sat(&Formula::not(f.clone()), alphabet, limits)? == SatResult::Unsat)
}

/// A word on which the two sentences disagree, if there is one.
pub fn distinguishing_word(f1: &Formula, f2: &Formula, alphabet: &[String], limits: &Limits) -> Result<Option<WordExpr>> {
    let c1 = compile_closed(f1, alphabet, limits)?;
    let c2 = compile_closed(f2, alphabet, limits)?;
    let (r1, r2) = (&c1.recognizer, &c2.recognizer);
    let prod = Arc::new(product_algebra(r1.algebra(), r2.algebra())?);
    let n2 = r2.algebra().size() as u32;
    let letters: Vec<(Letter, Elem)> = r1.letters().map(|(l, a)| (l.clone(), Elem(a.0 * n2 + r2.image(l).unwrap().0))).collect();
    let mut differ = Vec::new();
    for a in r1.algebra().elements() {
        for b in r2.algebra().elements() {
            if r1.accepts(a) != r2.accepts(b) {
                differ.push(Elem(a.0 * n2 + b.0));
            }
        }
    }
    let rec = Recognizer::new(prod, letters, differ)?;
    Ok(match is_empty(&rec, limits)? {
        Emptiness::Empty => None,
        Emptiness::Nonempty(w) => Some(w),
    })
}

pub fn decide_equiv(f1: &Formula, f2: &Formula, alphabet: &[String], limits: &Limits) -> Result<bool> {
    Ok(distinguishing_word(f1, f2, alphabet, limits)?.is_none())
}

pub fn model_check(f: &Formula, e: &WordExpr, alphabet: &[String], limits: &Limits) -> Result<bool> {
    let c = compile_closed(f, alphabet, limits)?;
    let v = eval_expr(&c.recognizer, e)?;
    Ok(c.recognizer.accepts(v))
}
