//! Checker for the five axiom groups of a finite algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{elems_of_mask, Algebra, Elem};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    /// The identity that fails, e.g. `tau(a b) = a tau(b a)`.
    pub law: &'static str,
    /// The witnessing elements or subsets.
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} at {}: {} != {}", self.axiom, self.law, self.instance, self.lhs, self.rhs)
    }
}

/// Stored violations are capped; `counts` always covers every violation found.
pub const MAX_REPORTED: usize = 1000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub checked: u64,
    pub violations: Vec<Violation>,
    pub counts: BTreeMap<Axiom, u64>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn axioms(&self) -> BTreeSet<Axiom> {
        self.counts.keys().copied().collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS ({} instances checked)", self.checked);
        }
        writeln!(f, "FAIL ({} violations in {} instances checked)", self.total(), self.checked)?;
        for (a, c) in &self.counts {
            writeln!(f, "  {a}: {c}")?;
        }
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        if self.total() > self.violations.len() as u64 {
            writeln!(f, "  ... {} more", self.total() - self.violations.len() as u64)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

/// Largest carrier accepted by exhaustive mode.
pub const EXHAUSTIVE_MAX: usize = 12;

fn set_name(alg: &Algebra, set: &[Elem]) -> String {
    let names: Vec<String> = set.iter().map(|&e| alg.name(e)).collect();
    format!("{{{}}}", names.join(","))
}

struct Checker<'a> {
    alg: &'a Algebra,
    report: ViolationReport,
}

impl Checker<'_> {
    fn expect(&mut self, axiom: Axiom, law: &'static str, instance: impl FnOnce() -> String, lhs: Elem, rhs: Elem) {
        self.report.checked += 1;
        if lhs != rhs {
            *self.report.counts.entry(axiom).or_insert(0) += 1;
            if self.report.violations.len() < MAX_REPORTED {
                let v = Violation {
                    axiom,
                    law,
                    instance: instance(),
                    lhs: self.alg.name(lhs),
                    rhs: self.alg.name(rhs),
                };
                self.report.violations.push(v);
            }
        }
    }

    fn assoc(&mut self, a: Elem, b: Elem, c: Elem) {
        let alg = self.alg;
        let l = alg.dot(alg.dot(a, b), c);
        let r = alg.dot(a, alg.dot(b, c));
        self.expect(Axiom::A1, "(a b) c = a (b c)", || format!("a={}, b={}, c={}", alg.name(a), alg.name(b), alg.name(c)), l, r);
    }

    fn iteration_pair(&mut self, a: Elem, b: Elem) {
        let alg = self.alg;
        let inst = || format!("a={}, b={}", alg.name(a), alg.name(b));
        let l = alg.tau(alg.dot(a, b));
        let r = alg.dot(a, alg.tau(alg.dot(b, a)));
        self.expect(Axiom::A2, "tau(a b) = a tau(b a)", inst, l, r);
        let l = alg.tauop(alg.dot(b, a));
        let r = alg.dot(alg.tauop(alg.dot(a, b)), a);
        self.expect(Axiom::A3, "tauop(b a) = tauop(a b) a", inst, l, r);
    }

    fn powers(&mut self, a: Elem) {
        let alg = self.alg;
        let mut seen = vec![a];
        let mut p = alg.dot(a, a);
        let mut k = 2;
        while !seen.contains(&p) {
            let inst = || format!("a={}, k={k}", alg.name(a));
            self.expect(Axiom::A2, "tau(a^k) = tau(a)", inst, alg.tau(p), alg.tau(a));
            self.expect(Axiom::A3, "tauop(a^k) = tauop(a)", inst, alg.tauop(p), alg.tauop(a));
            seen.push(p);
            p = alg.dot(p, a);
            k += 1;
        }
    }

    fn unit_laws(&mut self, x: Elem) {
        let alg = self.alg;
        let one = alg.unit();
        let inst = || format!("x={}", alg.name(x));
        self.expect(Axiom::A5, "x 1 = x", inst, alg.dot(x, one), x);
        self.expect(Axiom::A5, "1 x = x", inst, alg.dot(one, x), x);
    }

    fn unit_constants(&mut self) {
        let alg = self.alg;
        let one = alg.unit();
        self.expect(Axiom::A5, "tau(1) = 1", String::new, alg.tau(one), one);
        self.expect(Axiom::A5, "tauop(1) = 1", String::new, alg.tauop(one), one);
        self.expect(Axiom::A5, "kappa({1}) = 1", String::new, alg.kappa(&[one]), one);
    }

    fn kappa_unit(&mut self, p: &[Elem]) {
        let alg = self.alg;
        let mut q = p.to_vec();
        q.push(alg.unit());
        let inst = || format!("P={}", set_name(alg, p));
        let (l, r) = (alg.kappa(p), alg.kappa(&q));
        self.expect(Axiom::A5, "kappa(P) = kappa(P u {1})", inst, l, r);
    }

    /// Equalities of the chain that only involve `kappa(P)` and single members of `P`.
    fn shuffle_chain(&mut self, p: &[Elem], v: Elem) {
        let alg = self.alg;
        let pn = set_name(alg, p);
        self.expect(Axiom::A4, "kappa(P) kappa(P) = kappa(P)", || format!("P={pn}"), alg.dot(v, v), v);
        self.expect(Axiom::A4, "tau(kappa(P)) = kappa(P)", || format!("P={pn}"), alg.tau(v), v);
        self.expect(Axiom::A4, "tauop(kappa(P)) = kappa(P)", || format!("P={pn}"), alg.tauop(v), v);
        for &c in p {
            let inst = || format!("P={pn}, c={}", alg.name(c));
            self.expect(Axiom::A4, "kappa(P) c kappa(P) = kappa(P)", inst, alg.dot(v, alg.dot(c, v)), v);
            self.expect(Axiom::A4, "tau(kappa(P) c) = kappa(P)", inst, alg.tau(alg.dot(v, c)), v);
            self.expect(Axiom::A4, "tauop(c kappa(P)) = kappa(P)", inst, alg.tauop(alg.dot(c, v)), v);
        }
    }

    fn absorbing_set(&self, p: &[Elem], v: Elem) -> Vec<Elem> {
        let alg = self.alg;
        let mut abs = BTreeSet::from([v]);
        for &a in p {
            abs.insert(alg.dot(a, v));
            abs.insert(alg.dot(v, a));
            for &b in p {
                abs.insert(alg.dot(a, alg.dot(v, b)));
            }
        }
        abs.into_iter().collect()
    }

    fn absorption(&mut self, p: &[Elem], v: Elem, p1: &[Elem], p2: &[Elem]) {
        let mut z: Vec<Elem> = p1.iter().chain(p2).copied().collect();
        z.sort_unstable();
        z.dedup();
        let alg = self.alg;
        let r = alg.kappa(&z);
        let inst = || format!("P={}, P'={}, P''={}", set_name(alg, p), set_name(alg, p1), set_name(alg, p2));
        self.expect(Axiom::A4, "kappa(P' u P'') = kappa(P)", inst, r, v);
    }
}

pub fn check_axioms(alg: &Algebra, mode: CheckMode) -> Result<ViolationReport> {
    let mut ch = Checker { alg, report: ViolationReport::default() };
    match mode {
        CheckMode::Exhaustive => exhaustive(&mut ch)?,
        CheckMode::Sampled { seed, trials } => sampled(&mut ch, seed, trials),
    }
    Ok(ch.report)
}

fn exhaustive(ch: &mut Checker) -> Result<()> {
    let alg = ch.alg;
    let n = alg.size();
    if n > EXHAUSTIVE_MAX {
        return Err(Error::TooLargeForExhaustive { size: n, limit: EXHAUSTIVE_MAX });
    }
    let els: Vec<Elem> = alg.elements().collect();
    for &a in &els {
        for &b in &els {
            for &c in &els {
                ch.assoc(a, b, c);
            }
            ch.iteration_pair(a, b);
        }
        ch.powers(a);
        ch.unit_laws(a);
    }
    ch.unit_constants();
    for mask in 1u64..(1 << n) {
        let p = elems_of_mask(mask);
        let v = alg.kappa(&p);
        ch.kappa_unit(&p);
        ch.shuffle_chain(&p, v);
        let abs = ch.absorbing_set(&p, v);
        let abs_mask = abs.iter().fold(0u64, |m, e| m | 1 << e.0);
        let pool = mask | abs_mask;
        // every Z inside P u Abs(P) that meets Abs(P) splits as P' u P''
        let mut z = pool;
        while z != 0 {
            if z & abs_mask != 0 {
                let p1 = elems_of_mask(z & mask);
                let p2 = elems_of_mask(z & abs_mask);
                ch.absorption(&p, v, &p1, &p2);
            }
            z = (z - 1) & pool;
        }
    }
    Ok(())
}

fn random_subset(rng: &mut ChaCha8Rng, els: &[Elem]) -> Vec<Elem> {
    let size = match rng.gen_range(0..10) {
        0..=2 => 1,
        3..=5 => 2,
        6..=7 => 3,
        _ => 4,
    }
    .min(els.len());
    let mut p: Vec<Elem> = els.choose_multiple(rng, size).copied().collect();
    p.sort_unstable();
    p
}

fn sampled(ch: &mut Checker, seed: u64, trials: u64) {
    let alg = ch.alg;
    let els: Vec<Elem> = alg.elements().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ch.unit_constants();
    for _ in 0..trials {
        let pick = |rng: &mut ChaCha8Rng| els[rng.gen_range(0..els.len())];
        match rng.gen_range(0..5) {
            0 => {
                let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                ch.assoc(a, b, c);
            }
            1 => {
                let (a, b) = (pick(&mut rng), pick(&mut rng));
                ch.iteration_pair(a, b);
                ch.powers(a);
            }
            2 | 3 => {
                let p = random_subset(&mut rng, &els);
                let v = alg.kappa(&p);
                ch.shuffle_chain(&p, v);
                let abs = ch.absorbing_set(&p, v);
                let p1: Vec<Elem> = p.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                let mut p2: Vec<Elem> = abs.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                if p2.is_empty() {
                    p2.push(abs[rng.gen_range(0..abs.len())]);
                }
                ch.absorption(&p, v, &p1, &p2);
            }
            _ => {
                let x = pick(&mut rng);
                ch.unit_laws(x);
                let p = random_subset(&mut rng, &els);
                ch.kappa_unit(&p);
            }
        }
    }
}
