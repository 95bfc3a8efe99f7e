//! Additive labellings of finite orderings and Ramseian splits.

use std::collections::HashMap;

use crate::algebra::{Algebra, Elem};
use crate::error::{Error, Result};

/// Anything with an associative product. Only the product is used here.
pub trait Semigroup {
    fn carrier_size(&self) -> usize;
    fn product(&self, a: Elem, b: Elem) -> Elem;
    fn elem_name(&self, a: Elem) -> String {
        a.0.to_string()
    }
}

impl Semigroup for Algebra {
    fn carrier_size(&self) -> usize {
        self.size()
    }

    fn product(&self, a: Elem, b: Elem) -> Elem {
        self.dot(a, b)
    }

    fn elem_name(&self, a: Elem) -> String {
        self.name(a)
    }
}

/// A bare multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    pub n: usize,
    pub table: Vec<Elem>,
}

impl CayleyTable {
    pub fn is_associative(&self) -> bool {
        let n = self.n as u32;
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    let (a, b, c) = (Elem(a), Elem(b), Elem(c));
                    self.product(self.product(a, b), c) == self.product(a, self.product(b, c))
                })
            })
        })
    }
}

impl Semigroup for CayleyTable {
    fn carrier_size(&self) -> usize {
        self.n
    }

    fn product(&self, a: Elem, b: Elem) -> Elem {
        self.table[a.index() * self.n + b.index()]
    }
}

/// Values `sigma(x, y)` for positions `0 <= x < y <= len`.
#[derive(Clone, Debug)]
pub struct AdditiveLabelling {
    len: usize,
    carrier: usize,
    dot: Vec<Elem>,
    names: Vec<String>,
    values: Vec<Elem>,
}

impl AdditiveLabelling {
    /// Labelling whose unit steps `sigma(x, x+1)` are `steps[x]`.
    pub fn from_steps(sg: &dyn Semigroup, steps: &[Elem]) -> AdditiveLabelling {
        let n = sg.carrier_size();
        let mut dot = Vec::with_capacity(n * n);
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                dot.push(sg.product(Elem(a), Elem(b)));
            }
        }
        let len = steps.len();
        let w = len + 1;
        let mut values = vec![Elem(0); w * w];
        for x in 0..len {
            let mut acc = steps[x];
            values[x * w + x + 1] = acc;
            for (y, &s) in steps.iter().enumerate().skip(x + 1) {
                acc = dot[acc.index() * n + s.index()];
                values[x * w + y + 1] = acc;
            }
        }
        let names = (0..n as u32).map(|a| sg.elem_name(Elem(a))).collect();
        AdditiveLabelling { len, carrier: n, dot, names, values }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier
    }

    pub fn value(&self, x: usize, y: usize) -> Elem {
        assert!(x < y && y <= self.len, "value({x},{y}) outside 0 <= x < y <= {}", self.len);
        self.values[x * (self.len + 1) + y]
    }

    pub fn dot(&self, a: Elem, b: Elem) -> Elem {
        self.dot[a.index() * self.carrier + b.index()]
    }

    pub fn is_idempotent(&self, a: Elem) -> bool {
        self.dot(a, a) == a
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a.index()]
    }
}

/// Labelling of a finite word: `sigma(x, y)` is the product of the letters at `x..y`.
pub fn labelling_from_word(sg: &dyn Semigroup, h: &HashMap<String, Elem>, word: &[String]) -> Result<AdditiveLabelling> {
    if word.is_empty() {
        return Err(Error::Invalid("labelling of an empty word".into()));
    }
    let steps = word
        .iter()
        .map(|l| h.get(l).copied().ok_or_else(|| Error::UnknownLetter(l.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdditiveLabelling::from_steps(sg, &steps))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    /// Level of each position, starting at 1.
    pub levels: Vec<usize>,
    pub height: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighbourClass {
    pub level: usize,
    pub positions: Vec<usize>,
    /// The constant value of the class, when it has two or more positions.
    pub value: Option<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitViolation {
    LevelOutOfRange { position: usize, level: usize },
    NotConstant { class_min: usize, x: usize, y: usize, value: Elem, expected: Elem },
    NotIdempotent { class_min: usize, value: Elem },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub is_ramseian: bool,
    pub height: usize,
    pub classes: Vec<NeighbourClass>,
    pub violations: Vec<SplitViolation>,
}

/// Neighbourhood classes sorted by their least position.
pub fn neighbour_classes(levels: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let height = levels.iter().copied().max().unwrap_or(0);
    let mut classes = Vec::new();
    for k in 1..=height {
        let mut current: Vec<usize> = Vec::new();
        for (p, &l) in levels.iter().enumerate() {
            if l > k && !current.is_empty() {
                classes.push((k, std::mem::take(&mut current)));
            } else if l == k {
                current.push(p);
            }
        }
        if !current.is_empty() {
            classes.push((k, current));
        }
    }
    classes.sort_by_key(|(_, c)| c[0]);
    classes
}

pub fn verify_split(lab: &AdditiveLabelling, split: &Split) -> SplitReport {
    let mut violations = Vec::new();
    for (p, &l) in split.levels.iter().enumerate() {
        if l == 0 || l > split.height {
            violations.push(SplitViolation::LevelOutOfRange { position: p, level: l });
        }
    }
    if split.levels.len() != lab.len() {
        violations.push(SplitViolation::LevelOutOfRange { position: split.levels.len(), level: 0 });
    }
    let mut classes = Vec::new();
    for (level, positions) in neighbour_classes(&split.levels) {
        let mut value = None;
        if positions.len() >= 2 {
            let class_min = positions[0];
            let e = lab.value(positions[0], positions[1]);
            for (i, &x) in positions.iter().enumerate() {
                for &y in &positions[i + 1..] {
                    let v = lab.value(x, y);
                    if v != e {
                        violations.push(SplitViolation::NotConstant { class_min, x, y, value: v, expected: e });
                    }
                }
            }
            if !lab.is_idempotent(e) {
                violations.push(SplitViolation::NotIdempotent { class_min, value: e });
            }
            value = Some(e);
        }
        classes.push(NeighbourClass { level, positions, value });
    }
    SplitReport {
        is_ramseian: violations.is_empty(),
        height: split.levels.iter().copied().max().unwrap_or(0),
        classes,
        violations,
    }
}

const NONE: u32 = u32::MAX;

/// A Ramseian split of least height, by dynamic programming over intervals.
///
/// In any split the positions of maximal level inside an interval form a single class;
/// removing them leaves independent sub-intervals of smaller height.
pub fn compute_split(lab: &AdditiveLabelling) -> Split {
    let n = lab.len();
    if n == 0 {
        return Split { levels: Vec::new(), height: 0 };
    }
    let idems: Vec<Elem> = (0..lab.carrier_size() as u32).map(Elem).filter(|&e| lab.is_idempotent(e)).collect();
    let ne = idems.len();
    // best[a][b] for a <= b; intervals with a > b have height 0
    let mut best = vec![0u32; n * n];
    let mut top = vec![0u32; n * n];
    // chain bookkeeping for the current left end, kept for every left end for reconstruction
    let mut pred = vec![NONE; n * ne * n];
    let mut chain_kind = vec![NONE; n * n];
    let get = |best: &Vec<u32>, a: usize, b: isize| -> u32 {
        if b < a as isize {
            0
        } else {
            best[a * n + b as usize]
        }
    };
    for a in (0..n).rev() {
        let mut f = vec![u32::MAX; ne * n];
        let mut chain = vec![u32::MAX; n];
        for b in a..n {
            let single = get(&best, a, b as isize - 1);
            let mut cmin = single;
            let mut ckind = NONE;
            for (ei, &e) in idems.iter().enumerate() {
                let mut v = single;
                let mut p = NONE;
                for s in a..b {
                    let fs = f[ei * n + s];
                    if fs != u32::MAX && lab.value(s, b) == e {
                        let cand = fs.max(get(&best, s + 1, b as isize - 1));
                        if cand < v {
                            v = cand;
                            p = s as u32;
                        }
                    }
                }
                f[ei * n + b] = v;
                pred[(a * ne + ei) * n + b] = p;
                if v < cmin {
                    cmin = v;
                    ckind = ei as u32;
                }
            }
            chain[b] = cmin;
            chain_kind[a * n + b] = ckind;
            let mut h = u32::MAX;
            let mut arg = 0;
            for t in a..=b {
                let cand = chain[t].max(get(&best, t + 1, b as isize));
                if cand < h {
                    h = cand;
                    arg = t;
                }
            }
            best[a * n + b] = h + 1;
            top[a * n + b] = arg as u32;
        }
    }
    let mut levels = vec![0usize; n];
    let mut stack = vec![(0usize, n - 1)];
    while let Some((a, b)) = stack.pop() {
        let h = best[a * n + b] as usize;
        let mut t = top[a * n + b] as usize;
        if t < b {
            stack.push((t + 1, b));
        }
        let kind = chain_kind[a * n + t];
        loop {
            levels[t] = h;
            let p = if kind == NONE { NONE } else { pred[(a * ne + kind as usize) * n + t] };
            let lo = if p == NONE { a } else { p as usize + 1 };
            if lo < t {
                stack.push((lo, t - 1));
            }
            if p == NONE {
                break;
            }
            t = p as usize;
        }
    }
    Split { height: best[n - 1] as usize, levels }
}
