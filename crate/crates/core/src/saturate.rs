//! Least closure of a seed set under the four operators, with a witness expression per element.

use std::collections::HashMap;
use std::time::Instant;

use crate::algebra::{Algebra, Elem};
use crate::error::{Error, LimitKind, Result};
use crate::expr::WordExpr;
use crate::recognizer::{Letter, Recognizer};

#[derive(Clone, Debug)]
pub struct Limits {
    pub max_closure: usize,
    pub max_subsets_per_stage: u64,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_closure: 64, max_subsets_per_stage: 1 << 20, deadline: None }
    }
}

impl Limits {
    pub fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::limit(LimitKind::Deadline)),
            _ => Ok(()),
        }
    }

    fn subsets(&self, needed: u64) -> Result<()> {
        if needed > self.max_subsets_per_stage {
            Err(Error::limit(LimitKind::SubsetsPerStage { limit: self.max_subsets_per_stage, needed }))
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug)]
enum Origin {
    Seed(WordExpr),
    Dot(usize, usize),
    Tau(usize),
    TauOp(usize),
    Kappa(Vec<usize>),
}

/// Closure in discovery order, with stage numbers and derivations.
#[derive(Clone, Debug)]
pub struct SaturationResult {
    elems: Vec<Elem>,
    stages: Vec<usize>,
    origins: Vec<Origin>,
    index: HashMap<Elem, usize>,
}

impl SaturationResult {
    /// Closure elements in the order they were discovered.
    pub fn closure(&self) -> &[Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.index.contains_key(&e)
    }

    pub fn position(&self, e: Elem) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn stage(&self, e: Elem) -> Option<usize> {
        self.position(e).map(|i| self.stages[i])
    }

    pub fn witness(&self, e: Elem) -> Option<WordExpr> {
        let mut memo = HashMap::new();
        self.position(e).map(|i| self.build(i, &mut memo))
    }

    fn build(&self, i: usize, memo: &mut HashMap<usize, WordExpr>) -> WordExpr {
        if let Some(w) = memo.get(&i) {
            return w.clone();
        }
        let w = match &self.origins[i] {
            Origin::Seed(w) => w.clone(),
            Origin::Dot(a, b) => WordExpr::concat([self.build(*a, memo), self.build(*b, memo)]),
            Origin::Tau(a) => WordExpr::omega(self.build(*a, memo)),
            Origin::TauOp(a) => WordExpr::omega_op(self.build(*a, memo)),
            Origin::Kappa(ps) => WordExpr::shuffle(ps.iter().map(|&p| self.build(p, memo)).collect::<Vec<_>>()),
        };
        memo.insert(i, w.clone());
        w
    }
}

struct State<'a> {
    res: SaturationResult,
    limits: &'a Limits,
}

impl State<'_> {
    fn push(&mut self, e: Elem, origin: Origin, stage: usize) -> Result<()> {
        if self.res.index.contains_key(&e) {
            return Ok(());
        }
        if self.res.elems.len() >= self.limits.max_closure {
            return Err(Error::limit(LimitKind::ClosureSize { limit: self.limits.max_closure }));
        }
        self.res.index.insert(e, self.res.elems.len());
        self.res.elems.push(e);
        self.res.stages.push(stage);
        self.res.origins.push(origin);
        Ok(())
    }
}

const UNKNOWN: u32 = u32::MAX;

/// Value of the shuffle of the closure positions in `mask`.
pub(crate) fn kappa_of_mask(alg: &Algebra, elems: &[Elem], mask: u64) -> Elem {
    if let Some(tab) = alg.kappa_table() {
        let mut cm = 0usize;
        let mut m = mask;
        while m != 0 {
            cm |= 1 << elems[m.trailing_zeros() as usize].0;
            m &= m - 1;
        }
        return tab[cm];
    }
    let mut set: Vec<Elem> = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        set.push(elems[m.trailing_zeros() as usize]);
        m &= m - 1;
    }
    set.sort_unstable();
    alg.kappa_sorted(&set)
}

/// Whether `t` is one of `v`, `a v`, `v b`, `a v b` with `a, b` from the positions in `mask`.
pub(crate) fn absorbed(alg: &Algebra, elems: &[Elem], mask: u64, v: Elem, t: Elem) -> bool {
    if t == v {
        return true;
    }
    let members: Vec<Elem> = (0..64).filter(|i| mask >> i & 1 == 1).map(|i| elems[i]).collect();
    for &a in &members {
        let av = alg.dot(a, v);
        if av == t || alg.dot(v, a) == t {
            return true;
        }
        for &b in &members {
            if alg.dot(av, b) == t {
                return true;
            }
        }
    }
    false
}

/// Values of the shuffle over every subset mask of `elems`, with pruning where the
/// axioms fix the value. Masks below `table.len()` are taken as already filled.
pub(crate) fn fill_kappa_table(
    alg: &Algebra,
    elems: &[Elem],
    table: &mut Vec<u32>,
    upto: usize,
    limits: &Limits,
) -> Result<()> {
    let unit_bit = elems.iter().position(|&e| e == alg.unit()).map(|u| 1u64 << u);
    let hi = 1u64 << upto;
    let lo = table.len() as u64;
    if hi <= lo {
        return Ok(());
    }
    let prune = alg.kappa_is_expensive();
    table.resize(hi as usize, UNKNOWN);
    for mask in lo.max(1)..hi {
        if mask & 0xfff == 0 {
            limits.check_deadline()?;
        }
        if let Some(u) = unit_bit {
            if mask & u != 0 && mask != u && table[(mask ^ u) as usize] != UNKNOWN {
                table[mask as usize] = table[(mask ^ u) as usize];
                continue;
            }
        }
        let top = 63 - mask.leading_zeros() as u64;
        let rest = mask ^ (1 << top);
        if prune && rest != 0 && table[rest as usize] != UNKNOWN {
            let v = Elem(table[rest as usize]);
            if absorbed(alg, elems, rest, v, elems[top as usize]) {
                table[mask as usize] = v.0;
                continue;
            }
        }
        table[mask as usize] = kappa_of_mask(alg, elems, mask).0;
    }
    Ok(())
}

/// Projections of closure positions onto the two factors of a pair-shaped algebra.
pub(crate) struct PairLayout {
    pub left: Vec<Elem>,
    pub right: Vec<Elem>,
    pub lpos: Vec<usize>,
    pub rpos: Vec<usize>,
    pub adj: Vec<u64>,
}

impl PairLayout {
    pub fn new(alg: &Algebra, elems: &[Elem]) -> Option<PairLayout> {
        alg.factors()?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut li: HashMap<Elem, usize> = HashMap::new();
        let mut ri: HashMap<Elem, usize> = HashMap::new();
        let mut lpos = Vec::with_capacity(elems.len());
        let mut rpos = Vec::with_capacity(elems.len());
        for &e in elems {
            let (l, r) = alg.split_pair(e);
            let a = *li.entry(l).or_insert_with(|| {
                left.push(l);
                left.len() - 1
            });
            let b = *ri.entry(r).or_insert_with(|| {
                right.push(r);
                right.len() - 1
            });
            lpos.push(a);
            rpos.push(b);
        }
        if left.len() >= 64 || right.len() >= 64 {
            return None;
        }
        let mut adj = vec![0u64; left.len()];
        for (a, b) in lpos.iter().zip(&rpos) {
            adj[*a] |= 1 << b;
        }
        Some(PairLayout { left, right, lpos, rpos, adj })
    }

    pub fn cost(&self) -> u64 {
        let bits = self.left.len() + self.right.len();
        if bits >= 63 {
            u64::MAX
        } else {
            1 << bits
        }
    }

    /// Calls `f(x, y)` for every pair of projection masks realized by some nonempty subset.
    pub fn for_each_feasible(&self, limits: &Limits, mut f: impl FnMut(u64, u64) -> Result<()>) -> Result<()> {
        let a = self.left.len();
        let mut visited = 0u64;
        for x in 1u64..(1 << a) {
            let mut n = 0u64;
            let mut m = x;
            while m != 0 {
                n |= self.adj[m.trailing_zeros() as usize];
                m &= m - 1;
            }
            let mut y = 0u64;
            loop {
                y = y.wrapping_sub(n) & n;
                if y == 0 {
                    break;
                }
                visited += 1;
                if visited & 0xfff == 0 {
                    limits.subsets(visited)?;
                    limits.check_deadline()?;
                }
                let mut covers = true;
                let mut m = x;
                while m != 0 {
                    if self.adj[m.trailing_zeros() as usize] & y == 0 {
                        covers = false;
                        break;
                    }
                    m &= m - 1;
                }
                if covers {
                    f(x, y)?;
                }
            }
        }
        limits.subsets(visited)
    }
}

/// Memoized shuffle of factor positions, keyed by mask.
pub(crate) struct FactorKappa<'a> {
    alg: &'a Algebra,
    memo: HashMap<u64, Elem>,
}

impl<'a> FactorKappa<'a> {
    pub fn new(alg: &'a Algebra) -> Self {
        FactorKappa { alg, memo: HashMap::new() }
    }

    pub fn get(&mut self, vals: &[Elem], mask: u64) -> Elem {
        let alg = self.alg;
        *self.memo.entry(mask).or_insert_with(|| kappa_of_mask(alg, vals, mask))
    }
}

/// Least mask among `table`'s sources for each union reached by adding position `i`.
fn extend(alg: &Algebra, table: &mut HashMap<u128, u128>, sources: &[(u128, u128)], feature: u128, i: usize) {
    let mut cand: HashMap<u128, u128> = HashMap::new();
    for &(f, m) in sources {
        let t = alg.join_normalize(f | feature);
        if !table.contains_key(&t) {
            let c = cand.entry(t).or_insert(m);
            *c = (*c).min(m);
        }
    }
    for (t, m) in cand {
        table.insert(t, m | 1 << i);
    }
}

/// New shuffle values over subsets meeting positions `prev..`, each with the least mask
/// producing it, found by dynamic programming over feature unions. Ordered by that mask,
/// which is the order a plain enumeration of masks would discover them in.
fn join_stage(
    alg: &Algebra,
    elems: &[Elem],
    prev: usize,
    limits: &Limits,
    known: &HashMap<Elem, usize>,
) -> Result<Vec<(Elem, u128)>> {
    let feature: Vec<u128> = elems.iter().map(|&e| alg.join_feature(e)).collect();
    let mut old: HashMap<u128, u128> = HashMap::from([(0, 0)]);
    let mut visited = 0u64;
    for i in 0..prev {
        let sources: Vec<(u128, u128)> = old.iter().map(|(&f, &m)| (f, m)).collect();
        visited += sources.len() as u64;
        extend(alg, &mut old, &sources, feature[i], i);
    }
    let mut new: HashMap<u128, u128> = HashMap::new();
    for i in prev..elems.len() {
        limits.subsets(visited)?;
        limits.check_deadline()?;
        let sources: Vec<(u128, u128)> = old.iter().chain(new.iter()).map(|(&f, &m)| (f, m)).collect();
        visited += sources.len() as u64;
        extend(alg, &mut new, &sources, feature[i], i);
    }
    limits.subsets(visited)?;
    let mut best: HashMap<Elem, u128> = HashMap::new();
    for (&f, &m) in &new {
        let v = alg.join_value(f);
        if !known.contains_key(&v) {
            let b = best.entry(v).or_insert(m);
            *b = (*b).min(m);
        }
    }
    let mut out: Vec<(Elem, u128)> = best.into_iter().collect();
    out.sort_by_key(|&(_, m)| m);
    Ok(out)
}

pub fn saturate(alg: &Algebra, seeds: &[(Elem, WordExpr)], limits: &Limits) -> Result<SaturationResult> {
    let mut st = State {
        res: SaturationResult { elems: Vec::new(), stages: Vec::new(), origins: Vec::new(), index: HashMap::new() },
        limits,
    };
    for (e, w) in seeds {
        st.push(*e, Origin::Seed(w.clone()), 0)?;
    }
    let expensive = alg.kappa_is_expensive();
    let mut ktable: Vec<u32> = Vec::new();
    let (mut kl, mut kr) = match alg.factors() {
        Some((l, r)) => (Some(FactorKappa::new(l)), Some(FactorKappa::new(r))),
        None => (None, None),
    };
    let mut prev = 0;
    let mut stage = 0;
    while st.res.elems.len() > prev {
        limits.check_deadline()?;
        let cur = st.res.elems.len();
        let next = stage + 1;
        for i in 0..cur {
            let from = if i < prev { prev } else { 0 };
            for j in from..cur {
                let r = alg.dot(st.res.elems[i], st.res.elems[j]);
                st.push(r, Origin::Dot(i, j), next)?;
            }
        }
        for i in prev..cur {
            let r = alg.tau(st.res.elems[i]);
            st.push(r, Origin::Tau(i), next)?;
        }
        for i in prev..cur {
            let r = alg.tauop(st.res.elems[i]);
            st.push(r, Origin::TauOp(i), next)?;
        }

        let elems: Vec<Elem> = st.res.elems[..cur].to_vec();
        let generic_cost = if cur >= 63 { u64::MAX } else { (1u64 << cur) - (1u64 << prev) };
        let layout = PairLayout::new(alg, &elems).filter(|l| l.cost() < generic_cost);
        if alg.join_width().is_some() && cur < 128 {
            for (v, mask) in join_stage(alg, &elems, prev, limits, &st.res.index)? {
                let members = (0..cur).filter(|&i| mask >> i & 1 == 1).collect();
                st.push(v, Origin::Kappa(members), next)?;
            }
        } else if let Some(layout) = layout {
            let (kl, kr) = (kl.as_mut().unwrap(), kr.as_mut().unwrap());
            let mut found: Vec<(Elem, u64, u64)> = Vec::new();
            layout.for_each_feasible(limits, |x, y| {
                let v = alg
                    .join_pair(kl.get(&layout.left, x), kr.get(&layout.right, y))
                    .expect("pair carriers are closed under kappa");
                if !st.res.index.contains_key(&v) && !found.iter().any(|f| f.0 == v) {
                    found.push((v, x, y));
                }
                Ok(())
            })?;
            for (v, x, y) in found {
                let members = (0..cur).filter(|&i| x >> layout.lpos[i] & 1 == 1 && y >> layout.rpos[i] & 1 == 1).collect();
                st.push(v, Origin::Kappa(members), next)?;
            }
        } else {
            limits.subsets(generic_cost)?;
            let unit_pos = st.res.position(alg.unit()).filter(|&u| u < cur);
            if expensive {
                if ktable.len() < 1 << prev {
                    ktable.resize(1 << prev, UNKNOWN);
                }
                fill_kappa_table(alg, &elems, &mut ktable, cur, limits)?;
            }
            for mask in (1u64 << prev)..(1u64 << cur) {
                if let Some(u) = unit_pos {
                    if mask >> u & 1 == 1 && mask != 1 << u {
                        continue;
                    }
                }
                let v = if expensive {
                    Elem(ktable[mask as usize])
                } else {
                    if mask & 0xffff == 0 {
                        limits.check_deadline()?;
                    }
                    kappa_of_mask(alg, &elems, mask)
                };
                if !st.res.index.contains_key(&v) {
                    let members = (0..cur).filter(|&i| mask >> i & 1 == 1).collect();
                    st.push(v, Origin::Kappa(members), next)?;
                }
            }
        }
        prev = cur;
        stage = next;
    }
    Ok(st.res)
}

/// Closure only; witnesses are placeholders.
pub fn closure(alg: &Algebra, seeds: &[Elem], limits: &Limits) -> Result<Vec<Elem>> {
    let seeds: Vec<(Elem, WordExpr)> = seeds.iter().map(|&e| (e, WordExpr::Eps)).collect();
    Ok(saturate(alg, &seeds, limits)?.elems)
}

/// Unit with `eps`, then each letter's image with the letter, in alphabetical order.
pub fn recognizer_seeds(rec: &Recognizer) -> Vec<(Elem, WordExpr)> {
    let mut seeds = vec![(rec.algebra().unit(), WordExpr::Eps)];
    for (l, e) in rec.letters() {
        seeds.push((e, WordExpr::Letter(Letter::clone(l))));
    }
    seeds
}

/// Restricts a recognizer to the elements reachable from its letters.
pub fn trim_reachable(rec: &Recognizer, limits: &Limits) -> Result<Recognizer> {
    let sat = saturate(rec.algebra(), &recognizer_seeds(rec), limits)?;
    Ok(restrict_to(rec, &sat))
}

pub(crate) fn restrict_to(rec: &Recognizer, sat: &SaturationResult) -> Recognizer {
    let alg = std::sync::Arc::new(Algebra::restrict(rec.algebra(), sat.closure()));
    let pos = |e: Elem| Elem(sat.position(e).expect("letters are seeds") as u32);
    let letters: Vec<(Letter, Elem)> = rec.letters().map(|(l, e)| (l.clone(), pos(e))).collect();
    let accept: Vec<Elem> = rec.accept().iter().filter_map(|&e| sat.position(e)).map(|i| Elem(i as u32)).collect();
    Recognizer::new(alg, letters, accept).expect("restriction keeps the recognizer well formed")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Nonempty(WordExpr),
}

/// Decides whether the recognized language is empty; otherwise returns a word in it.
pub fn is_empty(rec: &Recognizer, limits: &Limits) -> Result<Emptiness> {
    if rec.accept().is_empty() {
        return Ok(Emptiness::Empty);
    }
    let sat = saturate(rec.algebra(), &recognizer_seeds(rec), limits)?;
    Ok(match sat.closure().iter().find(|e| rec.accepts(**e)) {
        Some(&e) => Emptiness::Nonempty(sat.witness(e).unwrap()),
        None => Emptiness::Empty,
    })
}
