//! Quotient of a recognizer by the coarsest congruence that saturates its accepting set.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::algebra::{Algebra, Elem, KappaSpec, Provenance, KAPPA_TABLE_MAX};
use crate::error::{Error, LimitKind, Result};
use crate::recognizer::{Letter, Recognizer};
use crate::saturate::{fill_kappa_table, FactorKappa, Limits, PairLayout};

/// Evaluates the shuffle of `P ∪ {z}` for the shuffle contexts `P` of a carrier.
enum Contexts<'a> {
    Masks { table: Vec<u32> },
    Pairs(PairContexts<'a>),
}

struct PairContexts<'a> {
    layout: PairLayout,
    feasible: Vec<(u64, u64)>,
    kl: FactorKappa<'a>,
    kr: FactorKappa<'a>,
    lindex: HashMap<Elem, u32>,
    rindex: HashMap<Elem, u32>,
    // dense caches: projection mask -> factor position
    lcache: Vec<u32>,
    rcache: Vec<u32>,
    join: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl PairContexts<'_> {
    fn value(&mut self, x: u64, y: u64) -> u32 {
        let l = match self.lcache.get(x as usize) {
            Some(&v) if v != NONE => v,
            _ => {
                let v = self.lindex[&self.kl.get(&self.layout.left, x)];
                if let Some(slot) = self.lcache.get_mut(x as usize) {
                    *slot = v;
                }
                v
            }
        };
        let r = match self.rcache.get(y as usize) {
            Some(&v) if v != NONE => v,
            _ => {
                let v = self.rindex[&self.kr.get(&self.layout.right, y)];
                if let Some(slot) = self.rcache.get_mut(y as usize) {
                    *slot = v;
                }
                v
            }
        };
        self.join[l as usize * self.layout.right.len() + r as usize]
    }
}

fn dense_cache(bits: usize) -> Vec<u32> {
    if bits <= 22 {
        vec![NONE; 1 << bits]
    } else {
        Vec::new()
    }
}

impl<'a> Contexts<'a> {
    fn new(alg: &'a Algebra, limits: &Limits) -> Result<Contexts<'a>> {
        let n = alg.size();
        let elems: Vec<Elem> = alg.elements().collect();
        if let (Some((l, r)), Some(layout)) = (alg.factors(), PairLayout::new(alg, &elems)) {
            if n >= 63 || layout.cost() < 1u64 << n {
                let mut feasible = vec![(0, 0)];
                layout.for_each_feasible(limits, |x, y| {
                    feasible.push((x, y));
                    Ok(())
                })?;
                let lindex = layout.left.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
                let rindex = layout.right.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
                let mut join = vec![NONE; layout.left.len() * layout.right.len()];
                for i in 0..n {
                    join[layout.lpos[i] * layout.right.len() + layout.rpos[i]] = i as u32;
                }
                return Ok(Contexts::Pairs(PairContexts {
                    lcache: dense_cache(layout.left.len()),
                    rcache: dense_cache(layout.right.len()),
                    layout,
                    feasible,
                    kl: FactorKappa::new(l),
                    kr: FactorKappa::new(r),
                    lindex,
                    rindex,
                    join,
                }));
            }
        }
        if n >= 63 || (1u64 << n) > limits.max_subsets_per_stage {
            return Err(Error::limit(LimitKind::SubsetsPerStage {
                limit: limits.max_subsets_per_stage,
                needed: if n >= 63 { u64::MAX } else { 1 << n },
            }));
        }
        let mut table = Vec::new();
        fill_kappa_table(alg, &elems, &mut table, n, limits)?;
        Ok(Contexts::Masks { table })
    }

    /// Context vector of `z` in terms of the current classes.
    fn vector(&mut self, z: usize, class: &[u32]) -> Vec<u32> {
        match self {
            Contexts::Masks { table } => {
                let bz = 1usize << z;
                (0..table.len()).map(|p| class[table[p | bz] as usize]).collect()
            }
            Contexts::Pairs(pc) => {
                let (lb, rb) = (1u64 << pc.layout.lpos[z], 1u64 << pc.layout.rpos[z]);
                let feasible = std::mem::take(&mut pc.feasible);
                let v = feasible.iter().map(|&(x, y)| class[pc.value(x | lb, y | rb) as usize]).collect();
                pc.feasible = feasible;
                v
            }
        }
    }

    /// Shuffle of a set of carrier positions.
    fn value_of(&mut self, set: &[usize]) -> u32 {
        match self {
            Contexts::Masks { table } => table[set.iter().fold(0usize, |m, &i| m | 1 << i)],
            Contexts::Pairs(pc) => {
                let x = set.iter().fold(0u64, |m, &i| m | 1 << pc.layout.lpos[i]);
                let y = set.iter().fold(0u64, |m, &i| m | 1 << pc.layout.rpos[i]);
                pc.value(x, y)
            }
        }
    }
}

fn hash_of(v: &[u32]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

/// Coarsest partition of the carrier compatible with every operator and with acceptance.
fn coarsest_congruence(rec: &Recognizer, ctx: &mut Contexts, limits: &Limits) -> Result<Vec<u32>> {
    let alg = rec.algebra();
    let n = alg.size();
    let mut class: Vec<u32> = (0..n).map(|i| rec.accepts(Elem(i as u32)) as u32).collect();
    let mut count = class.iter().collect::<std::collections::BTreeSet<_>>().len();
    loop {
        limits.check_deadline()?;
        let mut keys: HashMap<(Vec<u32>, u64), Vec<usize>> = HashMap::new();
        let mut vectors: Vec<Vec<u32>> = Vec::with_capacity(n);
        let mut order: Vec<(Vec<u32>, u64)> = Vec::new();
        for z in 0..n {
            let e = Elem(z as u32);
            let mut sig = vec![class[z]];
            for w in alg.elements() {
                sig.push(class[alg.dot(e, w).index()]);
                sig.push(class[alg.dot(w, e).index()]);
            }
            sig.push(class[alg.tau(e).index()]);
            sig.push(class[alg.tauop(e).index()]);
            let v = ctx.vector(z, &class);
            let key = (sig, hash_of(&v));
            vectors.push(v);
            keys.entry(key.clone())
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(z);
        }
        let mut next = vec![0u32; n];
        let mut fresh = 0u32;
        for key in &order {
            let group = &keys[key];
            // hash equality is confirmed exactly
            let mut reps: Vec<(usize, u32)> = Vec::new();
            for &z in group {
                match reps.iter().find(|(r, _)| vectors[*r] == vectors[z]) {
                    Some(&(_, c)) => next[z] = c,
                    None => {
                        reps.push((z, fresh));
                        next[z] = fresh;
                        fresh += 1;
                    }
                }
            }
        }
        // renumber by first occurrence so the result is canonical
        let mut renum: HashMap<u32, u32> = HashMap::new();
        for c in next.iter_mut() {
            let k = renum.len() as u32;
            *c = *renum.entry(*c).or_insert(k);
        }
        let new_count = renum.len();
        class = next;
        if new_count == count {
            return Ok(class);
        }
        count = new_count;
    }
}

/// Smallest quotient recognizing the same language. Intended for trimmed recognizers.
pub fn minimize(rec: &Recognizer, limits: &Limits) -> Result<Recognizer> {
    let alg = rec.algebra();
    let mut ctx = Contexts::new(alg, limits)?;
    let class = coarsest_congruence(rec, &mut ctx, limits)?;
    let m = class.iter().max().map_or(0, |&c| c as usize + 1);
    let mut reps = vec![usize::MAX; m];
    for (z, &c) in class.iter().enumerate() {
        if reps[c as usize] == usize::MAX {
            reps[c as usize] = z;
        }
    }
    let cl = |e: Elem| Elem(class[e.index()]);
    let rep = |c: usize| Elem(reps[c] as u32);
    let mut dot = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            dot.push(cl(alg.dot(rep(a), rep(b))));
        }
    }
    let tau = (0..m).map(|a| cl(alg.tau(rep(a)))).collect();
    let tauop = (0..m).map(|a| cl(alg.tauop(rep(a)))).collect();
    let kappa = if m <= KAPPA_TABLE_MAX {
        let mut t = vec![Elem(0); 1 << m];
        for (q, slot) in t.iter_mut().enumerate().skip(1) {
            let set: Vec<usize> = (0..m).filter(|c| q >> c & 1 == 1).map(|c| reps[c]).collect();
            *slot = Elem(class[ctx.value_of(&set) as usize]);
        }
        KappaSpec::Table(t)
    } else {
        let parent = alg.clone();
        let class = class.clone();
        let reps = reps.clone();
        KappaSpec::Rule(Arc::new(move |set: &[Elem]| {
            let members: Vec<Elem> = set.iter().map(|c| Elem(reps[c.index()] as u32)).collect();
            Elem(class[parent.kappa(&members).index()])
        }))
    };
    let names = (0..m).map(|i| format!("q{i}")).collect();
    let unit = cl(alg.unit());
    let quotient = Algebra::from_tables(names, unit, dot, tau, tauop, kappa, Provenance::Quotient)?;
    let letters: Vec<(Letter, Elem)> = rec.letters().map(|(l, e)| (l.clone(), cl(e))).collect();
    let accept: Vec<Elem> = rec.accept().iter().map(|&e| cl(e)).collect();
    Recognizer::new(Arc::new(quotient), letters, accept)
}
