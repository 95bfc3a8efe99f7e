//! Subsets of a base carrier as an algebra: the image of a letter-projection.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::algebra::{elems_of_mask, product_algebra, Algebra, Elem, Provenance, Repr};
use crate::builtins::{shuffle_algebra, ShuffleClass, ShuffleCodec};
use crate::error::{Error, LimitKind, Result};
use crate::expr::WordExpr;
use crate::recognizer::{Letter, Recognizer};
use crate::saturate::{restrict_to, saturate, Limits};

/// Largest base carrier a powerset algebra accepts.
pub const POWERSET_BASE_MAX: usize = 24;

pub(crate) struct Powerset {
    base: Arc<Algebra>,
    kappa_memo: Mutex<HashMap<Vec<u32>, u32>>,
    tau_memo: Mutex<HashMap<(bool, u32), u32>>,
}

/// Base elements of a subset mask.
fn members(mask: u32) -> impl Iterator<Item = Elem> {
    elems_of_mask(mask as u64).into_iter()
}

impl Powerset {
    pub(crate) fn size(&self) -> usize {
        1 << self.base.size()
    }

    pub(crate) fn unit(&self) -> Elem {
        Elem(1 << self.base.unit().0)
    }

    pub(crate) fn dot(&self, a: Elem, b: Elem) -> Elem {
        let mut out = 0u32;
        for x in members(a.0) {
            for y in members(b.0) {
                out |= 1 << self.base.dot(x, y).0;
            }
        }
        Elem(out)
    }

    fn dot_closure(&self, a: u32) -> u32 {
        let mut c = a;
        loop {
            let next = c | self.dot(Elem(c), Elem(c)).0;
            if next == c {
                return c;
            }
            c = next;
        }
    }

    fn iterate(&self, a: Elem, right: bool) -> Elem {
        if a.0 == 0 {
            return a;
        }
        if let Some(&v) = self.tau_memo.lock().unwrap().get(&(right, a.0)) {
            return Elem(v);
        }
        let base = &self.base;
        let c = self.dot_closure(a.0);
        let mut out = 0u32;
        for e in members(c).filter(|&e| base.is_idempotent(e)) {
            for x in members(c) {
                let v = if right { base.dot(x, base.tau(e)) } else { base.dot(base.tauop(e), x) };
                out |= 1 << v.0;
            }
        }
        self.tau_memo.lock().unwrap().insert((right, a.0), out);
        Elem(out)
    }

    pub(crate) fn tau(&self, a: Elem) -> Elem {
        self.iterate(a, true)
    }

    pub(crate) fn tauop(&self, a: Elem) -> Elem {
        self.iterate(a, false)
    }

    pub(crate) fn kappa(&self, family: &[Elem]) -> Elem {
        if family.iter().any(|a| a.0 == 0) {
            return Elem(0);
        }
        let unit = self.unit().0;
        let key: Vec<u32> = family.iter().map(|a| a.0).filter(|&a| a != unit).collect();
        if key.is_empty() {
            return Elem(unit);
        }
        if let Some(&v) = self.kappa_memo.lock().unwrap().get(&key) {
            return Elem(v);
        }
        let v = kappa_tilde_masks(&self.base, &key);
        self.kappa_memo.lock().unwrap().insert(key, v);
        Elem(v)
    }

    pub(crate) fn name(&self, a: Elem) -> String {
        let names: Vec<String> = members(a.0).map(|e| self.base.name(e)).collect();
        format!("{{{}}}", names.join(","))
    }
}

pub fn powerset_algebra(base: &Arc<Algebra>) -> Result<Algebra> {
    let n = base.size();
    if n > POWERSET_BASE_MAX {
        return Err(Error::limit(LimitKind::Carrier { limit: POWERSET_BASE_MAX, needed: n as u64 }));
    }
    Ok(Algebra::from_repr(
        Repr::Powerset(Powerset {
            base: base.clone(),
            kappa_memo: Mutex::new(HashMap::new()),
            tau_memo: Mutex::new(HashMap::new()),
        }),
        Provenance::Powerset,
    ))
}

/// Bit mask of a set of base elements, as a powerset element.
pub fn subset_elem(set: &[Elem]) -> Elem {
    Elem(set.iter().fold(0, |m, e| m | 1 << e.0))
}

pub fn subset_members(a: Elem) -> Vec<Elem> {
    members(a.0).collect()
}

/// Values of omega-words built from elements of `a`.
pub fn tau_tilde(base: &Arc<Algebra>, a: &[Elem]) -> Result<Vec<Elem>> {
    let p = powerset_algebra(base)?;
    Ok(subset_members(p.tau(subset_elem(a))))
}

pub fn tauop_tilde(base: &Arc<Algebra>, a: &[Elem]) -> Result<Vec<Elem>> {
    let p = powerset_algebra(base)?;
    Ok(subset_members(p.tauop(subset_elem(a))))
}

pub fn kappa_tilde(base: &Arc<Algebra>, family: &[Vec<Elem>]) -> Result<Vec<Elem>> {
    assert!(!family.is_empty(), "kappa of an empty family");
    let p = powerset_algebra(base)?;
    let fam: Vec<Elem> = family.iter().map(|a| subset_elem(a)).collect();
    Ok(subset_members(p.kappa(&fam)))
}

// Interval tags: bit 1 = first position present, bit 0 = last position present.
const OO: usize = 0;
const OC: usize = 1;
const CO: usize = 2;

/// Shuffle of a family of subsets (no empty member, no unit singleton, nonempty),
/// as a saturation over base values paired with the shuffle-recognizer classes
/// that can still lead to the accepting class.
fn kappa_tilde_masks(base: &Algebra, family: &[u32]) -> u32 {
    let singles: u32 = family.iter().fold(0, |m, a| m | a);
    let mut kmemo: HashMap<u32, u32> = HashMap::new();
    let mut kappa = |x: u32| -> u32 {
        *kmemo.entry(x).or_insert_with(|| {
            if let Some(tab) = base.kappa_table() {
                tab[x as usize].0
            } else {
                base.kappa_sorted(&elems_of_mask(x as u64)).0
            }
        })
    };
    let unit_bit = 1u32 << base.unit().0;
    // the unit contributes nothing to a shuffle once other values are present
    let strip = |x: u32| if x == unit_bit { x } else { x & !unit_bit };
    let mut t = [0u32; 4];

    let mut x = singles;
    while x != 0 {
        if family.iter().all(|a| a & x != 0) {
            t[OO] |= 1 << kappa(strip(x));
        }
        x = (x - 1) & singles;
    }

    let mut shuffled_over: Option<(u32, u32)> = None;
    loop {
        let before = t;
        let all = t[0] | t[1] | t[2] | t[3];
        let u = singles | all;
        if shuffled_over != Some((u, all)) {
            let mut x = u;
            while x != 0 {
                if x & all != 0 {
                    t[OO] |= 1 << kappa(strip(x));
                }
                x = (x - 1) & u;
            }
            shuffled_over = Some((u, all));
        }
        let snapshot = t;
        for tag in 0..4 {
            for v in members(snapshot[tag]) {
                if tag & 2 == 0 {
                    for a in members(singles) {
                        t[tag | 2] |= 1 << base.dot(a, v).0;
                    }
                }
                if tag & 1 == 0 {
                    for a in members(singles) {
                        t[tag | 1] |= 1 << base.dot(v, a).0;
                    }
                }
                match tag {
                    OO => {
                        t[OO] |= 1 << base.tau(v).0;
                        t[OO] |= 1 << base.tauop(v).0;
                    }
                    CO => {
                        t[CO] |= 1 << base.tau(v).0;
                        t[OO] |= 1 << base.tauop(v).0;
                    }
                    OC => {
                        t[OO] |= 1 << base.tau(v).0;
                        t[OC] |= 1 << base.tauop(v).0;
                    }
                    _ => {}
                }
            }
        }
        for t1 in 0..4 {
            for t2 in 0..4 {
                if t1 & 1 == 1 && t2 & 2 == 2 {
                    continue;
                }
                let tag = (t1 & 2) | (t2 & 1);
                for v1 in members(snapshot[t1]) {
                    for v2 in members(snapshot[t2]) {
                        t[tag] |= 1 << base.dot(v1, v2).0;
                    }
                }
            }
        }
        if t == before {
            return t[OO];
        }
    }
}

/// The same shuffle computed literally: saturate the product of the base with the
/// shuffle recognizer for `k = |family|` and read off the accepted base values.
/// Exponentially slower; meant for cross-checking on tiny inputs.
pub fn kappa_tilde_reference(base: &Arc<Algebra>, family: &[Vec<Elem>], limits: &Limits) -> Result<Vec<Elem>> {
    if family.iter().any(|a| a.is_empty()) {
        return Ok(Vec::new());
    }
    let k = family.len() as u32;
    let codec = ShuffleCodec { k };
    let bk = Arc::new(shuffle_algebra(k)?);
    let prod = product_algebra(base, &bk)?;
    let join = |m: Elem, c: ShuffleClass| Elem(m.0 * codec.size() as u32 + codec.encode(c).0);
    let mut seeds = vec![(join(base.unit(), ShuffleClass::Unit), WordExpr::Eps)];
    for (i, a) in family.iter().enumerate() {
        for &m in a {
            seeds.push((join(m, ShuffleClass::Sing(i as u32 + 1)), WordExpr::Eps));
        }
    }
    let sat = saturate(&prod, &seeds, limits)?;
    let mut out: Vec<Elem> = base.elements().filter(|&m| sat.contains(join(m, ShuffleClass::Interval {
        first: None,
        last: None,
        set: (1 << k) - 1,
    }))).collect();
    out.sort();
    Ok(out)
}

/// Image of a recognizer under a letter-to-letter map.
pub fn project_recognizer(rec: &Recognizer, letter_map: impl Fn(&Letter) -> Letter, limits: &Limits) -> Result<Recognizer> {
    let alg = Arc::new(powerset_algebra(rec.algebra())?);
    let mut images: BTreeMap<Letter, u32> = BTreeMap::new();
    for (l, e) in rec.letters() {
        *images.entry(letter_map(l)).or_insert(0) |= 1 << e.0;
    }
    let target = Recognizer::new(alg, images.into_iter().map(|(l, m)| (l, Elem(m))), [])?;
    let sat = saturate(target.algebra(), &crate::saturate::recognizer_seeds(&target), limits)?;
    let trimmed = restrict_to(&target, &sat);
    let final_mask: u32 = rec.accept().iter().fold(0, |m, e| m | 1 << e.0);
    let accept: Vec<Elem> = sat
        .closure()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.0 & final_mask != 0)
        .map(|(i, _)| Elem(i as u32))
        .collect();
    Ok(trimmed.with_accept(accept))
}
