//! Hand-built algebras for the logic atoms and the shuffle recognizer.

use std::sync::Arc;

use crate::algebra::{elems_of_mask, Algebra, Elem, JoinKappa, KappaSpec, Provenance};
use crate::error::{Error, Result};
use crate::recognizer::{Letter, Recognizer};

fn kappa_table(n: usize, f: impl Fn(&[Elem]) -> Elem) -> KappaSpec {
    let mut t = vec![Elem(0); 1 << n];
    for (mask, slot) in t.iter_mut().enumerate().skip(1) {
        *slot = f(&elems_of_mask(mask as u64));
    }
    KappaSpec::Table(t)
}

fn table_algebra(
    names: &[&str],
    unit: u32,
    dot: impl Fn(u32, u32) -> u32,
    tau: impl Fn(u32) -> u32,
    tauop: impl Fn(u32) -> u32,
    kappa: impl Fn(&[Elem]) -> Elem,
) -> Algebra {
    let n = names.len() as u32;
    let mut d = Vec::with_capacity((n * n) as usize);
    for a in 0..n {
        for b in 0..n {
            d.push(Elem(dot(a, b)));
        }
    }
    Algebra::from_tables(
        names.iter().map(|s| s.to_string()).collect(),
        Elem(unit),
        d,
        (0..n).map(|a| Elem(tau(a))).collect(),
        (0..n).map(|a| Elem(tauop(a))).collect(),
        kappa_table(names.len(), kappa),
        Provenance::BuiltinRule,
    )
    .expect("builtin tables are well formed")
}

/// One element; every operator is constant.
pub fn trivial_algebra() -> Algebra {
    table_algebra(&["e"], 0, |_, _| 0, |_| 0, |_| 0, |_| Elem(0))
}

/// Accepts every word over `{a}`.
pub fn trivial_alg() -> Recognizer {
    Recognizer::new(Arc::new(trivial_algebra()), [(Letter::plain("a"), Elem(0))], [Elem(0)]).unwrap()
}

pub const Z: Elem = Elem(0);
pub const O: Elem = Elem(1);
pub const M: Elem = Elem(2);

/// Counts marked positions: none, one, many.
pub fn sing_alg() -> Algebra {
    table_algebra(
        &["z", "o", "m"],
        0,
        |a, b| (a + b).min(2),
        |a| if a == 0 { 0 } else { 2 },
        |a| if a == 0 { 0 } else { 2 },
        |p| if p == [Z] { Z } else { M },
    )
}

pub const OK: Elem = Elem(0);
pub const BAD: Elem = Elem(1);

/// Two elements, `bad` absorbing.
pub fn subset_alg() -> Algebra {
    table_algebra(&["ok", "bad"], 0, |a, b| a | b, |a| a, |a| a, |p| if p.contains(&BAD) { BAD } else { OK })
}

/// Same algebra as [`subset_alg`]; a letter maps to `bad` when it is marked but carries another label.
pub fn letter_alg() -> Algebra {
    subset_alg()
}

/// Index of `(x, y, b)` in [`before_alg`].
pub fn before_elem(x: bool, y: bool, b: bool) -> Elem {
    Elem((x as u32) << 2 | (y as u32) << 1 | b as u32)
}

fn bits(e: u32) -> (u32, u32, u32) {
    (e >> 2 & 1, e >> 1 & 1, e & 1)
}

/// Tracks whether some marked-X position, some marked-Y position, and some Y-before-X pair occurred.
pub fn before_alg() -> Algebra {
    let names: Vec<String> = (0..8u32)
        .map(|e| {
            let (x, y, b) = bits(e);
            format!("({x},{y},{b})")
        })
        .collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let pack = |x: u32, y: u32, b: u32| x << 2 | y << 1 | b;
    let iter = move |e: u32| {
        let (x, y, b) = bits(e);
        pack(x, y, b | (x & y))
    };
    table_algebra(
        &names,
        0,
        move |p, q| {
            let (x1, y1, b1) = bits(p);
            let (x2, y2, b2) = bits(q);
            pack(x1 | x2, y1 | y2, b1 | b2 | (y1 & x2))
        },
        iter,
        iter,
        move |set| {
            let (mut x, mut y, mut b) = (0, 0, 0);
            for e in set {
                let (a, c, d) = bits(e.0);
                x |= a;
                y |= c;
                b |= d;
            }
            Elem(pack(x, y, b | (x & y)))
        },
    )
}

/// Classes of the shuffle recognizer. Letters are `1..=k`; `None` is an absent boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShuffleClass {
    Unit,
    Bad,
    Sing(u32),
    Interval { first: Option<u32>, last: Option<u32>, set: u32 },
}

/// Encoding of [`ShuffleClass`] values as carrier indices for a fixed `k`.
#[derive(Clone, Copy, Debug)]
pub struct ShuffleCodec {
    pub k: u32,
}

impl ShuffleCodec {
    pub fn size(&self) -> usize {
        let k = self.k as usize;
        2 + k + (k + 1) * (k + 1) * ((1 << k) - 1)
    }

    pub fn encode(&self, c: ShuffleClass) -> Elem {
        let k = self.k;
        match c {
            ShuffleClass::Unit => Elem(0),
            ShuffleClass::Bad => Elem(1),
            ShuffleClass::Sing(i) => Elem(1 + i),
            ShuffleClass::Interval { first, last, set } => {
                let f = first.unwrap_or(0);
                let l = last.unwrap_or(0);
                Elem(2 + k + (f * (k + 1) + l) * ((1 << k) - 1) + (set - 1))
            }
        }
    }

    pub fn decode(&self, e: Elem) -> ShuffleClass {
        let k = self.k;
        match e.0 {
            0 => ShuffleClass::Unit,
            1 => ShuffleClass::Bad,
            i if i < 2 + k => ShuffleClass::Sing(i - 1),
            i => {
                let r = i - 2 - k;
                let ys = (1 << k) - 1;
                let set = r % ys + 1;
                let fl = r / ys;
                let opt = |v: u32| if v == 0 { None } else { Some(v) };
                ShuffleClass::Interval { first: opt(fl / (k + 1)), last: opt(fl % (k + 1)), set }
            }
        }
    }

    pub fn name(&self, c: ShuffleClass) -> String {
        let b = |v: Option<u32>| v.map_or("-".to_string(), |i| i.to_string());
        match c {
            ShuffleClass::Unit => "UNIT".into(),
            ShuffleClass::Bad => "BAD".into(),
            ShuffleClass::Sing(i) => format!("SING({i})"),
            ShuffleClass::Interval { first, last, set } => {
                let members: Vec<String> = (1..=self.k).filter(|i| set >> (i - 1) & 1 == 1).map(|i| i.to_string()).collect();
                format!("INTERVAL({},{},{{{}}})", b(first), b(last), members.join(","))
            }
        }
    }

    pub fn accept(&self) -> Elem {
        self.encode(ShuffleClass::Interval { first: None, last: None, set: (1 << self.k) - 1 })
    }

    pub fn dot(&self, x: ShuffleClass, y: ShuffleClass) -> ShuffleClass {
        use ShuffleClass::*;
        match (x, y) {
            (Unit, o) | (o, Unit) => o,
            (Bad, _) | (_, Bad) => Bad,
            (Sing(_), Sing(_)) => Bad,
            (Sing(i), Interval { first, last, set }) => match first {
                Some(_) => Bad,
                None => Interval { first: Some(i), last, set },
            },
            (Interval { first, last, set }, Sing(j)) => match last {
                Some(_) => Bad,
                None => Interval { first, last: Some(j), set },
            },
            (Interval { first: f1, last: l1, set: y1 }, Interval { first: f2, last: l2, set: y2 }) => {
                if (l1.is_some() && f2.is_some()) || y1 != y2 {
                    return Bad;
                }
                if let Some(m) = l1.or(f2) {
                    if y1 >> (m - 1) & 1 == 0 {
                        return Bad;
                    }
                }
                Interval { first: f1, last: l2, set: y1 }
            }
        }
    }

    pub fn tau(&self, x: ShuffleClass) -> ShuffleClass {
        use ShuffleClass::*;
        match x {
            Unit => Unit,
            Bad | Sing(_) => Bad,
            Interval { first: Some(_), last: Some(_), .. } => Bad,
            Interval { first: Some(f), last: None, set } => {
                if set >> (f - 1) & 1 == 1 {
                    x
                } else {
                    Bad
                }
            }
            Interval { first: None, last: Some(l), set } => {
                if set >> (l - 1) & 1 == 1 {
                    Interval { first: None, last: None, set }
                } else {
                    Bad
                }
            }
            Interval { first: None, last: None, .. } => x,
        }
    }

    pub fn tauop(&self, x: ShuffleClass) -> ShuffleClass {
        self.mirror(self.tau(self.mirror(x)))
    }

    fn mirror(&self, x: ShuffleClass) -> ShuffleClass {
        match x {
            ShuffleClass::Interval { first, last, set } => ShuffleClass::Interval { first: last, last: first, set },
            o => o,
        }
    }

    /// Bit 0 is BAD, bit `i` is letter `i`, bit `k + s` is the interval set `s`.
    /// The shuffle of a set of classes only depends on the union of their features.
    fn feature(&self, c: ShuffleClass) -> u128 {
        use ShuffleClass::*;
        let letter = |m: Option<u32>| m.map_or(0, |i| 1u128 << i);
        match c {
            Unit => 0,
            Bad => 1,
            Sing(i) => 1 << i,
            Interval { first, last, set } => 1 << (self.k + set) | letter(first) | letter(last),
        }
    }

    fn kappa_of_feature(&self, f: u128) -> ShuffleClass {
        use ShuffleClass::*;
        if self.dead(f) {
            return Bad;
        }
        let letters = (f >> 1) as u32 & ((1 << self.k) - 1);
        let sets = f >> (self.k + 1);
        match sets {
            0 if letters == 0 => Unit,
            0 => Interval { first: None, last: None, set: letters },
            s => Interval { first: None, last: None, set: s.trailing_zeros() + 1 },
        }
    }

    /// Unions whose shuffle is BAD; closed under further unions.
    fn dead(&self, f: u128) -> bool {
        let letters = (f >> 1) as u32 & ((1 << self.k) - 1);
        let sets = f >> (self.k + 1);
        f & 1 == 1 || sets.count_ones() > 1 || (sets != 0 && letters & !(sets.trailing_zeros() + 1) != 0)
    }

    pub fn kappa(&self, q: &[ShuffleClass]) -> ShuffleClass {
        use ShuffleClass::*;
        if q.contains(&Bad) {
            return Bad;
        }
        let rest: Vec<ShuffleClass> = q.iter().copied().filter(|c| *c != Unit).collect();
        if rest.is_empty() {
            return Unit;
        }
        let mut interval_set: Option<u32> = None;
        let mut letters = 0u32;
        for c in &rest {
            match *c {
                Sing(i) => letters |= 1 << (i - 1),
                Interval { first, last, set } => {
                    if interval_set.is_some_and(|s| s != set) {
                        return Bad;
                    }
                    interval_set = Some(set);
                    for m in [first, last].into_iter().flatten() {
                        letters |= 1 << (m - 1);
                    }
                }
                Unit | Bad => unreachable!(),
            }
        }
        match interval_set {
            Some(set) if letters & !set != 0 => Bad,
            Some(set) => Interval { first: None, last: None, set },
            None => Interval { first: None, last: None, set: letters },
        }
    }
}

/// Largest supported `k` for the shuffle recognizer.
pub const SHUFFLE_K_MAX: u32 = 6;

/// Algebra of the shuffle recognizer, operators materialized except the rule-backed shuffle.
pub fn shuffle_algebra(k: u32) -> Result<Algebra> {
    if k == 0 || k > SHUFFLE_K_MAX {
        return Err(Error::Invalid(format!("shuffle recognizer needs 1 <= k <= {SHUFFLE_K_MAX}, got {k}")));
    }
    let codec = ShuffleCodec { k };
    let n = codec.size() as u32;
    let names = (0..n).map(|i| codec.name(codec.decode(Elem(i)))).collect();
    let mut dot = Vec::with_capacity((n * n) as usize);
    for a in 0..n {
        for b in 0..n {
            dot.push(codec.encode(codec.dot(codec.decode(Elem(a)), codec.decode(Elem(b)))));
        }
    }
    let tau = (0..n).map(|a| codec.encode(codec.tau(codec.decode(Elem(a))))).collect();
    let tauop = (0..n).map(|a| codec.encode(codec.tauop(codec.decode(Elem(a))))).collect();
    let features = (0..n).map(|a| codec.feature(codec.decode(Elem(a)))).collect();
    let join = JoinKappa {
        features,
        normalize: Arc::new(move |f| if codec.dead(f) { 1 } else { f }),
        eval: Arc::new(move |f| codec.encode(codec.kappa_of_feature(f))),
    };
    Algebra::from_tables(names, Elem(0), dot, tau, tauop, KappaSpec::Join(Arc::new(join)), Provenance::BuiltinRule)
}

/// Recognizes the single word that is the perfect shuffle of the letters `1..=k`.
pub fn shuffle_recognizer(k: u32) -> Result<Recognizer> {
    let alg = Arc::new(shuffle_algebra(k)?);
    let codec = ShuffleCodec { k };
    let letters = (1..=k).map(|i| (Letter::plain(i.to_string()), codec.encode(ShuffleClass::Sing(i))));
    Recognizer::new(alg, letters, [codec.accept()])
}

fn marked_alphabet(bases: &[&str], vars: &[&str]) -> Vec<Letter> {
    let mut out = Vec::new();
    for b in bases {
        for mask in 0..1u32 << vars.len() {
            let marks = (0..vars.len()).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]);
            out.push(Letter::marked(*b, marks));
        }
    }
    out
}

/// Names accepted by [`builtin_algebra`] and [`builtin_recognizer`].
pub const BUILTIN_NAMES: [&str; 6] = ["trivial", "sing", "subset", "before", "letter", "shuffle:k=N"];

fn shuffle_k(name: &str) -> Option<Result<u32>> {
    let rest = name.strip_prefix("shuffle")?;
    let k = rest.strip_prefix(":k=").or_else(|| rest.strip_prefix(':')).unwrap_or(rest);
    if k.is_empty() {
        return Some(Ok(2));
    }
    Some(k.parse().map_err(|_| Error::Invalid(format!("bad shuffle parameter in `{name}`"))))
}

pub fn builtin_algebra(name: &str) -> Result<Algebra> {
    if let Some(k) = shuffle_k(name) {
        return shuffle_algebra(k?);
    }
    match name {
        "trivial" => Ok(trivial_algebra()),
        "sing" | "counting" => Ok(sing_alg()),
        "subset" => Ok(subset_alg()),
        "letter" => Ok(letter_alg()),
        "before" => Ok(before_alg()),
        _ => Err(Error::Invalid(format!("unknown builtin `{name}`; known: {}", BUILTIN_NAMES.join(", ")))),
    }
}

/// Each builtin algebra with the morphism it gets as the recognizer of its atom.
///
/// `sing`, `subset` and `before` read marks `X` and `Y` over the base letter `a`;
/// `letter` is `letter(a, X)` over base letters `a` and `b`.
pub fn builtin_recognizer(name: &str) -> Result<Recognizer> {
    if let Some(k) = shuffle_k(name) {
        return shuffle_recognizer(k?);
    }
    let alg = Arc::new(builtin_algebra(name)?);
    let (letters, accept): (Vec<(Letter, Elem)>, Vec<Elem>) = match name {
        "trivial" => return Ok(trivial_alg()),
        "sing" | "counting" => (
            marked_alphabet(&["a"], &["X"]).into_iter().map(|l| {
                let v = if l.has_mark("X") { O } else { Z };
                (l, v)
            }).collect(),
            vec![O],
        ),
        "subset" => (
            marked_alphabet(&["a"], &["X", "Y"]).into_iter().map(|l| {
                let v = if l.has_mark("X") && !l.has_mark("Y") { BAD } else { OK };
                (l, v)
            }).collect(),
            vec![OK],
        ),
        "letter" => (
            marked_alphabet(&["a", "b"], &["X"]).into_iter().map(|l| {
                let v = if l.has_mark("X") && l.name != "a" { BAD } else { OK };
                (l, v)
            }).collect(),
            vec![OK],
        ),
        "before" => (
            marked_alphabet(&["a"], &["X", "Y"]).into_iter().map(|l| {
                let (x, y) = (l.has_mark("X"), l.has_mark("Y"));
                (l, before_elem(x, y, x && y))
            }).collect(),
            (0..8).map(Elem).filter(|e| e.0 & 1 == 0).collect(),
        ),
        _ => unreachable!(),
    };
    Recognizer::new(alg, letters, accept)
}
