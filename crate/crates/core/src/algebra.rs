//! Finite algebras: carrier, unit, product, the two omega iterations and the shuffle operator.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, LimitKind, Result};
use crate::powerset::Powerset;

/// Index of an element inside one carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    Product,
    Powerset,
    BuiltinRule,
    Quotient,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Explicit => "explicit",
            Provenance::Product => "product",
            Provenance::Powerset => "powerset",
            Provenance::BuiltinRule => "builtin-rule",
            Provenance::Quotient => "quotient",
        }
    }
}

/// Shuffle operator given as a computation. Receives a sorted, duplicate-free, nonempty set.
pub type KappaRule = Arc<dyn Fn(&[Elem]) -> Elem + Send + Sync>;

/// A shuffle operator that only depends on the union of per-element feature bits.
///
/// `normalize` may merge unions that behave the same under further unions; it must
/// satisfy `normalize(normalize(a) | b) == normalize(a | b)` and preserve `eval`.
pub struct JoinKappa {
    pub features: Vec<u128>,
    pub normalize: Arc<dyn Fn(u128) -> u128 + Send + Sync>,
    pub eval: Arc<dyn Fn(u128) -> Elem + Send + Sync>,
}

/// How the shuffle operator of a table algebra is stored.
#[derive(Clone)]
pub enum KappaSpec {
    /// Indexed by the bit mask of the subset; entry 0 is ignored.
    Table(Vec<Elem>),
    Rule(KappaRule),
    Join(Arc<JoinKappa>),
}

/// Largest carrier whose shuffle operator may be stored as a mask-indexed table.
pub const KAPPA_TABLE_MAX: usize = 20;

pub(crate) struct Table {
    names: Vec<String>,
    by_name: HashMap<String, u32>,
    unit: u32,
    dot: Vec<u32>,
    tau: Vec<u32>,
    tauop: Vec<u32>,
    kappa: KappaSpec,
}

pub(crate) struct Product {
    pub(crate) left: Arc<Algebra>,
    pub(crate) right: Arc<Algebra>,
    nr: u32,
    size: usize,
    view: Option<PairView>,
}

/// Feature layout of a product: left bits above `rw` right bits.
#[derive(Clone, Copy)]
struct PairView {
    lw: u32,
    rw: u32,
    ljoin: bool,
    rjoin: bool,
}

impl PairView {
    fn new(left: &Algebra, right: &Algebra) -> Option<PairView> {
        let (l, r) = (left.join_width(), right.join_width());
        if l.is_none() && r.is_none() {
            return None;
        }
        let lw = l.map_or(left.size() as u64, u64::from);
        let rw = r.map_or(right.size() as u64, u64::from);
        (lw.max(rw) <= 64 && lw + rw <= 128).then_some(PairView { lw: lw as u32, rw: rw as u32, ljoin: l.is_some(), rjoin: r.is_some() })
    }

    fn split(&self, f: u128) -> (u128, u128) {
        (f >> self.rw, f & ((1u128 << self.rw) - 1))
    }
}

fn side_feature(alg: &Algebra, join: bool, e: Elem) -> u128 {
    if join {
        alg.join_feature(e)
    } else {
        1 << e.0
    }
}

fn side_value(alg: &Algebra, join: bool, f: u128) -> Elem {
    if join {
        alg.join_value(f)
    } else {
        alg.kappa(&elems_of_mask(f as u64))
    }
}

pub(crate) struct Restricted {
    pub(crate) parent: Arc<Algebra>,
    pub(crate) elems: Vec<u32>,
    pos: HashMap<u32, u32>,
    dot: Vec<u32>,
    tau: Vec<u32>,
    tauop: Vec<u32>,
}

pub(crate) enum Repr {
    Table(Table),
    Product(Product),
    Powerset(Powerset),
    Restricted(Restricted),
}

pub struct Algebra {
    pub(crate) repr: Repr,
    provenance: Provenance,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("size", &self.size())
            .field("provenance", &self.provenance)
            .finish()
    }
}

fn check_index(what: &str, v: u32, n: usize) -> Result<()> {
    if (v as usize) < n {
        Ok(())
    } else {
        Err(Error::Document(format!("{what} refers to element index {v} outside carrier of size {n}")))
    }
}

impl Algebra {
    /// Builds a table algebra. `dot` is row-major, `n*n` entries.
    pub fn from_tables(
        names: Vec<String>,
        unit: Elem,
        dot: Vec<Elem>,
        tau: Vec<Elem>,
        tauop: Vec<Elem>,
        kappa: KappaSpec,
        provenance: Provenance,
    ) -> Result<Algebra> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Document("carrier is empty".into()));
        }
        let mut by_name = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), i as u32).is_some() {
                return Err(Error::Document(format!("duplicate element name `{name}`")));
            }
        }
        if dot.len() != n * n || tau.len() != n || tauop.len() != n {
            return Err(Error::Document("operation tables do not match the carrier size".into()));
        }
        check_index("unit", unit.0, n)?;
        for e in dot.iter().chain(&tau).chain(&tauop) {
            check_index("operation table", e.0, n)?;
        }
        if let KappaSpec::Join(j) = &kappa {
            if j.features.len() != n {
                return Err(Error::Document("kappa features do not cover the carrier".into()));
            }
        }
        if let KappaSpec::Table(t) = &kappa {
            if n > KAPPA_TABLE_MAX || t.len() != 1usize << n {
                return Err(Error::Document("kappa table does not cover every subset".into()));
            }
            for e in &t[1..] {
                check_index("kappa table", e.0, n)?;
            }
        }
        let raw = |v: Vec<Elem>| v.into_iter().map(|e| e.0).collect::<Vec<u32>>();
        Ok(Algebra {
            repr: Repr::Table(Table {
                names,
                by_name,
                unit: unit.0,
                dot: raw(dot),
                tau: raw(tau),
                tauop: raw(tauop),
                kappa,
            }),
            provenance,
        })
    }

    pub(crate) fn from_repr(repr: Repr, provenance: Provenance) -> Algebra {
        Algebra { repr, provenance }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn size(&self) -> usize {
        match &self.repr {
            Repr::Table(t) => t.names.len(),
            Repr::Product(p) => p.size,
            Repr::Powerset(p) => p.size(),
            Repr::Restricted(r) => r.elems.len(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size() as u32).map(Elem)
    }

    pub fn unit(&self) -> Elem {
        match &self.repr {
            Repr::Table(t) => Elem(t.unit),
            Repr::Product(p) => p.join(p.left.unit(), p.right.unit()),
            Repr::Powerset(p) => p.unit(),
            Repr::Restricted(r) => {
                let u = r.parent.unit();
                Elem(*r.pos.get(&u.0).expect("restriction always contains the unit"))
            }
        }
    }

    pub fn dot(&self, a: Elem, b: Elem) -> Elem {
        match &self.repr {
            Repr::Table(t) => Elem(t.dot[a.index() * t.names.len() + b.index()]),
            Repr::Product(p) => {
                let (a1, a2) = p.split(a);
                let (b1, b2) = p.split(b);
                p.join(p.left.dot(a1, b1), p.right.dot(a2, b2))
            }
            Repr::Powerset(p) => p.dot(a, b),
            Repr::Restricted(r) => Elem(r.dot[a.index() * r.elems.len() + b.index()]),
        }
    }

    pub fn tau(&self, a: Elem) -> Elem {
        match &self.repr {
            Repr::Table(t) => Elem(t.tau[a.index()]),
            Repr::Product(p) => {
                let (a1, a2) = p.split(a);
                p.join(p.left.tau(a1), p.right.tau(a2))
            }
            Repr::Powerset(p) => p.tau(a),
            Repr::Restricted(r) => Elem(r.tau[a.index()]),
        }
    }

    pub fn tauop(&self, a: Elem) -> Elem {
        match &self.repr {
            Repr::Table(t) => Elem(t.tauop[a.index()]),
            Repr::Product(p) => {
                let (a1, a2) = p.split(a);
                p.join(p.left.tauop(a1), p.right.tauop(a2))
            }
            Repr::Powerset(p) => p.tauop(a),
            Repr::Restricted(r) => Elem(r.tauop[a.index()]),
        }
    }

    /// Shuffle of a nonempty set of elements. Order and duplicates in `set` do not matter.
    pub fn kappa(&self, set: &[Elem]) -> Elem {
        assert!(!set.is_empty(), "kappa of the empty set is undefined");
        if set.windows(2).all(|w| w[0] < w[1]) {
            self.kappa_sorted(set)
        } else {
            let mut v = set.to_vec();
            v.sort_unstable();
            v.dedup();
            self.kappa_sorted(&v)
        }
    }

    pub(crate) fn kappa_sorted(&self, set: &[Elem]) -> Elem {
        match &self.repr {
            Repr::Table(t) => match &t.kappa {
                KappaSpec::Table(tab) => {
                    let mask = set.iter().fold(0usize, |m, e| m | (1 << e.0));
                    tab[mask]
                }
                KappaSpec::Rule(rule) => rule(set),
                KappaSpec::Join(j) => (j.eval)(set.iter().fold(0, |f, e| f | j.features[e.index()])),
            },
            Repr::Product(p) => {
                let mut l: Vec<Elem> = Vec::with_capacity(set.len());
                let mut r: Vec<Elem> = Vec::with_capacity(set.len());
                for &e in set {
                    let (a, b) = p.split(e);
                    l.push(a);
                    r.push(b);
                }
                p.join(p.left.kappa(&l), p.right.kappa(&r))
            }
            Repr::Powerset(p) => p.kappa(set),
            Repr::Restricted(r) => {
                let mapped: Vec<Elem> = set.iter().map(|e| Elem(r.elems[e.index()])).collect();
                let v = r.parent.kappa(&mapped);
                Elem(*r.pos.get(&v.0).expect("restriction is closed under kappa"))
            }
        }
    }

    /// Direct access to a mask-indexed shuffle table, when the algebra has one.
    pub(crate) fn kappa_table(&self) -> Option<&[Elem]> {
        match &self.repr {
            Repr::Table(Table { kappa: KappaSpec::Table(t), .. }) => Some(t),
            _ => None,
        }
    }

    /// Bit width of the feature representation of the shuffle operator, if it has one.
    /// A product has one when a factor does; the other factor then uses one bit per element.
    pub(crate) fn join_width(&self) -> Option<u32> {
        match &self.repr {
            Repr::Table(Table { kappa: KappaSpec::Join(j), .. }) => {
                Some(128 - j.features.iter().fold(0, |a, f| a | f).leading_zeros())
            }
            Repr::Table(_) | Repr::Powerset(_) => None,
            Repr::Product(p) => p.view.map(|v| v.lw + v.rw),
            Repr::Restricted(r) => r.parent.join_width(),
        }
    }

    /// Feature bits of `e`; only valid when `join_width` is `Some`.
    pub(crate) fn join_feature(&self, e: Elem) -> u128 {
        match &self.repr {
            Repr::Table(Table { kappa: KappaSpec::Join(j), .. }) => j.features[e.index()],
            Repr::Product(p) => {
                let v = p.view.expect("join_feature without a feature representation");
                let (l, r) = p.split(e);
                side_feature(&p.left, v.ljoin, l) << v.rw | side_feature(&p.right, v.rjoin, r)
            }
            Repr::Restricted(r) => r.parent.join_feature(Elem(r.elems[e.index()])),
            _ => unreachable!("join_feature without a feature representation"),
        }
    }

    /// Canonical form of a feature union; unions with equal forms have equal shuffle values
    /// and stay equal under further unions.
    pub(crate) fn join_normalize(&self, f: u128) -> u128 {
        match &self.repr {
            Repr::Table(Table { kappa: KappaSpec::Join(j), .. }) => (j.normalize)(f),
            Repr::Product(p) => {
                let v = p.view.expect("join_normalize without a feature representation");
                let (lf, rf) = v.split(f);
                let lf = if v.ljoin { p.left.join_normalize(lf) } else { lf };
                let rf = if v.rjoin { p.right.join_normalize(rf) } else { rf };
                lf << v.rw | rf
            }
            Repr::Restricted(r) => r.parent.join_normalize(f),
            _ => unreachable!("join_normalize without a feature representation"),
        }
    }

    /// Shuffle value of a nonempty feature union; only valid when `join_width` is `Some`.
    pub(crate) fn join_value(&self, f: u128) -> Elem {
        match &self.repr {
            Repr::Table(Table { kappa: KappaSpec::Join(j), .. }) => (j.eval)(f),
            Repr::Product(p) => {
                let v = p.view.expect("join_value without a feature representation");
                let (lf, rf) = v.split(f);
                p.join(side_value(&p.left, v.ljoin, lf), side_value(&p.right, v.rjoin, rf))
            }
            Repr::Restricted(r) => {
                let v = r.parent.join_value(f);
                Elem(*r.pos.get(&v.0).expect("restriction is closed under kappa"))
            }
            _ => unreachable!("join_value without a feature representation"),
        }
    }

    /// True when evaluating the shuffle operator is costly enough to justify pruning.
    pub(crate) fn kappa_is_expensive(&self) -> bool {
        match &self.repr {
            Repr::Table(_) => false,
            Repr::Powerset(_) => true,
            Repr::Product(p) => p.left.kappa_is_expensive() || p.right.kappa_is_expensive(),
            Repr::Restricted(r) => r.parent.kappa_is_expensive(),
        }
    }

    pub fn name(&self, a: Elem) -> String {
        match &self.repr {
            Repr::Table(t) => t.names[a.index()].clone(),
            Repr::Product(p) => {
                let (x, y) = p.split(a);
                format!("({},{})", p.left.name(x), p.right.name(y))
            }
            Repr::Powerset(p) => p.name(a),
            Repr::Restricted(r) => r.parent.name(Elem(r.elems[a.index()])),
        }
    }

    pub fn elem_by_name(&self, name: &str) -> Option<Elem> {
        match &self.repr {
            Repr::Table(t) => t.by_name.get(name).map(|&i| Elem(i)),
            _ => self.elements().find(|&e| self.name(e) == name),
        }
    }

    pub fn is_idempotent(&self, a: Elem) -> bool {
        self.dot(a, a) == a
    }

    /// For pair-shaped algebras (products and their restrictions): the two factor algebras.
    pub(crate) fn factors(&self) -> Option<(&Algebra, &Algebra)> {
        match &self.repr {
            Repr::Product(p) => Some((&p.left, &p.right)),
            Repr::Restricted(r) => r.parent.factors(),
            _ => None,
        }
    }

    /// Components of a pair-shaped element. Only valid when `factors` is `Some`.
    pub(crate) fn split_pair(&self, e: Elem) -> (Elem, Elem) {
        match &self.repr {
            Repr::Product(p) => p.split(e),
            Repr::Restricted(r) => r.parent.split_pair(Elem(r.elems[e.index()])),
            _ => unreachable!("split_pair on a non-product algebra"),
        }
    }

    /// Element with the given components, if it lies in this carrier.
    pub(crate) fn join_pair(&self, l: Elem, r: Elem) -> Option<Elem> {
        match &self.repr {
            Repr::Product(p) => Some(p.join(l, r)),
            Repr::Restricted(res) => {
                let v = res.parent.join_pair(l, r)?;
                res.pos.get(&v.0).map(|&i| Elem(i))
            }
            _ => unreachable!("join_pair on a non-product algebra"),
        }
    }

    /// The sub-algebra on `elems`, which must be closed under every operator.
    /// Element `i` of the result is `elems[i]` of `parent`.
    pub fn restrict(parent: &Arc<Algebra>, elems: &[Elem]) -> Algebra {
        let (root, mapped): (Arc<Algebra>, Vec<u32>) = match &parent.repr {
            Repr::Restricted(r) => (r.parent.clone(), elems.iter().map(|e| r.elems[e.index()]).collect()),
            _ => (parent.clone(), elems.iter().map(|e| e.0).collect()),
        };
        let pos: HashMap<u32, u32> = mapped.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let m = mapped.len();
        let look = |v: Elem| *pos.get(&v.0).expect("restriction must be closed");
        let mut dot = Vec::with_capacity(m * m);
        for &a in &mapped {
            for &b in &mapped {
                dot.push(look(root.dot(Elem(a), Elem(b))));
            }
        }
        let tau = mapped.iter().map(|&a| look(root.tau(Elem(a)))).collect();
        let tauop = mapped.iter().map(|&a| look(root.tauop(Elem(a)))).collect();
        let provenance = root.provenance;
        Algebra {
            repr: Repr::Restricted(Restricted { parent: root, elems: mapped, pos, dot, tau, tauop }),
            provenance,
        }
    }
}

impl Product {
    fn split(&self, e: Elem) -> (Elem, Elem) {
        (Elem(e.0 / self.nr), Elem(e.0 % self.nr))
    }

    fn join(&self, l: Elem, r: Elem) -> Elem {
        Elem(l.0 * self.nr + r.0)
    }
}

/// Componentwise product. Element `(l, r)` has index `l * |right| + r`.
pub fn product_algebra(left: &Arc<Algebra>, right: &Arc<Algebra>) -> Result<Algebra> {
    let needed = left.size() as u64 * right.size() as u64;
    if needed > u32::MAX as u64 {
        return Err(Error::limit(LimitKind::Carrier { limit: u32::MAX as usize, needed }));
    }
    Ok(Algebra {
        repr: Repr::Product(Product {
            left: left.clone(),
            right: right.clone(),
            nr: right.size() as u32,
            size: needed as usize,
            view: PairView::new(left, right),
        }),
        provenance: Provenance::Product,
    })
}

/// Smallest `k >= 1` with `a^k` idempotent, and that idempotent.
pub fn idempotent_power(alg: &Algebra, a: Elem) -> (usize, Elem) {
    let mut p = a;
    let mut k = 1;
    loop {
        if alg.is_idempotent(p) {
            return (k, p);
        }
        p = alg.dot(p, a);
        k += 1;
        debug_assert!(k <= alg.size() + 1, "associative algebras reach an idempotent within n steps");
    }
}


pub(crate) fn elems_of_mask(mask: u64) -> Vec<Elem> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out.push(Elem(i));
        m &= m - 1;
    }
    out
}
