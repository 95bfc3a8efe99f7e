use std::collections::BTreeSet;
use std::fmt;

/// Formula syntax. Variables are names; first-order variables come from `ex1`/`all1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Sub(String, String),
    Sing(String),
    Before(String, String),
    Letter(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists1(String, Box<Formula>),
    Forall1(String, Box<Formula>),
    Less(String, String),
    Equal(String, String),
    In(String, String),
    Lab(String, String),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists1(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists1(v.into(), Box::new(f))
    }

    pub fn forall1(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall1(v.into(), Box::new(f))
    }

    /// True when only the core connectives and atoms occur.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Sub(..) | Formula::Sing(_) | Formula::Before(..) | Formula::Letter(..) => true,
            Formula::Not(f) | Formula::Exists(_, f) => f.is_core(),
            Formula::And(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    /// Free variables, first-order ones included under their own names.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut see = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Sing(x) => see(x, bound),
            Formula::Letter(_, x) | Formula::Lab(_, x) => see(x, bound),
            Formula::Sub(x, y) | Formula::Before(x, y) | Formula::Less(x, y) | Formula::Equal(x, y) | Formula::In(x, y) => {
                see(x, bound);
                see(y, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) | Formula::Exists1(v, f) | Formula::Forall1(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.quantifier_count() + b.quantifier_count(),
            Formula::Exists(_, f) | Formula::Forall(_, f) | Formula::Exists1(_, f) | Formula::Forall1(_, f) => 1 + f.quantifier_count(),
            _ => 0,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Sub(x, y) => write!(f, "sub({x},{y})"),
            Formula::Sing(x) => write!(f, "sing({x})"),
            Formula::Before(x, y) => write!(f, "before({x},{y})"),
            Formula::Letter(a, x) => write!(f, "letter({a},{x})"),
            Formula::Lab(a, x) => write!(f, "lab({a},{x})"),
            Formula::Less(x, y) => write!(f, "({x} < {y})"),
            Formula::Equal(x, y) => write!(f, "({x} = {y})"),
            Formula::In(x, y) => write!(f, "({x} in {y})"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(v, g) => write!(f, "(ex {v}. {g})"),
            Formula::Forall(v, g) => write!(f, "(all {v}. {g})"),
            Formula::Exists1(v, g) => write!(f, "(ex1 {v}. {g})"),
            Formula::Forall1(v, g) => write!(f, "(all1 {v}. {g})"),
        }
    }
}
