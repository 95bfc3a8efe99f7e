use super::formula::Formula;

/// Set variable standing for the first-order variable `x`.
pub fn singleton_var(x: &str) -> String {
    format!("X_{x}")
}

struct Scope(Vec<(String, bool)>);

impl Scope {
    fn name(&self, v: &str) -> String {
        match self.0.iter().rev().find(|(n, _)| n == v) {
            Some((_, true)) => singleton_var(v),
            _ => v.to_string(),
        }
    }
}

/// Rewrites into the core connectives `not`, `and`, `exists` over the four atoms.
pub fn desugar(f: &Formula) -> Formula {
    go(f, &mut Scope(Vec::new()))
}

fn bind(scope: &mut Scope, v: &str, first: bool, body: &Formula) -> (String, Formula) {
    scope.0.push((v.to_string(), first));
    let b = go(body, scope);
    let name = scope.name(v);
    scope.0.pop();
    (name, b)
}

fn go(f: &Formula, s: &mut Scope) -> Formula {
    use Formula as F;
    match f {
        F::True => F::True,
        F::False => F::False,
        F::Sub(x, y) | F::In(x, y) => F::Sub(s.name(x), s.name(y)),
        F::Equal(x, y) => F::Sub(s.name(x), s.name(y)),
        F::Sing(x) => F::Sing(s.name(x)),
        F::Before(x, y) | F::Less(x, y) => F::Before(s.name(x), s.name(y)),
        F::Letter(a, x) | F::Lab(a, x) => F::Letter(a.clone(), s.name(x)),
        F::Not(g) => F::not(go(g, s)),
        F::And(a, b) => F::and(go(a, s), go(b, s)),
        F::Or(a, b) => F::not(F::and(F::not(go(a, s)), F::not(go(b, s)))),
        F::Implies(a, b) => F::not(F::and(go(a, s), F::not(go(b, s)))),
        F::Exists(v, g) => {
            let (n, b) = bind(s, v, false, g);
            F::exists(n, b)
        }
        F::Forall(v, g) => {
            let (n, b) = bind(s, v, false, g);
            F::not(F::exists(n, F::not(b)))
        }
        F::Exists1(v, g) => {
            let (n, b) = bind(s, v, true, g);
            F::exists(n.clone(), F::and(F::Sing(n), b))
        }
        F::Forall1(v, g) => {
            let (n, b) = bind(s, v, true, g);
            F::not(F::exists(n.clone(), F::and(F::Sing(n), F::not(b))))
        }
    }
}
