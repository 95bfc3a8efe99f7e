//! Word-level rewrites that every algebra satisfying the axioms must leave value-invariant.

use std::collections::BTreeSet;

use crate::expr::WordExpr;

fn parts(e: &WordExpr) -> Vec<WordExpr> {
    match e {
        WordExpr::Concat(cs) => cs.clone(),
        other => vec![other.clone()],
    }
}

fn cat(slices: &[&[WordExpr]]) -> WordExpr {
    WordExpr::concat(slices.iter().flat_map(|s| s.iter().cloned()))
}

/// `d` written as `r >= 2` copies of a shorter block.
fn roots(d: &[WordExpr]) -> Vec<WordExpr> {
    let n = d.len();
    (1..n)
        .filter(|&p| n % p == 0 && (p..n).all(|i| d[i] == d[i - p]))
        .map(|p| cat(&[&d[..p]]))
        .collect()
}

fn at_root(e: &WordExpr) -> Vec<WordExpr> {
    let mut out = Vec::new();
    match e {
        WordExpr::Eps | WordExpr::Letter(_) => {}
        WordExpr::Omega(x) => {
            let d = parts(x);
            for i in 1..d.len() {
                let (l, r) = d.split_at(i);
                out.push(WordExpr::concat([cat(&[l]), WordExpr::omega(cat(&[r, l]))]));
            }
            out.push(WordExpr::omega(cat(&[&d, &d])));
            out.extend(roots(&d).into_iter().map(WordExpr::omega));
            if matches!(**x, WordExpr::Shuffle(_)) {
                out.push((**x).clone());
            }
        }
        WordExpr::OmegaOp(x) => {
            let d = parts(x);
            for i in 1..d.len() {
                let (b, a) = d.split_at(i);
                out.push(WordExpr::concat([WordExpr::omega_op(cat(&[a, b])), cat(&[a])]));
            }
            out.push(WordExpr::omega_op(cat(&[&d, &d])));
            out.extend(roots(&d).into_iter().map(WordExpr::omega_op));
            if matches!(**x, WordExpr::Shuffle(_)) {
                out.push((**x).clone());
            }
        }
        WordExpr::Shuffle(p) => {
            let s = e.clone();
            out.push(WordExpr::concat([s.clone(), s.clone()]));
            for c in p {
                out.push(WordExpr::concat([s.clone(), c.clone(), s.clone()]));
            }
            out.push(WordExpr::omega(s.clone()));
            out.push(WordExpr::omega_op(s.clone()));
            // P^kappa = (P u P'')^kappa for P'' inside the absorbing set of P
            let mut extra = vec![s.clone()];
            for a in p {
                extra.push(WordExpr::concat([a.clone(), s.clone()]));
                extra.push(WordExpr::concat([s.clone(), a.clone()]));
                for b in p {
                    extra.push(WordExpr::concat([a.clone(), s.clone(), b.clone()]));
                }
            }
            for x in extra {
                out.push(WordExpr::shuffle(p.iter().cloned().chain([x])));
            }
            // and the reverse direction
            for (k, m) in p.iter().enumerate() {
                if p.len() < 2 {
                    break;
                }
                let q: Vec<WordExpr> = p.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c.clone()).collect();
                let sq = WordExpr::shuffle(q.iter().cloned());
                let d = parts(m);
                let absorbed = d.iter().enumerate().any(|(j, dj)| {
                    *dj == sq && {
                        let ok = |side: &[WordExpr]| side.is_empty() || q.contains(&cat(&[side]));
                        ok(&d[..j]) && ok(&d[j + 1..])
                    }
                });
                if absorbed {
                    out.push(sq);
                }
            }
        }
        WordExpr::Concat(cs) => {
            let n = cs.len();
            for j in 0..n.saturating_sub(1) {
                if cs[j] == cs[j + 1] && matches!(cs[j], WordExpr::Shuffle(_)) {
                    out.push(cat(&[&cs[..j], &cs[j + 1..]]));
                }
            }
            for j in 0..n.saturating_sub(2) {
                if let WordExpr::Shuffle(p) = &cs[j] {
                    if cs[j] == cs[j + 2] && p.contains(&cs[j + 1]) {
                        out.push(cat(&[&cs[..j + 1], &cs[j + 3..]]));
                    }
                }
            }
            for j in 0..n {
                match &cs[j] {
                    WordExpr::Omega(inner) => {
                        // x omega(y x) -> omega(x y)
                        let d = parts(inner);
                        for q in 1..d.len() {
                            let (y, x) = d.split_at(q);
                            if j >= x.len() && cs[j - x.len()..j] == *x {
                                let folded = WordExpr::omega(cat(&[x, y]));
                                out.push(cat(&[&cs[..j - x.len()], &[folded], &cs[j + 1..]]));
                            }
                        }
                    }
                    WordExpr::OmegaOp(inner) => {
                        // omegaR(a b) a -> omegaR(b a)
                        let d = parts(inner);
                        for q in 1..d.len() {
                            let (a, b) = d.split_at(q);
                            if j + 1 + a.len() <= n && cs[j + 1..j + 1 + a.len()] == *a {
                                let folded = WordExpr::omega_op(cat(&[b, a]));
                                out.push(cat(&[&cs[..j], &[folded], &cs[j + 1 + a.len()..]]));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    out
}

fn one_step(e: &WordExpr) -> Vec<WordExpr> {
    let mut out = at_root(e);
    match e {
        WordExpr::Eps | WordExpr::Letter(_) => {}
        WordExpr::Omega(x) => out.extend(one_step(x).into_iter().map(WordExpr::omega)),
        WordExpr::OmegaOp(x) => out.extend(one_step(x).into_iter().map(WordExpr::omega_op)),
        WordExpr::Concat(cs) | WordExpr::Shuffle(cs) => {
            let is_concat = matches!(e, WordExpr::Concat(_));
            for (i, c) in cs.iter().enumerate() {
                for v in one_step(c) {
                    let mut next = cs.clone();
                    next[i] = v;
                    out.push(if is_concat { WordExpr::concat(next) } else { WordExpr::shuffle(next) });
                }
            }
        }
    }
    out
}

/// All expressions reachable from `e` by at most `depth` rewrite steps, `e` included.
pub fn rewrite_variants(e: &WordExpr, depth: usize) -> BTreeSet<WordExpr> {
    let mut seen: BTreeSet<WordExpr> = BTreeSet::new();
    seen.insert(e.clone());
    let mut frontier = vec![e.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for f in &frontier {
            for v in one_step(f) {
                if seen.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}
