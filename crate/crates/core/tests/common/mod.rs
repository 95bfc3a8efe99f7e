#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use msolo_core::mso::Formula;
use msolo_core::splits::CayleyTable;
use msolo_core::{Algebra, Elem, Letter, Limits, Recognizer, WordExpr};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn lim() -> Limits {
    Limits::default()
}

pub fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Random expression of depth at most `depth` over `letters`.
pub fn random_expr(rng: &mut ChaCha8Rng, letters: &[Letter], depth: usize) -> WordExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => WordExpr::Eps,
            _ => WordExpr::Letter(letters.choose(rng).unwrap().clone()),
        };
    }
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(2..=3);
            WordExpr::concat((0..n).map(|_| random_expr(rng, letters, depth - 1)))
        }
        1 => WordExpr::omega(random_expr(rng, letters, depth - 1)),
        2 => WordExpr::omega_op(random_expr(rng, letters, depth - 1)),
        _ => {
            let n = rng.gen_range(1..=3);
            WordExpr::shuffle((0..n).map(|_| random_expr(rng, letters, depth - 1)))
        }
    }
}

/// Rebuilds a table algebra with some operators replaced.
pub fn rebuild(
    alg: &Algebra,
    dot: impl Fn(Elem, Elem) -> Elem,
    tau: impl Fn(Elem) -> Elem,
    kappa: impl Fn(&[Elem]) -> Elem + Send + Sync + 'static,
) -> Algebra {
    let els: Vec<Elem> = alg.elements().collect();
    let mut d = Vec::new();
    for &a in &els {
        for &b in &els {
            d.push(dot(a, b));
        }
    }
    Algebra::from_tables(
        els.iter().map(|&e| alg.name(e)).collect(),
        alg.unit(),
        d,
        els.iter().map(|&e| tau(e)).collect(),
        els.iter().map(|&e| alg.tauop(e)).collect(),
        msolo_core::KappaSpec::Rule(Arc::new(kappa)),
        msolo_core::Provenance::Explicit,
    )
    .unwrap()
}

pub fn counting_recognizer(accept: &[Elem]) -> Recognizer {
    use msolo_core::builtins::{sing_alg, O};
    Recognizer::new(Arc::new(sing_alg()), [(Letter::plain("a"), O)], accept.iter().copied()).unwrap()
}

/// Every associative table on `0..n`, by backtracking over cells in row-major order.
pub fn associative_tables(n: usize) -> Vec<CayleyTable> {
    fn consistent(t: &[Option<u32>], n: usize) -> bool {
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = t[a * n + b] else { continue };
                for c in 0..n {
                    let Some(bc) = t[b * n + c] else { continue };
                    if let (Some(l), Some(r)) = (t[ab as usize * n + c], t[a * n + bc as usize]) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
    fn go(t: &mut Vec<Option<u32>>, i: usize, n: usize, out: &mut Vec<CayleyTable>) {
        if i == n * n {
            out.push(CayleyTable { n, table: t.iter().map(|v| Elem(v.unwrap())).collect() });
            return;
        }
        for v in 0..n as u32 {
            t[i] = Some(v);
            if consistent(t, n) {
                go(t, i + 1, n, out);
            }
        }
        t[i] = None;
    }
    let mut out = Vec::new();
    go(&mut vec![None; n * n], 0, n, &mut out);
    out
}

const SET_VARS: [&str; 2] = ["X", "Y"];
const FO_VARS: [&str; 2] = ["x", "y"];

#[derive(Clone, Copy)]
enum Var {
    Set(usize),
    Fo(usize),
}

fn random_atom(rng: &mut ChaCha8Rng, bound: &[Var], alphabet: &[String]) -> Formula {
    let sets: Vec<&str> = bound.iter().filter_map(|v| if let Var::Set(i) = v { Some(SET_VARS[*i]) } else { None }).collect();
    let fos: Vec<&str> = bound.iter().filter_map(|v| if let Var::Fo(i) = v { Some(FO_VARS[*i]) } else { None }).collect();
    let mut options: Vec<Box<dyn Fn(&mut ChaCha8Rng) -> Formula>> = vec![Box::new(|_| Formula::True), Box::new(|_| Formula::False)];
    if !sets.is_empty() {
        let s = sets.clone();
        options.push(Box::new(move |r| Formula::Sing(s.choose(r).unwrap().to_string())));
        let s = sets.clone();
        options.push(Box::new(move |r| Formula::Sub(s.choose(r).unwrap().to_string(), s.choose(r).unwrap().to_string())));
        let s = sets.clone();
        options.push(Box::new(move |r| Formula::Before(s.choose(r).unwrap().to_string(), s.choose(r).unwrap().to_string())));
        let s = sets.clone();
        let a = alphabet.to_vec();
        options.push(Box::new(move |r| Formula::Letter(a.choose(r).unwrap().clone(), s.choose(r).unwrap().to_string())));
    }
    if !fos.is_empty() {
        let f = fos.clone();
        options.push(Box::new(move |r| Formula::Less(f.choose(r).unwrap().to_string(), f.choose(r).unwrap().to_string())));
        let f = fos.clone();
        options.push(Box::new(move |r| Formula::Equal(f.choose(r).unwrap().to_string(), f.choose(r).unwrap().to_string())));
        let f = fos.clone();
        let a = alphabet.to_vec();
        options.push(Box::new(move |r| Formula::Lab(a.choose(r).unwrap().clone(), f.choose(r).unwrap().to_string())));
        if !sets.is_empty() {
            let (f, s) = (fos.clone(), sets.clone());
            options.push(Box::new(move |r| Formula::In(f.choose(r).unwrap().to_string(), s.choose(r).unwrap().to_string())));
        }
    }
    // favour atoms that mention variables
    let i = if options.len() > 2 && rng.gen_bool(0.85) { rng.gen_range(2..options.len()) } else { rng.gen_range(0..options.len()) };
    options[i](rng)
}

fn random_body(rng: &mut ChaCha8Rng, bound: &mut Vec<Var>, quants: usize, depth: usize, alphabet: &[String]) -> Formula {
    if quants > 0 && rng.gen_bool(0.5) {
        let used_sets = bound.iter().filter(|v| matches!(v, Var::Set(_))).count();
        let used_fos = bound.iter().filter(|v| matches!(v, Var::Fo(_))).count();
        let fo = rng.gen_bool(0.6);
        let v = if fo { Var::Fo(used_fos) } else { Var::Set(used_sets) };
        bound.push(v);
        let body = random_body(rng, bound, quants - 1, depth, alphabet);
        bound.pop();
        let universal = rng.gen_bool(0.4);
        return match (v, universal) {
            (Var::Fo(i), false) => Formula::exists1(FO_VARS[i], body),
            (Var::Fo(i), true) => Formula::forall1(FO_VARS[i], body),
            (Var::Set(i), false) => Formula::exists(SET_VARS[i], body),
            (Var::Set(i), true) => Formula::forall(SET_VARS[i], body),
        };
    }
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng, bound, alphabet);
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(random_body(rng, bound, quants, depth - 1, alphabet)),
        1 => Formula::and(random_body(rng, bound, quants, depth - 1, alphabet), random_body(rng, bound, 0, depth - 1, alphabet)),
        2 => Formula::or(random_body(rng, bound, quants, depth - 1, alphabet), random_body(rng, bound, 0, depth - 1, alphabet)),
        _ => Formula::implies(random_body(rng, bound, 0, depth - 1, alphabet), random_body(rng, bound, quants, depth - 1, alphabet)),
    }
}

/// Random closed formula with at most `max_quants` quantifiers.
pub fn random_sentence(rng: &mut ChaCha8Rng, max_quants: usize, alphabet: &[String]) -> Formula {
    let q = rng.gen_range(1..=max_quants);
    random_body(rng, &mut Vec::new(), q, 3, alphabet)
}

/// Sorted, deduplicated copy.
pub fn set_of(xs: impl IntoIterator<Item = Elem>) -> Vec<Elem> {
    xs.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Recognizer over letters `x0, x1, ...` naming the given elements.
pub fn naming_recognizer(base: &Arc<Algebra>, elems: &[Elem]) -> (Recognizer, Vec<Letter>) {
    let letters: Vec<Letter> = (0..elems.len()).map(|i| Letter::plain(format!("x{i}"))).collect();
    let rec = Recognizer::new(base.clone(), letters.iter().cloned().zip(elems.iter().copied()), []).unwrap();
    (rec, letters)
}

/// All sequences of length `0..=max` over `letters`.
fn sequences(letters: &[Letter], max: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for l in letters {
                let mut t: Vec<Letter> = s.clone();
                t.push(l.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Values of `(a1 ... ap omega((e1 ... eq)))` with `p, q <= bound`, `q >= 1`, letters naming `a`.
pub fn omega_enumeration(base: &Arc<Algebra>, a: &[Elem], bound: usize) -> BTreeSet<Elem> {
    let (rec, letters) = naming_recognizer(base, a);
    let word = |s: &[Letter]| WordExpr::concat(s.iter().map(|l| WordExpr::Letter(l.clone())));
    let seqs = sequences(&letters, bound);
    let mut out = BTreeSet::new();
    for pre in &seqs {
        for lp in seqs.iter().filter(|s| !s.is_empty()) {
            let e = WordExpr::concat([word(pre), WordExpr::omega(word(lp))]);
            out.insert(msolo_core::eval_expr(&rec, &e).unwrap());
        }
    }
    out
}

/// Outcome of the tau-tilde oracle on one subset: the stabilization bound, or an error message.
pub fn tau_tilde_oracle(base: &Arc<Algebra>, a: &[Elem]) -> Result<usize, String> {
    let got: BTreeSet<Elem> = msolo_core::powerset::tau_tilde(base, a).unwrap().into_iter().collect();
    let mut prev: Option<BTreeSet<Elem>> = None;
    for bound in 1..=6 {
        let s = omega_enumeration(base, a, bound);
        if !s.is_subset(&got) {
            return Err(format!("bound {bound}: enumerated {s:?} not inside tau_tilde {got:?}"));
        }
        if prev.as_ref() == Some(&s) {
            return if s == got { Ok(bound) } else { Err(format!("stable at bound {bound} with {s:?}, tau_tilde {got:?}")) };
        }
        prev = Some(s);
    }
    Err(format!("no stabilization up to bound 6 for {a:?}"))
}

/// Checks random pair-alphabet expressions whose class word is the shuffle of all family
/// indices. Returns (accepted expressions, counterexamples).
pub fn kappa_tilde_sound(base: &Arc<Algebra>, family: &[Vec<Elem>], rng: &mut ChaCha8Rng, samples: usize) -> (usize, Vec<String>) {
    use msolo_core::builtins::shuffle_recognizer;
    let got: BTreeSet<Elem> = msolo_core::powerset::kappa_tilde(base, family).unwrap().into_iter().collect();
    let k = family.len() as u32;
    let bk = shuffle_recognizer(k).unwrap();
    let mut base_letters = Vec::new();
    let mut class_letters = Vec::new();
    for (i, a) in family.iter().enumerate() {
        for &m in a {
            let l = Letter::plain(format!("m{}_{}", m.0, i + 1));
            base_letters.push((l.clone(), m));
            class_letters.push((l, bk.image(&Letter::plain((i + 1).to_string())).unwrap()));
        }
    }
    if base_letters.is_empty() {
        return (0, if got.is_empty() { vec![] } else { vec![format!("family of empty sets gave {got:?}")] });
    }
    let letters: Vec<Letter> = base_letters.iter().map(|(l, _)| l.clone()).collect();
    let brec = Recognizer::new(base.clone(), base_letters, []).unwrap();
    let crec = Recognizer::new(bk.algebra().clone(), class_letters, bk.accept().iter().copied()).unwrap();
    let mut hits = 0;
    let mut bad = Vec::new();
    for _ in 0..samples {
        let e = if rng.gen_bool(0.5) {
            let n = rng.gen_range(1..=4);
            WordExpr::shuffle((0..n).map(|_| random_expr(rng, &letters, 2)))
        } else {
            random_expr(rng, &letters, 3)
        };
        if crec.accepts(msolo_core::eval_expr(&crec, &e).unwrap()) {
            hits += 1;
            let v = msolo_core::eval_expr(&brec, &e).unwrap();
            if !got.contains(&v) {
                bad.push(format!("{e} has value {} outside {got:?}", base.name(v)));
            }
        }
    }
    (hits, bad)
}

/// A random family of `1..=3` subsets of the carrier; members are rarely empty.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Elem>> {
    let k = rng.gen_range(1..=3);
    (0..k)
        .map(|_| {
            if rng.gen_bool(0.05) {
                return Vec::new();
            }
            let mask = rng.gen_range(1..1u32 << n);
            (0..n as u32).filter(|i| mask >> i & 1 == 1).map(Elem).collect()
        })
        .collect()
}
