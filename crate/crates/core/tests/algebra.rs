mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{counting_recognizer, lim, rebuild};
use msolo_core::axioms::{check_axioms, Axiom, CheckMode};
use msolo_core::builtins::*;
use msolo_core::saturate::{closure, recognizer_seeds};
use msolo_core::*;

/// Naive least fixpoint: apply every operator to everything until nothing new appears.
fn naive_closure(alg: &Algebra, seeds: &[Elem]) -> BTreeSet<Elem> {
    let mut set: BTreeSet<Elem> = seeds.iter().copied().collect();
    loop {
        let cur: Vec<Elem> = set.iter().copied().collect();
        let mut next = set.clone();
        for &a in &cur {
            next.insert(alg.tau(a));
            next.insert(alg.tauop(a));
            for &b in &cur {
                next.insert(alg.dot(a, b));
            }
        }
        for mask in 1u64..(1 << cur.len()) {
            let p: Vec<Elem> = (0..cur.len()).filter(|i| mask >> i & 1 == 1).map(|i| cur[i]).collect();
            next.insert(alg.kappa(&p));
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

#[test]
fn one_element_algebra_passes_and_has_trivial_power() {
    let t = trivial_algebra();
    assert_eq!(t.size(), 1);
    assert!(check_axioms(&t, CheckMode::Exhaustive).unwrap().passed());
    assert_eq!(idempotent_power(&t, Elem(0)), (1, Elem(0)));
}

#[test]
fn counting_algebra_tables() {
    let s = sing_alg();
    assert_eq!(s.dot(O, O), M);
    assert_eq!(s.dot(Z, O), O);
    assert_eq!(s.tau(O), M);
    assert_eq!(s.tauop(Z), Z);
    assert_eq!(s.kappa(&[Z, O]), M);
    assert_eq!(s.kappa(&[Z]), Z);
    assert_eq!(s.unit(), Z);
    assert_eq!(s.name(M), "m");
    assert_eq!(s.elem_by_name("o"), Some(O));
    assert_eq!(s.provenance(), Provenance::BuiltinRule);
}

#[test]
fn idempotent_powers_in_counting_algebra() {
    let s = sing_alg();
    assert_eq!(idempotent_power(&s, O), (2, M));
    assert_eq!(idempotent_power(&s, Z), (1, Z));
    assert_eq!(idempotent_power(&s, M), (1, M));
}

#[test]
fn idempotent_power_is_minimal_on_a_cyclic_group() {
    // Z/3 with unit 0: powers of 1 are 1, 2, 0
    let names = vec!["0".to_string(), "1".to_string(), "2".to_string()];
    let dot = (0..3u32).flat_map(|a| (0..3u32).map(move |b| Elem((a + b) % 3))).collect();
    let alg = Algebra::from_tables(
        names,
        Elem(0),
        dot,
        vec![Elem(0); 3],
        vec![Elem(0); 3],
        KappaSpec::Rule(Arc::new(|_: &[Elem]| Elem(0))),
        Provenance::Explicit,
    )
    .unwrap();
    assert_eq!(idempotent_power(&alg, Elem(1)), (3, Elem(0)));
    assert_eq!(idempotent_power(&alg, Elem(2)), (3, Elem(0)));
}

#[test]
fn tau_mutation_is_an_iteration_violation() {
    let s = sing_alg();
    let m = rebuild(&s, |a, b| s.dot(a, b), |e| if e == O { O } else { s.tau(e) }, move |p| sing_alg().kappa(p));
    let r = check_axioms(&m, CheckMode::Exhaustive).unwrap();
    assert!(!r.passed());
    assert!(r.axioms().contains(&Axiom::A2));
    // tau(o o) = tau(m) = m but tau(o) = o
    assert!(r.violations.iter().any(|v| v.axiom == Axiom::A2 && v.lhs != v.rhs && (v.lhs == "m" || v.rhs == "m")));
}

#[test]
fn exhaustive_check_refuses_large_carriers() {
    let b2 = shuffle_algebra(2).unwrap();
    match check_axioms(&b2, CheckMode::Exhaustive) {
        Err(Error::TooLargeForExhaustive { size: 31, limit: 12 }) => {}
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn sampled_checks_are_reproducible() {
    let b2 = shuffle_algebra(2).unwrap();
    let a = check_axioms(&b2, CheckMode::Sampled { seed: 9, trials: 2000 }).unwrap();
    let b = check_axioms(&b2, CheckMode::Sampled { seed: 9, trials: 2000 }).unwrap();
    assert_eq!(a, b);
    assert!(a.passed());
}

#[test]
fn associativity_violation_is_reported() {
    let s = sing_alg();
    // (o m) o = o o = m but o (m o) = o m = o
    let m = rebuild(&s, |a, b| if a == O && b == M { O } else { s.dot(a, b) }, |e| s.tau(e), |p| sing_alg().kappa(p));
    let r = check_axioms(&m, CheckMode::Exhaustive).unwrap();
    assert!(r.axioms().contains(&Axiom::A1), "{r}");
}

#[test]
fn unit_violation_is_reported() {
    let s = sing_alg();
    let m = rebuild(&s, |a, b| s.dot(a, b), |e| if e == Z { O } else { s.tau(e) }, |p| sing_alg().kappa(p));
    let r = check_axioms(&m, CheckMode::Exhaustive).unwrap();
    assert!(r.axioms().contains(&Axiom::A5), "{r}");
}

#[test]
fn product_is_componentwise() {
    let s = Arc::new(sing_alg());
    let p = product_algebra(&s, &s).unwrap();
    assert_eq!(p.size(), 9);
    assert_eq!(p.provenance(), Provenance::Product);
    let pair = |a: Elem, b: Elem| Elem(a.0 * 3 + b.0);
    assert_eq!(p.dot(pair(O, Z), pair(O, O)), pair(M, O));
    assert_eq!(p.kappa(&[pair(O, Z)]), pair(M, Z));
    assert_eq!(p.unit(), pair(Z, Z));
    for a in p.elements() {
        let (x, y) = (Elem(a.0 / 3), Elem(a.0 % 3));
        assert_eq!(p.tau(a), pair(s.tau(x), s.tau(y)));
        assert_eq!(p.tauop(a), pair(s.tauop(x), s.tauop(y)));
        for b in p.elements() {
            let (u, v) = (Elem(b.0 / 3), Elem(b.0 % 3));
            assert_eq!(p.dot(a, b), pair(s.dot(x, u), s.dot(y, v)));
        }
    }
    for mask in 1u32..(1 << 9) {
        let set: Vec<Elem> = (0..9).filter(|i| mask >> i & 1 == 1).map(Elem).collect();
        let left: BTreeSet<Elem> = set.iter().map(|e| Elem(e.0 / 3)).collect();
        let right: BTreeSet<Elem> = set.iter().map(|e| Elem(e.0 % 3)).collect();
        let want = pair(
            s.kappa(&left.into_iter().collect::<Vec<_>>()),
            s.kappa(&right.into_iter().collect::<Vec<_>>()),
        );
        assert_eq!(p.kappa(&set), want);
    }
}

#[test]
fn product_of_one_element_algebras() {
    let t = Arc::new(trivial_algebra());
    assert_eq!(product_algebra(&t, &t).unwrap().size(), 1);
}

#[test]
fn products_of_builtins_pass_the_axioms() {
    let names = ["trivial", "sing", "subset", "before"];
    for a in names {
        for b in names {
            let (x, y) = (Arc::new(builtin_algebra(a).unwrap()), Arc::new(builtin_algebra(b).unwrap()));
            let p = product_algebra(&x, &y).unwrap();
            let mode = if p.size() <= 12 { CheckMode::Exhaustive } else { CheckMode::Sampled { seed: 1, trials: 20_000 } };
            let r = check_axioms(&p, mode).unwrap();
            assert!(r.passed(), "{a} x {b}: {r}");
        }
    }
}

#[test]
fn saturation_examples() {
    let t = trivial_algebra();
    let r = saturate(&t, &[(Elem(0), WordExpr::Eps)], &lim()).unwrap();
    assert_eq!(r.closure(), &[Elem(0)]);
    assert_eq!(r.witness(Elem(0)), Some(WordExpr::Eps));

    let rec = counting_recognizer(&[M]);
    let r = saturate(rec.algebra(), &recognizer_seeds(&rec), &lim()).unwrap();
    assert_eq!(r.closure().iter().copied().collect::<BTreeSet<_>>(), [Z, O, M].into());
    assert_eq!(eval_expr(&rec, &r.witness(M).unwrap()).unwrap(), M);
    assert_eq!(r.stage(Z), Some(0));
    assert_eq!(r.stage(M), Some(1));

    let b2 = shuffle_recognizer(2).unwrap();
    let r = saturate(b2.algebra(), &recognizer_seeds(&b2), &lim()).unwrap();
    let acc = ShuffleCodec { k: 2 }.accept();
    assert!(r.contains(acc));
    assert_eq!(r.witness(acc).unwrap().to_string(), "shuffle(1,2)");
}

#[test]
fn saturation_matches_the_naive_fixpoint() {
    for name in ["trivial", "sing", "subset", "before", "letter"] {
        let rec = builtin_recognizer(name).unwrap();
        let alg = rec.algebra();
        for mask in 1u32..(1 << alg.size()) {
            let seeds: Vec<Elem> = alg.elements().filter(|e| mask >> e.0 & 1 == 1).collect();
            let got: BTreeSet<Elem> = closure(alg, &seeds, &lim()).unwrap().into_iter().collect();
            assert_eq!(got, naive_closure(alg, &seeds), "{name} seeds {seeds:?}");
        }
    }
    let b1 = shuffle_recognizer(1).unwrap();
    for mask in 1u32..(1 << b1.algebra().size()) {
        let seeds: Vec<Elem> = b1.algebra().elements().filter(|e| mask >> e.0 & 1 == 1).collect();
        let got: BTreeSet<Elem> = closure(b1.algebra(), &seeds, &lim()).unwrap().into_iter().collect();
        assert_eq!(got, naive_closure(b1.algebra(), &seeds), "seeds {seeds:?}");
    }
}

#[test]
fn shuffle_recognizer_reaches_every_class() {
    // every boundary/set combination is a product of letters with a shuffle of a letter set
    let b2 = shuffle_recognizer(2).unwrap();
    let seeds: Vec<Elem> = recognizer_seeds(&b2).into_iter().map(|(e, _)| e).collect();
    assert_eq!(closure(b2.algebra(), &seeds, &lim()).unwrap().len(), 31);
    let codec = ShuffleCodec { k: 2 };
    let no_unit = closure(b2.algebra(), &seeds[1..], &lim()).unwrap();
    assert_eq!(no_unit.len(), 30);
    assert!(!no_unit.contains(&codec.encode(ShuffleClass::Unit)));
}

#[test]
fn saturation_is_idempotent_monotone_and_sound() {
    let b2 = shuffle_recognizer(2).unwrap();
    let alg = b2.algebra();
    let seeds = recognizer_seeds(&b2);
    let r = saturate(alg, &seeds, &lim()).unwrap();
    for &e in r.closure() {
        assert_eq!(eval_expr(&b2, &r.witness(e).unwrap()).unwrap(), e);
    }
    let again: Vec<(Elem, WordExpr)> = r.closure().iter().map(|&e| (e, r.witness(e).unwrap())).collect();
    let r2 = saturate(alg, &again, &lim()).unwrap();
    assert_eq!(r2.closure().iter().collect::<BTreeSet<_>>(), r.closure().iter().collect::<BTreeSet<_>>());
    let smaller = saturate(alg, &seeds[..2], &lim()).unwrap();
    assert!(smaller.closure().iter().all(|&e| r.contains(e)));
}

#[test]
fn saturation_is_deterministic() {
    let rec = builtin_recognizer("before").unwrap();
    let run = || {
        let r = saturate(rec.algebra(), &recognizer_seeds(&rec), &lim()).unwrap();
        r.closure().iter().map(|&e| (e, r.stage(e), r.witness(e).unwrap().to_string())).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn saturation_respects_the_closure_cap() {
    let b2 = shuffle_recognizer(2).unwrap();
    let l = Limits { max_closure: 4, ..Limits::default() };
    let err = saturate(b2.algebra(), &recognizer_seeds(&b2), &l).unwrap_err();
    assert!(matches!(err, Error::Limit { kind: LimitKind::ClosureSize { limit: 4 }, .. }), "{err}");
}

#[test]
fn saturation_respects_the_subset_cap() {
    let b3 = shuffle_recognizer(3).unwrap();
    let l = Limits { max_subsets_per_stage: 3, ..Limits::default() };
    let err = saturate(b3.algebra(), &recognizer_seeds(&b3), &l).unwrap_err();
    assert!(matches!(err, Error::Limit { kind: LimitKind::SubsetsPerStage { limit: 3, .. }, .. }), "{err}");
}

#[test]
fn trimming_a_product() {
    let s = Arc::new(sing_alg());
    let p = Arc::new(product_algebra(&s, &s).unwrap());
    let oo = Elem(O.0 * 3 + O.0);
    let rec = Recognizer::new(p, [(Letter::plain("a"), oo)], [oo]).unwrap();
    let t = trim_reachable(&rec, &lim()).unwrap();
    assert_eq!(t.algebra().size(), 3);
    let names: BTreeSet<String> = t.algebra().elements().map(|e| t.algebra().name(e)).collect();
    assert_eq!(names, ["(z,z)", "(o,o)", "(m,m)"].iter().map(|s| s.to_string()).collect());
    let tt = trim_reachable(&t, &lim()).unwrap();
    assert_eq!(tt.algebra().size(), 3);
    assert_eq!(tt.accept().len(), 1);
    for e in ["a", "(a a)", "omega(a)", "shuffle(a)", "eps"] {
        let w = parse_expr(e).unwrap();
        assert_eq!(rec.accepts(eval_expr(&rec, &w).unwrap()), t.accepts(eval_expr(&t, &w).unwrap()), "{e}");
    }
}

#[test]
fn trimming_reachable_recognizer_keeps_its_size() {
    let rec = builtin_recognizer("sing").unwrap();
    let t = trim_reachable(&rec, &lim()).unwrap();
    assert_eq!(t.algebra().size(), 3);
    assert!(check_axioms(t.algebra(), CheckMode::Exhaustive).unwrap().passed());
}

#[test]
fn emptiness_examples() {
    assert_eq!(is_empty(&counting_recognizer(&[]), &lim()).unwrap(), Emptiness::Empty);
    match is_empty(&counting_recognizer(&[O]), &lim()).unwrap() {
        Emptiness::Nonempty(w) => assert_eq!(w.to_string(), "a"),
        e => panic!("{e:?}"),
    }
    match is_empty(&counting_recognizer(&[M]), &lim()).unwrap() {
        Emptiness::Nonempty(w) => {
            assert_eq!(eval_expr(&counting_recognizer(&[M]), &w).unwrap(), M);
            assert_eq!(w.to_string(), "(a a)");
        }
        e => panic!("{e:?}"),
    }
    match is_empty(&trivial_alg(), &lim()).unwrap() {
        Emptiness::Nonempty(w) => assert_eq!(w, WordExpr::Eps),
        e => panic!("{e:?}"),
    }
}

#[test]
fn witness_letter_is_alphabetically_least() {
    let s = Arc::new(sing_alg());
    let rec = Recognizer::new(s, [(Letter::plain("b"), O), (Letter::plain("a"), O), (Letter::plain("c"), Z)], [O]).unwrap();
    match is_empty(&rec, &lim()).unwrap() {
        Emptiness::Nonempty(w) => assert_eq!(w.to_string(), "a"),
        e => panic!("{e:?}"),
    }
}

#[test]
fn recognizer_validation() {
    let s = Arc::new(sing_alg());
    assert!(Recognizer::new(s.clone(), [(Letter::plain("a"), Elem(7))], []).is_err());
    assert!(Recognizer::new(s.clone(), [(Letter::plain("a"), O)], [Elem(9)]).is_err());
    assert!(Recognizer::new(s.clone(), [(Letter::plain("a"), O), (Letter::plain("a"), Z)], []).is_err());
    let r = Recognizer::new(s, [(Letter::plain("a"), O)], [Z]).unwrap();
    assert!(r.accepts(eval_expr(&r, &WordExpr::Eps).unwrap()));
    let c = r.complement();
    assert_eq!(c.accept().iter().copied().collect::<Vec<_>>(), vec![O, M]);
}

fn rule_backed_shuffle(k: u32) -> Algebra {
    let b = shuffle_algebra(k).unwrap();
    let codec = ShuffleCodec { k };
    rebuild(&b, |x, y| b.dot(x, y), |x| b.tau(x), move |set| {
        let classes: Vec<ShuffleClass> = set.iter().map(|&e| codec.decode(e)).collect();
        codec.encode(codec.kappa(&classes))
    })
}

#[test]
fn shuffle_kappa_agrees_with_class_rules() {
    use rand::{Rng, SeedableRng};
    for k in 1..=3 {
        let fast = shuffle_algebra(k).unwrap();
        let slow = rule_backed_shuffle(k);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(k as u64);
        let n = fast.size() as u32;
        for _ in 0..20_000 {
            let size = rng.gen_range(1..=5);
            let set: Vec<Elem> = (0..size).map(|_| Elem(rng.gen_range(0..n))).collect();
            assert_eq!(fast.kappa(&set), slow.kappa(&set), "k={k} {set:?}");
        }
    }
}

#[test]
fn feature_saturation_matches_plain_enumeration() {
    let heavy = Limits { max_subsets_per_stage: 1 << 22, ..Limits::default() };
    for k in 1..=2 {
        let fast = shuffle_algebra(k).unwrap();
        let slow = rule_backed_shuffle(k);
        let n = fast.size() as u32;
        let mut compared = 0;
        for a in 0..n {
            for b in a..n {
                let seeds = [(Elem(a), WordExpr::letter("p")), (Elem(b), WordExpr::letter("q"))];
                let Ok(s) = saturate(&slow, &seeds, &heavy) else { continue };
                let f = saturate(&fast, &seeds, &heavy).unwrap();
                let show = |r: &SaturationResult| {
                    r.closure().iter().map(|&e| (e, r.stage(e), r.witness(e).unwrap())).collect::<Vec<_>>()
                };
                assert_eq!(show(&f), show(&s), "k={k} seeds {a} {b}");
                compared += 1;
            }
        }
        assert!(compared > 20, "k={k}: only {compared} seed pairs compared");
    }
}
