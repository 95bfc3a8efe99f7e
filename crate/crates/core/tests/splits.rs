mod common;

use std::collections::HashMap;

use common::associative_tables;
use msolo_core::builtins::*;
use msolo_core::splits::*;
use msolo_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn word(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

fn counting_aaaa() -> AdditiveLabelling {
    let h = HashMap::from([("a".to_string(), O)]);
    labelling_from_word(&sing_alg(), &h, &word("aaaa")).unwrap()
}

#[test]
fn labelling_examples() {
    let h = HashMap::from([("a".to_string(), Elem(0))]);
    let t = labelling_from_word(&trivial_algebra(), &h, &word("aaa")).unwrap();
    for x in 0..3 {
        for y in x + 1..=3 {
            assert_eq!(t.value(x, y), Elem(0));
        }
    }
    let c = counting_aaaa();
    for x in 0..4 {
        assert_eq!(c.value(x, x + 1), O);
        for y in x + 2..=4 {
            assert_eq!(c.value(x, y), M);
        }
    }
    let h = HashMap::from([("g".to_string(), OK), ("b".to_string(), BAD)]);
    let s = labelling_from_word(&subset_alg(), &h, &word("ggbgg")).unwrap();
    for x in 0..5 {
        for y in x + 1..=5 {
            assert_eq!(s.value(x, y) == BAD, x <= 2 && 2 < y, "({x},{y})");
        }
    }
    assert!(matches!(labelling_from_word(&sing_alg(), &h, &word("gz")), Err(Error::UnknownLetter(l)) if l == "z"));
    assert!(labelling_from_word(&sing_alg(), &h, &[]).is_err());
}

#[test]
fn verify_examples() {
    let h = HashMap::from([("a".to_string(), Elem(0))]);
    let t = labelling_from_word(&trivial_algebra(), &h, &word("aaaaa")).unwrap();
    let flat = Split { levels: vec![1; 5], height: 1 };
    assert!(verify_split(&t, &flat).is_ramseian);
    let c = counting_aaaa();
    let r = verify_split(&c, &Split { levels: vec![1; 4], height: 1 });
    assert!(!r.is_ramseian);
    assert!(r.violations.contains(&SplitViolation::NotConstant { class_min: 0, x: 0, y: 2, value: M, expected: O }));
    assert!(r.violations.contains(&SplitViolation::NotIdempotent { class_min: 0, value: O }));
    let r = verify_split(&c, &Split { levels: vec![1, 2, 1, 2], height: 2 });
    assert!(r.is_ramseian, "{:?}", r.violations);
    assert_eq!(r.height, 2);
    assert_eq!(
        r.classes,
        vec![
            NeighbourClass { level: 1, positions: vec![0], value: None },
            NeighbourClass { level: 2, positions: vec![1, 3], value: Some(M) },
            NeighbourClass { level: 1, positions: vec![2], value: None },
        ]
    );
    let r = verify_split(&c, &Split { levels: vec![1, 3, 1, 2], height: 2 });
    assert!(r.violations.contains(&SplitViolation::LevelOutOfRange { position: 1, level: 3 }));
}

#[test]
fn neighbourhood_classes_split_at_higher_levels() {
    assert_eq!(
        neighbour_classes(&[2, 1, 2, 3, 2, 1, 1]),
        vec![(2, vec![0, 2]), (1, vec![1]), (3, vec![3]), (2, vec![4]), (1, vec![5, 6])]
    );
}

#[test]
fn compute_examples() {
    let h = HashMap::from([("a".to_string(), Elem(0))]);
    for n in 1..=6 {
        let t = labelling_from_word(&trivial_algebra(), &h, &vec!["a".to_string(); n]).unwrap();
        assert_eq!(compute_split(&t), Split { levels: vec![1; n], height: 1 });
    }
    let c = counting_aaaa();
    let s = compute_split(&c);
    assert_eq!(s.height, 2);
    assert!(verify_split(&c, &s).is_ramseian);
    let h = HashMap::from([("a".to_string(), O)]);
    assert_eq!(compute_split(&labelling_from_word(&sing_alg(), &h, &word("a")).unwrap()).height, 1);
}

/// Least height of a Ramseian split, by trying every level assignment.
fn brute_min_height(lab: &AdditiveLabelling) -> usize {
    let n = lab.len();
    for h in 1..=n {
        let mut levels = vec![1; n];
        loop {
            if verify_split(lab, &Split { levels: levels.clone(), height: h }).is_ramseian {
                return h;
            }
            let mut i = 0;
            while i < n && levels[i] == h {
                levels[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            levels[i] += 1;
        }
    }
    unreachable!("every position on its own level is Ramseian")
}

#[test]
fn computed_height_is_least_on_short_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    let tables: Vec<CayleyTable> = (1..=3).flat_map(associative_tables).collect();
    for _ in 0..150 {
        let t = tables.choose(&mut rng).unwrap();
        let n = rng.gen_range(1..=6);
        let steps: Vec<Elem> = (0..n).map(|_| Elem(rng.gen_range(0..t.n as u32))).collect();
        let lab = AdditiveLabelling::from_steps(t, &steps);
        let s = compute_split(&lab);
        assert!(verify_split(&lab, &s).is_ramseian);
        assert_eq!(s.height, brute_min_height(&lab), "{t:?} {steps:?}");
    }
}

#[test]
fn random_labellings_get_ramseian_splits_within_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let tables: Vec<CayleyTable> = (1..=4).flat_map(associative_tables).collect();
    assert!(tables.iter().all(|t| t.is_associative()));
    for _ in 0..100 {
        let t = tables.choose(&mut rng).unwrap();
        let n = rng.gen_range(1..=100);
        let steps: Vec<Elem> = (0..n).map(|_| Elem(rng.gen_range(0..t.n as u32))).collect();
        let lab = AdditiveLabelling::from_steps(t, &steps);
        let s = compute_split(&lab);
        let r = verify_split(&lab, &s);
        assert!(r.is_ramseian, "{:?}", r.violations);
        assert_eq!(r.height, s.height);
        assert!(s.height <= 2 * t.n, "height {} on carrier {}", s.height, t.n);
        for _ in 0..50 {
            let mut p = [rng.gen_range(0..=n), rng.gen_range(0..=n), rng.gen_range(0..=n)];
            p.sort();
            if p[0] < p[1] && p[1] < p[2] {
                assert_eq!(lab.dot(lab.value(p[0], p[1]), lab.value(p[1], p[2])), lab.value(p[0], p[2]));
            }
        }
    }
}

#[test]
fn table_enumeration_counts() {
    // associative binary operations on 1, 2 and 3 labelled points
    assert_eq!(associative_tables(1).len(), 1);
    assert_eq!(associative_tables(2).len(), 8);
    assert_eq!(associative_tables(3).len(), 113);
}
