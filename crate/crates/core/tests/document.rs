mod common;

use msolo_core::builtins::*;
use msolo_core::document::*;
use msolo_core::*;
use serde_json::json;

fn one_element() -> serde_json::Value {
    json!({"elements": ["e"], "unit": "e", "dot": [["e"]], "tau": ["e"], "tauop": ["e"],
           "kappa": [{"set": ["e"], "value": "e"}]})
}

fn two_element() -> serde_json::Value {
    json!({"elements": ["e0", "e1"], "unit": "e0",
           "dot": [["e0", "e1"], ["e1", "e1"]], "tau": ["e0", "e1"], "tauop": ["e0", "e1"],
           "kappa": [{"set": ["e0"], "value": "e0"}, {"set": ["e1"], "value": "e1"}, {"set": ["e0", "e1"], "value": "e1"}]})
}

#[test]
fn one_element_document() {
    let a = load_algebra(&one_element().to_string()).unwrap();
    assert_eq!(a.size(), 1);
    assert_eq!(a.provenance(), Provenance::Explicit);
    assert_eq!(a.name(a.unit()), "e");
}

#[test]
fn missing_kappa_entry_is_reported() {
    let mut d = two_element();
    d["kappa"].as_array_mut().unwrap().pop();
    match load_algebra(&d.to_string()) {
        Err(e @ Error::MissingKappa(_)) => assert_eq!(e.to_string(), "missing kappa entry for {e0,e1}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let mut dup = two_element();
    dup["kappa"].as_array_mut().unwrap().push(json!({"set": ["e1", "e0"], "value": "e0"}));
    let mut unknown = two_element();
    unknown["tau"] = json!(["e0", "e7"]);
    let mut short = two_element();
    short["dot"] = json!([["e0", "e1"]]);
    let mut empty_set = two_element();
    empty_set["kappa"].as_array_mut().unwrap().push(json!({"set": [], "value": "e0"}));
    let mut names = two_element();
    names["elements"] = json!(["e0", "e0"]);
    for (what, d) in [("dup", dup), ("unknown", unknown), ("short", short), ("empty set", empty_set), ("names", names)] {
        assert!(load_algebra(&d.to_string()).is_err(), "{what}");
    }
    assert!(matches!(load_algebra("{not json"), Err(Error::Document(_))));
    let big: Vec<String> = (0..13).map(|i| format!("e{i}")).collect();
    let d = json!({"elements": big, "unit": "e0", "dot": [], "tau": [], "tauop": [], "kappa": []});
    assert!(matches!(load_algebra(&d.to_string()), Err(Error::Document(m)) if m.contains("12")));
}

#[test]
fn counting_algebra_round_trips() {
    let s = sing_alg();
    let text = algebra_to_json(&s).unwrap();
    let back = load_algebra(&text).unwrap();
    assert_eq!(back.size(), 3);
    for a in s.elements() {
        assert_eq!(back.name(a), s.name(a));
        assert_eq!(back.tau(a), s.tau(a));
        assert_eq!(back.tauop(a), s.tauop(a));
        for b in s.elements() {
            assert_eq!(back.dot(a, b), s.dot(a, b));
        }
    }
    for mask in 1u32..8 {
        let set: Vec<Elem> = (0..3).filter(|i| mask >> i & 1 == 1).map(Elem).collect();
        assert_eq!(back.kappa(&set), s.kappa(&set));
    }
}

#[test]
fn builtin_recognizers_round_trip() {
    for name in ["trivial", "sing", "subset", "before", "letter", "shuffle:k=1"] {
        let rec = builtin_recognizer(name).unwrap();
        let text = recognizer_to_json(&rec).unwrap();
        assert!(is_recognizer_document(&text));
        let back = load_recognizer(&text).unwrap();
        assert_eq!(back.alphabet(), rec.alphabet(), "{name}");
        assert_eq!(back.accept(), rec.accept(), "{name}");
        assert_eq!(recognizer_to_json(&back).unwrap(), text, "{name}");
    }
    assert!(!is_recognizer_document(&one_element().to_string()));
    assert!(algebra_to_json(&shuffle_algebra(2).unwrap()).is_err());
}

#[test]
fn recognizer_documents_validate_the_morphism() {
    let mut d = two_element();
    d["alphabet"] = json!(["a", "b[X]"]);
    d["morphism"] = json!({"a": "e1", "b[X]": "e0"});
    d["accept"] = json!(["e1"]);
    let rec = load_recognizer(&d.to_string()).unwrap();
    assert_eq!(rec.image(&Letter::marked("b", ["X"])), Some(Elem(0)));
    let mut missing = d.clone();
    missing["morphism"] = json!({"a": "e1"});
    assert!(load_recognizer(&missing.to_string()).is_err());
    let mut extra = d.clone();
    extra["morphism"]["c"] = json!("e0");
    assert!(load_recognizer(&extra.to_string()).is_err());
    let mut bad_accept = d;
    bad_accept["accept"] = json!(["zz"]);
    assert!(matches!(load_recognizer(&bad_accept.to_string()), Err(Error::UnknownElement(n)) if n == "zz"));
}
