use std::fs;
use std::path::PathBuf;

use novikov_cli::problem::{parse_problem, problem_from_value, ProblemError, ProblemFile};
use novikov_k1::random::{standard_context, Sampler, STANDARD_CONTEXTS};
use novikov_k1::ring::Elem;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use serde_json::json;

fn examples() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn every_example_parses_and_roundtrips() {
    let files = examples();
    assert!(files.len() >= 8);
    for f in files {
        let pf = parse_problem(&fs::read_to_string(&f).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        let text = pf.to_canonical_string();
        let again = parse_problem(&text).unwrap();
        assert_eq!(pf, again, "{}", f.display());
        assert_eq!(text, again.to_canonical_string());
    }
}

#[test]
fn left_terms_are_normalized() {
    let doc = json!({
        "ring": {"kind": "gaussian-rationals"},
        "automorphism": {"kind": "complex-conjugation"},
        "precision": 6,
        "flavor": "novikov",
        "matrix": [[{"terms": [[1, "i"]], "side": "left"}]]
    });
    let pf = problem_from_value(&doc).unwrap();
    let m = pf.matrix.unwrap();
    assert_eq!(m.coeff(1).get(0, 0), &Elem::Gauss(rat(0), rat(-1)));
    // degree 2 is fixed by conjugation squared
    let doc2 = json!({
        "ring": {"kind": "gaussian-rationals"},
        "automorphism": {"kind": "complex-conjugation"},
        "precision": 6,
        "flavor": "novikov",
        "matrix": [[{"terms": [[2, "i"]], "side": "left"}]]
    });
    let m2 = problem_from_value(&doc2).unwrap().matrix.unwrap();
    assert_eq!(m2.coeff(2).get(0, 0), &Elem::Gauss(rat(0), rat(1)));
}

fn base() -> serde_json::Value {
    json!({
        "ring": {"kind": "rationals"},
        "automorphism": {"kind": "identity"},
        "precision": 8,
        "flavor": "novikov",
        "matrix": [[{"terms": [[1, "1"]]}]]
    })
}

fn err_of(doc: serde_json::Value) -> ProblemError {
    problem_from_value(&doc).unwrap_err()
}

#[test]
fn low_precision_is_rejected() {
    let mut doc = base();
    doc["precision"] = json!(3);
    let e = err_of(doc);
    assert!(matches!(e, ProblemError::Precision { .. }), "{e}");
    assert_eq!(e.pointer(), Some("/precision"));
}

#[test]
fn novikov_window_must_fit_precision() {
    let mut doc = base();
    doc["precision"] = json!(4);
    doc["matrix"] = json!([[{"terms": [[-2, "1"]]}, {"terms": []}], [{"terms": []}, {"terms": [[1, "1"]]}]]);
    doc["inverse"] = json!([[{"terms": [[2, "1"]]}, {"terms": []}], [{"terms": []}, {"terms": [[-1, "1"]]}]]);
    let pf = problem_from_value(&doc).unwrap();
    let pair = novikov_cli::commands::derive_pair(&pf, 4).unwrap();
    let e = pf.check_novikov_precision(&pair).unwrap_err();
    assert!(matches!(e, ProblemError::Precision { .. }));
}

#[test]
fn errors_carry_pointers() {
    let mut doc = base();
    doc["matrix"] = json!([[{"terms": [[1, "x/2"]]}]]);
    assert_eq!(err_of(doc).pointer(), Some("/matrix/0/0/terms/0/1"));

    let mut doc = base();
    doc["ring"] = json!({"kind": "octonions"});
    let e = err_of(doc);
    assert!(matches!(e, ProblemError::UnknownKind { .. }));
    assert_eq!(e.pointer(), Some("/ring/kind"));

    let mut doc = base();
    doc["automorphism"] = json!({"kind": "frobenius"});
    assert_eq!(err_of(doc).pointer(), Some("/automorphism/kind"));

    let mut doc = base();
    doc["flavor"] = json!("poly");
    doc["matrix"] = json!([[{"terms": [[-1, "1"]]}]]);
    assert_eq!(err_of(doc).pointer(), Some("/matrix/0/0/terms/0/0"));

    let mut doc = base();
    doc["extra"] = json!(1);
    assert_eq!(err_of(doc).pointer(), Some("/extra"));

    let mut doc = base();
    doc["ring"] = json!({"kind": "group-ring", "group": {"kind": "symmetric3"}, "base": {"kind": "rationals"}});
    doc["matrix"] = json!([[{"terms": [[0, {"s99": "1"}]]}]]);
    assert_eq!(err_of(doc).pointer(), Some("/matrix/0/0/terms/0/1/s99"));

    let mut doc = base();
    doc["matrix"] = json!([[{"terms": [[0, "1"]]}, {"terms": []}], [{"terms": []}]]);
    assert_eq!(err_of(doc).pointer(), Some("/matrix/1"));

    assert!(matches!(parse_problem("{"), Err(ProblemError::Json(_))));
}

#[test]
fn conjugation_needs_a_unit() {
    let doc = json!({
        "ring": {"kind": "matrix-ring", "size": 2, "base": {"kind": "rationals"}},
        "automorphism": {"kind": "conjugation", "unit": [["1", "0"], ["0", "0"]]},
        "precision": 8,
        "flavor": "novikov"
    });
    assert_eq!(err_of(doc).pointer(), Some("/automorphism"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sampled_problems_roundtrip(seed in any::<u64>(), which in 0usize..5, size in 1usize..3) {
        let name = STANDARD_CONTEXTS[which];
        let ctx = standard_context(name).unwrap();
        let mut s = Sampler::new(&ctx, seed);
        let (pair, _) = s.generator_product(size, 3, 10, 2).unwrap();
        let ring_json = match name {
            "rationals" => json!({"kind": "rationals"}),
            "mod101" => json!({"kind": "integers-mod", "modulus": 101}),
            "gaussian-conj" => json!({"kind": "gaussian-rationals"}),
            "m2-swap" => json!({"kind": "matrix-ring", "size": 2, "base": {"kind": "rationals"}}),
            _ => json!({"kind": "group-ring", "group": {"kind": "symmetric3"}, "base": {"kind": "rationals"}}),
        };
        let seed_doc = json!({"ring": ring_json, "precision": 10, "flavor": "novikov"});
        let skeleton: ProblemFile = problem_from_value(&seed_doc).unwrap();
        let mut pf = skeleton.clone();
        pf.ctx = ctx.clone();
        pf.matrix = Some(pair.alpha.promote(novikov_k1::series::Flavor::Novikov));
        pf.inverse = Some(pair.beta.promote(novikov_k1::series::Flavor::Novikov));
        let text = pf.to_canonical_string();
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(&back, &pf);
        prop_assert_eq!(back.to_canonical_string(), text);
    }
}
