mod common;

use common::{poly, random_poly, rng};
use quadratizer::io::json::{from_json, to_json_string};
use quadratizer::io::{from_qubo_into, parse, parse_into, print, to_qubo};
use quadratizer::pipeline::{quadratize, Strategy};
use quadratizer::poly::{Domain, VariableRegistry};
use quadratizer::Error;
use rand::Rng;

/// Random polynomials over all three domains, in canonical printed form.
fn corpus() -> Vec<String> {
    let mut r = rng(2024);
    (0..100)
        .map(|_| {
            let mut reg = VariableRegistry::new();
            let mut vars = reg.booleans(r.random_range(1..=4)).unwrap();
            vars.extend(reg.spins(r.random_range(0..=2)).unwrap());
            if r.random_bool(0.3) {
                vars.push(reg.add_original(Domain::Ternary, Some("t1")).unwrap());
            }
            let terms = r.random_range(0..=7);
            let p = random_poly(&mut r, &reg, &vars, 4, terms);
            let (reg, p) = parse(&print(&p, &reg)).unwrap();
            print(&p, &reg)
        })
        .collect()
}

#[test]
fn text_round_trips_are_exact() {
    for text in corpus() {
        let (reg, p) = parse(&text).unwrap();
        assert_eq!(print(&p, &reg), text);
        let (reg2, q) = parse(&print(&p, &reg)).unwrap();
        assert_eq!(print(&q, &reg2), text);
    }
}

#[test]
fn json_round_trips_are_exact() {
    for text in corpus() {
        let (reg, p) = parse(&text).unwrap();
        let json = to_json_string(&p, &reg);
        let (reg2, q) = from_json(&json).unwrap();
        assert_eq!(print(&q, &reg2), text);
        assert_eq!(to_json_string(&q, &reg2), json);
    }
}

#[test]
fn quadratized_output_round_trips_through_every_format() {
    let (mut reg, p) = poly("b1 b2 + b2 b3 + b3 b4 - 4 b1 b2 b3 + 2 b1 b2 b3 b4");
    let r = quadratize(&p, &mut reg, &Strategy::default()).unwrap();
    let text = print(&r.output, &reg);
    let (reg_t, from_text) = parse(&text).unwrap();
    assert_eq!(print(&from_text, &reg_t), text);

    let json = to_json_string(&r.output, &reg);
    assert!(json.contains("\"aux\""));
    let (reg_j, from_json_p) = from_json(&json).unwrap();
    assert_eq!(print(&from_json_p, &reg_j), text);
    assert_eq!(reg_j.vars().filter(|v| reg_j.is_aux(v.id)).count(), r.aux().len());

    let q = to_qubo(&r.output, &reg, "PointwiseMin", r.trace.clone()).unwrap();
    let mut reg_q = VariableRegistry::new();
    let from_q = from_qubo_into(&q, &mut reg_q).unwrap();
    assert_eq!(print(&from_q, &reg_q), text);
    let encoded = serde_json::to_string(&q).unwrap();
    assert_eq!(serde_json::from_str::<quadratizer::io::QuboJson>(&encoded).unwrap(), q);
}

#[test]
fn json_schema_errors() {
    let bad = [
        "not json",
        r#"{"vars": [], "terms": [], "extra": 1}"#,
        r#"{"vars": [{"id": 0, "domain": "q", "kind": "orig"}], "terms": []}"#,
        r#"{"vars": [{"id": 0, "domain": "b", "kind": "orig"}], "terms": [{"m": {"1": 1}, "c": "1/1"}]}"#,
        r#"{"vars": [{"id": 0, "domain": "b", "kind": "orig"}], "terms": [{"m": {"0": 1}, "c": "0.5"}]}"#,
        r#"{"vars": [{"id": 0, "domain": "b", "kind": "orig"}, {"id": 0, "domain": "b", "kind": "orig"}], "terms": []}"#,
        r#"{"vars": [{"id": 0, "domain": "b", "kind": "orig"}], "terms": [{"m": {"0": 0}, "c": "1/1"}]}"#,
    ];
    for doc in bad {
        assert!(matches!(from_json(doc), Err(Error::Schema(_))), "{doc}");
    }
    let ok = r#"{"vars": [{"id": 7, "domain": "z", "kind": "orig", "label": "z1"}], "terms": [{"m": {"7": 2}, "c": "3/2"}, {"m": {}, "c": "-1"}]}"#;
    let (reg, p) = from_json(ok).unwrap();
    assert_eq!(print(&p, &reg), "1/2");
}

#[test]
fn qubo_refuses_non_boolean_or_cubic_input() {
    let (reg, p) = poly("z1 z2 + b1");
    assert!(matches!(to_qubo(&p, &reg, "", vec![]), Err(Error::DomainViolation(_))));
    let (reg, p) = poly("b1 b2 b3");
    assert!(matches!(to_qubo(&p, &reg, "", vec![]), Err(Error::NotQuadratic(3))));
}

#[test]
fn syntax_errors_point_at_the_offending_token() {
    let cases = [("b1 + x2", 1, 6), ("b1 b2\n - 0.5 b3", 2, 4), ("b1 +\n\n  q", 3, 3)];
    for (text, line, column) in cases {
        match parse(text) {
            Err(Error::Syntax { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn parsing_into_a_registry_reuses_labels() {
    let (mut reg, p) = poly("b1 b2");
    let q = parse_into("b2 + z1", &mut reg).unwrap();
    assert_eq!(reg.len(), 3);
    assert_eq!(print(&(&p + &q), &reg), "b2 + z1 + b1 b2");
}
