use annetto_core::examples::{build_all, QUERY_1, QUERY_1_PROSE, QUERY_2, QUERY_3, QUERY_4};
use annetto_core::query::{evaluate, evaluate_naive, parse_query, ResultTable};
use annetto_core::term::{ns, Iri, Literal, Term};

fn ao(local: &str) -> Term {
    Term::Iri(Iri::from_parts(ns::ANNETTO, local).unwrap())
}

fn run(text: &str) -> ResultTable {
    evaluate(&parse_query(text).unwrap(), &build_all())
}

#[test]
fn query_1_verbatim_is_empty() {
    let t = run(QUERY_1);
    assert_eq!(t.vars, ["configuration", "evaluation_score"]);
    assert!(t.is_empty());
}

#[test]
fn query_1_prose_finds_simple_classification() {
    let t = run(QUERY_1_PROSE);
    assert_eq!(t.len(), 1);
    assert_eq!(t.rows[0][0], ao("simple_classification"));
    let score = t.rows[0][1].as_literal().unwrap().as_f64().unwrap();
    assert!(score > 0.7);
}

#[test]
fn query_2_finds_aae() {
    assert_eq!(run(QUERY_2).rows, [vec![ao("AAE")]]);
}

#[test]
fn query_3_finds_aae_autoencoder() {
    assert_eq!(run(QUERY_3).rows, [vec![ao("AAE_AE")]]);
}

#[test]
fn query_4_finds_aae_with_score() {
    let t = run(QUERY_4);
    let score = Literal::new("0.68", annetto_core::term::Datatype::Double).unwrap();
    assert_eq!(t.rows, [vec![ao("AAE"), Term::Literal(score)]]);
}

#[test]
fn query_2_parses_into_outer_and_subselect() {
    let q = parse_query(QUERY_2).unwrap();
    assert_eq!(q.pattern.subselects.len(), 1);
    assert_eq!(q.pattern.subselects[0].having.len(), 1);
}

#[test]
fn goldens_are_deterministic() {
    for text in [QUERY_1_PROSE, QUERY_2, QUERY_3, QUERY_4] {
        assert_eq!(run(text), run(text));
    }
}

#[test]
fn fast_and_naive_agree_on_goldens_for_small_kbs() {
    let kb = annetto_core::examples::build_simple_classifier();
    for text in [QUERY_1, QUERY_1_PROSE] {
        let q = parse_query(text).unwrap();
        assert_eq!(evaluate(&q, &kb), evaluate_naive(&q, &kb));
    }
}
