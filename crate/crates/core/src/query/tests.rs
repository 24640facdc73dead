use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::*;
use crate::builder::Kb;
use crate::graph::Triple;
use crate::schema::{class, prop};
use crate::term::{ns, Iri, Literal};

fn iri(local: &str) -> Iri {
    Iri::from_parts(ns::ANNETTO, local).unwrap()
}

fn run(kb: &Kb, text: &str) -> ResultTable {
    let q = parse_query(text).unwrap();
    let fast = evaluate(&q, kb);
    assert_eq!(fast, evaluate_naive(&q, kb), "oracle disagrees on {text}");
    fast
}

fn names(table: &ResultTable) -> Vec<String> {
    table
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|t| match t {
                    Term::Iri(i) => i.as_str().rsplit('/').next().unwrap().to_owned(),
                    Term::Literal(l) => l.lexical().to_owned(),
                })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

fn chain_kb() -> Kb {
    let mut kb = Kb::new();
    let cfg = kb.add_configuration("cfg").unwrap();
    let net = kb.add_network(&cfg, "net", None).unwrap();
    let relu = class::relu();
    let input = kb.add_layer(&net, "in", &class::input_layer(), None).unwrap();
    let a = kb.add_layer(&net, "a", &class::fully_connected_layer(), Some(&relu)).unwrap();
    let b = kb.add_layer(&net, "b", &class::fully_connected_layer(), Some(&relu)).unwrap();
    let out = kb.add_layer(&net, "out", &class::output_layer(), None).unwrap();
    kb.connect(&input, &a).unwrap();
    kb.connect(&a, &b).unwrap();
    kb.connect(&b, &out).unwrap();
    kb
}

#[test]
fn empty_graph_gives_empty_table() {
    let t = run(&Kb::new(), "select ?x where { ?x a :Network }");
    assert_eq!(t.vars, ["x"]);
    assert!(t.is_empty());
}

#[test]
fn single_triple_single_row() {
    let mut kb = Kb::new();
    kb.graph_mut().insert(Triple::new(iri("s"), iri("p"), iri("o")));
    let t = run(&kb, "select ?s ?o where { ?s :p ?o }");
    assert_eq!(names(&t), ["s,o"]);
}

#[test]
fn type_patterns_use_entailment() {
    let kb = chain_kb();
    let t = run(&kb, "select ?l where { ?l a :HiddenLayer }");
    assert_eq!(names(&t), ["a", "b"]);
    let t = run(&kb, "select ?l where { ?l a :Layer }");
    assert_eq!(t.len(), 4);
    // One row per individual, not per asserted type.
    let t = run(&kb, "select ?n where { ?n a :Network }");
    assert_eq!(names(&t), ["net"]);
}

#[test]
fn paths_follow_chains() {
    let kb = chain_kb();
    let t = run(&kb, "select ?x where { :in :nextLayer+ ?x }");
    assert_eq!(names(&t), ["a", "b", "out"]);
    let t = run(&kb, "select ?x where { ?x :nextLayer+ :out }");
    assert_eq!(names(&t), ["a", "b", "in"]);
    let t = run(&kb, "select ?x ?y where { ?x :nextLayer+ ?y }");
    assert_eq!(t.len(), 6);
}

#[test]
fn cyclic_paths_terminate() {
    let mut kb = Kb::new();
    let p = iri("next");
    for (a, b) in [("x", "y"), ("y", "z"), ("z", "x")] {
        kb.graph_mut().insert(Triple::new(iri(a), p.clone(), iri(b)));
    }
    let t = run(&kb, "select ?a ?b where { ?a :next+ ?b }");
    assert_eq!(t.len(), 9);
    let t = run(&kb, "select ?a where { ?a :next+ ?a }");
    assert_eq!(t.len(), 3);
}

#[test]
fn filters_exclude_errors_and_unbound() {
    let mut kb = Kb::new();
    let score = prop::eval_score();
    kb.graph_mut().insert(Triple::new(iri("e1"), score.clone(), Literal::double(0.9).unwrap()));
    kb.graph_mut().insert(Triple::new(iri("e2"), score.clone(), Literal::double(0.3).unwrap()));
    kb.graph_mut().insert(Triple::new(iri("e3"), score.clone(), Literal::string("high")));
    let t = run(&kb, "select ?e where { ?e :eval_score ?s FILTER (?s > 0.5) }");
    assert_eq!(names(&t), ["e1"]);
    let t = run(&kb, "select ?e where { ?e :eval_score ?s FILTER (?nope > 0.5) }");
    assert!(t.is_empty());
    let t = run(&kb, "select ?e where { ?e :eval_score ?s FILTER (?s > 0.5 || ?s = \"high\") }");
    assert_eq!(names(&t), ["e1", "e3"]);
    // Integer and double compare by value.
    let t = run(&kb, "select ?e where { ?e :eval_score ?s FILTER (?s < 1) }");
    assert_eq!(names(&t), ["e1", "e2"]);
}

#[test]
fn same_predicate_twice_yields_independent_bindings() {
    let kb = chain_kb();
    let t = run(&kb, "select ?l ?x ?y where { ?l :previousLayer ?x ; :previousLayer ?y }");
    assert_eq!(t.len(), 3);
}

#[test]
fn bag_semantics_without_distinct() {
    let kb = chain_kb();
    let t = run(&kb, "select ?n where { ?n :hasLayer ?l }");
    assert_eq!(t.len(), 4);
    let t = run(&kb, "select distinct ?n where { ?n :hasLayer ?l }");
    assert_eq!(t.len(), 1);
}

#[test]
fn grouping_and_having() {
    let kb = chain_kb();
    let t = run(
        &kb,
        "select ?n (count(?l) as ?c) where { ?n :hasLayer ?l . ?l a :HiddenLayer } group by ?n",
    );
    assert_eq!(names(&t), ["net,2"]);
    let t = run(
        &kb,
        "select ?n (count(?l) as ?c) where { ?n :hasLayer ?l } group by ?n having (?c > 4)",
    );
    assert!(t.is_empty());
    let t = run(&kb, "select (count(distinct ?n) as ?c) where { ?n :hasLayer ?l }");
    assert_eq!(names(&t), ["1"]);
}

#[test]
fn implicit_group_over_no_rows_is_empty() {
    let t = run(&Kb::new(), "select (count(*) as ?c) where { ?s ?p ?o }");
    assert!(t.is_empty());
}

#[test]
fn subselect_joins_on_shared_variables() {
    let kb = chain_kb();
    let t = run(
        &kb,
        "select ?c ?k where { ?c :hasNetwork ?n . { select ?n (count(?l) as ?k) where { ?n :hasLayer ?l } group by ?n } }",
    );
    assert_eq!(names(&t), ["cfg,4"]);
}

#[test]
fn evaluation_is_deterministic() {
    let kb = chain_kb();
    let q = parse_query("select ?a ?b where { ?a :nextLayer+ ?b }").unwrap();
    let first = evaluate(&q, &kb);
    for _ in 0..5 {
        assert_eq!(evaluate(&q, &kb), first);
    }
}

/// Reachability by Floyd–Warshall over an adjacency matrix.
fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

fn multiset(rows: &[Vec<Term>]) -> BTreeMap<&Vec<Term>, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r).or_insert(0) += 1;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluator_matches_oracle(seed in any::<u64>()) {
        let (kb, query) = random_case(&mut StdRng::seed_from_u64(seed));
        let reparsed = parse_query(&query.to_string());
        prop_assert_eq!(reparsed.as_ref(), Ok(&query), "{}", query);
        prop_assert_eq!(evaluate(&query, &kb), evaluate_naive(&query, &kb), "{}", query);
    }

    #[test]
    fn filters_never_add_rows(seed in any::<u64>()) {
        let (kb, query) = random_case(&mut StdRng::seed_from_u64(seed));
        prop_assume!(!query.is_aggregate() && !query.pattern.filters.is_empty());
        let mut unfiltered = query.clone();
        unfiltered.pattern.filters.clear();
        let with = evaluate(&query, &kb);
        let without = evaluate(&unfiltered, &kb);
        let (with_m, without_m) = (multiset(&with.rows), multiset(&without.rows));
        for (row, n) in with_m {
            prop_assert!(without_m.get(row).is_some_and(|m| *m >= n));
        }
    }

    #[test]
    fn path_matches_reachability(
        n in 1usize..30,
        raw in proptest::collection::vec((0usize..30, 0usize..30), 0..80),
    ) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let mut kb = Kb::new();
        let node = |i: usize| iri(&format!("v{i}"));
        for &(a, b) in &edges {
            kb.graph_mut().insert(Triple::new(node(a), prop::next_layer(), node(b)));
        }
        let expected = reachability(n, &edges);
        let q = parse_query("select ?a ?b where { ?a :nextLayer+ ?b }").unwrap();
        let got: BTreeSet<(Term, Term)> = evaluate(&q, &kb)
            .rows
            .into_iter()
            .map(|r| (r[0].clone(), r[1].clone()))
            .collect();
        let want: BTreeSet<(Term, Term)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| expected[i][j])
            .map(|(i, j)| (Term::Iri(node(i)), Term::Iri(node(j))))
            .collect();
        prop_assert_eq!(got, want);

        // Bound-subject and bound-object forms agree with the free form.
        let q = parse_query("select ?b where { :v0 :nextLayer+ ?b }").unwrap();
        let from_zero = evaluate(&q, &kb).rows.len();
        prop_assert_eq!(from_zero, (0..n).filter(|&j| expected[0][j]).count());
        let q = parse_query("select ?a where { ?a :nextLayer+ :v0 }").unwrap();
        let to_zero = evaluate(&q, &kb).rows.len();
        prop_assert_eq!(to_zero, (0..n).filter(|&i| expected[i][0]).count());
    }
}

#[test]
fn random_cases_exercise_every_feature() {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut nonempty, mut paths, mut aggregates, mut subselects, mut filters) = (0, 0, 0, 0, 0);
    for _ in 0..300 {
        let (kb, q) = random_case(&mut rng);
        let table = evaluate(&q, &kb);
        assert_eq!(table, evaluate_naive(&q, &kb), "{q}");
        nonempty += usize::from(!table.is_empty());
        paths += usize::from(q.pattern.triples.iter().any(|t| matches!(t.predicate, Predicate::Path(_))));
        aggregates += usize::from(q.is_aggregate());
        subselects += usize::from(!q.pattern.subselects.is_empty());
        filters += usize::from(!q.pattern.filters.is_empty());
    }
    eprintln!("nonempty {nonempty} paths {paths} aggregates {aggregates} subselects {subselects} filters {filters}");
    assert!(nonempty > 75);
    assert!(paths > 30 && aggregates > 30 && subselects > 15 && filters > 60);
}
