//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use annetto_core::builder::Kb;
use annetto_core::examples::{
    build_aae, build_all, build_examples_in, build_gan, build_simple_classifier, export_examples,
    export_queries, QUERY_1, QUERY_1_PROSE, QUERY_2, QUERY_3, QUERY_4,
};
use annetto_core::graph::{graph_equal, Triple};
use annetto_core::query::{evaluate, evaluate_naive, parse_query, random_case, Predicate, ResultTable};
use annetto_core::schema::prop;
use annetto_core::term::{ns, Datatype, Iri, Literal, Term};
use annetto_core::testkit::{mutation_suite, random_graph};
use annetto_core::turtle::{parse_turtle, serialize_turtle};
use annetto_core::validator::validate;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

/// Name, time budget and check.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ao(local: &str) -> Iri {
    Iri::from_parts(ns::ANNETTO, local).unwrap()
}

fn run(text: &str, kb: &Kb) -> Result<ResultTable, String> {
    let q = parse_query(text).map_err(|e| e.to_string())?;
    Ok(evaluate(&q, kb))
}

fn first_column(t: &ResultTable) -> BTreeSet<Term> {
    t.rows.iter().map(|r| r[0].clone()).collect()
}

fn check(cond: bool, detail: impl Into<String>) -> Outcome {
    let detail = detail.into();
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn golden_set(text: &str, expected: &str) -> Outcome {
    let t = run(text, &build_all())?;
    let got = first_column(&t);
    let want = BTreeSet::from([Term::Iri(ao(expected))]);
    check(got == want && t.len() == 1, format!("rows {:?}", t.rows))
}

fn criterion_1() -> Outcome {
    golden_set(QUERY_2, "AAE")
}

fn criterion_2() -> Outcome {
    golden_set(QUERY_3, "AAE_AE")
}

fn criterion_3() -> Outcome {
    let t = run(QUERY_4, &build_all())?;
    let score = Literal::new("0.68", Datatype::Double).map_err(|e| e.to_string())?;
    let want = vec![vec![Term::Iri(ao("AAE")), Term::Literal(score)]];
    check(t.rows == want, format!("rows {:?}", t.rows))
}

fn criterion_4() -> Outcome {
    let all = build_all();
    let verbatim = run(QUERY_1, &all)?;
    let prose = run(QUERY_1_PROSE, &all)?;
    let score = prose
        .rows
        .first()
        .and_then(|r| r[1].as_literal())
        .and_then(Literal::as_f64);
    check(
        verbatim.is_empty()
            && prose.len() == 1
            && prose.rows[0][0] == Term::Iri(ao("simple_classification"))
            && score.is_some_and(|s| s > 0.7),
        format!("q1 verbatim {} rows (documented: empty); q1_prose score {score:?}", verbatim.len()),
    )
}

fn criterion_5() -> Outcome {
    let count_networks = |kb: &Kb, cfg: &str| kb.graph().object_iris(&ao(cfg), &prop::has_network()).count();
    let gan = build_gan();
    let aae = build_aae();
    let hidden = run("select ?l where { ?l a :HiddenLayer }", &build_simple_classifier())?.len();
    let loop_count: Vec<&Term> = gan.graph().objects(&ao("gan_trainloop"), &prop::loop_count()).collect();
    let (g, a) = (count_networks(&gan, "GAN"), count_networks(&aae, "AAE"));
    let five = Term::Literal(Literal::integer(5));
    check(
        g == 3 && a == 7 && hidden == 3 && loop_count == [&five],
        format!("GAN networks {g}, AAE networks {a}, simple hidden layers {hidden}, loop_count {loop_count:?}"),
    )
}

fn criterion_6() -> Outcome {
    for (name, kb) in build_examples_in(ns::ANNETTO).map_err(|e| e.to_string())? {
        let report = validate(&kb);
        if !report.violations.is_empty() {
            return Err(format!("{name} has violations {:?}", report.violations));
        }
    }
    let suite = mutation_suite();
    let mut missed = Vec::new();
    for m in &suite {
        if !validate(&m.kb).rules_violated().contains(&m.rule) {
            missed.push(m.rule.to_string());
        }
    }
    check(
        missed.is_empty() && suite.len() == 15,
        format!("{} mutations, undetected {missed:?}", suite.len()),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20181001);
    let (cases, mut mismatches, mut nonempty, mut filters, mut paths, mut aggregates) = (150, 0, 0, 0, 0, 0);
    for _ in 0..cases {
        let (kb, q) = random_case(&mut rng);
        let fast = evaluate(&q, &kb);
        if fast != evaluate_naive(&q, &kb) {
            mismatches += 1;
        }
        nonempty += usize::from(!fast.is_empty());
        filters += usize::from(!q.pattern.filters.is_empty());
        paths += usize::from(q.pattern.triples.iter().any(|t| matches!(t.predicate, Predicate::Path(_))));
        aggregates += usize::from(q.is_aggregate());
    }
    check(
        mismatches == 0,
        format!(
            "{cases} cases, {mismatches} mismatches ({nonempty} nonempty, {filters} filters, {paths} paths, {aggregates} aggregates)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for i in 0..200 {
        let g = random_graph(&mut rng, 40);
        let text = serialize_turtle(&g, g.prefixes());
        let back = parse_turtle(&text).map_err(|e| format!("graph {i}: {e}"))?;
        if !graph_equal(&back, &g) || serialize_turtle(&back, back.prefixes()) != text {
            return Err(format!("graph {i} did not round-trip:\n{text}"));
        }
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let files = export_examples(&a).map_err(|e| e.to_string())?;
    export_examples(&b).map_err(|e| e.to_string())?;
    for ((name, kb), path) in build_examples_in(ns::ANNETTO).unwrap().iter().zip(&files) {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let back = parse_turtle(&text).map_err(|e| format!("{name}: {e}"))?;
        if !graph_equal(&back, kb.graph()) {
            return Err(format!("{name} did not round-trip"));
        }
        if fs::read(path).ok() != fs::read(b.join(name)).ok() {
            return Err(format!("{name} differs between exports"));
        }
    }
    Ok("200 random graphs and 3 example KBs round-trip; exports byte-stable".to_owned())
}

fn reachable(n: usize, edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
            }
        }
    }
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| r[i][j])
        .collect()
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let q = parse_query("select ?a ?b where { ?a :nextLayer+ ?b }").map_err(|e| e.to_string())?;
    let mut cyclic = 0;
    for g in 0..100 {
        let n = rng.gen_range(1..=30);
        let m = rng.gen_range(0..=2 * n);
        let edges: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let mut kb = Kb::new();
        for &(a, b) in &edges {
            kb.graph_mut()
                .insert(Triple::new(ao(&format!("v{a}")), prop::next_layer(), ao(&format!("v{b}"))));
        }
        let want = reachable(n, &edges);
        cyclic += usize::from(want.iter().any(|(a, b)| a == b));
        let index = |t: &Term| -> usize { t.as_iri().unwrap().as_str().rsplit('v').next().unwrap().parse().unwrap() };
        let got: BTreeSet<(usize, usize)> = evaluate(&q, &kb).rows.iter().map(|r| (index(&r[0]), index(&r[1]))).collect();
        if got != want {
            return Err(format!("digraph {g} with {n} nodes disagrees"));
        }
    }
    check(cyclic > 0, format!("100 random digraphs (<= 30 nodes, {cyclic} cyclic) agree"))
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let bin = env!("CARGO_BIN_EXE_annetto");
    let exit = |args: &[&str]| -> Result<i32, String> {
        let out = Command::new(bin)
            .args(args)
            .env_remove("ANNETTO_PREFIX")
            .output()
            .map_err(|e| e.to_string())?;
        out.status.code().ok_or_else(|| "killed by signal".to_owned())
    };
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    export_examples(dir).map_err(|e| e.to_string())?;
    export_queries(dir).map_err(|e| e.to_string())?;
    let m = mutation_suite().into_iter().find(|m| m.rule.as_str() == "R6").unwrap();
    let mutated = dir.join("gan_mutated.ttl");
    fs::write(&mutated, serialize_turtle(m.kb.graph(), m.kb.graph().prefixes())).map_err(|e| e.to_string())?;
    let malformed = dir.join("malformed.rq");
    fs::write(&malformed, "select ?x where { ?x a ").map_err(|e| e.to_string())?;

    let valid = exit(&["validate", &s(&dir.join("gan.ttl"))])?;
    let violations = exit(&["validate", &s(&mutated)])?;
    let parse = exit(&["query", &s(&dir.join("gan.ttl")), "--query", &s(&malformed)])?;
    let missing = exit(&["validate", &s(&dir.join("missing.ttl"))])?;
    check(
        (valid, violations, parse, missing) == (0, 1, 2, 3),
        format!("valid {valid}, mutated {violations}, malformed query {parse}, missing file {missing}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden query 2", Duration::from_secs(1), criterion_1),
        ("golden query 3", Duration::from_secs(1), criterion_2),
        ("golden query 4", Duration::from_secs(1), criterion_3),
        ("query 1 discrepancy pinned", Duration::from_secs(1), criterion_4),
        ("structure counts", Duration::from_secs(1), criterion_5),
        ("validator mutation suite", Duration::from_secs(5), criterion_6),
        ("oracle equivalence", Duration::from_secs(60), criterion_7),
        ("turtle round trip", Duration::from_secs(10), criterion_8),
        ("path semantics", Duration::from_secs(10), criterion_9),
        ("cli exit codes", Duration::from_secs(30), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget {budget:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {name} ({:.3}s) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
