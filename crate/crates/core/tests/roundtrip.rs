use annetto_core::examples::{build_examples_in, export_examples};
use annetto_core::graph::graph_equal;
use annetto_core::term::ns;
use annetto_core::testkit::random_graph;
use annetto_core::turtle::{parse_turtle, serialize_turtle};
use annetto_core::validator::validate;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_graphs_round_trip(seed in any::<u64>()) {
        let g = random_graph(&mut StdRng::seed_from_u64(seed), 40);
        let text = serialize_turtle(&g, g.prefixes());
        let back = parse_turtle(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(graph_equal(&back, &g), "{}", text);
        prop_assert_eq!(serialize_turtle(&back, back.prefixes()), text);
    }
}

#[test]
fn example_kbs_round_trip() {
    for (name, kb) in build_examples_in(ns::ANNETTO).unwrap() {
        let text = serialize_turtle(kb.graph(), kb.graph().prefixes());
        let back = parse_turtle(&text).unwrap();
        assert!(graph_equal(&back, kb.graph()), "{name}");
        assert_eq!(serialize_turtle(&back, back.prefixes()), text, "{name}");
    }
}

#[test]
fn export_is_byte_stable_and_valid() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = export_examples(a.path()).unwrap();
    let second = export_examples(b.path()).unwrap();
    assert_eq!(first.len(), 3);
    for (x, y) in first.iter().zip(&second) {
        let bytes = std::fs::read(x).unwrap();
        assert_eq!(bytes, std::fs::read(y).unwrap());
        let graph = parse_turtle(std::str::from_utf8(&bytes).unwrap()).unwrap();
        let kb = annetto_core::builder::Kb::from_graph(
            graph,
            std::sync::Arc::new(annetto_core::schema::builtin_schema()),
        );
        assert!(validate(&kb).violations.is_empty(), "{}", x.display());
    }
}
