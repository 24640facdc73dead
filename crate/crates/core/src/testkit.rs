//! Fixtures shared by the test suites: random graphs for round-trip
//! checks and single-triple mutations of the example KBs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::builder::Kb;
use crate::examples::{build_gan, build_simple_classifier};
use crate::graph::{Graph, PrefixMap, Triple};
use crate::schema::prop;
use crate::term::{ns, Iri, Literal, Term};
use crate::validator::RuleId;

const NAMESPACES: [&str; 4] = [
    ns::ANNETTO,
    "http://example.org/",
    "http://example.org/ns#",
    "urn:test:",
];

const LOCALS: [&str; 10] = [
    "a", "B", "node_1", "x-y", "n.m", "9lives", "élan", "with%20pct", "", "tail.",
];

const STRINGS: [&str; 8] = [
    "",
    "plain",
    "with \"quotes\"",
    "back\\slash",
    "line\nbreak\ttab\rcr",
    "ünïcödé ✓",
    "# not a comment",
    "trailing space ",
];

const DATES: [&str; 3] = [
    "2018-03-01T00:00:00Z",
    "1999-12-31T23:59:59+02:00",
    "2020-02-29T12:30:00",
];

fn random_iri(rng: &mut impl Rng) -> Iri {
    let namespace = NAMESPACES.choose(rng).unwrap();
    let local = LOCALS.choose(rng).unwrap();
    Iri::from_parts(namespace, local).expect("fixture IRIs are valid")
}

fn random_literal(rng: &mut impl Rng) -> Literal {
    match rng.gen_range(0..5) {
        0 => Literal::string(STRINGS.choose(rng).unwrap()),
        1 => Literal::integer(rng.gen_range(-1_000_000..=1_000_000)),
        2 => {
            let value = match rng.gen_range(0..4) {
                0 => rng.gen_range(-1.0..1.0),
                1 => rng.gen_range(-1e300..1e300),
                2 => f64::from(rng.gen_range(-100i32..100)),
                _ => rng.gen_range(-1e-300..1e-300),
            };
            Literal::double(value).expect("finite double")
        }
        3 => Literal::date_time(DATES.choose(rng).unwrap()).expect("valid dateTime"),
        _ => Literal::boolean(rng.gen()),
    }
}

/// A random graph of up to `max_triples` triples with a mix of IRIs that
/// can and cannot be abbreviated, and literals of every datatype.
pub fn random_graph(rng: &mut impl Rng, max_triples: usize) -> Graph {
    let mut prefixes = PrefixMap::annetto();
    if rng.gen_bool(0.5) {
        prefixes.insert("ex", "http://example.org/");
    }
    let mut graph = Graph::with_prefixes(prefixes);
    let n = rng.gen_range(0..=max_triples);
    for _ in 0..n {
        let subject = random_iri(rng);
        let predicate = if rng.gen_bool(0.15) {
            Iri::rdf_type()
        } else {
            random_iri(rng)
        };
        let object: Term = if rng.gen_bool(0.5) {
            random_iri(rng).into()
        } else {
            random_literal(rng).into()
        };
        graph.insert(Triple::new(subject, predicate, object));
    }
    graph
}

/// A valid example KB changed by adding or removing exactly one triple so
/// that `rule` is violated.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub rule: RuleId,
    pub description: &'static str,
    pub kb: Kb,
}

enum Edit {
    Add(Triple),
    Remove(Triple),
}

fn ao(local: &str) -> Iri {
    Iri::from_parts(ns::ANNETTO, local).expect("example IRIs are valid")
}

fn triple(s: &str, p: Iri, o: &str) -> Triple {
    Triple::new(ao(s), p, ao(o))
}

fn apply(mut kb: Kb, edit: Edit) -> Kb {
    let changed = match edit {
        Edit::Add(t) => kb.graph_mut().insert(t),
        Edit::Remove(t) => kb.graph_mut().remove(&t),
    };
    assert!(changed, "mutation must change the graph");
    kb
}

/// One mutation per validator rule, in rule order.
pub fn mutation_suite() -> Vec<Mutation> {
    let gan = build_gan();
    let simple = build_simple_classifier();
    let score = Literal::double(crate::examples::GAN_SCORE).expect("finite");
    let cases: Vec<(RuleId, &'static str, &Kb, Edit)> = vec![
        (
            RuleId::R1,
            "remove GAN hasNetwork GAN_Generator",
            &gan,
            Edit::Remove(triple("GAN", prop::has_network(), "GAN_Generator")),
        ),
        (
            RuleId::R2,
            "remove the objective of GAN_GAN",
            &gan,
            Edit::Remove(triple("GAN_GAN", prop::has_objective_function(), "gan_objective")),
        ),
        (
            RuleId::R3,
            "give a generator layer a second owner",
            &gan,
            Edit::Add(triple("GAN_Discriminator", prop::has_layer(), "GAN_Generator_hidden_1")),
        ),
        (
            RuleId::R4,
            "add a second successor to a fully connected layer",
            &gan,
            Edit::Add(triple("GAN_Generator_hidden_1", prop::next_layer(), "GAN_Generator_output")),
        ),
        (
            RuleId::R5,
            "give an input layer a previous layer",
            &gan,
            Edit::Add(triple("GAN_Generator_input", prop::previous_layer(), "GAN_Generator_output")),
        ),
        (
            RuleId::R6,
            "remove one previousLayer mirror",
            &gan,
            Edit::Remove(triple("GAN_Generator_hidden_1", prop::previous_layer(), "GAN_Generator_input")),
        ),
        (
            RuleId::R7,
            "share two layers of the same network",
            &gan,
            Edit::Add(triple("GAN_Generator_hidden_1", prop::same_layer_as(), "GAN_Generator_hidden_2")),
        ),
        (
            RuleId::R8,
            "link layers of two networks",
            &gan,
            Edit::Add(triple("GAN_Generator_output", prop::next_layer(), "GAN_Discriminator_input")),
        ),
        (
            RuleId::R9,
            "remove the only training session",
            &gan,
            Edit::Remove(triple("GAN_Strategy", prop::has_training_session(), "gan_session")),
        ),
        (
            RuleId::R10,
            "remove the only training step",
            &simple,
            Edit::Remove(triple(
                "simple_classification_session",
                prop::has_training_step(),
                "simple_classification_step",
            )),
        ),
        (
            RuleId::R11,
            "make a session follow itself",
            &gan,
            Edit::Add(triple("gan_session", prop::next_training_session(), "gan_session")),
        ),
        (
            RuleId::R12,
            "close the step chain into a cycle",
            &gan,
            Edit::Add(triple("gan_generatorstep", prop::next_training_step(), "gan_trainloop")),
        ),
        (
            RuleId::R13,
            "remove the evaluation score",
            &gan,
            Edit::Remove(Triple::new(ao("gan_evaluation"), prop::eval_score(), score)),
        ),
        (
            RuleId::R14,
            "remove the layer of a dataset pipe",
            &gan,
            Edit::Remove(triple("gan_pipe_mnist", prop::pipe_layer(), "GAN_Discriminator_input")),
        ),
        (
            RuleId::R15,
            "remove an activation function",
            &gan,
            Edit::Remove(triple(
                "GAN_Generator_hidden_1",
                prop::has_activation_function(),
                "GAN_Generator_hidden_1_activation",
            )),
        ),
    ];
    cases
        .into_iter()
        .map(|(rule, description, base, edit)| Mutation {
            rule,
            description,
            kb: apply(base.clone(), edit),
        })
        .collect()
}
