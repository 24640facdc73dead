//! The three demonstration knowledge bases (a simple classifier, a GAN and
//! an adversarial autoencoder) and the four example queries.
//!
//! Scores and layer counts that are not fixed by the queries are declared
//! constants here: [`SIMPLE_SCORE`], [`GAN_SCORE`] and [`AAE_SCORE`].

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::builder::{BuildResult, Evaluation, Kb};
use crate::schema::class;
use crate::term::{ns, Iri};
use crate::turtle::serialize_turtle;

pub const SIMPLE_SCORE: f64 = 0.93;
pub const GAN_SCORE: f64 = -120.0;
pub const AAE_SCORE: f64 = 0.68;

/// Loop repetitions: the discriminator is updated five times per
/// generator update.
pub const GAN_LOOP_COUNT: i64 = 5;

pub const QUERY_1: &str = "select ?configuration ?evaluation_score where {
    ?configuration a :ANNConfiguration.
    ?configuration :hasTrainingStrategy ?tstrategy;
                   :hasNetwork ?n.
    ?n :hasTaskType ?type.
    ?type a :Classification.
    ?evaluation a :NetworkEvaluation;
        :evaluatesNetwork ?n;
        :eval_score ?evaluation_score. {
        select ?tstrategy (count(?step) as ?steps) where {
            ?tstrategy :hasTrainingSession ?tsession.
            ?tsession :hasTrainingStep ?step
        } GROUP BY ?tstrategy HAVING (?steps > 2)
    }
}
";

/// Query 1 with the score threshold its description asks for, and
/// without the step-count condition that a single-step strategy cannot meet.
pub const QUERY_1_PROSE: &str = "select ?configuration ?evaluation_score where {
    ?configuration a :ANNConfiguration.
    ?configuration :hasTrainingStrategy ?tstrategy;
                   :hasNetwork ?n.
    ?n :hasTaskType ?type.
    ?type a :Classification.
    ?evaluation a :NetworkEvaluation;
        :evaluatesNetwork ?n;
        :eval_score ?evaluation_score.
    FILTER (?evaluation_score > 0.7) {
        select ?tstrategy (count(?step) as ?steps) where {
            ?tstrategy :hasTrainingSession ?tsession.
            ?tsession :hasTrainingStep ?step
        } GROUP BY ?tstrategy
    }
}
";

pub const QUERY_2: &str = "select distinct ?c where {
    ?c a :ANNConfiguration;
       :hasNetwork ?n. {
        select ?n (count(?hl) as ?layers) where {
        ?n :hasLayer ?l;
        :hasLayer ?hl.
        ?hl a :HiddenLayer.
        ?l a :ConcatLayer.
        } GROUP BY ?n HAVING (?layers > 3)
    }
}
";

pub const QUERY_3: &str = "select distinct ?n where {
    ?n a :Network;
         :hasLayer ?l.
    ?l a :SeparationLayer.

    ?l :nextLayer ?left;
       :nextLayer ?right.

    FILTER (?left != ?right)

    ?left :nextLayer+ ?c.
    ?right :nextLayer+ ?c.

    ?c a :ConcatLayer.
    ?c :previousLayer ?cpl.
    ?c :previousLayer ?cpr.

    ?cpl :hasActivationFunction ?fcpl.
    ?fcpl a :Relu.

    ?cpr :hasActivationFunction ?fcpr.
    ?fcpr a :Relu.
}
";

pub const QUERY_4: &str = "select ?configuration ?evaluation_score where {
    ?configuration a :ANNConfiguration.
    ?configuration   :hasTrainingStrategy ?tstrategy;
                     :hasNetwork ?n.
    ?n :hasTaskType ?type.
    ?type a :Clustering.
    ?evaluation a :NetworkEvaluation;
                  :evaluatesNetwork ?n;
                  :eval_score ?evaluation_score. {
        select ?tstrategy (count(?step) as ?steps) where {
               ?tstrategy :hasTrainingSession ?tsession.
               ?tsession :hasTrainingStep ?step
        } GROUP BY ?tstrategy HAVING (?steps > 2)
    }
}
";

/// Query files in export order: (file name, text).
pub const QUERY_FILES: [(&str, &str); 5] = [
    ("q1.rq", QUERY_1),
    ("q1_prose.rq", QUERY_1_PROSE),
    ("q2.rq", QUERY_2),
    ("q3.rq", QUERY_3),
    ("q4.rq", QUERY_4),
];

/// One layer of a linear stack: role name, layer class, activation.
type LayerSpec = (&'static str, Iri, Option<Iri>);

fn relu_layer(role: &'static str) -> LayerSpec {
    (role, class::fully_connected_layer(), Some(class::relu()))
}

fn softmax_layer(role: &'static str) -> LayerSpec {
    (role, class::fully_connected_layer(), Some(class::softmax()))
}

fn input() -> LayerSpec {
    ("input", class::input_layer(), None)
}

fn output() -> LayerSpec {
    ("output", class::output_layer(), None)
}

/// Adds `<network>_<role>` layers and chains them in order.
fn stack(kb: &mut Kb, network: &Iri, net_name: &str, specs: &[LayerSpec]) -> BuildResult<Vec<Iri>> {
    let mut layers = Vec::with_capacity(specs.len());
    for (role, layer_class, activation) in specs {
        let layer = kb.add_layer(network, &format!("{net_name}_{role}"), layer_class, activation.as_ref())?;
        if let Some(prev) = layers.last() {
            kb.connect(prev, &layer)?;
        }
        layers.push(layer);
    }
    Ok(layers)
}

fn share(kb: &mut Kb, pairs: &[(&Iri, &Iri)]) -> BuildResult<()> {
    for (a, b) in pairs {
        kb.same_layer(a, b)?;
    }
    Ok(())
}

/// Adds steps to `session` as one chain, each following the previous.
fn step_chain(
    kb: &mut Kb,
    session: &Iri,
    first_after: Option<&Iri>,
    steps: &[(&str, Iri, &Iri)],
) -> BuildResult<Vec<Iri>> {
    let mut out: Vec<Iri> = Vec::new();
    for (name, step_class, network) in steps {
        let after = out.last().or(first_after);
        let step = kb.add_step(session, name, step_class, Some(network), after)?;
        out.push(step);
    }
    Ok(out)
}

pub fn build_simple_classifier() -> Kb {
    build_simple_classifier_in(ns::ANNETTO).expect("example KB builds")
}

pub fn build_simple_classifier_in(namespace: &str) -> BuildResult<Kb> {
    let mut kb = Kb::with_namespace(namespace)?;
    let cfg = kb.add_configuration("simple_classification")?;
    let net = kb.add_network(&cfg, "simple_classifier", Some(&class::classification()))?;
    let layers = stack(
        &mut kb,
        &net,
        "simple_classifier",
        &[input(), relu_layer("fc_1"), relu_layer("fc_2"), softmax_layer("fc_3"), output()],
    )?;

    let cost = kb.add_function(
        "simple_classification_cost",
        &class::cost_function(),
        Some("cross-entropy"),
    )?;
    kb.set_objective(&net, &cost)?;

    let strategy = kb.add_training(&cfg, "simple_classification_Strategy")?;
    let session = kb.add_session(&strategy, "simple_classification_session", None)?;
    let step = kb.add_step(
        &session,
        "simple_classification_step",
        &class::training_single(),
        Some(&net),
        None,
    )?;
    kb.add_optimizer(&step, "simple_classification_optimizer")?;
    kb.set_updates(&step, &layers[1..4])?;

    let train = kb.add_dataset("simple_train_data", &class::dataset(), None)?;
    let eval = kb.add_dataset("simple_eval_data", &class::dataset(), None)?;
    kb.add_pipe("simple_train_pipe", &train, &layers[0])?;
    kb.add_pipe("simple_eval_pipe", &eval, &layers[0])?;

    let accuracy = kb.add_function("simple_accuracy", &class::accuracy(), None)?;
    kb.add_evaluation(
        "simple_classification_evaluation",
        &Evaluation {
            network: &net,
            configuration: &cfg,
            strategy: &strategy,
            metric: &accuracy,
            dataset: &eval,
            score: SIMPLE_SCORE,
            date: None,
        },
    )?;
    Ok(kb)
}

pub fn build_gan() -> Kb {
    build_gan_in(ns::ANNETTO).expect("example KB builds")
}

pub fn build_gan_in(namespace: &str) -> BuildResult<Kb> {
    let mut kb = Kb::with_namespace(namespace)?;
    let cfg = kb.add_configuration("GAN")?;

    let generator = kb.add_network(&cfg, "GAN_Generator", Some(&class::generation()))?;
    let g = stack(
        &mut kb,
        &generator,
        "GAN_Generator",
        &[input(), relu_layer("hidden_1"), relu_layer("hidden_2"), output()],
    )?;
    let discriminator = kb.add_network(&cfg, "GAN_Discriminator", Some(&class::discrimination()))?;
    let d = stack(
        &mut kb,
        &discriminator,
        "GAN_Discriminator",
        &[input(), relu_layer("hidden_1"), softmax_layer("hidden_2"), output()],
    )?;
    let gan = kb.add_network(&cfg, "GAN_GAN", Some(&class::adversarial()))?;
    let c = stack(
        &mut kb,
        &gan,
        "GAN_GAN",
        &[
            input(),
            relu_layer("gen_hidden_1"),
            relu_layer("gen_hidden_2"),
            relu_layer("dis_hidden_1"),
            softmax_layer("dis_hidden_2"),
            output(),
        ],
    )?;
    share(
        &mut kb,
        &[(&c[1], &g[1]), (&c[2], &g[2]), (&c[3], &d[1]), (&c[4], &d[2])],
    )?;

    let objective = kb.add_function(
        "gan_objective",
        &class::objective_function(),
        Some("binary cross-entropy"),
    )?;
    for net in [&generator, &discriminator, &gan] {
        kb.set_objective(net, &objective)?;
    }

    let mnist = kb.add_dataset("mnist", &class::dataset(), None)?;
    let noise = kb.add_dataset("random_noise", &class::dataset(), None)?;
    let gen_output = kb.add_transient_dataset("gen_output")?;
    kb.add_pipe("gan_pipe_mnist", &mnist, &d[0])?;
    kb.add_pipe("gan_pipe_generatorout", &gen_output, &d[0])?;
    kb.add_pipe("gan_pipe_noise_generator", &noise, &g[0])?;
    kb.add_pipe("gan_pipe_noise_gan", &noise, &c[0])?;
    for (name, out) in [
        ("GAN_Generator_labels", &g[3]),
        ("GAN_Discriminator_labels", &d[3]),
        ("GAN_GAN_labels", &c[5]),
    ] {
        let labels = kb.add_dataset(name, &class::labelset(), None)?;
        kb.add_pipe(&format!("{name}_pipe"), &labels, out)?;
    }

    let strategy = kb.add_training(&cfg, "GAN_Strategy")?;
    let session = kb.add_session(&strategy, "gan_session", None)?;
    let dis_mnist = kb.add_step(
        &session,
        "gan_discriminate_mnist",
        &class::training_single(),
        Some(&discriminator),
        None,
    )?;
    let gen_fpass = kb.add_step(
        &session,
        "gan_gen_fpass",
        &class::training_single_forward_only(),
        Some(&generator),
        None,
    )?;
    kb.set_produces(&gen_fpass, &gen_output)?;
    let dis_gen = kb.add_step(
        &session,
        "gan_discriminate_generatorout",
        &class::training_single(),
        Some(&discriminator),
        None,
    )?;
    let trainloop = kb.add_loop(
        &session,
        "gan_trainloop",
        GAN_LOOP_COUNT,
        &[dis_mnist.clone(), gen_fpass, dis_gen.clone()],
        None,
    )?;
    let gen_step = kb.add_step(
        &session,
        "gan_generatorstep",
        &class::training_single(),
        Some(&gan),
        Some(&trainloop),
    )?;
    let optimizer = kb.add_optimizer(&dis_mnist, "gan_optimizer")?;
    kb.use_optimizer(&dis_gen, &optimizer)?;
    kb.use_optimizer(&gen_step, &optimizer)?;
    kb.set_updates(&dis_mnist, &d[1..3])?;
    kb.set_updates(&dis_gen, &d[1..3])?;
    kb.set_updates(&gen_step, &c[1..3])?;

    let parzen = kb.add_function(
        "gan_parzen_loglikelihood",
        &class::metric(),
        Some("log-likelihood Parzen window estimate"),
    )?;
    kb.add_evaluation(
        "gan_evaluation",
        &Evaluation {
            network: &generator,
            configuration: &cfg,
            strategy: &strategy,
            metric: &parzen,
            dataset: &gen_output,
            score: GAN_SCORE,
            date: None,
        },
    )?;
    kb.add_trained_model("gan_trained_model")?;
    Ok(kb)
}

pub fn build_aae() -> Kb {
    build_aae_in(ns::ANNETTO).expect("example KB builds")
}

pub fn build_aae_in(namespace: &str) -> BuildResult<Kb> {
    let mut kb = Kb::with_namespace(namespace)?;
    let cfg = kb.add_configuration("AAE")?;

    // Autoencoder: the encoder splits into style and label codes, and the
    // decoder concatenates both branches again.
    let ae = kb.add_network(&cfg, "AAE_AE", None)?;
    let trunk = stack(
        &mut kb,
        &ae,
        "AAE_AE",
        &[
            input(),
            relu_layer("hidden_1"),
            relu_layer("hidden_2"),
            ("split", class::separation_layer(), None),
        ],
    )?;
    let style = stack(&mut kb, &ae, "AAE_AE", &[relu_layer("style_1"), relu_layer("style_dec")])?;
    let label = stack(&mut kb, &ae, "AAE_AE", &[softmax_layer("label_1"), relu_layer("label_dec")])?;
    let tail = stack(
        &mut kb,
        &ae,
        "AAE_AE",
        &[("concat", class::concat_layer(), None), relu_layer("hidden_3"), output()],
    )?;
    kb.connect(&trunk[3], &style[0])?;
    kb.connect(&trunk[3], &label[0])?;
    kb.connect(&style[1], &tail[0])?;
    kb.connect(&label[1], &tail[0])?;

    let encoder = |last: LayerSpec| -> [LayerSpec; 5] {
        [input(), relu_layer("hidden_1"), relu_layer("hidden_2"), last, output()]
    };
    let discriminator_layers = || [input(), relu_layer("hidden_1"), softmax_layer("hidden_2"), output()];

    let style_gen = kb.add_network(&cfg, "AAE_StyleGen", Some(&class::generation()))?;
    let sg = stack(&mut kb, &style_gen, "AAE_StyleGen", &encoder(relu_layer("style_1")))?;
    let label_gen = kb.add_network(&cfg, "AAE_LabelGen", Some(&class::clustering()))?;
    let lg = stack(&mut kb, &label_gen, "AAE_LabelGen", &encoder(softmax_layer("label_1")))?;
    let style_dis = kb.add_network(&cfg, "AAE_StyleDis", Some(&class::discrimination()))?;
    let sd = stack(&mut kb, &style_dis, "AAE_StyleDis", &discriminator_layers())?;
    let label_dis = kb.add_network(&cfg, "AAE_LabelDis", Some(&class::discrimination()))?;
    let ld = stack(&mut kb, &label_dis, "AAE_LabelDis", &discriminator_layers())?;

    let gan_layers = |last: LayerSpec| -> [LayerSpec; 7] {
        [
            input(),
            relu_layer("gen_hidden_1"),
            relu_layer("gen_hidden_2"),
            last,
            relu_layer("dis_hidden_1"),
            softmax_layer("dis_hidden_2"),
            output(),
        ]
    };
    let style_gan = kb.add_network(&cfg, "AAE_StyleGAN", Some(&class::adversarial()))?;
    let sa = stack(&mut kb, &style_gan, "AAE_StyleGAN", &gan_layers(relu_layer("gen_style_1")))?;
    let label_gan = kb.add_network(&cfg, "AAE_LabelGAN", Some(&class::adversarial()))?;
    let la = stack(&mut kb, &label_gan, "AAE_LabelGAN", &gan_layers(softmax_layer("gen_label_1")))?;

    share(
        &mut kb,
        &[
            (&sg[1], &trunk[1]),
            (&sg[2], &trunk[2]),
            (&sg[3], &style[0]),
            (&lg[1], &trunk[1]),
            (&lg[2], &trunk[2]),
            (&lg[3], &label[0]),
            (&sa[1], &sg[1]),
            (&sa[2], &sg[2]),
            (&sa[3], &sg[3]),
            (&sa[4], &sd[1]),
            (&sa[5], &sd[2]),
            (&la[1], &lg[1]),
            (&la[2], &lg[2]),
            (&la[3], &lg[3]),
            (&la[4], &ld[1]),
            (&la[5], &ld[2]),
        ],
    )?;

    let reconstruction = kb.add_function(
        "aae_reconstruction_loss",
        &class::cost_function(),
        Some("mean squared error"),
    )?;
    kb.set_objective(&ae, &reconstruction)?;
    let adversarial = kb.add_function(
        "aae_adversarial_loss",
        &class::objective_function(),
        Some("binary cross-entropy"),
    )?;
    for net in [&style_gen, &label_gen, &style_dis, &label_dis, &style_gan, &label_gan] {
        kb.set_objective(net, &adversarial)?;
    }

    let train_data = kb.add_dataset("aae_train_data", &class::dataset(), None)?;
    let test_data = kb.add_dataset("aae_test_data", &class::dataset(), None)?;
    let gaussian = kb.add_dataset("aae_gaussian", &class::dataset(), None)?;
    let categorical = kb.add_dataset("aae_categorical", &class::dataset(), None)?;
    let style_codes = kb.add_transient_dataset("aae_style_codes")?;
    let label_codes = kb.add_transient_dataset("aae_label_codes")?;
    for (name, dataset, layer) in [
        ("AAE_AE_pipe", &train_data, &trunk[0]),
        ("AAE_StyleGen_pipe", &train_data, &sg[0]),
        ("AAE_LabelGen_pipe", &train_data, &lg[0]),
        ("AAE_LabelGen_test_pipe", &test_data, &lg[0]),
        ("AAE_StyleGAN_pipe", &train_data, &sa[0]),
        ("AAE_LabelGAN_pipe", &train_data, &la[0]),
        ("AAE_StyleDis_noise_pipe", &gaussian, &sd[0]),
        ("AAE_LabelDis_noise_pipe", &categorical, &ld[0]),
        ("AAE_StyleDis_codes_pipe", &style_codes, &sd[0]),
        ("AAE_LabelDis_codes_pipe", &label_codes, &ld[0]),
    ] {
        kb.add_pipe(name, dataset, layer)?;
    }

    let strategy = kb.add_training(&cfg, "AAE_Strategy")?;
    let session = kb.add_session(&strategy, "aae_session", None)?;
    let single = class::training_single();
    let forward = class::training_single_forward_only();
    let steps = step_chain(
        &mut kb,
        &session,
        None,
        &[
            ("aae_autoencoder_step", single.clone(), &ae),
            ("aae_style_forward", forward.clone(), &style_gen),
            ("aae_label_forward", forward, &label_gen),
            ("aae_styledis_noise_step", single.clone(), &style_dis),
            ("aae_labeldis_noise_step", single.clone(), &label_dis),
            ("aae_styledis_encodings_step", single.clone(), &style_dis),
            ("aae_labeldis_encodings_step", single.clone(), &label_dis),
            ("aae_stylegen_step", single.clone(), &style_gan),
            ("aae_labelgen_step", single, &label_gan),
        ],
    )?;
    kb.set_produces(&steps[1], &style_codes)?;
    kb.set_produces(&steps[2], &label_codes)?;

    let ae_hidden: Vec<Iri> = [&trunk[1], &trunk[2], &style[0], &style[1], &label[0], &label[1], &tail[1]]
        .into_iter()
        .cloned()
        .collect();
    kb.set_updates(&steps[0], &ae_hidden)?;
    kb.set_updates(&steps[3], &sd[1..3])?;
    kb.set_updates(&steps[4], &ld[1..3])?;
    kb.set_updates(&steps[5], &sd[1..3])?;
    kb.set_updates(&steps[6], &ld[1..3])?;
    kb.set_updates(&steps[7], &sa[1..4])?;
    kb.set_updates(&steps[8], &la[1..4])?;

    let optimizer = kb.add_optimizer(&steps[0], "aae_optimizer")?;
    for step in steps.iter().skip(3) {
        kb.use_optimizer(step, &optimizer)?;
    }

    let accuracy = kb.add_function("aae_accuracy", &class::accuracy(), None)?;
    kb.add_evaluation(
        "aae_evaluation",
        &Evaluation {
            network: &label_gen,
            configuration: &cfg,
            strategy: &strategy,
            metric: &accuracy,
            dataset: &test_data,
            score: AAE_SCORE,
            date: None,
        },
    )?;
    Ok(kb)
}

/// The three example KBs in export order, paired with their file names.
pub fn build_examples_in(namespace: &str) -> BuildResult<[(&'static str, Kb); 3]> {
    Ok([
        ("simple.ttl", build_simple_classifier_in(namespace)?),
        ("gan.ttl", build_gan_in(namespace)?),
        ("aae.ttl", build_aae_in(namespace)?),
    ])
}

/// All three examples merged into one KB.
pub fn build_all() -> Kb {
    build_all_in(ns::ANNETTO).expect("example KBs build")
}

pub fn build_all_in(namespace: &str) -> BuildResult<Kb> {
    let mut all = Kb::with_namespace(namespace)?;
    for (_, kb) in build_examples_in(namespace)? {
        all.graph_mut().extend_from(kb.graph());
    }
    Ok(all)
}

/// Writes simple.ttl, gan.ttl and aae.ttl into `dir`, creating it if needed.
pub fn export_examples(dir: &Path) -> io::Result<Vec<PathBuf>> {
    export_examples_in(dir, ns::ANNETTO)
}

pub fn export_examples_in(dir: &Path, namespace: &str) -> io::Result<Vec<PathBuf>> {
    let kbs = build_examples_in(namespace)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (file, kb) in kbs {
        let path = dir.join(file);
        fs::write(&path, serialize_turtle(kb.graph(), kb.graph().prefixes()))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes the query files listed in [`QUERY_FILES`] into `dir`.
pub fn export_queries(dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (file, text) in QUERY_FILES {
        let path = dir.join(file);
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{evaluate, evaluate_naive, parse_query, ResultTable};
    use crate::schema::prop;
    use crate::term::{Literal, Term};
    use crate::validator::validate;

    fn iri(local: &str) -> Iri {
        Iri::from_parts(ns::ANNETTO, local).unwrap()
    }

    fn run(kb: &Kb, text: &str) -> ResultTable {
        evaluate(&parse_query(text).unwrap(), kb)
    }

    fn networks(kb: &Kb, cfg: &str) -> usize {
        kb.graph().object_iris(&iri(cfg), &prop::has_network()).count()
    }

    #[test]
    fn examples_validate_cleanly() {
        for (name, kb) in build_examples_in(ns::ANNETTO).unwrap() {
            let report = validate(&kb);
            assert!(report.violations.is_empty(), "{name}: {:?}", report.violations);
            assert!(report.warnings.is_empty(), "{name}: {:?}", report.warnings);
        }
        assert!(validate(&build_all()).is_valid());
    }

    #[test]
    fn structure_counts() {
        assert_eq!(networks(&build_gan(), "GAN"), 3);
        assert_eq!(networks(&build_aae(), "AAE"), 7);
        let simple = build_simple_classifier();
        let t = run(&simple, "select ?l where { ?l a :HiddenLayer }");
        assert_eq!(t.len(), 3);
        let gan = build_gan();
        let count: Vec<_> = gan.graph().objects(&iri("gan_trainloop"), &prop::loop_count()).collect();
        assert_eq!(count, [&Term::Literal(Literal::integer(5))]);
        let aae = build_aae();
        let steps = aae.graph().object_iris(&iri("aae_session"), &prop::has_training_step()).count();
        assert_eq!(steps, 9);
    }

    #[test]
    fn example_queries_on_merged_kb() {
        let all = build_all();
        let one = |t: &ResultTable| -> Vec<Term> { t.rows.iter().map(|r| r[0].clone()).collect() };
        assert!(run(&all, QUERY_1).is_empty());
        let prose = run(&all, QUERY_1_PROSE);
        assert_eq!(
            prose.rows,
            [vec![
                Term::Iri(iri("simple_classification")),
                Term::Literal(Literal::double(SIMPLE_SCORE).unwrap())
            ]]
        );
        assert_eq!(one(&run(&all, QUERY_2)), [Term::Iri(iri("AAE"))]);
        assert_eq!(one(&run(&all, QUERY_3)), [Term::Iri(iri("AAE_AE"))]);
        let q4 = run(&all, QUERY_4);
        assert_eq!(q4.vars, ["configuration", "evaluation_score"]);
        assert_eq!(
            q4.rows,
            [vec![Term::Iri(iri("AAE")), Term::Literal(Literal::double(0.68).unwrap())]]
        );
    }

    #[test]
    fn queries_agree_with_oracle_on_simple() {
        let kb = build_simple_classifier();
        for (_, text) in QUERY_FILES {
            let q = parse_query(text).unwrap();
            assert_eq!(evaluate(&q, &kb), evaluate_naive(&q, &kb));
        }
    }

    #[test]
    fn custom_namespace() {
        let kb = build_gan_in("http://example.org/kb/").unwrap();
        let cfg = Iri::new("http://example.org/kb/GAN").unwrap();
        assert_eq!(kb.graph().object_iris(&cfg, &prop::has_network()).count(), 3);
        assert!(validate(&kb).is_valid());
    }
}
