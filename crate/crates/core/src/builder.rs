//! Typed construction of knowledge bases. Every operation checks its
//! referents and emits the full set of triples the validator expects, so
//! callers never write triples by hand.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{is_local_name, Graph, PrefixMap, Triple};
use crate::schema::{builtin_schema, class, prop, SchemaError, SchemaModel};
use crate::term::{ns, Iri, Literal, Term, TermError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid individual name {0:?}")]
    InvalidName(String),
    #[error("{0} already exists")]
    Duplicate(Iri),
    #[error("{individual} is not a {expected}")]
    WrongType { individual: Iri, expected: Iri },
    #[error("class {class} is not a subclass of {expected}")]
    WrongClass { class: Iri, expected: Iri },
    #[error("layer {layer} already belongs to network {network}")]
    LayerAlreadyAttached { layer: Iri, network: Iri },
    #[error("layer {layer} is an activation layer and needs an activation function")]
    MissingActivation { layer: Iri },
    #[error("cannot connect {from} -> {to}: {reason}")]
    Connection { from: Iri, to: Iri, reason: String },
    #[error("cannot share {a} and {b}: {reason}")]
    Sharing { a: Iri, b: Iri, reason: String },
    #[error("{0} already has a successor")]
    AlreadyChained(Iri),
    #[error("{individual} does not belong to {parent}")]
    NotInParent { individual: Iri, parent: Iri },
    #[error("network {0} already has an objective function")]
    ObjectiveAlreadySet(Iri),
    #[error("loop {name}: {reason}")]
    InvalidLoop { name: String, reason: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Term(#[from] TermError),
}

pub type BuildResult<T> = Result<T, BuildError>;

/// A graph paired with the schema it is interpreted under.
#[derive(Debug, Clone)]
pub struct Kb {
    graph: Graph,
    schema: Arc<SchemaModel>,
    namespace: String,
}

impl Default for Kb {
    fn default() -> Self {
        Kb::new()
    }
}

impl Kb {
    /// Empty KB over the built-in schema, minting names in the ANNETT-O
    /// namespace.
    pub fn new() -> Self {
        Kb::with_namespace(ns::ANNETTO).expect("default namespace is valid")
    }

    pub fn with_namespace(namespace: &str) -> BuildResult<Self> {
        Iri::new(namespace)?;
        let mut prefixes = PrefixMap::with_default_namespace(namespace);
        if namespace != ns::ANNETTO {
            prefixes.insert("annetto", ns::ANNETTO);
        }
        Ok(Kb {
            graph: Graph::with_prefixes(prefixes),
            schema: Arc::new(builtin_schema()),
            namespace: namespace.to_owned(),
        })
    }

    /// Wraps an existing graph, e.g. one read from a Turtle file.
    pub fn from_graph(graph: Graph, schema: Arc<SchemaModel>) -> Self {
        let namespace = graph
            .prefixes()
            .get("")
            .unwrap_or(ns::ANNETTO)
            .to_owned();
        Kb {
            graph,
            schema,
            namespace,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Raw access for callers that edit triples directly.
    pub fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn schema(&self) -> &SchemaModel {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<SchemaModel> {
        Arc::clone(&self.schema)
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    /// The IRI a name would be minted as.
    pub fn iri(&self, name: &str) -> BuildResult<Iri> {
        if !is_local_name(name) {
            return Err(BuildError::InvalidName(name.to_owned()));
        }
        Ok(Iri::from_parts(&self.namespace, name)?)
    }

    pub fn has_type(&self, individual: &Iri, class: &Iri) -> bool {
        self.schema.has_type(&self.graph, individual, class)
    }

    pub fn types(&self, individual: &Iri) -> BTreeSet<Iri> {
        self.schema.inferred_types(&self.graph, individual)
    }

    fn require_type(&self, individual: &Iri, class: &Iri) -> BuildResult<()> {
        if self.has_type(individual, class) {
            Ok(())
        } else {
            Err(BuildError::WrongType {
                individual: individual.clone(),
                expected: class.clone(),
            })
        }
    }

    fn require_subclass(&self, class: &Iri, expected: &Iri) -> BuildResult<()> {
        if self.schema.is_subclass(class, expected)? {
            Ok(())
        } else {
            Err(BuildError::WrongClass {
                class: class.clone(),
                expected: expected.clone(),
            })
        }
    }

    fn link(&mut self, subject: &Iri, predicate: Iri, object: impl Into<Term>) {
        self.graph
            .insert(Triple::new(subject.clone(), predicate, object));
    }

    fn first_object(&self, subject: &Iri, predicate: &Iri) -> Option<Iri> {
        self.graph.object_iris(subject, predicate).next().cloned()
    }

    fn first_subject(&self, predicate: &Iri, object: &Iri) -> Option<Iri> {
        self.graph
            .subjects(predicate, &Term::Iri(object.clone()))
            .next()
            .cloned()
    }

    /// Mints a fresh individual typed `class`.
    pub fn create(&mut self, name: &str, class: &Iri) -> BuildResult<Iri> {
        let iri = self.iri(name)?;
        if self.graph.mentions(&iri) {
            return Err(BuildError::Duplicate(iri));
        }
        if !self.schema.has_class(class) {
            return Err(SchemaError::UnknownClass(class.clone()).into());
        }
        self.link(&iri, Iri::rdf_type(), class);
        Ok(iri)
    }

    fn create_sub(&mut self, name: &str, class: &Iri, expected: &Iri) -> BuildResult<Iri> {
        self.require_subclass(class, expected)?;
        self.create(name, class)
    }

    // ---- topology ----

    pub fn add_configuration(&mut self, name: &str) -> BuildResult<Iri> {
        self.create(name, &class::ann_configuration())
    }

    /// Adds a network to `config`. `task` is a TaskCharacterization
    /// subclass; a `<name>_task` individual of that class is created.
    pub fn add_network(&mut self, config: &Iri, name: &str, task: Option<&Iri>) -> BuildResult<Iri> {
        self.require_type(config, &class::ann_configuration())?;
        if let Some(task) = task {
            self.require_subclass(task, &class::task_characterization())?;
            let task_iri = self.iri(&format!("{name}_task"))?;
            if self.graph.mentions(&task_iri) {
                return Err(BuildError::Duplicate(task_iri));
            }
        }
        let network = self.create(name, &class::network())?;
        self.link(config, prop::has_network(), &network);
        if let Some(task) = task {
            let task_ind = self.create(&format!("{name}_task"), task)?;
            self.link(&network, prop::has_task_type(), &task_ind);
        }
        Ok(network)
    }

    /// Adds a layer to `network`. Activation layers need an activation
    /// function class; a `<name>_activation` individual is created for it.
    pub fn add_layer(
        &mut self,
        network: &Iri,
        name: &str,
        layer_class: &Iri,
        activation: Option<&Iri>,
    ) -> BuildResult<Iri> {
        self.require_type(network, &class::network())?;
        self.require_subclass(layer_class, &class::layer())?;
        let iri = self.iri(name)?;
        if self.has_type(&iri, &class::layer()) {
            if let Some(owner) = self.first_subject(&prop::has_layer(), &iri) {
                return Err(BuildError::LayerAlreadyAttached {
                    layer: iri,
                    network: owner,
                });
            }
        }
        if let Some(function) = activation {
            self.require_subclass(function, &class::activation_function())?;
            let fn_iri = self.iri(&format!("{name}_activation"))?;
            if self.graph.mentions(&fn_iri) {
                return Err(BuildError::Duplicate(fn_iri));
            }
        } else if self.schema.is_subclass(layer_class, &class::activation_layer())? {
            return Err(BuildError::MissingActivation { layer: iri });
        }
        let layer = self.create(name, layer_class)?;
        self.link(network, prop::has_layer(), &layer);
        if let Some(function) = activation {
            let fn_ind = self.create(&format!("{name}_activation"), function)?;
            self.link(&layer, prop::has_activation_function(), &fn_ind);
        }
        Ok(layer)
    }

    fn network_of(&self, layer: &Iri) -> BuildResult<Iri> {
        self.require_type(layer, &class::layer())?;
        self.first_subject(&prop::has_layer(), layer)
            .ok_or_else(|| BuildError::NotInParent {
                individual: layer.clone(),
                parent: class::network(),
            })
    }

    /// Links `from -> to` with `nextLayer` and the mirrored `previousLayer`.
    pub fn connect(&mut self, from: &Iri, to: &Iri) -> BuildResult<()> {
        let fail = |reason: &str| BuildError::Connection {
            from: from.clone(),
            to: to.clone(),
            reason: reason.to_owned(),
        };
        let (net_from, net_to) = (self.network_of(from)?, self.network_of(to)?);
        if from == to {
            return Err(fail("a layer cannot follow itself"));
        }
        if net_from != net_to {
            return Err(fail("layers belong to different networks"));
        }
        let next = prop::next_layer();
        if self.graph.contains(&Triple::new(from.clone(), next.clone(), to)) {
            return Err(fail("already connected"));
        }
        if self.has_type(to, &class::input_layer()) {
            return Err(fail("nothing may connect into an input layer"));
        }
        if self.has_type(from, &class::output_layer()) {
            return Err(fail("nothing may connect out of an output layer"));
        }
        if !self.has_type(from, &class::separation_layer())
            && self.graph.object_iris(from, &next).next().is_some()
        {
            return Err(fail("source already has a following layer"));
        }
        if !self.has_type(to, &class::aggregation_layer())
            && self.graph.object_iris(to, &prop::previous_layer()).next().is_some()
        {
            return Err(fail("target already has a preceding layer"));
        }
        self.link(from, next, to);
        self.link(to, prop::previous_layer(), from);
        Ok(())
    }

    /// Declares two layers of different networks to be the same layer.
    pub fn same_layer(&mut self, a: &Iri, b: &Iri) -> BuildResult<()> {
        let fail = |reason: &str| BuildError::Sharing {
            a: a.clone(),
            b: b.clone(),
            reason: reason.to_owned(),
        };
        if a == b {
            return Err(fail("a layer cannot be shared with itself"));
        }
        if self.network_of(a)? == self.network_of(b)? {
            return Err(fail("layers belong to the same network"));
        }
        self.link(a, prop::same_layer_as(), b);
        self.link(b, prop::same_layer_as(), a);
        Ok(())
    }

    // ---- functions ----

    /// Adds an individual of a Function subclass, optionally with its
    /// mathematical form.
    pub fn add_function(&mut self, name: &str, fn_class: &Iri, math: Option<&str>) -> BuildResult<Iri> {
        let function = self.create_sub(name, fn_class, &class::function())?;
        if let Some(math) = math {
            self.link(&function, prop::function_math(), Literal::string(math));
        }
        Ok(function)
    }

    /// Links an existing ObjectiveFunction individual to a network. The
    /// same function may serve several networks.
    pub fn set_objective(&mut self, network: &Iri, function: &Iri) -> BuildResult<()> {
        self.require_type(network, &class::network())?;
        self.require_type(function, &class::objective_function())?;
        if self.first_object(network, &prop::has_objective_function()).is_some() {
            return Err(BuildError::ObjectiveAlreadySet(network.clone()));
        }
        self.link(network, prop::has_objective_function(), function);
        Ok(())
    }

    // ---- training ----

    pub fn add_training(&mut self, config: &Iri, strategy_name: &str) -> BuildResult<Iri> {
        self.require_type(config, &class::ann_configuration())?;
        let strategy = self.create(strategy_name, &class::training_strategy())?;
        self.link(config, prop::has_training_strategy(), &strategy);
        Ok(strategy)
    }

    /// Associates an existing strategy with another configuration.
    pub fn attach_training(&mut self, config: &Iri, strategy: &Iri) -> BuildResult<()> {
        self.require_type(config, &class::ann_configuration())?;
        self.require_type(strategy, &class::training_strategy())?;
        self.link(config, prop::has_training_strategy(), strategy);
        Ok(())
    }

    pub fn add_session(&mut self, strategy: &Iri, name: &str, after: Option<&Iri>) -> BuildResult<Iri> {
        self.require_type(strategy, &class::training_strategy())?;
        let next = prop::next_training_session();
        if let Some(prev) = after {
            self.require_type(prev, &class::training_session())?;
            let owned = self.graph.contains(&Triple::new(
                strategy.clone(),
                prop::has_training_session(),
                prev,
            ));
            if !owned {
                return Err(BuildError::NotInParent {
                    individual: prev.clone(),
                    parent: strategy.clone(),
                });
            }
            if self.first_object(prev, &next).is_some() {
                return Err(BuildError::AlreadyChained(prev.clone()));
            }
        }
        let session = self.create(name, &class::training_session())?;
        self.link(strategy, prop::has_training_session(), &session);
        if let Some(prev) = after {
            self.link(prev, next, &session);
        }
        Ok(session)
    }

    fn check_step_predecessor(&self, session: &Iri, after: &Iri) -> BuildResult<()> {
        self.require_step_of(session, after)?;
        if self.first_object(after, &prop::next_training_step()).is_some() {
            return Err(BuildError::AlreadyChained(after.clone()));
        }
        Ok(())
    }

    fn require_step_of(&self, session: &Iri, step: &Iri) -> BuildResult<()> {
        let owned = self.graph.contains(&Triple::new(
            session.clone(),
            prop::has_training_step(),
            step,
        ));
        if owned {
            Ok(())
        } else {
            Err(BuildError::NotInParent {
                individual: step.clone(),
                parent: session.clone(),
            })
        }
    }

    /// Adds a non-loop step to `session`, optionally training `network`
    /// and following `after` in the step chain.
    pub fn add_step(
        &mut self,
        session: &Iri,
        name: &str,
        step_class: &Iri,
        network: Option<&Iri>,
        after: Option<&Iri>,
    ) -> BuildResult<Iri> {
        self.require_type(session, &class::training_session())?;
        self.require_subclass(step_class, &class::training_step())?;
        if self.schema.is_subclass(step_class, &class::training_loop())? {
            return Err(BuildError::InvalidLoop {
                name: name.to_owned(),
                reason: "loops are added with add_loop".to_owned(),
            });
        }
        if let Some(network) = network {
            self.require_type(network, &class::network())?;
        }
        if let Some(prev) = after {
            self.check_step_predecessor(session, prev)?;
        }
        let step = self.create(name, step_class)?;
        self.link(session, prop::has_training_step(), &step);
        if let Some(network) = network {
            self.link(&step, prop::trains_network(), network);
        }
        if let Some(prev) = after {
            self.link(prev, prop::next_training_step(), &step);
        }
        Ok(step)
    }

    /// Adds a loop repeating `inner` (existing steps of the same session,
    /// in order) `count` times.
    pub fn add_loop(
        &mut self,
        session: &Iri,
        name: &str,
        count: i64,
        inner: &[Iri],
        after: Option<&Iri>,
    ) -> BuildResult<Iri> {
        if count < 1 {
            return Err(BuildError::InvalidLoop {
                name: name.to_owned(),
                reason: format!("repetition count {count} is not positive"),
            });
        }
        let lp = self.add_loop_inner(session, name, inner, after)?;
        self.link(&lp, prop::loop_count(), Literal::integer(count));
        Ok(lp)
    }

    /// Adds a loop that repeats until a free-text condition holds.
    pub fn add_conditional_loop(
        &mut self,
        session: &Iri,
        name: &str,
        condition: &str,
        inner: &[Iri],
        after: Option<&Iri>,
    ) -> BuildResult<Iri> {
        let lp = self.add_loop_inner(session, name, inner, after)?;
        self.link(&lp, prop::loop_condition(), Literal::string(condition));
        Ok(lp)
    }

    fn add_loop_inner(
        &mut self,
        session: &Iri,
        name: &str,
        inner: &[Iri],
        after: Option<&Iri>,
    ) -> BuildResult<Iri> {
        let invalid = |reason: String| BuildError::InvalidLoop {
            name: name.to_owned(),
            reason,
        };
        self.require_type(session, &class::training_session())?;
        if inner.is_empty() {
            return Err(invalid("no inner steps".to_owned()));
        }
        let next = prop::next_training_step();
        for (i, step) in inner.iter().enumerate() {
            self.require_step_of(session, step)?;
            if let Some(owner) = self.first_subject(&prop::has_loop_step(), step) {
                return Err(invalid(format!("{step} already belongs to loop {owner}")));
            }
            if inner[..i].contains(step) {
                return Err(invalid(format!("{step} listed twice")));
            }
            if Some(step) == after {
                return Err(invalid(format!("{step} cannot both precede and be inside the loop")));
            }
        }
        for pair in inner.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            match self.first_object(a, &next) {
                Some(existing) if existing != *b => return Err(BuildError::AlreadyChained(a.clone())),
                _ => {}
            }
            match self.first_subject(&next, b) {
                Some(existing) if existing != *a => {
                    return Err(invalid(format!("{b} already follows {existing}")))
                }
                _ => {}
            }
        }
        if let Some(prev) = after {
            self.check_step_predecessor(session, prev)?;
        }
        let lp = self.create(name, &class::training_loop())?;
        self.link(session, prop::has_training_step(), &lp);
        for step in inner {
            self.link(&lp, prop::has_loop_step(), step);
        }
        for pair in inner.windows(2) {
            self.link(&pair[0], next.clone(), &pair[1]);
        }
        if let Some(prev) = after {
            self.link(prev, next, &lp);
        }
        Ok(lp)
    }

    pub fn add_optimizer(&mut self, step: &Iri, name: &str) -> BuildResult<Iri> {
        self.require_type(step, &class::training_step())?;
        let optimizer = self.create(name, &class::training_optimizer())?;
        self.link(step, prop::has_training_optimizer(), &optimizer);
        Ok(optimizer)
    }

    /// Links a step to an existing optimizer individual.
    pub fn use_optimizer(&mut self, step: &Iri, optimizer: &Iri) -> BuildResult<()> {
        self.require_type(step, &class::training_step())?;
        self.require_type(optimizer, &class::training_optimizer())?;
        self.link(step, prop::has_training_optimizer(), optimizer);
        Ok(())
    }

    /// Records that `step` produces `dataset` (a forward pass output).
    pub fn set_produces(&mut self, step: &Iri, dataset: &Iri) -> BuildResult<()> {
        self.require_type(step, &class::training_step())?;
        self.require_type(dataset, &class::dataset())?;
        self.link(step, prop::produces_dataset(), dataset);
        Ok(())
    }

    /// Records the layers whose weights `step` updates.
    pub fn set_updates(&mut self, step: &Iri, layers: &[Iri]) -> BuildResult<()> {
        self.require_type(step, &class::training_step())?;
        for layer in layers {
            self.require_type(layer, &class::layer())?;
        }
        for layer in layers {
            self.link(step, prop::updates_layer(), layer);
        }
        Ok(())
    }

    // ---- data ----

    /// Adds a dataset. `characterization` is a DataCharacterization
    /// subclass; a `<name>_characterization` individual is created for it.
    pub fn add_dataset(
        &mut self,
        name: &str,
        dataset_class: &Iri,
        characterization: Option<&Iri>,
    ) -> BuildResult<Iri> {
        self.require_subclass(dataset_class, &class::dataset())?;
        if let Some(ch) = characterization {
            self.require_subclass(ch, &class::data_characterization())?;
        }
        let dataset = self.create(name, dataset_class)?;
        if let Some(ch) = characterization {
            let ch_ind = self.create(&format!("{name}_characterization"), ch)?;
            self.link(&dataset, prop::has_data_characterization(), &ch_ind);
        }
        Ok(dataset)
    }

    /// Adds a dataset marked transient, i.e. produced during training.
    pub fn add_transient_dataset(&mut self, name: &str) -> BuildResult<Iri> {
        let dataset = self.create(name, &class::dataset())?;
        self.link(&dataset, prop::is_transient(), Literal::boolean(true));
        Ok(dataset)
    }

    /// Connects a dataset to an input or output layer.
    pub fn add_pipe(&mut self, name: &str, dataset: &Iri, layer: &Iri) -> BuildResult<Iri> {
        self.require_type(dataset, &class::dataset())?;
        self.require_type(layer, &class::in_out_layer())?;
        let pipe = self.create(name, &class::dataset_pipe())?;
        self.link(&pipe, prop::pipe_layer(), layer);
        self.link(&pipe, prop::pipe_dataset(), dataset);
        Ok(pipe)
    }

    pub fn add_trained_model(&mut self, name: &str) -> BuildResult<Iri> {
        self.create(name, &class::trained_model())
    }

    // ---- evaluation ----

    pub fn add_evaluation(&mut self, name: &str, eval: &Evaluation<'_>) -> BuildResult<Iri> {
        self.require_type(eval.network, &class::network())?;
        self.require_type(eval.configuration, &class::ann_configuration())?;
        self.require_type(eval.strategy, &class::training_strategy())?;
        self.require_type(eval.metric, &class::metric())?;
        self.require_type(eval.dataset, &class::dataset())?;
        let score = Literal::double(eval.score)?;
        let date = eval.date.map(Literal::date_time).transpose()?;
        let evaluation = self.create(name, &class::network_evaluation())?;
        self.link(&evaluation, prop::evaluates_network(), eval.network);
        self.link(&evaluation, prop::evaluates_configuration(), eval.configuration);
        self.link(&evaluation, prop::based_on_training_strategy(), eval.strategy);
        self.link(&evaluation, prop::has_evaluation_metric(), eval.metric);
        self.link(&evaluation, prop::evaluates_on_dataset(), eval.dataset);
        self.link(&evaluation, prop::eval_score(), score);
        if let Some(date) = date {
            self.link(&evaluation, prop::eval_date(), date);
        }
        Ok(evaluation)
    }
}

/// Referents and outcome of one network evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation<'a> {
    pub network: &'a Iri,
    pub configuration: &'a Iri,
    pub strategy: &'a Iri,
    pub metric: &'a Iri,
    pub dataset: &'a Iri,
    pub score: f64,
    pub date: Option<&'a str>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(kb: &Kb, s: Option<&Iri>, p: &Iri, o: Option<&Iri>) -> usize {
        let o = o.map(|o| Term::Iri(o.clone()));
        kb.graph().matches(s, Some(p), o.as_ref()).len()
    }

    fn net_with_layers(kb: &mut Kb) -> (Iri, Iri) {
        let cfg = kb.add_configuration("cfg").unwrap();
        let net = kb.add_network(&cfg, "net", None).unwrap();
        (cfg, net)
    }

    #[test]
    fn configuration_echo_and_duplicates() {
        let mut kb = Kb::new();
        let gan = kb.add_configuration("GAN").unwrap();
        assert_eq!(gan.as_str(), "http://w3id.org/annett-o/GAN");
        assert!(kb.has_type(&gan, &class::ann_configuration()));
        assert_eq!(kb.add_configuration("GAN"), Err(BuildError::Duplicate(gan)));
        assert!(matches!(kb.add_configuration("bad name"), Err(BuildError::InvalidName(_))));
    }

    #[test]
    fn networks_and_tasks() {
        let mut kb = Kb::new();
        let gan = kb.add_configuration("GAN").unwrap();
        let gen = kb
            .add_network(&gan, "GAN_Generator", Some(&class::generation()))
            .unwrap();
        let task = kb.first_object(&gen, &prop::has_task_type()).unwrap();
        assert!(kb.has_type(&task, &class::generation()));
        kb.add_network(&gan, "GAN_Discriminator", Some(&class::discrimination())).unwrap();
        kb.add_network(&gan, "GAN_GAN", Some(&class::adversarial())).unwrap();
        assert_eq!(count(&kb, Some(&gan), &prop::has_network(), None), 3);

        let missing = kb.iri("nowhere").unwrap();
        assert!(matches!(
            kb.add_network(&missing, "x", None),
            Err(BuildError::WrongType { .. })
        ));
        assert!(matches!(
            kb.add_network(&gan, "y", Some(&class::relu())),
            Err(BuildError::WrongClass { .. })
        ));
    }

    #[test]
    fn layers() {
        let mut kb = Kb::new();
        let (cfg, net) = net_with_layers(&mut kb);
        let h1 = kb
            .add_layer(&net, "h1", &class::fully_connected_layer(), Some(&class::relu()))
            .unwrap();
        let act = kb.first_object(&h1, &prop::has_activation_function()).unwrap();
        assert!(kb.has_type(&act, &class::relu()));

        let other = kb.add_network(&cfg, "other", None).unwrap();
        assert_eq!(
            kb.add_layer(&other, "h1", &class::concat_layer(), None),
            Err(BuildError::LayerAlreadyAttached {
                layer: h1,
                network: net.clone()
            })
        );
        assert!(matches!(
            kb.add_layer(&net, "bogus", &class::network(), None),
            Err(BuildError::WrongClass { .. })
        ));
        assert!(matches!(
            kb.add_layer(&net, "noact", &class::fully_connected_layer(), None),
            Err(BuildError::MissingActivation { .. })
        ));
    }

    #[test]
    fn connect_rules() {
        let mut kb = Kb::new();
        let (_, net) = net_with_layers(&mut kb);
        let fc = class::fully_connected_layer();
        let relu = class::relu();
        let input = kb.add_layer(&net, "in", &class::input_layer(), None).unwrap();
        let h1 = kb.add_layer(&net, "h1", &fc, Some(&relu)).unwrap();
        let h2 = kb.add_layer(&net, "h2", &fc, Some(&relu)).unwrap();
        let h3 = kb.add_layer(&net, "h3", &fc, Some(&relu)).unwrap();
        let sep = kb.add_layer(&net, "sep", &class::separation_layer(), None).unwrap();
        let cat = kb.add_layer(&net, "cat", &class::concat_layer(), None).unwrap();
        let out = kb.add_layer(&net, "out", &class::output_layer(), None).unwrap();

        kb.connect(&input, &h1).unwrap();
        assert!(kb.graph().contains(&Triple::new(input.clone(), prop::next_layer(), &h1)));
        assert!(kb.graph().contains(&Triple::new(h1.clone(), prop::previous_layer(), &input)));

        kb.connect(&h1, &sep).unwrap();
        assert!(matches!(kb.connect(&h1, &h2), Err(BuildError::Connection { .. })));
        kb.connect(&sep, &h2).unwrap();
        kb.connect(&sep, &h3).unwrap();
        kb.connect(&h2, &cat).unwrap();
        kb.connect(&h3, &cat).unwrap();
        assert!(matches!(kb.connect(&cat, &input), Err(BuildError::Connection { .. })));
        kb.connect(&cat, &out).unwrap();
        assert!(matches!(kb.connect(&out, &h1), Err(BuildError::Connection { .. })));
        assert!(matches!(kb.connect(&h2, &cat), Err(BuildError::Connection { .. })));
    }

    #[test]
    fn connect_across_networks_fails() {
        let mut kb = Kb::new();
        let (cfg, net) = net_with_layers(&mut kb);
        let net2 = kb.add_network(&cfg, "net2", None).unwrap();
        let a = kb.add_layer(&net, "a", &class::concat_layer(), None).unwrap();
        let b = kb.add_layer(&net2, "b", &class::concat_layer(), None).unwrap();
        assert!(matches!(kb.connect(&a, &b), Err(BuildError::Connection { .. })));
    }

    #[test]
    fn sharing() {
        let mut kb = Kb::new();
        let (cfg, net) = net_with_layers(&mut kb);
        let net2 = kb.add_network(&cfg, "net2", None).unwrap();
        let a = kb.add_layer(&net, "a", &class::concat_layer(), None).unwrap();
        let a2 = kb.add_layer(&net, "a2", &class::concat_layer(), None).unwrap();
        let b = kb.add_layer(&net2, "b", &class::concat_layer(), None).unwrap();
        kb.same_layer(&a, &b).unwrap();
        assert!(kb.graph().contains(&Triple::new(a.clone(), prop::same_layer_as(), &b)));
        assert!(kb.graph().contains(&Triple::new(b.clone(), prop::same_layer_as(), &a)));
        assert!(matches!(kb.same_layer(&a, &a), Err(BuildError::Sharing { .. })));
        assert!(matches!(kb.same_layer(&a, &a2), Err(BuildError::Sharing { .. })));
    }

    #[test]
    fn session_chain_at_most_once() {
        let mut kb = Kb::new();
        let (cfg, _) = net_with_layers(&mut kb);
        let strategy = kb.add_training(&cfg, "strategy").unwrap();
        let a = kb.add_session(&strategy, "A", None).unwrap();
        kb.add_session(&strategy, "B", Some(&a)).unwrap();
        assert_eq!(
            kb.add_session(&strategy, "C", Some(&a)),
            Err(BuildError::AlreadyChained(a))
        );
    }

    #[test]
    fn loops_and_steps() {
        let mut kb = Kb::new();
        let (cfg, net) = net_with_layers(&mut kb);
        let strategy = kb.add_training(&cfg, "strategy").unwrap();
        let session = kb.add_session(&strategy, "session", None).unwrap();
        let single = class::training_single();
        let s1 = kb.add_step(&session, "s1", &single, Some(&net), None).unwrap();
        let s2 = kb.add_step(&session, "s2", &single, Some(&net), None).unwrap();
        let lp = kb
            .add_loop(&session, "lp", 5, &[s1.clone(), s2.clone()], None)
            .unwrap();
        let last = kb.add_step(&session, "last", &single, Some(&net), Some(&lp)).unwrap();

        assert!(kb.graph().contains(&Triple::new(s1.clone(), prop::next_training_step(), &s2)));
        assert!(kb.graph().contains(&Triple::new(lp.clone(), prop::next_training_step(), &last)));
        assert_eq!(count(&kb, Some(&session), &prop::has_training_step(), None), 4);
        assert_eq!(
            kb.graph().objects(&lp, &prop::loop_count()).next(),
            Some(&Term::Literal(Literal::integer(5)))
        );
        assert!(matches!(
            kb.add_loop(&session, "lp2", 0, std::slice::from_ref(&last), None),
            Err(BuildError::InvalidLoop { .. })
        ));
        assert!(matches!(
            kb.add_loop(&session, "lp3", 2, std::slice::from_ref(&s1), None),
            Err(BuildError::InvalidLoop { .. })
        ));
        assert!(matches!(
            kb.add_step(&session, "dup", &single, None, Some(&lp)),
            Err(BuildError::AlreadyChained(_))
        ));
        assert!(matches!(
            kb.add_step(&session, "lp4", &class::training_loop(), None, None),
            Err(BuildError::InvalidLoop { .. })
        ));
    }

    #[test]
    fn pipes() {
        let mut kb = Kb::new();
        let (_, net) = net_with_layers(&mut kb);
        let input = kb.add_layer(&net, "in", &class::input_layer(), None).unwrap();
        let hidden = kb
            .add_layer(&net, "h", &class::fully_connected_layer(), Some(&class::relu()))
            .unwrap();
        let mnist = kb.add_dataset("mnist", &class::dataset(), None).unwrap();
        let labels = kb.add_dataset("labels", &class::labelset(), None).unwrap();
        let pipe = kb.add_pipe("pipe", &mnist, &input).unwrap();
        assert!(kb.graph().contains(&Triple::new(pipe.clone(), prop::pipe_layer(), &input)));
        assert!(kb.graph().contains(&Triple::new(pipe, prop::pipe_dataset(), &mnist)));
        kb.add_pipe("pipe2", &labels, &input).unwrap();
        assert!(matches!(
            kb.add_pipe("pipe3", &mnist, &hidden),
            Err(BuildError::WrongType { .. })
        ));
        assert!(matches!(
            kb.add_dataset("weird", &class::layer(), None),
            Err(BuildError::WrongClass { .. })
        ));
    }

    #[test]
    fn evaluations() {
        let mut kb = Kb::new();
        let (cfg, net) = net_with_layers(&mut kb);
        let strategy = kb.add_training(&cfg, "strategy").unwrap();
        let metric = kb.add_function("acc", &class::accuracy(), None).unwrap();
        let data = kb.add_dataset("data", &class::dataset(), None).unwrap();
        let mut eval = Evaluation {
            network: &net,
            configuration: &cfg,
            strategy: &strategy,
            metric: &metric,
            dataset: &data,
            score: 0.68,
            date: None,
        };
        let e = kb.add_evaluation("e1", &eval).unwrap();
        assert_eq!(
            kb.graph().objects(&e, &prop::eval_score()).next(),
            Some(&Term::Literal(Literal::double(0.68).unwrap()))
        );
        assert_eq!(kb.graph().objects(&e, &prop::eval_date()).count(), 0);

        eval.date = Some("2018-03-01T00:00:00Z");
        let e2 = kb.add_evaluation("e2", &eval).unwrap();
        assert_eq!(kb.graph().objects(&e2, &prop::eval_date()).count(), 1);

        let ghost = kb.iri("ghost").unwrap();
        eval.metric = &ghost;
        assert!(matches!(
            kb.add_evaluation("e3", &eval),
            Err(BuildError::WrongType { .. })
        ));
    }

    #[test]
    fn objectives() {
        let mut kb = Kb::new();
        let (_, net) = net_with_layers(&mut kb);
        let cost = kb.add_function("cost", &class::cost_function(), Some("-\\sum y \\log p")).unwrap();
        kb.set_objective(&net, &cost).unwrap();
        assert_eq!(kb.set_objective(&net, &cost), Err(BuildError::ObjectiveAlreadySet(net)));
        let relu = kb.add_function("r", &class::relu(), None).unwrap();
        let (_, other) = {
            let c = kb.add_configuration("c2").unwrap();
            let n = kb.add_network(&c, "n2", None).unwrap();
            (c, n)
        };
        assert!(matches!(kb.set_objective(&other, &relu), Err(BuildError::WrongType { .. })));
    }
}
