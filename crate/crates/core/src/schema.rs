//! The ANNETT-O vocabulary: ontology classes, properties and RDFS-style
//! subclass inference.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::Graph;
use crate::term::{ns, Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown ontology class {0}")]
    UnknownClass(Iri),
    #[error("class {class} names unknown parent {parent}")]
    UnknownParent { class: Iri, parent: Iri },
    #[error("cyclic subclass declarations: {}", render_cycle(.0))]
    Cycle(Vec<Iri>),
    #[error("property {property}: {reason}")]
    InvalidProperty { property: Iri, reason: String },
}

fn render_cycle(cycle: &[Iri]) -> String {
    cycle
        .iter()
        .map(|c| c.as_str())
        .collect::<Vec<_>>()
        .join(" -> ")
}

macro_rules! vocab_terms {
    ($($name:ident => $local:literal,)*) => {
        $(
            pub fn $name() -> Iri {
                Iri::from_parts(ns::ANNETTO, $local).expect("static vocabulary IRI")
            }
        )*
    };
}

/// Ontology classes of the built-in roster.
pub mod class {
    use super::*;

    vocab_terms! {
        ann_configuration => "ANNConfiguration",
        network => "Network",
        layer => "Layer",
        hidden_layer => "HiddenLayer",
        in_out_layer => "InOutLayer",
        activation_layer => "ActivationLayer",
        aggregation_layer => "AggregationLayer",
        separation_layer => "SeparationLayer",
        modification_layer => "ModificationLayer",
        fully_connected_layer => "FullyConnectedLayer",
        concat_layer => "ConcatLayer",
        input_layer => "InputLayer",
        output_layer => "OutputLayer",
        training_strategy => "TrainingStrategy",
        training_session => "TrainingSession",
        training_step => "TrainingStep",
        training_loop => "TrainingLoop",
        training_single => "TrainingSingle",
        training_single_forward_only => "TrainingSingleForwardOnly",
        training_optimizer => "TrainingOptimizer",
        network_evaluation => "NetworkEvaluation",
        function => "Function",
        activation_function => "ActivationFunction",
        relu => "Relu",
        softmax => "Softmax",
        objective_function => "ObjectiveFunction",
        cost_function => "CostFunction",
        metric => "Metric",
        accuracy => "Accuracy",
        dataset => "Dataset",
        labelset => "Labelset",
        dataset_pipe => "DatasetPipe",
        trained_model => "TrainedModel",
        task_characterization => "TaskCharacterization",
        clustering => "Clustering",
        classification => "Classification",
        generation => "Generation",
        discrimination => "Discrimination",
        adversarial => "Adversarial",
        data_characterization => "DataCharacterization",
    }
}

/// Object and data properties of the built-in roster.
pub mod prop {
    use super::*;

    vocab_terms! {
        has_network => "hasNetwork",
        has_layer => "hasLayer",
        next_layer => "nextLayer",
        previous_layer => "previousLayer",
        same_layer_as => "sameLayerAs",
        has_activation_function => "hasActivationFunction",
        has_training_strategy => "hasTrainingStrategy",
        has_training_session => "hasTrainingSession",
        next_training_session => "nextTrainingSession",
        has_training_step => "hasTrainingStep",
        next_training_step => "nextTrainingStep",
        has_task_type => "hasTaskType",
        updates_layer => "updatesLayer",
        evaluates_network => "evaluatesNetwork",
        based_on_training_strategy => "basedOnTrainingStrategy",
        has_evaluation_metric => "hasEvaluationMetric",
        evaluates_on_dataset => "evaluatesOnDataset",
        evaluates_configuration => "evaluatesConfiguration",
        pipe_layer => "pipeLayer",
        pipe_dataset => "pipeDataset",
        has_objective_function => "hasObjectiveFunction",
        has_training_optimizer => "hasTrainingOptimizer",
        trains_network => "trainsNetwork",
        has_loop_step => "hasLoopStep",
        produces_dataset => "producesDataset",
        has_data_characterization => "hasDataCharacterization",
        eval_score => "eval_score",
        eval_date => "eval_date",
        function_math => "function_math",
        loop_count => "loop_count",
        loop_condition => "loop_condition",
        is_transient => "is_transient",
    }
}

/// Standard RDF/RDFS/OWL terms used when reading ontology files.
pub mod std_vocab {
    use super::*;

    fn iri(namespace: &str, local: &str) -> Iri {
        Iri::from_parts(namespace, local).expect("static vocabulary IRI")
    }

    pub fn sub_class_of() -> Iri {
        iri(ns::RDFS, "subClassOf")
    }
    pub fn domain() -> Iri {
        iri(ns::RDFS, "domain")
    }
    pub fn range() -> Iri {
        iri(ns::RDFS, "range")
    }
    pub fn rdfs_class() -> Iri {
        iri(ns::RDFS, "Class")
    }
    pub fn owl_class() -> Iri {
        iri(ns::OWL, "Class")
    }
    pub fn owl_thing() -> Iri {
        iri(ns::OWL, "Thing")
    }
    pub fn object_property() -> Iri {
        iri(ns::OWL, "ObjectProperty")
    }
    pub fn datatype_property() -> Iri {
        iri(ns::OWL, "DatatypeProperty")
    }
    pub fn symmetric_property() -> Iri {
        iri(ns::OWL, "SymmetricProperty")
    }
    pub fn inverse_of() -> Iri {
        iri(ns::OWL, "inverseOf")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntClassDef {
    pub iri: Iri,
    pub parents: BTreeSet<Iri>,
}

impl OntClassDef {
    pub fn new(iri: Iri, parents: impl IntoIterator<Item = Iri>) -> Self {
        OntClassDef {
            iri,
            parents: parents.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyKind {
    Object,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub iri: Iri,
    pub kind: PropertyKind,
    pub inverse_of: Option<Iri>,
    pub symmetric: bool,
    pub domain_hint: Option<Iri>,
    pub range_hint: Option<Iri>,
}

impl PropertyDef {
    fn new(iri: Iri, kind: PropertyKind) -> Self {
        PropertyDef {
            iri,
            kind,
            inverse_of: None,
            symmetric: false,
            domain_hint: None,
            range_hint: None,
        }
    }
}

/// Class hierarchy and property definitions. Immutable once built; the
/// subclass closure is precomputed in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaModel {
    classes: BTreeMap<Iri, OntClassDef>,
    properties: BTreeMap<Iri, PropertyDef>,
    ancestors: BTreeMap<Iri, BTreeSet<Iri>>,
    descendants: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl SchemaModel {
    /// Builds a model, checking parent existence, inverse mutuality and
    /// acyclicity.
    pub fn new(
        classes: impl IntoIterator<Item = OntClassDef>,
        properties: impl IntoIterator<Item = PropertyDef>,
    ) -> Result<Self, SchemaError> {
        let classes: BTreeMap<Iri, OntClassDef> =
            classes.into_iter().map(|c| (c.iri.clone(), c)).collect();
        let properties: BTreeMap<Iri, PropertyDef> =
            properties.into_iter().map(|p| (p.iri.clone(), p)).collect();

        for def in classes.values() {
            if let Some(parent) = def.parents.iter().find(|p| !classes.contains_key(*p)) {
                return Err(SchemaError::UnknownParent {
                    class: def.iri.clone(),
                    parent: parent.clone(),
                });
            }
        }
        for def in properties.values() {
            check_property(def, &properties)?;
        }
        let ancestors = ancestor_closure(&classes)?;
        let mut descendants: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for (class, sups) in &ancestors {
            for sup in sups {
                descendants.entry(sup.clone()).or_default().insert(class.clone());
            }
        }
        Ok(SchemaModel {
            classes,
            properties,
            ancestors,
            descendants,
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &OntClassDef> {
        self.classes.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn class(&self, iri: &Iri) -> Option<&OntClassDef> {
        self.classes.get(iri)
    }

    pub fn property(&self, iri: &Iri) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn has_class(&self, iri: &Iri) -> bool {
        self.classes.contains_key(iri)
    }

    pub fn inverse_of(&self, property: &Iri) -> Option<&Iri> {
        self.properties.get(property)?.inverse_of.as_ref()
    }

    /// True iff `sup` is in the reflexive-transitive parent closure of `sub`.
    pub fn is_subclass(&self, sub: &Iri, sup: &Iri) -> Result<bool, SchemaError> {
        let sups = self
            .ancestors
            .get(sub)
            .ok_or_else(|| SchemaError::UnknownClass(sub.clone()))?;
        if !self.classes.contains_key(sup) {
            return Err(SchemaError::UnknownClass(sup.clone()));
        }
        Ok(sups.contains(sup))
    }

    /// Reflexive superclasses of a known class.
    pub fn superclasses(&self, class: &Iri) -> Option<&BTreeSet<Iri>> {
        self.ancestors.get(class)
    }

    /// Reflexive subclasses of a known class.
    pub fn subclasses(&self, class: &Iri) -> Option<&BTreeSet<Iri>> {
        self.descendants.get(class)
    }

    /// Asserted `rdf:type` objects of `individual` together with all their
    /// superclasses. Types unknown to the model contribute only themselves.
    pub fn inferred_types(&self, graph: &Graph, individual: &Iri) -> BTreeSet<Iri> {
        let mut types = BTreeSet::new();
        for asserted in graph.object_iris(individual, &Iri::rdf_type()) {
            match self.ancestors.get(asserted) {
                Some(sups) => types.extend(sups.iter().cloned()),
                None => {
                    types.insert(asserted.clone());
                }
            }
        }
        types
    }

    /// True if any inferred type of `individual` is `class`.
    pub fn has_type(&self, graph: &Graph, individual: &Iri, class: &Iri) -> bool {
        graph
            .object_iris(individual, &Iri::rdf_type())
            .any(|asserted| match self.ancestors.get(asserted) {
                Some(sups) => sups.contains(class),
                None => asserted == class,
            })
    }

    /// Union of this model and the ontology statements in `graph`. Existing
    /// definitions are kept as they are; only new classes, new parent edges
    /// and new properties are added.
    pub fn extend_from_graph(&self, graph: &Graph) -> Result<SchemaModel, SchemaError> {
        let mut classes = self.classes.clone();
        let mut properties = self.properties.clone();
        let rdf_type = Iri::rdf_type();
        let thing = std_vocab::owl_thing();

        let ensure_class = |classes: &mut BTreeMap<Iri, OntClassDef>, iri: &Iri| {
            classes
                .entry(iri.clone())
                .or_insert_with(|| OntClassDef::new(iri.clone(), []));
        };

        for class_kind in [std_vocab::owl_class(), std_vocab::rdfs_class()] {
            for iri in graph.subjects(&rdf_type, &Term::Iri(class_kind)) {
                if *iri != thing {
                    ensure_class(&mut classes, iri);
                }
            }
        }
        for (sub, sup) in graph.pairs(&std_vocab::sub_class_of()) {
            let Some(sup) = sup.as_iri() else { continue };
            if *sub == thing {
                continue;
            }
            ensure_class(&mut classes, sub);
            if *sup == thing {
                continue;
            }
            ensure_class(&mut classes, sup);
            classes
                .get_mut(sub)
                .expect("inserted above")
                .parents
                .insert(sup.clone());
        }

        let is_new = |iri: &Iri| !self.properties.contains_key(iri);
        for (kind_iri, kind) in [
            (std_vocab::object_property(), PropertyKind::Object),
            (std_vocab::datatype_property(), PropertyKind::Data),
        ] {
            for iri in graph.subjects(&rdf_type, &Term::Iri(kind_iri)) {
                properties
                    .entry(iri.clone())
                    .or_insert_with(|| PropertyDef::new(iri.clone(), kind));
            }
        }
        for iri in graph.subjects(&rdf_type, &Term::Iri(std_vocab::symmetric_property())) {
            if is_new(iri) {
                properties
                    .entry(iri.clone())
                    .or_insert_with(|| PropertyDef::new(iri.clone(), PropertyKind::Object))
                    .symmetric = true;
            }
        }
        for (p, q) in graph.pairs(&std_vocab::inverse_of()) {
            let Some(q) = q.as_iri() else { continue };
            if !is_new(p) || !is_new(q) {
                continue;
            }
            for (a, b) in [(p, q), (q, p)] {
                let def = properties
                    .entry(a.clone())
                    .or_insert_with(|| PropertyDef::new(a.clone(), PropertyKind::Object));
                if def.inverse_of.is_none() {
                    def.inverse_of = Some(b.clone());
                }
            }
        }
        for (hint, is_domain) in [(std_vocab::domain(), true), (std_vocab::range(), false)] {
            for (p, target) in graph.pairs(&hint) {
                let (Some(target), true) = (target.as_iri(), is_new(p)) else {
                    continue;
                };
                if let Some(def) = properties.get_mut(p) {
                    let slot = if is_domain {
                        &mut def.domain_hint
                    } else {
                        &mut def.range_hint
                    };
                    slot.get_or_insert_with(|| target.clone());
                }
            }
        }

        SchemaModel::new(classes.into_values(), properties.into_values())
    }
}

fn check_property(
    def: &PropertyDef,
    properties: &BTreeMap<Iri, PropertyDef>,
) -> Result<(), SchemaError> {
    let invalid = |reason: String| SchemaError::InvalidProperty {
        property: def.iri.clone(),
        reason,
    };
    if let Some(inverse) = &def.inverse_of {
        if def.symmetric && *inverse != def.iri {
            return Err(invalid(format!(
                "symmetric property declares distinct inverse {inverse}"
            )));
        }
        let back = properties
            .get(inverse)
            .and_then(|q| q.inverse_of.as_ref());
        if back != Some(&def.iri) {
            return Err(invalid(format!("inverse {inverse} does not point back")));
        }
    }
    Ok(())
}

/// Reflexive ancestor sets; fails with the offending path on a cycle.
fn ancestor_closure(
    classes: &BTreeMap<Iri, OntClassDef>,
) -> Result<BTreeMap<Iri, BTreeSet<Iri>>, SchemaError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit(
        class: &Iri,
        classes: &BTreeMap<Iri, OntClassDef>,
        marks: &mut BTreeMap<Iri, Mark>,
        stack: &mut Vec<Iri>,
        out: &mut BTreeMap<Iri, BTreeSet<Iri>>,
    ) -> Result<(), SchemaError> {
        match marks.get(class) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = stack.iter().position(|c| c == class).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(class.clone());
                return Err(SchemaError::Cycle(cycle));
            }
            None => {}
        }
        marks.insert(class.clone(), Mark::Active);
        stack.push(class.clone());
        let mut sups = BTreeSet::from([class.clone()]);
        for parent in &classes[class].parents {
            visit(parent, classes, marks, stack, out)?;
            sups.extend(out[parent].iter().cloned());
        }
        stack.pop();
        marks.insert(class.clone(), Mark::Done);
        out.insert(class.clone(), sups);
        Ok(())
    }

    let mut marks = BTreeMap::new();
    let mut out = BTreeMap::new();
    for class in classes.keys() {
        visit(class, classes, &mut marks, &mut Vec::new(), &mut out)?;
    }
    Ok(out)
}

/// The named subset of the ANNETT-O ontology.
pub fn builtin_schema() -> SchemaModel {
    use class::*;

    let hierarchy: Vec<(Iri, Option<Iri>)> = vec![
        (ann_configuration(), None),
        (network(), None),
        (layer(), None),
        (hidden_layer(), Some(layer())),
        (in_out_layer(), Some(layer())),
        (activation_layer(), Some(hidden_layer())),
        (aggregation_layer(), Some(hidden_layer())),
        (separation_layer(), Some(hidden_layer())),
        (modification_layer(), Some(hidden_layer())),
        (fully_connected_layer(), Some(activation_layer())),
        (concat_layer(), Some(aggregation_layer())),
        (input_layer(), Some(in_out_layer())),
        (output_layer(), Some(in_out_layer())),
        (training_strategy(), None),
        (training_session(), None),
        (training_step(), None),
        (training_loop(), Some(training_step())),
        (training_single(), Some(training_step())),
        (training_single_forward_only(), Some(training_step())),
        (training_optimizer(), None),
        (network_evaluation(), None),
        (function(), None),
        (activation_function(), Some(function())),
        (relu(), Some(activation_function())),
        (softmax(), Some(activation_function())),
        (objective_function(), Some(function())),
        (cost_function(), Some(objective_function())),
        (metric(), Some(function())),
        (accuracy(), Some(metric())),
        (dataset(), None),
        (labelset(), Some(dataset())),
        (dataset_pipe(), None),
        (trained_model(), None),
        (task_characterization(), None),
        (clustering(), Some(task_characterization())),
        (classification(), Some(task_characterization())),
        (generation(), Some(task_characterization())),
        (discrimination(), Some(task_characterization())),
        (adversarial(), Some(task_characterization())),
        (data_characterization(), None),
    ];
    let classes = hierarchy
        .into_iter()
        .map(|(iri, parent)| OntClassDef::new(iri, parent));

    let object = |iri: Iri, domain: Iri, range: Iri| PropertyDef {
        domain_hint: Some(domain),
        range_hint: Some(range),
        ..PropertyDef::new(iri, PropertyKind::Object)
    };
    let data = |iri: Iri, domain: Iri, datatype: &str| PropertyDef {
        domain_hint: Some(domain),
        range_hint: Some(Iri::from_parts(ns::XSD, datatype).expect("static IRI")),
        ..PropertyDef::new(iri, PropertyKind::Data)
    };

    let mut properties = vec![
        object(prop::has_network(), ann_configuration(), network()),
        object(prop::has_layer(), network(), layer()),
        PropertyDef {
            inverse_of: Some(prop::previous_layer()),
            ..object(prop::next_layer(), layer(), layer())
        },
        PropertyDef {
            inverse_of: Some(prop::next_layer()),
            ..object(prop::previous_layer(), layer(), layer())
        },
        PropertyDef {
            symmetric: true,
            ..object(prop::same_layer_as(), layer(), layer())
        },
        object(prop::has_activation_function(), layer(), activation_function()),
        object(prop::has_training_strategy(), ann_configuration(), training_strategy()),
        object(prop::has_training_session(), training_strategy(), training_session()),
        object(prop::next_training_session(), training_session(), training_session()),
        object(prop::has_training_step(), training_session(), training_step()),
        object(prop::next_training_step(), training_step(), training_step()),
        object(prop::has_task_type(), network(), task_characterization()),
        object(prop::updates_layer(), training_step(), layer()),
        object(prop::evaluates_network(), network_evaluation(), network()),
        object(
            prop::based_on_training_strategy(),
            network_evaluation(),
            training_strategy(),
        ),
        object(prop::has_evaluation_metric(), network_evaluation(), metric()),
        object(prop::evaluates_on_dataset(), network_evaluation(), dataset()),
        object(
            prop::evaluates_configuration(),
            network_evaluation(),
            ann_configuration(),
        ),
        object(prop::pipe_layer(), dataset_pipe(), in_out_layer()),
        object(prop::pipe_dataset(), dataset_pipe(), dataset()),
        object(prop::has_objective_function(), network(), objective_function()),
        object(prop::has_training_optimizer(), training_step(), training_optimizer()),
        object(prop::trains_network(), training_step(), network()),
        object(prop::has_loop_step(), training_loop(), training_step()),
        object(prop::produces_dataset(), training_step(), dataset()),
        object(
            prop::has_data_characterization(),
            dataset(),
            data_characterization(),
        ),
        data(prop::eval_score(), network_evaluation(), "double"),
        data(prop::eval_date(), network_evaluation(), "dateTime"),
        data(prop::function_math(), function(), "string"),
        data(prop::loop_count(), training_loop(), "integer"),
        data(prop::loop_condition(), training_loop(), "string"),
        data(prop::is_transient(), dataset(), "boolean"),
    ];
    properties.sort_by(|a, b| a.iri.cmp(&b.iri));

    SchemaModel::new(classes, properties).expect("built-in schema is well-formed")
}
