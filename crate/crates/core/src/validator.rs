//! Constraint checking over a knowledge base.
//!
//! Each rule is checked independently over inferred types, so one defect
//! may show up under several rules. Violations are sorted by rule, subject
//! and message.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::builder::Kb;
use crate::graph::Graph;
use crate::schema::{class, prop};
use crate::term::{Datatype, Iri, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
}

impl RuleId {
    pub const ALL: [RuleId; 15] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
        RuleId::R13,
        RuleId::R14,
        RuleId::R15,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::R5 => "R5",
            RuleId::R6 => "R6",
            RuleId::R7 => "R7",
            RuleId::R8 => "R8",
            RuleId::R9 => "R9",
            RuleId::R10 => "R10",
            RuleId::R11 => "R11",
            RuleId::R12 => "R12",
            RuleId::R13 => "R13",
            RuleId::R14 => "R14",
            RuleId::R15 => "R15",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RuleId::R1 => "Network belongs to at least one ANNConfiguration",
            RuleId::R2 => "Network has exactly one objective function",
            RuleId::R3 => "Layer belongs to exactly one Network",
            RuleId::R4 => "at most one next layer (except SeparationLayer) and one previous layer (except AggregationLayer)",
            RuleId::R5 => "InputLayer has no previous layer; OutputLayer has no next layer",
            RuleId::R6 => "nextLayer and previousLayer mirror each other",
            RuleId::R7 => "sameLayerAs is symmetric and never within one network",
            RuleId::R8 => "nextLayer endpoints belong to the same network",
            RuleId::R9 => "TrainingStrategy has at least one TrainingSession",
            RuleId::R10 => "TrainingSession has at least one TrainingStep",
            RuleId::R11 => "session chains are linear and acyclic",
            RuleId::R12 => "step chains are linear and acyclic; loops are bounded",
            RuleId::R13 => "NetworkEvaluation has a network, a double eval_score and a metric",
            RuleId::R14 => "DatasetPipe connects an InOutLayer and a Dataset",
            RuleId::R15 => "ActivationLayer has an ActivationFunction",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub rule: RuleId,
    pub subject: Iri,
    pub message: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    /// Error-severity breaches. Empty iff the KB is valid.
    pub violations: Vec<Violation>,
    /// Advisory findings that do not make the KB invalid.
    pub warnings: Vec<Violation>,
    pub checked_rules: Vec<RuleId>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn rules_violated(&self) -> BTreeSet<RuleId> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    /// `RULE\tSUBJECT\tMESSAGE` lines, one per violation.
    pub fn to_text(&self, render: impl Fn(&Iri) -> String) -> String {
        self.violations
            .iter()
            .map(|v| format!("{}\t{}\t{}\n", v.rule, render(&v.subject), v.message))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Also reject nextLayer cycles inside a network.
    pub strict_feedforward: bool,
}

pub fn validate(kb: &Kb) -> ValidationReport {
    validate_with(kb, ValidateOptions::default())
}

pub fn validate_with(kb: &Kb, options: ValidateOptions) -> ValidationReport {
    let mut ctx = Checker::new(kb);
    ctx.r1_network_in_configuration();
    ctx.r2_single_objective();
    ctx.r3_layer_in_one_network();
    ctx.r4_fan_out_fan_in();
    if options.strict_feedforward {
        ctx.r4_feedforward();
    }
    ctx.r5_input_output_ends();
    ctx.r6_mirrored_links();
    ctx.r7_same_layer();
    ctx.r8_same_network_links();
    ctx.r9_strategy_sessions();
    ctx.r10_session_steps();
    ctx.r11_session_chain();
    ctx.r12_step_chain();
    ctx.r13_evaluations();
    ctx.r14_pipes();
    ctx.r15_activation();
    ctx.finish()
}

struct Checker<'a> {
    graph: &'a Graph,
    types: BTreeMap<Iri, BTreeSet<Iri>>,
    found: BTreeSet<Violation>,
}

impl<'a> Checker<'a> {
    fn new(kb: &'a Kb) -> Self {
        let graph = kb.graph();
        let rdf_type = Iri::rdf_type();
        let typed: BTreeSet<&Iri> = graph.pairs(&rdf_type).map(|(s, _)| s).collect();
        let types = typed
            .into_iter()
            .map(|s| (s.clone(), kb.schema().inferred_types(graph, s)))
            .collect();
        Checker {
            graph,
            types,
            found: BTreeSet::new(),
        }
    }

    fn finish(self) -> ValidationReport {
        let (violations, warnings) = self
            .found
            .into_iter()
            .partition(|v| v.severity == Severity::Error);
        ValidationReport {
            violations,
            warnings,
            checked_rules: RuleId::ALL.to_vec(),
        }
    }

    fn report(&mut self, rule: RuleId, subject: &Iri, message: String) {
        self.found.insert(Violation {
            rule,
            subject: subject.clone(),
            message,
            severity: Severity::Error,
        });
    }

    fn warn(&mut self, rule: RuleId, subject: &Iri, message: String) {
        self.found.insert(Violation {
            rule,
            subject: subject.clone(),
            message,
            severity: Severity::Warning,
        });
    }

    fn is_a(&self, individual: &Iri, class: &Iri) -> bool {
        self.types
            .get(individual)
            .is_some_and(|types| types.contains(class))
    }

    fn term_is_a(&self, term: &Term, class: &Iri) -> bool {
        term.as_iri().is_some_and(|iri| self.is_a(iri, class))
    }

    fn instances(&self, class: &Iri) -> Vec<Iri> {
        self.types
            .iter()
            .filter(|(_, types)| types.contains(class))
            .map(|(iri, _)| iri.clone())
            .collect()
    }

    fn objects(&self, subject: &Iri, predicate: &Iri) -> Vec<Term> {
        self.graph.objects(subject, predicate).cloned().collect()
    }

    fn subjects(&self, predicate: &Iri, object: &Iri) -> Vec<Iri> {
        self.graph
            .subjects(predicate, &Term::Iri(object.clone()))
            .cloned()
            .collect()
    }

    fn networks_of(&self, layer: &Iri) -> BTreeSet<Iri> {
        self.subjects(&prop::has_layer(), layer).into_iter().collect()
    }

    fn r1_network_in_configuration(&mut self) {
        let config = class::ann_configuration();
        for network in self.instances(&class::network()) {
            let owned = self
                .subjects(&prop::has_network(), &network)
                .iter()
                .any(|c| self.is_a(c, &config));
            if !owned {
                self.report(
                    RuleId::R1,
                    &network,
                    "network is not part of any ANNConfiguration".to_owned(),
                );
            }
        }
    }

    fn r2_single_objective(&mut self) {
        let objective = class::objective_function();
        let forward_only = class::training_single_forward_only();
        for network in self.instances(&class::network()) {
            let objectives = self.objects(&network, &prop::has_objective_function());
            let trained = self
                .subjects(&prop::trains_network(), &network)
                .iter()
                .any(|step| !self.is_a(step, &forward_only));
            match objectives.len() {
                0 if trained => self.report(
                    RuleId::R2,
                    &network,
                    "trained network has no objective function".to_owned(),
                ),
                0 => self.warn(
                    RuleId::R2,
                    &network,
                    "network has no objective function".to_owned(),
                ),
                1 => {
                    if !self.term_is_a(&objectives[0], &objective) {
                        self.report(
                            RuleId::R2,
                            &network,
                            format!("objective {} is not an ObjectiveFunction", objectives[0]),
                        );
                    }
                }
                n => self.report(
                    RuleId::R2,
                    &network,
                    format!("network has {n} objective functions"),
                ),
            }
        }
    }

    fn r3_layer_in_one_network(&mut self) {
        let network_class = class::network();
        for layer in self.instances(&class::layer()) {
            let owners = self.networks_of(&layer);
            match owners.len() {
                1 => {
                    let owner = owners.first().unwrap();
                    if !self.is_a(owner, &network_class) {
                        self.report(
                            RuleId::R3,
                            &layer,
                            format!("owner {owner} is not a Network"),
                        );
                    }
                }
                0 => self.report(RuleId::R3, &layer, "layer belongs to no network".to_owned()),
                n => self.report(RuleId::R3, &layer, format!("layer belongs to {n} networks")),
            }
        }
    }

    fn r4_fan_out_fan_in(&mut self) {
        let separation = class::separation_layer();
        let aggregation = class::aggregation_layer();
        for layer in self.instances(&class::layer()) {
            let next = self.objects(&layer, &prop::next_layer()).len();
            if next > 1 && !self.is_a(&layer, &separation) {
                self.report(
                    RuleId::R4,
                    &layer,
                    format!("{next} next layers but not a SeparationLayer"),
                );
            }
            let previous = self.objects(&layer, &prop::previous_layer()).len();
            if previous > 1 && !self.is_a(&layer, &aggregation) {
                self.report(
                    RuleId::R4,
                    &layer,
                    format!("{previous} previous layers but not an AggregationLayer"),
                );
            }
        }
    }

    fn r4_feedforward(&mut self) {
        for network in self.instances(&class::network()) {
            let layers: BTreeSet<Iri> = self
                .objects(&network, &prop::has_layer())
                .into_iter()
                .filter_map(|t| t.as_iri().cloned())
                .collect();
            let edges: Vec<(Iri, Iri)> = layers
                .iter()
                .flat_map(|l| {
                    self.objects(l, &prop::next_layer())
                        .into_iter()
                        .filter_map(|t| t.as_iri().cloned())
                        .filter(|n| layers.contains(n))
                        .map(move |n| (l.clone(), n))
                })
                .collect();
            if let Some(cycle) = find_cycle(&edges) {
                self.report(
                    RuleId::R4,
                    &network,
                    format!("nextLayer cycle through {}", join_iris(&cycle)),
                );
            }
        }
    }

    fn r5_input_output_ends(&mut self) {
        for layer in self.instances(&class::input_layer()) {
            if !self.objects(&layer, &prop::previous_layer()).is_empty() {
                self.report(RuleId::R5, &layer, "input layer has a previous layer".to_owned());
            }
        }
        for layer in self.instances(&class::output_layer()) {
            if !self.objects(&layer, &prop::next_layer()).is_empty() {
                self.report(RuleId::R5, &layer, "output layer has a next layer".to_owned());
            }
        }
    }

    fn r6_mirrored_links(&mut self) {
        let (next, previous) = (prop::next_layer(), prop::previous_layer());
        for (property, inverse) in [(&next, &previous), (&previous, &next)] {
            let pairs: Vec<(Iri, Term)> = self
                .graph
                .pairs(property)
                .map(|(s, o)| (s.clone(), o.clone()))
                .collect();
            for (subject, object) in pairs {
                let mirrored = object.as_iri().is_some_and(|o| {
                    self.graph
                        .object_iris(o, inverse)
                        .any(|back| *back == subject)
                });
                if !mirrored {
                    let local = local_name(property);
                    let local_inv = local_name(inverse);
                    self.report(
                        RuleId::R6,
                        &subject,
                        format!("{local} {object} has no mirrored {local_inv}"),
                    );
                }
            }
        }
    }

    fn r7_same_layer(&mut self) {
        let same = prop::same_layer_as();
        let pairs: Vec<(Iri, Term)> = self
            .graph
            .pairs(&same)
            .map(|(s, o)| (s.clone(), o.clone()))
            .collect();
        for (a, b) in pairs {
            let Some(b) = b.as_iri() else {
                self.report(RuleId::R7, &a, format!("sameLayerAs targets literal {b}"));
                continue;
            };
            if !self.graph.object_iris(b, &same).any(|back| *back == a) {
                self.report(
                    RuleId::R7,
                    &a,
                    format!("sameLayerAs {b} is not mirrored"),
                );
            }
            if a == *b || !self.networks_of(&a).is_disjoint(&self.networks_of(b)) {
                self.report(
                    RuleId::R7,
                    &a,
                    format!("sameLayerAs {b} within one network"),
                );
            }
        }
    }

    fn r8_same_network_links(&mut self) {
        let pairs: Vec<(Iri, Iri)> = self
            .graph
            .pairs(&prop::next_layer())
            .filter_map(|(s, o)| Some((s.clone(), o.as_iri()?.clone())))
            .collect();
        for (a, b) in pairs {
            let (na, nb) = (self.networks_of(&a), self.networks_of(&b));
            if !na.is_empty() && !nb.is_empty() && na.is_disjoint(&nb) {
                self.report(
                    RuleId::R8,
                    &a,
                    format!("nextLayer {b} belongs to a different network"),
                );
            }
        }
    }

    fn r9_strategy_sessions(&mut self) {
        for strategy in self.instances(&class::training_strategy()) {
            if self.objects(&strategy, &prop::has_training_session()).is_empty() {
                self.report(
                    RuleId::R9,
                    &strategy,
                    "strategy has no training session".to_owned(),
                );
            }
        }
    }

    fn r10_session_steps(&mut self) {
        for session in self.instances(&class::training_session()) {
            if self.objects(&session, &prop::has_training_step()).is_empty() {
                self.report(RuleId::R10, &session, "session has no training step".to_owned());
            }
        }
        let training_loop = class::training_loop();
        for step in self.instances(&class::training_step()) {
            if !self.is_a(&step, &training_loop)
                && self.objects(&step, &prop::trains_network()).is_empty()
            {
                self.warn(RuleId::R10, &step, "step names no network".to_owned());
            }
        }
    }

    fn chain_degrees(&mut self, rule: RuleId, predicate: &Iri, members: &[Iri], what: &str) {
        for member in members {
            let out = self.objects(member, predicate).len();
            if out > 1 {
                self.report(rule, member, format!("{what} has {out} successors"));
            }
            let incoming = self.subjects(predicate, member).len();
            if incoming > 1 {
                self.report(rule, member, format!("{what} has {incoming} predecessors"));
            }
        }
        let edges: Vec<(Iri, Iri)> = self
            .graph
            .pairs(predicate)
            .filter_map(|(s, o)| Some((s.clone(), o.as_iri()?.clone())))
            .collect();
        let mut remaining = edges;
        while let Some(cycle) = find_cycle(&remaining) {
            let subject = cycle.iter().min().unwrap().clone();
            self.report(rule, &subject, format!("{what} chain cycle through {}", join_iris(&cycle)));
            remaining.retain(|(s, _)| !cycle.contains(s));
        }
    }

    fn r11_session_chain(&mut self) {
        let sessions = self.instances(&class::training_session());
        self.chain_degrees(RuleId::R11, &prop::next_training_session(), &sessions, "session");
    }

    fn r12_step_chain(&mut self) {
        let steps = self.instances(&class::training_step());
        let next = prop::next_training_step();
        self.chain_degrees(RuleId::R12, &next, &steps, "step");

        let has_step = prop::has_training_step();
        let pairs: Vec<(Iri, Iri)> = self
            .graph
            .pairs(&next)
            .filter_map(|(s, o)| Some((s.clone(), o.as_iri()?.clone())))
            .collect();
        for (a, b) in pairs {
            let sa: BTreeSet<Iri> = self.subjects(&has_step, &a).into_iter().collect();
            let sb: BTreeSet<Iri> = self.subjects(&has_step, &b).into_iter().collect();
            if !sa.is_empty() && !sb.is_empty() && sa.is_disjoint(&sb) {
                self.report(
                    RuleId::R12,
                    &a,
                    format!("nextTrainingStep {b} belongs to another session"),
                );
            }
        }

        for lp in self.instances(&class::training_loop()) {
            let counts = self.objects(&lp, &prop::loop_count());
            let conditions = self.objects(&lp, &prop::loop_condition());
            for count in &counts {
                let valid = count
                    .as_literal()
                    .and_then(|l| l.as_i64())
                    .is_some_and(|n| n >= 1);
                if !valid {
                    self.report(
                        RuleId::R12,
                        &lp,
                        format!("loop_count {count} is not a positive integer"),
                    );
                }
            }
            if counts.is_empty() && conditions.is_empty() {
                self.report(
                    RuleId::R12,
                    &lp,
                    "loop has neither loop_count nor loop_condition".to_owned(),
                );
            }
            if self.objects(&lp, &prop::has_loop_step()).is_empty() {
                self.report(RuleId::R12, &lp, "loop contains no steps".to_owned());
            }
        }
    }

    fn r13_evaluations(&mut self) {
        let (network, metric) = (class::network(), class::metric());
        for evaluation in self.instances(&class::network_evaluation()) {
            let networks = self.objects(&evaluation, &prop::evaluates_network());
            if !networks.iter().any(|n| self.term_is_a(n, &network)) {
                self.report(
                    RuleId::R13,
                    &evaluation,
                    "evaluation names no Network".to_owned(),
                );
            }
            let scores = self.objects(&evaluation, &prop::eval_score());
            if scores.is_empty() {
                self.report(RuleId::R13, &evaluation, "evaluation has no eval_score".to_owned());
            }
            for score in &scores {
                let is_double = score
                    .as_literal()
                    .is_some_and(|l| l.datatype() == Datatype::Double);
                if !is_double {
                    self.report(
                        RuleId::R13,
                        &evaluation,
                        format!("eval_score {score} is not a double"),
                    );
                }
            }
            let metrics = self.objects(&evaluation, &prop::has_evaluation_metric());
            if !metrics.iter().any(|m| self.term_is_a(m, &metric)) {
                self.report(RuleId::R13, &evaluation, "evaluation names no Metric".to_owned());
            }
        }
    }

    fn r14_pipes(&mut self) {
        let ends = [
            (prop::pipe_layer(), class::in_out_layer(), "InOutLayer"),
            (prop::pipe_dataset(), class::dataset(), "Dataset"),
        ];
        for pipe in self.instances(&class::dataset_pipe()) {
            for (predicate, expected, label) in &ends {
                let targets = self.objects(&pipe, predicate);
                if targets.len() != 1 {
                    self.report(
                        RuleId::R14,
                        &pipe,
                        format!("pipe has {} {label} ends, expected 1", targets.len()),
                    );
                } else if !self.term_is_a(&targets[0], expected) {
                    self.report(
                        RuleId::R14,
                        &pipe,
                        format!("pipe end {} is not a {label}", targets[0]),
                    );
                }
            }
        }
    }

    fn r15_activation(&mut self) {
        let function = class::activation_function();
        for layer in self.instances(&class::activation_layer()) {
            let ok = self
                .objects(&layer, &prop::has_activation_function())
                .iter()
                .any(|f| self.term_is_a(f, &function));
            if !ok {
                self.report(
                    RuleId::R15,
                    &layer,
                    "activation layer has no ActivationFunction".to_owned(),
                );
            }
        }
    }
}

fn local_name(iri: &Iri) -> &str {
    let text = iri.as_str();
    text.rsplit(['/', '#']).next().unwrap_or(text)
}

fn join_iris(iris: &[Iri]) -> String {
    iris.iter().map(Iri::to_string).collect::<Vec<_>>().join(" -> ")
}

/// Some cycle in a directed edge list, as the list of nodes on it.
fn find_cycle(edges: &[(Iri, Iri)]) -> Option<Vec<Iri>> {
    let mut adjacency: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for (a, b) in edges {
        adjacency.entry(a).or_default().push(b);
    }
    let mut done: BTreeSet<&Iri> = BTreeSet::new();
    for &start in adjacency.keys() {
        if done.contains(start) {
            continue;
        }
        // Iterative DFS keeping the active path.
        let mut path: Vec<&Iri> = vec![start];
        let mut cursors: Vec<usize> = vec![0];
        let mut on_path: BTreeSet<&Iri> = BTreeSet::from([start]);
        while let Some(&node) = path.last() {
            let idx = cursors.last_mut().unwrap();
            let succ = adjacency.get(node).and_then(|s| s.get(*idx)).copied();
            *idx += 1;
            match succ {
                Some(next) if on_path.contains(next) => {
                    let from = path.iter().position(|n| *n == next).unwrap();
                    return Some(path[from..].iter().map(|&n| n.clone()).collect());
                }
                Some(next) if !done.contains(next) => {
                    path.push(next);
                    cursors.push(0);
                    on_path.insert(next);
                }
                Some(_) => {}
                None => {
                    done.insert(node);
                    on_path.remove(node);
                    path.pop();
                    cursors.pop();
                }
            }
        }
    }
    None
}
