//! Reference evaluator for differential testing.
//!
//! It shares nothing with the indexed evaluator beyond the AST and filter
//! semantics: every variable assignment over the terms of the graph is
//! enumerated and checked pattern by pattern, types come from a separate
//! fixed-point closure over the schema, and `p+` from an iterated
//! relational composition.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::builder::Kb;
use crate::graph::Triple;
use crate::term::{ns, Iri, Literal, Term};

use super::ast::*;
use super::eval::finish_rows;
use super::ResultTable;

type Assignment = BTreeMap<Var, Term>;

/// Evaluates `query` by exhaustive enumeration. Exponential in the number
/// of variables; meant for graphs of a few dozen triples.
pub fn evaluate_naive(query: &Query, kb: &Kb) -> ResultTable {
    let oracle = Oracle::new(kb, query);
    let mut rows = oracle.query(query);
    finish_rows(query.distinct, &mut rows);
    ResultTable {
        vars: query.output_vars().into_iter().map(|v| v.0).collect(),
        rows,
    }
}

struct Oracle<'a> {
    kb: &'a Kb,
    domain: Vec<Term>,
    types: BTreeMap<Iri, BTreeSet<Iri>>,
    closures: BTreeMap<Iri, BTreeSet<(Term, Term)>>,
}

impl<'a> Oracle<'a> {
    fn new(kb: &'a Kb, query: &Query) -> Self {
        let graph = kb.graph();
        let mut types: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for t in graph.iter() {
            if t.predicate.is_rdf_type() {
                if let Term::Iri(class) = &t.object {
                    types
                        .entry(t.subject.clone())
                        .or_default()
                        .extend(class_closure(kb, class));
                }
            }
        }
        let mut domain: BTreeSet<Term> = BTreeSet::new();
        for t in graph.iter() {
            domain.insert(Term::Iri(t.subject));
            domain.insert(Term::Iri(t.predicate));
            domain.insert(t.object);
        }
        for classes in types.values() {
            domain.extend(classes.iter().cloned().map(Term::Iri));
        }
        let mut paths = BTreeSet::new();
        collect_paths(query, &mut paths);
        let closures = paths
            .into_iter()
            .map(|p| {
                let c = transitive_closure(kb, &p);
                (p, c)
            })
            .collect();
        Oracle {
            kb,
            domain: domain.into_iter().collect(),
            types,
            closures,
        }
    }

    fn query(&self, query: &Query) -> Vec<Vec<Term>> {
        let solutions = self.group(&query.pattern);
        let out_vars = query.output_vars();
        if !query.is_aggregate() {
            return solutions
                .iter()
                .map(|a| out_vars.iter().map(|v| a[v].clone()).collect())
                .collect();
        }
        let mut groups: Vec<(Vec<Term>, Vec<&Assignment>)> = Vec::new();
        for a in &solutions {
            let key: Vec<Term> = query.group_by.iter().map(|v| a[v].clone()).collect();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(a),
                None => groups.push((key, vec![a])),
            }
        }
        let mut out = Vec::new();
        for (key, members) in groups {
            let mut env: Assignment = query.group_by.iter().cloned().zip(key).collect();
            for item in &query.projection {
                if let SelectItem::Count {
                    arg,
                    distinct,
                    alias,
                } = item
                {
                    let mut seen: Vec<Vec<Term>> = Vec::new();
                    let mut n = 0i64;
                    for m in &members {
                        let value: Vec<Term> = match arg {
                            Some(v) => vec![m[v].clone()],
                            None => m.values().cloned().collect(),
                        };
                        if *distinct {
                            if seen.contains(&value) {
                                continue;
                            }
                            seen.push(value);
                        }
                        n += 1;
                    }
                    env.insert(alias.clone(), Term::Literal(Literal::integer(n)));
                }
            }
            let lookup = |v: &Var| env.get(v).cloned();
            if query.having.iter().all(|e| e.eval(&lookup) == Some(true)) {
                out.push(out_vars.iter().map(|v| env[v].clone()).collect());
            }
        }
        out
    }

    fn group(&self, group: &GroupPattern) -> Vec<Assignment> {
        let mut vars: Vec<Var> = Vec::new();
        for t in &group.triples {
            for v in t.vars() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let mut solutions = Vec::new();
        self.enumerate(&group.triples, &vars, &mut Assignment::new(), &mut solutions);

        for sub in &group.subselects {
            let sub_vars = sub.output_vars();
            let table = self.query(sub);
            let mut joined = Vec::new();
            for a in &solutions {
                for row in &table {
                    let compatible = sub_vars
                        .iter()
                        .zip(row)
                        .all(|(v, t)| a.get(v).is_none_or(|existing| existing == t));
                    if compatible {
                        let mut merged = a.clone();
                        merged.extend(sub_vars.iter().cloned().zip(row.iter().cloned()));
                        joined.push(merged);
                    }
                }
            }
            solutions = joined;
        }

        solutions.retain(|a| {
            let lookup = |v: &Var| a.get(v).cloned();
            group.filters.iter().all(|f| f.eval(&lookup) == Some(true))
        });
        solutions
    }

    fn enumerate(
        &self,
        patterns: &[TriplePattern],
        vars: &[Var],
        assignment: &mut Assignment,
        out: &mut Vec<Assignment>,
    ) {
        let complete = |p: &TriplePattern, a: &Assignment| p.vars().iter().all(|v| a.contains_key(*v));
        let consistent = patterns
            .iter()
            .filter(|p| complete(p, assignment))
            .all(|p| self.holds(p, assignment));
        if !consistent {
            return;
        }
        let Some(next) = vars.iter().find(|v| !assignment.contains_key(*v)) else {
            out.push(assignment.clone());
            return;
        };
        for value in &self.domain {
            assignment.insert(next.clone(), value.clone());
            self.enumerate(patterns, vars, assignment, out);
            assignment.remove(next);
        }
    }

    fn holds(&self, pattern: &TriplePattern, a: &Assignment) -> bool {
        let term = |t: &PatternTerm| match t {
            PatternTerm::Var(v) => a[v].clone(),
            PatternTerm::Const(t) => t.clone(),
        };
        let (s, o) = (term(&pattern.subject), term(&pattern.object));
        match &pattern.predicate {
            Predicate::Iri(p) if p.is_rdf_type() => match (s.as_iri(), o.as_iri()) {
                (Some(s), Some(o)) => self.types.get(s).is_some_and(|t| t.contains(o)),
                _ => false,
            },
            Predicate::Path(p) => self.closures[p].contains(&(s, o)),
            predicate => {
                let p = match predicate {
                    Predicate::Iri(p) => Term::Iri(p.clone()),
                    Predicate::Var(v) => a[v].clone(),
                    Predicate::Path(_) => unreachable!(),
                };
                match (s, p) {
                    (Term::Iri(s), Term::Iri(p)) => self.kb.graph().contains(&Triple::new(s, p, o)),
                    _ => false,
                }
            }
        }
    }
}

/// Reflexive superclasses by iterating the parent relation to a fixed point.
fn class_closure(kb: &Kb, class: &Iri) -> BTreeSet<Iri> {
    let mut set = BTreeSet::from([class.clone()]);
    loop {
        let mut grown = set.clone();
        for c in &set {
            if let Some(def) = kb.schema().class(c) {
                grown.extend(def.parents.iter().cloned());
            }
        }
        if grown.len() == set.len() {
            return set;
        }
        set = grown;
    }
}

/// All `(x, y)` joined by one or more `p` edges, by repeated composition.
fn transitive_closure(kb: &Kb, p: &Iri) -> BTreeSet<(Term, Term)> {
    let edges: BTreeSet<(Term, Term)> = kb
        .graph()
        .iter()
        .filter(|t| t.predicate == *p)
        .map(|t| (Term::Iri(t.subject), t.object))
        .collect();
    let mut closure = edges.clone();
    loop {
        let mut grown = closure.clone();
        for (a, b) in &closure {
            for (c, d) in &edges {
                if b == c {
                    grown.insert((a.clone(), d.clone()));
                }
            }
        }
        if grown.len() == closure.len() {
            return closure;
        }
        closure = grown;
    }
}

fn collect_paths(query: &Query, out: &mut BTreeSet<Iri>) {
    for t in &query.pattern.triples {
        if let Predicate::Path(p) = &t.predicate {
            out.insert(p.clone());
        }
    }
    for sub in &query.pattern.subselects {
        collect_paths(sub, out);
    }
}

/// A small random graph and a random valid query over its vocabulary, for
/// differential testing of [`evaluate`](super::evaluate) against
/// [`evaluate_naive`].
pub fn random_case(rng: &mut impl Rng) -> (Kb, Query) {
    let gen = CaseGen::new();
    let mut kb = Kb::new();
    let n_triples = rng.gen_range(0..=40).max(rng.gen_range(0..=40));
    for _ in 0..n_triples {
        let s = gen.node(rng);
        let roll = rng.gen_range(0..100);
        let triple = if roll < 70 {
            Triple::new(s, gen.predicate(rng), gen.node(rng))
        } else if roll < 80 {
            Triple::new(s, gen.predicate(rng), gen.literal(rng))
        } else {
            Triple::new(s, Iri::rdf_type(), gen.class(rng))
        };
        kb.graph_mut().insert(triple);
    }
    let query = loop {
        if let Some(q) = gen.query(rng, true) {
            break q;
        }
    };
    (kb, query)
}

struct CaseGen {
    nodes: Vec<Iri>,
    predicates: Vec<Iri>,
    classes: Vec<Iri>,
    literals: Vec<Literal>,
}

impl CaseGen {
    fn new() -> Self {
        let iri = |local: &str| Iri::from_parts(ns::ANNETTO, local).unwrap();
        CaseGen {
            nodes: (0..5).map(|i| iri(&format!("n{i}"))).collect(),
            predicates: (0..3).map(|i| iri(&format!("p{i}"))).collect(),
            classes: [
                "Layer",
                "HiddenLayer",
                "ActivationLayer",
                "FullyConnectedLayer",
                "AggregationLayer",
                "ConcatLayer",
                "Network",
            ]
            .iter()
            .map(|c| iri(c))
            .collect(),
            literals: vec![
                Literal::integer(0),
                Literal::integer(2),
                Literal::double(0.5).unwrap(),
                Literal::double(2.0).unwrap(),
                Literal::string("a"),
                Literal::boolean(true),
            ],
        }
    }

    fn node(&self, rng: &mut impl Rng) -> Iri {
        self.nodes.choose(rng).unwrap().clone()
    }

    fn predicate(&self, rng: &mut impl Rng) -> Iri {
        self.predicates.choose(rng).unwrap().clone()
    }

    fn class(&self, rng: &mut impl Rng) -> Iri {
        self.classes.choose(rng).unwrap().clone()
    }

    fn literal(&self, rng: &mut impl Rng) -> Literal {
        self.literals.choose(rng).unwrap().clone()
    }

    fn var(&self, rng: &mut impl Rng, prefix: &str) -> Var {
        Var(format!("{prefix}{}", rng.gen_range(0..3)))
    }

    fn constant(&self, rng: &mut impl Rng) -> Term {
        if rng.gen_bool(0.7) {
            Term::Iri(self.node(rng))
        } else {
            Term::Literal(self.literal(rng))
        }
    }

    fn pattern(&self, rng: &mut impl Rng, prefix: &str) -> TriplePattern {
        let subject = if rng.gen_bool(0.9) {
            PatternTerm::Var(self.var(rng, prefix))
        } else {
            PatternTerm::Const(Term::Iri(self.node(rng)))
        };
        let roll = rng.gen_range(0..100);
        let (predicate, typed) = if roll < 55 {
            (Predicate::Iri(self.predicate(rng)), false)
        } else if roll < 75 {
            (Predicate::Iri(Iri::rdf_type()), true)
        } else if roll < 90 {
            (Predicate::Path(self.predicate(rng)), false)
        } else {
            (Predicate::Var(Var(format!("{prefix}p"))), false)
        };
        let object = if rng.gen_bool(0.75) {
            let mut v = self.var(rng, prefix);
            if PatternTerm::Var(v.clone()) == subject && rng.gen_bool(0.8) {
                v = self.var(rng, prefix);
            }
            PatternTerm::Var(v)
        } else if typed {
            PatternTerm::Const(Term::Iri(self.class(rng)))
        } else {
            PatternTerm::Const(self.constant(rng))
        };
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    fn comparison(&self, rng: &mut impl Rng, vars: &[Var]) -> Expr {
        let a = Operand::Var(vars.choose(rng).unwrap().clone());
        if rng.gen_bool(0.5) {
            let op = *[CompareOp::Eq, CompareOp::Ne].choose(rng).unwrap();
            let b = if rng.gen_bool(0.5) {
                Operand::Var(vars.choose(rng).unwrap().clone())
            } else {
                Operand::Const(self.constant(rng))
            };
            Expr::Compare(op, a, b)
        } else {
            let ops = [CompareOp::Lt, CompareOp::Gt, CompareOp::Le, CompareOp::Ge];
            let b = Operand::Const(Term::Literal(self.literal(rng)));
            Expr::Compare(*ops.choose(rng).unwrap(), a, b)
        }
    }

    fn filter(&self, rng: &mut impl Rng, vars: &[Var]) -> Expr {
        let first = self.comparison(rng, vars);
        match rng.gen_range(0..5) {
            0 => Expr::And(Box::new(first), Box::new(self.comparison(rng, vars))),
            1 => Expr::Or(Box::new(first), Box::new(self.comparison(rng, vars))),
            2 => Expr::Not(Box::new(first)),
            _ => first,
        }
    }

    /// A query, or `None` when the random choices violate scoping rules.
    fn query(&self, rng: &mut impl Rng, outer: bool) -> Option<Query> {
        let prefix = if outer { "v" } else { "w" };
        let max_patterns = if outer { 4 } else { 2 };
        let n = rng.gen_range(1..=max_patterns);
        let mut pattern = GroupPattern {
            triples: (0..n).map(|_| self.pattern(rng, prefix)).collect(),
            ..GroupPattern::default()
        };
        if outer && rng.gen_bool(0.15) {
            let mut sub = self.query(rng, false)?;
            // Rename one subselect column onto an outer variable so the
            // join has something to match on.
            let outer_vars = pattern.in_scope_vars();
            if let (Some(target), Some(SelectItem::Var(first))) =
                (outer_vars.choose(rng), sub.projection.first().cloned())
            {
                if !outer_vars.contains(&first) {
                    rename(&mut sub, &first, target);
                }
            }
            pattern.subselects.push(sub);
        }
        let in_scope = pattern.in_scope_vars();
        if in_scope.is_empty() {
            return None;
        }
        if rng.gen_bool(0.4) {
            pattern.filters.push(self.filter(rng, &in_scope));
        }

        let mut query = Query {
            distinct: rng.gen_bool(0.4),
            projection: Vec::new(),
            pattern,
            group_by: Vec::new(),
            having: Vec::new(),
        };
        if rng.gen_bool(if outer { 0.25 } else { 0.5 }) {
            let key = in_scope.choose(rng).unwrap().clone();
            let arg = if rng.gen_bool(0.2) {
                None
            } else {
                Some(in_scope.choose(rng).unwrap().clone())
            };
            let alias = Var(format!("{prefix}count"));
            query.projection = vec![
                SelectItem::Var(key.clone()),
                SelectItem::Count {
                    arg,
                    distinct: rng.gen_bool(0.3),
                    alias: alias.clone(),
                },
            ];
            query.group_by = vec![key];
            if rng.gen_bool(0.5) {
                let k = Literal::integer(rng.gen_range(0..3));
                query.having = vec![Expr::Compare(CompareOp::Gt, Operand::Var(alias), k.into())];
            }
        } else {
            let k = rng.gen_range(1..=in_scope.len());
            let mut chosen: Vec<Var> = in_scope.choose_multiple(rng, k).cloned().collect();
            chosen.sort_by_key(|v| in_scope.iter().position(|x| x == v));
            query.projection = chosen.into_iter().map(SelectItem::Var).collect();
        }
        Some(query)
    }
}

fn rename(query: &mut Query, from: &Var, to: &Var) {
    let swap = |v: &mut Var| {
        if v == from {
            *v = to.clone();
        }
    };
    for t in &mut query.pattern.triples {
        if let PatternTerm::Var(v) = &mut t.subject {
            swap(v);
        }
        if let Predicate::Var(v) = &mut t.predicate {
            swap(v);
        }
        if let PatternTerm::Var(v) = &mut t.object {
            swap(v);
        }
    }
    for item in &mut query.projection {
        match item {
            SelectItem::Var(v) => swap(v),
            SelectItem::Count { arg: Some(v), .. } => swap(v),
            SelectItem::Count { .. } => {}
        }
    }
    for v in &mut query.group_by {
        swap(v);
    }
    for f in &mut query.pattern.filters {
        rename_expr(f, &swap);
    }
}

fn rename_expr(e: &mut Expr, swap: &impl Fn(&mut Var)) {
    match e {
        Expr::Compare(_, a, b) => {
            for o in [a, b] {
                if let Operand::Var(v) = o {
                    swap(v);
                }
            }
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            rename_expr(a, swap);
            rename_expr(b, swap);
        }
        Expr::Not(e) => rename_expr(e, swap),
    }
}
