use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::builder::Kb;
use crate::graph::Graph;
use crate::term::{Iri, Literal, Term};

use super::ast::*;
use super::ResultTable;

/// Evaluates `query` over the knowledge base.
pub fn evaluate(query: &Query, kb: &Kb) -> ResultTable {
    let ctx = Context::new(kb);
    let (vars, mut rows) = ctx.query(query);
    finish_rows(query.distinct, &mut rows);
    ResultTable {
        vars: vars.into_iter().map(|v| v.0).collect(),
        rows,
    }
}

pub(super) fn finish_rows(distinct: bool, rows: &mut Vec<Vec<Term>>) {
    rows.sort();
    if distinct {
        rows.dedup();
    }
}

/// Entailed types of every typed individual, indexed both ways.
struct TypeIndex {
    by_individual: BTreeMap<Iri, BTreeSet<Iri>>,
    by_class: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl TypeIndex {
    fn new(kb: &Kb) -> Self {
        let graph = kb.graph();
        let individuals: BTreeSet<&Iri> = graph
            .pairs(&Iri::rdf_type())
            .filter(|(_, o)| o.as_iri().is_some())
            .map(|(s, _)| s)
            .collect();
        let mut by_individual = BTreeMap::new();
        let mut by_class: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for individual in individuals {
            let types = kb.schema().inferred_types(graph, individual);
            for t in &types {
                by_class
                    .entry(t.clone())
                    .or_default()
                    .insert(individual.clone());
            }
            by_individual.insert(individual.clone(), types);
        }
        TypeIndex {
            by_individual,
            by_class,
        }
    }
}

struct Context<'a> {
    graph: &'a Graph,
    types: TypeIndex,
}

type Row = Vec<Option<Term>>;

/// Variable-to-slot assignment for one group pattern.
struct Slots {
    vars: Vec<Var>,
}

impl Slots {
    fn of(&self, var: &Var) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }
}

/// Binds `slot` to `term` in `row`, or checks agreement when already bound.
fn bind(row: &mut Row, slot: usize, term: Term) -> bool {
    match &row[slot] {
        Some(existing) => *existing == term,
        None => {
            row[slot] = Some(term);
            true
        }
    }
}

enum Resolved<T> {
    Bound(T),
    Free(usize),
}

impl<'a> Context<'a> {
    fn new(kb: &'a Kb) -> Self {
        Context {
            graph: kb.graph(),
            types: TypeIndex::new(kb),
        }
    }

    fn query(&self, query: &Query) -> (Vec<Var>, Vec<Vec<Term>>) {
        let (slots, rows) = self.group(&query.pattern);
        let out_vars = query.output_vars();
        if !query.is_aggregate() {
            let idx: Vec<Option<usize>> = out_vars.iter().map(|v| slots.of(v)).collect();
            let projected = rows
                .into_iter()
                .filter_map(|row| idx.iter().map(|i| row[(*i)?].clone()).collect())
                .collect();
            return (out_vars, projected);
        }

        let key_idx: Vec<usize> = query
            .group_by
            .iter()
            .filter_map(|v| slots.of(v))
            .collect();
        let mut groups: BTreeMap<Vec<Option<Term>>, Vec<Row>> = BTreeMap::new();
        for row in rows {
            let key = key_idx.iter().map(|&i| row[i].clone()).collect();
            groups.entry(key).or_default().push(row);
        }

        let mut out = Vec::new();
        for (key, members) in groups {
            let mut env: HashMap<&Var, Term> = HashMap::new();
            for (v, value) in query.group_by.iter().zip(&key) {
                if let Some(value) = value {
                    env.insert(v, value.clone());
                }
            }
            for item in &query.projection {
                if let SelectItem::Count {
                    arg,
                    distinct,
                    alias,
                } = item
                {
                    let n = count(&members, arg.as_ref().and_then(|a| slots.of(a)), arg.is_some(), *distinct);
                    env.insert(alias, Term::Literal(Literal::integer(n as i64)));
                }
            }
            let lookup = |v: &Var| env.get(v).cloned();
            if query.having.iter().all(|e| e.eval(&lookup) == Some(true)) {
                let row: Option<Vec<Term>> = out_vars.iter().map(|v| env.get(v).cloned()).collect();
                out.extend(row);
            }
        }
        (out_vars, out)
    }

    fn group(&self, group: &GroupPattern) -> (Slots, Vec<Row>) {
        let mut vars = group.in_scope_vars();
        for f in &group.filters {
            for v in f.vars() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        let slots = Slots { vars };
        let width = slots.vars.len();
        let mut rows: Vec<Row> = vec![vec![None; width]];
        let mut bound: BTreeSet<usize> = BTreeSet::new();
        let mut pending: Vec<&TriplePattern> = group.triples.iter().collect();
        let mut filters: Vec<&Expr> = group.filters.iter().collect();

        while !pending.is_empty() && !rows.is_empty() {
            let best = (0..pending.len())
                .max_by_key(|&i| (self.selectivity(pending[i], &slots, &bound), usize::MAX - i))
                .unwrap();
            let pattern = pending.remove(best);
            rows = self.extend(rows, pattern, &slots);
            for v in pattern.vars() {
                bound.insert(slots.of(v).unwrap());
            }
            filters.retain(|f| {
                let ready = f
                    .vars()
                    .iter()
                    .all(|v| bound.contains(&slots.of(v).unwrap()));
                if ready {
                    apply_filter(&mut rows, f, &slots);
                }
                !ready
            });
        }

        for sub in &group.subselects {
            if rows.is_empty() {
                break;
            }
            let (sub_vars, sub_rows) = self.query(sub);
            rows = natural_join(rows, &slots, &bound, &sub_vars, sub_rows);
            for v in &sub_vars {
                bound.insert(slots.of(v).unwrap());
            }
        }

        for f in filters {
            apply_filter(&mut rows, f, &slots);
        }
        (slots, rows)
    }

    /// Higher is cheaper: bound positions narrow the index lookup.
    fn selectivity(&self, pattern: &TriplePattern, slots: &Slots, bound: &BTreeSet<usize>) -> u32 {
        let is_bound = |t: &PatternTerm| match t {
            PatternTerm::Const(_) => true,
            PatternTerm::Var(v) => bound.contains(&slots.of(v).unwrap()),
        };
        let mut score = 0;
        if is_bound(&pattern.subject) {
            score += 4;
        }
        if is_bound(&pattern.object) {
            score += 3;
        }
        match &pattern.predicate {
            Predicate::Iri(_) => score += 2,
            Predicate::Path(_) => {}
            Predicate::Var(v) if bound.contains(&slots.of(v).unwrap()) => score += 2,
            Predicate::Var(_) => {}
        }
        score
    }

    fn extend(&self, rows: Vec<Row>, pattern: &TriplePattern, slots: &Slots) -> Vec<Row> {
        let mut out = Vec::new();
        let mut reach_cache: HashMap<Term, BTreeSet<Term>> = HashMap::new();
        for row in rows {
            let s = resolve(&pattern.subject, &row, slots);
            let o = resolve(&pattern.object, &row, slots);
            match &pattern.predicate {
                Predicate::Iri(p) if p.is_rdf_type() => self.match_type(&row, s, o, &mut out),
                Predicate::Iri(p) => self.match_raw(&row, s, Resolved::Bound(Term::Iri(p.clone())), o, &mut out),
                Predicate::Var(v) => {
                    let slot = slots.of(v).unwrap();
                    let p = match &row[slot] {
                        Some(t) => Resolved::Bound(t.clone()),
                        None => Resolved::Free(slot),
                    };
                    self.match_raw(&row, s, p, o, &mut out);
                }
                Predicate::Path(p) => self.match_path(&row, p, s, o, &mut reach_cache, &mut out),
            }
        }
        out
    }

    fn match_type(&self, row: &Row, s: Resolved<Term>, o: Resolved<Term>, out: &mut Vec<Row>) {
        let by_ind = &self.types.by_individual;
        match (s, o) {
            (Resolved::Bound(s), Resolved::Bound(o)) => {
                let holds = match (s.as_iri(), o.as_iri()) {
                    (Some(s), Some(o)) => by_ind.get(s).is_some_and(|t| t.contains(o)),
                    _ => false,
                };
                if holds {
                    out.push(row.clone());
                }
            }
            (Resolved::Bound(s), Resolved::Free(slot)) => {
                let Some(types) = s.as_iri().and_then(|s| by_ind.get(s)) else {
                    return;
                };
                for t in types {
                    let mut r = row.clone();
                    if bind(&mut r, slot, Term::Iri(t.clone())) {
                        out.push(r);
                    }
                }
            }
            (Resolved::Free(slot), Resolved::Bound(o)) => {
                let Some(members) = o.as_iri().and_then(|o| self.types.by_class.get(o)) else {
                    return;
                };
                for m in members {
                    let mut r = row.clone();
                    if bind(&mut r, slot, Term::Iri(m.clone())) {
                        out.push(r);
                    }
                }
            }
            (Resolved::Free(ss), Resolved::Free(os)) => {
                for (ind, types) in by_ind {
                    for t in types {
                        let mut r = row.clone();
                        if bind(&mut r, ss, Term::Iri(ind.clone())) && bind(&mut r, os, Term::Iri(t.clone())) {
                            out.push(r);
                        }
                    }
                }
            }
        }
    }

    fn match_raw(
        &self,
        row: &Row,
        s: Resolved<Term>,
        p: Resolved<Term>,
        o: Resolved<Term>,
        out: &mut Vec<Row>,
    ) {
        let s_key = match &s {
            Resolved::Bound(Term::Iri(iri)) => Some(iri.clone()),
            Resolved::Bound(Term::Literal(_)) => return,
            Resolved::Free(_) => None,
        };
        let p_key = match &p {
            Resolved::Bound(Term::Iri(iri)) => Some(iri.clone()),
            Resolved::Bound(Term::Literal(_)) => return,
            Resolved::Free(_) => None,
        };
        let o_key = match &o {
            Resolved::Bound(t) => Some(t.clone()),
            Resolved::Free(_) => None,
        };
        for triple in self.graph.matches(s_key.as_ref(), p_key.as_ref(), o_key.as_ref()) {
            let mut r = row.clone();
            let mut ok = true;
            if let Resolved::Free(slot) = s {
                ok &= bind(&mut r, slot, Term::Iri(triple.subject));
            }
            if let Resolved::Free(slot) = p {
                ok = ok && bind(&mut r, slot, Term::Iri(triple.predicate));
            }
            if let Resolved::Free(slot) = o {
                ok = ok && bind(&mut r, slot, triple.object);
            }
            if ok {
                out.push(r);
            }
        }
    }

    fn match_path(
        &self,
        row: &Row,
        p: &Iri,
        s: Resolved<Term>,
        o: Resolved<Term>,
        cache: &mut HashMap<Term, BTreeSet<Term>>,
        out: &mut Vec<Row>,
    ) {
        match (s, o) {
            (Resolved::Bound(s), o) => {
                let reach = cache
                    .entry(s.clone())
                    .or_insert_with(|| self.forward_reach(p, &s));
                match o {
                    Resolved::Bound(o) => {
                        if reach.contains(&o) {
                            out.push(row.clone());
                        }
                    }
                    Resolved::Free(slot) => {
                        for t in reach.iter() {
                            let mut r = row.clone();
                            if bind(&mut r, slot, t.clone()) {
                                out.push(r);
                            }
                        }
                    }
                }
            }
            (Resolved::Free(slot), Resolved::Bound(o)) => {
                let reach = cache
                    .entry(o.clone())
                    .or_insert_with(|| self.backward_reach(p, &o));
                for t in reach.iter() {
                    let mut r = row.clone();
                    if bind(&mut r, slot, t.clone()) {
                        out.push(r);
                    }
                }
            }
            (Resolved::Free(ss), Resolved::Free(os)) => {
                let starts: BTreeSet<&Iri> = self.graph.pairs(p).map(|(s, _)| s).collect();
                for start in starts {
                    let start = Term::Iri(start.clone());
                    let reach = cache
                        .entry(start.clone())
                        .or_insert_with(|| self.forward_reach(p, &start));
                    for t in reach.iter() {
                        let mut r = row.clone();
                        if bind(&mut r, ss, start.clone()) && bind(&mut r, os, t.clone()) {
                            out.push(r);
                        }
                    }
                }
            }
        }
    }

    /// Terms reachable from `start` over one or more `p` edges.
    fn forward_reach(&self, p: &Iri, start: &Term) -> BTreeSet<Term> {
        let mut seen = BTreeSet::new();
        let Some(start) = start.as_iri() else {
            return seen;
        };
        let mut queue: VecDeque<&Iri> = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for next in self.graph.objects(node, p) {
                if seen.insert(next.clone()) {
                    if let Term::Iri(iri) = next {
                        queue.push_back(iri);
                    }
                }
            }
        }
        seen
    }

    /// Terms from which `end` is reachable over one or more `p` edges.
    fn backward_reach(&self, p: &Iri, end: &Term) -> BTreeSet<Term> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Term> = VecDeque::from([end.clone()]);
        while let Some(node) = queue.pop_front() {
            for prev in self.graph.subjects(p, &node) {
                let prev = Term::Iri(prev.clone());
                if seen.insert(prev.clone()) {
                    queue.push_back(prev);
                }
            }
        }
        seen
    }
}

fn resolve(term: &PatternTerm, row: &Row, slots: &Slots) -> Resolved<Term> {
    match term {
        PatternTerm::Const(t) => Resolved::Bound(t.clone()),
        PatternTerm::Var(v) => {
            let slot = slots.of(v).unwrap();
            match &row[slot] {
                Some(t) => Resolved::Bound(t.clone()),
                None => Resolved::Free(slot),
            }
        }
    }
}

fn apply_filter(rows: &mut Vec<Row>, filter: &Expr, slots: &Slots) {
    rows.retain(|row| {
        let lookup = |v: &Var| slots.of(v).and_then(|i| row[i].clone());
        filter.eval(&lookup) == Some(true)
    });
}

fn count(members: &[Row], slot: Option<usize>, has_arg: bool, distinct: bool) -> usize {
    match (has_arg, slot) {
        (false, _) if distinct => members.iter().collect::<BTreeSet<_>>().len(),
        (false, _) => members.len(),
        (true, None) => 0,
        (true, Some(i)) => {
            let values = members.iter().filter_map(|r| r[i].as_ref());
            if distinct {
                values.collect::<BTreeSet<_>>().len()
            } else {
                values.count()
            }
        }
    }
}

/// Hash join of outer rows with a subselect table on the variables bound
/// on both sides.
fn natural_join(
    rows: Vec<Row>,
    slots: &Slots,
    bound: &BTreeSet<usize>,
    sub_vars: &[Var],
    sub_rows: Vec<Vec<Term>>,
) -> Vec<Row> {
    let sub_slots: Vec<usize> = sub_vars.iter().map(|v| slots.of(v).unwrap()).collect();
    let shared: Vec<usize> = (0..sub_vars.len())
        .filter(|&i| bound.contains(&sub_slots[i]))
        .collect();
    let mut index: HashMap<Vec<&Term>, Vec<&Vec<Term>>> = HashMap::new();
    for sub in &sub_rows {
        let key = shared.iter().map(|&i| &sub[i]).collect();
        index.entry(key).or_default().push(sub);
    }
    let mut out = Vec::new();
    for row in rows {
        let key: Option<Vec<&Term>> = shared.iter().map(|&i| row[sub_slots[i]].as_ref()).collect();
        let Some(matches) = key.and_then(|k| index.get(&k)) else {
            continue;
        };
        for sub in matches {
            let mut r = row.clone();
            for (i, value) in sub.iter().enumerate() {
                r[sub_slots[i]] = Some(value.clone());
            }
            out.push(r);
        }
    }
    out
}
