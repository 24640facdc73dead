//! In-memory triple store with subject, predicate and object indexes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{ns, Iri, Term};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} {:?} .", self.subject, self.predicate, self.object)
    }
}

/// Ordered prefix → namespace bindings. The empty prefix is the default `:`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixMap {
    entries: Vec<(String, String)>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// `:` bound to `default_ns`, plus `rdf`, `rdfs`, `owl` and `xsd`.
    pub fn with_default_namespace(default_ns: &str) -> Self {
        let mut map = PrefixMap::new();
        map.insert("", default_ns);
        map.insert("rdf", ns::RDF);
        map.insert("rdfs", ns::RDFS);
        map.insert("owl", ns::OWL);
        map.insert("xsd", ns::XSD);
        map
    }

    pub fn annetto() -> Self {
        Self::with_default_namespace(ns::ANNETTO)
    }

    /// Binds `prefix`, replacing an earlier binding in place.
    pub fn insert(&mut self, prefix: &str, namespace: &str) {
        match self.entries.iter_mut().find(|(p, _)| p == prefix) {
            Some(entry) => entry.1 = namespace.to_owned(),
            None => self.entries.push((prefix.to_owned(), namespace.to_owned())),
        }
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, n)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Shortest prefixed form of `iri`, preferring the longest namespace.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        let text = iri.as_str();
        self.entries
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && text.starts_with(ns.as_str()))
            .filter(|(_, ns)| is_local_name(&text[ns.len()..]))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| format!("{p}:{}", &text[ns.len()..]))
    }

    /// Prefixed form if available, otherwise `<iri>`.
    pub fn render(&self, iri: &Iri) -> String {
        self.compact(iri).unwrap_or_else(|| format!("<{}>", iri.as_str()))
    }
}

/// Local names this crate reads and writes in prefixed form.
pub(crate) fn is_local_name(local: &str) -> bool {
    let bytes = local.as_bytes();
    let Some((&first, _)) = bytes.split_first() else {
        return false;
    };
    let ok = |b: u8| b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'.';
    (first.is_ascii_alphanumeric() || first == b'_')
        && bytes.iter().all(|&b| ok(b))
        && *bytes.last().unwrap() != b'.'
}

pub(crate) fn is_prefix_name(prefix: &str) -> bool {
    let mut chars = prefix.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        _ => false,
    }
}

type Index<A, B, C> = BTreeMap<A, BTreeMap<B, BTreeSet<C>>>;

/// A set of triples indexed three ways (SPO, POS, OSP) so that any bound
/// position narrows the lookup without a full scan.
#[derive(Clone, Default)]
pub struct Graph {
    spo: Index<Iri, Iri, Term>,
    pos: Index<Iri, Term, Iri>,
    osp: Index<Term, Iri, Iri>,
    len: usize,
    prefixes: PrefixMap,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Graph {
            prefixes,
            ..Self::default()
        }
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Returns true if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let Triple {
            subject,
            predicate,
            object,
        } = triple;
        let fresh = self
            .spo
            .entry(subject.clone())
            .or_default()
            .entry(predicate.clone())
            .or_default()
            .insert(object.clone());
        if !fresh {
            return false;
        }
        self.pos
            .entry(predicate.clone())
            .or_default()
            .entry(object.clone())
            .or_default()
            .insert(subject.clone());
        self.osp
            .entry(object)
            .or_default()
            .entry(subject)
            .or_default()
            .insert(predicate);
        self.len += 1;
        true
    }

    /// Returns true if the triple was present.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        let Triple {
            subject,
            predicate,
            object,
        } = triple;
        if !remove_nested(&mut self.spo, subject, predicate, object) {
            return false;
        }
        remove_nested(&mut self.pos, predicate, object, subject);
        remove_nested(&mut self.osp, object, subject, predicate);
        self.len -= 1;
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo
            .get(&triple.subject)
            .and_then(|m| m.get(&triple.predicate))
            .is_some_and(|objects| objects.contains(&triple.object))
    }

    /// All triples agreeing with every bound position.
    pub fn matches(
        &self,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        let mut out = Vec::new();
        match (subject, predicate, object) {
            (Some(s), Some(p), Some(o)) => {
                let triple = Triple::new(s.clone(), p.clone(), o.clone());
                if self.contains(&triple) {
                    out.push(triple);
                }
            }
            (Some(s), p, o) => {
                let Some(by_pred) = self.spo.get(s) else {
                    return out;
                };
                for (pred, objects) in by_pred {
                    if p.is_some_and(|p| p != pred) {
                        continue;
                    }
                    for obj in objects {
                        if o.is_none_or(|o| o == obj) {
                            out.push(Triple::new(s.clone(), pred.clone(), obj.clone()));
                        }
                    }
                }
            }
            (None, Some(p), o) => {
                let Some(by_obj) = self.pos.get(p) else {
                    return out;
                };
                let mut push = |obj: &Term, subjects: &BTreeSet<Iri>| {
                    for subj in subjects {
                        out.push(Triple::new(subj.clone(), p.clone(), obj.clone()));
                    }
                };
                match o {
                    Some(o) => {
                        if let Some(subjects) = by_obj.get(o) {
                            push(o, subjects);
                        }
                    }
                    None => by_obj.iter().for_each(|(obj, subjects)| push(obj, subjects)),
                }
            }
            (None, None, Some(o)) => {
                if let Some(by_subj) = self.osp.get(o) {
                    for (subj, preds) in by_subj {
                        for pred in preds {
                            out.push(Triple::new(subj.clone(), pred.clone(), o.clone()));
                        }
                    }
                }
            }
            (None, None, None) => out.extend(self.iter()),
        }
        out
    }

    /// Every triple in subject, predicate, object order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, by_pred)| {
            by_pred.iter().flat_map(move |(p, objects)| {
                objects
                    .iter()
                    .map(move |o| Triple::new(s.clone(), p.clone(), o.clone()))
            })
        })
    }

    /// Objects of `(subject, predicate, *)` in term order.
    pub fn objects<'a>(&'a self, subject: &Iri, predicate: &Iri) -> impl Iterator<Item = &'a Term> {
        self.spo
            .get(subject)
            .and_then(|m| m.get(predicate))
            .into_iter()
            .flatten()
    }

    /// IRI objects of `(subject, predicate, *)`.
    pub fn object_iris<'a>(
        &'a self,
        subject: &Iri,
        predicate: &Iri,
    ) -> impl Iterator<Item = &'a Iri> {
        self.objects(subject, predicate).filter_map(Term::as_iri)
    }

    /// Subjects of `(*, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Term) -> impl Iterator<Item = &'a Iri> {
        self.pos
            .get(predicate)
            .and_then(|m| m.get(object))
            .into_iter()
            .flatten()
    }

    /// All `(subject, object)` pairs for a predicate.
    pub fn pairs<'a>(&'a self, predicate: &Iri) -> impl Iterator<Item = (&'a Iri, &'a Term)> {
        self.pos
            .get(predicate)
            .into_iter()
            .flat_map(|m| m.iter().flat_map(|(o, subs)| subs.iter().map(move |s| (s, o))))
    }

    /// Distinct subjects in order.
    pub fn subject_iris(&self) -> impl Iterator<Item = &Iri> {
        self.spo.keys()
    }

    /// Distinct predicates in order.
    pub fn predicate_iris(&self) -> impl Iterator<Item = &Iri> {
        self.pos.keys()
    }

    /// Distinct objects in order.
    pub fn object_terms(&self) -> impl Iterator<Item = &Term> {
        self.osp.keys()
    }

    /// True if the IRI occurs as subject or object.
    pub fn mentions(&self, iri: &Iri) -> bool {
        self.spo.contains_key(iri) || self.osp.contains_key(&Term::Iri(iri.clone()))
    }

    /// Adds every triple of `other`; prefixes of `other` are appended when
    /// not already bound.
    pub fn extend_from(&mut self, other: &Graph) {
        for triple in other.iter() {
            self.insert(triple);
        }
        for (prefix, namespace) in other.prefixes.iter() {
            if self.prefixes.get(prefix).is_none() {
                self.prefixes.insert(prefix, namespace);
            }
        }
    }
}

fn remove_nested<A: Ord, B: Ord, C: Ord>(index: &mut Index<A, B, C>, a: &A, b: &B, c: &C) -> bool {
    let Some(inner) = index.get_mut(a) else {
        return false;
    };
    let Some(leaf) = inner.get_mut(b) else {
        return false;
    };
    if !leaf.remove(c) {
        return false;
    }
    if leaf.is_empty() {
        inner.remove(b);
        if inner.is_empty() {
            index.remove(a);
        }
    }
    true
}

/// Triple-set equality; prefix maps are ignored.
pub fn graph_equal(a: &Graph, b: &Graph) -> bool {
    a.len() == b.len() && a.iter().all(|t| b.contains(&t))
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        graph_equal(self, other)
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut graph = Graph::new();
        for triple in iter {
            graph.insert(triple);
        }
        graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Literal;
    use proptest::prelude::*;

    fn iri(local: &str) -> Iri {
        Iri::from_parts(ns::ANNETTO, local).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), iri(o))
    }

    #[test]
    fn duplicate_insert_keeps_size() {
        let mut g = Graph::new();
        assert!(g.insert(t("A", "p", "B")));
        assert!(!g.insert(t("A", "p", "B")));
        assert_eq!(g.len(), 1);
        assert!(g.contains(&t("A", "p", "B")));
    }

    #[test]
    fn remove_semantics() {
        let mut g = Graph::new();
        g.insert(t("A", "p", "B"));
        assert!(g.remove(&t("A", "p", "B")));
        assert_eq!(g.len(), 0);
        assert!(!g.remove(&t("A", "p", "B")));
        assert_eq!(g.len(), 0);

        g.insert(t("A", "p", "B"));
        g.insert(t("C", "q", "D"));
        g.remove(&t("A", "p", "B"));
        assert_eq!(g.matches(None, None, None), vec![t("C", "q", "D")]);
    }

    #[test]
    fn match_examples() {
        let mut g = Graph::new();
        assert!(g.matches(None, None, None).is_empty());
        g.insert(t("A", "p", "B"));
        g.insert(t("A", "q", "C"));
        assert_eq!(g.matches(Some(&iri("A")), None, None).len(), 2);
        assert_eq!(g.matches(None, Some(&iri("q")), None), vec![t("A", "q", "C")]);
        assert_eq!(
            g.matches(None, None, Some(&Term::Iri(iri("B")))),
            vec![t("A", "p", "B")]
        );
    }

    #[test]
    fn thousand_distinct_triples() {
        let mut g = Graph::new();
        for i in 0..1000 {
            g.insert(t(&format!("s{}", i % 37), &format!("p{}", i % 11), &format!("o{i}")));
        }
        assert_eq!(g.len(), 1000);
    }

    #[test]
    fn equality_is_set_equality() {
        let a: Graph = [t("A", "p", "B"), t("A", "p", "C")].into_iter().collect();
        let b: Graph = [t("A", "p", "C"), t("A", "p", "B")].into_iter().collect();
        assert!(graph_equal(&a, &a));
        assert!(graph_equal(&a, &b));
        let c: Graph = [t("A", "p", "B")].into_iter().collect();
        assert!(!graph_equal(&a, &c));
    }

    #[test]
    fn compaction() {
        let map = PrefixMap::annetto();
        assert_eq!(map.compact(&iri("GAN_Generator")).as_deref(), Some(":GAN_Generator"));
        assert_eq!(map.compact(&Iri::rdf_type()).as_deref(), Some("rdf:type"));
        assert_eq!(map.compact(&iri("odd/name")), None);
        assert_eq!(map.render(&iri("end.")), "<http://w3id.org/annett-o/end.>");
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0u8..6).prop_map(|i| Term::Iri(iri(&format!("n{i}")))),
            (0i64..4).prop_map(|i| Term::Literal(Literal::integer(i))),
        ]
    }

    fn arb_triple() -> impl Strategy<Value = Triple> {
        ((0u8..6), (0u8..3), arb_term()).prop_map(|(s, p, o)| {
            Triple::new(iri(&format!("n{s}")), iri(&format!("p{p}")), o)
        })
    }

    #[derive(Debug, Clone)]
    enum Op {
        Insert(Triple),
        Remove(Triple),
    }

    proptest! {
        #[test]
        fn set_algebra(ops in prop::collection::vec(
            prop_oneof![arb_triple().prop_map(Op::Insert), arb_triple().prop_map(Op::Remove)],
            0..80,
        )) {
            let mut g = Graph::new();
            let mut model = BTreeSet::new();
            for op in ops {
                match op {
                    Op::Insert(t) => prop_assert_eq!(g.insert(t.clone()), model.insert(t)),
                    Op::Remove(t) => prop_assert_eq!(g.remove(&t), model.remove(&t)),
                }
                prop_assert_eq!(g.len(), model.len());
            }
            for t in &model {
                prop_assert!(g.contains(t));
            }
            let all: BTreeSet<Triple> = g.iter().collect();
            prop_assert_eq!(all, model);
        }

        #[test]
        fn match_equals_linear_scan(
            triples in prop::collection::vec(arb_triple(), 0..60),
            probe in arb_triple(),
            mask in 0u8..8,
        ) {
            let g: Graph = triples.iter().cloned().collect();
            let s = (mask & 1 != 0).then_some(&probe.subject);
            let p = (mask & 2 != 0).then_some(&probe.predicate);
            let o = (mask & 4 != 0).then_some(&probe.object);
            let mut got = g.matches(s, p, o);
            let again = g.matches(s, p, o);
            prop_assert_eq!(&got, &again);
            got.sort();
            let mut expected: Vec<Triple> = g
                .iter()
                .filter(|t| s.is_none_or(|s| *s == t.subject))
                .filter(|t| p.is_none_or(|p| *p == t.predicate))
                .filter(|t| o.is_none_or(|o| *o == t.object))
                .collect();
            expected.sort();
            expected.dedup();
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn subject_match_on_500_random_triples() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let mut g = Graph::new();
        let mut raw = Vec::new();
        for _ in 0..500 {
            let tr = t(
                &format!("s{}", rng.gen_range(0..40)),
                &format!("p{}", rng.gen_range(0..8)),
                &format!("o{}", rng.gen_range(0..60)),
            );
            g.insert(tr.clone());
            raw.push(tr);
        }
        for s in 0..40 {
            let subject = iri(&format!("s{s}"));
            let mut got = g.matches(Some(&subject), None, None);
            got.sort();
            let mut expected: Vec<Triple> =
                raw.iter().filter(|t| t.subject == subject).cloned().collect();
            expected.sort();
            expected.dedup();
            assert_eq!(got, expected);
        }
    }
}
