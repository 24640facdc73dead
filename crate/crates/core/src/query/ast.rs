use std::fmt;

use crate::graph::PrefixMap;
use crate::term::{Iri, Literal, Term};
use crate::turtle::render_term;

/// A query variable, stored without its `?` or `$` sigil.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub distinct: bool,
    pub projection: Vec<SelectItem>,
    pub pattern: GroupPattern,
    pub group_by: Vec<Var>,
    /// Conjunction of HAVING constraints.
    pub having: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectItem {
    Var(Var),
    /// `COUNT(?x)`, `COUNT(DISTINCT ?x)` or `COUNT(*)` (arg `None`).
    Count {
        arg: Option<Var>,
        distinct: bool,
        alias: Var,
    },
}

impl SelectItem {
    /// The result column this item produces.
    pub fn output_var(&self) -> &Var {
        match self {
            SelectItem::Var(v) => v,
            SelectItem::Count { alias, .. } => alias,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupPattern {
    pub triples: Vec<TriplePattern>,
    pub filters: Vec<Expr>,
    pub subselects: Vec<Query>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: Predicate,
    pub object: PatternTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(Var),
    Const(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Var(Var),
    /// A constant predicate. `rdf:type` (written `a` or in full) matches
    /// entailed types rather than asserted triples.
    Iri(Iri),
    /// `p+`: one or more `p` edges.
    Path(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Var(Var),
    Const(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Compare(CompareOp, Operand, Operand),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    /// Evaluates under SPARQL error semantics: `None` is an error (unbound
    /// variable or incomparable operands). A row passes a filter only on
    /// `Some(true)`.
    pub fn eval(&self, lookup: &dyn Fn(&Var) -> Option<Term>) -> Option<bool> {
        match self {
            Expr::Compare(op, a, b) => compare(*op, a.resolve(lookup)?, b.resolve(lookup)?),
            Expr::And(a, b) => match (a.eval(lookup), b.eval(lookup)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Expr::Or(a, b) => match (a.eval(lookup), b.eval(lookup)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Expr::Not(e) => e.eval(lookup).map(|v| !v),
        }
    }

    pub fn vars(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Var>) {
        match self {
            Expr::Compare(_, a, b) => {
                for o in [a, b] {
                    if let Operand::Var(v) = o {
                        out.push(v);
                    }
                }
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(e) => e.collect_vars(out),
        }
    }
}

impl Operand {
    fn resolve(&self, lookup: &dyn Fn(&Var) -> Option<Term>) -> Option<Term> {
        match self {
            Operand::Var(v) => lookup(v),
            Operand::Const(t) => Some(t.clone()),
        }
    }
}

/// Value comparison of two terms. Literals compare by value where their
/// datatypes allow it; IRIs only support `=` and `!=`.
pub fn compare(op: CompareOp, a: Term, b: Term) -> Option<bool> {
    use std::cmp::Ordering;
    let ordering: Option<Ordering> = match (&a, &b) {
        (Term::Literal(x), Term::Literal(y)) => x.value_cmp(y),
        _ => None,
    };
    match op {
        CompareOp::Eq | CompareOp::Ne => {
            let equal = match ordering {
                Some(o) => o == Ordering::Equal,
                None => a == b,
            };
            Some(equal == (op == CompareOp::Eq))
        }
        CompareOp::Lt => ordering.map(|o| o == Ordering::Less),
        CompareOp::Gt => ordering.map(|o| o == Ordering::Greater),
        CompareOp::Le => ordering.map(|o| o != Ordering::Greater),
        CompareOp::Ge => ordering.map(|o| o != Ordering::Less),
    }
}

impl Query {
    /// Output column names, in projection order.
    pub fn output_vars(&self) -> Vec<Var> {
        self.projection.iter().map(|i| i.output_var().clone()).collect()
    }

    pub fn is_aggregate(&self) -> bool {
        !self.group_by.is_empty()
            || self
                .projection
                .iter()
                .any(|i| matches!(i, SelectItem::Count { .. }))
    }
}

impl GroupPattern {
    /// Variables bound by every solution of this group, in order of first
    /// appearance: triple-pattern variables, then subselect columns.
    pub fn in_scope_vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        let mut push = |v: &Var| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        for t in &self.triples {
            for v in t.vars() {
                push(v);
            }
        }
        for sub in &self.subselects {
            for v in sub.output_vars() {
                push(&v);
            }
        }
        out
    }
}

impl TriplePattern {
    pub fn vars(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        if let PatternTerm::Var(v) = &self.subject {
            out.push(v);
        }
        if let Predicate::Var(v) = &self.predicate {
            out.push(v);
        }
        if let PatternTerm::Var(v) = &self.object {
            out.push(v);
        }
        out
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, term: &Term) -> fmt::Result {
    f.write_str(&render_term(term, &PrefixMap::new()))
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => v.fmt(f),
            PatternTerm::Const(t) => write_term(f, t),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => v.fmt(f),
            Operand::Const(t) => write_term(f, t),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Var(v) => v.fmt(f),
            Predicate::Iri(iri) if iri.is_rdf_type() => f.write_str("a"),
            Predicate::Iri(iri) => iri.fmt(f),
            Predicate::Path(iri) => write!(f, "{iri}+"),
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Compare(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Not(e) => write!(f, "!{e}"),
        }
    }
}

impl fmt::Display for SelectItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectItem::Var(v) => v.fmt(f),
            SelectItem::Count {
                arg,
                distinct,
                alias,
            } => {
                f.write_str("(COUNT(")?;
                if *distinct {
                    f.write_str("DISTINCT ")?;
                }
                match arg {
                    Some(v) => write!(f, "{v}")?,
                    None => f.write_str("*")?,
                }
                write!(f, ") AS {alias})")
            }
        }
    }
}

impl fmt::Display for GroupPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for t in &self.triples {
            write!(f, " {t} .")?;
        }
        for e in &self.filters {
            write!(f, " FILTER ({e})")?;
        }
        for q in &self.subselects {
            write!(f, " {{ {q} }}")?;
        }
        f.write_str(" }")
    }
}

/// Renders the query in the accepted syntax with full IRIs, so the text
/// parses back to an equal AST.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        for item in &self.projection {
            write!(f, "{item} ")?;
        }
        write!(f, "WHERE {}", self.pattern)?;
        if !self.group_by.is_empty() {
            f.write_str(" GROUP BY")?;
            for v in &self.group_by {
                write!(f, " {v}")?;
            }
        }
        if !self.having.is_empty() {
            f.write_str(" HAVING")?;
            for e in &self.having {
                write!(f, " ({e})")?;
            }
        }
        Ok(())
    }
}

/// Convenience for building constant operands in tests and generators.
impl From<Literal> for Operand {
    fn from(lit: Literal) -> Self {
        Operand::Const(Term::Literal(lit))
    }
}
