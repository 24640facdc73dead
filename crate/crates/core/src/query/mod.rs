//! A SPARQL subset: SELECT queries over basic graph patterns with `p+`
//! paths, FILTER comparisons, subselects, GROUP BY / HAVING and COUNT.
//!
//! Patterns whose predicate is `a` (or `rdf:type`) match entailed types, so
//! `?l a :HiddenLayer` also finds individuals asserted as a subclass.
//! Result rows are always sorted, which makes output deterministic.

mod ast;
mod eval;
#[cfg(any(test, feature = "oracle"))]
mod naive;
mod parser;

use thiserror::Error;

use crate::lex::SyntaxError;
use crate::term::Term;

pub use ast::{
    compare, CompareOp, Expr, GroupPattern, Operand, PatternTerm, Predicate, Query, SelectItem,
    TriplePattern, Var,
};
pub use eval::evaluate;
#[cfg(any(test, feature = "oracle"))]
pub use naive::{evaluate_naive, random_case};
pub use parser::{parse_query, parse_query_with};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("unsupported SPARQL feature: {feature} (line {line}, column {column})")]
    Unsupported {
        feature: String,
        line: usize,
        column: usize,
    },
    #[error("invalid query at line {line}, column {column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Query results: a header of variable names (without `?`) and rows of
/// terms in header order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultTable {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column, in row order.
    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let i = self.vars.iter().position(|v| v == var)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

#[cfg(test)]
mod tests;
