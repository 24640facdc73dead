//! Reader and deterministic writer for the Turtle subset used by knowledge
//! base files.
//!
//! Supported: `@prefix`/`PREFIX` directives, subject groups with `;`
//! predicate lists and `,` object lists, the `a` keyword, `<...>` and
//! prefixed IRIs, string/integer/decimal/double/boolean literals, typed
//! literals with `^^`, and `#` comments. Blank nodes, collections,
//! multi-line strings and language tags are rejected.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{is_prefix_name, Graph, PrefixMap, Triple};
use crate::lex::{is_delimiter, Cursor, NumberKind, SyntaxError};
use crate::term::{Datatype, Iri, Literal, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleError {
    #[error("syntax error: {0}")]
    Syntax(SyntaxError),
    #[error("line {line}, column {column}: unsupported construct: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
    #[error("line {line}, column {column}: {source}")]
    Term {
        line: usize,
        column: usize,
        source: TermError,
    },
}

impl TurtleError {
    pub fn line_column(&self) -> (usize, usize) {
        match self {
            TurtleError::Syntax(e) => (e.line, e.column),
            TurtleError::Unsupported { line, column, .. } | TurtleError::Term { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

impl From<SyntaxError> for TurtleError {
    fn from(e: SyntaxError) -> Self {
        TurtleError::Syntax(e)
    }
}

/// Parses with the default ANNETT-O prefixes pre-bound.
pub fn parse_turtle(text: &str) -> Result<Graph, TurtleError> {
    parse_turtle_with(text, PrefixMap::annetto())
}

/// Parses with `prefixes` pre-bound; directives in the text override them.
pub fn parse_turtle_with(text: &str, prefixes: PrefixMap) -> Result<Graph, TurtleError> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        graph: Graph::with_prefixes(prefixes),
    };
    parser.document()?;
    Ok(parser.graph)
}

struct Parser<'a> {
    cur: Cursor<'a>,
    graph: Graph,
}

impl Parser<'_> {
    fn unsupported(&self, construct: &str) -> TurtleError {
        let pos = self.cur.pos();
        TurtleError::Unsupported {
            line: pos.line,
            column: pos.column,
            construct: construct.to_owned(),
        }
    }

    fn document(&mut self) -> Result<(), TurtleError> {
        loop {
            self.cur.skip_trivia();
            if self.cur.is_eof() {
                return Ok(());
            }
            if self.cur.eat_str("@prefix") {
                self.prefix_directive(true)?;
            } else if self.cur.at_keyword("PREFIX") {
                self.cur.eat_keyword("PREFIX");
                self.prefix_directive(false)?;
            } else if self.cur.rest().starts_with("@base") || self.cur.at_keyword("BASE") {
                return Err(self.unsupported("base directive"));
            } else {
                self.triples()?;
            }
        }
    }

    fn prefix_directive(&mut self, needs_dot: bool) -> Result<(), TurtleError> {
        self.cur.skip_trivia();
        let pos = self.cur.pos();
        let mut prefix = String::new();
        while let Some(c) = self.cur.peek().filter(|&c| c != ':' && !is_delimiter(c)) {
            prefix.push(c);
            self.cur.bump();
        }
        if !is_prefix_name(&prefix) || !self.cur.eat(':') {
            return Err(self.cur.error_at(pos, "expected prefix name followed by ':'").into());
        }
        self.cur.skip_trivia();
        if self.cur.peek() != Some('<') {
            return Err(self.cur.error("expected namespace IRI").into());
        }
        let iri_pos = self.cur.pos();
        let namespace = self.cur.read_iri_ref()?;
        Iri::new(&namespace).map_err(|source| TurtleError::Term {
            line: iri_pos.line,
            column: iri_pos.column,
            source,
        })?;
        self.graph.prefixes_mut().insert(&prefix, &namespace);
        if needs_dot {
            self.cur.skip_trivia();
            if !self.cur.eat('.') {
                return Err(self.cur.error("expected '.' after @prefix directive").into());
            }
        }
        Ok(())
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        let subject = self.subject()?;
        loop {
            self.cur.skip_trivia();
            let predicate = self.verb()?;
            loop {
                self.cur.skip_trivia();
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.cur.skip_trivia();
                if !self.cur.eat(',') {
                    break;
                }
            }
            if !self.cur.eat(';') {
                break;
            }
            self.cur.skip_trivia();
            while self.cur.eat(';') {
                self.cur.skip_trivia();
            }
            if self.cur.peek() == Some('.') {
                break;
            }
        }
        self.cur.skip_trivia();
        if !self.cur.eat('.') {
            return Err(self.cur.error("expected '.', ';' or ','").into());
        }
        Ok(())
    }

    fn subject(&mut self) -> Result<Iri, TurtleError> {
        match self.cur.peek() {
            Some('[') => Err(self.unsupported("blank node")),
            Some('(') => Err(self.unsupported("collection")),
            Some('_') if self.cur.peek_nth(1) == Some(':') => Err(self.unsupported("blank node")),
            Some('"') | Some('\'') => Err(self.cur.error("literal cannot be a subject").into()),
            _ if self.cur.at_number() => Err(self.cur.error("literal cannot be a subject").into()),
            _ => self.iri("subject"),
        }
    }

    fn verb(&mut self) -> Result<Iri, TurtleError> {
        if self.cur.peek() == Some('a') && self.cur.peek_nth(1).is_none_or(is_delimiter) {
            self.cur.bump();
            return Ok(Iri::rdf_type());
        }
        self.iri("predicate")
    }

    fn iri(&mut self, role: &str) -> Result<Iri, TurtleError> {
        let pos = self.cur.pos();
        let text = if self.cur.peek() == Some('<') {
            self.cur.read_iri_ref()?
        } else if let Some((prefix, local)) = self.cur.read_prefixed_name() {
            self.graph.prefixes().expand(&prefix, &local).ok_or_else(|| {
                TurtleError::Syntax(self.cur.error_at(pos, format!("undeclared prefix '{prefix}:'")))
            })?
        } else {
            return Err(self.cur.error(format!("expected {role} IRI")).into());
        };
        Iri::new(&text).map_err(|source| TurtleError::Term {
            line: pos.line,
            column: pos.column,
            source,
        })
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        let pos = self.cur.pos();
        let term_err = |source| TurtleError::Term {
            line: pos.line,
            column: pos.column,
            source,
        };
        match self.cur.peek() {
            Some('[') => return Err(self.unsupported("blank node")),
            Some('(') => return Err(self.unsupported("collection")),
            Some('_') if self.cur.peek_nth(1) == Some(':') => {
                return Err(self.unsupported("blank node"))
            }
            Some(q @ ('"' | '\'')) => {
                if self.cur.rest().starts_with(&q.to_string().repeat(3)) {
                    return Err(self.unsupported("multi-line string"));
                }
                let lexical = self.cur.read_string()?;
                if self.cur.peek() == Some('@') {
                    return Err(self.unsupported("language-tagged literal"));
                }
                let datatype = if self.cur.eat_str("^^") {
                    let dt = self.iri("datatype")?;
                    Datatype::from_iri(dt.as_str()).map_err(term_err)?
                } else {
                    Datatype::String
                };
                return Literal::new(&lexical, datatype)
                    .map(Term::Literal)
                    .map_err(term_err);
            }
            _ => {}
        }
        if self.cur.at_number() {
            let (kind, text) = self.cur.read_number();
            let datatype = match kind {
                NumberKind::Integer => Datatype::Integer,
                NumberKind::Decimal | NumberKind::Double => Datatype::Double,
            };
            return Literal::new(&text, datatype)
                .map(Term::Literal)
                .map_err(term_err);
        }
        for (word, value) in [("true", true), ("false", false)] {
            if self.cur.rest().starts_with(word)
                && self.cur.peek_nth(word.len()).is_none_or(is_delimiter)
            {
                self.cur.eat_str(word);
                return Ok(Term::Literal(Literal::boolean(value)));
            }
        }
        self.iri("object").map(Term::Iri)
    }
}

/// Deterministic Turtle text: subjects in IRI order, `a` first then
/// predicates in IRI order, objects in term order.
pub fn serialize_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    for (prefix, namespace) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {prefix}: <{namespace}> .");
    }
    let rdf_type = Iri::rdf_type();
    for subject in graph.subject_iris() {
        out.push('\n');
        out.push_str(&prefixes.render(subject));
        let mut predicates: Vec<Iri> = graph
            .matches(Some(subject), None, None)
            .into_iter()
            .map(|t| t.predicate)
            .collect();
        predicates.dedup();
        predicates.sort_by_key(|p| *p != rdf_type);
        for (i, predicate) in predicates.iter().enumerate() {
            if i > 0 {
                out.push_str(" ;\n   ");
            }
            out.push(' ');
            if *predicate == rdf_type {
                out.push('a');
            } else {
                out.push_str(&prefixes.render(predicate));
            }
            let objects: Vec<String> = graph
                .objects(subject, predicate)
                .map(|o| render_term(o, prefixes))
                .collect();
            out.push(' ');
            out.push_str(&objects.join(", "));
        }
        out.push_str(" .\n");
    }
    out
}

/// A term as it would appear in Turtle output.
pub fn render_term(term: &Term, prefixes: &PrefixMap) -> String {
    match term {
        Term::Iri(iri) => prefixes.render(iri),
        Term::Literal(lit) => render_literal(lit, prefixes),
    }
}

fn render_literal(lit: &Literal, prefixes: &PrefixMap) -> String {
    match lit.datatype() {
        Datatype::Integer | Datatype::Boolean => lit.lexical().to_owned(),
        Datatype::String => quote(lit.lexical()),
        Datatype::Double | Datatype::DateTime => {
            let dt = Iri::new(lit.datatype().iri_str()).expect("static datatype IRI");
            format!("{}^^{}", quote(lit.lexical()), prefixes.render(&dt))
        }
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
