//! RDF terms: IRIs and typed literals.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use thiserror::Error;

/// Well-known namespaces.
pub mod ns {
    pub const ANNETTO: &str = "http://w3id.org/annett-o/";
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI is empty")]
    EmptyIri,
    #[error("IRI <{0}> contains whitespace or a forbidden character")]
    IllegalIriChar(String),
    #[error("IRI <{0}> is not absolute (missing scheme)")]
    RelativeIri(String),
    #[error("invalid {datatype} lexical form {lexical:?}")]
    InvalidLexical { datatype: Datatype, lexical: String },
    #[error("unsupported datatype <{0}>")]
    UnsupportedDatatype(String),
}

/// An absolute IRI. Equality and ordering are over the expanded text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(TermError::EmptyIri);
        }
        if value
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c))
        {
            return Err(TermError::IllegalIriChar(value.to_owned()));
        }
        if !has_scheme(value) {
            return Err(TermError::RelativeIri(value.to_owned()));
        }
        Ok(Iri(Arc::from(value)))
    }

    /// Joins a namespace and a local name.
    pub fn from_parts(namespace: &str, local: &str) -> Result<Self, TermError> {
        Iri::new(format!("{namespace}{local}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn rdf_type() -> Self {
        Iri(Arc::from(ns::RDF_TYPE))
    }

    pub fn is_rdf_type(&self) -> bool {
        &*self.0 == ns::RDF_TYPE
    }
}

fn has_scheme(value: &str) -> bool {
    let Some((scheme, _)) = value.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Literal datatypes supported by the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    String,
    Integer,
    Double,
    DateTime,
    Boolean,
}

impl Datatype {
    pub fn iri_str(self) -> &'static str {
        match self {
            Datatype::String => "http://www.w3.org/2001/XMLSchema#string",
            Datatype::Integer => "http://www.w3.org/2001/XMLSchema#integer",
            Datatype::Double => "http://www.w3.org/2001/XMLSchema#double",
            Datatype::DateTime => "http://www.w3.org/2001/XMLSchema#dateTime",
            Datatype::Boolean => "http://www.w3.org/2001/XMLSchema#boolean",
        }
    }

    /// Resolves a datatype IRI. `xsd:decimal` is read as a double.
    pub fn from_iri(iri: &str) -> Result<Self, TermError> {
        let local = iri
            .strip_prefix(ns::XSD)
            .ok_or_else(|| TermError::UnsupportedDatatype(iri.to_owned()))?;
        Ok(match local {
            "string" => Datatype::String,
            "integer" => Datatype::Integer,
            "double" | "decimal" => Datatype::Double,
            "dateTime" => Datatype::DateTime,
            "boolean" => Datatype::Boolean,
            _ => return Err(TermError::UnsupportedDatatype(iri.to_owned())),
        })
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Datatype::String => "xsd:string",
            Datatype::Integer => "xsd:integer",
            Datatype::Double => "xsd:double",
            Datatype::DateTime => "xsd:dateTime",
            Datatype::Boolean => "xsd:boolean",
        };
        f.write_str(name)
    }
}

/// A typed literal held in canonical lexical form, so derived equality is
/// value equality: `"0.68"` and `"0.680"` as doubles compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    datatype: Datatype,
    lexical: Arc<str>,
}

impl Literal {
    pub fn new(lexical: &str, datatype: Datatype) -> Result<Self, TermError> {
        let invalid = || TermError::InvalidLexical {
            datatype,
            lexical: lexical.to_owned(),
        };
        let canonical = match datatype {
            Datatype::String => lexical.to_owned(),
            Datatype::Integer => lexical
                .parse::<i64>()
                .map_err(|_| invalid())?
                .to_string(),
            Datatype::Double => {
                let value = parse_double(lexical).ok_or_else(invalid)?;
                canonical_double(value)
            }
            Datatype::DateTime => canonical_date_time(lexical).ok_or_else(invalid)?,
            Datatype::Boolean => match lexical {
                "true" | "1" => "true".to_owned(),
                "false" | "0" => "false".to_owned(),
                _ => return Err(invalid()),
            },
        };
        Ok(Literal {
            datatype,
            lexical: Arc::from(canonical),
        })
    }

    pub fn string(value: impl AsRef<str>) -> Self {
        Literal {
            datatype: Datatype::String,
            lexical: Arc::from(value.as_ref()),
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            datatype: Datatype::Integer,
            lexical: Arc::from(value.to_string()),
        }
    }

    pub fn double(value: f64) -> Result<Self, TermError> {
        if !value.is_finite() {
            return Err(TermError::InvalidLexical {
                datatype: Datatype::Double,
                lexical: value.to_string(),
            });
        }
        Ok(Literal {
            datatype: Datatype::Double,
            lexical: Arc::from(canonical_double(value)),
        })
    }

    pub fn date_time(lexical: &str) -> Result<Self, TermError> {
        Literal::new(lexical, Datatype::DateTime)
    }

    pub fn boolean(value: bool) -> Self {
        Literal {
            datatype: Datatype::Boolean,
            lexical: Arc::from(if value { "true" } else { "false" }),
        }
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    /// Numeric value for integer and double literals.
    pub fn as_f64(&self) -> Option<f64> {
        match self.datatype {
            Datatype::Integer | Datatype::Double => self.lexical.parse().ok(),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.datatype {
            Datatype::Integer => self.lexical.parse().ok(),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.datatype {
            Datatype::Boolean => Some(&*self.lexical == "true"),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.datatype, Datatype::Integer | Datatype::Double)
    }

    /// Orders two literals by value when both are of a comparable kind
    /// (numeric, string, dateTime, boolean).
    pub fn value_cmp(&self, other: &Literal) -> Option<Ordering> {
        if self.is_numeric() && other.is_numeric() {
            if let (Some(a), Some(b)) = (self.as_i64(), other.as_i64()) {
                return Some(a.cmp(&b));
            }
            return self.as_f64()?.partial_cmp(&other.as_f64()?);
        }
        if self.datatype != other.datatype {
            return None;
        }
        match self.datatype {
            Datatype::String => Some(self.lexical.cmp(&other.lexical)),
            Datatype::Boolean => Some(self.as_bool()?.cmp(&other.as_bool()?)),
            Datatype::DateTime => {
                let a = date_time_key(&self.lexical)?;
                let b = date_time_key(&other.lexical)?;
                Some(a.cmp(&b))
            }
            Datatype::Integer | Datatype::Double => unreachable!(),
        }
    }
}

fn parse_double(lexical: &str) -> Option<f64> {
    let trimmed = lexical.trim();
    if trimmed.is_empty() || trimmed != lexical {
        return None;
    }
    // Rust's parser accepts "inf"/"NaN"; the decimal grammar does not.
    if !lexical
        .chars()
        .all(|c| c.is_ascii_digit() || "+-.eE".contains(c))
    {
        return None;
    }
    lexical.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Shortest decimal text that parses back to the same double.
pub(crate) fn canonical_double(value: f64) -> String {
    if value == 0.0 {
        return "0.0".to_owned();
    }
    format!("{value:?}")
}

fn canonical_date_time(lexical: &str) -> Option<String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(lexical) {
        return Some(
            dt.with_timezone(&Utc)
                .to_rfc3339_opts(SecondsFormat::AutoSi, true),
        );
    }
    NaiveDateTime::parse_from_str(lexical, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|dt| dt.format("%Y-%m-%dT%H:%M:%S%.f").to_string())
}

fn date_time_key(canonical: &str) -> Option<NaiveDateTime> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(canonical) {
        return Some(dt.naive_utc());
    }
    NaiveDateTime::parse_from_str(canonical, "%Y-%m-%dT%H:%M:%S%.f").ok()
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^^{}", &*self.lexical, self.datatype)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Object position of a triple.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<&Iri> for Term {
    fn from(iri: &Iri) -> Self {
        Term::Iri(iri.clone())
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => fmt::Debug::fmt(iri, f),
            Term::Literal(lit) => fmt::Debug::fmt(lit, f),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
