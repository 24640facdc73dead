use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use annetto_core::builder::Kb;
use annetto_core::examples::{export_examples_in, export_queries};
use annetto_core::graph::{Graph, PrefixMap};
use annetto_core::query::{evaluate, parse_query, QueryError, ResultTable};
use annetto_core::schema::builtin_schema;
use annetto_core::term::{ns, Iri, Term};
use annetto_core::turtle::{parse_turtle, render_term, TurtleError};
use annetto_core::validator::{validate_with, ValidateOptions, ValidationReport, Violation};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

/// Environment variable naming the namespace for instance IRIs.
const PREFIX_VAR: &str = "ANNETTO_PREFIX";

#[derive(Parser)]
#[command(name = "annetto", version, about = "Validate, query and generate ANNETT-O knowledge bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a Turtle file against the structural rules R1-R15.
    Validate {
        file: PathBuf,
        /// Also reject nextLayer cycles inside a network.
        #[arg(long)]
        strict_feedforward: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Run a SPARQL SELECT query over a Turtle file.
    Query {
        file: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Write the example knowledge bases and query files into a directory.
    Examples { dir: PathBuf },
    /// Show the inferred types and every statement mentioning an IRI.
    Describe { file: PathBuf, iri: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Turtle { path: PathBuf, source: TurtleError },
    #[error("{path}: {source}")]
    Query { path: PathBuf, source: QueryError },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Turtle { .. } | CliError::Query { .. } | CliError::Usage(_) => 2,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("annetto: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Validate {
            file,
            strict_feedforward,
            format,
        } => cmd_validate(&file, strict_feedforward, format),
        Command::Query { file, query, format } => cmd_query(&file, &query, format),
        Command::Examples { dir } => cmd_examples(&dir),
        Command::Describe { file, iri } => cmd_describe(&file, &iri),
    }
}

fn instance_namespace() -> Result<Option<String>, CliError> {
    match std::env::var(PREFIX_VAR) {
        Ok(value) => {
            Iri::new(&value).map_err(|e| CliError::Usage(format!("{PREFIX_VAR}: {e}")))?;
            Ok(Some(value))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{PREFIX_VAR}: {e}"))),
    }
}

fn load(path: &Path) -> Result<Kb, CliError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    let mut graph = parse_turtle(&text).map_err(|source| CliError::Turtle {
        path: path.to_owned(),
        source,
    })?;
    if let Some(namespace) = instance_namespace()? {
        graph.prefixes_mut().insert("", &namespace);
    }
    Ok(Kb::from_graph(graph, Arc::new(builtin_schema())))
}

fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(io_error(Path::new("<stdout>")))
}

#[derive(Serialize)]
struct JsonViolation {
    rule: String,
    subject: String,
    message: String,
}

impl JsonViolation {
    fn new(v: &Violation) -> Self {
        JsonViolation {
            rule: v.rule.to_string(),
            subject: v.subject.as_str().to_owned(),
            message: v.message.clone(),
        }
    }
}

#[derive(Serialize)]
struct JsonReport {
    valid: bool,
    violations: Vec<JsonViolation>,
    warnings: Vec<JsonViolation>,
}

fn cmd_validate(file: &Path, strict_feedforward: bool, format: ReportFormat) -> Result<u8, CliError> {
    let kb = load(file)?;
    let report = validate_with(&kb, ValidateOptions { strict_feedforward });
    let prefixes = kb.graph().prefixes();
    match format {
        ReportFormat::Text => {
            for w in &report.warnings {
                eprintln!("warning: {}\t{}\t{}", w.rule, prefixes.render(&w.subject), w.message);
            }
            write_stdout(&report.to_text(|iri| prefixes.render(iri)))?;
        }
        ReportFormat::Json => write_stdout(&report_json(&report))?,
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn report_json(report: &ValidationReport) -> String {
    let doc = JsonReport {
        valid: report.is_valid(),
        violations: report.violations.iter().map(JsonViolation::new).collect(),
        warnings: report.warnings.iter().map(JsonViolation::new).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

fn cmd_query(file: &Path, query_path: &Path, format: TableFormat) -> Result<u8, CliError> {
    let text = fs::read_to_string(query_path).map_err(io_error(query_path))?;
    let query = parse_query(&text).map_err(|source| CliError::Query {
        path: query_path.to_owned(),
        source,
    })?;
    let kb = load(file)?;
    let table = evaluate(&query, &kb);
    let out = match format {
        TableFormat::Csv => table_csv(&table, kb.graph().prefixes()),
        TableFormat::Json => table_json(&table),
    };
    write_stdout(&out)?;
    Ok(0)
}

/// CSV cell: prefixed IRI where possible, literals by lexical form.
fn csv_cell(term: &Term, prefixes: &PrefixMap) -> String {
    match term {
        Term::Iri(iri) => prefixes.compact(iri).unwrap_or_else(|| iri.as_str().to_owned()),
        Term::Literal(lit) => lit.lexical().to_owned(),
    }
}

fn table_csv(table: &ResultTable, prefixes: &PrefixMap) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    writer.write_record(&table.vars).expect("in-memory write");
    for row in &table.rows {
        writer
            .write_record(row.iter().map(|t| csv_cell(t, prefixes)))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 cells")
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum JsonTerm {
    Iri { value: String },
    Literal { value: String, datatype: String },
}

#[derive(Serialize)]
struct JsonTable {
    vars: Vec<String>,
    rows: Vec<Vec<JsonTerm>>,
}

fn table_json(table: &ResultTable) -> String {
    let rows = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|term| match term {
                    Term::Iri(iri) => JsonTerm::Iri {
                        value: iri.as_str().to_owned(),
                    },
                    Term::Literal(lit) => JsonTerm::Literal {
                        value: lit.lexical().to_owned(),
                        datatype: lit.datatype().iri_str().to_owned(),
                    },
                })
                .collect()
        })
        .collect();
    let doc = JsonTable {
        vars: table.vars.clone(),
        rows,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
    text.push('\n');
    text
}

fn cmd_examples(dir: &Path) -> Result<u8, CliError> {
    let namespace = instance_namespace()?.unwrap_or_else(|| ns::ANNETTO.to_owned());
    let mut written = export_examples_in(dir, &namespace).map_err(io_error(dir))?;
    written.extend(export_queries(dir).map_err(io_error(dir))?);
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

/// Accepts `<iri>`, a prefixed name known to the file, or an absolute IRI.
fn resolve_iri(text: &str, prefixes: &PrefixMap) -> Result<Iri, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("invalid IRI {text:?}: {e}"));
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Iri::new(inner).map_err(|e| bad(&e));
    }
    if let Some((prefix, local)) = text.split_once(':') {
        if let Some(full) = prefixes.expand(prefix, local) {
            return Iri::new(full).map_err(|e| bad(&e));
        }
    }
    Iri::new(text).map_err(|e| bad(&e))
}

fn verb(predicate: &Iri, prefixes: &PrefixMap) -> String {
    if predicate.is_rdf_type() {
        "a".to_owned()
    } else {
        prefixes.render(predicate)
    }
}

fn cmd_describe(file: &Path, iri_text: &str) -> Result<u8, CliError> {
    let kb = load(file)?;
    let graph: &Graph = kb.graph();
    let prefixes = graph.prefixes();
    let iri = resolve_iri(iri_text, prefixes)?;
    let name = prefixes.render(&iri);
    let as_subject = graph.matches(Some(&iri), None, None);
    let as_object = graph.matches(None, None, Some(&Term::Iri(iri.clone())));
    let mut out = String::new();
    if as_subject.is_empty() && as_object.is_empty() {
        out.push_str(&format!("no statements about {name}\n"));
        write_stdout(&out)?;
        return Ok(0);
    }
    out.push_str("# inferred types\n");
    for class in kb.types(&iri) {
        out.push_str(&format!("{name} a {} .\n", prefixes.render(&class)));
    }
    out.push_str("# as subject\n");
    for t in &as_subject {
        out.push_str(&format!(
            "{name} {} {} .\n",
            verb(&t.predicate, prefixes),
            render_term(&t.object, prefixes)
        ));
    }
    out.push_str("# as object\n");
    for t in &as_object {
        out.push_str(&format!(
            "{} {} {name} .\n",
            prefixes.render(&t.subject),
            verb(&t.predicate, prefixes)
        ));
    }
    write_stdout(&out)?;
    Ok(0)
}
