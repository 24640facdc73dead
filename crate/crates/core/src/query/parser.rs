use crate::graph::PrefixMap;
use crate::lex::{Cursor, NumberKind, Pos, SyntaxError};
use crate::term::{Datatype, Iri, Literal, Term};

use super::ast::*;
use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Word(String),
    Str(String),
    Num(NumberKind, String),
    Punct(&'static str),
    Eof,
}

const GROUP_KEYWORDS: [&str; 8] = [
    "FILTER", "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES",
];

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

const PUNCTS: [&str; 22] = [
    "^^", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", ".", ";", ",", "*", "+", "=", "<", ">",
    "!", "/", "|", "^",
];

fn tokenize(src: &str) -> Result<(Vec<Token>, Cursor<'_>), SyntaxError> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        cur.skip_trivia();
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok((out, cur));
        };
        let tok = if (c == '?' || c == '$')
            && cur.peek_nth(1).is_some_and(|n| n.is_alphanumeric() || n == '_')
        {
            cur.bump();
            Tok::Var(cur.read_name())
        } else if c == '<' && cur.at_iri_ref() {
            Tok::IriRef(cur.read_iri_ref()?)
        } else if c == '"' || c == '\'' {
            Tok::Str(cur.read_string()?)
        } else if (c == '-' || c == '+' || c == '.' || c.is_ascii_digit()) && cur.at_number() {
            let (kind, text) = cur.read_number();
            Tok::Num(kind, text)
        } else if let Some((prefix, local)) = cur.read_prefixed_name() {
            Tok::PName(prefix, local)
        } else if c.is_alphabetic() || c == '_' {
            Tok::Word(cur.read_name())
        } else if let Some(p) = PUNCTS.iter().find(|p| cur.rest().starts_with(**p)) {
            cur.eat_str(p);
            Tok::Punct(p)
        } else if c == '@' || c == '[' || c == ']' || c == '?' {
            cur.bump();
            Tok::Punct(match c {
                '@' => "@",
                '[' => "[",
                ']' => "]",
                _ => "?",
            })
        } else {
            return Err(cur.error("unexpected character"));
        };
        out.push(Token { tok, pos });
    }
}

/// Parses a query with the default prefixes (`:` is the vocabulary
/// namespace, plus rdf, rdfs, owl and xsd).
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse_query_with(text, PrefixMap::annetto())
}

/// Parses a query; `PREFIX` declarations in the text override `prefixes`.
pub fn parse_query_with(text: &str, prefixes: PrefixMap) -> Result<Query, QueryError> {
    let (tokens, cursor) = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        cursor,
        prefixes,
    };
    parser.prologue()?;
    let query = match parser.peek() {
        Tok::Word(w) if w.eq_ignore_ascii_case("select") => parser.select()?,
        Tok::Word(w) => {
            let upper = w.to_ascii_uppercase();
            if ["CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR"]
                .contains(&upper.as_str())
            {
                return Err(parser.unsupported(&upper));
            }
            return Err(parser.syntax("expected SELECT"));
        }
        _ => return Err(parser.syntax("expected SELECT")),
    };
    if parser.peek() != &Tok::Eof {
        return Err(parser.trailing());
    }
    Ok(query)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    idx: usize,
    cursor: Cursor<'a>,
    prefixes: PrefixMap,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.idx].pos
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn syntax(&self, message: &str) -> QueryError {
        QueryError::Syntax(self.cursor.error_at(self.pos(), message))
    }

    fn syntax_at(&self, pos: Pos, message: &str) -> QueryError {
        QueryError::Syntax(self.cursor.error_at(pos, message))
    }

    fn unsupported(&self, feature: &str) -> QueryError {
        let pos = self.pos();
        QueryError::Unsupported {
            feature: feature.to_owned(),
            line: pos.line,
            column: pos.column,
        }
    }

    fn invalid(&self, pos: Pos, message: String) -> QueryError {
        QueryError::Invalid {
            line: pos.line,
            column: pos.column,
            message,
        }
    }

    fn trailing(&self) -> QueryError {
        match self.peek() {
            Tok::Word(w) => {
                let upper = w.to_ascii_uppercase();
                let feature = match upper.as_str() {
                    "ORDER" => Some("ORDER BY"),
                    "LIMIT" => Some("LIMIT"),
                    "OFFSET" => Some("OFFSET"),
                    "VALUES" => Some("VALUES"),
                    _ => None,
                };
                match feature {
                    Some(f) => self.unsupported(f),
                    None => self.syntax("unexpected token"),
                }
            }
            _ => self.syntax("unexpected token"),
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(word))
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.is_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{p}'")))
        }
    }

    fn expect_var(&mut self) -> Result<Var, QueryError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(Var(v))
            }
            _ => Err(self.syntax("expected a variable")),
        }
    }

    fn prologue(&mut self) -> Result<(), QueryError> {
        loop {
            if self.is_word("BASE") {
                return Err(self.unsupported("BASE"));
            }
            if !self.eat_word("PREFIX") {
                return Ok(());
            }
            let (prefix, local) = match self.next().tok {
                Tok::PName(p, l) => (p, l),
                _ => return Err(self.syntax("expected a prefix name")),
            };
            if !local.is_empty() {
                return Err(self.syntax("expected a prefix name"));
            }
            let namespace = match self.next().tok {
                Tok::IriRef(iri) => iri,
                _ => return Err(self.syntax("expected an IRI reference")),
            };
            self.prefixes.insert(&prefix, &namespace);
        }
    }

    fn select(&mut self) -> Result<Query, QueryError> {
        let select_pos = self.pos();
        self.next();
        if self.is_word("REDUCED") {
            return Err(self.unsupported("REDUCED"));
        }
        let distinct = self.eat_word("DISTINCT");
        let mut projection = Vec::new();
        let mut star = false;
        loop {
            match self.peek().clone() {
                Tok::Var(v) => {
                    self.next();
                    projection.push((self.tokens[self.idx - 1].pos, SelectItem::Var(Var(v))));
                }
                Tok::Punct("*") if projection.is_empty() && !star => {
                    self.next();
                    star = true;
                }
                Tok::Punct("(") => {
                    let pos = self.pos();
                    self.next();
                    let item = self.aggregate()?;
                    projection.push((pos, item));
                }
                _ => break,
            }
        }
        if projection.is_empty() && !star {
            return Err(self.syntax("expected a projection"));
        }
        if self.is_word("FROM") {
            return Err(self.unsupported("FROM"));
        }
        self.eat_word("WHERE");
        let pattern = self.group()?;
        let mut group_by = Vec::new();
        if self.eat_word("GROUP") {
            if !self.eat_word("BY") {
                return Err(self.syntax("expected BY"));
            }
            while let Tok::Var(_) = self.peek() {
                let pos = self.pos();
                let v = self.expect_var()?;
                group_by.push((pos, v));
            }
            if group_by.is_empty() {
                if self.is_punct("(") {
                    return Err(self.unsupported("GROUP BY expression"));
                }
                return Err(self.syntax("expected a variable"));
            }
        }
        let mut having = Vec::new();
        let having_pos = self.pos();
        if self.eat_word("HAVING") {
            while self.is_punct("(") {
                self.next();
                let e = self.expr(true)?;
                self.expect_punct(")")?;
                having.push(e);
            }
            if having.is_empty() {
                return Err(self.syntax("expected '('"));
            }
        }

        let in_scope = pattern.in_scope_vars();
        let projection = if star {
            if !group_by.is_empty() {
                return Err(self.invalid(select_pos, "SELECT * cannot be combined with GROUP BY".into()));
            }
            in_scope.iter().cloned().map(SelectItem::Var).collect()
        } else {
            self.check_projection(&projection, &group_by, &in_scope)?;
            projection.into_iter().map(|(_, item)| item).collect()
        };
        let group_by: Vec<Var> = group_by.into_iter().map(|(_, v)| v).collect();
        let query = Query {
            distinct,
            projection,
            pattern,
            group_by,
            having,
        };
        if !query.having.is_empty() {
            let mut allowed: Vec<Var> = query.group_by.clone();
            allowed.extend(query.projection.iter().filter_map(|i| match i {
                SelectItem::Count { alias, .. } => Some(alias.clone()),
                SelectItem::Var(_) => None,
            }));
            if !query.is_aggregate() {
                return Err(self.invalid(having_pos, "HAVING requires grouping".into()));
            }
            for e in &query.having {
                if let Some(v) = e.vars().into_iter().find(|v| !allowed.contains(v)) {
                    return Err(self.invalid(
                        having_pos,
                        format!("{v} in HAVING is neither grouped nor an aggregate alias"),
                    ));
                }
            }
        }
        Ok(query)
    }

    fn check_projection(
        &self,
        projection: &[(Pos, SelectItem)],
        group_by: &[(Pos, Var)],
        in_scope: &[Var],
    ) -> Result<(), QueryError> {
        for (pos, v) in group_by {
            if !in_scope.contains(v) {
                return Err(self.invalid(*pos, format!("{v} is not bound in WHERE")));
            }
        }
        let grouped: Vec<&Var> = group_by.iter().map(|(_, v)| v).collect();
        let aggregate = !group_by.is_empty()
            || projection
                .iter()
                .any(|(_, i)| matches!(i, SelectItem::Count { .. }));
        let mut seen: Vec<&Var> = Vec::new();
        for (pos, item) in projection {
            let out = item.output_var();
            if seen.contains(&out) {
                return Err(self.invalid(*pos, format!("{out} is projected twice")));
            }
            seen.push(out);
            match item {
                SelectItem::Var(v) => {
                    if !in_scope.contains(v) {
                        return Err(self.invalid(*pos, format!("{v} is not bound in WHERE")));
                    }
                    if aggregate && !grouped.contains(&v) {
                        return Err(self.invalid(
                            *pos,
                            format!("{v} is projected but not grouped"),
                        ));
                    }
                }
                SelectItem::Count { arg, alias, .. } => {
                    if in_scope.contains(alias) {
                        return Err(self.invalid(
                            *pos,
                            format!("alias {alias} is already bound in WHERE"),
                        ));
                    }
                    if let Some(arg) = arg {
                        if !in_scope.contains(arg) {
                            return Err(self.invalid(*pos, format!("{arg} is not bound in WHERE")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// After `(` in a projection: `COUNT( [DISTINCT] ?x | * ) AS ?alias )`.
    fn aggregate(&mut self) -> Result<SelectItem, QueryError> {
        let name = match self.peek() {
            Tok::Word(w) => w.to_ascii_uppercase(),
            _ => return Err(self.unsupported("projection expression")),
        };
        match name.as_str() {
            "COUNT" => {}
            "SUM" | "AVG" | "MIN" | "MAX" | "SAMPLE" | "GROUP_CONCAT" => {
                return Err(self.unsupported(&format!("{name} aggregate")))
            }
            _ => return Err(self.unsupported("projection expression")),
        }
        self.next();
        self.expect_punct("(")?;
        let distinct = self.eat_word("DISTINCT");
        let arg = if self.eat_punct("*") {
            None
        } else {
            Some(self.expect_var()?)
        };
        self.expect_punct(")")?;
        if !self.eat_word("AS") {
            return Err(self.syntax("expected AS"));
        }
        let alias = self.expect_var()?;
        self.expect_punct(")")?;
        Ok(SelectItem::Count {
            arg,
            distinct,
            alias,
        })
    }

    fn group(&mut self) -> Result<GroupPattern, QueryError> {
        self.expect_punct("{")?;
        let mut group = GroupPattern::default();
        loop {
            match self.peek().clone() {
                Tok::Punct("}") => {
                    self.next();
                    return Ok(group);
                }
                Tok::Punct(".") => {
                    self.next();
                }
                Tok::Punct("{") => {
                    if matches!(self.peek_at(1), Tok::Word(w) if w.eq_ignore_ascii_case("select")) {
                        self.next();
                        let sub = self.select()?;
                        if !self.is_punct("}") {
                            return Err(self.trailing());
                        }
                        self.next();
                        group.subselects.push(sub);
                    } else {
                        return Err(self.unsupported("nested group pattern"));
                    }
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.next();
                    if self.is_word("EXISTS") || self.is_word("NOT") {
                        return Err(self.unsupported("EXISTS"));
                    }
                    if let Tok::Word(f) = self.peek() {
                        let f = f.to_ascii_uppercase();
                        return Err(self.unsupported(&format!("function {f}")));
                    }
                    self.expect_punct("(")?;
                    let e = self.expr(false)?;
                    self.expect_punct(")")?;
                    group.filters.push(e);
                }
                Tok::Word(w) => {
                    let upper = w.to_ascii_uppercase();
                    match upper.as_str() {
                        "OPTIONAL" | "UNION" | "MINUS" | "GRAPH" | "SERVICE" | "BIND"
                        | "VALUES" => return Err(self.unsupported(&upper)),
                        "A" => return Err(self.syntax("unexpected token")),
                        _ => self.triples(&mut group.triples)?,
                    }
                }
                Tok::Eof => return Err(self.syntax("expected '}'")),
                _ => self.triples(&mut group.triples)?,
            }
        }
    }

    fn triples(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.pattern_term(true)?;
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.pattern_term(false)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                break;
            }
            while self.eat_punct(";") {}
            if self.is_punct(".") || self.is_punct("}") {
                break;
            }
        }
        let keyword_follows = GROUP_KEYWORDS.iter().any(|k| self.is_word(k));
        if !(self.is_punct(".") || self.is_punct("}") || self.is_punct("{") || keyword_follows) {
            return Err(self.syntax("expected '.' or '}'"));
        }
        Ok(())
    }

    fn verb(&mut self) -> Result<Predicate, QueryError> {
        let pos = self.pos();
        let iri = match self.peek().clone() {
            Tok::Word(w) if w == "a" => {
                self.next();
                Iri::rdf_type()
            }
            Tok::Var(v) => {
                self.next();
                if self.is_punct("+") {
                    return Err(self.invalid(pos, "'+' applies only to IRI predicates".into()));
                }
                return Ok(Predicate::Var(Var(v)));
            }
            Tok::IriRef(_) | Tok::PName(..) => self.iri()?,
            Tok::Punct("^") => return Err(self.unsupported("inverse property path")),
            Tok::Punct("(") => return Err(self.unsupported("property path group")),
            _ => return Err(self.syntax("expected a predicate")),
        };
        match self.peek() {
            Tok::Punct("+") => {
                self.next();
                Ok(Predicate::Path(iri))
            }
            Tok::Punct(op @ ("*" | "?" | "/" | "|")) => {
                let op = *op;
                Err(self.unsupported(&format!("property path '{op}'")))
            }
            _ => Ok(Predicate::Iri(iri)),
        }
    }

    fn iri(&mut self) -> Result<Iri, QueryError> {
        let token = self.next();
        let text = match token.tok {
            Tok::IriRef(text) => text,
            Tok::PName(prefix, local) => {
                match self.prefixes.expand(&prefix, &local) {
                    Some(full) => full,
                    None => {
                        return Err(self.syntax_at(token.pos, &format!("unknown prefix '{prefix}:'")))
                    }
                }
            }
            _ => return Err(self.syntax_at(token.pos, "expected an IRI")),
        };
        Iri::new(&text).map_err(|e| self.invalid(token.pos, e.to_string()))
    }

    fn pattern_term(&mut self, subject: bool) -> Result<PatternTerm, QueryError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(PatternTerm::Var(Var(v)))
            }
            Tok::Punct("[") => Err(self.unsupported("blank node")),
            Tok::Punct("(") => Err(self.unsupported("collection")),
            Tok::Word(w) if w.starts_with('_') => Err(self.unsupported("blank node")),
            _ if subject => match self.peek() {
                Tok::IriRef(_) | Tok::PName(..) => Ok(PatternTerm::Const(Term::Iri(self.iri()?))),
                _ => Err(self.syntax("expected a subject")),
            },
            _ => Ok(PatternTerm::Const(self.constant()?)),
        }
    }

    fn constant(&mut self) -> Result<Term, QueryError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::IriRef(_) | Tok::PName(..) => Ok(Term::Iri(self.iri()?)),
            Tok::Str(text) => {
                self.next();
                if self.is_punct("@") {
                    return Err(self.unsupported("language tag"));
                }
                if self.eat_punct("^^") {
                    let dt_pos = self.pos();
                    let dt = self.iri()?;
                    let datatype = Datatype::from_iri(dt.as_str())
                        .map_err(|e| self.invalid(dt_pos, e.to_string()))?;
                    let lit = Literal::new(&text, datatype)
                        .map_err(|e| self.invalid(pos, e.to_string()))?;
                    Ok(Term::Literal(lit))
                } else {
                    Ok(Term::Literal(Literal::string(text)))
                }
            }
            Tok::Num(kind, text) => {
                self.next();
                let datatype = match kind {
                    NumberKind::Integer => Datatype::Integer,
                    NumberKind::Decimal | NumberKind::Double => Datatype::Double,
                };
                let lit = Literal::new(&text, datatype).map_err(|e| self.invalid(pos, e.to_string()))?;
                Ok(Term::Literal(lit))
            }
            Tok::Word(w) if w == "true" || w == "false" => {
                self.next();
                Ok(Term::Literal(Literal::boolean(w == "true")))
            }
            _ => Err(self.syntax("expected a term")),
        }
    }

    fn expr(&mut self, having: bool) -> Result<Expr, QueryError> {
        let mut left = self.and_expr(having)?;
        while self.eat_punct("||") {
            let right = self.and_expr(having)?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expr(&mut self, having: bool) -> Result<Expr, QueryError> {
        let mut left = self.unary(having)?;
        while self.eat_punct("&&") {
            let right = self.unary(having)?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self, having: bool) -> Result<Expr, QueryError> {
        if self.eat_punct("!") {
            return Ok(Expr::Not(Box::new(self.unary(having)?)));
        }
        if self.eat_punct("(") {
            let e = self.expr(having)?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        let left = self.operand(having)?;
        let op = match self.peek() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">=") => CompareOp::Ge,
            Tok::Punct("+" | "-" | "*" | "/") | Tok::Num(..) => {
                return Err(self.unsupported("arithmetic"))
            }
            _ => return Err(self.unsupported("effective boolean value")),
        };
        self.next();
        let right = self.operand(having)?;
        if matches!(self.peek(), Tok::Punct("+" | "-" | "*" | "/") | Tok::Num(..)) {
            return Err(self.unsupported("arithmetic"));
        }
        Ok(Expr::Compare(op, left, right))
    }

    fn operand(&mut self, having: bool) -> Result<Operand, QueryError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(Operand::Var(Var(v)))
            }
            Tok::Word(w) if w != "true" && w != "false" => {
                let upper = w.to_ascii_uppercase();
                if having && ["COUNT", "SUM", "AVG", "MIN", "MAX"].contains(&upper.as_str()) {
                    return Err(self.unsupported("aggregate in HAVING"));
                }
                Err(self.unsupported(&format!("function {upper}")))
            }
            _ => Ok(Operand::Const(self.constant()?)),
        }
    }
}
