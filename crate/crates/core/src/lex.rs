//! Character cursor shared by the Turtle and query parsers.

use std::fmt;

/// A located syntax error. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.token.is_empty() {
            write!(f, " at {:?}", self.token)?;
        }
        Ok(())
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
    offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NumberKind {
    Integer,
    Decimal,
    Double,
}

#[derive(Clone)]
pub(crate) struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

pub(crate) fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || "{}()[];,.#<\"'".contains(c)
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor {
            src,
            offset: 0,
            line: 1,
            column: 1,
        }
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
            offset: self.offset,
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    pub fn is_eof(&self) -> bool {
        self.offset >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    /// Case-insensitive keyword test; the keyword must end at a delimiter.
    pub fn at_keyword(&self, keyword: &str) -> bool {
        let rest = self.rest();
        rest.len() >= keyword.len()
            && rest.is_char_boundary(keyword.len())
            && rest[..keyword.len()].eq_ignore_ascii_case(keyword)
            && rest[keyword.len()..]
                .chars()
                .next()
                .is_none_or(|c| !(c.is_alphanumeric() || c == '_' || c == ':' || c == '-'))
    }

    pub fn eat_keyword(&mut self, keyword: &str) -> bool {
        if self.at_keyword(keyword) {
            for _ in keyword.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    /// The word starting here, for error messages.
    pub fn token_here(&self) -> String {
        let rest = self.rest();
        if rest.is_empty() {
            return "end of input".to_owned();
        }
        let first = rest.chars().next().unwrap();
        if is_delimiter(first) && !first.is_whitespace() {
            return first.to_string();
        }
        rest.chars()
            .take_while(|&c| !c.is_whitespace())
            .take(24)
            .collect()
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        self.error_at(self.pos(), message)
    }

    pub fn error_at(&self, pos: Pos, message: impl Into<String>) -> SyntaxError {
        let probe = Cursor {
            src: self.src,
            offset: pos.offset,
            line: pos.line,
            column: pos.column,
        };
        SyntaxError {
            line: pos.line,
            column: pos.column,
            token: probe.token_here(),
            message: message.into(),
        }
    }

    /// Reads `<...>`; the cursor must be on `<`.
    pub fn read_iri_ref(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos();
        debug_assert_eq!(self.peek(), Some('<'));
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(out),
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.error_at(start, "malformed IRI reference"))
                }
                Some(c) => out.push(c),
                None => return Err(self.error_at(start, "unterminated IRI reference")),
            }
        }
    }

    /// True if a `<...>` IRI reference (not an operator) starts here.
    pub fn at_iri_ref(&self) -> bool {
        let rest = self.rest();
        if !rest.starts_with('<') {
            return false;
        }
        for c in rest[1..].chars() {
            match c {
                '>' => return true,
                c if c.is_whitespace() || c == '<' || c == '"' || c == '=' => return false,
                _ => {}
            }
        }
        false
    }

    /// Reads a single-line quoted string; the cursor must be on the quote.
    pub fn read_string(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos();
        let quote = self.bump().expect("caller checked quote");
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => {
                    return Err(self.error_at(start, "unterminated string literal"))
                }
                Some(c) if c == quote => return Ok(out),
                Some('\\') => {
                    let esc_pos = self.pos();
                    let c = match self.bump() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.read_hex_escape(4, esc_pos)?,
                        Some('U') => self.read_hex_escape(8, esc_pos)?,
                        _ => return Err(self.error_at(esc_pos, "invalid escape sequence")),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn read_hex_escape(&mut self, digits: usize, at: Pos) -> Result<char, SyntaxError> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error_at(at, "invalid unicode escape"))?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error_at(at, "invalid unicode code point"))
    }

    /// True if a numeric literal starts here.
    pub fn at_number(&self) -> bool {
        let mut chars = self.rest().chars();
        let mut c = chars.next();
        if matches!(c, Some('+') | Some('-')) {
            c = chars.next();
        }
        match c {
            Some(d) if d.is_ascii_digit() => true,
            Some('.') => chars.next().is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        }
    }

    /// Reads an integer, decimal or exponent-form number. A trailing `.`
    /// not followed by a digit is left for the caller (statement end).
    pub fn read_number(&mut self) -> (NumberKind, String) {
        let mut text = String::new();
        let mut kind = NumberKind::Integer;
        if let Some(sign @ ('+' | '-')) = self.peek() {
            text.push(sign);
            self.bump();
        }
        self.take_digits(&mut text);
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            kind = NumberKind::Decimal;
            text.push('.');
            self.bump();
            self.take_digits(&mut text);
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let sign_then_digit = matches!(self.peek_nth(1), Some('+') | Some('-'))
                && self.peek_nth(2).is_some_and(|c| c.is_ascii_digit());
            if sign_then_digit || self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
                kind = NumberKind::Double;
                text.push(self.bump().unwrap());
                if sign_then_digit {
                    text.push(self.bump().unwrap());
                }
                self.take_digits(&mut text);
            }
        }
        (kind, text)
    }

    fn take_digits(&mut self, text: &mut String) {
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.bump();
        }
    }

    /// Reads `prefix:local` if one starts here. The local part may contain
    /// `.` but never ends with one.
    pub fn read_prefixed_name(&mut self) -> Option<(String, String)> {
        let rest = self.rest();
        let prefix_len = rest
            .char_indices()
            .take_while(|&(i, c)| {
                if i == 0 {
                    c.is_ascii_alphabetic()
                } else {
                    c.is_ascii_alphanumeric() || c == '_' || c == '-'
                }
            })
            .count();
        if !rest[prefix_len..].starts_with(':') {
            return None;
        }
        let local_start = prefix_len + 1;
        let mut local_len = rest[local_start..]
            .chars()
            .take_while(|&c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
            .count();
        while local_len > 0 && rest.as_bytes()[local_start + local_len - 1] == b'.' {
            local_len -= 1;
        }
        let prefix = rest[..prefix_len].to_owned();
        let local = rest[local_start..local_start + local_len].to_owned();
        for _ in 0..local_start + local_len {
            self.bump();
        }
        Some((prefix, local))
    }

    /// Reads `[A-Za-z0-9_]*`.
    pub fn read_name(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
            out.push(c);
            self.bump();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixed_names_drop_trailing_dot() {
        let mut c = Cursor::new(":ANNConfiguration.\n");
        assert_eq!(
            c.read_prefixed_name(),
            Some((String::new(), "ANNConfiguration".to_owned()))
        );
        assert_eq!(c.peek(), Some('.'));
        let mut c = Cursor::new("xsd:double ");
        assert_eq!(
            c.read_prefixed_name(),
            Some(("xsd".to_owned(), "double".to_owned()))
        );
        assert_eq!(Cursor::new("select").read_prefixed_name(), None);
    }

    #[test]
    fn numbers() {
        let mut c = Cursor::new("5.");
        assert_eq!(c.read_number(), (NumberKind::Integer, "5".to_owned()));
        let mut c = Cursor::new("-0.68 ");
        assert_eq!(c.read_number(), (NumberKind::Decimal, "-0.68".to_owned()));
        let mut c = Cursor::new("1.2e-3");
        assert_eq!(c.read_number(), (NumberKind::Double, "1.2e-3".to_owned()));
    }

    #[test]
    fn unterminated_string_reports_start() {
        let mut c = Cursor::new("\n  \"abc\n");
        c.skip_trivia();
        let err = c.read_string().unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn escapes() {
        let mut c = Cursor::new(r#""a\"b\né""#);
        assert_eq!(c.read_string().unwrap(), "a\"b\né");
    }

    #[test]
    fn iri_ref_vs_operator() {
        assert!(Cursor::new("<http://x/y>").at_iri_ref());
        assert!(!Cursor::new("< 3").at_iri_ref());
        assert!(!Cursor::new("<= 3").at_iri_ref());
    }
}
