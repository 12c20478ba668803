//! Source positions, token splitting and literal parsing.

use std::fmt;

use num_complex::Complex64;

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub position: Position,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(position: Position, message: impl Into<String>) -> Self {
        Self { position, severity: Severity::Error, message: message.into() }
    }

    pub fn warning(position: Position, message: impl Into<String>) -> Self {
        Self { position, severity: Severity::Warning, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {kind}: {}", self.position, self.message)
    }
}

/// A piece of one source line together with where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub text: String,
    pub pos: Position,
}

impl Spanned {
    pub fn new(text: &str, pos: Position) -> Self {
        Self { text: text.to_string(), pos }
    }

    /// The substring `[start, end)` (byte offsets), with surrounding whitespace removed.
    pub fn slice(&self, start: usize, end: usize) -> Spanned {
        let raw = &self.text[start..end];
        let lead = raw.len() - raw.trim_start().len();
        let column = self.pos.column + self.text[..start + lead].chars().count();
        Spanned { text: raw.trim().to_string(), pos: Position::new(self.pos.line, column) }
    }

    pub fn trimmed(&self) -> Spanned {
        self.slice(0, self.text.len())
    }

    /// Splits on `sep`; every piece is trimmed and keeps its own column.
    pub fn split(&self, sep: char) -> Vec<Spanned> {
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, c) in self.text.char_indices() {
            if c == sep {
                pieces.push(self.slice(start, i));
                start = i + c.len_utf8();
            }
        }
        pieces.push(self.slice(start, self.text.len()));
        pieces
    }

    /// Splits on runs of whitespace.
    pub fn words(&self) -> Vec<Spanned> {
        let mut words = Vec::new();
        let mut start: Option<usize> = None;
        for (i, c) in self.text.char_indices() {
            match (c.is_whitespace(), start) {
                (true, Some(s)) => {
                    words.push(self.slice(s, i));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            words.push(self.slice(s, self.text.len()));
        }
        words
    }

    /// Comma-separated items, none of them empty.
    pub fn list(&self) -> Result<Vec<Spanned>, Diagnostic> {
        let items = self.split(',');
        match items.iter().find(|item| item.text.is_empty()) {
            Some(empty) => Err(Diagnostic::error(empty.pos, "empty list item")),
            None => Ok(items),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.pos, message)
    }
}

/// Length in bytes of the decimal real at the start of `s`: optional sign,
/// digits with an optional fraction, optional exponent.
pub(crate) fn real_prefix(s: &[u8], allow_sign: bool) -> usize {
    let mut i = 0;
    if allow_sign && i < s.len() && (s[i] == b'+' || s[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < s.len() && s[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < s.len() && s[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return 0;
    }
    if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
        let mut j = i + 1;
        if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < s.len() && s[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

fn finite(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// A finite decimal real such as `-1.5` or `2e-3`.
pub fn parse_real(token: &Spanned) -> Result<f64, Diagnostic> {
    let s = token.text.as_str();
    let n = real_prefix(s.as_bytes(), true);
    if n == 0 || n != s.len() {
        return Err(token.error(format!("malformed number `{s}`")));
    }
    finite(s).ok_or_else(|| token.error(format!("number `{s}` is out of range")))
}

pub fn parse_usize(token: &Spanned) -> Result<usize, Diagnostic> {
    let s = token.text.as_str();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(token.error(format!("expected a non-negative integer, got `{s}`")));
    }
    s.parse().map_err(|_| token.error(format!("integer `{s}` is out of range")))
}

pub fn parse_bool(token: &Spanned) -> Result<bool, Diagnostic> {
    match token.text.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(token.error(format!("expected `true` or `false`, got `{other}`"))),
    }
}

/// `a`, `bi`, `a+bi` or `a-bi`; a bare `i` stands for `1i`. Whitespace inside
/// the literal is ignored.
pub fn parse_complex(token: &Spanned) -> Result<Complex64, Diagnostic> {
    let compact: String = token.text.chars().filter(|c| !c.is_whitespace()).collect();
    let malformed = || token.error(format!("malformed complex literal `{}`", token.text));
    let s = compact.as_bytes();
    if s.is_empty() {
        return Err(malformed());
    }
    // Leading term: a real, or an imaginary part if followed by `i`.
    let sign_len = usize::from(s[0] == b'+' || s[0] == b'-');
    let first = real_prefix(s, true);
    let number = |range: &str| finite(range).ok_or_else(|| token.error(format!("number in `{}` is out of range", token.text)));
    let unit = |sign: &[u8]| if sign == b"-" { -1.0 } else { 1.0 };

    if first == 0 {
        // Only `i`, `+i`, `-i` remain possible.
        if &s[sign_len..] == b"i" {
            return Ok(Complex64::new(0.0, unit(&s[..sign_len])));
        }
        return Err(malformed());
    }
    let a = number(&compact[..first])?;
    let rest = &s[first..];
    if rest.is_empty() {
        return Ok(Complex64::new(a, 0.0));
    }
    if rest == b"i" {
        return Ok(Complex64::new(0.0, a));
    }
    if rest[0] != b'+' && rest[0] != b'-' {
        return Err(malformed());
    }
    let tail = &rest[1..];
    let second = real_prefix(tail, false);
    if &tail[second..] != b"i" {
        return Err(malformed());
    }
    let b = if second == 0 { 1.0 } else { number(&compact[first + 1..first + 1 + second])? };
    Ok(Complex64::new(a, if rest[0] == b'-' { -b } else { b }))
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Shortest decimal text that reads back to the same `f64`.
pub fn format_real(x: f64) -> String {
    let text = format!("{x}");
    if text == "-0" {
        "0".to_string()
    } else {
        text
    }
}

/// Inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", format_real(z.re), format_real(-z.im))
    } else {
        format!("{}+{}i", format_real(z.re), format_real(z.im))
    }
}
