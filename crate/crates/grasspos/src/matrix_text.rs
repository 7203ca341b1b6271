//! Plain-text matrices: one row per line, whitespace-separated entries.
//! Each entry is an integer (`-3`), a fraction (`7/2`) or a decimal literal
//! (`0.25`, `1e-3`). Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::str::FromStr;

use grasspos_core::{Matrix, Rational, Scalar};

/// Which backend the caller wants. `Auto` picks exact unless a decimal
/// literal appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeRequest {
    #[default]
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl ParsedMatrix {
    pub fn rows(&self) -> usize {
        match self {
            ParsedMatrix::Exact(m) => m.rows(),
            ParsedMatrix::Float(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            ParsedMatrix::Exact(m) => m.cols(),
            ParsedMatrix::Float(m) => m.cols(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Entry {
    Exact(Rational),
    Decimal(f64),
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn unsigned(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn parse_entry(token: &str) -> Result<Entry, String> {
    if let Some((num, den)) = token.split_once('/') {
        if !is_digits(unsigned(num)) || !is_digits(den) {
            return Err(format!("malformed fraction {token:?}"));
        }
        if den.bytes().all(|b| b == b'0') {
            return Err(format!("zero denominator in {token:?}"));
        }
        let num = num.strip_prefix('+').unwrap_or(num);
        return Rational::from_str(&format!("{num}/{den}"))
            .map(Entry::Exact)
            .map_err(|_| format!("malformed fraction {token:?}"));
    }
    let body = unsigned(token);
    if is_digits(body) {
        let token = token.strip_prefix('+').unwrap_or(token);
        return Rational::from_str(token).map(Entry::Exact).map_err(|_| format!("malformed integer {token:?}"));
    }
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mantissa_ok = (is_digits(int_part) || int_part.is_empty())
        && (is_digits(frac_part) || frac_part.is_empty())
        && !(int_part.is_empty() && frac_part.is_empty());
    let exponent_ok = exponent.is_none_or(|e| is_digits(unsigned(e)));
    if !mantissa_ok || !exponent_ok {
        return Err(format!("unrecognised entry {token:?}"));
    }
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Entry::Decimal(v)),
        _ => Err(format!("decimal {token:?} out of range")),
    }
}

/// Parses a matrix, reporting the first malformed entry with its 1-based
/// line and column.
pub fn parse_matrix(text: &str, mode: ModeRequest) -> Result<ParsedMatrix, ParseError> {
    let mut rows: Vec<Vec<Entry>> = Vec::new();
    let mut first_decimal: Option<(usize, usize)> = None;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut offset = 0;
        while let Some(skip) = line[offset..].find(|c: char| !c.is_whitespace()) {
            let start = offset + skip;
            let end = line[start..].find(char::is_whitespace).map_or(line.len(), |e| start + e);
            let token = &line[start..end];
            let column = line[..start].chars().count() + 1;
            let entry = parse_entry(token).map_err(|message| ParseError { line: idx + 1, column, message })?;
            if matches!(entry, Entry::Decimal(_)) && first_decimal.is_none() {
                first_decimal = Some((idx + 1, column));
            }
            row.push(entry);
            offset = end;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(ParseError {
                    line: idx + 1,
                    column: 1,
                    message: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "no matrix rows found".into() });
    }

    let use_float = match (mode, first_decimal) {
        (ModeRequest::Exact, Some((line, column))) => {
            return Err(ParseError {
                line,
                column,
                message: "decimal literal not allowed in exact mode".into(),
            })
        }
        (ModeRequest::Float, _) | (ModeRequest::Auto, Some(_)) => true,
        _ => false,
    };
    Ok(if use_float {
        ParsedMatrix::Float(to_matrix(
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|e| match e {
                            Entry::Exact(q) => q.to_f64(),
                            Entry::Decimal(v) => v,
                        })
                        .collect()
                })
                .collect(),
        ))
    } else {
        ParsedMatrix::Exact(to_matrix(
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|e| match e {
                            Entry::Exact(q) => q,
                            Entry::Decimal(_) => unreachable!("decimals force floating mode"),
                        })
                        .collect()
                })
                .collect(),
        ))
    })
}

fn to_matrix<S: Scalar>(rows: Vec<Vec<S>>) -> Matrix<S> {
    Matrix::from_rows(rows).expect("rows checked for equal length")
}

/// Inverse of [`parse_matrix`]: exact entries print as `a/b`, floats with
/// a decimal point or exponent so they parse back as floats.
pub fn format_matrix<S: TextEntry>(m: &Matrix<S>) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(TextEntry::to_text).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub trait TextEntry: Scalar {
    fn to_text(&self) -> String;
}

impl TextEntry for Rational {
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl TextEntry for f64 {
    fn to_text(&self) -> String {
        // Debug keeps a decimal point on integral values and round-trips
        format!("{self:?}")
    }
}
