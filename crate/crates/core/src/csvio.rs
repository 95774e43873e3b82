//! Shared reader/writer for the labeled-row CSV layout used by window and
//! feature datasets: `label,<p>1,...,<p>k` where `<p>` is `v` for raw window
//! values and `f` for feature values.

use crate::data::Label;
use crate::error::{Error, Result};

pub(crate) fn emit_labeled<'a>(
    rows: impl Iterator<Item = (Label, &'a [f64])>,
    prefix: char,
    width: usize,
) -> String {
    let mut out = String::new();
    out.push_str("label");
    for i in 1..=width {
        out.push(',');
        out.push(prefix);
        out.push_str(&i.to_string());
    }
    out.push('\n');
    for (label, values) in rows {
        debug_assert_eq!(values.len(), width);
        out.push_str(label.as_csv());
        for v in values {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses a labeled-row CSV, checking that the header prefix matches and that
/// every row has the header's arity. Returns the rows and the value width.
pub(crate) fn parse_labeled(text: &str, expected_prefix: char) -> Result<(Vec<(Label, Vec<f64>)>, usize)> {
    let mut lines = text.lines().enumerate();
    let width = match lines.next() {
        Some((_, header)) => parse_header(header.trim_end_matches('\r'), expected_prefix)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty input, missing header".into(),
            })
        }
    };
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        let mut fields = row.split(',');
        let label_field = fields.next().unwrap_or("");
        let label = Label::from_csv(label_field).ok_or_else(|| Error::Parse {
            line,
            message: format!("label must be `-1` or `1`, got `{label_field}`"),
        })?;
        let mut values = Vec::with_capacity(width);
        for field in fields {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric field `{field}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite field `{field}`"),
                });
            }
            values.push(v);
        }
        if values.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} values, got {}", values.len()),
            });
        }
        rows.push((label, values));
    }
    Ok((rows, width))
}

/// Reads the value-column prefix (`v` or `f`) from a labeled-row CSV header.
pub(crate) fn detect_prefix(text: &str) -> Option<char> {
    let header = text.lines().next()?.trim_end_matches('\r');
    let mut cols = header.split(',');
    if cols.next()? != "label" {
        return None;
    }
    cols.next()?.chars().next()
}

fn parse_header(header: &str, prefix: char) -> Result<usize> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let mut cols = header.split(',');
    if cols.next() != Some("label") {
        return Err(bad(format!("expected header starting with `label`, got `{header}`")));
    }
    let mut width = 0usize;
    for col in cols {
        width += 1;
        let expected = format!("{prefix}{width}");
        if col != expected {
            return Err(bad(format!("expected column `{expected}`, got `{col}`")));
        }
    }
    if width == 0 {
        return Err(bad("header has no value columns".into()));
    }
    Ok(width)
}
