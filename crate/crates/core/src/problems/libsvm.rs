//! LIBSVM sparse text format: `label idx:val idx:val ...`, one sample per line.
//!
//! Indices are 1-based and strictly increasing within a line. Blank lines and
//! `#` comments are skipped. Labels are mapped by sign to `±1`.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseRow {
    pub label: f64,
    /// `(index, value)` pairs, 1-based and strictly increasing.
    pub features: Vec<(usize, f64)>,
}

impl SparseRow {
    /// `aᵀx` for a dense `x` indexed from zero.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.features.iter().map(|&(i, v)| v * x[i - 1]).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseDataset {
    pub rows: Vec<SparseRow>,
    /// Largest feature index.
    pub dim: usize,
    /// Rows whose label was not already `±1`.
    pub relabeled: usize,
}

impl SparseDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Random sparse rows labelled by a hidden linear separator plus noise.
    pub fn synthetic(rows: usize, dim: usize, density: f64, seed: u64) -> Self {
        assert!(dim >= 1 && (0.0..=1.0).contains(&density));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let rows = (0..rows)
            .map(|_| {
                let mut features = Vec::new();
                for i in 1..=dim {
                    if rng.random::<f64>() < density {
                        features.push((i, rng.sample(StandardNormal)));
                    }
                }
                let score: f64 = features.iter().map(|&(i, v): &(usize, f64)| v * w[i - 1]).sum::<f64>()
                    + 0.1 * rng.sample::<f64, _>(StandardNormal);
                SparseRow {
                    label: if score > 0.0 { 1.0 } else { -1.0 },
                    features,
                }
            })
            .collect();
        Self { rows, dim, relabeled: 0 }
    }
}

fn error(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut column = 0;
    let mut start_col = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((start_col, &line[s..byte]));
            }
        } else if start.is_none() {
            start = Some(byte);
            start_col = column;
        }
    }
    if let Some(s) = start {
        out.push((start_col, &line[s..]));
    }
    out
}

fn parse_line(text: &str, line: usize, warned: &mut bool) -> Result<Option<(SparseRow, bool)>, ParseError> {
    let content = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    };
    let toks = tokens(content);
    let Some(&(label_col, label_tok)) = toks.first() else {
        return Ok(None);
    };
    let raw: f64 = label_tok
        .parse()
        .map_err(|_| error(line, label_col, format!("invalid label `{label_tok}`")))?;
    if !raw.is_finite() {
        return Err(error(line, label_col, "label is not finite"));
    }
    let label = if raw > 0.0 { 1.0 } else { -1.0 };
    let relabeled = raw != label;
    if relabeled && !*warned {
        log::warn!("line {line}: label {raw} mapped to {label}");
        *warned = true;
    }
    let mut features = Vec::with_capacity(toks.len() - 1);
    let mut last = 0usize;
    for &(col, tok) in &toks[1..] {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| error(line, col, format!("expected `index:value`, found `{tok}`")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| error(line, col, format!("invalid index `{idx}`")))?;
        if idx < 1 {
            return Err(error(line, col, "indices start at 1"));
        }
        if idx <= last {
            return Err(error(line, col, format!("index {idx} does not increase (previous {last})")));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| error(line, col + idx.to_string().len() + 1, format!("invalid value `{val}`")))?;
        if !val.is_finite() {
            return Err(error(line, col, "feature value is not finite"));
        }
        features.push((idx, val));
        last = idx;
    }
    Ok(Some((SparseRow { label, features }, relabeled)))
}

/// Parse a whole LIBSVM document.
pub fn parse(text: &str) -> Result<SparseDataset, ParseError> {
    let mut data = SparseDataset::default();
    let mut warned = false;
    for (i, line) in text.lines().enumerate() {
        if let Some((row, relabeled)) = parse_line(line, i + 1, &mut warned)? {
            data.dim = data.dim.max(row.features.last().map_or(0, |f| f.0));
            data.relabeled += usize::from(relabeled);
            data.rows.push(row);
        }
    }
    Ok(data)
}

/// Parse from a reader, line by line.
pub fn parse_reader<R: BufRead>(reader: R) -> crate::Result<SparseDataset> {
    let mut data = SparseDataset::default();
    let mut warned = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some((row, relabeled)) = parse_line(&line, i + 1, &mut warned)? {
            data.dim = data.dim.max(row.features.last().map_or(0, |f| f.0));
            data.relabeled += usize::from(relabeled);
            data.rows.push(row);
        }
    }
    Ok(data)
}

/// Write rows back in LIBSVM format. Values use the shortest exact decimal form.
pub fn serialize(data: &SparseDataset) -> String {
    let mut out = String::new();
    for row in &data.rows {
        write!(out, "{}", row.label).unwrap();
        for &(i, v) in &row.features {
            write!(out, " {i}:{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let d = parse("+1 1:0.5 3:-2\n").unwrap();
        assert_eq!(d.rows.len(), 1);
        assert_eq!(d.rows[0].label, 1.0);
        assert_eq!(d.rows[0].features, vec![(1, 0.5), (3, -2.0)]);
        assert_eq!(d.dim, 3);
    }

    #[test]
    fn label_only_row() {
        let d = parse("-1\n").unwrap();
        assert_eq!(d.rows[0].label, -1.0);
        assert!(d.rows[0].features.is_empty());
        assert_eq!(d.dim, 0);
    }

    #[test]
    fn non_increasing_index_is_rejected() {
        let err = parse("1 3:1 2:1\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.column, 7);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let d = parse("# header\n\n1 1:1 # trailing\n  \n-1 2:3\n").unwrap();
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.dim, 2);
    }

    #[test]
    fn malformed_tokens_report_their_position() {
        let cases = [
            ("1 1:1\n1 0:2\n", 2, 3),
            ("1 1:1\n-1 2:3\nx 1:1\n", 3, 1),
            ("1 1:1 2\n", 1, 7),
            ("1 1:a\n", 1, 5),
            ("1 1:1\n\n# c\n1 2:1 2:2\n", 4, 7),
        ];
        for (text, line, column) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!((err.line, err.column), (line, column), "{text:?}: {err}");
        }
    }

    #[test]
    fn labels_are_mapped_by_sign() {
        let d = parse("2 1:1\n0 1:1\n-3 1:1\n1 1:1\n").unwrap();
        let labels: Vec<f64> = d.rows.iter().map(|r| r.label).collect();
        assert_eq!(labels, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(d.relabeled, 3);
    }

    #[test]
    fn round_trip() {
        let d = SparseDataset::synthetic(50, 20, 0.3, 1);
        let again = parse(&serialize(&d)).unwrap();
        assert_eq!(again.rows, d.rows);
        assert_eq!(parse_reader(serialize(&d).as_bytes()).unwrap().rows, d.rows);
    }
}
