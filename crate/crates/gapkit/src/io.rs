//! Point files, measure files and CSV series.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gapkit_core::{AtomicMeasure, Complex64};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse {text:?}")]
    Parse { line: usize, text: String },
    #[error(transparent)]
    Core(#[from] gapkit_core::Error),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// One real per line; `#` starts a comment.
pub fn parse_points(text: &str) -> Result<Vec<f64>, IoError> {
    content_lines(text)
        .map(|(line, l)| l.parse::<f64>().map_err(|_| IoError::Parse { line, text: l.to_string() }))
        .collect()
}

pub fn read_points(path: &Path) -> Result<Vec<f64>, IoError> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn format_points(points: &[f64]) -> String {
    points.iter().map(|p| format!("{p}\n")).collect()
}

/// `support weight_re weight_im` per line.
pub fn parse_measure(text: &str) -> Result<AtomicMeasure, IoError> {
    let mut pairs = Vec::new();
    for (line, l) in content_lines(text) {
        let parts: Vec<f64> = l
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| IoError::Parse { line, text: l.to_string() })?;
        if parts.len() != 3 {
            return Err(IoError::Parse { line, text: l.to_string() });
        }
        pairs.push((parts[0], Complex64::new(parts[1], parts[2])));
    }
    Ok(AtomicMeasure::from_pairs(pairs)?)
}

pub fn read_measure(path: &Path) -> Result<AtomicMeasure, IoError> {
    parse_measure(&fs::read_to_string(path)?)
}

pub fn format_measure(mu: &AtomicMeasure) -> String {
    let mut out = String::from("# support weight_re weight_im\n");
    for a in mu.atoms() {
        let _ = writeln!(out, "{} {} {}", a.support, a.weight.re, a.weight.im);
    }
    out
}

pub fn write_measure(path: &Path, mu: &AtomicMeasure) -> Result<(), IoError> {
    Ok(fs::write(path, format_measure(mu))?)
}

pub fn format_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in rows {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

pub fn write_csv(path: &Path, header: &str, rows: &[(f64, f64)]) -> Result<(), IoError> {
    Ok(fs::write(path, format_csv(header, rows))?)
}

pub const SCAN_HEADER: &str = "x,abs_ft";
pub const TRACE_HEADER: &str = "y,trace";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_with_comments() {
        let p = parse_points("# header\n1.5\n\n-2 # trailing\n").unwrap();
        assert_eq!(p, vec![1.5, -2.0]);
        assert!(matches!(parse_points("1\nx\n"), Err(IoError::Parse { line: 2, .. })));
        assert_eq!(parse_points(&format_points(&[0.1, 3.0])).unwrap(), vec![0.1, 3.0]);
    }

    #[test]
    fn measure_round_trip() {
        let mu = AtomicMeasure::from_pairs([(1.0, Complex64::new(0.25, -1e-17)), (-3.5, Complex64::new(2.0, 0.5))]).unwrap();
        let back = parse_measure(&format_measure(&mu)).unwrap();
        assert_eq!(back, mu);
        assert!(parse_measure("1 2\n").is_err());
        assert!(parse_measure("1 2 3\n1 0 0\n").is_err());
    }

    #[test]
    fn csv_header() {
        let s = format_csv(SCAN_HEADER, &[(0.5, 1e-9)]);
        assert!(s.starts_with("x,abs_ft\n"));
    }
}
