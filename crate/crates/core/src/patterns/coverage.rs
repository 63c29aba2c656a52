use serde::{Deserialize, Serialize};

use super::PatternImage;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Percent of the active area lit by at least one pattern.
    pub cp: f64,
    /// Columns between the first and last line centers.
    pub active_span: usize,
}

/// Coverage percentage of a pattern set relative to the area between its
/// first and last lines (`span`, inclusive line centers) rather than the
/// whole projector plane. ON pixels are unioned across the set; the result
/// saturates at 100.
pub fn coverage_percentage(
    patterns: &[PatternImage],
    (first, last): (usize, usize),
) -> Result<CoverageReport> {
    let Some(head) = patterns.first() else {
        return Err(Error::Empty("pattern list"));
    };
    let active_span = last.saturating_sub(first);
    if active_span == 0 {
        return Err(Error::param("span", "zero-width span"));
    }
    let mut union = head.clone();
    for p in &patterns[1..] {
        if (p.width(), p.height()) != (union.width(), union.height()) {
            return Err(Error::DimensionMismatch(
                "patterns differ in grid size".into(),
            ));
        }
        union.union_with(p);
    }
    let area = (active_span * union.height()) as f64;
    let cp = (100.0 * union.on_pixel_count() as f64 / area).min(100.0);
    Ok(CoverageReport { cp, active_span })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::generate_line_pattern;

    #[test]
    fn solid_span_is_full() {
        let mut p = PatternImage::blank(912, 1140);
        p.fill_rect(56, 0, 800, 1140);
        let r = coverage_percentage(&[p], (56, 856)).unwrap();
        assert_eq!(r.cp, 100.0);
        assert_eq!(r.active_span, 800);
    }

    #[test]
    fn twenty_three_lines() {
        let (pats, _) = generate_line_pattern((912, 1140), 23, 2, (56, 856)).unwrap();
        let r = coverage_percentage(&pats, (56, 856)).unwrap();
        let oracle = 100.0 * (23 * 2 * 1140) as f64 / (800 * 1140) as f64;
        assert!((r.cp - oracle).abs() < 1e-12);
        assert!((r.cp - 5.75).abs() < 1e-12);
    }

    #[test]
    fn half_span_doubles_cp() {
        let (wide, _) = generate_line_pattern((912, 1140), 23, 2, (56, 856)).unwrap();
        let (narrow, _) = generate_line_pattern((912, 1140), 23, 2, (56, 456)).unwrap();
        let a = coverage_percentage(&wide, (56, 856)).unwrap().cp;
        let b = coverage_percentage(&narrow, (56, 456)).unwrap().cp;
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(coverage_percentage(&[], (0, 10)).is_err());
        let p = PatternImage::solid(4, 4);
        assert!(coverage_percentage(&[p], (3, 3)).is_err());
    }
}
