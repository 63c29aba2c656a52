use serde::{Deserialize, Serialize};

use super::PatternImage;
use crate::{Error, Result};

/// Projector columns carried by the depth patterns, one per pattern, in
/// projection order (`Columns[m]`).
///
/// Entries are the centers of the lit column groups, so a width-2 line
/// starting at column 56 is stored as 56.5.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnTable(Vec<f64>);

impl ColumnTable {
    pub fn new(columns: Vec<f64>, projector_width: usize) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Pattern("column table is empty".into()));
        }
        if columns.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Pattern("columns must be strictly increasing".into()));
        }
        if columns
            .iter()
            .any(|&c| !(c >= 0.0 && c <= (projector_width - 1) as f64))
        {
            return Err(Error::Pattern(format!(
                "column outside projector width {projector_width}"
            )));
        }
        Ok(Self(columns))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        self.0.get(m).copied()
    }
}

/// Inclusive span of line centers on the logical grid.
pub const DEFAULT_SPAN: (usize, usize) = (56, 856);
pub const DEFAULT_LINE_WIDTH: usize = 2;

/// Evenly spaced starts of `n` groups of `group_width` columns whose
/// centers run from `first` to `last`. Enforces a gap of at least one
/// dark column between groups.
fn column_starts(
    grid_width: usize,
    n: usize,
    group_width: usize,
    (first, last): (usize, usize),
) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::param("n", "at least one pattern is required"));
    }
    if group_width == 0 {
        return Err(Error::param("line_width", "must be > 0"));
    }
    if first > last || last >= grid_width {
        return Err(Error::param(
            "span",
            format!("[{first}, {last}] not within projector width {grid_width}"),
        ));
    }
    let half = (group_width as f64 - 1.0) / 2.0;
    let step = if n > 1 {
        (last - first) as f64 / (n - 1) as f64
    } else {
        0.0
    };
    let mut starts = Vec::with_capacity(n);
    for k in 0..n {
        let center = if n > 1 {
            first as f64 + k as f64 * step
        } else {
            (first + last) as f64 / 2.0
        };
        let start = (center - half).round();
        if start < 0.0 || start as usize + group_width > grid_width {
            return Err(Error::param(
                "span",
                "lines fall outside the projector grid",
            ));
        }
        let start = start as usize;
        if let Some(&prev) = starts.last() {
            if start < prev + group_width + 1 {
                return Err(Error::param(
                    "span",
                    format!(
                        "span [{first}, {last}] too narrow for {n} lines of width {group_width} \
                         with unit gaps"
                    ),
                ));
            }
        }
        starts.push(start);
    }
    Ok(starts)
}

fn centers(starts: &[usize], group_width: usize, grid_width: usize) -> Result<ColumnTable> {
    let half = (group_width as f64 - 1.0) / 2.0;
    ColumnTable::new(
        starts.iter().map(|&s| s as f64 + half).collect(),
        grid_width,
    )
}

/// `n` full-height line patterns of `line_width` columns, equally spaced
/// across `span`.
pub fn generate_line_pattern(
    grid: (usize, usize),
    n: usize,
    line_width: usize,
    span: (usize, usize),
) -> Result<(Vec<PatternImage>, ColumnTable)> {
    let (w, h) = grid;
    let starts = column_starts(w, n, line_width, span)?;
    let patterns = starts
        .iter()
        .map(|&s| {
            let mut p = PatternImage::blank(w, h);
            p.fill_rect(s, 0, line_width, h);
            p
        })
        .collect();
    Ok((patterns, centers(&starts, line_width, w)?))
}

/// `n` dot patterns on the same columns as the line generator; each pattern
/// holds `rows` square dots of `dot_size` pixels, all on one column.
pub fn generate_dot_pattern(
    grid: (usize, usize),
    n: usize,
    rows: usize,
    dot_size: usize,
    span: (usize, usize),
) -> Result<(Vec<PatternImage>, ColumnTable)> {
    let (w, h) = grid;
    if rows == 0 {
        return Err(Error::param("rows", "must be > 0"));
    }
    let starts = column_starts(w, n, dot_size, span)?;
    let pitch = h as f64 / rows as f64;
    let half = (dot_size as f64 - 1.0) / 2.0;
    let mut tops: Vec<usize> = Vec::with_capacity(rows);
    for j in 0..rows {
        let top = ((j as f64 + 0.5) * pitch - half).round();
        if top < 0.0 || top as usize + dot_size > h {
            return Err(Error::param("rows", "dots fall outside the projector grid"));
        }
        let top = top as usize;
        if let Some(&prev) = tops.last() {
            if top < prev + dot_size + 1 {
                return Err(Error::param(
                    "rows",
                    format!("{rows} rows of {dot_size}px dots do not fit in height {h}"),
                ));
            }
        }
        tops.push(top);
    }
    let patterns = starts
        .iter()
        .map(|&s| {
            let mut p = PatternImage::blank(w, h);
            for &top in &tops {
                p.fill_rect(s, top, dot_size, dot_size);
            }
            p
        })
        .collect();
    Ok((patterns, centers(&starts, dot_size, w)?))
}
