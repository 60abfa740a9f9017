//! Zero-sets as Young diagrams (French convention, bottom row first).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice cell `(u, v)`: `u` is the column (x coordinate), `v` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub u: usize,
    pub v: usize,
}

impl Cell {
    pub const fn new(u: usize, v: usize) -> Self {
        Cell { u, v }
    }
}

impl From<(usize, usize)> for Cell {
    fn from((u, v): (usize, usize)) -> Self {
        Cell { u, v }
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.u, c.v)
    }
}

/// A finite Young diagram stored as nonincreasing positive row lengths,
/// bottom row first. Row `v` holds the cells `(0..rows[v], v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "RowsRepr", into = "RowsRepr")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RowsRepr {
    rows: Vec<usize>,
}

impl TryFrom<RowsRepr> for YoungDiagram {
    type Error = Error;
    fn try_from(r: RowsRepr) -> Result<Self> {
        YoungDiagram::from_rows(r.rows)
    }
}

impl From<YoungDiagram> for RowsRepr {
    fn from(z: YoungDiagram) -> Self {
        RowsRepr { rows: z.rows }
    }
}

/// Perturbations that delete the longest lines of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkMode {
    /// Delete the `k` bottom rows.
    Down,
    /// Delete the `k` leftmost columns.
    Left,
    /// Both of the above.
    Diag,
    /// Split off the strip of the `k` longest rows and columns; the
    /// diagram part of the result is the residual left after [`ShrinkMode::Diag`].
    Corner,
}

/// Outcome of [`YoungDiagram::shrink`]: the new diagram and how many cells went away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shrunk {
    pub diagram: YoungDiagram,
    pub removed: usize,
}

impl YoungDiagram {
    pub fn from_rows(rows: Vec<usize>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|&r| r == 0) {
            return Err(Error::invalid(format!("row {i} has nonpositive length")));
        }
        if let Some(i) = rows.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "row lengths must be nonincreasing (row {} = {} < row {} = {})",
                i,
                rows[i],
                i + 1,
                rows[i + 1]
            )));
        }
        Ok(YoungDiagram { rows })
    }

    /// Builds a diagram from any row-length list, dropping zeros; the caller
    /// guarantees the nonzero part is nonincreasing.
    pub(crate) fn from_rows_trusted(mut rows: Vec<usize>) -> Self {
        rows.retain(|&r| r > 0);
        debug_assert!(rows.windows(2).all(|w| w[0] >= w[1]));
        YoungDiagram { rows }
    }

    pub fn empty() -> Self {
        YoungDiagram { rows: Vec::new() }
    }

    /// `R_{a,b}`: `a` columns by `b` rows.
    pub fn rectangle(a: usize, b: usize) -> Self {
        if a == 0 {
            return Self::empty();
        }
        YoungDiagram { rows: vec![a; b] }
    }

    /// `T_θ = {(u,v) : u + v ≤ θ − 1}`, the bootstrap-percolation zero-set.
    pub fn triangle(theta: usize) -> Self {
        YoungDiagram {
            rows: (1..=theta).rev().collect(),
        }
    }

    /// `R_{a+b,c} ∪ R_{a,c+d}`.
    pub fn lshape(a: usize, b: usize, c: usize, d: usize) -> Self {
        let mut rows = vec![a + b; c];
        rows.extend(std::iter::repeat_n(a, d));
        Self::from_rows_trusted(rows)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cardinality(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Length of the bottom row (`a_0`).
    pub fn width(&self) -> usize {
        self.rows.first().copied().unwrap_or(0)
    }

    /// Number of rows (`b_0`).
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        v < self.rows.len() && u < self.rows[v]
    }

    /// Column heights (the conjugate partition).
    pub fn columns(&self) -> Vec<usize> {
        (0..self.width())
            .map(|u| self.rows.iter().take_while(|&&r| r > u).count())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        YoungDiagram { rows: self.columns() }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(v, &r)| (0..r).map(move |u| Cell::new(u, v)))
    }

    /// Cells outside the diagram whose left or lower neighbour lies inside,
    /// sorted by `(v, u)`. Empty for the empty diagram.
    pub fn outer_boundary(&self) -> Vec<Cell> {
        let h = self.rows.len();
        if h == 0 {
            return Vec::new();
        }
        let mut out = vec![Cell::new(self.rows[0], 0)];
        for v in 1..h {
            let lo = self.rows[v];
            let hi = self.rows[v - 1].max(lo + 1);
            out.extend((lo..hi).map(|u| Cell::new(u, v)));
        }
        out.extend((0..self.rows[h - 1]).map(|u| Cell::new(u, h)));
        out
    }

    pub fn shrink(&self, k: usize, mode: ShrinkMode) -> Shrunk {
        let diagram = match mode {
            ShrinkMode::Down => YoungDiagram {
                rows: self.rows.iter().skip(k).copied().collect(),
            },
            ShrinkMode::Left => Self::from_rows_trusted(self.rows.iter().map(|&r| r.saturating_sub(k)).collect()),
            ShrinkMode::Diag | ShrinkMode::Corner => {
                Self::from_rows_trusted(self.rows.iter().skip(k).map(|&r| r.saturating_sub(k)).collect())
            }
        };
        let removed = self.cardinality() - diagram.cardinality();
        Shrunk { diagram, removed }
    }

    pub fn down(&self, k: usize) -> Self {
        self.shrink(k, ShrinkMode::Down).diagram
    }

    pub fn left(&self, k: usize) -> Self {
        self.shrink(k, ShrinkMode::Left).diagram
    }

    pub fn diag(&self, k: usize) -> Self {
        self.shrink(k, ShrinkMode::Diag).diagram
    }

    /// The cells of `Z \ ((k,k) + Z^{↙k})`: the `k` longest rows and columns.
    pub fn corner_strip(&self, k: usize) -> Vec<Cell> {
        self.cells().filter(|c| c.u < k || c.v < k).collect()
    }

    /// A rectangle `R_{a,b} ⊆ Z` of maximal area; ties go to the smallest `a`.
    pub fn max_rectangle(&self) -> (usize, usize, usize) {
        let mut best = (0, 0, 0);
        for (v, &a) in self.rows.iter().enumerate() {
            let b = v + 1;
            let area = a * b;
            if area > best.2 || (area == best.2 && area > 0 && a < best.0) {
                best = (a, b, area);
            }
        }
        best
    }

    /// `Z ∩ R_{a,b}` (`None` meaning unbounded) together with `|Z \ R_{a,b}|`.
    pub fn truncate(&self, a: Option<usize>, b: Option<usize>) -> (YoungDiagram, usize) {
        let rows: Vec<usize> = self
            .rows
            .iter()
            .take(b.unwrap_or(usize::MAX))
            .map(|&r| a.map_or(r, |a| r.min(a)))
            .collect();
        let z = Self::from_rows_trusted(rows);
        let removed = self.cardinality() - z.cardinality();
        (z, removed)
    }

    pub fn is_subset_of(&self, other: &YoungDiagram) -> bool {
        self.rows.len() <= other.rows.len() && self.rows.iter().zip(&other.rows).all(|(a, b)| a <= b)
    }

    /// Adds a cell; fails unless the result is again a Young diagram.
    pub fn with_cell(&self, c: Cell) -> Result<Self> {
        let mut rows = self.rows.clone();
        if c.v == rows.len() {
            rows.push(0);
        }
        if c.v > rows.len() || rows[c.v] != c.u {
            return Err(Error::invalid(format!("({}, {}) is not addable", c.u, c.v)));
        }
        rows[c.v] += 1;
        YoungDiagram::from_rows(rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram serializes")
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad {what}: {s:?}")))
}

impl FromStr for YoungDiagram {
    type Err = Error;

    /// Accepts `3,2,1`, `{"rows":[3,2,1]}`, `rect:AxB`, `tri:THETA`,
    /// `lshape:A,B,C,D` and `empty` (or the empty string).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "empty" {
            return Ok(Self::empty());
        }
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::invalid(format!("diagram JSON: {e}")));
        }
        if let Some(rest) = s.strip_prefix("rect:") {
            let (a, b) = rest
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::invalid(format!("expected rect:AxB, got {s:?}")))?;
            return Ok(Self::rectangle(parse_usize(a, "width")?, parse_usize(b, "height")?));
        }
        if let Some(rest) = s.strip_prefix("tri:") {
            return Ok(Self::triangle(parse_usize(rest, "threshold")?));
        }
        if let Some(rest) = s.strip_prefix("lshape:") {
            let p: Vec<usize> = rest
                .split(',')
                .map(|x| parse_usize(x, "lshape parameter"))
                .collect::<Result<_>>()?;
            if p.len() != 4 {
                return Err(Error::invalid("lshape needs four parameters A,B,C,D"));
            }
            return Ok(Self::lshape(p[0], p[1], p[2], p[3]));
        }
        let rows = s
            .split(',')
            .map(|x| parse_usize(x, "row length"))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

/// All partitions of `n` as diagrams, in reverse lexicographic order
/// (`[n]` first, `[1,1,...,1]` last).
pub fn partitions(n: usize) -> Vec<YoungDiagram> {
    partitions_bounded(n, n, usize::MAX)
}

/// Partitions of `n` with every part at most `max_part` and at most `max_len` parts.
pub fn partitions_bounded(n: usize, max_part: usize, max_len: usize) -> Vec<YoungDiagram> {
    fn rec(n: usize, max_part: usize, max_len: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if n == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        if max_len == 0 {
            return;
        }
        for p in (1..=max_part.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, max_len - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max_part, max_len, &mut Vec::new(), &mut out);
    out
}

/// Every diagram with `1 ≤ |Z| ≤ n`.
pub fn diagrams_up_to(n: usize) -> Vec<YoungDiagram> {
    (1..=n).flat_map(partitions).collect()
}
