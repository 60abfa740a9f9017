//! The neighborhood growth transformation, plain and enhanced.
//!
//! A cell `x` joins the occupied set when the pair
//! `(row(x) + f[v(x)], col(x) + g[u(x)])` lies outside the zero-set `Z`,
//! where `row(x)` and `col(x)` count occupied cells on its row and column.
//! All dynamics run inside an explicit finite box.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::young::{Cell, YoungDiagram};

/// A finite occupied configuration living in the box `R_{n,m}`
/// (`n` columns, `m` rows). Points are kept sorted by `(v, u)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PointSetRepr", into = "PointSetRepr")]
pub struct PointSet {
    n: usize,
    m: usize,
    points: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct PointSetRepr {
    #[serde(rename = "box")]
    bx: (usize, usize),
    points: Vec<Cell>,
}

impl TryFrom<PointSetRepr> for PointSet {
    type Error = Error;
    fn try_from(r: PointSetRepr) -> Result<Self> {
        PointSet::new(r.bx.0, r.bx.1, r.points)
    }
}

impl From<PointSet> for PointSetRepr {
    fn from(a: PointSet) -> Self {
        PointSetRepr {
            bx: (a.n, a.m),
            points: a.points,
        }
    }
}

fn sort_cells(points: &mut Vec<Cell>) {
    points.sort_unstable_by_key(|c| (c.v, c.u));
    points.dedup();
}

impl PointSet {
    /// Duplicates are merged; points outside the box are an error.
    pub fn new(n: usize, m: usize, mut points: Vec<Cell>) -> Result<Self> {
        if let Some(c) = points.iter().find(|c| c.u >= n || c.v >= m) {
            return Err(Error::invalid(format!(
                "point ({}, {}) lies outside the box {n}x{m}",
                c.u, c.v
            )));
        }
        sort_cells(&mut points);
        Ok(PointSet { n, m, points })
    }

    /// Uses the smallest box holding every point.
    pub fn from_cells(points: Vec<Cell>) -> Self {
        let n = points.iter().map(|c| c.u + 1).max().unwrap_or(0);
        let m = points.iter().map(|c| c.v + 1).max().unwrap_or(0);
        PointSet::new(n, m, points).expect("fitted box")
    }

    pub fn empty(n: usize, m: usize) -> Self {
        PointSet {
            n,
            m,
            points: Vec::new(),
        }
    }

    pub fn full(n: usize, m: usize) -> Self {
        let points = (0..m).flat_map(|v| (0..n).map(move |u| Cell::new(u, v))).collect();
        PointSet { n, m, points }
    }

    pub fn box_dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn points(&self) -> &[Cell] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.points.len() == self.n * self.m
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.points.binary_search_by_key(&(c.v, c.u), |p| (p.v, p.u)).is_ok()
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.points.iter().all(|&c| other.contains(c))
    }

    /// The same points in a box at least `n x m` (never shrinks).
    pub fn with_box(&self, n: usize, m: usize) -> Self {
        PointSet {
            n: self.n.max(n),
            m: self.m.max(m),
            points: self.points.clone(),
        }
    }

    /// Enlarges the box so that it also contains `R_{a_0,b_0}` of `z`.
    pub fn fit_to(&self, z: &YoungDiagram) -> Self {
        self.with_box(z.width(), z.height())
    }

    /// Intersection with `R_{n,m}`, reported in that box.
    pub fn restrict(&self, n: usize, m: usize) -> Self {
        PointSet {
            n,
            m,
            points: self.points.iter().copied().filter(|c| c.u < n && c.v < m).collect(),
        }
    }

    /// Applies a column permutation `pu` and a row permutation `pv`.
    pub fn permute(&self, pu: &[usize], pv: &[usize]) -> Self {
        let mut points: Vec<Cell> = self.points.iter().map(|c| Cell::new(pu[c.u], pv[c.v])).collect();
        sort_cells(&mut points);
        PointSet {
            n: self.n,
            m: self.m,
            points,
        }
    }

    /// Occupied counts per column and per row.
    pub fn projections(&self) -> (Vec<usize>, Vec<usize>) {
        let mut cols = vec![0; self.n];
        let mut rows = vec![0; self.m];
        for c in &self.points {
            cols[c.u] += 1;
            rows[c.v] += 1;
        }
        (cols, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point set serializes")
    }

    /// `# box N M` header followed by one `u v` line per point.
    pub fn to_text(&self) -> String {
        let mut s = format!("# box {} {}\n", self.n, self.m);
        for c in &self.points {
            s.push_str(&format!("{} {}\n", c.u, c.v));
        }
        s
    }

    /// Parses either the JSON form or the line form. Without a box header the
    /// box is the smallest one holding the points.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim_start();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::invalid(format!("point set JSON: {e}")));
        }
        let mut bx = None;
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if words.first() == Some(&"box") {
                    if words.len() != 3 {
                        return Err(Error::invalid(format!("line {}: expected '# box N M'", i + 1)));
                    }
                    let n = words[1]
                        .parse()
                        .map_err(|_| Error::invalid(format!("line {}: bad box width", i + 1)))?;
                    let m = words[2]
                        .parse()
                        .map_err(|_| Error::invalid(format!("line {}: bad box height", i + 1)))?;
                    bx = Some((n, m));
                }
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => points.push(Cell::new(u, v)),
                _ => return Err(Error::invalid(format!("line {}: expected 'u v', got {line:?}", i + 1))),
            }
        }
        match bx {
            Some((n, m)) => PointSet::new(n, m, points),
            None => Ok(PointSet::from_cells(points)),
        }
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A nonincreasing, finitely supported sequence of extra counts added to rows
/// (`f`) or columns (`g`). Trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Enhancement {
    values: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Enhancement {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Enhancement::new(v)
    }
}

impl From<Enhancement> for Vec<usize> {
    fn from(e: Enhancement) -> Self {
        e.values
    }
}

impl Enhancement {
    pub fn new(mut values: Vec<usize>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("enhancement must be nonincreasing"));
        }
        while values.last() == Some(&0) {
            values.pop();
        }
        Ok(Enhancement { values })
    }

    pub fn zero() -> Self {
        Enhancement { values: Vec::new() }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, i: usize) -> usize {
        self.values.get(i).copied().unwrap_or(0)
    }

    /// Length of the support.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True for the zero enhancement.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }
}

impl fmt::Display for Enhancement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Enhancement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Enhancement::zero());
        }
        if s.starts_with('[') {
            return serde_json::from_str(s).map_err(|e| Error::invalid(format!("enhancement JSON: {e}")));
        }
        let values = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad enhancement entry {x:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        Enhancement::new(values)
    }
}

/// Mutable occupancy grid with per-line counters; the kernel behind every
/// dynamics routine. Reusable across many initial sets of the same shape.
#[derive(Debug, Clone)]
pub struct Board {
    n: usize,
    m: usize,
    /// `thr[r]`: the column count needed to escape `Z` when the row count is `r`.
    thr: Vec<usize>,
    f: Vec<usize>,
    g: Vec<usize>,
    occ: Vec<bool>,
    rowc: Vec<usize>,
    colc: Vec<usize>,
    filled: usize,
    adds: Vec<(usize, usize)>,
    dirty_rows: Vec<bool>,
    dirty_cols: Vec<bool>,
    dirty_col_list: Vec<usize>,
}

impl Board {
    pub fn new(z: &YoungDiagram, n: usize, m: usize) -> Self {
        Board {
            n,
            m,
            thr: z.columns(),
            f: vec![0; m],
            g: vec![0; n],
            occ: vec![false; n * m],
            rowc: vec![0; m],
            colc: vec![0; n],
            filled: 0,
            adds: Vec::new(),
            dirty_rows: vec![true; m],
            dirty_cols: vec![true; n],
            dirty_col_list: Vec::new(),
        }
    }

    /// Enhancement entries beyond the box are ignored.
    pub fn set_enhancement(&mut self, f: &Enhancement, g: &Enhancement) {
        for (v, x) in self.f.iter_mut().enumerate() {
            *x = f.get(v);
        }
        for (u, x) in self.g.iter_mut().enumerate() {
            *x = g.get(u);
        }
    }

    pub fn clear(&mut self) {
        self.occ.fill(false);
        self.rowc.fill(0);
        self.colc.fill(0);
        self.filled = 0;
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        let i = v * self.n + u;
        if !self.occ[i] {
            self.occ[i] = true;
            self.rowc[v] += 1;
            self.colc[u] += 1;
            self.filled += 1;
        }
    }

    pub fn load(&mut self, a: &PointSet) {
        self.clear();
        for c in a.points() {
            self.insert(c.u, c.v);
        }
    }

    pub fn is_full(&self) -> bool {
        self.filled == self.n * self.m
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    #[inline]
    fn threshold(&self, r: usize) -> usize {
        self.thr.get(r).copied().unwrap_or(0)
    }

    /// One synchronous application restricted to the dirty lines; returns the
    /// number of cells added. Cells off dirty lines read the same counts as
    /// last time, so they cannot change their decision.
    fn sweep(&mut self) -> usize {
        self.adds.clear();
        self.dirty_col_list.clear();
        self.dirty_col_list.extend((0..self.n).filter(|&u| self.dirty_cols[u]));
        for v in 0..self.m {
            if self.rowc[v] == self.n {
                continue;
            }
            let t = self.threshold(self.rowc[v] + self.f[v]);
            let base = v * self.n;
            if self.dirty_rows[v] {
                for u in 0..self.n {
                    if !self.occ[base + u] && self.colc[u] + self.g[u] >= t {
                        self.adds.push((u, v));
                    }
                }
            } else {
                for &u in &self.dirty_col_list {
                    if !self.occ[base + u] && self.colc[u] + self.g[u] >= t {
                        self.adds.push((u, v));
                    }
                }
            }
        }
        self.dirty_rows.fill(false);
        self.dirty_cols.fill(false);
        let added = self.adds.len();
        for k in 0..added {
            let (u, v) = self.adds[k];
            self.occ[v * self.n + u] = true;
            self.rowc[v] += 1;
            self.colc[u] += 1;
            self.dirty_rows[v] = true;
            self.dirty_cols[u] = true;
        }
        self.filled += added;
        added
    }

    /// A single full application of the transformation.
    pub fn step(&mut self) -> usize {
        self.dirty_rows.fill(true);
        self.dirty_cols.fill(true);
        self.sweep()
    }

    /// Runs to the fixpoint; returns how many applications changed the set.
    pub fn run(&mut self) -> usize {
        self.dirty_rows.fill(true);
        self.dirty_cols.fill(true);
        let mut changes = 0;
        while !self.is_full() && self.sweep() > 0 {
            changes += 1;
        }
        changes
    }

    pub fn to_point_set(&self) -> PointSet {
        let mut points = Vec::with_capacity(self.filled);
        for v in 0..self.m {
            for u in 0..self.n {
                if self.occ[v * self.n + u] {
                    points.push(Cell::new(u, v));
                }
            }
        }
        PointSet {
            n: self.n,
            m: self.m,
            points,
        }
    }
}

/// One application of the (enhanced) transformation inside `a`'s box.
pub fn step(z: &YoungDiagram, f: &Enhancement, g: &Enhancement, a: &PointSet) -> PointSet {
    let (n, m) = a.box_dims();
    let mut b = Board::new(z, n, m);
    b.set_enhancement(f, g);
    b.load(a);
    b.step();
    b.to_point_set()
}

/// The least fixpoint containing `a`, and the number of applications that
/// changed the set (at least 1, counting the application that confirms inertness).
pub fn evolve(z: &YoungDiagram, f: &Enhancement, g: &Enhancement, a: &PointSet) -> Result<(PointSet, u64)> {
    let (n, m) = a.box_dims();
    let mut b = Board::new(z, n, m);
    b.set_enhancement(f, g);
    b.load(a);
    let steps = b.run().max(1) as u64;
    if f.is_empty() && g.is_empty() && u128::from(steps) > tmax_bound(z) {
        return Err(Error::Internal(format!(
            "{steps} steps exceed the completion-time bound {}",
            tmax_bound(z)
        )));
    }
    Ok((b.to_point_set(), steps))
}

fn check_box(z: &YoungDiagram, f: &Enhancement, g: &Enhancement, a: &PointSet) -> Result<()> {
    let (n, m) = a.box_dims();
    if n < z.width() || m < z.height() {
        return Err(Error::invalid(format!(
            "box {n}x{m} does not contain the zero-set's bounding rectangle {}x{}",
            z.width(),
            z.height()
        )));
    }
    if f.len() > m || g.len() > n {
        return Err(Error::invalid(format!(
            "box {n}x{m} does not contain the enhancement supports ({} rows, {} columns)",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// Whether `a` spans the quadrant under plain growth.
pub fn spans(z: &YoungDiagram, a: &PointSet) -> Result<bool> {
    spans_enhanced(z, &Enhancement::zero(), &Enhancement::zero(), a)
}

/// Whether `a` spans under growth enhanced by `f` (rows) and `g` (columns).
pub fn spans_enhanced(z: &YoungDiagram, f: &Enhancement, g: &Enhancement, a: &PointSet) -> Result<bool> {
    check_box(z, f, g, a)?;
    let (n, m) = a.box_dims();
    if n * m == 0 {
        // The box is empty only when Z is; then any set spans.
        return Ok(true);
    }
    let mut b = Board::new(z, n, m);
    b.set_enhancement(f, g);
    b.load(a);
    b.run();
    Ok(b.is_full())
}

/// `(k+2)(a_0+1)...(a_k+1)` for row lengths `a_0 ≥ ... ≥ a_k`, and 1 for `∅`.
/// Saturates at `u128::MAX`.
pub fn tmax_bound(z: &YoungDiagram) -> u128 {
    if z.is_empty() {
        return 1;
    }
    let k = z.height() as u128 - 1;
    z.rows().iter().fold(k + 2, |acc, &a| acc.saturating_mul(a as u128 + 1))
}

/// Replaces the enhancements by real occupied points outside the box:
/// row `v` receives `f_v` points in fresh columns and column `u` receives
/// `g_u` points in fresh rows, each new point alone on its other line.
pub fn materialize(f: &Enhancement, g: &Enhancement, a: &PointSet) -> PointSet {
    let (n, m) = a.box_dims();
    let mut points = a.points().to_vec();
    let mut col = n;
    for v in 0..f.len() {
        for _ in 0..f.get(v) {
            points.push(Cell::new(col, v));
            col += 1;
        }
    }
    let mut row = m;
    for u in 0..g.len() {
        for _ in 0..g.get(u) {
            points.push(Cell::new(u, row));
            row += 1;
        }
    }
    PointSet::new(col, row, points).expect("materialized points fit")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: usize, m: usize, pts: &[(usize, usize)]) -> PointSet {
        PointSet::new(n, m, pts.iter().map(|&p| p.into()).collect()).unwrap()
    }

    fn zero() -> Enhancement {
        Enhancement::zero()
    }

    /// Direct transcription of the rule, recounting every line.
    fn step_naive(z: &YoungDiagram, f: &Enhancement, g: &Enhancement, a: &PointSet) -> PointSet {
        let (n, m) = a.box_dims();
        let mut out = a.points().to_vec();
        for v in 0..m {
            for u in 0..n {
                let row = a.points().iter().filter(|c| c.v == v).count();
                let col = a.points().iter().filter(|c| c.u == u).count();
                if !z.contains(row + f.get(v), col + g.get(u)) {
                    out.push(Cell::new(u, v));
                }
            }
        }
        PointSet::new(n, m, out).unwrap()
    }

    #[test]
    fn step_examples() {
        let t2 = YoungDiagram::triangle(2);
        let a = ps(4, 4, &[(0, 0), (1, 1)]);
        assert_eq!(
            step(&t2, &zero(), &zero(), &a),
            ps(4, 4, &[(0, 0), (1, 1), (0, 1), (1, 0)])
        );
        assert!(step(&YoungDiagram::empty(), &zero(), &zero(), &PointSet::empty(3, 2)).is_full());
        let r11 = YoungDiagram::rectangle(1, 1);
        assert!(step(&r11, &zero(), &zero(), &PointSet::empty(3, 3)).is_empty());
    }

    #[test]
    fn evolve_examples() {
        let t2 = YoungDiagram::triangle(2);
        let (fin, steps) = evolve(&t2, &zero(), &zero(), &ps(4, 4, &[(0, 0), (1, 1)])).unwrap();
        assert!(fin.is_full());
        assert!(steps <= 3);
        let a = ps(4, 4, &[(0, 0)]);
        assert_eq!(evolve(&t2, &zero(), &zero(), &a).unwrap(), (a, 1));
        let (fin, steps) = evolve(&YoungDiagram::empty(), &zero(), &zero(), &PointSet::empty(3, 3)).unwrap();
        assert!(fin.is_full());
        assert_eq!(steps, 1);
    }

    #[test]
    fn spans_examples() {
        let t2 = YoungDiagram::triangle(2);
        assert!(spans(&t2, &ps(3, 3, &[(0, 0), (2, 1)])).unwrap());
        assert!(!spans(&t2, &ps(3, 3, &[(1, 1)])).unwrap());
        let r22 = YoungDiagram::rectangle(2, 2);
        let cells: Vec<(usize, usize)> = (0..3).flat_map(|v| (0..3).map(move |u| (u, v))).collect();
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                for k in j + 1..cells.len() {
                    assert!(!spans(&r22, &ps(3, 3, &[cells[i], cells[j], cells[k]])).unwrap());
                }
            }
        }
        assert!(spans(&r22, &ps(1, 1, &[])).is_err());
    }

    #[test]
    fn tmax_examples() {
        assert_eq!(tmax_bound(&YoungDiagram::empty()), 1);
        assert_eq!(tmax_bound(&YoungDiagram::rectangle(1, 1)), 4);
        assert_eq!(tmax_bound(&YoungDiagram::triangle(2)), 18);
        assert_eq!(tmax_bound(&YoungDiagram::rectangle(1000, 40)), u128::MAX);
    }

    #[test]
    fn incremental_step_matches_naive() {
        let mut seed = 12345u64;
        let mut rnd = |k: usize| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % k as u64) as usize
        };
        for z in crate::young::diagrams_up_to(6) {
            for _ in 0..4 {
                let n = z.width() + rnd(3);
                let m = z.height() + rnd(3);
                let pts: Vec<Cell> = (0..rnd(n * m + 1)).map(|_| Cell::new(rnd(n), rnd(m))).collect();
                let a = PointSet::new(n, m, pts).unwrap();
                let f = Enhancement::new(vec![rnd(3), 0]).unwrap();
                let g = Enhancement::new(vec![rnd(2)]).unwrap();
                // run the incremental board for several sweeps, compare each
                let mut b = Board::new(&z, n, m);
                b.set_enhancement(&f, &g);
                b.load(&a);
                b.dirty_rows.fill(true);
                b.dirty_cols.fill(true);
                let mut cur = a.clone();
                for _ in 0..5 {
                    b.sweep();
                    cur = step_naive(&z, &f, &g, &cur);
                    assert_eq!(b.to_point_set(), cur, "{z} f={f} g={g}");
                }
            }
        }
    }

    #[test]
    fn text_and_json_round_trip() {
        let a = ps(4, 3, &[(0, 0), (3, 2)]);
        assert_eq!(PointSet::parse(&a.to_text()).unwrap(), a);
        assert_eq!(PointSet::parse(&a.to_json()).unwrap(), a);
        assert_eq!(a.to_json(), r#"{"box":[4,3],"points":[[0,0],[3,2]]}"#);
        let b = PointSet::parse("1 2\n0 0\n").unwrap();
        assert_eq!(b.box_dims(), (2, 3));
        assert!(PointSet::parse("# box 2 2\n2 0\n").is_err());
        assert!(PointSet::parse("1\n").is_err());
    }

    #[test]
    fn enhancement_parsing() {
        assert_eq!("3,1,0,0".parse::<Enhancement>().unwrap().values(), &[3, 1]);
        assert!("".parse::<Enhancement>().unwrap().is_empty());
        assert!("1,2".parse::<Enhancement>().is_err());
        assert_eq!("[2,2]".parse::<Enhancement>().unwrap().total(), 4);
    }

    #[test]
    fn materialized_dominates_enhanced() {
        let z = YoungDiagram::triangle(3);
        let f = Enhancement::new(vec![1]).unwrap();
        let g = Enhancement::new(vec![1]).unwrap();
        let a = ps(3, 3, &[(1, 1)]);
        let enh = evolve(&z, &f, &g, &a).unwrap().0;
        let mat = materialize(&f, &g, &a);
        assert_eq!(mat.box_dims(), (4, 4));
        let plain = evolve(&z, &zero(), &zero(), &mat).unwrap().0.restrict(3, 3);
        assert!(enh.is_subset_of(&plain));
    }
}
