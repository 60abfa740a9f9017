//! Smallest spanning sets and the bounds that bracket them.
//!
//! The exact search enumerates one representative per orbit of the
//! row/column permutation group: column counts nonincreasing, row counts
//! nonincreasing, and columns of equal count ordered by descending row mask.
//! Sorting columns, then rows, never unsorts the columns, so every set has
//! such a representative, and spanning is invariant under these permutations.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PartialBounds, Result};
use crate::growth::{spans, spans_enhanced, Board, Enhancement, PointSet};
use crate::young::{Cell, YoungDiagram};

/// Limit on explored search nodes (enumeration nodes plus spanning checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub nodes: u64,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 50_000_000;

    pub fn new(nodes: u64) -> Self {
        SearchBudget { nodes }
    }

    pub fn unlimited() -> Self {
        SearchBudget { nodes: u64::MAX }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(Self::DEFAULT_NODES)
    }
}

/// Row-group and column-group sizes of a thin set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinCounts {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaResult {
    pub value: usize,
    pub witness: PointSet,
    /// `quarter-area`, `line-growth`, `lb-general` and `upper`.
    pub bounds: BTreeMap<String, usize>,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<ThinCounts>,
}

impl GammaResult {
    pub fn lower_bound(&self) -> usize {
        self.bounds
            .iter()
            .filter(|(k, _)| k.as_str() != "upper")
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0)
    }

    pub fn upper_bound(&self) -> usize {
        self.bounds.get("upper").copied().unwrap_or(usize::MAX)
    }
}

/// Minimum-mass enhancement pair under which the empty set spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancedWitness {
    pub value: usize,
    pub f: Enhancement,
    pub g: Enhancement,
    pub nodes: u64,
}

// ---------------------------------------------------------------------------
// Node accounting

pub(crate) struct Meter {
    used: AtomicU64,
    limit: u64,
    batch: u64,
}

pub(crate) struct Exhausted;

/// Outcome of one parallel search branch, with its node count.
pub(crate) type Branch<T> = std::result::Result<(T, u64), Exhausted>;

const BATCH: u64 = 256;

impl Meter {
    pub(crate) fn new(budget: SearchBudget) -> Self {
        Meter {
            used: AtomicU64::new(0),
            limit: budget.nodes,
            // small budgets are charged node by node so they trip on time
            batch: (budget.nodes / 64).clamp(1, BATCH),
        }
    }

    /// Counts one node locally, charging the shared meter in batches.
    #[inline]
    pub(crate) fn tick(&self, local: &mut u64) -> std::result::Result<(), Exhausted> {
        *local += 1;
        if (*local).is_multiple_of(self.batch) {
            self.charge(self.batch)?;
        }
        Ok(())
    }

    pub(crate) fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub(crate) fn charge(&self, k: u64) -> std::result::Result<(), Exhausted> {
        let before = self.used.fetch_add(k, Ordering::Relaxed);
        if before.saturating_add(k) > self.limit {
            Err(Exhausted)
        } else {
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical enumeration

/// Enumerates canonical representatives of `s`-point subsets of `R_{n,m}`,
/// column by column. A set is a list of column bitmasks over `m` rows.
pub(crate) struct Canon {
    n: usize,
    m: usize,
    /// Masks grouped by popcount, each group in descending order.
    by_pop: Vec<Vec<u64>>,
}

impl Canon {
    pub(crate) fn new(n: usize, m: usize) -> Result<Self> {
        if m > 20 {
            return Err(Error::ResourceCap(format!(
                "exact search needs the short side of the box to be at most 20 (got {m})"
            )));
        }
        let mut by_pop = vec![Vec::new(); m + 1];
        for mask in (0..1u64 << m).rev() {
            by_pop[mask.count_ones() as usize].push(mask);
        }
        Ok(Canon { n, m, by_pop })
    }

    /// First-column choices for size `s`, in search order.
    pub(crate) fn branches(&self, s: usize) -> Vec<u64> {
        if s == 0 || self.n == 0 {
            return Vec::new();
        }
        let lo = s.div_ceil(self.n);
        let hi = s.min(self.m);
        (lo..=hi).rev().flat_map(|p| self.by_pop[p].iter().copied()).collect()
    }

    /// Visits every canonical set of size `s` whose first column is `first`.
    /// The visitor returns `true` to stop. Returns whether it stopped.
    pub(crate) fn run_branch<F>(
        &self,
        s: usize,
        first: u64,
        meter: &Meter,
        local: &mut u64,
        visit: &mut F,
    ) -> std::result::Result<bool, Exhausted>
    where
        F: FnMut(&[u64]) -> bool,
    {
        let mut rowc = vec![0usize; self.m];
        let mut masks = Vec::with_capacity(self.n);
        let pop = first.count_ones() as usize;
        if !self.push(&mut rowc, &mut masks, first, 1) {
            return Ok(false);
        }
        self.dfs(1, first, pop, s - pop, &mut rowc, &mut masks, meter, local, visit)
    }

    fn push(&self, rowc: &mut [usize], masks: &mut Vec<u64>, mask: u64, cols_done: usize) -> bool {
        for (r, c) in rowc.iter_mut().enumerate() {
            *c += ((mask >> r) & 1) as usize;
        }
        masks.push(mask);
        // Row counts must be able to end up nonincreasing.
        let left = self.n - cols_done;
        rowc.windows(2).all(|w| w[1] <= w[0] + left)
    }

    fn pop(&self, rowc: &mut [usize], masks: &mut Vec<u64>) {
        let mask = masks.pop().expect("nonempty");
        for (r, c) in rowc.iter_mut().enumerate() {
            *c -= ((mask >> r) & 1) as usize;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<F>(
        &self,
        x: usize,
        prev_mask: u64,
        prev_pop: usize,
        rem: usize,
        rowc: &mut Vec<usize>,
        masks: &mut Vec<u64>,
        meter: &Meter,
        local: &mut u64,
        visit: &mut F,
    ) -> std::result::Result<bool, Exhausted>
    where
        F: FnMut(&[u64]) -> bool,
    {
        meter.tick(local)?;
        if rem == 0 {
            if rowc.windows(2).all(|w| w[0] >= w[1]) {
                return Ok(visit(masks));
            }
            return Ok(false);
        }
        let left = self.n - x;
        if left == 0 || rem > prev_pop * left {
            return Ok(false);
        }
        let lo = rem.div_ceil(left);
        let hi = prev_pop.min(rem);
        for p in (lo..=hi).rev() {
            for &mask in &self.by_pop[p] {
                if p == prev_pop && mask > prev_mask {
                    continue;
                }
                let ok = self.push(rowc, masks, mask, x + 1);
                let stop = ok && self.dfs(x + 1, mask, p, rem - p, rowc, masks, meter, local, visit)?;
                self.pop(rowc, masks);
                if stop {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

pub(crate) fn masks_to_cells(masks: &[u64]) -> Vec<Cell> {
    let mut out = Vec::new();
    for (u, &mask) in masks.iter().enumerate() {
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            out.push(Cell::new(u, v));
            m &= m - 1;
        }
    }
    out
}

fn transpose_set(a: &PointSet) -> PointSet {
    let (n, m) = a.box_dims();
    PointSet::new(m, n, a.points().iter().map(|c| Cell::new(c.v, c.u)).collect()).expect("transposed box")
}

// ---------------------------------------------------------------------------
// gamma

/// Exact `γ(Z)` with a spanning witness inside `R_{a_0,b_0}`.
pub fn gamma(z: &YoungDiagram, budget: SearchBudget) -> Result<GammaResult> {
    Solver::new(budget).gamma(z)
}

/// The closed lower bounds and the trivial upper bound `|Z|`.
pub fn gamma_bounds(z: &YoungDiagram, budget: SearchBudget) -> BTreeMap<String, usize> {
    Solver::new(budget).bounds(z)
}

/// `⌈½ min_{(k,ℓ)∈∂_oY} (kb + ℓa − kℓ + γ(Z^{↓ℓ}) + γ(Z^{←k}))⌉` for a
/// comparison rectangle `R_{a,b} ⊆ Z` and `Y ⊆ R_{a−1,b−1}`.
pub fn lb_general(z: &YoungDiagram, a: usize, b: usize, y: &YoungDiagram, budget: SearchBudget) -> Result<usize> {
    if a == 0 || b == 0 || !YoungDiagram::rectangle(a, b).is_subset_of(z) {
        return Err(Error::invalid(format!(
            "R_{{{a},{b}}} is not contained in the zero-set"
        )));
    }
    if !y.is_subset_of(&YoungDiagram::rectangle(a - 1, b - 1)) {
        return Err(Error::invalid(format!(
            "inner diagram must fit in R_{{{},{}}}",
            a - 1,
            b - 1
        )));
    }
    Ok(Solver::new(budget).lb_general(z, a, b, y))
}

struct Solver {
    budget: SearchBudget,
    memo: HashMap<YoungDiagram, usize>,
}

/// Subdiagrams up to this size get an exact recursive `γ`; larger ones fall
/// back to their closed lower bounds.
const SUB_EXACT_LIMIT: usize = 16;

impl Solver {
    fn new(budget: SearchBudget) -> Self {
        Solver {
            budget,
            memo: HashMap::new(),
        }
    }

    fn cheap_lower(z: &YoungDiagram) -> usize {
        z.cardinality().div_ceil(4).max(z.max_rectangle().2)
    }

    /// `γ(z)` when affordable, otherwise a lower bound on it.
    fn sub_gamma(&mut self, z: &YoungDiagram) -> usize {
        if let Some(&v) = self.memo.get(z) {
            return v;
        }
        let v = if z.cardinality() <= SUB_EXACT_LIMIT {
            let sub = Solver {
                budget: SearchBudget::new(self.budget.nodes / 8),
                memo: std::mem::take(&mut self.memo),
            };
            let mut sub = sub;
            let r = sub.gamma(z);
            self.memo = sub.memo;
            match r {
                Ok(g) => g.value,
                Err(_) => Self::cheap_lower(z),
            }
        } else {
            Self::cheap_lower(z)
        };
        self.memo.insert(z.clone(), v);
        v
    }

    fn lb_general(&mut self, z: &YoungDiagram, a: usize, b: usize, y: &YoungDiagram) -> usize {
        // Self-references (k = 0 or ℓ = 0) make the inequality implicit in γ(Z);
        // the bound is the least g with 2g ≥ min_cells F(g), and 2g − F(g)
        // is nondecreasing in g.
        let terms: Vec<(usize, Option<usize>, Option<usize>)> = y
            .outer_boundary()
            .into_iter()
            .map(|c| {
                let (k, l) = (c.u, c.v);
                let fixed = k * b + l * a - k * l;
                let down = (l > 0).then(|| self.sub_gamma(&z.down(l)));
                let left = (k > 0).then(|| self.sub_gamma(&z.left(k)));
                (fixed, down, left)
            })
            .collect();
        if terms.is_empty() {
            return 0;
        }
        (0..=z.cardinality())
            .find(|&g| {
                let min_f = terms
                    .iter()
                    .map(|&(c, d, l)| c + d.unwrap_or(g) + l.unwrap_or(g))
                    .min()
                    .expect("nonempty");
                2 * g >= min_f
            })
            .unwrap_or(0)
    }

    /// Best `lb-general` over corner rectangles and staircase inner diagrams.
    fn lb_general_default(&mut self, z: &YoungDiagram) -> usize {
        let mut best = 0;
        for (v, &a) in z.rows().iter().enumerate() {
            let b = v + 1;
            for i in 1..a.min(b) {
                let y = YoungDiagram::triangle(i);
                best = best.max(self.lb_general(z, a, b, &y));
            }
        }
        best
    }

    fn bounds(&mut self, z: &YoungDiagram) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        m.insert("quarter-area".to_string(), z.cardinality().div_ceil(4));
        m.insert("line-growth".to_string(), z.max_rectangle().2);
        m.insert("lb-general".to_string(), self.lb_general_default(z));
        m.insert("upper".to_string(), z.cardinality());
        m
    }

    fn gamma(&mut self, z: &YoungDiagram) -> Result<GammaResult> {
        let bounds = self.bounds(z);
        let lower = bounds
            .iter()
            .filter(|(k, _)| k.as_str() != "upper")
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0);
        let upper = z.cardinality();
        if z.width() < z.height() {
            let mut r = self.gamma_search(&z.transpose(), lower, upper, bounds)?;
            r.witness = transpose_set(&r.witness);
            self.memo.insert(z.clone(), r.value);
            return Ok(r);
        }
        let r = self.gamma_search(z, lower, upper, bounds)?;
        self.memo.insert(z.clone(), r.value);
        Ok(r)
    }

    fn gamma_search(
        &mut self,
        z: &YoungDiagram,
        lower: usize,
        upper: usize,
        bounds: BTreeMap<String, usize>,
    ) -> Result<GammaResult> {
        let (n, m) = (z.width(), z.height());
        if z.is_empty() {
            return Ok(GammaResult {
                value: 0,
                witness: PointSet::empty(0, 0),
                bounds,
                nodes: 0,
                thin: None,
            });
        }
        let canon = Canon::new(n, m)?;
        let meter = Meter::new(self.budget);
        let mut nodes = 0u64;
        for s in lower..=upper {
            match search_size(z, &canon, s, &meter) {
                Ok((found, used)) => {
                    nodes += used;
                    if let Some(cells) = found {
                        return Ok(GammaResult {
                            value: s,
                            witness: PointSet::new(n, m, cells)?,
                            bounds,
                            nodes,
                            thin: None,
                        });
                    }
                }
                Err(Exhausted) => {
                    return Err(Error::BudgetExceeded {
                        budget: self.budget.nodes,
                        bounds: PartialBounds {
                            lower: s.to_string(),
                            upper: upper.to_string(),
                            nodes: meter.used.load(Ordering::Relaxed),
                        },
                    });
                }
            }
        }
        Err(Error::Internal(format!(
            "no spanning set of size at most |Z| = {upper}"
        )))
    }
}

/// Looks for a canonical spanning set of size exactly `s`. The witness is the
/// first hit in search order, whatever the number of worker threads; the
/// node count only includes branches up to the winning one, so it is
/// deterministic too.
fn search_size(
    z: &YoungDiagram,
    canon: &Canon,
    s: usize,
    meter: &Meter,
) -> std::result::Result<(Option<Vec<Cell>>, u64), Exhausted> {
    let (n, m) = (canon.n, canon.m);
    if s > n * m {
        return Ok((None, 0));
    }
    if s == 0 {
        let mut b = Board::new(z, n, m);
        b.run();
        return Ok((b.is_full().then(Vec::new), 1));
    }
    let branches = canon.branches(s);
    let winner = AtomicUsize::new(usize::MAX);
    let results: Vec<Branch<Option<Vec<Cell>>>> = branches
        .par_iter()
        .enumerate()
        .map(|(i, &first)| {
            if winner.load(Ordering::Relaxed) < i {
                return Ok((None, 0));
            }
            let mut board = Board::new(z, n, m);
            let mut local = 0u64;
            let mut hit = None;
            let mut visit = |masks: &[u64]| {
                board.clear();
                for c in masks_to_cells(masks) {
                    board.insert(c.u, c.v);
                }
                board.run();
                if board.is_full() {
                    hit = Some(masks_to_cells(masks));
                    true
                } else {
                    false
                }
            };
            canon.run_branch(s, first, meter, &mut local, &mut visit)?;
            if hit.is_some() {
                winner.fetch_min(i, Ordering::Relaxed);
            }
            Ok((hit, local))
        })
        .collect();
    let mut nodes = 0;
    for r in results {
        let (hit, used) = r?;
        nodes += used;
        if hit.is_some() {
            return Ok((hit, nodes));
        }
    }
    Ok((None, nodes))
}

// ---------------------------------------------------------------------------
// Thin sets

/// Partitions of `n` into parts in `[min_part, max_part]`, largest parts
/// first, in reverse lexicographic order.
pub(crate) fn partitions_between(n: usize, min_part: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, min_part: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (min_part..=max_part.min(n)).rev() {
            cur.push(p);
            rec(n - p, min_part, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, min_part.max(1), max_part, &mut Vec::new(), &mut out);
    out
}

/// The thin set with row groups `rows` (points alone in their columns) and
/// column groups `cols` (points alone in their rows), each group on its own
/// lines, placed in a box that also contains `R_{a_0,b_0}`.
pub fn thin_layout(z: &YoungDiagram, rows: &[usize], cols: &[usize]) -> PointSet {
    let mut pts = Vec::new();
    let mut x = 0;
    for (v, &k) in rows.iter().enumerate() {
        for _ in 0..k {
            pts.push(Cell::new(x, v));
            x += 1;
        }
    }
    let mut y = rows.len();
    for (j, &k) in cols.iter().enumerate() {
        for _ in 0..k {
            pts.push(Cell::new(x + j, y));
            y += 1;
        }
    }
    let n = z.width().max(x + cols.len());
    let m = z.height().max(y);
    PointSet::new(n, m, pts).expect("layout fits")
}

/// Every point alone on its row or alone on its column.
pub fn is_thin(a: &PointSet) -> bool {
    let (cols, rows) = a.projections();
    a.points().iter().all(|c| rows[c.v] == 1 || cols[c.u] == 1)
}

/// Row-group and column-group sizes of a thin set (`None` if not thin).
pub fn thin_counts(a: &PointSet) -> Option<ThinCounts> {
    if !is_thin(a) {
        return None;
    }
    let (cols, rows) = a.projections();
    let mut r: Vec<usize> = rows.iter().copied().filter(|&k| k > 0).collect();
    // rows holding a column group's point count once each; subtract them
    let mut g: Vec<usize> = cols.iter().copied().filter(|&k| k >= 2).collect();
    let col_group_points: usize = g.iter().sum();
    r.sort_unstable_by(|a, b| b.cmp(a));
    // every point of a column group sits alone on its row
    for _ in 0..col_group_points {
        let i = r
            .iter()
            .rposition(|&k| k == 1)
            .expect("column-group rows are singletons");
        r.remove(i);
    }
    g.sort_unstable_by(|a, b| b.cmp(a));
    Some(ThinCounts { rows: r, cols: g })
}

/// Exact `γ_thin(Z)`, searching count-vector pairs of mass `γ ≤ s ≤ 2γ`.
pub fn gamma_thin(z: &YoungDiagram, budget: SearchBudget) -> Result<GammaResult> {
    let base = gamma(z, budget)?;
    let meter = Meter::new(budget);
    let mut nodes = base.nodes;
    let mut bounds = BTreeMap::new();
    bounds.insert("gamma".to_string(), base.value);
    bounds.insert("upper".to_string(), 2 * base.value);
    for s in base.value..=2 * base.value {
        for s1 in (0..=s).rev() {
            for f in partitions_between(s1, 1, s1) {
                for g in partitions_between(s - s1, 2, s - s1) {
                    nodes += 1;
                    if meter.charge(1).is_err() {
                        return Err(Error::BudgetExceeded {
                            budget: budget.nodes,
                            bounds: PartialBounds {
                                lower: s.to_string(),
                                upper: (2 * base.value).to_string(),
                                nodes,
                            },
                        });
                    }
                    let a = thin_layout(z, &f, &g);
                    if spans(z, &a)? {
                        return Ok(GammaResult {
                            value: s,
                            witness: a,
                            bounds,
                            nodes,
                            thin: Some(ThinCounts { rows: f, cols: g }),
                        });
                    }
                }
            }
        }
    }
    Err(Error::Internal("no thin spanning set within twice the minimum".into()))
}

/// Exact `γ̄_thin(Z)`: the least `Σf + Σg` for which the empty set spans
/// under the enhanced dynamics. Entries of `f` beyond `a_0` (and of `g`
/// beyond `b_0`) act exactly like `a_0` (`b_0`), so they are capped.
pub fn gamma_bar_thin(z: &YoungDiagram, budget: SearchBudget) -> Result<EnhancedWitness> {
    let (a0, b0) = (z.width(), z.height());
    let meter = Meter::new(budget);
    let mut nodes = 0u64;
    for mass in 0..=a0 * b0 {
        for mf in (0..=mass).rev() {
            for f in partitions_between(mf, 1, a0) {
                for g in partitions_between(mass - mf, 1, b0) {
                    nodes += 1;
                    if meter.charge(1).is_err() {
                        return Err(Error::BudgetExceeded {
                            budget: budget.nodes,
                            bounds: PartialBounds {
                                lower: mass.to_string(),
                                upper: (a0 * b0).to_string(),
                                nodes,
                            },
                        });
                    }
                    let f = Enhancement::new(f.clone())?;
                    let g = Enhancement::new(g)?;
                    let a = PointSet::empty(a0.max(g.len()), b0.max(f.len()));
                    if spans_enhanced(z, &f, &g, &a)? {
                        return Ok(EnhancedWitness {
                            value: mass,
                            f,
                            g,
                            nodes,
                        });
                    }
                }
            }
        }
    }
    Err(Error::Internal("full row enhancement failed to span".into()))
}

// ---------------------------------------------------------------------------
// Constructions on point sets

/// Number of distinct columns and rows met by `a`.
pub fn projection_sizes(a: &PointSet) -> (usize, usize) {
    let (cols, rows) = a.projections();
    (
        cols.iter().filter(|&&c| c > 0).count(),
        rows.iter().filter(|&&r| r > 0).count(),
    )
}

/// `A_{>k}`: points of `a` sharing a row or a column with at least `k`
/// other points of `a` (a one-shot filter).
pub fn heavy_points(a: &PointSet, k: usize) -> PointSet {
    let (cols, rows) = a.projections();
    let (n, m) = a.box_dims();
    let pts = a
        .points()
        .iter()
        .copied()
        .filter(|c| rows[c.v] > k || cols[c.u] > k)
        .collect();
    PointSet::new(n, m, pts).expect("subset")
}

/// A two-Y set with `2|a|` points that spans whenever `a` spans (for a
/// zero-set fitting in `a`'s box): the sorted column counts are stacked
/// above the box and the sorted row counts to the right of its horizontal
/// double.
pub fn two_y_double(a: &PointSet) -> PointSet {
    let (n, m) = a.box_dims();
    let (mut cols, mut rows) = a.projections();
    cols.sort_unstable_by(|x, y| y.cmp(x));
    rows.sort_unstable_by(|x, y| y.cmp(x));
    let top = cols.first().copied().unwrap_or(0);
    let right = rows.first().copied().unwrap_or(0);
    let mut pts = Vec::with_capacity(2 * a.len());
    for (x, &k) in cols.iter().enumerate() {
        pts.extend((0..k).map(|j| Cell::new(x, m + j)));
    }
    for (y, &k) in rows.iter().enumerate() {
        pts.extend((0..k).map(|i| Cell::new(2 * n + i, y)));
    }
    PointSet::new(2 * n + right, m + top, pts).expect("construction fits")
}
