//! The energy–entropy functional `ρ`, the large-deviation rate `I` of the
//! spanning probability, its closed forms, support and general bounds, and
//! the enhancement rate `Ī`.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, PartialBounds, Result};
use crate::extremal::{
    gamma, masks_to_cells, partitions_between, thin_layout, Branch, Canon, Exhausted, Meter, SearchBudget,
};
use crate::flow::{FlowNetwork, INF};
use crate::growth::{spans, spans_enhanced, Board, Enhancement, PointSet};
use crate::rational::{format_q, max_q, min_q, parse_q, pos_part, qi, serde_q, Q};
use crate::young::{Cell, YoungDiagram};

/// Scaling exponents: `N ≈ p^{-α}` columns and `M ≈ p^{-β}` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RateQuery {
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub beta: Q,
}

impl RateQuery {
    pub fn new(alpha: Q, beta: Q) -> Result<Self> {
        for (name, x) in [("alpha", alpha), ("beta", beta)] {
            if x < Q::zero() || x > Q::one() {
                return Err(Error::invalid(format!("{name} = {} is outside [0,1]", format_q(&x))));
            }
        }
        Ok(RateQuery { alpha, beta })
    }

    pub fn parse(alpha: &str, beta: &str) -> Result<Self> {
        RateQuery::new(parse_q(alpha)?, parse_q(beta)?)
    }

    pub fn swapped(&self) -> Self {
        RateQuery {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    fn energy(&self, size: usize, px: usize, py: usize) -> Q {
        qi(size as i64) - self.alpha * qi(px as i64) - self.beta * qi(py as i64)
    }
}

impl std::fmt::Display for RateQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", format_q(&self.alpha), format_q(&self.beta))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateResult {
    #[serde(with = "serde_q")]
    pub value: Q,
    pub witness_a: PointSet,
    pub witness_b: PointSet,
    /// Set only when the value is certified (complete search, closed form, or
    /// a matching lower bound).
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// rho

fn distinct_lines(points: &[Cell]) -> (usize, usize) {
    let xs: HashSet<usize> = points.iter().map(|c| c.u).collect();
    let ys: HashSet<usize> = points.iter().map(|c| c.v).collect();
    (xs.len(), ys.len())
}

/// `ρ(α,β,A) = max_{B⊆A} |B| − α|π_x(B)| − β|π_y(B)|`, by maximum-weight
/// closure: a point pays for its column (α) and its row (β). The optimal `B`
/// is the minimal source side of a minimum cut.
pub fn rho(q: &RateQuery, a: &PointSet) -> RateResult {
    let pts = a.points();
    let (n, m) = a.box_dims();
    let result = |b: Vec<Cell>| {
        let (px, py) = distinct_lines(&b);
        RateResult {
            value: q.energy(b.len(), px, py),
            witness_a: a.clone(),
            witness_b: PointSet::new(n, m, b).expect("subset"),
            exact: true,
        }
    };
    if pts.is_empty() {
        return result(Vec::new());
    }
    if q.alpha + q.beta < Q::one() {
        // each extra point gains at least 1 − α − β > 0
        return result(pts.to_vec());
    }
    let scale = i128::from(q.alpha.denom().lcm(q.beta.denom()));
    let wa = i128::from(*q.alpha.numer()) * (scale / i128::from(*q.alpha.denom()));
    let wb = i128::from(*q.beta.numer()) * (scale / i128::from(*q.beta.denom()));
    let (cols, rows) = a.projections();
    let mut col_id = vec![usize::MAX; cols.len()];
    let mut row_id = vec![usize::MAX; rows.len()];
    let mut next = 2 + pts.len();
    for (u, &c) in cols.iter().enumerate() {
        if c > 0 {
            col_id[u] = next;
            next += 1;
        }
    }
    for (v, &r) in rows.iter().enumerate() {
        if r > 0 {
            row_id[v] = next;
            next += 1;
        }
    }
    let mut g = FlowNetwork::new(next);
    for (i, c) in pts.iter().enumerate() {
        g.add_edge(0, 2 + i, scale);
        g.add_edge(2 + i, col_id[c.u], INF);
        g.add_edge(2 + i, row_id[c.v], INF);
    }
    for &id in col_id.iter().filter(|&&id| id != usize::MAX) {
        g.add_edge(id, 1, wa);
    }
    for &id in row_id.iter().filter(|&&id| id != usize::MAX) {
        g.add_edge(id, 1, wb);
    }
    g.max_flow(0, 1);
    let side = g.source_side(0);
    let b: Vec<Cell> = pts
        .iter()
        .enumerate()
        .filter(|(i, _)| side[2 + i])
        .map(|(_, &c)| c)
        .collect();
    result(b)
}

pub const RHO_BRUTE_LIMIT: usize = 16;

/// Exhaustive `ρ` over all subsets; the oracle for [`rho`].
pub fn rho_bruteforce(q: &RateQuery, a: &PointSet) -> Result<RateResult> {
    let pts = a.points();
    if pts.len() > RHO_BRUTE_LIMIT {
        return Err(Error::invalid(format!(
            "brute-force rho supports at most {RHO_BRUTE_LIMIT} points (got {})",
            pts.len()
        )));
    }
    let mut best = (Q::zero(), 0u32);
    for mask in 1u32..1 << pts.len() {
        let b: Vec<Cell> = pts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let (px, py) = distinct_lines(&b);
        let v = q.energy(b.len(), px, py);
        if v > best.0 {
            best = (v, mask);
        }
    }
    let (n, m) = a.box_dims();
    let b = pts
        .iter()
        .enumerate()
        .filter(|(i, _)| best.1 >> i & 1 == 1)
        .map(|(_, &c)| c)
        .collect();
    Ok(RateResult {
        value: best.0,
        witness_a: a.clone(),
        witness_b: PointSet::new(n, m, b)?,
        exact: true,
    })
}

// ---------------------------------------------------------------------------
// Line growth and bootstrap closed forms

fn check_open_unit(q: &RateQuery) -> Result<()> {
    if q.alpha >= Q::one() || q.beta >= Q::one() {
        return Err(Error::invalid("line-growth formulas need alpha, beta in [0,1)"));
    }
    Ok(())
}

/// `I(α,β,R_{a,b})` from the line-growth recursion
/// `I(a,b) = min{(0 ∨ (b(1−β) − α)) + I(a−1,b), (0 ∨ (a(1−α) − β)) + I(a,b−1)}`.
pub fn rate_rect_recursion(a: usize, b: usize, q: &RateQuery) -> Result<Q> {
    check_open_unit(q)?;
    let (al, be) = (q.alpha, q.beta);
    let mut t = vec![vec![Q::zero(); b + 1]; a + 1];
    for i in 1..=a {
        for j in 1..=b {
            let horiz = pos_part(qi(j as i64) * (Q::one() - be) - al) + t[i - 1][j];
            let vert = pos_part(qi(i as i64) * (Q::one() - al) - be) + t[i][j - 1];
            t[i][j] = min_q(horiz, vert);
        }
    }
    Ok(t[a][b])
}

/// Closed form of the line-growth rate.
pub fn rate_rect_closed(a: usize, b: usize, q: &RateQuery) -> Result<Q> {
    check_open_unit(q)?;
    if q.beta > q.alpha {
        return rate_rect_closed(b, a, &q.swapped());
    }
    let (al, be) = (q.alpha, q.beta);
    let one = Q::one();
    let da = (be / (one - al)).floor();
    let db = (al / (one - be)).floor();
    let (aq, bq) = (qi(a as i64), qi(b as i64));
    if bq <= db || aq <= da {
        return Ok(Q::zero());
    }
    let v = if db * (one - be) <= be {
        (one - al) * aq * bq + ((al - be) * db - be) * aq - be * bq - (one - be) * da * db + be * da + be * db + be
            - max_q((one - be) * db, (one - al) * da)
    } else {
        (one - al) * aq * bq + al * db * aq - be * bq
            + be * db
            + min_q(
                -be * (db + one) * aq - (one - be) * da * db + be * da + be - (one - al) * da,
                -db * aq,
            )
    };
    Ok(v)
}

/// `I(α,α,T_θ)`: with `k = ⌈θ/2⌉` and `m = ⌊1/(1−α)⌋`, zero when `m > k`.
pub fn rate_bootstrap_diag(theta: usize, alpha: Q) -> Result<Q> {
    if alpha < Q::zero() || alpha > Q::one() {
        return Err(Error::invalid(format!("alpha = {} is outside [0,1]", format_q(&alpha))));
    }
    if theta == 0 || alpha == Q::one() {
        return Ok(Q::zero());
    }
    let k = theta.div_ceil(2) as i64;
    let m = *(Q::one() / (Q::one() - alpha)).floor().numer();
    if m > k {
        return Ok(Q::zero());
    }
    let v = if theta.is_multiple_of(2) {
        qi((k + m) * (k - m + 1)) - alpha * qi((k + m + 2) * (k - m + 1))
    } else {
        qi((k + m - 1) * (k - m) + k) - alpha * qi((k + m + 1) * (k - m) + k + 1)
    };
    Ok(v)
}

// ---------------------------------------------------------------------------
// Support

/// `min_{(u,v)∈∂_oZ} max(u(1−α)−β, v(1−β)−α)`; `None` for the empty diagram.
pub fn support_margin(z: &YoungDiagram, q: &RateQuery) -> Option<Q> {
    z.outer_boundary()
        .iter()
        .map(|c| {
            let x = qi(c.u as i64) * (Q::one() - q.alpha) - q.beta;
            let y = qi(c.v as i64) * (Q::one() - q.beta) - q.alpha;
            max_q(x, y)
        })
        .min()
}

/// Closed support: every outer-boundary cell passes the test with `≥ 0`.
pub fn support_contains(z: &YoungDiagram, q: &RateQuery) -> bool {
    support_margin(z, q).is_none_or(|m| m >= Q::zero())
}

/// Strict version: every cell passes with `> 0`, where the rate is positive.
pub fn support_interior(z: &YoungDiagram, q: &RateQuery) -> bool {
    support_margin(z, q).is_none_or(|m| m > Q::zero())
}

/// Largest `β` in the support above `α` (before clipping to `[0,1]`);
/// `None` means unbounded.
fn beta_star(z: &YoungDiagram, alpha: Q) -> Option<Q> {
    let mut best: Option<Q> = None;
    for c in z.outer_boundary() {
        let l1 = qi(c.u as i64) * (Q::one() - alpha);
        let cell = if c.v == 0 {
            if alpha.is_zero() {
                None
            } else {
                Some(l1)
            }
        } else {
            Some(max_q(l1, Q::one() - alpha / qi(c.v as i64)))
        };
        if let Some(x) = cell {
            best = Some(best.map_or(x, |b| min_q(b, x)));
        }
    }
    best
}

/// Upper boundary of the support as `(α, β)` vertices, left to right:
/// the grid `α = i/grid` plus every breakpoint of the piecewise-linear
/// boundary, so the polyline is exact between consecutive vertices.
pub fn support_boundary(z: &YoungDiagram, grid: usize) -> Vec<(Q, Q)> {
    let one = Q::one();
    // β = c0 + c1·α for every constraint line, plus the square's edges.
    let mut lines: Vec<(Q, Q)> = vec![(Q::zero(), Q::zero()), (one, Q::zero())];
    for c in z.outer_boundary() {
        lines.push((qi(c.u as i64), -qi(c.u as i64)));
        if c.v > 0 {
            lines.push((one, -one / qi(c.v as i64)));
        }
    }
    let mut alphas: Vec<Q> = (0..=grid.max(1))
        .map(|i| Q::new(i as i64, grid.max(1) as i64))
        .collect();
    for (i, &(a0, a1)) in lines.iter().enumerate() {
        for &(b0, b1) in &lines[i + 1..] {
            if a1 != b1 {
                let x = (b0 - a0) / (a1 - b1);
                if x >= Q::zero() && x <= one {
                    alphas.push(x);
                }
            }
        }
    }
    alphas.sort();
    alphas.dedup();
    alphas
        .into_iter()
        .filter_map(|a| {
            let b = beta_star(z, a).map_or(one, |b| min_q(b, one));
            (b >= Q::zero()).then_some((a, b))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// General bounds

/// The discrete lower bound for the given `k`, the two general upper bounds
/// and the trivial upper bound `γ(Z)`.
pub fn rate_bounds(z: &YoungDiagram, q: &RateQuery, k: usize, budget: SearchBudget) -> Result<BTreeMap<String, Q>> {
    let g = qi(gamma(z, budget)?.value as i64);
    let gk = qi(gamma(&z.diag(k), budget)?.value as i64);
    let (hi, lo) = (max_q(q.alpha, q.beta), min_q(q.alpha, q.beta));
    let one = Q::one();
    let mut m = BTreeMap::new();
    m.insert("lower".to_string(), gk * (one - hi * (one + Q::new(1, k as i64 + 1))));
    m.insert("upper-area".to_string(), (one - hi) * qi(z.cardinality() as i64));
    m.insert("upper-gamma".to_string(), qi(2) * (one - lo) * g);
    m.insert("upper-trivial".to_string(), g);
    Ok(m)
}

fn lower_from_diag_gammas(diag_gammas: &[usize], q: &RateQuery) -> Q {
    let one = Q::one();
    let hi = max_q(q.alpha, q.beta);
    diag_gammas
        .iter()
        .enumerate()
        .map(|(k, &g)| pos_part(qi(g as i64) * (one - hi * (one + Q::new(1, k as i64 + 1)))))
        .max()
        .unwrap_or(Q::zero())
}

// ---------------------------------------------------------------------------
// Rate search

/// Search configuration: the box is `R_{a_0+pad, b_0+pad}` and box candidates
/// have at most `γ + extra` points.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub pad: usize,
    pub extra: usize,
    pub budget: SearchBudget,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pad: 1,
            extra: 2,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone)]
enum Candidate {
    Box { points: Vec<Cell>, px: usize, py: usize },
    Thin { rows: Vec<usize>, cols: Vec<usize> },
}

/// A fixed family of spanning sets for one zero-set, queried at many
/// `(α, β)`. Members: inclusion-minimal canonical spanning sets inside the
/// padded box, and thin spanning sets given by their group sizes (all with
/// mass up to `max(2γ, |Z|)`, plus, for every outer-boundary cell `(u,v)`,
/// up to `max(a_0,b_0)` row groups of size `u` with as many column groups of
/// size `v`). Because the family does not depend on `(α, β)`, the minimum is
/// concave on `α + β ≤ 1` and monotone everywhere.
pub struct RateSearcher {
    z: YoungDiagram,
    box_dims: (usize, usize),
    candidates: Vec<Candidate>,
    complete: bool,
    diag_gammas: Vec<usize>,
    nodes: u64,
    budget: u64,
}

fn thin_rho(q: &RateQuery, rows: &[usize], cols: &[usize]) -> Q {
    let one = Q::one();
    let r: Q = rows
        .iter()
        .map(|&s| pos_part(qi(s as i64) * (one - q.alpha) - q.beta))
        .sum();
    let c: Q = cols
        .iter()
        .map(|&s| pos_part(qi(s as i64) * (one - q.beta) - q.alpha))
        .sum();
    r + c
}

impl RateSearcher {
    pub fn new(z: &YoungDiagram, cfg: SearchConfig) -> Result<Self> {
        let g = gamma(z, cfg.budget)?.value;
        let diag_gammas = (0..=z.width().min(z.height()))
            .map(|k| gamma(&z.diag(k), cfg.budget).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        let (n, m) = (z.width() + cfg.pad, z.height() + cfg.pad);
        let mut s = RateSearcher {
            z: z.clone(),
            box_dims: (n, m),
            candidates: Vec::new(),
            complete: true,
            diag_gammas,
            nodes: 0,
            budget: cfg.budget.nodes,
        };
        if z.is_empty() {
            s.candidates.push(Candidate::Box {
                points: Vec::new(),
                px: 0,
                py: 0,
            });
            return Ok(s);
        }
        let meter = Meter::new(cfg.budget);
        s.collect_box(g + cfg.extra, &meter)?;
        s.collect_thin(g, &meter)?;
        Ok(s)
    }

    fn collect_box(&mut self, cap: usize, meter: &Meter) -> Result<()> {
        let (n, m) = self.box_dims;
        // enumerate with the short side as the mask dimension
        let flip = m > n;
        let (en, em, ez) = if flip {
            (m, n, self.z.transpose())
        } else {
            (n, m, self.z.clone())
        };
        let canon = Canon::new(en, em)?;
        for size in 1..=cap.min(en * em) {
            let branches = canon.branches(size);
            let results: Vec<Branch<Vec<Vec<Cell>>>> = branches
                .par_iter()
                .map(|&first| {
                    let mut board = Board::new(&ez, en, em);
                    let mut local = 0u64;
                    let mut found = Vec::new();
                    let mut visit = |masks: &[u64]| {
                        let cells = masks_to_cells(masks);
                        if spans_with(&mut board, &cells, usize::MAX) && is_minimal(&mut board, &cells) {
                            found.push(cells);
                        }
                        false
                    };
                    canon.run_branch(size, first, meter, &mut local, &mut visit)?;
                    Ok((found, local))
                })
                .collect();
            for r in results {
                match r {
                    Ok((found, used)) => {
                        self.nodes += used;
                        for cells in found {
                            let points: Vec<Cell> = if flip {
                                cells.iter().map(|c| Cell::new(c.v, c.u)).collect()
                            } else {
                                cells
                            };
                            let (px, py) = distinct_lines(&points);
                            self.candidates.push(Candidate::Box { points, px, py });
                        }
                    }
                    Err(Exhausted) => {
                        self.complete = false;
                        self.nodes = meter.used();
                        return Ok(());
                    }
                }
            }
        }
        Ok(())
    }

    fn collect_thin(&mut self, g: usize, meter: &Meter) -> Result<()> {
        let z = self.z.clone();
        let mut seen = HashSet::new();
        let mut pairs = Vec::new();
        let cap = (2 * g).max(z.cardinality());
        for mass in 1..=cap {
            for s1 in (0..=mass).rev() {
                for f in partitions_between(s1, 1, s1) {
                    for c in partitions_between(mass - s1, 2, mass - s1) {
                        pairs.push((f.clone(), c));
                    }
                }
            }
        }
        let k = z.width().max(z.height());
        for cell in z.outer_boundary() {
            for i in 0..=k {
                for j in 0..=k {
                    let mut f = if cell.u > 0 { vec![cell.u; i] } else { Vec::new() };
                    let mut c = Vec::new();
                    match cell.v {
                        0 => {}
                        1 => f.extend(std::iter::repeat_n(1, j)),
                        v => c.extend(std::iter::repeat_n(v, j)),
                    }
                    f.sort_unstable_by(|a, b| b.cmp(a));
                    if !f.is_empty() || !c.is_empty() {
                        pairs.push((f, c));
                    }
                }
            }
        }
        pairs.retain(|p| seen.insert(p.clone()));
        if meter.charge(pairs.len() as u64).is_err() {
            self.complete = false;
            return Ok(());
        }
        self.nodes += pairs.len() as u64;
        let spanning: Vec<bool> = pairs
            .par_iter()
            .map(|(f, c)| spans(&z, &thin_layout(&z, f, c)))
            .collect::<Result<Vec<_>>>()?;
        for ((rows, cols), ok) in pairs.into_iter().zip(spanning) {
            if ok {
                self.candidates.push(Candidate::Thin { rows, cols });
            }
        }
        Ok(())
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Whether the box enumeration finished within the budget.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Best lower bound available without search: the discrete bound over all `k`.
    pub fn lower_bound(&self, q: &RateQuery) -> Q {
        lower_from_diag_gammas(&self.diag_gammas, q)
    }

    fn closed_form(&self, q: &RateQuery) -> Result<Option<Q>> {
        let z = &self.z;
        let rect = z.rows().iter().all(|&r| r == z.width());
        if rect && q.alpha < Q::one() && q.beta < Q::one() {
            return rate_rect_closed(z.width(), z.height(), q).map(Some);
        }
        let theta = z.width();
        if q.alpha == q.beta && *z == YoungDiagram::triangle(theta) {
            return rate_bootstrap_diag(theta, q.alpha).map(Some);
        }
        Ok(None)
    }

    /// Minimum of `ρ` over the family, with witnesses.
    pub fn query(&self, q: &RateQuery) -> Result<RateResult> {
        let mut best: Option<(Q, usize)> = None;
        for (i, c) in self.candidates.iter().enumerate() {
            let value = match c {
                Candidate::Box { points, px, py } => {
                    let lb = pos_part(q.energy(points.len(), *px, *py));
                    if best.is_some_and(|(b, _)| lb >= b) {
                        continue;
                    }
                    if q.alpha + q.beta <= Q::one() {
                        lb
                    } else {
                        rho(q, &PointSet::from_cells(points.clone())).value
                    }
                }
                Candidate::Thin { rows, cols } => thin_rho(q, rows, cols),
            };
            if best.is_none_or(|(b, _)| value < b) {
                best = Some((value, i));
            }
        }
        let (value, idx) = best.ok_or_else(|| Error::Internal("empty candidate family".into()))?;
        let a = match &self.candidates[idx] {
            Candidate::Box { points, .. } => {
                let (n, m) = self.box_dims;
                PointSet::new(n, m, points.clone())?
            }
            Candidate::Thin { rows, cols } => thin_layout(&self.z, rows, cols),
        };
        let r = rho(q, &a);
        if r.value != value {
            return Err(Error::Internal("candidate energy mismatch".into()));
        }
        let lower = self.lower_bound(q);
        let closed = self.closed_form(q)?;
        if closed.is_some_and(|c| value < c) {
            return Err(Error::Internal(format!(
                "search value {} is below the closed form {}",
                format_q(&value),
                format_q(&closed.unwrap_or_default())
            )));
        }
        let exact = value.is_zero() || value == lower || closed == Some(value);
        if !self.complete && !exact {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                bounds: PartialBounds {
                    lower: format_q(&lower),
                    upper: format_q(&value),
                    nodes: self.nodes,
                },
            });
        }
        Ok(RateResult {
            value,
            witness_a: a,
            witness_b: r.witness_b,
            exact,
        })
    }
}

/// Loads `cells` and runs the board; true if it fills.
fn spans_with(board: &mut Board, cells: &[Cell], skip: usize) -> bool {
    board.clear();
    for (i, c) in cells.iter().enumerate() {
        if i != skip {
            board.insert(c.u, c.v);
        }
    }
    board.run();
    board.is_full()
}

/// No single point can be dropped without losing the spanning property.
fn is_minimal(board: &mut Board, cells: &[Cell]) -> bool {
    (0..cells.len()).all(|i| !spans_with(board, cells, i))
}

/// `I(α,β,Z)` as the minimum of `ρ` over the search family.
pub fn rate_search(z: &YoungDiagram, q: &RateQuery, cfg: SearchConfig) -> Result<RateResult> {
    RateSearcher::new(z, cfg)?.query(q)
}

// ---------------------------------------------------------------------------
// Enhancement rate

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancementRate {
    #[serde(with = "serde_q")]
    pub value: Q,
    pub a: PointSet,
    pub f: Enhancement,
    pub g: Enhancement,
    pub nodes: u64,
}

/// `Ī(α,β,Z) = min |A| + (1−α)Σf + (1−β)Σg` over initial sets
/// `A ⊆ R_{a_0,b_0}` and enhancements (supported on the box lines, entries
/// capped at `a_0` and `b_0`) under which `A` spans. Candidates are pruned
/// by the best objective found so far, starting from `γ(Z)`.
pub fn enhancement_rate(z: &YoungDiagram, q: &RateQuery, budget: SearchBudget) -> Result<EnhancementRate> {
    let (a0, b0) = (z.width(), z.height());
    let one = Q::one();
    if z.is_empty() {
        return Ok(EnhancementRate {
            value: Q::zero(),
            a: PointSet::empty(0, 0),
            f: Enhancement::zero(),
            g: Enhancement::zero(),
            nodes: 0,
        });
    }
    if q.alpha == one || q.beta == one {
        let (f, g) = if q.alpha == one {
            (Enhancement::new(vec![a0; b0])?, Enhancement::zero())
        } else {
            (Enhancement::zero(), Enhancement::new(vec![b0; a0])?)
        };
        return Ok(EnhancementRate {
            value: Q::zero(),
            a: PointSet::empty(a0, b0),
            f,
            g,
            nodes: 0,
        });
    }
    let cells = a0 * b0;
    if cells > 24 {
        return Err(Error::ResourceCap(format!(
            "enhancement search box has {cells} cells (limit 24)"
        )));
    }
    let base = gamma(z, budget)?;
    let mut best = (
        qi(base.value as i64),
        base.witness.clone(),
        Enhancement::zero(),
        Enhancement::zero(),
    );
    let all: Vec<Cell> = (0..b0).flat_map(|v| (0..a0).map(move |u| Cell::new(u, v))).collect();
    let mut nodes = 0u64;
    let (wa, wb) = (one - q.alpha, one - q.beta);
    let f_lists: Vec<Vec<Vec<usize>>> = (0..=a0 * b0)
        .map(|s| {
            partitions_between(s, 1, a0)
                .into_iter()
                .filter(|p| p.len() <= b0)
                .collect()
        })
        .collect();
    let g_lists: Vec<Vec<Vec<usize>>> = (0..=a0 * b0)
        .map(|s| {
            partitions_between(s, 1, b0)
                .into_iter()
                .filter(|p| p.len() <= a0)
                .collect()
        })
        .collect();
    for size in 0..=cells {
        if qi(size as i64) >= best.0 {
            break;
        }
        for mask in subsets_of_size(cells, size) {
            let pts: Vec<Cell> = (0..cells).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            let a = PointSet::new(a0, b0, pts)?;
            for (mf, fl) in f_lists.iter().enumerate() {
                let cost_f = qi(size as i64) + wa * qi(mf as i64);
                if cost_f >= best.0 {
                    break;
                }
                for (mg, gl) in g_lists.iter().enumerate() {
                    let cost = cost_f + wb * qi(mg as i64);
                    if cost >= best.0 {
                        break;
                    }
                    for f in fl {
                        for g in gl {
                            nodes += 1;
                            if nodes > budget.nodes {
                                return Err(Error::BudgetExceeded {
                                    budget: budget.nodes,
                                    bounds: PartialBounds {
                                        lower: "0".into(),
                                        upper: format_q(&best.0),
                                        nodes,
                                    },
                                });
                            }
                            let (f, g) = (Enhancement::new(f.clone())?, Enhancement::new(g.clone())?);
                            if cost < best.0 && spans_enhanced(z, &f, &g, &a)? {
                                best = (cost, a.clone(), f, g);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(EnhancementRate {
        value: best.0,
        a: best.1,
        f: best.2,
        g: best.3,
        nodes,
    })
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = (1 << k) - 1;
    while x < 1 << n {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}
