//! Monte Carlo estimates of the spanning probability at density `p` in
//! boxes `⌈p^{-α}⌉ × ⌈p^{-β}⌉`, power-law slope fitting, and random Young
//! diagram samplers with limit-shape distances.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{rost_c, vershik_c, EuclideanZeroSet};
use crate::growth::Board;
use crate::rate::RateQuery;
use crate::rational::to_f64;
use crate::young::YoungDiagram;

/// Default cap on `N·M` per replicate.
pub const DEFAULT_CELL_CAP: u64 = 1 << 26;

const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone)]
pub struct McConfig {
    pub z: YoungDiagram,
    pub q: RateQuery,
    pub p_list: Vec<f64>,
    pub replicates: u64,
    pub seed: u64,
    pub cell_cap: u64,
}

impl McConfig {
    pub fn new(z: YoungDiagram, q: RateQuery, p_list: Vec<f64>, replicates: u64, seed: u64) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::invalid("at least one replicate is required"));
        }
        if p_list.is_empty() {
            return Err(Error::invalid("the density list is empty"));
        }
        for &p in &p_list {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::invalid(format!("density {p} is outside (0,1)")));
            }
        }
        if p_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("densities must be strictly decreasing"));
        }
        Ok(McConfig {
            z,
            q,
            p_list,
            replicates,
            seed,
            cell_cap: DEFAULT_CELL_CAP,
        })
    }

    /// `(⌈p^{-α}⌉, ⌈p^{-β}⌉)`.
    pub fn box_for(&self, p: f64) -> (usize, usize) {
        let side = |e: f64| p.powf(-e).ceil() as usize;
        (side(to_f64(&self.q.alpha)), side(to_f64(&self.q.beta)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub p: f64,
    pub n: usize,
    pub m: usize,
    pub successes: u64,
    pub replicates: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub rows: Vec<McRow>,
    /// Weighted least-squares slope of `log p̂` on `log p`, `None` with
    /// fewer than three rows strictly inside `(0,1)`.
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
}

/// Wilson score interval at 95%.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let ph = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (ph + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

fn row_for(p: f64, n: usize, m: usize, successes: u64, reps: u64) -> McRow {
    let (lo, hi) = wilson(successes, reps);
    McRow {
        p,
        n,
        m,
        successes,
        replicates: reps,
        p_hat: successes as f64 / reps as f64,
        ci_low: lo,
        ci_high: hi,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Sets each cell of `R_{n,m}` independently with probability `p` and
/// reports whether the set spans. Each row gets a binomial count of points
/// placed at distinct uniform columns.
fn sample_spans(board: &mut Board, n: usize, m: usize, p: f64, rng: &mut ChaCha8Rng) -> bool {
    board.clear();
    let bin = Binomial::new(n as u64, p).expect("valid density");
    for v in 0..m {
        let k = bin.sample(rng) as usize;
        for u in index::sample(rng, n, k) {
            board.insert(u, v);
        }
    }
    board.run();
    board.is_full()
}

fn check_cap(cfg: &McConfig, n: usize, m: usize) -> Result<()> {
    let cells = n as u64 * m as u64;
    if cells > cfg.cell_cap {
        return Err(Error::ResourceCap(format!(
            "box {n}x{m} has {cells} cells, above the cap of {}",
            cfg.cell_cap
        )));
    }
    Ok(())
}

/// Estimates `P(Span)` for every density. Replicate `r` at the `i`-th
/// density draws from ChaCha stream `(i << 40) | r` under `seed`, so the
/// result does not depend on the number of worker threads.
pub fn span_probability(cfg: &McConfig) -> Result<McEstimate> {
    let mut rows = Vec::with_capacity(cfg.p_list.len());
    for (i, &p) in cfg.p_list.iter().enumerate() {
        let (n, m) = cfg.box_for(p);
        check_cap(cfg, n, m)?;
        let (bn, bm) = (n.max(cfg.z.width()), m.max(cfg.z.height()));
        let successes: u64 = (0..cfg.replicates)
            .into_par_iter()
            .map_init(
                || Board::new(&cfg.z, bn, bm),
                |board, r| {
                    let mut rng = rng_for(cfg.seed, (i as u64) << 40 | r);
                    u64::from(sample_spans(board, n, m, p, &mut rng))
                },
            )
            .sum();
        rows.push(row_for(p, n, m, successes, cfg.replicates));
    }
    let fit = slope_fit(&rows).ok();
    Ok(McEstimate {
        rows,
        slope: fit.map(|f| f.0),
        stderr: fit.map(|f| f.1),
    })
}

/// Coupled estimate in one fixed `n × m` box: every replicate draws a
/// uniform label per cell once and each density keeps the cells below it,
/// so `p̂` is nondecreasing in `p` on every run.
pub fn span_probability_coupled(cfg: &McConfig, n: usize, m: usize) -> Result<McEstimate> {
    check_cap(cfg, n, m)?;
    let (bn, bm) = (n.max(cfg.z.width()), m.max(cfg.z.height()));
    let counts: Vec<u64> = (0..cfg.replicates)
        .into_par_iter()
        .map_init(
            || Board::new(&cfg.z, bn, bm),
            |board, r| {
                let mut rng = rng_for(cfg.seed, r);
                let labels: Vec<f64> = (0..n * m).map(|_| rng.random::<f64>()).collect();
                cfg.p_list
                    .iter()
                    .map(|&p| {
                        board.clear();
                        for (i, &x) in labels.iter().enumerate() {
                            if x < p {
                                board.insert(i % n, i / n);
                            }
                        }
                        board.run();
                        u64::from(board.is_full())
                    })
                    .collect::<Vec<u64>>()
            },
        )
        .reduce(
            || vec![0; cfg.p_list.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let rows: Vec<McRow> = cfg
        .p_list
        .iter()
        .zip(counts)
        .map(|(&p, s)| row_for(p, n, m, s, cfg.replicates))
        .collect();
    let fit = slope_fit(&rows).ok();
    Ok(McEstimate {
        rows,
        slope: fit.map(|f| f.0),
        stderr: fit.map(|f| f.1),
    })
}

/// Fits `log p̂ = I·log p + c` over rows with `0 < p̂ < 1`, weighting each
/// row by the inverse delta-method variance of `log p̂`, `n p̂/(1 − p̂)`.
/// Returns `(slope, standard error)`.
pub fn slope_fit(rows: &[McRow]) -> Result<(f64, f64)> {
    let usable: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.p_hat > 0.0 && r.p_hat < 1.0)
        .map(|r| (r.p.ln(), r.p_hat.ln(), r.replicates as f64 * r.p_hat / (1.0 - r.p_hat)))
        .collect();
    if usable.len() < 3 {
        return Err(Error::invalid(format!(
            "slope fit needs at least 3 rows with 0 < p_hat < 1 (have {})",
            usable.len()
        )));
    }
    let sw: f64 = usable.iter().map(|r| r.2).sum();
    let mx = usable.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let my = usable.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = usable.iter().map(|r| r.2 * (r.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|r| r.2 * (r.0 - mx) * (r.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid("slope fit needs at least two distinct densities"));
    }
    Ok((sxy / sxx, (1.0 / sxx).sqrt()))
}

// ---------------------------------------------------------------------------
// Random Young diagrams

/// Corner growth: starting from `∅`, add one of the currently addable
/// cells, chosen uniformly, `n` times.
pub fn rost_sample(n: usize, seed: u64) -> YoungDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = Vec::new();
    // addable row indices, ascending; row `rows.len()` is always addable
    let mut corners: Vec<usize> = vec![0];
    let addable = |rows: &[usize], v: usize| v == 0 || v == rows.len() || (v < rows.len() && rows[v] < rows[v - 1]);
    for _ in 0..n {
        let v = corners[rng.random_range(0..corners.len())];
        if v == rows.len() {
            rows.push(1);
        } else {
            rows[v] += 1;
        }
        for w in [v, v + 1] {
            let now = addable(&rows, w);
            match (corners.binary_search(&w), now) {
                (Ok(i), false) => {
                    corners.remove(i);
                }
                (Err(i), true) => corners.insert(i, w),
                _ => {}
            }
        }
    }
    YoungDiagram::from_rows(rows).expect("corner growth keeps rows nonincreasing")
}

pub const DEFAULT_RETRIES: u64 = 1_000_000;

/// A uniformly random partition of `n`: part multiplicities `m_i` are
/// independent with `P(m_i = k) = (1 − x^i) x^{ik}`, `x = e^{−π/√(6n)}`, and
/// the draw is rejected unless `Σ i·m_i = n`. Sizes `i` where `x^i` is small
/// are reached by skipping ahead through a dominating Bernoulli sequence and
/// thinning, which keeps each attempt short without changing the law.
pub fn vershik_sample(n: usize, seed: u64, retries: u64) -> Result<YoungDiagram> {
    if n == 0 {
        return Err(Error::invalid("the uniform-partition sampler needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lnx = -std::f64::consts::PI / (6.0 * n as f64).sqrt();
    // x^i stays above this for i < dense; beyond it we thin
    let dense = ((0.05f64).ln() / lnx).ceil() as usize;
    let halving = ((0.5f64).ln() / lnx).ceil().max(1.0) as usize;
    let mut parts: Vec<(usize, usize)> = Vec::new();
    for _ in 0..retries {
        parts.clear();
        if attempt(n, lnx, dense, halving, &mut rng, &mut parts) {
            let mut rows = Vec::with_capacity(n);
            for &(i, k) in parts.iter().rev() {
                rows.extend(std::iter::repeat_n(i, k));
            }
            rows.sort_unstable_by(|a, b| b.cmp(a));
            return YoungDiagram::from_rows(rows);
        }
    }
    Err(Error::RetryBudget(retries))
}

/// Failures before the first success at probability `p`, by inversion.
fn failures_before_success(p: f64, rng: &mut ChaCha8Rng) -> u64 {
    let u: f64 = rng.random();
    let k = (1.0 - u).ln() / (-p).ln_1p();
    if k.is_finite() && k < u64::MAX as f64 {
        k as u64
    } else {
        u64::MAX
    }
}

fn attempt(
    n: usize,
    lnx: f64,
    dense: usize,
    halving: usize,
    rng: &mut ChaCha8Rng,
    parts: &mut Vec<(usize, usize)>,
) -> bool {
    let mut total = 0usize;
    let mut add = |i: usize, extra_from: f64, rng: &mut ChaCha8Rng, total: &mut usize| -> bool {
        // one part of size i already present; further copies are geometric
        let more = Geometric::new(1.0 - extra_from).expect("valid").sample(rng) as usize;
        let k = 1 + more;
        *total += i * k;
        parts.push((i, k));
        *total <= n
    };
    for i in 1..dense.min(n + 1) {
        let xi = (lnx * i as f64).exp();
        // P(m_i >= 1) = x^i
        if rng.random::<f64>() < xi && !add(i, xi, rng, &mut total) {
            return false;
        }
    }
    let mut start = dense;
    while start <= n {
        let q = (lnx * start as f64).exp();
        let end = start + halving;
        let skip = failures_before_success(q, rng);
        let j = (start as u64).saturating_add(skip);
        if j >= end as u64 {
            start = end;
            continue;
        }
        let j = j as usize;
        if j > n {
            break;
        }
        let xj = (lnx * j as f64).exp();
        if rng.random::<f64>() < xj / q && !add(j, xj, rng, &mut total) {
            return false;
        }
        start = j + 1;
    }
    total == n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitCurve {
    Rost,
    Vershik,
}

impl std::str::FromStr for LimitCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rost" => Ok(LimitCurve::Rost),
            "vershik" => Ok(LimitCurve::Vershik),
            _ => Err(Error::invalid(format!(
                "unknown limit curve {s:?} (expected rost or vershik)"
            ))),
        }
    }
}

impl LimitCurve {
    /// Height of the limit region above `x ≥ 0`.
    pub fn height(&self, x: f64) -> f64 {
        match self {
            LimitCurve::Rost => EuclideanZeroSet::RostCurve.width_at(x),
            LimitCurve::Vershik => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    let c = vershik_c();
                    -(-(-c * x).exp()).ln_1p() / c
                }
            }
        }
    }

    pub fn limit_area(&self) -> f64 {
        match self {
            LimitCurve::Rost => rost_c().powi(4) / 6.0,
            LimitCurve::Vershik => 1.0,
        }
    }
}

/// Largest `t` with `(t + s, t)` in the region below `h`, bisecting on a
/// membership test (the region is down-left closed, so membership along
/// the diagonal is monotone).
fn diagonal_exit(s: f64, hi: f64, inside: impl Fn(f64, f64) -> bool) -> f64 {
    let t0 = (-s).max(0.0);
    if !inside(t0 + s, t0) {
        return t0;
    }
    let (mut lo, mut up) = (t0, t0 + hi);
    for _ in 0..100 {
        let mid = 0.5 * (lo + up);
        if inside(mid + s, mid) {
            lo = mid;
        } else {
            up = mid;
        }
    }
    lo
}

/// Distance between `n^{-1/2}·square(Y)` and the limit region, `n = |Y|`,
/// measured along the diagonal direction: for each `s` on a grid of pitch
/// at most `n^{-1/2}` in `[−R, R]`, the two boundaries cross the line
/// `x − y = s` at points `√2·|Δt|` apart; the sup over the grid is
/// returned. Along diagonals both boundaries are 1-Lipschitz graphs, so
/// the measure stays meaningful where the limit curve is vertical.
pub fn shape_distance(y: &YoungDiagram, curve: LimitCurve, r: f64) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::invalid("shape distance needs a nonempty diagram"));
    }
    let scale = 1.0 / (y.cardinality() as f64).sqrt();
    let rows = y.rows();
    let in_y = |x: f64, t: f64| {
        let v = (t / scale).floor() as usize;
        v < rows.len() && x < rows[v] as f64 * scale
    };
    let in_c = |x: f64, t: f64| t < curve.height(x);
    let span = 2.0 * r + 1.0;
    let steps = (2.0 * r / scale).ceil().max(1.0) as usize;
    let mut worst = 0.0f64;
    for k in 0..=steps {
        let s = -r + 2.0 * r * k as f64 / steps as f64;
        let a = diagonal_exit(s, span, in_y);
        let b = diagonal_exit(s, span, in_c);
        worst = worst.max(std::f64::consts::SQRT_2 * (a - b).abs());
    }
    Ok(worst)
}

/// Corners of the scaled boundary of `Y`, from the top of the first column
/// to the end of the first row.
pub fn boundary_points(y: &YoungDiagram) -> Vec<(f64, f64)> {
    let scale = 1.0 / (y.cardinality().max(1) as f64).sqrt();
    let rows = y.rows();
    let mut pts = vec![(0.0, rows.len() as f64 * scale)];
    for (v, &len) in rows.iter().enumerate().rev() {
        pts.push((len as f64 * scale, (v + 1) as f64 * scale));
        pts.push((len as f64 * scale, v as f64 * scale));
    }
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::young::partitions;
    use std::collections::HashMap;

    fn cfg(z: &str, a: (i64, i64), ps: Vec<f64>, reps: u64, seed: u64) -> McConfig {
        let x = RateQuery::new(q(a.0, a.1), q(a.0, a.1)).unwrap();
        McConfig::new(z.parse().unwrap(), x, ps, reps, seed).unwrap()
    }

    #[test]
    fn unit_square_matches_closed_form() {
        let c = cfg("1", (1, 4), vec![0.05, 0.02], 4000, 11);
        let est = span_probability(&c).unwrap();
        for r in &est.rows {
            let exact = 1.0 - (1.0 - r.p).powi((r.n * r.m) as i32);
            let sd = (exact * (1.0 - exact) / r.replicates as f64).sqrt();
            assert!((r.p_hat - exact).abs() <= 3.0 * sd + 1e-9, "{r:?}");
        }
    }

    #[test]
    fn extremes() {
        let dense = span_probability(&cfg("2,1", (1, 2), vec![0.999], 200, 1)).unwrap();
        assert!(dense.rows[0].p_hat >= 0.99);
        let sparse = span_probability(&cfg("2,1", (1, 4), vec![1e-6], 200, 1)).unwrap();
        assert_eq!(sparse.rows[0].p_hat, 0.0);
    }

    #[test]
    fn reproducible_across_pools() {
        let c = cfg("2,1", (1, 4), vec![0.1, 0.05], 300, 99);
        let run = |t: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| span_probability(&c).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn coupled_is_monotone() {
        let c = cfg("2,1", (1, 4), vec![0.3, 0.2, 0.1, 0.05], 300, 5);
        let est = span_probability_coupled(&c, 6, 6).unwrap();
        for w in est.rows.windows(2) {
            assert!(w[0].successes >= w[1].successes);
        }
    }

    #[test]
    fn exact_log_linear_slope() {
        let rows: Vec<McRow> = [0.1, 0.05, 0.02, 0.01]
            .iter()
            .map(|&p: &f64| {
                let ph = p.powf(0.7);
                McRow {
                    p,
                    n: 1,
                    m: 1,
                    successes: 0,
                    replicates: 1000,
                    p_hat: ph,
                    ci_low: ph,
                    ci_high: ph,
                }
            })
            .collect();
        let (s, _) = slope_fit(&rows).unwrap();
        assert!((s - 0.7).abs() < 1e-12);
        assert!(slope_fit(&rows[..2]).is_err());
    }

    #[test]
    fn wilson_brackets() {
        let (lo, hi) = wilson(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson(30, 60);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn rost_small() {
        assert!(rost_sample(0, 1).is_empty());
        assert_eq!(rost_sample(1, 1).rows(), &[1]);
        let mut row = 0;
        for seed in 0..2000 {
            let y = rost_sample(2, seed);
            if y.rows() == [2] {
                row += 1;
            }
        }
        assert!((800..1200).contains(&row));
        for n in [5, 50, 500] {
            assert_eq!(rost_sample(n, 9).cardinality(), n);
        }
    }

    #[test]
    fn vershik_uniform_small() {
        assert_eq!(vershik_sample(1, 4, 1000).unwrap().rows(), &[1]);
        for n in 2..=6 {
            let all = partitions(n);
            let draws = 3000 * all.len();
            let mut freq: HashMap<Vec<usize>, usize> = HashMap::new();
            for seed in 0..draws as u64 {
                let y = vershik_sample(n, seed, 10_000).unwrap();
                assert_eq!(y.cardinality(), n);
                *freq.entry(y.rows().to_vec()).or_default() += 1;
            }
            let expected = draws as f64 / all.len() as f64;
            let chi2: f64 = all
                .iter()
                .map(|p| {
                    let o = *freq.get(p.rows()).unwrap_or(&0) as f64;
                    (o - expected).powi(2) / expected
                })
                .sum();
            // p(6) = 11 partitions; the 0.999 quantile of chi-square(10) is 29.6
            assert!(chi2 < 30.0, "n={n} chi2={chi2}");
        }
    }

    #[test]
    fn discretized_curve_is_close() {
        let e = EuclideanZeroSet::RostCurve;
        for n in [20, 60] {
            let y = e.discretize(n).unwrap();
            let d = shape_distance(&y, LimitCurve::Rost, 2.0).unwrap();
            assert!(d <= 2.0 / (y.cardinality() as f64).sqrt() * 2.0, "n={n} d={d}");
        }
        assert!((LimitCurve::Rost.limit_area() - 1.0).abs() < 1e-12);
    }
}
