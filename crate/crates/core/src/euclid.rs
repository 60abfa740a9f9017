//! Continuous zero-sets, their discretizations `Z_n` (scale `1/n`), and the
//! closed-form limits that the discrete quantities are compared against.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{gamma, SearchBudget};
use crate::rate::{rate_rect_closed, RateQuery};
use crate::rational::{floor_q, format_q, max_q, parse_q, qi, serde_q, to_f64, Q};
use crate::young::YoungDiagram;

/// `c = π/√6`, the rate of the uniform-partition limit curve.
pub fn vershik_c() -> f64 {
    std::f64::consts::PI / 6f64.sqrt()
}

/// `6^{1/4}`: the corner-growth curve is `√x + √y = 6^{1/4}`.
pub fn rost_c() -> f64 {
    6f64.powf(0.25)
}

/// One band of a staircase: the region has horizontal extent `width` for
/// heights up to `top` (and above the previous band's top).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(with = "serde_q")]
    pub width: Q,
    #[serde(with = "serde_q")]
    pub top: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EuclideanZeroSet {
    Staircase {
        steps: Vec<Step>,
    },
    Rectangle {
        #[serde(with = "serde_q")]
        a: Q,
        #[serde(with = "serde_q")]
        b: Q,
    },
    /// `R̃_{a,1} ∪ R̃_{1,a}`.
    Lshape {
        #[serde(with = "serde_q")]
        a: Q,
    },
    RostCurve,
    /// Unbounded; `radius` truncates it to `[0,R]²`.
    VershikCurve {
        #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_q")]
        radius: Option<Q>,
    },
}

mod opt_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(x) => serde_q::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|t| parse_q(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

fn positive(name: &str, x: Q) -> Result<Q> {
    if x.is_positive() {
        Ok(x)
    } else {
        Err(Error::invalid(format!(
            "{name} must be positive (got {})",
            format_q(&x)
        )))
    }
}

impl EuclideanZeroSet {
    /// Validates and normalizes a staircase: tops strictly increasing,
    /// widths positive and nonincreasing. Equal-width bands are merged.
    pub fn staircase(steps: Vec<Step>) -> Result<Self> {
        let mut out: Vec<Step> = Vec::with_capacity(steps.len());
        let mut prev_top = Q::zero();
        for s in steps {
            positive("step width", s.width)?;
            if s.top <= prev_top {
                return Err(Error::invalid(
                    "staircase tops must be positive and strictly increasing",
                ));
            }
            prev_top = s.top;
            match out.last_mut() {
                Some(last) if s.width > last.width => {
                    return Err(Error::invalid("staircase widths must be nonincreasing"));
                }
                Some(last) if s.width == last.width => last.top = s.top,
                _ => out.push(s),
            }
        }
        Ok(EuclideanZeroSet::Staircase { steps: out })
    }

    pub fn rectangle(a: Q, b: Q) -> Result<Self> {
        Ok(EuclideanZeroSet::Rectangle {
            a: positive("a", a)?,
            b: positive("b", b)?,
        })
    }

    pub fn lshape(a: Q) -> Result<Self> {
        if a < Q::one() {
            return Err(Error::invalid("the L-shape arm length must be at least 1"));
        }
        Ok(EuclideanZeroSet::Lshape { a })
    }

    /// Exact bands for the polygonal kinds.
    pub fn steps(&self) -> Option<Vec<Step>> {
        let one = Q::one();
        match self {
            EuclideanZeroSet::Staircase { steps } => Some(steps.clone()),
            EuclideanZeroSet::Rectangle { a, b } => Some(vec![Step { width: *a, top: *b }]),
            EuclideanZeroSet::Lshape { a } if *a == one => Some(vec![Step { width: one, top: one }]),
            EuclideanZeroSet::Lshape { a } => Some(vec![Step { width: *a, top: one }, Step { width: one, top: *a }]),
            _ => None,
        }
    }

    /// Horizontal extent at height `y` (left limit at band tops; 0 above the region).
    pub fn width_at(&self, y: f64) -> f64 {
        if let Some(steps) = self.steps() {
            return steps
                .iter()
                .find(|s| y <= to_f64(&s.top))
                .map_or(0.0, |s| to_f64(&s.width));
        }
        match self {
            EuclideanZeroSet::RostCurve => {
                let c = rost_c();
                if y < 0.0 {
                    c * c
                } else if y.sqrt() >= c {
                    0.0
                } else {
                    (c - y.sqrt()).powi(2)
                }
            }
            EuclideanZeroSet::VershikCurve { radius } => {
                let r = radius.map_or(f64::INFINITY, |r| to_f64(&r));
                if y > r {
                    return 0.0;
                }
                if y <= 0.0 {
                    return r;
                }
                let c = vershik_c();
                (-(-(-c * y).exp()).ln_1p() / c).min(r)
            }
            _ => unreachable!(),
        }
    }

    /// Height of the region, `None` when unbounded.
    pub fn height(&self) -> Option<f64> {
        match self {
            EuclideanZeroSet::RostCurve => Some(rost_c().powi(2)),
            EuclideanZeroSet::VershikCurve { radius } => radius.map(|r| to_f64(&r)),
            _ => self.steps().map(|s| s.last().map_or(0.0, |l| to_f64(&l.top))),
        }
    }

    pub fn area_exact(&self) -> Option<Q> {
        let steps = self.steps()?;
        let mut prev = Q::zero();
        let mut total = Q::zero();
        for s in steps {
            total += s.width * (s.top - prev);
            prev = s.top;
        }
        Some(total)
    }

    /// Area (numeric for the curves; truncated if a radius is set).
    pub fn area(&self) -> f64 {
        if let Some(a) = self.area_exact() {
            return to_f64(&a);
        }
        match self {
            EuclideanZeroSet::RostCurve => 1.0,
            EuclideanZeroSet::VershikCurve { radius: None } => 1.0,
            _ => {
                let h = self.height().unwrap_or(0.0);
                simpson(|y| self.width_at(y), 0.0, h, 20_000)
            }
        }
    }

    /// Area lost to truncation (0 for bounded kinds).
    pub fn area_tail(&self) -> f64 {
        match self {
            EuclideanZeroSet::VershikCurve { radius: Some(_) } => (1.0 - self.area()).max(0.0),
            _ => 0.0,
        }
    }

    /// Width at the base plus height: the length of the outer boundary
    /// that is not on the axes is at most this.
    pub fn semi_perimeter(&self) -> f64 {
        self.width_at(0.0) + self.height().unwrap_or(f64::INFINITY)
    }

    /// The inclusion-maximal diagram `Z_n` with `(1/n)·square(Z_n) ⊆ E`.
    pub fn discretize(&self, n: usize) -> Result<YoungDiagram> {
        if n == 0 {
            return Err(Error::invalid("the scale n must be at least 1"));
        }
        if let EuclideanZeroSet::VershikCurve { radius: None } = self {
            return Err(Error::invalid(
                "the uniform-partition curve is unbounded; give a truncation radius",
            ));
        }
        let nq = qi(n as i64);
        let mut rows = Vec::new();
        if let Some(steps) = self.steps() {
            for s in &steps {
                // rows whose top edge (v+1)/n lies in this band
                let len = floor_q(&(s.width * nq)) as usize;
                let top_rows = floor_q(&(s.top * nq)) as usize;
                while rows.len() < top_rows {
                    rows.push(len);
                }
            }
        } else {
            let nf = n as f64;
            for v in 0.. {
                let w = self.width_at((v + 1) as f64 / nf);
                let len = (w * nf + 1e-9).floor() as usize;
                if len == 0 {
                    break;
                }
                rows.push(len);
            }
        }
        while rows.last() == Some(&0) {
            rows.pop();
        }
        YoungDiagram::from_rows(rows)
    }

    /// `|area(Z_n)/n² − area(E)|`.
    pub fn area_gap(&self, n: usize) -> Result<f64> {
        let z = self.discretize(n)?;
        Ok((z.cardinality() as f64 / (n * n) as f64 - self.area()).abs())
    }

    /// `s·E` for a positive rational `s`.
    pub fn scale(&self, s: Q) -> Result<Self> {
        positive("scale", s)?;
        match self {
            EuclideanZeroSet::Rectangle { a, b } => EuclideanZeroSet::rectangle(*a * s, *b * s),
            _ => match self.steps() {
                Some(steps) => EuclideanZeroSet::staircase(
                    steps
                        .into_iter()
                        .map(|t| Step {
                            width: t.width * s,
                            top: t.top * s,
                        })
                        .collect(),
                ),
                None => Err(Error::invalid("only polygonal zero-sets can be rescaled exactly")),
            },
        }
    }

    /// Limit of `γ(Z_n)/n²` when known in closed form.
    pub fn known_gamma(&self) -> Option<Q> {
        match self {
            EuclideanZeroSet::Rectangle { a, b } => Some(*a * *b),
            EuclideanZeroSet::Lshape { a } if *a == Q::one() || *a >= qi(2) => Some(*a),
            EuclideanZeroSet::Staircase { steps } if steps.is_empty() => Some(Q::zero()),
            _ => None,
        }
    }

    pub fn known_gamma_thin(&self) -> Option<Q> {
        match self {
            EuclideanZeroSet::Lshape { a } if *a >= qi(2) => Some(qi(2) * (*a - Q::one())),
            _ => None,
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

impl fmt::Display for EuclideanZeroSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EuclideanZeroSet::Staircase { steps } => {
                let parts: Vec<String> = steps
                    .iter()
                    .map(|s| format!("{}@{}", format_q(&s.width), format_q(&s.top)))
                    .collect();
                write!(f, "stair:{}", parts.join(","))
            }
            EuclideanZeroSet::Rectangle { a, b } => write!(f, "rect:{}x{}", format_q(a), format_q(b)),
            EuclideanZeroSet::Lshape { a } => write!(f, "lshape:{}", format_q(a)),
            EuclideanZeroSet::RostCurve => write!(f, "rost"),
            EuclideanZeroSet::VershikCurve { radius: None } => write!(f, "vershik"),
            EuclideanZeroSet::VershikCurve { radius: Some(r) } => write!(f, "vershik:{}", format_q(r)),
        }
    }
}

/// `rect:AxB`, `lshape:A`, `stair:W@Y,W@Y,...`, `rost`, `vershik[:R]`, or JSON.
impl FromStr for EuclideanZeroSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let e: EuclideanZeroSet = serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))?;
            return match e {
                EuclideanZeroSet::Staircase { steps } => EuclideanZeroSet::staircase(steps),
                EuclideanZeroSet::Rectangle { a, b } => EuclideanZeroSet::rectangle(a, b),
                EuclideanZeroSet::Lshape { a } => EuclideanZeroSet::lshape(a),
                other => Ok(other),
            };
        }
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "rect" => {
                let (a, b) = arg
                    .split_once('x')
                    .ok_or_else(|| Error::invalid(format!("expected rect:AxB, got {s:?}")))?;
                EuclideanZeroSet::rectangle(parse_q(a)?, parse_q(b)?)
            }
            "lshape" => EuclideanZeroSet::lshape(parse_q(arg)?),
            "stair" if arg.trim().is_empty() => EuclideanZeroSet::staircase(Vec::new()),
            "stair" => {
                let steps = arg
                    .split(',')
                    .map(|p| {
                        let (w, t) = p
                            .split_once('@')
                            .ok_or_else(|| Error::invalid(format!("expected WIDTH@TOP, got {p:?}")))?;
                        Ok(Step {
                            width: parse_q(w)?,
                            top: parse_q(t)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                EuclideanZeroSet::staircase(steps)
            }
            "rost" => Ok(EuclideanZeroSet::RostCurve),
            "vershik" if arg.is_empty() => Ok(EuclideanZeroSet::VershikCurve { radius: None }),
            "vershik" => Ok(EuclideanZeroSet::VershikCurve {
                radius: Some(positive("radius", parse_q(arg)?)?),
            }),
            _ => Err(Error::invalid(format!("unknown Euclidean zero-set {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub n: usize,
    pub cells: usize,
    pub gamma: usize,
    #[serde(with = "serde_q")]
    pub value: Q,
    pub reference: Option<f64>,
}

/// `γ(Z_n)/n²` for each `n`, with the known limit when there is one.
pub fn scaled_gamma_series(e: &EuclideanZeroSet, ns: &[usize], budget: SearchBudget) -> Result<Vec<SeriesEntry>> {
    let reference = e.known_gamma().map(|g| to_f64(&g));
    ns.par_iter()
        .map(|&n| {
            let z = e.discretize(n)?;
            let g = gamma(&z, budget)?.value;
            Ok(SeriesEntry {
                n,
                cells: z.cardinality(),
                gamma: g,
                value: Q::new(g as i64, (n * n) as i64),
                reference,
            })
        })
        .collect()
}

/// Externally supplied estimates for kinds without closed forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hints {
    pub gamma: Option<f64>,
    pub gamma_thin: Option<f64>,
}

/// Every closed-form value or bound that applies to `e` at `q`:
/// - `area`, `gamma`, `gamma-thin` when known;
/// - `rate-lower = (1−max)γ̃` and `rate-upper = min((1−max)·area, 2(1−min)γ̃, γ̃)`;
/// - `rate` for rectangles, `(1−max(α,β))ab`;
/// - on the diagonal for L-shapes: `lshape-lower = a−2α−9aα^{3/2}` and
///   `lshape-upper = a−2α` (for `a ≥ 3`, `0 < α < 1`), and
///   `thin-lower = 2(a−1)((1−α)−2(1−α)²)`, `thin-upper = 2(a−1)(1−α)`;
/// - corner slopes: `slope-alpha-0 = area`, `slope-diagonal = γ̃_thin`.
pub fn reference_values(e: &EuclideanZeroSet, q: &RateQuery, hints: Hints) -> BTreeMap<String, f64> {
    let (al, be) = (to_f64(&q.alpha), to_f64(&q.beta));
    let (hi, lo) = (al.max(be), al.min(be));
    let mut m = BTreeMap::new();
    let area = e.area();
    m.insert("area".to_string(), area);
    m.insert("slope-alpha-0".to_string(), area);
    let g = e.known_gamma().map(|g| to_f64(&g)).or(hints.gamma);
    let gt = e.known_gamma_thin().map(|g| to_f64(&g)).or(hints.gamma_thin);
    if let Some(g) = g {
        m.insert("gamma".to_string(), g);
        m.insert("rate-lower".to_string(), (1.0 - hi) * g);
        m.insert(
            "rate-upper".to_string(),
            ((1.0 - hi) * area).min(2.0 * (1.0 - lo) * g).min(g),
        );
    }
    if let Some(t) = gt {
        m.insert("gamma-thin".to_string(), t);
        m.insert("slope-diagonal".to_string(), t);
    }
    match e {
        EuclideanZeroSet::Rectangle { a, b } => {
            m.insert(
                "rate".to_string(),
                to_f64(&((Q::one() - max_q(q.alpha, q.beta)) * *a * *b)),
            );
        }
        EuclideanZeroSet::Lshape { a } if q.alpha == q.beta => {
            let af = to_f64(a);
            if *a >= qi(3) && al > 0.0 && al < 1.0 {
                m.insert("lshape-lower".to_string(), af - 2.0 * al - 9.0 * af * al.powf(1.5));
                m.insert("lshape-upper".to_string(), af - 2.0 * al);
            }
            if *a >= qi(2) {
                let s = 1.0 - al;
                m.insert("thin-lower".to_string(), 2.0 * (af - 1.0) * (s - 2.0 * s * s));
                m.insert("thin-upper".to_string(), 2.0 * (af - 1.0) * s);
            }
        }
        _ => {}
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `I(α,β,R_{n,n})/n²`.
    #[serde(with = "serde_q")]
    pub value: Q,
    #[serde(with = "serde_q")]
    pub reference: Q,
}

/// Rate of convergence of `I(α,β,R_{n,n})/n²` to `1 − max(α,β)`.
///
/// `D(n) = I(R_{n,n}) − (1−max)n²` is affine in `n` from some `n_0` on:
/// `D(n) = c_1 n + c_0`. Hence `|I/n² − (1−max)| ≤ C/n` for every `n ≥ 1`
/// with `C = max(max_{n<n_0} n|diff_n|, |c_1| + |c_0|/n_0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectConvergence {
    pub rows: Vec<ConvergenceRow>,
    pub affine_from: usize,
    #[serde(with = "serde_q")]
    pub slope: Q,
    #[serde(with = "serde_q")]
    pub intercept: Q,
    #[serde(with = "serde_q")]
    pub constant: Q,
}

pub fn rect_convergence(q: &RateQuery, n_max: usize) -> Result<RectConvergence> {
    let one = Q::one();
    let lim = one - max_q(q.alpha, q.beta);
    let d = |n: usize| -> Result<Q> {
        let nq = qi(n as i64);
        Ok(rate_rect_closed(n, n, q)? - lim * nq * nq)
    };
    // the closed form has a single regime once n exceeds both floor offsets
    let (al, be) = (q.alpha, q.beta);
    let da = floor_q(&(be / (one - al))) as usize;
    let db = floor_q(&(al / (one - be))) as usize;
    let n0 = da.max(db) + 1;
    let (d0, d1, d2) = (d(n0)?, d(n0 + 1)?, d(n0 + 2)?);
    let slope = d1 - d0;
    if d2 - d1 != slope {
        return Err(Error::Internal("rectangle rate is not affine past the offsets".into()));
    }
    let intercept = d0 - slope * qi(n0 as i64);
    for n in n0..n0 + 3 * n0 + 8 {
        if d(n)? != slope * qi(n as i64) + intercept {
            return Err(Error::Internal(format!("affine law fails at n = {n}")));
        }
    }
    let mut constant = slope.abs() + intercept.abs() / qi(n0 as i64);
    for n in 1..n0 {
        let nq = qi(n as i64);
        constant = max_q(constant, (d(n)? / nq).abs());
    }
    let rows = (1..=n_max)
        .map(|n| {
            let nq = qi(n as i64);
            Ok(ConvergenceRow {
                n,
                value: rate_rect_closed(n, n, q)? / (nq * nq),
                reference: lim,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RectConvergence {
        rows,
        affine_from: n0,
        slope,
        intercept,
        constant,
    })
}
