//! `hgrowth`: command-line front end for neighborhood growth computations.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 budget or
//! resource cap exceeded (partial bounds are still written to the output),
//! 4 internal error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hgrowth::euclid::{self, EuclideanZeroSet, Hints};
use hgrowth::extremal::{self, SearchBudget};
use hgrowth::growth::{self, Enhancement, PointSet};
use hgrowth::randmc::{self, LimitCurve, McConfig};
use hgrowth::rate::{self, RateQuery, RateSearcher, SearchConfig};
use hgrowth::rational::{format_q, max_q, min_q, parse_q, Q};
use hgrowth::{Error, YoungDiagram};

#[derive(Parser)]
#[command(name = "hgrowth", version, about = "Neighborhood growth on the Hamming plane")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "HG_THREADS")]
    threads: Option<usize>,

    /// Node budget for exhaustive searches.
    #[arg(long, global = true, env = "HG_BUDGET_NODES", default_value_t = SearchBudget::DEFAULT_NODES)]
    budget_nodes: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Args)]
struct ZeroArg {
    /// Zero-set: `3,2,1`, `rect:AxB`, `tri:T`, `lshape:A,B,C,D`, JSON, or `@file`.
    #[arg(long)]
    zero: String,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    beta: String,
}

#[derive(Args)]
struct PointsArgs {
    /// Initial set: a file (JSON or `# box N M` text), `-` for stdin, or inline `u,v;u,v`.
    #[arg(long)]
    points: String,
    /// Row enhancement, e.g. `3,1`.
    #[arg(long, default_value = "")]
    f: String,
    /// Column enhancement.
    #[arg(long, default_value = "")]
    g: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dynamics to its fixpoint.
    Evolve {
        #[command(flatten)]
        zero: ZeroArg,
        #[command(flatten)]
        pts: PointsArgs,
    },
    /// Whether the initial set spans.
    Span {
        #[command(flatten)]
        zero: ZeroArg,
        #[command(flatten)]
        pts: PointsArgs,
    },
    /// Completion-time bound depending only on the zero-set.
    Tmax {
        #[command(flatten)]
        zero: ZeroArg,
    },
    /// Smallest spanning set.
    Gamma {
        #[command(flatten)]
        zero: ZeroArg,
    },
    /// Smallest thin spanning set.
    GammaThin {
        #[command(flatten)]
        zero: ZeroArg,
    },
    /// Smallest enhancement under which the empty set spans.
    GammaBarThin {
        #[command(flatten)]
        zero: ZeroArg,
    },
    /// Cheap lower and upper bounds on gamma.
    GammaBounds {
        #[command(flatten)]
        zero: ZeroArg,
    },
    /// Energy-entropy functional of a point set.
    Rho {
        #[command(flatten)]
        q: QueryArgs,
        #[arg(long)]
        points: String,
        /// Use exhaustive subset enumeration (at most 16 points).
        #[arg(long)]
        brute: bool,
    },
    /// Large-deviation rate of the spanning probability.
    Rate {
        #[command(flatten)]
        zero: ZeroArg,
        #[arg(long, required_unless_present = "grid")]
        alpha: Option<String>,
        #[arg(long, required_unless_present = "grid")]
        beta: Option<String>,
        /// Padding of the search box beyond the zero-set.
        #[arg(long, default_value_t = 1)]
        pad: usize,
        /// Extra points allowed above gamma in box candidates.
        #[arg(long, default_value_t = 2)]
        extra: usize,
        /// Evaluate on the grid {i/G} x {j/G} instead of a single point.
        #[arg(long)]
        grid: Option<usize>,
        /// Minimize over enhancements instead (small zero-sets only).
        #[arg(long)]
        enhanced: bool,
        /// Search even when a closed form applies (rectangles).
        #[arg(long)]
        search: bool,
    },
    /// Line-growth rate of a rectangle.
    RateRect {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[command(flatten)]
        q: QueryArgs,
        #[arg(long, value_enum, default_value_t = RectMethod::Closed)]
        method: RectMethod,
    },
    /// Bootstrap-percolation rate on the diagonal.
    RateBp {
        #[arg(long)]
        theta: usize,
        #[arg(long)]
        alpha: String,
    },
    /// Support of the rate: membership at a point, or the boundary polyline.
    Support {
        #[command(flatten)]
        zero: ZeroArg,
        #[arg(long, requires = "beta")]
        alpha: Option<String>,
        #[arg(long, requires = "alpha")]
        beta: Option<String>,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Also write the boundary polyline as CSV `alpha,beta`.
        #[arg(long)]
        emit_boundary: Option<PathBuf>,
    },
    /// Continuous zero-sets and limit diagnostics.
    Euclid {
        #[command(subcommand)]
        cmd: EuclidCmd,
    },
    /// Monte Carlo spanning probability and slope fit.
    McSpan {
        #[command(flatten)]
        zero: ZeroArg,
        #[command(flatten)]
        q: QueryArgs,
        /// Decreasing densities, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        /// Coupled run in one fixed box `NxM` with shared uniforms.
        #[arg(long)]
        coupled: Option<String>,
        #[arg(long, default_value_t = randmc::DEFAULT_CELL_CAP)]
        cell_cap: u64,
    },
    /// Random Young diagram.
    SampleYoung {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = randmc::DEFAULT_RETRIES)]
        retries: u64,
        /// Write the scaled boundary corners as CSV `x,y`.
        #[arg(long)]
        emit_boundary: Option<PathBuf>,
        /// Window for the reported limit-shape distance.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Distance from a scaled diagram to a limit curve.
    ShapeDist {
        /// Diagram, in any zero-set syntax.
        #[arg(long)]
        diagram: String,
        #[arg(long, value_enum)]
        curve: Model,
        #[arg(long)]
        radius: String,
    },
}

#[derive(Subcommand)]
enum EuclidCmd {
    /// `γ(Z_n)/n²` along a list of scales.
    Series {
        /// `rect:AxB`, `lshape:A`, `stair:W@Y,...`, `rost`, `vershik:R`.
        #[arg(long)]
        shape: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Closed-form limit values and bounds.
    Refs {
        #[arg(long)]
        shape: String,
        #[command(flatten)]
        q: QueryArgs,
        /// Estimate of the limit gamma when no closed form is known.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Convergence of the scaled rectangle rate, with a certified constant.
    Convergence {
        #[command(flatten)]
        q: QueryArgs,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
    },
    /// The discretization `Z_n` as a diagram.
    Discretize {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RectMethod {
    Closed,
    Recursion,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Rost,
    Vershik,
}

impl From<Model> for LimitCurve {
    fn from(m: Model) -> Self {
        match m {
            Model::Rost => LimitCurve::Rost,
            Model::Vershik => LimitCurve::Vershik,
        }
    }
}

/// A command's result in every format it supports.
struct Out {
    json: Value,
    table: Option<Table>,
    plain: Option<String>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Out {
    fn json(json: Value) -> Self {
        Out {
            json,
            table: None,
            plain: None,
        }
    }

    fn plain(mut self, s: impl Into<String>) -> Self {
        self.plain = Some(s.into());
        self
    }

    fn table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }
}

enum Failure {
    Usage(String),
    Core(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool is configured once");
    }
    if cli.budget_nodes == 0 {
        eprintln!("error: the node budget must be positive");
        return ExitCode::from(1);
    }
    let result = run(&cli).and_then(|out| write_out(&cli, &out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            let (code, kind) = match &e {
                Error::InvalidInput(_) => (2, "invalid-input"),
                Error::BudgetExceeded { .. } => (3, "budget-exceeded"),
                Error::ResourceCap(_) => (3, "resource-cap"),
                Error::RetryBudget(_) => (3, "retry-budget"),
                Error::Internal(_) => (4, "internal"),
            };
            let mut report = json!({ "error": kind, "message": e.to_string() });
            if let Error::BudgetExceeded { budget, bounds } = &e {
                report["budget"] = json!(budget);
                report["lower"] = json!(bounds.lower);
                report["upper"] = json!(bounds.upper);
                report["nodes"] = json!(bounds.nodes);
            }
            if code == 3 {
                let text = serde_json::to_string_pretty(&report).expect("json") + "\n";
                if let Err(w) = write_text(&cli, &text) {
                    eprintln!("error: {w:#}");
                }
            }
            ExitCode::from(code)
        }
    }
}

fn write_text(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn write_out(cli: &Cli, out: &Out) -> Res<()> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        Format::Csv => {
            let t = out
                .table
                .as_ref()
                .ok_or_else(|| Failure::Usage("this subcommand has no CSV form; use --format json or plain".into()))?;
            let mut s = String::new();
            for n in &t.notes {
                s.push_str(&format!("# {n}\n"));
            }
            s.push_str(&t.header.join(","));
            s.push('\n');
            for r in &t.rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
            s
        }
        Format::Plain => match (&out.plain, &out.table) {
            (Some(p), _) => format!("{p}\n"),
            (None, Some(t)) => {
                let mut s = t.header.join("\t") + "\n";
                for r in &t.rows {
                    s.push_str(&r.join("\t"));
                    s.push('\n');
                }
                s
            }
            (None, None) => serde_json::to_string_pretty(&out.json).expect("json") + "\n",
        },
    };
    write_text(cli, &text)?;
    Ok(())
}

fn read_source(src: &str) -> anyhow::Result<Option<String>> {
    if src == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(Some(s));
    }
    if let Some(p) = src.strip_prefix('@') {
        return Ok(Some(fs::read_to_string(p).with_context(|| format!("reading {p}"))?));
    }
    if Path::new(src).is_file() {
        return Ok(Some(fs::read_to_string(src).with_context(|| format!("reading {src}"))?));
    }
    Ok(None)
}

fn parse_zero(src: &str) -> Res<YoungDiagram> {
    let text = read_source(src)?.unwrap_or_else(|| src.to_string());
    Ok(text.trim().parse()?)
}

fn parse_points(src: &str) -> Res<PointSet> {
    match read_source(src)? {
        Some(text) => Ok(PointSet::parse(&text)?),
        None => {
            let lines: Vec<String> = src
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.replace(',', " "))
                .collect();
            Ok(PointSet::parse(&lines.join("\n"))?)
        }
    }
}

fn parse_query(q: &QueryArgs) -> Res<RateQuery> {
    Ok(RateQuery::parse(&q.alpha, &q.beta)?)
}

fn qs(v: &Q) -> Value {
    json!(format_q(v))
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn run(cli: &Cli) -> Res<Out> {
    let budget = SearchBudget::new(cli.budget_nodes);
    match &cli.command {
        Command::Evolve { zero, pts } => {
            let z = parse_zero(&zero.zero)?;
            let a = parse_points(&pts.points)?;
            let (f, g): (Enhancement, Enhancement) = (pts.f.parse()?, pts.g.parse()?);
            let (fin, steps) = growth::evolve(&z, &f, &g, &a)?;
            let text = fin.to_text();
            Ok(Out::json(json!({
                "zero": z.to_string(),
                "steps": steps,
                "full": fin.is_full(),
                "final": to_value(&fin),
            }))
            .plain(text.trim_end()))
        }
        Command::Span { zero, pts } => {
            let z = parse_zero(&zero.zero)?;
            let a = parse_points(&pts.points)?;
            let (f, g): (Enhancement, Enhancement) = (pts.f.parse()?, pts.g.parse()?);
            let s = growth::spans_enhanced(&z, &f, &g, &a)?;
            Ok(Out::json(json!({ "zero": z.to_string(), "spans": s })).plain(s.to_string()))
        }
        Command::Tmax { zero } => {
            let z = parse_zero(&zero.zero)?;
            let t = growth::tmax_bound(&z).to_string();
            Ok(Out::json(json!({ "zero": z.to_string(), "tmax": t })).plain(t))
        }
        Command::Gamma { zero } => {
            let z = parse_zero(&zero.zero)?;
            let r = extremal::gamma(&z, budget)?;
            let table = bounds_table(&r.bounds);
            Ok(Out::json(to_value(&r)).plain(r.value.to_string()).table(table))
        }
        Command::GammaThin { zero } => {
            let z = parse_zero(&zero.zero)?;
            let r = extremal::gamma_thin(&z, budget)?;
            Ok(Out::json(to_value(&r)).plain(r.value.to_string()))
        }
        Command::GammaBarThin { zero } => {
            let z = parse_zero(&zero.zero)?;
            let r = extremal::gamma_bar_thin(&z, budget)?;
            Ok(Out::json(to_value(&r)).plain(r.value.to_string()))
        }
        Command::GammaBounds { zero } => {
            let z = parse_zero(&zero.zero)?;
            let b = extremal::gamma_bounds(&z, budget);
            let table = bounds_table(&b);
            Ok(Out::json(json!({ "zero": z.to_string(), "bounds": b })).table(table))
        }
        Command::Rho { q, points, brute } => {
            let x = parse_query(q)?;
            let a = parse_points(points)?;
            let r = if *brute {
                rate::rho_bruteforce(&x, &a)?
            } else {
                rate::rho(&x, &a)
            };
            Ok(Out::json(to_value(&r)).plain(format_q(&r.value)))
        }
        Command::Rate {
            zero,
            alpha,
            beta,
            pad,
            extra,
            grid,
            enhanced,
            search,
        } => {
            let z = parse_zero(&zero.zero)?;
            let rect = !z.is_empty() && z.rows().iter().all(|&r| r == z.width());
            let closed = rect && !*search && !*enhanced;
            let cfg = SearchConfig {
                pad: *pad,
                extra: *extra,
                budget,
            };
            if let Some(g) = grid {
                return rate_grid(&z, cfg, *g, closed);
            }
            let (a, b) = (alpha.as_deref().unwrap_or("0"), beta.as_deref().unwrap_or("0"));
            let x = RateQuery::parse(a, b)?;
            if closed {
                let v = rect_rate(&z, &x)?;
                return Ok(Out::json(json!({
                    "zero": z.to_string(),
                    "alpha": format_q(&x.alpha), "beta": format_q(&x.beta),
                    "value": format_q(&v),
                    "exact": true,
                    "method": "closed-form",
                }))
                .plain(format_q(&v)));
            }
            if *enhanced {
                let r = rate::enhancement_rate(&z, &x, budget)?;
                return Ok(Out::json(to_value(&r)).plain(format_q(&r.value)));
            }
            let s = RateSearcher::new(&z, cfg)?;
            let r = s.query(&x)?;
            let bounds = rate::rate_bounds(&z, &x, 1, budget)?;
            let upper = min_q(
                min_q(bounds["upper-area"], bounds["upper-gamma"]),
                bounds["upper-trivial"],
            );
            let mut v = to_value(&r);
            v["lower"] = qs(&max_q(Q::from_integer(0), s.lower_bound(&x)));
            v["upper"] = qs(&upper);
            v["candidates"] = json!(s.candidate_count());
            Ok(Out::json(v).plain(format_q(&r.value)))
        }
        Command::RateRect { a, b, q, method } => {
            let x = parse_query(q)?;
            let v = match method {
                RectMethod::Closed => rate::rate_rect_closed(*a, *b, &x)?,
                RectMethod::Recursion => rate::rate_rect_recursion(*a, *b, &x)?,
            };
            Ok(Out::json(json!({
                "a": a, "b": b,
                "alpha": format_q(&x.alpha), "beta": format_q(&x.beta),
                "value": format_q(&v),
            }))
            .plain(format_q(&v)))
        }
        Command::RateBp { theta, alpha } => {
            let al = parse_q(alpha)?;
            let v = rate::rate_bootstrap_diag(*theta, al)?;
            Ok(Out::json(json!({ "theta": theta, "alpha": format_q(&al), "value": format_q(&v) })).plain(format_q(&v)))
        }
        Command::Support {
            zero,
            alpha,
            beta,
            grid,
            emit_boundary,
        } => {
            let z = parse_zero(&zero.zero)?;
            if let (Some(a), Some(b)) = (alpha, beta) {
                let x = RateQuery::parse(a, b)?;
                let c = rate::support_contains(&z, &x);
                let m = rate::support_margin(&z, &x);
                return Ok(Out::json(json!({
                    "zero": z.to_string(),
                    "alpha": format_q(&x.alpha), "beta": format_q(&x.beta),
                    "contains": c,
                    "interior": rate::support_interior(&z, &x),
                    "margin": m.as_ref().map(format_q),
                }))
                .plain(c.to_string()));
            }
            let poly = rate::support_boundary(&z, *grid);
            let rows: Vec<Vec<String>> = poly.iter().map(|(a, b)| vec![format_q(a), format_q(b)]).collect();
            if let Some(path) = emit_boundary {
                let mut s = String::from("alpha,beta\n");
                for r in &rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(Out::json(json!({
                "zero": z.to_string(),
                "boundary": poly.iter().map(|(a, b)| json!([format_q(a), format_q(b)])).collect::<Vec<_>>(),
            }))
            .table(Table {
                header: vec!["alpha", "beta"],
                rows,
                notes: vec![format!("support boundary of {z}")],
            }))
        }
        Command::Euclid { cmd } => run_euclid(cmd, budget),
        Command::McSpan {
            zero,
            q,
            p,
            reps,
            seed,
            coupled,
            cell_cap,
        } => {
            let z = parse_zero(&zero.zero)?;
            let x = parse_query(q)?;
            let mut cfg = McConfig::new(z.clone(), x, p.clone(), *reps, *seed)?;
            cfg.cell_cap = *cell_cap;
            let est = match coupled {
                Some(dims) => {
                    let (n, m) = dims
                        .split_once('x')
                        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                        .ok_or_else(|| Failure::Usage(format!("expected --coupled NxM, got {dims:?}")))?;
                    randmc::span_probability_coupled(&cfg, n, m)?
                }
                None => randmc::span_probability(&cfg)?,
            };
            let rows = est
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.p.to_string(),
                        r.n.to_string(),
                        r.m.to_string(),
                        r.successes.to_string(),
                        r.replicates.to_string(),
                        r.p_hat.to_string(),
                        r.ci_low.to_string(),
                        r.ci_high.to_string(),
                    ]
                })
                .collect();
            let fit = match (est.slope, est.stderr) {
                (Some(s), Some(e)) => format!("slope={s} stderr={e}"),
                _ => "slope=NA (fewer than 3 rows with 0 < p_hat < 1)".to_string(),
            };
            let mut v = to_value(&est);
            v["zero"] = json!(z.to_string());
            v["alpha"] = qs(&x.alpha);
            v["beta"] = qs(&x.beta);
            v["seed"] = json!(seed);
            v["fit"] = json!("weighted least squares of ln p_hat on ln p; weights n p_hat/(1-p_hat); rows with p_hat in {0,1} excluded");
            Ok(Out::json(v).table(Table {
                header: vec!["p", "N", "M", "successes", "replicates", "p_hat", "ci_low", "ci_high"],
                rows,
                notes: vec![
                    format!(
                        "zero={z} alpha={} beta={} seed={seed}",
                        format_q(&x.alpha),
                        format_q(&x.beta)
                    ),
                    fit,
                ],
            }))
        }
        Command::SampleYoung {
            model,
            n,
            seed,
            retries,
            emit_boundary,
            radius,
        } => {
            let y = match model {
                Model::Rost => randmc::rost_sample(*n, *seed),
                Model::Vershik => randmc::vershik_sample(*n, *seed, *retries)?,
            };
            if let Some(path) = emit_boundary {
                let mut s = String::from("x,y\n");
                for (x, yv) in randmc::boundary_points(&y) {
                    s.push_str(&format!("{x},{yv}\n"));
                }
                fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
            }
            let curve = LimitCurve::from(*model);
            let r = radius.unwrap_or(match model {
                Model::Rost => 2.0,
                Model::Vershik => 3.0,
            });
            let dist = if y.is_empty() {
                None
            } else {
                Some(randmc::shape_distance(&y, curve, r)?)
            };
            Ok(Out::json(json!({
                "model": match model { Model::Rost => "rost", Model::Vershik => "vershik" },
                "n": n,
                "seed": seed,
                "rows": y.rows(),
                "radius": r,
                "distance": dist,
            }))
            .plain(y.to_string()))
        }
        Command::ShapeDist { diagram, curve, radius } => {
            let y = parse_zero(diagram)?;
            let r = hgrowth::rational::to_f64(&parse_q(radius)?);
            let d = randmc::shape_distance(&y, LimitCurve::from(*curve), r)?;
            Ok(Out::json(json!({ "cardinality": y.cardinality(), "radius": r, "distance": d })).plain(d.to_string()))
        }
    }
}

fn bounds_table(b: &BTreeMap<String, usize>) -> Table {
    Table {
        header: vec!["bound", "value"],
        rows: b.iter().map(|(k, v)| vec![k.clone(), v.to_string()]).collect(),
        notes: Vec::new(),
    }
}

/// Rate of a rectangle: line-growth closed form, and 0 on the edges `α = 1`, `β = 1`.
fn rect_rate(z: &YoungDiagram, x: &RateQuery) -> Res<Q> {
    if x.alpha == Q::from_integer(1) || x.beta == Q::from_integer(1) {
        return Ok(Q::from_integer(0));
    }
    Ok(rate::rate_rect_closed(z.width(), z.height(), x)?)
}

fn rate_grid(z: &YoungDiagram, cfg: SearchConfig, g: usize, closed: bool) -> Res<Out> {
    if g == 0 {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let s = if closed { None } else { Some(RateSearcher::new(z, cfg)?) };
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for i in 0..=g {
        for j in 0..=g {
            let x = RateQuery::new(Q::new(i as i64, g as i64), Q::new(j as i64, g as i64))?;
            let (value, exact) = match &s {
                Some(s) => {
                    let r = s.query(&x)?;
                    (r.value, r.exact)
                }
                None => (rect_rate(z, &x)?, true),
            };
            rows.push(vec![format_q(&x.alpha), format_q(&x.beta), format_q(&value)]);
            cells.push(json!({
                "alpha": format_q(&x.alpha), "beta": format_q(&x.beta),
                "value": format_q(&value), "exact": exact,
            }));
        }
    }
    Ok(
        Out::json(json!({ "zero": z.to_string(), "grid": g, "values": cells })).table(Table {
            header: vec!["alpha", "beta", "value"],
            rows,
            notes: vec![format!("rate of {z}")],
        }),
    )
}

fn run_euclid(cmd: &EuclidCmd, budget: SearchBudget) -> Res<Out> {
    match cmd {
        EuclidCmd::Series { shape, n } => {
            let e: EuclideanZeroSet = shape.parse()?;
            let series = euclid::scaled_gamma_series(&e, n, budget)?;
            let reference = |r: Option<f64>| r.map_or(String::new(), |v| v.to_string());
            let rows = series
                .iter()
                .map(|s| vec![s.n.to_string(), format_q(&s.value), reference(s.reference)])
                .collect();
            Ok(
                Out::json(json!({ "shape": e.to_string(), "series": to_value(&series) })).table(Table {
                    header: vec!["n", "value", "reference"],
                    rows,
                    notes: vec![format!("gamma(Z_n)/n^2 for {e}")],
                }),
            )
        }
        EuclidCmd::Refs { shape, q, gamma } => {
            let e: EuclideanZeroSet = shape.parse()?;
            let x = parse_query(q)?;
            let m = euclid::reference_values(
                &e,
                &x,
                Hints {
                    gamma: *gamma,
                    gamma_thin: None,
                },
            );
            let rows = m.iter().map(|(k, v)| vec![k.clone(), v.to_string()]).collect();
            Ok(Out::json(json!({
                "shape": e.to_string(),
                "alpha": format_q(&x.alpha), "beta": format_q(&x.beta),
                "values": m,
            }))
            .table(Table {
                header: vec!["name", "value"],
                rows,
                notes: vec![format!("reference values for {e}")],
            }))
        }
        EuclidCmd::Convergence { q, n_max } => {
            let x = parse_query(q)?;
            let c = euclid::rect_convergence(&x, *n_max)?;
            let rows = c
                .rows
                .iter()
                .map(|r| vec![r.n.to_string(), format_q(&r.value), format_q(&r.reference)])
                .collect();
            let note = format!(
                "I(R_nn) - (1-max)n^2 = {} n + {} for n >= {}; |diff| <= ({})/n",
                format_q(&c.slope),
                format_q(&c.intercept),
                c.affine_from,
                format_q(&c.constant)
            );
            let mut v = to_value(&c);
            v["alpha"] = qs(&x.alpha);
            v["beta"] = qs(&x.beta);
            Ok(Out::json(v).table(Table {
                header: vec!["n", "value", "reference"],
                rows,
                notes: vec![note],
            }))
        }
        EuclidCmd::Discretize { shape, n } => {
            let e: EuclideanZeroSet = shape.parse()?;
            let z = e.discretize(*n)?;
            Ok(Out::json(json!({
                "shape": e.to_string(), "n": n, "rows": z.rows(),
                "area": e.area(), "area_tail": e.area_tail(),
                "area_gap": (z.cardinality() as f64 / (n * n) as f64 - e.area()).abs(),
            }))
            .plain(z.to_string()))
        }
    }
}
