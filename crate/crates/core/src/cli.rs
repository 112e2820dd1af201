//! Command-line front end: parameter sweeps, figure-data reproduction,
//! verification runs, and CSV/JSON emission.
//!
//! Every generated file starts with the same three comment lines (tool
//! version, exact command line, unit convention), numeric fields carry 17
//! significant digits, and nothing is randomized — rerunning a subcommand
//! with identical flags reproduces identical bytes.

use crate::dicke::DickeLabel;
use crate::gmc::{self, clamp_roundoff, GmcProfile, WeightScheme};
use crate::oracle::{run_equivalence_suite, FaultInjection};
use crate::superradiance::{
    default_log_grid, evolve_at, find_time_of_max, gmc_time_series, linear_grid,
    population_snapshot, PeakQuantity, RateModel,
};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "dicke-gmc",
    version,
    about = "Genuine multipartite correlations and superradiant dynamics of Dicke states"
)]
struct Cli {
    /// Directory that generated files are written into.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Output format for generated tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation profile of pure Dicke states |N, n_e>.
    GmcPure {
        /// Number of qubits.
        #[arg(long)]
        n: usize,
        /// Excitation counts, e.g. "1,5,50,500" (one output file each).
        #[arg(long)]
        ne: String,
        /// Only emit cluster sizes k dividing N; genuine correlations are
        /// then differences between consecutive divisors.
        #[arg(long)]
        mod_zero: bool,
    },
    /// Weaving of pure Dicke states across system sizes.
    Weaving {
        /// System sizes: comma list, ranges allowed ("4..100,200").
        #[arg(long)]
        n: String,
        /// Fixed excitation counts, e.g. "1,2,5,10".
        #[arg(long, conflicts_with = "ne_frac")]
        ne: Option<String>,
        /// Excitations as fractions of N, e.g. "0.1,0.2,0.5" (floor applied).
        #[arg(long)]
        ne_frac: Option<String>,
        /// Weight scheme: k-minus-1 | uniform | delta:<l> | file:<path>.
        #[arg(long, default_value = "k-minus-1")]
        weights: String,
    },
    /// Integrate the superradiant cascade and sweep GMCs along it.
    Evolve {
        /// Number of atoms.
        #[arg(long)]
        n: usize,
        /// Spontaneous decay rate.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Transition frequency (scales the radiated power only).
        #[arg(long)]
        omega: Option<f64>,
        /// End of the time window, in units of 1/gamma.
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        /// Number of sample times.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Cluster sizes for the GMC sweep: "all" or a comma list.
        #[arg(long, default_value = "all")]
        k: String,
        /// Sample on a uniform grid instead of the default log grid.
        #[arg(long)]
        linear_grid: bool,
    },
    /// Times of maximum power, correlations, and entropy across system sizes.
    Times {
        /// System sizes: comma list, ranges allowed.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Populations and GMC profile at the time of maximum correlations.
    Snapshot {
        /// Number of atoms.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Certify the closed forms against the dense brute-force oracle.
    Verify {
        /// Largest N to sweep (vector paths run to 14, matrix paths to 10).
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Test fixture: corrupt one closed-form weight, "N,NE,K".
        #[arg(long, hide = true)]
        inject_error: Option<String>,
    },
}

/// Parse arguments, honor `DICKE_GMC_THREADS`, dispatch, and map errors to
/// exit codes: 0 success, 1 domain/verification failure, 2 usage error.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Ok(threads) = std::env::var("DICKE_GMC_THREADS") {
        if let Ok(v) = threads.trim().parse::<usize>() {
            if v > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(v).build_global();
            }
        }
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let ctx = OutputContext {
        dir: cli.out,
        format: cli.format,
        argv: std::env::args().collect::<Vec<_>>().join(" "),
    };
    match cli.command {
        Command::GmcPure { n, ne, mod_zero } => cmd_gmc_pure(&ctx, n, &ne, mod_zero),
        Command::Weaving {
            n,
            ne,
            ne_frac,
            weights,
        } => cmd_weaving(&ctx, &n, ne.as_deref(), ne_frac.as_deref(), &weights),
        Command::Evolve {
            n,
            gamma,
            omega,
            t_end,
            samples,
            k,
            linear_grid,
        } => cmd_evolve(&ctx, n, gamma, omega.unwrap_or(1.0), t_end, samples, &k, linear_grid),
        Command::Times { n, gamma, omega } => cmd_times(&ctx, &n, gamma, omega.unwrap_or(1.0)),
        Command::Snapshot { n, gamma, omega } => {
            cmd_snapshot(&ctx, n, gamma, omega.unwrap_or(1.0))
        }
        Command::Verify { max_n, inject_error } => cmd_verify(max_n, inject_error.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// table emission
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

struct Table {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

struct OutputContext {
    dir: PathBuf,
    format: Format,
    argv: String,
}

impl OutputContext {
    fn standard_comments(&self) -> Vec<String> {
        vec![
            format!("tool-version: dicke-gmc {}", env!("CARGO_PKG_VERSION")),
            format!("command-line: {}", self.argv),
            "natural-log units (nats)".to_string(),
        ]
    }

    fn write(&self, basename: &str, table: &Table) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let (path, body) = match self.format {
            Format::Csv => (self.dir.join(format!("{basename}.csv")), table.to_csv()),
            Format::Json => (self.dir.join(format!("{basename}.json")), table.to_json()),
        };
        std::fs::write(&path, body)?;
        Ok(path)
    }
}

/// 17 significant digits, the shortest form that is still bit-faithful plus
/// one guard digit.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(v) => fmt_float(*v),
                    Cell::Empty => String::new(),
                })
                .collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| match cell {
                        Cell::Int(i) => serde_json::Value::from(*i),
                        Cell::Float(v) => serde_json::Value::from(*v),
                        Cell::Empty => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "comments": self.comments,
            "columns": self.columns,
            "rows": rows,
        });
        let mut body = serde_json::to_string_pretty(&doc).expect("tables serialize");
        body.push('\n');
        body
    }
}

// ---------------------------------------------------------------------------
// argument parsing helpers
// ---------------------------------------------------------------------------

fn parse_usize_list(spec: &str, what: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((a, b)) = token.split_once("..") {
            let lo: usize = a
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad {what} range start: {a:?}")))?;
            let hi: usize = b
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad {what} range end: {b:?}")))?;
            if hi < lo {
                return Err(Error::Domain(format!("empty {what} range {token:?}")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                token
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad {what} value: {token:?}")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(Error::Domain(format!("empty {what} list")));
    }
    Ok(out)
}

fn parse_f64_list(spec: &str, what: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad {what} value: {t:?}")))
        })
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(Error::Domain(format!("empty {what} list")));
    }
    Ok(out)
}

fn parse_k_list(spec: &str, n: usize) -> Result<Vec<usize>> {
    if spec.trim() == "all" {
        Ok((1..=n).collect())
    } else {
        parse_usize_list(spec, "k")
    }
}

fn parse_weight_scheme(spec: &str, n: usize) -> Result<WeightScheme> {
    match spec {
        "k-minus-1" => Ok(WeightScheme::k_minus_one(n)),
        "uniform" => Ok(WeightScheme::uniform(n)),
        _ => {
            if let Some(l) = spec.strip_prefix("delta:") {
                let l: usize = l
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad delta index in {spec:?}")))?;
                WeightScheme::delta(n, l)
            } else if let Some(path) = spec.strip_prefix("file:") {
                let body = std::fs::read_to_string(path)?;
                let omegas: Vec<f64> = body
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| {
                        l.parse()
                            .map_err(|_| Error::Domain(format!("bad omega weight line {l:?}")))
                    })
                    .collect::<Result<_>>()?;
                WeightScheme::from_small_omegas(n, omegas)
            } else {
                Err(Error::Domain(format!(
                    "unknown weight scheme {spec:?} (expected k-minus-1 | uniform | delta:<l> | file:<path>)"
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn profile_rows(profile: &GmcProfile, mod_zero: bool) -> Vec<Vec<Cell>> {
    if mod_zero {
        profile
            .divisor_profile()
            .into_iter()
            .map(|row| {
                vec![
                    Cell::Int(row.k as i64),
                    Cell::Float(clamp_roundoff(row.s_higher)),
                    row.s_k_gap.map_or(Cell::Empty, Cell::Float),
                ]
            })
            .collect()
    } else {
        (1..=profile.num_qubits())
            .map(|k| {
                vec![
                    Cell::Int(k as i64),
                    Cell::Float(clamp_roundoff(profile.s_higher(k))),
                    if k >= 2 {
                        Cell::Float(profile.s_k(k))
                    } else {
                        Cell::Empty
                    },
                ]
            })
            .collect()
    }
}

fn warn_monotonicity(profile: &GmcProfile, context: &str) {
    for v in profile.monotonicity_violations() {
        eprintln!(
            "warning: S^(k->N) increased at k = {} by {:e} ({context})",
            v.k, v.excess
        );
    }
}

fn cmd_gmc_pure(ctx: &OutputContext, n: usize, ne_spec: &str, mod_zero: bool) -> Result<i32> {
    let ne_list = parse_usize_list(ne_spec, "ne")?;
    for ne in ne_list {
        let label = DickeLabel::new(n, ne)?;
        let profile = gmc::profile(&label)?;
        warn_monotonicity(&profile, &format!("|{n},{ne}>"));
        let table = Table {
            comments: ctx.standard_comments(),
            columns: vec!["k".into(), "s_higher".into(), "s_k".into()],
            rows: profile_rows(&profile, mod_zero),
        };
        let path = ctx.write(&format!("gmc_pure_N{n}_ne{ne}"), &table)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn cmd_weaving(
    ctx: &OutputContext,
    n_spec: &str,
    ne: Option<&str>,
    ne_frac: Option<&str>,
    weights: &str,
) -> Result<i32> {
    let n_list = parse_usize_list(n_spec, "n")?;
    enum Excitations {
        Fixed(Vec<usize>),
        Fraction(Vec<f64>),
    }
    let spec = match (ne, ne_frac) {
        (Some(s), None) => Excitations::Fixed(parse_usize_list(s, "ne")?),
        (None, Some(s)) => {
            let fracs = parse_f64_list(s, "ne-frac")?;
            if fracs.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                return Err(Error::Domain("fractions must lie in (0, 1]".into()));
            }
            Excitations::Fraction(fracs)
        }
        (None, None) => Excitations::Fixed(vec![1]),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let mut comments = ctx.standard_comments();
    let mut rows = Vec::new();
    for &n in &n_list {
        let scheme = parse_weight_scheme(weights, n)?;
        let ne_values: Vec<usize> = match &spec {
            Excitations::Fixed(list) => list.iter().copied().filter(|&ne| ne <= n).collect(),
            Excitations::Fraction(fracs) => fracs
                .iter()
                .map(|&f| {
                    let exact = f * n as f64;
                    let ne = exact.floor() as usize;
                    if exact.fract() > 1e-9 {
                        comments.push(format!("ne rounded down: N={n} frac={f} -> ne={ne}"));
                    }
                    ne.min(n)
                })
                .collect(),
        };
        for ne in ne_values {
            let profile = gmc::profile(&DickeLabel::new(n, ne)?)?;
            warn_monotonicity(&profile, &format!("|{n},{ne}>"));
            let w = gmc::weaving(&profile, &scheme)?;
            rows.push(vec![
                Cell::Int(n as i64),
                Cell::Int(ne as i64),
                Cell::Float(w),
            ]);
        }
    }
    let table = Table {
        comments,
        columns: vec!["N".into(), "ne".into(), "W".into()],
        rows,
    };
    let path = ctx.write("weaving", &table)?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    ctx: &OutputContext,
    n: usize,
    gamma: f64,
    omega: f64,
    t_end_gt: f64,
    samples: usize,
    k_spec: &str,
    use_linear: bool,
) -> Result<i32> {
    if !(t_end_gt > 0.0) {
        return Err(Error::Domain("t-end must be positive".into()));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let model = RateModel::new(n, gamma, omega)?;
    let k_list = parse_k_list(k_spec, n)?;
    let t_end = t_end_gt / gamma;
    let grid = if use_linear {
        linear_grid(t_end, samples)
    } else {
        default_log_grid(&model, t_end, samples)
    };
    let trajectory = evolve_at(&model, &grid)?;
    let series = gmc_time_series(&model, &trajectory, &k_list)?;

    let mut comments = ctx.standard_comments();
    comments.push(format!("gamma: {}", fmt_float(gamma)));
    comments.push(format!("omega: {}", fmt_float(omega)));

    let mut columns = vec!["gamma_t".to_string()];
    columns.extend((0..=n).map(|j| format!("P_{j}")));
    let rows = trajectory
        .times
        .iter()
        .zip(&trajectory.populations)
        .map(|(&t, pops)| {
            let mut row = vec![Cell::Float(t * gamma)];
            row.extend(pops.iter().map(|&p| Cell::Float(p)));
            row
        })
        .collect();
    let populations = Table {
        comments: comments.clone(),
        columns,
        rows,
    };
    let p1 = ctx.write("populations", &populations)?;

    let power = Table {
        comments: comments.clone(),
        columns: vec!["gamma_t".into(), "power".into()],
        rows: trajectory
            .times
            .iter()
            .zip(&trajectory.power)
            .map(|(&t, &p)| vec![Cell::Float(t * gamma), Cell::Float(p)])
            .collect(),
    };
    let p2 = ctx.write("power", &power)?;

    let mut rows = Vec::new();
    for (i, &t) in series.times.iter().enumerate() {
        for (j, &k) in series.k_values.iter().enumerate() {
            rows.push(vec![
                Cell::Float(t * gamma),
                Cell::Int(k as i64),
                Cell::Float(clamp_roundoff(series.s_higher[i][j])),
                series.s_k[i][j].map_or(Cell::Empty, Cell::Float),
            ]);
        }
    }
    let gmc_t = Table {
        comments,
        columns: vec!["gamma_t".into(), "k".into(), "s_higher".into(), "s_k".into()],
        rows,
    };
    let p3 = ctx.write("gmc_t", &gmc_t)?;

    println!("wrote {}", p1.display());
    println!("wrote {}", p2.display());
    println!("wrote {}", p3.display());
    Ok(0)
}

fn cmd_times(ctx: &OutputContext, n_spec: &str, gamma: f64, omega: f64) -> Result<i32> {
    let n_list = parse_usize_list(n_spec, "n")?;
    let mut comments = ctx.standard_comments();
    comments.push(format!("gamma: {}", fmt_float(gamma)));
    let mut rows = Vec::new();
    for &n in &n_list {
        let model = RateModel::new(n, gamma, omega)?;
        let power = find_time_of_max(&model, PeakQuantity::Power)?;
        let corr = find_time_of_max(&model, PeakQuantity::GmcHigherThan(2.min(n)))?;
        let entropy = find_time_of_max(&model, PeakQuantity::Entropy)?;
        for (name, report) in [("power", &power), ("correlations", &corr), ("entropy", &entropy)]
        {
            if report.boundary {
                eprintln!("warning: {name} maximum for N = {n} sits on the scan boundary");
            }
        }
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Float(power.t_max * gamma),
            Cell::Float(corr.t_max * gamma),
            Cell::Float(entropy.t_max * gamma),
        ]);
    }
    let table = Table {
        comments,
        columns: vec![
            "N".into(),
            "t_power_max".into(),
            "t_corr_max".into(),
            "t_entropy_max".into(),
        ],
        rows,
    };
    let path = ctx.write("times", &table)?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_snapshot(ctx: &OutputContext, n: usize, gamma: f64, omega: f64) -> Result<i32> {
    let model = RateModel::new(n, gamma, omega)?;
    let corr = find_time_of_max(&model, PeakQuantity::GmcHigherThan(2.min(n)))?;
    let mixture = population_snapshot(&model, corr.t_max)?;

    let mut comments = ctx.standard_comments();
    comments.push(format!("gamma: {}", fmt_float(gamma)));
    comments.push(format!("t_corr_max (units 1/gamma): {}", fmt_float(corr.t_max * gamma)));

    let populations = Table {
        comments: comments.clone(),
        columns: vec!["ne".into(), "P".into()],
        rows: mixture
            .populations()
            .iter()
            .enumerate()
            .map(|(ne, &p)| vec![Cell::Int(ne as i64), Cell::Float(p)])
            .collect(),
    };
    let p1 = ctx.write("snapshot_populations", &populations)?;

    let mix_profile = gmc::profile(&mixture)?;
    let half_profile = gmc::profile(&DickeLabel::new(n, n / 2)?)?;
    let one_profile = gmc::profile(&DickeLabel::new(n, 1.min(n))?)?;
    warn_monotonicity(&mix_profile, "superradiant mixture");
    let rows = (1..=n)
        .map(|k| {
            let s_k_cell = |p: &GmcProfile| {
                if k >= 2 {
                    Cell::Float(p.s_k(k))
                } else {
                    Cell::Empty
                }
            };
            vec![
                Cell::Int(k as i64),
                Cell::Float(clamp_roundoff(mix_profile.s_higher(k))),
                Cell::Float(clamp_roundoff(half_profile.s_higher(k))),
                Cell::Float(clamp_roundoff(one_profile.s_higher(k))),
                s_k_cell(&mix_profile),
                s_k_cell(&half_profile),
                s_k_cell(&one_profile),
            ]
        })
        .collect();
    let gmc_table = Table {
        comments,
        columns: vec![
            "k".into(),
            "s_higher_mix".into(),
            "s_higher_half".into(),
            "s_higher_one".into(),
            "s_k_mix".into(),
            "s_k_half".into(),
            "s_k_one".into(),
        ],
        rows,
    };
    let p2 = ctx.write("snapshot_gmc", &gmc_table)?;

    println!("wrote {}", p1.display());
    println!("wrote {}", p2.display());
    Ok(0)
}

fn cmd_verify(max_n: usize, inject: Option<&str>) -> Result<i32> {
    let injection = match inject {
        None => None,
        Some(spec) => {
            let parts: Vec<usize> = spec
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Domain(format!("bad inject-error spec {spec:?}")))
                })
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::Domain("inject-error expects N,NE,K".into()));
            }
            Some(FaultInjection {
                n: parts[0],
                n_e: parts[1],
                k: parts[2],
                offset: 1e-6,
            })
        }
    };
    let report = run_equivalence_suite(max_n, injection)?;
    for w in &report.warnings {
        println!("warning: {w}");
    }
    // collapse per-tuple rows into one summary line per check family
    let mut seen: Vec<&'static str> = Vec::new();
    for check in &report.checks {
        if !seen.contains(&check.name) {
            seen.push(check.name);
        }
    }
    println!("{:<55} {:>7} {:>12} {:>10} status", "check", "cases", "max dev", "tol");
    for name in seen {
        let group: Vec<_> = report.checks.iter().filter(|c| c.name == name).collect();
        let worst = group
            .iter()
            .map(|c| c.deviation.abs())
            .fold(0.0_f64, f64::max);
        let tol = group[0].tolerance;
        let pass = group.iter().all(|c| c.pass);
        println!(
            "{:<55} {:>7} {:>12.3e} {:>10.1e} {}",
            name,
            group.len(),
            worst,
            tol,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if let Some(failure) = report.first_failure() {
        println!(
            "FAIL {} at {}: deviation {:e} exceeds {:e}",
            failure.name, failure.tuple, failure.deviation, failure.tolerance
        );
        return Ok(1);
    }
    println!("all {} checks passed", report.checks.len());
    Ok(0)
}
