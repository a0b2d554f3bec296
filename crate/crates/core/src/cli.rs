//! `slopeforge` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid parameters, 2 verification failure,
//! 3 I/O error. Errors go to stderr as one line:
//! `error kind=<kind> code=<code> reason=<text>`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::bounds::{verify_lemma_behavior, verify_lomaschico, SchemeRow};
use crate::error::{Error, Result};
use crate::exact::{display_rational, format_rational, parse_rational, parse_rational_list, to_f64};
use crate::numtheory::{c_qp, dedekind_record, dedekind_sum, dedekind_sum_hj, hj_expand};
use crate::product::{product_invariants, sanity_warnings, PolarizedSurface};
use crate::ru_family::{chern_x, gamma_invariants, leading_coefficients, slope_limit, RUParams};
use crate::slope_search::{density_sample, seek_slope, DRule, TOOL_VERSION};
use crate::Rational;

pub const THREADS_ENV: &str = "SLOPEFORGE_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "slopeforge", version, about = "Exact Chern-slope invariants and brute-force checks")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    pub format: Format,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for sweeps (capped by SLOPEFORGE_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Omit the version comment line in plain and csv output.
    #[arg(long, global = true)]
    pub no_header: bool,

    /// Add decimal approximations next to rational values.
    #[arg(long, global = true)]
    pub approx: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hirzebruch-Jung expansion of p/q.
    Hj { p: u64, q: u64 },
    /// Dedekind sum s(q, p), checked by two independent methods.
    Dedekind { q: u64, p: u64 },
    /// c(q, p) = 12 s(q, p) + l(q, p) for prime p.
    Cqp { q: u64, p: u64 },
    /// Invariants of the surface X_p.
    Ru {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        alpha: u64,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        d: u64,
        /// sum_j A_j^2, added to c1^2 as residual/p.
        #[arg(long, allow_hyphen_values = true)]
        residual: Option<BigInt>,
        /// Skip parameter validation and evaluate the formulas as polynomials.
        #[arg(long)]
        formal: bool,
    },
    /// Check 6S + L <= 3p + 3 - 6/p over all schemes for primes up to pmax.
    Bounds {
        #[arg(long)]
        pmax: u64,
    },
    /// Check sum(e_i - 1) <= p - 1 over all coprime pairs with p up to pmax.
    Lemma {
        #[arg(long)]
        pmax: u64,
    },
    /// Invariants of the complete intersection S in X x Y.
    Product {
        /// c1sq,c2,chi,bundle_sq,bundle_dot_k of (X, Gamma).
        #[arg(long, allow_hyphen_values = true)]
        x_invariants: String,
        /// c1sq,c2,chi,bundle_sq,bundle_dot_k of (Y, B).
        #[arg(long, allow_hyphen_values = true)]
        y_invariants: String,
        /// Warn about non-positive bundle squares or Noether failures.
        #[arg(long)]
        check: bool,
    },
    /// Certificate for a target slope r in (1, 3).
    Seek {
        #[arg(long)]
        r: String,
        #[arg(long)]
        tol: String,
        #[arg(long, default_value_t = 1009)]
        witness_p: u64,
        #[arg(long)]
        d: Option<u64>,
    },
    /// Limit and finite-p slopes over a grid of ratios alpha/beta.
    Density {
        /// Comma-separated ratios, e.g. 1/1,1/2,3.
        #[arg(long)]
        grid: String,
        /// Comma-separated primes.
        #[arg(long)]
        primes: String,
        /// smallest, largest, or a fixed integer.
        #[arg(long, default_value = "smallest")]
        d_rule: String,
    },
}

/// One output value.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(BigInt),
    Rat(Rational),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn canonical(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Rat(r) => format_rational(r),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Rat(r) => display_rational(r),
            other => other.canonical(),
        }
    }

    fn approx(&self) -> Option<String> {
        match self {
            Cell::Rat(r) => Some(format!("{:.12e}", to_f64(r))),
            _ => None,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<&BigInt> for Cell {
    fn from(v: &BigInt) -> Self {
        Cell::Int(v.clone())
    }
}

impl From<&Rational> for Cell {
    fn from(v: &Rational) -> Self {
        Cell::Rat(v.clone())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

/// Everything a subcommand produces, ready for any output format.
#[derive(Debug)]
pub struct Output {
    pub command: &'static str,
    /// Key/value lines for plain output (and a one-row CSV when there is no table).
    pub summary: Vec<(String, Cell)>,
    /// Replaces the summary lines in plain output.
    pub plain: Option<String>,
    pub table: Option<Table>,
    /// The `result` member of the JSON document.
    pub json: Value,
    /// Deferred failure: the output is still written, then this error is raised.
    pub failure: Option<Error>,
}

impl Output {
    fn new(command: &'static str, json: Value) -> Self {
        Self { command, summary: Vec::new(), plain: None, table: None, json, failure: None }
    }

    fn push(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: Format, header: bool, approx: bool) -> Result<String> {
        match format {
            Format::Plain => Ok(self.render_plain(header, approx)),
            Format::Csv => self.render_csv(header, approx),
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "tool_version": TOOL_VERSION,
                    "result": self.json,
                });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }

    fn render_plain(&self, header: bool, approx: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str(&format!("# {TOOL_VERSION}\n"));
        }
        if let Some(text) = &self.plain {
            out.push_str(text);
            out.push('\n');
            return out;
        }
        for (key, value) in &self.summary {
            out.push_str(&format!("{key} = {}", value.human()));
            if let (true, Some(a)) = (approx, value.approx()) {
                out.push_str(&format!(" (~{a})"));
            }
            out.push('\n');
        }
        out
    }

    fn render_csv(&self, header: bool, approx: bool) -> Result<String> {
        let single;
        let table = match &self.table {
            Some(t) => t,
            None => {
                single = Table {
                    columns: self.summary.iter().map(|(k, _)| k.clone()).collect(),
                    rows: vec![self.summary.iter().map(|(_, v)| v.clone()).collect()],
                };
                &single
            }
        };
        // Approximation columns follow every column holding a rational.
        let rational_cols: Vec<bool> = (0..table.columns.len())
            .map(|i| approx && table.rows.iter().any(|r| matches!(r[i], Cell::Rat(_))))
            .collect();
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut head = Vec::new();
        for (name, &with_approx) in table.columns.iter().zip(&rational_cols) {
            head.push(name.clone());
            if with_approx {
                head.push(format!("{name}_approx"));
            }
        }
        writer.write_record(&head)?;
        for row in &table.rows {
            let mut record = Vec::new();
            for (cell, &with_approx) in row.iter().zip(&rational_cols) {
                record.push(cell.canonical());
                if with_approx {
                    record.push(cell.approx().unwrap_or_default());
                }
            }
            writer.write_record(&record)?;
        }
        let body = writer.into_inner().map_err(|e| Error::Io(io::Error::other(e.to_string())))?;
        let mut out = String::new();
        if header {
            out.push_str(&format!("# {TOOL_VERSION}\n"));
        }
        out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
        Ok(out)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("records serialize to JSON")
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}

fn parse_grid(text: &str) -> Result<Vec<(u64, u64)>> {
    parse_rational_list(text)?
        .iter()
        .map(|x| {
            use num_traits::{Signed, ToPrimitive};
            if !x.is_positive() {
                return Err(Error::domain(format!("grid ratio {x} must be positive")));
            }
            match (x.numer().to_u64(), x.denom().to_u64()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(Error::domain(format!("grid ratio {x} is too large"))),
            }
        })
        .collect()
}

fn parse_d_rule(text: &str) -> Result<DRule> {
    match text {
        "smallest" => Ok(DRule::Smallest),
        "largest" => Ok(DRule::Largest),
        other => other
            .parse::<u64>()
            .map(DRule::Fixed)
            .map_err(|_| Error::Parse(format!("d rule must be smallest, largest or an integer, got {other:?}"))),
    }
}

fn parse_surface(text: &str) -> Result<PolarizedSurface<Rational>> {
    PolarizedSurface::from_slice(&parse_rational_list(text)?)
}

fn scheme_table(rows: &[SchemeRow]) -> Table {
    let mut t = Table::new(&[
        "p", "a", "b", "c", "m", "S", "L", "C", "six_S_plus_L", "bound", "slack", "limit_slope",
    ]);
    t.rows = rows
        .iter()
        .map(|r| {
            vec![
                r.p.into(),
                r.a.into(),
                r.b.into(),
                r.c.into(),
                r.m.into(),
                (&r.s_sum).into(),
                r.l_sum.into(),
                (&r.c_sum).into(),
                (&r.six_s_plus_l).into(),
                (&r.bound).into(),
                (&r.slack).into(),
                (&r.limit_slope).into(),
            ]
        })
        .collect();
    t
}

/// Runs one parsed command.
pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::Hj { p, q } => {
            let e = hj_expand(*p, *q)?;
            let mut out = Output::new("hj", to_json(&e));
            let terms: Vec<String> = e.terms.iter().map(|t| t.to_string()).collect();
            out.plain = Some(format!("[{}]", terms.join(", ")));
            out.push("p", *p);
            out.push("q", *q);
            out.push("terms", terms.join(" ").as_str());
            out.push("length", e.len());
            out.push("excess", e.excess());
            Ok(out)
        }
        Command::Dedekind { q, p } => {
            let classical = dedekind_sum(*q, *p)?;
            let via_hj = dedekind_sum_hj(*q, *p)?;
            let mut out = Output::new(
                "dedekind",
                json!({
                    "q": q, "p": p,
                    "s": format_rational(&classical),
                    "s_hj": format_rational(&via_hj),
                }),
            );
            out.plain = Some(display_rational(&classical));
            out.push("q", *q);
            out.push("p", *p);
            out.push("s", &classical);
            out.push("s_hj", &via_hj);
            if classical != via_hj {
                out.failure = Some(Error::Verification(format!(
                    "sawtooth sum {classical} differs from continued-fraction value {via_hj}"
                )));
            }
            Ok(out)
        }
        Command::Cqp { q, p } => {
            let c = c_qp(*q, *p)?;
            let rec = dedekind_record(*q, *p)?;
            let mut out = Output::new("cqp", to_json(&rec));
            out.plain = Some(display_rational(&c));
            out.push("q", *q);
            out.push("p", *p);
            out.push("s", &rec.s);
            out.push("l", rec.l);
            out.push("c", &c);
            out.push("q_inv", rec.q_inv);
            Ok(out)
        }
        Command::Ru { p, alpha, beta, d, residual, formal } => {
            let params = if *formal {
                RUParams::formal(*p, *alpha, *beta, *d)?
            } else {
                RUParams::new(*p, *alpha, *beta, *d)?
            };
            let x = chern_x(&params, residual.clone());
            let gamma = gamma_invariants(&params);
            let (lead_c1, lead_c2) = leading_coefficients(*alpha, *beta)?;
            let lambda = slope_limit(&Rational::new((*alpha).into(), (*beta).into()))?;
            let mut out = Output::new(
                "ru",
                json!({
                    "chern": to_json(&x),
                    "gamma": to_json(&gamma),
                    "leading_c1sq": lead_c1.to_string(),
                    "leading_c2": lead_c2.to_string(),
                    "lambda": format_rational(&lambda),
                }),
            );
            out.push("p", *p);
            out.push("alpha", *alpha);
            out.push("beta", *beta);
            out.push("d", *d);
            out.push("formal", *formal);
            out.push("n", &params.n());
            out.push("t2", &x.counts.t2);
            out.push("t21", &x.counts.t21);
            out.push("t22", &x.counts.t22);
            out.push("log_c1sq", &x.log_c1sq);
            out.push("log_c2", &x.log_c2);
            out.push("genus_sum", &x.genus_sum);
            out.push("c2", &x.c2_exact);
            out.push("c1sq_partial", &x.c1sq_partial);
            out.push("residual_omitted", x.residual_omitted);
            if let Some(c1) = &x.c1sq {
                out.push("c1sq", c1);
            }
            out.push("slope", &x.slope_best());
            out.push("gamma_sq", &gamma.gamma_sq);
            out.push("gamma_dot_k", &gamma.gamma_dot_k);
            out.push("leading_c1sq", &lead_c1);
            out.push("leading_c2", &lead_c2);
            out.push("lambda", &lambda);
            Ok(out)
        }
        Command::Bounds { pmax } => {
            let report = verify_lomaschico(*pmax)?;
            let violations: Vec<&SchemeRow> = report.violations().collect();
            let limit_violations: Vec<&SchemeRow> = report.limit_violations().collect();
            let minimizers = report.min_limit_per_prime();
            let min_slack = report.min_slack();
            let mut out = Output::new(
                "bounds",
                json!({
                    "p_max": pmax,
                    "primes": report.primes,
                    "schemes": report.rows.len(),
                    "violations": to_json(&violations),
                    "limit_violations": to_json(&limit_violations),
                    "min_slack": to_json(&min_slack),
                    "min_limit_per_prime": to_json(&minimizers),
                    "rows": to_json(&report.rows),
                }),
            );
            out.push("p_max", *pmax);
            out.push("primes", report.primes.len());
            out.push("schemes", report.rows.len());
            out.push("violations", violations.len());
            out.push("limit_violations", limit_violations.len());
            if let Some(r) = min_slack {
                out.push("min_slack", &r.slack);
                out.push("min_slack_scheme", format!("p={} a={} b={} c={}", r.p, r.a, r.b, r.c).as_str());
            }
            for r in &minimizers {
                out.push(
                    &format!("min_limit_slope_p{}", r.p),
                    format!("{} at a={} b={} c={}", display_rational(&r.limit_slope), r.a, r.b, r.c).as_str(),
                );
            }
            out.table = Some(scheme_table(&report.rows));
            out.failure = report.check().err();
            Ok(out)
        }
        Command::Lemma { pmax } => {
            let report = verify_lemma_behavior(*pmax)?;
            let violations: Vec<_> = report.violations().collect();
            let mut out = Output::new(
                "lemma",
                json!({
                    "p_max": pmax,
                    "pairs": report.rows.len(),
                    "equalities": report.equality_count(),
                    "violations": to_json(&violations),
                    "rows": to_json(&report.rows),
                }),
            );
            out.push("p_max", *pmax);
            out.push("pairs", report.rows.len());
            out.push("equalities", report.equality_count());
            out.push("violations", violations.len());
            let mut t = Table::new(&["p", "q", "length", "excess", "bound", "slack"]);
            t.rows = report
                .rows
                .iter()
                .map(|r| vec![r.p.into(), r.q.into(), r.length.into(), r.excess.into(), r.bound.into(), r.slack.into()])
                .collect();
            out.table = Some(t);
            out.failure = report.check().err();
            Ok(out)
        }
        Command::Product { x_invariants, y_invariants, check } => {
            let xs = parse_surface(x_invariants)?;
            let ys = parse_surface(y_invariants)?;
            let res = product_invariants(&xs, &ys);
            let warnings = if *check { sanity_warnings(&xs, &ys) } else { Vec::new() };
            for w in &warnings {
                log::warn!("{w}");
            }
            let fields = [
                ("c1sq_s", &res.c1sq_s),
                ("c2_s", &res.c2_s),
                ("chi_s", &res.chi_s),
                ("coupling", &res.coupling),
                ("deg_to_x", &res.deg_to_x),
                ("deg_to_y", &res.deg_to_y),
            ];
            let mut record = serde_json::Map::new();
            for (k, v) in fields {
                record.insert(k.into(), Value::String(format_rational(v)));
            }
            let slope = res.slope();
            record.insert("slope".into(), slope.as_ref().map(|s| format_rational(s).into()).unwrap_or(Value::Null));
            record.insert("warnings".into(), to_json(&warnings));
            let mut out = Output::new("product", Value::Object(record));
            for (k, v) in fields {
                out.push(k, v);
            }
            if let Some(s) = &slope {
                out.push("slope", s);
            }
            Ok(out)
        }
        Command::Seek { r, tol, witness_p, d } => {
            let r = parse_rational(r)?;
            let tol = parse_rational(tol)?;
            let cert = seek_slope(&r, &tol, *witness_p, *d)?;
            let mut out = Output::new("seek", to_json(&cert));
            out.push("target_r", &cert.target_r);
            out.push("x_star", Cell::Text(format!("{}", cert.x_star)));
            out.push("alpha", cert.alpha);
            out.push("beta", cert.beta);
            out.push("asymptotic_slope", &cert.asymptotic_slope);
            out.push("asymptotic_error", &cert.asymptotic_error);
            out.push("witness_p", cert.witness_p);
            out.push("witness_slope", &cert.witness_slope);
            out.push("residual_note", cert.residual_note);
            Ok(out)
        }
        Command::Density { grid, primes, d_rule } => {
            let grid = parse_grid(grid)?;
            let primes = parse_u64_list(primes)?;
            let table = density_sample(&grid, &primes, parse_d_rule(d_rule)?)?;
            let mut out = Output::new("density", to_json(&table));
            out.push("rows", table.rows.len());
            out.push("skipped", table.skipped.len());
            let mut t = Table::new(&["alpha", "beta", "p", "d", "lambda", "witness_slope", "abs_difference"]);
            t.rows = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.alpha.into(),
                        r.beta.into(),
                        r.p.into(),
                        r.d.into(),
                        (&r.lambda).into(),
                        (&r.witness_slope).into(),
                        (&r.abs_difference).into(),
                    ]
                })
                .collect();
            out.table = Some(t);
            Ok(out)
        }
    }
}

fn thread_count(requested: Option<usize>) -> Option<usize> {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match (requested.filter(|&n| n > 0), cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    }
}

fn one_line(e: &Error) -> String {
    let reason = e.to_string().replace(['\n', '\r'], " ");
    format!("error kind={} code={} reason={}", e.kind(), e.exit_code(), reason)
}

fn run_config(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let output = match thread_count(cfg.threads) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(io::Error::other(e.to_string())))?
            .install(|| execute(&cfg.command))?,
        None => execute(&cfg.command)?,
    };
    let text = output.render(cfg.format, !cfg.no_header, cfg.approx)?;
    match &cfg.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    match output.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let first = e.to_string();
                    let first = first.lines().next().unwrap_or("invalid arguments");
                    let reason = first.trim_start_matches("error: ");
                    let _ = writeln!(stderr, "error kind=usage code=1 reason={reason}");
                    1
                }
            };
        }
    };
    match run_config(&cfg, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", one_line(&e));
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
