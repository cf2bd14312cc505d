#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Command-line front end: argument parsing into a [`RunConfig`] and a runner
//! that renders every result as CSV or JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rayon::prelude::*;
use spectral_lab::analysis::{
    exponent_fit, log_uniform_grid, remainder_series, shifted_divisor_count, CoefficientTable,
    RemainderStudy, Term,
};
use spectral_lab::constants::{euler_gamma, gamma_c, gamma_c_partial};
use spectral_lab::counting::{
    counting_grid, divisor_sieve_with_budget, divisor_summatory, shifted_pair_count, Convention,
    CountingTable, IndexBase, DEFAULT_SIEVE_BUDGET,
};
use spectral_lab::descriptor::{parse_factors, parse_product};
use spectral_lab::spectra::{Family, ProductOperator};
use spectral_lab::weyl::{aramaki_expansion, product_pole_data, weyl_coefficients, wodzicki_residue};
use spectral_lab::zeta::{
    laurent_at_pole, ExtrapolationConfig, LaurentData, LaurentErrors, ZetaEvaluator, DEFAULT_TOL,
};
use spectral_lab::{format, Error};

pub const THREADS_ENV: &str = "SPECTRAL_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "spectral-lab", version, about = "Spectral counting and zeta-function experiments")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; SPECTRAL_LAB_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Divisor counts d(n) by sieve; prints D(n), or every d(n) with --list.
    Sieve {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = DEFAULT_SIEVE_BUDGET)]
        budget: u64,
    },
    /// D(λ) = Σ_{n≤λ} d(n) by the hyperbola method.
    DivisorSum {
        #[arg(long)]
        lambda: f64,
    },
    /// #{(n, m) : (n²+c)(m²+c) ≤ λ}.
    Dc {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "from_zero")]
        index_base: String,
    },
    /// Eigenvalue count N(λ) of a product operator.
    Count {
        #[arg(long)]
        op: String,
        #[arg(long, conflicts_with_all = ["min", "max"])]
        lambda: Option<f64>,
        #[arg(long, requires = "max")]
        min: Option<f64>,
        #[arg(long, requires = "min")]
        max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// γ_c with a certified error bound, or the raw sequence at --tau.
    GammaC {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Spectral zeta function of a factor or product at real s.
    Zeta {
        #[arg(long)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Laurent coefficients at a pole, extrapolated numerically.
    Laurent {
        #[arg(long)]
        op: String,
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// Two-term Weyl asymptotics of N(λ) for a product operator.
    WeylCoeffs {
        #[arg(long)]
        op: String,
    },
    /// Map Laurent coefficients to counting asymptotics.
    Aramaki {
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a2: f64,
        #[arg(long, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long)]
        z0: f64,
    },
    /// Coefficient of λ log λ in D_c(λ), c = 2..20.
    Table1(TableArgs),
    /// Coefficient of λ in D_c(λ), c = 2..20.
    Table2(TableArgs),
    /// Divisor-problem remainder Δ(λ) on a log-uniform grid, with growth fit.
    Remainder {
        #[command(flatten)]
        grid: GridArgs,
        /// Use D_c and γ_c instead of the classical divisor problem.
        #[arg(long)]
        c: Option<f64>,
    },
    /// m₁ m₂ times the double-pole coefficient.
    Wres {
        #[arg(long)]
        op: Option<String>,
        #[arg(long, requires_all = ["m1", "m2"], conflicts_with = "op")]
        a2: Option<f64>,
        #[arg(long)]
        m1: Option<f64>,
        #[arg(long)]
        m2: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = 1e7)]
    lambda: f64,
    #[arg(long, default_value = "from_zero")]
    index_base: String,
    /// Add the estimate from the count starting at index one.
    #[arg(long)]
    both_bases: bool,
}

/// Fully parsed and validated command.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Sieve { n: u64, list: bool, budget: u64 },
    DivisorSum { lambda: f64 },
    Dc { c: f64, lambda: f64, base: IndexBase },
    Count { op: ProductOperator, descriptor: String, lambdas: Lambdas },
    GammaC { c: f64, tol: f64, tau: Option<f64> },
    Zeta { factors: Vec<Family>, s: f64, tol: f64 },
    Laurent { factors: Vec<Family>, z0: Option<f64>, order: Option<u32>, config: ExtrapolationConfig },
    WeylCoeffs { op: ProductOperator },
    Aramaki { order: u32, a2: f64, a1: f64, z0: f64 },
    Table { term: Term, lambda: f64, base: IndexBase, both_bases: bool },
    Remainder { grid: Vec<f64>, c: Option<f64> },
    Wres { source: WresSource },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lambdas {
    Single(f64),
    Grid(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WresSource {
    Operator(ProductOperator),
    Explicit { a2: f64, m1: f64, m2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// `None` lets the runtime pick.
    pub threads: Option<usize>,
}

/// Usage problems; `Display` is the full message to show.
#[derive(Debug)]
pub enum UsageError {
    Clap(clap::Error),
    Invalid(String),
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UsageError::Clap(e) => write!(f, "{e}"),
            UsageError::Invalid(msg) => write!(f, "spectral-lab: usage: {msg}"),
        }
    }
}

impl UsageError {
    /// Exit status: 0 for `--help`/`--version`, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            UsageError::Clap(e) if !e.use_stderr() => 0,
            _ => 2,
        }
    }
}

fn usage(e: Error) -> UsageError {
    UsageError::Invalid(e.to_string())
}

fn index_base(text: &str) -> Result<IndexBase, UsageError> {
    text.parse().map_err(|_| {
        UsageError::Invalid(format!(
            "--index-base: expected from_zero or from_one, got `{text}`"
        ))
    })
}

/// Parses `argv` (including the program name). The thread count from
/// `SPECTRAL_LAB_THREADS`, when set, overrides `--threads`.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(UsageError::Clap)?;
    let env_threads = std::env::var(THREADS_ENV).ok();
    let threads = match env_threads.as_deref().map(str::trim) {
        Some(v) if !v.is_empty() => Some(v.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            UsageError::Invalid(format!("{THREADS_ENV}: expected a positive integer, got `{v}`"))
        })?),
        _ => cli.threads,
    };
    if threads == Some(0) {
        return Err(UsageError::Invalid("--threads must be positive".into()));
    }

    let command = match cli.command {
        Cmd::Sieve { n, list, budget } => Command::Sieve { n, list, budget },
        Cmd::DivisorSum { lambda } => Command::DivisorSum { lambda },
        Cmd::Dc { c, lambda, index_base: b } => Command::Dc {
            c,
            lambda,
            base: index_base(&b)?,
        },
        Cmd::Count {
            op,
            lambda,
            min,
            max,
            points,
        } => {
            let product = parse_product(&op).map_err(usage)?;
            let lambdas = match (lambda, min, max) {
                (Some(l), _, _) => Lambdas::Single(l),
                (None, Some(lo), Some(hi)) => {
                    Lambdas::Grid(log_uniform_grid(lo, hi, points).map_err(usage)?)
                }
                _ => {
                    return Err(UsageError::Invalid(
                        "count needs --lambda or --min/--max".into(),
                    ))
                }
            };
            Command::Count {
                op: product,
                descriptor: op,
                lambdas,
            }
        }
        Cmd::GammaC { c, tol, tau } => Command::GammaC { c, tol, tau },
        Cmd::Zeta { op, s, tol } => Command::Zeta {
            factors: factors(&op)?,
            s,
            tol,
        },
        Cmd::Laurent {
            op,
            z0,
            order,
            h,
            levels,
            degree,
        } => Command::Laurent {
            factors: factors(&op)?,
            z0,
            order,
            config: ExtrapolationConfig { h, levels, degree },
        },
        Cmd::WeylCoeffs { op } => Command::WeylCoeffs {
            op: parse_product(&op).map_err(usage)?,
        },
        Cmd::Aramaki { order, a2, a1, z0 } => Command::Aramaki { order, a2, a1, z0 },
        Cmd::Table1(t) => table(Term::First, t)?,
        Cmd::Table2(t) => table(Term::Second, t)?,
        Cmd::Remainder { grid, c } => Command::Remainder {
            grid: log_uniform_grid(grid.min, grid.max, grid.points).map_err(usage)?,
            c,
        },
        Cmd::Wres { op, a2, m1, m2 } => {
            let source = match (op, a2) {
                (Some(op), None) => WresSource::Operator(parse_product(&op).map_err(usage)?),
                (None, Some(a2)) => WresSource::Explicit {
                    a2,
                    m1: m1.unwrap_or_default(),
                    m2: m2.unwrap_or_default(),
                },
                _ => return Err(UsageError::Invalid("wres needs --op or --a2/--m1/--m2".into())),
            };
            Command::Wres { source }
        }
    };
    Ok(RunConfig {
        command,
        format: cli.format,
        out: cli.out,
        threads,
    })
}

fn factors(text: &str) -> Result<Vec<Family>, UsageError> {
    let f = parse_factors(text).map_err(usage)?;
    if f.len() > 2 {
        return Err(UsageError::Invalid(format!(
            "`{text}`: at most two factors are supported"
        )));
    }
    Ok(f)
}

fn table(term: Term, t: TableArgs) -> Result<Command, UsageError> {
    Ok(Command::Table {
        term,
        lambda: t.lambda,
        base: index_base(&t.index_base)?,
        both_bases: t.both_bases,
    })
}

/// Rendered output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub body: String,
    /// One-line summary for standard error, if any.
    pub note: Option<String>,
}

impl Artifact {
    fn text(body: String) -> Self {
        Artifact { body, note: None }
    }

    fn json(value: serde_json::Value) -> Self {
        let mut body = serde_json::to_string_pretty(&value).expect("serializable");
        body.push('\n');
        Artifact::text(body)
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// Executes a configuration on a pool of the configured size.
pub fn run(config: &RunConfig) -> Result<Artifact, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| execute(config)),
        Err(_) => execute(config),
    }
}

fn evaluator(factors: &[Family]) -> ZetaEvaluator {
    match factors {
        [single] => ZetaEvaluator::continued(single.clone()),
        [left, right] => ZetaEvaluator::for_operator(&ProductOperator::new(left.clone(), right.clone())),
        _ => unreachable!("descriptor parsing yields one or two factors"),
    }
}

fn execute(config: &RunConfig) -> Result<Artifact, Error> {
    let json = config.format == Format::Json;
    Ok(match &config.command {
        Command::Sieve { n, list, budget } => {
            let d = divisor_sieve_with_budget(*n, *budget)?;
            let total: u64 = d.iter().map(|&x| x as u64).sum();
            if json {
                Artifact::json(json!({ "n": n, "D": total }))
            } else if *list {
                let mut out = String::from("n,d\n");
                for (i, v) in d.iter().enumerate().skip(1) {
                    let _ = writeln!(out, "{i},{v}");
                }
                Artifact::text(out)
            } else {
                Artifact::text(format!("n,D\n{n},{total}\n"))
            }
        }
        Command::DivisorSum { lambda } => {
            let d = divisor_summatory(*lambda)?;
            if json {
                Artifact::json(json!({ "lambda": lambda, "D": d }))
            } else {
                Artifact::text(format!("lambda,D\n{},{d}\n", format::real(*lambda)))
            }
        }
        Command::Dc { c, lambda, base } => {
            let count = shifted_pair_count(*c, *lambda, *base)?;
            if json {
                Artifact::json(json!({ "c": c, "lambda": lambda, "index_base": base.to_string(), "count": count.to_string() }))
            } else {
                Artifact::text(format!(
                    "c,lambda,count\n{},{},{count}\n",
                    format::real(*c),
                    format::real(*lambda)
                ))
            }
        }
        Command::Count {
            op,
            descriptor,
            lambdas,
        } => match lambdas {
            Lambdas::Single(l) => {
                let n = counting_grid(op, &[*l]).remove(0)?;
                if json {
                    Artifact::json(json!({ "lambda": l, "N": n.to_string() }))
                } else {
                    Artifact::text(csv_line(&[format::real(*l), n.to_string()]))
                }
            }
            Lambdas::Grid(grid) => {
                let (w, _) = weyl_coefficients(op, 1e-13)?;
                let mut table = CountingTable::new(Convention::Multiplicity, descriptor.clone());
                for (l, n) in grid.iter().zip(counting_grid(op, grid)) {
                    table.push(*l, n?, w.predict(*l));
                }
                if json {
                    Artifact::json(json!({
                        "operator": table.operator,
                        "convention": "multiplicity",
                        "rows": table.rows.iter().map(|r| json!({
                            "lambda": r.lambda, "exact": r.exact.to_string(),
                            "predicted": r.predicted, "residual": r.residual,
                        })).collect::<Vec<_>>(),
                    }))
                } else {
                    Artifact::text(table.to_csv())
                }
            }
        },
        Command::GammaC { c, tol, tau } => {
            if let Some(tau) = tau {
                let v = gamma_c_partial(*c, *tau)?;
                return Ok(if json {
                    Artifact::json(json!({ "c": c, "tau": tau, "partial": v }))
                } else {
                    Artifact::text(format!(
                        "c,tau,partial\n{},{},{}\n",
                        format::real(*c),
                        format::real(*tau),
                        format::real(v)
                    ))
                });
            }
            let r = gamma_c(*c, *tol)?;
            if json {
                Artifact::json(json!({ "c": c, "value": r.value, "error_bound": r.error_bound, "terms_used": r.terms_used }))
            } else {
                Artifact::text(format!(
                    "c,value,error_bound,terms_used\n{},{},{},{}\n",
                    format::real(*c),
                    format::real(r.value),
                    format::real(r.error_bound),
                    r.terms_used
                ))
            }
        }
        Command::Zeta { factors, s, tol } => {
            let v = evaluator(factors).with_tol(*tol).eval(*s)?;
            if json {
                Artifact::json(json!({ "s": s, "value": v }))
            } else {
                Artifact::text(format!("s,value\n{},{}\n", format::real(*s), format::real(v)))
            }
        }
        Command::Laurent {
            factors,
            z0,
            order,
            config: cfg,
        } => {
            let (default_z0, default_order) = match factors.as_slice() {
                [single] => (single.ratio(), 1),
                [l, r] => {
                    let op = ProductOperator::new(l.clone(), r.clone());
                    (op.pole(), op.pole_order())
                }
                _ => unreachable!(),
            };
            let f = evaluator(factors);
            let ld = laurent_at_pole(&f, z0.unwrap_or(default_z0), order.unwrap_or(default_order), *cfg)?;
            Artifact::json(serde_json::to_value(ld).expect("serializable"))
        }
        Command::WeylCoeffs { op } => {
            let (w, method) = weyl_coefficients(op, 1e-13)?;
            let mut a = Artifact::json(json!({
                "z0": w.z0,
                "coeff_log": w.coeff_log,
                "coeff_plain": w.coeff_plain,
                "method": method,
            }));
            if op.pole_order() == 2 {
                a.note = Some(format!(
                    "expansion N(λ) ≈ {}·λ^{}·log λ {:+}·λ^{}; remainder exponent hint {}",
                    w.coeff_log, w.z0, w.coeff_plain, w.z0, w.remainder_exponent_hint
                ));
            }
            a
        }
        Command::Aramaki { order, a2, a1, z0 } => {
            let ld = LaurentData {
                z0: *z0,
                order: *order,
                a2: *a2,
                a1: *a1,
                finite_part: 0.0,
                err: LaurentErrors {
                    a2: 0.0,
                    a1: 0.0,
                    finite_part: 0.0,
                },
            };
            let w = aramaki_expansion(&ld, *z0)?;
            Artifact::json(serde_json::to_value(w).expect("serializable"))
        }
        Command::Table {
            term,
            lambda,
            base,
            both_bases,
        } => {
            let table = CoefficientTable::compute(*term, *lambda, *base, *both_bases)?;
            if json {
                Artifact::json(serde_json::to_value(&table).expect("serializable"))
            } else {
                Artifact::text(table.to_csv())
            }
        }
        Command::Remainder { grid, c } => {
            let samples = remainder_series(grid, *c)?;
            let coefficient = match c {
                None => 2.0 * euler_gamma(1e-14)?.value - 1.0,
                Some(c) => 2.0 * gamma_c(*c, 1e-13)?.value - 1.0,
            };
            let fit = exponent_fit(&samples);
            let study = RemainderStudy::new(samples.clone());
            if json {
                Artifact::json(serde_json::to_value(&study).expect("serializable"))
            } else {
                let name = match c {
                    None => "divisor".to_string(),
                    Some(c) => format!("shifted-divisor(c={c})"),
                };
                let mut table = CountingTable::new(Convention::PairCount, name);
                let counts: Vec<u128> = grid
                    .par_iter()
                    .map(|&l| match c {
                        None => divisor_summatory(l).map(u128::from),
                        Some(c) => shifted_divisor_count(*c, l, IndexBase::FromZero),
                    })
                    .collect::<Result<_, _>>()?;
                for (l, exact) in grid.iter().zip(counts) {
                    let main = if *l > 0.0 { l * l.ln() } else { 0.0 } + coefficient * l;
                    table.push(*l, exact, main);
                }
                let note = match fit {
                    Ok(f) => format!(
                        "fitted exponent {:.4} (R² {:.3}); Hardy 0.25, Huxley {:.4}",
                        f.exponent,
                        f.rsquared,
                        131.0 / 416.0
                    ),
                    Err(e) => format!("no exponent fit: {e}"),
                };
                Artifact {
                    body: table.to_csv(),
                    note: Some(note),
                }
            }
        }
        Command::Wres { source } => {
            let (ld, m1, m2) = match source {
                WresSource::Operator(op) => {
                    let (Some(m1), Some(m2)) = op.orders() else {
                        return Err(Error::Descriptor("wres needs factors with a known order".into()));
                    };
                    (product_pole_data(op, 1e-13)?, m1, m2)
                }
                WresSource::Explicit { a2, m1, m2 } => (
                    LaurentData {
                        z0: 1.0,
                        order: 2,
                        a2: *a2,
                        a1: 0.0,
                        finite_part: 0.0,
                        err: LaurentErrors {
                            a2: 0.0,
                            a1: 0.0,
                            finite_part: 0.0,
                        },
                    },
                    *m1,
                    *m2,
                ),
            };
            let v = wodzicki_residue(&ld, m1, m2)?;
            if json {
                Artifact::json(json!({ "m1": m1, "m2": m2, "A2": ld.a2, "wres": v }))
            } else {
                Artifact::text(format!(
                    "m1,m2,A2,wres\n{},{},{},{}\n",
                    format::real(m1),
                    format::real(m2),
                    format::real(ld.a2),
                    format::real(v)
                ))
            }
        }
    })
}

/// Runs a configuration and writes the artifact; returns the exit status.
pub fn run_and_emit(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match run(config) {
        Ok(artifact) => {
            let written = match &config.out {
                Some(path) => std::fs::write(path, &artifact.body).map_err(|e| e.to_string()),
                None => stdout.write_all(artifact.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Some(note) = &artifact.note {
                let _ = writeln!(stderr, "{note}");
            }
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "spectral-lab: io: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "spectral-lab: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
