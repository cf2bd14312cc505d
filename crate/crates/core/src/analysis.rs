//! Coefficient tables for `D_c(λ)` and growth fits for the divisor remainder
//! `Δ(λ) = D(λ) − λ log λ − (2γ − 1) λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{euler_gamma, second_divisor_coefficient};
use crate::counting::{divisor_summatory, divisor_summatory_u64, shifted_pair_count, IndexBase};
use crate::{format, Error, Module, Result};

/// Hardy's lower bound for the remainder exponent.
pub const HARDY_EXPONENT: f64 = 0.25;
/// Huxley's upper bound `131/416`.
pub const HUXLEY_EXPONENT: f64 = 131.0 / 416.0;

/// Shifts tabulated in the coefficient tables.
pub const TABLE_SHIFTS: std::ops::RangeInclusive<u32> = 2..=20;

const MIN_FIT_SAMPLES: usize = 20;
const MIN_FIT_DECADES: f64 = 3.0;

/// `D_c(λ) = #{(n, m) : (n²+c)(m²+c) ≤ λ²}`, the shifted analogue of the
/// divisor summatory function, normalised so that `D_c(λ) ~ λ log λ`.
pub fn shifted_divisor_count(c: f64, lambda: f64, base: IndexBase) -> Result<u128> {
    shifted_pair_count(c, lambda * lambda, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimates {
    pub count: u128,
    /// `D_c(λ) / (λ log λ)`, tends to 1.
    pub first: f64,
    /// `(D_c(λ) − λ log λ) / λ`, tends to `2γ_c − 1`.
    pub second: f64,
}

pub fn estimate_coefficients(c: f64, lambda: f64, base: IndexBase) -> Result<Estimates> {
    if !(lambda >= 1e3) {
        return Err(Error::domain(
            Module::Analysis,
            format!("coefficient estimates need λ ≥ 1000, got {lambda}"),
        ));
    }
    let count = shifted_divisor_count(c, lambda, base)?;
    let d = count as f64;
    let ll = lambda * lambda.ln();
    Ok(Estimates {
        count,
        first: d / ll,
        second: (d - ll) / lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub c: f64,
    pub estimate: f64,
    pub closed_form: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimate_from_one: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_from_one: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    /// Coefficient of `λ log λ` (closed form 1).
    First,
    /// Coefficient of `λ` (closed form `2γ_c − 1`).
    Second,
}

/// One row per `c = 2, …, 20`, columns `c,estimate,closed_form,error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub term: Term,
    pub lambda: f64,
    pub base: IndexBase,
    pub rows: Vec<CoefficientRow>,
}

const COLUMNS: [&str; 4] = ["c", "estimate", "closed_form", "error"];
const EXTRA_COLUMNS: [&str; 2] = ["estimate_from_one", "error_from_one"];

impl CoefficientTable {
    /// Builds the table; with `both_bases` the estimate from the count starting
    /// at index one is reported alongside.
    pub fn compute(term: Term, lambda: f64, base: IndexBase, both_bases: bool) -> Result<Self> {
        let rows = TABLE_SHIFTS
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&c| {
                let c = c as f64;
                let pick = |e: Estimates| match term {
                    Term::First => e.first,
                    Term::Second => e.second,
                };
                let closed_form = match term {
                    Term::First => 1.0,
                    Term::Second => second_divisor_coefficient(c, 1e-13)?,
                };
                let estimate = pick(estimate_coefficients(c, lambda, base)?);
                let other = if both_bases {
                    Some(pick(estimate_coefficients(c, lambda, IndexBase::FromOne)?))
                } else {
                    None
                };
                Ok(CoefficientRow {
                    c,
                    estimate,
                    closed_form,
                    error: (estimate - closed_form).abs(),
                    estimate_from_one: other,
                    error_from_one: other.map(|e| (e - closed_form).abs()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientTable {
            term,
            lambda,
            base,
            rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let extra = self.rows.iter().any(|r| r.estimate_from_one.is_some());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = COLUMNS.to_vec();
        if extra {
            header.extend(EXTRA_COLUMNS);
        }
        w.write_record(&header).expect("writing to memory");
        for r in &self.rows {
            let mut record = vec![
                format::real(r.c),
                format::real(r.estimate),
                format::real(r.closed_form),
                format::real(r.error),
            ];
            if extra {
                record.push(r.estimate_from_one.map(format::real).unwrap_or_default());
                record.push(r.error_from_one.map(format::real).unwrap_or_default());
            }
            w.write_record(&record).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
    }

    pub fn from_csv(text: &str, term: Term, lambda: f64, base: IndexBase) -> Result<Self> {
        let io = |e: String| Error::Io {
            module: Module::Analysis,
            msg: e,
        };
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| io(e.to_string()))?.clone();
        let names: Vec<&str> = header.iter().collect();
        let extra = names.len() == 6;
        if names[..names.len().min(4)] != COLUMNS || !(names.len() == 4 || extra) {
            return Err(io(format!("unexpected header `{}`", names.join(","))));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| io(e.to_string()))?;
            let real = |i: usize| {
                let f = record.get(i).unwrap_or("");
                f.parse::<f64>().map_err(|_| io(format!("cannot parse `{f}`")))
            };
            let optional = |i: usize| -> Result<Option<f64>> {
                if extra && !record.get(i).unwrap_or("").is_empty() {
                    Ok(Some(real(i)?))
                } else {
                    Ok(None)
                }
            };
            rows.push(CoefficientRow {
                c: real(0)?,
                estimate: real(1)?,
                closed_form: real(2)?,
                error: real(3)?,
                estimate_from_one: optional(4)?,
                error_from_one: optional(5)?,
            });
        }
        Ok(CoefficientTable {
            term,
            lambda,
            base,
            rows,
        })
    }
}

/// Remainder of the (shifted) divisor problem at each grid point:
/// `Δ(λ) = D(λ) − λ log λ − (2γ − 1) λ`, or with `D_c` and `γ_c` when a
/// shift is given.
pub fn remainder_series(grid: &[f64], shift: Option<f64>) -> Result<Vec<(f64, f64)>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain(Module::Analysis, "λ grid must be sorted ascending"));
    }
    let coefficient = match shift {
        None => 2.0 * euler_gamma(1e-14)?.value - 1.0,
        Some(c) => second_divisor_coefficient(c, 1e-13)?,
    };
    grid.par_iter()
        .map(|&lambda| {
            let d = match shift {
                None => divisor_summatory(lambda)? as f64,
                Some(c) => shifted_divisor_count(c, lambda, IndexBase::FromZero)? as f64,
            };
            let main = if lambda > 0.0 { lambda * lambda.ln() } else { 0.0 };
            Ok((lambda, d - main - coefficient * lambda))
        })
        .collect()
}

/// `points` log-uniformly spaced integers in `[min, max]`, deduplicated.
pub fn log_uniform_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min >= 1.0 && max > min) || points < 2 {
        return Err(Error::domain(
            Module::Analysis,
            "grid needs 1 ≤ min < max and at least two points",
        ));
    }
    let (a, b) = (min.ln(), max.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round())
        .collect();
    grid.dedup();
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct References {
    pub hardy: f64,
    pub huxley: f64,
}

impl Default for References {
    fn default() -> Self {
        References {
            hardy: HARDY_EXPONENT,
            huxley: HUXLEY_EXPONENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderStudy {
    pub samples: Vec<(f64, f64)>,
    pub fitted_exponent: Option<f64>,
    pub fit_rsquared: Option<f64>,
    pub references: References,
}

impl RemainderStudy {
    /// Stores the samples and fits the growth exponent when they are rich enough.
    pub fn new(samples: Vec<(f64, f64)>) -> Self {
        let fit = exponent_fit(&samples).ok();
        RemainderStudy {
            fitted_exponent: fit.map(|f| f.exponent),
            fit_rsquared: fit.map(|f| f.rsquared),
            samples,
            references: References::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub rsquared: f64,
}

/// Least-squares slope of `log(running max |Δ|)` against `log λ`.
pub fn exponent_fit(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::domain(
            Module::Analysis,
            format!("need at least {MIN_FIT_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    if samples.iter().any(|s| !(s.0 > 0.0)) || samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::domain(
            Module::Analysis,
            "sample λ must be positive and strictly increasing",
        ));
    }
    let decades = (samples[samples.len() - 1].0 / samples[0].0).log10();
    if decades < MIN_FIT_DECADES {
        return Err(Error::domain(
            Module::Analysis,
            format!("samples span {decades:.2} decades, need {MIN_FIT_DECADES}"),
        ));
    }
    let mut running = 0.0f64;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(l, d)| {
            running = running.max(d.abs());
            (running > 0.0).then(|| (l.ln(), running.ln()))
        })
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::domain(Module::Analysis, "remainder vanishes on too many samples"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let rsquared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ExponentFit {
        exponent: slope,
        rsquared,
    })
}

/// Number of sign changes of `Δ(n)` over the integers `start..start + span`.
pub fn remainder_sign_changes(start: u64, span: u64) -> Result<u64> {
    if start == 0 || span == 0 {
        return Err(Error::domain(Module::Analysis, "start and span must be positive"));
    }
    let coefficient = 2.0 * euler_gamma(1e-14)?.value - 1.0;
    let divisors = |n: u64| -> u64 {
        let mut count = 0;
        let mut i = 1;
        while i * i <= n {
            if n.is_multiple_of(i) {
                count += if i * i == n { 1 } else { 2 };
            }
            i += 1;
        }
        count
    };
    let mut d = divisor_summatory_u64(start)?;
    let delta = |n: u64, d: u64| {
        let x = n as f64;
        d as f64 - x * x.ln() - coefficient * x
    };
    let mut previous = delta(start, d).signum();
    let mut changes = 0;
    for n in start + 1..start + span {
        d += divisors(n);
        let sign = delta(n, d).signum();
        if sign != previous {
            changes += 1;
            previous = sign;
        }
    }
    Ok(changes)
}
