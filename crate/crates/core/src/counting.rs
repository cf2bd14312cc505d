//! Exact eigenvalue and lattice-point counting.
//!
//! Everything on the integer path uses `u128` arithmetic with exact integer
//! square roots; floating point only enters for non-integer shifts.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format;
use crate::spectra::{Entry, Family, ProductOperator};
use crate::{Error, Module, Result};

/// Default sieve budget in entries (4 bytes each).
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 27;

/// Largest argument accepted by [`brute_force_count`].
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

/// Largest argument handled on the exact integer path.
const INTEGER_PATH_LIMIT: f64 = 1e36;

/// `d(h)` for `h ≤ n`, using [`DEFAULT_SIEVE_BUDGET`]. Index 0 holds 0.
pub fn divisor_sieve(n: u64) -> Result<Vec<u32>> {
    divisor_sieve_with_budget(n, DEFAULT_SIEVE_BUDGET)
}

pub fn divisor_sieve_with_budget(n: u64, budget: u64) -> Result<Vec<u32>> {
    if n == 0 {
        return Err(Error::domain(Module::Counting, "sieve length must be at least 1"));
    }
    if n > budget {
        return Err(Error::Budget {
            requested: n,
            budget,
        });
    }
    let n = n as usize;
    let mut d = vec![0u32; n + 1];
    for a in 1..=n {
        for m in (a..=n).step_by(a) {
            d[m] += 1;
        }
    }
    Ok(d)
}

/// Divisor partial sums `D(x)` at every checkpoint, computed by a segmented
/// divisor sieve in constant memory. Checkpoints may be in any order.
pub fn segmented_divisor_sums(checkpoints: &[u64]) -> Vec<u64> {
    const SEGMENT: u64 = 1 << 16;

    let mut order: Vec<usize> = (0..checkpoints.len()).collect();
    order.sort_by_key(|&i| checkpoints[i]);
    let mut out = vec![0u64; checkpoints.len()];
    let Some(&last) = order.last() else {
        return out;
    };
    let limit = checkpoints[last];

    let mut counts = vec![0u16; SEGMENT as usize];
    let mut running = 0u64;
    let mut next = 0usize;
    while next < order.len() && checkpoints[order[next]] == 0 {
        next += 1;
    }
    let mut lo = 1u64;
    while lo <= limit {
        let hi = (lo + SEGMENT).min(limit + 1);
        let len = (hi - lo) as usize;
        counts[..len].fill(0);
        // Pairs a·b = n with a ≤ b: weight 2, or 1 on the diagonal.
        let amax = (hi - 1).isqrt();
        for a in 1..=amax {
            let b0 = a.max(lo.div_ceil(a));
            let mut n = a * b0;
            while n < hi {
                counts[(n - lo) as usize] += 2;
                n += a;
            }
            let sq = a * a;
            if sq >= lo && sq < hi {
                counts[(sq - lo) as usize] -= 1;
            }
        }
        for (offset, &d) in counts[..len].iter().enumerate() {
            running += d as u64;
            let n = lo + offset as u64;
            while next < order.len() && checkpoints[order[next]] == n {
                out[order[next]] = running;
                next += 1;
            }
        }
        lo = hi;
    }
    out
}

/// `D(⌊λ⌋) = Σ_{n≤λ} d(n)` by the hyperbola identity
/// `D(x) = 2 Σ_{n≤√x} ⌊x/n⌋ − ⌊√x⌋²`.
pub fn divisor_summatory(lambda: f64) -> Result<u64> {
    if !(lambda >= 1.0) {
        return Err(Error::domain(
            Module::Counting,
            format!("divisor sum needs λ ≥ 1, got {lambda}"),
        ));
    }
    if lambda >= u64::MAX as f64 {
        return Err(Error::overflow(Module::Counting, format!("D({lambda})")));
    }
    divisor_summatory_u64(lambda.floor() as u64)
}

pub fn divisor_summatory_u64(x: u64) -> Result<u64> {
    let r = x.isqrt();
    let mut acc: u128 = 0;
    for n in 1..=r {
        acc += (x / n) as u128;
    }
    let total = 2 * acc - (r as u128) * (r as u128);
    u64::try_from(total).map_err(|_| Error::overflow(Module::Counting, format!("D({x})")))
}

/// Where the lattice indices of `D_c` start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexBase {
    #[default]
    FromZero,
    FromOne,
}

impl IndexBase {
    fn first(self) -> u64 {
        match self {
            IndexBase::FromZero => 0,
            IndexBase::FromOne => 1,
        }
    }
}

impl fmt::Display for IndexBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexBase::FromZero => "from_zero",
            IndexBase::FromOne => "from_one",
        })
    }
}

impl FromStr for IndexBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "from_zero" | "zero" | "0" => Ok(IndexBase::FromZero),
            "from_one" | "one" | "1" => Ok(IndexBase::FromOne),
            other => Err(Error::Descriptor(format!("unknown index base `{other}`"))),
        }
    }
}

/// `D_c(λ) = #{(n, m) : (n² + c)(m² + c) ≤ λ}` with `n, m` starting at the
/// given base.
///
/// Uses the symmetry of the region: every pair has `min(n, m) ≤ K` where `K`
/// is the last index with `(K² + c)² ≤ λ`, so only `O(λ^{1/4})` closed-form
/// column counts are needed.
pub fn shifted_pair_count(c: f64, lambda: f64, base: IndexBase) -> Result<u128> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(
            Module::Counting,
            format!("shift c = {c} must be positive"),
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(
            Module::Counting,
            format!("λ = {lambda} must be positive"),
        ));
    }
    if c.fract() == 0.0 && c < 1e15 {
        if lambda >= INTEGER_PATH_LIMIT {
            return Err(Error::overflow(Module::Counting, format!("D_c({lambda})")));
        }
        Ok(shifted_pair_count_int(c as u128, lambda.floor() as u128, base))
    } else {
        Ok(shifted_pair_count_real(c, lambda, base))
    }
}

fn shifted_pair_count_int(c: u128, limit: u128, base: IndexBase) -> u128 {
    let n0 = base.first() as u128;
    let f = |n: u128| n * n + c;
    // #{m ≥ n0 : m² + c ≤ x}
    let column = |x: u128| -> u128 {
        if x < f(n0) {
            0
        } else {
            (x - c).isqrt() + 1 - n0
        }
    };
    if f(n0) * f(n0) > limit {
        return 0;
    }
    let mut k = n0;
    let mut acc = 0u128;
    loop {
        let fk = f(k);
        if fk * fk > limit {
            break;
        }
        acc += column(limit / fk);
        k += 1;
    }
    let rows = k - n0;
    2 * acc - rows * rows
}

fn shifted_pair_count_real(c: f64, lambda: f64, base: IndexBase) -> u128 {
    let n0 = base.first();
    let f = |n: u64| (n as f64) * (n as f64) + c;
    let fits = |n: u64, m: u64| f(n) * f(m) <= lambda;
    if !fits(n0, n0) {
        return 0;
    }
    let column = |n: u64| -> u128 {
        if !fits(n, n0) {
            return 0;
        }
        let x = lambda / f(n) - c;
        let mut m = x.max(0.0).sqrt().floor() as u64;
        m = m.max(n0);
        while m > n0 && !fits(n, m) {
            m -= 1;
        }
        while fits(n, m + 1) {
            m += 1;
        }
        (m - n0 + 1) as u128
    };
    let mut k = n0;
    let mut acc = 0u128;
    while fits(k, k) {
        acc += column(k);
        k += 1;
    }
    let rows = (k - n0) as u128;
    2 * acc - rows * rows
}

fn entries_upto(family: &Family, x: f64) -> Result<Vec<Entry>> {
    if x < family.smallest() {
        return Ok(Vec::new());
    }
    Ok(family.materialize(x)?.entries().to_vec())
}

/// `N(λ)`: eigenvalues of the product operator `≤ λ`, counted with multiplicity.
///
/// Splits the hyperbola at `T = √λ`: pairs with `λ_j ≤ T` are counted through
/// the closed-form count of the right factor, the remaining pairs through the
/// closed-form count of the left factor.
pub fn counting_function(op: &ProductOperator, lambda: f64) -> Result<u128> {
    if !(lambda >= op.smallest()) {
        return Ok(0);
    }
    let (left, right) = (&op.left, &op.right);
    if left.is_integral() && right.is_integral() {
        if lambda >= INTEGER_PATH_LIMIT {
            return Err(Error::overflow(Module::Counting, format!("N({lambda})")));
        }
        let limit = lambda.floor() as u128;
        let t = limit.isqrt();
        let mut total = 0u128;
        for e in entries_upto(left, t as f64)? {
            total += e.multiplicity as u128 * right.count_le_int(limit / e.value as u128);
        }
        let below = left.count_le_int(t);
        for e in entries_upto(right, (limit / (t + 1)) as f64)? {
            let upper = left.count_le_int(limit / e.value as u128);
            total += e.multiplicity as u128 * (upper - below);
        }
        return Ok(total);
    }

    let t = lambda.sqrt();
    let mut total = 0u128;
    for e in entries_upto(left, t)? {
        total += e.multiplicity as u128 * right.count_le(lambda / e.value);
    }
    let below = left.count_le(t);
    for e in entries_upto(right, lambda / t)? {
        let x = lambda / e.value;
        if x > t {
            let upper = left.count_le(x);
            total += e.multiplicity as u128 * upper.saturating_sub(below);
        }
    }
    Ok(total)
}

/// Nested-loop reference count, only for `λ ≤ 10⁸`.
pub fn brute_force_count(op: &ProductOperator, lambda: f64) -> Result<u128> {
    if lambda > BRUTE_FORCE_LIMIT {
        return Err(Error::domain(
            Module::Counting,
            format!("brute force refuses λ = {lambda} above {BRUTE_FORCE_LIMIT}"),
        ));
    }
    if !(lambda >= op.smallest()) {
        return Ok(0);
    }
    let a = entries_upto(&op.left, lambda / op.right.smallest())?;
    let b = entries_upto(&op.right, lambda / op.left.smallest())?;
    let mut total = 0u128;
    for x in &a {
        for y in &b {
            if x.value * y.value > lambda {
                break;
            }
            total += x.multiplicity as u128 * y.multiplicity as u128;
        }
    }
    Ok(total)
}

/// `N(λ)` over a grid, evaluated in parallel but returned in input order.
pub fn counting_grid(op: &ProductOperator, lambdas: &[f64]) -> Vec<Result<u128>> {
    lambdas
        .par_iter()
        .map(|&l| counting_function(op, l))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Eigenvalues counted with multiplicity.
    Multiplicity,
    /// Lattice pairs, each counted once.
    PairCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingRow {
    pub lambda: f64,
    pub exact: u128,
    pub predicted: f64,
    pub residual: f64,
}

impl CountingRow {
    pub fn new(lambda: f64, exact: u128, predicted: f64) -> Self {
        CountingRow {
            lambda,
            exact,
            predicted,
            residual: exact as f64 - predicted,
        }
    }
}

/// Exact counts against a prediction, emitted as `lambda,exact,predicted,residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingTable {
    pub rows: Vec<CountingRow>,
    pub convention: Convention,
    pub operator: String,
}

impl CountingTable {
    pub const HEADER: [&'static str; 4] = ["lambda", "exact", "predicted", "residual"];

    pub fn new(convention: Convention, operator: impl Into<String>) -> Self {
        CountingTable {
            rows: Vec::new(),
            convention,
            operator: operator.into(),
        }
    }

    pub fn push(&mut self, lambda: f64, exact: u128, predicted: f64) {
        self.rows.push(CountingRow::new(lambda, exact, predicted));
    }

    /// Exact counts are nondecreasing and residuals consistent.
    pub fn is_consistent(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].lambda > w[1].lambda || w[0].exact <= w[1].exact)
            && self
                .rows
                .iter()
                .all(|r| r.residual == r.exact as f64 - r.predicted)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| e.to_string();
        let res: std::result::Result<(), String> = (|| {
            w.write_record(Self::HEADER).map_err(io)?;
            for r in &self.rows {
                w.write_record([
                    format::real(r.lambda),
                    r.exact.to_string(),
                    format::real(r.predicted),
                    format::real(r.residual),
                ])
                .map_err(io)?;
            }
            Ok(())
        })();
        res.expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
    }

    pub fn from_csv(text: &str, convention: Convention, operator: impl Into<String>) -> Result<Self> {
        let io = |e: String| Error::Io {
            module: Module::Counting,
            msg: e,
        };
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| io(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != Self::HEADER {
            return Err(io(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
        }
        let mut table = CountingTable::new(convention, operator);
        for record in reader.records() {
            let record = record.map_err(|e| io(e.to_string()))?;
            let field = |i: usize| record.get(i).unwrap_or("");
            let real = |i: usize| {
                field(i)
                    .parse::<f64>()
                    .map_err(|_| io(format!("cannot parse `{}`", field(i))))
            };
            let exact = field(1)
                .parse::<u128>()
                .map_err(|_| io(format!("cannot parse `{}`", field(1))))?;
            table.rows.push(CountingRow {
                lambda: real(0)?,
                exact,
                predicted: real(2)?,
                residual: real(3)?,
            });
        }
        Ok(table)
    }
}
