//! One-dimensional model spectra and their tensor products.
//!
//! A [`Family`] is a symbolic description of an operator spectrum that can be
//! counted in closed form and materialized lazily up to a cutoff. Every other
//! module consumes spectra only through this type.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::{Error, Module, Result};

/// Relative tolerance for merging coincident non-integer tensor eigenvalues.
pub const MERGE_RTOL: f64 = 1e-12;

/// Largest shift accepted on the exact integer path.
const MAX_INTEGRAL_SHIFT: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entry {
    pub value: f64,
    pub multiplicity: u64,
}

impl Entry {
    pub fn new(value: f64, multiplicity: u64) -> Self {
        Entry {
            value,
            multiplicity,
        }
    }
}

impl From<(f64, u64)> for Entry {
    fn from((value, multiplicity): (f64, u64)) -> Self {
        Entry::new(value, multiplicity)
    }
}

/// Symbolic spectrum of a one-dimensional model operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `(-Δ + c)^k` on the circle: eigenvalues `(j² + c)^k`, `j ∈ ℤ`, so the
    /// `j = 0` mode has multiplicity 1 and every other level multiplicity 2.
    /// `c = 0` projects out the kernel.
    Circle { c: f64, k: u32 },
    /// Quadrant model: levels `(j² + c)^k` for `j ≥ 0`, all with multiplicity 2.
    /// Its tensor square has eigenvalues `(n²+c)(m²+c)`, `(n, m) ∈ ℕ²`, each
    /// with multiplicity four, which is the lattice behind `D_c(λ)`.
    Folded { c: f64, k: u32 },
    /// Complete finite spectrum, sorted and strictly increasing.
    Finite(Vec<Entry>),
}

impl Family {
    pub fn circle(c: f64, k: u32) -> Result<Self> {
        check_shift(c, k, false)?;
        Ok(Family::Circle { c, k })
    }

    pub fn folded(c: f64, k: u32) -> Result<Self> {
        check_shift(c, k, true)?;
        Ok(Family::Folded { c, k })
    }

    pub fn finite<E: Into<Entry>>(entries: impl IntoIterator<Item = E>) -> Result<Self> {
        let entries: Vec<Entry> = entries.into_iter().map(Into::into).collect();
        if entries.is_empty() {
            return Err(Error::domain(Module::Spectra, "finite spectrum has no entries"));
        }
        for e in &entries {
            if !(e.value > 0.0 && e.value.is_finite()) {
                return Err(Error::domain(
                    Module::Spectra,
                    format!("eigenvalue {} is not positive", e.value),
                ));
            }
            if e.multiplicity == 0 {
                return Err(Error::domain(
                    Module::Spectra,
                    format!("eigenvalue {} has zero multiplicity", e.value),
                ));
            }
        }
        if entries.windows(2).any(|w| w[0].value >= w[1].value) {
            return Err(Error::domain(
                Module::Spectra,
                "finite spectrum must be strictly increasing",
            ));
        }
        Ok(Family::Finite(entries))
    }

    /// True when the spectrum is finite and fully known.
    pub fn is_complete(&self) -> bool {
        matches!(self, Family::Finite(_))
    }

    /// All eigenvalues are integers small enough for the exact `u128` path.
    pub fn is_integral(&self) -> bool {
        match self {
            Family::Circle { c, .. } | Family::Folded { c, .. } => {
                c.fract() == 0.0 && *c <= MAX_INTEGRAL_SHIFT
            }
            Family::Finite(entries) => entries
                .iter()
                .all(|e| e.value.fract() == 0.0 && e.value < 9.0e15),
        }
    }

    pub fn smallest(&self) -> f64 {
        match self {
            Family::Circle { c, .. } if *c == 0.0 => 1.0,
            Family::Circle { c, k } | Family::Folded { c, k } => c.powi(*k as i32),
            Family::Finite(entries) => entries[0].value,
        }
    }

    /// Operator order `m` (`2k` for the circle families); `None` for finite spectra.
    pub fn order(&self) -> Option<f64> {
        match self {
            Family::Circle { k, .. } | Family::Folded { k, .. } => Some(2.0 * *k as f64),
            Family::Finite(_) => None,
        }
    }

    /// Base dimension `n` (always 1 for the circle families).
    pub fn dim(&self) -> Option<u32> {
        match self {
            Family::Circle { .. } | Family::Folded { .. } => Some(1),
            Family::Finite(_) => None,
        }
    }

    /// Growth exponent `n/m` of the counting function; 0 for finite spectra.
    pub fn ratio(&self) -> f64 {
        match (self.dim(), self.order()) {
            (Some(n), Some(m)) => n as f64 / m,
            _ => 0.0,
        }
    }

    /// Leading Weyl coefficient `W` in `N(x) ~ W x^{ratio}`.
    pub fn weyl_leading(&self) -> f64 {
        match self {
            Family::Circle { .. } | Family::Folded { .. } => 2.0,
            Family::Finite(_) => 0.0,
        }
    }

    fn level_multiplicity(&self, j: u64) -> u64 {
        match self {
            Family::Circle { .. } if j == 0 => 1,
            Family::Circle { .. } | Family::Folded { .. } => 2,
            Family::Finite(entries) => entries[j as usize].multiplicity,
        }
    }

    fn first_level(&self) -> u64 {
        match self {
            Family::Circle { c, .. } if *c == 0.0 => 1,
            _ => 0,
        }
    }

    fn level_value(&self, j: u64) -> f64 {
        match self {
            Family::Circle { c, k } | Family::Folded { c, k } => {
                let base = (j as f64) * (j as f64) + c;
                base.powi(*k as i32)
            }
            Family::Finite(entries) => entries[j as usize].value,
        }
    }

    /// Cumulative multiplicity of eigenvalues `≤ x`.
    pub fn count_le(&self, x: f64) -> u128 {
        if self.is_integral() {
            if x < 1.0 {
                return 0;
            }
            if x < 1.0e30 {
                return self.count_le_int(x.floor() as u128);
            }
        }
        self.count_le_real(x)
    }

    /// Exact cumulative multiplicity for integral spectra.
    ///
    /// Only meaningful when [`Family::is_integral`] holds.
    pub fn count_le_int(&self, x: u128) -> u128 {
        match self {
            Family::Circle { c, k } | Family::Folded { c, k } => {
                let c = *c as u128;
                let r = iroot(x, *k);
                if r < c || (c == 0 && r == 0) {
                    return 0;
                }
                let m = (r - c).isqrt();
                match (self, c) {
                    (Family::Circle { .. }, 0) => 2 * m,
                    (Family::Circle { .. }, _) => 2 * m + 1,
                    _ => 2 * (m + 1),
                }
            }
            Family::Finite(_) => self.count_le_real(x as f64),
        }
    }

    fn count_le_real(&self, x: f64) -> u128 {
        match self {
            Family::Circle { c, k } | Family::Folded { c, k } => {
                if x < self.smallest() {
                    return 0;
                }
                let r = x.powf(1.0 / *k as f64);
                let mut m = (r - c).max(0.0).sqrt().floor() as u64;
                while m > 0 && self.level_value(m) > x {
                    m -= 1;
                }
                while self.level_value(m + 1) <= x {
                    m += 1;
                }
                match self {
                    Family::Circle { c, .. } if *c == 0.0 => 2 * m as u128,
                    Family::Circle { .. } => 2 * m as u128 + 1,
                    _ => 2 * (m as u128 + 1),
                }
            }
            Family::Finite(entries) => {
                let idx = entries.partition_point(|e| e.value <= x);
                entries[..idx].iter().map(|e| e.multiplicity as u128).sum()
            }
        }
    }

    /// Materializes every eigenvalue `≤ cutoff`.
    pub fn materialize(&self, cutoff: f64) -> Result<Spectrum1D> {
        let smallest = self.smallest();
        if !(cutoff >= smallest) {
            return Err(Error::EmptySpectrum { cutoff, smallest });
        }
        let entries = match self {
            Family::Finite(entries) => entries
                .iter()
                .copied()
                .take_while(|e| e.value <= cutoff)
                .collect(),
            _ => {
                let mut out = Vec::new();
                let mut j = self.first_level();
                loop {
                    let v = self.level_value(j);
                    if v > cutoff {
                        break;
                    }
                    out.push(Entry::new(v, self.level_multiplicity(j)));
                    j += 1;
                }
                out
            }
        };
        Ok(Spectrum1D {
            entries,
            cutoff,
            family: self.clone(),
        })
    }
}

fn check_shift(c: f64, k: u32, strictly_positive: bool) -> Result<()> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::domain(
            Module::Spectra,
            format!("shift c = {c} must be nonnegative"),
        ));
    }
    if strictly_positive && c == 0.0 {
        return Err(Error::domain(
            Module::Spectra,
            "the quadrant model needs c > 0",
        ));
    }
    if k == 0 {
        return Err(Error::domain(Module::Spectra, "power k must be at least 1"));
    }
    Ok(())
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Circle { c, k } => write!(f, "circle(c={c},k={k})"),
            Family::Folded { c, k } => write!(f, "folded(c={c},k={k})"),
            Family::Finite(entries) => {
                f.write_str("list(")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}:{}", e.value, e.multiplicity)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Floor of the `k`-th root of `x`.
pub fn iroot(x: u128, k: u32) -> u128 {
    match k {
        0 => panic!("zeroth root"),
        1 => x,
        2 => x.isqrt(),
        _ => {
            let mut r = (x as f64).powf(1.0 / k as f64) as u128;
            let fits = |r: u128| r.checked_pow(k).is_some_and(|p| p <= x);
            while r > 0 && !fits(r) {
                r -= 1;
            }
            while fits(r + 1) {
                r += 1;
            }
            r
        }
    }
}

/// A spectrum materialized up to `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    entries: Vec<Entry>,
    cutoff: f64,
    family: Family,
}

impl Spectrum1D {
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn total_multiplicity(&self) -> u128 {
        self.entries.iter().map(|e| e.multiplicity as u128).sum()
    }

    /// `(value, multiplicity)` pairs, mostly useful in tests.
    pub fn pairs(&self) -> Vec<(f64, u64)> {
        self.entries
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect()
    }
}

/// Spectrum of `(-Δ + c)^k` on the circle up to `cutoff`. For `c = 0` the
/// zero mode is projected out.
pub fn circle_laplacian_spectrum(c: f64, k: u32, cutoff: f64) -> Result<Spectrum1D> {
    Family::circle(c, k)?.materialize(cutoff)
}

/// Eigenvalues `λ_j μ_i ≤ cutoff` of the tensor product, with multiplied
/// multiplicities and coincident products merged.
pub fn tensor_spectrum(s1: &Spectrum1D, s2: &Spectrum1D, cutoff: f64) -> Result<Vec<Entry>> {
    for (this, other) in [(s1, s2), (s2, s1)] {
        let required = cutoff / other.family.smallest();
        if !this.family.is_complete() && this.cutoff < required {
            return Err(Error::InsufficientCutoff {
                module: Module::Spectra,
                have: this.cutoff,
                required,
            });
        }
    }

    let mut products = Vec::new();
    for a in &s1.entries {
        for b in &s2.entries {
            let v = a.value * b.value;
            if v > cutoff * (1.0 + MERGE_RTOL) {
                break;
            }
            let w = a
                .multiplicity
                .checked_mul(b.multiplicity)
                .ok_or_else(|| Error::overflow(Module::Spectra, "tensor multiplicity"))?;
            products.push((a.value, b.value, w));
        }
    }

    if s1.family.is_integral() && s2.family.is_integral() {
        let limit = cutoff.floor() as u128;
        let mut merged: BTreeMap<u128, u64> = BTreeMap::new();
        for (a, b, w) in products {
            let v = a as u128 * b as u128;
            if v <= limit {
                *merged.entry(v).or_insert(0) += w;
            }
        }
        return Ok(merged
            .into_iter()
            .map(|(v, w)| Entry::new(v as f64, w))
            .collect());
    }

    let mut flat: Vec<Entry> = products
        .into_iter()
        .map(|(a, b, w)| Entry::new(a * b, w))
        .filter(|e| e.value <= cutoff)
        .collect();
    flat.sort_by(|x, y| x.value.total_cmp(&y.value));
    let mut out: Vec<Entry> = Vec::with_capacity(flat.len());
    for e in flat {
        match out.last_mut() {
            Some(last) if (e.value - last.value).abs() <= MERGE_RTOL * e.value.abs() => {
                last.multiplicity += e.multiplicity;
            }
            _ => out.push(e),
        }
    }
    Ok(out)
}

/// `A = P₁ ⊗ P₂` described by its factor families.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOperator {
    pub left: Family,
    pub right: Family,
}

impl ProductOperator {
    pub fn new(left: Family, right: Family) -> Self {
        ProductOperator { left, right }
    }

    pub fn orders(&self) -> (Option<f64>, Option<f64>) {
        (self.left.order(), self.right.order())
    }

    pub fn dims(&self) -> (Option<u32>, Option<u32>) {
        (self.left.dim(), self.right.dim())
    }

    /// Location of the first (rightmost) pole of the spectral zeta function in `s`.
    pub fn pole(&self) -> f64 {
        self.left.ratio().max(self.right.ratio())
    }

    /// 2 when both factors grow at the same rate, 1 otherwise.
    pub fn pole_order(&self) -> u32 {
        let (a, b) = (self.left.ratio(), self.right.ratio());
        if a > 0.0 && a == b {
            2
        } else {
            1
        }
    }

    pub fn kernel_removed(&self) -> bool {
        [&self.left, &self.right]
            .iter()
            .any(|f| matches!(f, Family::Circle { c, .. } if *c == 0.0))
    }

    pub fn swapped(&self) -> Self {
        ProductOperator::new(self.right.clone(), self.left.clone())
    }

    pub fn smallest(&self) -> f64 {
        self.left.smallest() * self.right.smallest()
    }
}

impl fmt::Display for ProductOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.left, self.right)
    }
}
