//! Spectral zeta functions `ζ(s) = Σ_j w_j λ_j^{-s}` and their Laurent data.
//!
//! The shifted circle sum `Z_c(s) = Σ_{n∈ℤ} (n² + c)^{-s}` is continued past
//! its abscissa by Poisson summation:
//!
//! ```text
//! Z_c(s) = √π Γ(s−½)/Γ(s) c^{½−s}
//!        + 4π^s/Γ(s) c^{(1−2s)/4} Σ_{n≥1} n^{s−½} K_{s−½}(2πn√c)
//! ```
//!
//! which has a simple pole of residue 1 at `s = ½`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::constants::{euler_gamma, gamma_c};
use crate::spectra::{Family, ProductOperator};
use crate::special::{bessel_k, gamma, recip_gamma};
use crate::{Error, Module, Result};

/// Distance from a pole inside which evaluation is refused.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Direct sums must sit this far right of the abscissa of convergence.
pub const DIRECT_MARGIN: f64 = 0.05;

/// Largest truncation index a direct circle sum may use.
const DIRECT_MAX_TERMS: f64 = 2e8;

/// Default tolerance of evaluators.
pub const DEFAULT_TOL: f64 = 1e-14;

/// ζ_R(s) for real `s > 1` by Euler–Maclaurin summation with Bernoulli
/// corrections through `B₆`.
pub fn riemann_zeta_real(s: f64, tol: f64) -> Result<f64> {
    if !(s > 1.0 + POLE_EXCLUSION) {
        return Err(Error::domain(
            Module::Zeta,
            format!("ζ_R needs s > 1, got {s}; use Laurent data for the pole at 1"),
        ));
    }
    // B₂/2!, B₄/4!, B₆/6!, B₈/8!
    const B: [f64; 4] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
    ];
    let rising = |m: usize| (0..m).map(|i| s + i as f64).product::<f64>();
    let remainder = |n: f64| (B[3] * rising(7)).abs() * n.powf(-s - 7.0);

    let mut n = 10.0f64;
    while remainder(n) > 0.5 * tol && n < 1e7 {
        n *= 2.0;
    }
    let mut head = 0.0;
    for i in (1..n as u64).rev() {
        head += (i as f64).powf(-s);
    }
    let mut value = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    for (k, b) in B.iter().take(3).enumerate() {
        let m = 2 * k + 1;
        value += b * rising(m) * n.powf(-s - m as f64);
    }
    Ok(value)
}

/// `Z_c(s) = Σ_{n∈ℤ} (n² + c)^{-s}`, meromorphically continued in `s`.
pub fn epstein_shifted(c: f64, s: f64, tol: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(
            Module::Zeta,
            format!("shift c = {c} must be positive"),
        ));
    }
    // poles at s = ½ − j, j = 0, 1, 2, ...
    let j = (0.5 - s).round();
    if j >= 0.0 && (s - (0.5 - j)).abs() < POLE_EXCLUSION {
        return Err(Error::NearPole {
            module: Module::Zeta,
            s,
            pole: 0.5 - j,
            distance: POLE_EXCLUSION,
        });
    }
    let nu = s - 0.5;
    let rg = recip_gamma(s);
    let main = PI.sqrt() * gamma(nu) * rg * c.powf(-nu);
    let prefactor = 4.0 * PI.powf(s) * rg * c.powf(-nu / 2.0);
    if prefactor == 0.0 {
        return Ok(if main.is_finite() { main } else { 0.0 });
    }
    let bessel_tol = tol.clamp(1e-16, 1e-12);
    let root = c.sqrt();
    let mut sum = 0.0;
    let mut previous = f64::INFINITY;
    for n in 1..1_000_000u64 {
        let nf = n as f64;
        let term = nf.powf(nu) * bessel_k(nu, 2.0 * PI * nf * root, bessel_tol);
        sum += term;
        let contribution = (prefactor * term).abs();
        if contribution < 0.1 * tol && contribution <= previous {
            break;
        }
        previous = contribution;
    }
    Ok(main + prefactor * sum)
}

/// Truncated `Σ_j w_j λ_j^{-s}` with an integral-comparison tail bound below `tol`.
pub fn spectral_zeta_direct(family: &Family, s: f64, tol: f64) -> Result<f64> {
    match family {
        Family::Finite(entries) => Ok(entries
            .iter()
            .rev()
            .map(|e| e.multiplicity as f64 * e.value.powf(-s))
            .sum()),
        Family::Circle { c, k } | Family::Folded { c, k } => {
            let ratio = family.ratio();
            if !(s >= ratio + DIRECT_MARGIN) {
                return Err(Error::OutsideRegion {
                    module: Module::Zeta,
                    s,
                    region: format!("direct sum needs s ≥ {}", ratio + DIRECT_MARGIN),
                });
            }
            // Σ_{|j|>J} (j²+c)^{-ks} ≤ 2∫_J^∞ x^{-a} dx = 2 J^{1−a}/(a−1), a = 2ks
            let a = 2.0 * *k as f64 * s;
            let cut = (4.0 / ((a - 1.0) * tol)).powf(1.0 / (a - 1.0)).ceil().max(1.0);
            if cut > DIRECT_MAX_TERMS {
                return Err(Error::OutsideRegion {
                    module: Module::Zeta,
                    s,
                    region: format!(
                        "direct sum at tol {tol} needs {cut:e} terms; move s further right of {ratio}"
                    ),
                });
            }
            let exponent = -(*k as f64) * s;
            let mut sum = 0.0;
            for j in (1..=cut as u64).rev() {
                let jf = j as f64;
                sum += 2.0 * (jf * jf + c).powf(exponent);
            }
            match family {
                Family::Circle { .. } if *c > 0.0 => sum += c.powf(exponent),
                Family::Folded { .. } => sum += 2.0 * c.powf(exponent),
                _ => {}
            }
            Ok(sum)
        }
    }
}

/// Where an evaluator may be called: `s > lower`, away from `poles`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lower: f64,
    pub poles: Vec<f64>,
    /// Poles at `start − j·step` for all `j ≥ 0`.
    pub pole_ladder: Option<(f64, f64)>,
}

impl Region {
    fn whole_line() -> Self {
        Region {
            lower: f64::NEG_INFINITY,
            poles: Vec::new(),
            pole_ladder: None,
        }
    }

    fn half_plane(lower: f64) -> Self {
        Region {
            lower,
            ..Region::whole_line()
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        if !(s > self.lower) {
            return false;
        }
        if self.poles.iter().any(|p| (s - p).abs() < POLE_EXCLUSION) {
            return false;
        }
        if let Some((start, step)) = self.pole_ladder {
            let j = ((start - s) / step).round();
            if j >= 0.0 && (s - (start - j * step)).abs() < POLE_EXCLUSION {
                return false;
            }
        }
        true
    }

    fn intersect(&self, other: &Region) -> Region {
        let mut poles = self.poles.clone();
        poles.extend(&other.poles);
        if let Some((start, step)) = other.pole_ladder {
            poles.push(start);
            if self.pole_ladder.is_some() {
                // the rightmost pole of each ladder is what matters in practice
                poles.extend((1..8).map(|j| start - j as f64 * step));
            }
        }
        Region {
            lower: self.lower.max(other.lower),
            poles,
            pole_ladder: self.pole_ladder.or(other.pole_ladder),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s > {}", self.lower)?;
        if let Some((start, step)) = self.pole_ladder {
            write!(f, ", s ∉ {{{start} − j·{step}}}")?;
        }
        for p in &self.poles {
            write!(f, ", s ≠ {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZetaKind {
    Riemann,
    /// Continued spectral zeta of a factor family.
    Continued(Family),
    /// Direct truncated sum over a factor family.
    Direct(Family),
    Product(Box<ZetaEvaluator>, Box<ZetaEvaluator>),
    Constant(f64),
}

/// A real-axis zeta function with its validity region.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaEvaluator {
    pub kind: ZetaKind,
    pub tol: f64,
}

impl ZetaEvaluator {
    fn new(kind: ZetaKind) -> Self {
        ZetaEvaluator {
            kind,
            tol: DEFAULT_TOL,
        }
    }

    pub fn riemann() -> Self {
        Self::new(ZetaKind::Riemann)
    }

    pub fn continued(family: Family) -> Self {
        Self::new(ZetaKind::Continued(family))
    }

    pub fn direct(family: Family) -> Self {
        Self::new(ZetaKind::Direct(family))
    }

    pub fn constant(value: f64) -> Self {
        Self::new(ZetaKind::Constant(value))
    }

    pub fn product(left: ZetaEvaluator, right: ZetaEvaluator) -> Self {
        Self::new(ZetaKind::Product(Box::new(left), Box::new(right)))
    }

    /// `ζ(A ⊗ B) = ζ(A) ζ(B)` from the continued factor zetas.
    pub fn for_operator(op: &ProductOperator) -> Self {
        Self::product(
            Self::continued(op.left.clone()),
            Self::continued(op.right.clone()),
        )
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        if let ZetaKind::Product(a, b) = &mut self.kind {
            a.tol = tol;
            b.tol = tol;
        }
        self
    }

    pub fn region(&self) -> Region {
        match &self.kind {
            ZetaKind::Riemann => Region::half_plane(1.0),
            ZetaKind::Constant(_) => Region::whole_line(),
            ZetaKind::Continued(family) => match family {
                Family::Finite(_) => Region::whole_line(),
                Family::Circle { c, k } if *c == 0.0 => Region::half_plane(0.5 / *k as f64),
                Family::Circle { k, .. } | Family::Folded { k, .. } => {
                    let k = *k as f64;
                    Region {
                        pole_ladder: Some((0.5 / k, 1.0 / k)),
                        ..Region::whole_line()
                    }
                }
            },
            ZetaKind::Direct(family) => match family {
                Family::Finite(_) => Region::whole_line(),
                _ => Region::half_plane(family.ratio() + DIRECT_MARGIN - f64::EPSILON),
            },
            ZetaKind::Product(a, b) => a.region().intersect(&b.region()),
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        match &self.kind {
            ZetaKind::Riemann => riemann_zeta_real(s, self.tol),
            ZetaKind::Constant(v) => Ok(*v),
            ZetaKind::Direct(family) => spectral_zeta_direct(family, s, self.tol),
            ZetaKind::Continued(family) => match family {
                Family::Finite(_) => spectral_zeta_direct(family, s, self.tol),
                Family::Circle { c, k } => {
                    let ks = *k as f64 * s;
                    if *c == 0.0 {
                        Ok(2.0 * riemann_zeta_real(2.0 * ks, self.tol)?)
                    } else {
                        epstein_shifted(*c, ks, self.tol)
                    }
                }
                Family::Folded { c, k } => {
                    let ks = *k as f64 * s;
                    Ok(epstein_shifted(*c, ks, self.tol)? + c.powf(-ks))
                }
            },
            ZetaKind::Product(a, b) => product_zeta(a, b, s),
        }
    }
}

/// Pointwise product of two evaluators; refuses `s` outside either region.
pub fn product_zeta(left: &ZetaEvaluator, right: &ZetaEvaluator, s: f64) -> Result<f64> {
    for side in [left, right] {
        let region = side.region();
        if !region.contains(s) {
            return Err(Error::OutsideRegion {
                module: Module::Zeta,
                s,
                region: region.to_string(),
            });
        }
    }
    Ok(left.eval(s)? * right.eval(s)?)
}

/// Anything that can be sampled on the real axis.
pub trait ZetaFn {
    fn eval(&self, s: f64) -> Result<f64>;
}

impl ZetaFn for ZetaEvaluator {
    fn eval(&self, s: f64) -> Result<f64> {
        ZetaEvaluator::eval(self, s)
    }
}

/// Adapter for plain closures.
pub struct FnZeta<F>(pub F);

impl<F: Fn(f64) -> f64> ZetaFn for FnZeta<F> {
    fn eval(&self, s: f64) -> Result<f64> {
        Ok((self.0)(s))
    }
}

/// Closed-form pole data of a factor's continued zeta at its first pole:
/// `ζ(s) = residue/(s − pole) + finite_part + O(s − pole)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleData {
    pub pole: f64,
    pub residue: f64,
    pub finite_part: f64,
    pub error_bound: f64,
}

/// For `(-Δ+c)^k` the pole sits at `1/(2k)` with residue `1/k`; the finite
/// part is `2γ_c − c^{-1/2}` on the full lattice, `2γ_c` for the quadrant
/// model and `2γ` once the kernel is removed.
pub fn family_pole_data(family: &Family, tol: f64) -> Result<PoleData> {
    let (c, k) = match family {
        Family::Finite(_) => {
            return Err(Error::unsupported(
                Module::Zeta,
                "finite spectra have an entire zeta function",
            ))
        }
        Family::Circle { c, k } | Family::Folded { c, k } => (*c, *k as f64),
    };
    let (finite_part, err) = if c == 0.0 {
        let g = euler_gamma(tol.max(1e-14))?;
        (2.0 * g.value, 2.0 * g.error_bound)
    } else {
        let g = gamma_c(c, tol.max(4e-14))?;
        let lattice = match family {
            Family::Circle { .. } => -1.0 / c.sqrt(),
            _ => 0.0,
        };
        (2.0 * g.value + lattice, 2.0 * g.error_bound)
    };
    Ok(PoleData {
        pole: 0.5 / k,
        residue: 1.0 / k,
        finite_part,
        error_bound: err,
    })
}

/// Sampling ladder for [`laurent_at_pole`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationConfig {
    /// Largest offset from the pole.
    pub h: f64,
    /// Samples at `z0 + h·2^{-k}`, `k = 0..=levels`.
    pub levels: u32,
    /// Highest polynomial degree eliminated by the Richardson table.
    pub degree: u32,
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        ExtrapolationConfig {
            h: 0.1,
            levels: 8,
            degree: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentErrors {
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    pub finite_part: f64,
}

/// Coefficients at the first pole: `f(s) = A2/(s−z0)² + A1/(s−z0) + finite_part + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentData {
    pub z0: f64,
    pub order: u32,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    pub finite_part: f64,
    pub err: LaurentErrors,
}

impl LaurentData {
    /// `p = 2` needs `A2 ≠ 0`, `p = 1` needs `A2 = 0`.
    pub fn is_consistent(&self) -> bool {
        match self.order {
            1 => self.a2 == 0.0,
            2 => self.a2 != 0.0,
            _ => false,
        }
    }
}

struct Extrapolated {
    value: f64,
    error: f64,
    diffs: Vec<f64>,
}

/// Richardson table for a sequence `x_k = L + c₁ η_k + c₂ η_k² + …` with
/// `η_k` halving at each level. Deep levels are dominated by rounding, so the
/// diagonal entry after the smallest level difference is returned.
fn richardson(samples: &[f64], degree: usize) -> Extrapolated {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(samples.len());
    let mut diagonal = Vec::with_capacity(samples.len());
    for (k, &x) in samples.iter().enumerate() {
        let mut row = vec![x];
        for j in 1..=k.min(degree) {
            let factor = (1u64 << j) as f64 - 1.0;
            let prev = &table[k - 1];
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(v);
        }
        diagonal.push(*row.last().unwrap_or(&x));
        table.push(row);
    }
    let diffs: Vec<f64> = diagonal.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let best = diffs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    match best {
        Some(i) => Extrapolated {
            value: diagonal[i + 1],
            error: diffs[i],
            diffs,
        },
        None => Extrapolated {
            value: diagonal.first().copied().unwrap_or(f64::NAN),
            error: f64::INFINITY,
            diffs,
        },
    }
}

fn check_converged(name: &str, ex: &Extrapolated, table: &mut Vec<String>) -> bool {
    table.push(format!(
        "{name}: [{}]",
        ex.diffs
            .iter()
            .map(|d| format!("{d:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    let Some(&first) = ex.diffs.first() else {
        return false;
    };
    let noise = 1e-8 * (1.0 + ex.value.abs());
    ex.value.is_finite() && (ex.error <= noise || ex.error < 0.5 * first)
}

/// Laurent coefficients of `f` at `z0`, assuming a pole of order `p ∈ {1, 2}`.
///
/// Samples `g(s) = (s − z0)^p f(s)` on `s = z0 + h·2^{-k}` and extrapolates
/// `g(z0)`, `g'(z0)` and `g''(z0)/2` with Richardson tables built from the
/// samples and their divided differences.
pub fn laurent_at_pole(
    f: &dyn ZetaFn,
    z0: f64,
    order: u32,
    config: ExtrapolationConfig,
) -> Result<LaurentData> {
    if !(order == 1 || order == 2) {
        return Err(Error::unsupported(
            Module::Zeta,
            format!("pole order {order}; only 1 and 2 are handled"),
        ));
    }
    if config.levels < 3 || !(config.h > 0.0) {
        return Err(Error::domain(
            Module::Zeta,
            "extrapolation needs h > 0 and at least 3 levels",
        ));
    }
    let steps: Vec<f64> = (0..=config.levels)
        .map(|k| config.h / (1u64 << k) as f64)
        .collect();
    let g: Vec<f64> = steps
        .iter()
        .map(|&h| Ok(h.powi(order as i32) * f.eval(z0 + h)?))
        .collect::<Result<_>>()?;

    let first: Vec<f64> = (0..g.len() - 1)
        .map(|k| (g[k] - g[k + 1]) / (steps[k] - steps[k + 1]))
        .collect();
    let second: Vec<f64> = (0..first.len() - 1)
        .map(|k| (first[k] - first[k + 1]) / (steps[k] - steps[k + 2]))
        .collect();

    let degree = config.degree as usize;
    let value = richardson(&g, degree);
    let slope = richardson(&first, degree);
    let curvature = richardson(&second, degree);

    let mut report = Vec::new();
    let mut ok = check_converged("g", &value, &mut report);
    ok &= check_converged("g'", &slope, &mut report);
    if order == 2 {
        ok &= check_converged("g''/2", &curvature, &mut report);
    }
    if !ok {
        return Err(Error::NonConvergent {
            table: report.join("; "),
        });
    }

    Ok(if order == 1 {
        LaurentData {
            z0,
            order,
            a2: 0.0,
            a1: value.value,
            finite_part: slope.value,
            err: LaurentErrors {
                a2: 0.0,
                a1: value.error,
                finite_part: slope.error,
            },
        }
    } else {
        LaurentData {
            z0,
            order,
            a2: value.value,
            a1: slope.value,
            finite_part: curvature.value,
            err: LaurentErrors {
                a2: value.error,
                a1: slope.error,
                finite_part: curvature.error,
            },
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.577_215_664_901_532_9;

    /// Σ_{n∈ℤ} (n²+c)^{-s} summed directly with the tail replaced by its
    /// Euler–Maclaurin integral, independent of the Bessel route.
    fn lattice_oracle(c: f64, s: f64) -> f64 {
        let cut = 200_000u64;
        let mut sum = 0.0;
        for n in (1..=cut).rev() {
            let nf = n as f64;
            sum += 2.0 * (nf * nf + c).powf(-s);
        }
        sum += c.powf(-s);
        // ∫_{N}^∞ 2 x^{-2s} dx − (N^{-2s}) ... first Euler–Maclaurin terms
        let nf = cut as f64;
        let tail = 2.0 * nf.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0) - nf.powf(-2.0 * s);
        sum + tail
    }

    #[test]
    fn riemann_classical_values() {
        let z2 = riemann_zeta_real(2.0, 1e-14).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() < 1e-13);
        let z4 = riemann_zeta_real(4.0, 1e-14).unwrap();
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!(riemann_zeta_real(1.0, 1e-10).is_err());
        assert!(riemann_zeta_real(0.5, 1e-10).is_err());
    }

    #[test]
    fn riemann_residue_at_one() {
        // (s−1)ζ(s) = 1 + γ(s−1) + …, extrapolated with the Laurent machinery
        let f = FnZeta(|s: f64| riemann_zeta_real(s, 1e-15).unwrap());
        let ld = laurent_at_pole(&f, 1.0, 1, ExtrapolationConfig::default()).unwrap();
        assert!((ld.a1 - 1.0).abs() < 1e-10);
        assert!((ld.finite_part - EULER).abs() < 1e-8);
    }

    #[test]
    fn epstein_examples() {
        let v = epstein_shifted(1.0, 1.0, 1e-14).unwrap();
        let coth = 1.0 / PI.tanh();
        assert!((v - PI * coth).abs() < 1e-12);
        assert!((v - 3.153_348_094_937).abs() < 1e-10);

        let v2 = epstein_shifted(1.0, 2.0, 1e-14).unwrap();
        assert!((v2 - lattice_oracle(1.0, 2.0)).abs() < 1e-12);
        assert!((v2 - 1.6137).abs() < 1e-4);
    }

    #[test]
    fn epstein_errors() {
        assert!(matches!(
            epstein_shifted(1.0, 0.5 + 1e-7, 1e-12),
            Err(Error::NearPole { .. })
        ));
        assert!(matches!(
            epstein_shifted(1.0, -0.5, 1e-12),
            Err(Error::NearPole { .. })
        ));
        assert!(matches!(
            epstein_shifted(0.0, 2.0, 1e-12),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn epstein_matches_lattice_oracle_left_and_right() {
        for c in [0.5, 1.0, 2.0, 10.0] {
            for s in [0.8, 1.0, 1.5, 3.0] {
                let a = epstein_shifted(c, s, 1e-14).unwrap();
                let b = lattice_oracle(c, s);
                assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "c={c} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn epstein_residue_is_one() {
        for c in [0.5, 2.0, 7.0] {
            let f = FnZeta(move |s: f64| epstein_shifted(c, s, 1e-15).unwrap());
            let ld = laurent_at_pole(&f, 0.5, 1, ExtrapolationConfig::default()).unwrap();
            assert!((ld.a1 - 1.0).abs() < 1e-10, "c = {c}: {}", ld.a1);
        }
    }

    #[test]
    fn lattice_finite_part_has_explicit_form() {
        // finite part of Z_c at ½ = −log(c/4) + 4 Σ K₀(2πn√c)
        for c in [0.5, 2.0, 10.0] {
            let f = FnZeta(move |s: f64| epstein_shifted(c, s, 1e-15).unwrap());
            let ld = laurent_at_pole(&f, 0.5, 1, ExtrapolationConfig::default()).unwrap();
            let bessel: f64 = (1..50)
                .map(|n| bessel_k(0.0, 2.0 * PI * n as f64 * c.sqrt(), 1e-16))
                .sum();
            let explicit = -(c / 4.0).ln() + 4.0 * bessel;
            assert!((ld.finite_part - explicit).abs() < 1e-9, "c = {c}");
        }
    }

    #[test]
    fn direct_examples() {
        let single = Family::finite([(2.0, 3)]).unwrap();
        assert_eq!(spectral_zeta_direct(&single, 1.0, 1e-12).unwrap(), 1.5);

        let kernel_free = Family::circle(0.0, 1).unwrap();
        let d = spectral_zeta_direct(&kernel_free, 2.0, 1e-12).unwrap();
        let r = 2.0 * riemann_zeta_real(4.0, 1e-14).unwrap();
        assert!((d - r).abs() < 2e-12);

        let shifted = Family::circle(1.0, 1).unwrap();
        let tol = 1e-12;
        let d = spectral_zeta_direct(&shifted, 2.0, tol).unwrap();
        let e = epstein_shifted(1.0, 2.0, tol).unwrap();
        assert!((d - e).abs() < 2.0 * tol);
    }

    #[test]
    fn direct_refuses_inside_margin() {
        let f = Family::circle(1.0, 1).unwrap();
        assert!(matches!(
            spectral_zeta_direct(&f, 0.52, 1e-10),
            Err(Error::OutsideRegion { .. })
        ));
        assert!(matches!(
            spectral_zeta_direct(&f, 0.56, 1e-14),
            Err(Error::OutsideRegion { .. })
        ));
    }

    #[test]
    fn direct_and_continuation_agree_on_strip() {
        for c in [0.5, 1.0, 2.0, 10.0] {
            let f = Family::circle(c, 1).unwrap();
            for s in [1.5, 2.0, 2.5, 3.0, 4.0] {
                let d = spectral_zeta_direct(&f, s, 1e-11).unwrap();
                let e = epstein_shifted(c, s, 1e-14).unwrap();
                assert!((d - e).abs() < 1e-10, "c={c} s={s}");
            }
        }
    }

    #[test]
    fn product_examples() {
        let z2 = ZetaEvaluator::continued(Family::circle(2.0, 1).unwrap());
        let p = product_zeta(&z2, &z2, 1.0).unwrap();
        let single = z2.eval(1.0).unwrap();
        assert_eq!(p, single * single);

        let one = ZetaEvaluator::constant(1.0);
        assert_eq!(product_zeta(&one, &z2, 1.3).unwrap(), z2.eval(1.3).unwrap());

        // truncated double sum over the tensor spectrum at s = 3
        let fam = Family::circle(2.0, 1).unwrap();
        let s1 = fam.materialize(2.0e6).unwrap();
        let mut double = 0.0;
        for a in s1.entries().iter().rev() {
            for b in s1.entries().iter().rev() {
                double += (a.multiplicity * b.multiplicity) as f64 * (a.value * b.value).powf(-3.0);
            }
        }
        let q = product_zeta(&z2, &z2, 3.0).unwrap();
        assert!((q - double).abs() < 1e-10);
    }

    #[test]
    fn product_refuses_region_mismatch() {
        let r = ZetaEvaluator::riemann();
        let z = ZetaEvaluator::continued(Family::circle(2.0, 1).unwrap());
        assert!(matches!(
            product_zeta(&r, &z, 0.8),
            Err(Error::OutsideRegion { .. })
        ));
        assert!(product_zeta(&r, &z, 1.5).is_ok());
    }

    #[test]
    fn laurent_trivial_double_pole() {
        let f = FnZeta(|s: f64| (s - 0.5).powi(-2));
        let ld = laurent_at_pole(&f, 0.5, 2, ExtrapolationConfig::default()).unwrap();
        assert!((ld.a2 - 1.0).abs() < 1e-12);
        assert!(ld.a1.abs() < 1e-9);
        assert!(ld.is_consistent());
    }

    #[test]
    fn laurent_of_squared_riemann() {
        // 2ζ_R(2s) = 1/(s−½) + 2γ + …, so 4ζ_R(2s)² has A2 = 1, A1 = 4γ
        let f = ZetaEvaluator::for_operator(&ProductOperator::new(
            Family::circle(0.0, 1).unwrap(),
            Family::circle(0.0, 1).unwrap(),
        ));
        let ld = laurent_at_pole(&f, 0.5, 2, ExtrapolationConfig::default()).unwrap();
        assert!((ld.a2 - 1.0).abs() < 1e-9);
        assert!((ld.a1 - 4.0 * EULER).abs() < 1e-7, "{}", ld.a1);
        assert!((ld.a1 - 2.308_862_6).abs() < 1e-6);
    }

    #[test]
    fn laurent_of_quadrant_model_square() {
        let fam = Family::folded(2.0, 1).unwrap();
        let f = ZetaEvaluator::for_operator(&ProductOperator::new(fam.clone(), fam));
        let ld = laurent_at_pole(&f, 0.5, 2, ExtrapolationConfig::default()).unwrap();
        let g2 = gamma_c(2.0, 1e-12).unwrap().value;
        assert!((ld.a2 - 1.0).abs() < 1e-9);
        assert!((ld.a1 - 4.0 * g2).abs() < 1e-7);
    }

    #[test]
    fn laurent_rejects_bad_order_and_divergence() {
        let f = FnZeta(|s: f64| 1.0 / s);
        assert!(matches!(
            laurent_at_pole(&f, 0.5, 3, ExtrapolationConfig::default()),
            Err(Error::Unsupported { .. })
        ));
        // wrong order assumed: g = (s−½)·(s−½)^{-2} blows up
        let g = FnZeta(|s: f64| (s - 0.5).powi(-2));
        assert!(matches!(
            laurent_at_pole(&g, 0.5, 1, ExtrapolationConfig::default()),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn pole_data_closed_forms() {
        let lattice = family_pole_data(&Family::circle(2.0, 1).unwrap(), 1e-12).unwrap();
        let quadrant = family_pole_data(&Family::folded(2.0, 1).unwrap(), 1e-12).unwrap();
        assert_eq!(lattice.residue, 1.0);
        assert!((quadrant.finite_part - lattice.finite_part - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let k2 = family_pole_data(&Family::circle(1.0, 2).unwrap(), 1e-12).unwrap();
        assert_eq!((k2.pole, k2.residue), (0.25, 0.5));
        assert!(family_pole_data(&Family::finite([(1.0, 1)]).unwrap(), 1e-12).is_err());
    }

    #[test]
    fn laurent_json_layout() {
        let ld = LaurentData {
            z0: 0.5,
            order: 2,
            a2: 1.0,
            a1: 2.0,
            finite_part: 3.0,
            err: LaurentErrors {
                a2: 0.0,
                a1: 0.0,
                finite_part: 0.0,
            },
        };
        let v = serde_json::to_value(ld).unwrap();
        for key in ["z0", "order", "A2", "A1", "finite_part", "err"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["err"]["A1"], 0.0);
    }
}
