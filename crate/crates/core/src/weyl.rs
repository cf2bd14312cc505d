//! From pole data of `ζ(s) = Σ λ_j^{-s}` to the asymptotics of the counting
//! function: a pole of order `p` at `z0` contributes the residue of
//! `ζ(s) λ^s / s`, i.e.
//!
//! ```text
//! p = 1:  N(λ) ~ (A1/z0) λ^{z0}
//! p = 2:  N(λ) ~ (A2/z0) λ^{z0} log λ + (A1/z0 − A2/z0²) λ^{z0}
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::gamma_c;
use crate::spectra::{Family, ProductOperator};
use crate::special::gamma;
use crate::zeta::{family_pole_data, LaurentData, ZetaEvaluator};
use crate::{Error, Module, Result};

/// Huxley's exponent for the divisor problem remainder.
pub const HUXLEY_EXPONENT: f64 = 131.0 / 416.0;

/// `N(λ) ≈ coeff_log λ^{z0} log λ + coeff_plain λ^{z0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylExpansion {
    pub z0: f64,
    pub coeff_log: f64,
    pub coeff_plain: f64,
    /// Exponent of the expected remainder; informational only.
    pub remainder_exponent_hint: f64,
}

impl WeylExpansion {
    pub fn predict(&self, lambda: f64) -> f64 {
        let p = lambda.powf(self.z0);
        self.coeff_log * p * lambda.ln() + self.coeff_plain * p
    }
}

/// Residue of `ζ(s) λ^s / s` at `z0`.
pub fn aramaki_expansion(ld: &LaurentData, z0: f64) -> Result<WeylExpansion> {
    if !(z0 > 0.0) {
        return Err(Error::domain(Module::Weyl, format!("z0 must be positive, got {z0}")));
    }
    if (ld.z0 - z0).abs() > 1e-12 * z0.max(1.0) {
        return Err(Error::domain(
            Module::Weyl,
            format!("Laurent data taken at {} but expansion requested at {z0}", ld.z0),
        ));
    }
    let (coeff_log, coeff_plain) = match ld.order {
        1 => (0.0, ld.a1 / z0),
        2 => (ld.a2 / z0, ld.a1 / z0 - ld.a2 / (z0 * z0)),
        p => {
            return Err(Error::unsupported(
                Module::Weyl,
                format!("pole order {p}; only 1 and 2 are handled"),
            ))
        }
    };
    Ok(WeylExpansion {
        z0,
        coeff_log,
        coeff_plain,
        remainder_exponent_hint: z0 * HUXLEY_EXPONENT,
    })
}

/// `(C1, C1')` for the quadrant model `folded(c) ⊗ folded(c)`, whose count is
/// `4·D_c(√λ)`: `C1 = 2`, `C1' = 8γ_c − 4`.
pub fn equal_order_coefficients(c: f64) -> Result<(f64, f64)> {
    let g = gamma_c(c, 1e-13)?.value;
    Ok((2.0, 8.0 * g - 4.0))
}

/// `(C1, C1')` for `(-Δ+c) ⊗ (-Δ+c)` on the full torus lattice `ℤ²`, where
/// each factor's finite part drops by `c^{-1/2}`.
pub fn torus_equal_order_coefficients(c: f64) -> Result<(f64, f64)> {
    let (c1, c1p) = equal_order_coefficients(c)?;
    Ok((c1, c1p - 4.0 / c.sqrt()))
}

/// Laurent data of `ζ(P₁)ζ(P₂)` at the common pole, assembled from the
/// factors' closed-form residues and finite parts. Only `A2` and `A1` are
/// determined this way; `finite_part` is left at zero with infinite error.
pub fn product_pole_data(op: &ProductOperator, tol: f64) -> Result<LaurentData> {
    if op.pole_order() != 2 {
        return Err(Error::unsupported(
            Module::Weyl,
            "factors grow at different rates; the pole is simple",
        ));
    }
    let a = family_pole_data(&op.left, tol)?;
    let b = family_pole_data(&op.right, tol)?;
    let a1 = a.residue * b.finite_part + b.residue * a.finite_part;
    Ok(LaurentData {
        z0: a.pole,
        order: 2,
        a2: a.residue * b.residue,
        a1,
        finite_part: 0.0,
        err: crate::zeta::LaurentErrors {
            a2: 0.0,
            a1: a.residue * b.error_bound + b.residue * a.error_bound,
            finite_part: f64::INFINITY,
        },
    })
}

/// Coefficient of `λ^{z0}` when one factor grows strictly faster:
/// `C = W₁ · ζ_{P₂}(z0)` with `W₁` the faster factor's leading Weyl
/// coefficient and `z0` its growth exponent.
pub fn unequal_order_coefficient(op: &ProductOperator) -> Result<f64> {
    let (fast, slow) = dominant(op)?;
    let z0 = fast.ratio();
    let partner = ZetaEvaluator::continued(slow.clone());
    if !partner.region().contains(z0) {
        return Err(Error::OutsideRegion {
            module: Module::Weyl,
            s: z0,
            region: partner.region().to_string(),
        });
    }
    Ok(fast.weyl_leading() * partner.eval(z0)?)
}

fn dominant(op: &ProductOperator) -> Result<(&Family, &Family)> {
    let (a, b) = (op.left.ratio(), op.right.ratio());
    if a == b {
        return Err(Error::unsupported(
            Module::Weyl,
            if a == 0.0 {
                "both factors are finite; N(λ) is eventually constant"
            } else {
                "equal growth rates give a double pole; use the Laurent/Aramaki path"
            },
        ));
    }
    Ok(if a > b {
        (&op.left, &op.right)
    } else {
        (&op.right, &op.left)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Residues and finite parts of the factors, then the Aramaki map.
    ClosedFormLaurent,
    /// `W₁ · ζ_{P₂}(z0)`.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylReport {
    pub z0: f64,
    pub coeff_log: f64,
    pub coeff_plain: f64,
    pub method: Method,
}

/// Leading two-term asymptotics of `N(λ)` for a product operator.
pub fn weyl_coefficients(op: &ProductOperator, tol: f64) -> Result<(WeylExpansion, Method)> {
    if op.pole_order() == 2 {
        let ld = product_pole_data(op, tol)?;
        return Ok((aramaki_expansion(&ld, ld.z0)?, Method::ClosedFormLaurent));
    }
    let (fast, slow) = dominant(op)?;
    let z0 = fast.ratio();
    let c = unequal_order_coefficient(op)?;
    Ok((
        WeylExpansion {
            z0,
            coeff_log: 0.0,
            coeff_plain: c,
            remainder_exponent_hint: slow.ratio(),
        },
        Method::Trace,
    ))
}

/// `vol(S^{n−1}) = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Angular trace term for a monomial principal symbol `κ|ξ₁|^{m₁}|ξ₂|^{m₂}`:
/// `vol_M · vol(S^{n₁−1}) · vol(S^{n₂−1}) · κ^{−l} log κ / ((2π)^{n₁+n₂} m₁ m₂)`.
pub fn tr_theta_monomial(
    kappa: f64,
    l: f64,
    m1: f64,
    m2: f64,
    n1: u32,
    n2: u32,
    vol_m: f64,
) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::domain(Module::Weyl, format!("κ must be positive, got {kappa}")));
    }
    if !(l > 0.0 && m1 > 0.0 && m2 > 0.0 && vol_m > 0.0) || n1 == 0 || n2 == 0 {
        return Err(Error::domain(
            Module::Weyl,
            "l, orders, dimensions and volume must be positive",
        ));
    }
    let angular = sphere_volume(n1) * sphere_volume(n2);
    let norm = (2.0 * PI).powi((n1 + n2) as i32) * m1 * m2;
    Ok(vol_m * angular * kappa.powf(-l) * kappa.ln() / norm)
}

/// `m₁ m₂ A2`; only meaningful at a double pole.
pub fn wodzicki_residue(ld: &LaurentData, m1: f64, m2: f64) -> Result<f64> {
    if ld.order != 2 {
        return Err(Error::domain(
            Module::Weyl,
            "the residue is defined through the double-pole coefficient; got a simple pole",
        ));
    }
    Ok(m1 * m2 * ld.a2)
}
