//! Numeric text formatting shared by the emitters.

/// Full-precision decimal rendering: integers print without a fractional
/// part, other values with 17 significant digits.
pub fn real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.fract() == 0.0 && x.abs() < 1e17 {
        return format!("{}", x as i128);
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=16).contains(&exponent) {
        return format!("{:.16e}", x);
    }
    let decimals = (16 - exponent).max(0) as usize;
    format!("{:.*}", decimals, x)
}
