//! Real-argument special functions needed by the zeta continuation.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) on the real line; reflection below 1/2. Poles return ±∞.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        a += coef / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// 1/Γ(x), exactly zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Modified Bessel function `K_ν(x)` for `x > 0` from
/// `∫₀^∞ e^{-x cosh t} cosh(νt) dt`.
///
/// The integrand is even and analytic, so the trapezoid rule converges
/// geometrically; the step is halved until two refinements agree to
/// `tol/10` relative to `e^{-x}`.
pub fn bessel_k(nu: f64, x: f64, tol: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let nu = nu.abs();
    // scaled integrand e^{-x (cosh t - 1)} cosh(νt); the true value is this times e^{-x}
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    let cutoff = tol * 1e-2;
    let mut upper = 1.0;
    while f(upper) >= cutoff {
        upper *= 1.5;
    }

    let mut n = 16usize;
    let mut h = upper / n as f64;
    let mut sum = 0.5 * (f(0.0) + f(upper)) + (1..n).map(|i| f(i as f64 * h)).sum::<f64>();
    let mut estimate = sum * h;
    loop {
        // add midpoints
        let mids: f64 = (0..n).map(|i| f((i as f64 + 0.5) * h)).sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let done = (refined - estimate).abs() <= 0.1 * tol * refined.abs().max(1.0) || n > 1 << 20;
        estimate = refined;
        if done {
            break;
        }
    }
    estimate * (-x).exp()
}
