//! Special functions used by the schemes and the manufactured solutions:
//! the Euler Gamma function, the Riemann-Liouville weight
//! `ω_θ(t) = t^{θ-1} / Γ(θ)`, and the two-parameter Mittag-Leffler function
//! `E_{α,β}(z) = Σ_k z^k / Γ(αk + β)` for real arguments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

/// Euler-Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS_COEFFS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (z + (i + 1) as f64))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for real `x` away from the poles at 0, -1, -2, ...
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma", "argument is NaN"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        // Exact for the factorials that fit in a double.
        return (1..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so that t^{z+1/2} e^{-t} does not overflow early.
    let half_pow = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_pow * (half_pow * (-t).exp()) * lanczos_sum(z)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("ln_gamma", format!("x = {x} must be positive")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(1 + x) / x
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// `ω_θ(t) = t^{θ-1} / Γ(θ)`, the Riemann-Liouville kernel.
pub fn omega(theta: f64, t: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::domain("omega", format!("theta = {theta} must be positive")));
    }
    if !(t > 0.0) {
        return Err(Error::domain("omega", format!("t = {t} must be positive")));
    }
    Ok(t.powf(theta - 1.0) / gamma_unchecked(theta))
}

/// Parameters `(α, β)` of the Mittag-Leffler function `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    alpha: f64,
    beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain("mittag_leffler", format!("alpha = {alpha} must be positive")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain("mittag_leffler", format!("beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }

    /// The one-parameter function `E_α = E_{α,1}`.
    pub fn one(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Largest `z^{1/α}` accepted for positive arguments. Beyond it
/// `E_{α,β}(z) ~ exp(z^{1/α}) / α` overflows a double.
pub const ML_GROWTH_LIMIT: f64 = 700.0;

const SERIES_MAX_TERMS: usize = 200_000;

// Accept the series for negative arguments only while the cancellation
// error bound `eps * Σ|terms|` stays below this value.
const SERIES_CANCELLATION_LIMIT: f64 = 2e-13;

/// `E_{α,β}(z)` for real `z`.
///
/// Nonnegative arguments (and well-conditioned negative ones) are summed as a
/// compensated power series with adaptive truncation. Negative arguments with
/// `α < 1` whose series would cancel catastrophically are evaluated from the
/// contour-integral representation
/// `E = ∫_1^∞ K(χ) dχ + ∫_{-απ}^{απ} P(φ) dφ` on the contour of radius 1.
pub fn mittag_leffler(p: MLParams, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain("mittag_leffler", format!("z = {z} is not finite")));
    }
    if z == 0.0 {
        return Ok(1.0 / gamma_unchecked(p.beta));
    }
    if z > 0.0 && z.powf(1.0 / p.alpha) > ML_GROWTH_LIMIT {
        return Err(Error::Overflow {
            function: "mittag_leffler",
            detail: format!("z^(1/alpha) = {:e} exceeds {ML_GROWTH_LIMIT}", z.powf(1.0 / p.alpha)),
        });
    }
    let series = ml_series(p, z)?;
    if z > 0.0 || series.abs_sum * f64::EPSILON <= SERIES_CANCELLATION_LIMIT {
        return Ok(series.sum);
    }
    if p.alpha < 1.0 {
        return ml_contour(p, z);
    }
    Err(Error::NonConvergence {
        function: "mittag_leffler",
        detail: format!(
            "series cancellation bound {:e} for alpha = {}, z = {z}",
            series.abs_sum * f64::EPSILON,
            p.alpha
        ),
    })
}

struct SeriesValue {
    sum: f64,
    abs_sum: f64,
}

fn ml_term(p: MLParams, z: f64, k: usize) -> f64 {
    let arg = p.alpha * k as f64 + p.beta;
    if arg < 170.0 {
        let pow = z.powi(k as i32);
        if pow.is_finite() {
            return pow / gamma_unchecked(arg);
        }
    }
    let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    // arg > 0 here, so ln_gamma cannot fail.
    let ln_g = ln_gamma(arg).unwrap_or(f64::INFINITY);
    sign * (k as f64 * z.abs().ln() - ln_g).exp()
}

fn ml_series(p: MLParams, z: f64) -> Result<SeriesValue> {
    // Terms grow while αk + β is below roughly |z|^{1/α}; only test for
    // truncation once past that point.
    let peak = (z.abs().powf(1.0 / p.alpha) / p.alpha).ceil() as usize + 2;
    let (mut sum, mut comp, mut abs_sum) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut small_run = 0;
    for k in 0..SERIES_MAX_TERMS {
        let term = ml_term(p, z, k);
        // Neumaier compensated summation.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();
        if k >= peak && term.abs() <= 1e-18 * abs_sum.max(1e-300) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesValue {
                    sum: sum + comp,
                    abs_sum,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        function: "mittag_leffler",
        detail: format!("series did not converge in {SERIES_MAX_TERMS} terms"),
    })
}

fn ml_contour(p: MLParams, z: f64) -> Result<f64> {
    let (alpha, beta) = (p.alpha, p.beta);
    let s1 = (PI * (1.0 - beta)).sin();
    let s2 = (PI * (1.0 - beta + alpha)).sin();
    let c = (alpha * PI).cos();
    // Ray part, substituted w = χ^{1/α} so the weight becomes e^{-w}.
    let ray = |w: f64| {
        let chi = w.powf(alpha);
        w.powf(alpha - beta) * (-w).exp() * (chi * s1 - z * s2) / (chi * chi - 2.0 * chi * z * c + z * z)
    };
    let ray_value = quad::integrate(ray, 1.0, 60.0, 1e-15, 1e-15)? / PI;

    // Arc part on |ζ| = 1; its real part is even in φ.
    let expo = 1.0 + (1.0 - beta) / alpha;
    let arc = |phi: f64| {
        let w = (phi / alpha).sin() + phi * expo;
        let num = Complex64::from_polar((phi / alpha).cos().exp(), w);
        let den = Complex64::from_polar(1.0, phi) - z;
        (num / den).re
    };
    let arc_value = 2.0 * quad::integrate(arc, 0.0, alpha * PI, 1e-15, 1e-15)? / (2.0 * alpha * PI);
    Ok(ray_value + arc_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5).unwrap() - sqrt_pi).abs() / sqrt_pi < 1e-14);
        // Γ(1.5) = √π / 2
        assert!((gamma(1.5).unwrap() - 0.5 * sqrt_pi).abs() < 1e-15);
        // Γ(-0.5) = -2√π
        assert!((gamma(-0.5).unwrap() + 2.0 * sqrt_pi).abs() < 1e-14);
    }

    #[test]
    fn gamma_poles() {
        assert_eq!(gamma(0.0), Err(Error::Pole(0.0)));
        assert_eq!(gamma(-3.0), Err(Error::Pole(-3.0)));
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.01, 0.3, 1.7, 9.5, 33.3, 120.0] {
            let direct = gamma(x).unwrap().ln();
            assert!((ln_gamma(x).unwrap() - direct).abs() < 1e-12 * direct.abs().max(1.0), "x = {x}");
        }
        assert!(ln_gamma(0.0).is_err());
    }

    #[test]
    fn omega_values() {
        for &t in &[0.1, 1.0, 7.3] {
            assert_eq!(omega(1.0, t).unwrap(), 1.0);
        }
        assert!(close(omega(2.0, 3.0).unwrap(), 3.0, 1e-15));
        assert!(close(omega(0.5, 1.0).unwrap(), 0.564_189_583_547_756_3, 1e-15));
        assert!(omega(0.5, 0.0).is_err());
        assert!(omega(0.0, 1.0).is_err());
        assert!(omega(-1.0, 1.0).is_err());
    }

    #[test]
    fn ml_trivial_values() {
        let p = MLParams::new(1.0, 1.0).unwrap();
        assert!(close(mittag_leffler(p, 1.0).unwrap(), std::f64::consts::E, 1e-15));
        for &(a, b) in &[(0.3, 0.7), (1.0, 2.0), (0.05, 1.3)] {
            let p = MLParams::new(a, b).unwrap();
            assert_eq!(mittag_leffler(p, 0.0).unwrap(), 1.0 / gamma(b).unwrap());
        }
    }

    #[test]
    fn ml_params_validation() {
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(0.5, -1.0).is_err());
        assert!(MLParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ml_overflow_is_reported() {
        let p = MLParams::new(0.05, 1.0).unwrap();
        assert!(matches!(mittag_leffler(p, 5.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn ml_contour_agrees_with_series_where_both_are_accurate() {
        for &(a, b) in &[(0.6, 1.0), (0.8, 0.55), (0.9, 1.5), (0.7, 1.95), (0.35, 0.2)] {
            let p = MLParams::new(a, b).unwrap();
            for &z in &[-0.4, -1.0, -2.5] {
                let s = ml_series(p, z).unwrap();
                if s.abs_sum * f64::EPSILON > 1e-14 {
                    continue;
                }
                let c = ml_contour(p, z).unwrap();
                assert!(close(s.sum, c, 1e-12), "a={a} b={b} z={z}: {} vs {c}", s.sum);
            }
        }
    }
}
