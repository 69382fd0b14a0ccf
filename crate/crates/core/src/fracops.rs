//! Discrete time operators shared by the 1D and 2D schemes.
//!
//! * Grünwald-Letnikov weights `ρ_m = (-1)^m C(ν, m)` and the discrete Caputo
//!   sum `σ^{-ν} Σ_{m=0}^{n} (u^{n-m} - u^0) ρ_m`.
//! * Richardson combination of a step-σ and a step-σ/2 result.
//! * Per-interval memory-kernel integrals `K_{m,j} = ∫_{σ_m}^{σ_{m+1}} 𝒦(σ_{j+1} - s) ds`
//!   and the trapezoid memory sum built from them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma;

/// Grünwald-Letnikov weights `ρ_0..ρ_M` for one fractional order.
#[derive(Debug, Clone, PartialEq)]
pub struct GLWeightTable {
    nu: f64,
    weights: Vec<f64>,
}

impl GLWeightTable {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest index `M` covered by the table.
    pub fn horizon(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Weights from the recurrence `ρ_0 = 1`, `ρ_m = ρ_{m-1} (1 - (ν + 1)/m)`.
pub fn gl_weights(nu: f64, horizon: usize) -> Result<GLWeightTable> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain("gl_weights", format!("nu = {nu} outside (0, 1]")));
    }
    let mut weights = Vec::with_capacity(horizon + 1);
    weights.push(1.0);
    for m in 1..=horizon {
        let prev = weights[m - 1];
        weights.push(prev * (1.0 - (nu + 1.0) / m as f64));
    }
    Ok(GLWeightTable { nu, weights })
}

/// Values of the solution at one node on the time levels `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeHistory {
    values: Vec<f64>,
}

impl NodeHistory {
    pub fn new(u0: f64) -> Self {
        Self { values: vec![u0] }
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::LengthMismatch {
                context: "NodeHistory",
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { values })
    }

    pub fn push(&mut self, value: f64) {
        self.values.push(value);
    }

    pub fn u0(&self) -> f64 {
        self.values[0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the newest level.
    pub fn level(&self) -> usize {
        self.values.len() - 1
    }
}

/// `σ^{-ν} Σ_{m=0}^{n} (u^{n-m} - u^0) ρ_m` at the newest level `n` of `history`.
pub fn discrete_caputo(history: &NodeHistory, weights: &GLWeightTable, sigma: f64) -> Result<f64> {
    let n = history.level();
    if weights.horizon() < n {
        return Err(Error::LengthMismatch {
            context: "discrete_caputo weights",
            expected: n + 1,
            got: weights.weights.len(),
        });
    }
    if !(sigma > 0.0) {
        return Err(Error::domain("discrete_caputo", format!("sigma = {sigma} must be positive")));
    }
    let u0 = history.u0();
    let sum: f64 = history
        .values
        .iter()
        .rev()
        .zip(&weights.weights)
        .map(|(u, rho)| (u - u0) * rho)
        .sum();
    Ok(sigma.powf(-weights.nu) * sum)
}

/// Richardson combination `(2^p · fine - coarse) / (2^p - 1)` of a step-σ
/// value and a step-σ/2 value with leading error `O(σ^p)`.
pub fn richardson_combine(coarse: f64, fine: f64, order: u32) -> f64 {
    let factor = 2f64.powi(order as i32);
    (factor * fine - coarse) / (factor - 1.0)
}

/// Memory kernel `𝒦(t)` of the convolution term.
#[derive(Clone)]
pub enum MemoryKernel {
    /// `𝒦 ≡ 0`.
    Zero,
    /// `coeff · t^{-exponent}`; integrable at the origin for `exponent < 1`.
    PowerLaw { coeff: f64, exponent: f64 },
    /// `scale · ω_θ(t)`.
    Omega { scale: f64, theta: f64 },
    /// Arbitrary callable; integrals fall back to adaptive quadrature.
    Custom {
        label: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        integrable: bool,
    },
}

impl fmt::Debug for MemoryKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryKernel::Zero => write!(f, "Zero"),
            MemoryKernel::PowerLaw { coeff, exponent } => {
                write!(f, "PowerLaw({coeff} * t^-{exponent})")
            }
            MemoryKernel::Omega { scale, theta } => write!(f, "Omega({scale} * omega_{theta})"),
            MemoryKernel::Custom { label, integrable, .. } => {
                write!(f, "Custom({label}, integrable = {integrable})")
            }
        }
    }
}

const QUAD_ABS_TOL: f64 = 1e-12;

impl MemoryKernel {
    pub fn constant(c: f64) -> Self {
        MemoryKernel::PowerLaw {
            coeff: c,
            exponent: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MemoryKernel::Zero => true,
            MemoryKernel::PowerLaw { coeff, .. } => *coeff == 0.0,
            MemoryKernel::Omega { scale, .. } => *scale == 0.0,
            MemoryKernel::Custom { .. } => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MemoryKernel::PowerLaw { exponent, .. } if *exponent >= 1.0 => {
                Err(Error::NonIntegrableKernel { exponent: *exponent })
            }
            MemoryKernel::Omega { theta, .. } if !(*theta > 0.0) => {
                Err(Error::NonIntegrableKernel { exponent: 1.0 - theta })
            }
            MemoryKernel::Custom { integrable: false, .. } => Err(Error::NonIntegrableKernel { exponent: 1.0 }),
            _ => Ok(()),
        }
    }

    /// `𝒦(t)` for `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            MemoryKernel::Zero => 0.0,
            MemoryKernel::PowerLaw { coeff, exponent } => coeff * t.powf(-exponent),
            MemoryKernel::Omega { scale, theta } => scale * t.powf(theta - 1.0) / gamma(*theta).unwrap_or(f64::NAN),
            MemoryKernel::Custom { f, .. } => f(t),
        }
    }

    /// `∫_a^b 𝒦(s) ds` for `0 <= a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.validate()?;
        // c ∫_a^b s^{q-1} ds = (c/q) (b^q - a^q), evaluated without cancellation.
        let power_increment = |c: f64, q: f64| -> f64 {
            if a == 0.0 {
                c * b.powf(q) / q
            } else {
                c * a.powf(q) * (q * ((b - a) / a).ln_1p()).exp_m1() / q
            }
        };
        match self {
            MemoryKernel::Zero => Ok(0.0),
            MemoryKernel::PowerLaw { coeff, exponent } => Ok(power_increment(*coeff, 1.0 - exponent)),
            MemoryKernel::Omega { scale, theta } => Ok(power_increment(scale / gamma(*theta)?, *theta)),
            MemoryKernel::Custom { f, .. } => quad::integrate(|s| f(s), a, b, QUAD_ABS_TOL, 0.0),
        }
    }

    /// `κ_i = ∫_{iσ}^{(i+1)σ} 𝒦(s) ds` for `i = 0..count`, so that
    /// `K_{m,j} = κ_{j-m}`.
    pub fn increments(&self, sigma: f64, count: usize) -> Result<Vec<f64>> {
        if !(sigma > 0.0) {
            return Err(Error::domain("kernel_quadrature", format!("sigma = {sigma} must be positive")));
        }
        self.validate()?;
        if let MemoryKernel::Zero = self {
            return Ok(vec![0.0; count]);
        }
        (0..count)
            .map(|i| self.integral(i as f64 * sigma, (i + 1) as f64 * sigma))
            .collect()
    }
}

/// Kernel integrals `K_{m,j}`, `m = 0..=j`, for one time level `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryQuadrature {
    sigma: f64,
    level: usize,
    weights: Vec<f64>,
}

impl MemoryQuadrature {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Builds level `j` from the shift-invariant increments `κ_0..κ_j`.
    pub fn from_increments(sigma: f64, level: usize, increments: &[f64]) -> Result<Self> {
        if increments.len() <= level {
            return Err(Error::LengthMismatch {
                context: "MemoryQuadrature increments",
                expected: level + 1,
                got: increments.len(),
            });
        }
        let weights = (0..=level).map(|m| increments[level - m]).collect();
        Ok(Self { sigma, level, weights })
    }
}

/// `K_{m,j} = ∫_{σ_m}^{σ_{m+1}} 𝒦(σ_{j+1} - s) ds` for `m = 0..=j`.
pub fn kernel_quadrature(kernel: &MemoryKernel, sigma: f64, level: usize) -> Result<MemoryQuadrature> {
    let increments = kernel.increments(sigma, level + 1)?;
    MemoryQuadrature::from_increments(sigma, level, &increments)
}

/// Trapezoid memory sum `Σ_{m=0}^{j} (b^m v^m + b^{m+1} v^{m+1}) K_{m,j} / 2`.
///
/// `second_diff` holds `v^0..v^{j+1}` (second differences already divided by
/// `h²`) and `coeff` holds `b^0..b^{j+1}`.
pub fn memory_term(second_diff: &[f64], coeff: &[f64], q: &MemoryQuadrature) -> Result<f64> {
    let needed = q.level + 2;
    for (context, len) in [("memory_term v-history", second_diff.len()), ("memory_term b-history", coeff.len())] {
        if len != needed {
            return Err(Error::LengthMismatch {
                context,
                expected: needed,
                got: len,
            });
        }
    }
    Ok(q.weights
        .iter()
        .enumerate()
        .map(|(m, k)| (coeff[m] * second_diff[m] + coeff[m + 1] * second_diff[m + 1]) * k * 0.5)
        .sum())
}
