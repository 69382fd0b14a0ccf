//! The aggregated kernel `N(t) = ϱ₁ω_{1-ν₁}(t) - ϱ₂ω_{1-ν₂}(t)` and where it
//! changes sign.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::solver1d::fmt_g17;
use crate::special::{gamma, omega};

/// Pointwise coefficients and orders of the two fractional terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub rho1: f64,
    pub rho2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

impl KernelSpec {
    pub fn new(rho1: f64, rho2: f64, nu1: f64, nu2: f64) -> Result<Self> {
        let s = Self { rho1, rho2, nu1, nu2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho1 > 0.0) || !self.rho2.is_finite() || !self.rho1.is_finite() {
            return Err(Error::domain(
                "KernelSpec",
                format!("need rho1 > 0 and finite rho2, got rho1 = {}, rho2 = {}", self.rho1, self.rho2),
            ));
        }
        if !(self.nu2 > 0.0 && self.nu2 < self.nu1 && self.nu1 <= 1.0) {
            return Err(Error::domain(
                "KernelSpec",
                format!("need 0 < nu2 < nu1 <= 1, got nu1 = {}, nu2 = {}", self.nu1, self.nu2),
            ));
        }
        Ok(())
    }
}

/// `N(t)` for `t > 0`.
///
/// At `ν₁ = 1` the first term is a point mass at the origin (the derivative
/// term is local), so only `-ϱ₂ω_{1-ν₂}(t)` remains.
pub fn kernel_n(spec: &KernelSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    if !(t > 0.0) {
        return Err(Error::domain("kernel_n", format!("t must be positive, got {t}")));
    }
    let second = spec.rho2 * omega(1.0 - spec.nu2, t)?;
    if spec.nu1 == 1.0 {
        return Ok(-second);
    }
    Ok(spec.rho1 * omega(1.0 - spec.nu1, t)? - second)
}

/// The unique zero `t*` of `N`: positive before it, negative after.
///
/// `None` when `ϱ₂ ≤ 0` (no sign change) or `ν₁ = 1` (negative for every
/// `t > 0`).
pub fn sign_change_time(spec: &KernelSpec) -> Result<Option<f64>> {
    spec.validate()?;
    if spec.rho2 <= 0.0 || spec.nu1 == 1.0 {
        return Ok(None);
    }
    let ratio = spec.rho1 * gamma(1.0 - spec.nu2)? / (spec.rho2 * gamma(1.0 - spec.nu1)?);
    Ok(Some(ratio.powf(1.0 / (spec.nu1 - spec.nu2))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Sample,
    SignChange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub n: f64,
    pub kind: RowKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    pub spec: KernelSpec,
    pub final_time: f64,
    pub sign_change: Option<f64>,
    /// Uniform samples and, when it falls in `(0, T]`, the `t*` row, in
    /// increasing `t`.
    pub rows: Vec<ProfileRow>,
}

impl KernelProfile {
    pub fn samples(&self) -> impl Iterator<Item = &ProfileRow> {
        self.rows.iter().filter(|r| r.kind == RowKind::Sample)
    }

    /// Columns `t,N,kind`; `kind` is `sample` or `sign_change`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,N,kind")?;
        for r in &self.rows {
            let kind = match r.kind {
                RowKind::Sample => "sample",
                RowKind::SignChange => "sign_change",
            };
            writeln!(out, "{},{},{kind}", fmt_g17(r.t), fmt_g17(r.n))?;
        }
        Ok(())
    }
}

/// `N` at `t_i = iT/samples`, `i = 1..=samples`.
pub fn kernel_profile(spec: &KernelSpec, final_time: f64, samples: usize) -> Result<KernelProfile> {
    if samples < 2 {
        return Err(Error::domain("kernel_profile", format!("need at least 2 samples, got {samples}")));
    }
    if !(final_time > 0.0 && final_time.is_finite()) {
        return Err(Error::domain("kernel_profile", format!("final time must be positive, got {final_time}")));
    }
    let mut rows = Vec::with_capacity(samples + 1);
    for i in 1..=samples {
        let t = if i == samples {
            final_time
        } else {
            final_time * i as f64 / samples as f64
        };
        rows.push(ProfileRow {
            t,
            n: kernel_n(spec, t)?,
            kind: RowKind::Sample,
        });
    }
    let sign_change = sign_change_time(spec)?;
    if let Some(ts) = sign_change.filter(|&ts| ts <= final_time) {
        let at = rows.partition_point(|r| r.t < ts);
        rows.insert(
            at,
            ProfileRow {
                t: ts,
                n: kernel_n(spec, ts)?,
                kind: RowKind::SignChange,
            },
        );
    }
    Ok(KernelProfile {
        spec: *spec,
        final_time,
        sign_change,
        rows,
    })
}
