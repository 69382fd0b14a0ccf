//! Run configuration files.
//!
//! A configuration is a TOML document with `[metadata]`, `[problem]`,
//! `[problem.kernel]`, `[problem.left]`, `[problem.right]`, `[grid]` and
//! `[solver]` tables. Coefficients are expression strings (see
//! `fracsub::exprparse`) or plain numbers.

use std::fmt;
use std::sync::Arc;

use fracsub::coeff::{Fn1, Fn2, Fn3};
use fracsub::exprparse::{parse, Bindings, Expr, Var};
use fracsub::fracops::MemoryKernel;
use fracsub::solver1d::{Problem1D, RobinBc};
use fracsub::solver2d::{Problem2D, XBoundary};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprValue {
    Num(f64),
    Text(String),
}

impl fmt::Display for ExprValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprValue::Num(v) => write!(f, "{v}"),
            ExprValue::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSection {
    Zero,
    /// `coeff · t^(-exponent)`
    Power {
        #[serde(default = "one")]
        coeff: ExprValue,
        exponent: ExprValue,
    },
    /// `scale · omega(theta, t)`
    Omega {
        #[serde(default = "one")]
        scale: ExprValue,
        theta: ExprValue,
    },
    /// Any expression in `t`; integrated numerically.
    Expr {
        expr: ExprValue,
        #[serde(default = "yes")]
        integrable: bool,
    },
}

fn one() -> ExprValue {
    ExprValue::Num(1.0)
}

fn yes() -> bool {
    true
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection::Zero
    }
}

/// `deriv · u_x + value · u = data(t)`; the default is homogeneous Neumann.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcSection {
    #[serde(default = "one_f")]
    pub deriv: f64,
    #[serde(default)]
    pub value: f64,
    #[serde(default = "zero_expr")]
    pub data: ExprValue,
}

fn one_f() -> f64 {
    1.0
}

fn zero_expr() -> ExprValue {
    ExprValue::Num(0.0)
}

impl Default for BcSection {
    fn default() -> Self {
        Self {
            deriv: 1.0,
            value: 0.0,
            data: zero_expr(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XBoundarySection {
    /// Dirichlet in `x`, Neumann in `y`.
    Mixed,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default = "one_dim")]
    pub dimension: u8,
    pub nu1: f64,
    pub nu2: f64,
    pub final_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
    pub rho1: ExprValue,
    pub rho2: ExprValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<ExprValue>,
    pub f: ExprValue,
    pub u0: ExprValue,
    /// Optional exact solution; when present the run reports the error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExprValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_boundary: Option<XBoundarySection>,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<BcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<BcSection>,
}

fn one_dim() -> u8 {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "Kx", default, skip_serializing_if = "Option::is_none")]
    pub kx: Option<usize>,
    #[serde(rename = "Ky", default, skip_serializing_if = "Option::is_none")]
    pub ky: Option<usize>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "yes")]
    pub richardson: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            richardson: true,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub metadata: Metadata,
    pub problem: ProblemSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
}

/// Grid resolved against the dimension defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedGrid {
    OneD { intervals: usize, levels: usize },
    TwoD { kx: usize, ky: usize, levels: usize },
}

/// A configured problem with its expressions compiled.
pub enum BuiltProblem {
    OneD(Problem1D),
    TwoD(Problem2D),
}

pub struct Built {
    pub problem: BuiltProblem,
    pub grid: ResolvedGrid,
    pub exact: Option<Fn3>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if !matches!(cfg.problem.dimension, 1 | 2) {
            return Err(CliError::Config(format!(
                "problem.dimension: expected 1 or 2, got {}",
                cfg.problem.dimension
            )));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn name(&self) -> String {
        self.metadata.name.clone().unwrap_or_else(|| "run".into())
    }

    pub fn is_2d(&self) -> bool {
        self.problem.dimension == 2
    }

    pub fn resolved_grid(&self) -> ResolvedGrid {
        let g = &self.grid;
        if self.is_2d() {
            ResolvedGrid::TwoD {
                kx: g.kx.or(g.k).unwrap_or(100),
                ky: g.ky.or(g.k).unwrap_or(100),
                levels: g.j.unwrap_or(100),
            }
        } else {
            ResolvedGrid::OneD {
                intervals: g.k.unwrap_or(1000),
                levels: g.j.unwrap_or(100),
            }
        }
    }

    /// Parses every expression, checks its free variables and builds the
    /// solver problem.
    pub fn build(&self) -> Result<Built, CliError> {
        let p = &self.problem;
        let c = Compiler { nu1: p.nu1, nu2: p.nu2 };
        let grid = self.resolved_grid();
        let kernel = c.kernel(&p.kernel)?;
        let problem = if self.is_2d() {
            let xyt = &[Var::X, Var::Y, Var::T];
            let req = |key: &'static str, v: &Option<ExprValue>| -> Result<Fn3, CliError> {
                let v = v.as_ref().ok_or_else(|| missing(key, 2))?;
                c.fn3(key, v, xyt)
            };
            for (key, v) in [("problem.a", &p.a), ("problem.d", &p.d), ("problem.b", &p.b)] {
                if v.is_some() {
                    return Err(CliError::Config(format!("{key}: not used by a 2D problem (use {key}1 and {key}2)")));
                }
            }
            if p.left.is_some() || p.right.is_some() || p.length.is_some() {
                return Err(CliError::Config(
                    "problem.left/right/length: 2D problems take x_boundary, lx and ly".into(),
                ));
            }
            BuiltProblem::TwoD(Problem2D {
                nu1: p.nu1,
                nu2: p.nu2,
                rho1: c.fn2("problem.rho1", &p.rho1, [Var::X, Var::Y])?,
                rho2: c.fn3("problem.rho2", &p.rho2, xyt)?,
                a1: req("problem.a1", &p.a1)?,
                a2: req("problem.a2", &p.a2)?,
                d1: req("problem.d1", &p.d1)?,
                d2: req("problem.d2", &p.d2)?,
                b1: req("problem.b1", &p.b1)?,
                b2: req("problem.b2", &p.b2)?,
                kernel,
                f: c.fn3("problem.f", &p.f, xyt)?,
                u0: c.fn2("problem.u0", &p.u0, [Var::X, Var::Y])?,
                x_boundary: match p.x_boundary.unwrap_or(XBoundarySection::Mixed) {
                    XBoundarySection::Mixed => XBoundary::Dirichlet,
                    XBoundarySection::Dirichlet => XBoundary::AllDirichlet,
                },
                lx: p.lx.unwrap_or(1.0),
                ly: p.ly.unwrap_or(1.0),
                final_time: p.final_time,
            })
        } else {
            let xt = [Var::X, Var::T];
            let req = |key: &'static str, v: &Option<ExprValue>| -> Result<Fn2, CliError> {
                let v = v.as_ref().ok_or_else(|| missing(key, 1))?;
                c.fn2(key, v, xt)
            };
            for (key, v) in [
                ("problem.a1", &p.a1),
                ("problem.a2", &p.a2),
                ("problem.d1", &p.d1),
                ("problem.d2", &p.d2),
                ("problem.b1", &p.b1),
                ("problem.b2", &p.b2),
            ] {
                if v.is_some() {
                    return Err(CliError::Config(format!("{key}: only used by 2D problems")));
                }
            }
            if p.x_boundary.is_some() || p.lx.is_some() || p.ly.is_some() {
                return Err(CliError::Config(
                    "problem.x_boundary/lx/ly: 1D problems take left, right and length".into(),
                ));
            }
            let bc = |key: &'static str, s: &Option<BcSection>| -> Result<RobinBc, CliError> {
                let s = s.clone().unwrap_or_default();
                Ok(RobinBc::new(s.deriv, s.value, c.fn1(key, &s.data, Var::T)?))
            };
            BuiltProblem::OneD(Problem1D {
                nu1: p.nu1,
                nu2: p.nu2,
                rho1: c.fn1("problem.rho1", &p.rho1, Var::X)?,
                rho2: c.fn2("problem.rho2", &p.rho2, xt)?,
                a: req("problem.a", &p.a)?,
                d: req("problem.d", &p.d)?,
                b: req("problem.b", &p.b)?,
                kernel,
                f: c.fn2("problem.f", &p.f, xt)?,
                u0: c.fn1("problem.u0", &p.u0, Var::X)?,
                left: bc("problem.left.data", &p.left)?,
                right: bc("problem.right.data", &p.right)?,
                length: p.length.unwrap_or(1.0),
                final_time: p.final_time,
            })
        };
        let exact = match &p.exact {
            Some(v) => Some(c.fn3("problem.exact", v, &[Var::X, Var::Y, Var::T])?),
            None => None,
        };
        match &problem {
            BuiltProblem::OneD(q) => q.validate(),
            BuiltProblem::TwoD(q) => q.validate(),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Built { problem, grid, exact })
    }
}

fn missing(key: &str, dim: u8) -> CliError {
    CliError::Config(format!("{key}: required for a {dim}D problem"))
}

struct Compiler {
    nu1: f64,
    nu2: f64,
}

impl Compiler {
    /// Parses `v`, checks that it only uses `allowed` (plus the orders) and
    /// folds the orders in.
    fn expr(&self, key: &str, v: &ExprValue, allowed: &[Var]) -> Result<Arc<Expr>, CliError> {
        let e = match v {
            ExprValue::Num(x) => Expr::Num(*x),
            ExprValue::Text(s) => parse(s).map_err(|e| CliError::Config(format!("{key}: {e}")))?,
        };
        for var in e.variables() {
            if !(allowed.contains(&var) || matches!(var, Var::Nu1 | Var::Nu2)) {
                let names: Vec<&str> = allowed.iter().map(|v| v.name()).collect();
                return Err(CliError::Config(format!(
                    "{key}: variable `{}` not allowed here (allowed: {}, nu1, nu2)",
                    var.name(),
                    names.join(", ")
                )));
            }
        }
        Ok(Arc::new(e.bind(Var::Nu1, self.nu1).bind(Var::Nu2, self.nu2).fold_constants()))
    }

    fn scalar(&self, key: &str, v: &ExprValue) -> Result<f64, CliError> {
        self.expr(key, v, &[])?
            .eval(&Bindings::default())
            .map_err(|e| CliError::Config(format!("{key}: {e}")))
    }

    fn fn1(&self, key: &str, v: &ExprValue, var: Var) -> Result<Fn1, CliError> {
        let e = self.expr(key, v, &[var])?;
        Ok(Arc::new(move |s| {
            let mut b = Bindings::default();
            b.set(var, s);
            e.eval(&b).unwrap_or(f64::NAN)
        }))
    }

    fn fn2(&self, key: &str, v: &ExprValue, vars: [Var; 2]) -> Result<Fn2, CliError> {
        let e = self.expr(key, v, &vars)?;
        Ok(Arc::new(move |p, q| {
            let mut b = Bindings::default();
            b.set(vars[0], p);
            b.set(vars[1], q);
            e.eval(&b).unwrap_or(f64::NAN)
        }))
    }

    fn fn3(&self, key: &str, v: &ExprValue, allowed: &[Var]) -> Result<Fn3, CliError> {
        let e = self.expr(key, v, allowed)?;
        Ok(Arc::new(move |x, y, t| {
            let b = Bindings {
                x: Some(x),
                y: Some(y),
                t: Some(t),
                ..Bindings::default()
            };
            e.eval(&b).unwrap_or(f64::NAN)
        }))
    }

    fn kernel(&self, k: &KernelSection) -> Result<MemoryKernel, CliError> {
        let kernel = match k {
            KernelSection::Zero => MemoryKernel::Zero,
            KernelSection::Power { coeff, exponent } => MemoryKernel::PowerLaw {
                coeff: self.scalar("problem.kernel.coeff", coeff)?,
                exponent: self.scalar("problem.kernel.exponent", exponent)?,
            },
            KernelSection::Omega { scale, theta } => MemoryKernel::Omega {
                scale: self.scalar("problem.kernel.scale", scale)?,
                theta: self.scalar("problem.kernel.theta", theta)?,
            },
            KernelSection::Expr { expr, integrable } => {
                let f = self.fn1("problem.kernel.expr", expr, Var::T)?;
                MemoryKernel::Custom {
                    label: expr.to_string(),
                    f,
                    integrable: *integrable,
                }
            }
        };
        kernel
            .validate()
            .map_err(|e| CliError::Config(format!("problem.kernel: {e}")))?;
        Ok(kernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAT: &str = r#"
[metadata]
name = "heat"

[problem]
nu1 = 0.8
nu2 = "nu1/2"
final_time = 0.5
rho1 = "1 + x^2"
rho2 = 0
a = 1
d = 0
b = 0
f = "0"
u0 = "cos(pi*x)"

[problem.kernel]
kind = "zero"

[grid]
K = 20
J = 10
"#;

    #[test]
    fn parses_and_builds() {
        let err = RunConfig::from_toml(HEAT).unwrap_err();
        assert!(err.to_string().contains("nu2"), "{err}");
        let cfg = RunConfig::from_toml(&HEAT.replace("\"nu1/2\"", "0.4")).unwrap();
        assert_eq!(cfg.name(), "heat");
        let built = cfg.build().unwrap();
        assert_eq!(built.grid, ResolvedGrid::OneD { intervals: 20, levels: 10 });
        match built.problem {
            BuiltProblem::OneD(p) => {
                assert_eq!((p.rho1)(0.5), 1.25);
                assert_eq!((p.u0)(0.0), 1.0);
                assert_eq!(p.left.deriv, 1.0);
            }
            BuiltProblem::TwoD(_) => panic!("expected 1D"),
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml(&HEAT.replace("\"nu1/2\"", "0.4")).unwrap();
        let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn bad_expression_names_key() {
        let text = HEAT.replace("\"nu1/2\"", "0.4").replace("1 + x^2", "1 + x^");
        let err = RunConfig::from_toml(&text).unwrap().build().err().unwrap();
        assert!(err.to_string().starts_with("problem.rho1:"), "{err}");
        let text = HEAT.replace("\"nu1/2\"", "0.4").replace("cos(pi*x)", "cos(pi*t)");
        let err = RunConfig::from_toml(&text).unwrap().build().err().unwrap();
        assert!(err.to_string().contains("problem.u0"), "{err}");
    }

    #[test]
    fn orders_fold_into_kernel() {
        let text = HEAT.replace("\"nu1/2\"", "0.4").replace("kind = \"zero\"", "kind = \"omega\"\ntheta = \"1 - nu1\"");
        let built = RunConfig::from_toml(&text).unwrap().build().unwrap();
        match built.problem {
            BuiltProblem::OneD(p) => match p.kernel {
                MemoryKernel::Omega { scale, theta } => {
                    assert_eq!(scale, 1.0);
                    assert!((theta - 0.2).abs() < 1e-15);
                }
                other => panic!("{other:?}"),
            },
            BuiltProblem::TwoD(_) => panic!("expected 1D"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = HEAT.replace("\"nu1/2\"", "0.4").replace("[grid]", "[grid]\nL = 3");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
