//! Manufactured-solution catalog, the max-norm error ℷ, and refinement
//! studies.
//!
//! Every case carries a closed-form exact solution and the matching forcing.
//! [`forcing_residual`] substitutes the exact solution into the continuous
//! operator numerically (finite differences in space, quadrature for the
//! fractional and memory terms) so that a mistyped forcing shows up as a
//! residual instead of a silently wrong error table.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::coeff::{Fn1, Fn2, Fn3};
use crate::error::{Error, Result};
use crate::fracops::MemoryKernel;
use crate::quad;
use crate::solver1d::{self, Grid1D, Problem1D, RobinBc};
use crate::solver2d::{self, Grid2D, Problem2D, XBoundary};
use crate::special::{gamma, mittag_leffler, MLParams};

/// Which tabulated example a case belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleId {
    /// Example 1 with `ϱ₂ = 1 + (t+1)(x+0.01)`, `ν₂ = ν₁/2`.
    Ex1i,
    /// Example 1 with `ϱ₂ = (x - 1/2)³`, `ν₂ = ν₁/3`.
    Ex1ii,
    /// Example 1 with constant `ϱ₂` (sign-changing aggregated kernel).
    Ex1Ext { rho2: f64, final_time: f64 },
    Ex2,
    Ex3,
    /// Two-dimensional example.
    Ex4,
}

impl ExampleId {
    /// Parses `ex1i`, `ex1ii`, `ex2`, `ex3`, `ex4`; the extension needs
    /// its `ϱ₂` and `T` and is built with [`ExampleId::Ex1Ext`] directly.
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex1i" | "ex1" => Some(ExampleId::Ex1i),
            "ex1ii" => Some(ExampleId::Ex1ii),
            "ex2" => Some(ExampleId::Ex2),
            "ex3" => Some(ExampleId::Ex3),
            "ex4" => Some(ExampleId::Ex4),
            _ => None,
        }
    }

    /// `ν₂ = ν₁/3` for option (ii) of Example 1, `ν₁/2` everywhere else.
    pub fn nu2_divisor(&self) -> f64 {
        match self {
            ExampleId::Ex1ii => 3.0,
            _ => 2.0,
        }
    }

    pub fn is_2d(&self) -> bool {
        matches!(self, ExampleId::Ex4)
    }

    pub fn final_time(&self) -> f64 {
        match self {
            ExampleId::Ex1i | ExampleId::Ex1ii => 0.1,
            ExampleId::Ex1Ext { final_time, .. } => *final_time,
            ExampleId::Ex2 | ExampleId::Ex3 | ExampleId::Ex4 => 1.0,
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::Ex1i => write!(f, "ex1i"),
            ExampleId::Ex1ii => write!(f, "ex1ii"),
            ExampleId::Ex1Ext { rho2, final_time } => write!(f, "ex1ext(rho2={rho2},T={final_time})"),
            ExampleId::Ex2 => write!(f, "ex2"),
            ExampleId::Ex3 => write!(f, "ex3"),
            ExampleId::Ex4 => write!(f, "ex4"),
        }
    }
}

/// One catalog entry: the example, its orders, and every closure needed to
/// build the problem and measure the error.
#[derive(Clone)]
pub struct ExampleCase {
    pub id: ExampleId,
    pub nu1: f64,
    pub nu2: f64,
    exact: Fn3,
    forcing: Fn3,
}

impl fmt::Debug for ExampleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExampleCase")
            .field("id", &self.id)
            .field("nu1", &self.nu1)
            .field("nu2", &self.nu2)
            .finish_non_exhaustive()
    }
}

fn g(x: f64) -> f64 {
    gamma(x).expect("gamma argument away from poles")
}

fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
    let p = MLParams::new(alpha, beta).expect("valid Mittag-Leffler parameters");
    mittag_leffler(p, z).expect("Mittag-Leffler evaluation on [0, 1]")
}

impl ExampleCase {
    /// Case with the tabulated `ν₂` rule for `id`.
    pub fn new(id: ExampleId, nu1: f64) -> Result<Self> {
        Self::with_orders(id, nu1, nu1 / id.nu2_divisor())
    }

    pub fn with_orders(id: ExampleId, nu1: f64, nu2: f64) -> Result<Self> {
        solver1d::validate_orders(nu1, nu2)?;
        let (exact, forcing) = match id {
            ExampleId::Ex1i => ex1_closures(nu1, nu2, Arc::new(|x, t| 1.0 + (t + 1.0) * (x + 0.01))),
            ExampleId::Ex1ii => ex1_closures(nu1, nu2, Arc::new(|x, _| (x - 0.5).powi(3))),
            ExampleId::Ex1Ext { rho2, .. } => ex1_closures(nu1, nu2, Arc::new(move |_, _| rho2)),
            ExampleId::Ex2 => ex2_closures(nu1, nu2),
            ExampleId::Ex3 => {
                if nu1 >= 1.0 {
                    return Err(Error::InvalidProblem("example 3 needs nu1 < 1".into()));
                }
                ex3_closures(nu1, nu2)
            }
            ExampleId::Ex4 => ex4_closures(nu1, nu2),
        };
        Ok(Self {
            id,
            nu1,
            nu2,
            exact,
            forcing,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.id.final_time()
    }

    /// Exact solution; `y` is ignored by the one-dimensional examples.
    pub fn exact(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.exact)(x, y, t)
    }

    /// Printed forcing `f`; `y` is ignored by the one-dimensional examples.
    pub fn forcing(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.forcing)(x, y, t)
    }

    fn rho2_1d(&self) -> Fn2 {
        match self.id {
            ExampleId::Ex1i => Arc::new(|x, t| 1.0 + (t + 1.0) * (x + 0.01)),
            ExampleId::Ex1ii => Arc::new(|x, _| (x - 0.5).powi(3)),
            ExampleId::Ex1Ext { rho2, .. } => Arc::new(move |_, _| rho2),
            ExampleId::Ex2 => Arc::new(|x, t| t * (2.0 * PI * x).sin()),
            ExampleId::Ex3 => Arc::new(|x, t| t * (2.0 * PI * x).cos()),
            ExampleId::Ex4 => Arc::new(|_, _| 0.0),
        }
    }

    /// Problem data of a one-dimensional case.
    pub fn problem1d(&self) -> Result<Problem1D> {
        let forcing = self.forcing.clone();
        let f: Fn2 = Arc::new(move |x, t| forcing(x, 0.0, t));
        let rho2 = self.rho2_1d();
        let zero: Fn1 = Arc::new(|_| 0.0);
        let nu1 = self.nu1;
        let p = match self.id {
            ExampleId::Ex1i | ExampleId::Ex1ii | ExampleId::Ex1Ext { .. } => Problem1D {
                nu1,
                nu2: self.nu2,
                rho1: Arc::new(|x| 1.0 + x * x),
                rho2,
                a: Arc::new(|x, t| (PI * x / 4.0).cos() + t),
                d: Arc::new(|x, t| x + t),
                b: Arc::new(|x, t| t.cbrt() + (PI * x).sin()),
                kernel: MemoryKernel::PowerLaw {
                    coeff: 1.0,
                    exponent: 1.0 / 3.0,
                },
                f,
                u0: Arc::new(|x| (PI * x).cos()),
                left: RobinBc::neumann(zero.clone()),
                right: RobinBc::neumann(zero),
                length: 1.0,
                final_time: self.final_time(),
            },
            ExampleId::Ex2 => Problem1D {
                nu1,
                nu2: self.nu2,
                rho1: Arc::new(|x| 1.0 + x),
                rho2,
                a: Arc::new(|_, _| 1.0),
                d: Arc::new(|_, _| 0.0),
                b: Arc::new(|_, _| 1.0),
                kernel: MemoryKernel::Omega {
                    scale: 1.0,
                    theta: 1.0 - nu1,
                },
                f,
                u0: Arc::new(|x| (PI * x).cos()),
                left: RobinBc::neumann(zero.clone()),
                right: RobinBc::neumann(zero),
                length: 1.0,
                final_time: 1.0,
            },
            ExampleId::Ex3 => Problem1D {
                nu1,
                nu2: self.nu2,
                rho1: Arc::new(|x| 2.0 + (2.0 * PI * x).sin()),
                rho2,
                a: Arc::new(|x, t| (x + 1.0) * (t + 1.0)),
                d: Arc::new(|x, t| x * t.sin()),
                b: Arc::new(|_, _| 0.0),
                kernel: MemoryKernel::Zero,
                f,
                u0: Arc::new(|x| 2.0 * x - x * x),
                left: RobinBc::new(1.0, -2.0, Arc::new(move |t| 2.0 * ml(nu1, 1.0, t.powf(nu1)))),
                right: RobinBc::neumann(zero),
                length: 1.0,
                final_time: 1.0,
            },
            ExampleId::Ex4 => {
                return Err(Error::InvalidProblem("example 4 is two-dimensional".into()));
            }
        };
        Ok(p)
    }

    /// Problem data of the two-dimensional case.
    pub fn problem2d(&self) -> Result<Problem2D> {
        if self.id != ExampleId::Ex4 {
            return Err(Error::InvalidProblem(format!("{} is one-dimensional", self.id)));
        }
        let nu1 = self.nu1;
        Ok(Problem2D {
            nu1,
            nu2: self.nu2,
            rho1: Arc::new(|x, y| 1.0 + x * x + y * y),
            rho2: Arc::new(|x, y, t| 1.0 + (t + 1.0) * (x + y + 0.01)),
            a1: Arc::new(|x, y, t| ex4_diffusion(x, y) + t),
            a2: Arc::new(|x, y, t| 2.0 * ex4_diffusion(x, y) + 2.0 * t),
            d1: Arc::new(|x, y, t| x + y + t),
            d2: Arc::new(|x, y, t| x + y - t),
            b1: Arc::new(|x, y, _| x + y + 1.0),
            b2: Arc::new(|x, y, _| 3.0 - x - y),
            kernel: MemoryKernel::Omega {
                scale: 1.0,
                theta: 1.0 - nu1,
            },
            f: self.forcing.clone(),
            u0: Arc::new(|x, y| (PI * x).sin() * (PI * y).cos()),
            x_boundary: XBoundary::Dirichlet,
            lx: 1.0,
            ly: 1.0,
            final_time: 1.0,
        })
    }
}

/// Spatial factor `cos(πx/4)·cos(πy/4)` of the Example 4 diffusion
/// coefficients `a¹ = c + t`, `a² = 2c + 2t`.
///
/// The forcing below is derived with this product. A variant with
/// `cos(πx/4) + cos(πy/4)` in the forcing does not satisfy the equation
/// for the stated exact solution.
pub fn ex4_diffusion(x: f64, y: f64) -> f64 {
    (PI * x / 4.0).cos() * (PI * y / 4.0).cos()
}

fn ex1_closures(nu1: f64, nu2: f64, rho2: Fn2) -> (Fn3, Fn3) {
    let g1 = g(1.0 + nu1);
    let g12 = g(1.0 + nu1 - nu2);
    let sin_third = (PI / 3.0).sin();
    let exact: Fn3 = Arc::new(move |x, _, t| (PI * x).cos() + t.powf(nu1) / g1);
    let forcing: Fn3 = Arc::new(move |x, _, t| {
        PI * PI
            * ((PI * x / 4.0).cos() + t + 1.5 * t.powf(2.0 / 3.0) * (PI * x).sin() + t * PI / (3.0 * sin_third))
            * (PI * x).cos()
            - (x + t) * PI * (PI * x).sin()
            - rho2(x, t) * t.powf(nu1 - nu2) / g12
            + 1.0
            + x * x
    });
    (exact, forcing)
}

fn ex2_closures(nu1: f64, nu2: f64) -> (Fn3, Fn3) {
    let g1 = g(1.0 + nu1);
    let g2m = g(2.0 - nu1);
    let g3m = g(3.0 - nu1);
    let g2m2 = g(2.0 - nu2);
    let g12 = g(1.0 + nu1 - nu2);
    let pi2 = PI * PI;
    let exact: Fn3 = Arc::new(move |x, _, t| (1.0 + t + t.powf(nu1)) * (PI * x).cos());
    let forcing: Fn3 = Arc::new(move |x, _, t| {
        (PI * x).cos()
            * ((1.0 + x) * g1
                + pi2 * (1.0 + t.powf(nu1))
                + pi2 * t * (1.0 + g1)
                + (1.0 + x + pi2) / g2m * t.powf(1.0 - nu1)
                + pi2 / g3m * t.powf(2.0 - nu1)
                - (t.powf(2.0 - nu2) / g2m2 + g1 * t.powf(1.0 + nu1 - nu2) / g12) * (2.0 * PI * x).sin())
    });
    (exact, forcing)
}

/// `E_{α,β}(t^α)` memoized on the last `t`; the solvers query every node of
/// a level at the same time.
struct MlInTime {
    alpha: f64,
    beta: f64,
    last: Mutex<(f64, f64)>,
}

impl MlInTime {
    fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            last: Mutex::new((f64::NAN, f64::NAN)),
        }
    }

    fn at(&self, t: f64) -> f64 {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        if last.0 != t {
            *last = (t, ml(self.alpha, self.beta, t.powf(self.alpha)));
        }
        last.1
    }
}

fn ex3_closures(nu1: f64, nu2: f64) -> (Fn3, Fn3) {
    let inv_g = 1.0 / g(1.0 - nu2);
    let e_exact = MlInTime::new(nu1, 1.0);
    let e1 = MlInTime::new(nu1, 1.0);
    let e2 = MlInTime::new(nu1, 1.0 - nu2);
    let exact: Fn3 = Arc::new(move |x, _, t| (2.0 * x - x * x) * e_exact.at(t));
    let forcing: Fn3 = Arc::new(move |x, _, t| {
        e1.at(t)
            * ((2.0 * x - x * x) * (2.0 + (2.0 * PI * x).sin())
                + 2.0 * (x + 1.0) * (t + 1.0)
                + x * (2.0 - 2.0 * x) * t.sin())
            - t.powf(1.0 - nu2) * (2.0 * PI * x).cos() * (2.0 * x - x * x) * (e2.at(t) - inv_g)
    });
    (exact, forcing)
}

fn ex4_closures(nu1: f64, nu2: f64) -> (Fn3, Fn3) {
    let g1 = g(1.0 + nu1);
    let g2m = g(2.0 - nu1);
    let g3m = g(3.0 - nu1);
    let g2m2 = g(2.0 - nu2);
    let g12 = g(1.0 + nu1 - nu2);
    let pi2 = PI * PI;
    let exact: Fn3 = Arc::new(move |x, y, t| (1.0 + t + t.powf(nu1)) * (PI * x).sin() * (PI * y).cos());
    let forcing: Fn3 = Arc::new(move |x, y, t| {
        let growth = 1.0 + t + t.powf(nu1);
        let bracket = (1.0 + x * x + y * y) * (g1 + t.powf(1.0 - nu1) / g2m)
            - (1.0 + (t + 1.0) * (x + y + 0.01)) * (t.powf(1.0 - nu2) / g2m2 + t.powf(nu1 - nu2) * g1 / g12)
            + 3.0 * pi2 * growth * (t + ex4_diffusion(x, y))
            + 4.0 * pi2 * (t * g1 + t.powf(1.0 - nu1) / g2m + t.powf(2.0 - nu1) / g3m);
        bracket * (PI * x).sin() * (PI * y).cos()
            + PI * growth * ((x + y) * (PI * (x + y)).cos() + t * (PI * (x - y)).cos())
    });
    (exact, forcing)
}

/// Grid of a catalog run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseGrid {
    OneD { intervals: usize, levels: usize },
    TwoD { kx: usize, ky: usize, levels: usize },
}

impl CaseGrid {
    /// The grids used for the published tables: `K = 10³, J = 10²` in 1D and
    /// `K_x = K_y = J = 10²` in 2D.
    pub fn default_for(id: ExampleId) -> Self {
        if id.is_2d() {
            CaseGrid::TwoD {
                kx: 100,
                ky: 100,
                levels: 100,
            }
        } else {
            CaseGrid::OneD {
                intervals: 1000,
                levels: 100,
            }
        }
    }

    pub fn levels(&self) -> usize {
        match self {
            CaseGrid::OneD { levels, .. } | CaseGrid::TwoD { levels, .. } => *levels,
        }
    }

    fn refined(&self, axis: Axis) -> Self {
        match (*self, axis) {
            (CaseGrid::OneD { intervals, levels }, Axis::Time) => CaseGrid::OneD {
                intervals,
                levels: 2 * levels,
            },
            (CaseGrid::OneD { intervals, levels }, Axis::Space) => CaseGrid::OneD {
                intervals: 2 * intervals,
                levels,
            },
            (CaseGrid::TwoD { kx, ky, levels }, Axis::Time) => CaseGrid::TwoD {
                kx,
                ky,
                levels: 2 * levels,
            },
            (CaseGrid::TwoD { kx, ky, levels }, Axis::Space) => CaseGrid::TwoD {
                kx: 2 * kx,
                ky: 2 * ky,
                levels,
            },
        }
    }
}

impl fmt::Display for CaseGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseGrid::OneD { intervals, levels } => write!(f, "K={intervals} J={levels}"),
            CaseGrid::TwoD { kx, ky, levels } => write!(f, "Kx={kx} Ky={ky} J={levels}"),
        }
    }
}

/// Outcome of one catalog run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub case: ExampleId,
    pub nu1: f64,
    pub nu2: f64,
    pub grid: CaseGrid,
    pub richardson: bool,
    /// `max |u - u_N|` over every node of every level.
    pub gimel: f64,
    /// Max error on each level `j = 0..=J`.
    pub per_level: Vec<f64>,
    pub seconds: f64,
}

/// Solution of a catalog run on its own grid.
#[derive(Debug, Clone)]
pub enum CaseSolution {
    OneD(solver1d::SolutionHistory),
    TwoD(solver2d::SolutionHistory2D),
}

/// Builds the problem of `case` and solves it on `grid`.
pub fn solve_case(case: &ExampleCase, grid: CaseGrid, richardson: bool) -> Result<CaseSolution> {
    match grid {
        CaseGrid::OneD { intervals, levels } => {
            if case.id.is_2d() {
                return Err(Error::InvalidGrid(format!("{} needs a 2D grid", case.id)));
            }
            let p = case.problem1d()?;
            let g = Grid1D::for_problem(&p, intervals, levels)?;
            Ok(CaseSolution::OneD(solver1d::solve(&p, &g, richardson)?))
        }
        CaseGrid::TwoD { kx, ky, levels } => {
            let p = case.problem2d()?;
            let g = Grid2D::for_problem(&p, kx, ky, levels)?;
            Ok(CaseSolution::TwoD(solver2d::solve_2d(&p, &g, richardson)?))
        }
    }
}

/// Max error against the exact solution on each level.
pub fn level_errors(case: &ExampleCase, solution: &CaseSolution) -> Vec<f64> {
    match solution {
        CaseSolution::OneD(hist) => hist
            .levels()
            .iter()
            .zip(hist.times())
            .map(|(row, &t)| {
                row.iter()
                    .zip(hist.nodes())
                    .fold(0.0_f64, |m, (u, &x)| m.max((u - case.exact(x, 0.0, t)).abs()))
            })
            .collect(),
        CaseSolution::TwoD(hist) => {
            let g = hist.grid();
            (0..=hist.newest())
                .map(|j| {
                    let t = g.t(j);
                    let mut worst = 0.0_f64;
                    for l in 0..=g.ky {
                        for k in 0..=g.kx {
                            let e = (hist.value(j, k, l) - case.exact(g.x(k), g.y(l), t)).abs();
                            worst = worst.max(e);
                        }
                    }
                    worst
                })
                .collect()
        }
    }
}

/// `max` that propagates NaN.
pub fn gimel_of(per_level: &[f64]) -> f64 {
    per_level.iter().fold(0.0_f64, |m, e| if e.is_nan() || m.is_nan() { f64::NAN } else { m.max(*e) })
}

/// Builds the problem, solves it and measures the error against the exact
/// solution on the whole space-time mesh.
pub fn run_case(case: &ExampleCase, grid: CaseGrid, richardson: bool) -> Result<ErrorReport> {
    let started = Instant::now();
    let solution = solve_case(case, grid, richardson)?;
    let per_level = level_errors(case, &solution);
    Ok(ErrorReport {
        case: case.id,
        nu1: case.nu1,
        nu2: case.nu2,
        grid,
        richardson,
        gimel: gimel_of(&per_level),
        per_level,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Refinement direction of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub grid: CaseGrid,
    pub gimel: f64,
    /// `log2(ℷ_prev / ℷ)`, absent on the base row.
    pub order: Option<f64>,
}

/// Runs `refinements` grids, halving the step along `axis` each time.
pub fn convergence_study(
    case: &ExampleCase,
    base: CaseGrid,
    refinements: usize,
    axis: Axis,
    richardson: bool,
) -> Result<Vec<ConvergenceRow>> {
    if refinements < 2 {
        return Err(Error::InvalidGrid(format!(
            "a convergence study needs at least 2 grids, got {refinements}"
        )));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(refinements);
    let mut grid = base;
    for _ in 0..refinements {
        let report = run_case(case, grid, richardson)?;
        let order = rows.last().map(|prev| (prev.gimel / report.gimel).log2());
        rows.push(ConvergenceRow {
            grid,
            gimel: report.gimel,
            order,
        });
        grid = grid.refined(axis);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Numeric residual of the continuous operator.

/// Caputo derivative `D^ν u(t)` of a scalar function, evaluated as the
/// derivative of `(1/Γ(1-ν)) ∫_0^t (t-s)^{-ν} (u(s) - u(0)) ds`.
pub fn numeric_caputo<F: Fn(f64) -> f64>(u: F, nu: f64, t: f64) -> Result<f64> {
    if nu == 1.0 {
        return Ok(central_first(&u, t, 1e-3 * t.min(1.0)));
    }
    let u0 = u(0.0);
    let q = 1.0 - nu;
    // τ = t - s = r^{1/q} absorbs the (t-s)^{-ν} singularity.
    let integral = |tt: f64| -> Result<f64> {
        let upper = tt.powf(q);
        let v = quad::integrate(|r| u(tt - r.powf(1.0 / q)) - u0, 0.0, upper, 1e-11, 1e-11)?;
        Ok(v / q)
    };
    let step = 1e-3 * t;
    let samples = [
        integral(t - 2.0 * step)?,
        integral(t - step)?,
        integral(t + step)?,
        integral(t + 2.0 * step)?,
    ];
    let d = (samples[0] - 8.0 * samples[1] + 8.0 * samples[2] - samples[3]) / (12.0 * step);
    Ok(d / g(q))
}

fn central_first<F: Fn(f64) -> f64>(u: &F, x: f64, h: f64) -> f64 {
    (u(x - 2.0 * h) - 8.0 * u(x - h) + 8.0 * u(x + h) - u(x + 2.0 * h)) / (12.0 * h)
}

fn central_second<F: Fn(f64) -> f64>(u: &F, x: f64, h: f64) -> f64 {
    (-u(x - 2.0 * h) + 16.0 * u(x - h) - 30.0 * u(x) + 16.0 * u(x + h) - u(x + 2.0 * h)) / (12.0 * h * h)
}

/// `∫_0^t 𝒦(t-s) g(s) ds` with the kernel singularity at `s = t` removed by
/// substitution.
fn memory_convolution<F: Fn(f64) -> f64>(kernel: &MemoryKernel, gfun: F, t: f64) -> Result<f64> {
    let (coeff, exponent) = match kernel {
        MemoryKernel::Zero => return Ok(0.0),
        MemoryKernel::PowerLaw { coeff, exponent } => (*coeff, *exponent),
        MemoryKernel::Omega { scale, theta } => (scale / g(*theta), 1.0 - theta),
        MemoryKernel::Custom { f, .. } => {
            return quad::integrate(|s| f(t - s) * gfun(s), 0.0, t, 1e-13, 1e-13);
        }
    };
    let q = 1.0 - exponent;
    let v = quad::integrate(|r| gfun(t - r.powf(1.0 / q)), 0.0, t.powf(q), 1e-11, 1e-11)?;
    Ok(coeff * v / q)
}

const SPACE_STEP: f64 = 1e-3;

/// Continuous operator applied to the exact solution minus the printed
/// forcing at an interior point `(x, y, t)`, `t > 0`.
pub fn forcing_residual(case: &ExampleCase, x: f64, y: f64, t: f64) -> Result<f64> {
    let u = |xx: f64, yy: f64, tt: f64| case.exact(xx, yy, tt);
    let h = SPACE_STEP;
    if case.id.is_2d() {
        let p = case.problem2d()?;
        let d1 = numeric_caputo(|s| u(x, y, s), p.nu1, t)?;
        let d2 = numeric_caputo(|s| u(x, y, s), p.nu2, t)?;
        let uxx = |s: f64| central_second(&|xx| u(xx, y, s), x, h);
        let uyy = |s: f64| central_second(&|yy| u(x, yy, s), y, h);
        let ux = central_first(&|xx| u(xx, y, t), x, h);
        let uy = central_first(&|yy| u(x, yy, t), y, h);
        let mem = memory_convolution(&p.kernel, |s| (p.b1)(x, y, s) * uxx(s) + (p.b2)(x, y, s) * uyy(s), t)?;
        let lhs = (p.rho1)(x, y) * d1 - (p.rho2)(x, y, t) * d2 - (p.a1)(x, y, t) * uxx(t) - (p.a2)(x, y, t) * uyy(t)
            + (p.d1)(x, y, t) * ux
            + (p.d2)(x, y, t) * uy
            - mem;
        Ok(lhs - case.forcing(x, y, t))
    } else {
        let p = case.problem1d()?;
        let d1 = numeric_caputo(|s| u(x, 0.0, s), p.nu1, t)?;
        let d2 = numeric_caputo(|s| u(x, 0.0, s), p.nu2, t)?;
        let uxx = |s: f64| central_second(&|xx| u(xx, 0.0, s), x, h);
        let ux = central_first(&|xx| u(xx, 0.0, t), x, h);
        let mem = memory_convolution(&p.kernel, |s| (p.b)(x, s) * uxx(s), t)?;
        let lhs = (p.rho1)(x) * d1 - (p.rho2)(x, t) * d2 - (p.a)(x, t) * uxx(t) + (p.d)(x, t) * ux - mem;
        Ok(lhs - case.forcing(x, 0.0, t))
    }
}

/// Residual of the boundary conditions of a 1D case at time `t`.
pub fn boundary_residual(case: &ExampleCase, t: f64) -> Result<[f64; 2]> {
    let p = case.problem1d()?;
    let u = |x: f64| case.exact(x, 0.0, t);
    let h = SPACE_STEP;
    let one_sided = |x0: f64, dir: f64| {
        let f = |i: f64| u(x0 + dir * i * h);
        dir * (-25.0 * f(0.0) + 48.0 * f(1.0) - 36.0 * f(2.0) + 16.0 * f(3.0) - 3.0 * f(4.0)) / (12.0 * h)
    };
    let left = p.left.deriv * one_sided(0.0, 1.0) + p.left.value * u(0.0) - (p.left.data)(t);
    let right = p.right.deriv * one_sided(p.length, -1.0) + p.right.value * u(p.length) - (p.right.data)(t);
    Ok([left, right])
}
