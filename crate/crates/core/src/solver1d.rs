//! Implicit time march for the one-dimensional problem
//!
//! ```text
//! ϱ₁(x) D^{ν₁}u − ϱ₂(x,t) D^{ν₂}u − a u_xx + d u_x − 𝒦 * (b u_xx) = f   in (0, L) × (0, T]
//! u(x, 0) = u₀(x)
//! c₁ u_x(0,t) + c₂ u(0,t) = φ₁(t),   c₃ u_x(L,t) + c₄ u(L,t) = φ₂(t)
//! ```
//!
//! Both Caputo derivatives use Grünwald-Letnikov sums over the whole history,
//! the memory integral uses the trapezoid rule against exact kernel integrals,
//! and Robin/Neumann ends are closed with a fictitious node that is
//! eliminated from the boundary row.

use std::io::{self, Write};

use crate::coeff::{Fn1, Fn2};
use crate::error::{Error, Result};
use crate::fracops::{gl_weights, richardson_combine, GLWeightTable, MemoryKernel};
use crate::linalg::{solve_tridiagonal, TridiagonalSystem};

/// `deriv · u_x + value · u = data(t)` at one end of the interval.
#[derive(Clone)]
pub struct RobinBc {
    pub deriv: f64,
    pub value: f64,
    pub data: Fn1,
}

impl RobinBc {
    pub fn new(deriv: f64, value: f64, data: Fn1) -> Self {
        Self { deriv, value, data }
    }

    pub fn neumann(data: Fn1) -> Self {
        Self::new(1.0, 0.0, data)
    }

    pub fn dirichlet(data: Fn1) -> Self {
        Self::new(0.0, 1.0, data)
    }

    pub fn is_dirichlet(&self) -> bool {
        self.deriv == 0.0
    }

    fn validate(&self, side: &str) -> Result<()> {
        if self.deriv == 0.0 && self.value == 0.0 {
            return Err(Error::InvalidProblem(format!(
                "{side} boundary condition has both coefficients zero"
            )));
        }
        if !self.deriv.is_finite() || !self.value.is_finite() {
            return Err(Error::InvalidProblem(format!("{side} boundary coefficients must be finite")));
        }
        Ok(())
    }
}

/// Data of the one-dimensional problem.
#[derive(Clone)]
pub struct Problem1D {
    pub nu1: f64,
    pub nu2: f64,
    /// `ϱ₁(x)`, bounded below by a positive constant.
    pub rho1: Fn1,
    /// `ϱ₂(x, t)`.
    pub rho2: Fn2,
    /// Diffusion `a(x, t) > 0`.
    pub a: Fn2,
    /// Drift `d(x, t)`.
    pub d: Fn2,
    /// Memory diffusion `b(x, t)`.
    pub b: Fn2,
    pub kernel: MemoryKernel,
    pub f: Fn2,
    pub u0: Fn1,
    pub left: RobinBc,
    pub right: RobinBc,
    pub length: f64,
    pub final_time: f64,
}

pub(crate) fn validate_orders(nu1: f64, nu2: f64) -> Result<()> {
    if !(nu1 > 0.0 && nu1 <= 1.0) {
        return Err(Error::InvalidProblem(format!("nu1 = {nu1} outside (0, 1]")));
    }
    if !(nu2 > 0.0 && nu2 < nu1) {
        return Err(Error::InvalidProblem(format!("nu2 = {nu2} must satisfy 0 < nu2 < nu1 = {nu1}")));
    }
    Ok(())
}

impl Problem1D {
    pub fn validate(&self) -> Result<()> {
        validate_orders(self.nu1, self.nu2)?;
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidProblem(format!("length = {} must be positive", self.length)));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "final time = {} must be positive",
                self.final_time
            )));
        }
        self.left.validate("left")?;
        self.right.validate("right")?;
        self.kernel.validate()
    }
}

/// Uniform space-time lattice `x_k = k h`, `σ_j = j σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub intervals: usize,
    pub levels: usize,
    pub length: f64,
    pub final_time: f64,
}

impl Grid1D {
    pub fn new(length: f64, final_time: f64, intervals: usize, levels: usize) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InvalidGrid(format!("K = {intervals} must be at least 2")));
        }
        if levels < 1 {
            return Err(Error::InvalidGrid("J must be at least 1".into()));
        }
        if !(length > 0.0) || !(final_time > 0.0) {
            return Err(Error::InvalidGrid("domain length and final time must be positive".into()));
        }
        Ok(Self {
            intervals,
            levels,
            length,
            final_time,
        })
    }

    pub fn for_problem(p: &Problem1D, intervals: usize, levels: usize) -> Result<Self> {
        Self::new(p.length, p.final_time, intervals, levels)
    }

    pub fn h(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn sigma(&self) -> f64 {
        self.final_time / self.levels as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        if k == self.intervals {
            self.length
        } else {
            k as f64 * self.h()
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        if j == self.levels {
            self.final_time
        } else {
            j as f64 * self.sigma()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.intervals).map(|k| self.x(k)).collect()
    }

    /// Same spatial mesh with the time step halved.
    pub fn halved_step(&self) -> Self {
        Self {
            levels: 2 * self.levels,
            ..*self
        }
    }
}

/// Values `u^j_k` on every level computed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory {
    nodes: Vec<f64>,
    times: Vec<f64>,
    levels: Vec<Vec<f64>>,
}

impl SolutionHistory {
    /// History holding only level 0, `u₀` sampled at the nodes.
    pub fn initial(p: &Problem1D, g: &Grid1D) -> Self {
        let nodes = g.nodes();
        let first = nodes.iter().map(|&x| (p.u0)(x)).collect();
        Self {
            nodes,
            times: vec![0.0],
            levels: vec![first],
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Index of the newest level.
    pub fn newest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.nodes.len() {
            return Err(Error::LengthMismatch {
                context: "SolutionHistory level",
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        self.times.push(t);
        self.levels.push(values);
        Ok(())
    }

    /// CSV with a header of node coordinates and one row per level; the
    /// first column is the time.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "t")?;
        for x in &self.nodes {
            write!(out, ",{}", fmt_g17(*x))?;
        }
        writeln!(out)?;
        for (t, row) in self.times.iter().zip(&self.levels) {
            write!(out, "{}", fmt_g17(*t))?;
            for v in row {
                write!(out, ",{}", fmt_g17(*v))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Formats with 17 significant digits, no locale.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A violated initial/boundary compatibility relation at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub side: Side,
    pub condition: &'static str,
    /// Signed residual `boundary operator applied to u₀ − φ(0)`.
    pub residual: f64,
}

/// Residuals below this are treated as satisfied.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Checks the zeroth-order compatibility of `u₀` with both boundary
/// conditions at `t = 0`. Only reports; never fails.
pub fn validate_compatibility(p: &Problem1D) -> Vec<Diagnostic> {
    let step = 1e-3 * p.length;
    let u0 = &p.u0;
    // Fourth-order one-sided derivative, staying inside the domain.
    let derivative = |x0: f64, dir: f64| -> f64 {
        let f = |i: f64| u0(x0 + dir * i * step);
        dir * (-25.0 * f(0.0) + 48.0 * f(1.0) - 36.0 * f(2.0) + 16.0 * f(3.0) - 3.0 * f(4.0)) / (12.0 * step)
    };
    let mut out = Vec::new();
    for (side, bc, x0, dir) in [(Side::Left, &p.left, 0.0, 1.0), (Side::Right, &p.right, p.length, -1.0)] {
        let phi0 = (bc.data)(0.0);
        let (condition, residual) = if bc.is_dirichlet() {
            ("dirichlet", bc.value * u0(x0) - phi0)
        } else {
            ("robin", bc.deriv * derivative(x0, dir) + bc.value * u0(x0) - phi0)
        };
        if !(residual.abs() <= COMPATIBILITY_TOL) {
            out.push(Diagnostic {
                side,
                condition,
                residual,
            });
        }
    }
    out
}

pub(crate) fn checked(name: &'static str, x: f64, y: f64, t: f64, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Coefficient { name, x, y, t, value })
    }
}

pub(crate) fn checked_positive(name: &'static str, x: f64, y: f64, t: f64, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Coefficient { name, x, y, t, value })
    }
}

/// Per-solve state: weight tables, kernel increments and the memory
/// integrand `b^m v^m` of every computed level.
pub struct March1D<'a> {
    problem: &'a Problem1D,
    grid: Grid1D,
    rho: GLWeightTable,
    rho_tilde: GLWeightTable,
    rho_partial: Vec<f64>,
    rho_tilde_partial: Vec<f64>,
    kappa: Vec<f64>,
    u0: Vec<f64>,
    rho1: Vec<f64>,
    memory: Vec<Vec<f64>>,
}

fn partial_sums(w: &GLWeightTable) -> Vec<f64> {
    w.weights()
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect()
}

impl<'a> March1D<'a> {
    pub fn new(problem: &'a Problem1D, grid: Grid1D) -> Result<Self> {
        problem.validate()?;
        let rho = gl_weights(problem.nu1, grid.levels)?;
        let rho_tilde = gl_weights(problem.nu2, grid.levels)?;
        let kappa = problem.kernel.increments(grid.sigma(), grid.levels)?;
        let nodes = grid.nodes();
        let u0 = nodes.iter().map(|&x| checked("u0", x, 0.0, 0.0, (problem.u0)(x))).collect::<Result<_>>()?;
        let rho1 = nodes
            .iter()
            .map(|&x| checked_positive("rho1", x, 0.0, 0.0, (problem.rho1)(x)))
            .collect::<Result<_>>()?;
        Ok(Self {
            problem,
            grid,
            rho_partial: partial_sums(&rho),
            rho_tilde_partial: partial_sums(&rho_tilde),
            rho,
            rho_tilde,
            kappa,
            u0,
            rho1,
            memory: Vec::new(),
        })
    }

    fn memory_active(&self) -> bool {
        !self.problem.kernel.is_zero()
    }

    /// Discrete `u_xx` at level time `t`, with boundary values closed through
    /// the fictitious nodes. Entries at Dirichlet ends are zero (unused).
    fn second_difference(&self, u: &[f64], t: f64) -> Vec<f64> {
        let kmax = self.grid.intervals;
        let h = self.grid.h();
        let h2 = h * h;
        let mut v = vec![0.0; kmax + 1];
        for k in 1..kmax {
            v[k] = (u[k - 1] - 2.0 * u[k] + u[k + 1]) / h2;
        }
        let (l, r) = (&self.problem.left, &self.problem.right);
        if !l.is_dirichlet() {
            let ghost = u[1] - 2.0 * h * ((l.data)(t) - l.value * u[0]) / l.deriv;
            v[0] = (ghost - 2.0 * u[0] + u[1]) / h2;
        }
        if !r.is_dirichlet() {
            let ghost = u[kmax - 1] + 2.0 * h * ((r.data)(t) - r.value * u[kmax]) / r.deriv;
            v[kmax] = (u[kmax - 1] - 2.0 * u[kmax] + ghost) / h2;
        }
        v
    }

    fn memory_integrand(&self, u: &[f64], j: usize) -> Result<Vec<f64>> {
        let t = self.grid.t(j);
        let v = self.second_difference(u, t);
        v.iter()
            .enumerate()
            .map(|(k, vk)| {
                let x = self.grid.x(k);
                Ok(checked("b", x, 0.0, t, (self.problem.b)(x, t))? * vk)
            })
            .collect()
    }

    /// Brings the memory cache up to date with `hist`.
    pub fn sync(&mut self, hist: &SolutionHistory) -> Result<()> {
        if !self.memory_active() {
            return Ok(());
        }
        while self.memory.len() < hist.levels.len() {
            let j = self.memory.len();
            let row = self.memory_integrand(&hist.levels[j], j)?;
            self.memory.push(row);
        }
        Ok(())
    }

    /// Linear system for level `j + 1` given levels `0..=j` in `hist`.
    pub fn assemble(&mut self, hist: &SolutionHistory, j: usize) -> Result<TridiagonalSystem> {
        if hist.newest() != j {
            return Err(Error::LengthMismatch {
                context: "assemble_level history",
                expected: j + 1,
                got: hist.levels.len(),
            });
        }
        if j >= self.grid.levels {
            return Err(Error::InvalidGrid(format!("level {} beyond J = {}", j + 1, self.grid.levels)));
        }
        self.sync(hist)?;
        let p = self.problem;
        let n = j + 1;
        let kmax = self.grid.intervals;
        let h = self.grid.h();
        let h2 = h * h;
        let sigma = self.grid.sigma();
        let t = self.grid.t(n);
        let s1 = sigma.powf(-p.nu1);
        let s2 = sigma.powf(-p.nu2);
        let memory_on = self.memory_active();
        let kappa0 = if memory_on { self.kappa[0] } else { 0.0 };

        let mut sys = TridiagonalSystem::zeros(kmax + 1);
        for k in 0..=kmax {
            let bc = match k {
                0 => Some((&p.left, 0)),
                _ if k == kmax => Some((&p.right, 1)),
                _ => None,
            };
            if let Some((bc, _)) = bc {
                if bc.is_dirichlet() {
                    sys.diag[k] = 1.0;
                    sys.rhs[k] = (bc.data)(t) / bc.value;
                    continue;
                }
            }
            let x = self.grid.x(k);
            let a = checked_positive("a", x, 0.0, t, (p.a)(x, t))?;
            let d = checked("d", x, 0.0, t, (p.d)(x, t))?;
            let rho2 = checked("rho2", x, 0.0, t, (p.rho2)(x, t))?;
            let f = checked("f", x, 0.0, t, (p.f)(x, t))?;
            let b_new = if memory_on {
                checked("b", x, 0.0, t, (p.b)(x, t))?
            } else {
                0.0
            };

            // Explicit Grünwald-Letnikov history, m = 1..=n.
            let (mut hist1, mut hist2) = (0.0, 0.0);
            for m in 1..=n {
                let u = hist.levels[n - m][k];
                hist1 += self.rho.weights()[m] * u;
                hist2 += self.rho_tilde.weights()[m] * u;
            }
            let u0k = self.u0[k];
            let frac1 = self.rho1[k] * s1;
            let frac2 = rho2 * s2;
            let mut rhs = f - frac1 * (hist1 - self.rho_partial[n] * u0k) + frac2 * (hist2 - self.rho_tilde_partial[n] * u0k);

            if memory_on {
                // Σ_{m=0}^{j} (B^m + B^{m+1}) K_{m,j}/2 without the implicit B^{j+1} K_{j,j}/2.
                let mut mem = 0.0;
                for m in 0..=j {
                    let km = self.kappa[j - m];
                    mem += self.memory[m][k] * km;
                    if m < j {
                        mem += self.memory[m + 1][k] * km;
                    }
                }
                rhs += 0.5 * mem;
            }

            // Coefficient of u_xx at the new level, memory endpoint included.
            let a_eff = a + 0.5 * b_new * kappa0;
            let diag_time = frac1 - frac2;
            match bc {
                None => {
                    sys.sub[k - 1] = -a_eff / h2 - d / (2.0 * h);
                    sys.diag[k] = diag_time + 2.0 * a_eff / h2;
                    sys.sup[k] = -a_eff / h2 + d / (2.0 * h);
                }
                Some((bc, 0)) => {
                    let phi = (bc.data)(t);
                    let (c1, c2) = (bc.deriv, bc.value);
                    // u_xx ≈ [(-2 + 2h c2/c1) u_0 + 2 u_1]/h² - 2φ/(c1 h),  u_x ≈ (φ - c2 u_0)/c1
                    sys.diag[k] = diag_time - a_eff * (-2.0 + 2.0 * h * c2 / c1) / h2 - d * c2 / c1;
                    sys.sup[k] = -2.0 * a_eff / h2;
                    rhs += -a_eff * 2.0 * phi / (c1 * h) - d * phi / c1;
                }
                Some((bc, _)) => {
                    let phi = (bc.data)(t);
                    let (c3, c4) = (bc.deriv, bc.value);
                    // u_xx ≈ [2 u_{K-1} + (-2 - 2h c4/c3) u_K]/h² + 2φ/(c3 h),  u_x ≈ (φ - c4 u_K)/c3
                    sys.sub[k - 1] = -2.0 * a_eff / h2;
                    sys.diag[k] = diag_time - a_eff * (-2.0 - 2.0 * h * c4 / c3) / h2 - d * c4 / c3;
                    rhs += a_eff * 2.0 * phi / (c3 * h) - d * phi / c3;
                }
            }
            sys.rhs[k] = rhs;
        }
        Ok(sys)
    }

    /// Solves for level `j + 1` and appends it to `hist`.
    pub fn step(&mut self, hist: &mut SolutionHistory, j: usize) -> Result<()> {
        let sys = self.assemble(hist, j).map_err(|e| e.at_level(j + 1))?;
        let values = solve_tridiagonal(&sys).map_err(|e| e.at_level(j + 1))?;
        hist.push(self.grid.t(j + 1), values)?;
        if self.memory_active() {
            let row = self.memory_integrand(&hist.levels[j + 1], j + 1)?;
            self.memory.push(row);
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<SolutionHistory> {
        let mut hist = SolutionHistory::initial(self.problem, &self.grid);
        for j in 0..self.grid.levels {
            self.step(&mut hist, j)?;
        }
        Ok(hist)
    }
}

/// System for level `j + 1` given levels `0..=j`.
pub fn assemble_level(p: &Problem1D, g: &Grid1D, hist: &SolutionHistory, j: usize) -> Result<TridiagonalSystem> {
    March1D::new(p, *g)?.assemble(hist, j)
}

/// Appends level `j + 1` to `hist`.
pub fn step(p: &Problem1D, g: &Grid1D, hist: &mut SolutionHistory, j: usize) -> Result<()> {
    March1D::new(p, *g)?.step(hist, j)
}

/// Marches `j = 0..J-1`. With `richardson`, the march is repeated with σ/2
/// and coinciding levels are combined as `2 u_{σ/2} - u_σ`.
pub fn solve(p: &Problem1D, g: &Grid1D, richardson: bool) -> Result<SolutionHistory> {
    let coarse = March1D::new(p, *g)?.run()?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = March1D::new(p, g.halved_step())?.run()?;
    Ok(combine_histories(&coarse, &fine))
}

pub(crate) fn combine_histories(coarse: &SolutionHistory, fine: &SolutionHistory) -> SolutionHistory {
    let levels = coarse
        .levels
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .zip(&fine.levels[2 * j])
                .map(|(c, f)| richardson_combine(*c, *f, 1))
                .collect()
        })
        .collect();
    SolutionHistory {
        nodes: coarse.nodes.clone(),
        times: coarse.times.clone(),
        levels,
    }
}
