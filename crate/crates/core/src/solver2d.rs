//! Implicit time march for the two-dimensional problem on
//! `(0, L_x) × (0, L_y)`:
//!
//! ```text
//! ϱ₁ D^{ν₁}u − ϱ₂ D^{ν₂}u − a¹ u_xx − a² u_yy + d¹ u_x + d² u_y
//!     − 𝒦 * (b¹ u_xx + b² u_yy) = f
//! u = 0 on x = 0, L_x;   u_y = 0 on y = 0, L_y
//! ```
//!
//! Unknowns are the nodes with `0 < k < K_x` ordered row by row in `y`, so
//! the five-point matrix has half-bandwidth `K_x - 1`. Neumann edges keep
//! their nodes in the system and use the mirrored fictitious row.

use std::io::{self, Write};

use crate::coeff::{Fn2, Fn3};
use crate::error::{Error, Result};
use crate::fracops::{gl_weights, richardson_combine, GLWeightTable, MemoryKernel};
use crate::linalg::{solve_banded, BandedSystem};
use crate::solver1d::{checked, checked_positive, fmt_g17, validate_orders};

/// Edge conditions supported in two dimensions. Both are homogeneous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XBoundary {
    /// `u = 0` on the x-edges and `u_y = 0` on the y-edges.
    Dirichlet,
    /// `u = 0` on all four edges.
    AllDirichlet,
}

#[derive(Clone)]
pub struct Problem2D {
    pub nu1: f64,
    pub nu2: f64,
    /// `ϱ₁(x, y) > 0`.
    pub rho1: Fn2,
    pub rho2: Fn3,
    pub a1: Fn3,
    pub a2: Fn3,
    pub d1: Fn3,
    pub d2: Fn3,
    pub b1: Fn3,
    pub b2: Fn3,
    pub kernel: MemoryKernel,
    pub f: Fn3,
    pub u0: Fn2,
    pub x_boundary: XBoundary,
    pub lx: f64,
    pub ly: f64,
    pub final_time: f64,
}

impl Problem2D {
    pub fn validate(&self) -> Result<()> {
        validate_orders(self.nu1, self.nu2)?;
        for (name, v) in [("Lx", self.lx), ("Ly", self.ly), ("T", self.final_time)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidProblem(format!("{name} = {v} must be positive")));
            }
        }
        self.kernel.validate()
    }

    fn neumann_y(&self) -> bool {
        self.x_boundary == XBoundary::Dirichlet
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub kx: usize,
    pub ky: usize,
    pub levels: usize,
    pub lx: f64,
    pub ly: f64,
    pub final_time: f64,
}

impl Grid2D {
    pub fn new(lx: f64, ly: f64, final_time: f64, kx: usize, ky: usize, levels: usize) -> Result<Self> {
        if kx < 2 || ky < 2 {
            return Err(Error::InvalidGrid(format!("Kx = {kx}, Ky = {ky} must both be at least 2")));
        }
        if levels < 1 {
            return Err(Error::InvalidGrid("J must be at least 1".into()));
        }
        Ok(Self {
            kx,
            ky,
            levels,
            lx,
            ly,
            final_time,
        })
    }

    pub fn for_problem(p: &Problem2D, kx: usize, ky: usize, levels: usize) -> Result<Self> {
        Self::new(p.lx, p.ly, p.final_time, kx, ky, levels)
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.kx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ky as f64
    }

    pub fn sigma(&self) -> f64 {
        self.final_time / self.levels as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        if k == self.kx {
            self.lx
        } else {
            k as f64 * self.hx()
        }
    }

    pub fn y(&self, l: usize) -> f64 {
        if l == self.ky {
            self.ly
        } else {
            l as f64 * self.hy()
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        if j == self.levels {
            self.final_time
        } else {
            j as f64 * self.sigma()
        }
    }

    fn node_count(&self) -> usize {
        (self.kx + 1) * (self.ky + 1)
    }

    #[inline]
    fn node(&self, k: usize, l: usize) -> usize {
        l * (self.kx + 1) + k
    }
}

/// Every level of the 2D march; each level is stored row-major in `y`
/// (`index = l (K_x + 1) + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory2D {
    grid: Grid2D,
    times: Vec<f64>,
    levels: Vec<Vec<f64>>,
}

impl SolutionHistory2D {
    pub fn initial(p: &Problem2D, g: &Grid2D) -> Self {
        let mut first = vec![0.0; g.node_count()];
        for l in 0..=g.ky {
            for k in 0..=g.kx {
                first[g.node(k, l)] = (p.u0)(g.x(k), g.y(l));
            }
        }
        Self {
            grid: *g,
            times: vec![0.0],
            levels: vec![first],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn newest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j]
    }

    pub fn value(&self, j: usize, k: usize, l: usize) -> f64 {
        self.levels[j][self.grid.node(k, l)]
    }

    /// One level as a CSV grid: header `y\x` followed by the x-nodes, then one
    /// row per y-node.
    pub fn write_level_csv<W: Write>(&self, j: usize, mut out: W) -> io::Result<()> {
        let g = &self.grid;
        write!(out, "y\\x")?;
        for k in 0..=g.kx {
            write!(out, ",{}", fmt_g17(g.x(k)))?;
        }
        writeln!(out)?;
        for l in 0..=g.ky {
            write!(out, "{}", fmt_g17(g.y(l)))?;
            for k in 0..=g.kx {
                write!(out, ",{}", fmt_g17(self.value(j, k, l)))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Per-solve state of the 2D march.
pub struct March2D<'a> {
    problem: &'a Problem2D,
    grid: Grid2D,
    rho: GLWeightTable,
    rho_tilde: GLWeightTable,
    rho_partial: Vec<f64>,
    rho_tilde_partial: Vec<f64>,
    kappa: Vec<f64>,
    rho1: Vec<f64>,
    /// `b¹ u_xx + b² u_yy` per level, indexed like the history.
    memory: Vec<Vec<f64>>,
    first_row: usize,
    last_row: usize,
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

impl<'a> March2D<'a> {
    pub fn new(problem: &'a Problem2D, grid: Grid2D) -> Result<Self> {
        problem.validate()?;
        let rho = gl_weights(problem.nu1, grid.levels)?;
        let rho_tilde = gl_weights(problem.nu2, grid.levels)?;
        let kappa = problem.kernel.increments(grid.sigma(), grid.levels)?;
        let mut rho1 = vec![0.0; grid.node_count()];
        for l in 0..=grid.ky {
            for k in 0..=grid.kx {
                let (x, y) = (grid.x(k), grid.y(l));
                rho1[grid.node(k, l)] = checked_positive("rho1", x, y, 0.0, (problem.rho1)(x, y))?;
            }
        }
        let (first_row, last_row) = if problem.neumann_y() {
            (0, grid.ky)
        } else {
            (1, grid.ky - 1)
        };
        Ok(Self {
            problem,
            grid,
            rho_partial: partial_sums(&rho),
            rho_tilde_partial: partial_sums(&rho_tilde),
            rho,
            rho_tilde,
            kappa,
            rho1,
            memory: Vec::new(),
            first_row,
            last_row,
        })
    }

    fn memory_active(&self) -> bool {
        !self.problem.kernel.is_zero()
    }

    /// Half-bandwidth of the level matrices.
    pub fn half_bandwidth(&self) -> usize {
        self.grid.kx - 1
    }

    pub fn unknowns(&self) -> usize {
        (self.grid.kx - 1) * (self.last_row - self.first_row + 1)
    }

    #[inline]
    fn unknown(&self, k: usize, l: usize) -> usize {
        (l - self.first_row) * (self.grid.kx - 1) + (k - 1)
    }

    /// Second differences `(u_xx, u_yy)` at an unknown node, with the mirrored
    /// fictitious row on Neumann edges.
    fn second_differences(&self, u: &[f64], k: usize, l: usize) -> (f64, f64) {
        let g = &self.grid;
        let (hx2, hy2) = (g.hx() * g.hx(), g.hy() * g.hy());
        let c = u[g.node(k, l)];
        let uxx = (u[g.node(k - 1, l)] - 2.0 * c + u[g.node(k + 1, l)]) / hx2;
        let (below, above) = match l {
            0 => (u[g.node(k, 1)], u[g.node(k, 1)]),
            _ if l == g.ky => (u[g.node(k, l - 1)], u[g.node(k, l - 1)]),
            _ => (u[g.node(k, l - 1)], u[g.node(k, l + 1)]),
        };
        let uyy = (below - 2.0 * c + above) / hy2;
        (uxx, uyy)
    }

    fn memory_integrand(&self, u: &[f64], j: usize) -> Result<Vec<f64>> {
        let g = &self.grid;
        let t = g.t(j);
        let mut out = vec![0.0; g.node_count()];
        for l in self.first_row..=self.last_row {
            for k in 1..g.kx {
                let (x, y) = (g.x(k), g.y(l));
                let (uxx, uyy) = self.second_differences(u, k, l);
                let b1 = checked("b1", x, y, t, (self.problem.b1)(x, y, t))?;
                let b2 = checked("b2", x, y, t, (self.problem.b2)(x, y, t))?;
                out[g.node(k, l)] = b1 * uxx + b2 * uyy;
            }
        }
        Ok(out)
    }

    pub fn sync(&mut self, hist: &SolutionHistory2D) -> Result<()> {
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

    /// Banded system for level `j + 1`.
    pub fn assemble(&mut self, hist: &SolutionHistory2D, j: usize) -> Result<BandedSystem> {
        if hist.newest() != j {
            return Err(Error::LengthMismatch {
                context: "assemble_level_2d history",
                expected: j + 1,
                got: hist.levels.len(),
            });
        }
        if j >= self.grid.levels {
            return Err(Error::InvalidGrid(format!("level {} beyond J = {}", j + 1, self.grid.levels)));
        }
        self.sync(hist)?;
        let p = self.problem;
        let g = self.grid;
        let n = j + 1;
        let t = g.t(n);
        let (hx, hy) = (g.hx(), g.hy());
        let (hx2, hy2) = (hx * hx, hy * hy);
        let sigma = g.sigma();
        let s1 = sigma.powf(-p.nu1);
        let s2 = sigma.powf(-p.nu2);
        let memory_on = self.memory_active();
        let kappa0 = if memory_on { self.kappa[0] } else { 0.0 };
        let u0 = &hist.levels[0];

        let mut sys = BandedSystem::with_half_bandwidth(self.unknowns(), self.half_bandwidth());
        for l in self.first_row..=self.last_row {
            for k in 1..g.kx {
                let (x, y) = (g.x(k), g.y(l));
                let node = g.node(k, l);
                let row = self.unknown(k, l);
                let a1 = checked_positive("a1", x, y, t, (p.a1)(x, y, t))?;
                let a2 = checked_positive("a2", x, y, t, (p.a2)(x, y, t))?;
                let d1 = checked("d1", x, y, t, (p.d1)(x, y, t))?;
                let d2 = checked("d2", x, y, t, (p.d2)(x, y, t))?;
                let rho2 = checked("rho2", x, y, t, (p.rho2)(x, y, t))?;
                let f = checked("f", x, y, t, (p.f)(x, y, t))?;
                let (b1, b2) = if memory_on {
                    (
                        checked("b1", x, y, t, (p.b1)(x, y, t))?,
                        checked("b2", x, y, t, (p.b2)(x, y, t))?,
                    )
                } else {
                    (0.0, 0.0)
                };

                let (mut hist1, mut hist2) = (0.0, 0.0);
                for m in 1..=n {
                    let u = hist.levels[n - m][node];
                    hist1 += self.rho.weights()[m] * u;
                    hist2 += self.rho_tilde.weights()[m] * u;
                }
                let frac1 = self.rho1[node] * s1;
                let frac2 = rho2 * s2;
                let mut rhs = f - frac1 * (hist1 - self.rho_partial[n] * u0[node])
                    + frac2 * (hist2 - self.rho_tilde_partial[n] * u0[node]);
                if memory_on {
                    let mut mem = 0.0;
                    for m in 0..=j {
                        let km = self.kappa[j - m];
                        mem += self.memory[m][node] * km;
                        if m < j {
                            mem += self.memory[m + 1][node] * km;
                        }
                    }
                    rhs += 0.5 * mem;
                }

                let ax = a1 + 0.5 * b1 * kappa0;
                let ay = a2 + 0.5 * b2 * kappa0;
                sys.add(row, row, frac1 - frac2 + 2.0 * ax / hx2 + 2.0 * ay / hy2)?;

                // x-neighbours; the Dirichlet edge values are zero.
                let west = -ax / hx2 - d1 / (2.0 * hx);
                let east = -ax / hx2 + d1 / (2.0 * hx);
                if k > 1 {
                    sys.add(row, self.unknown(k - 1, l), west)?;
                }
                if k + 1 < g.kx {
                    sys.add(row, self.unknown(k + 1, l), east)?;
                }

                // y-neighbours. On a Neumann edge u_y = 0 mirrors the interior
                // neighbour and the drift term vanishes.
                let south = -ay / hy2 - d2 / (2.0 * hy);
                let north = -ay / hy2 + d2 / (2.0 * hy);
                if p.neumann_y() && l == 0 {
                    sys.add(row, self.unknown(k, 1), -2.0 * ay / hy2)?;
                } else if p.neumann_y() && l == g.ky {
                    sys.add(row, self.unknown(k, l - 1), -2.0 * ay / hy2)?;
                } else {
                    if l > self.first_row {
                        sys.add(row, self.unknown(k, l - 1), south)?;
                    }
                    if l < self.last_row {
                        sys.add(row, self.unknown(k, l + 1), north)?;
                    }
                }
                sys.rhs[row] = rhs;
            }
        }
        Ok(sys)
    }

    pub fn step(&mut self, hist: &mut SolutionHistory2D, j: usize) -> Result<()> {
        let sys = self.assemble(hist, j).map_err(|e| e.at_level(j + 1))?;
        let x = solve_banded(sys).map_err(|e| e.at_level(j + 1))?;
        let g = self.grid;
        let mut next = vec![0.0; g.node_count()];
        for l in self.first_row..=self.last_row {
            for k in 1..g.kx {
                next[g.node(k, l)] = x[self.unknown(k, l)];
            }
        }
        if self.memory_active() {
            let row = self.memory_integrand(&next, j + 1)?;
            self.memory.push(row);
        }
        hist.times.push(g.t(j + 1));
        hist.levels.push(next);
        Ok(())
    }

    pub fn run(mut self) -> Result<SolutionHistory2D> {
        let mut hist = SolutionHistory2D::initial(self.problem, &self.grid);
        for j in 0..self.grid.levels {
            self.step(&mut hist, j)?;
        }
        Ok(hist)
    }
}

/// Banded system for level `j + 1` given levels `0..=j`.
pub fn assemble_level_2d(p: &Problem2D, g: &Grid2D, hist: &SolutionHistory2D, j: usize) -> Result<BandedSystem> {
    March2D::new(p, *g)?.assemble(hist, j)
}

/// Full march, optionally Richardson-combined with a σ/2 march.
pub fn solve_2d(p: &Problem2D, g: &Grid2D, richardson: bool) -> Result<SolutionHistory2D> {
    let coarse = March2D::new(p, *g)?.run()?;
    if !richardson {
        return Ok(coarse);
    }
    let fine_grid = Grid2D {
        levels: 2 * g.levels,
        ..*g
    };
    let fine = March2D::new(p, fine_grid)?.run()?;
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
    Ok(SolutionHistory2D {
        grid: coarse.grid,
        times: coarse.times,
        levels,
    })
}
