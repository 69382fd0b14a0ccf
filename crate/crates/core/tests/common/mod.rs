//! Independent oracles shared by the integration tests. None of these call
//! into the solver internals; they rebuild each quantity from the scheme as
//! written, one node and one term at a time.
#![allow(dead_code)]

use fracsub::fracops::MemoryKernel;
use fracsub::linalg::TridiagonalSystem;
use fracsub::solver1d::{Grid1D, Problem1D};
use fracsub::solver2d::{Grid2D, Problem2D, XBoundary};

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            if m != 0.0 {
                for k in c..n {
                    a[r][k] -= m * a[c][k];
                }
                b[r] -= m * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

pub fn dense_apply(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(v, w)| v * w).sum()).collect()
}

pub fn tridiagonal_to_dense(s: &TridiagonalSystem) -> Vec<Vec<f64>> {
    let n = s.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = s.diag[i];
        if i > 0 {
            a[i][i - 1] = s.sub[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = s.sup[i];
        }
    }
    a
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// `(-1)^m C(ν, m)` as the plain product `Π_{i<m} (i - ν)/(i + 1)`.
pub fn binomial_weight(nu: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (i as f64 - nu) / (i as f64 + 1.0))
}

/// `∫_{s0}^{s1} 𝒦(t - s) ds` from the antiderivative of the kernel.
pub fn kernel_weight(kernel: &MemoryKernel, t: f64, s0: f64, s1: f64) -> f64 {
    let (c, q) = match kernel {
        MemoryKernel::Zero => return 0.0,
        MemoryKernel::PowerLaw { coeff, exponent } => (*coeff, 1.0 - exponent),
        MemoryKernel::Omega { scale, theta } => (scale / statrs::function::gamma::gamma(*theta), *theta),
        MemoryKernel::Custom { .. } => panic!("custom kernels have no antiderivative oracle"),
    };
    c * ((t - s0).powf(q) - (t - s1).powf(q)) / q
}

/// Equation residuals of the 1D scheme at level `j + 1` for a candidate
/// new level `unew`, given levels `0..=j`.
///
/// Every node carries the full equation; Robin ends read the fictitious node
/// from the discrete boundary condition, Dirichlet ends return `u - φ/c`.
pub fn residual_1d(p: &Problem1D, g: &Grid1D, levels: &[Vec<f64>], unew: &[f64]) -> Vec<f64> {
    let j = levels.len() - 1;
    let n = j + 1;
    let kmax = g.intervals;
    let h = g.h();
    let sigma = g.sigma();
    let t_new = g.t(n);
    let all: Vec<&[f64]> = levels.iter().map(|v| v.as_slice()).chain(std::iter::once(unew)).collect();

    let ghosts = |u: &[f64], t: f64| -> (f64, f64) {
        let left = if p.left.deriv != 0.0 {
            u[1] - 2.0 * h * ((p.left.data)(t) - p.left.value * u[0]) / p.left.deriv
        } else {
            f64::NAN
        };
        let right = if p.right.deriv != 0.0 {
            u[kmax - 1] + 2.0 * h * ((p.right.data)(t) - p.right.value * u[kmax]) / p.right.deriv
        } else {
            f64::NAN
        };
        (left, right)
    };
    let neighbours = |u: &[f64], k: usize, t: f64| -> (f64, f64) {
        let (gl, gr) = ghosts(u, t);
        let west = if k == 0 { gl } else { u[k - 1] };
        let east = if k == kmax { gr } else { u[k + 1] };
        (west, east)
    };
    let uxx = |u: &[f64], k: usize, t: f64| {
        let (w, e) = neighbours(u, k, t);
        (w - 2.0 * u[k] + e) / (h * h)
    };
    let ux = |u: &[f64], k: usize, t: f64| {
        let (w, e) = neighbours(u, k, t);
        (e - w) / (2.0 * h)
    };

    let mut r = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        let x = g.x(k);
        let bc = if k == 0 {
            Some(&p.left)
        } else if k == kmax {
            Some(&p.right)
        } else {
            None
        };
        if let Some(bc) = bc {
            if bc.deriv == 0.0 {
                r[k] = unew[k] - (bc.data)(t_new) / bc.value;
                continue;
            }
        }
        let u0k = all[0][k];
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for m in 0..=n {
            d1 += (all[n - m][k] - u0k) * binomial_weight(p.nu1, m);
            d2 += (all[n - m][k] - u0k) * binomial_weight(p.nu2, m);
        }
        d1 *= sigma.powf(-p.nu1);
        d2 *= sigma.powf(-p.nu2);

        let mut mem = 0.0;
        for m in 0..=j {
            let (tm, tm1) = (g.t(m), g.t(m + 1));
            let w = kernel_weight(&p.kernel, t_new, m as f64 * sigma, (m + 1) as f64 * sigma);
            if w != 0.0 {
                let lo = (p.b)(x, tm) * uxx(all[m], k, tm);
                let hi = (p.b)(x, tm1) * uxx(all[m + 1], k, tm1);
                mem += (lo + hi) * w / 2.0;
            }
        }

        r[k] = (p.rho1)(x) * d1 - (p.rho2)(x, t_new) * d2 - (p.a)(x, t_new) * uxx(unew, k, t_new)
            + (p.d)(x, t_new) * ux(unew, k, t_new)
            - mem
            - (p.f)(x, t_new);
    }
    r
}

/// Dense matrix and right-hand side of the 1D level `j + 1`, recovered from
/// the affine residual map by probing with unit vectors.
pub fn literal_level_1d(p: &Problem1D, g: &Grid1D, levels: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.intervals + 1;
    let zero = vec![0.0; n];
    let r0 = residual_1d(p, g, levels, &zero);
    let mut a = vec![vec![0.0; n]; n];
    let mut e = zero.clone();
    for i in 0..n {
        e[i] = 1.0;
        let ri = residual_1d(p, g, levels, &e);
        for row in 0..n {
            a[row][i] = ri[row] - r0[row];
        }
        e[i] = 0.0;
    }
    (a, r0.iter().map(|v| -v).collect())
}

/// Backward Euler for `ϱ₁(x) u_t - a u_xx + d u_x = f` with the same
/// fictitious-node boundary closure, one dense solve per step.
pub fn backward_euler_1d(p: &Problem1D, g: &Grid1D) -> Vec<Vec<f64>> {
    let kmax = g.intervals;
    let n = kmax + 1;
    let h = g.h();
    let h2 = h * h;
    let dt = g.sigma();
    let mut u: Vec<f64> = (0..n).map(|k| (p.u0)(g.x(k))).collect();
    let mut out = vec![u.clone()];
    for j in 1..=g.levels {
        let t = g.t(j);
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for k in 0..n {
            let x = g.x(k);
            let (ak, dk, r1) = ((p.a)(x, t), (p.d)(x, t), (p.rho1)(x));
            // Coefficients of u_{k-1}, u_k, u_{k+1}.
            let mut w = -ak / h2 - dk / (2.0 * h);
            let c = r1 / dt + 2.0 * ak / h2;
            let mut e = -ak / h2 + dk / (2.0 * h);
            b[k] = (p.f)(x, t) + r1 * u[k] / dt;
            a[k][k] = c;
            if k == 0 {
                let bc = &p.left;
                if bc.deriv == 0.0 {
                    a[k] = vec![0.0; n];
                    a[k][0] = bc.value;
                    b[k] = (bc.data)(t);
                    continue;
                }
                // u_{-1} = u_1 - 2h(φ - c2 u_0)/c1
                let phi = (bc.data)(t);
                a[k][1] += w + e;
                a[k][0] += w * 2.0 * h * bc.value / bc.deriv;
                b[k] += w * 2.0 * h * phi / bc.deriv;
                w = 0.0;
                e = 0.0;
            }
            if k == kmax {
                let bc = &p.right;
                if bc.deriv == 0.0 {
                    a[k] = vec![0.0; n];
                    a[k][kmax] = bc.value;
                    b[k] = (bc.data)(t);
                    continue;
                }
                // u_{K+1} = u_{K-1} + 2h(φ - c4 u_K)/c3
                let phi = (bc.data)(t);
                a[k][kmax - 1] += w + e;
                a[k][kmax] -= e * 2.0 * h * bc.value / bc.deriv;
                b[k] -= e * 2.0 * h * phi / bc.deriv;
                w = 0.0;
                e = 0.0;
            }
            if w != 0.0 {
                a[k][k - 1] = w;
            }
            if e != 0.0 {
                a[k][k + 1] = e;
            }
        }
        u = dense_solve(a, b);
        out.push(u.clone());
    }
    out
}

/// Equation residuals of the 2D scheme at level `j + 1` on the unknown nodes
/// (row-major in `y`, x-edges excluded, y-edges included when they carry
/// `u_y = 0`). `levels` and `unew` are full node arrays `l (K_x + 1) + k`.
pub fn residual_2d(p: &Problem2D, g: &Grid2D, levels: &[Vec<f64>], unew: &[f64]) -> Vec<f64> {
    let j = levels.len() - 1;
    let n = j + 1;
    let (kx, ky) = (g.kx, g.ky);
    let (hx, hy) = (g.hx(), g.hy());
    let sigma = g.sigma();
    let t_new = g.t(n);
    let neumann = p.x_boundary == XBoundary::Dirichlet;
    let rows: Vec<usize> = if neumann { (0..=ky).collect() } else { (1..ky).collect() };
    let at = |u: &[f64], k: usize, l: isize| -> f64 {
        // Mirror across a Neumann edge.
        let l = if l < 0 {
            -l
        } else if l as usize > ky {
            2 * ky as isize - l
        } else {
            l
        };
        u[l as usize * (kx + 1) + k]
    };
    let all: Vec<&[f64]> = levels.iter().map(|v| v.as_slice()).chain(std::iter::once(unew)).collect();
    let second = |u: &[f64], k: usize, l: usize| -> (f64, f64) {
        let li = l as isize;
        let c = at(u, k, li);
        let uxx = (at(u, k - 1, li) - 2.0 * c + at(u, k + 1, li)) / (hx * hx);
        let uyy = (at(u, k, li - 1) - 2.0 * c + at(u, k, li + 1)) / (hy * hy);
        (uxx, uyy)
    };

    let mut r = Vec::new();
    for &l in &rows {
        for k in 1..kx {
            let (x, y) = (g.x(k), g.y(l));
            let li = l as isize;
            let u0 = at(all[0], k, li);
            let (mut d1, mut d2) = (0.0, 0.0);
            for m in 0..=n {
                let v = at(all[n - m], k, li) - u0;
                d1 += v * binomial_weight(p.nu1, m);
                d2 += v * binomial_weight(p.nu2, m);
            }
            d1 *= sigma.powf(-p.nu1);
            d2 *= sigma.powf(-p.nu2);

            let mut mem = 0.0;
            for m in 0..=j {
                let w = kernel_weight(&p.kernel, t_new, m as f64 * sigma, (m + 1) as f64 * sigma);
                if w != 0.0 {
                    let (tm, tm1) = (g.t(m), g.t(m + 1));
                    let (xx0, yy0) = second(all[m], k, l);
                    let (xx1, yy1) = second(all[m + 1], k, l);
                    let lo = (p.b1)(x, y, tm) * xx0 + (p.b2)(x, y, tm) * yy0;
                    let hi = (p.b1)(x, y, tm1) * xx1 + (p.b2)(x, y, tm1) * yy1;
                    mem += (lo + hi) * w / 2.0;
                }
            }

            let (uxx, uyy) = second(unew, k, l);
            let ux = (at(unew, k + 1, li) - at(unew, k - 1, li)) / (2.0 * hx);
            let uy = (at(unew, k, li + 1) - at(unew, k, li - 1)) / (2.0 * hy);
            r.push(
                (p.rho1)(x, y) * d1 - (p.rho2)(x, y, t_new) * d2 - (p.a1)(x, y, t_new) * uxx - (p.a2)(x, y, t_new) * uyy
                    + (p.d1)(x, y, t_new) * ux
                    + (p.d2)(x, y, t_new) * uy
                    - mem
                    - (p.f)(x, y, t_new),
            );
        }
    }
    r
}

/// Node indices of the 2D unknowns in the order used by `residual_2d`.
pub fn unknown_nodes_2d(p: &Problem2D, g: &Grid2D) -> Vec<usize> {
    let rows: Vec<usize> = if p.x_boundary == XBoundary::Dirichlet {
        (0..=g.ky).collect()
    } else {
        (1..g.ky).collect()
    };
    rows.iter().flat_map(|&l| (1..g.kx).map(move |k| l * (g.kx + 1) + k)).collect()
}

/// Dense matrix and right-hand side of the 2D level `j + 1`.
pub fn literal_level_2d(p: &Problem2D, g: &Grid2D, levels: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let nodes = unknown_nodes_2d(p, g);
    let total = (g.kx + 1) * (g.ky + 1);
    let zero = vec![0.0; total];
    let r0 = residual_2d(p, g, levels, &zero);
    let n = nodes.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut e = zero.clone();
    for (i, &node) in nodes.iter().enumerate() {
        e[node] = 1.0;
        let ri = residual_2d(p, g, levels, &e);
        for row in 0..n {
            a[row][i] = ri[row] - r0[row];
        }
        e[node] = 0.0;
    }
    (a, r0.iter().map(|v| -v).collect())
}
