//! Direct solvers for the per-level linear systems: the Thomas algorithm for
//! tridiagonal matrices and banded LU with partial pivoting.

use crate::error::{Error, Result};

/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to
/// column `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.diag.len();
        let off = n.saturating_sub(1);
        for (context, expected, got) in [
            ("tridiagonal sub", off, self.sub.len()),
            ("tridiagonal sup", off, self.sup.len()),
            ("tridiagonal rhs", n, self.rhs.len()),
        ] {
            if expected != got {
                return Err(Error::LengthMismatch { context, expected, got });
            }
        }
        Ok(())
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Thomas algorithm. Fails with the offending row when a pivot vanishes.
pub fn solve_tridiagonal(s: &TridiagonalSystem) -> Result<Vec<f64>> {
    s.check()?;
    let n = s.diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = s.diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::SingularPivot { row: 0 });
    }
    if n > 1 {
        c[0] = s.sup[0] / pivot;
    }
    d[0] = s.rhs[0] / pivot;
    for i in 1..n {
        pivot = s.diag[i] - s.sub[i - 1] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularPivot { row: i });
        }
        if i + 1 < n {
            c[i] = s.sup[i] / pivot;
        }
        d[i] = (s.rhs[i] - s.sub[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square banded matrix with `lower` sub-diagonals and `upper`
/// super-diagonals plus a right-hand side.
///
/// Each row keeps `lower` extra slots to the right of the band for the
/// fill-in produced by row interchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
            rhs: vec![0.0; n],
        }
    }

    /// Symmetric band with half-bandwidth `p`.
    pub fn with_half_bandwidth(n: usize, p: usize) -> Self {
        Self::zeros(n, p, p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        row * self.width + col + self.lower - row
    }

    fn in_band(&self, row: usize, col: usize) -> bool {
        row < self.n && col < self.n && col + self.lower >= row && col <= row + self.upper
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if self.in_band(row, col) {
            self.data[self.slot(row, col)]
        } else {
            0.0
        }
    }

    /// Adds `value` to entry `(row, col)`, which must lie inside the band.
    pub fn add(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if !self.in_band(row, col) {
            return Err(Error::domain(
                "BandedSystem::add",
                format!("entry ({row}, {col}) lies outside the band ({}, {})", self.lower, self.upper),
            ));
        }
        let k = self.slot(row, col);
        self.data[k] += value;
        Ok(())
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) -> Result<()> {
        if !self.in_band(row, col) {
            return Err(Error::domain(
                "BandedSystem::set",
                format!("entry ({row}, {col}) lies outside the band ({}, {})", self.lower, self.upper),
            ));
        }
        let k = self.slot(row, col);
        self.data[k] = value;
        Ok(())
    }

    /// `A x` using the band entries.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }
}

/// Gaussian elimination with row pivoting confined to the band.
pub fn solve_banded(mut s: BandedSystem) -> Result<Vec<f64>> {
    let n = s.n;
    if s.rhs.len() != n {
        return Err(Error::LengthMismatch {
            context: "banded rhs",
            expected: n,
            got: s.rhs.len(),
        });
    }
    let (kl, ku, w) = (s.lower, s.upper, s.width);
    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + kl + ku).min(n - 1);
        let mut p = k;
        let mut best = s.data[s.slot(k, k)].abs();
        for i in k + 1..=last_row {
            let v = s.data[s.slot(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SingularPivot { row: k });
        }
        if p != k {
            for c in k..=last_col {
                let (a, b) = (s.slot(k, c), s.slot(p, c));
                s.data.swap(a, b);
            }
            s.rhs.swap(k, p);
        }
        let pivot_row = s.slot(k, k);
        let pivot = s.data[pivot_row];
        for i in k + 1..=last_row {
            let ik = s.slot(i, k);
            let factor = s.data[ik] / pivot;
            if factor == 0.0 {
                continue;
            }
            s.data[ik] = 0.0;
            // Column c sits at pivot_row + (c - k) in row k and at ik + (c - k) in row i.
            let span = last_col - k;
            let (head, tail) = s.data.split_at_mut(ik);
            let src = &head[pivot_row + 1..=pivot_row + span];
            let dst = &mut tail[1..=span];
            for (d, a) in dst.iter_mut().zip(src) {
                *d -= factor * a;
            }
            s.rhs[i] -= factor * s.rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let hi = (i + kl + ku).min(n - 1);
        let base = i * w + kl;
        let mut acc = s.rhs[i];
        for c in i + 1..=hi {
            acc -= s.data[base + (c - i)] * x[c];
        }
        x[i] = acc / s.data[base];
    }
    Ok(x)
}
