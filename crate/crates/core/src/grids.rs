//! Uniform meshes on `[-L, L]`, finite differences and trapezoid quadrature.
//!
//! Grid functions are plain `Vec<f64>` / `&[f64]` sampled at the nodes of a
//! [`Grid`]; every operation checks the length against the grid.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// Uniform grid with `n` nodes on `[-half_width, half_width]`.
    ///
    /// `n` must be odd and at least 3 so that `y = 0` is a node.
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return domain(format!("grid half-width must be positive, got {half_width}"));
        }
        if n < 3 {
            return domain(format!("grid needs at least 3 nodes, got {n}"));
        }
        if n.is_multiple_of(2) {
            return domain(format!("grid node count must be odd, got {n}"));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let mid = (n - 1) / 2;
        // symmetric construction: nodes[mid + j] = j*h exactly mirrors nodes[mid - j]
        let nodes = (0..n)
            .map(|i| {
                if i == 0 {
                    -half_width
                } else if i == n - 1 {
                    half_width
                } else {
                    (i as f64 - mid as f64) * h
                }
            })
            .collect();
        Ok(Self {
            half_width,
            n,
            h,
            nodes,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node `y = 0`.
    pub fn center_index(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn check(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::GridMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        Ok(())
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&y| f(y)).collect()
    }

    /// Centered second-order first derivative, one-sided second order at the ends.
    pub fn derivative1(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check(f)?;
        let n = self.n;
        let inv2h = 0.5 / self.h;
        let mut df = vec![0.0; n];
        df[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * inv2h;
        for i in 1..n - 1 {
            df[i] = (f[i + 1] - f[i - 1]) * inv2h;
        }
        df[n - 1] = ((f[n - 3] - f[n - 1]) - 4.0 * (f[n - 2] - f[n - 1])) * inv2h;
        Ok(df)
    }

    /// Three-point second derivative; one-sided four-point (second order) at the
    /// ends, falling back to the three-point value when `n == 3`.
    pub fn derivative2(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check(f)?;
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut d2 = vec![0.0; n];
        for i in 1..n - 1 {
            d2[i] = ((f[i + 1] - f[i]) + (f[i - 1] - f[i])) * inv_h2;
        }
        if n >= 4 {
            d2[0] = (4.0 * (f[2] - f[0]) - 5.0 * (f[1] - f[0]) - (f[3] - f[0])) * inv_h2;
            d2[n - 1] = (4.0 * (f[n - 3] - f[n - 1]) - 5.0 * (f[n - 2] - f[n - 1]) - (f[n - 4] - f[n - 1])) * inv_h2;
        } else {
            d2[0] = d2[1];
            d2[n - 1] = d2[n - 2];
        }
        Ok(d2)
    }

    /// Fourth-order central first derivative on nodes `2..n-2`; second order on
    /// the two nodes next to the boundary and at the ends.
    pub fn derivative1_o4(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut df = self.derivative1(f)?;
        let inv12h = 1.0 / (12.0 * self.h);
        for i in 2..self.n.saturating_sub(2) {
            df[i] = (8.0 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2])) * inv12h;
        }
        Ok(df)
    }

    /// Fourth-order central second derivative, same boundary treatment as
    /// [`Grid::derivative1_o4`].
    pub fn derivative2_o4(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut d2 = self.derivative2(f)?;
        let inv12h2 = 1.0 / (12.0 * self.h * self.h);
        for i in 2..self.n.saturating_sub(2) {
            let c = f[i];
            d2[i] = (16.0 * ((f[i + 1] - c) + (f[i - 1] - c)) - ((f[i + 2] - c) + (f[i - 2] - c)))
                * inv12h2;
        }
        Ok(d2)
    }

    /// Trapezoid rule over `[-L, L]`.
    pub fn integrate(&self, f: &[f64]) -> Result<f64> {
        self.check(f)?;
        Ok(self.trapezoid(f))
    }

    pub(crate) fn trapezoid(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let interior: f64 = f[1..n - 1].iter().sum();
        self.h * (interior + 0.5 * (f[0] + f[n - 1]))
    }

    /// Quadrature of a nodewise integrand.
    pub(crate) fn integrate_with(&self, integrand: impl Fn(usize) -> f64) -> f64 {
        let n = self.n;
        let mut acc = 0.5 * (integrand(0) + integrand(n - 1));
        for i in 1..n - 1 {
            acc += integrand(i);
        }
        self.h * acc
    }
}

/// Sup-norm over all nodes.
pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. Solves in place into `rhs`. No
/// pivoting; callers pass diagonally dominant systems.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n);
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / beta } else { 0.0 };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}
