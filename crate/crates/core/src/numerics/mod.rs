//! Finite-difference verification oracle.
//!
//! Uniform grids, fourth-order derivatives, Simpson quadrature, the
//! three-point Dirichlet Hamiltonian and a Sturm-bisection eigensolver.
//! Nothing here knows about the closed forms: the oracle only sees sampled
//! potentials and sampled functions.

mod hamiltonian;
mod tridiag;

pub use hamiltonian::{
    adjointness_defect, apply_hamiltonian, hamiltonian_matrix, spectrum_numeric, NumericLevel,
};
pub use tridiag::{eigen_lowest, sturm_count, Eigenpair, TridiagonalSym};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of points of a [`Grid`].
pub const MIN_GRID_POINTS: usize = 16;

/// Uniform grid `x_i = x0 + i h`, `i = 0..n`, with `h = (x1 - x0)/(n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x0: f64,
    x1: f64,
    n: usize,
}

impl Grid {
    pub fn new(x0: f64, x1: f64, n: usize) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite()) || x0 >= x1 {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite x0 < x1, got [{x0}, {x1}]"
            )));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        Ok(Self { x0, x1, n })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn spacing(&self) -> f64 {
        (self.x1 - self.x0) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x1
        } else {
            self.x0 + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Same interval with `(n - 1)/2 + 1` points (every other point when
    /// `n - 1` is even).
    pub fn coarsened(&self) -> Result<Self> {
        Grid::new(self.x0, self.x1, (self.n - 1) / 2 + 1)
    }

    /// Index of the point closest to the middle of the interval.
    pub fn mid_index(&self) -> usize {
        (self.n - 1) / 2
    }
}

/// A real function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample at x = {}", grid.point(i))));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let values = grid.points().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, v)| f(x, *v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_grid(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Self::new(self.grid, values)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map(|_, v| s * v)
    }
}

fn same_grid(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::InvalidParameter("grid functions live on different grids".into()));
    }
    Ok(())
}

/// Fourth-order derivative: five-point central differences inside and
/// one-sided five-point stencils at the two points next to each edge.
pub fn derivative(f: &GridFunction) -> Result<GridFunction> {
    let v = f.values();
    let n = v.len();
    if n < 5 {
        return Err(Error::InvalidParameter("derivative needs at least 5 points".into()));
    }
    let inv = 1.0 / (12.0 * f.grid.spacing());
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * inv;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * inv;
    for i in 2..n - 2 {
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * inv;
    }
    let (a, b, c, e, g) = (v[n - 1], v[n - 2], v[n - 3], v[n - 4], v[n - 5]);
    d[n - 1] = (25.0 * a - 48.0 * b + 36.0 * c - 16.0 * e + 3.0 * g) * inv;
    d[n - 2] = (3.0 * a + 10.0 * b - 18.0 * c + 6.0 * e - g) * inv;
    GridFunction::new(f.grid, d)
}

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals closes with the three-eighths rule on the last three.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
            let mut s = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = h / 3.0 * s;
            if simpson_end != n - 1 {
                let t = &values[n - 4..];
                total += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
            }
            total
        }
    }
}

/// Integral of `f` over `[x_i, x_{i+1}]` from the cubic through four
/// neighbouring samples: `h/24 (-f_{i-1} + 13 f_i + 13 f_{i+1} - f_{i+2})`
/// inside, one-sided cubic stencils on the first and last interval.
fn interval_integral(f: &[f64], h: f64, i: usize) -> f64 {
    let n = f.len();
    match n {
        2 => 0.5 * h * (f[0] + f[1]),
        3 => {
            if i == 0 {
                h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
            } else {
                h / 12.0 * (-f[0] + 8.0 * f[1] + 5.0 * f[2])
            }
        }
        _ if i == 0 => h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]),
        _ if i + 2 == n => h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]),
        _ => h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]),
    }
}

/// `I_i = integral from x_anchor to x_i`, accumulated interval by interval
/// with a four-point cubic rule. Every interval uses the same stencil, so
/// the error is smooth along the grid and survives differentiation.
pub fn cumulative_integral(values: &[f64], h: f64, anchor: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    for i in anchor..n - 1 {
        out[i + 1] = out[i] + interval_integral(values, h, i);
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] - interval_integral(values, h, i);
    }
    out
}

pub fn integrate(f: &GridFunction) -> f64 {
    simpson(f.values(), f.grid.spacing())
}

pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_grid(f, g)?;
    let prod: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect();
    Ok(simpson(&prod, f.grid.spacing()))
}

pub fn norm(f: &GridFunction) -> f64 {
    inner_product(f, f).map(f64::sqrt).unwrap_or(0.0)
}

/// Sign of the first lobe: the first sample whose magnitude reaches
/// `1e-4 max|v|`. Returns `1.0` for the zero vector.
pub fn first_lobe_sign(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values
        .iter()
        .find(|v| v.abs() >= 1e-4 * max && max > 0.0)
        .map_or(1.0, |v| v.signum())
}

/// Strict sign changes between consecutive samples, ignoring samples below
/// `1e-10 max|f|`.
pub fn count_nodes(f: &GridFunction) -> usize {
    let max = f.max_abs();
    let floor = 1e-10 * max;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in f.values() {
        if v.abs() < floor || v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            nodes += 1;
        }
        last = v.signum();
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(x0: f64, x1: f64, n: usize) -> Grid {
        Grid::new(x0, x1, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 0.0, 100).is_err());
        assert!(Grid::new(0.0, 1.0, 15).is_err());
        let g = grid(-1.0, 1.0, 41);
        assert!((g.spacing() - 0.05).abs() < 1e-15);
        assert_eq!(g.point(40), 1.0);
        assert_eq!(g.coarsened().unwrap().len(), 21);
    }

    #[test]
    fn derivative_examples() {
        let g = grid(0.0, 1.0, 101);
        let lin = GridFunction::from_fn(g, Ok).unwrap();
        let d = derivative(&lin).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-10));

        let quartic = GridFunction::from_fn(g, |x| Ok(x.powi(4))).unwrap();
        let d = derivative(&quartic).unwrap();
        for (x, v) in g.points().zip(d.values()) {
            assert!((v - 4.0 * x.powi(3)).abs() < 1e-8);
        }

        let gs = grid(0.0, PI, 2001);
        let s = GridFunction::from_fn(gs, |x| Ok(x.sin())).unwrap();
        let d = derivative(&s).unwrap();
        let err = gs.points().zip(d.values()).fold(0.0f64, |m, (x, v)| m.max((v - x.cos()).abs()));
        assert!(err <= 1e-9, "{err}");
    }

    #[test]
    fn integrate_examples() {
        let one = GridFunction::from_fn(grid(0.0, 2.0, 17), |_| Ok(1.0)).unwrap();
        assert!((integrate(&one) - 2.0).abs() < 1e-15);
        let s = GridFunction::from_fn(grid(0.0, PI, 2001), |x| Ok(x.sin())).unwrap();
        assert!((integrate(&s) - 2.0).abs() <= 1e-9);
        assert_eq!(integrate(&GridFunction::zeros(grid(0.0, 1.0, 20))), 0.0);
        // odd interval count takes the 3/8 closing panel
        let cubic = GridFunction::from_fn(grid(0.0, 1.0, 20), |x| Ok(x.powi(3))).unwrap();
        assert!((integrate(&cubic) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn cumulative_integral_examples() {
        let g = grid(-1.0, 2.0, 121);
        let f = GridFunction::from_fn(g, |x| Ok((2.0 * x).cos())).unwrap();
        for anchor in [0usize, 17, 60, 120] {
            let c = cumulative_integral(f.values(), g.spacing(), anchor);
            let xa = g.point(anchor);
            for (i, x) in g.points().enumerate() {
                let exact = 0.5 * ((2.0 * x).sin() - (2.0 * xa).sin());
                assert!((c[i] - exact).abs() < 1e-7, "anchor {anchor} i {i}");
            }
        }
        let quad = GridFunction::from_fn(g, |x| Ok(x * x * x - x)).unwrap();
        let c = cumulative_integral(quad.values(), g.spacing(), 0);
        let x = g.x1();
        assert!((c[120] - (x.powi(4) / 4.0 - x * x / 2.0 - (0.25 - 0.5))).abs() < 1e-12);
    }

    #[test]
    fn inner_product_examples() {
        let g = grid(0.0, PI, 1001);
        let s1 = GridFunction::from_fn(g, |x| Ok(x.sin())).unwrap();
        let s2 = GridFunction::from_fn(g, |x| Ok((2.0 * x).sin())).unwrap();
        assert!(inner_product(&s1, &s2).unwrap().abs() <= 1e-6);
        let n1 = s1.scaled((2.0 / PI).sqrt()).unwrap();
        assert!((inner_product(&n1, &n1).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(inner_product(&GridFunction::zeros(g), &s1).unwrap(), 0.0);
    }

    #[test]
    fn node_count() {
        let g = grid(0.0, PI, 401);
        for k in 1..5 {
            let f = GridFunction::from_fn(g, |x| Ok((k as f64 * x).sin())).unwrap();
            assert_eq!(count_nodes(&f), k - 1);
        }
    }
}
