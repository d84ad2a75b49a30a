use serde::Serialize;

use crate::error::{Error, Result};
use crate::partners::Superpotential;

use super::{derivative, eigen_lowest, inner_product, Grid, GridFunction, TridiagonalSym};

/// Dirichlet discretization of `-d^2/dx^2 + V` on the interior points of
/// `grid`.
pub fn hamiltonian_matrix(v: &dyn Fn(f64) -> Result<f64>, grid: &Grid) -> Result<TridiagonalSym> {
    let pot = interior_potential(v, grid)?;
    TridiagonalSym::from_potential(grid.spacing(), &pot)
}

fn interior_potential(v: &dyn Fn(f64) -> Result<f64>, grid: &Grid) -> Result<Vec<f64>> {
    (1..grid.len() - 1)
        .map(|i| {
            let x = grid.point(i);
            let val = v(x)?;
            if val.is_finite() {
                Ok(val)
            } else {
                Err(Error::NonFinite(format!("potential at x = {x}")))
            }
        })
        .collect()
}

/// `(-f'' + V f)` with the three-point Laplacian; the two boundary samples
/// are set to zero.
pub fn apply_hamiltonian(v: &dyn Fn(f64) -> Result<f64>, f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    let pot = interior_potential(v, &grid)?;
    let h2 = grid.spacing().powi(2);
    let s = f.values();
    let mut out = vec![0.0; s.len()];
    for i in 1..s.len() - 1 {
        out[i] = -(s[i - 1] - 2.0 * s[i] + s[i + 1]) / h2 + pot[i - 1] * s[i];
    }
    GridFunction::new(grid, out)
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericLevel {
    pub k: usize,
    pub energy: f64,
    /// `|E_h - E_2h| / 3` from a half-resolution rerun.
    pub richardson_error: f64,
    pub extrapolated: f64,
    #[serde(skip)]
    pub vector: GridFunction,
}

/// Lowest `count` eigenvalues of the discretized Hamiltonian with a
/// Richardson error estimate. Vectors are zero-padded to the full grid.
pub fn spectrum_numeric(
    v: &dyn Fn(f64) -> Result<f64>,
    grid: &Grid,
    count: usize,
) -> Result<Vec<NumericLevel>> {
    let fine = eigen_lowest(&hamiltonian_matrix(v, grid)?, count)?;
    let coarse_grid = grid.coarsened()?;
    let coarse = eigen_lowest(&hamiltonian_matrix(v, &coarse_grid)?, count)?;
    fine.into_iter()
        .zip(coarse)
        .enumerate()
        .map(|(k, (f, c))| {
            let mut values = Vec::with_capacity(grid.len());
            values.push(0.0);
            values.extend_from_slice(&f.vector);
            values.push(0.0);
            Ok(NumericLevel {
                k,
                energy: f.value,
                richardson_error: (f.value - c.value).abs() / 3.0,
                extrapolated: f.value + (f.value - c.value) / 3.0,
                vector: GridFunction::new(*grid, values)?,
            })
        })
        .collect()
}

/// `|<phi, A psi> - <A^dagger phi, psi>|` with `A = d/dx + W(m)`,
/// `A^dagger = -d/dx + W(m)`. Requires `phi psi` to vanish at both ends to
/// `1e-8` of its maximum.
pub fn adjointness_defect(
    w: &Superpotential,
    m: f64,
    phi: &GridFunction,
    psi: &GridFunction,
) -> Result<f64> {
    let prod = phi.zip_with(psi, |a, b| a * b)?;
    let max = prod.max_abs();
    let ends = prod.values()[0].abs().max(prod.values()[prod.values().len() - 1].abs());
    if ends > 1e-8 * max {
        return Err(Error::Hypothesis(format!(
            "phi psi does not vanish at the grid ends ({ends:e} vs max {max:e})"
        )));
    }
    let grid = *psi.grid();
    let wv = GridFunction::from_fn(grid, |x| w.value(x, m))?;
    let a_psi = derivative(psi)?.zip_with(&wv.zip_with(psi, |a, b| a * b)?, |d, p| d + p)?;
    let ad_phi = derivative(phi)?.zip_with(&wv.zip_with(phi, |a, b| a * b)?, |d, p| -d + p)?;
    Ok((inner_product(phi, &a_psi)? - inner_product(&ad_phi, psi)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn infinite_well() {
        let g = Grid::new(0.0, PI, 2001).unwrap();
        let levels = spectrum_numeric(&|_| Ok(0.0), &g, 3).unwrap();
        for (k, l) in levels.iter().enumerate() {
            let exact = ((k + 1) * (k + 1)) as f64;
            assert!((l.energy - exact).abs() / exact < 1e-5, "k={k}");
            assert!((l.extrapolated - exact).abs() < (l.energy - exact).abs());
        }
    }

    #[test]
    fn oscillator_with_richardson() {
        let g = Grid::new(-10.0, 10.0, 4001).unwrap();
        let levels = spectrum_numeric(&|x| Ok(x * x), &g, 4).unwrap();
        for (k, l) in levels.iter().enumerate() {
            let exact = (2 * k + 1) as f64;
            assert!((l.energy - exact).abs() < 1e-4, "k={k} E={}", l.energy);
            assert!((l.energy - exact).abs() < 4.0 * l.richardson_error + 1e-12);
        }
    }

    #[test]
    fn apply_matches_eigenpair() {
        let g = Grid::new(-8.0, 8.0, 801).unwrap();
        let v = |x: f64| Ok(x * x);
        let l = &spectrum_numeric(&v, &g, 1).unwrap()[0];
        let hv = apply_hamiltonian(&v, &l.vector).unwrap();
        for (a, b) in hv.values().iter().zip(l.vector.values()) {
            assert!((a - l.energy * b).abs() < 1e-8);
        }
    }

    #[test]
    fn non_finite_potential_is_refused() {
        let g = Grid::new(-1.0, 1.0, 101).unwrap();
        assert!(hamiltonian_matrix(&|x: f64| Ok(1.0 / x), &g).is_err());
    }
}
