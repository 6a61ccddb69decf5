//! Thomas algorithm for tridiagonal systems.

use crate::error::{Error, Result};

/// Solve `A x = d` where `A` has sub-diagonal `lower` (first entry unused),
/// diagonal `diag` and super-diagonal `upper` (last entry unused).
///
/// No pivoting: fails on a zero or non-finite pivot, which cannot happen
/// for the diagonally dominant M-matrices assembled by the nutrient solver.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    if lower.len() != n || diag.len() != n || upper.len() != n {
        return Err(Error::InvalidArgument(
            "tridiagonal bands must match the right-hand side length".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    check_pivot(pivot, 0)?;
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        check_pivot(pivot, i)?;
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

fn check_pivot(p: f64, row: usize) -> Result<()> {
    if p == 0.0 || !p.is_finite() {
        Err(Error::SolverFailure(format!(
            "singular tridiagonal system (pivot {p} in row {row})"
        )))
    } else {
        Ok(())
    }
}
