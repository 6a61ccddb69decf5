//! Safeguarded Newton iteration for increasing scalar functions.

use crate::error::{Error, Result};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Find a zero of an increasing function inside `[lo, hi]`.
///
/// `f` returns the value and derivative. The bracket must satisfy
/// `f(lo) <= 0 <= f(hi)`; it shrinks on every evaluation. A Newton step
/// that leaves the bracket, or fails to halve the residual, is replaced
/// by bisection. The search stops once `|f(x)| <= tol` or when the
/// bracket has collapsed to a few ulps, in which case the best point
/// seen is returned.
pub fn newton_bisect<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "empty bracket [{lo}, {hi}]"
        )));
    }
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    let mut best = Root {
        x,
        residual: f64::INFINITY,
        iterations: 0,
    };
    let mut last_abs = f64::INFINITY;
    for it in 1..=max_iter {
        let (fx, dfx) = f(x)?;
        if !fx.is_finite() {
            return Err(Error::NoConvergence(format!(
                "non-finite function value at {x}"
            )));
        }
        if fx.abs() < best.residual.abs() {
            best = Root {
                x,
                residual: fx,
                iterations: it,
            };
        }
        best.iterations = it;
        if fx.abs() <= tol {
            return Ok(Root {
                x,
                residual: fx,
                iterations: it,
            });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Ok(best);
        }
        let newton = x - fx / dfx;
        let stalled = fx.abs() > 0.5 * last_abs;
        x = if newton.is_finite() && newton > lo && newton < hi && !stalled {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_abs = fx.abs();
    }
    Err(Error::NoConvergence(format!(
        "{max_iter} iterations without meeting tolerance {tol}; best residual {}",
        best.residual
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = newton_bisect(|x| Ok((x * x - 2.0, 2.0 * x)), 0.0, 2.0, 1.0, 1e-14, 100).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.iterations < 10);
    }

    #[test]
    fn falls_back_to_bisection_for_flat_derivative() {
        // cube root has an infinite-looking Newton step near zero
        let r = newton_bisect(
            |x: f64| Ok((x.cbrt() - 0.5, 1.0 / (3.0 * x.cbrt().powi(2)).max(1e-300))),
            -1.0,
            1.0,
            -0.9,
            1e-13,
            200,
        )
        .unwrap();
        assert!((r.x - 0.125).abs() < 1e-12);
    }

    #[test]
    fn reports_iteration_exhaustion() {
        let r = newton_bisect(|x| Ok((x - 0.3, 0.0)), 0.0, 1.0, 0.9, 0.0, 3);
        assert!(matches!(r, Err(Error::NoConvergence(_))));
    }

    #[test]
    fn rejects_empty_bracket() {
        assert!(newton_bisect(|x| Ok((x, 1.0)), 1.0, 1.0, 1.0, 1e-12, 10).is_err());
    }
}
