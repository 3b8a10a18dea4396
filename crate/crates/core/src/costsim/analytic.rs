//! Closed-form execution times of a two-level nest under static
//! scheduling, where the slowest thread gets `ceil(iters / threads)`
//! iterations.

use super::SimError;

fn ceil_div(n: i64, d: i64) -> i64 {
    (n + d - 1) / d
}

/// Time with the outer loop parallelised over `outer_threads`.
pub fn analytic_outer(
    outer_iters: i64,
    inner_iters: i64,
    t_outer: f64,
    t_inner: f64,
    outer_threads: i64,
) -> f64 {
    ceil_div(outer_iters, outer_threads) as f64 * (t_outer + inner_iters as f64 * t_inner)
}

/// Time with the inner loop parallelised over `inner_threads`.
pub fn analytic_inner(
    outer_iters: i64,
    inner_iters: i64,
    t_outer: f64,
    t_inner: f64,
    inner_threads: i64,
) -> f64 {
    outer_iters as f64 * (t_outer + ceil_div(inner_iters, inner_threads) as f64 * t_inner)
}

/// Largest work between the loops for which parallelising the inner loop
/// with `inner_threads` beats parallelising the outer loop with
/// `outer_threads`, assuming evenly divided iterations.
pub fn threshold_outer_work(
    inner_iters: i64,
    t_inner: f64,
    outer_threads: i64,
    inner_threads: i64,
) -> Result<f64, SimError> {
    if outer_threads < 2 {
        return Err(SimError::Precondition(format!(
            "outer_threads must be at least 2, got {outer_threads}"
        )));
    }
    if inner_threads < outer_threads {
        return Err(SimError::Precondition(format!(
            "inner_threads ({inner_threads}) must not be smaller than outer_threads ({outer_threads})"
        )));
    }
    let to = outer_threads as f64;
    let ti = inner_threads as f64;
    Ok(inner_iters as f64 * t_inner * (1.0 / to - 1.0 / ti) / (1.0 - 1.0 / to))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn outer() {
        assert_eq!(analytic_outer(8, 16, 0.0, 1.0, 8), 16.0);
        assert_eq!(analytic_outer(8, 16, 0.0, 1.0, 6), 32.0);
        assert_relative_eq!(analytic_outer(4, 10, 0.5, 0.1, 2), 3.0);
    }

    #[test]
    fn inner() {
        assert_eq!(analytic_inner(8, 16, 0.0, 1.0, 6), 24.0);
        assert_eq!(analytic_inner(8, 16, 0.0, 1.0, 16), 8.0);
        assert_relative_eq!(analytic_inner(3, 7, 0.2, 0.1, 4), 1.2, max_relative = 1e-12);
    }

    #[test]
    fn threshold() {
        let t = threshold_outer_work(16, 0.0409, 8, 16).unwrap();
        assert_relative_eq!(t, 16.0 * 0.0409 / 14.0, max_relative = 1e-12);
        assert_eq!(threshold_outer_work(99, 3.0, 8, 8).unwrap(), 0.0);
        assert_relative_eq!(
            threshold_outer_work(16, 1.0, 8, 16).unwrap(),
            1.142857142857,
            epsilon = 1e-9
        );
        assert!(threshold_outer_work(16, 1.0, 1, 16).is_err());
        assert!(threshold_outer_work(16, 1.0, 8, 4).is_err());
    }
}
