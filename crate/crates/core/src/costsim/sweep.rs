use super::engine::simulate_forced;
use super::program::{OverheadModel, SimProgram};
use super::SimError;
use std::cmp::Ordering;

/// One grid point of a crossing sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub t_outer: f64,
    /// Per-repeat time with the outer level parallel on `threads_outer`.
    pub outer: f64,
    /// Per-repeat time with the inner level parallel on `threads_inner`.
    pub inner: f64,
}

/// Simulates both static strategies for each `pre_work` value of the
/// outer level of a two-level template.
pub fn sweep(
    template: &SimProgram,
    threads_outer: usize,
    threads_inner: usize,
    t_outer_grid: &[f64],
) -> Result<Vec<SweepPoint>, SimError> {
    if template.levels.len() != 2 {
        return Err(SimError::Precondition(format!(
            "sweep needs a two-level program, got {} levels",
            template.levels.len()
        )));
    }
    if template.overheads != OverheadModel::default() {
        return Err(SimError::Precondition(
            "sweep needs a program with zero overheads".into(),
        ));
    }
    if t_outer_grid.is_empty()
        || t_outer_grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(SimError::Grid(
            "the grid must be non-empty and strictly increasing".into(),
        ));
    }
    let mut p = template.clone();
    t_outer_grid
        .iter()
        .map(|&t| {
            p.levels[0].pre_work = t;
            let outer = simulate_forced(&p, threads_outer, Some(0))?.last_repeat_time();
            let inner = simulate_forced(&p, threads_inner, Some(1))?.last_repeat_time();
            Ok(SweepPoint {
                t_outer: t,
                outer,
                inner,
            })
        })
        .collect()
}

/// Smallest grid value of the outer level's `pre_work` at which
/// parallelising the outer loop is at least as fast as parallelising the
/// inner one.
pub fn sweep_crossing(
    template: &SimProgram,
    threads_outer: usize,
    threads_inner: usize,
    t_outer_grid: &[f64],
) -> Result<f64, SimError> {
    let points = sweep(template, threads_outer, threads_inner, t_outer_grid)?;
    crossing(&points)
}

/// The first point where the outer strategy is no slower than the inner.
pub fn crossing(points: &[SweepPoint]) -> Result<f64, SimError> {
    let i = points
        .iter()
        .position(|p| p.outer <= p.inner)
        .ok_or_else(|| {
            SimError::Grid(format!(
                "inner parallelisation is faster at every grid point up to {}",
                points.last().map_or(0.0, |p| p.t_outer)
            ))
        })?;
    if i == 0 && points[0].t_outer > 0.0 {
        return Err(SimError::Grid(format!(
            "outer parallelisation is already no slower at the first grid point {}",
            points[0].t_outer
        )));
    }
    Ok(points[i].t_outer)
}

/// `start, start + step, ...` up to and including `stop` (within half a
/// step), computed by index to avoid accumulating rounding error.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, SimError> {
    if step.is_nan()
        || step <= 0.0
        || stop.is_nan()
        || stop < start
        || !start.is_finite()
        || !stop.is_finite()
    {
        return Err(SimError::Grid(format!(
            "invalid grid start={start} stop={stop} step={step}"
        )));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_at_zero_when_inner_never_helps() {
        let g = grid(0.0, 0.1, 0.001).unwrap();
        let p = SimProgram::synthetic(8, 16, 0.0, 0.0);
        assert_eq!(sweep_crossing(&p, 8, 16, &g).unwrap(), 0.0);
        let p = SimProgram::synthetic(8, 16, 0.0, 0.0409);
        assert_eq!(sweep_crossing(&p, 8, 8, &g).unwrap(), 0.0);
    }

    #[test]
    fn unbracketed_grid() {
        let p = SimProgram::synthetic(8, 16, 0.0, 0.0409);
        let g = grid(0.0, 0.01, 0.001).unwrap();
        assert!(matches!(
            sweep_crossing(&p, 8, 16, &g),
            Err(SimError::Grid(_))
        ));
        let g = grid(0.1, 0.2, 0.001).unwrap();
        assert!(matches!(
            sweep_crossing(&p, 8, 16, &g),
            Err(SimError::Grid(_))
        ));
    }

    #[test]
    fn grid_points() {
        let g = grid(0.0, 0.1, 0.001).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[47], 0.047);
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }
}
