//! Data-parallel fold over integer ranges.
//!
//! Every sweep in the crate (box enumeration, residue enumeration, grid
//! experiments) partitions its outermost coordinate and merges partial
//! results with an associative, commutative reduction. With the `parallel`
//! feature the partition is handed to rayon; without it, or in
//! [`ExecMode::Sequential`], the same fold runs on the calling thread.
//! Results are identical in both modes.

use std::ops::Range;
use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

static DEFAULT_MODE: AtomicU8 = AtomicU8::new(1);

impl Default for ExecMode {
    fn default() -> Self {
        match DEFAULT_MODE.load(Ordering::Relaxed) {
            0 => ExecMode::Sequential,
            _ => ExecMode::Parallel,
        }
    }
}

/// Sets the mode returned by `ExecMode::default()` for the whole process.
pub fn set_default_mode(mode: ExecMode) {
    DEFAULT_MODE.store(
        match mode {
            ExecMode::Sequential => 0,
            ExecMode::Parallel => 1,
        },
        Ordering::Relaxed,
    );
}

/// Folds `fold_op` over `range`, merging per-slice accumulators with `reduce_op`.
pub fn fold_range<T, ID, F, R>(
    mode: ExecMode,
    range: Range<i64>,
    identity: ID,
    fold_op: F,
    reduce_op: R,
) -> T
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, i64) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            range
                .into_par_iter()
                .fold(&identity, &fold_op)
                .reduce(&identity, &reduce_op)
        }
        _ => {
            let _ = &reduce_op;
            range.fold(identity(), fold_op)
        }
    }
}

/// Maps `f` over the items, preserving order.
pub fn map_items<I, O, F>(mode: ExecMode, items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let sum = |mode| fold_range(mode, -50..51, || 0i64, |acc, x| acc + x * x, |a, b| a + b);
        assert_eq!(sum(ExecMode::Sequential), sum(ExecMode::Parallel));
        assert_eq!(sum(ExecMode::Sequential), 2 * (50 * 51 * 101) / 6);
    }

    #[test]
    fn map_preserves_order() {
        let v: Vec<i32> = (0..100).collect();
        assert_eq!(map_items(ExecMode::Parallel, &v, |x| x * 2), map_items(ExecMode::Sequential, &v, |x| x * 2));
    }
}

/// One axis of an integer grid: `start, start + step, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axis {
    pub start: i64,
    pub end: i64,
    pub step: i64,
}

impl Axis {
    pub fn new(start: i64, end: i64) -> Self {
        Axis { start, end, step: 1 }
    }

    pub fn stepped(start: i64, end: i64, step: i64) -> Self {
        debug_assert!(step >= 1);
        Axis { start, end, step }
    }

    pub fn len(&self) -> u64 {
        if self.end < self.start {
            0
        } else {
            ((self.end - self.start) / self.step + 1) as u64
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn at(&self, i: i64) -> i64 {
        self.start + i * self.step
    }
}

/// Number of grid points, saturating.
pub fn grid_size(axes: &[Axis]) -> u128 {
    axes.iter()
        .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
}

/// Folds over every point of the grid. The first axis is the parallel one;
/// the remaining axes are walked by an odometer on each worker.
pub fn fold_grid<T, ID, F, R>(mode: ExecMode, axes: &[Axis], identity: ID, fold_op: F, reduce_op: R) -> T
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, &[i64]) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    if axes.is_empty() {
        return fold_op(identity(), &[]);
    }
    if axes.iter().any(Axis::is_empty) {
        return identity();
    }
    let first = axes[0];
    let rest = &axes[1..];
    fold_range(
        mode,
        0..first.len() as i64,
        &identity,
        |mut acc, i| {
            let mut point: Vec<i64> = Vec::with_capacity(axes.len());
            point.push(first.at(i));
            point.extend(rest.iter().map(|a| a.start));
            loop {
                acc = fold_op(acc, &point);
                // odometer step over axes 1..
                let mut k = axes.len() - 1;
                loop {
                    if k == 0 {
                        return acc;
                    }
                    let a = &axes[k];
                    if point[k] + a.step <= a.end {
                        point[k] += a.step;
                        break;
                    }
                    point[k] = a.start;
                    k -= 1;
                }
            }
        },
        &reduce_op,
    )
}

#[cfg(test)]
mod grid_tests {
    use super::*;

    #[test]
    fn grid_visits_every_point_once() {
        let axes = [Axis::new(-2, 2), Axis::stepped(-3, 3, 2), Axis::new(0, 1)];
        let n = fold_grid(ExecMode::Parallel, &axes, || 0u64, |c, _| c + 1, |a, b| a + b);
        assert_eq!(n as u128, grid_size(&axes));
        assert_eq!(n, 5 * 4 * 2);
        let s = fold_grid(ExecMode::Sequential, &axes, || 0i64, |c, p| c + p[1] * p[1], |a, b| a + b);
        assert_eq!(s, 5 * 2 * (9 + 1 + 1 + 9));
    }
}
