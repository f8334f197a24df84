//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (on by default) grid sweeps and enumerations
//! fan out over rayon's thread pool. Without it, [`Execution::Parallel`]
//! silently runs sequentially. Results are bitwise identical either way: maps
//! preserve input order and sums use a fixed pairwise tree.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Below this many items a pairwise sum is evaluated without forking.
const SUM_LEAF: usize = 64;

impl Execution {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Sums `f(0) + … + f(n-1)` componentwise over a balanced binary tree
    /// whose shape depends only on `n`.
    pub fn pairwise_sum<const K: usize, F>(self, n: usize, f: &F) -> [f64; K]
    where
        F: Fn(usize) -> [f64; K] + Sync,
    {
        self.sum_range(0, n, f)
    }

    fn sum_range<const K: usize, F>(self, lo: usize, hi: usize, f: &F) -> [f64; K]
    where
        F: Fn(usize) -> [f64; K] + Sync,
    {
        if hi - lo <= SUM_LEAF {
            return leaf_sum(lo, hi, f);
        }
        let mid = lo + (hi - lo) / 2;
        let (a, b) = match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => rayon::join(|| self.sum_range(lo, mid, f), || self.sum_range(mid, hi, f)),
            _ => (self.sum_range(lo, mid, f), self.sum_range(mid, hi, f)),
        };
        let mut out = [0.0; K];
        for k in 0..K {
            out[k] = a[k] + b[k];
        }
        out
    }
}

fn leaf_sum<const K: usize, F>(lo: usize, hi: usize, f: &F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K],
{
    if hi - lo == 1 {
        return f(lo);
    }
    if hi == lo {
        return [0.0; K];
    }
    let mid = lo + (hi - lo) / 2;
    let a = leaf_sum(lo, mid, f);
    let b = leaf_sum(mid, hi, f);
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = a[k] + b[k];
    }
    out
}
