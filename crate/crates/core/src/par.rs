//! Execution strategy for per-sample maps.
//!
//! With the `parallel` feature (on by default) independent per-sample work is
//! spread over the rayon thread pool. Without it, or when
//! [`Execution::Sequential`] is requested, the same closures run in order on
//! the calling thread. Results are identical either way: every map writes
//! into its own index.

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

impl Execution {
    /// Evaluates `f(i)` for `i in 0..n` and collects the results in index order.
    pub fn map_indices<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps over a slice, preserving order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = Execution::Sequential.map_indices(1000, f);
        let b = Execution::Parallel.map_indices(1000, f);
        assert_eq!(a, b);
        let xs: Vec<f64> = (0..17).map(|i| i as f64).collect();
        assert_eq!(
            Execution::Sequential.map_slice(&xs, |x| x * 2.0),
            Execution::Parallel.map_slice(&xs, |x| x * 2.0)
        );
    }
}
