//! Data-parallel map over indexed items.
//!
//! With the `parallel` feature, work fans out over a rayon pool; without it
//! every [`Execution`] runs sequentially. Results are always returned in
//! input order, and per-item randomness is derived from the item index, so
//! outputs never depend on the worker count.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            None => Execution::Parallel,
            Some(0) | Some(1) => Execution::Sequential,
            Some(n) => Execution::Workers(n),
        }
    }
}

/// `f(index, item)` over `items`, collected in order. Fails if any item fails.
pub fn try_map_indexed<T, R, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    match exec {
        Execution::Sequential => sequential(items, f),
        #[cfg(feature = "parallel")]
        Execution::Parallel => par(items, f),
        #[cfg(feature = "parallel")]
        Execution::Workers(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| par(items, f))
        }
        #[cfg(not(feature = "parallel"))]
        _ => sequential(items, f),
    }
}

fn sequential<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(usize, &T) -> Result<R>,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(feature = "parallel")]
fn par<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_preserved_for_every_mode() {
        let items: Vec<u64> = (0..1000).collect();
        let expect: Vec<u64> = items.iter().map(|x| x * x + 1).collect();
        for exec in [Execution::Sequential, Execution::Parallel, Execution::Workers(3)] {
            let got = try_map_indexed(&items, exec, |i, x| Ok(x * x + i as u64 - *x + 1)).unwrap();
            assert_eq!(got, expect, "{exec:?}");
        }
    }

    #[test]
    fn errors_propagate() {
        let items = [1, 2, 3];
        let r = try_map_indexed(&items, Execution::Parallel, |_, &x| {
            if x == 2 {
                Err(Error::InvalidArgument("two".into()))
            } else {
                Ok(x)
            }
        });
        assert!(r.is_err());
    }
}
