//! Mode-level data parallelism.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool;
//! without it, or with [`Workers::Sequential`], everything runs on the
//! calling thread. Results are always assembled by index, so the output does
//! not depend on the worker count.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Workers {
    /// Calling thread only.
    Sequential,
    /// Rayon's global pool.
    #[default]
    Auto,
    /// A dedicated pool of this many threads.
    Fixed(usize),
}

impl Workers {
    /// `0` means automatic, `1` sequential.
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => Workers::Auto,
            1 => Workers::Sequential,
            n => Workers::Fixed(n),
        }
    }

    pub fn count(self) -> usize {
        match self {
            Workers::Sequential => 1,
            Workers::Fixed(n) => n.max(1),
            Workers::Auto => available(),
        }
    }

    /// `out[i] = f(i, &mut items[i])` for every item, order-preserving.
    pub fn map_mut<T, R, F>(self, items: &mut [T], f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(usize, &mut T) -> R + Sync + Send,
    {
        match self {
            Workers::Sequential => items.iter_mut().enumerate().map(|(i, t)| f(i, t)).collect(),
            _ => par_map_mut(self, items, f),
        }
    }

    /// `out[i] = f(i)` for `i in 0..n`, order-preserving.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Workers::Sequential => (0..n).map(f).collect(),
            _ => par_map_range(self, n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn available() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn available() -> usize {
    1
}

#[cfg(feature = "parallel")]
fn in_pool<R: Send>(workers: Workers, op: impl FnOnce() -> R + Send) -> R {
    match workers {
        Workers::Fixed(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        },
        _ => op(),
    }
}

#[cfg(feature = "parallel")]
fn par_map_mut<T, R, F>(workers: Workers, items: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, &mut T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    in_pool(workers, || {
        items
            .par_iter_mut()
            .enumerate()
            .map(|(i, t)| f(i, t))
            .collect()
    })
}

#[cfg(feature = "parallel")]
fn par_map_range<R, F>(workers: Workers, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    in_pool(workers, || (0..n).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
fn par_map_mut<T, R, F>(_: Workers, items: &mut [T], f: F) -> Vec<R>
where
    F: Fn(usize, &mut T) -> R,
{
    items.iter_mut().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map_range<R, F>(_: Workers, n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}
