//! Order-preserving map over trial indices, sequential or on a rayon pool.

/// How independent work items are scheduled.
///
/// Results are always returned in index order, so anything aggregated from
/// them is identical across executors and thread counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Executor {
    Sequential,
    /// Rayon work-stealing; `threads: None` uses the global pool. Falls back to
    /// sequential execution when the `parallel` feature is off.
    Parallel { threads: Option<usize> },
}

impl Default for Executor {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Executor::Parallel { threads: None }
        } else {
            Executor::Sequential
        }
    }
}

impl Executor {
    /// `[f(0), f(1), ..., f(count - 1)]`.
    pub fn map<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match *self {
            Executor::Sequential => (0..count).map(f).collect(),
            Executor::Parallel { threads } => parallel_map(threads, count, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(threads: Option<usize>, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..count).into_par_iter().map(&f).collect();
    match threads {
        None => run(),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => pool.install(run),
            // Thread spawn failure: fall back to whatever pool exists.
            Err(_) => run(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(_threads: Option<usize>, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
