//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the map runs on rayon, either on the ambient
//! pool or on a dedicated pool of the requested size. Output order always
//! follows the index order.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(count: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        None => Ok(run()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| crate::Error::InvalidParams(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(count: u64, _workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    Ok((0..count).map(f).collect())
}

/// Whether this build shards work across threads.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
