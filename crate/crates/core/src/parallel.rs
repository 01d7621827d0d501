//! Worker-pool control. Every parallel computation in the crate collects
//! its results in task order, so the worker count only affects wall time.

use crate::error::{Error, Result};

/// Environment variable read by [`workers_from_env`].
pub const WORKERS_ENV: &str = "POPGRID_WORKERS";

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::config("worker count must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config(format!("cannot build a pool of {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Parses `POPGRID_WORKERS` if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        },
    }
}
