use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{AppError, AppResult};

pub const THREADS_ENV: &str = "SPECTRAL_POISSON_THREADS";

/// Worker pool capped by `SPECTRAL_POISSON_THREADS` when set.
pub fn pool() -> AppResult<ThreadPool> {
    let mut b = ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| AppError::config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(AppError::config(format!("{THREADS_ENV} must be positive")));
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}
