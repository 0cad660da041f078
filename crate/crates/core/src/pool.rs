use rayon::{ThreadPool, ThreadPoolBuilder};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "WAVEFRONT_LAB_THREADS";

/// Thread count from `WAVEFRONT_LAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Worker pool for fan-out work. Results are always assembled by index, so
/// the thread count never changes outputs.
pub fn worker_pool() -> ThreadPool {
    let mut b = ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().expect("failed to build worker pool")
}
