//! Threaded [`Executor`] backed by scoped OS threads.

use std::io::Write;
use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use magicvec_core::chunk::chunk_error;
use magicvec_core::{ChunkPlan, Error, Executor, Result};

pub const WORKERS_ENV: &str = "MAGICVEC_WORKERS";

/// Worker count: the flag wins, then `MAGICVEC_WORKERS`, then the number of
/// available cores.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    let from_env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidArgument(format!("{WORKERS_ENV}={v:?} is not a worker count"))
        })?),
        Err(_) => None,
    };
    let workers = flag
        .or(from_env)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    Ok(workers)
}

/// Pulls chunks from a shared counter on `workers` threads. Results come
/// back in chunk order; on failure the lowest failing chunk is reported.
#[derive(Debug)]
pub struct ThreadPool {
    workers: usize,
    progress: Option<String>,
}

impl ThreadPool {
    pub fn new(workers: usize) -> Self {
        Self {
            workers: workers.max(1),
            progress: None,
        }
    }

    /// Prints a chunk counter to stderr while running.
    pub fn with_progress(mut self, label: impl Into<String>) -> Self {
        self.progress = Some(label.into());
        self
    }
}

struct Progress<'a> {
    label: &'a str,
    total: usize,
    done: AtomicUsize,
    shown: Mutex<usize>,
}

impl Progress<'_> {
    fn tick(&self) {
        let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let percent = 100 * done / self.total.max(1);
        let mut shown = self.shown.lock().unwrap_or_else(|e| e.into_inner());
        if percent > *shown || done == self.total {
            *shown = percent;
            let mut err = std::io::stderr().lock();
            let _ = write!(err, "\r{}: {percent:3}% ({done}/{} chunks)", self.label, self.total);
            if done == self.total {
                let _ = writeln!(err);
            }
        }
    }
}

impl Executor for ThreadPool {
    fn workers(&self) -> usize {
        self.workers
    }

    fn map_chunks<T, F>(&self, plan: &ChunkPlan, task: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, Range<usize>) -> Result<T> + Sync,
    {
        let chunks = plan.chunks();
        let progress = self.progress.as_deref().map(|label| Progress {
            label,
            total: chunks.len(),
            done: AtomicUsize::new(0),
            shown: Mutex::new(0),
        });
        let next = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);

        let run = || {
            let mut local = Vec::new();
            loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(range) = chunks.get(i) else { break };
                let out = task(i, range.clone());
                if out.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                if let Some(p) = &progress {
                    p.tick();
                }
                local.push((i, out));
            }
            local
        };

        let threads = self.workers.min(chunks.len()).max(1);
        let mut collected: Vec<(usize, Result<T>)> = if threads == 1 {
            run()
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..threads).map(|_| s.spawn(run)).collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
                    .collect()
            })
        };
        collected.sort_by_key(|(i, _)| *i);

        let mut out = Vec::with_capacity(chunks.len());
        for (i, r) in collected {
            out.push(r.map_err(|e| chunk_error(i, e))?);
        }
        if out.len() != chunks.len() {
            return Err(Error::Consistency("a worker stopped without reporting an error".into()));
        }
        Ok(out)
    }
}
