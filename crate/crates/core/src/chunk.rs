//! Chunked reductions over an index range.
//!
//! A [`ChunkPlan`] splits `[0, total)` into ordered, disjoint half-open
//! ranges. An [`Executor`] runs a pure task on every chunk and returns the
//! partial values in chunk order; [`chunked_reduce`] then folds them in
//! ascending chunk order, so the merge is deterministic regardless of how
//! many workers ran the tasks.
//!
//! This crate only ships the sequential [`Serial`] executor. Threaded
//! executors live outside the `no_std` core.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// Chunks per worker used by [`ChunkPlan::for_workers`].
pub const CHUNKS_PER_WORKER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    total: usize,
    chunks: Vec<Range<usize>>,
}

impl ChunkPlan {
    /// Splits `[0, total)` into `count` near-equal chunks (at most `total`).
    pub fn new(total: usize, count: usize) -> Self {
        let count = count.clamp(1, total.max(1));
        let base = total / count;
        let extra = total % count;
        let mut chunks = Vec::with_capacity(count);
        let mut start = 0;
        for i in 0..count {
            let len = base + usize::from(i < extra);
            chunks.push(start..start + len);
            start += len;
        }
        if total == 0 {
            chunks.clear();
        }
        Self { total, chunks }
    }

    /// Chunks of at most `size` elements.
    pub fn with_chunk_size(total: usize, size: usize) -> Self {
        let size = size.max(1);
        let chunks = (0..total)
            .step_by(size)
            .map(|s| s..(s + size).min(total))
            .collect();
        Self { total, chunks }
    }

    /// Default plan for a given worker count: `8 × workers` chunks.
    pub fn for_workers(total: usize, workers: usize) -> Self {
        Self::new(total, CHUNKS_PER_WORKER * workers.max(1))
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn chunks(&self) -> &[Range<usize>] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

/// Runs chunk tasks, possibly concurrently.
///
/// Implementations must return the partial values indexed by chunk, and
/// must report a failing chunk as [`Error::Chunk`].
pub trait Executor: Sync {
    fn workers(&self) -> usize;

    fn map_chunks<T, F>(&self, plan: &ChunkPlan, task: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, Range<usize>) -> Result<T> + Sync;
}

/// Runs every chunk on the calling thread, in order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn workers(&self) -> usize {
        1
    }

    fn map_chunks<T, F>(&self, plan: &ChunkPlan, task: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, Range<usize>) -> Result<T> + Sync,
    {
        plan.chunks()
            .iter()
            .enumerate()
            .map(|(i, r)| task(i, r.clone()).map_err(|e| chunk_error(i, e)))
            .collect()
    }
}

pub fn chunk_error(chunk: usize, cause: Error) -> Error {
    Error::Chunk {
        chunk,
        cause: Box::new(cause),
    }
}

/// Runs `task` over every chunk and merges the partials in chunk order.
pub fn chunked_reduce<E, T, F, M>(exec: &E, plan: &ChunkPlan, task: F, init: T, merge: M) -> Result<T>
where
    E: Executor + ?Sized,
    T: Send,
    F: Fn(Range<usize>) -> Result<T> + Sync,
    M: FnMut(T, T) -> T,
{
    let partials = exec.map_chunks(plan, |_, r| task(r))?;
    Ok(partials.into_iter().fold(init, merge))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if crate::math::abs(self.sum) >= crate::math::abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: NeumaierSum) -> Self {
        self.add(other.sum);
        self.add(other.comp);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn sum_of_indices_any_chunking() {
        for count in [1, 2, 3, 7, 64, 1000, 5000] {
            let plan = ChunkPlan::new(1000, count);
            let total = chunked_reduce(&Serial, &plan, |r| Ok(r.sum::<usize>()), 0, |a, b| a + b).unwrap();
            assert_eq!(total, 499_500);
        }
    }

    #[test]
    fn single_chunk_is_serial_bit_identical() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let mut serial = NeumaierSum::new();
        xs.iter().for_each(|&x| serial.add(x));
        let plan = ChunkPlan::new(xs.len(), 1);
        let got = chunked_reduce(
            &Serial,
            &plan,
            |r| {
                let mut s = NeumaierSum::new();
                xs[r].iter().for_each(|&x| s.add(x));
                Ok(s)
            },
            NeumaierSum::new(),
            NeumaierSum::merge,
        )
        .unwrap();
        assert_eq!(got.value().to_bits(), serial.value().to_bits());
    }

    #[test]
    fn failure_identifies_chunk() {
        let plan = ChunkPlan::new(10, 5);
        let err = chunked_reduce(
            &Serial,
            &plan,
            |r| if r.contains(&6) { Err(Error::SequenceExhausted) } else { Ok(1) },
            0,
            |a, b| a + b,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Chunk { chunk: 3, .. }));
        assert_eq!(err.root_cause(), &Error::SequenceExhausted);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = NeumaierSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn empty_range() {
        let plan = ChunkPlan::new(0, 4);
        assert!(plan.is_empty());
        assert_eq!(ChunkPlan::with_chunk_size(5, 2).chunks(), &[0..2, 2..4, 4..5]);
        assert_eq!(vec![0..5], ChunkPlan::new(5, 1).chunks().to_vec());
    }

    proptest! {
        #[test]
        fn plans_cover_range_in_order(total in 0usize..5000, count in 1usize..300) {
            let plan = ChunkPlan::new(total, count);
            let mut next = 0;
            for r in plan.chunks() {
                prop_assert_eq!(r.start, next);
                prop_assert!(r.end > r.start);
                next = r.end;
            }
            prop_assert_eq!(next, total);
        }
    }
}
