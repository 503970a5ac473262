//! Executor contract and the skeleton layer built on it.
//!
//! An [`Executor`] knows how to hand out disjoint subranges of an index range
//! to a body, possibly in parallel. Everything else (parallel for, reduce,
//! scan, chunked mutation of an output buffer, recursive fork-join) is written
//! once here against that contract, so each strategy only has to implement
//! [`Executor::for_each_range`].

use alloc::vec::Vec;
use core::cell::UnsafeCell;
use core::fmt;
use core::ops::ControlFlow;
use core::str::FromStr;
use core::sync::atomic::{AtomicBool, Ordering};

/// Half-open index range `[begin, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexRange {
    pub begin: usize,
    pub end: usize,
}

impl IndexRange {
    /// # Panics
    /// If `begin > end`.
    pub fn new(begin: usize, end: usize) -> Self {
        assert!(begin <= end, "invalid range {begin}..{end}");
        IndexRange { begin, end }
    }

    pub fn upto(end: usize) -> Self {
        IndexRange { begin: 0, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.begin
    }

    pub fn is_empty(&self) -> bool {
        self.begin == self.end
    }

    /// Splits at `begin + len / 2`.
    pub fn halves(&self) -> (IndexRange, IndexRange) {
        let middle = self.begin + self.len() / 2;
        (IndexRange { begin: self.begin, end: middle }, IndexRange { begin: middle, end: self.end })
    }

    pub fn iter(&self) -> core::ops::Range<usize> {
        self.begin..self.end
    }
}

impl From<core::ops::Range<usize>> for IndexRange {
    fn from(r: core::ops::Range<usize>) -> Self {
        IndexRange::new(r.start, r.end)
    }
}

/// The execution strategies: one sequential baseline, four paradigm
/// stand-ins, and the per-item spawning anti-pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Sequential,
    /// Static contiguous blocks, one per thread (forall / cilk_for style).
    BlockedParFor,
    /// Recursive halving down to the grain, halves run as parallel tasks.
    ForkJoin,
    /// One producer feeding a bounded queue drained by NP workers.
    WorkerPool,
    /// Library skeleton with adaptive splitting over grain-sized chunks.
    Skeleton,
    /// Divide and conquer down to single items, one task per item.
    SpawnPerItem,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Sequential,
        StrategyKind::BlockedParFor,
        StrategyKind::ForkJoin,
        StrategyKind::WorkerPool,
        StrategyKind::Skeleton,
        StrategyKind::SpawnPerItem,
    ];

    /// Every strategy except [`StrategyKind::Sequential`].
    pub const PARALLEL: [StrategyKind; 5] = [
        StrategyKind::BlockedParFor,
        StrategyKind::ForkJoin,
        StrategyKind::WorkerPool,
        StrategyKind::Skeleton,
        StrategyKind::SpawnPerItem,
    ];

    /// The four paradigm stand-ins used by default campaigns.
    pub const PARADIGMS: [StrategyKind; 4] =
        [StrategyKind::BlockedParFor, StrategyKind::ForkJoin, StrategyKind::WorkerPool, StrategyKind::Skeleton];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Sequential => "sequential",
            StrategyKind::BlockedParFor => "blocked-for",
            StrategyKind::ForkJoin => "fork-join",
            StrategyKind::WorkerPool => "worker-pool",
            StrategyKind::Skeleton => "skeleton",
            StrategyKind::SpawnPerItem => "spawn-per-item",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownStrategy;

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(
            "unknown strategy (expected one of: sequential, blocked-for, fork-join, \
             worker-pool, skeleton, spawn-per-item)",
        )
    }
}

impl core::error::Error for UnknownStrategy {}

impl FromStr for StrategyKind {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL.into_iter().find(|k| k.name() == s).ok_or(UnknownStrategy)
    }
}

/// Strategy selection plus its tuning knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExecStrategy {
    pub kind: StrategyKind,
    threads: usize,
    grain: Option<usize>,
}

impl ExecStrategy {
    /// `threads` is clamped to at least 1.
    pub fn new(kind: StrategyKind, threads: usize) -> Self {
        ExecStrategy { kind, threads: threads.max(1), grain: None }
    }

    pub fn sequential() -> Self {
        ExecStrategy::new(StrategyKind::Sequential, 1)
    }

    /// Fixes the minimum chunk size instead of deriving it from the range
    /// length. `grain` is clamped to at least 1.
    pub fn with_grain(mut self, grain: usize) -> Self {
        self.grain = Some(grain.max(1));
        self
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn grain(&self) -> Option<usize> {
        self.grain
    }

    pub fn grain_for(&self, len: usize) -> usize {
        self.grain.unwrap_or_else(|| default_grain(len, self.threads))
    }
}

/// `max(1, len / (8 * threads))`.
pub fn default_grain(len: usize, threads: usize) -> usize {
    (len / (8 * threads.max(1))).max(1)
}

/// A way of running a body over the subranges of an index range.
///
/// # Safety
///
/// Implementations must guarantee, for every call of `for_each_range`:
///
/// * the ranges passed to `body` are pairwise disjoint and lie inside `range`;
/// * unless some invocation returned `Break` or panicked, together they cover
///   `range` exactly;
/// * every invocation of `body` has returned (happens-before) by the time
///   `for_each_range` returns.
///
/// The skeleton functions in this module hand out unsynchronised mutable
/// access to per-index output slots and rely on these guarantees for
/// soundness.
pub unsafe trait Executor: Sync {
    fn threads(&self) -> usize;

    /// Minimum chunk length for a range of `len` indices.
    fn grain_for(&self, len: usize) -> usize {
        default_grain(len, self.threads())
    }

    /// Invokes `body` over a partition of `range`. Once an invocation returns
    /// `Break`, no further subranges need to be started.
    fn for_each_range(&self, range: IndexRange, body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync));

    /// Runs both closures, possibly in parallel, returning after both have.
    fn join(&self, a: &(dyn Fn() + Sync), b: &(dyn Fn() + Sync)) {
        a();
        b();
    }
}

/// Runs everything inline on the calling thread, in ascending index order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

unsafe impl Executor for Sequential {
    fn threads(&self) -> usize {
        1
    }

    fn grain_for(&self, len: usize) -> usize {
        len.max(1)
    }

    fn for_each_range(&self, range: IndexRange, body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync)) {
        if !range.is_empty() {
            let _ = body(range);
        }
    }
}

unsafe impl<E: Executor + ?Sized> Executor for &E {
    fn threads(&self) -> usize {
        (**self).threads()
    }

    fn grain_for(&self, len: usize) -> usize {
        (**self).grain_for(len)
    }

    fn for_each_range(&self, range: IndexRange, body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync)) {
        (**self).for_each_range(range, body)
    }

    fn join(&self, a: &(dyn Fn() + Sync), b: &(dyn Fn() + Sync)) {
        (**self).join(a, b)
    }
}

/// Write-once slots filled by disjoint executor invocations.
struct Slots<T> {
    cells: Vec<UnsafeCell<Option<T>>>,
}

// SAFETY: each slot is written by at most one invocation (executor contract)
// and only read after `for_each_range` returned.
unsafe impl<T: Send> Sync for Slots<T> {}

impl<T> Slots<T> {
    fn new(n: usize) -> Self {
        let mut cells = Vec::with_capacity(n);
        cells.resize_with(n, || UnsafeCell::new(None));
        Slots { cells }
    }

    /// # Safety
    /// No other access to slot `i` may be live.
    unsafe fn put(&self, i: usize, value: T) {
        *self.cells[i].get() = Some(value);
    }

    fn into_values(self) -> impl Iterator<Item = Option<T>> {
        self.cells.into_iter().map(UnsafeCell::into_inner)
    }
}

/// Records the first error raised by concurrent invocations.
struct FirstError<E> {
    claimed: AtomicBool,
    slot: UnsafeCell<Option<E>>,
}

// SAFETY: the slot is written only by the thread that won the `claimed` swap
// and read after the executor's barrier.
unsafe impl<E: Send> Sync for FirstError<E> {}

impl<E> FirstError<E> {
    fn new() -> Self {
        FirstError { claimed: AtomicBool::new(false), slot: UnsafeCell::new(None) }
    }

    fn is_set(&self) -> bool {
        self.claimed.load(Ordering::Acquire)
    }

    fn record(&self, err: E) {
        if !self.claimed.swap(true, Ordering::AcqRel) {
            // SAFETY: only the first claimant reaches this point.
            unsafe { *self.slot.get() = Some(err) };
        }
    }

    fn into_result(self) -> Result<(), E> {
        match self.slot.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Calls `body` exactly once per index of `range`; returns after all calls.
pub fn par_for<E, F>(ex: &E, range: IndexRange, body: F)
where
    E: Executor + ?Sized,
    F: Fn(usize) + Sync,
{
    ex.for_each_range(range, &|sub| {
        sub.iter().for_each(&body);
        ControlFlow::Continue(())
    });
}

/// Fallible [`par_for`]: the first error wins and stops further work.
pub fn try_par_for<E, F, Err>(ex: &E, range: IndexRange, body: F) -> Result<(), Err>
where
    E: Executor + ?Sized,
    F: Fn(usize) -> Result<(), Err> + Sync,
    Err: Send,
{
    let first = FirstError::new();
    ex.for_each_range(range, &|sub| {
        for i in sub.iter() {
            if first.is_set() {
                return ControlFlow::Break(());
            }
            if let Err(e) = body(i) {
                first.record(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    first.into_result()
}

fn chunk_count(len: usize, grain: usize) -> usize {
    len.div_ceil(grain.max(1))
}

fn chunk_of(range: IndexRange, grain: usize, c: usize) -> IndexRange {
    let begin = range.begin + c * grain;
    IndexRange { begin, end: (begin + grain).min(range.end) }
}

/// Folds `map` over `range` with `combine`. Chunks are reduced in parallel
/// and recombined in range order, so only associativity is required.
pub fn par_reduce<E, T, M, C>(ex: &E, range: IndexRange, identity: T, map: M, combine: C) -> T
where
    E: Executor + ?Sized,
    T: Clone + Send + Sync,
    M: Fn(usize) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    if range.is_empty() {
        return identity;
    }
    let grain = ex.grain_for(range.len());
    let chunks = chunk_count(range.len(), grain);
    let partials = Slots::new(chunks);
    par_for(ex, IndexRange::upto(chunks), |c| {
        let acc = chunk_of(range, grain, c).iter().fold(identity.clone(), |acc, i| combine(acc, map(i)));
        // SAFETY: chunk `c` is visited by exactly one invocation.
        unsafe { partials.put(c, acc) };
    });
    partials.into_values().map(|v| v.expect("every chunk reduced")).fold(identity, &combine)
}

/// Inclusive scan: `out[i] = values[0] op ... op values[i]`.
pub fn par_scan<E, T, Op>(ex: &E, values: &[T], identity: T, op: Op) -> Vec<T>
where
    E: Executor + ?Sized,
    T: Clone + Send + Sync,
    Op: Fn(&T, &T) -> T + Sync,
{
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let range = IndexRange::upto(n);
    let grain = ex.grain_for(n);
    let chunks = chunk_count(n, grain);

    // Per-chunk totals, then an exclusive prefix over them.
    let totals = Slots::new(chunks);
    par_for(ex, IndexRange::upto(chunks), |c| {
        let sub = chunk_of(range, grain, c);
        let total = values[sub.begin..sub.end].iter().fold(identity.clone(), |acc, v| op(&acc, v));
        // SAFETY: one writer per chunk.
        unsafe { totals.put(c, total) };
    });
    let mut offsets = Vec::with_capacity(chunks);
    let mut running = identity.clone();
    for total in totals.into_values() {
        let total = total.expect("every chunk totalled");
        offsets.push(running.clone());
        running = op(&running, &total);
    }

    let mut out = alloc::vec![identity; n];
    par_chunks_mut(ex, &mut out, grain, |c, dst| {
        let base = c * grain;
        let mut acc = offsets[c].clone();
        for (k, slot) in dst.iter_mut().enumerate() {
            acc = op(&acc, &values[base + k]);
            *slot = acc.clone();
        }
    });
    out
}

struct SendPtr<T>(*mut T);

// SAFETY: used only to hand out disjoint subslices, see `par_chunks_mut`.
unsafe impl<T: Send> Sync for SendPtr<T> {}
unsafe impl<T: Send> Send for SendPtr<T> {}

impl<T> SendPtr<T> {
    fn get(&self) -> *mut T {
        self.0
    }
}

/// Splits `data` into consecutive chunks of `chunk_len` (the last may be
/// shorter) and calls `body(chunk_index, chunk)` for each, possibly in
/// parallel.
///
/// # Panics
/// If `chunk_len == 0` and `data` is non-empty.
pub fn par_chunks_mut<E, T, F>(ex: &E, data: &mut [T], chunk_len: usize, body: F)
where
    E: Executor + ?Sized,
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    let len = data.len();
    if len == 0 {
        return;
    }
    assert!(chunk_len > 0, "chunk length must be positive");
    let chunks = chunk_count(len, chunk_len);
    let base = SendPtr(data.as_mut_ptr());
    par_for(ex, IndexRange::upto(chunks), |c| {
        let start = c * chunk_len;
        let end = (start + chunk_len).min(len);
        // SAFETY: chunk indices are disjoint per the executor contract, so the
        // subslices never alias; `data` is exclusively borrowed for the call.
        let chunk = unsafe { core::slice::from_raw_parts_mut(base.get().add(start), end - start) };
        body(c, chunk);
    });
}

/// Recursively halves `range` until a piece is at most `grain` long, running
/// the halves through [`Executor::join`]. Returns after every leaf has run.
pub fn fork_join<E, F>(ex: &E, range: IndexRange, grain: usize, body: F)
where
    E: Executor + ?Sized,
    F: Fn(IndexRange) + Sync,
{
    let stop = AtomicBool::new(false);
    fork_join_ranges(
        ex,
        range,
        grain,
        &|r| {
            body(r);
            ControlFlow::Continue(())
        },
        &stop,
    );
}

/// Building block for fork-join executors: like [`fork_join`] but honours
/// `Break` through the shared `stop` flag.
pub fn fork_join_ranges<E>(
    ex: &E,
    range: IndexRange,
    grain: usize,
    body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync),
    stop: &AtomicBool,
) where
    E: Executor + ?Sized,
{
    if range.is_empty() || stop.load(Ordering::Relaxed) {
        return;
    }
    if range.len() <= grain.max(1) {
        if body(range).is_break() {
            stop.store(true, Ordering::Relaxed);
        }
        return;
    }
    let (lo, hi) = range.halves();
    ex.join(&|| fork_join_ranges(ex, lo, grain, body, stop), &|| fork_join_ranges(ex, hi, grain, body, stop));
}

#[cfg(test)]
pub(crate) mod testing {
    //! Single-threaded executors that exercise the contract in odd ways.

    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Mutex;

    /// Splits the range into random pieces and visits them in random order.
    pub struct Shuffled {
        rng: Mutex<ChaCha8Rng>,
        pub threads: usize,
    }

    impl Shuffled {
        pub fn new(seed: u64, threads: usize) -> Self {
            Shuffled { rng: Mutex::new(ChaCha8Rng::seed_from_u64(seed)), threads }
        }
    }

    unsafe impl Executor for Shuffled {
        fn threads(&self) -> usize {
            self.threads
        }

        fn for_each_range(&self, range: IndexRange, body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync)) {
            let mut pieces = std::vec::Vec::new();
            {
                let mut rng = self.rng.lock().unwrap();
                let mut at = range.begin;
                while at < range.end {
                    let step = rng.random_range(1..=(range.end - at).min(7));
                    pieces.push(IndexRange::new(at, at + step));
                    at += step;
                }
                pieces.shuffle(&mut *rng);
            }
            for p in pieces {
                if body(p).is_break() {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::Shuffled;
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use std::sync::atomic::AtomicUsize;
    use std::sync::Mutex;

    #[test]
    fn empty_range_invokes_nothing() {
        let calls = AtomicUsize::new(0);
        par_for(&Sequential, IndexRange::upto(0), |_| {
            calls.fetch_add(1, Ordering::Relaxed);
        });
        assert_eq!(calls.load(Ordering::Relaxed), 0);
    }

    #[test]
    fn sequential_visits_in_order() {
        let seen = Mutex::new(Vec::new());
        par_for(&Sequential, IndexRange::new(3, 9), |i| seen.lock().unwrap().push(i));
        assert_eq!(*seen.lock().unwrap(), vec![3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn shuffled_covers_each_index_once() {
        let ex = Shuffled::new(7, 4);
        let tally: Vec<AtomicUsize> = (0..100).map(|_| AtomicUsize::new(0)).collect();
        par_for(&ex, IndexRange::upto(100), |i| {
            tally[i].fetch_add(1, Ordering::Relaxed);
        });
        assert!(tally.iter().all(|t| t.load(Ordering::Relaxed) == 1));
    }

    #[test]
    fn reduce_sum_closed_form() {
        for ex in [&Shuffled::new(1, 3) as &dyn Executor, &Sequential] {
            let s = par_reduce(ex, IndexRange::upto(100), 0u64, |i| i as u64, |a, b| a + b);
            assert_eq!(s, 100 * 99 / 2);
        }
        assert_eq!(par_reduce(&Sequential, IndexRange::upto(0), 17u32, |_| 1, |a, b| a + b), 17);
    }

    #[test]
    fn reduce_preserves_range_order() {
        // String concatenation is associative but not commutative.
        let ex = Shuffled::new(3, 4);
        let s = par_reduce(
            &ex,
            IndexRange::upto(30),
            alloc::string::String::new(),
            |i| alloc::format!("{},", i),
            |a, b| a + &b,
        );
        let expected: alloc::string::String = (0..30).map(|i| alloc::format!("{},", i)).collect();
        assert_eq!(s, expected);
    }

    #[test]
    fn scan_examples() {
        assert_eq!(par_scan(&Sequential, &[1, 1, 1, 1], 0, |a, b| a + b), vec![1, 2, 3, 4]);
        assert!(par_scan(&Sequential, &[] as &[i32], 0, |a, b| a + b).is_empty());
    }

    #[test]
    fn try_par_for_surfaces_error() {
        let r = try_par_for(&Sequential, IndexRange::upto(10), |i| if i == 4 { Err(i) } else { Ok(()) });
        assert_eq!(r, Err(4));
        let seen = AtomicUsize::new(0);
        let _ = try_par_for(&Sequential, IndexRange::upto(10), |i| {
            seen.fetch_add(1, Ordering::Relaxed);
            if i == 4 {
                Err(())
            } else {
                Ok(())
            }
        });
        assert_eq!(seen.load(Ordering::Relaxed), 5, "work after the failure is skipped");
    }

    #[test]
    fn fork_join_leaves_partition_range() {
        let leaves = Mutex::new(Vec::new());
        fork_join(&Sequential, IndexRange::upto(8), 1, |r| leaves.lock().unwrap().push(r));
        let mut leaves = leaves.into_inner().unwrap();
        leaves.sort_by_key(|r| r.begin);
        assert_eq!(leaves.len(), 8);
        for (i, r) in leaves.iter().enumerate() {
            assert_eq!(*r, IndexRange::new(i, i + 1));
        }

        let whole = Mutex::new(Vec::new());
        fork_join(&Sequential, IndexRange::new(2, 7), 5, |r| whole.lock().unwrap().push(r));
        assert_eq!(whole.into_inner().unwrap(), vec![IndexRange::new(2, 7)]);
    }

    #[test]
    fn chunks_mut_touches_every_element() {
        let mut data = vec![0usize; 23];
        par_chunks_mut(&Shuffled::new(9, 2), &mut data, 5, |c, chunk| {
            for (k, x) in chunk.iter_mut().enumerate() {
                *x = c * 5 + k;
            }
        });
        assert_eq!(data, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.name().parse::<StrategyKind>(), Ok(k));
        }
        assert!("threads".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn grain_defaults() {
        assert_eq!(default_grain(0, 4), 1);
        assert_eq!(default_grain(1000, 4), 31);
        assert_eq!(ExecStrategy::new(StrategyKind::ForkJoin, 0).threads(), 1);
        assert_eq!(ExecStrategy::new(StrategyKind::ForkJoin, 2).with_grain(0).grain(), Some(1));
    }

    proptest! {
        #[test]
        fn scan_matches_running_sum(values in proptest::collection::vec(-1000i64..1000, 0..200), seed in any::<u64>()) {
            let ex = Shuffled::new(seed, 4);
            let got = par_scan(&ex, &values, 0i64, |a, b| a + b);
            let mut acc = 0;
            let want: Vec<i64> = values.iter().map(|v| { acc += v; acc }).collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn reduce_independent_of_chunking(n in 0usize..500, seed in any::<u64>()) {
            let ex = Shuffled::new(seed, 1 + (seed % 8) as usize);
            let xor = par_reduce(&ex, IndexRange::upto(n), 0u64, |i| (i as u64).wrapping_mul(0x9E37_79B9), |a, b| a ^ b);
            let want = (0..n as u64).fold(0, |a, i| a ^ i.wrapping_mul(0x9E37_79B9));
            prop_assert_eq!(xor, want);
        }
    }
}
