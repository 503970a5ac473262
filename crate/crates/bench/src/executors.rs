//! Thread-backed implementations of [`Executor`], one per [`StrategyKind`].

use std::any::Any;
use std::ops::ControlFlow;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use crossbeam_channel::bounded;
use multibench_core::exec::fork_join_ranges;
use multibench_core::{ExecStrategy, Executor, IndexRange, Sequential, StrategyKind};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("thread count must be at least 1")]
    ZeroThreads,
    #[error("cannot start a pool of {threads} threads: {source}")]
    Pool {
        threads: usize,
        #[source]
        source: rayon::ThreadPoolBuildError,
    },
}

/// Logical processors visible to this process, at least 1.
pub fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs the body of one `for_each_range` call, recording the first panic and
/// turning it, or any `Break`, into a stop request.
struct Guard<'a> {
    body: &'a (dyn Fn(IndexRange) -> ControlFlow<()> + Sync),
    stop: AtomicBool,
    panic: Mutex<Option<Box<dyn Any + Send>>>,
}

impl<'a> Guard<'a> {
    fn new(body: &'a (dyn Fn(IndexRange) -> ControlFlow<()> + Sync)) -> Self {
        Guard { body, stop: AtomicBool::new(false), panic: Mutex::new(None) }
    }

    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    fn run(&self, r: IndexRange) -> ControlFlow<()> {
        if self.stopped() {
            return ControlFlow::Break(());
        }
        match panic::catch_unwind(AssertUnwindSafe(|| (self.body)(r))) {
            Ok(ControlFlow::Continue(())) => ControlFlow::Continue(()),
            Ok(ControlFlow::Break(())) => {
                self.stop.store(true, Ordering::Relaxed);
                ControlFlow::Break(())
            }
            Err(payload) => {
                let mut slot = self.panic.lock().unwrap_or_else(|e| e.into_inner());
                slot.get_or_insert(payload);
                self.stop.store(true, Ordering::Relaxed);
                ControlFlow::Break(())
            }
        }
    }

    /// Re-raises the first panic on the calling thread.
    fn finish(self) {
        let payload = self.panic.into_inner().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = payload {
            panic::resume_unwind(p);
        }
    }
}

/// An executor for any [`ExecStrategy`]. Pools are created once, here, and
/// reused by every call.
#[derive(Debug)]
pub struct ThreadedExecutor {
    strategy: ExecStrategy,
    pool: Option<ThreadPool>,
}

impl ThreadedExecutor {
    pub fn new(strategy: ExecStrategy) -> Result<Self, ExecError> {
        let needs_pool =
            matches!(strategy.kind, StrategyKind::ForkJoin | StrategyKind::Skeleton | StrategyKind::SpawnPerItem);
        let pool = if needs_pool {
            let threads = strategy.threads();
            Some(
                ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(|i| format!("multibench-{i}"))
                    .build()
                    .map_err(|source| ExecError::Pool { threads, source })?,
            )
        } else {
            None
        };
        Ok(ThreadedExecutor { strategy, pool })
    }

    /// Like [`ThreadedExecutor::new`] but rejects a zero thread count instead
    /// of clamping it.
    pub fn with_threads(kind: StrategyKind, threads: usize) -> Result<Self, ExecError> {
        if threads == 0 {
            return Err(ExecError::ZeroThreads);
        }
        Self::new(ExecStrategy::new(kind, threads))
    }

    pub fn strategy(&self) -> ExecStrategy {
        self.strategy
    }

    fn pool(&self) -> &ThreadPool {
        self.pool.as_ref().expect("strategy has a pool")
    }

    fn blocked(&self, range: IndexRange, guard: &Guard<'_>) {
        let len = range.len();
        let grain = self.strategy.grain().unwrap_or(1);
        let blocks = self.strategy.threads().min(len.div_ceil(grain)).max(1);
        let block = |i: usize| IndexRange::new(range.begin + i * len / blocks, range.begin + (i + 1) * len / blocks);
        std::thread::scope(|s| {
            for i in 1..blocks {
                s.spawn(move || guard.run(block(i)));
            }
            let _ = guard.run(block(0));
        });
    }

    fn worker_pool(&self, range: IndexRange, guard: &Guard<'_>) {
        let np = self.strategy.threads();
        let grain = self.grain_for(range.len());
        std::thread::scope(|s| {
            let (work_tx, work_rx) = bounded::<IndexRange>(2 * np);
            let (done_tx, done_rx) = bounded::<()>(np);
            for _ in 0..np {
                let work_rx = work_rx.clone();
                let done_tx = done_tx.clone();
                s.spawn(move || {
                    for r in work_rx.iter() {
                        if guard.run(r).is_break() {
                            break;
                        }
                    }
                    let _ = done_tx.send(());
                });
            }
            drop(work_rx);
            drop(done_tx);
            let mut begin = range.begin;
            while begin < range.end && !guard.stopped() {
                let end = range.end.min(begin + grain);
                // Fails only once every worker has stopped.
                if work_tx.send(IndexRange::new(begin, end)).is_err() {
                    break;
                }
                begin = end;
            }
            drop(work_tx);
            for _ in 0..np {
                if done_rx.recv().is_err() {
                    break;
                }
            }
        });
    }

    fn skeleton(&self, range: IndexRange, guard: &Guard<'_>) {
        let grain = self.grain_for(range.len());
        let chunks = range.len().div_ceil(grain);
        self.pool().install(|| {
            (0..chunks).into_par_iter().for_each(|c| {
                let begin = range.begin + c * grain;
                let _ = guard.run(IndexRange::new(begin, range.end.min(begin + grain)));
            })
        });
    }

    fn spawn_per_item(&self, range: IndexRange, guard: &Guard<'_>) {
        fn split<'s>(s: &rayon::Scope<'s>, r: IndexRange, guard: &'s Guard<'_>) {
            match r.len() {
                0 => {}
                1 => s.spawn(move |_| {
                    let _ = guard.run(r);
                }),
                _ => {
                    let (lo, hi) = r.halves();
                    s.spawn(move |s| split(s, lo, guard));
                    s.spawn(move |s| split(s, hi, guard));
                }
            }
        }
        self.pool().in_place_scope(|s| split(s, range, guard));
    }
}

unsafe impl Executor for ThreadedExecutor {
    fn threads(&self) -> usize {
        self.strategy.threads()
    }

    fn grain_for(&self, len: usize) -> usize {
        match self.strategy.kind {
            StrategyKind::Sequential => len.max(1),
            StrategyKind::SpawnPerItem => 1,
            _ => self.strategy.grain_for(len),
        }
    }

    fn for_each_range(&self, range: IndexRange, body: &(dyn Fn(IndexRange) -> ControlFlow<()> + Sync)) {
        if range.is_empty() && self.strategy.kind != StrategyKind::WorkerPool {
            return;
        }
        let guard = Guard::new(body);
        match self.strategy.kind {
            StrategyKind::Sequential => Sequential.for_each_range(range, &|r| guard.run(r)),
            StrategyKind::BlockedParFor => self.blocked(range, &guard),
            StrategyKind::ForkJoin => {
                let grain = self.grain_for(range.len());
                self.pool().install(|| fork_join_ranges(self, range, grain, &|r| guard.run(r), &guard.stop));
            }
            StrategyKind::WorkerPool => self.worker_pool(range, &guard),
            StrategyKind::Skeleton => self.skeleton(range, &guard),
            StrategyKind::SpawnPerItem => self.spawn_per_item(range, &guard),
        }
        guard.finish();
    }

    fn join(&self, a: &(dyn Fn() + Sync), b: &(dyn Fn() + Sync)) {
        match &self.pool {
            Some(pool) if self.strategy.kind == StrategyKind::ForkJoin => {
                pool.join(a, b);
            }
            _ => {
                a();
                b();
            }
        }
    }
}

/// One producer feeds indices `0..n` through a queue of capacity `2 * np` to
/// `np` workers; returns once every worker has signalled completion.
pub fn worker_pool<F>(n: usize, np: usize, body: F) -> Result<(), ExecError>
where
    F: Fn(usize) + Sync,
{
    if np == 0 {
        return Err(ExecError::ZeroThreads);
    }
    let ex = ThreadedExecutor::new(ExecStrategy::new(StrategyKind::WorkerPool, np).with_grain(1))?;
    ex.for_each_range(IndexRange::upto(n), &|r| {
        r.iter().for_each(&body);
        ControlFlow::Continue(())
    });
    Ok(())
}

/// One task per index, created by recursive halving on a pool of `threads`.
pub fn spawn_per_item<F>(n: usize, threads: usize, body: F) -> Result<(), ExecError>
where
    F: Fn(usize) + Sync,
{
    let ex = ThreadedExecutor::with_threads(StrategyKind::SpawnPerItem, threads)?;
    ex.for_each_range(IndexRange::upto(n), &|r| {
        r.iter().for_each(&body);
        ControlFlow::Continue(())
    });
    Ok(())
}
