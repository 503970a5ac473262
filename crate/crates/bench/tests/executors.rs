use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use multibench::{spawn_per_item, worker_pool, ThreadedExecutor};
use multibench_core::exec::{par_for, par_reduce, par_scan};
use multibench_core::kernels::{generate_input, run_kernel};
use multibench_core::{ExecStrategy, Executor, IndexRange, KernelParams, Problem, Sequential, StrategyKind};
use proptest::prelude::*;

fn executors(threads: &[usize]) -> Vec<ThreadedExecutor> {
    StrategyKind::ALL
        .iter()
        .flat_map(|&k| threads.iter().map(move |&t| ThreadedExecutor::new(ExecStrategy::new(k, t)).unwrap()))
        .collect()
}

fn hit_counts(ex: &dyn Executor, n: usize) -> Vec<usize> {
    let hits: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(0)).collect();
    par_for(ex, IndexRange::upto(n), |i| {
        hits[i].fetch_add(1, Ordering::Relaxed);
    });
    hits.into_iter().map(AtomicUsize::into_inner).collect()
}

#[test]
fn every_index_runs_exactly_once() {
    for ex in executors(&[1, 2, 3, 8]) {
        for n in [0, 1, 2, 7, 64, 1001] {
            assert!(hit_counts(&ex, n).iter().all(|&h| h == 1), "{:?} n={n}", ex.strategy());
        }
    }
}

#[test]
fn for_each_range_is_a_barrier() {
    for ex in executors(&[1, 4]) {
        let done = AtomicUsize::new(0);
        par_for(&ex, IndexRange::upto(500), |_| {
            std::thread::yield_now();
            done.fetch_add(1, Ordering::SeqCst);
        });
        assert_eq!(done.load(Ordering::SeqCst), 500, "{:?}", ex.strategy());
    }
}

#[test]
fn explicit_grain_is_respected() {
    for kind in StrategyKind::PARALLEL {
        if kind == StrategyKind::SpawnPerItem {
            continue;
        }
        let ex = ThreadedExecutor::new(ExecStrategy::new(kind, 4).with_grain(10)).unwrap();
        let sizes = Mutex::new(Vec::new());
        ex.for_each_range(IndexRange::upto(95), &|r| {
            sizes.lock().unwrap().push(r.len());
            std::ops::ControlFlow::Continue(())
        });
        let sizes = sizes.into_inner().unwrap();
        assert_eq!(sizes.iter().sum::<usize>(), 95, "{kind}");
        assert!(sizes.iter().all(|&s| s <= 10 || kind == StrategyKind::BlockedParFor), "{kind}: {sizes:?}");
    }
}

#[test]
fn reductions_and_scans_agree_across_strategies() {
    let values: Vec<u64> = (0..3000u64).map(|i| i * 7 % 113).collect();
    let want_sum: u64 = values.iter().sum();
    let want_scan = par_scan(&Sequential, &values, 0, |a, b| a + b);
    for ex in executors(&[1, 2, 5]) {
        let sum = par_reduce(&ex, IndexRange::upto(values.len()), 0u64, |i| values[i], |a, b| a + b);
        assert_eq!(sum, want_sum, "{:?}", ex.strategy());
        assert_eq!(par_scan(&ex, &values, 0, |a, b| a + b), want_scan, "{:?}", ex.strategy());
    }
}

#[test]
fn kernels_match_sequential_on_every_strategy() {
    let params = KernelParams { nrows: 37, ncols: 23, seed: 11, percent: 60, nelts: 15 };
    for problem in Problem::ALL {
        let input = generate_input(problem, &params).unwrap();
        let want = run_kernel(&input, &Sequential).unwrap();
        for ex in executors(&[1, 3, 8]) {
            assert_eq!(run_kernel(&input, &ex).unwrap(), want, "{problem} {:?}", ex.strategy());
        }
    }
}

#[test]
fn worker_pool_examples() {
    worker_pool(0, 4, |_| panic!("no items")).unwrap();

    let hits: Vec<AtomicUsize> = (0..1000).map(|_| AtomicUsize::new(0)).collect();
    worker_pool(1000, 4, |i| {
        hits[i].fetch_add(1, Ordering::Relaxed);
    })
    .unwrap();
    assert!(hits.iter().all(|h| h.load(Ordering::Relaxed) == 1));

    let order = Mutex::new(Vec::new());
    worker_pool(50, 1, |i| order.lock().unwrap().push(i)).unwrap();
    assert_eq!(order.into_inner().unwrap(), (0..50).collect::<Vec<_>>());
}

#[test]
fn spawn_per_item_covers_every_item() {
    let count = AtomicUsize::new(0);
    spawn_per_item(10_000, 4, |_| {
        count.fetch_add(1, Ordering::Relaxed);
    })
    .unwrap();
    assert_eq!(count.into_inner(), 10_000);
}

#[test]
fn zero_threads_is_rejected() {
    assert!(worker_pool(10, 0, |_| {}).is_err());
    assert!(spawn_per_item(10, 0, |_| {}).is_err());
    assert!(ThreadedExecutor::with_threads(StrategyKind::ForkJoin, 0).is_err());
    assert_eq!(ThreadedExecutor::with_threads(StrategyKind::ForkJoin, 3).unwrap().threads(), 3);
}

#[test]
fn panics_propagate_to_the_caller() {
    for ex in executors(&[1, 4]) {
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            par_for(&ex, IndexRange::upto(200), |i| {
                if i == 137 {
                    panic!("item 137");
                }
            })
        }));
        let payload = r.expect_err("panic must reach the caller");
        let msg = payload.downcast_ref::<&str>().copied().unwrap_or_default();
        assert_eq!(msg, "item 137", "{:?}", ex.strategy());
        // The executor stays usable afterwards.
        assert!(hit_counts(&ex, 100).iter().all(|&h| h == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coverage_for_arbitrary_shapes(
        kind in prop::sample::select(StrategyKind::ALL.to_vec()),
        threads in 1usize..6,
        n in 0usize..400,
        grain in prop::option::of(1usize..50),
    ) {
        let mut s = ExecStrategy::new(kind, threads);
        if let Some(g) = grain {
            s = s.with_grain(g);
        }
        let ex = ThreadedExecutor::new(s).unwrap();
        prop_assert!(hit_counts(&ex, n).iter().all(|&h| h == 1));
    }
}
