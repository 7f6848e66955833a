//! Multi-run experiment execution.
//!
//! Runs are independent, so they are handed out to `jobs` worker threads and
//! the results are put back into spec order before anything is aggregated or
//! written. Output never depends on the number of jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use argnn_core::dynamics::Diagnostics;
use argnn_core::experiment::{
    aggregate_timing, run_capacity, run_timing, ExperimentConfig, RunRecord, RunSpec, TimingPoint, TimingTrace,
};
use argnn_core::stats::{aggregate_stats, AggregateRow};

/// Applies `f` to every item on up to `jobs` threads; results keep item order.
pub fn run_parallel<S, T, F>(items: &[S], jobs: usize, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut indexed: Vec<(usize, T)> = thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(item) = items.get(i) else { break };
                        done.push((i, f(item)));
                    }
                    done
                })
            })
            .collect();
        workers
            .into_iter()
            .flat_map(|w| w.join().expect("worker thread panicked"))
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, t)| t).collect()
}

#[derive(Clone, Debug)]
pub struct CapacityResults {
    pub records: Vec<RunRecord>,
    pub summary: Vec<AggregateRow>,
    pub diagnostics: Diagnostics,
}

fn merge(total: &mut Diagnostics, d: Diagnostics) {
    total.behaviors += d.behaviors;
    total.solver_failures += d.solver_failures;
    total.association_fallbacks += d.association_fallbacks;
}

/// Every `(gate, mode, hidden, run)` cell of the sweep.
pub fn capacity(cfg: &ExperimentConfig, jobs: usize) -> CapacityResults {
    let specs = cfg.run_specs();
    let outcomes = run_parallel(&specs, jobs, |spec| {
        let out = run_capacity(spec);
        (out.record, out.diagnostics)
    });
    let mut diagnostics = Diagnostics::default();
    let mut records = Vec::with_capacity(outcomes.len());
    for (record, d) in outcomes {
        merge(&mut diagnostics, d);
        records.push(record);
    }
    let summary = aggregate_stats(&records);
    CapacityResults {
        records,
        summary,
        diagnostics,
    }
}

#[derive(Clone, Debug)]
pub struct TimingResults {
    pub traces: Vec<TimingTrace>,
    pub summary: Vec<TimingPoint>,
}

/// Timing traces for every spec of the config (normally one gate, one hidden
/// count and several modes).
pub fn timing(cfg: &ExperimentConfig, interval: usize, jobs: usize) -> TimingResults {
    let specs: Vec<RunSpec> = cfg.run_specs();
    let traces = run_parallel(&specs, jobs, |spec| run_timing(spec, interval));
    let summary = aggregate_timing(&traces);
    TimingResults { traces, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..50).collect();
        let serial = run_parallel(&items, 1, |x| x * x);
        let parallel = run_parallel(&items, 4, |x| x * x);
        assert_eq!(serial, parallel);
        assert!(run_parallel(&Vec::<u64>::new(), 3, |x| *x).is_empty());
    }
}
