//! Mean and sample standard deviation over groups of run records.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use libm::sqrt;

use crate::dynamics::Gate;
use crate::experiment::RunRecord;
use crate::pruning::PruneMode;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample (n−1) standard deviation; 0 for fewer than two values.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n < 2 || values.iter().all(|&v| v == values[0]) {
            return Self { mean, std: 0.0 };
        }
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self {
            mean,
            std: sqrt(ss / (n - 1) as f64),
        }
    }
}

/// One `(gate, mode, hidden)` cell of a capacity sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateRow {
    pub gate: Gate,
    pub mode: PruneMode,
    pub hidden: usize,
    pub runs: usize,
    pub final_error: MeanStd,
    pub edges_pruned: MeanStd,
    pub pct_pruned: MeanStd,
}

/// Groups by `(gate, mode, hidden)` in ascending key order. Empty groups
/// cannot occur, so every row has `runs ≥ 1`.
pub fn aggregate_stats(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(Gate, PruneMode, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.gate, r.mode, r.hidden)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((gate, mode, hidden), rows)| {
            let column = |f: fn(&RunRecord) -> f64| MeanStd::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            AggregateRow {
                gate,
                mode,
                hidden,
                runs: rows.len(),
                final_error: column(|r| r.final_error),
                edges_pruned: column(|r| r.edges_pruned as f64),
                pct_pruned: column(|r| r.pct_pruned),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(mode: PruneMode, hidden: usize, error: f64, pruned: usize) -> RunRecord {
        let edges_initial = crate::graph::NetworkGraph::full_edge_count(3 + hidden);
        RunRecord {
            gate: Gate::Xor,
            mode,
            hidden,
            run_index: 0,
            seed: 0,
            final_error: error,
            edges_initial,
            edges_pruned: pruned,
            pct_pruned: 100.0 * pruned as f64 / edges_initial as f64,
            output_disconnected: false,
        }
    }

    #[test]
    fn mean_std_examples() {
        assert_eq!(MeanStd::of(&[0.25]), MeanStd { mean: 0.25, std: 0.0 });
        assert_eq!(MeanStd::of(&[0.4, 0.4, 0.4]).std, 0.0);
        // mean 0.2, std = sqrt(((−0.1)² + 0.1²) / 1) = sqrt(0.02)
        let m = MeanStd::of(&[0.1, 0.3]);
        assert!((m.mean - 0.2).abs() < 1e-15);
        assert!((m.std - 0.02f64.sqrt()).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[]), MeanStd::default());
    }

    #[test]
    fn groups_are_sorted_and_counted() {
        let records = [
            record(PruneMode::Weighted, 2, 0.1, 3),
            record(PruneMode::Directed, 2, 0.3, 1),
            record(PruneMode::Weighted, 2, 0.3, 5),
            record(PruneMode::Directed, 1, 0.2, 0),
        ];
        let rows = aggregate_stats(&records);
        let keys: Vec<_> = rows.iter().map(|r| (r.mode, r.hidden, r.runs)).collect();
        assert_eq!(
            keys,
            [
                (PruneMode::Directed, 1, 1),
                (PruneMode::Directed, 2, 1),
                (PruneMode::Weighted, 2, 2)
            ]
        );
        assert!((rows[2].final_error.mean - 0.2).abs() < 1e-15);
        assert_eq!(rows[2].edges_pruned.mean, 4.0);
        assert!(aggregate_stats(&[]).is_empty());
    }
}
