//! Seeded single-run drivers for the logic-gate experiments.
//!
//! Each function here executes exactly one run from a [`RunSpec`] and is a
//! pure function of it, so runs can be scheduled on any number of threads and
//! still reproduce bit for bit.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::dynamics::{evaluate, BehaviorOutcome, Diagnostics, Gate, IterationRecord, NodeStates, Observer, PermutationMode, Trainer, TrainingConfig};
use crate::graph::{NetworkGraph, NodeId};
use crate::pruning::{PruneConfig, PruneEvent, PruneMode};
use crate::spectral::AssociationRule;
use crate::stats::MeanStd;

pub const DEFAULT_INPUTS: usize = 2000;
pub const DEFAULT_PASSES: usize = 10;
pub const DEFAULT_RUNS: usize = 10;
pub const DEFAULT_TIMING_RUNS: usize = 5;
pub const DEFAULT_TIMING_INTERVAL: usize = 10;

/// Everything that determines one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub gate: Gate,
    pub mode: PruneMode,
    pub hidden: usize,
    pub run_index: usize,
    pub seed: u64,
    pub n_inputs: usize,
    pub passes: usize,
    pub assoc: AssociationRule,
    pub perm: PermutationMode,
}

impl RunSpec {
    pub fn training_config(&self) -> TrainingConfig {
        TrainingConfig {
            passes: self.passes,
            perm: self.perm,
            prune: PruneConfig {
                assoc: self.assoc,
                ..PruneConfig::with_mode(self.mode)
            },
        }
    }

    pub fn trainer(&self) -> Trainer {
        Trainer::fully_connected(self.hidden, self.seed, self.training_config())
    }
}

/// A sweep over gates, modes and hidden-node counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub gates: Vec<Gate>,
    pub hidden_counts: Vec<usize>,
    pub modes: Vec<PruneMode>,
    pub n_inputs: usize,
    pub passes: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub assoc: AssociationRule,
    pub perm: PermutationMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gates: Gate::ALL.to_vec(),
            hidden_counts: (1..=6).collect(),
            modes: PruneMode::ALL.to_vec(),
            n_inputs: DEFAULT_INPUTS,
            passes: DEFAULT_PASSES,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            assoc: AssociationRule::Index,
            perm: PermutationMode::PerInput,
        }
    }
}

impl ExperimentConfig {
    /// Run `i` of every cell uses seed `base_seed + i`.
    pub fn seed_for(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }

    /// All runs ordered by `(gate, mode, hidden, run)`, each key ascending.
    pub fn run_specs(&self) -> Vec<RunSpec> {
        assert!(self.runs >= 1, "at least one run per cell");
        let mut gates = self.gates.clone();
        gates.sort();
        gates.dedup();
        let mut modes = self.modes.clone();
        modes.sort();
        modes.dedup();
        let mut hidden = self.hidden_counts.clone();
        hidden.sort();
        hidden.dedup();

        let mut specs = Vec::new();
        for &gate in &gates {
            for &mode in &modes {
                for &h in &hidden {
                    for run_index in 0..self.runs {
                        specs.push(RunSpec {
                            gate,
                            mode,
                            hidden: h,
                            run_index,
                            seed: self.seed_for(run_index),
                            n_inputs: self.n_inputs,
                            passes: self.passes,
                            assoc: self.assoc,
                            perm: self.perm,
                        });
                    }
                }
            }
        }
        specs
    }
}

/// Final metrics of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRecord {
    pub gate: Gate,
    pub mode: PruneMode,
    pub hidden: usize,
    pub run_index: usize,
    pub seed: u64,
    pub final_error: f64,
    pub edges_initial: usize,
    pub edges_pruned: usize,
    /// `100 · edges_pruned / edges_initial`.
    pub pct_pruned: f64,
    /// No directed path from either input to the output remains.
    pub output_disconnected: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub log: Vec<IterationRecord>,
    pub events: Vec<PruneEvent>,
    pub graph: NetworkGraph,
    pub diagnostics: Diagnostics,
}

fn pct(pruned: usize, initial: usize) -> f64 {
    100.0 * pruned as f64 / initial as f64
}

fn record_for(spec: &RunSpec, graph: &NetworkGraph, states: &NodeStates, edges_initial: usize) -> RunRecord {
    let edges_pruned = edges_initial - graph.edge_count();
    RunRecord {
        gate: spec.gate,
        mode: spec.mode,
        hidden: spec.hidden,
        run_index: spec.run_index,
        seed: spec.seed,
        final_error: evaluate(graph, states, spec.gate, spec.passes),
        edges_initial,
        edges_pruned,
        pct_pruned: pct(edges_pruned, edges_initial),
        output_disconnected: !graph.output_reachable(),
    }
}

/// Build, train and evaluate one network.
pub fn run_capacity(spec: &RunSpec) -> RunOutcome {
    run_with_observer(spec, &mut ())
}

/// [`run_capacity`] with a caller-supplied observer.
pub fn run_with_observer(spec: &RunSpec, observer: &mut impl Observer) -> RunOutcome {
    let mut trainer = spec.trainer();
    let edges_initial = trainer.graph().edge_count();
    let log = trainer.train(spec.gate, spec.n_inputs, observer);
    let diagnostics = trainer.diagnostics();
    let record = record_for(spec, trainer.graph(), trainer.states(), edges_initial);
    let (graph, _, events) = trainer.into_parts();
    RunOutcome {
        record,
        log,
        events,
        graph,
        diagnostics,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingSample {
    /// Input configurations processed before the sample was taken.
    pub iter: usize,
    pub error: f64,
    pub pct_pruned: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingTrace {
    pub mode: PruneMode,
    pub run_index: usize,
    pub seed: u64,
    pub samples: Vec<TimingSample>,
}

struct TimingObserver {
    gate: Gate,
    passes: usize,
    interval: usize,
    n_inputs: usize,
    edges_initial: usize,
    samples: Vec<TimingSample>,
}

impl Observer for TimingObserver {
    fn iteration(&mut self, record: &IterationRecord, graph: &NetworkGraph, states: &NodeStates) {
        if record.iter.is_multiple_of(self.interval) || record.iter == self.n_inputs {
            self.samples.push(TimingSample {
                iter: record.iter,
                error: evaluate(graph, states, self.gate, self.passes),
                pct_pruned: pct(self.edges_initial - graph.edge_count(), self.edges_initial),
            });
        }
    }
}

/// Evaluation error and pruned percentage sampled before training and then
/// every `interval` input configurations (plus the final one).
pub fn run_timing(spec: &RunSpec, interval: usize) -> TimingTrace {
    assert!(interval >= 1, "sample interval must be at least 1");
    let mut trainer = spec.trainer();
    let edges_initial = trainer.graph().edge_count();
    let mut observer = TimingObserver {
        gate: spec.gate,
        passes: spec.passes,
        interval,
        n_inputs: spec.n_inputs,
        edges_initial,
        samples: Vec::with_capacity(spec.n_inputs / interval + 2),
    };
    observer.samples.push(TimingSample {
        iter: 0,
        error: trainer.evaluate(spec.gate),
        pct_pruned: 0.0,
    });
    trainer.train(spec.gate, spec.n_inputs, &mut observer);
    TimingTrace {
        mode: spec.mode,
        run_index: spec.run_index,
        seed: spec.seed,
        samples: observer.samples,
    }
}

/// Mean ± std across runs at one sample point of one mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingPoint {
    pub mode: PruneMode,
    pub iter: usize,
    pub runs: usize,
    pub error: MeanStd,
    pub pct_pruned: MeanStd,
}

/// Aggregates traces per `(mode, iter)`, ascending.
pub fn aggregate_timing(traces: &[TimingTrace]) -> Vec<TimingPoint> {
    let mut groups: BTreeMap<(PruneMode, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for trace in traces {
        for s in &trace.samples {
            let entry = groups.entry((trace.mode, s.iter)).or_default();
            entry.0.push(s.error);
            entry.1.push(s.pct_pruned);
        }
    }
    groups
        .into_iter()
        .map(|((mode, iter), (errors, pcts))| TimingPoint {
            mode,
            iter,
            runs: errors.len(),
            error: MeanStd::of(&errors),
            pct_pruned: MeanStd::of(&pcts),
        })
        .collect()
}

/// First iteration at which a pruned-percentage curve reaches half of its
/// final value. `None` when nothing was pruned.
pub fn half_final_iteration(curve: &[(usize, f64)]) -> Option<usize> {
    let &(_, last) = curve.last()?;
    if last <= 0.0 {
        return None;
    }
    curve.iter().find(|&&(_, p)| p >= 0.5 * last).map(|&(iter, _)| iter)
}

/// One eigenvalue of one behavior step's local spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenTraceRow {
    pub step: u64,
    pub focal: NodeId,
    pub node: NodeId,
    pub re: f64,
    pub im: f64,
    /// `(source, target)` of the edge removed at this step, on the executor's own row.
    pub event: Option<(NodeId, NodeId)>,
}

#[derive(Default)]
struct TraceObserver {
    rows: Vec<EigenTraceRow>,
}

impl Observer for TraceObserver {
    fn behavior(&mut self, step: u64, executor: NodeId, outcome: &BehaviorOutcome) {
        let Some(spectrum) = &outcome.spectrum else {
            return;
        };
        for (value, node) in spectrum.iter() {
            let event = outcome
                .event
                .filter(|_| node == executor)
                .map(|e| (e.source, e.target));
            self.rows.push(EigenTraceRow {
                step,
                focal: executor,
                node,
                re: value.re,
                im: value.im,
                event,
            });
        }
    }
}

/// Per-step eigenvalue components for a single run. Runs without pruning
/// compute no spectra and produce no rows.
pub fn run_eigen_trace(spec: &RunSpec) -> (Vec<EigenTraceRow>, RunOutcome) {
    let mut observer = TraceObserver::default();
    let outcome = run_with_observer(spec, &mut observer);
    (observer.rows, outcome)
}
