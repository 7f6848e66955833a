//! Node behavior and the randomized asynchronous training schedule.
//!
//! Every non-input node runs the same local behavior: recompute its value
//! from its in-neighbors, recompute its local error gradient from its
//! out-neighbors (or from the target, for the output node), take one
//! gradient step on its own input weights, and optionally run the spectral
//! pruning check. There is no global clock; asynchrony is simulated by
//! executing nodes in a random order drawn once per input configuration.

use alloc::vec;
use alloc::vec::Vec;

use libm::exp;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{NetworkGraph, NodeId, Role, INPUT_COUNT, OUTPUT_NODE};
use crate::pruning::{try_prune, PruneConfig, PruneEvent};
use crate::spectral::{LocalLaplacian, SpectralError, Spectrum};
use crate::SimRng;

/// Initial value of every non-input node.
pub const INITIAL_VALUE: f64 = 0.5;

/// Pre-activations are clamped to this magnitude so the sigmoid never rounds
/// to exactly 0 or 1.
const PRE_ACTIVATION_LIMIT: f64 = 35.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    And,
    Or,
    Xor,
}

impl Gate {
    pub const ALL: [Gate; 3] = [Gate::And, Gate::Or, Gate::Xor];

    /// The four canonical input configurations in ascending order.
    pub const INPUTS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Gate::And => a && b,
            Gate::Or => a || b,
            Gate::Xor => a ^ b,
        }
    }

    pub fn target(self, a: bool, b: bool) -> f64 {
        if self.eval(a, b) {
            1.0
        } else {
            0.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::And => "and",
            Gate::Or => "or",
            Gate::Xor => "xor",
        }
    }
}

/// Per-node activation value and local error gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeStates {
    values: Vec<f64>,
    grads: Vec<f64>,
}

impl NodeStates {
    pub fn new(node_count: usize) -> Self {
        let mut values = vec![INITIAL_VALUE; node_count];
        for v in values.iter_mut().take(INPUT_COUNT) {
            *v = 0.0;
        }
        Self {
            values,
            grads: vec![0.0; node_count],
        }
    }

    pub fn value(&self, node: NodeId) -> f64 {
        self.values[node.0]
    }

    pub fn grad(&self, node: NodeId) -> f64 {
        self.grads[node.0]
    }

    pub fn set_value(&mut self, node: NodeId, value: f64) {
        self.values[node.0] = value;
    }

    pub fn set_grad(&mut self, node: NodeId, grad: f64) {
        self.grads[node.0] = grad;
    }

    pub fn set_inputs(&mut self, a: bool, b: bool) {
        self.values[0] = if a { 1.0 } else { 0.0 };
        self.values[1] = if b { 1.0 } else { 0.0 };
    }

    /// Resets every non-input node to the initial value and zero gradient.
    pub fn reset_hidden(&mut self) {
        for v in self.values.iter_mut().skip(INPUT_COUNT) {
            *v = INITIAL_VALUE;
        }
        for g in self.grads.iter_mut() {
            *g = 0.0;
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("input node {0} does not execute behaviors")]
    InputNode(NodeId),
    #[error("a target was supplied for node {0}, which is not the output node")]
    TargetOnNonOutput(NodeId),
}

fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-PRE_ACTIVATION_LIMIT, PRE_ACTIVATION_LIMIT);
    1.0 / (1.0 + exp(-x))
}

fn require_active(graph: &NetworkGraph, node: NodeId) -> Result<(), DynamicsError> {
    match graph.role(node) {
        Role::Input => Err(DynamicsError::InputNode(node)),
        _ => Ok(()),
    }
}

/// Forward step: sigmoid of the weighted sum of in-neighbor values.
pub fn activate(graph: &NetworkGraph, states: &mut NodeStates, node: NodeId) -> Result<f64, DynamicsError> {
    require_active(graph, node)?;
    let z: f64 = graph.in_edges(node).map(|(s, w)| states.value(s) * w).sum();
    let value = sigmoid(z);
    states.set_value(node, value);
    Ok(value)
}

/// Local error gradient. The output node with a target uses
/// `(value - target) f'`; every other node back-propagates
/// `(Σ grad(o) w(n→o)) f'` over its out-neighbors.
pub fn local_gradient(
    graph: &NetworkGraph,
    states: &mut NodeStates,
    node: NodeId,
    target: Option<f64>,
) -> Result<f64, DynamicsError> {
    require_active(graph, node)?;
    let value = states.value(node);
    let derivative = value * (1.0 - value);
    let grad = match target {
        Some(_) if node != OUTPUT_NODE => return Err(DynamicsError::TargetOnNonOutput(node)),
        Some(t) => (value - t) * derivative,
        None => {
            let upstream: f64 = graph.out_edges(node).map(|(o, w)| states.grad(o) * w).sum();
            upstream * derivative
        }
    };
    states.set_grad(node, grad);
    Ok(grad)
}

/// Gradient step with unit rate on every input edge: `w ← w − grad · value(source)`.
pub fn update_weights(graph: &mut NetworkGraph, states: &NodeStates, node: NodeId) -> Result<(), DynamicsError> {
    require_active(graph, node)?;
    let grad = states.grad(node);
    if grad == 0.0 {
        return Ok(());
    }
    let inputs: Vec<(NodeId, f64)> = graph.in_edges(node).collect();
    for (source, w) in inputs {
        graph.update_weight(source, node, w - grad * states.value(source));
    }
    Ok(())
}

/// What one behavior execution produced besides the state update.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BehaviorOutcome {
    /// Spectrum of the executor's neighborhood after the weight update, when pruning is enabled.
    pub spectrum: Option<Spectrum>,
    pub event: Option<PruneEvent>,
    /// Eigensolver failure; pruning was skipped for this step.
    pub failure: Option<SpectralError>,
}

/// Activation, local gradient, weight update, then the pruning check.
pub fn node_behavior(
    graph: &mut NetworkGraph,
    states: &mut NodeStates,
    node: NodeId,
    target: Option<f64>,
    prune: &PruneConfig,
    step: u64,
) -> Result<BehaviorOutcome, DynamicsError> {
    activate(graph, states, node)?;
    local_gradient(graph, states, node, target)?;
    update_weights(graph, states, node)?;

    let Some(mode) = prune.mode.degree_mode() else {
        return Ok(BehaviorOutcome::default());
    };
    let laplacian = LocalLaplacian::new(&graph.neighborhood(node), mode);
    match laplacian.spectrum(prune.assoc) {
        Ok(spectrum) => {
            let event = try_prune(graph, node, &spectrum, prune, step);
            Ok(BehaviorOutcome {
                spectrum: Some(spectrum),
                event,
                failure: None,
            })
        }
        Err(err) => Ok(BehaviorOutcome {
            spectrum: None,
            event: None,
            failure: Some(err),
        }),
    }
}

/// Order of node execution within one input configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PermutationMode {
    /// One permutation per input configuration, reused for every pass.
    #[default]
    PerInput,
    /// A fresh permutation for every pass.
    PerPass,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingConfig {
    /// Behavior sweeps per input configuration.
    pub passes: usize,
    pub perm: PermutationMode,
    pub prune: PruneConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            passes: 10,
            perm: PermutationMode::PerInput,
            prune: PruneConfig::default(),
        }
    }
}

/// One row of the training log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    /// Number of input configurations processed so far (1-based).
    pub iter: usize,
    pub inputs: (bool, bool),
    pub target: f64,
    /// `|value(output) - target|` after the last pass.
    pub error: f64,
    pub edges_remaining: usize,
}

/// Hooks into a training run. Both methods default to doing nothing.
pub trait Observer {
    fn behavior(&mut self, _step: u64, _executor: NodeId, _outcome: &BehaviorOutcome) {}

    fn iteration(&mut self, _record: &IterationRecord, _graph: &NetworkGraph, _states: &NodeStates) {}
}

impl Observer for () {}

/// Counters for conditions that are logged rather than fatal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub behaviors: u64,
    pub solver_failures: u64,
    pub association_fallbacks: u64,
}

/// A network, its node states, its generator and the accumulated prune log.
#[derive(Clone, Debug)]
pub struct Trainer {
    graph: NetworkGraph,
    states: NodeStates,
    config: TrainingConfig,
    rng: SimRng,
    step: u64,
    events: Vec<PruneEvent>,
    diagnostics: Diagnostics,
}

impl Trainer {
    pub fn new(graph: NetworkGraph, rng: SimRng, config: TrainingConfig) -> Self {
        let states = NodeStates::new(graph.node_count());
        Self {
            graph,
            states,
            config,
            rng,
            step: 0,
            events: Vec::new(),
            diagnostics: Diagnostics::default(),
        }
    }

    /// Seeds one generator, draws the initial weights from it, and keeps it
    /// for the training draws.
    pub fn fully_connected(n_hidden: usize, seed: u64, config: TrainingConfig) -> Self {
        let mut rng = crate::seeded_rng(seed);
        let graph = NetworkGraph::fully_connected_with(n_hidden, &mut rng);
        Self::new(graph, rng, config)
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn states(&self) -> &NodeStates {
        &self.states
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn events(&self) -> &[PruneEvent] {
        &self.events
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    /// Behavior executions so far.
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn into_parts(self) -> (NetworkGraph, NodeStates, Vec<PruneEvent>) {
        (self.graph, self.states, self.events)
    }

    fn behave(&mut self, node: NodeId, target: f64, observer: &mut impl Observer) {
        let target = (node == OUTPUT_NODE).then_some(target);
        let outcome = node_behavior(
            &mut self.graph,
            &mut self.states,
            node,
            target,
            &self.config.prune,
            self.step,
        )
        .expect("schedule only contains non-input nodes");
        self.diagnostics.behaviors += 1;
        if outcome.failure.is_some() {
            self.diagnostics.solver_failures += 1;
        }
        if outcome.spectrum.as_ref().is_some_and(Spectrum::used_index_fallback) {
            self.diagnostics.association_fallbacks += 1;
        }
        if let Some(event) = outcome.event {
            self.events.push(event);
        }
        observer.behavior(self.step, node, &outcome);
        self.step += 1;
    }

    /// Presents one input configuration: sets the inputs, draws an execution
    /// order over all non-input nodes and runs it `passes` times.
    pub fn run_input(&mut self, inputs: (bool, bool), target: f64, observer: &mut impl Observer) {
        assert!(self.config.passes >= 1, "passes must be at least 1");
        self.states.set_inputs(inputs.0, inputs.1);
        let mut order: Vec<NodeId> = self.graph.active_nodes().collect();
        order.shuffle(&mut self.rng);
        for pass in 0..self.config.passes {
            if pass > 0 && self.config.perm == PermutationMode::PerPass {
                order.shuffle(&mut self.rng);
            }
            for &node in &order {
                self.behave(node, target, observer);
            }
        }
    }

    /// Trains on `n_inputs` input configurations drawn uniformly from {0,1}².
    pub fn train(&mut self, gate: Gate, n_inputs: usize, observer: &mut impl Observer) -> Vec<IterationRecord> {
        let mut log = Vec::with_capacity(n_inputs);
        for iter in 1..=n_inputs {
            let inputs = (self.rng.random::<bool>(), self.rng.random::<bool>());
            let target = gate.target(inputs.0, inputs.1);
            self.run_input(inputs, target, observer);
            let record = IterationRecord {
                iter,
                inputs,
                target,
                error: (self.states.value(OUTPUT_NODE) - target).abs(),
                edges_remaining: self.graph.edge_count(),
            };
            observer.iteration(&record, &self.graph, &self.states);
            log.push(record);
        }
        log
    }

    /// Mean absolute output error over the four canonical inputs; see [`evaluate`].
    pub fn evaluate(&self, gate: Gate) -> f64 {
        evaluate(&self.graph, &self.states, gate, self.config.passes)
    }
}

/// Side-effect-free evaluation: for each canonical input, reset the
/// non-input values, run `passes` activation-only sweeps in ascending id
/// order and measure `|value(output) - target|`. Returns the mean.
pub fn evaluate(graph: &NetworkGraph, states: &NodeStates, gate: Gate, passes: usize) -> f64 {
    let mut scratch = states.clone();
    let mut total = 0.0;
    for (a, b) in Gate::INPUTS {
        scratch.reset_hidden();
        scratch.set_inputs(a, b);
        for _ in 0..passes {
            for node in graph.active_nodes() {
                // active nodes are never inputs
                let _ = activate(graph, &mut scratch, node);
            }
        }
        total += (scratch.value(OUTPUT_NODE) - gate.target(a, b)).abs();
    }
    total / Gate::INPUTS.len() as f64
}
