//! Spectral pruning decision.
//!
//! After its weight update a node inspects the spectrum of its local
//! Laplacian. Let `a` be the largest imaginary part. If another eigenvalue has
//! imaginary part `-a`, the nodes associated with the two eigenvalues (`n_a`
//! and `n_b`) are considered symmetrically coupled and the edge `n_b -> n_a`
//! is removed. A node may only remove its own input edges, so the decision is
//! discarded unless `n_a` is the executing node.

use crate::graph::{DegreeMode, NetworkGraph, NodeId};
use crate::spectral::{AssociationRule, Spectrum};

/// Smallest positive imaginary part that counts as oscillatory.
pub const DEFAULT_IMAG_THRESHOLD: f64 = 1e-9;
/// Relative tolerance for `b = -a`.
pub const DEFAULT_PAIR_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PruneMode {
    /// Unpruned baseline.
    #[default]
    None,
    Directed,
    Weighted,
}

impl PruneMode {
    pub const ALL: [PruneMode; 3] = [PruneMode::Directed, PruneMode::Weighted, PruneMode::None];

    pub fn degree_mode(self) -> Option<DegreeMode> {
        match self {
            PruneMode::None => None,
            PruneMode::Directed => Some(DegreeMode::Directed),
            PruneMode::Weighted => Some(DegreeMode::Weighted),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PruneMode::None => "none",
            PruneMode::Directed => "directed",
            PruneMode::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PruneConfig {
    pub mode: PruneMode,
    pub imag_threshold: f64,
    pub pair_tolerance: f64,
    pub assoc: AssociationRule,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self::with_mode(PruneMode::None)
    }
}

impl PruneConfig {
    pub fn with_mode(mode: PruneMode) -> Self {
        Self {
            mode,
            imag_threshold: DEFAULT_IMAG_THRESHOLD,
            pair_tolerance: DEFAULT_PAIR_TOLERANCE,
            assoc: AssociationRule::Index,
        }
    }

    pub fn enabled(&self) -> bool {
        self.mode != PruneMode::None
    }
}

/// An opposite-imaginary pair found in a spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    /// Node of the eigenvalue with imaginary part `+a`.
    pub n_a: NodeId,
    /// Node of the eigenvalue with imaginary part `-a`.
    pub n_b: NodeId,
    pub a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PruneEvent {
    /// Behavior-step counter at which the edge was removed.
    pub step: u64,
    pub executor: NodeId,
    pub source: NodeId,
    pub target: NodeId,
    pub a_value: f64,
}

/// Looks for the largest positive imaginary part `a` and an eigenvalue whose
/// imaginary part matches `-a`.
///
/// Among several eigenvalues at the maximum, the one with the lowest
/// associated node is used. Among several matches for `-a`, the most negative
/// imaginary part wins, then the lowest associated node.
pub fn pruning_candidate(spectrum: &Spectrum, cfg: &PruneConfig) -> Option<Candidate> {
    let (a_idx, a, n_a) = spectrum
        .iter()
        .enumerate()
        .map(|(i, (v, node))| (i, v.im, node))
        .reduce(|best, cur| {
            if cur.1 > best.1 || (cur.1 == best.1 && cur.2 < best.2) {
                cur
            } else {
                best
            }
        })?;
    if a.is_nan() || a <= cfg.imag_threshold {
        return None;
    }
    let tol = cfg.pair_tolerance * a.max(1.0);
    let (_, n_b) = spectrum
        .iter()
        .enumerate()
        .filter(|&(i, (v, _))| i != a_idx && (a + v.im).abs() <= tol)
        .map(|(_, (v, node))| (v.im, node))
        .reduce(|best, cur| {
            if cur.0 < best.0 || (cur.0 == best.0 && cur.1 < best.1) {
                cur
            } else {
                best
            }
        })?;
    Some(Candidate { n_a, n_b, a })
}

/// Applies the pruning rule for `executor`. Removes at most one edge, always
/// one that ends at the executor.
pub fn try_prune(
    graph: &mut NetworkGraph,
    executor: NodeId,
    spectrum: &Spectrum,
    cfg: &PruneConfig,
    step: u64,
) -> Option<PruneEvent> {
    if !cfg.enabled() {
        return None;
    }
    let candidate = pruning_candidate(spectrum, cfg)?;
    if candidate.n_a != executor || candidate.n_b == executor {
        return None;
    }
    graph
        .remove_edge(candidate.n_b, candidate.n_a)
        .then_some(PruneEvent {
            step,
            executor,
            source: candidate.n_b,
            target: candidate.n_a,
            a_value: candidate.a,
        })
}
