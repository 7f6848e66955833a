//! Local Laplacians and their complex spectra.
//!
//! A node's local Laplacian is `L = D - A ⊙ W` over its [`Neighborhood`]:
//! `D` is the degree diagonal (see [`DegreeMode`]) and the off-diagonal entry
//! `(i, j)` is minus the weight of the edge `members[i] -> members[j]`, or zero
//! when there is no such edge. The matrix is generally nonsymmetric, so its
//! eigenvalues are complex and come in conjugate pairs.
//!
//! Eigenvalues carry no node identity of their own. [`associate_nodes`] maps
//! each eigenvalue to one member of the neighborhood, either through the
//! dominant component of its eigenvector or by plain solver index.

mod matrix;
pub mod oracle;
mod qr;

use alloc::vec;
use alloc::vec::Vec;

use libm::hypot;
use num_complex::Complex64;

pub use matrix::DenseMatrix;

use crate::graph::{DegreeMode, Neighborhood, NodeId};

/// Numerical tolerances shared by the spectral code and its tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Conjugate-pair and real-spectrum tolerance.
    pub conjugate: f64,
    /// Agreement between the QR solver and the characteristic-polynomial oracle.
    pub oracle: f64,
    /// Relative residual for trace/determinant identities.
    pub residual: f64,
    /// Relative residual an inverse-iteration eigenvector must reach to be used.
    pub eigenvector_residual: f64,
    /// QR sweep budget per matrix dimension.
    pub sweeps_per_dim: usize,
}

pub const TOLERANCES: Tolerances = Tolerances {
    conjugate: 1e-8,
    oracle: 1e-6,
    residual: 1e-8,
    eigenvector_residual: 1e-6,
    sweeps_per_dim: 100,
};

/// Relative slack under which two eigenvector component magnitudes count as tied.
const MAGNITUDE_TIE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("QR iteration did not converge within {sweeps} sweeps for matrix:\n{matrix}")]
    NonConvergence { matrix: DenseMatrix, sweeps: usize },
}

/// How eigenvalues are mapped onto neighborhood members.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AssociationRule {
    /// Greedy by dominant eigenvector component.
    Eigenvector,
    /// Eigenvalue `i` belongs to `members[i]`. The solver reports eigenvalues
    /// in the diagonal order of the real Schur form, the positive member of a
    /// conjugate pair first.
    #[default]
    Index,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalLaplacian {
    members: Vec<NodeId>,
    matrix: DenseMatrix,
}

impl LocalLaplacian {
    pub fn new(neighborhood: &Neighborhood, mode: DegreeMode) -> Self {
        let members = neighborhood.members().to_vec();
        let diag = neighborhood.degree_matrix(mode);
        let mut matrix = DenseMatrix::from_diagonal(&diag);
        for e in neighborhood.induced_edges() {
            let i = neighborhood.position(e.source).unwrap();
            let j = neighborhood.position(e.target).unwrap();
            matrix[(i, j)] -= e.weight;
        }
        Self { members, matrix }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn spectrum(&self, rule: AssociationRule) -> Result<Spectrum, SpectralError> {
        let values = eigenvalues_of(&self.matrix)?;
        let (association, fallback) = match rule {
            AssociationRule::Index => (self.members.clone(), false),
            AssociationRule::Eigenvector => match eigenvectors(&self.matrix, &values) {
                Some(vectors) => (associate_nodes(&self.members, &values, &vectors), false),
                None => (self.members.clone(), true),
            },
        };
        Ok(Spectrum {
            eigenvalues: values,
            association,
            fallback,
        })
    }
}

/// Local Laplacian of a neighborhood under a degree mode.
pub fn build_local_laplacian(neighborhood: &Neighborhood, mode: DegreeMode) -> LocalLaplacian {
    LocalLaplacian::new(neighborhood, mode)
}

/// Eigenvalues of a local Laplacian with their associated nodes.
pub fn eigenvalues(laplacian: &LocalLaplacian, rule: AssociationRule) -> Result<Spectrum, SpectralError> {
    laplacian.spectrum(rule)
}

/// Complex eigenvalues paired with the neighborhood member each one is associated with.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    association: Vec<NodeId>,
    fallback: bool,
}

impl Spectrum {
    /// Assembles a spectrum from parts. Panics when the lengths differ.
    pub fn from_parts(eigenvalues: Vec<Complex64>, association: Vec<NodeId>) -> Self {
        assert_eq!(eigenvalues.len(), association.len());
        Self {
            eigenvalues,
            association,
            fallback: false,
        }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// `association()[i]` is the node of `eigenvalues()[i]`.
    pub fn association(&self) -> &[NodeId] {
        &self.association
    }

    pub fn iter(&self) -> impl Iterator<Item = (Complex64, NodeId)> + '_ {
        self.eigenvalues.iter().copied().zip(self.association.iter().copied())
    }

    /// True when eigenvector association was requested but an eigenvector
    /// could not be computed, so index order was used instead.
    pub fn used_index_fallback(&self) -> bool {
        self.fallback
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Eigenvalues of a general real square matrix. Conjugate pairs are adjacent
/// with the positive imaginary part first.
pub fn eigenvalues_of(matrix: &DenseMatrix) -> Result<Vec<Complex64>, SpectralError> {
    let sweeps = TOLERANCES.sweeps_per_dim * matrix.dim().max(1);
    qr::eigenvalues(matrix, sweeps).ok_or_else(|| SpectralError::NonConvergence {
        matrix: matrix.clone(),
        sweeps,
    })
}

/// Unit (max-norm) eigenvector for each eigenvalue by inverse iteration.
/// Eigenvalues with negative imaginary part reuse the conjugate of their
/// partner's vector, so conjugate pairs have identical component magnitudes.
/// `None` when some eigenvector does not reach the residual tolerance.
pub fn eigenvectors(matrix: &DenseMatrix, values: &[Complex64]) -> Option<Vec<Vec<Complex64>>> {
    let mut vectors: Vec<Option<Vec<Complex64>>> = vec![None; values.len()];
    for (i, &lambda) in values.iter().enumerate() {
        if lambda.im < 0.0 {
            let partner = values
                .iter()
                .position(|&v| v.re == lambda.re && v.im == -lambda.im);
            if let Some(p) = partner {
                if p < i {
                    vectors[i] = vectors[p].as_ref().map(|v| v.iter().map(|c| c.conj()).collect());
                    continue;
                }
            }
        }
        vectors[i] = Some(inverse_iteration(matrix, lambda)?);
    }
    vectors.into_iter().collect()
}

const SHIFT_OFFSET: f64 = 1e-10;

fn inverse_iteration(matrix: &DenseMatrix, lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = matrix.dim();
    let scale = matrix.l1_norm().max(1.0);
    let tiny = f64::EPSILON * scale;
    // Shifting slightly off the eigenvalue keeps defective blocks from
    // collapsing the iterate onto the wrong subspace.
    let shift = lambda + SHIFT_OFFSET * scale;

    // LU of (A - σI) with partial pivoting, near-zero pivots replaced by `tiny`
    let mut lu: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let v = Complex64::new(matrix[(i, j)], 0.0);
            if i == j {
                v - shift
            } else {
                v
            }
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if lu[row * n + col].norm() > lu[pivot * n + col].norm() {
                pivot = row;
            }
        }
        if pivot != col {
            for j in 0..n {
                lu.swap(pivot * n + j, col * n + j);
            }
            perm.swap(pivot, col);
        }
        if lu[col * n + col].norm() < tiny {
            lu[col * n + col] = Complex64::new(tiny, 0.0);
        }
        let p = lu[col * n + col];
        for i in col + 1..n {
            let f = lu[i * n + col] / p;
            lu[i * n + col] = f;
            for j in col + 1..n {
                let u = lu[col * n + j];
                lu[i * n + j] -= f * u;
            }
        }
    }

    let solve = |rhs: &[Complex64]| -> Vec<Complex64> {
        let mut x: Vec<Complex64> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = lu[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = lu[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= lu[i * n + i];
        }
        x
    };

    let mut v: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 + k as f64 / n as f64, 0.0)).collect();
    for _ in 0..3 {
        v = solve(&v);
        let norm = max_norm(&v);
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        for c in &mut v {
            *c /= norm;
        }
    }

    let mut residual: f64 = 0.0;
    for i in 0..n {
        let mut acc = -lambda * v[i];
        for j in 0..n {
            acc += v[j] * matrix[(i, j)];
        }
        residual = residual.max(hypot(acc.re, acc.im));
    }
    (residual <= TOLERANCES.eigenvector_residual * scale).then_some(v)
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| hypot(c.re, c.im)).fold(0.0, f64::max)
}

/// Greedy eigenvalue-to-node assignment.
///
/// Eigenvalues are visited in descending `|imag|`, then descending real part,
/// then ascending index. Each takes the still-unassigned member with the
/// largest eigenvector component magnitude, lowest id on ties.
pub fn associate_nodes(members: &[NodeId], values: &[Complex64], vectors: &[Vec<Complex64>]) -> Vec<NodeId> {
    let m = members.len();
    assert_eq!(values.len(), m);
    assert_eq!(vectors.len(), m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (values[a], values[b]);
        vb.im
            .abs()
            .total_cmp(&va.im.abs())
            .then(vb.re.total_cmp(&va.re))
            .then(a.cmp(&b))
    });

    let mut taken = vec![false; m];
    let mut association = vec![NodeId(0); m];
    for idx in order {
        let magnitudes: Vec<f64> = vectors[idx].iter().map(|c| hypot(c.re, c.im)).collect();
        let best = (0..m)
            .filter(|&k| !taken[k])
            .map(|k| magnitudes[k])
            .fold(f64::NEG_INFINITY, f64::max);
        let pick = (0..m)
            .find(|&k| !taken[k] && magnitudes[k] >= best - MAGNITUDE_TIE * best.abs())
            .expect("an unassigned member always remains");
        taken[pick] = true;
        association[idx] = members[pick];
    }
    association
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn edge(s: usize, t: usize, w: f64) -> Edge {
        Edge {
            source: NodeId(s),
            target: NodeId(t),
            weight: w,
        }
    }

    fn two_node(edges: &[Edge]) -> Neighborhood {
        Neighborhood::from_parts(NodeId(0), [NodeId(1)], edges.iter().copied())
    }

    #[test]
    fn laplacian_examples() {
        let nb = two_node(&[edge(0, 1, 0.5)]);
        let l = build_local_laplacian(&nb, DegreeMode::Directed);
        assert_eq!(l.matrix(), &DenseMatrix::from_rows([[1.0, -0.5], [0.0, 1.0]]));
        let l = build_local_laplacian(&nb, DegreeMode::Weighted);
        assert_eq!(l.matrix(), &DenseMatrix::from_rows([[0.5, -0.5], [0.0, 0.5]]));

        let nb = two_node(&[edge(0, 1, 1.0), edge(1, 0, -1.0)]);
        let l = build_local_laplacian(&nb, DegreeMode::Directed);
        assert_eq!(l.matrix(), &DenseMatrix::from_rows([[2.0, -1.0], [1.0, 2.0]]));
        assert_eq!(l.members(), [NodeId(0), NodeId(1)]);
    }

    #[test]
    fn directed_mode_diagonal_is_non_negative() {
        let g = crate::graph::NetworkGraph::fully_connected(3, 17);
        for node in g.nodes() {
            let l = build_local_laplacian(&g.neighborhood(node), DegreeMode::Directed);
            for i in 0..l.matrix().dim() {
                assert!(l.matrix()[(i, i)] >= 0.0);
            }
        }
    }

    fn assert_close(got: Complex64, re: f64, im: f64) {
        assert!((got.re - re).abs() < 1e-12 && (got.im - im).abs() < 1e-12, "got {got}, want {re}{im:+}i");
    }

    #[test]
    fn eigenvalue_examples() {
        let ev = eigenvalues_of(&DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0])).unwrap();
        let mut re: Vec<f64> = ev.iter().map(|v| v.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, [1.0, 2.0, 3.0]);
        assert!(ev.iter().all(|v| v.im == 0.0));

        let ev = eigenvalues_of(&DenseMatrix::from_rows([[0.0, -1.0], [1.0, 0.0]])).unwrap();
        assert_close(ev[0], 0.0, 1.0);
        assert_close(ev[1], 0.0, -1.0);

        // λ² − 4λ + 5 = 0  →  λ = (4 ± √(16 − 20)) / 2 = 2 ± i
        let ev = eigenvalues_of(&DenseMatrix::from_rows([[2.0, -1.0], [1.0, 2.0]])).unwrap();
        assert_close(ev[0], 2.0, 1.0);
        assert_close(ev[1], 2.0, -1.0);
    }

    #[test]
    fn association_examples() {
        let members = [NodeId(4), NodeId(6)];
        let nb = Neighborhood::from_parts(NodeId(4), [NodeId(6)], []);
        let mut l = build_local_laplacian(&nb, DegreeMode::Directed);
        l.matrix = DenseMatrix::from_diagonal(&[5.0, 7.0]);
        let spec = l.spectrum(AssociationRule::Eigenvector).unwrap();
        for (value, node) in spec.iter() {
            let expect = if value.re == 5.0 { members[0] } else { members[1] };
            assert_eq!(node, expect);
        }

        // eigenvectors (1, −i) for 2+i and (1, i) for 2−i: magnitudes tie
        l.matrix = DenseMatrix::from_rows([[2.0, -1.0], [1.0, 2.0]]);
        let spec = l.spectrum(AssociationRule::Eigenvector).unwrap();
        assert!(!spec.used_index_fallback());
        for (value, node) in spec.iter() {
            if value.im > 0.0 {
                assert_eq!(node, NodeId(4));
            } else {
                assert_eq!(node, NodeId(6));
            }
        }

        let one = Neighborhood::from_parts(NodeId(3), [], []);
        let spec = build_local_laplacian(&one, DegreeMode::Weighted)
            .spectrum(AssociationRule::Eigenvector)
            .unwrap();
        assert_eq!(spec.association(), [NodeId(3)]);
        assert_eq!(spec.eigenvalues(), [Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn index_association_follows_solver_order() {
        let nb = two_node(&[edge(0, 1, 1.0), edge(1, 0, -1.0)]);
        let spec = build_local_laplacian(&nb, DegreeMode::Directed)
            .spectrum(AssociationRule::Index)
            .unwrap();
        assert_eq!(spec.association(), [NodeId(0), NodeId(1)]);
    }

    #[test]
    fn defective_matrix_still_gets_a_bijection() {
        // Jordan block: one eigenvector shared by a double eigenvalue
        let nb = two_node(&[edge(0, 1, -1.0)]);
        let mut l = build_local_laplacian(&nb, DegreeMode::Directed);
        l.matrix = DenseMatrix::from_rows([[3.0, 1.0], [0.0, 3.0]]);
        let spec = l.spectrum(AssociationRule::Eigenvector).unwrap();
        let mut nodes = spec.association().to_vec();
        nodes.sort();
        assert_eq!(nodes, [NodeId(0), NodeId(1)]);
    }

    #[test]
    fn eigenvectors_satisfy_their_equation() {
        let m = DenseMatrix::from_rows([[1.0, 2.0, 0.5], [-2.0, 0.3, 1.0], [0.0, 0.7, -1.0]]);
        let values = eigenvalues_of(&m).unwrap();
        let vectors = eigenvectors(&m, &values).unwrap();
        for (lambda, v) in values.iter().zip(&vectors) {
            for i in 0..3 {
                let mut acc = -lambda * v[i];
                for j in 0..3 {
                    acc += v[j] * m[(i, j)];
                }
                assert!(acc.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn defective_triangular_block_has_eigenvectors() {
        // Laplacian of an acyclic neighborhood: one eigenvalue of algebraic multiplicity 4
        let m = DenseMatrix::from_rows([
            [3.0, -0.885, 0.305, -0.420],
            [0.0, 3.0, 0.617, -0.026],
            [0.0, 0.0, 3.0, -0.840],
            [0.0, 0.0, 0.0, 3.0],
        ]);
        let values = eigenvalues_of(&m).unwrap();
        let vectors = eigenvectors(&m, &values).expect("inverse iteration should converge");
        for v in &vectors {
            assert!((v[0].norm() - 1.0).abs() < 1e-6);
            assert!(v[1..].iter().all(|c| c.norm() < 1e-6));
        }
    }

    #[test]
    fn non_convergence_names_the_matrix() {
        let err = SpectralError::NonConvergence {
            matrix: DenseMatrix::from_rows([[1.0, 2.0], [3.0, 4.0]]),
            sweeps: 200,
        };
        let text = alloc::format!("{err}");
        assert!(text.contains("1.0 2.0\n3.0 4.0"));
    }
}
