use crate::atoms::{self, AtomPartition, AtomPoset};
use crate::model::{IndexSet, NonnegativeMatrix};
use crate::sets::SupportGraph;

/// Default relative support threshold for the float backend.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-12;

/// A nonnegative matrix together with its support graph and atom poset.
///
/// The stored matrix has float entries at or below the support threshold
/// zeroed, so numeric blocks always agree with the graph.
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: NonnegativeMatrix,
    graph: SupportGraph,
    poset: AtomPoset,
    support_threshold: f64,
}

impl Operator {
    pub fn new(matrix: NonnegativeMatrix) -> Self {
        Self::with_threshold(matrix, DEFAULT_SUPPORT_THRESHOLD)
    }

    pub fn with_threshold(matrix: NonnegativeMatrix, support_threshold: f64) -> Self {
        let matrix = matrix.with_support_threshold(support_threshold);
        let graph = SupportGraph::from_matrix(&matrix, 0.0);
        let poset = AtomPoset::new(&graph, atoms::atoms(&graph));
        Operator {
            matrix,
            graph,
            poset,
            support_threshold,
        }
    }

    pub fn matrix(&self) -> &NonnegativeMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> &SupportGraph {
        &self.graph
    }

    pub fn poset(&self) -> &AtomPoset {
        &self.poset
    }

    pub fn partition(&self) -> &AtomPartition {
        self.poset.partition()
    }

    pub fn atom(&self, a: usize) -> &IndexSet {
        self.partition().atom(a)
    }

    pub fn atom_count(&self) -> usize {
        self.poset.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn support_threshold(&self) -> f64 {
        self.support_threshold
    }

    pub fn is_admissible(&self, set: &IndexSet) -> bool {
        self.partition().is_admissible(set)
    }

    /// The adjoint operator (transposed matrix), sharing the same atoms.
    pub fn transpose(&self) -> Self {
        Self::with_threshold(self.matrix.transpose(), self.support_threshold)
    }
}
