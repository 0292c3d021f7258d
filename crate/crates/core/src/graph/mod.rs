//! Weighted graph of a (block-partitioned) information matrix and the
//! enumeration of its prime walks.
//!
//! Vertex `i` of the graph is block `I_i` of the partition. There is an edge
//! between `i` and `j` exactly when the block `J[I_i, I_j]` has a nonzero
//! entry, and that block is the weight carried by the edge `j -> i`. The
//! diagonal block `J[I_i, I_i]` is the self-loop weight of `i`.

mod subset;
mod walks;
mod weight;

use nalgebra::DMatrix;

pub use subset::VertexSubset;
pub use walks::{SimpleCycle, SimpleCycles, SimplePath, SimplePaths};
pub use weight::{invert_block, norm1, BlockSum, CompensatedSum, EdgeWeight, RCOND_THRESHOLD};

use crate::error::{Error, Result};
use crate::model::{BlockPartition, InformationModel};

/// Graph with dense block weights.
pub type BlockGraph = ModelGraph<DMatrix<f64>>;
/// Graph of the trivial partition with scalar weights.
pub type ScalarGraph = ModelGraph<f64>;

#[derive(Debug, Clone)]
pub struct ModelGraph<W> {
    partition: BlockPartition,
    self_weights: Vec<W>,
    self_loops: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    neighbor_sets: Vec<VertexSubset>,
    // row_blocks[i][k] = J[I_i, I_j] and col_blocks[i][k] = J[I_j, I_i] for j = neighbors[i][k]
    row_blocks: Vec<Vec<W>>,
    col_blocks: Vec<Vec<W>>,
}

/// Builds the block graph of `model` under `partition`, treating blocks as
/// present when any entry is nonzero.
pub fn build_graph(model: &InformationModel, partition: &BlockPartition) -> Result<BlockGraph> {
    ModelGraph::from_model(model, partition, 0.0)
}

/// Builds the scalar graph of `model` (singleton partition).
pub fn build_scalar_graph(model: &InformationModel) -> ScalarGraph {
    ModelGraph::from_model(model, &BlockPartition::singletons(model.dim()), 0.0)
        .expect("singleton partition always matches the model")
}

impl<W: EdgeWeight> ModelGraph<W> {
    /// Builds the graph with an edge wherever an off-diagonal block has an
    /// entry of magnitude greater than `drop_tolerance`.
    pub fn from_model(
        model: &InformationModel,
        partition: &BlockPartition,
        drop_tolerance: f64,
    ) -> Result<Self> {
        if partition.dim() != model.dim() {
            return Err(Error::Dimension(format!(
                "partition covers {} indices but the model has {} variables",
                partition.dim(),
                model.dim()
            )));
        }
        if drop_tolerance.is_nan() || drop_tolerance < 0.0 {
            return Err(Error::Configuration(format!(
                "drop tolerance must be nonnegative, got {drop_tolerance}"
            )));
        }
        let j = model.information();
        let b = partition.num_blocks();
        let blocks = partition.blocks();

        let mut self_weights = Vec::with_capacity(b);
        let mut self_loops = Vec::with_capacity(b);
        let mut neighbors = vec![Vec::new(); b];
        let mut row_blocks: Vec<Vec<W>> = (0..b).map(|_| Vec::new()).collect();
        let mut col_blocks: Vec<Vec<W>> = (0..b).map(|_| Vec::new()).collect();

        for p in 0..b {
            let diag = W::extract(j, &blocks[p], &blocks[p]);
            self_loops.push(diag.exceeds(0.0));
            self_weights.push(diag);
            for q in 0..b {
                if p == q {
                    continue;
                }
                let w = W::extract(j, &blocks[p], &blocks[q]);
                if w.exceeds(drop_tolerance) {
                    neighbors[p].push(q);
                    col_blocks[p].push(W::extract(j, &blocks[q], &blocks[p]));
                    row_blocks[p].push(w);
                }
            }
        }
        let neighbor_sets = neighbors
            .iter()
            .map(|n| VertexSubset::from_vertices(b, n.iter().copied()))
            .collect();

        Ok(Self {
            partition: partition.clone(),
            self_weights,
            self_loops,
            neighbors,
            neighbor_sets,
            row_blocks,
            col_blocks,
        })
    }
}

impl<W> ModelGraph<W> {
    pub fn num_vertices(&self) -> usize {
        self.neighbors.len()
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn block_size(&self, v: usize) -> usize {
        self.partition.block(v).len()
    }

    /// Diagonal block `J[I_v, I_v]`.
    pub fn self_weight(&self, v: usize) -> &W {
        &self.self_weights[v]
    }

    /// Whether `v` carries a structural self-loop (nonzero diagonal block).
    pub fn has_self_loop(&self, v: usize) -> bool {
        self.self_loops[v]
    }

    /// Neighbors of `v` in ascending order, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn neighbor_set(&self, v: usize) -> &VertexSubset {
        &self.neighbor_sets[v]
    }

    /// Neighbors of `v` with the weights `J[I_u, I_v]` of the edges `v -> u`.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, &W)> {
        self.neighbors[v]
            .iter()
            .copied()
            .zip(self.col_blocks[v].iter())
    }

    /// The block `J[I_row, I_col]` if it is an edge (or the self-loop when
    /// `row == col`).
    pub fn block(&self, row: usize, col: usize) -> Option<&W> {
        if row == col {
            return self.self_loops[row].then(|| &self.self_weights[row]);
        }
        let k = self.neighbors[row].binary_search(&col).ok()?;
        Some(&self.row_blocks[row][k])
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn all_vertices(&self) -> VertexSubset {
        VertexSubset::full(self.num_vertices())
    }

    pub(crate) fn check_vertex(&self, v: usize, deleted: &VertexSubset) -> Result<()> {
        if v >= self.num_vertices() {
            return Err(Error::Domain {
                vertex: v,
                reason: "outside the graph",
            });
        }
        if deleted.contains(v) {
            return Err(Error::Domain {
                vertex: v,
                reason: "in the deleted set",
            });
        }
        Ok(())
    }

    /// Vertices reachable from `seed` in the graph with `deleted` removed.
    pub fn connected_component(&self, deleted: &VertexSubset, seed: usize) -> Result<VertexSubset> {
        self.check_vertex(seed, deleted)?;
        let allowed = deleted.complement(self.num_vertices());
        Ok(self.component_within(&allowed, seed))
    }

    /// Component of `seed` in the subgraph induced by `allowed`. `seed` must be allowed.
    pub(crate) fn component_within(&self, allowed: &VertexSubset, seed: usize) -> VertexSubset {
        let n = self.num_vertices();
        let mut seen = VertexSubset::empty(n);
        seen.insert(seed);
        let mut frontier = seen.clone();
        while !frontier.is_empty() {
            let mut next = VertexSubset::empty(n);
            for v in frontier.iter() {
                next.union_with(&self.neighbor_sets[v]);
            }
            next.intersect_with(allowed);
            next.difference_with(&seen);
            seen.union_with(&next);
            frontier = next;
        }
        seen
    }

    /// Streams the simple paths from `source` to `target` avoiding `deleted`.
    pub fn simple_paths(
        &self,
        deleted: &VertexSubset,
        source: usize,
        target: usize,
    ) -> Result<SimplePaths<'_, W>> {
        self.check_vertex(source, deleted)?;
        self.check_vertex(target, deleted)?;
        Ok(SimplePaths::new(self, deleted.clone(), source, target))
    }

    /// Streams the simple cycles rooted at `root` avoiding `deleted`, self-loop first.
    pub fn simple_cycles(
        &self,
        deleted: &VertexSubset,
        root: usize,
    ) -> Result<SimpleCycles<'_, W>> {
        self.check_vertex(root, deleted)?;
        Ok(SimpleCycles::new(self, deleted.clone(), root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cycle_c5, thin_membrane, thin_membrane_partition};

    #[test]
    fn c5_graph_is_a_five_cycle() {
        let g = build_graph(&cycle_c5(0.3), &BlockPartition::singletons(5)).unwrap();
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.num_edges(), 5);
        for v in 0..5 {
            let mut expected = vec![(v + 1) % 5, (v + 4) % 5];
            expected.sort();
            assert_eq!(g.neighbors(v), expected.as_slice());
            assert_eq!(g.self_weight(v)[(0, 0)], 1.0);
            assert_eq!(g.block(v, (v + 1) % 5).unwrap()[(0, 0)], 0.3);
        }
    }

    #[test]
    fn thin_membrane_blocks_form_a_triangle() {
        let model = thin_membrane(1.0, 2.0);
        let g = build_graph(&model, &thin_membrane_partition()).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        let e = DMatrix::from_row_slice(3, 3, &[-2.0, -2.0, 0.0, -2.0, 0.0, -2.0, 0.0, -2.0, -2.0]);
        let l =
            DMatrix::from_row_slice(3, 3, &[11.0, -2.0, 0.0, -2.0, 11.0, -2.0, 0.0, -2.0, 11.0]);
        for v in 0..3 {
            assert_eq!(g.self_weight(v), &l);
            for u in 0..3 {
                if u != v {
                    assert_eq!(g.block(v, u).unwrap(), &e);
                    assert_eq!(g.block(v, u).unwrap(), &g.block(u, v).unwrap().transpose());
                }
            }
        }
    }

    #[test]
    fn diagonal_matrix_has_only_self_loops() {
        let j = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let g = build_scalar_graph(&InformationModel::new(j, None).unwrap());
        assert_eq!(g.num_edges(), 0);
        assert!((0..3).all(|v| g.has_self_loop(v) && g.neighbors(v).is_empty()));
    }

    #[test]
    fn drop_tolerance_removes_small_blocks() {
        let j = DMatrix::from_row_slice(2, 2, &[1.0, 1e-9, 1e-9, 1.0]);
        let model = InformationModel::new(j, None).unwrap();
        let p = BlockPartition::singletons(2);
        assert_eq!(
            ModelGraph::<f64>::from_model(&model, &p, 0.0)
                .unwrap()
                .num_edges(),
            1
        );
        assert_eq!(
            ModelGraph::<f64>::from_model(&model, &p, 1e-6)
                .unwrap()
                .num_edges(),
            0
        );
    }

    #[test]
    fn partition_size_must_match_model() {
        let model = cycle_c5(0.3);
        assert!(matches!(
            build_graph(&model, &BlockPartition::singletons(4)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn components_after_deletion() {
        let j = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let g = build_scalar_graph(&InformationModel::new(j, None).unwrap());
        let deleted = VertexSubset::from_vertices(3, [1]);
        assert_eq!(
            g.connected_component(&deleted, 0).unwrap().to_vec(),
            vec![0]
        );
        assert!(matches!(
            g.connected_component(&deleted, 1),
            Err(Error::Domain { .. })
        ));

        let c5 = build_scalar_graph(&cycle_c5(0.3));
        let deleted = VertexSubset::from_vertices(5, [0]);
        assert_eq!(
            c5.connected_component(&deleted, 2).unwrap().to_vec(),
            vec![1, 2, 3, 4]
        );
    }
}
