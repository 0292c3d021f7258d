//! Path-sum evaluation of covariance blocks.
//!
//! A diagonal block of the inverse is the inverse of a signed sum over the
//! simple cycles rooted at the vertex; each cycle contributes the ordered
//! product of its edge weights interleaved with diagonal resolvents of
//! smaller subgraphs. An off-diagonal block is a signed sum over simple
//! paths of the same kind of product, closed on the right by the diagonal
//! block at the source.
//!
//! Walks are summed suffix-first: the signed sum over every simple
//! continuation from a vertex depends only on that vertex, the component it
//! survives in and the walk's endpoint, so it is cached and shared by all
//! prefixes that reach it. Resolvents are cached the same way by
//! `(surviving component, vertex)`, which keeps the work linear on trees.

mod observe;

use dashmap::DashMap;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

pub use observe::absorb_observations;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeight, ModelGraph, VertexSubset};
use crate::model::{BlockPartition, InformationModel};

/// Work counters for one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecursionStats {
    /// Base-case inversions (vertices with no surviving neighbour) performed.
    pub leaf_count: usize,
    /// Deepest resolvent recursion reached; the query itself is depth 0.
    pub max_depth: usize,
}

/// `(J_{G \ deleted})^{-1}` restricted to the diagonal block of `vertex`.
#[derive(Debug, Clone)]
pub struct DiagonalResolvent {
    pub deleted: VertexSubset,
    pub vertex: usize,
    pub value: DMatrix<f64>,
    /// Estimated condition number of the final inversion; its reciprocal is
    /// compared with the singularity threshold.
    pub condition: f64,
    pub stats: RecursionStats,
}

/// A covariance block `Σ[I_target, I_source]`.
#[derive(Debug, Clone)]
pub struct PathSumResult {
    pub source: usize,
    pub target: usize,
    pub value: DMatrix<f64>,
    /// Simple paths summed (1 for a diagonal block).
    pub path_count: usize,
    pub max_depth: usize,
    pub leaf_count: usize,
}

/// Memoizing evaluator bound to one graph. Safe to share between threads.
pub struct PathSumEngine<'g, W> {
    graph: &'g ModelGraph<W>,
    resolvents: DashMap<(VertexSubset, usize), Resolvent<W>, FxBuildHasher>,
    /// `(root, component, vertex)`: cycle continuations back to the root.
    returns: DashMap<(usize, VertexSubset, usize), Return<W>, FxBuildHasher>,
    /// `(target, component, vertex)`: path continuations ending at the target.
    arrivals: DashMap<(usize, VertexSubset, usize), Arrival<W>, FxBuildHasher>,
}

/// A memoized diagonal resolvent with its condition estimate.
#[derive(Debug, Clone)]
struct Resolvent<W> {
    value: W,
    condition: f64,
}

/// Signed sum over the simple continuations `x → … → μ_ℓ → root` inside a
/// component, each term `J_{root μ_ℓ} G_ℓ J_{μ_ℓ μ_ℓ-1} ⋯ G_x` carrying the
/// sign of its extra edges.
#[derive(Debug, Clone)]
struct Return<W> {
    value: W,
    /// Sum of the terms' norms, from products of factor norms.
    magnitude: f64,
    /// Same, each term weighted by its error amplification.
    weighted: f64,
}

/// Signed sum over the simple continuations `x → … → target` inside a
/// component, each term `G_target J ⋯ J G_x`.
#[derive(Debug, Clone)]
struct Arrival<W> {
    value: W,
    paths: usize,
}

impl<'g, W: EdgeWeight> PathSumEngine<'g, W> {
    pub fn new(graph: &'g ModelGraph<W>) -> Self {
        Self {
            graph,
            resolvents: DashMap::with_hasher(FxBuildHasher),
            returns: DashMap::with_hasher(FxBuildHasher),
            arrivals: DashMap::with_hasher(FxBuildHasher),
        }
    }

    pub fn graph(&self) -> &'g ModelGraph<W> {
        self.graph
    }

    /// Number of cached resolvents.
    pub fn cache_len(&self) -> usize {
        self.resolvents.len()
    }

    /// Diagonal block of `alpha` in the inverse of `J` with `deleted` removed.
    pub fn diagonal_entry(
        &self,
        deleted: &VertexSubset,
        alpha: usize,
    ) -> Result<DiagonalResolvent> {
        self.graph.check_vertex(alpha, deleted)?;
        let mut stats = RecursionStats::default();
        let allowed = deleted.complement(self.graph.num_vertices());
        let component = self.graph.component_within(&allowed, alpha);
        let resolvent = self.resolvent(component, alpha, 0, &mut stats)?;
        Ok(DiagonalResolvent {
            deleted: deleted.clone(),
            vertex: alpha,
            value: resolvent.value.to_dense(),
            condition: resolvent.condition,
            stats,
        })
    }

    /// Covariance block `Σ[I_omega, I_alpha]` on the full graph.
    pub fn entry(&self, alpha: usize, omega: usize) -> Result<PathSumResult> {
        let none = VertexSubset::empty(self.graph.num_vertices());
        self.graph.check_vertex(alpha, &none)?;
        self.graph.check_vertex(omega, &none)?;
        let mut stats = RecursionStats::default();
        let component = self
            .graph
            .component_within(&self.graph.all_vertices(), alpha);
        let sigma_aa = self
            .resolvent(component.clone(), alpha, 0, &mut stats)?
            .value;

        let (value, path_count) = if alpha == omega {
            (sigma_aa.to_dense(), 1)
        } else if !component.contains(omega) {
            let value = DMatrix::zeros(self.graph.block_size(omega), self.graph.block_size(alpha));
            (value, 0)
        } else {
            let mut sum = W::new_sum(self.graph.block_size(omega), self.graph.block_size(alpha));
            let mut paths = 0;
            let mut rest = component;
            rest.remove(alpha);
            for (x, weight) in self.graph.out_edges(alpha) {
                if !rest.contains(x) {
                    continue;
                }
                let k = self.graph.component_within(&rest, x);
                if !k.contains(omega) {
                    continue;
                }
                let tail = self.arrival(omega, k, x, &mut stats)?;
                W::add_term(&mut sum, &tail.value.mul(&weight.mul(&sigma_aa)), true, 1.0);
                paths += tail.paths;
            }
            (W::finish(sum).0.to_dense(), paths)
        };
        Ok(PathSumResult {
            source: alpha,
            target: omega,
            value,
            path_count,
            max_depth: stats.max_depth,
            leaf_count: stats.leaf_count,
        })
    }

    /// Off-diagonal block via the simple-path sum; `alpha` must differ from `omega`.
    pub fn off_diagonal_entry(&self, alpha: usize, omega: usize) -> Result<PathSumResult> {
        if alpha == omega {
            return Err(Error::Domain {
                vertex: omega,
                reason: "off-diagonal query needs distinct endpoints",
            });
        }
        self.entry(alpha, omega)
    }

    /// `(J_component)^{-1}` at `v`: the inverse of the signed cycle sum
    /// `J_vv - Σ_x R(v, K_x, x) J_xv`, with `K_x` the component of the
    /// neighbour `x` once `v` is removed.
    fn resolvent(
        &self,
        component: VertexSubset,
        v: usize,
        depth: usize,
        stats: &mut RecursionStats,
    ) -> Result<Resolvent<W>> {
        let key = (component, v);
        if let Some(hit) = self.resolvents.get(&key) {
            return Ok(hit.value().clone());
        }
        stats.max_depth = stats.max_depth.max(depth);
        let (component, v) = key;
        let singular = || Error::Singular {
            deleted: component.complement(self.graph.num_vertices()).to_vec(),
        };

        let (value, condition) = if component.len() == 1 {
            stats.leaf_count += 1;
            let own = self.graph.self_weight(v);
            own.invert(own.norm1()).ok_or_else(singular)?
        } else {
            let d = self.graph.block_size(v);
            let mut sum = W::new_sum(d, d);
            let mut scale = 0.0;
            if self.graph.has_self_loop(v) {
                let own = self.graph.self_weight(v);
                W::add_term(&mut sum, own, false, 1.0);
                scale += own.norm1();
            }
            let mut rest = component.clone();
            rest.remove(v);
            for (x, weight) in self.graph.out_edges(v) {
                if !rest.contains(x) {
                    continue;
                }
                let k = self.graph.component_within(&rest, x);
                let back = self.cycle_return(v, k, x, depth, stats)?;
                W::add_term(&mut sum, &back.value.mul(weight), true, 1.0);
                scale += weight.norm1() * (back.weighted + back.magnitude);
            }
            let (total, _) = W::finish(sum);
            total.invert(scale).ok_or_else(singular)?
        };
        let resolvent = Resolvent { value, condition };
        self.resolvents.insert((component, v), resolvent.clone());
        Ok(resolvent)
    }

    /// `R(root, K, x) = [J_{root x}] G_x - Σ_y R(root, K_y, y) J_yx G_x`, where
    /// `G_x` is the resolvent of `x` in `K` and `K_y` the component of `y` in
    /// `K \ {x}`. Continuations that can no longer reach a neighbour of the
    /// root are skipped.
    fn cycle_return(
        &self,
        root: usize,
        component: VertexSubset,
        x: usize,
        depth: usize,
        stats: &mut RecursionStats,
    ) -> Result<Return<W>> {
        let key = (root, component, x);
        if let Some(hit) = self.returns.get(&key) {
            return Ok(hit.value().clone());
        }
        let (_, component, _) = key;
        let g = self.resolvent(component.clone(), x, depth + 1, stats)?;
        let g_norm = g.value.norm1();
        // two multiplications per step on top of the resolvent's own error
        let cost = g.condition + 2.0;

        let mut sum = W::new_sum(self.graph.block_size(root), self.graph.block_size(x));
        let (mut magnitude, mut weighted) = (0.0, 0.0);
        if let Some(closing) = self.graph.block(root, x) {
            W::add_term(&mut sum, &closing.mul(&g.value), false, 1.0);
            let n = closing.norm1() * g_norm;
            magnitude += n;
            weighted += n * (cost + 1.0);
        }
        let root_neighbors = self.graph.neighbor_set(root);
        let mut rest = component.clone();
        rest.remove(x);
        for (y, weight) in self.graph.out_edges(x) {
            if !rest.contains(y) {
                continue;
            }
            let k = self.graph.component_within(&rest, y);
            if !k.intersects(root_neighbors) {
                continue;
            }
            let tail = self.cycle_return(root, k, y, depth, stats)?;
            W::add_term(&mut sum, &tail.value.mul(&weight.mul(&g.value)), true, 1.0);
            let f = weight.norm1() * g_norm;
            magnitude += f * tail.magnitude;
            weighted += f * (tail.weighted + cost * tail.magnitude);
        }
        let value = Return {
            value: W::finish(sum).0,
            magnitude,
            weighted,
        };
        self.returns.insert((root, component, x), value.clone());
        Ok(value)
    }

    /// `A(target, K, x) = G_target` if `x` is the target, otherwise
    /// `-Σ_y A(target, K_y, y) J_yx G_x` over neighbours whose component
    /// still contains the target.
    fn arrival(
        &self,
        target: usize,
        component: VertexSubset,
        x: usize,
        stats: &mut RecursionStats,
    ) -> Result<Arrival<W>> {
        let key = (target, component, x);
        if let Some(hit) = self.arrivals.get(&key) {
            return Ok(hit.value().clone());
        }
        let (_, component, _) = key;
        let g = self.resolvent(component.clone(), x, 1, stats)?.value;
        let value = if x == target {
            Arrival { value: g, paths: 1 }
        } else {
            let mut sum = W::new_sum(self.graph.block_size(target), self.graph.block_size(x));
            let mut paths = 0usize;
            let mut rest = component.clone();
            rest.remove(x);
            for (y, weight) in self.graph.out_edges(x) {
                if !rest.contains(y) {
                    continue;
                }
                let k = self.graph.component_within(&rest, y);
                if !k.contains(target) {
                    continue;
                }
                let tail = self.arrival(target, k, y, stats)?;
                W::add_term(&mut sum, &tail.value.mul(&weight.mul(&g)), true, 1.0);
                paths = paths.saturating_add(tail.paths);
            }
            Arrival {
                value: W::finish(sum).0,
                paths,
            }
        };
        self.arrivals.insert((target, component, x), value.clone());
        Ok(value)
    }
}

/// Options for [`full_covariance_with`].
#[derive(Debug, Clone, Copy)]
pub struct CovarianceOptions {
    /// Worker threads for independent block pairs; 1 runs sequentially.
    pub threads: usize,
    /// Off-diagonal blocks with no entry above this magnitude are treated as absent.
    pub drop_tolerance: f64,
}

impl Default for CovarianceOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            drop_tolerance: 0.0,
        }
    }
}

/// Full covariance `J^{-1}` assembled from path-sums over every block pair.
pub fn full_covariance(
    model: &InformationModel,
    partition: &BlockPartition,
) -> Result<DMatrix<f64>> {
    full_covariance_with(model, partition, CovarianceOptions::default())
}

pub fn full_covariance_with(
    model: &InformationModel,
    partition: &BlockPartition,
    options: CovarianceOptions,
) -> Result<DMatrix<f64>> {
    if partition.is_singletons() {
        let graph = ModelGraph::<f64>::from_model(model, partition, options.drop_tolerance)?;
        assemble(&PathSumEngine::new(&graph), options.threads)
    } else {
        let graph =
            ModelGraph::<DMatrix<f64>>::from_model(model, partition, options.drop_tolerance)?;
        assemble(&PathSumEngine::new(&graph), options.threads)
    }
}

/// Evaluates every ordered block pair and scatters the blocks into a dense matrix.
pub fn assemble<W: EdgeWeight>(
    engine: &PathSumEngine<'_, W>,
    threads: usize,
) -> Result<DMatrix<f64>> {
    let graph = engine.graph();
    let b = graph.num_vertices();
    let pairs: Vec<(usize, usize)> = (0..b).flat_map(|a| (0..b).map(move |w| (a, w))).collect();
    let results: Vec<PathSumResult> = if threads <= 1 {
        pairs
            .iter()
            .map(|&(a, w)| engine.entry(a, w))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Configuration(format!("cannot start thread pool: {e}")))?;
        pool.install(|| {
            pairs
                .par_iter()
                .map(|&(a, w)| engine.entry(a, w))
                .collect::<Result<_>>()
        })?
    };

    let partition = graph.partition();
    let n = partition.dim();
    let mut sigma = DMatrix::zeros(n, n);
    for r in results {
        scatter(&mut sigma, partition, r.target, r.source, &r.value);
    }
    Ok(sigma)
}

fn scatter(
    sigma: &mut DMatrix<f64>,
    partition: &BlockPartition,
    row_block: usize,
    col_block: usize,
    value: &DMatrix<f64>,
) {
    for (r, &i) in partition.block(row_block).iter().enumerate() {
        for (c, &k) in partition.block(col_block).iter().enumerate() {
            sigma[(i, k)] = value[(r, c)];
        }
    }
}

/// Mean `μ = J^{-1} h` through the path-sum covariance.
pub fn mean_vector(model: &InformationModel, partition: &BlockPartition) -> Result<DVector<f64>> {
    let h = model
        .potential()
        .ok_or_else(|| Error::Configuration("model has no potential vector".into()))?;
    Ok(full_covariance(model, partition)? * h)
}
