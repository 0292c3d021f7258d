//! Depth-first enumeration of simple paths and simple cycles.
//!
//! Both streams keep an on-path set and visit neighbors in ascending order,
//! so emission order is deterministic and nothing beyond the current path is
//! materialized.

use super::{ModelGraph, VertexSubset};

/// A path `(ν_1, ..., ν_{ℓ+1})` of distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplePath {
    pub vertices: Vec<usize>,
}

impl SimplePath {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A closed walk `(μ_1, ..., μ_ℓ)` returning from `μ_ℓ` to the root `μ_1`.
/// Length 1 is the self-loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleCycle {
    pub vertices: Vec<usize>,
}

impl SimpleCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        self.vertices[0]
    }
}

/// Shared DFS state: the current path, a cursor into each path vertex's
/// neighbor list, and the blocked set (deleted vertices plus the path).
struct Dfs<'g, W> {
    graph: &'g ModelGraph<W>,
    path: Vec<usize>,
    cursors: Vec<usize>,
    blocked: VertexSubset,
}

enum Step {
    /// Next unexplored neighbor of the path's last vertex.
    Neighbor(usize),
    Exhausted,
}

impl<'g, W> Dfs<'g, W> {
    fn new(graph: &'g ModelGraph<W>, deleted: VertexSubset, start: usize) -> Self {
        let mut blocked = deleted;
        blocked.insert(start);
        Self {
            graph,
            path: vec![start],
            cursors: vec![0],
            blocked,
        }
    }

    fn advance(&mut self) -> Step {
        loop {
            let Some(&top) = self.path.last() else {
                return Step::Exhausted;
            };
            let nbrs = self.graph.neighbors(top);
            let cursor = self.cursors.last_mut().expect("cursor per path vertex");
            if *cursor < nbrs.len() {
                let u = nbrs[*cursor];
                *cursor += 1;
                return Step::Neighbor(u);
            }
            self.path.pop();
            self.cursors.pop();
            if !self.path.is_empty() {
                self.blocked.remove(top);
            }
        }
    }

    fn descend(&mut self, u: usize) {
        self.path.push(u);
        self.cursors.push(0);
        self.blocked.insert(u);
    }
}

/// Stream returned by [`ModelGraph::simple_paths`].
pub struct SimplePaths<'g, W> {
    dfs: Dfs<'g, W>,
    target: usize,
    trivial: Option<bool>,
}

impl<'g, W> SimplePaths<'g, W> {
    pub(super) fn new(
        graph: &'g ModelGraph<W>,
        deleted: VertexSubset,
        source: usize,
        target: usize,
    ) -> Self {
        Self {
            dfs: Dfs::new(graph, deleted, source),
            target,
            trivial: (source == target).then_some(false),
        }
    }
}

impl<W> Iterator for SimplePaths<'_, W> {
    type Item = SimplePath;

    fn next(&mut self) -> Option<SimplePath> {
        if let Some(done) = self.trivial.as_mut() {
            if *done {
                return None;
            }
            *done = true;
            return Some(SimplePath {
                vertices: self.dfs.path.clone(),
            });
        }
        loop {
            match self.dfs.advance() {
                Step::Exhausted => return None,
                Step::Neighbor(u) if u == self.target => {
                    let mut vertices = self.dfs.path.clone();
                    vertices.push(u);
                    return Some(SimplePath { vertices });
                }
                Step::Neighbor(u) if self.dfs.blocked.contains(u) => {}
                Step::Neighbor(u) => self.dfs.descend(u),
            }
        }
    }
}

/// Stream returned by [`ModelGraph::simple_cycles`].
pub struct SimpleCycles<'g, W> {
    dfs: Dfs<'g, W>,
    root: usize,
    self_loop_pending: bool,
}

impl<'g, W> SimpleCycles<'g, W> {
    pub(super) fn new(graph: &'g ModelGraph<W>, deleted: VertexSubset, root: usize) -> Self {
        Self {
            self_loop_pending: graph.has_self_loop(root),
            dfs: Dfs::new(graph, deleted, root),
            root,
        }
    }
}

impl<W> Iterator for SimpleCycles<'_, W> {
    type Item = SimpleCycle;

    fn next(&mut self) -> Option<SimpleCycle> {
        if self.self_loop_pending {
            self.self_loop_pending = false;
            return Some(SimpleCycle {
                vertices: vec![self.root],
            });
        }
        loop {
            match self.dfs.advance() {
                Step::Exhausted => return None,
                Step::Neighbor(u) if u == self.root => {
                    return Some(SimpleCycle {
                        vertices: self.dfs.path.clone(),
                    });
                }
                Step::Neighbor(u) if self.dfs.blocked.contains(u) => {}
                Step::Neighbor(u) => self.dfs.descend(u),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_scalar_graph;
    use crate::models::{cycle_c5, from_edges};

    #[test]
    fn c5_has_two_paths_between_neighbors() {
        let g = build_scalar_graph(&cycle_c5(0.3));
        let paths: Vec<_> = g
            .simple_paths(&VertexSubset::empty(5), 0, 1)
            .unwrap()
            .map(|p| p.vertices)
            .collect();
        assert_eq!(paths, vec![vec![0, 1], vec![0, 4, 3, 2, 1]]);
    }

    #[test]
    fn c5_has_five_cycles_at_each_vertex() {
        let g = build_scalar_graph(&cycle_c5(0.3));
        let cycles: Vec<_> = g
            .simple_cycles(&VertexSubset::empty(5), 0)
            .unwrap()
            .map(|c| c.vertices)
            .collect();
        assert_eq!(
            cycles,
            vec![
                vec![0],
                vec![0, 1],
                vec![0, 1, 2, 3, 4],
                vec![0, 4],
                vec![0, 4, 3, 2, 1],
            ]
        );
    }

    #[test]
    fn same_source_and_target_is_a_single_empty_path() {
        let g = build_scalar_graph(&cycle_c5(0.3));
        let paths: Vec<_> = g
            .simple_paths(&VertexSubset::empty(5), 2, 2)
            .unwrap()
            .collect();
        assert_eq!(paths.len(), 1);
        assert!(paths[0].is_empty());
    }

    #[test]
    fn complete_graph_k4_has_five_paths() {
        let g = from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let g = build_scalar_graph(&g);
        assert_eq!(
            g.simple_paths(&VertexSubset::empty(4), 0, 1)
                .unwrap()
                .count(),
            5
        );
    }

    #[test]
    fn isolated_vertex_has_only_its_self_loop() {
        let g = build_scalar_graph(&from_edges(3, &[(1, 2)]));
        let cycles: Vec<_> = g
            .simple_cycles(&VertexSubset::empty(3), 0)
            .unwrap()
            .collect();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 1);
    }

    #[test]
    fn deleted_endpoints_are_rejected() {
        let g = build_scalar_graph(&cycle_c5(0.3));
        let deleted = VertexSubset::from_vertices(5, [1]);
        assert!(g.simple_paths(&deleted, 0, 1).is_err());
        assert!(g.simple_paths(&deleted, 1, 0).is_err());
        assert!(g.simple_cycles(&deleted, 1).is_err());
    }

    #[test]
    fn deletion_restricts_walks() {
        let g = build_scalar_graph(&cycle_c5(0.3));
        let deleted = VertexSubset::from_vertices(5, [4]);
        let paths: Vec<_> = g.simple_paths(&deleted, 0, 1).unwrap().collect();
        assert_eq!(paths.len(), 1);
        let cycles: Vec<_> = g.simple_cycles(&deleted, 0).unwrap().collect();
        assert_eq!(cycles.len(), 2);
    }
}
