//! Partially contracted core graph.
//!
//! Transfer enumeration needs many short-range searches between stops, so the
//! walking graph is thinned out: vertices outside the keep set are contracted
//! (with distance-preserving shortcuts) until the core would become denser
//! than the configured average-degree limit. Stops always survive. Vertices
//! whose overlay degree is zero can never carry a path and are removed
//! regardless of the density limit.

use super::contract::{CandidateQueue, Overlay};
use super::WalkError;
use crate::network::{Edge, VertexId, WalkingGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct CoreGraph {
    /// Overlay edges between core vertices, in the full vertex id space.
    pub graph: WalkingGraph,
    /// Membership flags; `keep` vertices are always members.
    pub core: Vec<bool>,
}

impl CoreGraph {
    pub fn core_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.core
            .iter()
            .enumerate()
            .filter(|(_, &is_core)| is_core)
            .map(|(v, _)| v as VertexId)
    }

    pub fn num_core_vertices(&self) -> usize {
        self.core.iter().filter(|&&c| c).count()
    }
}

/// Contracts non-keep vertices in priority order until only keep vertices
/// remain or the next contraction would push the average core degree over
/// `avg_degree_limit`.
pub fn build_core(
    graph: &WalkingGraph,
    keep: &[VertexId],
    avg_degree_limit: f64,
) -> Result<CoreGraph, WalkError> {
    let n = graph.num_vertices();
    let mut is_keep = vec![false; n];
    for &v in keep {
        if v as usize >= n {
            return Err(WalkError::UnknownKeepVertex(v));
        }
        is_keep[v as usize] = true;
    }

    let mut overlay = Overlay::new(graph);
    let candidates = (0..n as VertexId).filter(|&v| !is_keep[v as usize]);
    let mut queue = CandidateQueue::new(&mut overlay, candidates);
    while let Some((v, shortcuts)) = queue.pop_next(&mut overlay) {
        if overlay.degree(v) > 0 {
            let new_edges = overlay.num_edges + overlay.new_edge_count(&shortcuts)
                - overlay.degree(v);
            let new_vertices = overlay.num_vertices_left - 1;
            if new_vertices > 0 && new_edges as f64 / new_vertices as f64 > avg_degree_limit {
                break;
            }
        }
        overlay.contract(v, &shortcuts);
    }
    // Edgeless vertices can never carry a path, so they leave the core even
    // when the density limit halted contraction before reaching them. Their
    // removal changes no degrees, so one sweep settles all of them.
    for v in 0..n as VertexId {
        if !is_keep[v as usize] && !overlay.contracted[v as usize] && overlay.degree(v) == 0 {
            overlay.contract(v, &[]);
        }
    }

    let core: Vec<bool> = overlay.contracted.iter().map(|&c| !c).collect();
    let mut edges = Vec::new();
    for (from, out) in overlay.out.iter().enumerate() {
        for (&to, &w) in out {
            edges.push(Edge {
                from: from as VertexId,
                to,
                walk_time: w,
            });
        }
    }
    Ok(CoreGraph {
        graph: WalkingGraph::new(n, edges),
        core,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::dijkstra;

    fn edge(from: u32, to: u32, walk_time: u32) -> Edge {
        Edge {
            from,
            to,
            walk_time,
        }
    }

    fn bidirectional(pairs: &[(u32, u32, u32)]) -> Vec<Edge> {
        pairs
            .iter()
            .flat_map(|&(a, b, w)| [edge(a, b, w), edge(b, a, w)])
            .collect()
    }

    #[test]
    fn keeping_everything_returns_input_graph() {
        let g = WalkingGraph::new(3, bidirectional(&[(0, 1, 2), (1, 2, 3)]));
        let core = build_core(&g, &[0, 1, 2], 16.0).unwrap();
        assert_eq!(core.num_core_vertices(), 3);
        assert_eq!(core.graph, g);
    }

    #[test]
    fn chain_middle_is_contracted_into_shortcut() {
        // stop(0) - via(1) - stop(2); only the stops are kept.
        let g = WalkingGraph::new(3, bidirectional(&[(0, 1, 2), (1, 2, 3)]));
        let core = build_core(&g, &[0, 2], 16.0).unwrap();
        assert!(core.core[0] && !core.core[1] && core.core[2]);
        assert_eq!(core.graph.out_edges(0), &[(2, 5)]);
        assert_eq!(core.graph.out_edges(2), &[(0, 5)]);
    }

    #[test]
    fn zero_degree_limit_removes_only_isolated_vertices() {
        // Vertices 3 and 4 are isolated; vertex 1 carries the only path.
        let g = WalkingGraph::new(5, bidirectional(&[(0, 1, 2), (1, 2, 3)]));
        let core = build_core(&g, &[0, 2], 0.0).unwrap();
        assert!(!core.core[3] && !core.core[4]);
        assert!(core.core[1], "a path-carrying vertex must survive a zero limit");
        assert_eq!(core.graph.num_edges(), 4);
    }

    #[test]
    fn core_preserves_stop_distances() {
        // Grid-ish graph; keep three corners, contract the rest.
        let g = WalkingGraph::new(
            6,
            bidirectional(&[
                (0, 1, 1),
                (1, 2, 2),
                (2, 3, 3),
                (3, 4, 1),
                (4, 5, 2),
                (5, 0, 4),
                (1, 4, 2),
            ]),
        );
        let keep = [0u32, 2, 5];
        let core = build_core(&g, &keep, 16.0).unwrap();
        for &s in &keep {
            let full = dijkstra(&g, s, None).unwrap();
            let thin = dijkstra(&core.graph, s, None).unwrap();
            for &t in &keep {
                assert_eq!(full[t as usize], thin[t as usize], "distance {s} -> {t}");
            }
        }
    }

    #[test]
    fn unknown_keep_vertex_is_rejected() {
        let g = WalkingGraph::empty(2);
        assert!(matches!(
            build_core(&g, &[5], 16.0),
            Err(WalkError::UnknownKeepVertex(5))
        ));
    }
}
