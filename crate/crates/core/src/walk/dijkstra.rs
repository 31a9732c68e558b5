//! Textbook Dijkstra on the walking graph. Serves as the reference
//! implementation that the hierarchy-based structures are tested against, and
//! as the local search primitive for transfer enumeration.

use super::WalkError;
use crate::network::{VertexId, WalkingGraph, UNREACHABLE};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Single-source shortest walking times. Entries are `UNREACHABLE` where no
/// path exists. When `targets` is given the search stops as soon as all of
/// them are settled.
pub fn dijkstra(
    graph: &WalkingGraph,
    source: VertexId,
    targets: Option<&[VertexId]>,
) -> Result<Vec<u32>, WalkError> {
    if source as usize >= graph.num_vertices() {
        return Err(WalkError::UnknownVertex(source));
    }
    if let Some(ts) = targets {
        for &t in ts {
            if t as usize >= graph.num_vertices() {
                return Err(WalkError::UnknownVertex(t));
            }
        }
    }
    let mut dist = vec![UNREACHABLE; graph.num_vertices()];
    let mut pending = targets.map(|ts| {
        let mut missing = vec![false; graph.num_vertices()];
        let mut count = 0usize;
        for &t in ts {
            if !missing[t as usize] {
                missing[t as usize] = true;
                count += 1;
            }
        }
        (missing, count)
    });

    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u32, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        if let Some((missing, count)) = pending.as_mut() {
            if missing[v as usize] {
                missing[v as usize] = false;
                *count -= 1;
                if *count == 0 {
                    break;
                }
            }
        }
        for &(to, w) in graph.out_edges(v) {
            let nd = d.checked_add(w).expect("walking distance overflow");
            if nd < dist[to as usize] {
                dist[to as usize] = nd;
                heap.push(Reverse((nd, to)));
            }
        }
    }
    Ok(dist)
}

/// Dijkstra truncated at `limit`: returns the settled vertices with distance
/// at most `limit`, in ascending `(distance, vertex)` order.
pub fn bounded_dijkstra(graph: &WalkingGraph, source: VertexId, limit: u32) -> Vec<(VertexId, u32)> {
    assert!((source as usize) < graph.num_vertices());
    let mut dist = vec![UNREACHABLE; graph.num_vertices()];
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u32, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        settled.push((v, d));
        for &(to, w) in graph.out_edges(v) {
            let nd = match d.checked_add(w) {
                Some(nd) if nd <= limit => nd,
                _ => continue,
            };
            if nd < dist[to as usize] {
                dist[to as usize] = nd;
                heap.push(Reverse((nd, to)));
            }
        }
    }
    settled.sort_by_key(|&(v, d)| (d, v));
    settled
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Edge;

    fn edge(from: u32, to: u32, walk_time: u32) -> Edge {
        Edge {
            from,
            to,
            walk_time,
        }
    }

    #[test]
    fn single_vertex_graph() {
        let g = WalkingGraph::empty(1);
        let dist = dijkstra(&g, 0, None).unwrap();
        assert_eq!(dist, vec![0]);
    }

    #[test]
    fn unknown_source_is_rejected() {
        let g = WalkingGraph::empty(1);
        assert_eq!(dijkstra(&g, 3, None), Err(WalkError::UnknownVertex(3)));
    }

    #[test]
    fn respects_edge_direction() {
        let g = WalkingGraph::new(3, vec![edge(0, 1, 4), edge(1, 2, 6), edge(2, 0, 1)]);
        let dist = dijkstra(&g, 0, None).unwrap();
        assert_eq!(dist, vec![0, 4, 10]);
        let back = dijkstra(&g, 2, None).unwrap();
        assert_eq!(back, vec![1, 5, 0]);
    }

    #[test]
    fn prefers_cheaper_detour() {
        let g = WalkingGraph::new(
            4,
            vec![edge(0, 3, 100), edge(0, 1, 10), edge(1, 2, 10), edge(2, 3, 10)],
        );
        let dist = dijkstra(&g, 0, None).unwrap();
        assert_eq!(dist[3], 30);
    }

    #[test]
    fn early_exit_still_settles_targets() {
        let g = WalkingGraph::new(
            4,
            vec![edge(0, 1, 1), edge(1, 2, 1), edge(2, 3, 1)],
        );
        let dist = dijkstra(&g, 0, Some(&[1])).unwrap();
        assert_eq!(dist[1], 1);
    }

    #[test]
    fn bounded_search_cuts_off() {
        let g = WalkingGraph::new(
            4,
            vec![edge(0, 1, 5), edge(1, 2, 5), edge(2, 3, 5)],
        );
        let settled = bounded_dijkstra(&g, 0, 10);
        assert_eq!(settled, vec![(0, 0), (1, 5), (2, 10)]);
    }
}
