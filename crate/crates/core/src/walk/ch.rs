//! Distance-preserving contraction hierarchy over the walking graph.
//!
//! Construction contracts every vertex in priority order (edge difference
//! plus deleted neighbors, re-evaluated lazily). Queries run one upward
//! search from the source and one backward upward search from the target and
//! meet in the middle; correctness rests on every contraction inserting
//! shortcuts for all vertex pairs whose shortest path it would otherwise
//! break.

use super::contract::{CandidateQueue, Overlay};
use super::WalkError;
use crate::network::{VertexId, WalkingGraph, UNREACHABLE};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionHierarchy {
    num_vertices: usize,
    /// Contraction order; higher rank means contracted later.
    rank: Vec<u32>,
    up_offsets: Vec<u32>,
    up_edges: Vec<(VertexId, u32)>,
    down_offsets: Vec<u32>,
    down_edges: Vec<(VertexId, u32)>,
    /// For each shortcut edge, the contracted vertex it bypasses. Only needed
    /// to unpack shortcuts into original edges; queries ignore it.
    middles: BTreeMap<(VertexId, VertexId), VertexId>,
}

pub fn build_ch(graph: &WalkingGraph) -> ContractionHierarchy {
    let n = graph.num_vertices();
    let mut overlay = Overlay::new(graph);

    // All edges ever present, kept at their minimum weight. Original edges
    // first; shortcuts merge in as contraction proceeds.
    let mut edges: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    for (from, out) in overlay.out.iter().enumerate() {
        for (&to, &w) in out {
            edges.insert((from as VertexId, to), w);
        }
    }
    let mut middles = BTreeMap::new();

    let mut rank = vec![0u32; n];
    let mut queue = CandidateQueue::new(&mut overlay, 0..n as VertexId);
    let mut next_rank = 0u32;
    while let Some((v, shortcuts)) = queue.pop_next(&mut overlay) {
        for s in &shortcuts {
            let slot = edges.entry((s.from, s.to)).or_insert(u32::MAX);
            if s.weight < *slot {
                *slot = s.weight;
                middles.insert((s.from, s.to), v);
            }
        }
        overlay.contract(v, &shortcuts);
        rank[v as usize] = next_rank;
        next_rank += 1;
    }
    debug_assert_eq!(next_rank as usize, n);

    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for (&(from, to), &w) in &edges {
        if rank[from as usize] < rank[to as usize] {
            up[from as usize].push((to, w));
        } else {
            // Stored at the lower-ranked endpoint for the backward search.
            down[to as usize].push((from, w));
        }
    }
    let (up_offsets, up_edges) = to_csr(&up);
    let (down_offsets, down_edges) = to_csr(&down);

    ContractionHierarchy {
        num_vertices: n,
        rank,
        up_offsets,
        up_edges,
        down_offsets,
        down_edges,
        middles,
    }
}

fn to_csr(adj: &[Vec<(VertexId, u32)>]) -> (Vec<u32>, Vec<(VertexId, u32)>) {
    let mut offsets = Vec::with_capacity(adj.len() + 1);
    let mut flat = Vec::new();
    offsets.push(0u32);
    for list in adj {
        flat.extend_from_slice(list);
        offsets.push(flat.len() as u32);
    }
    (offsets, flat)
}

impl ContractionHierarchy {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn rank(&self) -> &[u32] {
        &self.rank
    }

    pub(crate) fn from_raw(
        rank: Vec<u32>,
        up_offsets: Vec<u32>,
        up_edges: Vec<(VertexId, u32)>,
        down_offsets: Vec<u32>,
        down_edges: Vec<(VertexId, u32)>,
    ) -> ContractionHierarchy {
        ContractionHierarchy {
            num_vertices: rank.len(),
            rank,
            up_offsets,
            up_edges,
            down_offsets,
            down_edges,
            middles: BTreeMap::new(),
        }
    }

    // The tuple mirrors the cache file layout field by field.
    #[allow(clippy::type_complexity)]
    pub(crate) fn raw_parts(
        &self,
    ) -> (
        &[u32],
        &[u32],
        &[(VertexId, u32)],
        &[u32],
        &[(VertexId, u32)],
    ) {
        (
            &self.rank,
            &self.up_offsets,
            &self.up_edges,
            &self.down_offsets,
            &self.down_edges,
        )
    }

    fn up_out(&self, v: VertexId) -> &[(VertexId, u32)] {
        let lo = self.up_offsets[v as usize] as usize;
        let hi = self.up_offsets[v as usize + 1] as usize;
        &self.up_edges[lo..hi]
    }

    fn down_into(&self, v: VertexId) -> &[(VertexId, u32)] {
        let lo = self.down_offsets[v as usize] as usize;
        let hi = self.down_offsets[v as usize + 1] as usize;
        &self.down_edges[lo..hi]
    }

    /// Upward search from `source` along ascending-rank edges. Returns all
    /// settled `(vertex, distance)` pairs.
    pub(crate) fn upward_search(&self, source: VertexId, backward: bool) -> Vec<(VertexId, u32)> {
        let mut dist: HashMap<VertexId, u32> = HashMap::new();
        let mut heap = BinaryHeap::new();
        let mut settled = Vec::new();
        dist.insert(source, 0);
        heap.push(Reverse((0u32, source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist.get(&v).is_some_and(|&best| d > best) {
                continue;
            }
            settled.push((v, d));
            let edges = if backward {
                self.down_into(v)
            } else {
                self.up_out(v)
            };
            for &(to, w) in edges {
                let nd = d.checked_add(w).expect("walking distance overflow");
                if dist.get(&to).is_none_or(|&best| nd < best) {
                    dist.insert(to, nd);
                    heap.push(Reverse((nd, to)));
                }
            }
        }
        settled
    }

    /// Exact point-to-point walking distance, `UNREACHABLE` if none exists.
    pub fn query(&self, source: VertexId, target: VertexId) -> Result<u32, WalkError> {
        if source as usize >= self.num_vertices {
            return Err(WalkError::UnknownVertex(source));
        }
        if target as usize >= self.num_vertices {
            return Err(WalkError::UnknownVertex(target));
        }
        let forward = self.upward_search(source, false);
        let fw: HashMap<VertexId, u32> = forward.into_iter().collect();
        let mut best = UNREACHABLE;
        for (v, db) in self.upward_search(target, true) {
            if let Some(&df) = fw.get(&v) {
                let total = df.checked_add(db).expect("walking distance overflow");
                best = best.min(total);
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Edge;
    use crate::walk::dijkstra;

    fn edge(from: u32, to: u32, walk_time: u32) -> Edge {
        Edge {
            from,
            to,
            walk_time,
        }
    }

    #[test]
    fn single_vertex_hierarchy() {
        let g = WalkingGraph::empty(1);
        let ch = build_ch(&g);
        assert_eq!(ch.query(0, 0).unwrap(), 0);
    }

    #[test]
    fn line_graph_query_through_contracted_middle() {
        let g = WalkingGraph::new(
            3,
            vec![edge(0, 1, 2), edge(1, 0, 2), edge(1, 2, 3), edge(2, 1, 3)],
        );
        let ch = build_ch(&g);
        assert_eq!(ch.query(0, 2).unwrap(), 5);
        assert_eq!(ch.query(2, 0).unwrap(), 5);
        assert_eq!(ch.query(0, 0).unwrap(), 0);
    }

    #[test]
    fn unreachable_pair() {
        let g = WalkingGraph::new(3, vec![edge(0, 1, 2)]);
        let ch = build_ch(&g);
        assert_eq!(ch.query(1, 0).unwrap(), UNREACHABLE);
        assert_eq!(ch.query(2, 0).unwrap(), UNREACHABLE);
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let g = WalkingGraph::empty(2);
        let ch = build_ch(&g);
        assert!(matches!(ch.query(0, 9), Err(WalkError::UnknownVertex(9))));
    }

    /// Exhaustive distance check on a deterministic pseudo-random graph.
    #[test]
    fn matches_dijkstra_on_random_graph() {
        let n = 50u32;
        let mut edges = Vec::new();
        // Simple multiplicative congruential stream keeps the fixture stable.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let from = (next() % n as u64) as u32;
            let to = (next() % n as u64) as u32;
            let w = (next() % 100 + 1) as u32;
            edges.push(edge(from, to, w));
        }
        let g = WalkingGraph::new(n as usize, edges);
        let ch = build_ch(&g);
        for s in 0..n {
            let expected = dijkstra(&g, s, None).unwrap();
            for t in 0..n {
                assert_eq!(
                    ch.query(s, t).unwrap(),
                    expected[t as usize],
                    "mismatch for {s} -> {t}"
                );
            }
        }
    }
}
