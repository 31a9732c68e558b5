//! Bucket-based one-to-many queries on top of the contraction hierarchy.
//!
//! Every registered stop runs one backward and one forward upward search at
//! build time; the settled entries are parked in per-vertex buckets. A query
//! then runs a single upward search from its endpoint and joins each settled
//! vertex against the buckets, which yields exact distances to (or from) all
//! registered stops at once.

use super::ch::ContractionHierarchy;
use super::WalkError;
use crate::network::{StopId, VertexId, UNREACHABLE};
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub struct BucketIndex {
    num_vertices: usize,
    /// Registered target vertices, deduplicated.
    slots: Vec<VertexId>,
    /// Stops registered for each slot (multiple stops may share a vertex).
    slot_stops: Vec<Vec<StopId>>,
    num_stops: usize,
    /// Joined by forward searches: entries `(slot, dist(vertex -> slot))`.
    forward_offsets: Vec<u32>,
    forward_entries: Vec<(u32, u32)>,
    /// Joined by backward searches: entries `(slot, dist(slot -> vertex))`.
    backward_offsets: Vec<u32>,
    backward_entries: Vec<(u32, u32)>,
}

impl BucketIndex {
    /// Registers the given `(stop, vertex)` pairs as query targets.
    pub fn build(ch: &ContractionHierarchy, stops: &[(StopId, VertexId)]) -> BucketIndex {
        let mut slot_of: HashMap<VertexId, u32> = HashMap::new();
        let mut slots: Vec<VertexId> = Vec::new();
        let mut slot_stops: Vec<Vec<StopId>> = Vec::new();
        for &(stop, vertex) in stops {
            let slot = *slot_of.entry(vertex).or_insert_with(|| {
                slots.push(vertex);
                slot_stops.push(Vec::new());
                (slots.len() - 1) as u32
            });
            slot_stops[slot as usize].push(stop);
        }

        let run = |backward: bool| {
            let mut entries: Vec<(VertexId, u32, u32)> = slots
                .par_iter()
                .enumerate()
                .flat_map_iter(|(slot, &vertex)| {
                    ch.upward_search(vertex, backward)
                        .into_iter()
                        .map(move |(v, d)| (v, slot as u32, d))
                })
                .collect();
            entries.sort_unstable_by_key(|&(v, slot, d)| (v, slot, d));
            let mut offsets = vec![0u32; ch.num_vertices() + 1];
            for &(v, _, _) in &entries {
                offsets[v as usize + 1] += 1;
            }
            for i in 0..ch.num_vertices() {
                offsets[i + 1] += offsets[i];
            }
            let flat: Vec<(u32, u32)> = entries.into_iter().map(|(_, slot, d)| (slot, d)).collect();
            (offsets, flat)
        };

        // Backward searches from the targets feed forward queries, and vice
        // versa: a forward query's upward search meets the target's backward
        // search space at the maximum-rank vertex of the shortest path.
        let (forward_offsets, forward_entries) = run(true);
        let (backward_offsets, backward_entries) = run(false);

        BucketIndex {
            num_vertices: ch.num_vertices(),
            slots,
            slot_stops,
            num_stops: stops.len(),
            forward_offsets,
            forward_entries,
            backward_offsets,
            backward_entries,
        }
    }

    pub fn num_stops(&self) -> usize {
        self.num_stops
    }

    fn join(
        &self,
        search: Vec<(VertexId, u32)>,
        offsets: &[u32],
        entries: &[(u32, u32)],
    ) -> Vec<u32> {
        let mut best = vec![UNREACHABLE; self.slots.len()];
        for (v, d) in search {
            let lo = offsets[v as usize] as usize;
            let hi = offsets[v as usize + 1] as usize;
            for &(slot, bucket_d) in &entries[lo..hi] {
                let total = d.checked_add(bucket_d).expect("walking distance overflow");
                if total < best[slot as usize] {
                    best[slot as usize] = total;
                }
            }
        }
        best
    }

    fn scatter_to_stops(&self, per_slot: Vec<u32>) -> Vec<(StopId, u32)> {
        let mut out = Vec::with_capacity(self.num_stops);
        for (slot, &d) in per_slot.iter().enumerate() {
            for &stop in &self.slot_stops[slot] {
                out.push((stop, d));
            }
        }
        out.sort_unstable_by_key(|&(stop, _)| stop);
        out
    }

    /// Distances from `source` to every registered stop.
    pub fn distances_from(
        &self,
        ch: &ContractionHierarchy,
        source: VertexId,
    ) -> Result<Vec<(StopId, u32)>, WalkError> {
        if source as usize >= self.num_vertices {
            return Err(WalkError::UnknownVertex(source));
        }
        let search = ch.upward_search(source, false);
        let per_slot = self.join(search, &self.forward_offsets, &self.forward_entries);
        Ok(self.scatter_to_stops(per_slot))
    }

    /// Distances from every registered stop to `target`.
    pub fn distances_to(
        &self,
        ch: &ContractionHierarchy,
        target: VertexId,
    ) -> Result<Vec<(StopId, u32)>, WalkError> {
        if target as usize >= self.num_vertices {
            return Err(WalkError::UnknownVertex(target));
        }
        let search = ch.upward_search(target, true);
        let per_slot = self.join(search, &self.backward_offsets, &self.backward_entries);
        Ok(self.scatter_to_stops(per_slot))
    }

    // One argument per stored field: this is the deserialization mirror of
    // `raw_parts`, not an API meant for by-hand construction.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_raw(
        num_vertices: usize,
        slots: Vec<VertexId>,
        slot_stops: Vec<Vec<StopId>>,
        num_stops: usize,
        forward_offsets: Vec<u32>,
        forward_entries: Vec<(u32, u32)>,
        backward_offsets: Vec<u32>,
        backward_entries: Vec<(u32, u32)>,
    ) -> BucketIndex {
        BucketIndex {
            num_vertices,
            slots,
            slot_stops,
            num_stops,
            forward_offsets,
            forward_entries,
            backward_offsets,
            backward_entries,
        }
    }

    #[allow(clippy::type_complexity)]
    pub(crate) fn raw_parts(
        &self,
    ) -> (
        usize,
        &[VertexId],
        &[Vec<StopId>],
        usize,
        &[u32],
        &[(u32, u32)],
        &[u32],
        &[(u32, u32)],
    ) {
        (
            self.num_vertices,
            &self.slots,
            &self.slot_stops,
            self.num_stops,
            &self.forward_offsets,
            &self.forward_entries,
            &self.backward_offsets,
            &self.backward_entries,
        )
    }
}

/// Stops reachable on foot from one origin, sorted ascending by walking time
/// (ties by stop id). Unreachable stops are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceList {
    pub origin: VertexId,
    pub entries: Vec<(StopId, u32)>,
}

impl DistanceList {
    pub fn build(
        index: &BucketIndex,
        ch: &ContractionHierarchy,
        origin: VertexId,
    ) -> Result<DistanceList, WalkError> {
        let mut entries: Vec<(StopId, u32)> = index
            .distances_from(ch, origin)?
            .into_iter()
            .filter(|&(_, d)| d != UNREACHABLE)
            .collect();
        entries.sort_unstable_by_key(|&(stop, d)| (d, stop));
        Ok(DistanceList { origin, entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Edge, WalkingGraph};
    use crate::walk::{build_ch, dijkstra};

    fn edge(from: u32, to: u32, walk_time: u32) -> Edge {
        Edge {
            from,
            to,
            walk_time,
        }
    }

    #[test]
    fn source_that_is_a_registered_stop_reports_zero() {
        let g = WalkingGraph::new(2, vec![edge(0, 1, 7), edge(1, 0, 7)]);
        let ch = build_ch(&g);
        let index = BucketIndex::build(&ch, &[(0, 0), (1, 1)]);
        let from = index.distances_from(&ch, 0).unwrap();
        assert_eq!(from, vec![(0, 0), (1, 7)]);
        let to = index.distances_to(&ch, 0).unwrap();
        assert_eq!(to, vec![(0, 0), (1, 7)]);
    }

    #[test]
    fn unreachable_targets_are_marked() {
        let g = WalkingGraph::new(3, vec![edge(0, 1, 2)]);
        let ch = build_ch(&g);
        let index = BucketIndex::build(&ch, &[(0, 1), (1, 2)]);
        let from = index.distances_from(&ch, 0).unwrap();
        assert_eq!(from, vec![(0, 2), (1, UNREACHABLE)]);
    }

    #[test]
    fn stops_sharing_a_vertex_get_the_same_distance() {
        let g = WalkingGraph::new(2, vec![edge(0, 1, 3)]);
        let ch = build_ch(&g);
        let index = BucketIndex::build(&ch, &[(0, 1), (1, 1)]);
        let from = index.distances_from(&ch, 0).unwrap();
        assert_eq!(from, vec![(0, 3), (1, 3)]);
    }

    #[test]
    fn distance_list_sorts_by_distance_then_stop() {
        let g = WalkingGraph::new(
            4,
            vec![edge(0, 1, 5), edge(0, 2, 5), edge(0, 3, 1)],
        );
        let ch = build_ch(&g);
        let index = BucketIndex::build(&ch, &[(0, 1), (1, 2), (2, 3)]);
        let list = DistanceList::build(&index, &ch, 0).unwrap();
        assert_eq!(list.entries, vec![(2, 1), (0, 5), (1, 5)]);
    }

    #[test]
    fn unknown_query_vertex_is_rejected() {
        let g = WalkingGraph::empty(1);
        let ch = build_ch(&g);
        let index = BucketIndex::build(&ch, &[(0, 0)]);
        assert!(matches!(
            index.distances_from(&ch, 5),
            Err(WalkError::UnknownVertex(5))
        ));
    }

    /// Both query directions must agree with plain Dijkstra on a random graph.
    #[test]
    fn matches_dijkstra_on_random_graph() {
        let n = 100u32;
        let mut edges = Vec::new();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..400 {
            let from = (next() % n as u64) as u32;
            let to = (next() % n as u64) as u32;
            let w = (next() % 60 + 1) as u32;
            edges.push(edge(from, to, w));
        }
        let g = WalkingGraph::new(n as usize, edges);
        let ch = build_ch(&g);
        let stops: Vec<(StopId, VertexId)> =
            (0..20).map(|i| (i as StopId, (i * 5) as VertexId)).collect();
        let index = BucketIndex::build(&ch, &stops);
        let reversed = g.reversed();
        for source in [0u32, 7, 33, 99] {
            let expected = dijkstra(&g, source, None).unwrap();
            for (stop, d) in index.distances_from(&ch, source).unwrap() {
                let vertex = stops[stop as usize].1;
                assert_eq!(d, expected[vertex as usize], "from {source} to stop {stop}");
            }
            let expected_rev = dijkstra(&reversed, source, None).unwrap();
            for (stop, d) in index.distances_to(&ch, source).unwrap() {
                let vertex = stops[stop as usize].1;
                assert_eq!(d, expected_rev[vertex as usize], "stop {stop} to {source}");
            }
        }
    }
}
