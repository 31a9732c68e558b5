//! Shared vertex-contraction machinery for the full hierarchy and the core
//! graph. The overlay keeps exact shortest-path distances between all
//! uncontracted vertices at every step: a vertex is removed only after every
//! in/out neighbor pair that loses its via-path receives a shortcut of equal
//! length.

use crate::network::{VertexId, WalkingGraph, UNREACHABLE};
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

pub(crate) struct Shortcut {
    pub from: VertexId,
    pub to: VertexId,
    pub weight: u32,
}

pub(crate) struct Overlay {
    pub out: Vec<BTreeMap<VertexId, u32>>,
    pub inn: Vec<BTreeMap<VertexId, u32>>,
    pub contracted: Vec<bool>,
    pub deleted_neighbors: Vec<u32>,
    pub num_edges: usize,
    pub num_vertices_left: usize,
    // Versioned scratch space for witness searches: avoids clearing O(V)
    // state between the many small Dijkstra runs.
    dist: Vec<u32>,
    stamp: Vec<u32>,
    round: u32,
}

impl Overlay {
    pub fn new(graph: &WalkingGraph) -> Overlay {
        let n = graph.num_vertices();
        let mut out = vec![BTreeMap::new(); n];
        let mut inn = vec![BTreeMap::new(); n];
        let mut num_edges = 0;
        for e in graph.edges() {
            let prev = out[e.from as usize].get(&e.to).copied();
            if prev.is_none_or(|w| e.walk_time < w) {
                if prev.is_none() {
                    num_edges += 1;
                }
                out[e.from as usize].insert(e.to, e.walk_time);
                inn[e.to as usize].insert(e.from, e.walk_time);
            }
        }
        Overlay {
            out,
            inn,
            contracted: vec![false; n],
            deleted_neighbors: vec![0; n],
            num_edges,
            num_vertices_left: n,
            dist: vec![UNREACHABLE; n],
            stamp: vec![0; n],
            round: 0,
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v as usize].len() + self.inn[v as usize].len()
    }

    /// Shortcuts that must be inserted to preserve distances when `v` is
    /// removed. A pair `(u, w)` needs one exactly if the best path avoiding
    /// `v` is longer than the path through it.
    pub fn required_shortcuts(&mut self, v: VertexId) -> Vec<Shortcut> {
        let ins: Vec<(VertexId, u32)> = self.inn[v as usize]
            .iter()
            .map(|(&u, &w)| (u, w))
            .collect();
        let outs: Vec<(VertexId, u32)> = self.out[v as usize]
            .iter()
            .map(|(&w, &d)| (w, d))
            .collect();
        if ins.is_empty() || outs.is_empty() {
            return Vec::new();
        }
        let max_out = outs.iter().map(|&(_, d)| d).max().unwrap();
        let mut shortcuts = Vec::new();
        for &(u, d_uv) in &ins {
            let limit = d_uv
                .checked_add(max_out)
                .expect("walking distance overflow");
            self.witness_search(u, v, limit);
            for &(w, d_vw) in &outs {
                if w == u {
                    continue;
                }
                let via = d_uv + d_vw;
                if self.scratch_dist(w) > via {
                    shortcuts.push(Shortcut {
                        from: u,
                        to: w,
                        weight: via,
                    });
                }
            }
        }
        shortcuts
    }

    /// Dijkstra from `source` over uncontracted vertices, skipping `skip`,
    /// truncated at `limit`. Results land in the versioned scratch arrays.
    fn witness_search(&mut self, source: VertexId, skip: VertexId, limit: u32) {
        self.round += 1;
        let round = self.round;
        let mut heap: BinaryHeap<Reverse<(u32, VertexId)>> = BinaryHeap::new();
        self.dist[source as usize] = 0;
        self.stamp[source as usize] = round;
        heap.push(Reverse((0, source)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if self.stamp[x as usize] == round && d > self.dist[x as usize] {
                continue;
            }
            for (&y, &w) in &self.out[x as usize] {
                if y == skip || self.contracted[y as usize] {
                    continue;
                }
                let nd = match d.checked_add(w) {
                    Some(nd) if nd <= limit => nd,
                    _ => continue,
                };
                if self.stamp[y as usize] != round || nd < self.dist[y as usize] {
                    self.stamp[y as usize] = round;
                    self.dist[y as usize] = nd;
                    heap.push(Reverse((nd, y)));
                }
            }
        }
    }

    fn scratch_dist(&self, v: VertexId) -> u32 {
        if self.stamp[v as usize] == self.round {
            self.dist[v as usize]
        } else {
            UNREACHABLE
        }
    }

    /// How many of the given shortcuts would be brand-new overlay edges.
    pub fn new_edge_count(&self, shortcuts: &[Shortcut]) -> usize {
        shortcuts
            .iter()
            .filter(|s| !self.out[s.from as usize].contains_key(&s.to))
            .count()
    }

    /// Removes `v` from the overlay, wiring in the given shortcuts.
    pub fn contract(&mut self, v: VertexId, shortcuts: &[Shortcut]) {
        for s in shortcuts {
            let prev = self.out[s.from as usize].get(&s.to).copied();
            if prev.is_none_or(|w| s.weight < w) {
                if prev.is_none() {
                    self.num_edges += 1;
                }
                self.out[s.from as usize].insert(s.to, s.weight);
                self.inn[s.to as usize].insert(s.from, s.weight);
            }
        }
        let out_neighbors: Vec<VertexId> = self.out[v as usize].keys().copied().collect();
        for w in out_neighbors {
            self.inn[w as usize].remove(&v);
            self.deleted_neighbors[w as usize] += 1;
            self.num_edges -= 1;
        }
        let in_neighbors: Vec<VertexId> = self.inn[v as usize].keys().copied().collect();
        for u in in_neighbors {
            self.out[u as usize].remove(&v);
            self.deleted_neighbors[u as usize] += 1;
            self.num_edges -= 1;
        }
        self.out[v as usize].clear();
        self.inn[v as usize].clear();
        self.contracted[v as usize] = true;
        self.num_vertices_left -= 1;
    }

    /// Contraction priority: edge difference plus deleted-neighbor count.
    /// Smaller means contracted earlier.
    pub fn priority(&mut self, v: VertexId) -> i64 {
        let shortcuts = self.required_shortcuts(v);
        shortcuts.len() as i64 - self.degree(v) as i64 + self.deleted_neighbors[v as usize] as i64
    }
}

/// Lazy priority queue over contraction candidates. `pop_next` re-evaluates
/// the cheapest candidate's priority and only yields it when it is still the
/// cheapest; otherwise the candidate is re-queued at its new priority.
pub(crate) struct CandidateQueue {
    heap: BinaryHeap<Reverse<(i64, VertexId)>>,
}

impl CandidateQueue {
    pub fn new(overlay: &mut Overlay, candidates: impl Iterator<Item = VertexId>) -> CandidateQueue {
        let mut heap = BinaryHeap::new();
        for v in candidates {
            let p = overlay.priority(v);
            heap.push(Reverse((p, v)));
        }
        CandidateQueue { heap }
    }

    pub fn pop_next(&mut self, overlay: &mut Overlay) -> Option<(VertexId, Vec<Shortcut>)> {
        while let Some(Reverse((_, v))) = self.heap.pop() {
            if overlay.contracted[v as usize] {
                continue;
            }
            let shortcuts = overlay.required_shortcuts(v);
            let fresh = shortcuts.len() as i64 - overlay.degree(v) as i64
                + overlay.deleted_neighbors[v as usize] as i64;
            match self.heap.peek() {
                Some(&Reverse((top, _))) if fresh > top => {
                    self.heap.push(Reverse((fresh, v)));
                }
                _ => return Some((v, shortcuts)),
            }
        }
        None
    }
}
