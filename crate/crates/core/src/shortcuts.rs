//! Stop-to-stop transfer shortcuts.
//!
//! The profile scan must consider every walk a passenger could take between
//! leaving one vehicle and boarding the next. Instead of searching the whole
//! walking graph per connection, a shortcut edge set is precomputed once per
//! network: for each stop where vehicles arrive, a bounded search on the core
//! graph finds every stop whose departures remain catchable after the walk.
//! The emitted set may be a superset of what optimal journeys actually use;
//! what matters is that no needed transfer is missing and that every weight
//! equals the exact walking distance.

use crate::network::{StopId, Time, TransitNetwork};
use crate::walk::{bounded_dijkstra, CoreGraph};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ShortcutGraph {
    /// Sorted by `(from, to)`; at most one edge per ordered stop pair.
    edges: Vec<(StopId, StopId, u32)>,
    offsets: Vec<u32>,
}

impl ShortcutGraph {
    pub fn from_edges(mut edges: Vec<(StopId, StopId, u32)>, num_stops: usize) -> ShortcutGraph {
        edges.sort_unstable();
        edges.dedup_by_key(|e| (e.0, e.1));
        let mut offsets = vec![0u32; num_stops + 1];
        for &(from, _, _) in &edges {
            offsets[from as usize + 1] += 1;
        }
        for i in 0..num_stops {
            offsets[i + 1] += offsets[i];
        }
        ShortcutGraph { edges, offsets }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(StopId, StopId, u32)] {
        &self.edges
    }

    /// Outgoing shortcuts of one stop as `(to, walk_seconds)` pairs. Stops
    /// beyond the offset table (e.g. on an empty default graph) have none.
    pub fn from_stop(&self, stop: StopId) -> impl Iterator<Item = (StopId, u32)> + '_ {
        let (lo, hi) = match self.offsets.get(stop as usize..stop as usize + 2) {
            Some(&[lo, hi]) => (lo as usize, hi as usize),
            _ => (0, 0),
        };
        self.edges[lo..hi].iter().map(|&(_, to, w)| (to, w))
    }
}

/// Computes the transfer shortcut set.
///
/// A shortcut `(a, b, t)` is emitted when some vehicle arrival at `a` can walk
/// to `b` in `t <= max_transfer_time` seconds and still catch some departure
/// there, buffer time included. Same-stop reboarding needs no edge; the
/// profile scan always considers staying at the arrival stop.
pub fn compute_shortcuts(
    net: &TransitNetwork,
    core: &CoreGraph,
    max_transfer_time: u32,
) -> ShortcutGraph {
    let num_stops = net.stops.len();
    let mut earliest_arrival: Vec<Option<Time>> = vec![None; num_stops];
    let mut latest_departure: Vec<Option<Time>> = vec![None; num_stops];
    for c in &net.connections {
        let arr = &mut earliest_arrival[c.arr_stop as usize];
        if arr.is_none_or(|t| c.arr_time < t) {
            *arr = Some(c.arr_time);
        }
        let dep = &mut latest_departure[c.dep_stop as usize];
        if dep.is_none_or(|t| c.dep_time > t) {
            *dep = Some(c.dep_time);
        }
    }

    // Stops on the same walking vertex are interchangeable targets; index
    // them once so each search can sweep its settled vertices quickly.
    let mut stops_at_vertex: Vec<Vec<StopId>> = vec![Vec::new(); core.graph.num_vertices()];
    for (sid, stop) in net.stops.iter().enumerate() {
        if latest_departure[sid].is_some() {
            stops_at_vertex[stop.vertex as usize].push(sid as StopId);
        }
    }

    let arrival_stops: Vec<StopId> = (0..num_stops as StopId)
        .filter(|&s| earliest_arrival[s as usize].is_some())
        .collect();

    let edges: Vec<(StopId, StopId, u32)> = arrival_stops
        .par_iter()
        .flat_map_iter(|&from| {
            let from_vertex = net.stops[from as usize].vertex;
            let first_arrival = earliest_arrival[from as usize].unwrap();
            let settled = bounded_dijkstra(&core.graph, from_vertex, max_transfer_time);
            let mut local = Vec::new();
            for (vertex, walk) in settled {
                for &to in &stops_at_vertex[vertex as usize] {
                    if to == from {
                        continue;
                    }
                    let buffer = net.buffer_time(to);
                    let ready = first_arrival.seconds() as u64 + walk as u64 + buffer as u64;
                    if ready <= latest_departure[to as usize].unwrap().seconds() as u64 {
                        local.push((from, to, walk));
                    }
                }
            }
            local
        })
        .collect();

    ShortcutGraph::from_edges(edges, num_stops)
}
