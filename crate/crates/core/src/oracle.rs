//! Brute-force reference implementations and random fixture generators for
//! the randomized test suites.
//!
//! Nothing here shares machinery with the production path: walking distances
//! come from plain Dijkstra over the full graph, minimum perceived arrival
//! times from a quadratic scan over the timetable, and fixtures from a seeded
//! ChaCha stream. Favour obviousness over speed throughout; instances are
//! tiny. Compiled only with the `oracle` feature, which the crate's own test
//! targets enable.

use crate::assignment::DemandEntry;
use crate::network::{
    Connection, ConnectionId, Edge, Stop, StopId, Time, TransitNetwork, Trip, VertexId,
    WalkingGraph, UNREACHABLE,
};
use crate::pat::{Pat, PenaltyParams, Weight};
use crate::shortcuts::ShortcutGraph;
use crate::walk::dijkstra;
use rand::seq::SliceRandom;
use rand::Rng;

/// Reference minimum perceived arrival times towards one destination vertex,
/// obtained by dynamic programming over connections in decreasing departure
/// time with a complete walking-distance matrix for transfers.
///
/// Requires strictly positive travel times on every connection, which rules
/// out same-instant dependencies between connections and makes the scan
/// order well-founded.
pub struct ReferencePats<'a> {
    net: &'a TransitNetwork,
    params: PenaltyParams,
    destination: VertexId,
    /// Full-graph walking seconds between every vertex pair.
    dist: Vec<Vec<u32>>,
    /// Per connection id: minimum PAT attainable once aboard, before any
    /// boarding cost.
    labels: Vec<Pat>,
}

impl<'a> ReferencePats<'a> {
    pub fn new(
        net: &'a TransitNetwork,
        destination: VertexId,
        params: PenaltyParams,
    ) -> ReferencePats<'a> {
        let n = net.graph.num_vertices();
        assert!((destination as usize) < n, "destination vertex out of range");
        let dist: Vec<Vec<u32>> = (0..n)
            .map(|v| dijkstra(&net.graph, v as VertexId, None).unwrap())
            .collect();

        let mut labels = vec![Pat::INFINITY; net.connections.len()];
        for pos in (0..net.connections.len()).rev() {
            let c = &net.connections[pos];
            assert!(
                c.arr_time > c.dep_time,
                "reference scan requires strictly positive travel times"
            );
            let arr_vertex = net.stops[c.arr_stop as usize].vertex as usize;

            let mut best = walk_pat(c.arr_time, dist[arr_vertex][destination as usize], &params);

            let in_trip = &net.trips[c.trip as usize].connections;
            if let Some(&next) = in_trip.get(c.index_in_trip as usize + 1) {
                best = best.min(labels[next as usize]);
            }

            let mut transfer = Pat::INFINITY;
            for c2 in &net.connections {
                let walk = dist[arr_vertex][net.stops[c2.dep_stop as usize].vertex as usize];
                if walk == UNREACHABLE {
                    continue;
                }
                let buffer = net.buffer_time(c2.dep_stop);
                let ready = c.arr_time.plus(walk).plus(buffer);
                if c2.dep_time < ready {
                    continue;
                }
                let wait = c2.dep_time.seconds() - ready.seconds();
                transfer = transfer.min(
                    labels[c2.id as usize]
                        .checked_add(params.wait_weight.times_seconds(wait))
                        .checked_add(params.walk_weight.times_seconds(walk))
                        .checked_add(params.buffer_weight.times_seconds(buffer)),
                );
            }
            best = best.min(transfer.checked_add(params.transfer_penalty));

            labels[c.id as usize] = best;
        }

        ReferencePats {
            net,
            params,
            destination,
            dist,
            labels,
        }
    }

    /// Minimum PAT attainable once aboard the given connection.
    pub fn board_label(&self, id: ConnectionId) -> Pat {
        self.labels[id as usize]
    }

    /// Minimum PAT over journeys that begin by boarding at `stop`, given the
    /// passenger stands there ready to board from `ready` on. No walking,
    /// buffer, or transfer cost: those belong to whoever brought the
    /// passenger to the stop.
    pub fn stop_profile(&self, stop: StopId, ready: Time) -> Pat {
        let mut best = Pat::INFINITY;
        for c in &self.net.connections {
            if c.dep_stop != stop || c.dep_time < ready {
                continue;
            }
            let wait = c.dep_time.seconds() - ready.seconds();
            best = best.min(
                self.labels[c.id as usize]
                    .checked_add(self.params.wait_weight.times_seconds(wait)),
            );
        }
        best
    }

    /// Minimum PAT over every journey from `origin` leaving at `dep`:
    /// walking straight to the destination, or walking to any stop, sitting
    /// out its buffer, and boarding any connection that leaves late enough.
    pub fn min_pat(&self, origin: VertexId, dep: Time) -> Pat {
        let mut best = walk_pat(dep, self.dist[origin as usize][self.destination as usize], &self.params);
        for c in &self.net.connections {
            let walk = self.dist[origin as usize][self.net.stops[c.dep_stop as usize].vertex as usize];
            if walk == UNREACHABLE {
                continue;
            }
            let buffer = self.net.buffer_time(c.dep_stop);
            let ready = dep.plus(walk).plus(buffer);
            if c.dep_time < ready {
                continue;
            }
            let wait = c.dep_time.seconds() - ready.seconds();
            best = best.min(
                self.labels[c.id as usize]
                    .checked_add(self.params.wait_weight.times_seconds(wait))
                    .checked_add(self.params.walk_weight.times_seconds(walk))
                    .checked_add(self.params.buffer_weight.times_seconds(buffer)),
            );
        }
        best
    }
}

fn walk_pat(start: Time, walk: u32, params: &PenaltyParams) -> Pat {
    if walk == UNREACHABLE {
        return Pat::INFINITY;
    }
    Pat::from_seconds(start.plus(walk).seconds()).checked_add(params.walk_weight.times_seconds(walk))
}

/// Stop-to-stop transfer edges from exhaustive full-graph searches: one edge
/// per reachable ordered stop pair. Substituting this for a computed shortcut
/// graph must not change any PAT.
pub fn complete_transfer_graph(net: &TransitNetwork) -> ShortcutGraph {
    let mut edges = Vec::new();
    for (from, stop) in net.stops.iter().enumerate() {
        let dist = dijkstra(&net.graph, stop.vertex, None).unwrap();
        for (to, other) in net.stops.iter().enumerate() {
            if from == to {
                continue;
            }
            let d = dist[other.vertex as usize];
            if d != UNREACHABLE {
                edges.push((from as StopId, to as StopId, d));
            }
        }
    }
    ShortcutGraph::from_edges(edges, net.stops.len())
}

/// Size and shape limits for [`random_network`].
pub struct FixtureConfig {
    pub max_stops: usize,
    pub max_connections: usize,
    pub max_extra_vertices: usize,
    pub max_edge_weight: u32,
}

impl Default for FixtureConfig {
    fn default() -> FixtureConfig {
        FixtureConfig {
            max_stops: 12,
            max_connections: 50,
            max_extra_vertices: 8,
            max_edge_weight: 90,
        }
    }
}

/// Random small network: a handful of stops scattered over a walking graph
/// with some non-stop junction vertices, plus trips whose stop sequences may
/// revisit stops (so loops occur). All event times are globally distinct and
/// every connection takes at least a second, keeping the timetable free of
/// same-instant dependencies.
pub fn random_network<R: Rng>(rng: &mut R, cfg: &FixtureConfig) -> TransitNetwork {
    let num_stops = rng.gen_range(2..=cfg.max_stops.max(2));
    let extra = rng.gen_range(0..=cfg.max_extra_vertices);
    let n = num_stops + extra;

    let mut vertices: Vec<VertexId> = (0..n as VertexId).collect();
    vertices.shuffle(rng);
    let buffers = [0u32, 0, 20, 45];
    let stops: Vec<Stop> = (0..num_stops)
        .map(|i| Stop {
            vertex: vertices[i],
            buffer_time: *buffers.choose(rng).unwrap(),
        })
        .collect();

    let mut edges = Vec::new();
    for _ in 0..rng.gen_range(0..=2 * n) {
        let a = rng.gen_range(0..n) as VertexId;
        let b = rng.gen_range(0..n) as VertexId;
        if a == b {
            continue;
        }
        let w = rng.gen_range(1..=cfg.max_edge_weight);
        edges.push(Edge {
            from: a,
            to: b,
            walk_time: w,
        });
        if rng.gen_bool(0.85) {
            edges.push(Edge {
                from: b,
                to: a,
                walk_time: w,
            });
        }
    }
    let graph = WalkingGraph::new(n, edges);

    // Pull event times from a shuffled pool so departures and arrivals are
    // pairwise distinct across the whole timetable.
    let budget = rng.gen_range(1..=cfg.max_connections);
    let mut pool: Vec<u32> = (1..=(4 * cfg.max_connections as u32)).map(|i| i * 7).collect();
    pool.shuffle(rng);
    let mut pool = pool.into_iter();

    let mut trips = Vec::new();
    let mut connections = Vec::new();
    let mut remaining = budget;
    while remaining > 0 {
        let len = rng.gen_range(1..=remaining.min(4));
        remaining -= len;
        let mut times: Vec<u32> = (&mut pool).take(2 * len).collect();
        times.sort_unstable();

        let trip_id = trips.len() as u32;
        let mut stop_seq = vec![rng.gen_range(0..num_stops) as StopId];
        for _ in 0..len {
            let prev = *stop_seq.last().unwrap();
            let mut next = rng.gen_range(0..num_stops) as StopId;
            if next == prev {
                next = (next + 1) % num_stops as StopId;
            }
            stop_seq.push(next);
        }

        let mut ids = Vec::new();
        for i in 0..len {
            let id = connections.len() as ConnectionId;
            ids.push(id);
            connections.push(Connection {
                id,
                dep_stop: stop_seq[i],
                arr_stop: stop_seq[i + 1],
                dep_time: Time(times[2 * i]),
                arr_time: Time(times[2 * i + 1]),
                trip: trip_id,
                index_in_trip: i as u32,
            });
        }
        trips.push(Trip { connections: ids });
    }

    TransitNetwork::from_parts(stops, trips, connections, graph, Vec::new()).normalized()
}

/// Penalty weights drawn from the coarse grid the randomized suites use.
pub fn random_penalties<R: Rng>(rng: &mut R) -> PenaltyParams {
    let grid = [0.0, 0.5, 1.0, 2.0];
    let weight = |rng: &mut R| Weight::from_f64(*grid.choose(rng).unwrap()).unwrap();
    PenaltyParams {
        transfer_penalty: Pat::from_seconds(*[0, 30, 120].choose(rng).unwrap()),
        wait_weight: weight(rng),
        walk_weight: weight(rng),
        buffer_weight: weight(rng),
        delay_tolerance: Pat::from_seconds(*[60, 300].choose(rng).unwrap()),
    }
}

/// Random demand over the network's walking vertices. Ids are dense in entry
/// order; departure times fall inside the timetable's active window.
pub fn random_demand<R: Rng>(rng: &mut R, net: &TransitNetwork, count: usize) -> Vec<DemandEntry> {
    let n = net.graph.num_vertices() as VertexId;
    let horizon = net
        .connections
        .iter()
        .map(|c| c.arr_time.seconds())
        .max()
        .unwrap_or(3600);
    (0..count)
        .map(|i| DemandEntry {
            id: i as u32,
            origin: rng.gen_range(0..n),
            destination: rng.gen_range(0..n),
            dep_time: Time(rng.gen_range(0..=horizon)),
        })
        .collect()
}
