//! Transit network model: stops, timetabled connections, trips, the walking
//! graph, and traffic zones.
//!
//! All identifiers are dense `u32` indexes. Timestamps are whole seconds since
//! service-day midnight and may exceed 24h for post-midnight services. The
//! connection array is kept sorted ascending by departure time (ties broken by
//! trip id, then position within the trip), which both the profile scan and
//! the assignment simulation rely on.

use serde::{Deserialize, Serialize};
use std::fmt;

pub type StopId = u32;
pub type VertexId = u32;
pub type TripId = u32;
pub type ConnectionId = u32;
pub type ZoneId = u32;

/// Walking duration marker for "no path".
pub const UNREACHABLE: u32 = u32::MAX;

/// Seconds since service-day midnight. May exceed 86400.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize, Default,
)]
pub struct Time(pub u32);

impl Time {
    pub fn seconds(self) -> u32 {
        self.0
    }

    pub fn plus(self, seconds: u32) -> Time {
        Time(self.0.checked_add(seconds).expect("timestamp overflow"))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.0 / 3600;
        let m = (self.0 % 3600) / 60;
        let s = self.0 % 60;
        write!(f, "{:02}:{:02}:{:02}", h, m, s)
    }
}

/// A boarding location. `vertex` ties the stop into the walking graph;
/// `buffer_time` is the minimum slack required before boarding any vehicle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub vertex: VertexId,
    pub buffer_time: u32,
}

/// One vehicle movement between two stops without intermediate halts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub id: ConnectionId,
    pub dep_stop: StopId,
    pub arr_stop: StopId,
    pub dep_time: Time,
    pub arr_time: Time,
    pub trip: TripId,
    pub index_in_trip: u32,
}

/// The ordered connection sequence of one vehicle run.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Trip {
    pub connections: Vec<ConnectionId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub walk_time: u32,
}

/// Directed walking graph stored as a CSR adjacency structure.
///
/// Loop edges are accepted on input but dropped: they cannot shorten any walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkingGraph {
    num_vertices: usize,
    offsets: Vec<u32>,
    targets: Vec<(VertexId, u32)>,
}

impl WalkingGraph {
    pub fn new(num_vertices: usize, mut edges: Vec<Edge>) -> WalkingGraph {
        for e in &edges {
            assert!(
                (e.from as usize) < num_vertices && (e.to as usize) < num_vertices,
                "edge endpoint out of range"
            );
        }
        edges.retain(|e| e.from != e.to);
        edges.sort_by_key(|e| (e.from, e.to, e.walk_time));
        let mut offsets = vec![0u32; num_vertices + 1];
        for e in &edges {
            offsets[e.from as usize + 1] += 1;
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let targets = edges.iter().map(|e| (e.to, e.walk_time)).collect();
        WalkingGraph {
            num_vertices,
            offsets,
            targets,
        }
    }

    pub fn empty(num_vertices: usize) -> WalkingGraph {
        WalkingGraph::new(num_vertices, Vec::new())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn out_edges(&self, v: VertexId) -> &[(VertexId, u32)] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.targets[lo..hi]
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.num_vertices as u32).flat_map(move |v| {
            self.out_edges(v).iter().map(move |&(to, walk_time)| Edge {
                from: v,
                to,
                walk_time,
            })
        })
    }

    pub fn reversed(&self) -> WalkingGraph {
        let edges = self
            .edges()
            .map(|e| Edge {
                from: e.to,
                to: e.from,
                walk_time: e.walk_time,
            })
            .collect();
        WalkingGraph::new(self.num_vertices, edges)
    }
}

/// A traffic zone: a demand aggregation area attached to nearby stops.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Zone {
    /// Access walks from the zone towards stops (used when the zone is an origin).
    pub outgoing: Vec<(StopId, u32)>,
    /// Egress walks from stops into the zone (used when the zone is a destination).
    pub incoming: Vec<(StopId, u32)>,
}

/// Walking-graph vertices materialized for one zone by [`integrate_zones`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneEndpoints {
    /// Vertex with only outgoing edges; journeys may start here.
    pub source: VertexId,
    /// Vertex with only incoming edges; journeys may end here.
    pub sink: VertexId,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitNetwork {
    pub stops: Vec<Stop>,
    pub trips: Vec<Trip>,
    /// Sorted ascending by `(dep_time, trip, index_in_trip)` once normalized.
    pub connections: Vec<Connection>,
    pub graph: WalkingGraph,
    pub zones: Vec<Zone>,
    /// Filled by [`integrate_zones`]; empty while zones are only declarative.
    pub zone_endpoints: Vec<ZoneEndpoints>,
    /// Maps a connection id to its position in the sorted array.
    id_to_pos: Vec<u32>,
}

impl TransitNetwork {
    /// Builds a network without reordering connections. Use [`Self::normalized`]
    /// (or [`validate_network`]) before handing the network to the engine.
    pub fn from_parts(
        stops: Vec<Stop>,
        trips: Vec<Trip>,
        connections: Vec<Connection>,
        graph: WalkingGraph,
        zones: Vec<Zone>,
    ) -> TransitNetwork {
        let mut net = TransitNetwork {
            stops,
            trips,
            connections,
            graph,
            zones,
            zone_endpoints: Vec::new(),
            id_to_pos: Vec::new(),
        };
        net.rebuild_id_index();
        net
    }

    /// Sorts the connection array into canonical order.
    pub fn normalized(mut self) -> TransitNetwork {
        self.connections
            .sort_by_key(|c| (c.dep_time, c.trip, c.index_in_trip));
        self.rebuild_id_index();
        self
    }

    fn rebuild_id_index(&mut self) {
        let n = self.connections.len();
        let mut index = vec![u32::MAX; n];
        let mut ok = true;
        for (pos, c) in self.connections.iter().enumerate() {
            match index.get_mut(c.id as usize) {
                Some(slot) if *slot == u32::MAX => *slot = pos as u32,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        self.id_to_pos = if ok { index } else { Vec::new() };
    }

    /// Looks a connection up by its id. Requires dense, unique ids.
    pub fn connection_by_id(&self, id: ConnectionId) -> Option<&Connection> {
        let pos = *self.id_to_pos.get(id as usize)?;
        self.connections.get(pos as usize)
    }

    pub fn buffer_time(&self, stop: StopId) -> u32 {
        self.stops[stop as usize].buffer_time
    }

    pub fn is_sorted(&self) -> bool {
        self.connections
            .windows(2)
            .all(|w| (w[0].dep_time, w[0].trip, w[0].index_in_trip) <= (w[1].dep_time, w[1].trip, w[1].index_in_trip))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("zone {zone} references stop {stop} which does not exist")]
    DanglingZoneStop { zone: ZoneId, stop: StopId },
    #[error("zones have already been integrated into the walking graph")]
    ZonesAlreadyIntegrated,
}

/// Replaces declarative zones with walking-graph vertices.
///
/// Each zone gets two fresh vertices: a source with only outgoing edges to
/// its access stops and a sink with only incoming edges from its egress
/// stops. Source and sink are deliberately never connected to each other, so
/// no zone can act as a through-walking shortcut between stops.
pub fn integrate_zones(net: TransitNetwork) -> Result<TransitNetwork, NetworkError> {
    if !net.zone_endpoints.is_empty() {
        return Err(NetworkError::ZonesAlreadyIntegrated);
    }
    let base = net.graph.num_vertices();
    let mut edges: Vec<Edge> = net.graph.edges().collect();
    let mut endpoints = Vec::with_capacity(net.zones.len());
    for (zid, zone) in net.zones.iter().enumerate() {
        let source = (base + 2 * zid) as VertexId;
        let sink = (base + 2 * zid + 1) as VertexId;
        for &(stop, walk_time) in &zone.outgoing {
            let stop_vertex = net
                .stops
                .get(stop as usize)
                .ok_or(NetworkError::DanglingZoneStop {
                    zone: zid as ZoneId,
                    stop,
                })?
                .vertex;
            edges.push(Edge {
                from: source,
                to: stop_vertex,
                walk_time,
            });
        }
        for &(stop, walk_time) in &zone.incoming {
            let stop_vertex = net
                .stops
                .get(stop as usize)
                .ok_or(NetworkError::DanglingZoneStop {
                    zone: zid as ZoneId,
                    stop,
                })?
                .vertex;
            edges.push(Edge {
                from: stop_vertex,
                to: sink,
                walk_time,
            });
        }
        endpoints.push(ZoneEndpoints { source, sink });
    }
    let graph = WalkingGraph::new(base + 2 * net.zones.len(), edges);
    Ok(TransitNetwork {
        graph,
        zone_endpoints: endpoints,
        ..net
    })
}

/// Checks whether a passenger leaving `c1` can reach and board `c2`.
///
/// Staying on the same vehicle needs no buffer: `c2` must immediately follow
/// `c1` within the trip. Any other combination is a transfer and requires the
/// walk plus the departure stop's buffer time to fit before departure.
/// `walk_time` is the walking duration from `c1`'s arrival stop to `c2`'s
/// departure stop, or `None` when no walking path exists.
pub fn transfer_feasible(
    net: &TransitNetwork,
    c1: &Connection,
    c2: &Connection,
    walk_time: Option<u32>,
) -> bool {
    if c1.trip == c2.trip && c2.index_in_trip == c1.index_in_trip + 1 {
        return true;
    }
    let Some(walk) = walk_time else {
        return false;
    };
    let buffer = net.buffer_time(c2.dep_stop);
    let ready = c1.arr_time.seconds() as u64 + walk as u64 + buffer as u64;
    ready <= c2.dep_time.seconds() as u64
}

/// One structural defect found by [`validate_network`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ConnectionIdsNotDense,
    ConnectionsUnsorted {
        position: usize,
    },
    NonPositiveTravelTime {
        connection: ConnectionId,
    },
    DanglingStop {
        connection: ConnectionId,
        stop: StopId,
    },
    DanglingTrip {
        connection: ConnectionId,
        trip: TripId,
    },
    StopVertexOutOfRange {
        stop: StopId,
        vertex: VertexId,
    },
    EmptyTrip {
        trip: TripId,
    },
    TripConnectionDangling {
        trip: TripId,
        connection: ConnectionId,
    },
    TripMembershipMismatch {
        trip: TripId,
        connection: ConnectionId,
    },
    TripIndexMismatch {
        trip: TripId,
        connection: ConnectionId,
        expected: u32,
        actual: u32,
    },
    TripStopDiscontinuity {
        trip: TripId,
        connection: ConnectionId,
    },
    TripTimeOverlap {
        trip: TripId,
        connection: ConnectionId,
    },
    ZoneStopOutOfRange {
        zone: ZoneId,
        stop: StopId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConnectionIdsNotDense => {
                write!(f, "connection ids are not a dense 0..n range")
            }
            Violation::ConnectionsUnsorted { position } => write!(
                f,
                "connections are not sorted by departure time at position {position}"
            ),
            Violation::NonPositiveTravelTime { connection } => write!(
                f,
                "connection {connection} does not depart strictly before it arrives"
            ),
            Violation::DanglingStop { connection, stop } => {
                write!(f, "connection {connection} references unknown stop {stop}")
            }
            Violation::DanglingTrip { connection, trip } => {
                write!(f, "connection {connection} references unknown trip {trip}")
            }
            Violation::StopVertexOutOfRange { stop, vertex } => {
                write!(f, "stop {stop} references unknown walking vertex {vertex}")
            }
            Violation::EmptyTrip { trip } => write!(f, "trip {trip} has no connections"),
            Violation::TripConnectionDangling { trip, connection } => {
                write!(f, "trip {trip} references unknown connection {connection}")
            }
            Violation::TripMembershipMismatch { trip, connection } => write!(
                f,
                "connection {connection} is listed in trip {trip} but labelled differently"
            ),
            Violation::TripIndexMismatch {
                trip,
                connection,
                expected,
                actual,
            } => write!(
                f,
                "connection {connection} in trip {trip} has index {actual}, expected {expected}"
            ),
            Violation::TripStopDiscontinuity { trip, connection } => write!(
                f,
                "trip {trip} jumps between stops at connection {connection}"
            ),
            Violation::TripTimeOverlap { trip, connection } => write!(
                f,
                "trip {trip} departs connection {connection} before the previous arrival"
            ),
            Violation::ZoneStopOutOfRange { zone, stop } => {
                write!(f, "zone {zone} references unknown stop {stop}")
            }
        }
    }
}

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "network is structurally valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Structural validation: referential integrity, trip continuity, time order.
pub fn validate_network(net: &TransitNetwork) -> ValidationReport {
    let mut report = ValidationReport::default();
    let num_stops = net.stops.len() as u32;
    let num_trips = net.trips.len() as u32;
    let num_connections = net.connections.len();
    let num_vertices = net.graph.num_vertices() as u32;

    let mut seen_ids = vec![false; num_connections];
    let mut ids_dense = true;
    for c in &net.connections {
        match seen_ids.get_mut(c.id as usize) {
            Some(slot) if !*slot => *slot = true,
            _ => ids_dense = false,
        }
    }
    if !ids_dense {
        report.violations.push(Violation::ConnectionIdsNotDense);
    }

    if let Some(position) = net.connections.windows(2).position(|w| {
        (w[0].dep_time, w[0].trip, w[0].index_in_trip) > (w[1].dep_time, w[1].trip, w[1].index_in_trip)
    }) {
        report
            .violations
            .push(Violation::ConnectionsUnsorted { position: position + 1 });
    }

    for c in &net.connections {
        if c.dep_time >= c.arr_time {
            report
                .violations
                .push(Violation::NonPositiveTravelTime { connection: c.id });
        }
        for stop in [c.dep_stop, c.arr_stop] {
            if stop >= num_stops {
                report.violations.push(Violation::DanglingStop {
                    connection: c.id,
                    stop,
                });
            }
        }
        if c.trip >= num_trips {
            report.violations.push(Violation::DanglingTrip {
                connection: c.id,
                trip: c.trip,
            });
        }
    }

    for (sid, stop) in net.stops.iter().enumerate() {
        if stop.vertex >= num_vertices {
            report.violations.push(Violation::StopVertexOutOfRange {
                stop: sid as StopId,
                vertex: stop.vertex,
            });
        }
    }

    for (tid, trip) in net.trips.iter().enumerate() {
        let tid = tid as TripId;
        if trip.connections.is_empty() {
            report.violations.push(Violation::EmptyTrip { trip: tid });
            continue;
        }
        let mut prev: Option<&Connection> = None;
        for (idx, &cid) in trip.connections.iter().enumerate() {
            let Some(c) = net.connection_by_id(cid) else {
                report.violations.push(Violation::TripConnectionDangling {
                    trip: tid,
                    connection: cid,
                });
                prev = None;
                continue;
            };
            if c.trip != tid {
                report.violations.push(Violation::TripMembershipMismatch {
                    trip: tid,
                    connection: cid,
                });
            }
            if c.index_in_trip != idx as u32 {
                report.violations.push(Violation::TripIndexMismatch {
                    trip: tid,
                    connection: cid,
                    expected: idx as u32,
                    actual: c.index_in_trip,
                });
            }
            if let Some(p) = prev {
                if p.arr_stop != c.dep_stop {
                    report.violations.push(Violation::TripStopDiscontinuity {
                        trip: tid,
                        connection: cid,
                    });
                }
                if p.arr_time > c.dep_time {
                    report.violations.push(Violation::TripTimeOverlap {
                        trip: tid,
                        connection: cid,
                    });
                }
            }
            prev = Some(c);
        }
    }

    for (zid, zone) in net.zones.iter().enumerate() {
        for &(stop, _) in zone.outgoing.iter().chain(zone.incoming.iter()) {
            if stop >= num_stops {
                report.violations.push(Violation::ZoneStopOutOfRange {
                    zone: zid as ZoneId,
                    stop,
                });
            }
        }
    }

    report
}
