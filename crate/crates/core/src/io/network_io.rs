//! Network directory format: stops.csv, trips.csv, connections.csv,
//! edges.csv, and optional zones.csv.
//!
//! Loading validates the assembled network and fails on any structural
//! violation. Dumping writes the same canonical form the loader accepts, so
//! load -> dump -> load is the identity.

use super::{format_time, read_csv, write_file, IoError, Row, VERSION_HEADER};
use crate::network::{
    validate_network, Connection, Edge, Stop, TransitNetwork, Trip, WalkingGraph, Zone,
};
use std::fmt::Write as _;
use std::path::Path;

/// A parsed network plus the presentation data that does not participate in
/// routing: per-stop map coordinates, if the file carried any.
#[derive(Debug)]
pub struct LoadedNetwork {
    pub net: TransitNetwork,
    /// `(lat, lon)` per stop, in stop id order.
    pub coordinates: Vec<Option<(f64, f64)>>,
}

const STOP_COLUMNS: &str = "stop_id,vertex,buffer_time,lat,lon";
const TRIP_COLUMNS: &str = "trip_id";
const CONNECTION_COLUMNS: &str =
    "connection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip";
const EDGE_COLUMNS: &str = "from,to,walk_seconds";
const ZONE_COLUMNS: &str = "zone_id,direction,stop_id,seconds";

pub fn load_network(dir: &Path) -> Result<LoadedNetwork, IoError> {
    let mut coordinates = Vec::new();
    let stops: Vec<Stop> = read_csv(
        &dir.join("stops.csv"),
        STOP_COLUMNS,
        |_, _| Ok(()),
        |row| {
            row.expect_len(5)?;
            let id = row.u32(1)?;
            if id as usize != coordinates.len() {
                return Err(row.field_error(1, "stop ids must be dense and ascending"));
            }
            coordinates.push(parse_coordinates(row)?);
            Ok(Stop {
                vertex: row.u32(2)?,
                buffer_time: row.u32(3)?,
            })
        },
    )?;

    let trip_rows = read_csv(
        &dir.join("trips.csv"),
        TRIP_COLUMNS,
        |_, _| Ok(()),
        |row| {
            row.expect_len(1)?;
            row.u32(1)
        },
    )?;
    for (i, &id) in trip_rows.iter().enumerate() {
        if id as usize != i {
            return Err(IoError::InvalidNetwork(format!(
                "trips.csv: trip ids must be dense and ascending, found {id} at row {i}"
            )));
        }
    }
    let mut trips: Vec<Trip> = trip_rows.iter().map(|_| Trip::default()).collect();

    let connections: Vec<Connection> = read_csv(
        &dir.join("connections.csv"),
        CONNECTION_COLUMNS,
        |_, _| Ok(()),
        |row| {
            row.expect_len(7)?;
            Ok(Connection {
                id: row.u32(1)?,
                dep_stop: row.u32(2)?,
                arr_stop: row.u32(3)?,
                dep_time: row.time(4)?,
                arr_time: row.time(5)?,
                trip: row.u32(6)?,
                index_in_trip: row.u32(7)?,
            })
        },
    )?;
    for c in &connections {
        let Some(trip) = trips.get_mut(c.trip as usize) else {
            return Err(IoError::InvalidNetwork(format!(
                "connection {} references trip {} which is not in trips.csv",
                c.id, c.trip
            )));
        };
        trip.connections.push(c.id);
    }
    for trip in &mut trips {
        let by_index = |&id: &u32| {
            connections
                .iter()
                .find(|c| c.id == id)
                .map(|c| c.index_in_trip)
                .unwrap_or(u32::MAX)
        };
        trip.connections.sort_by_key(by_index);
    }

    let mut num_vertices: Option<usize> = None;
    let edges: Vec<Edge> = read_csv(
        &dir.join("edges.csv"),
        EDGE_COLUMNS,
        |directive, line| {
            if let Some(n) = directive.strip_prefix("vertices ") {
                num_vertices = Some(n.trim().parse().map_err(|_| IoError::Row {
                    file: dir.join("edges.csv"),
                    line,
                    message: format!("bad vertex count '{n}'"),
                })?);
                Ok(())
            } else {
                Err(IoError::Row {
                    file: dir.join("edges.csv"),
                    line,
                    message: format!("unknown directive '#{directive}'"),
                })
            }
        },
        |row| {
            row.expect_len(3)?;
            Ok(Edge {
                from: row.u32(1)?,
                to: row.u32(2)?,
                walk_time: row.u32(3)?,
            })
        },
    )?;
    let Some(num_vertices) = num_vertices else {
        return Err(IoError::InvalidNetwork(
            "edges.csv: missing '#vertices N' directive".into(),
        ));
    };

    let zones_path = dir.join("zones.csv");
    let mut zones: Vec<Zone> = Vec::new();
    if zones_path.exists() {
        read_csv(
            &zones_path,
            ZONE_COLUMNS,
            |_, _| Ok(()),
            |row| {
                row.expect_len(4)?;
                let zone = row.u32(1)? as usize;
                if zone >= zones.len() {
                    zones.resize_with(zone + 1, Zone::default);
                }
                let stop = row.u32(3)?;
                let seconds = row.u32(4)?;
                match row.get(2) {
                    "out" => zones[zone].outgoing.push((stop, seconds)),
                    "in" => zones[zone].incoming.push((stop, seconds)),
                    other => {
                        return Err(
                            row.field_error(2, format_args!("direction '{other}' is not out|in"))
                        )
                    }
                }
                Ok(())
            },
        )?;
    }

    let net = TransitNetwork::from_parts(
        stops,
        trips,
        connections,
        WalkingGraph::new(num_vertices, edges),
        zones,
    )
    .normalized();

    let report = validate_network(&net);
    if !report.is_valid() {
        return Err(IoError::InvalidNetwork(format!("{report}")));
    }
    Ok(LoadedNetwork { net, coordinates })
}

fn parse_coordinates(row: &Row<'_>) -> Result<Option<(f64, f64)>, IoError> {
    match (row.get(4).is_empty(), row.get(5).is_empty()) {
        (true, true) => Ok(None),
        (false, false) => Ok(Some((row.f64(4)?, row.f64(5)?))),
        _ => Err(row.field_error(4, "lat and lon must both be present or both empty")),
    }
}

/// Writes the canonical file set into `dir`.
pub fn dump_network(loaded: &LoadedNetwork, dir: &Path) -> Result<(), IoError> {
    let net = &loaded.net;

    let mut stops = format!("{VERSION_HEADER}\n{STOP_COLUMNS}\n");
    for (id, stop) in net.stops.iter().enumerate() {
        let (lat, lon) = match loaded.coordinates.get(id).copied().flatten() {
            Some((lat, lon)) => (format!("{lat}"), format!("{lon}")),
            None => (String::new(), String::new()),
        };
        writeln!(
            stops,
            "{id},{},{},{lat},{lon}",
            stop.vertex, stop.buffer_time
        )
        .unwrap();
    }
    write_file(&dir.join("stops.csv"), &stops)?;

    let mut trips = format!("{VERSION_HEADER}\n{TRIP_COLUMNS}\n");
    for id in 0..net.trips.len() {
        writeln!(trips, "{id}").unwrap();
    }
    write_file(&dir.join("trips.csv"), &trips)?;

    let mut connections = format!("{VERSION_HEADER}\n{CONNECTION_COLUMNS}\n");
    for c in &net.connections {
        writeln!(
            connections,
            "{},{},{},{},{},{},{}",
            c.id,
            c.dep_stop,
            c.arr_stop,
            format_time(c.dep_time),
            format_time(c.arr_time),
            c.trip,
            c.index_in_trip
        )
        .unwrap();
    }
    write_file(&dir.join("connections.csv"), &connections)?;

    let mut edges = format!(
        "{VERSION_HEADER}\n#vertices {}\n{EDGE_COLUMNS}\n",
        net.graph.num_vertices()
    );
    for e in net.graph.edges() {
        writeln!(edges, "{},{},{}", e.from, e.to, e.walk_time).unwrap();
    }
    write_file(&dir.join("edges.csv"), &edges)?;

    if !net.zones.is_empty() {
        let mut zones = format!("{VERSION_HEADER}\n{ZONE_COLUMNS}\n");
        for (id, zone) in net.zones.iter().enumerate() {
            for &(stop, seconds) in &zone.outgoing {
                writeln!(zones, "{id},out,{stop},{seconds}").unwrap();
            }
            for &(stop, seconds) in &zone.incoming {
                writeln!(zones, "{id},in,{stop},{seconds}").unwrap();
            }
        }
        write_file(&dir.join("zones.csv"), &zones)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Time;

    fn write_minimal(dir: &Path) {
        let files = [
            (
                "stops.csv",
                "#transit-assign v1\nstop_id,vertex,buffer_time,lat,lon\n0,0,0,48.7,9.1\n1,1,60,,\n",
            ),
            ("trips.csv", "#transit-assign v1\ntrip_id\n0\n"),
            (
                "connections.csv",
                "#transit-assign v1\nconnection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n0,0,1,08:00:00,08:05:00,0,0\n",
            ),
            (
                "edges.csv",
                "#transit-assign v1\n#vertices 2\nfrom,to,walk_seconds\n0,1,120\n1,0,120\n",
            ),
        ];
        for (name, content) in files {
            std::fs::write(dir.join(name), content).unwrap();
        }
    }

    #[test]
    fn minimal_fixture_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal(dir.path());
        let loaded = load_network(dir.path()).unwrap();
        assert_eq!(loaded.net.stops.len(), 2);
        assert_eq!(loaded.net.connections[0].dep_time, Time(28800));
        assert_eq!(loaded.coordinates[0], Some((48.7, 9.1)));
        assert_eq!(loaded.coordinates[1], None);

        let out = tempfile::tempdir().unwrap();
        dump_network(&loaded, out.path()).unwrap();
        let reloaded = load_network(out.path()).unwrap();
        assert_eq!(reloaded.net, loaded.net);
        assert_eq!(reloaded.coordinates, loaded.coordinates);
        for name in ["stops.csv", "trips.csv", "connections.csv", "edges.csv"] {
            let a = std::fs::read(dir.path().join(name)).unwrap();
            let b = std::fs::read(out.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} not canonical");
        }
    }

    #[test]
    fn out_of_order_connections_are_sorted_and_dumped_sorted() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal(dir.path());
        std::fs::write(
            dir.path().join("trips.csv"),
            "#transit-assign v1\ntrip_id\n0\n1\n",
        )
        .unwrap();
        std::fs::write(
            dir.path().join("connections.csv"),
            "#transit-assign v1\nconnection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n\
             0,0,1,09:00:00,09:05:00,0,0\n1,1,0,08:00:00,08:05:00,1,0\n",
        )
        .unwrap();
        let loaded = load_network(dir.path()).unwrap();
        assert!(loaded.net.is_sorted());
        assert_eq!(loaded.net.connections[0].id, 1);

        let out = tempfile::tempdir().unwrap();
        dump_network(&loaded, out.path()).unwrap();
        let text = std::fs::read_to_string(out.path().join("connections.csv")).unwrap();
        let rows: Vec<&str> = text.lines().skip(2).collect();
        assert!(rows[0].starts_with("1,") && rows[1].starts_with("0,"));
    }

    #[test]
    fn malformed_time_names_file_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal(dir.path());
        std::fs::write(
            dir.path().join("connections.csv"),
            "#transit-assign v1\nconnection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n0,0,1,25:99:99x,08:05:00,0,0\n",
        )
        .unwrap();
        let err = load_network(dir.path()).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("connections.csv"), "{message}");
        assert!(message.contains(":3:"), "{message}");
        assert!(message.contains("column 4"), "{message}");
    }

    #[test]
    fn zones_load_directionally() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal(dir.path());
        std::fs::write(
            dir.path().join("zones.csv"),
            "#transit-assign v1\nzone_id,direction,stop_id,seconds\n0,out,0,120\n0,in,1,60\n",
        )
        .unwrap();
        let loaded = load_network(dir.path()).unwrap();
        assert_eq!(loaded.net.zones[0].outgoing, vec![(0, 120)]);
        assert_eq!(loaded.net.zones[0].incoming, vec![(1, 60)]);
    }

    #[test]
    fn missing_version_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_minimal(dir.path());
        std::fs::write(
            dir.path().join("stops.csv"),
            "stop_id,vertex,buffer_time,lat,lon\n0,0,0,,\n",
        )
        .unwrap();
        assert!(matches!(
            load_network(dir.path()),
            Err(IoError::MissingHeader { .. })
        ));
    }
}
