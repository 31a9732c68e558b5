//! Demand CSV: `id,origin,destination,dep_time`.
//!
//! Origins and destinations are either bare walking-graph vertex ids or zone
//! references written `z<id>`. Zone origins resolve to the zone's source
//! vertex, zone destinations to its sink vertex, so demand can only leave a
//! zone at its access stops and enter one at its egress stops.

use super::{format_time, read_csv, write_file, IoError, VERSION_HEADER};
use crate::assignment::DemandEntry;
use crate::network::TransitNetwork;
use std::fmt::Write as _;
use std::path::Path;

const DEMAND_COLUMNS: &str = "id,origin,destination,dep_time";

enum Endpoint {
    Vertex(u32),
    Zone(u32),
}

fn parse_endpoint(token: &str) -> Result<Endpoint, String> {
    if let Some(zone) = token.strip_prefix('z') {
        zone.parse()
            .map(Endpoint::Zone)
            .map_err(|e| format!("'{token}': {e}"))
    } else {
        token
            .parse()
            .map(Endpoint::Vertex)
            .map_err(|e| format!("'{token}': {e}"))
    }
}

/// Loads demand against a network whose zones are already integrated.
pub fn load_demand(path: &Path, net: &TransitNetwork) -> Result<Vec<DemandEntry>, IoError> {
    let mut seen = std::collections::HashSet::new();
    read_csv(
        path,
        DEMAND_COLUMNS,
        |_, _| Ok(()),
        |row| {
            row.expect_len(4)?;
            let id = row.u32(1)?;
            if !seen.insert(id) {
                return Err(row.field_error(1, format_args!("duplicate demand id {id}")));
            }
            let resolve = |column: usize, origin: bool| -> Result<u32, IoError> {
                let vertex = match parse_endpoint(row.get(column))
                    .map_err(|msg| row.field_error(column, msg))?
                {
                    Endpoint::Vertex(v) => v,
                    Endpoint::Zone(z) => {
                        let endpoints =
                            net.zone_endpoints.get(z as usize).copied().ok_or_else(|| {
                                row.field_error(column, format_args!("unknown zone {z}"))
                            })?;
                        if origin {
                            endpoints.source
                        } else {
                            endpoints.sink
                        }
                    }
                };
                if (vertex as usize) < net.graph.num_vertices() {
                    Ok(vertex)
                } else {
                    Err(row.field_error(column, format_args!("unknown vertex {vertex}")))
                }
            };
            Ok(DemandEntry {
                id,
                origin: resolve(2, true)?,
                destination: resolve(3, false)?,
                dep_time: row.time(4)?,
            })
        },
    )
}

pub fn dump_demand(demand: &[DemandEntry], path: &Path) -> Result<(), IoError> {
    let mut out = format!("{VERSION_HEADER}\n{DEMAND_COLUMNS}\n");
    for entry in demand {
        writeln!(
            out,
            "{},{},{},{}",
            entry.id,
            entry.origin,
            entry.destination,
            format_time(entry.dep_time)
        )
        .unwrap();
    }
    write_file(path, &out)
}
