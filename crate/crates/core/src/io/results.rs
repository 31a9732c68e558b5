//! Result files: per-connection utilization, the journey probability spaces,
//! and the aggregate statistics summary.

use super::{fixed6, write_file, IoError, VERSION_HEADER};
use crate::assignment::{AssignmentResult, DemandEntry};
use crate::journey::{JourneyRecord, Leg};
use crate::network::{Time, TransitNetwork};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// `utilization.csv`: expected passengers per connection, in input id order.
pub fn render_utilization(result: &AssignmentResult) -> String {
    let mut out = format!("{VERSION_HEADER}\nconnection_id,expected_passengers\n");
    for (id, &units) in result.utilization.iter().enumerate() {
        writeln!(out, "{id},{}", fixed6(units, result.multiplier as u64)).unwrap();
    }
    out
}

fn leg_token(leg: &Leg) -> String {
    match *leg {
        Leg::WalkToStop { stop, seconds } => format!("iw:{stop}:{seconds}"),
        Leg::Ride { connection } => format!("c:{connection}"),
        Leg::TransferWalk { from, to, seconds } => format!("tw:{from}:{to}:{seconds}"),
        Leg::WalkToDestination { from, seconds } => format!("fw:{from}:{seconds}"),
        Leg::DirectWalk { seconds } => format!("dw:{seconds}"),
    }
}

/// `journeys.csv`: one row per journey in each entry's probability space.
pub fn render_journeys(result: &AssignmentResult) -> String {
    let mut out = format!("{VERSION_HEADER}\ndemand_id,probability,legs\n");
    for entry in &result.journeys {
        for journey in &entry.journeys {
            let legs: Vec<String> = journey.record.legs.iter().map(leg_token).collect();
            writeln!(
                out,
                "{},{},{}",
                entry.demand_id,
                fixed6(journey.units, result.multiplier as u64),
                legs.join("|")
            )
            .unwrap();
        }
    }
    out
}

/// Aggregate metrics over assigned demand entries. Expectations are taken
/// per entry over its journey probabilities, then averaged uniformly over
/// the assigned entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub assigned_entries: u64,
    pub unassigned_entries: u64,
    pub avg_travel_time_min: f64,
    pub avg_walking_time_min: f64,
    pub avg_in_vehicle_time_min: f64,
    pub connections_per_passenger: f64,
    pub trips_per_passenger: f64,
    pub journeys_per_passenger: f64,
    /// Group units recorded on connections during the scan, before cycle
    /// removal (the utilization figure).
    pub connection_units_scanned: u64,
    /// Group units summed over rides in the final journeys, after any cycle
    /// removal. Differs from the scanned figure exactly by excised loops.
    pub connection_units_in_journeys: u64,
    pub multiplier: u32,
}

struct JourneyMeasures {
    travel_seconds: u64,
    walk_seconds: u64,
    ride_seconds: u64,
    rides: u64,
    boardings: u64,
}

fn measure(net: &TransitNetwork, record: &JourneyRecord, departure: Time) -> JourneyMeasures {
    let mut now = departure.seconds() as u64;
    let mut walk = 0u64;
    let mut ride = 0u64;
    let mut rides = 0u64;
    let mut boardings = 0u64;
    let mut last_trip: Option<(u32, u32)> = None;
    for leg in &record.legs {
        match *leg {
            Leg::WalkToStop { seconds, .. }
            | Leg::TransferWalk { seconds, .. }
            | Leg::WalkToDestination { seconds, .. }
            | Leg::DirectWalk { seconds } => {
                now += seconds as u64;
                walk += seconds as u64;
                last_trip = None;
            }
            Leg::Ride { connection } => {
                let c = net
                    .connection_by_id(connection)
                    .expect("journey references unknown connection");
                now = c.arr_time.seconds() as u64;
                ride += (c.arr_time.seconds() - c.dep_time.seconds()) as u64;
                rides += 1;
                let stayed = last_trip == Some((c.trip, c.index_in_trip.wrapping_sub(1)));
                if !stayed {
                    boardings += 1;
                }
                last_trip = Some((c.trip, c.index_in_trip));
            }
        }
    }
    JourneyMeasures {
        travel_seconds: now - departure.seconds() as u64,
        walk_seconds: walk,
        ride_seconds: ride,
        rides,
        boardings,
    }
}

pub fn compute_stats(
    net: &TransitNetwork,
    demand: &[DemandEntry],
    result: &AssignmentResult,
) -> Stats {
    let by_id: HashMap<u32, &DemandEntry> = demand.iter().map(|e| (e.id, e)).collect();
    let multiplier = result.multiplier as f64;

    let mut travel = 0.0;
    let mut walk = 0.0;
    let mut ride = 0.0;
    let mut rides = 0.0;
    let mut boardings = 0.0;
    let mut journeys = 0.0;
    let mut units_in_journeys = 0u64;
    for entry in &result.journeys {
        let demand_entry = by_id
            .get(&entry.demand_id)
            .expect("result references unknown demand id");
        journeys += entry.journeys.len() as f64;
        for journey in &entry.journeys {
            let m = measure(net, &journey.record, demand_entry.dep_time);
            let w = journey.units as f64 / multiplier;
            travel += w * m.travel_seconds as f64;
            walk += w * m.walk_seconds as f64;
            ride += w * m.ride_seconds as f64;
            rides += w * m.rides as f64;
            boardings += w * m.boardings as f64;
            units_in_journeys += journey.units * m.rides;
        }
    }

    let assigned = result.journeys.len() as u64;
    let per_entry = |total: f64| {
        if assigned == 0 {
            0.0
        } else {
            total / assigned as f64
        }
    };
    Stats {
        assigned_entries: assigned,
        unassigned_entries: result.unassigned.len() as u64,
        avg_travel_time_min: per_entry(travel) / 60.0,
        avg_walking_time_min: per_entry(walk) / 60.0,
        avg_in_vehicle_time_min: per_entry(ride) / 60.0,
        connections_per_passenger: per_entry(rides),
        trips_per_passenger: per_entry(boardings),
        journeys_per_passenger: per_entry(journeys),
        connection_units_scanned: result.utilization.iter().sum(),
        connection_units_in_journeys: units_in_journeys,
        multiplier: result.multiplier,
    }
}

/// Writes utilization.csv, journeys.csv, and stats.json into `dir`.
pub fn write_results(
    net: &TransitNetwork,
    demand: &[DemandEntry],
    result: &AssignmentResult,
    dir: &Path,
) -> Result<Stats, IoError> {
    write_file(&dir.join("utilization.csv"), &render_utilization(result))?;
    write_file(&dir.join("journeys.csv"), &render_journeys(result))?;
    let stats = compute_stats(net, demand, result);
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    write_file(&dir.join("stats.json"), &format!("{json}\n"))?;
    Ok(stats)
}

/// Reads utilization.csv back as micro-passengers per connection (the file
/// stores six decimals, so parsing into units of 1e-6 is lossless). Rows must
/// cover connection ids 0.. in order.
pub fn read_utilization(path: &Path) -> Result<Vec<u64>, IoError> {
    let mut next_id = 0u32;
    super::read_csv(
        path,
        "connection_id,expected_passengers",
        |_, _| Ok(()),
        |row| {
            row.expect_len(2)?;
            let id = row.u32(1)?;
            if id != next_id {
                return Err(row.error(format!("expected connection id {next_id}, found {id}")));
            }
            next_id += 1;
            let text = row.get(2);
            let (whole, frac) = text
                .split_once('.')
                .filter(|(_, f)| f.len() == 6 && f.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| {
                    row.field_error(2, format_args!("'{text}': expected six decimal places"))
                })?;
            let whole: u64 = whole
                .parse()
                .map_err(|_| row.field_error(2, format_args!("'{text}': bad integer part")))?;
            let frac: u64 = frac.parse().unwrap();
            whole
                .checked_mul(1_000_000)
                .and_then(|w| w.checked_add(frac))
                .ok_or_else(|| row.field_error(2, format_args!("'{text}': value out of range")))
        },
    )
}

pub fn read_stats(dir: &Path) -> Result<Stats, IoError> {
    let path = dir.join("stats.json");
    let text = std::fs::read_to_string(&path).map_err(|e| IoError::file(&path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::Cache {
        path,
        message: format!("bad stats.json: {e}"),
    })
}
