//! Journey records: the leg-by-leg description of one way to travel from a
//! demand entry's origin to its destination.

use crate::network::{ConnectionId, StopId};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Leg {
    /// Walk from the origin vertex to a stop.
    WalkToStop { stop: StopId, seconds: u32 },
    /// Ride one connection (referenced by its input id).
    Ride { connection: ConnectionId },
    /// Walk between two stops during a transfer.
    TransferWalk {
        from: StopId,
        to: StopId,
        seconds: u32,
    },
    /// Walk from the final stop to the destination vertex.
    WalkToDestination { from: StopId, seconds: u32 },
    /// Walk the whole way, never boarding a vehicle.
    DirectWalk { seconds: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct JourneyRecord {
    pub legs: Vec<Leg>,
}

impl JourneyRecord {
    pub fn new() -> JourneyRecord {
        JourneyRecord::default()
    }

    pub fn push(&mut self, leg: Leg) {
        self.legs.push(leg);
    }

    /// Stop visits in travel order: the initial stop, then every connection
    /// arrival and transfer-walk target. Pure walking journeys visit nothing.
    pub fn stop_visits<'a>(
        &'a self,
        arr_stop_of: &'a dyn Fn(ConnectionId) -> StopId,
    ) -> Vec<(StopId, usize)> {
        let mut visits = Vec::new();
        for (idx, leg) in self.legs.iter().enumerate() {
            match *leg {
                Leg::WalkToStop { stop, .. } => visits.push((stop, idx)),
                Leg::Ride { connection } => visits.push((arr_stop_of(connection), idx)),
                Leg::TransferWalk { to, .. } => visits.push((to, idx)),
                Leg::WalkToDestination { .. } | Leg::DirectWalk { .. } => {}
            }
        }
        visits
    }

    pub fn num_rides(&self) -> usize {
        self.legs
            .iter()
            .filter(|l| matches!(l, Leg::Ride { .. }))
            .count()
    }

    pub fn walk_seconds(&self) -> u64 {
        self.legs
            .iter()
            .map(|l| match *l {
                Leg::WalkToStop { seconds, .. }
                | Leg::TransferWalk { seconds, .. }
                | Leg::WalkToDestination { seconds, .. }
                | Leg::DirectWalk { seconds } => seconds as u64,
                Leg::Ride { .. } => 0,
            })
            .sum()
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Leg::WalkToStop { stop, seconds } => write!(f, "iw:{stop}:{seconds}"),
            Leg::Ride { connection } => write!(f, "c:{connection}"),
            Leg::TransferWalk { from, to, seconds } => write!(f, "tw:{from}:{to}:{seconds}"),
            Leg::WalkToDestination { from, seconds } => write!(f, "fw:{from}:{seconds}"),
            Leg::DirectWalk { seconds } => write!(f, "dw:{seconds}"),
        }
    }
}

impl fmt::Display for JourneyRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, leg) in self.legs.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{leg}")?;
        }
        Ok(())
    }
}
