//! Perceived-arrival-time (PAT) profiles.
//!
//! For a fixed destination, the profile of a stop maps a ready time (walking
//! finished, buffer already elapsed) to the best perceived arrival time over
//! all journeys that start by boarding a vehicle at that stop. Profiles are
//! piecewise linear with slope `-wait_weight` between vehicle departures, so
//! they are stored as breakpoints `(departure, value)` plus a running minimum
//! of `value + wait_weight * departure`; one binary search then answers each
//! evaluation exactly.
//!
//! All profiles for one destination fall out of a single backward sweep over
//! the time-sorted connection array. Each connection is labelled with three
//! values before its own breakpoint is inserted:
//!
//! * `target`: leave the vehicle at the arrival stop and walk to the
//!   destination,
//! * `trip`: stay seated (the label of the trip's next connection),
//! * `transfer`: leave and board some later vehicle, reached either by
//!   waiting in place or via a transfer shortcut walk.
//!
//! Because every transfer option departs strictly after the current
//! connection, the profiles it reads are already complete when the sweep
//! reaches the connection.

use crate::journey::{JourneyRecord, Leg};
use crate::network::{StopId, Time, TransitNetwork, VertexId, UNREACHABLE};
use crate::pat::{Pat, PenaltyParams, Weight};
use crate::shortcuts::ShortcutGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub dep_time: Time,
    pub value: Pat,
    /// `min(value + wait_weight * dep_time)` over this and all later
    /// breakpoints; makes evaluation a single lookup.
    min_adjusted: Pat,
}

/// One stop's profile. Breakpoints are stored in decreasing departure-time
/// order (the insertion order of the backward sweep).
#[derive(Clone, Debug, PartialEq)]
pub struct PatProfile {
    breakpoints: Vec<Breakpoint>,
    wait_weight: Weight,
    /// Perceived cost of walking all the way, excluding the departure offset;
    /// infinity when the profile has no pure-walking option.
    walk_only_offset: Pat,
}

impl PatProfile {
    pub fn new(wait_weight: Weight) -> PatProfile {
        PatProfile {
            breakpoints: Vec::new(),
            wait_weight,
            walk_only_offset: Pat::INFINITY,
        }
    }

    /// Attaches a pure-walking option of the given length. Its contribution
    /// to an evaluation at ready time `t` is `t + walk_cost(seconds)`.
    pub fn with_walk_only(mut self, seconds: u32, params: &PenaltyParams) -> PatProfile {
        self.walk_only_offset = params.walk_cost(seconds);
        self
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    /// Inserts a breakpoint. Departure times must arrive in non-increasing
    /// order; dominated entries (no better than a later departure) are
    /// dropped so the running minimum stays strictly decreasing.
    pub fn insert(&mut self, dep_time: Time, value: Pat) {
        debug_assert!(value.is_finite());
        let adjusted = value.checked_add(self.wait_weight.times_seconds(dep_time.seconds()));
        if let Some(last) = self.breakpoints.last() {
            debug_assert!(last.dep_time >= dep_time, "breakpoints must arrive in decreasing departure order");
            if last.min_adjusted <= adjusted {
                return;
            }
            if last.dep_time == dep_time {
                let prev_min = if self.breakpoints.len() >= 2 {
                    self.breakpoints[self.breakpoints.len() - 2].min_adjusted
                } else {
                    Pat::INFINITY
                };
                let last = self.breakpoints.last_mut().unwrap();
                last.value = value;
                last.min_adjusted = adjusted.min(prev_min);
                return;
            }
        }
        let min_adjusted = self
            .breakpoints
            .last()
            .map_or(Pat::INFINITY, |b| b.min_adjusted)
            .min(adjusted);
        self.breakpoints.push(Breakpoint {
            dep_time,
            value,
            min_adjusted,
        });
    }

    fn evaluate_breakpoints<F>(&self, ready: Time, includes: F) -> Pat
    where
        F: Fn(&Breakpoint) -> bool,
    {
        // Breakpoints are sorted by decreasing departure time, so the
        // catchable ones form a prefix and the last of them carries the
        // prefix minimum.
        let k = self.breakpoints.partition_point(|b| includes(b));
        if k == 0 {
            return Pat::INFINITY;
        }
        self.breakpoints[k - 1]
            .min_adjusted
            .checked_sub(self.wait_weight.times_seconds(ready.seconds()))
    }

    /// Best perceived arrival over departures at or after `ready`, and the
    /// pure-walking option if the profile has one.
    pub fn evaluate(&self, ready: Time) -> Pat {
        let walk = if self.walk_only_offset.is_finite() {
            Pat::from_seconds(ready.seconds()).checked_add(self.walk_only_offset)
        } else {
            Pat::INFINITY
        };
        self.evaluate_breakpoints(ready, |b| b.dep_time >= ready)
            .min(walk)
    }

    /// Like [`Self::evaluate`], but only over departures strictly after
    /// `dep_time`: the value of declining a departure at that instant.
    pub fn evaluate_after(&self, dep_time: Time) -> Pat {
        let walk = if self.walk_only_offset.is_finite() {
            Pat::from_seconds(dep_time.seconds()).checked_add(self.walk_only_offset)
        } else {
            Pat::INFINITY
        };
        self.evaluate_breakpoints(dep_time, |b| b.dep_time > dep_time)
            .min(walk)
    }
}

/// The three perceived arrival times of one connection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionPats {
    /// Remain seated into the trip's next connection.
    pub trip: Pat,
    /// Leave and board a later vehicle (here or after a shortcut walk),
    /// including the flat transfer penalty.
    pub transfer: Pat,
    /// Leave and walk to the destination.
    pub target: Pat,
}

impl ConnectionPats {
    pub const UNREACHABLE: ConnectionPats = ConnectionPats {
        trip: Pat::INFINITY,
        transfer: Pat::INFINITY,
        target: Pat::INFINITY,
    };

    pub fn best(&self) -> Pat {
        self.trip.min(self.transfer).min(self.target)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSet {
    /// Per stop, indexed by stop id.
    pub profiles: Vec<PatProfile>,
    /// Per connection, indexed by position in the sorted connection array.
    pub labels: Vec<ConnectionPats>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProfileError {
    #[error("destination vertex {0} is not part of the walking graph")]
    UnknownDestination(VertexId),
    #[error("connection array is not sorted by departure time")]
    UnsortedConnections,
    #[error("final distance table has {actual} entries, expected one per stop ({expected})")]
    FinalDistanceLength { expected: usize, actual: usize },
}

/// Computes all stop profiles and connection labels for one destination.
///
/// `final_dist[s]` must hold the walking time from stop `s` to the
/// destination (`UNREACHABLE` when there is none).
pub fn compute_profiles(
    net: &TransitNetwork,
    shortcuts: &ShortcutGraph,
    destination: VertexId,
    final_dist: &[u32],
    params: &PenaltyParams,
) -> Result<ProfileSet, ProfileError> {
    if destination as usize >= net.graph.num_vertices() {
        return Err(ProfileError::UnknownDestination(destination));
    }
    if final_dist.len() != net.stops.len() {
        return Err(ProfileError::FinalDistanceLength {
            expected: net.stops.len(),
            actual: final_dist.len(),
        });
    }
    if !net.is_sorted() {
        return Err(ProfileError::UnsortedConnections);
    }

    let mut profiles: Vec<PatProfile> = net
        .stops
        .iter()
        .map(|_| PatProfile::new(params.wait_weight))
        .collect();
    let mut trip_next: Vec<Pat> = vec![Pat::INFINITY; net.trips.len()];
    let mut labels = vec![ConnectionPats::UNREACHABLE; net.connections.len()];

    for pos in (0..net.connections.len()).rev() {
        let c = &net.connections[pos];
        let arr = c.arr_time;

        let fd = final_dist[c.arr_stop as usize];
        let target = if fd != UNREACHABLE {
            Pat::from_seconds(arr.seconds()).checked_add(params.walk_cost(fd))
        } else {
            Pat::INFINITY
        };

        let trip = trip_next[c.trip as usize];

        let mut best_onward = transfer_option(
            &profiles[c.arr_stop as usize],
            arr,
            0,
            net.buffer_time(c.arr_stop),
            params,
        );
        for (to, walk) in shortcuts.from_stop(c.arr_stop) {
            let cand = transfer_option(
                &profiles[to as usize],
                arr,
                walk,
                net.buffer_time(to),
                params,
            );
            best_onward = best_onward.min(cand);
        }
        let transfer = if best_onward.is_finite() {
            params.transfer_penalty.checked_add(best_onward)
        } else {
            Pat::INFINITY
        };

        let pats = ConnectionPats {
            trip,
            transfer,
            target,
        };
        let best = pats.best();
        labels[pos] = pats;
        trip_next[c.trip as usize] = best;
        if best.is_finite() {
            profiles[c.dep_stop as usize].insert(c.dep_time, best);
        }
    }

    Ok(ProfileSet { profiles, labels })
}

/// Perceived arrival of leaving a vehicle at time `arr`, walking `walk`
/// seconds to a stop with the given buffer time, and boarding the best later
/// departure there (transfer penalty not included).
pub fn transfer_option(
    profile: &PatProfile,
    arr: Time,
    walk: u32,
    buffer: u32,
    params: &PenaltyParams,
) -> Pat {
    let ready = arr.plus(walk).plus(buffer);
    let continuation = profile.evaluate(ready);
    if !continuation.is_finite() {
        return Pat::INFINITY;
    }
    continuation
        .checked_add(params.walk_weight.times_seconds(walk))
        .checked_add(params.buffer_weight.times_seconds(buffer))
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum JourneyError {
    #[error("journey references unknown connection {0}")]
    UnknownConnection(u32),
    #[error("journey is malformed: {0}")]
    Malformed(&'static str),
    #[error("journey is infeasible: boarding connection {connection} misses its departure")]
    MissedDeparture { connection: u32 },
}

/// Re-derives the perceived arrival time of a finished journey from first
/// principles: arrival time plus transfer, waiting, walking, and buffer
/// penalties. Also verifies the journey's structural and temporal
/// feasibility, so it doubles as the independent cross-check for the profile
/// machinery.
pub fn pat_of_journey(
    net: &TransitNetwork,
    journey: &JourneyRecord,
    departure: Time,
    params: &PenaltyParams,
) -> Result<Pat, JourneyError> {
    enum Place {
        AtOrigin,
        AtStop { stop: StopId, since: Time },
        Riding { trip: u32, index: u32, arr_stop: StopId, arr_time: Time },
    }

    let mut place = Place::AtOrigin;
    let mut penalties = Pat::ZERO;
    let mut boarded_before = false;
    let mut arrival: Option<Time> = None;

    for leg in &journey.legs {
        if arrival.is_some() {
            return Err(JourneyError::Malformed("legs after reaching the destination"));
        }
        match *leg {
            Leg::WalkToStop { stop, seconds } => {
                if !matches!(place, Place::AtOrigin) {
                    return Err(JourneyError::Malformed("initial walk not at journey start"));
                }
                if stop as usize >= net.stops.len() {
                    return Err(JourneyError::Malformed("initial walk to unknown stop"));
                }
                penalties = penalties.checked_add(params.walk_weight.times_seconds(seconds));
                place = Place::AtStop {
                    stop,
                    since: departure.plus(seconds),
                };
            }
            Leg::DirectWalk { seconds } => {
                if !matches!(place, Place::AtOrigin) {
                    return Err(JourneyError::Malformed("direct walk not at journey start"));
                }
                penalties = penalties.checked_add(params.walk_weight.times_seconds(seconds));
                arrival = Some(departure.plus(seconds));
            }
            Leg::Ride { connection } => {
                let c = net
                    .connection_by_id(connection)
                    .ok_or(JourneyError::UnknownConnection(connection))?;
                let boarding_from = match place {
                    Place::AtOrigin => {
                        return Err(JourneyError::Malformed("riding before reaching a stop"))
                    }
                    Place::AtStop { stop, since } => {
                        if stop != c.dep_stop {
                            return Err(JourneyError::Malformed("boarding at the wrong stop"));
                        }
                        Some(since)
                    }
                    Place::Riding {
                        trip,
                        index,
                        arr_stop,
                        arr_time,
                    } => {
                        if trip == c.trip && c.index_in_trip == index + 1 {
                            None // stay seated, no boarding
                        } else if arr_stop == c.dep_stop {
                            Some(arr_time) // leave and re-board in place
                        } else {
                            return Err(JourneyError::Malformed(
                                "transfer between stops without a walk leg",
                            ));
                        }
                    }
                };
                if let Some(since) = boarding_from {
                    let buffer = net.buffer_time(c.dep_stop);
                    let ready = since.seconds() as u64 + buffer as u64;
                    if ready > c.dep_time.seconds() as u64 {
                        return Err(JourneyError::MissedDeparture { connection });
                    }
                    let wait = c.dep_time.seconds() - since.seconds() - buffer;
                    penalties = penalties
                        .checked_add(params.wait_weight.times_seconds(wait))
                        .checked_add(params.buffer_weight.times_seconds(buffer));
                    if boarded_before {
                        penalties = penalties.checked_add(params.transfer_penalty);
                    }
                    boarded_before = true;
                }
                place = Place::Riding {
                    trip: c.trip,
                    index: c.index_in_trip,
                    arr_stop: c.arr_stop,
                    arr_time: c.arr_time,
                };
            }
            Leg::TransferWalk { from, to, seconds } => {
                let Place::Riding {
                    arr_stop, arr_time, ..
                } = place
                else {
                    return Err(JourneyError::Malformed("transfer walk while not riding"));
                };
                if arr_stop != from || to as usize >= net.stops.len() {
                    return Err(JourneyError::Malformed("transfer walk from the wrong stop"));
                }
                penalties = penalties.checked_add(params.walk_weight.times_seconds(seconds));
                place = Place::AtStop {
                    stop: to,
                    since: arr_time.plus(seconds),
                };
            }
            Leg::WalkToDestination { from, seconds } => {
                let Place::Riding {
                    arr_stop, arr_time, ..
                } = place
                else {
                    return Err(JourneyError::Malformed("final walk while not riding"));
                };
                if arr_stop != from {
                    return Err(JourneyError::Malformed("final walk from the wrong stop"));
                }
                penalties = penalties.checked_add(params.walk_weight.times_seconds(seconds));
                arrival = Some(arr_time.plus(seconds));
            }
        }
    }

    let arrival = arrival.ok_or(JourneyError::Malformed("journey never reaches the destination"))?;
    Ok(Pat::from_seconds(arrival.seconds()).checked_add(penalties))
}
