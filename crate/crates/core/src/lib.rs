//! Simulation-based traffic assignment for multi-modal public transit.
//!
//! Given a timetable, a walking graph, and origin/destination demand, the
//! engine distributes passengers over journeys by replaying their travel
//! decisions: for every destination it first derives perceived-arrival-time
//! profiles with a backward sweep over the connection array, then simulates
//! passenger groups forward through the same array, rolling dice at every
//! boarding, alighting, and transfer decision. Walking legs are answered by a
//! contraction-hierarchy index so that arbitrary walking graphs stay cheap to
//! query.
//!
//! The crate is organized bottom-up:
//!
//! * [`pat`]: fixed-point perceived-arrival-time arithmetic and penalties,
//! * [`network`]: timetable, walking graph, zones, validation,
//! * [`walk`]: Dijkstra, contraction hierarchies, many-to-many indices,
//! * [`shortcuts`]: precomputed stop-to-stop transfer walks,
//! * [`profiles`]: backward PAT profile computation,
//! * [`choice`]: gains and decision models,
//! * [`journey`]: journey records,
//! * [`assignment`]: the forward simulation itself,
//! * [`io`]: file formats, configuration, caching.

pub mod assignment;
pub mod choice;
pub mod io;
pub mod journey;
pub mod network;
pub mod pat;
pub mod profiles;
pub mod shortcuts;
pub mod walk;

#[cfg(feature = "oracle")]
pub mod oracle;
