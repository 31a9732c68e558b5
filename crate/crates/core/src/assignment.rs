//! The forward simulation: routing passenger groups through the network.
//!
//! Demand is partitioned by destination. Each destination batch computes the
//! PAT profiles once, places one passenger group of `multiplier` units per
//! demand entry, and then replays the connection array in departure order.
//! At every connection the groups involved face up to four decisions (board,
//! disembark, walk to the destination, pick a transfer stop); each decision
//! splits the group according to the probabilities of the configured model.
//! The deterministic part of a split is a floor division, only the leftover
//! units draw random numbers, and those come from a counter-based generator
//! seeded by `(seed, demand id)`, so results are reproducible bit for bit no
//! matter how batches are scheduled across threads.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::choice::{compute_gains, probabilities, ChoiceError, ModelConfig};
use crate::journey::{JourneyRecord, Leg};
use crate::network::{ConnectionId, StopId, Time, TransitNetwork, VertexId, UNREACHABLE};
use crate::pat::{Pat, PenaltyParams};
use crate::profiles::{
    compute_profiles, transfer_option, PatProfile, ProfileError, ProfileSet,
};
use crate::shortcuts::{compute_shortcuts, ShortcutGraph};
use crate::walk::{build_ch, build_core, BucketIndex, ContractionHierarchy, CoreGraph, DistanceList, WalkError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DemandEntry {
    pub id: u32,
    /// Any walking-graph vertex; zone demand uses the zone's source vertex.
    pub origin: VertexId,
    /// Any walking-graph vertex; zone demand uses the zone's sink vertex.
    pub destination: VertexId,
    pub dep_time: Time,
}

#[derive(Clone, Copy, Debug)]
pub struct EngineParams {
    pub penalties: PenaltyParams,
    /// Units per passenger group; utilization comes out in 1/multiplier
    /// passenger steps.
    pub multiplier: u32,
    pub model: ModelConfig,
    pub seed: u64,
    pub remove_cycles: bool,
}

impl EngineParams {
    fn validate(&self) -> Result<(), EngineError> {
        if self.multiplier == 0 {
            return Err(EngineError::InvalidMultiplier);
        }
        if self.penalties.delay_tolerance <= Pat::ZERO {
            return Err(EngineError::InvalidDelayTolerance);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PreprocessOptions {
    /// Core contraction stops before the average core degree exceeds this.
    pub avg_degree_limit: f64,
    /// Longest transfer walk worth considering, in seconds.
    pub max_transfer_time: u32,
}

impl Default for PreprocessOptions {
    fn default() -> PreprocessOptions {
        PreprocessOptions {
            avg_degree_limit: 16.0,
            max_transfer_time: 3600,
        }
    }
}

/// Everything the assignment needs that only depends on the network: the
/// walking index (CH + buckets), the partially contracted core, and the
/// transfer shortcut set.
#[derive(Clone, Debug)]
pub struct PreprocessedData {
    pub ch: ContractionHierarchy,
    pub core: CoreGraph,
    pub shortcuts: ShortcutGraph,
    pub buckets: BucketIndex,
}

/// Builds all preprocessing artifacts. Zones must already be integrated into
/// the walking graph, since the index answers queries for zone vertices too.
pub fn preprocess(
    net: &TransitNetwork,
    options: &PreprocessOptions,
) -> Result<PreprocessedData, EngineError> {
    let ch = build_ch(&net.graph);
    let keep: Vec<VertexId> = net.stops.iter().map(|s| s.vertex).collect();
    let core = build_core(&net.graph, &keep, options.avg_degree_limit)?;
    let shortcuts = compute_shortcuts(net, &core, options.max_transfer_time);
    let stop_vertices: Vec<(StopId, VertexId)> = net
        .stops
        .iter()
        .enumerate()
        .map(|(s, stop)| (s as StopId, stop.vertex))
        .collect();
    let buckets = BucketIndex::build(&ch, &stop_vertices);
    Ok(PreprocessedData {
        ch,
        core,
        shortcuts,
        buckets,
    })
}

/// One journey of a demand entry together with the group units that took it;
/// its probability is `units / multiplier`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignedJourney {
    pub record: JourneyRecord,
    pub units: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryJourneys {
    pub demand_id: u32,
    pub journeys: Vec<AssignedJourney>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentResult {
    /// Group units per connection id, recorded while scanning (before any
    /// cycle removal). Real passengers = units / multiplier.
    pub utilization: Vec<u64>,
    /// Per demand entry, sorted by demand id. Journeys within an entry are
    /// aggregated: identical records are merged with their units summed.
    pub journeys: Vec<EntryJourneys>,
    /// Demand ids with an empty initial choice set, sorted.
    pub unassigned: Vec<u32>,
    pub multiplier: u32,
}

impl AssignmentResult {
    /// Expected passengers on a connection.
    pub fn utilization_of(&self, connection: ConnectionId) -> f64 {
        self.utilization[connection as usize] as f64 / self.multiplier as f64
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    /// Distance lists and demand batching.
    pub setup: Duration,
    /// Backward profile sweeps, summed over batches.
    pub profiles: Duration,
    /// Forward simulation, summed over batches.
    pub simulation: Duration,
    /// Cycle removal and journey aggregation.
    pub cycle_removal: Duration,
}

#[derive(Clone, Debug)]
pub struct AssignmentRun {
    pub result: AssignmentResult,
    pub timings: PhaseTimings,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EngineError {
    #[error("passenger multiplier must be at least 1")]
    InvalidMultiplier,
    #[error("delay tolerance must be positive")]
    InvalidDelayTolerance,
    #[error("demand is empty")]
    EmptyDemand,
    #[error("duplicate demand entry id {0}")]
    DuplicateDemandId(u32),
    #[error("preprocessing artifacts do not match the network")]
    ArtifactMismatch,
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// Counter-based random source for one demand entry. Every decision advances
/// the counter; the value sequence depends only on `(seed, demand_id)`, never
/// on scheduling.
#[derive(Clone, Debug)]
pub struct DecisionRng {
    base: u64,
    counter: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl DecisionRng {
    pub fn new(seed: u64, demand_id: u32) -> DecisionRng {
        DecisionRng {
            base: splitmix64(seed ^ splitmix64(demand_id as u64)),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = splitmix64(
            self.base
                .wrapping_add(self.counter.wrapping_mul(0x9E3779B97F4A7C15)),
        );
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Number of random values drawn so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }
}

/// Splits `units` over the options: option `i` first receives
/// `floor(units * probs[i])`, then each leftover unit is sampled
/// individually. The returned sizes always sum to `units`.
pub fn split_group(units: u64, probs: &[f64], rng: &mut DecisionRng) -> Vec<u64> {
    let mut sizes: Vec<u64> = probs
        .iter()
        .map(|&p| (units as f64 * p).floor() as u64)
        .collect();
    let mut assigned: u64 = sizes.iter().sum();
    // Probabilities sum to 1 only within tolerance; if rounding ever pushed
    // the floors past the total, trim the largest shares back.
    while assigned > units {
        let i = (0..sizes.len()).max_by_key(|&i| sizes[i]).unwrap();
        sizes[i] -= 1;
        assigned -= 1;
    }
    for _ in assigned..units {
        let draw = rng.next_f64();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (i, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            chosen = Some(i);
            cumulative += p;
            if draw < cumulative {
                break;
            }
        }
        sizes[chosen.expect("at least one positive probability")] += 1;
    }
    sizes
}

/// Gains, probabilities, and the split for one decision.
fn split_by_choice(
    units: u64,
    pats: &[Pat],
    params: &EngineParams,
    rng: &mut DecisionRng,
) -> Result<Vec<u64>, EngineError> {
    let gains = compute_gains(pats, params.penalties.delay_tolerance)?;
    let probs = probabilities(&gains, &params.model)?;
    Ok(split_group(units, &probs, rng))
}

/// One way to start a journey: walk to a stop and wait there, or walk all
/// the way to the destination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialOption {
    Board { stop: StopId, walk: u32, pat: Pat },
    DirectWalk { walk: u32, pat: Pat },
}

impl InitialOption {
    pub fn pat(&self) -> Pat {
        match *self {
            InitialOption::Board { pat, .. } | InitialOption::DirectWalk { pat, .. } => pat,
        }
    }
}

/// Collects the initial choice set of one demand entry from its sorted
/// stop-distance list.
///
/// The scan stops early: `dep_time + dist + walk_weight * dist` is a lower
/// bound on any option at that or a later tuple, so once it exceeds the best
/// PAT so far by more than the delay tolerance, every remaining option would
/// be eliminated anyway. The direct walk to the destination (when one
/// exists, `direct_walk` in seconds) seeds the bound and joins the set last.
/// An empty result means the entry cannot reach the destination at all.
pub fn evaluate_initial_transfers(
    entry: &DemandEntry,
    list: &DistanceList,
    profiles: &[PatProfile],
    net: &TransitNetwork,
    direct_walk: u32,
    params: &PenaltyParams,
) -> Vec<InitialOption> {
    let mut options = Vec::new();
    let direct = if direct_walk != UNREACHABLE {
        Pat::from_seconds(entry.dep_time.seconds()).checked_add(params.walk_cost(direct_walk))
    } else {
        Pat::INFINITY
    };
    let mut best = direct;
    for &(stop, dist) in &list.entries {
        let lower = Pat::from_seconds(entry.dep_time.plus(dist).seconds())
            .checked_add(params.walk_weight.times_seconds(dist));
        if lower > best.checked_add(params.delay_tolerance) {
            break;
        }
        let pat = transfer_option(
            &profiles[stop as usize],
            entry.dep_time,
            dist,
            net.buffer_time(stop),
            params,
        );
        if pat.is_finite() {
            best = best.min(pat);
            options.push(InitialOption::Board {
                stop,
                walk: dist,
                pat,
            });
        }
    }
    if direct.is_finite() {
        options.push(InitialOption::DirectWalk {
            walk: direct_walk,
            pat: direct,
        });
    }
    options
}

/// Strips repeated stop visits from a journey: as long as some stop is
/// visited twice, every leg after its first visit up to and including its
/// last visit is excised. The `arr_stop_of` closure resolves connection ids
/// to their arrival stops.
pub fn remove_cycles(
    mut journey: JourneyRecord,
    arr_stop_of: &dyn Fn(ConnectionId) -> StopId,
) -> JourneyRecord {
    loop {
        let visits = journey.stop_visits(arr_stop_of);
        let mut cut = None;
        'search: for i in 0..visits.len() {
            for j in (i + 1..visits.len()).rev() {
                if visits[j].0 == visits[i].0 {
                    cut = Some((visits[i].1, visits[j].1));
                    break 'search;
                }
            }
        }
        let Some((keep_to, cut_to)) = cut else {
            return journey;
        };
        journey.legs = journey
            .legs
            .into_iter()
            .enumerate()
            .filter(|&(idx, _)| idx <= keep_to || idx > cut_to)
            .map(|(_, leg)| leg)
            .collect();
    }
}

struct Group {
    slot: usize,
    units: u64,
    journey: JourneyRecord,
}

struct BatchOutcome {
    utilization: Vec<u64>,
    /// Per demand index: raw journeys with units, pre cycle removal.
    journeys: Vec<(usize, Vec<(JourneyRecord, u64)>)>,
    unassigned: Vec<u32>,
    profile_time: Duration,
    sim_time: Duration,
}

/// Runs the whole assignment: batches the demand by destination, computes
/// profiles and simulates each batch (in parallel), merges utilization and
/// journeys, and optionally removes cycles from the recorded journeys.
pub fn run_assignment(
    net: &TransitNetwork,
    pre: &PreprocessedData,
    demand: &[DemandEntry],
    params: &EngineParams,
) -> Result<AssignmentRun, EngineError> {
    params.validate()?;
    if demand.is_empty() {
        return Err(EngineError::EmptyDemand);
    }
    if pre.ch.num_vertices() != net.graph.num_vertices() {
        return Err(EngineError::ArtifactMismatch);
    }
    if !net.is_sorted() {
        return Err(EngineError::Profile(ProfileError::UnsortedConnections));
    }
    let num_vertices = net.graph.num_vertices();
    let mut seen = std::collections::HashSet::with_capacity(demand.len());
    for entry in demand {
        if !seen.insert(entry.id) {
            return Err(EngineError::DuplicateDemandId(entry.id));
        }
        if entry.origin as usize >= num_vertices {
            return Err(EngineError::Walk(WalkError::UnknownVertex(entry.origin)));
        }
        if entry.destination as usize >= num_vertices {
            return Err(EngineError::Walk(WalkError::UnknownVertex(
                entry.destination,
            )));
        }
    }

    let setup_start = Instant::now();
    let mut origins: Vec<VertexId> = demand.iter().map(|e| e.origin).collect();
    origins.sort_unstable();
    origins.dedup();
    let lists: HashMap<VertexId, DistanceList> = origins
        .par_iter()
        .map(|&o| DistanceList::build(&pre.buckets, &pre.ch, o).map(|l| (o, l)))
        .collect::<Result<_, _>>()?;

    let mut order: Vec<usize> = (0..demand.len()).collect();
    order.sort_unstable_by_key(|&i| {
        let e = &demand[i];
        (e.destination, e.origin, e.dep_time, e.id)
    });
    let mut batches: Vec<(VertexId, Vec<usize>)> = Vec::new();
    for idx in order {
        let d = demand[idx].destination;
        match batches.last_mut() {
            Some((dest, members)) if *dest == d => members.push(idx),
            _ => batches.push((d, vec![idx])),
        }
    }
    let setup = setup_start.elapsed();

    let outcomes: Vec<BatchOutcome> = batches
        .par_iter()
        .map(|(destination, members)| {
            simulate_destination(net, pre, params, *destination, members, demand, &lists)
        })
        .collect::<Result<_, _>>()?;

    let mut utilization = vec![0u64; net.connections.len()];
    let mut raw: Vec<(usize, Vec<(JourneyRecord, u64)>)> = Vec::with_capacity(demand.len());
    let mut unassigned = Vec::new();
    let mut profiles_time = Duration::ZERO;
    let mut sim_time = Duration::ZERO;
    for outcome in outcomes {
        for (i, u) in outcome.utilization.into_iter().enumerate() {
            utilization[i] += u;
        }
        raw.extend(outcome.journeys);
        unassigned.extend(outcome.unassigned);
        profiles_time += outcome.profile_time;
        sim_time += outcome.sim_time;
    }
    unassigned.sort_unstable();

    let cycle_start = Instant::now();
    let arr_stop_of = |c: ConnectionId| {
        net.connection_by_id(c)
            .expect("journeys only reference scanned connections")
            .arr_stop
    };
    let mut journeys: Vec<EntryJourneys> = raw
        .into_iter()
        .map(|(idx, list)| {
            let total: u64 = list.iter().map(|&(_, u)| u).sum();
            assert_eq!(
                total,
                params.multiplier as u64,
                "group units of entry {} must be conserved",
                demand[idx].id
            );
            let mut processed: Vec<(JourneyRecord, u64)> = list
                .into_iter()
                .map(|(j, u)| {
                    if params.remove_cycles {
                        (remove_cycles(j, &arr_stop_of), u)
                    } else {
                        (j, u)
                    }
                })
                .collect();
            processed.sort_unstable_by(|a, b| a.0.legs.cmp(&b.0.legs));
            let mut aggregated: Vec<AssignedJourney> = Vec::new();
            for (record, units) in processed {
                match aggregated.last_mut() {
                    Some(last) if last.record == record => last.units += units,
                    _ => aggregated.push(AssignedJourney { record, units }),
                }
            }
            EntryJourneys {
                demand_id: demand[idx].id,
                journeys: aggregated,
            }
        })
        .collect();
    journeys.sort_unstable_by_key(|e| e.demand_id);
    let cycle_removal = cycle_start.elapsed();

    Ok(AssignmentRun {
        result: AssignmentResult {
            utilization,
            journeys,
            unassigned,
            multiplier: params.multiplier,
        },
        timings: PhaseTimings {
            setup,
            profiles: profiles_time,
            simulation: sim_time,
            cycle_removal,
        },
    })
}

fn simulate_destination(
    net: &TransitNetwork,
    pre: &PreprocessedData,
    params: &EngineParams,
    destination: VertexId,
    members: &[usize],
    demand: &[DemandEntry],
    lists: &HashMap<VertexId, DistanceList>,
) -> Result<BatchOutcome, EngineError> {
    let profile_start = Instant::now();
    let mut final_dist = vec![UNREACHABLE; net.stops.len()];
    for (stop, d) in pre.buckets.distances_to(&pre.ch, destination)? {
        final_dist[stop as usize] = d;
    }
    let set: ProfileSet = compute_profiles(
        net,
        &pre.shortcuts,
        destination,
        &final_dist,
        &params.penalties,
    )?;
    let profile_time = profile_start.elapsed();

    let sim_start = Instant::now();
    let mut rngs: Vec<DecisionRng> = Vec::with_capacity(members.len());
    let mut done: Vec<Vec<(JourneyRecord, u64)>> = vec![Vec::new(); members.len()];
    let mut waiting: Vec<Vec<(Group, Time)>> =
        std::iter::repeat_with(Vec::new).take(net.stops.len()).collect();
    let mut riding: Vec<Vec<Group>> =
        std::iter::repeat_with(Vec::new).take(net.trips.len()).collect();
    let mut unassigned = Vec::new();
    let mut assigned_slots = Vec::new();

    for (slot, &idx) in members.iter().enumerate() {
        let entry = &demand[idx];
        let mut rng = DecisionRng::new(params.seed, entry.id);
        let list = &lists[&entry.origin];
        let direct = pre.ch.query(entry.origin, destination)?;
        let options =
            evaluate_initial_transfers(entry, list, &set.profiles, net, direct, &params.penalties);
        if options.is_empty() {
            unassigned.push(entry.id);
            rngs.push(rng);
            continue;
        }
        assigned_slots.push(slot);
        let pats: Vec<Pat> = options.iter().map(|o| o.pat()).collect();
        let sizes = split_by_choice(params.multiplier as u64, &pats, params, &mut rng)?;
        for (option, units) in options.iter().zip(sizes) {
            if units == 0 {
                continue;
            }
            match *option {
                InitialOption::Board { stop, walk, .. } => {
                    let mut journey = JourneyRecord::new();
                    journey.push(Leg::WalkToStop {
                        stop,
                        seconds: walk,
                    });
                    let ready = entry
                        .dep_time
                        .plus(walk)
                        .plus(net.buffer_time(stop));
                    waiting[stop as usize].push((
                        Group {
                            slot,
                            units,
                            journey,
                        },
                        ready,
                    ));
                }
                InitialOption::DirectWalk { walk, .. } => {
                    let mut journey = JourneyRecord::new();
                    journey.push(Leg::DirectWalk { seconds: walk });
                    done[slot].push((journey, units));
                }
            }
        }
        rngs.push(rng);
    }

    let mut utilization = vec![0u64; net.connections.len()];
    for (pos, c) in net.connections.iter().enumerate() {
        let labels = set.labels[pos];
        let board = labels.best();

        // Boarding decision. Groups that are not ready yet stay put; when
        // the connection leads nowhere the decision is skipped entirely and
        // everyone keeps waiting for a later departure.
        if board.is_finite() && !waiting[c.dep_stop as usize].is_empty() {
            let wait = set.profiles[c.dep_stop as usize].evaluate_after(c.dep_time);
            let queue = std::mem::take(&mut waiting[c.dep_stop as usize]);
            let mut keep = Vec::with_capacity(queue.len());
            for (group, ready) in queue {
                if ready > c.dep_time {
                    keep.push((group, ready));
                    continue;
                }
                let sizes =
                    split_by_choice(group.units, &[board, wait], params, &mut rngs[group.slot])?;
                if sizes[0] > 0 {
                    riding[c.trip as usize].push(Group {
                        slot: group.slot,
                        units: sizes[0],
                        journey: group.journey.clone(),
                    });
                }
                if sizes[1] > 0 {
                    keep.push((
                        Group {
                            slot: group.slot,
                            units: sizes[1],
                            journey: group.journey,
                        },
                        ready,
                    ));
                }
            }
            waiting[c.dep_stop as usize] = keep;
        }

        let aboard = std::mem::take(&mut riding[c.trip as usize]);
        if aboard.is_empty() {
            continue;
        }
        utilization[c.id as usize] += aboard.iter().map(|g| g.units).sum::<u64>();

        let leave = labels.transfer.min(labels.target);
        let arr_buffer = net.buffer_time(c.arr_stop);
        let mut stay = Vec::with_capacity(aboard.len());
        for mut group in aboard {
            group.journey.push(Leg::Ride { connection: c.id });

            // Disembark-or-stay, then (for leavers) destination-or-transfer,
            // then the transfer target. Option order is fixed, so ties under
            // the optimal model resolve the same way everywhere.
            let rng = &mut rngs[group.slot];
            let sizes = split_by_choice(group.units, &[labels.trip, leave], params, rng)?;
            if sizes[0] > 0 {
                stay.push(Group {
                    slot: group.slot,
                    units: sizes[0],
                    journey: group.journey.clone(),
                });
            }
            if sizes[1] == 0 {
                continue;
            }
            let leavers = sizes[1];
            let sizes = split_by_choice(
                leavers,
                &[labels.target, labels.transfer],
                params,
                &mut rngs[group.slot],
            )?;
            if sizes[0] > 0 {
                let mut journey = group.journey.clone();
                journey.push(Leg::WalkToDestination {
                    from: c.arr_stop,
                    seconds: final_dist[c.arr_stop as usize],
                });
                done[group.slot].push((journey, sizes[0]));
            }
            if sizes[1] == 0 {
                continue;
            }
            let transferring = sizes[1];

            // Transfer target choice: wait where we are, or take a shortcut
            // walk. The flat transfer penalty is common to every option and
            // cancels out of the gains, so it is left off here.
            let mut targets: Vec<(StopId, u32)> = Vec::with_capacity(8);
            targets.push((c.arr_stop, 0));
            targets.extend(pre.shortcuts.from_stop(c.arr_stop));
            let pats: Vec<Pat> = targets
                .iter()
                .map(|&(to, walk)| {
                    transfer_option(
                        &set.profiles[to as usize],
                        c.arr_time,
                        walk,
                        if to == c.arr_stop {
                            arr_buffer
                        } else {
                            net.buffer_time(to)
                        },
                        &params.penalties,
                    )
                })
                .collect();
            let sizes = split_by_choice(transferring, &pats, params, &mut rngs[group.slot])?;
            for (&(to, walk), units) in targets.iter().zip(sizes) {
                if units == 0 {
                    continue;
                }
                let mut journey = group.journey.clone();
                if to != c.arr_stop {
                    journey.push(Leg::TransferWalk {
                        from: c.arr_stop,
                        to,
                        seconds: walk,
                    });
                }
                let ready = c.arr_time.plus(walk).plus(net.buffer_time(to));
                waiting[to as usize].push((
                    Group {
                        slot: group.slot,
                        units,
                        journey,
                    },
                    ready,
                ));
            }
        }
        riding[c.trip as usize] = stay;
    }

    assert!(
        waiting.iter().all(Vec::is_empty) && riding.iter().all(Vec::is_empty),
        "every group must reach the destination once placed"
    );
    let sim_time = sim_start.elapsed();

    Ok(BatchOutcome {
        utilization,
        journeys: assigned_slots
            .into_iter()
            .map(|slot| (members[slot], std::mem::take(&mut done[slot])))
            .collect(),
        unassigned,
        profile_time,
        sim_time,
    })
}
