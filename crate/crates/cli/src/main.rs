//! Command line front end: orchestrates preprocessing, assignment,
//! validation, and exports around the core engine. All run settings live in
//! a TOML config; every flag overrides its config counterpart.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use transit_assign_core::assignment::{
    run_assignment, AssignmentResult, PhaseTimings, PreprocessOptions, PreprocessedData,
};
use transit_assign_core::io::cache::{load_cache, save_cache, CacheLoad};
use transit_assign_core::io::config::{load_config, Config};
use transit_assign_core::io::demand::load_demand;
use transit_assign_core::io::geojson::export_geojson;
use transit_assign_core::io::network_io::{load_network, LoadedNetwork};
use transit_assign_core::io::results::{read_stats, read_utilization, write_results};
use transit_assign_core::network::{integrate_zones, TransitNetwork, VertexId};
use transit_assign_core::shortcuts::compute_shortcuts;
use transit_assign_core::walk::{build_ch, build_core, BucketIndex};

#[derive(Parser)]
#[command(
    name = "transit-assign",
    version,
    about = "Simulation-based traffic assignment for public transit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and cache the walking-graph artifacts for the configured network.
    Preprocess {
        /// Run configuration (TOML). Relative paths resolve next to the file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Assign the demand onto the network and write result files.
    Assign(AssignArgs),
    /// Load the network and demand, reporting any structural violations.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Export per-connection loads as GeoJSON (needs stop coordinates and a
    /// prior `assign`).
    ExportGeojson {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the summary statistics of an existing result directory.
    Stats {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct AssignArgs {
    /// Run configuration (TOML). Relative paths resolve next to the file.
    #[arg(long)]
    config: PathBuf,
    /// Decision model: linear, logit, kirchhoff, or optimal.
    #[arg(long)]
    model: Option<String>,
    /// Tuning exponent for logit and kirchhoff.
    #[arg(long)]
    beta: Option<f64>,
    /// Seconds of perceived delay passengers tolerate over the best option.
    #[arg(long)]
    delay_tolerance: Option<u32>,
    /// Group units per passenger; utilization resolves to 1/multiplier steps.
    #[arg(long)]
    multiplier: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for destination batches (default: logical cores).
    /// Never changes results, only wall time.
    #[arg(long)]
    threads: Option<usize>,
    /// Keep loops in journeys instead of excising them.
    #[arg(long)]
    no_cycle_removal: bool,
    /// Build missing preprocessing artifacts instead of failing.
    #[arg(long)]
    auto_preprocess: bool,
    /// Print phase timings as one JSON line.
    #[arg(long)]
    timing_json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Preprocess { config } => cmd_preprocess(&config),
        Command::Assign(args) => cmd_assign(args),
        Command::Validate { config } => cmd_validate(&config),
        Command::ExportGeojson { config } => cmd_export_geojson(&config),
        Command::Stats { config } => cmd_stats(&config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Loads the config and resolves its relative paths against the config
/// file's directory, so a run directory stays relocatable.
fn load_rebased_config(config_path: &Path) -> Result<Config> {
    let mut config = load_config(config_path)
        .with_context(|| format!("load config {}", config_path.display()))?;
    if let Some(base) = config_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        rebase(&mut config.paths.network);
        rebase(&mut config.paths.demand);
        rebase(&mut config.paths.output);
        if let Some(cache) = config.paths.cache.as_mut() {
            rebase(cache);
        }
    }
    Ok(config)
}

struct Inputs {
    config: Config,
    /// Stop coordinates from the network files, for exports.
    coordinates: Vec<Option<(f64, f64)>>,
    /// Network with zone vertices integrated; everything downstream uses it.
    net: TransitNetwork,
}

fn load_inputs(config_path: &Path) -> Result<Inputs> {
    let config = load_rebased_config(config_path)?;
    let LoadedNetwork { net, coordinates } = load_network(&config.paths.network)
        .with_context(|| format!("load network from {}", config.paths.network.display()))?;
    let net = integrate_zones(net).context("integrate zones")?;
    Ok(Inputs {
        config,
        coordinates,
        net,
    })
}

/// The artifact cache file. `TRANSIT_ASSIGN_CACHE` overrides the directory.
fn cache_file(config: &Config) -> PathBuf {
    std::env::var_os("TRANSIT_ASSIGN_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|| config.cache_dir())
        .join("preprocessed.bin")
}

fn build_artifacts(
    net: &TransitNetwork,
    options: &PreprocessOptions,
) -> Result<(PreprocessedData, Vec<(&'static str, Duration)>)> {
    let mut stages = Vec::new();
    let t = Instant::now();
    let ch = build_ch(&net.graph);
    stages.push(("contraction hierarchy", t.elapsed()));

    let keep: Vec<VertexId> = net.stops.iter().map(|s| s.vertex).collect();
    let t = Instant::now();
    let core = build_core(&net.graph, &keep, options.avg_degree_limit)?;
    stages.push(("core graph", t.elapsed()));

    let t = Instant::now();
    let shortcuts = compute_shortcuts(net, &core, options.max_transfer_time);
    stages.push(("transfer shortcuts", t.elapsed()));

    let t = Instant::now();
    let stop_vertices: Vec<(u32, VertexId)> = net
        .stops
        .iter()
        .enumerate()
        .map(|(s, stop)| (s as u32, stop.vertex))
        .collect();
    let buckets = BucketIndex::build(&ch, &stop_vertices);
    stages.push(("bucket index", t.elapsed()));

    Ok((
        PreprocessedData {
            ch,
            core,
            shortcuts,
            buckets,
        },
        stages,
    ))
}

/// Every precomputed transfer walk must equal the exact point-to-point
/// distance; anything else would silently skew the assignment.
fn self_check(net: &TransitNetwork, data: &PreprocessedData) -> Result<()> {
    for &(from, to, walk) in data.shortcuts.edges() {
        let exact = data.ch.query(
            net.stops[from as usize].vertex,
            net.stops[to as usize].vertex,
        )?;
        if exact != walk {
            bail!("self-check failed: transfer walk {from}->{to} stores {walk}s, exact is {exact}s");
        }
    }
    Ok(())
}

fn cmd_preprocess(config_path: &Path) -> Result<()> {
    let inputs = load_inputs(config_path)?;
    let options = inputs.config.preprocess_options();
    let path = cache_file(&inputs.config);
    match load_cache(&path, &inputs.net, &options) {
        CacheLoad::Hit(_) => {
            println!("cache hit: {} is up to date", path.display());
            return Ok(());
        }
        CacheLoad::Damaged(msg) => {
            eprintln!(
                "warning: cache {} is damaged ({msg}); rebuilding",
                path.display()
            );
        }
        CacheLoad::Stale => println!("cache is stale; rebuilding"),
        CacheLoad::NoFile => {}
    }

    let (data, stages) = build_artifacts(&inputs.net, &options)?;
    self_check(&inputs.net, &data)?;
    save_cache(&path, &inputs.net, &options, &data)
        .with_context(|| format!("write cache {}", path.display()))?;

    for (name, took) in &stages {
        println!("{name}: {took:.1?}");
    }
    println!(
        "preprocessed {} vertices ({} core), {} transfer shortcuts (all self-checked); cached at {}",
        inputs.net.graph.num_vertices(),
        data.core.num_core_vertices(),
        data.shortcuts.edges().len(),
        path.display()
    );
    Ok(())
}

fn obtain_artifacts(
    inputs: &Inputs,
    options: &PreprocessOptions,
    auto_preprocess: bool,
) -> Result<PreprocessedData> {
    let path = cache_file(&inputs.config);
    match load_cache(&path, &inputs.net, options) {
        CacheLoad::Hit(data) => return Ok(*data),
        CacheLoad::Damaged(msg) => {
            eprintln!(
                "warning: cache {} is damaged ({msg}); rebuilding",
                path.display()
            );
        }
        CacheLoad::Stale => eprintln!("note: cache {} is stale; rebuilding", path.display()),
        CacheLoad::NoFile if auto_preprocess => {}
        CacheLoad::NoFile => bail!(
            "no preprocessing artifacts at {}; run `transit-assign preprocess` first or pass --auto-preprocess",
            path.display()
        ),
    }
    let (data, _) = build_artifacts(&inputs.net, options)?;
    save_cache(&path, &inputs.net, options, &data)
        .with_context(|| format!("write cache {}", path.display()))?;
    Ok(data)
}

fn apply_overrides(config: &mut Config, args: &AssignArgs) {
    let a = &mut config.assignment;
    if let Some(model) = &args.model {
        a.model = model.clone();
    }
    if let Some(beta) = args.beta {
        a.beta = beta;
    }
    if let Some(multiplier) = args.multiplier {
        a.multiplier = multiplier;
    }
    if let Some(seed) = args.seed {
        a.seed = seed;
    }
    if let Some(threads) = args.threads {
        a.threads = Some(threads);
    }
    if args.no_cycle_removal {
        a.remove_cycles = false;
    }
    if args.auto_preprocess {
        a.auto_preprocess = true;
    }
    if args.timing_json {
        a.timing_json = true;
    }
    if let Some(tolerance) = args.delay_tolerance {
        config.penalties.delay_tolerance = tolerance;
    }
}

fn print_timings(t: &PhaseTimings, json: bool) {
    let total = t.setup + t.profiles + t.simulation + t.cycle_removal;
    if json {
        let ms = |d: Duration| d.as_secs_f64() * 1000.0;
        println!(
            "{}",
            serde_json::json!({
                "setup_ms": ms(t.setup),
                "profiles_ms": ms(t.profiles),
                "simulation_ms": ms(t.simulation),
                "cycle_removal_ms": ms(t.cycle_removal),
                "total_ms": ms(total),
            })
        );
    } else {
        println!(
            "timings: setup {:.1?}, profiles {:.1?}, simulation {:.1?}, cycle removal {:.1?} (total {total:.1?})",
            t.setup, t.profiles, t.simulation, t.cycle_removal
        );
    }
}

fn cmd_assign(args: AssignArgs) -> Result<()> {
    let mut inputs = load_inputs(&args.config)?;
    apply_overrides(&mut inputs.config, &args);
    let config = &inputs.config;
    let demand = load_demand(&config.paths.demand, &inputs.net)
        .with_context(|| format!("load demand {}", config.paths.demand.display()))?;
    let out_dir = config.paths.output.clone();

    if demand.is_empty() {
        let result = AssignmentResult {
            utilization: vec![0; inputs.net.connections.len()],
            journeys: Vec::new(),
            unassigned: Vec::new(),
            multiplier: config.assignment.multiplier.max(1),
        };
        write_results(&inputs.net, &demand, &result, &out_dir)?;
        println!(
            "no demand entries; wrote empty results to {}",
            out_dir.display()
        );
        return Ok(());
    }

    let params = config.engine_params()?;
    let options = config.preprocess_options();
    let pre = obtain_artifacts(&inputs, &options, config.assignment.auto_preprocess)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.assignment.threads.unwrap_or(0))
        .build()
        .context("build worker pool")?;
    let run = pool.install(|| run_assignment(&inputs.net, &pre, &demand, &params))?;

    write_results(&inputs.net, &demand, &run.result, &out_dir)
        .with_context(|| format!("write results to {}", out_dir.display()))?;
    print_timings(&run.timings, config.assignment.timing_json);
    println!(
        "assigned {} of {} entries ({} unassigned); results in {}",
        run.result.journeys.len(),
        demand.len(),
        run.result.unassigned.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_validate(config_path: &Path) -> Result<()> {
    let inputs = load_inputs(config_path)?;
    let demand = load_demand(&inputs.config.paths.demand, &inputs.net)
        .with_context(|| format!("load demand {}", inputs.config.paths.demand.display()))?;
    println!(
        "network OK: {} stops, {} trips, {} connections, {} walking vertices, {} zones",
        inputs.net.stops.len(),
        inputs.net.trips.len(),
        inputs.net.connections.len(),
        inputs.net.graph.num_vertices(),
        inputs.net.zones.len()
    );
    println!("demand OK: {} entries", demand.len());
    Ok(())
}

fn cmd_export_geojson(config_path: &Path) -> Result<()> {
    let inputs = load_inputs(config_path)?;
    let out_dir = &inputs.config.paths.output;
    let micro = read_utilization(&out_dir.join("utilization.csv"))
        .context("read utilization.csv (run `transit-assign assign` first)")?;
    if micro.len() != inputs.net.connections.len() {
        bail!(
            "utilization.csv covers {} connections, the network has {}",
            micro.len(),
            inputs.net.connections.len()
        );
    }
    // The file stores micro-passengers, so a result scaled by 1e6 reproduces
    // the published six-decimal values bit for bit.
    let result = AssignmentResult {
        utilization: micro,
        journeys: Vec::new(),
        unassigned: Vec::new(),
        multiplier: 1_000_000,
    };
    let (doc, skipped) = export_geojson(&inputs.net, &inputs.coordinates, &result);
    let path = out_dir.join("connections.geojson");
    std::fs::write(&path, &doc).with_context(|| format!("write {}", path.display()))?;
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} connections without stop coordinates");
    }
    println!(
        "wrote {} features to {}",
        inputs.net.connections.len() - skipped,
        path.display()
    );
    Ok(())
}

fn cmd_stats(config_path: &Path) -> Result<()> {
    let config = load_rebased_config(config_path)?;
    let stats = read_stats(&config.paths.output).with_context(|| {
        format!(
            "read stats from {} (run `transit-assign assign` first)",
            config.paths.output.display()
        )
    })?;
    println!("assigned entries:         {}", stats.assigned_entries);
    println!("unassigned entries:       {}", stats.unassigned_entries);
    println!("avg travel time:          {:.1} min", stats.avg_travel_time_min);
    println!("avg walking time:         {:.1} min", stats.avg_walking_time_min);
    println!("avg in-vehicle time:      {:.1} min", stats.avg_in_vehicle_time_min);
    println!("connections/passenger:    {:.2}", stats.connections_per_passenger);
    println!("trips/passenger:          {:.2}", stats.trips_per_passenger);
    println!("journeys/passenger:       {:.2}", stats.journeys_per_passenger);
    println!(
        "connection units: {} scanned, {} in final journeys (multiplier {})",
        stats.connection_units_scanned, stats.connection_units_in_journeys, stats.multiplier
    );
    Ok(())
}
