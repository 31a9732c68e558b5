//! End-to-end tests that drive the compiled binary the way a user would:
//! fixture files on disk, subcommands, flags, and exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_transit-assign");

struct Run {
    success: bool,
    stdout: String,
    stderr: String,
}

/// Runs the binary in `dir`. `cache_env` sets `TRANSIT_ASSIGN_CACHE` for the
/// child; otherwise the variable is scrubbed so the ambient environment
/// cannot leak into a test.
fn run_in(dir: &Path, args: &[&str], cache_env: Option<&Path>) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(dir);
    match cache_env {
        Some(path) => {
            cmd.env("TRANSIT_ASSIGN_CACHE", path);
        }
        None => {
            cmd.env_remove("TRANSIT_ASSIGN_CACHE");
        }
    }
    let out = cmd.output().expect("spawn transit-assign");
    Run {
        success: out.status.success(),
        stdout: String::from_utf8(out.stdout).expect("stdout utf8"),
        stderr: String::from_utf8(out.stderr).expect("stderr utf8"),
    }
}

fn ok(dir: &Path, args: &[&str]) -> Run {
    let run = run_in(dir, args, None);
    assert!(
        run.success,
        "{args:?} failed\nstdout: {}\nstderr: {}",
        run.stdout, run.stderr
    );
    run
}

fn fails(dir: &Path, args: &[&str]) -> Run {
    let run = run_in(dir, args, None);
    assert!(
        !run.success,
        "{args:?} unexpectedly succeeded\nstdout: {}",
        run.stdout
    );
    run
}

fn write(path: &Path, text: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, text).unwrap();
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Four stops on a line served by one trip; the only itinerary rides all
/// three connections. Every stop has coordinates.
fn linear_fixture(root: &Path) {
    write(
        &root.join("net/stops.csv"),
        "#transit-assign v1\n\
         stop_id,vertex,buffer_time,lat,lon\n\
         0,0,0,49.0,8.4\n\
         1,1,0,49.01,8.41\n\
         2,2,0,49.02,8.42\n\
         3,3,0,49.03,8.43\n",
    );
    write(&root.join("net/trips.csv"), "#transit-assign v1\ntrip_id\n0\n");
    write(
        &root.join("net/connections.csv"),
        "#transit-assign v1\n\
         connection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n\
         0,0,1,08:00:00,08:05:00,0,0\n\
         1,1,2,08:06:00,08:10:00,0,1\n\
         2,2,3,08:11:00,08:15:00,0,2\n",
    );
    write(
        &root.join("net/edges.csv"),
        "#transit-assign v1\n#vertices 4\nfrom,to,walk_seconds\n",
    );
    write(
        &root.join("demand.csv"),
        "#transit-assign v1\nid,origin,destination,dep_time\n0,0,3,07:55:00\n",
    );
}

/// Two competing trips over the same stop pair with close perceived arrival
/// times, so probabilistic models split the group.
fn parallel_fixture(root: &Path) {
    write(
        &root.join("net/stops.csv"),
        "#transit-assign v1\n\
         stop_id,vertex,buffer_time,lat,lon\n\
         0,0,0,,\n\
         1,1,0,,\n",
    );
    write(
        &root.join("net/trips.csv"),
        "#transit-assign v1\ntrip_id\n0\n1\n",
    );
    write(
        &root.join("net/connections.csv"),
        "#transit-assign v1\n\
         connection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n\
         0,0,1,08:00:00,08:10:00,0,0\n\
         1,0,1,08:02:00,08:11:00,1,0\n",
    );
    write(
        &root.join("net/edges.csv"),
        "#transit-assign v1\n#vertices 2\nfrom,to,walk_seconds\n",
    );
    write(
        &root.join("demand.csv"),
        "#transit-assign v1\nid,origin,destination,dep_time\n0,0,1,07:58:00\n",
    );
}

/// A trip that leaves the origin, comes straight back, and only then does a
/// second trip depart for the destination. Strong waiting cost and no
/// transfer penalty make riding the loop the best perceived option.
fn loop_fixture(root: &Path) {
    write(
        &root.join("net/stops.csv"),
        "#transit-assign v1\n\
         stop_id,vertex,buffer_time,lat,lon\n\
         0,0,0,,\n\
         1,1,0,,\n\
         2,2,0,,\n",
    );
    write(
        &root.join("net/trips.csv"),
        "#transit-assign v1\ntrip_id\n0\n1\n",
    );
    write(
        &root.join("net/connections.csv"),
        "#transit-assign v1\n\
         connection_id,dep_stop,arr_stop,dep_time,arr_time,trip,index_in_trip\n\
         0,0,1,00:01:40,00:10:00,0,0\n\
         1,1,0,00:11:40,00:18:20,0,1\n\
         2,0,2,00:33:20,00:41:40,1,0\n",
    );
    write(
        &root.join("net/edges.csv"),
        "#transit-assign v1\n#vertices 3\nfrom,to,walk_seconds\n",
    );
    write(
        &root.join("demand.csv"),
        "#transit-assign v1\nid,origin,destination,dep_time\n0,0,2,00:00:00\n",
    );
}

fn config(root: &Path, sections: &str) -> PathBuf {
    let path = root.join("config.toml");
    write(
        &path,
        &format!(
            "[paths]\nnetwork = \"net\"\ndemand = \"demand.csv\"\noutput = \"out\"\n\n{sections}"
        ),
    );
    path
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn assign_optimal_single_path_produces_expected_journey() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(
        dir.path(),
        "[assignment]\nmodel = \"optimal\"\nmultiplier = 1\n",
    );

    let run = ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    assert!(run.stdout.contains("assigned 1 of 1 entries"), "{}", run.stdout);
    assert!(run.stdout.contains("timings:"), "{}", run.stdout);

    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(
        journeys.contains("0,1.000000,iw:0:0|c:0|c:1|c:2|fw:3:0"),
        "{journeys}"
    );
    let utilization = read(&dir.path().join("out/utilization.csv"));
    for line in ["0,1.000000", "1,1.000000", "2,1.000000"] {
        assert!(utilization.contains(line), "{utilization}");
    }

    let stats: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("out/stats.json"))).unwrap();
    assert_eq!(stats["assigned_entries"], 1);
    assert_eq!(stats["unassigned_entries"], 0);
    assert_eq!(stats["avg_travel_time_min"], 20.0);
    assert_eq!(stats["avg_walking_time_min"], 0.0);
    assert_eq!(stats["avg_in_vehicle_time_min"], 13.0);
    assert_eq!(stats["connections_per_passenger"], 3.0);
    assert_eq!(stats["trips_per_passenger"], 1.0);
    assert_eq!(stats["journeys_per_passenger"], 1.0);
    assert_eq!(stats["connection_units_scanned"], 3);
    assert_eq!(stats["connection_units_in_journeys"], 3);
    assert_eq!(stats["multiplier"], 1);
}

#[test]
fn preprocess_caches_reuses_and_heals_artifacts() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");
    let cache = dir.path().join("out/cache/preprocessed.bin");

    let first = ok(dir.path(), &["preprocess", "--config", "config.toml"]);
    assert!(first.stdout.contains("cached at"), "{}", first.stdout);
    assert!(first.stdout.contains("transfer shortcuts"), "{}", first.stdout);
    let original = std::fs::read(&cache).unwrap();

    // A second run must detect the artifacts and skip the rebuild.
    let again = ok(dir.path(), &["preprocess", "--config", "config.toml"]);
    assert!(again.stdout.contains("cache hit"), "{}", again.stdout);
    assert!(!again.stdout.contains("cached at"), "{}", again.stdout);
    assert_eq!(std::fs::read(&cache).unwrap(), original);

    // Damage the header: the run warns, rebuilds, and still succeeds.
    let mut bytes = original.clone();
    bytes[0] ^= 0xff;
    std::fs::write(&cache, &bytes).unwrap();
    let healed = ok(dir.path(), &["preprocess", "--config", "config.toml"]);
    assert!(healed.stderr.contains("damaged"), "{}", healed.stderr);
    assert!(healed.stderr.contains("rebuilding"), "{}", healed.stderr);
    assert!(healed.stdout.contains("cached at"), "{}", healed.stdout);
    assert_eq!(std::fs::read(&cache).unwrap(), original);

    // Assign now runs off the cache without --auto-preprocess.
    ok(dir.path(), &["assign", "--config", "config.toml"]);
}

#[test]
fn stale_cache_is_rebuilt_when_options_change() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");
    ok(dir.path(), &["preprocess", "--config", "config.toml"]);

    // Changing a preprocessing option invalidates the cache key.
    config(dir.path(), "[preprocessing]\nmax_transfer_time = 1234\n");
    let run = ok(dir.path(), &["preprocess", "--config", "config.toml"]);
    assert!(run.stdout.contains("stale"), "{}", run.stdout);
    assert!(run.stdout.contains("cached at"), "{}", run.stdout);

    // And the rebuilt cache hits again.
    let again = ok(dir.path(), &["preprocess", "--config", "config.toml"]);
    assert!(again.stdout.contains("cache hit"), "{}", again.stdout);
}

#[test]
fn assign_without_artifacts_fails_with_guidance() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");

    let run = fails(dir.path(), &["assign", "--config", "config.toml"]);
    assert!(
        run.stderr.contains("no preprocessing artifacts"),
        "{}",
        run.stderr
    );
    assert!(run.stderr.contains("--auto-preprocess"), "{}", run.stderr);
    assert!(!dir.path().join("out/journeys.csv").exists());

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    assert!(dir.path().join("out/journeys.csv").exists());
    assert!(dir.path().join("out/cache/preprocessed.bin").exists());
}

#[test]
fn cache_env_var_overrides_cache_dir() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");
    let custom = dir.path().join("elsewhere");

    let run = run_in(
        dir.path(),
        &["preprocess", "--config", "config.toml"],
        Some(&custom),
    );
    assert!(run.success, "{}", run.stderr);
    assert!(custom.join("preprocessed.bin").exists());
    assert!(!dir.path().join("out/cache/preprocessed.bin").exists());

    // The same environment finds the artifacts without --auto-preprocess.
    let assign = run_in(
        dir.path(),
        &["assign", "--config", "config.toml"],
        Some(&custom),
    );
    assert!(assign.success, "{}", assign.stderr);
    // Without it the default location is empty, so assign refuses.
    fails(dir.path(), &["assign", "--config", "config.toml"]);
}

#[test]
fn flags_override_config_values() {
    let dir = tempdir();
    parallel_fixture(dir.path());
    config(
        dir.path(),
        "[assignment]\nmodel = \"optimal\"\nmultiplier = 100\n",
    );

    // Config alone: the better trip takes the whole group.
    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(journeys.contains("0,1.000000,iw:0:0|c:0|fw:1:0"), "{journeys}");
    assert!(!journeys.contains("c:1"), "{journeys}");

    // --model overrides the config: a flat logit splits the group.
    ok(
        dir.path(),
        &[
            "assign",
            "--config",
            "config.toml",
            "--model",
            "logit",
            "--beta",
            "0.01",
            "--seed",
            "5",
        ],
    );
    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(journeys.contains("c:0"), "{journeys}");
    assert!(journeys.contains("c:1"), "{journeys}");

    // A tiny --delay-tolerance eliminates the slower trip even under logit:
    // its perceived delay exceeds the window, so its share is exactly zero.
    ok(
        dir.path(),
        &[
            "assign",
            "--config",
            "config.toml",
            "--model",
            "logit",
            "--beta",
            "0.01",
            "--delay-tolerance",
            "1",
        ],
    );
    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(journeys.contains("0,1.000000,iw:0:0|c:0|fw:1:0"), "{journeys}");
    assert!(!journeys.contains("c:1"), "{journeys}");
}

#[test]
fn same_seed_reproduces_results_and_threads_do_not_change_them() {
    let dir = tempdir();
    parallel_fixture(dir.path());
    config(
        dir.path(),
        "[assignment]\nmodel = \"logit\"\nbeta = 0.01\nmultiplier = 100\nseed = 42\n",
    );
    let outputs = ["out/utilization.csv", "out/journeys.csv", "out/stats.json"];
    let snapshot = || -> Vec<String> {
        outputs
            .iter()
            .map(|name| read(&dir.path().join(name)))
            .collect()
    };

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    let first = snapshot();
    // The flat logit must actually split the group, or this test proves
    // nothing about reproducing a random outcome.
    assert!(first[1].contains("c:0") && first[1].contains("c:1"), "{}", first[1]);

    ok(dir.path(), &["assign", "--config", "config.toml"]);
    assert_eq!(snapshot(), first, "same seed must reproduce bytes");

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--threads", "1"],
    );
    assert_eq!(snapshot(), first, "one thread must match");

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--threads", "2"],
    );
    assert_eq!(snapshot(), first, "two threads must match");
}

#[test]
fn cycle_removal_is_on_by_default_and_off_by_flag() {
    let dir = tempdir();
    loop_fixture(dir.path());
    config(
        dir.path(),
        "[penalties]\ntransfer_penalty = 0\nwait_weight = 2.0\n\n\
         [assignment]\nmodel = \"optimal\"\nmultiplier = 1\n",
    );

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(journeys.contains("0,1.000000,iw:0:0|c:2|fw:2:0"), "{journeys}");
    assert!(!journeys.contains("c:0"), "loop must be excised: {journeys}");

    ok(
        dir.path(),
        &[
            "assign",
            "--config",
            "config.toml",
            "--no-cycle-removal",
        ],
    );
    let journeys = read(&dir.path().join("out/journeys.csv"));
    assert!(
        journeys.contains("0,1.000000,iw:0:0|c:0|c:1|c:2|fw:2:0"),
        "{journeys}"
    );
}

#[test]
fn validate_reports_structure_and_rejects_bad_files() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");

    let run = ok(dir.path(), &["validate", "--config", "config.toml"]);
    assert!(
        run.stdout.contains(
            "network OK: 4 stops, 1 trips, 3 connections, 4 walking vertices, 0 zones"
        ),
        "{}",
        run.stdout
    );
    assert!(run.stdout.contains("demand OK: 1 entries"), "{}", run.stdout);

    // A malformed timestamp must fail loudly and name the file.
    let connections = read(&dir.path().join("net/connections.csv"));
    write(
        &dir.path().join("net/connections.csv"),
        &connections.replace("08:05:00", "08:99:00"),
    );
    let run = fails(dir.path(), &["validate", "--config", "config.toml"]);
    assert!(run.stderr.contains("connections.csv"), "{}", run.stderr);

    // So must a missing demand file.
    std::fs::remove_file(dir.path().join("demand.csv")).unwrap();
    write(
        &dir.path().join("net/connections.csv"),
        &connections,
    );
    let run = fails(dir.path(), &["validate", "--config", "config.toml"]);
    assert!(run.stderr.contains("demand"), "{}", run.stderr);
}

#[test]
fn stats_prints_metrics_from_results() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(
        dir.path(),
        "[assignment]\nmodel = \"optimal\"\nmultiplier = 1\n",
    );

    // Without results the command refuses.
    let run = fails(dir.path(), &["stats", "--config", "config.toml"]);
    assert!(run.stderr.contains("assign"), "{}", run.stderr);

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    let run = ok(dir.path(), &["stats", "--config", "config.toml"]);
    for needle in [
        "assigned entries:",
        "avg travel time:",
        "20.0 min",
        "avg in-vehicle time:",
        "13.0 min",
        "connections/passenger:",
        "3.00",
    ] {
        assert!(run.stdout.contains(needle), "missing {needle:?} in {}", run.stdout);
    }
}

#[test]
fn export_geojson_round_trips_loads() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(
        dir.path(),
        "[assignment]\nmodel = \"optimal\"\nmultiplier = 1\n",
    );

    // Needs a previous assignment.
    let run = fails(dir.path(), &["export-geojson", "--config", "config.toml"]);
    assert!(run.stderr.contains("utilization"), "{}", run.stderr);

    ok(
        dir.path(),
        &["assign", "--config", "config.toml", "--auto-preprocess"],
    );
    let run = ok(dir.path(), &["export-geojson", "--config", "config.toml"]);
    assert!(run.stdout.contains("wrote 3 features"), "{}", run.stdout);
    assert!(run.stderr.is_empty(), "{}", run.stderr);

    let doc: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("out/connections.geojson"))).unwrap();
    assert_eq!(doc["type"], "FeatureCollection");
    let features = doc["features"].as_array().unwrap();
    assert_eq!(features.len(), 3);
    let first = &features[0];
    assert_eq!(first["properties"]["connection_id"], 0);
    assert_eq!(first["properties"]["expected_passengers"], 1.0);
    assert_eq!(
        first["geometry"]["coordinates"],
        serde_json::json!([[8.4, 49.0], [8.41, 49.01]])
    );

    // Stops without coordinates drop their connections, with a warning.
    let stops = read(&dir.path().join("net/stops.csv"));
    write(
        &dir.path().join("net/stops.csv"),
        &stops.replace("1,1,0,49.01,8.41", "1,1,0,,"),
    );
    let run = ok(dir.path(), &["export-geojson", "--config", "config.toml"]);
    assert!(run.stdout.contains("wrote 1 features"), "{}", run.stdout);
    assert!(
        run.stderr.contains("skipped 2 connections"),
        "{}",
        run.stderr
    );
}

#[test]
fn empty_demand_is_a_no_op() {
    let dir = tempdir();
    linear_fixture(dir.path());
    write(
        &dir.path().join("demand.csv"),
        "#transit-assign v1\nid,origin,destination,dep_time\n",
    );
    config(dir.path(), "");

    // No artifacts exist and none are needed: nothing to assign.
    let run = ok(dir.path(), &["assign", "--config", "config.toml"]);
    assert!(run.stdout.contains("no demand entries"), "{}", run.stdout);

    let utilization = read(&dir.path().join("out/utilization.csv"));
    for line in ["0,0.000000", "1,0.000000", "2,0.000000"] {
        assert!(utilization.contains(line), "{utilization}");
    }
    let stats: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("out/stats.json"))).unwrap();
    assert_eq!(stats["assigned_entries"], 0);
    assert_eq!(stats["unassigned_entries"], 0);
}

#[test]
fn timing_json_flag_emits_machine_readable_line() {
    let dir = tempdir();
    linear_fixture(dir.path());
    config(dir.path(), "");

    let run = ok(
        dir.path(),
        &[
            "assign",
            "--config",
            "config.toml",
            "--auto-preprocess",
            "--timing-json",
        ],
    );
    let timing = run
        .stdout
        .lines()
        .find(|l| l.starts_with('{'))
        .unwrap_or_else(|| panic!("no JSON line in {}", run.stdout));
    let parsed: serde_json::Value = serde_json::from_str(timing).unwrap();
    for key in [
        "setup_ms",
        "profiles_ms",
        "simulation_ms",
        "cycle_removal_ms",
        "total_ms",
    ] {
        assert!(parsed[key].is_number(), "missing {key} in {timing}");
    }
    assert!(!run.stdout.contains("timings:"), "{}", run.stdout);
}
