use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use trapwalk_cli::config::{
    find_key_line, Coin2DName, CoinName, Engine, Initial1D, PulseName, RampName, ShiftName, TargetName,
};
use trapwalk_cli::{parse_config, Kind, RunConfig};

fn trapwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapwalk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// (step → Σ probability) of a distributions CSV.
fn step_sums(csv: &str) -> BTreeMap<usize, f64> {
    let mut sums = BTreeMap::new();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        *sums.entry(f[0].parse().unwrap()).or_insert(0.0) += f[3].parse::<f64>().unwrap();
    }
    sums
}

const WALK3: &str = "kind = \"walk1d\"\nsteps = 3\n\n[walk]\ncoin = \"hadamard\"\ninitial = \"plus\"\n";

#[test]
fn minimal_walk1d_fills_defaults() {
    let c = parse_config(WALK3).unwrap();
    assert_eq!(c.kind, Kind::Walk1d);
    assert_eq!(c.steps(), 3);
    assert_eq!(c.seed, 0);
    assert_eq!(c.record_every, 1);
    assert_eq!(c.walk.shift, ShiftName::Standard);
    assert_eq!(c.trap.v0, 200.0);
    assert_eq!(c.trap.a_max, 60.0);
    assert_eq!(c.trap.a_min, 28.8);
}

#[test]
fn negative_steps_name_key_and_line() {
    let err = parse_config("kind = \"walk1d\"\nsteps = -3\n").unwrap_err();
    let e = &err.0[0];
    assert_eq!(e.key.as_deref(), Some("steps"));
    assert_eq!(e.line, Some(2));
    assert!(e.message.contains("non-negative"), "{}", e.message);
}

#[test]
fn unknown_key_is_rejected() {
    let err = parse_config("kind = \"walk1d\"\n[walk]\ncoin = \"hadamard\"\ncolor = 3\n").unwrap_err();
    assert_eq!(err.0[0].key.as_deref(), Some("walk.color"));
    assert_eq!(err.0[0].line, Some(4));
}

#[test]
fn constraint_violations_are_all_reported() {
    let text = "kind = \"physical\"\n[trap]\na_min = 70.0\n[physical]\nn_traps = 5\n";
    let err = parse_config(text).unwrap_err();
    let keys: Vec<_> = err.0.iter().map(|e| (e.key.clone().unwrap(), e.line)).collect();
    assert!(keys.contains(&("trap.a_min".into(), Some(3))), "{keys:?}");
    assert!(keys.contains(&("physical.n_traps".into(), Some(5))), "{keys:?}");
}

#[test]
fn key_lines_in_sections() {
    let text = "kind = \"shake\"\n[shake]\nomega = 0.01\n";
    assert_eq!(find_key_line(text, "shake.omega"), Some(3));
    assert_eq!(find_key_line(text, "omega"), None);
}

#[test]
fn reference_geometry_round_trips() {
    let text = "kind = \"physical\"\n[trap]\nV0 = 200.0\na_max = 60.0\na_min = 28.8\n";
    let c = parse_config(text).unwrap();
    let again = parse_config(&c.to_toml().unwrap()).unwrap();
    assert_eq!(c, again);
}

#[test]
fn hadamard_three_steps_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.toml", WALK3);
    let out = trapwalk(dir.path(), &["--config", "w.toml", "--out", "w"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "w.csv");
    assert!(csv.starts_with("step,index_k,index_l,probability\n"));
    let last: BTreeMap<i64, f64> = csv
        .lines()
        .filter(|l| l.starts_with("3,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[2], "");
            (f[1].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    let want = [(3, 0.125), (1, 0.625), (-1, 0.125), (-3, 0.125)];
    assert_eq!(last.len(), 4);
    for (k, p) in want {
        assert!((last[&k] - p).abs() < 1e-12, "site {k}: {}", last[&k]);
    }
    for (_, s) in step_sums(&csv) {
        assert!((s - 1.0).abs() < 1e-8);
    }
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "w.json")).unwrap();
    assert_eq!(json["seed"], 0);
    assert_eq!(json["config"]["steps"], 3);
    assert_eq!(json["points"][0]["variance"].as_array().unwrap().len(), 4);
    assert!(json.get("wall_clock_s").is_none());
}

#[test]
fn record_every_thins_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.toml", "kind = \"walk1d\"\nsteps = 7\n");
    let out = trapwalk(dir.path(), &["--config", "w.toml", "--out", "w", "--record-every", "3"]);
    assert!(out.status.success());
    let steps: Vec<usize> = step_sums(&read(dir.path(), "w.csv")).into_keys().collect();
    assert_eq!(steps, vec![0, 3, 6, 7]);
}

#[test]
fn stochastic_runs_are_byte_identical() {
    let config = "kind = \"decohere\"\nsteps = 12\n[decohere]\nprobabilities = [0.1, 0.5]\ntrajectories = 300\n";
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (d, seed) in dirs.iter().zip(["42", "42", "43"]) {
        write(d.path(), "d.toml", config);
        let r = trapwalk(d.path(), &["--config", "d.toml", "--out", "run", "--seed", seed]);
        assert!(r.status.success());
    }
    for f in ["run_0.csv", "run_1.csv", "run.json"] {
        assert_eq!(read(dirs[0].path(), f), read(dirs[1].path(), f), "{f}");
    }
    for f in ["run_0.csv", "run_1.csv"] {
        for (_, s) in step_sums(&read(dirs[0].path(), f)) {
            assert!((s - 1.0).abs() < 1e-8);
        }
    }
    assert_ne!(read(dirs[0].path(), "run_0.csv"), read(dirs[2].path(), "run_0.csv"));
}

#[test]
fn config_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", "kind = \"walk1d\"\nsteps = -3\n");
    let r = trapwalk(dir.path(), &["--config", "bad.toml"]);
    assert_eq!(r.status.code(), Some(1));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line 2") && err.contains("steps"), "{err}");
    assert!(!dir.path().join("trapwalk.json").exists());
}

#[test]
fn ejected_population_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "p.toml",
        "kind = \"physical\"\nsteps = 1\n[trap]\nmargin = 0.0\nt_r = 2.0\n[physical]\nn_traps = 2\n",
    );
    let r = trapwalk(dir.path(), &["--config", "p.toml", "--out", "p"]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("grid boundary"), "{err}");
    assert!(!dir.path().join("p.json").exists());
}

#[test]
fn long_rows_need_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "l.toml", "kind = \"physical\"\n[physical]\nn_traps = 62\n");
    let r = trapwalk(dir.path(), &["--config", "l.toml"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("--long-jobs"));
}

#[test]
fn provenance_labels_defaults_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r = trapwalk(dir.path(), &["--provenance", "--seed", "1234"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).expect("UTF-8");
    assert!(text.contains("seed = 1234"));
    let v0 = text.lines().find(|l| l.starts_with("V0 = 200")).unwrap();
    assert!(v0.contains("reference default"), "{v0}");
    assert!(text.starts_with("trapwalk "));

    write(dir.path(), "c.toml", "kind = \"physical\"\n[trap]\nV0 = 150.0\n");
    let r = trapwalk(dir.path(), &["--provenance", "--config", "c.toml"]);
    let text = String::from_utf8(r.stdout).unwrap();
    let v0 = text.lines().find(|l| l.starts_with("V0 = 150")).unwrap();
    assert!(v0.contains("override") && v0.contains("default 200"), "{v0}");
}

#[test]
fn wall_clock_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "w.toml", WALK3);
    let r = trapwalk(dir.path(), &["--config", "w.toml", "--out", "w", "--wall-clock"]);
    assert!(r.status.success());
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "w.json")).unwrap();
    assert!(json["wall_clock_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn two_dimensional_rows_carry_both_indices() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.toml", "kind = \"walk2d\"\nsteps = 4\n");
    assert!(trapwalk(dir.path(), &["--config", "g.toml", "--out", "g"]).status.success());
    let csv = read(dir.path(), "g.csv");
    assert!(csv.lines().skip(1).all(|l| l.split(',').all(|f| !f.is_empty())));
    for (_, s) in step_sums(&csv) {
        assert!((s - 1.0).abs() < 1e-8);
    }
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

prop_compose! {
    fn any_config()(
        kind in prop::sample::select(vec![
            Kind::Walk1d, Kind::Walk2d, Kind::Physical, Kind::Thermal, Kind::Shake,
            Kind::Decohere, Kind::Search, Kind::Calibrate, Kind::Convergence,
        ]),
        steps in prop::option::of(1usize..500),
        seed in 0u64..=i64::MAX as u64,
        record_every in 1usize..20,
        coin in prop::sample::select(vec![CoinName::Hadamard, CoinName::Tunneling, CoinName::Biased, CoinName::Identity]),
        shift in prop::sample::select(vec![ShiftName::Standard, ShiftName::Flipflop, ShiftName::General]),
        initial in prop::sample::select(vec![Initial1D::Plus, Initial1D::Minus, Initial1D::Symmetric, Initial1D::Balanced]),
        theta in finite(-7.0, 7.0),
        bias in finite(0.0, 1.0),
        c in finite(0.0, 1.0),
        coin2 in prop::sample::select(vec![Coin2DName::Separable, Coin2DName::Entangled, Coin2DName::Grover]),
        v0 in finite(1.0, 1000.0),
        a_min in finite(1.0, 50.0),
        gap in finite(0.1, 50.0),
        t_r in finite(0.0, 300.0),
        ramp in prop::sample::select(vec![RampName::Beta, RampName::Smoothstep, RampName::Linear]),
        hold in finite(0.0, 200.0),
        dx in finite(0.01, 0.25),
        engine in prop::sample::select(vec![Engine::Full, Engine::Reduced]),
        half_traps in 1usize..40,
        p0 in finite(0.01, 0.99),
        beta in prop::option::of(finite(0.01, 10.0)),
        amplitudes in prop::collection::vec(finite(0.0, 1.0), 1..6),
        probabilities in prop::collection::vec(finite(0.0, 1.0), 1..6),
        target in prop::sample::select(vec![TargetName::Coin, TargetName::Position, TargetName::Both]),
        side in 1usize..12,
        marked in prop::option::of((0i64..12, 0i64..12)),
        pulse in prop::sample::select(vec![PulseName::Pi, PulseName::PiOver2]),
    ) -> RunConfig {
        let mut cfg = RunConfig::new(kind);
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.record_every = record_every;
        cfg.walk.coin = coin;
        cfg.walk.shift = shift;
        cfg.walk.initial = initial;
        cfg.walk.theta = theta;
        cfg.walk.bias = bias;
        cfg.walk.c = c;
        cfg.lattice.coin = coin2;
        cfg.trap.v0 = v0;
        cfg.trap.a_min = a_min;
        cfg.trap.a_max = a_min + gap;
        cfg.trap.t_r = t_r;
        cfg.trap.ramp = ramp;
        cfg.trap.hold_coin = hold;
        cfg.trap.dx = dx;
        cfg.physical.engine = engine;
        cfg.physical.n_traps = 2 * half_traps;
        cfg.thermal.ground_population = p0;
        cfg.thermal.beta = beta;
        cfg.shake.amplitudes = amplitudes;
        cfg.decohere.probabilities = probabilities;
        cfg.decohere.target = target;
        cfg.search.side = side;
        cfg.search.marked = marked
            .filter(|&(k, l)| k < side as i64 && l < side as i64)
            .map_or_else(Vec::new, |(k, l)| vec![k, l]);
        cfg.calibrate.target = pulse;
        cfg
    }
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(cfg in any_config()) {
        prop_assert!(cfg.validate().is_empty(), "{:?}", cfg.validate());
        let text = cfg.to_toml().unwrap();
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, cfg);
    }
}
