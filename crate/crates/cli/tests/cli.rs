use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use qmod_cli::{dump_model, parse_model, parse_model_str, write_model};
use qmod_core::{EntityModel, MeasurementSpec, ProbabilityTable, StateSpec};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn qmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<(String, String)> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_owned(), r[1].to_owned())
        })
        .collect()
}

fn value(rows: &[(String, String)], label: &str) -> String {
    rows.iter()
        .find(|(l, _)| l == label)
        .unwrap_or_else(|| panic!("missing row {label}"))
        .1
        .clone()
}

fn float(rows: &[(String, String)], label: &str) -> f64 {
    value(rows, label).parse().unwrap()
}

#[test]
fn shipped_fixtures_run_every_command() {
    for name in ["animal", "vessel", "threedim", "interference", "blocks"] {
        let model = fixture(name);
        let model = model.to_str().unwrap();
        for cmd in [
            vec!["geometry"],
            vec!["simulate", "--trials", "10000"],
            vec!["quantum"],
            vec!["interfere"],
        ] {
            let mut args = cmd.clone();
            args.extend(["--model", model]);
            let out = qmod(&args);
            assert!(
                out.status.success(),
                "{name} {}: {}",
                cmd[0],
                String::from_utf8_lossy(&out.stderr)
            );
            assert!(out.stdout.starts_with(b"label,value\n"));
        }
    }
}

#[test]
fn geometry_on_vessel() {
    let out = qmod(&["geometry", "--model", fixture("vessel").to_str().unwrap()]);
    let rows = rows(&out);
    assert_eq!(value(&rows, "segment_length"), "7.0710678118654757e-1");
    assert_eq!(
        float(&rows, "segment_length"),
        std::f64::consts::FRAC_1_SQRT_2
    );
    assert_eq!(float(&rows, "volume_ratio.M"), 0.5);
    assert_eq!(float(&rows, "volume_ratio.L"), 0.5);
}

#[test]
fn geometry_on_animal_selects_ids() {
    let out = qmod(&[
        "geometry",
        "--model",
        fixture("animal").to_str().unwrap(),
        "--measurement",
        "e",
        "--state",
        "ground",
    ]);
    let rows = rows(&out);
    assert_eq!(float(&rows, "v.Horse"), 0.5);
    assert_eq!(float(&rows, "v.Bear"), 0.5);
}

#[test]
fn simulate_threedim_within_bounds() {
    let out = qmod(&[
        "simulate",
        "--model",
        fixture("threedim").to_str().unwrap(),
        "--trials",
        "1000000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let rows = rows(&out);
    assert_eq!(value(&rows, "seed"), "7");
    for label in ["x1", "x2", "x3"] {
        let dev = float(&rows, &format!("deviation.{label}")).abs();
        let bound = float(&rows, &format!("three_sigma.{label}"));
        assert!(dev <= bound, "{label}: {dev} > {bound}");
        assert_eq!(value(&rows, &format!("within_three_sigma.{label}")), "true");
    }
}

#[test]
fn interfere_two_states() {
    let out = qmod(&[
        "interfere",
        "--model",
        fixture("interference").to_str().unwrap(),
        "--state",
        "p",
        "--state-b",
        "q",
        "--amp-a",
        "0.7071067811865476",
        "--amp-b",
        "0.7071067811865476",
    ]);
    assert!(out.status.success());
    let rows = rows(&out);
    assert!((float(&rows, "p_r.x1") - 1.0).abs() <= 1e-12);
    assert!(float(&rows, "p_r.x2").abs() <= 1e-12);
    assert_eq!(value(&rows, "method"), "closed_form");
    assert_eq!(value(&rows, "on_segment"), "false");
}

#[test]
fn interfere_accepts_negative_phases_and_renormalizes() {
    let out = qmod(&[
        "interfere",
        "--model",
        fixture("blocks").to_str().unwrap(),
        "--state-b",
        "q",
        "--phase-a",
        "-0.5",
        "--renormalize",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = rows(&out);
    assert_eq!(value(&rows, "method"), "direct");
    let total = float(&rows, "p_r_renormalized.a") + float(&rows, "p_r_renormalized.b");
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"entity":"x","states":[{"id":"p"}],
            "measurements":[{"id":"e","outcomes":["a","b"]}],
            "probabilities":[{"measurement":"e","state":"p","mu":[0.7,0.7]}]}"#,
    )
    .unwrap();
    let out = qmod(&["geometry", "--model", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("probabilities[0].mu"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(
        qmod(&["quantum", "--model", broken.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let vessel = fixture("vessel");
    let vessel = vessel.to_str().unwrap();
    assert_eq!(
        qmod(&["geometry", "--model", vessel, "--state", "missing"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qmod(&[
            "interfere",
            "--model",
            vessel,
            "--amp-a",
            "1",
            "--amp-b",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        qmod(&["geometry", "--model", fixture("threedim").to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn output_flag_writes_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    let model = fixture("threedim");
    let model = model.to_str().unwrap();
    let stdout = qmod(&["quantum", "--model", model]).stdout;
    let status = qmod(&[
        "quantum",
        "--model",
        model,
        "--output",
        path.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn fixtures_round_trip_through_dump() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["animal", "vessel", "threedim", "interference", "blocks"] {
        let model = parse_model(fixture(name)).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        write_model(&model, &path).unwrap();
        assert_eq!(parse_model(&path).unwrap(), model);
    }
}

fn model_from(mus: Vec<Vec<f64>>) -> EntityModel {
    let n = mus[0].len();
    EntityModel {
        entity_id: "generated".into(),
        states: (0..mus.len())
            .map(|i| StateSpec {
                state_id: format!("s{i}"),
                description: None,
            })
            .collect(),
        measurements: vec![MeasurementSpec {
            measurement_id: "e".into(),
            outcomes: (0..n).map(|k| format!("x{k}")).collect(),
            final_states: None,
        }],
        probability_tables: mus
            .into_iter()
            .enumerate()
            .map(|(i, mu)| ProbabilityTable {
                measurement_id: "e".into(),
                state_id: format!("s{i}"),
                mu,
                phases: None,
            })
            .collect(),
        hilbert: vec![],
    }
}

proptest! {
    #[test]
    fn parse_of_dump_is_identity(
        weights in (1usize..6).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), 1..4)
        })
    ) {
        let mus = weights
            .into_iter()
            .map(|w| {
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let origin = Path::new("generated.json");
        let model = parse_model_str(&dump_model(&model_from(mus)), origin).unwrap();
        prop_assert_eq!(parse_model_str(&dump_model(&model), origin).unwrap(), model);
    }
}
