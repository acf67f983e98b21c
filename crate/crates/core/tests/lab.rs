use gridgas::catalog::{square_lattice, three_grid_presentation};
use gridgas::lab::config::{Spacing, XiGridSpec};
use gridgas::lab::experiment::admissible_presentation;
use gridgas::lab::io::CsvTable;
use gridgas::lab::{exit, parse_config, parse_config_str, run_experiment, ExperimentConfig, ExperimentKind, LabError};

const SQUARE: &str = r#"{
  "field": {"minpoly": ["-2", "0", "1"], "root_interval": ["1", "2"]},
  "grids": [{"c": "1", "w": ["0", "0"]}],
  "experiment": "analyze"
}"#;

const REMARK: &str = r#"{
  "field": {"minpoly": ["-2", "0", "1"], "root_interval": ["1", "2"]},
  "grids": [
    {"c": "1", "w": ["0", "0"]},
    {"c": "1", "w": ["0", ["0", "1"]]},
    {"c": "1", "w": ["0", "0"], "M": [["1", ["0", "1"]], ["1", ["1", "1"]]]}
  ],
  "experiment": "analyze"
}"#;

#[test]
fn minimal_square_config() {
    let cfg = parse_config_str(SQUARE, "square.json").unwrap();
    let (_, p) = admissible_presentation(&cfg).unwrap();
    assert_eq!(p.num_classes(), 1);
    assert_eq!(p, square_lattice());
}

#[test]
fn malformed_inputs_are_located() {
    let bad = SQUARE.replace(r#""c": "1""#, r#""c": "1/0""#);
    match parse_config_str(&bad, "bad.json") {
        Err(e @ LabError::Parse { line: 3, .. }) => assert_eq!(e.exit_code(), exit::CONFIG),
        other => panic!("expected a parse error on line 3, got {other:?}"),
    }
    let unknown = SQUARE.replace(r#""experiment""#, r#""colour": 1, "experiment""#);
    assert!(matches!(parse_config_str(&unknown, "u.json"), Err(LabError::Parse { line: 4, .. })));
    let neither = r#"{"experiment": "analyze"}"#;
    assert!(matches!(parse_config_str(neither, "n.json"), Err(LabError::Invalid(_))));
    assert!(matches!(
        parse_config(std::path::Path::new("/nonexistent/gridgas.json")),
        Err(LabError::Io { .. })
    ));
}

#[test]
fn remark_configuration_round_trips() {
    let cfg = parse_config_str(REMARK, "remark.json").unwrap();
    let first = run_experiment(&cfg).unwrap();
    assert_eq!(first.summary["classes"], 2);
    assert_eq!(first.summary["class_sizes"], serde_json::json!([2, 1]));
    assert_eq!(first.summary["admissible"], true);
    let (_, p) = admissible_presentation(&cfg).unwrap();
    assert_eq!(p, three_grid_presentation());

    let mut again = ExperimentConfig::for_presentation(&p);
    again.experiment = Some(ExperimentKind::Analyze);
    let text = serde_json::to_string_pretty(&again).unwrap();
    let second = run_experiment(&parse_config_str(&text, "again.json").unwrap()).unwrap();
    assert_eq!(
        serde_json::to_string(&first.summary).unwrap(),
        serde_json::to_string(&second.summary).unwrap()
    );
}

#[test]
fn xi_grid_specs() {
    let g: XiGridSpec = "0.25:64:log".parse().unwrap();
    assert_eq!(g.spacing, Spacing::Log);
    let v = g.values().unwrap();
    assert_eq!(v.len(), 40);
    assert!((v[0] - 0.25).abs() < 1e-12 && (v[39] - 64.0).abs() < 1e-9);
    assert_eq!("1:2:lin:3".parse::<XiGridSpec>().unwrap().values().unwrap(), vec![1.0, 1.5, 2.0]);
    for bad in ["1:2", "0:1:log", "2:1:log", "1:2:cubic", "1:2:lin:0"] {
        assert!(bad.parse::<XiGridSpec>().is_err(), "{bad}");
    }
}

fn square_cfg(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_presentation(&square_lattice());
    cfg.experiment = Some(kind);
    cfg.seed = Some(7);
    cfg
}

#[test]
fn compare_passes_for_the_square_lattice() {
    let mut cfg = square_cfg(ExperimentKind::Compare);
    cfg.rho = vec![0.02];
    cfg.samples = Some(100_000);
    let out = run_experiment(&cfg).unwrap();
    let stats = out.stats.as_ref().unwrap();
    assert_eq!(stats.rows.len(), 4);
    for row in &stats.rows {
        assert!(row.pass, "{row:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = |kind: ExperimentKind, name: &str, workers: usize| {
        let mut cfg = square_cfg(kind);
        cfg.samples = Some(2_000);
        cfg.trajectories = Some(5);
        cfg.events = Some(50);
        cfg.workers = Some(workers);
        cfg.outputs.csv = Some(dir.path().join(name));
        let out = run_experiment(&cfg).unwrap();
        out.write(&cfg.outputs).unwrap();
        std::fs::read(dir.path().join(name)).unwrap()
    };
    for kind in [ExperimentKind::Simulate, ExperimentKind::LimitTail, ExperimentKind::Flight] {
        let a = bytes(kind, "a.csv", 1);
        let b = bytes(kind, "b.csv", 2);
        assert_eq!(a, b, "{kind:?}");
        assert!(a.starts_with(b"# gridgas-schema: 1\n"));
    }
}

#[test]
fn csv_headers_match_the_documented_columns() {
    let header = |kind: ExperimentKind| -> Vec<String> {
        let mut cfg = square_cfg(kind);
        cfg.samples = Some(10);
        cfg.trajectories = Some(1);
        cfg.events = Some(2);
        let out = run_experiment(&cfg).unwrap();
        let t: &CsvTable = &out.tables[0].1;
        t.header.clone()
    };
    assert_eq!(header(ExperimentKind::Simulate), ["xi", "mark_j", "mark_i", "impact_w", "censored"]);
    assert_eq!(header(ExperimentKind::LimitTail), ["xi", "F_raw", "F_iso", "stderr", "n"]);
    assert_eq!(
        header(ExperimentKind::Flight),
        ["traj_id", "step", "xi", "mark_j", "mark_i", "w", "vx", "vy", "qx", "qy", "censored"]
    );
}

#[test]
fn siegel_experiment_reports_and_bad_marks_are_config_errors() {
    let mut cfg = square_cfg(ExperimentKind::SiegelCheck);
    cfg.samples = Some(20_000);
    let out = run_experiment(&cfg).unwrap();
    assert!(out.pass());
    assert_eq!(out.summary["report"]["predicted"], 6.0);
    cfg.mode = Some(gridgas::lab::ModeSpec::Mark {
        mark: [2, 1],
        shift: 0.0,
    });
    let err = run_experiment(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), exit::CONFIG);
}
