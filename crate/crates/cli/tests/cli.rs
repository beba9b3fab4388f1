//! End-to-end tests of the command line: every subcommand, the file formats
//! they exchange, and the exit-code contract (0 ok, 2 parameter, 3 I/O).

use std::path::Path;
use std::process::{Command, Output};

fn proximet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proximet"))
        .args(args)
        .output()
        .expect("spawn proximet")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn full_pipeline_generate_graph_perturb_filter_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.txt");
    let truth = dir.path().join("true.edges");
    let observed = dir.path().join("obs.edges");
    let filtered = dir.path().join("filt.edges");
    let scores = dir.path().join("scores.csv");
    let report = dir.path().join("eval.csv");

    assert_ok(&proximet(&[
        "generate",
        "--space",
        "circle",
        "--params",
        "circumference=1",
        "--n",
        "400",
        "--seed",
        "7",
        "--out",
        path_str(&points),
    ]));
    let text = std::fs::read_to_string(&points).unwrap();
    assert!(text.starts_with("# space: circle"));

    assert_ok(&proximet(&[
        "graph",
        "--points",
        path_str(&points),
        "--r",
        "0.1",
        "--out",
        path_str(&truth),
    ]));

    assert_ok(&proximet(&[
        "perturb",
        "--graph",
        path_str(&truth),
        "--p",
        "0.0",
        "--q",
        "0.005",
        "--seed",
        "3",
        "--out",
        path_str(&observed),
    ]));

    assert_ok(&proximet(&[
        "filter",
        "--graph",
        path_str(&observed),
        "--tau",
        "0.2",
        "--scores",
        path_str(&scores),
        "--out",
        path_str(&filtered),
    ]));
    let score_text = std::fs::read_to_string(&scores).unwrap();
    assert!(score_text.starts_with("u,v,intersection,union,jaccard"));

    let out = proximet(&[
        "evaluate",
        "--truth",
        path_str(&truth),
        "--test",
        path_str(&filtered),
        "--out",
        path_str(&report),
    ]);
    assert_ok(&out);
    let report_text = std::fs::read_to_string(&report).unwrap();
    let mut lines = report_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pairs,pairs_mode,r2approx,delta_rms,delta_n,good_index_count"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("79800,all,"), "row: {row}");
}

#[test]
fn graph_accepts_knn_radius_mode() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.txt");
    let edges = dir.path().join("g.edges");
    assert_ok(&proximet(&[
        "generate", "--space", "unit-square", "--n", "200", "--seed", "1", "--out",
        path_str(&points),
    ]));
    assert_ok(&proximet(&[
        "graph",
        "--points",
        path_str(&points),
        "--knn-mult",
        "2",
        "--k",
        "10",
        "--out",
        path_str(&edges),
    ]));
    // radius mode flags are mutually exclusive
    let out = proximet(&[
        "graph",
        "--points",
        path_str(&points),
        "--out",
        path_str(&edges),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluate_sampled_pairs_mode() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("p.txt");
    let truth = dir.path().join("g.edges");
    let report = dir.path().join("eval.csv");
    assert_ok(&proximet(&[
        "generate", "--space", "circle", "--n", "300", "--seed", "2", "--out", path_str(&points),
    ]));
    assert_ok(&proximet(&[
        "graph", "--points", path_str(&points), "--r", "0.1", "--out", path_str(&truth),
    ]));
    let out = proximet(&[
        "evaluate",
        "--truth",
        path_str(&truth),
        "--test",
        path_str(&truth),
        "--pairs",
        "500",
        "--seed",
        "9",
        "--out",
        path_str(&report),
    ]);
    assert_ok(&out);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("500,sampled:500,1,0,0,500"), "{text}");
}

#[test]
fn evaluate_dumps_hop_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    std::fs::write(&edges, "# n=3\n0 1\n1 2\n").unwrap();
    let report = dir.path().join("eval.csv");
    let hops_dir = dir.path().join("hops");
    assert_ok(&proximet(&[
        "evaluate",
        "--truth",
        path_str(&edges),
        "--test",
        path_str(&edges),
        "--out",
        path_str(&report),
        "--dump-hops",
        path_str(&hops_dir),
    ]));
    let truth_hops = std::fs::read_to_string(hops_dir.join("truth_hops.csv")).unwrap();
    assert_eq!(truth_hops, "0,1,2\n1,0,1\n2,1,0\n");
}

#[test]
fn bounds_text_and_csv() {
    let out = proximet(&[
        "bounds", "--n", "1000", "--s", "0.0831", "--L", "2", "--c", "0.5", "--p", "0.1", "--q",
        "0.01",
    ]);
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ball-mass threshold"));
    assert!(text.contains("EMPTY"), "desk-scale windows are empty: {text}");

    let out = proximet(&[
        "bounds", "--n", "1000", "--s", "0.0831", "--L", "2", "--c", "0.5", "--p", "0.1", "--q",
        "0.01", "--format", "csv",
    ]);
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,s,L,c,p,q,"));
    assert!(lines.next().unwrap().starts_with("1000,0.0831,2,"));
}

#[test]
fn sweep_from_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        r#"
n = 120
p = 0.0
q_grid = [0.0, 0.02]
tau = 0.1
trials = 2
master_seed = 5

[space]
kind = "circle"
circumference = 1.0

[r_mode]
explicit = 0.12
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    assert_ok(&proximet(&[
        "sweep",
        "--config",
        path_str(&config),
        "--out-dir",
        path_str(&out_dir),
    ]));
    for file in ["report.csv", "r2approx.svg", "delta_n.svg"] {
        assert!(out_dir.join(file).exists(), "{file} missing");
    }
    let report = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(report.starts_with("# proximet-report v1"));
}

#[test]
fn realnet_runs_on_toy_network() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("net.edges");
    std::fs::write(
        &edges,
        "# n=10\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9\n9 0\n0 2\n1 3\n2 4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    assert_ok(&proximet(&[
        "realnet",
        "--edges",
        path_str(&edges),
        "--q-grid",
        "0,0.05",
        "--tau",
        "0.05",
        "--trials",
        "2",
        "--seed",
        "11",
        "--out-dir",
        path_str(&out_dir),
    ]));
    let report = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(report.contains("realnet:"));
    // 2 q values x 2 trials x 2 variants
    let data_rows = report
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("q,"))
        .count();
    assert_eq!(data_rows, 8);
}

#[test]
fn parameter_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    std::fs::write(&edges, "0 1\n").unwrap();
    let out = proximet(&[
        "perturb", "--graph", path_str(&edges), "--p", "1.5", "--q", "0", "--seed", "1", "--out",
        path_str(&dir.path().join("o.edges")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = proximet(&[
        "generate", "--space", "dodecahedron", "--n", "10", "--seed", "1", "--out",
        path_str(&dir.path().join("p.txt")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = proximet(&[
        "bounds", "--n", "2", "--s", "0.1", "--L", "2", "--c", "0.5", "--p", "0.1", "--q", "0.01",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = proximet(&[
        "graph",
        "--points",
        "/nonexistent/points.txt",
        "--r",
        "0.1",
        "--out",
        path_str(&dir.path().join("g.edges")),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // malformed edge list reports the line and exits 3
    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "0 1\n1 oops\n").unwrap();
    let out = proximet(&[
        "filter", "--graph", path_str(&bad), "--tau", "0.1", "--out",
        path_str(&dir.path().join("f.edges")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn circle_points_rebuild_with_wraparound_metric() {
    // the seam pair (0.01, 0.99) must be joined when the graph command
    // reads back a circle header
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("p.txt");
    std::fs::write(
        &points,
        "# space: circle\n# circumference: 1\n0.01\n0.5\n0.99\n",
    )
    .unwrap();
    let edges = dir.path().join("g.edges");
    assert_ok(&proximet(&[
        "graph", "--points", path_str(&points), "--r", "0.05", "--out", path_str(&edges),
    ]));
    let text = std::fs::read_to_string(&edges).unwrap();
    assert!(text.contains("0 2"), "seam edge missing: {text}");
}
