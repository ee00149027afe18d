use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn monocycle(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monocycle"))
        .args(args)
        .current_dir(dir)
        .env_remove("MONOCYCLE_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    // A red 4-cycle plus a blue pendant edge.
    fs::write(dir.path().join("g.txt"), "5 2\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n3 4 2\n").unwrap();
    let v = json(&monocycle(&["solve", "--graph", "g.txt"], dir.path()));
    assert_eq!(v["optimum"], 2);
    assert_eq!(v["cover"].as_array().unwrap().len(), 2);

    let out = monocycle(&["solve", "--graph", "missing.txt"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn sampled_graphs_partition_validly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_ok(&monocycle(
        &[
            "sample", "--n", "400", "--p", "0.3", "--r", "2", "--seed", "4", "--out", "g.txt",
        ],
        d,
    ));
    let again = monocycle(&["sample", "--n", "400", "--p", "0.3", "--r", "2", "--seed", "4"], d);
    assert_eq!(fs::read(d.join("g.txt")).unwrap(), again.stdout);

    let v = json(&monocycle(
        &["partition", "--graph", "g.txt", "--r", "2", "--seed", "1"],
        d,
    ));
    assert_eq!(v["valid"], true);
    let cover = v["cover"].as_array().unwrap();
    assert_eq!(v["cycles"].as_u64().unwrap() as usize, cover.len());
    let covered: usize = cover.iter().map(|c| c["vertices"].as_array().unwrap().len()).sum();
    assert_eq!(covered, 400);

    let v = json(&monocycle(&["pipeline", "--graph", "g.txt", "--r", "2"], d));
    let w = v["w"].as_array().unwrap().len();
    let covered: usize = v["cover"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["vertices"].as_array().unwrap().len())
        .sum();
    assert_eq!(covered + w, 400);
    assert!(v["closure"]["cycles"].as_u64() <= v["closure"]["bound"].as_u64());

    // Mismatched colour count is an error.
    assert!(!monocycle(&["partition", "--graph", "g.txt", "--r", "3"], d)
        .status
        .success());
}

fn json_ok(out: &Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn checks_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_ok(&monocycle(
        &[
            "sample", "--n", "200", "--p", "0.5", "--r", "2", "--seed", "9", "--out", "g.txt",
        ],
        d,
    ));
    fs::write(
        d.join("x.txt"),
        (0..50).map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
    )
    .unwrap();
    fs::write(
        d.join("y.txt"),
        (50..100).map(|v| v.to_string()).collect::<Vec<_>>().join("\n"),
    )
    .unwrap();
    fs::write(d.join("pairs.txt"), "0 1\n2 3\n").unwrap();
    fs::write(d.join("y6.txt"), "100 101 102 103 104 105").unwrap();

    let v = json(&monocycle(
        &[
            "check",
            "pair-density",
            "--graph",
            "g.txt",
            "--x",
            "x.txt",
            "--y",
            "y.txt",
            "--p",
            "0.5",
        ],
        d,
    ));
    assert!((v["expected"].as_f64().unwrap() - 1250.0).abs() < 1e-9);
    assert_eq!(v["pass"], true);

    let v = json(&monocycle(
        &[
            "check",
            "triples",
            "--graph",
            "g.txt",
            "--pairs",
            "pairs.txt",
            "--y",
            "y6.txt",
        ],
        d,
    ));
    assert!(v["sum"].as_u64().is_some());

    let v = json(&monocycle(
        &["check", "bad-set", "--graph", "g.txt", "--x", "x.txt", "--k", "1"],
        d,
    ));
    assert!(v["y"].is_array());

    // Overlapping sets are rejected.
    let out = monocycle(
        &[
            "check",
            "pair-density",
            "--graph",
            "g.txt",
            "--x",
            "x.txt",
            "--y",
            "x.txt",
        ],
        d,
    );
    assert!(!out.status.success());
}

#[test]
fn absorb_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_ok(&monocycle(
        &[
            "sample", "--n", "300", "--p", "0.4", "--r", "2", "--seed", "2", "--out", "g.txt",
        ],
        d,
    ));
    fs::write(
        d.join("u.txt"),
        (0..150).map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
    )
    .unwrap();
    fs::write(d.join("w.txt"), "200 201 202 203 204 205").unwrap();
    let v = json(&monocycle(
        &[
            "absorb", "--graph", "g.txt", "--U", "u.txt", "--W", "w.txt", "--beta", "0.5", "--seed", "1",
        ],
        d,
    ));
    assert_eq!(v["bounds"]["cycles"]["holds"], true);
    let mut covered: Vec<u64> = v["cover"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["vertices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()))
        .collect();
    for w in 200..206 {
        assert!(covered.contains(&w));
    }
    covered.sort_unstable();
    assert!(covered.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn allocate_reads_reduced_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // K_4 in one colour with matching {01, 23}.
    fs::write(
        d.join("r.txt"),
        "4 1\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\nmatching:\n0 1\n2 3\n",
    )
    .unwrap();
    fs::write(d.join("sizes.txt"), "5760 5800 6000 6400").unwrap();
    let v = json(&monocycle(
        &["allocate", "--reduced", "r.txt", "--sizes", "sizes.txt", "--m", "5760"],
        d,
    ));
    assert!(v["problems"].as_array().unwrap().is_empty());
    assert_eq!(v["allocation"]["sizes"][3], 6400);

    // Below 90t³s the strict mode refuses and the relaxed one proceeds.
    fs::write(d.join("small.txt"), "40 40 40 40").unwrap();
    let out = monocycle(
        &["allocate", "--reduced", "r.txt", "--sizes", "small.txt", "--m", "40"],
        d,
    );
    assert!(!out.status.success());
    let v = json(&monocycle(
        &[
            "allocate",
            "--reduced",
            "r.txt",
            "--sizes",
            "small.txt",
            "--m",
            "40",
            "--relaxed",
        ],
        d,
    ));
    assert!(v["allocation"]["cycles"].is_array());
}

#[test]
fn sweep_writes_outputs_and_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"n": [9, 200], "p": {"kind": "grid", "values": [0.01, 0.5]}, "r": 2, "trials": 2, "seed": 3}"#,
    )
    .unwrap();
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_monocycle"))
            .args(["sweep", "--config", "cfg.json", "--out", workers])
            .current_dir(d)
            .env("MONOCYCLE_WORKERS", workers)
            .output()
            .unwrap();
        json(&out)
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one["records"], 8);
    assert_eq!(one["summary"], four["summary"]);
    let strip = |text: String| -> Vec<String> {
        // Everything but the wall-time column.
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let a = strip(fs::read_to_string(d.join("1/records.csv")).unwrap());
    let b = strip(fs::read_to_string(d.join("4/records.csv")).unwrap());
    assert_eq!(a.len(), 9);
    assert_eq!(a, b);

    // Trial failures still exit 0; configuration errors do not.
    assert!(one["failures"].as_u64().unwrap() >= 1);
    fs::write(
        d.join("bad.json"),
        r#"{"n": [10], "p": {"kind": "grid", "values": [2.0]}, "r": 2, "trials": 1}"#,
    )
    .unwrap();
    assert!(!monocycle(&["sweep", "--config", "bad.json", "--out", "x"], d)
        .status
        .success());
    let out = Command::new(env!("CARGO_BIN_EXE_monocycle"))
        .args(["sweep", "--config", "cfg.json", "--out", "y"])
        .current_dir(d)
        .env("MONOCYCLE_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn threshold_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&monocycle(
        &["threshold", "--n", "8", "--r", "2", "--target", "8", "--trials", "4"],
        dir.path(),
    ));
    assert_eq!(v["outcome"]["result"], "estimate");
    assert_eq!(v["outcome"]["p"], 0.01);
    let v = json(&monocycle(
        &["threshold", "--n", "8", "--r", "2", "--target", "0", "--trials", "4"],
        dir.path(),
    ));
    assert_eq!(v["outcome"]["result"], "undetermined");
}
