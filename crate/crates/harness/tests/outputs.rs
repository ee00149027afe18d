use monocycle::verify_partition;
use monocycle_harness::{
    read_records, replay, run_sweep, sample_graph, summarize, write_outputs, Coloring, ExperimentConfig, GridSummary,
    TrialOutcome,
};

fn config() -> ExperimentConfig {
    ExperimentConfig::from_json(
        r#"{"n": [7, 40], "p": {"kind": "grid", "values": [0.0, 0.5]}, "r": 2,
            "coloring": "round-robin", "trials": 2, "seed": 11}"#,
    )
    .unwrap()
}

#[test]
fn outputs_round_trip() {
    let cfg = config();
    assert_eq!(cfg.coloring, Coloring::RoundRobin);
    let recs = run_sweep(&cfg).unwrap();
    assert_eq!(recs.len(), 8);

    let dir = tempfile::tempdir().unwrap();
    let paths = write_outputs(dir.path(), &recs).unwrap();

    let back = read_records(&paths.json).unwrap();
    assert_eq!(back.len(), recs.len());
    for (a, b) in recs.iter().zip(&back) {
        assert!(a.same_result(b));
    }

    let mut rdr = csv::Reader::from_path(&paths.csv).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    for col in [
        "grid_index",
        "trial",
        "n",
        "p",
        "seed",
        "status",
        "cycles",
        "bound",
        "stage",
        "error",
    ] {
        assert!(header.iter().any(|h| h == col), "missing column {col}");
    }
    assert_eq!(rdr.records().count(), recs.len());

    let summary: Vec<GridSummary> = serde_json::from_str(&std::fs::read_to_string(&paths.summary).unwrap()).unwrap();
    assert_eq!(summary, summarize(&recs));
}

#[test]
fn successful_covers_are_valid_and_replayable() {
    let recs = run_sweep(&config()).unwrap();
    for rec in &recs {
        assert!(rec.same_result(&replay(rec)));
        if let TrialOutcome::Success { cover, cycles, .. } = &rec.outcome {
            let s = &rec.setup;
            let g = sample_graph(s.n, s.p, s.r, s.coloring, s.seed).unwrap();
            assert_eq!(g.edge_count(), rec.edges);
            assert!(verify_partition(&g, cover).valid);
            assert_eq!(cover.len(), *cycles);
        }
    }
    // Small n goes through the exact route and always succeeds.
    assert!(recs.iter().filter(|r| r.setup.n == 7).all(|r| r.cycles().is_some()));
}
