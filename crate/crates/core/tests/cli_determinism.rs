use std::process::Command;

fn run(args: &[&str], workers: usize, out: &std::path::Path) -> String {
    let status = Command::new(env!("CARGO_BIN_EXE_relsort"))
        .args(args)
        .args(["--workers", &workers.to_string(), "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success(), "{args:?}");
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn same_seed_same_bytes_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["heatmap", "--n", "10,20", "--c", "1,2", "--reps", "4", "--seed", "3"],
        &["schemes", "--n", "8", "--c", "2", "--reps", "3", "--samples", "300", "--seed", "3"],
        &["discovery", "--n", "8", "--c", "2", "--reps", "3", "--samples", "300", "--seed", "3"],
        &["timeseries", "--n", "5", "--T", "2,8", "--reps", "4", "--seed", "3"],
        &["bound", "--n", "300", "--c", "2", "--buckets", "3", "--min-bucket-edges", "50", "--reps", "40", "--seed", "3"],
    ];
    for args in cases {
        let a = run(args, 1, &dir.path().join("a.csv"));
        let b = run(args, 3, &dir.path().join("b.csv"));
        assert_eq!(a, b, "{args:?}");
        assert!(a.lines().any(|l| l == "experiment,graph,n,c,scheme,T,rep,seed,metric,value,reason"));
    }
}

#[test]
fn toml_config_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "n = [6]\nc = [1.0]\nreps = 2\nseed = 9\n").unwrap();
    let out = dir.path().join("o.csv");
    let text = run(&["heatmap", "--config", cfg.to_str().unwrap(), "--reps", "3"], 2, &out);
    assert!(text.contains("# n = [6]"));
    assert!(text.contains("# reps = 3"));
    assert!(text.contains("# seed = 9"));
}

#[test]
fn bad_flags_fail() {
    let status = Command::new(env!("CARGO_BIN_EXE_relsort"))
        .args(["heatmap", "--graph", "tree"])
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("unknown graph kind"));
}
