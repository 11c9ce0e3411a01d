//! CLI acceptance: the benchmark table (second half of criterion 7) and the
//! file-format, generator and exit-code contract (criterion 8), exercised
//! through the real binary.

use krylman_cli::matfile;
use krylman_core::kalman::naive_kalman_capped;
use std::path::Path;
use std::process::{Command, Output};

fn krylman(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krylman"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn criterion_7_bench_table_emission() {
    let dir = tempfile::tempdir().unwrap();
    let out = krylman(&["bench", "--sizes", "24,32", "--reps", "2"], dir.path());
    assert!(out.status.success(), "bench failed: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for needle in ["kalman-kg", "kalman-luk", "charpoly-kg", "fastest kalman route"] {
        assert!(text.contains(needle), "bench table missing '{}':\n{}", needle, text);
    }
    // One row per algorithm per size, plus a winner note per size.
    let kg_rows = text.lines().filter(|l| l.contains("kalman-kg") && !l.contains("fastest")).count();
    assert_eq!(kg_rows, 2, "{}", text);
    assert_eq!(text.matches("fastest kalman route").count(), 2, "{}", text);

    let csv = krylman(&["bench", "--sizes", "24", "--reps", "1", "--csv"], dir.path());
    assert!(csv.status.success());
    let csv_text = stdout(&csv);
    assert!(csv_text.starts_with("n,algorithm,median_ms\n"), "{}", csv_text);
    assert_eq!(csv_text.lines().count(), 4, "{}", csv_text);
    println!("criterion 7 (bench emits the comparison table): pass");
}

#[test]
fn criterion_8_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);

    // Round trip is byte exact on canonical files.
    let canonical = "2 2 7\n1 0\n0 2\n";
    std::fs::write(path("a.mat"), canonical).unwrap();
    let out = krylman(
        &["gen", "--n", "2", "--m", "1", "--prime", "7", "--rank", "1", "--seed", "5", "ga.mat", "gb.mat"],
        dir.path(),
    );
    assert!(out.status.success());
    let parsed = matfile::parse_matrix(canonical).unwrap();
    assert_eq!(matfile::format_matrix(&parsed), canonical);
    for name in ["ga.mat", "gb.mat"] {
        let bytes = std::fs::read(path(name)).unwrap();
        let m = matfile::read_matrix(&path(name)).unwrap();
        assert_eq!(matfile::format_matrix(&m).into_bytes(), bytes, "{} not canonical", name);
    }

    // gen --rank R produces controllable dimension exactly R under the
    // brute-force oracle, up to n = 64.
    for (n, m, rank, seed) in [(8usize, 2usize, 5usize, 1u64), (16, 3, 0, 2), (33, 2, 33, 3), (64, 2, 40, 4)] {
        let out = krylman(
            &[
                "gen", "--n", &n.to_string(), "--m", &m.to_string(), "--prime", "65521",
                "--rank", &rank.to_string(), "--seed", &seed.to_string(), "a.mat", "b.mat",
            ],
            dir.path(),
        );
        assert!(out.status.success());
        let a = matfile::read_matrix(&path("a.mat")).unwrap();
        let b = matfile::read_matrix(&path("b.mat")).unwrap();
        let kf = naive_kalman_capped(&a, &b, 64).unwrap();
        assert_eq!(kf.r, rank, "gen --rank {} produced r = {}", rank, kf.r);
    }

    // Exit codes: 0 success, 1 verification failure, 2 usage error.
    std::fs::write(path("a.mat"), "2 2 7\n1 0\n0 2\n").unwrap();
    std::fs::write(path("b.mat"), "2 1 7\n1\n0\n").unwrap();
    let ok = krylman(
        &["kalman", "a.mat", "b.mat", "--algorithm", "kg", "--emit", "res.json"],
        dir.path(),
    );
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "r=1 degrees=(1)");

    let verified = krylman(&["verify", "res.json", "a.mat", "b.mat"], dir.path());
    assert_eq!(verified.status.code(), Some(0));

    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path("res.json")).unwrap()).unwrap();
    doc["H"][0][0] = serde_json::json!(3);
    std::fs::write(path("tampered.json"), serde_json::to_string(&doc).unwrap()).unwrap();
    let tampered = krylman(&["verify", "tampered.json", "a.mat", "b.mat"], dir.path());
    assert_eq!(tampered.status.code(), Some(1), "tampered document must fail verification");

    let missing = krylman(&["charpoly", "no-such-file.mat"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    let truncated = path("trunc.mat");
    std::fs::write(&truncated, "2 2 7\n1 0\n").unwrap();
    let parse = krylman(&["charpoly", "trunc.mat"], dir.path());
    assert_eq!(parse.status.code(), Some(2));
    let usage = krylman(&["kalman", "a.mat", "b.mat"], dir.path());
    assert_eq!(usage.status.code(), Some(2), "missing --algorithm is a usage error");

    println!("criterion 8 (matrix round trip, generator rank, exit codes): pass");
}
