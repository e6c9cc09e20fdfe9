use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chansparse"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_writes_one_file_per_drop_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--band", "subTHz", "--mode", "ick", "--drops", "3", "--seed", "11",
    ];
    let o = run(dir.path(), &[&args[..], &["--out", "a"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &[&args[..], &["--out", "b"]].concat());
    assert_eq!(o.status.code(), Some(0));
    for d in 0..3 {
        let name = format!("drop_{d}.txt");
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
        assert!(String::from_utf8(a)
            .unwrap()
            .starts_with("# chansparse drop v1"));
    }
    assert!(!dir.path().join("a/drop_3.txt").exists());
}

#[test]
fn generate_all_pairs_uses_subdirectories() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["generate", "--drops", "1"]);
    assert_eq!(o.status.code(), Some(0));
    for band in ["cmWave", "mmWave", "subTHz"] {
        for mode in ["equal", "ick"] {
            assert!(dir
                .path()
                .join(format!("out/{band}/{mode}/drop_0.txt"))
                .is_file());
        }
    }
}

#[test]
fn metrics_reads_generated_drops() {
    let dir = tempfile::tempdir().unwrap();
    run(
        dir.path(),
        &[
            "generate", "--band", "cmWave", "--mode", "equal", "--drops", "4",
        ],
    );
    let o = run(dir.path(), &["metrics", "out", "--variant", "without-los"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("cmWave,equal,without_los,"))
        .collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let g: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&g));
    }
    let csv = fs::read_to_string(dir.path().join("out/metrics.csv")).unwrap();
    assert!(csv.starts_with("band,mode,variant,drop_index,gini\n"));
}

#[test]
fn theory_check_single_instance_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "theory-check",
            "--powers",
            "0.2,0.8",
            "--rays",
            "4",
            "--ick",
            "3",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("OrderChanged"));
    let o = run(dir.path(), &["theory-check", "--cases", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("counterexamples           0"));
}

#[test]
fn montecarlo_then_report_agree() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "montecarlo",
            "--band",
            "mmWave",
            "--drops",
            "200",
            "--svg",
            "--out",
            "mc",
        ],
    );
    assert!(
        matches!(o.status.code(), Some(0 | 2)),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (mc_code, mc_table) = (o.status.code(), stdout(&o));
    for f in ["samples.csv", "summary.json"] {
        assert!(dir.path().join("mc").join(f).is_file(), "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mc/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["drops"], 200);
    assert_eq!(summary["reports"].as_array().unwrap().len(), 4);

    let o = run(dir.path(), &["report", "mc/samples.csv", "--out", "rep"]);
    assert_eq!(o.status.code(), mc_code);
    assert_eq!(stdout(&o), mc_table);
}

#[test]
fn extract_recovers_a_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "generate",
            "--fixture",
            "--band",
            "cmWave",
            "--drops",
            "1",
            "--seed",
            "3",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = run(
        dir.path(),
        &["extract", "out/fixture_0.txt", "--band", "cmWave"],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("clusters  3"), "{text}");
    assert!(text.contains("15 recovered (100.0%)"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    let o = run(
        dir.path(),
        &["generate", "--band", "no such band", "--drops", "1"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert_eq!(
        run(dir.path(), &["metrics", "missing.txt"]).status.code(),
        Some(3)
    );
    let o = run(
        dir.path(),
        &[
            "theory-check",
            "--powers",
            "0.2,0.8",
            "--rays",
            "4",
            "--ick",
            "0.1",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    fs::write(dir.path().join("bad.toml"), "[run]\ndrops = \"many\"\n").unwrap();
    assert_eq!(
        run(dir.path(), &["--config", "bad.toml", "generate"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn config_file_selects_bands() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[run]\nbands = [\"mmWave\"]\nmodes = [\"equal\"]\ndrops = 2\nout = \"cfg_out\"\n",
    )
    .unwrap();
    let o = run(dir.path(), &["--config", "run.toml", "generate"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(dir.path().join("cfg_out/drop_1.txt").is_file());
}
