//! Command-line behavior: help text, exit codes, artifacts and reproducibility.

use std::fs;
use std::path::Path;

use fragsat::cli::run_with_output;

const COMMANDS: [&str; 8] = ["phase-map", "region", "gen", "solve", "translate", "prompt", "stats", "ksat"];

fn run(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("fragsat").chain(args.iter().copied()).map(String::from).collect();
    let mut out = Vec::new();
    let code = run_with_output(&argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn help_text() -> String {
    let mut all = run(&["--help"]).1;
    for c in COMMANDS {
        let (code, text) = run(&[c, "--help"]);
        assert_eq!(code, 0);
        all.push_str(&format!("\n===== {c} =====\n{text}"));
    }
    all
}

#[test]
fn help_matches_golden_file() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/help.txt");
    let text = help_text();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&golden, &text).unwrap();
    }
    assert_eq!(text, fs::read_to_string(&golden).unwrap(), "regenerate with UPDATE_GOLDEN=1");
    for flag in [
        "--fragment",
        "--n1",
        "--n2",
        "--alpha",
        "--beta",
        "--step",
        "--samples",
        "--seed",
        "--out",
        "--grid",
        "--lo",
        "--hi",
        "--region",
        "--train",
        "--eval",
        "--test",
        "--out-dir",
        "--distinct-slots",
        "--in",
        "--text",
        "--emit-model",
        "--to",
        "--style",
        "--example-id",
        "--k",
        "--n ",
        "--ratios",
        "--jobs",
        "--config",
    ] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn solve_prints_verdict() {
    let (code, out) =
        run(&["solve", "--text", "Every artist is a beekeeper. Some artist is not a beekeeper.", "--fragment", "S"]);
    assert_eq!((code, out.as_str()), (0, "unsat\n"));
    let (code, out) = run(&["solve", "--text", "Every artist is a beekeeper.", "--fragment", "S", "--emit-model"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("sat\n[["), "{out}");
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(run(&["solve", "--fragment", "S", "--text", "x", "--frobnicate"]).0, 1);
    assert_eq!(run(&["ksat", "--n"]).0, 1);
    assert_eq!(run(&["solve", "--fragment", "S", "--text", "Every artist admires a baker"]).0, 2);
}

fn s_region(dir: &Path) -> std::path::PathBuf {
    let grid = dir.join("grid.csv");
    let region = dir.join("region.csv");
    let (code, _) = run(&[
        "phase-map",
        "--fragment",
        "S",
        "--n1",
        "6:10",
        "--alpha",
        "0.5:3",
        "--step",
        "0.25",
        "--samples",
        "60",
        "--seed",
        "3",
        "--out",
        p(&grid),
    ]);
    assert_eq!(code, 0);
    assert_eq!(run(&["region", "--grid", p(&grid), "--lo", "0.2", "--hi", "0.8", "--out", p(&region)]).0, 0);
    region
}

#[test]
fn empty_region_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let region = dir.path().join("region.csv");
    run(&[
        "phase-map",
        "--fragment",
        "S",
        "--n1",
        "6:8",
        "--alpha",
        "6:7",
        "--step",
        "1",
        "--samples",
        "10",
        "--out",
        p(&grid),
    ]);
    assert_eq!(run(&["region", "--grid", p(&grid), "--out", p(&region)]).0, 0);
    let out = dir.path().join("ds");
    let (code, _) = run(&["gen", "--fragment", "S", "--region", p(&region), "--train", "4", "--out-dir", p(&out)]);
    assert_eq!(code, 2);
    assert!(!out.join("train.jsonl").exists());
}

#[test]
fn gen_is_byte_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let region = s_region(dir.path());
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let out = dir.path().join(format!("ds{jobs}"));
        let code = run(&[
            "gen",
            "--fragment",
            "S",
            "--region",
            p(&region),
            "--n1",
            "6:10",
            "--train",
            "60",
            "--eval",
            "10",
            "--test",
            "10",
            "--seed",
            "11",
            "--keep-models",
            "--jobs",
            jobs,
            "--out-dir",
            p(&out),
        ])
        .0;
        assert_eq!(code, 0);
        outputs.push(["train", "eval", "test"].map(|s| fs::read(out.join(format!("{s}.jsonl"))).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let train = String::from_utf8(outputs[0][0].clone()).unwrap();
    assert_eq!(train.lines().count(), 60);
    assert_eq!(train.matches("\"label\":\"sat\"").count(), 30);

    let ds = dir.path().join("ds1");
    let stats = dir.path().join("stats.csv");
    assert_eq!(run(&["stats", "--in", p(&ds.join("train.jsonl")), "--out", p(&stats)]).0, 0);
    assert!(fs::read_to_string(&stats).unwrap().contains("S,m,mean,"));
    let prompts = dir.path().join("prompts.txt");
    let code = run(&["prompt", "--in", p(&ds.join("test.jsonl")), "--style", "satisfiable", "--out", p(&prompts)]).0;
    assert_eq!(code, 0);
    let text = fs::read_to_string(&prompts).unwrap();
    assert_eq!(text.matches("\nQ: Given the following set of sentences").count(), 10);
}

#[test]
fn config_artifacts_reproduce_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["ksat", "--n", "12", "--ratios", "3:5:1", "--samples", "10", "--seed", "4", "--out", p(&a)];
    assert_eq!(run(&args).0, 0);
    assert_eq!(run(&["ksat", "--config", p(&a), "--out", p(&b)]).0, 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // explicit flags override the file
    assert_eq!(run(&["ksat", "--config", p(&a), "--seed", "5", "--out", p(&b)]).0, 0);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn failed_runs_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "Every artist is a baker\n\nEvery artist admires a baker\n").unwrap();
    let out = dir.path().join("out.fol");
    let code = run(&["translate", "--in", p(&input), "--fragment", "S", "--out", p(&out)]).0;
    assert_eq!(code, 2);
    assert!(!out.exists());
    fs::write(&input, "Every artist is a baker\nSome baker is not an artist\n").unwrap();
    assert_eq!(run(&["translate", "--in", p(&input), "--fragment", "S", "--out", p(&out)]).0, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("all x. (artist(x) -> baker(x))"), "{text}");
}
