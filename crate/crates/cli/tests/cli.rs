use std::path::Path;
use std::process::{Command, Output};

fn pwcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwcolor"))
        .args(args)
        .env_remove("PWCOLOR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_complete_tripartite() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k333.txt");
    let out = pwcolor(&["generate", "--family", "partite", "--n", "9", "--k", "3", "--p", "1", "--out", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("m=27"));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("9 27 3\n"));
}

#[test]
fn generate_infeasible_regular_exits_2() {
    let out = pwcolor(&["generate", "--family", "regular", "--n", "6", "--k", "3", "--d", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(pwcolor(&["generate", "--family", "partite", "--n", "9"]).status.code(), Some(2));
    assert_eq!(pwcolor(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        pwcolor(&["generate", "--family", "partite", "--n", "9", "--k", "3", "--p", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for f in [&a, &b] {
        let out = pwcolor(&["generate", "--family", "regular", "--n", "120", "--k", "3", "--d", "8", "--seed", "7", "--out", path(f)]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_pwcolor"))
            .args(["generate", "--family", "partite", "--n", "40", "--k", "3", "--p", "0.2"])
            .env("PWCOLOR_SEED", env)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
    let explicit = pwcolor(&["generate", "--family", "partite", "--n", "40", "--k", "3", "--p", "0.2", "--seed", "5"]);
    assert_eq!(explicit.stdout, run("5"));
}

#[test]
fn solve_reports_and_exits() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    pwcolor(&["generate", "--family", "partite", "--n", "60", "--k", "3", "--p", "0.15", "--seed", "2", "--out", path(&g)]);
    let trace = dir.path().join("trace.csv");
    let dump = dir.path().join("c.txt");
    let out = pwcolor(&["solve", "--graph", path(&g), "--max-steps", "5000", "--seed", "1", "--trace", path(&trace), "--dump", path(&dump)]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields.len(), 3);
    assert_eq!((fields[0], fields[2]), ("true", "0"));
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("step,phase,energy,bad_count\n"));
    assert!(std::fs::read_to_string(&dump).unwrap().starts_with("3\n"));

    let again = pwcolor(&["solve", "--graph", path(&g), "--max-steps", "5000", "--seed", "1"]);
    assert_eq!(again.stdout, out.stdout);

    // K4 is not 3-colorable; mppw reports its 100 phase-2 rounds
    let k4 = dir.path().join("k4.txt");
    std::fs::write(&k4, "4 6 0\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    for (solver, steps) in [("sequential", 200), ("naive", 200), ("mppw", 100)] {
        let out = pwcolor(&["solve", "--graph", path(&k4), "--k", "3", "--solver", solver, "--max-steps", "200"]);
        assert_eq!(out.status.code(), Some(1), "{solver}");
        assert!(stdout(&out).starts_with(&format!("false {steps} ")), "{solver}");
    }
    let missing = pwcolor(&["solve", "--graph", path(&dir.path().join("nope.txt"))]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.txt");
    std::fs::write(&c5, "5 5 0\n0 1\n1 2\n2 3\n3 4\n0 4\n").unwrap();
    let two = stdout(&pwcolor(&["oracle", "--graph", path(&c5), "--k", "2"]));
    assert!(two.contains("colorable false") && two.contains("min_energy 1"), "{two}");
    let three = stdout(&pwcolor(&["oracle", "--graph", path(&c5), "--k", "3"]));
    assert!(three.contains("colorable true") && three.contains("min_energy 0"), "{three}");
}

#[test]
fn sweep_csv_is_reproducible() {
    let args = ["sweep", "--n", "30,40", "--k", "3", "--p", "0.1,0.2", "--samples", "4", "--seed", "3"];
    let one = pwcolor(&args);
    assert_eq!(one.status.code(), Some(0));
    let text = stdout(&one);
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("family,n,k,p_or_d,b,solver,"));

    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "3"]);
    assert_eq!(pwcolor(&with_workers).stdout, one.stdout);

    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = (dir.path().join("s.csv"), dir.path().join("s.json"));
    let mut to_files = args.to_vec();
    to_files.extend(["--csv", path(&csv), "--json", path(&json)]);
    assert_eq!(pwcolor(&to_files).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
    assert!(std::fs::read_to_string(&json).unwrap().contains("\"config\""));
}

#[test]
fn sweep_from_preset_and_dbar() {
    let out = pwcolor(&["sweep", "--n", "60", "--dbar", "2:4:1", "--samples", "2"]);
    assert_eq!(stdout(&out).lines().count(), 4);
    let list = stdout(&pwcolor(&["preset-list"]));
    for name in ["fig1", "fig2", "fig34", "fig5-8"] {
        assert!(list.contains(name));
    }
    assert_eq!(pwcolor(&["sweep", "--preset", "nope"]).status.code(), Some(2));
}

#[test]
fn help_lists_every_flag() {
    let cases: [(&str, &[&str]); 4] = [
        ("generate", &["--family", "--n", "--k", "--p", "--d", "--seed", "--out"]),
        ("solve", &["--graph", "--k", "--solver", "--b", "--temperature", "--max-steps", "--phase1-prob", "--seed", "--trace", "--dump"]),
        ("sweep", &["--preset", "--scale", "--family", "--n", "--k", "--p", "--d", "--dbar", "--solver", "--b", "--samples", "--max-steps", "--seed", "--workers", "--csv", "--json", "--raw"]),
        ("oracle", &["--graph", "--k", "--witness"]),
    ];
    for (cmd, flags) in cases {
        let help = stdout(&pwcolor(&[cmd, "--help"]));
        for flag in flags {
            assert!(help.contains(&format!("{flag} ")), "{cmd} --help lacks {flag}");
        }
    }
}
