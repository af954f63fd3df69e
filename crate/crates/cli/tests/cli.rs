use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cheqqers"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cheqqers-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn play_between_agents_finishes() {
    let out = bin()
        .args([
            "play", "--level", "2", "--size", "5", "--white", "random", "--black", "mcts:20",
            "--seed", "7",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("seed 7"));
    assert!(text.contains("game over after"), "{text}");
}

#[test]
fn play_is_reproducible() {
    let run = || {
        bin()
            .args([
                "play", "--level", "3", "--size", "6", "--white", "random", "--black", "random",
                "--seed", "42",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn human_plays_from_stdin() {
    let mut child = bin()
        .args([
            "play", "--level", "0", "--size", "4", "--black", "random", "--seed", "1",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"0\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("white: step"), "{text}");
}

#[test]
fn bad_arguments_fail() {
    assert!(!bin()
        .args(["play", "--level", "4", "--size", "5"])
        .output()
        .unwrap()
        .status
        .success());
    let out = bin()
        .args(["play", "--level", "1", "--size", "5", "--white", "expert"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn selfplay_experiment_writes_csv() {
    let dir = scratch("selfplay");
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        "sizes = [4, 5]\nlevels = [0, 1]\ngames = 20\nseed = 3\n",
    )
    .unwrap();
    let out = dir.join("out");
    let status = bin()
        .args(["experiment", "selfplay", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let mut rows = csv::Reader::from_path(out.join("selfplay.csv")).unwrap();
    let headers = rows.headers().unwrap().clone();
    assert_eq!(&headers[0], "board");
    assert_eq!(rows.records().count(), 4);
    assert!(out.join("selfplay.gp").exists());
    let first = std::fs::read(out.join("selfplay.csv")).unwrap();

    // a second run resumes and leaves the finished cells untouched
    let status = bin()
        .args(["experiment", "selfplay", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(first, std::fs::read(out.join("selfplay.csv")).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn matchup_and_tournament_experiments() {
    let dir = scratch("matchup");
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        "sizes = [4]\nlevels = [1]\ngames = 4\ngames_per_agent = 4\nagents = [\"mcts:10\", \"random\"]\ngnuplot = false\n",
    )
    .unwrap();
    for (kind, file, rows) in [
        ("matchup", "matchup.csv", 2),
        ("tournament", "tournament.csv", 2),
    ] {
        let out = dir.join(kind);
        let status = bin()
            .args(["experiment", kind, "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{kind}");
        let mut r = csv::Reader::from_path(out.join(file)).unwrap();
        assert_eq!(r.records().count(), rows, "{kind}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_config_key_is_reported() {
    let dir = scratch("badcfg");
    let config = dir.join("config.toml");
    std::fs::write(&config, "sizes = [4]\nboard_count = 3\n").unwrap();
    let out = bin()
        .args(["experiment", "selfplay", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("board_count"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            cheqqers_core::harness::ExperimentConfig::load(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert_eq!(n, 4);
}
