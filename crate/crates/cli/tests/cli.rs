use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use twostack::table::EstimateTable;

fn twostack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn write_series(dir: &TempDir, name: &str, values: &[&str]) -> PathBuf {
    let f = path(dir, name);
    fs::write(&f, values.join("\n") + "\n").unwrap();
    f
}

const S: [&str; 20] = [
    "1", "1", "2", "6", "24", "120", "720", "5018", "39374", "337816", "3092691", "29659731",
    "294107811", "2988678546", "30935695794", "324832481490", "3450158410649",
    "36993206191004", "399827092167771", "4351269802153188",
];

#[test]
fn enumerate_prints_the_series() {
    let o = twostack(&["enumerate", "--n", "9", "--workers", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("# twostack enumerate\n"));
    assert_eq!(data_lines(&out), &S[..10]);
}

#[test]
fn enumerate_methods_and_counts() {
    let direct = twostack(&["enumerate", "--n", "8", "--method", "direct", "--start-len", "3"]);
    assert_eq!(code(&direct), 0);
    assert_eq!(data_lines(&stdout(&direct)), &S[..9]);
    let t = twostack(&["enumerate", "--n", "4", "--counts", "increment-avoiding"]);
    assert_eq!(data_lines(&stdout(&t)), ["1", "1", "1", "3", "11"]);
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let series = write_series(&dir, "s.txt", &S[..14]);
    let mut files = Vec::new();
    for w in ["1", "3"] {
        let e = path(&dir, &format!("e{w}.txt"));
        let x = path(&dir, &format!("x{w}.csv"));
        let o = twostack(&["enumerate", "--n", "9", "--start-len", "2", "--workers", w, "--out", p(&e)]);
        assert_eq!(code(&o), 0);
        let o = twostack(&[
            "extend", "--series", p(&series), "--orders", "2,3", "--predict", "3", "--workers", w, "--out", p(&x),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        files.push((fs::read(&e).unwrap(), fs::read(&x).unwrap()));
    }
    assert_eq!(files[0], files[1]);

    let sidecar = fs::read_to_string(path(&dir, "e3.txt.manifest.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&sidecar).unwrap();
    assert_eq!(json["worker_count"], 3);
    assert_eq!(json["parameters"]["n"], "9");
    assert!(json["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn extend_output_is_an_estimate_table() {
    let dir = TempDir::new().unwrap();
    let series = write_series(&dir, "s.txt", &S[..14]);
    for cmd in ["extend", "ratios-predict"] {
        let o = twostack(&[cmd, "--series", p(&series), "--orders", "2", "--predict", "2"]);
        assert_eq!(code(&o), 0);
        let t = EstimateTable::parse_csv(&stdout(&o)).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.n).collect::<Vec<_>>(), [14, 15]);
        assert!(t.rows.iter().all(|r| r.samples >= 2));
    }
}

#[test]
fn transform_round_trips() {
    let dir = TempDir::new().unwrap();
    let s = write_series(&dir, "s.txt", &S[..12]);
    let t = path(&dir, "t.txt");
    let back = path(&dir, "back.txt");
    assert_eq!(code(&twostack(&["transform", "--series", p(&s), "--direction", "inverse", "--out", p(&t)])), 0);
    assert_eq!(data_lines(&fs::read_to_string(&t).unwrap())[..5], ["1", "1", "1", "3", "11"]);
    assert_eq!(code(&twostack(&["transform", "--series", p(&t), "--out", p(&back)])), 0);
    assert_eq!(data_lines(&fs::read_to_string(&back).unwrap()), &S[..12]);
}

#[test]
fn analyze_modes() {
    let dir = TempDir::new().unwrap();
    let s = write_series(&dir, "s.txt", &S);
    let out = path(&dir, "r.csv");
    let o = twostack(&["analyze", "--series", p(&s), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("mu from linear intercepts"));
    let csv = fs::read_to_string(&out).unwrap();
    let rows = data_lines(&csv);
    assert_eq!(rows[0], "n,one_over_n,r_n,std_dev");
    assert_eq!(rows.len(), 20);

    let o = twostack(&["analyze", "--series", p(&s), "--mode", "gradient", "--mu", "12.45"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("n,one_over_n,g_n,std_dev"));

    let o = twostack(&["analyze", "--series", p(&s), "--mode", "amplitude", "--mu", "12.45", "--g", "-2.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\nmu,1.245000000000000e1\n"));

    // The series against itself: quotient ratios are all 1.
    let o = twostack(&[
        "analyze", "--series", p(&s), "--mode", "quotient", "--reference", p(&s), "--ref-mu", "12", "--ref-g", "-2",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(data_lines(&out)[1..].iter().all(|l| l.split(',').nth(2) == Some("1.000000000000000e0")));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let s = write_series(&dir, "s.txt", &S[..10]);
    let bad = write_series(&dir, "bad.txt", &["1", "two", "3"]);
    let missing = path(&dir, "missing.txt");

    assert_eq!(code(&twostack(&["enumerate"])), 2);
    assert_eq!(code(&twostack(&["enumerate", "--n", "5", "--workers", "0"])), 2);
    assert_eq!(code(&twostack(&["frobnicate"])), 2);
    assert_eq!(code(&twostack(&["verify", "no-such-fixture"])), 2);
    assert_eq!(code(&twostack(&["extend", "--series", p(&s), "--orders", "7"])), 2);
    assert_eq!(code(&twostack(&["extend", "--series", p(&s), "--trim", "0.5"])), 2);
    assert_eq!(code(&twostack(&["analyze", "--series", p(&s), "--mode", "gradient"])), 2);

    assert_eq!(code(&twostack(&["transform", "--series", p(&bad)])), 3);
    assert_eq!(code(&twostack(&["transform", "--series", p(&missing)])), 3);

    assert_eq!(code(&twostack(&["enumerate", "--n", "8", "--start-len", "1", "--max-stored", "10"])), 4);

    assert_eq!(code(&twostack(&["verify", "transforms"])), 0);
    assert_eq!(code(&twostack(&["--help"])), 0);
}
