use std::path::Path;
use std::process::{Command, Output};

fn lowent(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowent")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const CIRCLE: &str = "kind: circle\nradius: 1.0\ncenter: [0,0]\nspacing: 0.01\n";

#[test]
fn entropy_of_circle_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.txt", CIRCLE);
    let out = lowent(&["entropy", "--surface", "c.txt", "--csv", "e.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "e.csv");
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(lines.next().is_none());
    assert_eq!(header.len(), row.len());
    assert_eq!(&header[..3], ["value", "t0", "x0_0"]);
    let value: f64 = row[0].parse().unwrap();
    assert!((value - (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt()).abs() < 1e-3);
    let tail_col = header.iter().position(|h| *h == "tail").unwrap();
    assert!(row[tail_col].parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.txt", "kind: banana\n");
    let out = lowent(&["entropy", "--surface", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown kind 'banana' at line 1"));
    assert_eq!(lowent(&["verify", "--suite", "banana"], dir.path()).status.code(), Some(2));
    assert_eq!(lowent(&["entropy", "--surface", "missing.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(lowent(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(lowent(&["expander", "--n", "2", "--height", "1"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = lowent(&["expander", "--n", "2", "--slope", "1e6", "--L", "5", "--h", "0.01"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no graphical expander in bracket"));
}

#[test]
fn flow_track_schema() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.txt", "kind: circle\nradius: 1.0\ncenter: [0,0]\nspacing: 0.05\n");
    let out =
        lowent(&["flow", "--surface", "c.txt", "--T", "0.1", "--record", "0.05", "--csv", "track.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "track.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "time,sample,x0,x1,weight,abs_a");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(times.first(), Some(&0.0));
    assert!(times.windows(2).all(|w| w[1] >= w[0]));
    for r in &rows {
        // |A| = 1/radius on a shrinking circle
        let radius = r[2].hypot(r[3]);
        assert!((r[5] * radius - 1.0).abs() < 1e-2, "{r:?}");
    }
}

#[test]
fn reifenberg_scores_are_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.txt", CIRCLE);
    for (threads, name) in [("1", "a.csv"), ("4", "b.csv")] {
        let args =
            ["--threads", threads, "reifenberg", "--surface", "c.txt", "--rmax", "2", "--stride", "40", "--csv", name];
        assert_eq!(lowent(&args, dir.path()).status.code(), Some(0));
    }
    let (a, b) = (read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
    assert_eq!(a, b);
    assert!(a.starts_with("p0,p1,radius,score,pca_score,base_0,base_1,frame0_0,frame0_1\r\n"));
    // 16 base points, scales 2 down to 0.0625 (four spacings is 0.04)
    assert_eq!(a.lines().count(), 1 + 16 * 6);
}

#[test]
fn expander_rate_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["expander", "--slope", "1.0", "--n", "1", "--L", "20", "--h", "0.001", "--rate-fit", "--csv", "rate.csv"];
    let out = lowent(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "rate.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,dist,p,c_fit");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert!((rows[0][2] - 0.5).abs() <= 0.05);
    assert!(rows.windows(2).all(|w| w[1][0] < w[0][0] && w[1][1] < w[0][1]));
}

#[test]
fn verify_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = lowent(&["--seed", "5", "verify", "--suite", "expander", "--csv", "report.csv"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(if stdout.contains("overall: PASS") { 0 } else { 1 }));
    assert!(stdout.starts_with("suite: expander\nseed: 5\n"));
    let csv = read(dir.path(), "report.csv");
    let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["9", "10", "11", "13"]);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",5")));
}
