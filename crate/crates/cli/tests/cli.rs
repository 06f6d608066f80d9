use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_logmetric"));
    c.env_remove("LOGMETRIC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logmetric-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

/// Value of `column` in data row `row` of a CSV table.
fn cell(csv: &str, row: usize, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == column).unwrap();
    lines.nth(row).unwrap().split(',').nth(k).unwrap().to_owned()
}

fn real(csv: &str, row: usize, column: &str) -> f64 {
    cell(csv, row, column).parse().unwrap()
}

/// 60 points on a deterministic spiral.
fn spiral() -> String {
    let mut s = String::from("x0,x1\n");
    for i in 0..60 {
        let t = i as f64 * 0.37;
        s += &format!("{},{}\n", t.cos() * (1.0 + t), t.sin() * (1.0 + 0.5 * t));
    }
    s
}

#[test]
fn horizon_example() {
    let o = run(&["horizon", "--L", "1", "--C", "0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((real(&out, 0, "d_star") - 2.3356).abs() < 1e-3);
    assert_eq!(cell(&out, 0, "k2"), "7");
}

#[test]
fn lineultra_example() {
    let out = stdout(&run(&["lineultra", "--N", "2"]));
    assert!((real(&out, 0, "delta_u") - 0.405465).abs() < 1e-6);
    assert_eq!(cell(&out, 0, "witness_y"), "2");
}

#[test]
fn lens_example() {
    let o = run(&["lens", "--n-list", "4", "--h", "0.05"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((real(&out, 0, "ecc_d") - 2.0).abs() < 0.15);
    assert_eq!(cell(&out, 0, "weak_ecc_d"), "");
}

#[test]
fn exit_codes() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[usage]: "));
    assert_eq!(stderr(&o).lines().count(), 1);

    let dir = scratch("exit");
    let bad = write(&dir, "bad.csv", "x0,x1\n0,0\n1,abc\n");
    let o = run(&["delta", "--points", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[parse]: line 3"), "{}", stderr(&o));

    let o = run(&["grid", "--sides", "21", "--scan", "full"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[guard]: "));

    let mut big = String::from("x0\n");
    for i in 0..401 {
        big += &format!("{i}\n");
    }
    let big = write(&dir, "big.csv", &big);
    assert_eq!(run(&["delta", "--points", &big]).status.code(), Some(2));
    assert!(run(&["delta", "--points", &big, "--base", "0"]).status.success());

    let o = run(&["delta"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[usage]: "));

    let asym = write(&dir, "asym.csv", "0,1\n2,0\n");
    let o = run(&["validate", "--matrix", &asym]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(cell(&stdout(&o), 0, "valid"), "false");
    assert!(stderr(&o).starts_with("error[metric]: "));
    assert_eq!(run(&["ultra", "--matrix", &asym]).status.code(), Some(1));

    assert!(run(&["--help"]).status.success());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = scratch("threads");
    let pts = write(&dir, "pts.csv", &spiral());
    let mut files = Vec::new();
    for (k, threads) in ["1", "4"].into_iter().enumerate() {
        for cmd in [
            vec!["delta"],
            vec!["ultra", "--log"],
            vec!["ecc", "--ball1", "0,5", "--ball2", "20,6"],
            vec!["quasiball", "--ball1", "3,4", "--ball2", "30,9", "--metric", "log"],
            vec!["weakecc", "--ball1", "0,5", "--ball2", "20,6", "--lambda", "2"],
        ] {
            let out = dir.join(format!("{}-{k}.csv", cmd[0]));
            let mut args = cmd.clone();
            args.extend(["--points", &pts, "--threads", threads, "-o", out.to_str().unwrap()]);
            let o = run(&args);
            assert!(o.status.success(), "{}", stderr(&o));
            files.push((cmd[0], fs::read(&out).unwrap()));
        }
    }
    let env = bin()
        .args(["delta", "--points", &pts])
        .env("LOGMETRIC_THREADS", "3")
        .output()
        .unwrap();
    let (first, second) = files.split_at(files.len() / 2);
    for (a, b) in first.iter().zip(second) {
        assert_eq!(a, b, "{}", a.0);
    }
    assert_eq!(env.stdout, first[0].1);
}

#[test]
fn numbers_round_trip_and_json_mirrors_csv() {
    let dir = scratch("json");
    let pts = write(&dir, "pts.csv", &spiral());
    let csv = stdout(&run(&["delta", "--points", &pts, "--log"]));
    let json = stdout(&run(&["delta", "--points", &pts, "--log", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["delta"].as_f64().unwrap(), real(&csv, 0, "delta"));
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, header);

    // Full-precision reals: transform then load the matrix back.
    let m = dir.join("m.csv");
    assert!(run(&["transform", "--points", &pts, "-o", m.to_str().unwrap()]).status.success());
    let again = stdout(&run(&["delta", "--matrix", m.to_str().unwrap()]));
    assert_eq!(again, csv);
}

#[test]
fn summary_goes_to_stdout() {
    let dir = scratch("summary");
    let out = dir.join("h.json");
    let o = run(&["horizon", "--L", "2", "--C", "1", "--format", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("L=2 C=1 c_prime=9 k1=6 k2=66 d_star=4.54"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v[0]["k2"].as_f64(), Some(66.0));
}

#[test]
fn tame_and_lengths() {
    let dir = scratch("tame");
    let path = write(&dir, "path.csv", "t,x,y\n0,0,0\n0.5,0.4,0.3\n1,1,0\n2,2,0\n3,3,0.5\n");
    let tamed = dir.join("tamed.csv");
    let o = run(&["tame", "--input", &path, "--L", "2", "--C", "1", "--path-output", tamed.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(cell(&out, 0, "passed"), "true");
    assert_eq!(cell(&out, 0, "c_prime"), "9");
    let written = fs::read_to_string(tamed).unwrap();
    assert_eq!(written, "t,x,y\n0,0,0\n1,1,0\n2,2,0\n3,3,0.5\n");

    let gap = write(&dir, "gap.csv", "0,0,0\n2,1,0\n");
    let o = run(&["tame", "--input", &gap, "--L", "2", "--C", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing sample at parameter 1"));

    let seg = write(&dir, "seg.csv", "0,0,0\n1,6,8\n");
    let out = stdout(&run(&["lengths", "--input", &seg]));
    assert_eq!(real(&out, 0, "length_d"), 10.0);
    let dp = real(&out, 0, "length_dprime");
    assert!((10.0 - 1e-3..=10.0).contains(&dp));
    assert!(dp > real(&out, 0, "chord_dprime"));
}

#[test]
fn grid_and_region_files() {
    let out = stdout(&run(&["grid", "--sides", "2,4"]));
    assert!((real(&out, 0, "delta_d") - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    assert_eq!(cell(&out, 1, "method"), "full");
    assert!(real(&out, 1, "delta_dprime") < real(&out, 1, "delta_d"));

    let dir = scratch("region");
    let pts = write(&dir, "line.csv", "x0\n0\n1\n2\n3\n4\n");
    let region = write(&dir, "r.txt", "1\n2\n3\n");
    let out = stdout(&run(&["ecc", "--points", &pts, "--region", &region]));
    assert_eq!(cell(&out, 0, "ecc"), "0");
    assert_eq!(cell(&out, 0, "inner_center"), "2");
    let out = stdout(&run(&["quasiball", "--points", &pts, "--region", &region]));
    assert_eq!(cell(&out, 0, "defect"), "0");
    let bad = write(&dir, "bad.txt", "9\n");
    assert_eq!(run(&["ecc", "--points", &pts, "--region", &bad]).status.code(), Some(1));
}
