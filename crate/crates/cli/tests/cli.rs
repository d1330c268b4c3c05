use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepcrit"))
        .args(args)
        .output()
        .expect("spawn sepcrit")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, v.to_string()).unwrap();
    path
}

fn bell_file(dir: &Path) -> PathBuf {
    let mut re = vec![0.0; 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[i * 4 + j] = 0.5;
    }
    write_json(
        dir,
        "bell.json",
        &json!({ "dims": [2, 2], "re": re, "im": vec![0.0; 16] }),
    )
}

/// The Shifts state mixed with white noise at `p`.
fn noisy_shifts_file(dir: &Path, p: f64) -> PathBuf {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (zero, one, plus, minus) = ([1.0, 0.0], [0.0, 1.0], [s, s], [s, -s]);
    let kets = [
        [zero, one, plus],
        [one, plus, zero],
        [plus, zero, one],
        [minus, minus, minus],
    ];
    let mut rho = [[0.0f64; 8]; 8];
    for (i, row) in rho.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for k in &kets {
        let v: Vec<f64> = (0..8)
            .map(|i| k[0][i >> 2] * k[1][(i >> 1) & 1] * k[2][i & 1])
            .collect();
        for i in 0..8 {
            for j in 0..8 {
                rho[i][j] -= v[i] * v[j];
            }
        }
    }
    let re: Vec<f64> = (0..64)
        .map(|n| {
            let (i, j) = (n / 8, n % 8);
            p * rho[i][j] / 4.0 + if i == j { (1.0 - p) / 8.0 } else { 0.0 }
        })
        .collect();
    write_json(
        dir,
        "shifts.json",
        &json!({ "dims": [2, 2, 2], "re": re, "im": vec![0.0; 64] }),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "gen",
            "--type",
            "random-separable",
            "--dims",
            "3,3",
            "--seed",
            "7",
            "--out",
            path_str(out),
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    run(&[
        "gen",
        "--type",
        "random-separable",
        "--dims",
        "3,3",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_output_feeds_eval() {
    let dir = TempDir::new().unwrap();
    for (kind, dims, extra) in [
        ("random-separable", "2,2,2", ["--terms", "5"]),
        ("random-density", "2,3", ["--rank", "2"]),
    ] {
        let file = dir.path().join(format!("{kind}.json"));
        let mut args = vec![
            "gen",
            "--type",
            kind,
            "--dims",
            dims,
            "--seed",
            "3",
            "--out",
            path_str(&file),
        ];
        args.extend(extra);
        assert_eq!(code(&run(&args)), 0);
        let o = run(&["eval", "--state", path_str(&file), "--criterion", "ccnr"]);
        assert!(
            matches!(code(&o), 0 | 2),
            "stderr: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v = stdout_json(&o);
        assert_eq!(v["criterion"], "ccnr");
    }
}

#[test]
fn separable_sample_is_not_detected() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("s.json");
    run(&[
        "gen",
        "--type",
        "random-separable",
        "--dims",
        "3,3",
        "--terms",
        "20",
        "--seed",
        "1",
        "--out",
        path_str(&file),
    ]);
    for crit in ["ccnr", "zr", "ppt", "thm21"] {
        let o = run(&[
            "eval",
            "--state",
            path_str(&file),
            "--criterion",
            crit,
            "--alpha",
            "3",
            "--ell",
            "4",
        ]);
        assert_eq!(code(&o), 0, "{crit}");
        assert_eq!(stdout_json(&o)["detected"], false);
    }
}

#[test]
fn bell_state_ccnr() {
    let dir = TempDir::new().unwrap();
    let bell = bell_file(dir.path());
    let o = run(&["eval", "--state", path_str(&bell), "--criterion", "ccnr"]);
    assert_eq!(code(&o), 2);
    let v = stdout_json(&o);
    assert_eq!(v["detected"], true);
    assert!((v["margin"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["norm_value"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(v["bound"], 1.0);
}

#[test]
fn zero_alpha_matches_ccnr() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("r.json");
    run(&[
        "gen",
        "--type",
        "random-density",
        "--dims",
        "3,3",
        "--seed",
        "11",
        "--out",
        path_str(&file),
    ]);
    let ccnr = stdout_json(&run(&[
        "eval",
        "--state",
        path_str(&file),
        "--criterion",
        "ccnr",
    ]));
    for g in ["identity", "ones"] {
        let t = stdout_json(&run(&[
            "eval",
            "--state",
            path_str(&file),
            "--criterion",
            "thm21",
            "--alpha",
            "0",
            "--ell",
            "5",
            "--g",
            g,
        ]));
        let d = t["margin"].as_f64().unwrap() - ccnr["margin"].as_f64().unwrap();
        assert!(d.abs() < 1e-10, "{g}: {d}");
        assert_eq!(t["detected"], ccnr["detected"]);
    }
}

#[test]
fn pair_map_detects_noisy_shifts() {
    let dir = TempDir::new().unwrap();
    let file = noisy_shifts_file(dir.path(), 0.9);
    let o = run(&[
        "eval",
        "--state",
        path_str(&file),
        "--criterion",
        "thm31",
        "--pair",
        "B,C",
        "--alpha",
        "10",
        "--ell",
        "10",
    ]);
    assert_eq!(
        code(&o),
        2,
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = stdout_json(&o);
    assert_eq!(v["pair"], json!([1, 2]));
    assert_eq!(v["bound"], 1.0);
    assert_eq!(v["params"]["ell"], 10);

    // PPT on every cut, including B|CA via a permutation
    for extra in [
        vec!["--cut", "1"],
        vec!["--cut", "2"],
        vec!["--perm", "B,C,A", "--cut", "1"],
    ] {
        let mut args = vec!["eval", "--state", path_str(&file), "--criterion", "ppt"];
        args.extend(extra);
        assert_eq!(code(&run(&args)), 0);
    }

    let all = stdout_json(&run(&[
        "eval",
        "--state",
        path_str(&file),
        "--criterion",
        "hr",
        "--all-pairs",
    ]));
    assert_eq!(all["detected"], true);
}

#[test]
fn explicit_g_file() {
    let dir = TempDir::new().unwrap();
    let bell = bell_file(dir.path());
    let good = write_json(dir.path(), "g.json", &json!({ "re": [2.0, 1.0, 1.0, 2.0] }));
    let o = run(&[
        "eval",
        "--state",
        path_str(&bell),
        "--criterion",
        "thm21",
        "--alpha",
        "1",
        "--g",
        path_str(&good),
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["params"]["trace_g"], 4.0);

    let o = run(&[
        "eval",
        "--state",
        path_str(&bell),
        "--criterion",
        "thm21",
        "--alpha",
        "2",
        "--g",
        path_str(&good),
    ]);
    assert_eq!(code(&o), 1, "G - α²E is not PSD");
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    let o = run(&[
        "eval",
        "--state",
        path_str(&bell),
        "--criterion",
        "thm21",
        "--ell",
        "3",
        "--g",
        path_str(&good),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn sweep_outputs() {
    let o = run(&["sweep", "--family", "tiles", "--criterion", "ppt"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,criterion,alpha,ell,pair,p_star,published,delta")
    );
    assert_eq!(lines.next().unwrap().split(',').nth(5), Some("none"));

    let o = run(&[
        "sweep",
        "--family",
        "tiles",
        "--criterion",
        "ccnr",
        "--format",
        "json",
    ]);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "threshold");
    assert!((v["p_star"].as_f64().unwrap() - 0.8897).abs() < 5e-4);

    let o = run(&[
        "sweep",
        "--family",
        "ghz",
        "--epsilon",
        "0.1",
        "--criterion",
        "hr",
        "--pair",
        "B,C",
        "--format",
        "json",
    ]);
    let v = stdout_json(&o);
    assert!(
        (v["p_star"].as_f64().unwrap() - 0.3340).abs() < 5e-4,
        "{}",
        v["p_star"]
    );
}

#[test]
fn reproduce_table1_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t1.csv");
    let o = run(&["reproduce", "table1", "--out", path_str(&out)]);
    assert_eq!(
        code(&o),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "family,criterion,alpha,ell,pair,p_star,published,delta"
    );
    assert_eq!(lines.len(), 13);
    for line in &lines[1..] {
        let delta: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(delta.abs() <= 1e-5, "{line}");
    }
}

#[test]
fn reproduce_example21_json() {
    let o = run(&["reproduce", "example21", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let crits: Vec<&str> = rows
        .iter()
        .map(|r| r["criterion"].as_str().unwrap())
        .collect();
    assert!(crits.contains(&"ccnr") && crits.contains(&"zr"));
}

#[test]
fn errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bell = bell_file(dir.path());
    let bad_len = write_json(
        dir.path(),
        "bad.json",
        &json!({ "dims": [2, 2], "re": [1.0], "im": [0.0] }),
    );
    let not_psd = write_json(
        dir.path(),
        "np.json",
        &json!({
            "dims": [2, 2],
            "re": [1.5, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            "im": vec![0.0; 16],
        }),
    );
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec![
            "eval",
            "--state",
            "/nonexistent/state.json",
            "--criterion",
            "ccnr",
        ],
        vec!["eval", "--state", path_str(&garbage), "--criterion", "ccnr"],
        vec!["eval", "--state", path_str(&bad_len), "--criterion", "ccnr"],
        vec!["eval", "--state", path_str(&not_psd), "--criterion", "ppt"],
        vec![
            "eval",
            "--state",
            path_str(&bell),
            "--criterion",
            "ccnr",
            "--cut",
            "2",
        ],
        vec![
            "eval",
            "--state",
            path_str(&bell),
            "--criterion",
            "hr",
            "--pair",
            "A,C",
        ],
        vec!["eval", "--state", path_str(&bell), "--criterion", "bogus"],
        vec![
            "eval",
            "--state",
            path_str(&bell),
            "--criterion",
            "ccnr",
            "--all-pairs",
        ],
        vec!["sweep", "--family", "nope", "--criterion", "ccnr"],
        vec!["sweep", "--family", "ghz", "--criterion", "hr"],
        vec!["reproduce", "table9"],
        vec![
            "gen",
            "--type",
            "random-density",
            "--dims",
            "2,2",
            "--rank",
            "9",
        ],
        vec![
            "gen",
            "--type",
            "random-density",
            "--dims",
            "2,2",
            "--out",
            "/nonexistent/dir/x.json",
        ],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }

    // the validation escape hatch
    let o = run(&[
        "eval",
        "--state",
        path_str(&not_psd),
        "--criterion",
        "ppt",
        "--no-validate",
    ]);
    assert_eq!(code(&o), 2);
}
