//! Command-line behaviour: determinism, exit codes and report formats.

use kamnf::cli::execute;

const QUARTIC: &[&str] = &[
    "--n",
    "2",
    "--alpha",
    "1,1.4142135623730951",
    "--hamiltonian",
    "q1^2*p1^2",
];

fn args<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["kamnf", cmd];
    v.extend_from_slice(QUARTIC);
    v.extend_from_slice(extra);
    v
}

fn fast(cmd: &str) -> Vec<&'static str> {
    match cmd {
        "density" => vec!["--K", "4", "--samples", "400", "--seed", "5"],
        "verify" => vec!["--T", "2", "--dt", "0.05", "--radii", "0.1,0.05"],
        _ => vec![],
    }
}

fn run(cmd: &str, extra: &[&str]) -> (i32, String, String) {
    let mut all = fast(cmd);
    all.extend_from_slice(extra);
    let (code, out, err) = execute(args(cmd, &all));
    (code, String::from_utf8(out).unwrap(), err)
}

#[test]
fn every_command_is_deterministic_in_every_format() {
    for cmd in ["nf", "freq", "bruno", "density", "verify"] {
        for format in ["text", "json", "csv"] {
            let a = run(cmd, &["--format", format]);
            let b = run(cmd, &["--format", format]);
            assert_eq!(a, b, "{cmd} --format {format}");
            // csv is only offered by tabular reports
            if a.0 == 0 {
                assert!(!a.1.is_empty());
            }
        }
    }
}

#[test]
fn nf_summary_names_the_frequency_space() {
    let (code, out, err) = run("nf", &[]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("ghat = (2*l1, 0)"), "{out}");
    assert!(out.contains("F(H) dim = 1"), "{out}");
    assert!(out.contains("P = "), "{out}");
}

#[test]
fn json_reports_parse_back() {
    for cmd in ["nf", "freq", "bruno", "density", "verify"] {
        let (code, out, err) = run(cmd, &["--format", "json"]);
        assert_eq!(code, 0, "{cmd}: {err}");
        let v: serde_json::Value =
            serde_json::from_str(&out).unwrap_or_else(|e| panic!("{cmd}: {e}\n{out}"));
        assert!(v.is_object());
    }
    let (_, out, _) = run("freq", &["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dim"], 1);
}

#[test]
fn density_csv_has_one_row_per_radius() {
    let (code, out, _) = run("density", &["--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "radius,fraction,ci_half_width");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 3);
        assert!((0.0..=1.0).contains(&cols[1]));
    }
}

#[test]
fn resonance_exits_with_two() {
    let (code, out, err) = execute(["kamnf", "bruno", "--n", "2", "--alpha", "1,0.5", "--K", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("(1,-2)"), "{err}");
    assert!(!out.is_empty());
    let (code, _, err) = execute([
        "kamnf",
        "nf",
        "--n",
        "2",
        "--alpha",
        "1,0.5",
        "--hamiltonian",
        "q1*p2^2",
    ]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["kamnf", "nf", "--n", "2", "--alpha", "1"],
        &[
            "kamnf",
            "nf",
            "--n",
            "2",
            "--alpha",
            "1,2",
            "--precision-bits",
            "128",
        ],
        &[
            "kamnf",
            "nf",
            "--n",
            "1",
            "--alpha",
            "1",
            "--hamiltonian",
            "q1^^2",
        ],
        &["kamnf", "frobnicate"],
        &["kamnf", "nf", "--n", "1", "--alpha", "1", "--k", "40"],
        &[
            "kamnf", "verify", "--n", "1", "--alpha", "1", "--method", "rk4",
        ],
    ];
    for case in cases {
        let (code, _, err) = execute(case.iter().copied());
        assert_eq!(code, 1, "{case:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, r#"{"alpha": ["1", "0.5"], "K": 4}"#).unwrap();
    let p = path.to_str().unwrap();
    // the flags say sqrt(2); the file wins and makes alpha resonant
    let (code, _, err) = execute([
        "kamnf",
        "bruno",
        "--n",
        "2",
        "--alpha",
        "1,1.41421356",
        "--config",
        p,
    ]);
    assert_eq!(code, 2, "{err}");

    std::fs::write(&path, r#"{"alpha": ["1"], "bogus": 3}"#).unwrap();
    let (code, _, err) = execute(["kamnf", "bruno", "--config", p]);
    assert_eq!(code, 1);
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn out_directory_receives_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, stdout, _) = run("density", &["--out", d]);
    assert_eq!(code, 0);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["density.csv", "density.json", "density.txt"]);
    let text = std::fs::read_to_string(dir.path().join("density.txt")).unwrap();
    assert_eq!(text, stdout);
}

#[test]
fn binary_matches_library_entry_point() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_kamnf"))
        .args(&args("nf", &[])[1..])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (_, lib_out, _) = run("nf", &[]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), lib_out);

    let status = std::process::Command::new(env!("CARGO_BIN_EXE_kamnf"))
        .args(["bruno", "--n", "2", "--alpha", "1,0.5", "--K", "3"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}
