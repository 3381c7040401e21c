use std::path::PathBuf;
use std::process::{Command, Output};

use flexcurv::DiscreteFlex;
use serde_json::Value;

fn flexcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flexcurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    flexcurv(args).status.code().expect("exited normally")
}

fn stdout(args: &[&str]) -> String {
    let out = flexcurv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flexcurv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn f(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("no number `{key}` in {v}"))
}

#[test]
fn exit_codes() {
    let bowl = ["--surface", "plane", "--flex", "0,0,u^2+v^2"];
    let with = |cmd: &'static str, extra: &[&'static str]| -> Vec<&'static str> {
        let mut v = vec![cmd];
        v.extend_from_slice(&bowl);
        v.extend_from_slice(extra);
        v
    };
    let cases: Vec<(Vec<&str>, i32)> = vec![
        // pass
        (vec!["curvature", "--surface", "cap"], 0),
        (with("flex-check", &[]), 0),
        (with("variation", &[]), 0),
        (with("sweep", &["--t-list=-0.1,0,0.1"]), 0),
        (
            vec!["construct-flex", "--surface", "plane", "--grid", "5x5"],
            0,
        ),
        // numerical disagreement
        (
            vec!["flex-check", "--surface", "plane", "--flex", "u,0,0"],
            1,
        ),
        (
            vec![
                "variation",
                "--surface",
                "plane",
                "--flex",
                "0,0,exp(3*u)*sin(3*v)",
                "--fd-step",
                "0.3",
                "--no-richardson",
            ],
            1,
        ),
        // validation
        (vec!["curvature", "--surface", "u*(v"], 2),
        (vec!["curvature"], 2),
        (vec!["curvature", "--surface", "w^2"], 2),
        (
            vec!["curvature", "--surface", "plane", "--domain", "disk:0,0,-1"],
            2,
        ),
        (vec!["curvature", "--surface", "plane", "--nodes", "0"], 2),
        (
            vec!["curvature", "--surface", "plane", "--format", "xml"],
            2,
        ),
        (
            vec![
                "curvature",
                "--surface",
                "plane",
                "--scenario",
                "/nonexistent/s.txt",
            ],
            2,
        ),
        (vec!["nonsense"], 2),
        (
            vec!["variation", "--surface", "plane", "--flex", "u,0,0"],
            2,
        ),
        (vec!["variation", "--surface", "plane"], 2),
        (with("variation", &["--fd-step", "-1"]), 2),
        (with("variation", &["--boundary-nodes", "2"]), 2),
        (with("sweep", &[]), 2),
        (with("sweep", &["--t-list", ""]), 2),
        (with("sweep", &["--t-list", "0,zero"]), 2),
        (
            vec!["construct-flex", "--surface", "plane", "--flex", "rotation"],
            2,
        ),
        (
            vec!["construct-flex", "--surface", "plane", "--grid", "3by3"],
            2,
        ),
        // numerical domain
        (vec!["curvature", "--surface", "sqrt(u - 0.5)"], 3),
        (
            vec![
                "curvature",
                "--surface",
                "log(u)",
                "--domain",
                "rect:-1,1,-1,1",
            ],
            3,
        ),
        (
            vec![
                "flex-check",
                "--surface",
                "plane",
                "--flex",
                "0,0,sqrt(0.5-u)",
            ],
            3,
        ),
        (
            vec![
                "variation",
                "--surface",
                "plane",
                "--flex",
                "0,0,sqrt(u-0.5)",
            ],
            3,
        ),
    ];
    for (args, expected) in cases {
        let out = flexcurv(&args);
        assert_eq!(
            out.status.code(),
            Some(expected),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if expected >= 2 {
            assert!(out.stdout.is_empty(), "{args:?} wrote a report");
            assert!(!out.stderr.is_empty(), "{args:?} gave no message");
        }
    }
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn malformed_expressions_report_the_location() {
    let out = flexcurv(&["curvature", "--surface", "u*(v"]);
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("byte 4"), "{msg}");
}

#[test]
fn scenario_errors_name_the_field() {
    let path = scratch("bad.txt");
    for (text, needle) in [
        ("surface = plane\nnodes = lots\n", "`nodes`"),
        ("surface = plane\ncolour = red\n", "`colour`"),
        ("surface = plane\nsurface = cap\n", "given twice"),
        ("surface plane\n", "line 1"),
    ] {
        std::fs::write(&path, text).unwrap();
        let out = flexcurv(&["curvature", "--scenario", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        let msg = String::from_utf8(out.stderr).unwrap();
        assert!(msg.contains(needle), "{text:?}: {msg}");
    }
}

#[test]
fn curvature_examples() {
    let cap = json(&["curvature", "--surface", "cap-1-0.5"]);
    let golden = 2.0 * std::f64::consts::PI * (1.0 - 3f64.sqrt() / 2.0);
    assert!((f(&cap["result"], "total_mean_curvature") - golden).abs() < 1e-12);
    assert!((golden - 0.8417873).abs() < 1e-7);
    assert_eq!(cap["result"]["samples"].as_array().unwrap().len(), 25);

    let plane = json(&["curvature", "--surface", "plane", "--domain", "square"]);
    assert_eq!(f(&plane["result"], "total_mean_curvature"), 0.0);
    assert!((f(&plane["result"], "area") - 1.0).abs() < 1e-15);
}

#[test]
fn flex_check_examples() {
    let bowl = json(&["flex-check", "--surface", "plane", "--flex", "0,0,u^2+v^2"]);
    assert_eq!(bowl["pass"], true);
    assert!(f(&bowl["result"], "first_order") <= 1e-12);
    assert!(f(&bowl["result"], "second_order") <= 1e-12);

    let out = flexcurv(&["flex-check", "--surface", "plane", "--flex", "u,0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let stretch: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stretch["pass"], false);
    assert!((f(&stretch["result"], "first_order") - 1.0).abs() < 1e-12);

    let rot = json(&[
        "flex-check",
        "--surface",
        "paraboloid",
        "--flex",
        "rotation",
    ]);
    assert_eq!(rot["pass"], true);
    assert!((f(&rot["result"], "triviality_score") - 1.0).abs() < 1e-9);

    // the interpolant of a grid flex is not an exact flex, but its score
    // is that of the grid vector
    let out = flexcurv(&[
        "flex-check",
        "--surface",
        "paraboloid",
        "--flex",
        "construct:8x8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let constructed: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(f(&constructed["result"], "triviality_score") < 0.5);
    assert!(f(&constructed["result"], "residual_norm") < 1e-10);
}

#[test]
fn variation_examples() {
    let bowl = json(&["variation", "--surface", "plane", "--flex", "0,0,u^2+v^2"]);
    let r = &bowl["result"];
    assert_eq!(bowl["pass"], true);
    assert!((f(r, "h_surface") - 2.0).abs() < 1e-12);
    assert!((f(r, "h_line") - 2.0).abs() < 1e-12);
    assert!((f(r, "h_fd") - 2.0).abs() < 1e-8);
    for key in ["disc_sl", "disc_sf", "disc_lf", "tol_analytic", "tol_fd"] {
        assert!(r[key].is_f64(), "{key}");
    }
    assert!(r.get("erratum").is_none());

    let bump = json(&["variation", "--surface", "plane", "--flex", "bump"]);
    assert_eq!(bump["pass"], true);
    assert!(f(&bump["result"], "h_line").abs() < 1e-12);
    assert!(f(&bump["result"], "h_surface").abs() < 1e-10);
    assert!(f(&bump["result"], "h_fd").abs() < 1e-6);

    let probe = json(&[
        "variation",
        "--surface",
        "plane",
        "--flex",
        "0,0,u^2+v^2",
        "--erratum-probe",
    ]);
    // the probe integrand loses the v-curvature of the bowl
    let e = &probe["result"]["erratum"];
    assert!(f(e, "h_line_printed").abs() < 1e-12);
    assert!((f(e, "disc_printed_fd") - 2.0).abs() < 1e-8);
}

#[test]
fn sweep_examples() {
    let rigid = json(&[
        "sweep",
        "--surface",
        "paraboloid",
        "--flex",
        "rigid:0.3,-0.2,0,0,0,0",
        "--t-list=-0.1,0,0.1",
    ]);
    let rows = rigid["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for key in [
        "total_mean_curvature",
        "area",
        "volume",
        "total_gauss_curvature",
    ] {
        let first = f(&rows[0], key);
        for row in rows {
            assert!((f(row, key) - first).abs() < 1e-12, "{key}");
        }
    }

    let ts: Vec<String> = (-10..=10).map(|k| format!("{}", k as f64 * 0.01)).collect();
    let t_list = format!("--t-list={}", ts.join(","));
    let data = scratch("sweep.dat");
    let bowl = json(&[
        "sweep",
        "--surface",
        "plane",
        "--flex",
        "0,0,u^2+v^2",
        &t_list,
        "--data",
        data.to_str().unwrap(),
    ]);
    assert!((f(&bowl["result"], "fitted_slope") - 2.0).abs() < 1e-3);
    let columns = std::fs::read_to_string(&data).unwrap();
    assert_eq!(columns.lines().filter(|l| !l.starts_with('#')).count(), 21);
    assert!(columns.lines().nth(1).unwrap().split_whitespace().count() == 5);

    let csv = stdout(&[
        "sweep",
        "--surface",
        "plane",
        "--flex",
        "0,0,u^2",
        "--t-list",
        "0,0.5",
        "--format",
        "csv",
    ]);
    let header = csv.lines().find(|l| !l.starts_with("#!")).unwrap();
    assert_eq!(
        header,
        "t,total_mean_curvature,area,volume,total_gauss_curvature,error"
    );
}

#[test]
fn construct_flex_emits_a_loadable_flex() {
    let text = stdout(&["construct-flex", "--surface", "paraboloid", "--grid", "7x6"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let flex = DiscreteFlex::from_json(&doc["result"].to_string()).unwrap();
    assert_eq!((flex.grid.n_u, flex.grid.n_v), (7, 6));
    assert!(flex.residual_norm < 1e-10);

    let csv = stdout(&[
        "construct-flex",
        "--surface",
        "plane",
        "--flex",
        "construct:4x5",
        "--format",
        "csv",
    ]);
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with("#!")).collect();
    assert_eq!(body[0], "u,v,xi,eta,zeta");
    assert_eq!(body.len(), 1 + 20);
}

#[test]
fn csv_variation_fields() {
    let csv = stdout(&[
        "variation",
        "--surface",
        "plane",
        "--flex",
        "0,0,u*v+u^3",
        "--format",
        "csv",
    ]);
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with("#!")).collect();
    let header: Vec<&str> = body[0].split(',').collect();
    assert_eq!(
        &header[..7],
        [
            "h_surface",
            "h_line",
            "h_fd",
            "disc_sl",
            "disc_sf",
            "disc_lf",
            "pass"
        ]
    );
    let row: Vec<&str> = body[1].split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(row[6], "true");
}

#[test]
fn out_writes_the_report_instead_of_stdout() {
    let path = scratch("out.json");
    let out = flexcurv(&[
        "curvature",
        "--surface",
        "saddle",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "curvature");
}

#[test]
fn scenario_files_and_overrides() {
    let path = scratch("scenario.txt");
    std::fs::write(
        &path,
        "# bowl on a shifted rectangle\nsurface = plane\ndomain = rect:-1,2,0,0.5\nflex = 0,0,u^2+v^2\nnodes = 32\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let base = json(&["variation", "--scenario", p]);
    assert!(base["scenario"].as_str().unwrap().contains("nodes = 32"));
    // the bowl gives 2 per unit area here: the rectangle has area 1.5
    assert!((f(&base["result"], "h_line") - 3.0).abs() < 1e-12);
    let overridden = json(&["variation", "--scenario", p, "--flex", "0,0,u^2"]);
    assert!((f(&overridden["result"], "h_line") - 1.5).abs() < 1e-12);
}

/// Re-running a PASS report from its own embedded scenario gives the same
/// bytes, for every format.
#[test]
fn pass_reports_reproduce_bitwise() {
    let runs: [&[&str]; 6] = [
        &[
            "variation",
            "--surface",
            "cap-1-0.5",
            "--flex",
            "rigid:0.2,-0.4,1,0.3,0.5,-0.7",
        ],
        &[
            "variation",
            "--surface",
            "paraboloid",
            "--flex",
            "para-twist",
            "--erratum-probe",
            "--nodes",
            "24",
        ],
        &["curvature", "--surface", "dome-2-1.5"],
        &["flex-check", "--surface", "saddle", "--flex", "rotation"],
        &[
            "sweep",
            "--surface",
            "plane",
            "--flex",
            "0,0,u*v+u^3",
            "--t-list=-1e-1,0.05,0.3333333333333333",
        ],
        &["construct-flex", "--surface", "paraboloid", "--grid", "6x6"],
    ];
    for (k, args) in runs.iter().enumerate() {
        for format in ["json", "csv", "text"] {
            let mut first_args = args.to_vec();
            first_args.extend_from_slice(&["--format", format]);
            let out = flexcurv(&first_args);
            assert!(
                out.status.success(),
                "{first_args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let path = scratch(&format!("report-{k}.{format}"));
            std::fs::write(&path, &out.stdout).unwrap();
            let again = flexcurv(&[args[0], "--scenario", path.to_str().unwrap()]);
            assert!(again.status.success());
            assert_eq!(
                String::from_utf8(again.stdout).unwrap(),
                String::from_utf8(out.stdout).unwrap(),
                "{first_args:?}"
            );
        }
    }
}
