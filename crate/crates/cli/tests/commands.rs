use std::process::{Command, Output};

use serde_json::Value;

fn tnnball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tnnball")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn each_suite_passes() {
    for suite in ["gr", "flow", "u", "amp", "en"] {
        let out = tnnball(&["verify", suite]);
        let report = json_of(&out);
        assert_eq!(out.status.code(), Some(0), "{suite}: {report}");
        assert_eq!(report["failures"], Value::Array(vec![]));
        assert_eq!(report["suite"], suite);
    }
}

#[test]
fn en_with_size_cap() {
    let out = tnnball(&["verify", "en", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["cases"].as_u64().unwrap() > 0);
}

#[test]
fn all_covers_every_operation() {
    let out = tnnball(&["verify", "all"]);
    let report = json_of(&out);
    assert_eq!(out.status.code(), Some(0), "{report}");
    assert_eq!(report["coverage"]["missing"], Value::Array(vec![]));
    let ops = report["coverage"]["ops"].as_array().unwrap();
    assert_eq!(ops.len(), tnnball_cli::verify::ALL_OPS.len());
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time");
        v
    };
    let a = strip(json_of(&tnnball(&["verify", "all", "--seed", "7"])));
    let b = strip(json_of(&tnnball(&["verify", "all", "--seed", "7"])));
    assert_eq!(a.to_string(), b.to_string());
    assert_eq!(a["seed"], 7);
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = tnnball(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn malformed_input_is_usage_error() {
    let out = tnnball(&["plucker", "--matrix", "{\"rows\": 2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tnnball(&["classify", "--plucker", r#"{"k":2,"n":3,"coords":{"2,1":"1"}}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2,1"));
}

#[test]
fn plucker_exact_and_classify() {
    let m = r#"{"rows":2,"cols":4,"scalar":"rational","data":[["1","0","-1","-2"],["0","1","3","1/2"]]}"#;
    let out = tnnball(&["plucker", "--matrix", m, "--normalize", "raw"]);
    let v = json_of(&out);
    assert_eq!(v["coords"]["3,4"], "11/2");
    assert_eq!(v["coords"]["1,4"], "1/2");

    let out = tnnball(&["classify", "--matrix", "[[1,0,0,0],[0,1,0,0]]"]);
    assert_eq!(json_of(&out)["class"], "TNN_boundary");
    let out = tnnball(&["classify", "--matrix", "[[1,0,1],[0,1,1]]"]);
    assert_eq!(json_of(&out)["class"], "not_TNN");
}

#[test]
fn flow_gr_origin_is_fixed() {
    let out = tnnball(&["flow", "gr", "--k", "2", "--n", "4", "--t", "-3", "--point", "[0,0,0,0]"]);
    let v = json_of(&out);
    assert_eq!(v["norm"], 0.0);
    assert_eq!(v["class"]["class"], "TP");
}

#[test]
fn flow_u_exp_e_is_fixed() {
    let out = tnnball(&["flow", "u", "--t", "5", "--matrix", "[1,0.5,1]"]);
    let v = json_of(&out);
    assert_eq!(out.status.code(), Some(0));
    assert!(v["norm"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["class"], "U_gt0");
    let out = tnnball(&["flow", "u", "--t", "0", "--matrix", "[1,0.5,1]"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ballmap_round_trip() {
    let p = "[0.1,0.2,-0.3,0.4]";
    let out = tnnball(&["ballmap", "--flow", "gr", "--k", "2", "--n", "4", "--point", p, "--r", "0.1"]);
    let v = json_of(&out);
    assert_eq!(v["membership"], "interior");
    let image = v["result"]["image"].to_string();
    let norm: f64 = v["result"]["image"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap().powi(2)).sum::<f64>().sqrt();
    assert!(norm < 0.1);

    let out = tnnball(&["ballmap", "--flow", "gr", "--k", "2", "--n", "4", "--point", &image, "--r", "0.1", "--inverse"]);
    let back: Vec<f64> = json_of(&out)["result"]["image"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in back.iter().zip([0.1, 0.2, -0.3, 0.4]) {
        assert!((a - b).abs() < 1e-7, "{back:?}");
    }
}

#[test]
fn ballmap_amp_and_u() {
    let out = tnnball(&["ballmap", "--flow", "amp", "--m", "2", "--n", "4", "--point", "[0.2,0.1]", "--r", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tnnball(&["ballmap", "--flow", "u", "--n", "3", "--point", "[0.1,0.05,-0.1]", "--r", "0.01"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = tnnball(&["ballmap", "--flow", "amp", "--k", "2", "--m", "2", "--n", "4", "--point", "[0,0,0,0]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nc_commands() {
    let v = json_of(&tnnball(&["nc", "list", "--n", "4"]));
    assert_eq!(v["count"], 14);
    let v = json_of(&tnnball(&["nc", "asigma", "--n", "3", "--sigma", "1,3|5"]));
    let keys: Vec<&String> = v["coords"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["1,4", "1,6", "3,4", "3,6"]);
    let out = tnnball(&["nc", "asigma", "--n", "3", "--sigma", "1,5|3,7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn elec_commands() {
    let star = r#"{"boundary":[0,1,2],"edges":[[0,3,"1"],[1,3,"2"],[2,3,"3"]]}"#;
    let v = json_of(&tnnball(&["elec", "response", "--graph", star]));
    assert_eq!(v["response"]["data"][0][1], "-1/3");
    assert_eq!(v["response"]["data"][1][2], "-1");
    assert_eq!(v["symmetric"], true);

    let floating = r#"{"boundary":[0,1],"edges":[[0,1,"1"],[2,3,"1"]]}"#;
    assert_eq!(tnnball(&["elec", "response", "--graph", floating]).status.code(), Some(1));

    let out = tnnball(&["elec", "xn", "--n", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["converged"], true);
    assert!(v["result"]["plucker_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn amp_commands() {
    let v = json_of(&tnnball(&["amp", "hull", "--k", "1", "--m", "2", "--n", "4"]));
    assert_eq!(v["hull"]["facets"].as_array().unwrap().len(), 4);
    assert_eq!(tnnball(&["amp", "hull", "--k", "2", "--m", "2", "--n", "4"]).status.code(), Some(2));

    let v = json_of(&tnnball(&["amp", "project", "--k", "1", "--m", "2", "--n", "4", "--point", "[0,0,0]"]));
    assert_eq!(v["membership"], "inside");
    let v = json_of(&tnnball(&["amp", "project", "--k", "1", "--m", "2", "--n", "4", "--matrix", "[[1,0,0,0]]"]));
    assert_eq!(v["membership"], "boundary");
}

#[test]
fn trajectory_gr_origin_is_constant() {
    let out = tnnball(&["trajectory", "--space", "gr", "--k", "2", "--n", "5", "--t", "-1,0,2"]);
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header.first().unwrap(), "t");
    assert_eq!(header.last().unwrap(), "min_plucker");
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(&r[1..], &rows[0][1..]);
    }
}

#[test]
fn trajectory_u_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = tnnball(&[
        "trajectory", "--space", "u", "--n", "3", "--matrix", "[0,0,0]", "--c", "2", "--t", "1,2,4", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["t", "b12", "b13", "b23", "norm", "min_minor"]);
    for r in &rows {
        let t = r[0];
        assert!((r[1] + 1.0 / (2.0 * t)).abs() < 1e-12);
        assert!((r[2] - (1.0 - 2.0 * t) / (4.0 * t * t)).abs() < 1e-12);
        assert!((r[3] + 1.0 / (2.0 * t)).abs() < 1e-12);
    }
}

#[test]
fn trajectory_boundary_changes_sign() {
    let out = tnnball(&[
        "trajectory", "--space", "gr", "--k", "2", "--n", "4", "--matrix", "[[1,0,0,0],[0,1,0,0]]", "--t",
        "-0.1,0,0.1",
    ]);
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let margin: Vec<f64> = rows.iter().map(|r| *r.last().unwrap()).collect();
    assert!(margin[0] < -1e-6 && margin[1].abs() < 1e-12 && margin[2] > 1e-6, "{margin:?}");
}

#[test]
fn trajectory_amp_and_bad_grid() {
    let out = tnnball(&["trajectory", "--space", "amp", "--m", "2", "--n", "4", "--point", "[0.1,0.2,0.1]", "--t", "0,1"]);
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["t", "a11", "a12", "norm", "min_plucker"]);
    assert!(rows[1][3] < rows[0][3]);
    let out = tnnball(&["trajectory", "--space", "gr", "--k", "2", "--n", "4", "--t", "0,x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_tnnball"))
        .args(["plucker", "--matrix", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"[[1,2,3]]").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json_of(&out)["coords"]["3"], 1.0);
}
