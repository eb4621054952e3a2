use std::io::Write;
use std::process::{Command, Output};

use approx::assert_abs_diff_eq;
use orthoglide::{
    dk_both, ik_branch, BranchTriple, CartesianPoint, JointVector, ManipulatorParams,
};
use serde_json::Value;

const SQRT_1_5: &str = "1.224744871391589";

fn orthoglide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthoglide"))
        .args(args)
        .env_remove("ORTHOGLIDE_CONFIG")
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = orthoglide(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (code, v)
}

/// Header line and data rows, metadata lines dropped.
fn run_csv(args: &[&str]) -> (i32, String, Vec<Vec<String>>) {
    let out = orthoglide(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap_or_default().to_string();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (out.status.code().unwrap(), header, rows)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn point(v: &Value) -> [f64; 3] {
    [f(&v["x"]), f(&v["y"]), f(&v["z"])]
}

fn unit() -> ManipulatorParams {
    ManipulatorParams::new(1.0).unwrap()
}

/// Symmetric direct kinematics `rho = (r, r, r)`: `p = (a, a, a)` with
/// `(a - r)^2 + 2a^2 = L^2`.
fn symmetric_dk(r: f64) -> Option<(f64, f64)> {
    let disc = 4.0 * r * r - 12.0 * (r * r - 1.0);
    (disc >= 0.0).then(|| ((2.0 * r - disc.sqrt()) / 6.0, (2.0 * r + disc.sqrt()) / 6.0))
}

#[test]
fn ik_near_home_single_ppp_solution() {
    let (code, v) = run_json(&["ik", "-L", "1", "-p", "-0.5,0.4,0.3"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["region"], "SphereInterior");
    let sols = r["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["branch"], "PPP");
    let rho = point(&sols[0]["rho"]);
    assert_abs_diff_eq!(rho[0], -0.5 + 0.75f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(rho[1], 0.4 + 0.66f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(rho[2], 0.3 + 0.59f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn ik_shell_point_has_eight_solutions() {
    let (code, v) = run_json(&["ik", "-L", "1", "-p", "0.7,0.7,0.7"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["region"], "Shell");
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 8);
    let mut labels: Vec<&str> = sols.iter().map(|s| s["branch"].as_str().unwrap()).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels.len(), 8);
}

#[test]
fn ik_outside_reach_exits_1_with_no_solutions() {
    let (code, v) = run_json(&["ik", "-L", "1", "-p", "2,0,0"]);
    assert_eq!(code, 1);
    assert_eq!(v["feasible"], false);
    assert_eq!(v["result"]["solutions"].as_array().unwrap().len(), 0);
    assert_eq!(v["result"]["region"], "Outside");
}

#[test]
fn ik_single_branch_and_csv() {
    let (code, v) = run_json(&["ik", "-L", "1", "-p", "0.7,0.7,0.7", "--branch", "MPM"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(v["result"]["solutions"][0]["branch"], "MPM");

    let (code, header, rows) = run_csv(&["ik", "-L", "1", "-p", "0.7,0.7,0.7", "--csv"]);
    assert_eq!(code, 0);
    assert_eq!(
        header,
        "branch,rho_x,rho_y,rho_z,within_limits,max_residual"
    );
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][0], "PPP");
}

#[test]
fn dk_two_postures_match_symmetric_oracle() {
    let (code, v) = run_json(&["dk", "-L", "1", "-r", "0.3,0.3,0.3"]);
    assert_eq!(code, 0);
    let (lo, hi) = symmetric_dk(0.3).unwrap();
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    assert_eq!(sols[0]["posture"], -1);
    assert_eq!(sols[1]["posture"], 1);
    for (s, a) in sols.iter().zip([lo, hi]) {
        for c in point(&s["p"]) {
            assert_abs_diff_eq!(c, a, epsilon = 1e-12);
        }
        for r in s["residuals"].as_array().unwrap() {
            assert!(f(r).abs() < 1e-12);
        }
    }
    assert!(f(&sols[0]["plane_eval"]) < 0.0 && f(&sols[1]["plane_eval"]) > 0.0);
    assert_abs_diff_eq!(lo, -0.4597618541248888, epsilon = 1e-12);
}

#[test]
fn dk_flat_configuration_single_solution() {
    let rho = format!("{SQRT_1_5},{SQRT_1_5},{SQRT_1_5}");
    let (code, v) = run_json(&["dk", "-L", "1", "-r", &rho]);
    assert_eq!(code, 0);
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["flat"], true);
    for c in point(&sols[0]["p"]) {
        assert_abs_diff_eq!(c, (1.0f64 / 6.0).sqrt(), epsilon = 1e-7);
    }
}

#[test]
fn dk_four_digit_flat_input_needs_wider_band() {
    // 1.2247 leaves a relative discriminant of about 5.7e-4
    let (_, v) = run_json(&["dk", "-L", "1", "-r", "1.2247,1.2247,1.2247"]);
    let rd = f(&v["result"]["quadratic"]["relative_discriminant"]);
    assert!(rd > 1e-4 && rd < 1e-3);
    assert_eq!(v["result"]["solutions"].as_array().unwrap().len(), 2);
    let (code, v) = run_json(&[
        "dk",
        "-L",
        "1",
        "-r",
        "1.2247,1.2247,1.2247",
        "--eps-geom",
        "9e-4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["solutions"].as_array().unwrap().len(), 1);
    assert_eq!(v["params"]["eps_geom"], 9e-4);
}

#[test]
fn dk_negative_discriminant_exits_1() {
    assert!(symmetric_dk(2.0).is_none());
    let (code, v) = run_json(&["dk", "-L", "1", "-r", "2,2,2"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["solutions"].as_array().unwrap().len(), 0);
}

#[test]
fn dk_requested_posture() {
    let (code, v) = run_json(&["dk", "-L", "1", "-r", "0.3,0.3,0.3", "--posture", "+1"]);
    assert_eq!(code, 0);
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["posture"], 1);
    let (code, _) = run_json(&["dk", "-L", "1", "-r", "2,2,2", "--posture", "-1"]);
    assert_eq!(code, 1);
}

#[test]
fn trajectory_short_move_near_home() {
    let (code, v) = run_json(&[
        "trajectory",
        "-L",
        "1",
        "-w",
        "0,0,0",
        "-w",
        "0.2,0,0",
        "--step",
        "0.01",
    ]);
    assert_eq!(code, 0);
    let s = &v["result"]["summary"];
    assert_eq!(s["feasible"], true);
    assert_eq!(s["singular_steps"], 0);
    assert_eq!(s["limit_violations"], 0);
    assert_eq!(s["branch_switch_steps"], 0);
    assert_eq!(v["result"]["records"].as_array().unwrap().len(), 21);
}

#[test]
fn trajectory_diagonal_into_shell_on_ppp() {
    let (code, v) = run_json(&[
        "trajectory",
        "-L",
        "1",
        "-w",
        "0.1,0.1,0.1",
        "-w",
        "0.7,0.7,0.7",
        "--step",
        "0.02",
        "--branch",
        "PPP",
    ]);
    assert_eq!(code, 0);
    let records = v["result"]["records"].as_array().unwrap();
    assert_eq!(
        records.len(),
        f(&v["result"]["summary"]["planned_steps"]) as usize
    );
    let regions: Vec<&str> = records
        .iter()
        .map(|r| r["region"].as_str().unwrap())
        .collect();
    assert!(regions.contains(&"SphereInterior") && regions.contains(&"Shell"));
    // oracle: the PPP joint vector closes every leg
    for r in records {
        let p = point(&r["p"]);
        let rho = point(&r["rho"]);
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let res = (p[i] - rho[i]).powi(2) + p[j] * p[j] + p[k] * p[k] - 1.0;
            assert!(res.abs() < 1e-12);
        }
    }
}

#[test]
fn trajectory_leaving_reach() {
    let args = [
        "trajectory",
        "-L",
        "1",
        "-w",
        "0,0,0",
        "-w",
        "1.5,0,0",
        "--step",
        "0.1",
    ];
    let (code, v) = run_json(&[&args[..], &["--policy", "warn-and-hold-branch"]].concat());
    assert_eq!(code, 1);
    let s = &v["result"]["summary"];
    assert_eq!(s["feasible"], false);
    assert_eq!(s["aborted"], false);
    let records = v["result"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 16);
    let first = s["first_failure"].as_u64().unwrap() as usize;
    let px = f(&records[first]["p"]["x"]);
    assert!(px * px >= 1.0);
    assert!(records[..first].iter().all(|r| {
        let x = f(&r["p"]["x"]);
        x * x < 1.0
    }));
    assert!(records[first + 1..]
        .iter()
        .all(|r| r["unreachable_axis"] == "y"));

    let (code, v) = run_json(&args);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["summary"]["aborted"], true);
    assert_eq!(
        v["result"]["records"].as_array().unwrap().len(),
        first + 1,
        "abort stops at the first failing step"
    );
}

#[test]
fn trajectory_request_file_and_csv() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{"waypoints":[{{"x":0,"y":0,"z":0}},{{"x":0.1,"y":0,"z":0}},{{"x":0.1,"y":0.1,"z":0}}],"step":0.05}}"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let (code, header, rows) = run_csv(&["trajectory", "-L", "1", "--request", path, "--csv"]);
    assert_eq!(code, 0);
    assert!(header.starts_with("index,segment,p_x,p_y,p_z,rho_x,rho_y,rho_z,branch,region"));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4][1], "1");
}

#[test]
fn trajectory_needs_two_waypoints() {
    let out = orthoglide(&["trajectory", "-L", "1", "-w", "0,0,0", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn volumes_closed_form_and_scaling() {
    let (code, v) = run_json(&["volumes", "-L", "1"]);
    assert_eq!(code, 0);
    let cf = &v["result"]["closed_form"];
    let pi = std::f64::consts::PI;
    let w = 2.0 + 7.0 * pi / 6.0 - 2f64.sqrt();
    assert_abs_diff_eq!(f(&cf["vol_w"]), w, epsilon = 1e-12);
    assert_abs_diff_eq!(f(&cf["pct_w_of_serial"]), 53.14, epsilon = 0.01);
    assert!(v["result"]["monte_carlo"].is_null());

    let (_, v2) = run_json(&["volumes", "-L", "2"]);
    for k in ["vol_c", "vol_s", "vol_g", "vol_w"] {
        assert_abs_diff_eq!(
            f(&v2["result"]["closed_form"][k]),
            8.0 * f(&cf[k]),
            epsilon = 1e-12
        );
    }
}

#[test]
fn volumes_monte_carlo_within_three_sigma() {
    let (code, v) = run_json(&["volumes", "-L", "1", "--mc", "1000000", "--seed", "42"]);
    assert_eq!(code, 0);
    let mc = &v["result"]["monte_carlo"];
    assert_eq!(mc["seed"], 42);
    assert_eq!(mc["n_samples"], 1_000_000);
    for row in mc["estimates"].as_array().unwrap() {
        let z = (f(&row["estimate"]) - f(&row["exact"])) / f(&row["std_error"]);
        assert!(z.abs() < 3.0, "{row}");
    }
    let (_, again) = run_json(&["volumes", "-L", "1", "--mc", "1000000", "--seed", "42"]);
    assert_eq!(again["result"], v["result"]);
}

#[test]
fn volumes_csv_header() {
    let (code, header, rows) = run_csv(&["volumes", "-L", "1", "--csv"]);
    assert_eq!(code, 0);
    assert_eq!(header, "quantity,closed_form,estimate,std_error,z_score");
    assert_eq!(rows[3][0], "vol_w");
}

#[test]
fn jointspace_check_home_and_boundary() {
    let (code, v) = run_json(&["jointspace", "check", "-L", "1", "-r", "1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["status"], "interior");
    assert_eq!(v["result"]["feasibility_product"], -3.0);

    let rho = format!("{SQRT_1_5},{SQRT_1_5},{SQRT_1_5}");
    let (code, v) = run_json(&["jointspace", "check", "-L", "1", "-r", &rho]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["status"], "boundary");
    assert_abs_diff_eq!(f(&v["result"]["feasibility_product"]), 1.0, epsilon = 1e-12);

    let (_, v) = run_json(&[
        "jointspace",
        "check",
        "-L",
        "1",
        "-r",
        "1.2247,1.2247,1.2247",
    ]);
    assert_abs_diff_eq!(f(&v["result"]["feasibility_product"]), 1.0, epsilon = 1e-3);
    let (_, v) = run_json(&[
        "jointspace",
        "check",
        "-L",
        "1",
        "-r",
        "1.2247,1.2247,1.2247",
        "--eps-geom",
        "9e-4",
    ]);
    assert_eq!(v["result"]["status"], "boundary");

    let (code, v) = run_json(&["jointspace", "check", "-L", "1", "-r", "2,2,2"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["status"], "outside");
}

#[test]
fn jointspace_boundary_grid_of_three() {
    let (code, header, rows) = run_csv(&[
        "jointspace",
        "boundary-sample",
        "-L",
        "1",
        "--grid",
        "3",
        "--csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(header, "phi,theta,t,rho_x,rho_y,rho_z");
    assert_eq!(rows.len(), 9);
    let bisector_t = 3.0 / 2f64.sqrt();
    let nearest = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| c.parse::<f64>().unwrap())
                .collect::<Vec<_>>()
        })
        .min_by(|a, b| {
            (a[2] - bisector_t)
                .abs()
                .total_cmp(&(b[2] - bisector_t).abs())
        })
        .unwrap();
    let quarter = std::f64::consts::FRAC_PI_4;
    assert_abs_diff_eq!(nearest[0], quarter, epsilon = 1e-15);
    assert_abs_diff_eq!(nearest[1], quarter, epsilon = 1e-15);
    // direction (1/2, 1/2, 1/sqrt2): F = 4 + 4 + 2 = 10, t = 2 sqrt(10/9)
    assert_abs_diff_eq!(nearest[2], 2.0 * (10.0f64 / 9.0).sqrt(), epsilon = 1e-12);
    assert!((nearest[2] - 2.1213).abs() < 0.015);
    // every row sits on the surface: product = 1
    for r in &rows {
        let rho: Vec<f64> = r[3..].iter().map(|c| c.parse().unwrap()).collect();
        let p = (rho.iter().map(|x| x * x).sum::<f64>() - 4.0)
            * rho.iter().map(|x| x.powi(-2)).sum::<f64>();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["ik", "-L", "1", "-p", "1,2"][..],
        &["ik", "-L", "1", "-p", "nan,0,0"],
        &["ik", "-L", "0", "-p", "0,0,0"],
        &["ik", "-L", "1", "-p", "0,0,0", "--branch", "PXP"],
        &["dk", "-L", "1", "-r", "1,1,1", "--posture", "2"],
        &["dk", "-L", "1", "-r", "1,1,1", "--json", "--csv"],
        &["jointspace", "boundary-sample", "-L", "1", "--grid", "0"],
        &["volumes", "-L", "1", "--mc", "10"],
        &["nonsense"],
        &[
            "ik",
            "-L",
            "1",
            "-p",
            "0,0,0",
            "--config",
            "/nonexistent/orthoglide.conf",
        ],
    ] {
        let out = orthoglide(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn config_file_flags_and_env() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        file,
        "eps_geom = 1e-8\neps_branch = 1e-7\ndirection_floor = 1e-4\nseed = 7"
    )
    .unwrap();
    let path = file.path().to_str().unwrap();

    let (_, v) = run_json(&["volumes", "-L", "1", "--config", path, "--mc", "10000"]);
    assert_eq!(v["params"]["eps_geom"], 1e-8);
    assert_eq!(v["params"]["eps_branch"], 1e-7);
    assert_eq!(v["params"]["direction_floor"], 1e-4);
    assert_eq!(v["result"]["monte_carlo"]["seed"], 7);

    let (_, v) = run_json(&[
        "volumes",
        "-L",
        "1",
        "--config",
        path,
        "--mc",
        "10000",
        "--seed",
        "9",
        "--eps-geom",
        "2e-9",
    ]);
    assert_eq!(v["params"]["eps_geom"], 2e-9);
    assert_eq!(v["result"]["monte_carlo"]["seed"], 9);

    let out = Command::new(env!("CARGO_BIN_EXE_orthoglide"))
        .args(["ik", "-L", "1", "-p", "0,0,0"])
        .env("ORTHOGLIDE_CONFIG", path)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["eps_branch"], 1e-7);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "tolerance = 1").unwrap();
    let out = orthoglide(&[
        "ik",
        "-L",
        "1",
        "-p",
        "0,0,0",
        "--config",
        bad.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn envelope_carries_input_params_and_version() {
    let (_, v) = run_json(&[
        "ik",
        "-L",
        "2.5",
        "-p",
        "0.1,0.2,0.3",
        "--eps-geom",
        "1e-10",
    ]);
    assert_eq!(v["tool"], "orthoglide");
    assert_eq!(v["version"], orthoglide::VERSION);
    assert_eq!(v["command"], "ik");
    assert_eq!(point(&v["input"]["p"]), [0.1, 0.2, 0.3]);
    assert_eq!(v["params"]["leg_length"], 2.5);
    assert_eq!(v["params"]["eps_geom"], 1e-10);
    assert_eq!(v["params"]["eps_branch"], 2.5e-9);
}

#[test]
fn json_round_trip_reproduces_numbers() {
    let (_, v) = run_json(&["ik", "-L", "1", "-p", "0.7,0.7,0.7"]);
    let params = ManipulatorParams::with_tolerances(
        f(&v["params"]["leg_length"]),
        f(&v["params"]["eps_geom"]),
        f(&v["params"]["eps_branch"]),
    )
    .unwrap();
    let p = CartesianPoint::from_array(point(&v["input"]["p"]));
    for s in v["result"]["solutions"].as_array().unwrap() {
        let branch: BranchTriple = s["branch"].as_str().unwrap().parse().unwrap();
        let rho = point(&s["rho"]);
        assert_eq!(ik_branch(&p, branch, &params).unwrap().rho.to_array(), rho);

        // feed the reported joints back through dk
        let rho_arg = format!("{},{},{}", rho[0], rho[1], rho[2]);
        let (_, d) = run_json(&["dk", "-L", "1", "-r", &rho_arg]);
        assert_eq!(point(&d["input"]["rho"]), rho);
        let sols = d["result"]["solutions"].as_array().unwrap();
        assert!(sols.iter().any(|q| {
            point(&q["p"])
                .iter()
                .zip(p.to_array())
                .all(|(a, b)| (a - b).abs() < 1e-12)
        }));
    }

    let (_, d) = run_json(&["dk", "-L", "1", "-r", "0.3,0.9,1.4"]);
    let rho = JointVector::from_array(point(&d["input"]["rho"]));
    let lib = dk_both(&rho, &unit()).unwrap();
    let sols = d["result"]["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), lib.len());
    for (s, l) in sols.iter().zip(&lib) {
        assert_eq!(point(&s["p"]), l.p.to_array());
        assert_eq!(f(&s["t_value"]), l.t_value);
    }
}

#[test]
fn csv_and_json_agree_bitwise() {
    let (_, v) = run_json(&["dk", "-L", "1", "-r", "0.3,0.9,1.4"]);
    let (_, _, rows) = run_csv(&["dk", "-L", "1", "-r", "0.3,0.9,1.4", "--csv"]);
    for (s, row) in v["result"]["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .zip(&rows)
    {
        let p = point(&s["p"]);
        for i in 0..3 {
            assert_eq!(row[1 + i].parse::<f64>().unwrap(), p[i]);
        }
    }
}
