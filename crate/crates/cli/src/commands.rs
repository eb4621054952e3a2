//! One function per subcommand. Each returns an [`Output`] whose
//! `feasible` flag decides between exit codes 0 and 1.

use orthoglide::jointspace::{self, on_boundary};
use orthoglide::{
    classify_point, dk_both, dk_coefficients, dk_feasible, dk_solve, feasibility_product,
    ik_branch, ik_enumerate_feasible, ik_radicands, is_serial_singular, joint_limits_ok,
    leg_angles, leg_residuals, monte_carlo_volumes, plane_eval, sample_boundary_grid,
    workspace_volumes, BranchTriple, CartesianPoint, DkSolution, IkSolution, JointVector,
    LegAngles, ManipulatorParams, PostureIndex, VolumeEstimate, WorkspaceRegion,
};
use serde::Serialize;

use crate::report::{num, opt_num, Output, Table};
use crate::trajectory::{run_trajectory, TrajectoryRequest};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
struct IkInput {
    p: CartesianPoint,
    branch: Option<BranchTriple>,
}

#[derive(Debug, Clone, Serialize)]
struct IkRecord {
    branch: BranchTriple,
    rho: JointVector,
    joints_within_limits: bool,
    residuals: [f64; 3],
    leg_angles: Option<LegAngles>,
}

#[derive(Debug, Clone, Serialize)]
struct IkResult {
    region: WorkspaceRegion,
    expected_count: Option<usize>,
    radicands: [f64; 3],
    serial_singular: [bool; 3],
    solutions: Vec<IkRecord>,
    error: Option<String>,
}

fn ik_record(p: &CartesianPoint, sol: &IkSolution, params: &ManipulatorParams) -> IkRecord {
    IkRecord {
        branch: sol.branch,
        rho: sol.rho,
        joints_within_limits: joint_limits_ok(&sol.rho, params),
        residuals: leg_residuals(p, &sol.rho, params),
        leg_angles: leg_angles(p, &sol.rho, params).ok(),
    }
}

pub fn ik(p: CartesianPoint, branch: Option<BranchTriple>, params: &ManipulatorParams) -> Output {
    let region = classify_point(&p, params);
    let (solutions, error) = match branch {
        None => (
            ik_enumerate_feasible(&p, params)
                .iter()
                .map(|s| ik_record(&p, s, params))
                .collect(),
            None,
        ),
        Some(b) => match ik_branch(&p, b, params) {
            Ok(s) => (vec![ik_record(&p, &s, params)], None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        },
    };
    let feasible =
        !solutions.is_empty() && solutions.iter().all(|s: &IkRecord| s.joints_within_limits);
    let mut table = Table::new(&[
        "branch",
        "rho_x",
        "rho_y",
        "rho_z",
        "within_limits",
        "max_residual",
    ]);
    for s in &solutions {
        let max_res = s.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        table.push(vec![
            s.branch.label(),
            num(s.rho.x),
            num(s.rho.y),
            num(s.rho.z),
            s.joints_within_limits.to_string(),
            num(max_res),
        ]);
    }
    let result = IkResult {
        region,
        expected_count: region.ik_count(),
        radicands: ik_radicands(&p, params),
        serial_singular: is_serial_singular(&p, params),
        solutions,
        error,
    };
    Output::new(
        "ik",
        feasible,
        &IkInput { p, branch },
        params,
        &result,
        table,
    )
}

#[derive(Debug, Clone, Serialize)]
struct DkInput {
    rho: JointVector,
    posture: Option<PostureIndex>,
}

#[derive(Debug, Clone, Serialize)]
struct QuadraticReport {
    a: f64,
    b: f64,
    c: f64,
    discriminant: f64,
    relative_discriminant: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DkRecord {
    #[serde(flatten)]
    solution: DkSolution,
    plane_eval: f64,
    residuals: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
struct DkResult {
    quadratic: Option<QuadraticReport>,
    feasibility_product: Option<f64>,
    joint_limits_ok: bool,
    solutions: Vec<DkRecord>,
    error: Option<String>,
}

pub fn dk(rho: JointVector, posture: Option<PostureIndex>, params: &ManipulatorParams) -> Output {
    let quadratic = dk_coefficients(&rho, params).ok().map(|q| QuadraticReport {
        a: q.a,
        b: q.b,
        c: q.c,
        discriminant: q.discriminant(),
        relative_discriminant: q.relative_discriminant(),
    });
    let solved = match posture {
        None => dk_both(&rho, params),
        Some(m) => dk_solve(&rho, m, params).map(|s| vec![s]),
    };
    let (solutions, error) = match solved {
        Ok(sols) => (
            sols.into_iter()
                .map(|s| DkRecord {
                    plane_eval: plane_eval(&s.p, &rho).unwrap_or(f64::NAN),
                    residuals: leg_residuals(&s.p, &rho, params),
                    solution: s,
                })
                .collect::<Vec<_>>(),
            None,
        ),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let limits = joint_limits_ok(&rho, params);
    let feasible = !solutions.is_empty() && limits;
    let mut table = Table::new(&[
        "posture",
        "p_x",
        "p_y",
        "p_z",
        "t",
        "flat",
        "within_limits",
        "plane_eval",
        "max_residual",
    ]);
    for s in &solutions {
        let max_res = s.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        table.push(vec![
            s.solution.posture.to_string(),
            num(s.solution.p.x),
            num(s.solution.p.y),
            num(s.solution.p.z),
            num(s.solution.t_value),
            s.solution.flat.to_string(),
            s.solution.joints_within_limits.to_string(),
            num(s.plane_eval),
            num(max_res),
        ]);
    }
    let result = DkResult {
        quadratic,
        feasibility_product: feasibility_product(&rho, params).ok(),
        joint_limits_ok: limits,
        solutions,
        error,
    };
    Output::new(
        "dk",
        feasible,
        &DkInput { rho, posture },
        params,
        &result,
        table,
    )
}

#[derive(Debug, Clone, Serialize)]
struct VolumesInput {
    mc_samples: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
struct SampledRow {
    quantity: &'static str,
    exact: f64,
    estimate: f64,
    std_error: f64,
    hits: u64,
    z_score: f64,
}

#[derive(Debug, Clone, Serialize)]
struct MonteCarloReport {
    generator: &'static str,
    n_samples: u64,
    seed: u64,
    estimates: Vec<SampledRow>,
}

#[derive(Debug, Clone, Serialize)]
struct VolumesResult {
    closed_form: orthoglide::VolumeReport,
    bisector: orthoglide::workspace::BisectorLandmarks,
    monte_carlo: Option<MonteCarloReport>,
}

pub fn volumes(
    mc: Option<usize>,
    seed: u64,
    params: &ManipulatorParams,
) -> Result<Output, CliError> {
    let exact = workspace_volumes(params);
    let sampled = mc
        .map(|n| monte_carlo_volumes(params, n, seed))
        .transpose()?;
    let quantities = [
        ("vol_c", exact.vol_c),
        ("vol_s", exact.vol_s),
        ("vol_g", exact.vol_g),
        ("vol_w", exact.vol_w),
    ];
    let estimate_of = |i: usize| -> Option<VolumeEstimate> {
        sampled
            .as_ref()
            .map(|s| [s.vol_c, s.vol_s, s.vol_g, s.vol_w][i])
    };
    let mut table = Table::new(&[
        "quantity",
        "closed_form",
        "estimate",
        "std_error",
        "z_score",
    ]);
    for (i, (name, value)) in quantities.iter().enumerate() {
        let est = estimate_of(i);
        table.push(vec![
            name.to_string(),
            num(*value),
            opt_num(est.map(|e| e.value)),
            opt_num(est.map(|e| e.std_error)),
            opt_num(est.map(|e| e.z_score(*value))),
        ]);
    }
    for (name, value) in [
        ("pct_w_of_serial", exact.pct_w_of_serial),
        ("pct_s_of_serial", exact.pct_s_of_serial),
        ("pct_c_of_serial", exact.pct_c_of_serial),
    ] {
        table.push(vec![
            name.to_string(),
            num(value),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    let monte_carlo = sampled.as_ref().map(|s| MonteCarloReport {
        generator: "ChaCha8Rng",
        n_samples: s.n_samples,
        seed: s.seed,
        estimates: quantities
            .iter()
            .enumerate()
            .map(|(i, (name, value))| {
                let e = estimate_of(i).expect("sampled");
                SampledRow {
                    quantity: name,
                    exact: *value,
                    estimate: e.value,
                    std_error: e.std_error,
                    hits: e.hits,
                    z_score: e.z_score(*value),
                }
            })
            .collect(),
    });
    let result = VolumesResult {
        closed_form: exact,
        bisector: orthoglide::bisector_landmarks(params),
        monte_carlo,
    };
    let input = VolumesInput {
        mc_samples: mc,
        seed: mc.map(|_| seed),
    };
    Ok(Output::new("volumes", true, &input, params, &result, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JointStatus {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Serialize)]
struct CheckInput {
    rho: JointVector,
}

#[derive(Debug, Clone, Serialize)]
struct CheckResult {
    status: JointStatus,
    dk_feasible: bool,
    on_boundary: bool,
    joint_limits_ok: bool,
    feasibility_product: Option<f64>,
    relative_discriminant: Option<f64>,
    error: Option<String>,
}

pub fn jointspace_check(rho: JointVector, params: &ManipulatorParams) -> Output {
    let limits = joint_limits_ok(&rho, params);
    let (product, boundary, feasible, error) = match (
        feasibility_product(&rho, params),
        on_boundary(&rho, params),
        dk_feasible(&rho, params),
    ) {
        (Ok(p), Ok(b), Ok(f)) => (Some(p), b, f, None),
        (p, _, f) => (
            p.as_ref().ok().copied(),
            false,
            false,
            f.err().or(p.err()).map(|e| e.to_string()),
        ),
    };
    let status = if !feasible {
        JointStatus::Outside
    } else if boundary {
        JointStatus::Boundary
    } else {
        JointStatus::Interior
    };
    let result = CheckResult {
        status,
        dk_feasible: feasible,
        on_boundary: boundary,
        joint_limits_ok: limits,
        feasibility_product: product,
        relative_discriminant: dk_coefficients(&rho, params)
            .ok()
            .map(|q| q.relative_discriminant()),
        error,
    };
    let mut table = Table::new(&[
        "status",
        "dk_feasible",
        "on_boundary",
        "joint_limits_ok",
        "feasibility_product",
        "relative_discriminant",
    ]);
    table.push(vec![
        serde_json::to_value(status)
            .expect("serializable")
            .as_str()
            .unwrap_or_default()
            .to_string(),
        feasible.to_string(),
        boundary.to_string(),
        limits.to_string(),
        opt_num(product),
        opt_num(result.relative_discriminant),
    ]);
    Output::new(
        "jointspace check",
        feasible,
        &CheckInput { rho },
        params,
        &result,
        table,
    )
}

#[derive(Debug, Clone, Serialize)]
struct GridInput {
    grid: usize,
}

#[derive(Debug, Clone, Serialize)]
struct GridResult {
    landmarks: jointspace::JointspaceLandmarks,
    samples: Vec<orthoglide::BoundarySample>,
}

pub fn jointspace_boundary_sample(
    grid: usize,
    params: &ManipulatorParams,
) -> Result<Output, CliError> {
    let samples = sample_boundary_grid(grid, params)?;
    let mut table = Table::new(&["phi", "theta", "t", "rho_x", "rho_y", "rho_z"]);
    for s in &samples {
        table.push(vec![
            num(s.phi),
            num(s.theta),
            num(s.t),
            num(s.rho.x),
            num(s.rho.y),
            num(s.rho.z),
        ]);
    }
    let result = GridResult {
        landmarks: jointspace::bisector_landmarks(params),
        samples,
    };
    Ok(Output::new(
        "jointspace boundary-sample",
        true,
        &GridInput { grid },
        params,
        &result,
        table,
    ))
}

pub fn trajectory(req: &TrajectoryRequest, params: &ManipulatorParams) -> Result<Output, CliError> {
    let report = run_trajectory(req, params)?;
    let mut table = Table::new(&[
        "index",
        "segment",
        "p_x",
        "p_y",
        "p_z",
        "rho_x",
        "rho_y",
        "rho_z",
        "branch",
        "region",
        "singular_x",
        "singular_y",
        "singular_z",
        "limit_violation",
        "unreachable_axis",
        "branch_switch_required",
        "feasible_branches",
    ]);
    for r in &report.records {
        let rho = r.rho.map(|v| v.to_array());
        table.push(vec![
            r.index.to_string(),
            r.segment.to_string(),
            num(r.p.x),
            num(r.p.y),
            num(r.p.z),
            opt_num(rho.map(|v| v[0])),
            opt_num(rho.map(|v| v[1])),
            opt_num(rho.map(|v| v[2])),
            r.branch.label(),
            format!("{:?}", r.region),
            r.serial_singular[0].to_string(),
            r.serial_singular[1].to_string(),
            r.serial_singular[2].to_string(),
            r.limit_violation.to_string(),
            r.unreachable_axis
                .map(|a| a.to_string())
                .unwrap_or_default(),
            r.branch_switch_required.to_string(),
            r.feasible_branches.to_string(),
        ]);
    }
    Ok(Output::new(
        "trajectory",
        report.summary.feasible,
        req,
        params,
        &report,
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ManipulatorParams {
        ManipulatorParams::new(1.0).unwrap()
    }

    fn result(out: &Output) -> &serde_json::Value {
        &out.envelope.result
    }

    #[test]
    fn ik_home_neighbourhood_single_ppp() {
        let out = ik(CartesianPoint::new(-0.5, 0.4, 0.3), None, &unit());
        assert!(out.feasible());
        let r = result(&out);
        assert_eq!(r["region"], "SphereInterior");
        assert_eq!(r["solutions"].as_array().unwrap().len(), 1);
        assert_eq!(r["solutions"][0]["branch"], "PPP");
    }

    #[test]
    fn ik_requested_branch_outside_limits_is_infeasible() {
        let out = ik(
            CartesianPoint::new(-0.5, 0.4, 0.3),
            Some(BranchTriple::MMM),
            &unit(),
        );
        assert!(!out.feasible());
        assert_eq!(result(&out)["solutions"][0]["joints_within_limits"], false);
        let out = ik(
            CartesianPoint::new(2.0, 0.0, 0.0),
            Some(BranchTriple::PPP),
            &unit(),
        );
        assert!(!out.feasible());
        assert!(result(&out)["error"].is_string());
    }

    #[test]
    fn dk_zero_joint_reports_error() {
        let out = dk(JointVector::new(0.0, 1.0, 1.0), None, &unit());
        assert!(!out.feasible());
        assert!(result(&out)["quadratic"].is_null());
        assert!(result(&out)["error"].as_str().unwrap().contains('x'));
    }

    #[test]
    fn dk_outside_limits_is_annotated_and_infeasible() {
        let out = dk(JointVector::new(-0.3, 0.3, 0.3), None, &unit());
        assert!(!out.feasible());
        let sols = result(&out)["solutions"].as_array().unwrap();
        assert!(!sols.is_empty());
        assert!(sols.iter().all(|s| s["joints_within_limits"] == false));
    }

    #[test]
    fn check_statuses() {
        let home = jointspace_check(JointVector::splat(1.0), &unit());
        assert_eq!(result(&home)["status"], "interior");
        assert_eq!(result(&home)["feasibility_product"], -3.0);
        let out = jointspace_check(JointVector::splat(2.0), &unit());
        assert_eq!(result(&out)["status"], "outside");
        let zero = jointspace_check(JointVector::new(0.0, 1.0, 1.0), &unit());
        assert!(!zero.feasible());
        assert!(result(&zero)["error"].is_string());
    }

    #[test]
    fn volumes_without_sampling() {
        let out = volumes(None, 0, &unit()).unwrap();
        assert!(result(&out)["monte_carlo"].is_null());
        assert_eq!(out.table.rows.len(), 7);
        assert!(out.table.rows[0][2].is_empty());
    }

    #[test]
    fn boundary_grid_rejects_zero() {
        assert!(jointspace_boundary_sample(0, &unit()).is_err());
    }
}
