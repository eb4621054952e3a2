//! Offline trajectory check: linear interpolation between waypoints with the
//! inverse kinematic branch held fixed.

use orthoglide::{
    classify_point, ik_branch, ik_enumerate_feasible, ik_radicands, is_serial_singular, Axis,
    BranchTriple, CartesianPoint, JointVector, KinematicsError, ManipulatorParams, WorkspaceRegion,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityPolicy {
    /// Stop at the first singular or infeasible step.
    #[default]
    Abort,
    /// Keep the branch, flag every step and run to the end.
    WarnAndHoldBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRequest {
    pub waypoints: Vec<CartesianPoint>,
    pub step: f64,
    #[serde(default = "default_branch")]
    pub initial_branch: BranchTriple,
    #[serde(default)]
    pub policy: SingularityPolicy,
}

fn default_branch() -> BranchTriple {
    BranchTriple::PPP
}

impl TrajectoryRequest {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.waypoints.len() < 2 {
            return Err(CliError::Usage(format!(
                "trajectory needs at least 2 waypoints, got {}",
                self.waypoints.len()
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(CliError::Usage(format!(
                "step must be finite and > 0, got {}",
                self.step
            )));
        }
        if let Some(i) = self.waypoints.iter().position(|w| !w.is_finite()) {
            return Err(CliError::Usage(format!("waypoint {i} is not finite")));
        }
        Ok(())
    }

    /// Interpolated points: each segment is split into `ceil(len / step)`
    /// equal chords, shared endpoints appear once.
    pub fn interpolate(&self) -> Vec<(usize, CartesianPoint)> {
        let mut out = vec![(0, self.waypoints[0])];
        for (seg, pair) in self.waypoints.windows(2).enumerate() {
            let (a, b) = (pair[0].to_array(), pair[1].to_array());
            let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let n = ((len / self.step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            for i in 1..n {
                let s = i as f64 / n as f64;
                out.push((
                    seg,
                    CartesianPoint::new(a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]),
                ));
            }
            out.push((seg, pair[1]));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub segment: usize,
    pub p: CartesianPoint,
    /// Joint vector on the held branch; absent when a radicand is negative.
    pub rho: Option<JointVector>,
    pub branch: BranchTriple,
    pub region: WorkspaceRegion,
    pub serial_singular: [bool; 3],
    /// The held branch gives a joint vector outside `0 < rho_i <= 2L`.
    pub limit_violation: bool,
    /// First axis whose radicand is negative.
    pub unreachable_axis: Option<Axis>,
    /// The held branch is infeasible but another branch is feasible.
    pub branch_switch_required: bool,
    pub feasible_branches: usize,
}

impl StepRecord {
    pub fn is_singular(&self) -> bool {
        self.serial_singular.iter().any(|&s| s)
    }

    pub fn is_failure(&self) -> bool {
        self.rho.is_none() || self.limit_violation
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub feasible: bool,
    pub aborted: bool,
    pub planned_steps: usize,
    pub evaluated_steps: usize,
    pub first_failure: Option<usize>,
    pub first_singularity: Option<usize>,
    pub singular_steps: usize,
    pub limit_violations: usize,
    pub unreachable_steps: usize,
    pub branch_switch_steps: usize,
    pub boundary_band_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub records: Vec<StepRecord>,
    pub summary: TrajectorySummary,
}

fn evaluate(
    index: usize,
    segment: usize,
    p: CartesianPoint,
    branch: BranchTriple,
    params: &ManipulatorParams,
) -> StepRecord {
    let feasible_branches = ik_enumerate_feasible(&p, params).len();
    let (rho, unreachable_axis) = match ik_branch(&p, branch, params) {
        Ok(sol) => (Some(sol.rho), None),
        Err(KinematicsError::RadicandNegative { axis, .. }) => (None, Some(axis)),
        Err(_) => {
            let r = ik_radicands(&p, params);
            (None, Axis::ALL.into_iter().find(|a| r[a.index()] < 0.0))
        }
    };
    let limit_violation = rho.is_some_and(|r| !orthoglide::joint_limits_ok(&r, params));
    let held_ok = rho.is_some() && !limit_violation;
    StepRecord {
        index,
        segment,
        p,
        rho,
        branch,
        region: classify_point(&p, params),
        serial_singular: is_serial_singular(&p, params),
        limit_violation,
        unreachable_axis,
        branch_switch_required: !held_ok && feasible_branches > 0,
        feasible_branches,
    }
}

/// Runs the check. Under [`SingularityPolicy::Abort`] evaluation stops at
/// the first singular or failing step, which is the last record.
pub fn run_trajectory(
    req: &TrajectoryRequest,
    params: &ManipulatorParams,
) -> Result<TrajectoryReport, CliError> {
    req.validate()?;
    let points = req.interpolate();
    let mut records = Vec::with_capacity(points.len());
    let mut aborted = false;
    for (index, (segment, p)) in points.iter().enumerate() {
        let rec = evaluate(index, *segment, *p, req.initial_branch, params);
        let stop =
            req.policy == SingularityPolicy::Abort && (rec.is_failure() || rec.is_singular());
        records.push(rec);
        if stop {
            aborted = true;
            break;
        }
    }
    let first_failure = records.iter().find(|r| r.is_failure()).map(|r| r.index);
    let first_singularity = records.iter().find(|r| r.is_singular()).map(|r| r.index);
    let summary = TrajectorySummary {
        feasible: first_failure.is_none() && !aborted,
        aborted,
        planned_steps: points.len(),
        evaluated_steps: records.len(),
        first_failure,
        first_singularity,
        singular_steps: records.iter().filter(|r| r.is_singular()).count(),
        limit_violations: records.iter().filter(|r| r.limit_violation).count(),
        unreachable_steps: records.iter().filter(|r| r.rho.is_none()).count(),
        branch_switch_steps: records.iter().filter(|r| r.branch_switch_required).count(),
        boundary_band_steps: records
            .iter()
            .filter(|r| r.region == WorkspaceRegion::BoundaryBand)
            .count(),
    };
    Ok(TrajectoryReport { records, summary })
}
