//! Closed-form inverse kinematics.
//!
//! For each axis `rho_i = p_i + s_i * sqrt(L^2 - p_j^2 - p_k^2)` with the
//! branch sign `s_i` in `{-1, +1}`. The two roots of an axis coincide on the
//! serial-singular surface where the radicand vanishes.

use serde::Serialize;

use crate::error::{KinematicsError, Result};
use crate::model::{
    ensure_consistent, joint_limits_ok, Axis, BranchTriple, CartesianPoint, JointVector,
    ManipulatorParams, Sign,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IkSolution {
    pub rho: JointVector,
    pub branch: BranchTriple,
}

/// Radicands `L^2 - p_j^2 - p_k^2` per axis, unclamped.
pub fn ik_radicands(p: &CartesianPoint, params: &ManipulatorParams) -> [f64; 3] {
    let l2 = params.leg_length() * params.leg_length();
    Axis::ALL.map(|axis| {
        let (j, k) = axis.others();
        l2 - p[j] * p[j] - p[k] * p[k]
    })
}

/// Square root of the axis radicand; slightly negative radicands within
/// `eps_geom * L^2` are treated as zero.
fn axis_root(radicand: f64, axis: Axis, params: &ManipulatorParams) -> Result<f64> {
    let band = params.eps_geom() * params.leg_length() * params.leg_length();
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -band {
        Ok(0.0)
    } else {
        Err(KinematicsError::RadicandNegative {
            axis,
            value: radicand,
        })
    }
}

/// Both roots for one axis, `(plus, minus)`.
pub fn axis_roots(
    p: &CartesianPoint,
    axis: Axis,
    params: &ManipulatorParams,
) -> Result<(f64, f64)> {
    let root = axis_root(ik_radicands(p, params)[axis.index()], axis, params)?;
    Ok((p[axis] + root, p[axis] - root))
}

/// Joint vector on one branch. Joint limits are not applied.
pub fn ik_branch(
    p: &CartesianPoint,
    branch: BranchTriple,
    params: &ManipulatorParams,
) -> Result<IkSolution> {
    if !p.is_finite() {
        return Err(KinematicsError::NonFinite("cartesian point"));
    }
    let radicands = ik_radicands(p, params);
    let mut rho = [0.0; 3];
    for axis in Axis::ALL {
        let root = axis_root(radicands[axis.index()], axis, params)?;
        rho[axis.index()] = p[axis] + branch.sign(axis).value() * root;
    }
    Ok(IkSolution {
        rho: JointVector::from_array(rho),
        branch,
    })
}

/// All branches whose joint vector satisfies the joint limits, `PPP` first.
///
/// Away from the boundaries of the workspace regions the result has exactly
/// 0, 1 or 8 entries.
pub fn ik_enumerate_feasible(p: &CartesianPoint, params: &ManipulatorParams) -> Vec<IkSolution> {
    BranchTriple::ALL
        .iter()
        .filter_map(|&b| ik_branch(p, b, params).ok())
        .filter(|sol| joint_limits_ok(&sol.rho, params))
        .collect()
}

/// Branch signs `sgn(rho_i - p_i)` of a consistent `(p, rho)` pair.
pub fn branch_of(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> Result<BranchTriple> {
    ensure_consistent(p, rho, params)?;
    let mut signs = [Sign::Plus; 3];
    for axis in Axis::ALL {
        let d = rho[axis] - p[axis];
        if d.abs() <= params.eps_branch() {
            return Err(KinematicsError::SerialSingularity(axis));
        }
        signs[axis.index()] = Sign::of(d);
    }
    Ok(BranchTriple::new(signs[0], signs[1], signs[2]))
}

/// Per-axis serial-singularity flags: radicand within `eps_geom * L^2` of 0.
pub fn is_serial_singular(p: &CartesianPoint, params: &ManipulatorParams) -> [bool; 3] {
    let band = params.eps_geom() * params.leg_length() * params.leg_length();
    ik_radicands(p, params).map(|r| r.abs() <= band)
}
