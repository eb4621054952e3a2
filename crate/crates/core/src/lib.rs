//! Analytic kinematics and workspace analysis of the Orthoglide, a 3-DOF
//! translational parallel manipulator with three orthogonal prismatic joints.
//!
//! Each leg is modelled as a bar of length `L` between the tool centre point
//! `p` and a joint centre sliding on one coordinate axis:
//!
//! ```text
//! (p_x - rho_x)^2 + p_y^2 + p_z^2 = L^2   (and cyclically for y, z)
//! 0 < rho_i <= 2L
//! ```
//!
//! The crate provides:
//!
//! * [`inverse`]: closed-form inverse kinematics on each of the eight
//!   branches `PPP .. MMM`, feasible-branch enumeration and serial
//!   singularities;
//! * [`direct`]: closed-form direct kinematics on each posture, with
//!   flat-configuration detection;
//! * [`workspace`]: region classification with exact solution counts, exact
//!   and sampled volumes;
//! * [`jointspace`]: the feasible joint region and its boundary surface.
//!
//! ```
//! use orthoglide::{ik_enumerate_feasible, CartesianPoint, ManipulatorParams};
//!
//! let params = ManipulatorParams::new(1.0).unwrap();
//! let sols = ik_enumerate_feasible(&CartesianPoint::new(0.7, 0.7, 0.7), &params);
//! assert_eq!(sols.len(), 8);
//! ```

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod direct;
pub mod error;
pub mod inverse;
pub mod jointspace;
pub mod model;
pub mod workspace;

pub use direct::{
    dk_both, dk_coefficients, dk_solve, equidistant_point, plane_distance, plane_eval, posture_of,
    DkQuadratic, DkSolution,
};
pub use error::{KinematicsError, Result};
pub use inverse::{
    axis_roots, branch_of, ik_branch, ik_enumerate_feasible, ik_radicands, is_serial_singular,
    IkSolution,
};
pub use jointspace::{
    boundary_point, boundary_radius, boundary_rho_x, boundary_vs_sphere_gap, dk_feasible,
    feasibility_product, sample_boundary_grid, BoundarySample, JointspaceLandmarks,
    SphericalDirection,
};
pub use model::{
    is_model_consistent, joint_limits_ok, leg_angles, leg_residuals, max_abs_residual, Axis,
    BranchTriple, CartesianPoint, JointVector, LegAngles, ManipulatorParams, PostureIndex, Sign,
};
pub use workspace::{
    bisector_landmarks, classify_point, in_cylinder_intersection, in_shell, in_sphere,
    in_workspace, monte_carlo_volumes, workspace_volumes, SampledVolumes, VolumeEstimate,
    VolumeReport, WorkspaceRegion,
};
