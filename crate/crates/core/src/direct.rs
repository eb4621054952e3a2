//! Closed-form direct kinematics.
//!
//! Subtracting the leg equations pairwise shows the tool point lies on the
//! line of points equidistant from the three joint centres,
//! `p_i = rho_i / 2 + t / rho_i`. Substituting back gives a quadratic
//! `A t^2 + B t + C = 0` whose two roots place `p` on either side of the
//! plane through the joint centres. The sign `m` selecting the root is the
//! posture index; a zero discriminant is the flat configuration.

use serde::Serialize;

use crate::error::{KinematicsError, Result};
use crate::model::{
    ensure_consistent, joint_limits_ok, Axis, CartesianPoint, JointVector, ManipulatorParams,
    PostureIndex,
};

/// Coefficients of the quadratic in the line parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DkQuadratic {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    /// Discriminant divided by `B^2`; equals `1 - P` where `P` is the
    /// feasibility product of the joint vector.
    pub fn relative_discriminant(&self) -> f64 {
        self.discriminant() / (self.b * self.b)
    }

    /// Root at which the equidistant line pierces the joint-centre plane.
    pub fn plane_root(&self) -> f64 {
        -self.b / (2.0 * self.a)
    }

    /// Both roots as `(m = -1, m = +1)`, or `None` for a negative
    /// discriminant. Needs `B > 0`, which holds whenever no joint is zero.
    ///
    /// The larger-magnitude root `q / A` is computed first and the other as
    /// `C / q`, avoiding cancellation when `4AC` is small against `B^2`.
    fn roots(&self, disc: f64) -> (f64, f64) {
        let q = -0.5 * (self.b + disc.sqrt());
        (q / self.a, self.c / q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkSolution {
    pub p: CartesianPoint,
    pub posture: PostureIndex,
    /// Root `t` of the quadratic (units of length squared).
    pub t_value: f64,
    /// Discriminant inside the zero band: the single flat-configuration
    /// solution, for which `posture` is only the requested value.
    pub flat: bool,
    /// The input joint vector satisfies `0 < rho_i <= 2L`.
    pub joints_within_limits: bool,
}

fn nonzero_joints(rho: &JointVector) -> Result<()> {
    if !rho.is_finite() {
        return Err(KinematicsError::NonFinite("joint vector"));
    }
    for axis in Axis::ALL {
        if rho[axis] == 0.0 {
            return Err(KinematicsError::ZeroJoint(axis));
        }
    }
    Ok(())
}

pub fn dk_coefficients(rho: &JointVector, params: &ManipulatorParams) -> Result<DkQuadratic> {
    nonzero_joints(rho)?;
    let (x2, y2, z2) = (rho.x * rho.x, rho.y * rho.y, rho.z * rho.z);
    let l2 = params.leg_length() * params.leg_length();
    let a = x2 * y2 + x2 * z2 + y2 * z2;
    let b = x2 * y2 * z2;
    let c = (x2 + y2 + z2 - 4.0 * l2) * b / 4.0;
    Ok(DkQuadratic { a, b, c })
}

/// Point on the equidistant line at parameter `t`.
pub fn equidistant_point(rho: &JointVector, t: f64) -> Result<CartesianPoint> {
    nonzero_joints(rho)?;
    Ok(CartesianPoint::new(
        rho.x / 2.0 + t / rho.x,
        rho.y / 2.0 + t / rho.y,
        rho.z / 2.0 + t / rho.z,
    ))
}

/// `p_x / rho_x + p_y / rho_y + p_z / rho_z - 1`; zero on the joint-centre
/// plane, negative on the side of the origin.
pub fn plane_eval(p: &CartesianPoint, rho: &JointVector) -> Result<f64> {
    nonzero_joints(rho)?;
    Ok(p.x / rho.x + p.y / rho.y + p.z / rho.z - 1.0)
}

fn solution(
    rho: &JointVector,
    posture: PostureIndex,
    t: f64,
    flat: bool,
    params: &ManipulatorParams,
) -> Result<DkSolution> {
    Ok(DkSolution {
        p: equidistant_point(rho, t)?,
        posture,
        t_value: t,
        flat,
        joints_within_limits: joint_limits_ok(rho, params),
    })
}

enum Roots {
    Two(f64, f64),
    Flat(f64),
    None(f64),
}

fn classify_roots(quad: &DkQuadratic, params: &ManipulatorParams) -> Roots {
    let disc = quad.discriminant();
    let band = params.eps_geom() * quad.b * quad.b;
    if disc.abs() <= band {
        Roots::Flat(quad.plane_root())
    } else if disc > 0.0 {
        let (minus, plus) = quad.roots(disc);
        Roots::Two(minus, plus)
    } else {
        Roots::None(quad.relative_discriminant())
    }
}

/// Solution on the requested posture. Within the discriminant band both
/// postures collapse onto the flat configuration.
pub fn dk_solve(
    rho: &JointVector,
    posture: PostureIndex,
    params: &ManipulatorParams,
) -> Result<DkSolution> {
    let quad = dk_coefficients(rho, params)?;
    match classify_roots(&quad, params) {
        Roots::Two(minus, plus) => {
            let t = match posture {
                PostureIndex::Minus => minus,
                PostureIndex::Plus => plus,
            };
            solution(rho, posture, t, false, params)
        }
        Roots::Flat(t0) => solution(rho, posture, t0, true, params),
        Roots::None(relative_discriminant) => Err(KinematicsError::NoSolution {
            relative_discriminant,
        }),
    }
}

/// Every direct kinematic solution: two (`m = -1` then `m = +1`), one flat
/// solution, or none.
///
/// Joint vectors outside the joint limits are still solved; see
/// [`DkSolution::joints_within_limits`].
pub fn dk_both(rho: &JointVector, params: &ManipulatorParams) -> Result<Vec<DkSolution>> {
    let quad = dk_coefficients(rho, params)?;
    match classify_roots(&quad, params) {
        Roots::Two(minus, plus) => Ok(vec![
            solution(rho, PostureIndex::Minus, minus, false, params)?,
            solution(rho, PostureIndex::Plus, plus, false, params)?,
        ]),
        Roots::Flat(t0) => Ok(vec![solution(rho, PostureIndex::Minus, t0, true, params)?]),
        Roots::None(_) => Ok(Vec::new()),
    }
}

/// Signed distance from `p` to the joint-centre plane, positive on the far
/// side from the origin.
pub fn plane_distance(p: &CartesianPoint, rho: &JointVector) -> Result<f64> {
    let eval = plane_eval(p, rho)?;
    let normal = (rho.x.powi(-2) + rho.y.powi(-2) + rho.z.powi(-2)).sqrt();
    Ok(eval / normal)
}

/// Posture index of a consistent `(p, rho)` pair.
pub fn posture_of(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> Result<PostureIndex> {
    nonzero_joints(rho)?;
    ensure_consistent(p, rho, params)?;
    if plane_distance(p, rho)?.abs() <= params.eps_branch() {
        return Err(KinematicsError::FlatConfiguration);
    }
    let side = if rho.x > 0.0 && rho.y > 0.0 && rho.z > 0.0 {
        p.x * rho.y * rho.z + rho.x * p.y * rho.z + rho.x * rho.y * p.z - rho.x * rho.y * rho.z
    } else {
        plane_eval(p, rho)?
    };
    Ok(if side > 0.0 {
        PostureIndex::Plus
    } else {
        PostureIndex::Minus
    })
}
