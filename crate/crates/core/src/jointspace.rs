//! Feasible joint region and its boundary surface.
//!
//! A joint vector has a direct kinematic solution iff
//! `P = (|rho|^2 - 4L^2) * (rho_x^-2 + rho_y^-2 + rho_z^-2) <= 1`.
//! The boundary `P = 1` is the flat-configuration surface. Along a first-octant
//! direction `e` it sits at radius `2L * sqrt(F / (F - 1))` with
//! `F = sum e_i^-2 >= 9`; for a fixed `(rho_y, rho_z)` it is the positive root
//! of a biquadratic in `rho_x`.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::direct::dk_coefficients;
use crate::error::{KinematicsError, Result};
use crate::model::{joint_limits_ok, Axis, JointVector, ManipulatorParams};

/// Direction `e = (cos(phi) cos(theta), cos(phi) sin(theta), sin(phi))`
/// with `phi, theta` in `(0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalDirection {
    phi: f64,
    theta: f64,
}

impl SphericalDirection {
    pub fn new(phi: f64, theta: f64) -> Result<Self> {
        let ok = |a: f64| a > 0.0 && a <= FRAC_PI_2;
        if !(ok(phi) && ok(theta)) {
            return Err(KinematicsError::InvalidParams(format!(
                "direction angles must lie in (0, pi/2], got phi={phi}, theta={theta}"
            )));
        }
        Ok(Self { phi, theta })
    }

    /// Direction of a vector with strictly positive components.
    pub fn from_vector(v: &JointVector) -> Result<Self> {
        if !(v.x > 0.0 && v.y > 0.0 && v.z > 0.0) {
            return Err(KinematicsError::InvalidParams(
                "direction vector must be in the open first octant".into(),
            ));
        }
        let n = v.norm();
        Self::new((v.z / n).asin(), v.y.atan2(v.x))
    }

    pub fn bisector() -> Self {
        Self {
            phi: (1.0_f64 / 3.0).sqrt().asin(),
            theta: FRAC_PI_2 / 2.0,
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [cp * ct, cp * st, sp]
    }
}

/// `P = (|rho|^2 - 4L^2)(rho_x^-2 + rho_y^-2 + rho_z^-2)`.
pub fn feasibility_product(rho: &JointVector, params: &ManipulatorParams) -> Result<f64> {
    for axis in Axis::ALL {
        if rho[axis] == 0.0 {
            return Err(KinematicsError::ZeroJoint(axis));
        }
    }
    let l2 = params.leg_length() * params.leg_length();
    let inv = rho.x.powi(-2) + rho.y.powi(-2) + rho.z.powi(-2);
    Ok((rho.norm_squared() - 4.0 * l2) * inv)
}

/// Within the joint limits and inside the closed feasible region.
///
/// Points whose direct-kinematics discriminant falls in the zero band (the
/// flat configurations) count as feasible.
pub fn dk_feasible(rho: &JointVector, params: &ManipulatorParams) -> Result<bool> {
    let product = feasibility_product(rho, params)?;
    if !joint_limits_ok(rho, params) {
        return Ok(false);
    }
    if product <= 1.0 {
        return Ok(true);
    }
    on_boundary(rho, params)
}

/// Direct-kinematics discriminant inside its zero band.
pub fn on_boundary(rho: &JointVector, params: &ManipulatorParams) -> Result<bool> {
    let q = dk_coefficients(rho, params)?;
    Ok(q.relative_discriminant().abs() <= params.eps_geom())
}

fn check_direction(e: &[f64; 3], params: &ManipulatorParams) -> Result<()> {
    let floor = params.direction_floor();
    for axis in Axis::ALL {
        let value = e[axis.index()];
        if value < floor {
            return Err(KinematicsError::DirectionOnOctantBorder { axis, value, floor });
        }
    }
    Ok(())
}

/// `F = e_x^-2 + e_y^-2 + e_z^-2`.
pub fn direction_factor(dir: &SphericalDirection, params: &ManipulatorParams) -> Result<f64> {
    let e = dir.unit_vector();
    check_direction(&e, params)?;
    Ok(e.iter().map(|c| c.powi(-2)).sum())
}

/// Distance from the origin to the boundary surface along `dir`.
pub fn boundary_radius(dir: &SphericalDirection, params: &ManipulatorParams) -> Result<f64> {
    let f = direction_factor(dir, params)?;
    Ok(2.0 * params.leg_length() * (f / (f - 1.0)).sqrt())
}

pub fn boundary_point(dir: &SphericalDirection, params: &ManipulatorParams) -> Result<JointVector> {
    let t = boundary_radius(dir, params)?;
    Ok(JointVector::from_array(dir.unit_vector().map(|c| c * t)))
}

/// Positive `rho_x` on the boundary for fixed `rho_y, rho_z > 0`.
///
/// The biquadratic `D u^2 + D E u + E = 0` in `u = rho_x^2` has root product
/// `E / D`, so at most one root is positive: none when `E >= 0`.
pub fn boundary_rho_x(rho_y: f64, rho_z: f64, params: &ManipulatorParams) -> Option<f64> {
    if !(rho_y > 0.0 && rho_z > 0.0) {
        return None;
    }
    let d = rho_y.powi(-2) + rho_z.powi(-2);
    let l2 = params.leg_length() * params.leg_length();
    let e = rho_y * rho_y + rho_z * rho_z - 4.0 * l2;
    if e.is_nan() || e >= 0.0 {
        return None;
    }
    // -DE > 0: the positive root takes the + sign with no cancellation
    let de = d * e;
    let u = (-de + (de * de - 4.0 * d * e).sqrt()) / (2.0 * d);
    Some(u.sqrt())
}

/// `boundary_radius - 2L`.
pub fn boundary_vs_sphere_gap(dir: &SphericalDirection, params: &ManipulatorParams) -> Result<f64> {
    Ok(boundary_radius(dir, params)? - 2.0 * params.leg_length())
}

/// Bisector values: per-axis coordinate and radius of the boundary surface,
/// and the same for the sphere of radius `2L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointspaceLandmarks {
    pub boundary_coordinate: f64,
    pub boundary_radius: f64,
    pub sphere_coordinate: f64,
    pub sphere_radius: f64,
}

pub fn bisector_landmarks(params: &ManipulatorParams) -> JointspaceLandmarks {
    let l = params.leg_length();
    let t = 2.0 * l * (9.0_f64 / 8.0).sqrt();
    JointspaceLandmarks {
        boundary_coordinate: t / 3.0_f64.sqrt(),
        boundary_radius: t,
        sphere_coordinate: 2.0 * l / 3.0_f64.sqrt(),
        sphere_radius: 2.0 * l,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample {
    pub phi: f64,
    pub theta: f64,
    pub t: f64,
    pub rho: JointVector,
}

/// Boundary points on an `n x n` cell-centred grid of `(phi, theta)` over
/// `(0, pi/2)^2`, `phi` varying slowest.
pub fn sample_boundary_grid(n: usize, params: &ManipulatorParams) -> Result<Vec<BoundarySample>> {
    if n == 0 {
        return Err(KinematicsError::InvalidParams(
            "grid size must be > 0".into(),
        ));
    }
    let step = FRAC_PI_2 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let dir = SphericalDirection::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step)?;
            let t = boundary_radius(&dir, params)?;
            out.push(BoundarySample {
                phi: dir.phi(),
                theta: dir.theta(),
                t,
                rho: JointVector::from_array(dir.unit_vector().map(|c| c * t)),
            });
        }
    }
    Ok(out)
}
