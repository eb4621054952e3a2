//! Bar-link geometric model: shared value types, tolerance policy and the raw
//! constraint predicates.
//!
//! Each leg is a rigid link of length `L` joining the tool centre point `p` to
//! a prismatic joint centre on one coordinate axis, at `(rho_x, 0, 0)`,
//! `(0, rho_y, 0)` or `(0, 0, rho_z)`. The home position `p = 0` corresponds
//! to `rho = (L, L, L)`.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KinematicsError, Result};

pub const DEFAULT_EPS_GEOM: f64 = 1e-9;
/// Default `eps_branch` as a fraction of the leg length.
pub const DEFAULT_EPS_BRANCH_REL: f64 = 1e-9;
pub const DEFAULT_DIRECTION_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// The two remaining axes, in increasing order.
    pub const fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Leg length and the numeric tolerances used throughout the crate.
///
/// `eps_geom` is relative (residuals are measured in units of `L^2`),
/// `eps_branch` is an absolute length. `L` is the only scale of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManipulatorParams {
    leg_length: f64,
    eps_geom: f64,
    eps_branch: f64,
    direction_floor: f64,
}

impl ManipulatorParams {
    /// Parameters with default tolerances: `eps_geom = 1e-9`,
    /// `eps_branch = 1e-9 * L`, direction floor `1e-6`.
    pub fn new(leg_length: f64) -> Result<Self> {
        Self::with_tolerances(
            leg_length,
            DEFAULT_EPS_GEOM,
            DEFAULT_EPS_BRANCH_REL * leg_length,
        )
    }

    pub fn with_tolerances(leg_length: f64, eps_geom: f64, eps_branch: f64) -> Result<Self> {
        if !(leg_length.is_finite() && leg_length > 0.0) {
            return Err(KinematicsError::InvalidParams(format!(
                "leg length must be finite and > 0, got {leg_length}"
            )));
        }
        if !(eps_geom > 0.0 && eps_geom < 1e-3) {
            return Err(KinematicsError::InvalidParams(format!(
                "eps_geom must lie in (0, 1e-3), got {eps_geom}"
            )));
        }
        if !(eps_branch > 0.0 && eps_branch < leg_length * 1e-3) {
            return Err(KinematicsError::InvalidParams(format!(
                "eps_branch must lie in (0, L*1e-3), got {eps_branch}"
            )));
        }
        Ok(Self {
            leg_length,
            eps_geom,
            eps_branch,
            direction_floor: DEFAULT_DIRECTION_FLOOR,
        })
    }

    /// Smallest unit-direction component accepted by the jointspace boundary
    /// queries.
    pub fn with_direction_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor < 0.5) {
            return Err(KinematicsError::InvalidParams(format!(
                "direction floor must lie in (0, 0.5), got {floor}"
            )));
        }
        self.direction_floor = floor;
        Ok(self)
    }

    pub fn leg_length(&self) -> f64 {
        self.leg_length
    }

    pub fn eps_geom(&self) -> f64 {
        self.eps_geom
    }

    pub fn eps_branch(&self) -> f64 {
        self.eps_branch
    }

    pub fn direction_floor(&self) -> f64 {
        self.direction_floor
    }
}

macro_rules! vec3_type {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
        pub struct $name {
            pub x: f64,
            pub y: f64,
            pub z: f64,
        }

        impl $name {
            pub const fn new(x: f64, y: f64, z: f64) -> Self {
                Self { x, y, z }
            }

            /// Checked constructor rejecting NaN and infinities.
            pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
                let v = Self { x, y, z };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(KinematicsError::NonFinite($what))
                }
            }

            pub const fn splat(v: f64) -> Self {
                Self { x: v, y: v, z: v }
            }

            pub fn from_array(a: [f64; 3]) -> Self {
                Self::new(a[0], a[1], a[2])
            }

            pub fn to_array(self) -> [f64; 3] {
                [self.x, self.y, self.z]
            }

            pub fn is_finite(&self) -> bool {
                self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
            }

            pub fn norm(&self) -> f64 {
                self.norm_squared().sqrt()
            }

            pub fn norm_squared(&self) -> f64 {
                self.x * self.x + self.y * self.y + self.z * self.z
            }

            pub fn scaled(self, k: f64) -> Self {
                Self::new(self.x * k, self.y * k, self.z * k)
            }

            /// Reorders components so that component `i` of the result is
            /// component `perm[i]` of `self`.
            pub fn permuted(self, perm: [usize; 3]) -> Self {
                let a = self.to_array();
                Self::new(a[perm[0]], a[perm[1]], a[perm[2]])
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                (self.x - other.x)
                    .abs()
                    .max((self.y - other.y).abs())
                    .max((self.z - other.z).abs())
            }
        }

        impl Index<Axis> for $name {
            type Output = f64;

            fn index(&self, axis: Axis) -> &f64 {
                match axis {
                    Axis::X => &self.x,
                    Axis::Y => &self.y,
                    Axis::Z => &self.z,
                }
            }
        }
    };
}

vec3_type!(
    /// Tool-centre-point position.
    CartesianPoint,
    "cartesian point"
);
vec3_type!(
    /// Prismatic joint variables `(rho_x, rho_y, rho_z)`.
    JointVector,
    "joint vector"
);

/// A single configuration sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Sign::Plus => 'P',
            Sign::Minus => 'M',
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// Inverse-kinematics branch `(s_x, s_y, s_z)`, labelled `PPP` .. `MMM` with
/// `P` for `+1` and `M` for `-1` in `(x, y, z)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BranchTriple([Sign; 3]);

impl BranchTriple {
    pub const PPP: BranchTriple = BranchTriple([Sign::Plus; 3]);
    pub const MMM: BranchTriple = BranchTriple([Sign::Minus; 3]);

    /// All eight branches, `PPP` first, then the rest in lexicographic label
    /// order.
    pub const ALL: [BranchTriple; 8] = {
        use Sign::{Minus as M, Plus as P};
        [
            BranchTriple([P, P, P]),
            BranchTriple([M, M, M]),
            BranchTriple([M, M, P]),
            BranchTriple([M, P, M]),
            BranchTriple([M, P, P]),
            BranchTriple([P, M, M]),
            BranchTriple([P, M, P]),
            BranchTriple([P, P, M]),
        ]
    };

    pub const fn new(sx: Sign, sy: Sign, sz: Sign) -> Self {
        Self([sx, sy, sz])
    }

    pub fn sign(&self, axis: Axis) -> Sign {
        self.0[axis.index()]
    }

    pub fn signs(&self) -> [Sign; 3] {
        self.0
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|s| s.letter()).collect()
    }

    /// Same permutation convention as [`CartesianPoint::permuted`].
    pub fn permuted(self, perm: [usize; 3]) -> Self {
        Self([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]]])
    }
}

impl fmt::Display for BranchTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for BranchTriple {
    type Err = KinematicsError;

    fn from_str(s: &str) -> Result<Self> {
        let signs: Vec<Sign> = s
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'P' | '+' => Ok(Sign::Plus),
                'M' | '-' => Ok(Sign::Minus),
                _ => Err(KinematicsError::InvalidParams(format!(
                    "bad branch label {s:?}: expected three of P/M"
                ))),
            })
            .collect::<Result<_>>()?;
        match signs.as_slice() {
            [a, b, c] => Ok(Self([*a, *b, *c])),
            _ => Err(KinematicsError::InvalidParams(format!(
                "bad branch label {s:?}: expected three of P/M"
            ))),
        }
    }
}

impl From<BranchTriple> for String {
    fn from(b: BranchTriple) -> String {
        b.label()
    }
}

impl TryFrom<String> for BranchTriple {
    type Error = KinematicsError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Direct-kinematics posture `m`: side of the joint-centre plane on which the
/// tool point lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum PostureIndex {
    Minus,
    Plus,
}

impl PostureIndex {
    pub fn value(self) -> f64 {
        match self {
            PostureIndex::Minus => -1.0,
            PostureIndex::Plus => 1.0,
        }
    }
}

impl From<PostureIndex> for i8 {
    fn from(m: PostureIndex) -> i8 {
        match m {
            PostureIndex::Minus => -1,
            PostureIndex::Plus => 1,
        }
    }
}

impl TryFrom<i8> for PostureIndex {
    type Error = KinematicsError;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(PostureIndex::Minus),
            1 => Ok(PostureIndex::Plus),
            _ => Err(KinematicsError::InvalidParams(format!(
                "posture index must be -1 or +1, got {v}"
            ))),
        }
    }
}

impl FromStr for PostureIndex {
    type Err = KinematicsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-1" | "-" | "m" | "M" => Ok(PostureIndex::Minus),
            "1" | "+1" | "+" | "p" | "P" => Ok(PostureIndex::Plus),
            other => Err(KinematicsError::InvalidParams(format!(
                "posture index must be -1 or +1, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for PostureIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PostureIndex::Minus => "-1",
            PostureIndex::Plus => "+1",
        })
    }
}

/// Angles in `[0, pi]` between each bar link and its prismatic joint axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegAngles {
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
}

impl LegAngles {
    pub fn to_array(self) -> [f64; 3] {
        [self.theta_x, self.theta_y, self.theta_z]
    }
}

/// Vector from joint centre `axis` to the tool point.
fn leg_vector(p: &CartesianPoint, rho: &JointVector, axis: Axis) -> [f64; 3] {
    let mut v = p.to_array();
    v[axis.index()] -= rho[axis];
    v
}

/// Relative squared-length residuals `(|leg_i|^2 - L^2) / L^2`.
pub fn leg_residuals(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> [f64; 3] {
    let l2 = params.leg_length() * params.leg_length();
    Axis::ALL.map(|axis| {
        let v = leg_vector(p, rho, axis);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - l2) / l2
    })
}

pub fn max_abs_residual(p: &CartesianPoint, rho: &JointVector, params: &ManipulatorParams) -> f64 {
    leg_residuals(p, rho, params)
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.abs()))
}

pub fn is_model_consistent(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> bool {
    max_abs_residual(p, rho, params) <= params.eps_geom()
}

pub(crate) fn ensure_consistent(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> Result<()> {
    let max_residual = max_abs_residual(p, rho, params);
    // `!(<=)` so that NaN residuals are rejected too
    if max_residual.is_nan() || max_residual > params.eps_geom() {
        return Err(KinematicsError::ModelInconsistent { max_residual });
    }
    Ok(())
}

/// `0 < rho_i <= 2L` on every axis. Exact comparison, no tolerance.
pub fn joint_limits_ok(rho: &JointVector, params: &ManipulatorParams) -> bool {
    let upper = 2.0 * params.leg_length();
    Axis::ALL
        .iter()
        .all(|&axis| rho[axis] > 0.0 && rho[axis] <= upper)
}

/// Leg angles `theta_i = acos((p_i - rho_i) / L)`.
///
/// `theta_i > pi/2` exactly when the branch sign on that axis is `+1`.
pub fn leg_angles(
    p: &CartesianPoint,
    rho: &JointVector,
    params: &ManipulatorParams,
) -> Result<LegAngles> {
    ensure_consistent(p, rho, params)?;
    let l = params.leg_length();
    let tol = params.eps_geom();
    let mut out = [0.0; 3];
    for axis in Axis::ALL {
        let c = (p[axis] - rho[axis]) / l;
        if c.abs() > 1.0 + tol {
            return Err(KinematicsError::ModelInconsistent {
                max_residual: c.abs() - 1.0,
            });
        }
        out[axis.index()] = c.clamp(-1.0, 1.0).acos();
    }
    Ok(LegAngles {
        theta_x: out[0],
        theta_y: out[1],
        theta_z: out[2],
    })
}
