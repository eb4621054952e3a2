use crate::model::Axis;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, KinematicsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    /// The query point lies outside the cylinder bounding this axis, so no
    /// branch has a real solution.
    #[error("negative inverse-kinematics radicand on axis {axis} ({value:e})")]
    RadicandNegative { axis: Axis, value: f64 },

    /// Leg orthogonal to its prismatic axis; the branch sign is undefined.
    #[error("serial singularity on axis {0}: leg orthogonal to the joint axis")]
    SerialSingularity(Axis),

    #[error("joint variable on axis {0} is zero")]
    ZeroJoint(Axis),

    /// Negative discriminant: the joint vector lies outside the feasible
    /// joint region and the direct kinematics has no real solution.
    #[error("no direct kinematic solution (discriminant / B^2 = {relative_discriminant:e})")]
    NoSolution { relative_discriminant: f64 },

    #[error("flat configuration: tool point lies on the joint-centre plane")]
    FlatConfiguration,

    #[error(
        "point and joint vector are not model-consistent (max relative residual {max_residual:e})"
    )]
    ModelInconsistent { max_residual: f64 },

    #[error("direction component on axis {axis} is {value:e}, below the floor {floor:e}")]
    DirectionOnOctantBorder { axis: Axis, value: f64, floor: f64 },

    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
}
