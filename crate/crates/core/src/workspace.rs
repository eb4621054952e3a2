//! Workspace sets, region classification and volumes.
//!
//! With the joint limits `0 < rho_i <= 2L` the reachable set splits into the
//! open ball `S` of radius `L` (one solution, branch `PPP`) and the thin
//! first-octant solid `G` between the ball and the intersection `C` of the
//! three orthogonal cylinders of radius `L` (all eight branches). Every other
//! point has no feasible solution.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{KinematicsError, Result};
use crate::model::{CartesianPoint, ManipulatorParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WorkspaceRegion {
    /// Open ball of radius `L`: exactly one solution.
    SphereInterior,
    /// First-octant part of the cylinder intersection outside the ball:
    /// exactly eight solutions.
    Shell,
    /// Within the tolerance band of a bounding surface; no count asserted.
    BoundaryBand,
    /// No feasible solution.
    Outside,
}

impl WorkspaceRegion {
    /// Number of feasible inverse kinematic solutions, `None` in the band.
    pub fn ik_count(self) -> Option<usize> {
        match self {
            WorkspaceRegion::SphereInterior => Some(1),
            WorkspaceRegion::Shell => Some(8),
            WorkspaceRegion::BoundaryBand => None,
            WorkspaceRegion::Outside => Some(0),
        }
    }
}

fn pairwise_sums(p: &CartesianPoint) -> [f64; 3] {
    let (x2, y2, z2) = (p.x * p.x, p.y * p.y, p.z * p.z);
    [x2 + y2, x2 + z2, y2 + z2]
}

/// Closed cylinder intersection `C`: all pairwise squared sums `<= L^2`.
pub fn in_cylinder_intersection(p: &CartesianPoint, params: &ManipulatorParams) -> bool {
    let l2 = params.leg_length() * params.leg_length();
    pairwise_sums(p).iter().all(|&s| s <= l2)
}

/// Open ball `S`.
pub fn in_sphere(p: &CartesianPoint, params: &ManipulatorParams) -> bool {
    p.norm_squared() < params.leg_length() * params.leg_length()
}

/// Shell `G`: in `C`, strictly positive coordinates, outside the closed ball.
pub fn in_shell(p: &CartesianPoint, params: &ManipulatorParams) -> bool {
    p.x > 0.0
        && p.y > 0.0
        && p.z > 0.0
        && p.norm_squared() > params.leg_length() * params.leg_length()
        && in_cylinder_intersection(p, params)
}

/// Workspace `W = S u G` under the joint limits.
pub fn in_workspace(p: &CartesianPoint, params: &ManipulatorParams) -> bool {
    in_sphere(p, params) || in_shell(p, params)
}

/// Region of `p`, with a band of Euclidean width `eps_geom * L` around the
/// sphere, the cylinder surfaces and (outside the sphere) the coordinate
/// planes.
pub fn classify_point(p: &CartesianPoint, params: &ManipulatorParams) -> WorkspaceRegion {
    let l = params.leg_length();
    let w = params.eps_geom() * l;

    let cyl = pairwise_sums(p)
        .iter()
        .fold(0.0_f64, |m, &s| m.max(s))
        .sqrt();
    if cyl > l + w {
        return WorkspaceRegion::Outside;
    }
    if cyl >= l - w {
        return WorkspaceRegion::BoundaryBand;
    }

    let r = p.norm();
    if r < l - w {
        return WorkspaceRegion::SphereInterior;
    }
    if r <= l + w {
        return WorkspaceRegion::BoundaryBand;
    }

    let min = p.x.min(p.y).min(p.z);
    if min > w {
        WorkspaceRegion::Shell
    } else if min < -w {
        WorkspaceRegion::Outside
    } else {
        WorkspaceRegion::BoundaryBand
    }
}

/// Closed-form volumes and their share of the `2L x 2L x 2L` serial
/// Cartesian workspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeReport {
    pub vol_c: f64,
    pub vol_s: f64,
    pub vol_g: f64,
    pub vol_w: f64,
    pub pct_w_of_serial: f64,
    pub pct_s_of_serial: f64,
    pub pct_c_of_serial: f64,
}

pub fn workspace_volumes(params: &ManipulatorParams) -> VolumeReport {
    let l3 = params.leg_length().powi(3);
    let vol_c = 8.0 * (2.0 - SQRT_2) * l3;
    let vol_s = 4.0 * PI / 3.0 * l3;
    let vol_g = (2.0 - SQRT_2 - PI / 6.0) * l3;
    let vol_w = (2.0 + 7.0 * PI / 6.0 - SQRT_2) * l3;
    let serial = 8.0 * l3;
    VolumeReport {
        vol_c,
        vol_s,
        vol_g,
        vol_w,
        pct_w_of_serial: 100.0 * vol_w / serial,
        pct_s_of_serial: 100.0 * vol_s / serial,
        pct_c_of_serial: 100.0 * vol_c / serial,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Binomial standard error of `value`.
    pub std_error: f64,
    pub hits: u64,
}

impl VolumeEstimate {
    fn from_hits(hits: u64, n: u64, cube: f64) -> Self {
        let f = hits as f64 / n as f64;
        Self {
            value: cube * f,
            std_error: cube * (f * (1.0 - f) / n as f64).sqrt(),
            hits,
        }
    }

    /// `|value - exact|` in units of the standard error.
    pub fn z_score(&self, exact: f64) -> f64 {
        (self.value - exact).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledVolumes {
    pub n_samples: u64,
    pub seed: u64,
    pub vol_c: VolumeEstimate,
    pub vol_s: VolumeEstimate,
    pub vol_g: VolumeEstimate,
    pub vol_w: VolumeEstimate,
}

pub const MIN_MC_SAMPLES: usize = 10_000;

/// Samples per RNG stream. Block `k` draws from `ChaCha8Rng` seeded with
/// `seed` on stream `k`, so the estimate does not depend on how blocks are
/// spread over threads.
pub const MC_BLOCK: u64 = 1 << 16;

#[derive(Default, Clone, Copy)]
struct Hits {
    c: u64,
    s: u64,
    g: u64,
}

impl std::ops::Add for Hits {
    type Output = Hits;

    fn add(self, o: Hits) -> Hits {
        Hits {
            c: self.c + o.c,
            s: self.s + o.s,
            g: self.g + o.g,
        }
    }
}

fn sample_block(params: &ManipulatorParams, seed: u64, block: u64, count: u64) -> Hits {
    let l = params.leg_length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let coord = Uniform::new(-l, l).expect("L > 0");
    let mut hits = Hits::default();
    for _ in 0..count {
        let p = CartesianPoint::new(
            coord.sample(&mut rng),
            coord.sample(&mut rng),
            coord.sample(&mut rng),
        );
        let in_c = in_cylinder_intersection(&p, params);
        hits.c += in_c as u64;
        hits.s += in_sphere(&p, params) as u64;
        hits.g += in_shell(&p, params) as u64;
    }
    hits
}

/// Uniform Monte-Carlo estimates over the cube `[-L, L]^3`. Deterministic
/// for a given `(n_samples, seed)`.
pub fn monte_carlo_volumes(
    params: &ManipulatorParams,
    n_samples: usize,
    seed: u64,
) -> Result<SampledVolumes> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(KinematicsError::TooFewSamples {
            got: n_samples,
            min: MIN_MC_SAMPLES,
        });
    }
    let n = n_samples as u64;
    let blocks = n.div_ceil(MC_BLOCK);
    let hits = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(n - b * MC_BLOCK);
            sample_block(params, seed, b, count)
        })
        .reduce(Hits::default, |a, b| a + b);

    let cube = 8.0 * params.leg_length().powi(3);
    Ok(SampledVolumes {
        n_samples: n,
        seed,
        vol_c: VolumeEstimate::from_hits(hits.c, n, cube),
        vol_s: VolumeEstimate::from_hits(hits.s, n, cube),
        vol_g: VolumeEstimate::from_hits(hits.g, n, cube),
        // S and G are disjoint
        vol_w: VolumeEstimate::from_hits(hits.s + hits.g, n, cube),
    })
}

/// Where the first-octant bisector leaves the sphere and the cylinder
/// intersection. `*_coordinate` is the common per-axis value, `*_norm` the
/// distance from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BisectorLandmarks {
    pub sphere_coordinate: f64,
    pub sphere_norm: f64,
    pub shell_coordinate: f64,
    pub shell_norm: f64,
}

pub fn bisector_landmarks(params: &ManipulatorParams) -> BisectorLandmarks {
    let l = params.leg_length();
    BisectorLandmarks {
        sphere_coordinate: l / 3.0_f64.sqrt(),
        sphere_norm: l,
        shell_coordinate: l / SQRT_2,
        shell_norm: l * 1.5_f64.sqrt(),
    }
}
