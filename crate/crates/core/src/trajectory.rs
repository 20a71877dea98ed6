//! Leg-tip reference trajectories and the 14-dimensional parameter box they
//! are optimised over.
//!
//! Each functional leg follows a piecewise-cosine loop in the body frame:
//! a swing arc lasting `1/sigma` of the cycle that carries the tip forward
//! by the step length and lifts it by the step height, then a support
//! stroke pulling it back with a shallow push-down of the step depth.
//! Offsets `x0`, `y0` are measured from the leg's hip station.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::GaitSchedule;
use crate::morphology::{check_leg, mirror_leg, Adjacency, MorphologyVector, RobotGeometry, LEG_COUNT};

/// Number of optimisation variables.
pub const DIM: usize = 14;

/// Widening applied to the `y0` interval of legs next to a lost leg.
pub const NEIGHBOR_RELAXATION: f64 = 0.20;

/// Minimum longitudinal gap between sweeps of adjacent same-side legs.
pub const COLLISION_CLEARANCE: f64 = 0.01;

/// Samples per cycle must divide evenly by every sigma in {2, 3, 4}.
pub const SAMPLE_MULTIPLE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    /// Longitudinal tip offsets from each hip station, metres.
    pub y0: [f64; LEG_COUNT],
    /// Lateral tip distances from each hip, metres (unsigned).
    pub x0: [f64; LEG_COUNT],
    pub step_length: f64,
    pub step_height: f64,
}

impl GaitParams {
    /// Layout `[y0_1..y0_6, x0_1..x0_6, step_length, step_height]`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != DIM {
            return Err(Error::Params(format!("expected {DIM} values, got {}", v.len())));
        }
        let mut y0 = [0.0; LEG_COUNT];
        let mut x0 = [0.0; LEG_COUNT];
        y0.copy_from_slice(&v[..6]);
        x0.copy_from_slice(&v[6..12]);
        Ok(Self { y0, x0, step_length: v[12], step_height: v[13] })
    }

    pub fn to_array(&self) -> [f64; DIM] {
        let mut v = [0.0; DIM];
        v[..6].copy_from_slice(&self.y0);
        v[6..12].copy_from_slice(&self.x0);
        v[12] = self.step_length;
        v[13] = self.step_height;
        v
    }

    pub fn mirrored(&self) -> Self {
        let mut out = *self;
        for leg in 1..=LEG_COUNT {
            out.y0[mirror_leg(leg) - 1] = self.y0[leg - 1];
            out.x0[mirror_leg(leg) - 1] = self.x0[leg - 1];
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub lower: [f64; DIM],
    pub upper: [f64; DIM],
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            upper: [0.05, 0.05, 0.03, 0.03, 0.01, 0.01, 0.13, 0.13, 0.13, 0.13, 0.13, 0.13, 0.05, 0.05],
            lower: [-0.01, -0.01, -0.03, -0.03, -0.05, -0.05, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.02, 0.02],
        }
    }
}

impl ParamBounds {
    pub fn new(lower: [f64; DIM], upper: [f64; DIM]) -> Result<Self> {
        let b = Self { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for m in 0..DIM {
            if !(self.lower[m] <= self.upper[m]) {
                return Err(Error::Params(format!("bound {m}: lower {} > upper {}", self.lower[m], self.upper[m])));
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &[f64; DIM]) -> bool {
        (0..DIM).all(|m| v[m] >= self.lower[m] && v[m] <= self.upper[m])
    }

    pub fn clamp(&self, v: &mut [f64; DIM]) {
        for ((x, lo), hi) in v.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(*lo, *hi);
        }
    }

    pub fn midpoint(&self) -> [f64; DIM] {
        std::array::from_fn(|m| 0.5 * (self.lower[m] + self.upper[m]))
    }
}

/// Default bounds with the `y0` interval of every functional leg that
/// neighbours a lost leg widened by 20 % of its span about its midpoint.
pub fn build_bounds(m: &MorphologyVector, base: &ParamBounds, adjacency: &Adjacency) -> ParamBounds {
    let mut out = *base;
    for leg in m.functional_legs() {
        let (a, b) = adjacency.neighbors(leg).expect("valid leg");
        if m.is_functional(a) && m.is_functional(b) {
            continue;
        }
        let i = leg - 1;
        let half = 0.5 * (base.upper[i] - base.lower[i]) * (1.0 + NEIGHBOR_RELAXATION);
        let mid = 0.5 * (base.upper[i] + base.lower[i]);
        out.lower[i] = mid - half;
        out.upper[i] = mid + half;
    }
    out
}

/// Smallest gap between the longitudinal sweeps of consecutive functional
/// legs on the same side. Pairs broken by a lost leg are not compared; the
/// legs on either side of it are.
pub fn collision_gap(p: &GaitParams, m: &MorphologyVector, g: &RobotGeometry) -> f64 {
    let mut worst = f64::INFINITY;
    for side_start in [1, 2] {
        let mut legs: Vec<usize> = (side_start..=LEG_COUNT).step_by(2).filter(|&l| m.is_functional(l)).collect();
        legs.sort_by(|&a, &b| g.legs[b - 1].hip[1].total_cmp(&g.legs[a - 1].hip[1]));
        for pair in legs.windows(2) {
            let (front, rear) = (pair[0] - 1, pair[1] - 1);
            let front_low = g.legs[front].hip[1] + p.y0[front] - 0.5 * p.step_length;
            let rear_high = g.legs[rear].hip[1] + p.y0[rear] + 0.5 * p.step_length;
            worst = worst.min(front_low - rear_high);
        }
    }
    worst
}

pub fn check_collision_constraint(p: &GaitParams, m: &MorphologyVector, g: &RobotGeometry) -> bool {
    collision_gap(p, m, g) >= COLLISION_CLEARANCE
}

/// Samples per gait cycle for a time step; must be a whole multiple of 12.
pub fn samples_per_cycle(period: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && period > 0.0) {
        return Err(Error::Schedule("period and time step must be positive".into()));
    }
    let ratio = period / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) || n < SAMPLE_MULTIPLE as f64 {
        return Err(Error::Schedule(format!("period / dt = {ratio} is not an integer sample count")));
    }
    let n = n as usize;
    if !n.is_multiple_of(SAMPLE_MULTIPLE) {
        return Err(Error::Schedule(format!("{n} samples per cycle is not divisible by {SAMPLE_MULTIPLE}")));
    }
    Ok(n)
}

/// Tip of `leg` relative to its hip station at local sample `k` (1-based),
/// `n` samples per cycle. Swing occupies `k = 1..=n/sigma`.
pub fn tip_offset(
    leg: usize,
    k: usize,
    n: usize,
    p: &GaitParams,
    s: &GaitSchedule,
    g: &RobotGeometry,
) -> Result<Vector3<f64>> {
    check_leg(leg)?;
    if s.slot(leg).is_none() {
        return Err(Error::LostLeg(leg));
    }
    if k == 0 || k > n {
        return Err(Error::SampleIndex { k, n });
    }
    let lg = &g.legs[leg - 1];
    let i = leg - 1;
    let sigma = s.sigma() as f64;
    let nf = n as f64;
    let swing_len = n / s.sigma();
    let x = lg.side * p.x0[i];
    let (y, z) = if k <= swing_len {
        let u = (k - 1) as f64;
        let y = p.y0[i] - 0.5 * p.step_length * (sigma * PI * u / nf).cos();
        let z = lg.z0 + 0.5 * p.step_height * (1.0 - (2.0 * sigma * PI * u / nf).cos()) - g.body_height;
        (y, z)
    } else {
        let u = (k - swing_len - 1) as f64;
        let stretch = (sigma - 1.0) * nf;
        let y = p.y0[i] + 0.5 * p.step_length * (sigma * PI * u / stretch).cos();
        let z = lg.z0 + 0.5 * g.step_depth * (1.0 - (2.0 * sigma * PI * u / stretch).cos()) - g.body_height;
        (y, z)
    };
    Ok(Vector3::new(x, y, z))
}

/// Body-frame tip position: hip station plus [`tip_offset`].
pub fn tip_position(
    leg: usize,
    k: usize,
    n: usize,
    p: &GaitParams,
    s: &GaitSchedule,
    g: &RobotGeometry,
) -> Result<Vector3<f64>> {
    let off = tip_offset(leg, k, n, p, s, g)?;
    let hip = g.legs[leg - 1].hip;
    Ok(Vector3::new(hip[0] + off.x, hip[1] + off.y, off.z))
}

/// One cycle of body-frame tip samples, `samples[k - 1]` for local index k.
#[derive(Clone, Debug, PartialEq)]
pub struct TipTrajectory {
    pub leg: usize,
    pub swing_samples: usize,
    pub samples: Vec<Vector3<f64>>,
}

impl TipTrajectory {
    pub fn build(leg: usize, n: usize, p: &GaitParams, s: &GaitSchedule, g: &RobotGeometry) -> Result<Self> {
        let samples = (1..=n).map(|k| tip_position(leg, k, n, p, s, g)).collect::<Result<Vec<_>>>()?;
        Ok(Self { leg, swing_samples: n / s.sigma(), samples })
    }

    pub fn is_swing(&self, k: usize) -> bool {
        k <= self.swing_samples
    }
}

/// Trajectories for every leg the schedule covers.
pub fn build_trajectories(n: usize, p: &GaitParams, s: &GaitSchedule, g: &RobotGeometry) -> Result<Vec<TipTrajectory>> {
    s.scheduled_legs().map(|leg| TipTrajectory::build(leg, n, p, s, g)).collect()
}

/// CSV dump with columns `leg,k,x,y,z`.
pub fn write_tip_csv<W: Write>(mut w: W, trajectories: &[TipTrajectory]) -> std::io::Result<()> {
    writeln!(w, "leg,k,x,y,z")?;
    for t in trajectories {
        for (i, p) in t.samples.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", t.leg, i + 1, p.x, p.y, p.z)?;
        }
    }
    Ok(())
}
