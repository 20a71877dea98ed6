//! Closed-form inverse kinematics of a 3-DoF leg (coxa yaw, femur pitch,
//! tibia pitch) and the matching forward kinematics.
//!
//! Hip frame: origin at the coxa joint, +x pointing away from the body,
//! +z up. The coxa rotates the leg plane by `q1` about z. In the leg plane
//! the femur makes angle `q2` with the horizontal and the tibia adds `q3`,
//! with `q3 = 0` for a straight knee and `q3 < 0` for the usual downward
//! bend:
//!
//! ```text
//! r  = L1 + L2 cos q2 + L3 cos(q2 + q3)
//! pz =      L2 sin q2 + L3 sin(q2 + q3)
//! px = r cos q1,  py = r sin q1
//! ```
//!
//! The inverse returns the principal branch `q3 in [-pi, 0]` and requires
//! the tip to lie outside the coxa radius (`r >= L1`).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::{LegGeometry, RobotGeometry};

/// Slack allowed on arcsin arguments before a target counts as unreachable.
pub const ARCSIN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAngles {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub coxa: [f64; 2],
    pub femur: [f64; 2],
    pub tibia: [f64; 2],
}

impl Default for JointLimits {
    fn default() -> Self {
        Self { coxa: [-FRAC_PI_2, FRAC_PI_2], femur: [-2.36, 2.36], tibia: [-2.36, 2.36] }
    }
}

impl JointLimits {
    pub fn contains(&self, q: &JointAngles) -> bool {
        let inside = |v: f64, [lo, hi]: [f64; 2]| v >= lo && v <= hi;
        inside(q.q1, self.coxa) && inside(q.q2, self.femur) && inside(q.q3, self.tibia)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [("coxa", self.coxa), ("femur", self.femur), ("tibia", self.tibia)] {
            if !(lo <= hi) {
                return Err(Error::Geometry(format!("{name} joint limits reversed")));
            }
        }
        Ok(())
    }
}

/// Body-frame point to the leg's hip frame.
pub fn body_to_hip(p: &Vector3<f64>, leg: &LegGeometry) -> Vector3<f64> {
    Vector3::new(leg.side * (p.x - leg.hip[0]), leg.side * (p.y - leg.hip[1]), p.z)
}

pub fn hip_to_body(p: &Vector3<f64>, leg: &LegGeometry) -> Vector3<f64> {
    Vector3::new(leg.side * p.x + leg.hip[0], leg.side * p.y + leg.hip[1], p.z)
}

fn guarded_asin(x: f64, leg: usize, what: &str) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x.asin())
    } else if x.abs() <= 1.0 + ARCSIN_TOLERANCE {
        Ok(x.clamp(-1.0, 1.0).asin())
    } else {
        Err(Error::Unreachable { leg, reason: format!("{what} arcsin argument {x:.6}") })
    }
}

/// Joint angles placing the tip of `leg` at `tip` (hip frame).
pub fn inverse_kinematics(tip: &Vector3<f64>, leg: usize, g: &RobotGeometry) -> Result<JointAngles> {
    let [l1, l2, l3] = g.leg(leg)?.links;
    let (px, py, pz) = (tip.x, tip.y, tip.z);

    let q1 = py.atan2(px);
    let (s1, c1) = q1.sin_cos();
    let reach = c1 * px + s1 * py - l1;
    if reach < -ARCSIN_TOLERANCE {
        return Err(Error::Unreachable { leg, reason: format!("tip {:.4} m inside coxa radius", -reach) });
    }

    let q3 = guarded_asin((reach * reach + pz * pz - l3 * l3 - l2 * l2) / (2.0 * l2 * l3), leg, "knee")? - FRAC_PI_2;
    let (s3, c3) = q3.sin_cos();
    let gamma = (l3 * s3).atan2(l3 * c3 + l2);
    let rho = ((l3 * c3 + l2).powi(2) + (l3 * s3).powi(2)).sqrt();
    let q2 = guarded_asin(pz / rho, leg, "femur")? - gamma;

    Ok(JointAngles { q1, q2, q3 })
}

/// Tip position of `leg` (hip frame) for joint angles `q`.
pub fn forward_kinematics(q: &JointAngles, leg: usize, g: &RobotGeometry) -> Result<Vector3<f64>> {
    let [l1, l2, l3] = g.leg(leg)?.links;
    let r = l1 + l2 * q.q2.cos() + l3 * (q.q2 + q.q3).cos();
    let pz = l2 * q.q2.sin() + l3 * (q.q2 + q.q3).sin();
    Ok(Vector3::new(r * q.q1.cos(), r * q.q1.sin(), pz))
}

/// Radial bounds of the leg-plane workspace, `|L2 - L3| ..= L2 + L3`.
pub fn planar_reach(leg: &LegGeometry) -> (f64, f64) {
    let [_, l2, l3] = leg.links;
    ((l2 - l3).abs(), l2 + l3)
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}
