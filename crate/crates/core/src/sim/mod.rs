//! Quasi-static locomotion simulator.
//!
//! Support feet are pinned where they touch down; at every step the body
//! takes the rigid pose that best places the commanded body-frame tips of
//! the pinned legs over their anchors. When the centre of mass leaves the
//! support polygon the body tips about the violated polygon edge until a
//! swinging foot touches the ground. If no foot catches it, the robot has
//! fallen.

mod pose;
mod support;

use std::io::{BufRead, Write};

use nalgebra::{Rotation3, Unit, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::GaitSchedule;
use crate::morphology::{MorphologyVector, RobotGeometry, LEG_COUNT};
use crate::trajectory::{build_trajectories, samples_per_cycle, GaitParams, TipTrajectory};

pub use pose::{
    euler_zyx, fit_body_pose, fit_residual, rotation_from_euler, BodyPose, COLLINEAR_TOLERANCE, GIMBAL_TOLERANCE,
    PRIOR_WEIGHT,
};
pub use support::{convex_hull, most_violated_edge, polygon_margin, support_polygon_margin};

/// Header line identifying the trajectory CSV layout.
pub const TRAJECTORY_CSV_SCHEMA: &str = "# hexapod-recovery trajectory v1";
const TRAJECTORY_CSV_COLUMNS: &str = "t,x,y,z,roll,pitch,yaw,margin,residual";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Time step, seconds.
    pub dt: f64,
    /// Horizon, seconds.
    pub duration: f64,
    /// How far (metres) the CoM may sit outside the support polygon
    /// before the body tips.
    pub margin_tol: f64,
    /// Largest tipping rotation (radians) a swinging foot may arrest.
    pub max_tip_angle: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 1.0 / 60.0, duration: 10.0, margin_tol: 1e-3, max_tip_angle: 0.35 }
    }
}

impl SimConfig {
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.duration >= 0.0 && self.margin_tol >= 0.0 && self.max_tip_angle >= 0.0) {
            return Err(Error::Config("simulation dt must be > 0, other settings >= 0".into()));
        }
        let ratio = self.duration / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!("duration / dt = {ratio} is not a whole number of steps")));
        }
        Ok(n as usize)
    }
}

/// Contact bookkeeping for one leg.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContactState {
    pub anchored: bool,
    /// World ground point, z = 0.
    pub anchor: Vector3<f64>,
}

/// One recorded simulation step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub pose: BodyPose,
    /// World CoM position.
    pub com: Vector3<f64>,
    /// (roll, pitch, yaw)
    pub euler: (f64, f64, f64),
    pub margin: f64,
    pub residual: f64,
    /// Set when a swinging foot had to arrest a tip this step.
    pub caught_by: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodyTrajectory {
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub fell: bool,
    pub fell_time: Option<f64>,
}

impl BodyTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_SCHEMA}")?;
        writeln!(w, "{TRAJECTORY_CSV_COLUMNS}")?;
        for s in &self.samples {
            let (r, p, y) = s.euler;
            writeln!(w, "{},{},{},{},{},{},{},{},{}", s.t, s.com.x, s.com.y, s.com.z, r, p, y, s.margin, s.residual)?;
        }
        Ok(())
    }
}

/// Rows of a trajectory CSV, as written by [`BodyTrajectory::write_csv`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub rows: Vec<[f64; 9]>,
}

impl TrajectoryTable {
    pub fn read_csv<R: BufRead>(r: R) -> std::result::Result<Self, String> {
        let mut lines = r.lines();
        let mut next = || lines.next().transpose().map_err(|e| e.to_string());
        if next()?.as_deref() != Some(TRAJECTORY_CSV_SCHEMA) {
            return Err(format!("missing '{TRAJECTORY_CSV_SCHEMA}' header"));
        }
        if next()?.as_deref() != Some(TRAJECTORY_CSV_COLUMNS) {
            return Err("unexpected column header".into());
        }
        let mut rows = Vec::new();
        while let Some(line) = next()? {
            let mut row = [0.0; 9];
            let mut fields = line.split(',');
            for (i, cell) in row.iter_mut().enumerate() {
                let f = fields.next().ok_or_else(|| format!("row {}: too few columns", rows.len() + 1))?;
                *cell = f.parse().map_err(|_| format!("row {}: bad number in column {}", rows.len() + 1, i + 1))?;
            }
            if fields.next().is_some() {
                return Err(format!("row {}: too many columns", rows.len() + 1));
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_SCHEMA}")?;
        writeln!(w, "{TRAJECTORY_CSV_COLUMNS}")?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Simulate the robot walking with schedule `s` and tip parameters `p`.
pub fn simulate(
    m: &MorphologyVector,
    s: &GaitSchedule,
    p: &GaitParams,
    g: &RobotGeometry,
    cfg: &SimConfig,
) -> Result<BodyTrajectory> {
    let legs: Vec<usize> = m.functional_legs().collect();
    if s.scheduled_legs().ne(legs.iter().copied()) {
        return Err(Error::Schedule(format!("schedule does not cover exactly the functional legs of {m}")));
    }
    let n_cycle = samples_per_cycle(s.period(), cfg.dt)?;
    let tips = build_trajectories(n_cycle, p, s, g)?;
    simulate_tips(&tips, s, n_cycle, g, cfg)
}

/// Simulation core over precomputed body-frame tip loops.
pub fn simulate_tips(
    tips: &[TipTrajectory],
    s: &GaitSchedule,
    n_cycle: usize,
    g: &RobotGeometry,
    cfg: &SimConfig,
) -> Result<BodyTrajectory> {
    let steps = cfg.steps()?;
    let slot_len = n_cycle / s.sigma();
    let offset = Vector3::from(g.body_mass_offset);

    let mut contacts = [ContactState::default(); LEG_COUNT];
    let mut pose = BodyPose::at_height(g.body_height);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut anchors = Vec::with_capacity(LEG_COUNT);
    let mut targets = Vec::with_capacity(LEG_COUNT);
    let mut swing = Vec::with_capacity(LEG_COUNT);

    let phase = |tip: &TipTrajectory, n: usize| {
        // local sample index minus one; the leg swings first in its slot
        let start = s.slot(tip.leg).unwrap_or(0) * slot_len;
        (n % n_cycle + n_cycle - start) % n_cycle
    };

    for n in 0..=steps {
        let t = n as f64 * cfg.dt;
        anchors.clear();
        targets.clear();
        swing.clear();
        for tip in tips {
            let i = tip.leg - 1;
            let local = phase(tip, n);
            let body_tip = tip.samples[local];
            if tip.is_swing(local + 1) {
                contacts[i].anchored = false;
                swing.push((tip.leg, body_tip));
                continue;
            }
            if !contacts[i].anchored {
                let w = pose.transform(&body_tip);
                contacts[i] = ContactState { anchored: true, anchor: Vector3::new(w.x, w.y, 0.0) };
            }
            anchors.push(contacts[i].anchor);
            targets.push(body_tip);
        }
        if anchors.len() < 3 {
            return Err(Error::InsufficientSupport { anchored: anchors.len(), time: t });
        }

        let fitted = fit_body_pose(&anchors, &targets, &pose)?;
        let residual = fit_residual(&fitted, &anchors, &targets);
        let feet: Vec<Vector2<f64>> = anchors.iter().map(|a| a.xy()).collect();
        let hull = convex_hull(&feet);
        let com = fitted.transform(&offset);
        let margin = polygon_margin(&com.xy(), &hull);

        let (settled, margin, caught_by) = if margin >= -cfg.margin_tol {
            (fitted, margin, None)
        } else {
            match catch_tip(&fitted, &hull, &swing, &offset, cfg) {
                Some((p, m, leg)) => (p, m, Some(leg)),
                None => (fitted, margin, None),
            }
        };
        pose = settled;
        let fell = margin < -cfg.margin_tol;
        samples.push(Sample {
            t,
            pose,
            com: pose.transform(&offset),
            euler: pose.euler(),
            margin,
            residual,
            caught_by,
        });
        if fell {
            return Ok(BodyTrajectory { dt: cfg.dt, samples, fell: true, fell_time: Some(t) });
        }
    }
    Ok(BodyTrajectory { dt: cfg.dt, samples, fell: false, fell_time: None })
}

/// Tip the body about the most violated support edge until the first
/// swinging foot beyond that edge reaches the ground. Returns the settled
/// pose, its margin over the new support triangle and the catching leg.
fn catch_tip(
    pose: &BodyPose,
    hull: &[Vector2<f64>],
    swing: &[(usize, Vector3<f64>)],
    offset: &Vector3<f64>,
    cfg: &SimConfig,
) -> Option<(BodyPose, f64, usize)> {
    let com = pose.transform(offset);
    let (e, _) = most_violated_edge(&com.xy(), hull)?;
    let a = hull[e];
    let b = hull[(e + 1) % hull.len()];
    let u = (b - a).normalize();
    let outward = Vector2::new(u.y, -u.x);

    let mut best: Option<(f64, usize)> = None;
    for &(leg, body_tip) in swing {
        let w = pose.transform(&body_tip);
        let s = outward.dot(&(w.xy() - a));
        if s <= 0.0 {
            continue;
        }
        let angle = w.z.atan2(s).max(0.0);
        if best.is_none_or(|(b, _)| angle < b) {
            best = Some((angle, leg));
        }
    }
    let (angle, leg) = best?;
    if angle > cfg.max_tip_angle {
        return None;
    }

    let axis = Unit::new_normalize(Vector3::new(u.x, u.y, 0.0));
    let tilt = Rotation3::from_axis_angle(&axis, angle);
    let pivot = Vector3::new(a.x, a.y, 0.0);
    let tipped = BodyPose::new(pivot + tilt * (pose.position - pivot), tilt * pose.rotation);

    let (_, foot) = swing.iter().find(|(l, _)| *l == leg)?;
    let foot = tipped.transform(foot).xy();
    let margin = support_polygon_margin(&tipped.transform(offset).xy(), &[a, b, foot]);
    (margin >= -cfg.margin_tol).then_some((tipped, margin, leg))
}

#[cfg(test)]
mod tests;
