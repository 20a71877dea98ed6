//! Recovery objective: reward forward progress, penalise lateral drift,
//! heading error and body rocking.
//!
//! ```text
//! F = w1 y_f^2 / (1 + w2 x_f^2 + w3 psi_f^2 + w4 dphi^2 + w5 dtheta^2)
//! ```
//!
//! Angles are in radians. A fall or an infeasible candidate scores zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{plan_sequence, GaitSchedule, DEFAULT_GAIT_PERIOD};
use crate::kinematics::{body_to_hip, inverse_kinematics};
use crate::morphology::{validate_morphology, MorphologyVector, RobotGeometry};
use crate::sim::{simulate_tips, BodyTrajectory, SimConfig};
use crate::trajectory::{
    build_bounds, build_trajectories, check_collision_constraint, samples_per_cycle, GaitParams, ParamBounds,
    TipTrajectory, DIM,
};

/// Summary of one simulated run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub x_f: f64,
    pub y_f: f64,
    pub psi_f: f64,
    pub d_phi: f64,
    pub d_theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    pub w5: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self { w1: 1.0, w2: 1.0, w3: 10.0, w4: 100.0, w5: 100.0 }
    }
}

impl ObjectiveWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.w1, self.w2, self.w3, self.w4, self.w5];
        if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || !(self.w1 > 0.0) {
            return Err(Error::Config("objective weights must be finite, >= 0, with w1 > 0".into()));
        }
        Ok(())
    }
}

/// Final position and heading, and half peak-to-peak roll and pitch.
pub fn extract_metrics(traj: &BodyTrajectory) -> Metrics {
    let Some(last) = traj.last() else {
        return Metrics::default();
    };
    let half_range = |f: fn(&(f64, f64, f64)) -> f64| {
        let (lo, hi) = traj
            .samples
            .iter()
            .map(|s| f(&s.euler))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        0.5 * (hi - lo)
    };
    Metrics {
        x_f: last.com.x,
        y_f: last.com.y,
        psi_f: last.euler.2,
        d_phi: half_range(|e| e.0),
        d_theta: half_range(|e| e.1),
    }
}

pub fn evaluate(metrics: &Metrics, w: &ObjectiveWeights, fell: bool) -> f64 {
    if fell {
        return 0.0;
    }
    let Metrics { x_f, y_f, psi_f, d_phi, d_theta } = *metrics;
    w.w1 * y_f * y_f / (1.0 + w.w2 * x_f * x_f + w.w3 * psi_f * psi_f + w.w4 * d_phi * d_phi + w.w5 * d_theta * d_theta)
}

/// Why a candidate scored zero without a completed walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    Collision,
    Unreachable,
    JointLimit,
    Fell,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub f: f64,
    pub metrics: Metrics,
    pub rejection: Option<Rejection>,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        !matches!(self.rejection, Some(Rejection::Collision | Rejection::Unreachable | Rejection::JointLimit))
    }
}

/// Everything fixed while gait parameters are searched: the damaged
/// morphology, its schedule, the geometry and the simulation setup.
#[derive(Clone, Debug)]
pub struct RecoveryProblem {
    pub morphology: MorphologyVector,
    pub schedule: GaitSchedule,
    pub geometry: RobotGeometry,
    pub sim: SimConfig,
    pub weights: ObjectiveWeights,
    pub bounds: ParamBounds,
    samples_per_cycle: usize,
}

impl RecoveryProblem {
    pub fn new(
        m: MorphologyVector,
        geometry: RobotGeometry,
        sim: SimConfig,
        weights: ObjectiveWeights,
    ) -> Result<Self> {
        Self::with_period(m, geometry, sim, weights, DEFAULT_GAIT_PERIOD)
    }

    pub fn with_period(
        m: MorphologyVector,
        geometry: RobotGeometry,
        sim: SimConfig,
        weights: ObjectiveWeights,
        period: f64,
    ) -> Result<Self> {
        let class = validate_morphology(&m);
        if let Some(why) = class.diagnostic() {
            return Err(Error::Unrecoverable(why));
        }
        geometry.validate()?;
        weights.validate()?;
        sim.steps()?;
        let schedule = plan_sequence(&m, period)?;
        let samples_per_cycle = samples_per_cycle(period, sim.dt)?;
        let bounds = build_bounds(&m, &ParamBounds::default(), &geometry.adjacency);
        Ok(Self { morphology: m, schedule, geometry, sim, weights, bounds, samples_per_cycle })
    }

    /// Tip loops for `p`, or the reason they cannot be executed.
    pub fn tip_loops(&self, p: &GaitParams) -> std::result::Result<Vec<TipTrajectory>, Rejection> {
        if !check_collision_constraint(p, &self.morphology, &self.geometry) {
            return Err(Rejection::Collision);
        }
        let tips = build_trajectories(self.samples_per_cycle, p, &self.schedule, &self.geometry)
            .map_err(|_| Rejection::Unreachable)?;
        for tip in &tips {
            let leg = &self.geometry.legs[tip.leg - 1];
            for sample in &tip.samples {
                let q = inverse_kinematics(&body_to_hip(sample, leg), tip.leg, &self.geometry)
                    .map_err(|_| Rejection::Unreachable)?;
                if !self.geometry.joint_limits.contains(&q) {
                    return Err(Rejection::JointLimit);
                }
            }
        }
        Ok(tips)
    }

    /// Walk with `p` and return the trajectory, or the reason it was not run.
    pub fn simulate(&self, p: &GaitParams) -> std::result::Result<BodyTrajectory, Rejection> {
        let tips = self.tip_loops(p)?;
        simulate_tips(&tips, &self.schedule, self.samples_per_cycle, &self.geometry, &self.sim)
            .map_err(|_| Rejection::Fell)
    }

    pub fn evaluate(&self, p: &GaitParams) -> Evaluation {
        match self.simulate(p) {
            Err(r) => Evaluation { f: 0.0, metrics: Metrics::default(), rejection: Some(r) },
            Ok(traj) => {
                let metrics = extract_metrics(&traj);
                let f = evaluate(&metrics, &self.weights, traj.fell);
                Evaluation { f, metrics, rejection: traj.fell.then_some(Rejection::Fell) }
            }
        }
    }

    pub fn evaluate_vector(&self, v: &[f64; DIM]) -> Evaluation {
        let p = GaitParams::from_slice(v).expect("fixed dimension");
        self.evaluate(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{BodyPose, Sample};
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn traj_from(points: &[(f64, f64, f64, f64, f64, f64)]) -> BodyTrajectory {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, roll, pitch, yaw, _))| Sample {
                t: i as f64,
                pose: BodyPose::at_height(0.1),
                com: Vector3::new(x, y, 0.1),
                euler: (roll, pitch, yaw),
                margin: 0.05,
                residual: 0.0,
                caught_by: None,
            })
            .collect();
        BodyTrajectory { dt: 1.0, samples, fell: false, fell_time: None }
    }

    #[test]
    fn constant_pose_has_zero_metrics() {
        let t = traj_from(&[(0.0, 0.0, 0.0, 0.0, 0.0, 0.0); 5]);
        assert_eq!(extract_metrics(&t), Metrics::default());
    }

    #[test]
    fn sinusoidal_roll_amplitude() {
        let pts: Vec<_> = (0..=10_000)
            .map(|i| {
                let t = i as f64 * 1e-3;
                (0.0, 0.0, 0.1 * t.sin(), 0.0, 0.0, 0.0)
            })
            .collect();
        let m = extract_metrics(&traj_from(&pts));
        assert!((m.d_phi - 0.1).abs() < 1e-6);
        assert_eq!(m.d_theta, 0.0);
    }

    #[test]
    fn reads_off_final_state() {
        let t = traj_from(&[(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), (0.05, 0.6, 0.0, 0.0, 0.1, 0.0)]);
        let m = extract_metrics(&t);
        assert_eq!((m.x_f, m.y_f, m.psi_f), (0.05, 0.6, 0.1));
    }

    #[test]
    fn spot_values() {
        let w = ObjectiveWeights::default();
        let unit = Metrics { y_f: 1.0, ..Metrics::default() };
        assert_eq!(evaluate(&unit, &w, false), 1.0);
        assert_eq!(evaluate(&unit, &w, true), 0.0);
        assert_eq!(evaluate(&Metrics::default(), &w, false), 0.0);
        let m = Metrics { x_f: 0.1, y_f: 0.5, psi_f: 0.1, d_phi: 0.05, d_theta: 0.05 };
        // 1 + 0.01 + 0.1 + 0.25 + 0.25 = 1.61
        let expected = 0.25 / 1.61;
        assert!((evaluate(&m, &w, false) - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(ObjectiveWeights { w1: 0.0, ..Default::default() }.validate().is_err());
        assert!(ObjectiveWeights { w4: -1.0, ..Default::default() }.validate().is_err());
    }

    fn metric() -> impl Strategy<Value = Metrics> {
        (-1.0..1.0f64, 0.01..2.0f64, -0.5..0.5f64, 0.0..0.3f64, 0.0..0.3f64)
            .prop_map(|(x_f, y_f, psi_f, d_phi, d_theta)| Metrics { x_f, y_f, psi_f, d_phi, d_theta })
    }

    proptest! {
        #[test]
        fn doubling_progress_quadruples_f(m in metric()) {
            let w = ObjectiveWeights::default();
            let double = Metrics { y_f: 2.0 * m.y_f, ..m };
            let ratio = evaluate(&double, &w, false) / evaluate(&m, &w, false);
            prop_assert!((ratio - 4.0).abs() < 1e-12);
        }

        #[test]
        fn penalties_decrease_f(m in metric(), which in 0usize..4, bump in 1e-3..0.5f64) {
            let w = ObjectiveWeights::default();
            let mut worse = m;
            match which {
                0 => worse.x_f = m.x_f.signum() * (m.x_f.abs() + bump),
                1 => worse.psi_f = m.psi_f.signum() * (m.psi_f.abs() + bump),
                2 => worse.d_phi += bump,
                _ => worse.d_theta += bump,
            }
            prop_assert!(evaluate(&worse, &w, false) < evaluate(&m, &w, false));
        }
    }

    #[test]
    fn problem_rejects_unrecoverable() {
        let m: MorphologyVector = "101011".parse().unwrap();
        let err = RecoveryProblem::new(m, RobotGeometry::default(), SimConfig::default(), ObjectiveWeights::default());
        assert!(matches!(err, Err(Error::Unrecoverable(_))));
    }

    #[test]
    fn collision_candidates_score_zero_without_walking() {
        let m: MorphologyVector = "111111".parse().unwrap();
        let problem =
            RecoveryProblem::new(m, RobotGeometry::default(), SimConfig::default(), ObjectiveWeights::default())
                .unwrap();
        let p = GaitParams {
            y0: [-0.01, -0.01, 0.03, 0.03, -0.05, -0.05],
            x0: [0.11; 6],
            step_length: 0.05,
            step_height: 0.03,
        };
        let e = problem.evaluate(&p);
        assert_eq!(e.rejection, Some(Rejection::Collision));
        assert_eq!(e.f, 0.0);
        assert!(!e.is_feasible());
    }
}
