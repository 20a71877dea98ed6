use super::*;
use crate::gait::plan_sequence;
use crate::trajectory::ParamBounds;

fn symmetric_params() -> GaitParams {
    GaitParams { y0: [0.0; 6], x0: [0.11; 6], step_length: 0.04, step_height: 0.03 }
}

fn run(m: &str, p: &GaitParams) -> BodyTrajectory {
    let m: MorphologyVector = m.parse().unwrap();
    let s = plan_sequence(&m, 2.0).unwrap();
    simulate(&m, &s, p, &RobotGeometry::default(), &SimConfig::default()).unwrap()
}

#[test]
fn healthy_symmetric_walk_goes_straight() {
    let traj = run("111111", &symmetric_params());
    assert!(!traj.fell);
    assert_eq!(traj.len(), 601);
    let last = traj.last().unwrap();
    assert!(last.com.x.abs() < 1e-3);
    assert!(last.euler.2.abs() < 0.2_f64.to_radians());
    // five cycles, each tripod strokes one step length per cycle
    assert!((last.com.y - 10.0 * 0.04).abs() < 4e-3, "y_f = {}", last.com.y);
    for w in traj.samples.windows(2) {
        assert!(w[1].com.y >= w[0].com.y - 1e-12);
    }
}

#[test]
fn tripod_support_is_rigidly_consistent() {
    let traj = run("111111", &symmetric_params());
    for s in &traj.samples {
        assert!(s.residual < 1e-12, "residual {} at t = {}", s.residual, s.t);
        assert!(s.caught_by.is_none());
    }
}

#[test]
fn constant_tips_leave_the_body_still() {
    let g = RobotGeometry { step_depth: 0.0, ..RobotGeometry::default() };
    let p = GaitParams { step_length: 0.0, step_height: 0.0, ..symmetric_params() };
    for m in ["111111", "111011", "011110"] {
        let m: MorphologyVector = m.parse().unwrap();
        let s = plan_sequence(&m, 2.0).unwrap();
        let traj = simulate(&m, &s, &p, &g, &SimConfig::default()).unwrap();
        let first = traj.samples[0].pose;
        for smp in &traj.samples {
            assert!((smp.pose.position - first.position).norm() < 1e-12);
            assert!((smp.pose.rotation.matrix() - first.rotation.matrix()).norm() < 1e-12);
        }
    }
}

#[test]
fn mirrored_inputs_give_mirrored_trajectories() {
    let p = GaitParams {
        y0: [0.02, 0.01, -0.01, 0.005, -0.03, -0.02],
        x0: [0.1, 0.12, 0.11, 0.1, 0.125, 0.095],
        step_length: 0.035,
        step_height: 0.025,
    };
    let g = RobotGeometry::default();
    let cfg = SimConfig::default();
    for m in ["111111", "111011", "011111", "011110", "110011"] {
        let m: MorphologyVector = m.parse().unwrap();
        let s = plan_sequence(&m, 2.0).unwrap();
        let a = simulate(&m, &s, &p, &g, &cfg).unwrap();
        let b = simulate(&m.mirrored(), &s.mirrored(), &p.mirrored(), &g, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(a.fell, b.fell);
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x.com.x + y.com.x).abs() < 1e-9);
            assert!((x.com.y - y.com.y).abs() < 1e-9);
            // reflecting x keeps rotations about x and flips those about y, z
            assert!((x.euler.0 - y.euler.0).abs() < 1e-9);
            assert!((x.euler.1 + y.euler.1).abs() < 1e-9);
            assert!((x.euler.2 + y.euler.2).abs() < 1e-9);
        }
    }
}

#[test]
fn pentagonal_midpoint_walks_forward() {
    let p = GaitParams::from_slice(&ParamBounds::default().midpoint()).unwrap();
    for m in ["011110", "110011"] {
        let traj = run(m, &p);
        assert!(!traj.fell, "{m} fell at {:?}", traj.fell_time);
        assert!(traj.last().unwrap().com.y > 0.0);
    }
}

#[test]
fn deterministic() {
    let p = GaitParams::from_slice(&ParamBounds::default().midpoint()).unwrap();
    assert_eq!(run("111011", &p), run("111011", &p));
}

#[test]
fn csv_round_trip_is_byte_identical() {
    let traj = run("011110", &GaitParams::from_slice(&ParamBounds::default().midpoint()).unwrap());
    let mut first = Vec::new();
    traj.write_csv(&mut first).unwrap();
    let table = TrajectoryTable::read_csv(first.as_slice()).unwrap();
    assert_eq!(table.rows.len(), traj.len());
    let mut second = Vec::new();
    table.write_csv(&mut second).unwrap();
    assert_eq!(first, second);
}

#[test]
fn rejects_mismatched_schedule() {
    let m: MorphologyVector = "111011".parse().unwrap();
    let s = plan_sequence(&MorphologyVector::healthy(), 2.0).unwrap();
    let err = simulate(&m, &s, &symmetric_params(), &RobotGeometry::default(), &SimConfig::default());
    assert!(err.is_err());
}

#[test]
fn rejects_fractional_horizon() {
    let cfg = SimConfig { duration: 1.005, dt: 0.01, ..SimConfig::default() };
    assert!(cfg.steps().is_err());
}
