//! Solve joint angles along a tip loop and check them against forward
//! kinematics.

use hexapod_recovery::kinematics::{body_to_hip, forward_kinematics, inverse_kinematics};
use hexapod_recovery::trajectory::tip_position;
use hexapod_recovery::{plan_sequence, GaitParams, MorphologyVector, ParamBounds, RobotGeometry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = RobotGeometry::default();
    let m = MorphologyVector::healthy();
    let s = plan_sequence(&m, 2.0)?;
    let p = GaitParams::from_slice(&ParamBounds::default().midpoint())?;
    let leg = 3;
    let n = 120;

    println!("{:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>10}", "k", "x", "y", "z", "q1", "q2", "q3", "fk err");
    for k in (1..=n).step_by(10) {
        let tip = tip_position(leg, k, n, &p, &s, &g)?;
        let local = body_to_hip(&tip, &g.legs[leg - 1]);
        let q = inverse_kinematics(&local, leg, &g)?;
        let back = forward_kinematics(&q, leg, &g)?;
        println!(
            "{k:>4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>10.2e}",
            tip.x,
            tip.y,
            tip.z,
            q.q1,
            q.q2,
            q.q3,
            (back - local).norm()
        );
    }
    Ok(())
}
