//! Score a few hand-picked gaits for one damage case.

use hexapod_recovery::{GaitParams, MorphologyVector, ObjectiveWeights, ParamBounds, RecoveryProblem};
use hexapod_recovery::{RobotGeometry, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: MorphologyVector = "011111".parse()?;
    let problem = RecoveryProblem::new(m, RobotGeometry::default(), SimConfig::default(), ObjectiveWeights::default())?;

    let mid = GaitParams::from_slice(&problem.bounds.midpoint())?;
    let short = GaitParams { step_length: 0.02, ..mid };
    let tall = GaitParams { step_height: 0.05, ..mid };
    let base = ParamBounds::default();
    let crowded = GaitParams::from_slice(&base.lower)?;

    for (name, p) in [("midpoint", mid), ("short steps", short), ("high lift", tall), ("lower corner", crowded)] {
        let e = problem.evaluate(&p);
        let m = e.metrics;
        match e.rejection {
            Some(r) => println!("{name:<13} F = 0 ({r:?})"),
            None => println!(
                "{name:<13} F = {:.5}  y_f = {:.3} m  x_f = {:+.4} m  yaw = {:+.2} deg",
                e.f,
                m.y_f,
                m.x_f,
                m.psi_f.to_degrees()
            ),
        }
    }
    Ok(())
}
