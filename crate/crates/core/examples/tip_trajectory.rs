//! Print one cycle of body-frame tip positions as CSV.
//!
//! ```bash
//! cargo run --example tip_trajectory -- 011110 > tips.csv
//! ```

use hexapod_recovery::trajectory::{build_trajectories, samples_per_cycle, write_tip_csv};
use hexapod_recovery::{plan_sequence, GaitParams, MorphologyVector, ParamBounds, RobotGeometry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: MorphologyVector = std::env::args().nth(1).as_deref().unwrap_or("011110").parse()?;
    let s = plan_sequence(&m, 2.0)?;
    let g = RobotGeometry::default();
    let p = GaitParams::from_slice(&ParamBounds::default().midpoint())?;
    let n = samples_per_cycle(s.period(), 1.0 / 60.0)?;
    let tips = build_trajectories(n, &p, &s, &g)?;
    write_tip_csv(std::io::stdout().lock(), &tips)?;
    Ok(())
}
