//! Walk a gait in the quasi-static simulator and summarise the run.
//!
//! ```bash
//! cargo run --example simulate_walk -- 110011
//! cargo run --example simulate_walk -- 110011 --csv > walk.csv
//! ```

use hexapod_recovery::{extract_metrics, plan_sequence, simulate, GaitParams, MorphologyVector, ParamBounds};
use hexapod_recovery::{RobotGeometry, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let m: MorphologyVector = args.next().as_deref().unwrap_or("110011").parse()?;
    let csv = args.next().as_deref() == Some("--csv");

    let s = plan_sequence(&m, 2.0)?;
    let p = GaitParams::from_slice(&ParamBounds::default().midpoint())?;
    let traj = simulate(&m, &s, &p, &RobotGeometry::default(), &SimConfig::default())?;

    if csv {
        traj.write_csv(std::io::stdout().lock())?;
        return Ok(());
    }
    let metrics = extract_metrics(&traj);
    let caught = traj.samples.iter().filter(|s| s.caught_by.is_some()).count();
    let min_margin = traj.samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    println!("{m} with a {} gait, {} steps", s.kind().name(), traj.len());
    println!("  final position  x = {:.4} m, y = {:.4} m", metrics.x_f, metrics.y_f);
    println!("  final yaw       {:.2} deg", metrics.psi_f.to_degrees());
    println!("  roll / pitch    +-{:.2} / +-{:.2} deg", metrics.d_phi.to_degrees(), metrics.d_theta.to_degrees());
    println!("  min margin      {:.4} m", min_margin);
    println!("  tipped onto a swinging foot in {caught} steps");
    match traj.fell_time {
        Some(t) => println!("  fell at t = {t:.3} s"),
        None => println!("  stayed up"),
    }
    Ok(())
}
