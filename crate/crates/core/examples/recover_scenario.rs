//! Optimise a gait for a bundled damage scenario and print the
//! convergence curve.
//!
//! ```bash
//! cargo run --release --example recover_scenario -- legs_3_4 7
//! ```

use hexapod_recovery::de::{self, Progress};
use hexapod_recovery::scenario::bundled;
use hexapod_recovery::RecoveryProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "leg_4".into());
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let scenario = bundled(&name).ok_or(format!("no bundled scenario {name:?}"))?;

    let problem = RecoveryProblem::with_period(
        scenario.morphology,
        scenario.geometry()?,
        scenario.sim_config(),
        scenario.objective_weights(),
        scenario.gait_period,
    )?;
    let cfg = de::DeConfig { parallel: true, ..scenario.de_config(seed) };

    let started = std::time::Instant::now();
    let result = de::run(&problem, &cfg, |p: &Progress| {
        if p.generation.is_multiple_of(10) || p.generation == 1 {
            println!(
                "gen {:>3}  best {:.5}  mean {:.5}  feasible {}",
                p.generation, p.best_f, p.mean_f, p.feasible_count
            );
        }
    })?;
    let m = result.best_metrics;
    println!(
        "{name} seed {seed}: F = {:.5} after {} evaluations in {:.1?}",
        result.best_f,
        result.evaluations,
        started.elapsed()
    );
    println!("  y_f = {:.3} m, x_f = {:+.4} m, yaw = {:+.2} deg", m.y_f, m.x_f, m.psi_f.to_degrees());
    println!("  params {:?}", result.best_params);
    Ok(())
}
