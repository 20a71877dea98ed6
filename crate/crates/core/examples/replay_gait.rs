//! Save a recovered gait, reload it and replay it on another morphology.

use hexapod_recovery::artifacts::{to_json, ParamsFile, SCHEMA_VERSION};
use hexapod_recovery::cli::walk;
use hexapod_recovery::de::{run, DeConfig};
use hexapod_recovery::{extract_metrics, MorphologyVector, ObjectiveWeights, RecoveryProblem};
use hexapod_recovery::{RobotGeometry, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let damaged: MorphologyVector = "111011".parse()?;
    let g = RobotGeometry::default();
    let sim = SimConfig::default();
    let problem = RecoveryProblem::new(damaged, g.clone(), sim, ObjectiveWeights::default())?;
    let cfg = DeConfig { population_size: 12, generations: 15, seed: 1, parallel: true, ..DeConfig::default() };
    let result = run(&problem, &cfg, |_| {})?;

    let saved = ParamsFile {
        schema_version: SCHEMA_VERSION,
        morphology: damaged,
        gait_period: 2.0,
        sim,
        params: result.best_params,
    };
    let text = to_json(&saved);
    let loaded = ParamsFile::from_json(&text)?;
    assert_eq!(to_json(&loaded), text);

    for m in [damaged, MorphologyVector::healthy()] {
        let traj = walk(&m, loaded.gait_period, &loaded.params, &g, &loaded.sim)?;
        let k = extract_metrics(&traj);
        println!("{m}: y_f = {:.3} m, x_f = {:+.4} m, yaw = {:+.2} deg", k.y_f, k.x_f, k.psi_f.to_degrees());
    }
    Ok(())
}
