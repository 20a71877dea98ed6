use hexapod_recovery::de::{run, DeConfig};
use hexapod_recovery::scenario::bundled;
use hexapod_recovery::trajectory::build_bounds;
use hexapod_recovery::{plan_sequence, simulate, GaitParams, MorphologyVector, ObjectiveWeights, ParamBounds};
use hexapod_recovery::{RecoveryProblem, RobotGeometry, SimConfig};

fn problem(m: &str) -> RecoveryProblem {
    RecoveryProblem::new(
        m.parse().unwrap(),
        RobotGeometry::default(),
        SimConfig::default(),
        ObjectiveWeights::default(),
    )
    .unwrap()
}

#[test]
fn small_runs_are_reproducible() {
    let p = problem("111111");
    let cfg = DeConfig { population_size: 8, generations: 5, seed: 17, ..DeConfig::default() };
    let a = run(&p, &cfg, |_| {}).unwrap();
    let b = run(&p, &cfg, |_| {}).unwrap();
    let c = run(&p, &DeConfig { parallel: true, ..cfg }, |_| {}).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.history.len(), 5);
    assert!(a.history.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(a.evaluations, 8 * 6);
}

#[test]
fn progress_is_reported_every_generation() {
    let p = problem("011111");
    let cfg = DeConfig { population_size: 6, generations: 4, seed: 2, ..DeConfig::default() };
    let mut seen = Vec::new();
    let r = run(&p, &cfg, |g| seen.push(*g)).unwrap();
    assert_eq!(seen.iter().map(|g| g.generation).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    for (g, h) in seen.iter().zip(&r.history) {
        assert_eq!(g.best_f, *h);
        assert!(g.mean_f <= g.best_f);
        assert!(g.feasible_count <= 6);
    }
}

#[test]
fn leg_4_recovery_walks_forward_and_straight() {
    let s = bundled("leg_4").unwrap();
    let p = problem("111011");
    let r = run(&p, &s.de_config(0), |_| {}).unwrap();
    assert!(r.best_f > 0.0);
    assert!(r.best_metrics.y_f > 0.0);
    assert!(r.best_metrics.psi_f.abs() < 20f64.to_radians());
    assert!(p.bounds.contains(&r.best_params.to_array()));
}

#[test]
fn relaxed_bounds_only_grow() {
    let base = ParamBounds::default();
    for m in MorphologyVector::all() {
        let b = build_bounds(&m, &base, &Default::default());
        for i in 0..14 {
            assert!(b.lower[i] <= base.lower[i] && b.upper[i] >= base.upper[i]);
        }
    }
}

#[test]
fn symmetric_params_walk_straight_on_intact_robot() {
    let g = RobotGeometry::default();
    let m = MorphologyVector::healthy();
    let s = plan_sequence(&m, 2.0).unwrap();
    let p =
        GaitParams { y0: [0.01, 0.01, 0.0, 0.0, -0.02, -0.02], x0: [0.11; 6], step_length: 0.04, step_height: 0.03 };
    assert_eq!(p.mirrored(), p);
    let t = simulate(&m, &s, &p, &g, &SimConfig::default()).unwrap();
    let last = t.last().unwrap();
    assert!(last.com.x.abs() < 1e-9);
    assert!(last.euler.2.abs() < 1e-9);
    assert!(last.com.y > 0.0);
}
