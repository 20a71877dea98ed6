//! Differential evolution, current-to-best/1 with binomial crossover.
//!
//! Every random draw comes from a ChaCha stream keyed by
//! `(generation, candidate)` under the master seed, so evaluating a
//! generation in parallel cannot change the outcome.

use log::{debug, warn};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{Evaluation, Metrics, RecoveryProblem};
use crate::trajectory::{GaitParams, ParamBounds, DIM};

pub type Vector = [f64; DIM];

/// Improvements at or below this do not reset the stall counter.
pub const STALL_EPSILON: f64 = 1e-12;

/// Draws spent looking for a unique initial candidate before giving up.
const UNIQUE_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_constant: f64,
    pub seed: u64,
    pub parallel: bool,
    /// Stop after this many generations without improvement.
    pub stall_generations: Option<usize>,
    /// Always take at least one coordinate from the mutant.
    pub force_one_gene: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            generations: 60,
            crossover_rate: 0.6,
            mutation_constant: 0.5,
            seed: 0,
            parallel: false,
            stall_generations: None,
            force_one_gene: false,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::Config(format!("population size {} < 4", self.population_size)));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::Config(format!("crossover rate {} outside [0, 1]", self.crossover_rate)));
        }
        if !(0.0..=1.0).contains(&self.mutation_constant) {
            return Err(Error::Config(format!("mutation constant {} outside [0, 1]", self.mutation_constant)));
        }
        if self.stall_generations == Some(0) {
            return Err(Error::Config("stall window must be at least one generation".into()));
        }
        Ok(())
    }
}

/// Per-generation summary handed to progress sinks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub generation: usize,
    pub best_f: f64,
    pub mean_f: f64,
    pub feasible_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub best_params: GaitParams,
    pub best_f: f64,
    pub best_metrics: Metrics,
    /// Best F after each generation; `history[g - 1]` for generation g.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub seed: u64,
}

/// Independent stream for one candidate of one generation; generation 0
/// is initialisation.
pub fn candidate_rng(seed: u64, generation: usize, candidate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | candidate as u64);
    rng
}

fn sample_in(bounds: &ParamBounds, rng: &mut impl Rng) -> Vector {
    std::array::from_fn(|m| {
        let (lo, hi) = (bounds.lower[m], bounds.upper[m]);
        if lo < hi {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    })
}

/// Uniform population with distinct members. A box too small to hold
/// distinct members yields duplicates and a warning.
pub fn initialize(bounds: &ParamBounds, size: usize, seed: u64) -> Vec<Vector> {
    let mut pop: Vec<Vector> = Vec::with_capacity(size);
    let mut warned = false;
    for k in 0..size {
        let mut rng = candidate_rng(seed, 0, k);
        let mut x = sample_in(bounds, &mut rng);
        let mut tries = 1;
        while pop.contains(&x) && tries < UNIQUE_ATTEMPTS {
            x = sample_in(bounds, &mut rng);
            tries += 1;
        }
        if pop.contains(&x) && !warned {
            warn!("search box too small for {size} distinct candidates; population has duplicates");
            warned = true;
        }
        pop.push(x);
    }
    pop
}

/// Two distinct indices, both different from `k` and `best`.
pub fn pick_donors(size: usize, k: usize, best: usize, rng: &mut impl Rng) -> Result<(usize, usize)> {
    let excluded = if k == best { 1 } else { 2 };
    if size < excluded + 2 {
        return Err(Error::Config(format!("population of {size} too small for mutation")));
    }
    let mut draw = |avoid: &[usize]| loop {
        let r = rng.random_range(0..size);
        if !avoid.contains(&r) {
            break r;
        }
    };
    let r1 = draw(&[k, best]);
    let r2 = draw(&[k, best, r1]);
    Ok((r1, r2))
}

/// `x_k + K (x_best - x_k) + K (x_r1 - x_r2)`, componentwise.
pub fn mutate(xk: &[f64], best: &[f64], r1: &[f64], r2: &[f64], k_f: f64) -> Vec<f64> {
    (0..xk.len()).map(|m| xk[m] + k_f * (best[m] - xk[m]) + k_f * (r1[m] - r2[m])).collect()
}

/// Binomial crossover with explicit uniform draws: coordinate m comes from
/// the mutant when `draws[m] <= cr`.
pub fn crossover_with(x: &[f64], v: &[f64], draws: &[f64], cr: f64) -> Vec<f64> {
    (0..x.len()).map(|m| if draws[m] <= cr { v[m] } else { x[m] }).collect()
}

pub fn crossover(x: &[f64], v: &[f64], cr: f64, force_one_gene: bool, rng: &mut impl Rng) -> Vec<f64> {
    let draws: Vec<f64> = (0..x.len()).map(|_| rng.random::<f64>()).collect();
    let mut u = crossover_with(x, v, &draws, cr);
    if force_one_gene && !x.is_empty() {
        let j = rng.random_range(0..x.len());
        u[j] = v[j];
    }
    u
}

/// Clamp into the box.
pub fn repair(u: &mut Vector, bounds: &ParamBounds) {
    bounds.clamp(u);
}

/// The trial replaces the current member unless it scores strictly worse.
pub fn select(f_x: f64, f_u: f64) -> bool {
    f_x <= f_u
}

fn best_index(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &f) in scores.iter().enumerate() {
        if f > scores[best] {
            best = i;
        }
    }
    best
}

/// Outcome of [`optimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Optimum<E> {
    pub best: Vector,
    pub best_eval: E,
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Anything that can score a candidate vector.
pub trait Fitness: Sync {
    type Eval: Copy + Send;
    fn score(&self, v: &Vector) -> Self::Eval;
    fn value(e: &Self::Eval) -> f64;
    fn feasible(_e: &Self::Eval) -> bool {
        true
    }
}

impl<F: Fn(&Vector) -> f64 + Sync> Fitness for F {
    type Eval = f64;
    fn score(&self, v: &Vector) -> f64 {
        self(v)
    }
    fn value(e: &f64) -> f64 {
        *e
    }
}

impl Fitness for RecoveryProblem {
    type Eval = Evaluation;
    fn score(&self, v: &Vector) -> Evaluation {
        self.evaluate_vector(v)
    }
    fn value(e: &Evaluation) -> f64 {
        e.f
    }
    fn feasible(e: &Evaluation) -> bool {
        e.is_feasible()
    }
}

fn score_all<F: Fitness>(fitness: &F, pop: &[Vector], parallel: bool) -> Vec<F::Eval> {
    if parallel {
        pop.par_iter().map(|v| fitness.score(v)).collect()
    } else {
        pop.iter().map(|v| fitness.score(v)).collect()
    }
}

/// Maximise `fitness` over `bounds`.
pub fn optimize<F: Fitness>(
    fitness: &F,
    bounds: &ParamBounds,
    cfg: &DeConfig,
    mut progress: impl FnMut(&Progress),
) -> Result<Optimum<F::Eval>> {
    cfg.validate()?;
    bounds.validate()?;
    let size = cfg.population_size;
    let mut pop = initialize(bounds, size, cfg.seed);
    let mut evals = score_all(fitness, &pop, cfg.parallel);
    let mut scores: Vec<f64> = evals.iter().map(F::value).collect();
    let mut evaluations = size;
    let mut history = Vec::with_capacity(cfg.generations);
    let mut stall = 0;

    for generation in 1..=cfg.generations {
        let best = best_index(&scores);
        let trials = (0..size)
            .map(|k| {
                let mut rng = candidate_rng(cfg.seed, generation, k);
                let (r1, r2) = pick_donors(size, k, best, &mut rng)?;
                let v = mutate(&pop[k], &pop[best], &pop[r1], &pop[r2], cfg.mutation_constant);
                let u = crossover(&pop[k], &v, cfg.crossover_rate, cfg.force_one_gene, &mut rng);
                let mut u: Vector = u.try_into().expect("fixed dimension");
                repair(&mut u, bounds);
                Ok(u)
            })
            .collect::<Result<Vec<_>>>()?;
        let trial_evals = score_all(fitness, &trials, cfg.parallel);
        evaluations += size;

        let previous = scores[best];
        for k in 0..size {
            let f_u = F::value(&trial_evals[k]);
            if select(scores[k], f_u) {
                pop[k] = trials[k];
                evals[k] = trial_evals[k];
                scores[k] = f_u;
            }
        }
        let best = best_index(&scores);
        history.push(scores[best]);
        let record = Progress {
            generation,
            best_f: scores[best],
            mean_f: scores.iter().sum::<f64>() / size as f64,
            feasible_count: evals.iter().filter(|e| F::feasible(e)).count(),
        };
        debug!("generation {generation}: best {:.6} mean {:.6}", record.best_f, record.mean_f);
        progress(&record);

        if scores[best] > previous + STALL_EPSILON {
            stall = 0;
        } else {
            stall += 1;
        }
        if cfg.stall_generations.is_some_and(|w| stall >= w) {
            break;
        }
    }

    let best = best_index(&scores);
    Ok(Optimum { best: pop[best], best_eval: evals[best], history, evaluations })
}

/// Search gait parameters for `problem`.
pub fn run(problem: &RecoveryProblem, cfg: &DeConfig, progress: impl FnMut(&Progress)) -> Result<RecoveryResult> {
    let opt = optimize(problem, &problem.bounds, cfg, progress)?;
    Ok(RecoveryResult {
        best_params: GaitParams::from_slice(&opt.best)?,
        best_f: opt.best_eval.f,
        best_metrics: opt.best_eval.metrics,
        history: opt.history,
        evaluations: opt.evaluations,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mutation_arithmetic() {
        let v = mutate(&[0.0, 0.0], &[1.0, 1.0], &[2.0, 0.0], &[0.0, 2.0], 0.5);
        assert_eq!(v, vec![1.5, -0.5]);
        let x = [0.3, -0.2];
        assert_eq!(mutate(&x, &[1.0, 1.0], &[2.0, 0.0], &[0.0, 2.0], 0.0), x.to_vec());
        // k = best: only the donor difference remains
        assert_eq!(mutate(&x, &x, &[2.0, 0.0], &[0.0, 2.0], 0.5), vec![1.3, -1.2]);
    }

    #[test]
    fn crossover_rule() {
        let u = crossover_with(&[1.0; 3], &[5.0; 3], &[0.2, 0.9, 0.6], 0.6);
        assert_eq!(u, vec![5.0, 1.0, 5.0]);
        let mut rng = candidate_rng(3, 1, 1);
        assert_eq!(crossover(&[1.0; 14], &[5.0; 14], 1.0, false, &mut rng), vec![5.0; 14]);
        assert_eq!(crossover(&[1.0; 14], &[5.0; 14], 0.0, false, &mut rng), vec![1.0; 14]);
        let forced = crossover(&[1.0; 14], &[5.0; 14], 0.0, true, &mut rng);
        assert_eq!(forced.iter().filter(|&&v| v == 5.0).count(), 1);
    }

    #[test]
    fn repair_clamps_to_box() {
        let b = ParamBounds::default();
        let mut u = b.midpoint();
        u[6] = 0.20;
        u[4] = -0.10;
        let inside = u[13];
        repair(&mut u, &b);
        assert_eq!(u[6], 0.13);
        assert_eq!(u[4], -0.05);
        assert_eq!(u[13], inside);
    }

    #[test]
    fn selection_prefers_trial_on_ties() {
        assert!(select(0.5, 0.5));
        assert!(!select(1.0, 0.2));
        assert!(select(0.0, 0.1));
    }

    #[test]
    fn donors_are_distinct() {
        for seed in 0..200 {
            let mut rng = candidate_rng(seed, 1, 0);
            let size = 4 + (seed as usize % 5);
            let k = seed as usize % size;
            let best = (seed as usize / 3) % size;
            let (r1, r2) = pick_donors(size, k, best, &mut rng).unwrap();
            assert!(r1 != r2 && r1 != k && r2 != k && r1 != best && r2 != best);
            assert!(r1 < size && r2 < size);
        }
        let mut rng = candidate_rng(0, 0, 0);
        assert!(pick_donors(3, 0, 1, &mut rng).is_err());
        assert!(pick_donors(3, 0, 0, &mut rng).is_ok());
    }

    #[test]
    fn initial_population() {
        let b = ParamBounds::default();
        let pop = initialize(&b, 1000, 11);
        assert!(pop.iter().all(|x| b.contains(x)));
        for (i, x) in pop.iter().enumerate() {
            assert!(!pop[..i].contains(x));
        }
        assert_eq!(pop, initialize(&b, 1000, 11));
        assert_ne!(pop, initialize(&b, 1000, 12));
    }

    #[test]
    fn degenerate_box_gives_single_point() {
        let mid = ParamBounds::default().midpoint();
        let b = ParamBounds::new(mid, mid).unwrap();
        let pop = initialize(&b, 5, 0);
        assert!(pop.iter().all(|x| *x == mid));
    }

    #[test]
    fn rejects_small_population() {
        let cfg = DeConfig { population_size: 3, ..Default::default() };
        let r = optimize(&|_: &Vector| 0.0, &ParamBounds::default(), &cfg, |_| {});
        assert!(r.is_err());
    }

    fn sphere(v: &Vector) -> f64 {
        let c = ParamBounds::default().midpoint();
        1.0 / (1.0 + v.iter().zip(&c).map(|(a, b)| ((a - b) * 100.0).powi(2)).sum::<f64>())
    }

    #[test]
    fn converges_on_a_smooth_bowl() {
        let cfg = DeConfig { population_size: 20, generations: 200, seed: 5, ..Default::default() };
        let opt = optimize(&sphere, &ParamBounds::default(), &cfg, |_| {}).unwrap();
        assert!(opt.best_eval > 0.95, "best {}", opt.best_eval);
        assert!(opt.history.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(opt.history.len(), 200);
        assert_eq!(opt.evaluations, 20 * 201);
    }

    #[test]
    fn identity_evolution() {
        let b = ParamBounds::default();
        let cfg = DeConfig {
            population_size: 6,
            generations: 1,
            crossover_rate: 0.0,
            mutation_constant: 0.0,
            ..Default::default()
        };
        let start = initialize(&b, 6, cfg.seed);
        // with K = 0 and CR = 0 every trial equals its parent
        for k in 0..6 {
            let mut rng = candidate_rng(cfg.seed, 1, k);
            let (r1, r2) = pick_donors(6, k, 0, &mut rng).unwrap();
            let v = mutate(&start[k], &start[0], &start[r1], &start[r2], 0.0);
            assert_eq!(crossover(&start[k], &v, 0.0, false, &mut rng), start[k].to_vec());
        }
    }

    #[test]
    fn stall_window_stops_early() {
        let cfg = DeConfig { population_size: 6, generations: 50, stall_generations: Some(3), ..Default::default() };
        let opt = optimize(&|_: &Vector| 1.0, &ParamBounds::default(), &cfg, |_| {}).unwrap();
        assert_eq!(opt.history.len(), 3);
    }

    #[test]
    fn parallel_matches_serial() {
        let cfg = DeConfig { population_size: 10, generations: 15, seed: 9, ..Default::default() };
        let serial = optimize(&sphere, &ParamBounds::default(), &cfg, |_| {}).unwrap();
        let parallel = optimize(&sphere, &ParamBounds::default(), &DeConfig { parallel: true, ..cfg }, |_| {}).unwrap();
        assert_eq!(serial, parallel);
    }

    proptest! {
        #[test]
        fn survivors_stay_in_bounds(seed in 0u64..1000) {
            let b = ParamBounds::default();
            let cfg = DeConfig { population_size: 5, generations: 3, seed, force_one_gene: true, ..Default::default() };
            let opt = optimize(&|v: &Vector| v[0] - v[5], &b, &cfg, |_| {}).unwrap();
            prop_assert!(b.contains(&opt.best));
            prop_assert!(opt.history.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
