//! Damage scenario files.
//!
//! ```json
//! {
//!   "name": "leg_4",
//!   "morphology": "111011",
//!   "geometry": null,
//!   "seeds": [0, 1, 2],
//!   "output": "runs",
//!   "gait_period": 2.0,
//!   "de": { "population_size": 30, "generations": 60 },
//!   "sim": { "duration": 10.0 },
//!   "weights": { "w3": 10.0 }
//! }
//! ```
//!
//! Only `name` and `morphology` are required. Relative paths resolve
//! against the scenario file's directory. Missing `de`, `sim` and
//! `weights` fields keep their defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::de::DeConfig;
use crate::error::{Error, Result};
use crate::gait::DEFAULT_GAIT_PERIOD;
use crate::morphology::{MorphologyVector, RobotGeometry};
use crate::objective::ObjectiveWeights;
use crate::sim::SimConfig;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeOverrides {
    pub population_size: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_rate: Option<f64>,
    pub mutation_constant: Option<f64>,
    pub stall_generations: Option<usize>,
    pub force_one_gene: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOverrides {
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub margin_tol: Option<f64>,
    pub max_tip_angle: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightOverrides {
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub w3: Option<f64>,
    pub w4: Option<f64>,
    pub w5: Option<f64>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_period() -> f64 {
    DEFAULT_GAIT_PERIOD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub morphology: MorphologyVector,
    #[serde(default)]
    pub geometry: Option<PathBuf>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_period")]
    pub gait_period: f64,
    #[serde(default)]
    pub de: DeOverrides,
    #[serde(default)]
    pub sim: SimOverrides,
    #[serde(default)]
    pub weights: WeightOverrides,
    /// Directory of the file this was read from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Scenario {
    /// A scenario with every setting at its default.
    pub fn new(name: impl Into<String>, morphology: MorphologyVector) -> Self {
        Self {
            name: name.into(),
            description: None,
            morphology,
            geometry: None,
            seeds: default_seeds(),
            output: None,
            gait_period: DEFAULT_GAIT_PERIOD,
            de: DeOverrides::default(),
            sim: SimOverrides::default(),
            weights: WeightOverrides::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let s: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if s.name.is_empty() || s.name.contains(['/', '\\']) {
            return Err(format!("scenario name {:?} must be a plain non-empty file name", s.name));
        }
        if !(s.gait_period > 0.0) {
            return Err("gait_period must be > 0".into());
        }
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s = Self::from_json(&text).map_err(|msg| Error::parse(path, msg))?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn geometry(&self) -> Result<RobotGeometry> {
        match &self.geometry {
            Some(p) => RobotGeometry::load(self.resolve(p)),
            None => Ok(RobotGeometry::default()),
        }
    }

    pub fn de_config(&self, seed: u64) -> DeConfig {
        let d = DeConfig::default();
        let o = &self.de;
        DeConfig {
            population_size: o.population_size.unwrap_or(d.population_size),
            generations: o.generations.unwrap_or(d.generations),
            crossover_rate: o.crossover_rate.unwrap_or(d.crossover_rate),
            mutation_constant: o.mutation_constant.unwrap_or(d.mutation_constant),
            seed,
            parallel: false,
            stall_generations: o.stall_generations.or(d.stall_generations),
            force_one_gene: o.force_one_gene.unwrap_or(d.force_one_gene),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        let d = SimConfig::default();
        let o = &self.sim;
        SimConfig {
            dt: o.dt.unwrap_or(d.dt),
            duration: o.duration.unwrap_or(d.duration),
            margin_tol: o.margin_tol.unwrap_or(d.margin_tol),
            max_tip_angle: o.max_tip_angle.unwrap_or(d.max_tip_angle),
        }
    }

    pub fn objective_weights(&self) -> ObjectiveWeights {
        let d = ObjectiveWeights::default();
        let o = &self.weights;
        ObjectiveWeights {
            w1: o.w1.unwrap_or(d.w1),
            w2: o.w2.unwrap_or(d.w2),
            w3: o.w3.unwrap_or(d.w3),
            w4: o.w4.unwrap_or(d.w4),
            w5: o.w5.unwrap_or(d.w5),
        }
    }
}

/// The bundled damage scenarios, by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("legs_1_6", include_str!("../scenarios/legs_1_6.json")),
    ("legs_3_4", include_str!("../scenarios/legs_3_4.json")),
    ("leg_1", include_str!("../scenarios/leg_1.json")),
    ("leg_4", include_str!("../scenarios/leg_4.json")),
];

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_json(text).expect("bundled scenario parses"))
}
