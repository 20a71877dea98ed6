//! Versioned output files of a recovery run.
//!
//! Per seed a run writes `result.json`, `convergence.csv`,
//! `trajectory.csv` and `params.json`. Floats are written in their
//! shortest round-tripping form, so reading a file and writing it back
//! reproduces it byte for byte.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::de::RecoveryResult;
use crate::error::{Error, Result};
use crate::morphology::MorphologyVector;
use crate::objective::Metrics;
use crate::sim::SimConfig;
use crate::trajectory::GaitParams;

pub const SCHEMA_VERSION: u32 = 1;
pub const RESULT_FILE: &str = "result.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const PARAMS_FILE: &str = "params.json";

const CONVERGENCE_SCHEMA: &str = "# hexapod-recovery convergence v1";
const CONVERGENCE_COLUMNS: &str = "generation,best_F";

/// A recovered gait, self-contained enough to replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub schema_version: u32,
    pub morphology: MorphologyVector,
    pub gait_period: f64,
    pub sim: SimConfig,
    pub params: GaitParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub schema_version: u32,
    pub scenario: String,
    pub morphology: MorphologyVector,
    pub seed: u64,
    pub best_f: f64,
    pub metrics: Metrics,
    pub fell: bool,
    pub evaluations: usize,
    pub generations: usize,
    pub best_params: GaitParams,
    pub history: Vec<f64>,
}

impl ResultFile {
    pub fn new(scenario: &str, morphology: MorphologyVector, r: &RecoveryResult, fell: bool) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            morphology,
            seed: r.seed,
            best_f: r.best_f,
            metrics: r.best_metrics,
            fell,
            evaluations: r.evaluations,
            generations: r.history.len(),
            best_params: r.best_params,
            history: r.history.clone(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

fn from_json<T: DeserializeOwned>(text: &str, version: impl Fn(&T) -> u32) -> std::result::Result<T, String> {
    let v: T = serde_json::from_str(text).map_err(|e| e.to_string())?;
    match version(&v) {
        SCHEMA_VERSION => Ok(v),
        other => Err(format!("unsupported schema_version {other}, expected {SCHEMA_VERSION}")),
    }
}

impl ParamsFile {
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        from_json(text, |p: &Self| p.schema_version)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_with(path.as_ref(), Self::from_json)
    }
}

impl ResultFile {
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        from_json(text, |r: &Self| r.schema_version)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_with(path.as_ref(), Self::from_json)
    }
}

fn load_with<T>(path: &Path, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text).map_err(|msg| Error::parse(path, msg))
}

pub fn write_convergence_csv<W: Write>(mut w: W, history: &[f64]) -> std::io::Result<()> {
    writeln!(w, "{CONVERGENCE_SCHEMA}")?;
    writeln!(w, "{CONVERGENCE_COLUMNS}")?;
    for (i, f) in history.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, f)?;
    }
    Ok(())
}

pub fn read_convergence_csv<R: BufRead>(r: R) -> std::result::Result<Vec<f64>, String> {
    let mut lines = r.lines();
    let mut next = || lines.next().transpose().map_err(|e| e.to_string());
    if next()?.as_deref() != Some(CONVERGENCE_SCHEMA) {
        return Err(format!("missing '{CONVERGENCE_SCHEMA}' header"));
    }
    if next()?.as_deref() != Some(CONVERGENCE_COLUMNS) {
        return Err("unexpected column header".into());
    }
    let mut history = Vec::new();
    while let Some(line) = next()? {
        let (g, f) = line.split_once(',').ok_or_else(|| format!("malformed row {line:?}"))?;
        if g.parse::<usize>().ok() != Some(history.len() + 1) {
            return Err(format!("generation {g:?} out of sequence"));
        }
        history.push(f.parse().map_err(|_| format!("bad value {f:?}"))?);
    }
    Ok(history)
}

/// Write `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_file() -> ParamsFile {
        ParamsFile {
            schema_version: SCHEMA_VERSION,
            morphology: "111011".parse().unwrap(),
            gait_period: 2.0,
            sim: SimConfig::default(),
            params: GaitParams {
                y0: [0.1 + 0.2, -1.0 / 3.0, 0.0, 1e-17, -0.05, 0.0123456789],
                x0: [0.11; 6],
                step_length: 0.04,
                step_height: 0.025,
            },
        }
    }

    #[test]
    fn params_round_trip() {
        let first = to_json(&params_file());
        let back = ParamsFile::from_json(&first).unwrap();
        assert_eq!(back, params_file());
        assert_eq!(to_json(&back), first);
    }

    #[test]
    fn rejects_other_versions() {
        let mut p = params_file();
        p.schema_version = 2;
        assert!(ParamsFile::from_json(&to_json(&p)).unwrap_err().contains("schema_version"));
    }

    #[test]
    fn convergence_round_trip() {
        let h = vec![0.0, 0.1 + 0.2, 0.5, 0.5, 1.0 / 3.0];
        let mut first = Vec::new();
        write_convergence_csv(&mut first, &h).unwrap();
        assert_eq!(read_convergence_csv(first.as_slice()).unwrap(), h);
        let mut second = Vec::new();
        write_convergence_csv(&mut second, &h).unwrap();
        assert_eq!(first, second);
        assert!(read_convergence_csv(&b"generation,best_F\n1,0\n"[..]).is_err());
    }
}
