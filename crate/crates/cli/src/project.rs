//! Project files: the design program, climate, constructions and every
//! configuration knob of one pipeline run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ventplan_core::comfort::{ComfortConfig, OccupancyModel, PenaltyWeights};
use ventplan_core::evaluation::Evaluator;
use ventplan_core::generator::SearchConfig;
use ventplan_core::plan::DesignProgram;
use ventplan_core::scenarios::{builtin_scenarios, Scenario};
use ventplan_core::thermal::{ConstructionSet, ModelOptions, SimulationOptions};
use ventplan_core::weather::{parse_epw, WeatherYear};

use crate::failure::{CliResult, Failure};

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// On-disk form; relative paths are resolved against the project file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectFile {
    pub program: PathBuf,
    pub weather: PathBuf,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "ConstructionSet::reference")]
    pub constructions: ConstructionSet,
    #[serde(default = "OccupancyModel::case_study")]
    pub occupancy: OccupancyModel,
    #[serde(default)]
    pub comfort: ComfortConfig,
    #[serde(default)]
    pub penalty_weights: PenaltyWeights,
    /// Its `seed` field is replaced by the project seed.
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub model: ModelOptions,
    #[serde(default)]
    pub simulation: SimulationOptions,
    #[serde(default = "builtin_scenarios")]
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone)]
pub struct Project {
    pub file: ProjectFile,
    pub program: DesignProgram,
    pub weather: WeatherYear,
    pub output_dir: PathBuf,
}

pub(crate) fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Project {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        let file: ProjectFile = serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Project::from_file(file, base)
    }

    pub fn from_file(mut file: ProjectFile, base: &Path) -> CliResult<Self> {
        file.program = resolve(base, &file.program);
        file.weather = resolve(base, &file.weather);
        file.output_dir = resolve(base, &file.output_dir);
        for (what, p) in [("design program", &file.program), ("weather file", &file.weather)] {
            if !p.is_file() {
                return Err(Failure::config(format!("{what} not found: {}", p.display())));
            }
        }
        let program = DesignProgram::from_json(&read_text(&file.program)?)
            .map_err(|e| Failure::from(e).context(format!("loading {}", file.program.display())))?;
        let weather = parse_epw(&read_text(&file.weather)?)
            .map_err(|e| Failure::from(e).context(format!("loading {}", file.weather.display())))?;
        file.search.seed = file.seed;
        file.search.check()?;
        file.simulation.check()?;
        let output_dir = file.output_dir.clone();
        Ok(Project {
            file,
            program,
            weather,
            output_dir,
        })
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.file.seed = seed;
        self.file.search.seed = seed;
    }

    pub fn evaluator(&self) -> CliResult<Evaluator> {
        let f = &self.file;
        let mut ev = Evaluator::new(
            self.weather.clone(),
            f.constructions.clone(),
            f.occupancy.clone(),
            &f.comfort,
            f.penalty_weights,
        )?;
        ev.model_options = f.model;
        ev.sim_options = f.simulation;
        Ok(ev)
    }

    /// The configured scenarios restricted to `names`; the NoVent reference
    /// is always kept.
    pub fn scenarios(&self, names: &[String]) -> CliResult<Vec<Scenario>> {
        if let Some(unknown) = names
            .iter()
            .find(|n| !self.file.scenarios.iter().any(|s| s.name() == n.as_str()))
        {
            return Err(Failure::config(format!("unknown scenario {unknown:?}")));
        }
        Ok(self
            .file
            .scenarios
            .iter()
            .filter(|s| names.is_empty() || matches!(s, Scenario::NoVent) || names.iter().any(|n| n == s.name()))
            .cloned()
            .collect())
    }
}
