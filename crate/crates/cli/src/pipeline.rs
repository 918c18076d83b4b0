//! The pipeline stages. Each stage reads the previous stage's files from the
//! output directory and writes its own next to them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ventplan_core::generator::{design_penalty, fingerprint, generate as run_generator, Fingerprint};
use ventplan_core::optimizer::{optimize_designs, OptimizationTrace};
use ventplan_core::plan::FloorPlan;
use ventplan_core::scenarios::{daily_difference_series, run_experiment, seasonal_benefit_share, ScenarioResult};

use crate::failure::{CliResult, Failure};
use crate::output::{clear_files, write_atomic, write_json};
use crate::project::{read_text, Project};
use crate::svg::{render_svg, SvgLabels};

/// Months counted as the warm season in the seasonal benefit share.
pub const WARM_SEASON: std::ops::RangeInclusive<u32> = 5..=10;

/// File locations under an output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn generated(&self) -> PathBuf {
        self.root.join("generated")
    }

    pub fn optimized(&self) -> PathBuf {
        self.root.join("optimized")
    }

    pub fn traces(&self) -> PathBuf {
        self.optimized().join("traces")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report")
    }

    pub fn svg(&self) -> PathBuf {
        self.root.join("svg")
    }

    pub fn index(dir: &Path) -> PathBuf {
        dir.join("index.json")
    }
}

fn design_name(i: usize) -> String {
    format!("design-{:02}", i + 1)
}

fn load_plan(path: &Path) -> CliResult<FloorPlan> {
    FloorPlan::from_json(&read_text(path)?).map_err(|e| Failure::from(e).context(format!("loading {}", path.display())))
}

fn load_index<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn write_plan(path: &Path, plan: &FloorPlan) -> CliResult<()> {
    write_atomic(path, plan.to_json()?.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedEntry {
    pub design: String,
    pub file: String,
    pub design_penalty: f64,
    pub total_area: f64,
    pub envelope_length: f64,
    pub fingerprint: Fingerprint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedIndex {
    pub seed: u64,
    pub generations: usize,
    pub archived: usize,
    /// How plans that all meet the program are ordered.
    pub order: String,
    pub designs: Vec<GeneratedEntry>,
}

pub const GENERATED_ORDER: &str = "total floor area ascending, then exterior wall length ascending";

pub fn generate(project: &Project, layout: &Layout) -> CliResult<GeneratedIndex> {
    let outcome = run_generator(&project.program, &project.file.search)?;
    let dir = layout.generated();
    clear_files(&dir, "json")?;
    let mut designs = Vec::with_capacity(outcome.designs.len());
    for (i, d) in outcome.designs.iter().enumerate() {
        let design = design_name(i);
        let file = format!("{design}.json");
        write_plan(&dir.join(&file), &d.plan)?;
        designs.push(GeneratedEntry {
            design,
            file,
            design_penalty: design_penalty(&d.plan, &project.program).total,
            total_area: d.total_area,
            envelope_length: d.envelope_length,
            fingerprint: fingerprint(&d.plan),
        });
    }
    let index = GeneratedIndex {
        seed: project.seed(),
        generations: outcome.generations,
        archived: outcome.archived,
        order: GENERATED_ORDER.into(),
        designs,
    };
    write_json(&Layout::index(&dir), &index)?;
    Ok(index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub seed: u64,
    pub design: String,
    pub rank: usize,
    pub trace: OptimizationTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub design: String,
    pub file: String,
    pub trace: String,
    pub design_penalty: f64,
    pub initial_penalty: f64,
    pub final_penalty: f64,
}

/// Optimized designs, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedIndex {
    pub seed: u64,
    pub designs: Vec<RankedEntry>,
}

impl RankedIndex {
    pub fn ranking_csv(&self) -> String {
        let mut out = String::from("rank,design,initial_penalty,final_penalty,seed\n");
        for d in &self.designs {
            let _ = writeln!(
                out,
                "{},{},{:.3},{:.3},{}",
                d.rank, d.design, d.initial_penalty, d.final_penalty, self.seed
            );
        }
        out
    }
}

pub fn optimize(project: &Project, layout: &Layout) -> CliResult<RankedIndex> {
    let src = layout.generated();
    let generated: GeneratedIndex = load_index(&Layout::index(&src))?;
    let plans = generated
        .designs
        .iter()
        .map(|d| load_plan(&src.join(&d.file)))
        .collect::<CliResult<Vec<_>>>()?;
    let evaluator = project.evaluator()?;
    let optimized = optimize_designs(&plans, &project.program, &evaluator)?;

    let dir = layout.optimized();
    clear_files(&dir, "json")?;
    clear_files(&layout.traces(), "json")?;
    let mut designs = Vec::with_capacity(optimized.len());
    for o in &optimized {
        let design = generated.designs[o.source].design.clone();
        let file = format!("{design}.json");
        let trace = format!("traces/{design}.json");
        write_plan(&dir.join(&file), &o.plan)?;
        write_json(
            &dir.join(&trace),
            &TraceFile {
                seed: project.seed(),
                design: design.clone(),
                rank: o.rank,
                trace: o.trace.clone(),
            },
        )?;
        designs.push(RankedEntry {
            rank: o.rank,
            design,
            file,
            trace,
            design_penalty: design_penalty(&o.plan, &project.program).total,
            initial_penalty: o.trace.initial_penalty,
            final_penalty: o.trace.final_penalty,
        });
    }
    let index = RankedIndex {
        seed: project.seed(),
        designs,
    };
    write_json(&Layout::index(&dir), &index)?;
    write_atomic(&dir.join("ranking.csv"), index.ranking_csv().as_bytes())?;
    Ok(index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalShare {
    pub design: String,
    pub scenario: String,
    /// `None` when the scenario brings no benefit at all.
    pub share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub warm_season_months: (u32, u32),
    pub result: ScenarioResult,
    pub seasonal: Vec<SeasonalShare>,
}

impl Report {
    pub fn seasonal_csv(&self) -> String {
        let mut out = String::from("design,scenario,warm_season_share\n");
        for s in &self.seasonal {
            let share = s.share.map_or("undefined".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(out, "{},{},{share}", s.design, s.scenario);
        }
        out
    }
}

pub fn seasonal_shares(result: &ScenarioResult) -> Vec<SeasonalShare> {
    let mut out = Vec::new();
    for row in &result.rows {
        for (c, name) in result.scenarios.iter().enumerate() {
            if c == result.reference {
                continue;
            }
            let diff = daily_difference_series(&row.daily[c], &row.daily[result.reference]);
            out.push(SeasonalShare {
                design: row.design.clone(),
                scenario: name.clone(),
                share: seasonal_benefit_share(&diff, WARM_SEASON),
            });
        }
    }
    out
}

/// Simulates the ranked optimized designs under the selected scenarios.
pub fn compare(project: &Project, layout: &Layout, scenario_filter: &[String]) -> CliResult<Report> {
    let src = layout.optimized();
    let ranked: RankedIndex = load_index(&Layout::index(&src))?;
    let designs = ranked
        .designs
        .iter()
        .map(|d| Ok((d.design.clone(), load_plan(&src.join(&d.file))?)))
        .collect::<CliResult<Vec<_>>>()?;
    let scenarios = project.scenarios(scenario_filter)?;
    let result = run_experiment(&designs, &scenarios, &project.evaluator()?)?;
    let report = Report {
        seed: project.seed(),
        warm_season_months: (*WARM_SEASON.start(), *WARM_SEASON.end()),
        seasonal: seasonal_shares(&result),
        result,
    };
    let dir = layout.report();
    write_atomic(&dir.join("scenarios.csv"), report.result.to_csv().as_bytes())?;
    write_atomic(&dir.join("scenarios.txt"), report.result.to_text().as_bytes())?;
    write_atomic(&dir.join("daily.csv"), report.result.daily_csv().as_bytes())?;
    write_atomic(&dir.join("seasonal.csv"), report.seasonal_csv().as_bytes())?;
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}

/// Draws every generated and optimized plan found under the output directory.
pub fn render(layout: &Layout) -> CliResult<usize> {
    let mut count = 0;
    let generated_index = Layout::index(&layout.generated());
    if generated_index.is_file() {
        let index: GeneratedIndex = load_index(&generated_index)?;
        let out = layout.svg().join("generated");
        clear_files(&out, "svg")?;
        for d in &index.designs {
            let plan = load_plan(&layout.generated().join(&d.file))?;
            let labels = SvgLabels {
                design: d.design.clone(),
                design_penalty: Some(d.design_penalty),
                thermal_penalty: None,
            };
            write_atomic(&out.join(format!("{}.svg", d.design)), render_svg(&plan, &labels).as_bytes())?;
            count += 1;
        }
    }
    let ranked_index = Layout::index(&layout.optimized());
    if ranked_index.is_file() {
        let index: RankedIndex = load_index(&ranked_index)?;
        let out = layout.svg().join("optimized");
        clear_files(&out, "svg")?;
        for d in &index.designs {
            let plan = load_plan(&layout.optimized().join(&d.file))?;
            let labels = SvgLabels {
                design: format!("#{} {}", d.rank, d.design),
                design_penalty: Some(d.design_penalty),
                thermal_penalty: Some(d.final_penalty),
            };
            write_atomic(
                &out.join(format!("{:02}-{}.svg", d.rank, d.design)),
                render_svg(&plan, &labels).as_bytes(),
            )?;
            count += 1;
        }
    }
    Ok(count)
}

/// Renders individual plan files next to the output directory's drawings.
pub fn render_files(layout: &Layout, plans: &[PathBuf]) -> CliResult<usize> {
    for path in plans {
        let plan = load_plan(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "plan".into());
        let labels = SvgLabels {
            design: stem.clone(),
            design_penalty: None,
            thermal_penalty: None,
        };
        write_atomic(&layout.svg().join(format!("{stem}.svg")), render_svg(&plan, &labels).as_bytes())?;
    }
    Ok(plans.len())
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub generated: GeneratedIndex,
    pub ranked: RankedIndex,
    pub report: Report,
    pub drawings: usize,
}

pub fn run_all(project: &Project, layout: &Layout, scenario_filter: &[String]) -> CliResult<PipelineSummary> {
    let generated = generate(project, layout)?;
    let ranked = optimize(project, layout)?;
    let report = compare(project, layout, scenario_filter)?;
    let drawings = render(layout)?;
    Ok(PipelineSummary {
        generated,
        ranked,
        report,
        drawings,
    })
}

/// Run metadata kept apart from the deterministic outputs.
#[derive(Debug, Clone, Serialize)]
struct Metadata<'a> {
    command: &'a str,
    seed: u64,
    version: &'a str,
    finished_unix_seconds: u64,
}

pub fn write_metadata(layout: &Layout, command: &str, seed: u64) -> CliResult<()> {
    let finished_unix_seconds = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    write_json(
        &layout.root.join("meta.json"),
        &Metadata {
            command,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            finished_unix_seconds,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_csv_lists_designs_in_rank_order() {
        let entry = |rank, design: &str, p| RankedEntry {
            rank,
            design: design.into(),
            file: format!("{design}.json"),
            trace: format!("traces/{design}.json"),
            design_penalty: 0.0,
            initial_penalty: p + 1.0,
            final_penalty: p,
        };
        let index = RankedIndex {
            seed: 9,
            designs: vec![entry(1, "design-02", 10.0), entry(2, "design-01", 12.5)],
        };
        assert_eq!(
            index.ranking_csv(),
            "rank,design,initial_penalty,final_penalty,seed\n\
             1,design-02,11.000,10.000,9\n\
             2,design-01,13.500,12.500,9\n"
        );
    }

    #[test]
    fn missing_stage_input_is_an_io_failure() {
        let dir = tempfile::tempdir().unwrap();
        let layout = Layout::new(dir.path());
        let err = load_index::<RankedIndex>(&Layout::index(&layout.optimized())).unwrap_err();
        assert_eq!(err.kind, crate::failure::FailureKind::Io);
        assert_eq!(render(&layout).unwrap(), 0);
    }
}
