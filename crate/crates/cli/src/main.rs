use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ventplan_cli::pipeline::{self, Layout};
use ventplan_cli::{CliResult, Failure, FailureKind, Project};

#[derive(Parser)]
#[command(name = "ventplan", version, about = "Generate floor plans, optimize them and compare ventilation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Project JSON file.
    #[arg(long)]
    project: PathBuf,
    /// Output directory; overrides the project's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the project seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate plans that meet the design program.
    Generate(Common),
    /// Optimize the generated plans for sealed-building thermal comfort.
    Optimize(Common),
    /// Simulate the optimized plans under every ventilation scenario.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Only these scenarios (repeatable); NoVent is always included.
        #[arg(long)]
        scenario: Vec<String>,
    },
    /// Draw plans as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        /// Plan files to draw instead of the output directory's plans.
        plans: Vec<PathBuf>,
    },
    /// Generate, optimize, compare and render.
    All {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Vec<String>,
    },
}

fn setup(common: &Common) -> CliResult<(Project, Layout)> {
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::config(e.to_string()))?;
    }
    let mut project = Project::load(&common.project)?;
    if let Some(seed) = common.seed {
        project.set_seed(seed);
    }
    let root = common.out.clone().unwrap_or_else(|| project.output_dir.clone());
    Ok((project, Layout::new(root)))
}

fn run(cli: Cli) -> CliResult<()> {
    let (name, common) = match &cli.command {
        Command::Generate(c) => ("generate", c),
        Command::Optimize(c) => ("optimize", c),
        Command::Compare { common, .. } => ("compare", common),
        Command::Render { common, .. } => ("render", common),
        Command::All { common, .. } => ("all", common),
    };
    let (project, layout) = setup(common)?;
    match &cli.command {
        Command::Generate(_) => {
            let index = pipeline::generate(&project, &layout)?;
            for d in &index.designs {
                println!("{}  area {:.1} m²  design penalty {}", d.design, d.total_area, d.design_penalty);
            }
        }
        Command::Optimize(_) => {
            let index = pipeline::optimize(&project, &layout)?;
            for d in &index.designs {
                println!("#{} {}  {:.1} -> {:.1}", d.rank, d.design, d.initial_penalty, d.final_penalty);
            }
        }
        Command::Compare { scenario, .. } => {
            let report = pipeline::compare(&project, &layout, scenario)?;
            print!("{}", report.result.to_text());
        }
        Command::Render { plans, .. } => {
            let n = if plans.is_empty() {
                pipeline::render(&layout)?
            } else {
                pipeline::render_files(&layout, plans)?
            };
            println!("{n} drawings in {}", layout.svg().display());
        }
        Command::All { scenario, .. } => {
            let summary = pipeline::run_all(&project, &layout, scenario)?;
            print!("{}", summary.report.result.to_text());
        }
    }
    pipeline::write_metadata(&layout, name, project.seed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(FailureKind::Config.exit_code())
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
