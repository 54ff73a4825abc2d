use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermitian_torsion::functionals::FD_STEP;
use hermitian_torsion::optimizer::OptimConfig;

use crate::commands::{self, Functional, OptimizeOptions, VariationOptions};
use crate::error::{CliError, EXIT_OK};
use crate::input::InputDocument;
use crate::report::ReportDocument;
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionalArg {
    Torsion,
    Gauduchon,
}

impl From<FunctionalArg> for Functional {
    fn from(f: FunctionalArg) -> Self {
        match f {
            FunctionalArg::Torsion => Functional::Torsion,
            FunctionalArg::Gauduchon => Functional::Gauduchon,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "htorsion", version, about = "Chern torsion and torsion functionals of left-invariant Hermitian structures")]
pub struct Cli {
    /// Tolerance for flags and criticality; the HTORSION_TOL variable overrides the default.
    #[arg(long, global = true, env = "HTORSION_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Source {
    /// JSON input document.
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    pub input: Option<PathBuf>,

    /// Use a catalog entry instead of an input file.
    #[arg(long)]
    pub catalog: Option<String>,
}

impl Source {
    fn load(&self) -> Result<InputDocument, CliError> {
        match (&self.input, &self.catalog) {
            (_, Some(name)) => Ok(InputDocument::catalog(name)),
            (Some(path), None) => InputDocument::read(path),
            (None, None) => Err(CliError::invalid("no input given".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: validation, torsion, classification, residuals.
    Analyze {
        #[command(flatten)]
        source: Source,
    },
    /// Exit 0 if the Euler-Lagrange residual is within --tol, 3 otherwise.
    CheckCritical {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = FunctionalArg::Torsion)]
        functional: FunctionalArg,
    },
    /// Compare the analytic first variation with a finite difference along random directions.
    VariationCheck {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10)]
        directions: usize,
        #[arg(long, default_value_t = FD_STEP)]
        fd_step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FunctionalArg::Torsion)]
        functional: FunctionalArg,
    },
    /// Gradient descent over invariant metrics.
    Optimize {
        #[command(flatten)]
        source: Source,
        /// torsion, gauduchon or residual_norm.
        #[arg(long, default_value = "torsion")]
        objective: String,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        grad_tol: f64,
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
        /// Start from a random perturbation of the input metric drawn with this seed (ChaCha8).
        #[arg(long)]
        seed: Option<u64>,
        /// Frobenius norm of the starting perturbation in the exponential chart.
        #[arg(long, default_value_t = 0.1)]
        perturbation: f64,
        /// Let the volume vary.
        #[arg(long)]
        free_volume: bool,
    },
    /// Named example structures.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

/// Rendered output and exit code of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    pub report: Option<ReportDocument>,
}

fn render(doc: ReportDocument, code: i32, format: Format) -> Outcome {
    let text = match format {
        Format::Json => doc.to_json(),
        Format::Text => text::render(&doc),
    };
    Outcome {
        text,
        code,
        report: Some(doc),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::invalid("--tol must be positive".into()));
    }
    let tol = cli.tol;
    let (doc, code) = match &cli.command {
        Command::Analyze { source } => commands::analyze_cmd(&source.load()?, tol)?,
        Command::CheckCritical { source, functional } => commands::check_critical_cmd(&source.load()?, (*functional).into(), tol)?,
        Command::VariationCheck {
            source,
            directions,
            fd_step,
            seed,
            functional,
        } => {
            let opts = VariationOptions {
                functional: (*functional).into(),
                directions: *directions,
                fd_step: *fd_step,
                seed: *seed,
            };
            commands::variation_check_cmd(&source.load()?, &opts, tol)?
        }
        Command::Optimize {
            source,
            objective,
            max_iter,
            grad_tol,
            fd_step,
            seed,
            perturbation,
            free_volume,
        } => {
            let objective = commands::parse_objective(objective)
                .ok_or_else(|| CliError::invalid(format!("unknown objective `{objective}`")))?;
            let opts = OptimizeOptions {
                config: OptimConfig {
                    objective,
                    max_iter: *max_iter,
                    grad_tol: *grad_tol,
                    fd_step: *fd_step,
                    det_normalized: !free_volume,
                    ..OptimConfig::default()
                },
                seed: *seed,
                perturbation: *perturbation,
            };
            commands::optimize_cmd(&source.load()?, &opts, tol)?
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let list = commands::catalog_list();
                let text = match cli.format {
                    Format::Json => {
                        let mut s = serde_json::to_string_pretty(&list).expect("listing serializes");
                        s.push('\n');
                        s
                    }
                    Format::Text => text::render_listing(&list),
                };
                return Ok(Outcome {
                    text,
                    code: EXIT_OK,
                    report: None,
                });
            }
            CatalogAction::Show { name } => commands::catalog_show(name, tol)?,
        },
    };
    Ok(render(doc, code, cli.format))
}
