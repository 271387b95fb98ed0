//! The `bidforge` binary: argument parsing and terminal rendering around the
//! library commands. Successful commands exit 0; failures print one
//! machine-parsable line (`error[category]: message`) and exit nonzero.

use std::path::PathBuf;

use bidforge::backend::JobStatus;
use bidforge::corpus::CorpusFormat;
use bidforge::datagen::ModelKind;
use bidforge::ProblemSpec;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use bidforge_cli::commands::{
    cmd_build_datasets, cmd_evaluate, cmd_finetune, cmd_generate, cmd_ingest, cmd_pipeline,
    cmd_ratings, cmd_wmd,
};
use bidforge_cli::config::PipelineConfig;
use bidforge_cli::error::CliError;
use bidforge_cli::manifest::StageStatus;

#[derive(Parser)]
#[command(
    name = "bidforge",
    version,
    about = "Bio-inspired design pipeline: datasets, fine-tunes, generation, evaluation, diversity"
)]
struct Cli {
    /// Config file (flat key=value lines); built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides the configured random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Overrides the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Problem flags shared by `generate` and `pipeline`.
#[derive(Args)]
struct ProblemFlags {
    /// Application keywords, comma-separated (problem types 1 and 2).
    #[arg(long, value_name = "LIST")]
    applications: Option<String>,

    /// Benefit keywords, comma-separated (problem type 2).
    #[arg(long, value_name = "LIST")]
    benefits: Option<String>,

    /// Challenge statement (problem type 3).
    #[arg(long, value_name = "TEXT")]
    challenge: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a raw corpus file and write the canonical JSON corpus.
    Ingest {
        /// Corpus file to read (JSON or CSV).
        #[arg(long, value_name = "PATH")]
        input: PathBuf,

        /// Input format; guessed from the extension when omitted.
        #[arg(long, value_name = "json|csv")]
        format: Option<String>,
    },

    /// Compile the seven fine-tuning datasets with train/validation splits.
    BuildDatasets,

    /// Submit fine-tune jobs for built datasets and poll them to completion.
    Finetune {
        /// Dataset kinds to fine-tune (repeatable); all seven when omitted.
        #[arg(long = "kind", value_name = "SLUG")]
        kinds: Vec<String>,

        /// Training epochs per job.
        #[arg(long, value_name = "N", default_value_t = 4)]
        epochs: usize,
    },

    /// Generate concepts for one problem spec and write a concept store.
    Generate {
        /// Problem type: 1 (applications), 2 (benefits+applications), or
        /// 3 (challenge).
        #[arg(long = "type", value_name = "1|2|3")]
        concept_type: u8,

        #[command(flatten)]
        problem: ProblemFlags,

        /// Concepts to generate (config default when omitted).
        #[arg(long, value_name = "N")]
        n: Option<usize>,

        /// Prefix for generated concept ids.
        #[arg(long, value_name = "PREFIX")]
        id_prefix: Option<String>,

        /// Store file name inside the output directory.
        #[arg(long, value_name = "NAME")]
        store: Option<String>,
    },

    /// Run the relevancy evaluators over a concept store.
    Evaluate {
        /// Concept store to evaluate (JSONL).
        #[arg(long, value_name = "PATH")]
        store: PathBuf,
    },

    /// Compute word-level transport distances for a concept store.
    Wmd {
        /// Concept store to measure (JSONL).
        #[arg(long, value_name = "PATH")]
        store: PathBuf,

        /// Corpus of original innovations the concepts answer to.
        #[arg(long, value_name = "PATH")]
        originals: PathBuf,

        /// Corpus pool for the human-innovation baseline.
        #[arg(long, value_name = "PATH")]
        baseline: PathBuf,
    },

    /// Summarize human ratings for generated concepts.
    Ratings {
        /// Ratings CSV (concept_id,rater_id,feasibility,novelty).
        #[arg(long, value_name = "PATH")]
        csv: PathBuf,

        /// Concept store the ratings refer to (JSONL).
        #[arg(long, value_name = "PATH")]
        store: PathBuf,
    },

    /// Run generate, evaluate, and wmd end to end with a run manifest.
    Pipeline {
        #[command(flatten)]
        problem: ProblemFlags,

        /// Concepts per problem spec (config default when omitted).
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) =>
        {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.single_line());
            std::process::exit(err.exit_code());
        }
    };

    if let Err(e) = run(cli) {
        eprintln!("{}", e.single_line());
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }

    match cli.command {
        Command::Ingest { input, format } => {
            let format = format.as_deref().map(parse_format).transpose()?;
            let report = cmd_ingest(&config, &input, format)?;
            println!(
                "ingested {} records -> {}",
                report.records,
                report.output.display()
            );
        }
        Command::BuildDatasets => {
            let manifest = cmd_build_datasets(&config)?;
            for entry in &manifest.datasets {
                match &entry.manifest {
                    Some(m) => println!(
                        "{}: {} examples (train {} / validation {}, batch size {})",
                        entry.kind, m.examples, m.train_count, m.validation_count, m.batch_size
                    ),
                    None => println!(
                        "{}: failed ({})",
                        entry.kind,
                        entry.error.as_deref().unwrap_or("unknown error")
                    ),
                }
            }
            println!("manifest -> {}", manifest.path.display());
        }
        Command::Finetune { kinds, epochs } => {
            let kinds = kinds
                .iter()
                .map(|s| parse_kind(s))
                .collect::<Result<Vec<_>, _>>()?;
            let report = cmd_finetune(&config, &kinds, epochs)?;
            for job in &report.jobs {
                println!(
                    "{}: job {} {} (model {}, {} polls)",
                    job.kind,
                    job.job_id,
                    status_word(job.status),
                    job.fine_tuned_model.as_deref().unwrap_or("-"),
                    job.polls
                );
            }
            println!("jobs -> {}", report.output.display());
        }
        Command::Generate {
            concept_type,
            problem,
            n,
            id_prefix,
            store,
        } => {
            let spec = spec_for_type(concept_type, &problem)?;
            let report = cmd_generate(&config, &spec, n, id_prefix, store.as_deref())?;
            println!(
                "obtained {}/{} concepts ({} rejects) -> {}",
                report.obtained,
                report.requested,
                report.rejects,
                report.store.display()
            );
        }
        Command::Evaluate { store } => {
            let report = cmd_evaluate(&config, &store)?;
            for row in &report.table.rows {
                let problem = match &row.problem_solution {
                    Some(c) => format!("problem-solution {}/{}", c.passed, c.total),
                    None => "problem-solution n/a".to_string(),
                };
                println!(
                    "{}: nature-solution {}/{}, {}, overall {}/{}",
                    row.concept_type.slug(),
                    row.nature_solution.passed,
                    row.nature_solution.total,
                    problem,
                    row.overall.passed,
                    row.overall.total
                );
            }
            println!(
                "{} verdicts -> {} and {}",
                report.verdicts,
                report.verdicts_path.display(),
                report.pass_rates_path.display()
            );
        }
        Command::Wmd {
            store,
            originals,
            baseline,
        } => {
            let report = cmd_wmd(&config, &store, &originals, &baseline)?;
            if !report.skipped.is_empty() {
                eprintln!(
                    "warning: skipped {} empty-text entries: {}",
                    report.skipped.len(),
                    report.skipped.join(", ")
                );
            }
            println!(
                "{} generated and {} baseline distances -> {}",
                report.generated_distances,
                report.baseline_distances,
                report.distances_path.display()
            );
        }
        Command::Ratings { csv, store } => {
            let report = cmd_ratings(&config, &csv, &store)?;
            for row in &report.per_type {
                println!(
                    "{}: {} ratings from {} raters, feasibility mean {:.2}, novelty mean {:.2}",
                    row.concept_type.slug(),
                    row.ratings,
                    row.raters,
                    row.feasibility.mean,
                    row.novelty.mean
                );
            }
            println!("summary -> {}", report.output.display());
        }
        Command::Pipeline { problem, n } => {
            let specs = specs_from_flags(&problem)?;
            let report = cmd_pipeline(&config, &specs, n)?;
            for stage in &report.manifest.stages {
                println!(
                    "{}: {} ({} outputs, {} ms)",
                    stage.name,
                    match stage.status {
                        StageStatus::Ok => "ok",
                        StageStatus::Failed => "failed",
                        StageStatus::Skipped => "skipped",
                    },
                    stage.outputs.len(),
                    stage.duration_ms
                );
            }
            println!("manifest -> {}", report.manifest_path.display());
        }
    }
    Ok(())
}

fn parse_format(s: &str) -> Result<CorpusFormat, CliError> {
    match s {
        "json" => Ok(CorpusFormat::Json),
        "csv" => Ok(CorpusFormat::Csv),
        other => Err(CliError::Usage(format!(
            "unknown corpus format {other:?} (expected json or csv)"
        ))),
    }
}

fn parse_kind(s: &str) -> Result<ModelKind, CliError> {
    ModelKind::ALL
        .into_iter()
        .find(|k| k.slug() == s)
        .ok_or_else(|| {
            let known: Vec<&str> = ModelKind::ALL.iter().map(|k| k.slug()).collect();
            CliError::Usage(format!(
                "unknown dataset kind {s:?} (expected one of {})",
                known.join(", ")
            ))
        })
}

fn status_word(status: JobStatus) -> &'static str {
    match status {
        JobStatus::Pending => "pending",
        JobStatus::Running => "running",
        JobStatus::Succeeded => "succeeded",
        JobStatus::Failed => "failed",
    }
}

fn split_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Builds the spec for an explicit `--type`, requiring exactly the flags that
/// type needs.
fn spec_for_type(concept_type: u8, flags: &ProblemFlags) -> Result<ProblemSpec, CliError> {
    let applications = || -> Result<Vec<String>, CliError> {
        flags
            .applications
            .as_deref()
            .map(split_list)
            .filter(|v| !v.is_empty())
            .ok_or_else(|| CliError::Usage("--applications is required for this type".into()))
    };
    match concept_type {
        1 => Ok(ProblemSpec::Type1 {
            applications: applications()?,
        }),
        2 => {
            let benefits = flags
                .benefits
                .as_deref()
                .map(split_list)
                .filter(|v| !v.is_empty())
                .ok_or_else(|| CliError::Usage("--benefits is required for type 2".into()))?;
            Ok(ProblemSpec::Type2 {
                benefits,
                applications: applications()?,
            })
        }
        3 => {
            let challenge = flags
                .challenge
                .clone()
                .filter(|c| !c.trim().is_empty())
                .ok_or_else(|| CliError::Usage("--challenge is required for type 3".into()))?;
            Ok(ProblemSpec::Type3 { challenge })
        }
        other => Err(CliError::Usage(format!(
            "unknown problem type {other} (expected 1, 2, or 3)"
        ))),
    }
}

/// Builds every spec the given flags can express: applications alone make a
/// type-1 spec, benefits with applications a type-2 spec, and a challenge a
/// type-3 spec.
fn specs_from_flags(flags: &ProblemFlags) -> Result<Vec<ProblemSpec>, CliError> {
    let applications = flags
        .applications
        .as_deref()
        .map(split_list)
        .filter(|v| !v.is_empty());
    let benefits = flags
        .benefits
        .as_deref()
        .map(split_list)
        .filter(|v| !v.is_empty());
    let challenge = flags.challenge.clone().filter(|c| !c.trim().is_empty());

    let mut specs = Vec::new();
    if let Some(applications) = &applications {
        specs.push(ProblemSpec::Type1 {
            applications: applications.clone(),
        });
    }
    if let (Some(benefits), Some(applications)) = (&benefits, &applications) {
        specs.push(ProblemSpec::Type2 {
            benefits: benefits.clone(),
            applications: applications.clone(),
        });
    }
    if let Some(challenge) = challenge {
        specs.push(ProblemSpec::Type3 { challenge });
    }
    if specs.is_empty() {
        let reason = if benefits.is_some() {
            "--benefits needs --applications to form a type-2 spec"
        } else {
            "pass --applications, --benefits with --applications, and/or --challenge"
        };
        return Err(CliError::Usage(reason.into()));
    }
    Ok(specs)
}
