//! Manual check: broad problem specs should yield more diverse concepts.
//!
//! Generates concepts for a deliberately open spec (type 1: applications
//! only) and a deliberately narrow one (type 3: a full challenge statement),
//! measures each concept's word mover's distance to every corpus original,
//! and compares the medians. With capable generator models the open spec is
//! expected to wander farther from the corpus, i.e.
//!
//! ```text
//! median distance (type 1) > median distance (type 3)
//! ```
//!
//! This is a qualitative expectation about real models, not a law: the
//! deterministic mock backend, which copies corpus records verbatim, will not
//! reproduce it. Run it against a remote backend and real embeddings:
//!
//! ```text
//! export BIDFORGE_API_KEY=...
//! cargo run -p bidforge-cli --example qualitative_ordering -- \
//!     --config remote.conf --n 20
//! ```
//!
//! Exits 0 when the ordering holds, 1 when it does not, 2 on errors.

use std::path::PathBuf;
use std::process::ExitCode;

use bidforge::concept::{generate_concepts, GenerationParams};
use bidforge::diversity::{summary_stats, to_nbow, wmd_matrix, EmbeddingStore, NBowDocument};
use bidforge::ProblemSpec;
use bidforge_cli::config::PipelineConfig;
use clap::Parser;

#[derive(Parser)]
#[command(about = "Compare concept diversity across problem-spec specificity")]
struct Args {
    /// Pipeline config; should name a remote backend and real embeddings.
    #[arg(long)]
    config: PathBuf,
    /// Concepts to generate per spec.
    #[arg(long, default_value_t = 20)]
    n: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(holds) => {
            if holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<bool, String> {
    let config = PipelineConfig::load(&args.config).map_err(|e| e.single_line())?;
    let corpus = config.load_corpus().map_err(|e| e.single_line())?;
    let backend = config.build_backend().map_err(|e| e.single_line())?;
    let store = EmbeddingStore::load(
        config.require_embeddings().map_err(|e| e.single_line())?,
        config.embeddings_format,
    )
    .map_err(|e| e.to_string())?;
    let stopwords = config.load_stopwords().map_err(|e| e.single_line())?;

    let originals: Vec<NBowDocument> = corpus
        .records
        .iter()
        .filter_map(|r| to_nbow(&r.innovation, &store, &stopwords).ok())
        .collect();
    if originals.is_empty() {
        return Err("no corpus innovation text survives embedding lookup".into());
    }

    let cases: [(&str, ProblemSpec); 2] = [
        (
            "type 1 (applications only)",
            ProblemSpec::Type1 {
                applications: vec!["Flying car".into()],
            },
        ),
        (
            "type 3 (challenge statement)",
            ProblemSpec::Type3 {
                challenge: "Lightweight design is a challenge for flying cars.".into(),
            },
        ),
    ];

    let mut medians = Vec::new();
    for (label, spec) in &cases {
        let model = config
            .generator_model(spec.concept_type())
            .map_err(|e| e.single_line())?
            .to_string();
        let params = GenerationParams {
            model,
            temperature: config.generation.temperature,
            max_tokens: config.generation.max_tokens,
            budget: config.generation.budget,
            created_at: 0,
            id_prefix: None,
        };
        let outcome = generate_concepts(spec, args.n, backend.as_ref(), &params)
            .map_err(|e| format!("{label}: {e}"))?;

        let mut skipped = 0usize;
        let docs: Vec<NBowDocument> = outcome
            .concepts
            .iter()
            .filter_map(|c| match to_nbow(&c.innovation, &store, &stopwords) {
                Ok(doc) => Some(doc),
                Err(_) => {
                    skipped += 1;
                    None
                }
            })
            .collect();
        if docs.is_empty() {
            return Err(format!("{label}: every concept was out of vocabulary"));
        }

        let matrix = wmd_matrix(&docs, &originals, &store).map_err(|e| e.to_string())?;
        let distances: Vec<f64> = matrix.into_iter().flatten().collect();
        let stats = summary_stats(&distances).expect("non-empty distance set");
        println!(
            "{label}: {} concepts ({skipped} skipped), {} distances; \
             median {:.4} (q1 {:.4}, q3 {:.4})",
            docs.len(),
            distances.len(),
            stats.median,
            stats.q1,
            stats.q3
        );
        medians.push(stats.median);
    }

    let holds = medians[0] > medians[1];
    if holds {
        println!("ordering holds: broad specs produced more distant concepts");
    } else {
        println!(
            "ordering violated: type-1 median {:.4} <= type-3 median {:.4}",
            medians[0], medians[1]
        );
    }
    Ok(holds)
}
