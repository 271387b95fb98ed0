//! Shared setup for the CLI integration suites: a temp workspace holding a
//! synthetic corpus, matching embeddings, and a config file pointing at both.

use std::path::Path;

use bidforge::corpus::{save_corpus, CorpusFormat};
use bidforge_cli::config::PipelineConfig;
use bidforge_testkit::{embeddings, fixtures};

pub const DIM: usize = 8;

/// Writes `corpus.json` (a `records`-record synthetic corpus), `vectors.txt`
/// (word2vec text embeddings covering every corpus token), and
/// `pipeline.conf` into `dir`, then loads the config. Output goes to
/// `dir/out`, the backend is the deterministic mock, and `extra` lines are
/// appended verbatim to the config.
pub fn workspace(dir: &Path, records: usize, seed: u64, extra: &str) -> PipelineConfig {
    let corpus = fixtures::fixture_corpus(records);
    save_corpus(&corpus, &dir.join("corpus.json"), CorpusFormat::Json).unwrap();

    let entries = embeddings::entries_for_corpus(&corpus, DIM);
    embeddings::write_word2vec_text(&dir.join("vectors.txt"), &entries, DIM);

    let config_path = dir.join("pipeline.conf");
    let text = format!(
        "corpus.path = corpus.json\n\
         embeddings.path = vectors.txt\n\
         backend.kind = mock\n\
         output.dir = out\n\
         seed = {seed}\n\
         {extra}"
    );
    std::fs::write(&config_path, text).unwrap();
    PipelineConfig::load(&config_path).unwrap()
}
