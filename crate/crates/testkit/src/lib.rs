//! Test support for the workspace.
//!
//! Everything here exists to check the production crates from the outside:
//!
//! * [`oracle`] — an independent dense-simplex reference solver for the
//!   transportation LP, implemented before and apart from the production
//!   network-simplex solver so the two can be compared on small instances.
//! * [`fixtures`] — deterministic synthetic corpora at the sizes the
//!   integration suites need (fully-populated records, a desk-scale corpus,
//!   and a 36-record robotics pool with three designated seed samples).
//! * [`embeddings`] — synthetic, hash-derived word vectors plus writers for
//!   both word2vec file encodings.
//!
//! Nothing in this crate is used by production code.

pub mod embeddings;
pub mod fixtures;
pub mod oracle;
