//! Latent relational analysis (LRA).
//!
//! Measures the relational similarity between two word pairs. The pipeline
//! mines the corpus phrases that join each pair, generalizes their
//! intervening words into wildcard patterns, builds a log-entropy weighted
//! pair-by-pattern matrix, smooths it with a truncated SVD and compares pairs
//! by averaging cosines over thesaurus-generated reformulations.
//!
//! The crate is organized bottom-up:
//!
//! - [`corpus`]: tokenizer, Porter stemmer and positional phrase index
//! - [`thesaurus`]: ranked synonym lists used to reformulate pairs
//! - [`pairspace`]: alternate pair generation and frequency filtering
//! - [`patterns`]: phrase harvesting and wildcard pattern mining
//! - [`matrix`]: sparse pair × pattern matrix and log-entropy weighting
//! - [`decomposition`]: Lanczos truncated SVD and the projected row space
//! - [`similarity`]: cosine and relational similarity over pair versions
//! - [`vsm`]: the joining-term vector space baseline
//! - [`evaluation`]: analogy question scoring and LOOCV nearest neighbour
//! - [`pipeline`]: end-to-end orchestration, artifacts and run manifest

pub mod config;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod pairspace;
pub mod patterns;
pub mod pipeline;
pub mod similarity;
pub mod sparse;
pub mod thesaurus;
pub mod vsm;

pub use config::LraConfig;
pub use corpus::Corpus;
pub use error::{Error, Result};
pub use pairspace::{PairVersions, PartOfSpeech, WordPair};
pub use pipeline::{run_pipeline, LraModel, PipelineOutput, RunManifest};
pub use similarity::{cosine, relational_similarity, SimilarityResult};
pub use thesaurus::Thesaurus;
