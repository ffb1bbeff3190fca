//! Group emotion quantification for social media posts.
//!
//! Datasets of posts and two levels of comments are ingested from JSONL
//! ([`corpus`]), scored for sentiment ([`sentiment`]), turned into macro and
//! micro clusters with density, trust and emotion values ([`chain`]), and
//! summarized with polarity, skewness, correlation and platform-mechanism
//! analytics ([`dynamics`]). [`reporting`] drives the pipeline and writes
//! table and plot-data bundles; [`synth`] generates seeded test datasets and
//! holds a brute-force oracle for the chain math.

pub mod chain;
pub mod config;
pub mod corpus;
pub mod dynamics;
pub mod reporting;
pub mod sentiment;
pub mod synth;

pub use chain::{ChainConfig, ClusterEmotion, PostGroupEmotion, TopicEmotion, TrustWeights};
pub use config::RunConfig;
pub use corpus::{ingest_dataset, preprocess, InteractionDataset, PlatformProfile};
pub use reporting::{run_pipeline, TopicReport};
pub use sentiment::{resolve_sentiments, score_text, Lexicon};
