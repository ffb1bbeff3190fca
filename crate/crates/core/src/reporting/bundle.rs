//! End-to-end pipeline and the output bundle on disk.
//!
//! A bundle directory holds:
//!
//! | file | content |
//! |------|---------|
//! | `topic_emotions.csv` / `.txt` | group emotion per topic and platform, `Average` row |
//! | `polarity.csv` | positive / negative post counts and shares |
//! | `skewness.csv` | skewness per topic and platform, `MAV` row |
//! | `indicators.csv` | no-comment and celebrity shares |
//! | `clusters_<topic>_<platform>.csv` | rank vs. normalized size plot data |
//! | `results.json` | every value at full precision |
//! | `manifest.json` | digests, tool version and timestamp |

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{
    build_topic_report, column_mean, emotion_table, format_value, indicator_table, polarity_table, skewness_table,
    slug, Table, TopicReport,
};
use crate::chain::ChainError;
use crate::config::{ConfigError, RunConfig};
use crate::corpus::{ingest_dataset, preprocess, CorpusError, PlatformProfile};
use crate::dynamics::{compute_pearson, correlate_demographics, CorrelationResult, DemographicBucket, DynamicsError};
use crate::sentiment::{resolve_sentiments, Lexicon, SentimentError};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Sentiment,
    Chain,
    Dynamics,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Sentiment => "sentiment",
            Stage::Chain => "chain",
            Stage::Dynamics => "dynamics",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[config] {0}")]
    Config(#[from] ConfigError),
    #[error("[ingest] {0}")]
    Ingest(#[from] CorpusError),
    #[error("[ingest] {path}: topic {topic:?} on platform {platform:?} appears in more than one input")]
    DuplicateScope {
        path: PathBuf,
        topic: String,
        platform: String,
    },
    #[error("[sentiment] {path}: {source}")]
    Sentiment {
        path: PathBuf,
        #[source]
        source: SentimentError,
    },
    #[error("[chain] {path}: {source}")]
    Chain {
        path: PathBuf,
        #[source]
        source: ChainError,
    },
    #[error("[dynamics] {0}")]
    Dynamics(String),
    #[error("[output] {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl From<DynamicsError> for PipelineError {
    fn from(e: DynamicsError) -> Self {
        PipelineError::Dynamics(e.to_string())
    }
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Config(_) => Stage::Config,
            PipelineError::Ingest(_) | PipelineError::DuplicateScope { .. } => Stage::Ingest,
            PipelineError::Sentiment { .. } => Stage::Sentiment,
            PipelineError::Chain { .. } => Stage::Chain,
            PipelineError::Dynamics(_) => Stage::Dynamics,
            PipelineError::Output { .. } => Stage::Output,
        }
    }
}

pub struct PipelineOptions {
    pub inputs: Vec<PathBuf>,
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub lexicon: Option<Lexicon>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_sha256: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<InputDigest>,
    pub timestamp: String,
}

/// Contents of `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleResults {
    pub tool_version: String,
    pub config: RunConfig,
    pub topics: Vec<TopicReport>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Ingests, cleans, scores and analyzes each input file in order.
pub fn compute_reports(
    inputs: &[PathBuf],
    config: &RunConfig,
    lexicon: Option<&Lexicon>,
) -> Result<Vec<TopicReport>, PipelineError> {
    let mut scopes = BTreeSet::new();
    let mut reports = Vec::with_capacity(inputs.len());
    for path in inputs {
        let (dataset, ingest) = ingest_dataset(path)?;
        if ingest.skipped() > 0 {
            log::warn!("{}: skipped {} records", path.display(), ingest.skipped());
        }
        if !scopes.insert((dataset.topic().to_owned(), dataset.platform().to_owned())) {
            return Err(PipelineError::DuplicateScope {
                path: path.clone(),
                topic: dataset.topic().to_owned(),
                platform: dataset.platform().to_owned(),
            });
        }
        let keywords = config.keywords_for(dataset.topic()).map(<[String]>::to_vec);
        let (dataset, cleaned) = preprocess(dataset, keywords.as_deref());
        let dataset = resolve_sentiments(dataset, lexicon).map_err(|source| PipelineError::Sentiment {
            path: path.clone(),
            source,
        })?;
        let mut report = build_topic_report(&dataset, config).map_err(|source| PipelineError::Chain {
            path: path.clone(),
            source,
        })?;
        report.ingest = Some(ingest);
        report.preprocess = Some(cleaned);
        reports.push(report);
    }
    Ok(reports)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], outputs: &mut Vec<InputDigest>) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| PipelineError::Output { path, source })?;
    outputs.push(InputDigest {
        path: name.to_owned(),
        sha256: sha256_hex(bytes),
    });
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable results");
    bytes.push(b'\n');
    bytes
}

/// Runs the full pipeline and writes the bundle. Output is a deterministic
/// function of the inputs and config apart from the manifest timestamp.
pub fn run_pipeline(options: &PipelineOptions) -> Result<Manifest, PipelineError> {
    let config_bytes = fs::read(&options.config).map_err(|source| ConfigError::Io {
        path: options.config.clone(),
        source,
    })?;
    let config_text = String::from_utf8_lossy(&config_bytes);
    let config = RunConfig::from_toml_str(&config_text)?;

    let mut inputs = Vec::new();
    for path in &options.inputs {
        let bytes = fs::read(path).map_err(|source| CorpusError::Unreadable {
            path: path.clone(),
            source,
        })?;
        inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
    }

    let reports = compute_reports(&options.inputs, &config, options.lexicon.as_ref())?;

    let dir = &options.out_dir;
    fs::create_dir_all(dir).map_err(|source| PipelineError::Output {
        path: dir.clone(),
        source,
    })?;
    let mut outputs = Vec::new();
    let emotions = emotion_table(&reports);
    write_file(dir, "topic_emotions.csv", emotions.to_csv().as_bytes(), &mut outputs)?;
    write_file(dir, "topic_emotions.txt", emotions.to_text().as_bytes(), &mut outputs)?;
    write_file(
        dir,
        "polarity.csv",
        polarity_table(&reports).to_csv().as_bytes(),
        &mut outputs,
    )?;
    write_file(
        dir,
        "skewness.csv",
        skewness_table(&reports).to_csv().as_bytes(),
        &mut outputs,
    )?;
    write_file(
        dir,
        "indicators.csv",
        indicator_table(&reports).to_csv().as_bytes(),
        &mut outputs,
    )?;
    for report in &reports {
        let name = format!("clusters_{}_{}.csv", slug(&report.topic), slug(&report.platform));
        write_file(
            dir,
            &name,
            super::export_cluster_plot_data(report).as_bytes(),
            &mut outputs,
        )?;
    }
    let results = BundleResults {
        tool_version: TOOL_VERSION.to_owned(),
        config,
        topics: reports,
    };
    write_file(dir, "results.json", &json_bytes(&results), &mut outputs)?;

    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_owned(),
        config_sha256: sha256_hex(&config_bytes),
        inputs,
        outputs,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let path = dir.join("manifest.json");
    fs::write(&path, json_bytes(&manifest)).map_err(|source| PipelineError::Output { path, source })?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSummary {
    pub platform: String,
    pub average_emotion: Option<f64>,
    pub mean_absolute_skewness: Option<f64>,
    pub no_comment_share: Option<f64>,
    pub celebrity_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPlatformReport {
    pub platforms: Vec<PlatformSummary>,
    pub correlations: Vec<CorrelationResult>,
}

impl CrossPlatformReport {
    pub fn platform_table(&self) -> Table {
        Table {
            header: [
                "platform",
                "average_emotion",
                "mean_absolute_skewness",
                "no_comment_share",
                "celebrity_share",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            rows: self
                .platforms
                .iter()
                .map(|p| {
                    vec![
                        p.platform.clone(),
                        format_value(p.average_emotion),
                        format_value(p.mean_absolute_skewness),
                        format_value(p.no_comment_share),
                        format_value(p.celebrity_share),
                    ]
                })
                .collect(),
        }
    }

    pub fn correlation_table(&self) -> Table {
        Table {
            header: ["x", "y", "n", "r"].iter().map(|s| s.to_string()).collect(),
            rows: self
                .correlations
                .iter()
                .map(|c| vec![c.x_name.clone(), c.y_name.clone(), c.n.to_string(), format_value(c.r)])
                .collect(),
        }
    }
}

/// Cross-platform analytics over a computed bundle: per-platform averages
/// and Pearson correlations of demographics with group emotion and of the
/// mechanism indicators with polarization.
pub fn cross_platform(results: &BundleResults) -> Result<CrossPlatformReport, PipelineError> {
    let mut names: Vec<&str> = Vec::new();
    for t in &results.topics {
        if !names.contains(&t.platform.as_str()) {
            names.push(&t.platform);
        }
    }
    let platforms: Vec<PlatformSummary> = names
        .iter()
        .map(|&name| {
            let topics: Vec<&TopicReport> = results.topics.iter().filter(|t| t.platform == name).collect();
            let col = |f: fn(&TopicReport) -> Option<f64>| topics.iter().map(|t| f(t)).collect::<Vec<_>>();
            let skews: Vec<f64> = topics
                .iter()
                .filter_map(|t| t.skewness.coefficient)
                .map(f64::abs)
                .collect();
            PlatformSummary {
                platform: name.to_owned(),
                average_emotion: column_mean(&col(|t| t.group_emotion)),
                mean_absolute_skewness: (!skews.is_empty()).then(|| skews.iter().sum::<f64>() / skews.len() as f64),
                no_comment_share: column_mean(&col(|t| t.indicators.no_comment_share)),
                celebrity_share: column_mean(&col(|t| t.indicators.celebrity_share)),
            }
        })
        .collect();

    let mut correlations = Vec::new();
    let with_profiles: Vec<(&PlatformProfile, f64)> = platforms
        .iter()
        .filter_map(|p| Some((results.config.profiles.get(&p.platform)?, p.average_emotion?)))
        .collect();
    if with_profiles.len() >= 2 {
        let profiles: Vec<PlatformProfile> = with_profiles.iter().map(|(p, _)| (*p).clone()).collect();
        let emotions: Vec<f64> = with_profiles.iter().map(|(_, e)| *e).collect();
        for bucket in DemographicBucket::ALL {
            correlations.push(correlate_demographics(&profiles, &emotions, bucket)?);
        }
    }
    type Getter = fn(&PlatformSummary) -> Option<f64>;
    let indicator_pairs: [(&str, Getter); 2] = [
        ("no_comment_share", |p| p.no_comment_share),
        ("celebrity_share", |p| p.celebrity_share),
    ];
    for (name, get) in indicator_pairs {
        let (xs, ys): (Vec<f64>, Vec<f64>) = platforms
            .iter()
            .filter_map(|p| Some((get(p)?, p.mean_absolute_skewness?)))
            .unzip();
        correlations.push(compute_pearson(&xs, &ys)?.named(name, "mean_absolute_skewness"));
    }
    Ok(CrossPlatformReport {
        platforms,
        correlations,
    })
}

/// Reads `results.json` from a bundle, writes `platforms.csv` and
/// `correlations.csv` next to it and returns the report.
pub fn analyze_bundle(dir: &Path) -> Result<CrossPlatformReport, PipelineError> {
    let path = dir.join("results.json");
    let text = fs::read_to_string(&path).map_err(|source| PipelineError::Output {
        path: path.clone(),
        source,
    })?;
    let results: BundleResults =
        serde_json::from_str(&text).map_err(|e| PipelineError::Dynamics(format!("{}: {e}", path.display())))?;
    let report = cross_platform(&results)?;
    let mut outputs = Vec::new();
    write_file(
        dir,
        "platforms.csv",
        report.platform_table().to_csv().as_bytes(),
        &mut outputs,
    )?;
    write_file(
        dir,
        "correlations.csv",
        report.correlation_table().to_csv().as_bytes(),
        &mut outputs,
    )?;
    Ok(report)
}
