//! Seeded synthetic datasets with planted ground truth.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Normal deviates use the Box-Muller cosine branch on two 53-bit uniforms;
//! integer ranges are inclusive on both ends. Generation order is fixed:
//! commenter pool accounts first, then post by post (author, post,
//! first-level comments, replies), so a `(spec, seed)` pair always yields the
//! same bytes.

mod oracle;

pub use oracle::{oracle_recompute, OracleCluster, OraclePost, OracleResult, ORACLE_MAX_COMMENTS};

use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Account, Comment, InteractionDataset, Post};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("cannot read synth spec {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("oracle refuses datasets with {0} comments (limit {ORACLE_MAX_COMMENTS})")]
    TooLarge(usize),
    #[error("oracle: {0}")]
    Oracle(String),
}

/// Inclusive integer range, written `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange(pub u64, pub u64);

impl IntRange {
    fn sample(self, rng: &mut ChaCha8Rng) -> u64 {
        rng.random_range(self.0..=self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub mean: f64,
    pub std: f64,
    pub weight: f64,
}

fn default_label() -> String {
    "synthetic".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(default = "default_label")]
    pub platform: String,
    #[serde(default = "default_label")]
    pub topic: String,
    pub num_posts: usize,
    pub no_comment_fraction: f64,
    pub celebrity_fraction: f64,
    /// First-level comment count for a commented post; at least one.
    pub first_level_comments_per_post: IntRange,
    /// Expected replies per first-level comment (each comment slot spawns a
    /// reply with this probability).
    pub second_level_fraction: f64,
    pub emotion_mixture: Vec<MixtureComponent>,
    pub follower_range: IntRange,
    pub like_range: IntRange,
    pub repost_range: IntRange,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            platform: default_label(),
            topic: default_label(),
            num_posts: 20,
            no_comment_fraction: 0.3,
            celebrity_fraction: 0.2,
            first_level_comments_per_post: IntRange(1, 6),
            second_level_fraction: 0.5,
            emotion_mixture: vec![MixtureComponent {
                mean: 0.0,
                std: 0.4,
                weight: 1.0,
            }],
            follower_range: IntRange(0, 10_000),
            like_range: IntRange(0, 50),
            repost_range: IntRange(0, 20),
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        for (name, f) in [
            ("no_comment_fraction", self.no_comment_fraction),
            ("celebrity_fraction", self.celebrity_fraction),
            ("second_level_fraction", self.second_level_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} {f} outside [0, 1]"));
            }
        }
        if self.emotion_mixture.is_empty() {
            return bad("emotion_mixture is empty".into());
        }
        for c in &self.emotion_mixture {
            if !(c.mean.is_finite() && c.std.is_finite() && c.std >= 0.0 && c.weight >= 0.0) {
                return bad(format!("invalid mixture component {c:?}"));
            }
        }
        let total: f64 = self.emotion_mixture.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("mixture weights sum to {total}"));
        }
        for (name, r) in [
            ("first_level_comments_per_post", self.first_level_comments_per_post),
            ("follower_range", self.follower_range),
            ("like_range", self.like_range),
            ("repost_range", self.repost_range),
        ] {
            if r.0 > r.1 {
                return bad(format!("{name} [{}, {}] is empty", r.0, r.1));
            }
        }
        if self.first_level_comments_per_post.1 == 0 {
            return bad("first_level_comments_per_post must allow at least one comment".into());
        }
        Ok(())
    }

    /// Loads a spec from TOML, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self, SynthError> {
        let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
            path: path.to_owned(),
            source,
        })?;
        let spec: SynthSpec = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| SynthError::InvalidSpec(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| SynthError::InvalidSpec(e.to_string()))?
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Realized counts of one generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSummary {
    pub seed: u64,
    pub posts: usize,
    pub posts_without_comments: usize,
    pub celebrity_posts: usize,
    pub celebrity_cluster_posts: usize,
    pub first_level_comments: usize,
    pub second_level_comments: usize,
    /// Number of sentiment draws taken from each mixture component.
    pub component_draws: Vec<usize>,
    pub mean_comment_sentiment: Option<f64>,
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    mixture: &'a [MixtureComponent],
    draws: Vec<usize>,
}

impl Sampler<'_> {
    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    fn emotion(&mut self) -> f64 {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut pick = self.mixture.len() - 1;
        for (i, c) in self.mixture.iter().enumerate() {
            acc += c.weight;
            if u < acc {
                pick = i;
                break;
            }
        }
        self.draws[pick] += 1;
        let c = self.mixture[pick];
        let z = self.normal();
        (c.mean + c.std * z).clamp(-1.0, 1.0)
    }
}

pub fn generate(spec: &SynthSpec) -> Result<(InteractionDataset, TruthSummary), SynthError> {
    spec.validate()?;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        mixture: &spec.emotion_mixture,
        draws: vec![0; spec.emotion_mixture.len()],
    };
    let pool_size = spec.num_posts.max(1) * 2;
    let mut accounts: Vec<Account> = (0..pool_size)
        .map(|i| Account {
            id: format!("u{i:06}"),
            display_name: format!("user {i}"),
            follower_count: spec.follower_range.sample(&mut s.rng),
            is_celebrity: false,
        })
        .collect();
    let mut posts = Vec::with_capacity(spec.num_posts);
    let mut comments = Vec::new();
    let mut truth = TruthSummary {
        seed: spec.seed,
        posts: spec.num_posts,
        posts_without_comments: 0,
        celebrity_posts: 0,
        celebrity_cluster_posts: 0,
        first_level_comments: 0,
        second_level_comments: 0,
        component_draws: Vec::new(),
        mean_comment_sentiment: None,
    };
    let mut sentiment_sum = 0.0;

    for i in 0..spec.num_posts {
        let author = format!("a{i:06}");
        let is_celebrity = s.uniform() < spec.celebrity_fraction;
        accounts.push(Account {
            id: author.clone(),
            display_name: format!("author {i}"),
            follower_count: spec.follower_range.sample(&mut s.rng),
            is_celebrity,
        });
        let post_id = format!("p{i:06}");
        posts.push(Post {
            id: post_id.clone(),
            author,
            topic: spec.topic.clone(),
            platform: spec.platform.clone(),
            text: format!("post {i}"),
            like_count: spec.like_range.sample(&mut s.rng),
            repost_count: spec.repost_range.sample(&mut s.rng),
            timestamp: None,
            sentiment: Some(s.emotion()),
        });
        truth.celebrity_posts += usize::from(is_celebrity);

        let commented = s.uniform() >= spec.no_comment_fraction;
        if !commented {
            truth.posts_without_comments += 1;
            continue;
        }
        truth.celebrity_cluster_posts += usize::from(is_celebrity);
        let range = spec.first_level_comments_per_post;
        let n1 = IntRange(range.0.max(1), range.1).sample(&mut s.rng) as usize;
        let first = comments.len();
        for _ in 0..n1 {
            let id = format!("c{:08}", comments.len());
            let sentiment = s.emotion();
            sentiment_sum += sentiment;
            comments.push(Comment {
                id,
                parent_post: post_id.clone(),
                parent_comment: None,
                author: format!("u{:06}", s.rng.random_range(0..pool_size)),
                text: String::new(),
                like_count: spec.like_range.sample(&mut s.rng),
                sentiment: Some(sentiment),
            });
        }
        truth.first_level_comments += n1;
        for _ in 0..n1 {
            if s.uniform() >= spec.second_level_fraction {
                continue;
            }
            let parent = comments[first + s.rng.random_range(0..n1)].id.clone();
            let id = format!("c{:08}", comments.len());
            let sentiment = s.emotion();
            sentiment_sum += sentiment;
            comments.push(Comment {
                id,
                parent_post: post_id.clone(),
                parent_comment: Some(parent),
                author: format!("u{:06}", s.rng.random_range(0..pool_size)),
                text: String::new(),
                like_count: spec.like_range.sample(&mut s.rng),
                sentiment: Some(sentiment),
            });
            truth.second_level_comments += 1;
        }
    }

    if !comments.is_empty() {
        truth.mean_comment_sentiment = Some(sentiment_sum / comments.len() as f64);
    }
    truth.component_draws = s.draws;
    let dataset = InteractionDataset::from_parts(spec.platform.clone(), spec.topic.clone(), accounts, posts, comments)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    Ok((dataset, truth))
}
