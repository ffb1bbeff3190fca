//! Two-level emotion communication chains.
//!
//! A post and its first-level comments form a macro cluster; a first-level
//! comment and its replies form a micro cluster. Each cluster gets a value
//! `D * T * E`:
//!
//! * `D` density, the cluster in-degree (feedback count plus root likes)
//!   divided by the largest in-degree in scope. Macro clusters are scoped to
//!   the whole topic-platform dataset, micro clusters to their sibling micro
//!   clusters under the same post.
//! * `T` trust, a convex combination of cohesion `1 - std(E)`, authority
//!   (the same after dropping outlier emotions) and the root author's
//!   normalized follower and repost counts.
//! * `E` the mean sentiment of the member comments.
//!
//! A post's group emotion mixes its macro value with the density-weighted
//! mean of its micro values; a topic's is the mean over posts.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Comment, InteractionDataset, Post};

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("cluster has no member emotions")]
    EmptyEmotions,
    #[error("in-degree {ind} is not within [1, {max}]")]
    InvalidDensity { ind: u64, max: u64 },
    #[error("trust weights must be non-negative and sum to 1, got {0:?}")]
    InvalidWeights(TrustWeights),
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("{kind} {id} has no resolved sentiment")]
    UnresolvedSentiment { kind: &'static str, id: String },
    #[error("{kind} {id} references a record missing from the dataset")]
    Dangling { kind: &'static str, id: String },
}

pub type Result<T, E = ChainError> = std::result::Result<T, E>;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Weights of cohesion, authority, follower influence and repost influence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustWeights {
    pub a1: f64,
    pub a2: f64,
    pub a3_fan: f64,
    pub a3_repost: f64,
}

impl Default for TrustWeights {
    /// Follower weight is kept low since follower counts can be inflated.
    fn default() -> Self {
        Self {
            a1: 0.35,
            a2: 0.35,
            a3_fan: 0.05,
            a3_repost: 0.25,
        }
    }
}

impl TrustWeights {
    pub fn new(a1: f64, a2: f64, a3_fan: f64, a3_repost: f64) -> Result<Self> {
        let w = Self {
            a1,
            a2,
            a3_fan,
            a3_repost,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.a1, self.a2, self.a3_fan, self.a3_repost];
        let sum: f64 = parts.iter().sum();
        if parts.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(ChainError::InvalidWeights(*self));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub trust_weights: TrustWeights,
    /// Share of the macro value in a post's group emotion.
    pub macro_weight: f64,
    /// Emotions at least this many population standard deviations from the
    /// cluster mean are left out of the authority component.
    pub outlier_k: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            trust_weights: TrustWeights::default(),
            macro_weight: 0.6,
            outlier_k: 2.0,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        self.trust_weights.validate()?;
        if !(0.0..=1.0).contains(&self.macro_weight) {
            return Err(ChainError::InvalidConfig(format!(
                "macro_weight {} outside [0, 1]",
                self.macro_weight
            )));
        }
        if !(self.outlier_k > 0.0 && self.outlier_k.is_finite()) {
            return Err(ChainError::InvalidConfig(format!(
                "outlier_k {} must be positive",
                self.outlier_k
            )));
        }
        Ok(())
    }
}

/// Shared view of macro and micro clusters for the emotion computation.
pub trait ChainCluster {
    fn root_id(&self) -> &str;
    fn ind(&self) -> u64;
    fn member_emotions(&self) -> Vec<f64>;
    fn root_followers(&self) -> u64;
    fn root_reposts(&self) -> u64;
}

#[derive(Debug, Clone)]
pub struct MacroCluster<'a> {
    pub post: &'a Post,
    pub members: Vec<&'a Comment>,
    /// First-level comment count plus post likes.
    pub ind: u64,
    pub author_followers: u64,
}

#[derive(Debug, Clone)]
pub struct MicroCluster<'a> {
    pub root: &'a Comment,
    pub members: Vec<&'a Comment>,
    /// Reply count plus root comment likes.
    pub ind: u64,
    pub author_followers: u64,
}

fn sentiments(members: &[&Comment]) -> Vec<f64> {
    members.iter().map(|c| c.sentiment.unwrap_or_default()).collect()
}

impl ChainCluster for MacroCluster<'_> {
    fn root_id(&self) -> &str {
        &self.post.id
    }
    fn ind(&self) -> u64 {
        self.ind
    }
    fn member_emotions(&self) -> Vec<f64> {
        sentiments(&self.members)
    }
    fn root_followers(&self) -> u64 {
        self.author_followers
    }
    fn root_reposts(&self) -> u64 {
        self.post.repost_count
    }
}

impl ChainCluster for MicroCluster<'_> {
    fn root_id(&self) -> &str {
        &self.root.id
    }
    fn ind(&self) -> u64 {
        self.ind
    }
    fn member_emotions(&self) -> Vec<f64> {
        sentiments(&self.members)
    }
    fn root_followers(&self) -> u64 {
        self.author_followers
    }
    /// Comments carry no repost counts.
    fn root_reposts(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Default)]
pub struct Clusters<'a> {
    /// Ascending by post id.
    pub macros: Vec<MacroCluster<'a>>,
    /// Keyed by post id, each list ascending by root comment id.
    pub micros: BTreeMap<&'a str, Vec<MicroCluster<'a>>>,
}

/// Builds one macro cluster per post with first-level comments and one micro
/// cluster per first-level comment with replies.
pub fn build_clusters(dataset: &InteractionDataset) -> Result<Clusters<'_>> {
    let mut first_level: HashMap<&str, Vec<&Comment>> = HashMap::new();
    let mut replies: HashMap<&str, Vec<&Comment>> = HashMap::new();
    for c in dataset.comments() {
        if c.sentiment.is_none() {
            return Err(ChainError::UnresolvedSentiment {
                kind: "comment",
                id: c.id.clone(),
            });
        }
        match &c.parent_comment {
            None => first_level.entry(&c.parent_post).or_default().push(c),
            Some(parent) => replies.entry(parent).or_default().push(c),
        }
    }
    let followers = |kind, id: &str, author: &str| {
        dataset
            .account(author)
            .map(|a| a.follower_count)
            .ok_or_else(|| ChainError::Dangling {
                kind,
                id: id.to_owned(),
            })
    };

    let mut clusters = Clusters::default();
    for post in dataset.posts() {
        let Some(members) = first_level.remove(post.id.as_str()) else {
            continue;
        };
        let mut micros = Vec::new();
        for root in &members {
            if let Some(children) = replies.remove(root.id.as_str()) {
                micros.push(MicroCluster {
                    root,
                    ind: children.len() as u64 + root.like_count,
                    members: children,
                    author_followers: followers("comment", &root.id, &root.author)?,
                });
            }
        }
        micros.sort_by(|a, b| a.root.id.cmp(&b.root.id));
        if !micros.is_empty() {
            clusters.micros.insert(post.id.as_str(), micros);
        }
        clusters.macros.push(MacroCluster {
            post,
            ind: members.len() as u64 + post.like_count,
            members,
            author_followers: followers("post", &post.id, &post.author)?,
        });
    }
    clusters.macros.sort_by(|a, b| a.post.id.cmp(&b.post.id));
    Ok(clusters)
}

pub fn compute_density(cluster_ind: u64, max_ind_in_scope: u64) -> Result<f64> {
    if cluster_ind < 1 || max_ind_in_scope < cluster_ind {
        return Err(ChainError::InvalidDensity {
            ind: cluster_ind,
            max: max_ind_in_scope,
        });
    }
    Ok(cluster_ind as f64 / max_ind_in_scope as f64)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn population_std(values: &[f64]) -> f64 {
    let mu = mean(values);
    let var = values.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / values.len() as f64;
    var.sqrt()
}

pub fn compute_cohesion(emotions: &[f64]) -> Result<f64> {
    if emotions.is_empty() {
        return Err(ChainError::EmptyEmotions);
    }
    Ok((1.0 - population_std(emotions)).clamp(0.0, 1.0))
}

pub fn compute_authority(emotions: &[f64], outlier_k: f64) -> Result<f64> {
    if emotions.is_empty() {
        return Err(ChainError::EmptyEmotions);
    }
    let mu = mean(emotions);
    let sigma = population_std(emotions);
    let threshold = outlier_k * sigma;
    let kept: Vec<f64> = emotions
        .iter()
        .copied()
        .filter(|e| sigma == 0.0 || (e - mu).abs() < threshold)
        .collect();
    if kept.len() < 2 {
        return Ok(1.0);
    }
    Ok((1.0 - population_std(&kept)).clamp(0.0, 1.0))
}

/// Follower and repost influence, each normalized by its scope maximum.
pub fn compute_influence(
    follower_count: u64,
    repost_count: u64,
    max_followers_in_scope: u64,
    max_reposts_in_scope: u64,
) -> (f64, f64) {
    debug_assert!(follower_count <= max_followers_in_scope || max_followers_in_scope == 0);
    debug_assert!(repost_count <= max_reposts_in_scope || max_reposts_in_scope == 0);
    let fan = follower_count as f64 / max_followers_in_scope.max(1) as f64;
    let repost = repost_count as f64 / max_reposts_in_scope.max(1) as f64;
    (fan.min(1.0), repost.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustComponents {
    pub t1: f64,
    pub t2: f64,
    pub t3_fan: f64,
    pub t3_repost: f64,
}

pub fn compute_trust(c: TrustComponents, weights: &TrustWeights) -> Result<f64> {
    weights.validate()?;
    let t = weights.a1 * c.t1 + weights.a2 * c.t2 + weights.a3_fan * c.t3_fan + weights.a3_repost * c.t3_repost;
    Ok(t.clamp(0.0, 1.0))
}

pub fn compute_mean_emotion(emotions: &[f64]) -> Result<f64> {
    if emotions.is_empty() {
        return Err(ChainError::EmptyEmotions);
    }
    Ok(mean(emotions).clamp(-1.0, 1.0))
}

/// Maxima a cluster is normalized against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeMaxima {
    pub max_ind: u64,
    pub max_followers: u64,
    pub max_reposts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEmotion {
    /// Post id for macro clusters, root comment id for micro clusters.
    pub root_id: String,
    pub ind: u64,
    pub member_count: usize,
    pub density: f64,
    pub trust: f64,
    pub mean_emotion: f64,
    pub value: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3_fan: f64,
    pub t3_repost: f64,
}

pub fn compute_cluster_emotion(
    cluster: &impl ChainCluster,
    maxima: &ScopeMaxima,
    config: &ChainConfig,
) -> Result<ClusterEmotion> {
    let emotions = cluster.member_emotions();
    let density = compute_density(cluster.ind(), maxima.max_ind)?;
    let t1 = compute_cohesion(&emotions)?;
    let t2 = compute_authority(&emotions, config.outlier_k)?;
    let (t3_fan, t3_repost) = compute_influence(
        cluster.root_followers(),
        cluster.root_reposts(),
        maxima.max_followers,
        maxima.max_reposts,
    );
    let trust = compute_trust(
        TrustComponents {
            t1,
            t2,
            t3_fan,
            t3_repost,
        },
        &config.trust_weights,
    )?;
    let mean_emotion = compute_mean_emotion(&emotions)?;
    Ok(ClusterEmotion {
        root_id: cluster.root_id().to_owned(),
        ind: cluster.ind(),
        member_count: emotions.len(),
        density,
        trust,
        mean_emotion,
        value: density * trust * mean_emotion,
        t1,
        t2,
        t3_fan,
        t3_repost,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostGroupEmotion {
    pub post_id: String,
    #[serde(rename = "macro")]
    pub macro_cluster: ClusterEmotion,
    pub micros: Vec<ClusterEmotion>,
    pub value: f64,
}

pub fn aggregate_post_emotion(
    macro_cluster: ClusterEmotion,
    micros: Vec<ClusterEmotion>,
    config: &ChainConfig,
) -> PostGroupEmotion {
    let value = if micros.is_empty() {
        macro_cluster.value
    } else {
        let weight: f64 = micros.iter().map(|m| m.density).sum();
        let weighted: f64 = micros.iter().map(|m| m.density * m.value).sum();
        config.macro_weight * macro_cluster.value + (1.0 - config.macro_weight) * (weighted / weight)
    };
    PostGroupEmotion {
        post_id: macro_cluster.root_id.clone(),
        macro_cluster,
        micros,
        value: value.clamp(-1.0, 1.0),
    }
}

/// Mean post value, summed in the given order; `None` when no post formed
/// a cluster.
pub fn aggregate_topic_emotion(posts: &[PostGroupEmotion]) -> Option<f64> {
    if posts.is_empty() {
        return None;
    }
    Some(posts.iter().map(|p| p.value).sum::<f64>() / posts.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicEmotion {
    pub platform: String,
    pub topic: String,
    /// Ascending by post id.
    pub posts: Vec<PostGroupEmotion>,
    pub value: Option<f64>,
}

/// Runs the whole chain over a dataset with resolved sentiments.
pub fn compute_topic_emotion(dataset: &InteractionDataset, config: &ChainConfig) -> Result<TopicEmotion> {
    config.validate()?;
    let clusters = build_clusters(dataset)?;
    let max_followers = dataset.accounts().iter().map(|a| a.follower_count).max().unwrap_or(0);
    let max_reposts = dataset.posts().iter().map(|p| p.repost_count).max().unwrap_or(0);
    let max_macro_ind = clusters.macros.iter().map(|m| m.ind).max().unwrap_or(0);
    let macro_scope = ScopeMaxima {
        max_ind: max_macro_ind,
        max_followers,
        max_reposts,
    };

    let mut posts = Vec::with_capacity(clusters.macros.len());
    for m in &clusters.macros {
        let macro_emotion = compute_cluster_emotion(m, &macro_scope, config)?;
        let siblings = clusters
            .micros
            .get(m.post.id.as_str())
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let micro_scope = ScopeMaxima {
            max_ind: siblings.iter().map(|s| s.ind).max().unwrap_or(0),
            ..macro_scope
        };
        let micros = siblings
            .iter()
            .map(|s| compute_cluster_emotion(s, &micro_scope, config))
            .collect::<Result<Vec<_>>>()?;
        posts.push(aggregate_post_emotion(macro_emotion, micros, config));
    }
    let value = aggregate_topic_emotion(&posts);
    Ok(TopicEmotion {
        platform: dataset.platform().to_owned(),
        topic: dataset.topic().to_owned(),
        posts,
        value,
    })
}
