//! Brute-force recomputation of post and topic group emotion.
//!
//! Deliberately naive: every lookup is a linear scan and every formula is
//! spelled out inline. Nothing here calls into the chain module.

#![allow(clippy::manual_clamp)]

use crate::chain::ChainConfig;
use crate::corpus::{Comment, InteractionDataset};

use super::SynthError;

pub const ORACLE_MAX_COMMENTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCluster {
    pub root_id: String,
    pub ind: u64,
    pub density: f64,
    pub t1: f64,
    pub t2: f64,
    pub trust: f64,
    pub mean_emotion: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePost {
    pub post_id: String,
    pub macro_cluster: OracleCluster,
    pub micros: Vec<OracleCluster>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub posts: Vec<OraclePost>,
    pub topic: Option<f64>,
}

fn sentiment_of(c: &Comment) -> Result<f64, SynthError> {
    c.sentiment
        .ok_or_else(|| SynthError::Oracle(format!("comment {} has no sentiment", c.id)))
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    root_id: &str,
    emotions: &[f64],
    ind: u64,
    max_ind: u64,
    followers: u64,
    reposts: u64,
    max_followers: u64,
    max_reposts: u64,
    config: &ChainConfig,
) -> OracleCluster {
    let n = emotions.len() as f64;

    let mut total = 0.0;
    for e in emotions {
        total += e;
    }
    let mean = total / n;

    let mut squares = 0.0;
    for e in emotions {
        squares += (e - mean) * (e - mean);
    }
    let std = (squares / n).sqrt();
    let mut t1 = 1.0 - std;
    if t1 < 0.0 {
        t1 = 0.0;
    }
    if t1 > 1.0 {
        t1 = 1.0;
    }

    let mut kept = Vec::new();
    for e in emotions {
        let outlier = std > 0.0 && (e - mean).abs() >= config.outlier_k * std;
        if !outlier {
            kept.push(*e);
        }
    }
    let t2 = if kept.len() < 2 {
        1.0
    } else {
        let mut kept_total = 0.0;
        for e in &kept {
            kept_total += e;
        }
        let kept_mean = kept_total / kept.len() as f64;
        let mut kept_squares = 0.0;
        for e in &kept {
            kept_squares += (e - kept_mean) * (e - kept_mean);
        }
        let v = 1.0 - (kept_squares / kept.len() as f64).sqrt();
        v.max(0.0).min(1.0)
    };

    let t3_fan = if max_followers == 0 {
        0.0
    } else {
        followers as f64 / max_followers as f64
    };
    let t3_repost = if max_reposts == 0 {
        0.0
    } else {
        reposts as f64 / max_reposts as f64
    };

    let w = &config.trust_weights;
    let trust = (w.a1 * t1 + w.a2 * t2 + w.a3_fan * t3_fan + w.a3_repost * t3_repost)
        .max(0.0)
        .min(1.0);
    let density = ind as f64 / max_ind as f64;
    OracleCluster {
        root_id: root_id.to_owned(),
        ind,
        density,
        t1,
        t2,
        trust,
        mean_emotion: mean,
        value: density * trust * mean,
    }
}

/// Recomputes every post value and the topic value from definitions.
/// Refuses datasets with more than [`ORACLE_MAX_COMMENTS`] comments.
pub fn oracle_recompute(dataset: &InteractionDataset, config: &ChainConfig) -> Result<OracleResult, SynthError> {
    let comments = dataset.comments();
    if comments.len() > ORACLE_MAX_COMMENTS {
        return Err(SynthError::TooLarge(comments.len()));
    }

    let mut max_followers = 0;
    for a in dataset.accounts() {
        if a.follower_count > max_followers {
            max_followers = a.follower_count;
        }
    }
    let mut max_reposts = 0;
    for p in dataset.posts() {
        if p.repost_count > max_reposts {
            max_reposts = p.repost_count;
        }
    }
    let followers_of = |account: &str| -> u64 {
        for a in dataset.accounts() {
            if a.id == account {
                return a.follower_count;
            }
        }
        0
    };

    let mut posts: Vec<_> = dataset.posts().iter().collect();
    posts.sort_by(|a, b| a.id.cmp(&b.id));

    let mut max_macro_ind = 0;
    for p in &posts {
        let mut count = 0;
        for c in comments {
            if c.parent_post == p.id && c.parent_comment.is_none() {
                count += 1;
            }
        }
        if count > 0 && count + p.like_count > max_macro_ind {
            max_macro_ind = count + p.like_count;
        }
    }

    let mut out = Vec::new();
    for p in posts {
        let mut first_level = Vec::new();
        for c in comments {
            if c.parent_post == p.id && c.parent_comment.is_none() {
                first_level.push(c);
            }
        }
        if first_level.is_empty() {
            continue;
        }
        let mut emotions = Vec::new();
        for c in &first_level {
            emotions.push(sentiment_of(c)?);
        }
        let macro_cluster = evaluate(
            &p.id,
            &emotions,
            first_level.len() as u64 + p.like_count,
            max_macro_ind,
            followers_of(&p.author),
            p.repost_count,
            max_followers,
            max_reposts,
            config,
        );

        // (root, replies) for every first-level comment with replies.
        let mut roots = Vec::new();
        for root in &first_level {
            let mut replies = Vec::new();
            for c in comments {
                if c.parent_comment.as_deref() == Some(root.id.as_str()) {
                    replies.push(c);
                }
            }
            if !replies.is_empty() {
                roots.push((*root, replies));
            }
        }
        roots.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        let mut max_micro_ind = 0;
        for (root, replies) in &roots {
            max_micro_ind = max_micro_ind.max(replies.len() as u64 + root.like_count);
        }
        let mut micros = Vec::new();
        for (root, replies) in &roots {
            let mut emotions = Vec::new();
            for c in replies {
                emotions.push(sentiment_of(c)?);
            }
            micros.push(evaluate(
                &root.id,
                &emotions,
                replies.len() as u64 + root.like_count,
                max_micro_ind,
                followers_of(&root.author),
                0,
                max_followers,
                max_reposts,
                config,
            ));
        }

        let value = if micros.is_empty() {
            macro_cluster.value
        } else {
            let mut weight = 0.0;
            let mut weighted = 0.0;
            for m in &micros {
                weight += m.density;
                weighted += m.density * m.value;
            }
            config.macro_weight * macro_cluster.value + (1.0 - config.macro_weight) * weighted / weight
        };
        out.push(OraclePost {
            post_id: p.id.clone(),
            macro_cluster,
            micros,
            value,
        });
    }

    let topic = if out.is_empty() {
        None
    } else {
        let mut total = 0.0;
        for p in &out {
            total += p.value;
        }
        Some(total / out.len() as f64)
    };
    Ok(OracleResult { posts: out, topic })
}
