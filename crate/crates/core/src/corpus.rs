//! Interaction data model, JSONL ingestion and preprocessing.
//!
//! One input file holds the accounts, posts and two levels of comments for a
//! single topic on a single platform. Records carry a `kind` discriminator:
//!
//! ```text
//! {"kind":"account","id":"u1","follower_count":120,"is_celebrity":false}
//! {"kind":"post","id":"p1","author":"u1","topic":"ChatGPT","platform":"Weibo","text":"...","like_count":3,"repost_count":0,"sentiment":null}
//! {"kind":"comment","id":"c1","parent_post":"p1","parent_comment":null,"author":"u2","text":"...","like_count":1,"sentiment":0.4}
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read dataset {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{kind} {id} references unknown {target} {reference}")]
    DanglingReference {
        kind: RecordKind,
        id: String,
        target: &'static str,
        reference: String,
    },
    #[error("{kind} {id}: sentiment {value} outside [-1, 1]")]
    SentimentOutOfRange { kind: RecordKind, id: String, value: f64 },
    #[error("comment {0} nests deeper than two levels")]
    TooDeep(String),
    #[error("{map} shares of profile {platform} sum to {sum}, expected 1")]
    ShareSum {
        platform: String,
        map: &'static str,
        sum: f64,
    },
    #[error("{map} share {key} of profile {platform} is {value}, outside [0, 1]")]
    ShareRange {
        platform: String,
        map: &'static str,
        key: &'static str,
        value: f64,
    },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Account,
    Post,
    Comment,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Account => "account",
            RecordKind::Post => "post",
            RecordKind::Comment => "comment",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub id: String,
    #[serde(default)]
    pub display_name: String,
    pub follower_count: u64,
    /// Platform-verified official, commercial or famous account.
    #[serde(default)]
    pub is_celebrity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub author: String,
    pub topic: String,
    pub platform: String,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub like_count: u64,
    #[serde(default)]
    pub repost_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(default)]
    pub sentiment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub parent_post: String,
    /// Present only on second-level comments.
    #[serde(default)]
    pub parent_comment: Option<String>,
    pub author: String,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub like_count: u64,
    #[serde(default)]
    pub sentiment: Option<f64>,
}

impl Comment {
    pub fn is_first_level(&self) -> bool {
        self.parent_comment.is_none()
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Account(Account),
    Post(Post),
    Comment(Comment),
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RecordRef<'a> {
    Account(&'a Account),
    Post(&'a Post),
    Comment(&'a Comment),
}

fn sentiment_ok(value: Option<f64>) -> bool {
    value.is_none_or(|v| v.is_finite() && (-1.0..=1.0).contains(&v))
}

/// Accounts, posts and comments of one topic on one platform.
///
/// Built either by [`ingest_dataset`] or [`InteractionDataset::from_parts`];
/// both guarantee that every reference resolves and that comments nest at
/// most two levels deep. Ids are looked up by first occurrence; duplicates are
/// removed by [`preprocess`].
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionDataset {
    platform: String,
    topic: String,
    accounts: Vec<Account>,
    posts: Vec<Post>,
    comments: Vec<Comment>,
    account_index: HashMap<String, usize>,
    post_index: HashMap<String, usize>,
    comment_index: HashMap<String, usize>,
}

fn first_index<'a>(ids: impl Iterator<Item = &'a str>) -> HashMap<String, usize> {
    let mut index = HashMap::new();
    for (i, id) in ids.enumerate() {
        index.entry(id.to_owned()).or_insert(i);
    }
    index
}

impl InteractionDataset {
    pub fn empty(platform: impl Into<String>, topic: impl Into<String>) -> Self {
        Self::assemble(platform.into(), topic.into(), Vec::new(), Vec::new(), Vec::new())
    }

    /// Builds a dataset from already-parsed records, rejecting any broken
    /// reference, out-of-range sentiment or over-deep comment.
    pub fn from_parts(
        platform: impl Into<String>,
        topic: impl Into<String>,
        accounts: Vec<Account>,
        posts: Vec<Post>,
        comments: Vec<Comment>,
    ) -> Result<Self> {
        let dataset = Self::assemble(platform.into(), topic.into(), accounts, posts, comments);
        dataset.check_integrity()?;
        Ok(dataset)
    }

    pub(crate) fn assemble(
        platform: String,
        topic: String,
        accounts: Vec<Account>,
        posts: Vec<Post>,
        comments: Vec<Comment>,
    ) -> Self {
        let account_index = first_index(accounts.iter().map(|a| a.id.as_str()));
        let post_index = first_index(posts.iter().map(|p| p.id.as_str()));
        let comment_index = first_index(comments.iter().map(|c| c.id.as_str()));
        Self {
            platform,
            topic,
            accounts,
            posts,
            comments,
            account_index,
            post_index,
            comment_index,
        }
    }

    fn check_integrity(&self) -> Result<()> {
        let dangling = |kind, id: &str, target, reference: &str| CorpusError::DanglingReference {
            kind,
            id: id.to_owned(),
            target,
            reference: reference.to_owned(),
        };
        for post in &self.posts {
            if self.account(&post.author).is_none() {
                return Err(dangling(RecordKind::Post, &post.id, "account", &post.author));
            }
            if !sentiment_ok(post.sentiment) {
                return Err(CorpusError::SentimentOutOfRange {
                    kind: RecordKind::Post,
                    id: post.id.clone(),
                    value: post.sentiment.unwrap_or(f64::NAN),
                });
            }
        }
        for comment in &self.comments {
            if self.account(&comment.author).is_none() {
                return Err(dangling(RecordKind::Comment, &comment.id, "account", &comment.author));
            }
            if self.post(&comment.parent_post).is_none() {
                return Err(dangling(RecordKind::Comment, &comment.id, "post", &comment.parent_post));
            }
            if let Some(parent) = &comment.parent_comment {
                match self.comment(parent) {
                    None => return Err(dangling(RecordKind::Comment, &comment.id, "comment", parent)),
                    Some(p) if !p.is_first_level() || p.parent_post != comment.parent_post => {
                        return Err(CorpusError::TooDeep(comment.id.clone()))
                    }
                    Some(_) => {}
                }
            }
            if !sentiment_ok(comment.sentiment) {
                return Err(CorpusError::SentimentOutOfRange {
                    kind: RecordKind::Comment,
                    id: comment.id.clone(),
                    value: comment.sentiment.unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    pub fn platform(&self) -> &str {
        &self.platform
    }

    pub fn topic(&self) -> &str {
        &self.topic
    }

    pub fn accounts(&self) -> &[Account] {
        &self.accounts
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn account(&self, id: &str) -> Option<&Account> {
        self.account_index.get(id).map(|&i| &self.accounts[i])
    }

    pub fn post(&self, id: &str) -> Option<&Post> {
        self.post_index.get(id).map(|&i| &self.posts[i])
    }

    pub fn comment(&self, id: &str) -> Option<&Comment> {
        self.comment_index.get(id).map(|&i| &self.comments[i])
    }

    pub fn into_parts(self) -> (String, String, Vec<Account>, Vec<Post>, Vec<Comment>) {
        (self.platform, self.topic, self.accounts, self.posts, self.comments)
    }

    /// Ids of posts that received at least one first-level comment.
    pub fn commented_posts(&self) -> HashSet<&str> {
        self.comments
            .iter()
            .filter(|c| c.is_first_level())
            .map(|c| c.parent_post.as_str())
            .collect()
    }

    /// Writes the dataset in the ingestion record schema: accounts, then
    /// posts, then comments, each in stored order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        let records = self
            .accounts
            .iter()
            .map(RecordRef::Account)
            .chain(self.posts.iter().map(RecordRef::Post))
            .chain(self.comments.iter().map(RecordRef::Comment));
        for record in records {
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub read: usize,
    pub retained: usize,
    pub dropped: usize,
}

/// Counters collected while ingesting one file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub lines: usize,
    pub malformed_lines: usize,
    pub accounts: KindCounts,
    pub posts: KindCounts,
    pub comments: KindCounts,
    pub dangling_references: usize,
    pub invalid_values: usize,
    pub out_of_scope: usize,
}

impl IngestSummary {
    pub fn skipped(&self) -> usize {
        self.malformed_lines + self.accounts.dropped + self.posts.dropped + self.comments.dropped
    }
}

/// Reads a JSONL dataset file.
///
/// Only an unreadable file is fatal. Malformed lines, dangling references,
/// out-of-range sentiments, comments nested deeper than two levels and posts
/// belonging to a different topic or platform than the first post are
/// skipped and counted in the returned summary.
pub fn ingest_dataset(path: &Path) -> Result<(InteractionDataset, IngestSummary)> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Unreadable {
        path: path.to_owned(),
        source,
    })?;
    Ok(ingest_str(&text))
}

pub fn ingest_str(text: &str) -> (InteractionDataset, IngestSummary) {
    let mut summary = IngestSummary::default();
    let mut accounts = Vec::new();
    let mut posts = Vec::new();
    let mut comments = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        summary.lines += 1;
        match serde_json::from_str::<Record>(line) {
            Ok(Record::Account(a)) => accounts.push(a),
            Ok(Record::Post(p)) => posts.push(p),
            Ok(Record::Comment(c)) => comments.push(c),
            Err(err) => {
                log::warn!("line {}: skipping malformed record: {err}", lineno + 1);
                summary.malformed_lines += 1;
            }
        }
    }
    summary.accounts.read = accounts.len();
    summary.posts.read = posts.len();
    summary.comments.read = comments.len();

    let account_ids: HashSet<String> = accounts.iter().map(|a| a.id.clone()).collect();

    let mut scope: Option<(String, String)> = None;
    let posts: Vec<Post> = posts
        .into_iter()
        .filter(|post| {
            if !account_ids.contains(&post.author) {
                log::warn!("post {}: unknown author {}", post.id, post.author);
                summary.dangling_references += 1;
                return false;
            }
            if !sentiment_ok(post.sentiment) {
                log::warn!("post {}: sentiment outside [-1, 1]", post.id);
                summary.invalid_values += 1;
                return false;
            }
            let (platform, topic) = scope.get_or_insert_with(|| (post.platform.clone(), post.topic.clone()));
            if *platform != post.platform || *topic != post.topic {
                log::warn!(
                    "post {}: {}/{} does not match dataset scope {}/{}",
                    post.id,
                    post.topic,
                    post.platform,
                    topic,
                    platform
                );
                summary.out_of_scope += 1;
                return false;
            }
            true
        })
        .collect();
    let post_ids: HashSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();

    // Resolve first-level comments before replies so that a reply may
    // precede its parent in the file.
    let mut keep = vec![false; comments.len()];
    let mut first_level: HashMap<&str, &str> = HashMap::new();
    for (i, c) in comments.iter().enumerate() {
        if c.parent_comment.is_some() {
            continue;
        }
        if !post_ids.contains(c.parent_post.as_str()) || !account_ids.contains(&c.author) {
            log::warn!("comment {}: dangling reference", c.id);
            summary.dangling_references += 1;
        } else if !sentiment_ok(c.sentiment) {
            log::warn!("comment {}: sentiment outside [-1, 1]", c.id);
            summary.invalid_values += 1;
        } else {
            keep[i] = true;
            first_level.entry(&c.id).or_insert(&c.parent_post);
        }
    }
    for (i, c) in comments.iter().enumerate() {
        let Some(parent) = &c.parent_comment else {
            continue;
        };
        if !post_ids.contains(c.parent_post.as_str()) || !account_ids.contains(&c.author) {
            log::warn!("comment {}: dangling reference", c.id);
            summary.dangling_references += 1;
            continue;
        }
        match first_level.get(parent.as_str()) {
            Some(&post) if post == c.parent_post => {
                if sentiment_ok(c.sentiment) {
                    keep[i] = true;
                } else {
                    log::warn!("comment {}: sentiment outside [-1, 1]", c.id);
                    summary.invalid_values += 1;
                }
            }
            Some(_) => {
                log::warn!("comment {}: parent comment belongs to another post", c.id);
                summary.dangling_references += 1;
            }
            None => {
                log::warn!("comment {}: parent comment {parent} is not a first-level comment", c.id);
                summary.dangling_references += 1;
            }
        }
    }
    let comments: Vec<Comment> = comments
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();

    summary.accounts.retained = accounts.len();
    summary.posts.retained = posts.len();
    summary.comments.retained = comments.len();
    for counts in [&mut summary.accounts, &mut summary.posts, &mut summary.comments] {
        counts.dropped = counts.read - counts.retained;
    }

    let (platform, topic) = scope.unwrap_or_default();
    let dataset = InteractionDataset::assemble(platform, topic, accounts, posts, comments);
    (dataset, summary)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessSummary {
    pub control_chars_removed: usize,
    pub duplicate_accounts: usize,
    pub duplicate_posts: usize,
    pub duplicate_comments: usize,
    pub posts_filtered: usize,
    pub comments_filtered: usize,
}

/// Removes Unicode control characters other than tab and newline, returning
/// how many were removed.
pub fn strip_control_chars(text: &mut String) -> usize {
    let before = text.chars().count();
    text.retain(|c| !c.is_control() || c == '\t' || c == '\n');
    before - text.chars().count()
}

fn dedupe<T>(items: Vec<T>, id: impl Fn(&T) -> &str) -> (Vec<T>, usize) {
    let mut seen = HashSet::new();
    let before = items.len();
    let kept: Vec<T> = items
        .into_iter()
        .filter(|item| seen.insert(id(item).to_owned()))
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// Cleans texts, drops duplicate ids (first occurrence wins) and, when
/// keywords are given, drops posts whose text contains none of them
/// (case-insensitive) together with their comments.
pub fn preprocess(
    dataset: InteractionDataset,
    topic_keywords: Option<&[String]>,
) -> (InteractionDataset, PreprocessSummary) {
    let mut summary = PreprocessSummary::default();
    let (platform, topic, accounts, posts, comments) = dataset.into_parts();

    let (mut accounts, n) = dedupe(accounts, |a| &a.id);
    summary.duplicate_accounts = n;
    let (mut posts, n) = dedupe(posts, |p| &p.id);
    summary.duplicate_posts = n;
    let (mut comments, n) = dedupe(comments, |c| &c.id);
    summary.duplicate_comments = n;

    for a in &mut accounts {
        summary.control_chars_removed += strip_control_chars(&mut a.display_name);
    }
    for p in &mut posts {
        summary.control_chars_removed += strip_control_chars(&mut p.text);
    }
    for c in &mut comments {
        summary.control_chars_removed += strip_control_chars(&mut c.text);
    }

    if let Some(keywords) = topic_keywords.filter(|k| !k.is_empty()) {
        let keywords: Vec<String> = keywords.iter().map(|k| k.to_lowercase()).collect();
        let before = posts.len();
        posts.retain(|p| {
            let text = p.text.to_lowercase();
            keywords.iter().any(|k| text.contains(k.as_str()))
        });
        summary.posts_filtered = before - posts.len();
        let kept: HashSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
        let before = comments.len();
        comments.retain(|c| kept.contains(c.parent_post.as_str()));
        summary.comments_filtered = before - comments.len();
    }

    let dataset = InteractionDataset::assemble(platform, topic, accounts, posts, comments);
    (dataset, summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EducationShares {
    pub junior_high_or_below: f64,
    pub senior_high: f64,
    pub bachelor_or_above: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeShares {
    pub le25: f64,
    pub a26_35: f64,
    pub ge36: f64,
}

/// Exogenous user demographics and mechanism flags of one platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformProfile {
    #[serde(default)]
    pub platform: String,
    pub education_shares: EducationShares,
    pub age_shares: AgeShares,
    /// True where a repost stays visible inside the platform (blog style)
    /// rather than being an external share.
    #[serde(default)]
    pub repost_is_internal: bool,
}

const SHARE_TOLERANCE: f64 = 1e-9;

fn check_shares(platform: &str, map: &'static str, shares: [(&'static str, f64); 3]) -> Result<()> {
    for (key, value) in shares {
        if !(0.0..=1.0).contains(&value) {
            return Err(CorpusError::ShareRange {
                platform: platform.to_owned(),
                map,
                key,
                value,
            });
        }
    }
    let sum: f64 = shares.iter().map(|(_, v)| v).sum();
    if (sum - 1.0).abs() > SHARE_TOLERANCE {
        return Err(CorpusError::ShareSum {
            platform: platform.to_owned(),
            map,
            sum,
        });
    }
    Ok(())
}

pub fn validate_profile(profile: PlatformProfile) -> Result<PlatformProfile> {
    let e = profile.education_shares;
    check_shares(
        &profile.platform,
        "education_shares",
        [
            ("junior_high_or_below", e.junior_high_or_below),
            ("senior_high", e.senior_high),
            ("bachelor_or_above", e.bachelor_or_above),
        ],
    )?;
    let a = profile.age_shares;
    check_shares(
        &profile.platform,
        "age_shares",
        [("le25", a.le25), ("a26_35", a.a26_35), ("ge36", a.ge36)],
    )?;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{"kind":"account","id":"u1","follower_count":100,"is_celebrity":true}
{"kind":"account","id":"u2","follower_count":5,"is_celebrity":false}
{"kind":"post","id":"p1","author":"u1","topic":"ChatGPT","platform":"Weibo","text":"ChatGPT is here","like_count":7,"repost_count":2,"sentiment":0.3}
{"kind":"comment","id":"c1","parent_post":"p1","parent_comment":null,"author":"u2","text":"great","like_count":5,"sentiment":0.5}
{"kind":"comment","id":"c2","parent_post":"p1","parent_comment":null,"author":"u1","text":"meh","like_count":0,"sentiment":-0.1}
{"kind":"comment","id":"c3","parent_post":"p1","parent_comment":"c1","author":"u1","text":"agree","like_count":1,"sentiment":0.2}
"#;

    #[test]
    fn fixture_counts() {
        let (ds, summary) = ingest_str(FIXTURE);
        assert_eq!(ds.accounts().len(), 2);
        assert_eq!(ds.posts().len(), 1);
        assert_eq!(ds.comments().len(), 3);
        assert_eq!(ds.comments().iter().filter(|c| c.is_first_level()).count(), 2);
        assert_eq!(summary.skipped(), 0);
        assert_eq!(ds.platform(), "Weibo");
        assert_eq!(ds.topic(), "ChatGPT");
    }

    #[test]
    fn empty_input() {
        let (ds, summary) = ingest_str("");
        assert!(ds.posts().is_empty() && ds.comments().is_empty() && ds.accounts().is_empty());
        assert_eq!(summary, IngestSummary::default());
    }

    #[test]
    fn dangling_parent_post_is_skipped() {
        let text = r#"{"kind":"account","id":"u1","follower_count":1}
{"kind":"comment","id":"c1","parent_post":"missing","author":"u1","text":"x","like_count":0,"sentiment":0.1}"#;
        let (ds, summary) = ingest_str(text);
        assert_eq!(ds.comments().len(), 0);
        assert_eq!(summary.comments.dropped, 1);
        assert_eq!(summary.dangling_references, 1);
    }

    #[test]
    fn malformed_lines_are_counted() {
        let text = "not json\n{\"kind\":\"account\",\"id\":\"u1\",\"follower_count\":-3}\n{\"kind\":\"bogus\"}\n";
        let (_, summary) = ingest_str(text);
        assert_eq!(summary.malformed_lines, 3);
        assert_eq!(summary.lines, 3);
    }

    #[test]
    fn reply_before_parent_and_third_level() {
        let text = r#"{"kind":"account","id":"u","follower_count":1}
{"kind":"post","id":"p","author":"u","topic":"t","platform":"x","text":"","like_count":0,"repost_count":0,"sentiment":null}
{"kind":"comment","id":"r","parent_post":"p","parent_comment":"c","author":"u","text":"","like_count":0,"sentiment":null}
{"kind":"comment","id":"c","parent_post":"p","parent_comment":null,"author":"u","text":"","like_count":0,"sentiment":null}
{"kind":"comment","id":"deep","parent_post":"p","parent_comment":"r","author":"u","text":"","like_count":0,"sentiment":null}"#;
        let (ds, summary) = ingest_str(text);
        let ids: Vec<&str> = ds.comments().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["r", "c"]);
        assert_eq!(summary.comments.dropped, 1);
    }

    #[test]
    fn out_of_range_sentiment_and_scope() {
        let text = r#"{"kind":"account","id":"u","follower_count":1}
{"kind":"post","id":"p1","author":"u","topic":"t","platform":"x","sentiment":1.5}
{"kind":"post","id":"p2","author":"u","topic":"t","platform":"x"}
{"kind":"post","id":"p3","author":"u","topic":"other","platform":"x"}"#;
        let (ds, summary) = ingest_str(text);
        assert_eq!(ds.posts().len(), 1);
        assert_eq!(summary.invalid_values, 1);
        assert_eq!(summary.out_of_scope, 1);
        assert_eq!(summary.posts.dropped, 2);
    }

    fn account(id: &str) -> Account {
        Account {
            id: id.into(),
            display_name: String::new(),
            follower_count: 0,
            is_celebrity: false,
        }
    }

    fn post(id: &str, text: &str) -> Post {
        Post {
            id: id.into(),
            author: "u".into(),
            topic: "t".into(),
            platform: "x".into(),
            text: text.into(),
            like_count: 0,
            repost_count: 0,
            timestamp: None,
            sentiment: None,
        }
    }

    fn comment(id: &str, post: &str) -> Comment {
        Comment {
            id: id.into(),
            parent_post: post.into(),
            parent_comment: None,
            author: "u".into(),
            text: String::new(),
            like_count: 0,
            sentiment: None,
        }
    }

    #[test]
    fn control_characters_are_removed() {
        let ds = InteractionDataset::from_parts(
            "x",
            "t",
            vec![account("u")],
            vec![post("p", "al\u{7}ert\tok\r\n")],
            vec![],
        )
        .unwrap();
        let (ds, summary) = preprocess(ds, None);
        assert_eq!(ds.posts()[0].text, "alert\tok\n");
        assert_eq!(summary.control_chars_removed, 2);
    }

    #[test]
    fn duplicate_posts_first_wins() {
        let ds = InteractionDataset::from_parts(
            "x",
            "t",
            vec![account("u")],
            vec![post("p", "first"), post("p", "second")],
            vec![],
        )
        .unwrap();
        let (ds, summary) = preprocess(ds, None);
        assert_eq!(ds.posts().len(), 1);
        assert_eq!(ds.posts()[0].text, "first");
        assert_eq!(summary.duplicate_posts, 1);
    }

    #[test]
    fn keyword_filter_drops_posts_and_comments() {
        let ds = InteractionDataset::from_parts(
            "x",
            "t",
            vec![account("u")],
            vec![post("p1", "ChatGPT rocks"), post("p2", "nice weather")],
            vec![comment("c1", "p1"), comment("c2", "p2")],
        )
        .unwrap();
        let keywords = vec!["chatgpt".to_owned()];
        let (ds, summary) = preprocess(ds, Some(&keywords));
        assert_eq!(ds.posts().len(), 1);
        assert_eq!(ds.posts()[0].id, "p1");
        assert_eq!(ds.comments().len(), 1);
        assert_eq!(summary.posts_filtered, 1);
        assert_eq!(summary.comments_filtered, 1);
    }

    #[test]
    fn from_parts_rejects_broken_references() {
        let err = InteractionDataset::from_parts(
            "x",
            "t",
            vec![account("u")],
            vec![post("p", "")],
            vec![comment("c", "nope")],
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::DanglingReference { .. }));
    }

    fn profile(edu: [f64; 3], age: [f64; 3]) -> PlatformProfile {
        PlatformProfile {
            platform: "p".into(),
            education_shares: EducationShares {
                junior_high_or_below: edu[0],
                senior_high: edu[1],
                bachelor_or_above: edu[2],
            },
            age_shares: AgeShares {
                le25: age[0],
                a26_35: age[1],
                ge36: age[2],
            },
            repost_is_internal: false,
        }
    }

    #[test]
    fn profile_share_sums() {
        assert!(validate_profile(profile([0.286, 0.30, 0.414], [0.3, 0.3, 0.4])).is_ok());
        let err = validate_profile(profile([0.2, 0.3, 0.5], [0.3, 0.3, 0.3])).unwrap_err();
        assert!(err.to_string().contains("age_shares"), "{err}");
        assert!(validate_profile(profile([0.2, 0.3, 0.5], [0.746, 0.154, 0.1])).is_ok());
        assert!(validate_profile(profile([1.2, -0.2, 0.0], [0.746, 0.154, 0.1])).is_err());
    }
}
