//! Sentiment tendency values in [-1, 1] for post and comment texts.
//!
//! Precomputed values in the input always win. Texts without one are scored
//! by a two-class multinomial naive Bayes over a token-count lexicon with
//! Laplace smoothing and uniform class priors; the positive-class posterior
//! `p` is mapped to `2p - 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::InteractionDataset;

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("lexicon {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("smoothing alpha must be positive, got {0}")]
    Alpha(f64),
    #[error("{kind} {id} has no precomputed sentiment and no lexicon was supplied")]
    MissingLexicon { kind: &'static str, id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SentimentScore(f64);

impl SentimentScore {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && (-1.0..=1.0).contains(&value)).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    positive: BTreeMap<String, u64>,
    negative: BTreeMap<String, u64>,
    #[serde(default = "default_alpha")]
    smoothing_alpha: f64,
    #[serde(skip)]
    totals: (u64, u64),
    #[serde(skip)]
    vocabulary: usize,
}

impl Lexicon {
    pub fn new(
        positive: BTreeMap<String, u64>,
        negative: BTreeMap<String, u64>,
        smoothing_alpha: f64,
    ) -> Result<Self, SentimentError> {
        if !(smoothing_alpha > 0.0 && smoothing_alpha.is_finite()) {
            return Err(SentimentError::Alpha(smoothing_alpha));
        }
        let normalize = |m: BTreeMap<String, u64>| -> BTreeMap<String, u64> {
            let mut out = BTreeMap::new();
            for (k, v) in m {
                *out.entry(k.to_lowercase()).or_insert(0) += v;
            }
            out
        };
        let mut lex = Self {
            positive: normalize(positive),
            negative: normalize(negative),
            smoothing_alpha,
            totals: (0, 0),
            vocabulary: 0,
        };
        lex.refresh();
        Ok(lex)
    }

    fn refresh(&mut self) {
        self.totals = (self.positive.values().sum(), self.negative.values().sum());
        self.vocabulary = self
            .positive
            .keys()
            .chain(self.negative.keys())
            .collect::<BTreeSet<_>>()
            .len();
    }

    /// Counts tokens of a labeled corpus; `true` marks positive texts.
    pub fn from_labeled<'a>(
        texts: impl IntoIterator<Item = (&'a str, bool)>,
        smoothing_alpha: f64,
    ) -> Result<Self, SentimentError> {
        let mut positive = BTreeMap::new();
        let mut negative = BTreeMap::new();
        for (text, is_positive) in texts {
            let counts = if is_positive { &mut positive } else { &mut negative };
            for token in tokenize(text) {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        Self::new(positive, negative, smoothing_alpha)
    }

    /// Loads a JSON lexicon: `{"positive":{tok:n},"negative":{tok:n},"smoothing_alpha":1.0}`.
    pub fn from_json_file(path: &Path) -> Result<Self, SentimentError> {
        let text = fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.to_owned(),
            source,
        })?;
        let raw: Lexicon = serde_json::from_str(&text).map_err(|e| SentimentError::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        Self::new(raw.positive, raw.negative, raw.smoothing_alpha)
    }

    /// Loads two `token<TAB>count` files, one per class.
    pub fn from_tsv_files(positive: &Path, negative: &Path, smoothing_alpha: f64) -> Result<Self, SentimentError> {
        Self::new(read_tsv(positive)?, read_tsv(negative)?, smoothing_alpha)
    }

    pub fn smoothing_alpha(&self) -> f64 {
        self.smoothing_alpha
    }

    pub fn positive_tokens(&self) -> &BTreeMap<String, u64> {
        &self.positive
    }

    pub fn negative_tokens(&self) -> &BTreeMap<String, u64> {
        &self.negative
    }

    /// The same lexicon with its classes exchanged.
    pub fn swapped(&self) -> Self {
        let mut lex = self.clone();
        std::mem::swap(&mut lex.positive, &mut lex.negative);
        lex.refresh();
        lex
    }

    fn log_likelihood_ratio(&self, token: &str) -> Option<f64> {
        let pos = self.positive.get(token).copied();
        let neg = self.negative.get(token).copied();
        if pos.is_none() && neg.is_none() {
            return None;
        }
        let alpha = self.smoothing_alpha;
        let v = self.vocabulary as f64;
        let p_pos = (pos.unwrap_or(0) as f64 + alpha) / (self.totals.0 as f64 + alpha * v);
        let p_neg = (neg.unwrap_or(0) as f64 + alpha) / (self.totals.1 as f64 + alpha * v);
        Some(p_pos.ln() - p_neg.ln())
    }
}

fn read_tsv(path: &Path) -> Result<BTreeMap<String, u64>, SentimentError> {
    let text = fs::read_to_string(path).map_err(|source| SentimentError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut counts = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = || SentimentError::Parse {
            path: path.to_owned(),
            message: format!("line {}: expected token<TAB>count", i + 1),
        };
        let (token, count) = line.split_once('\t').ok_or_else(parse_err)?;
        let count: u64 = count.trim().parse().map_err(|_| parse_err())?;
        *counts.entry(token.to_owned()).or_insert(0) += count;
    }
    Ok(counts)
}

/// Scripts written without word separators; each code point becomes a token.
fn is_unsegmented(c: char) -> bool {
    matches!(c as u32,
        0x0E00..=0x0EFF      // Thai, Lao
        | 0x1000..=0x109F    // Myanmar
        | 0x1780..=0x17FF    // Khmer
        | 0x3040..=0x30FF    // Hiragana, Katakana
        | 0x3400..=0x4DBF    // CJK extension A
        | 0x4E00..=0x9FFF    // CJK unified
        | 0xF900..=0xFAFF    // CJK compatibility
        | 0x20000..=0x2FA1F) // CJK extensions B+
}

/// Lowercased tokens split on whitespace and punctuation.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if is_unsegmented(c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(c.to_string());
        } else if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

pub fn score_text(text: &str, lexicon: &Lexicon) -> SentimentScore {
    let log_odds: f64 = tokenize(text)
        .iter()
        .filter_map(|t| lexicon.log_likelihood_ratio(t))
        .sum();
    // 2 * sigmoid(x) - 1 == tanh(x / 2); tanh keeps the class-swap symmetry exact.
    SentimentScore((log_odds / 2.0).tanh())
}

/// Fills every missing post and comment sentiment with [`score_text`].
/// Existing values pass through untouched.
pub fn resolve_sentiments(
    dataset: InteractionDataset,
    lexicon: Option<&Lexicon>,
) -> Result<InteractionDataset, SentimentError> {
    let (platform, topic, accounts, mut posts, mut comments) = dataset.into_parts();
    for post in &mut posts {
        if post.sentiment.is_none() {
            let lex = lexicon.ok_or_else(|| SentimentError::MissingLexicon {
                kind: "post",
                id: post.id.clone(),
            })?;
            post.sentiment = Some(score_text(&post.text, lex).value());
        }
    }
    for comment in &mut comments {
        if comment.sentiment.is_none() {
            let lex = lexicon.ok_or_else(|| SentimentError::MissingLexicon {
                kind: "comment",
                id: comment.id.clone(),
            })?;
            comment.sentiment = Some(score_text(&comment.text, lex).value());
        }
    }
    Ok(InteractionDataset::assemble(platform, topic, accounts, posts, comments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_str;
    use proptest::prelude::*;

    fn lex(pos: &[(&str, u64)], neg: &[(&str, u64)]) -> Lexicon {
        let m = |xs: &[(&str, u64)]| xs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Lexicon::new(m(pos), m(neg), 1.0).unwrap()
    }

    #[test]
    fn tokenizer() {
        assert_eq!(tokenize("Hello, WORLD!  ok"), ["hello", "world", "ok"]);
        assert_eq!(tokenize("AI绘画 good"), ["ai", "绘", "画", "good"]);
        assert!(tokenize("  ...  ").is_empty());
    }

    #[test]
    fn empty_and_unknown_text_score_zero() {
        let l = lex(&[("good", 3)], &[("bad", 2)]);
        assert_eq!(score_text("", &l).value(), 0.0);
        assert_eq!(score_text("unseen words", &l).value(), 0.0);
    }

    #[test]
    fn positive_only_tokens_score_positive() {
        // Vocabulary {good, bad}, totals 3/3, alpha 1:
        // P(good|+) = 4/5, P(good|-) = 1/5, so p = 0.8 and 2p - 1 = 0.6.
        let l = lex(&[("good", 3)], &[("bad", 3)]);
        let s = score_text("good", &l).value();
        assert!(s > 0.0);
        assert!((s - 0.6).abs() < 1e-12, "{s}");
        // Two occurrences: odds 16:1 -> p = 16/17.
        let s2 = score_text("good good", &l).value();
        assert!((s2 - (2.0 * 16.0 / 17.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn balanced_tokens_score_zero() {
        let l = lex(&[("ai", 4), ("art", 2)], &[("ai", 4), ("art", 2)]);
        assert_eq!(score_text("AI art", &l).value(), 0.0);
    }

    #[test]
    fn alpha_must_be_positive() {
        assert!(Lexicon::new(BTreeMap::new(), BTreeMap::new(), 0.0).is_err());
    }

    #[test]
    fn labeled_counting() {
        let l = Lexicon::from_labeled([("love it", true), ("hate it", false)], 1.0).unwrap();
        assert_eq!(l.positive_tokens()["love"], 1);
        assert_eq!(l.negative_tokens()["it"], 1);
        assert!(score_text("love", &l).value() > 0.0);
    }

    const DS: &str = r#"{"kind":"account","id":"u","follower_count":1}
{"kind":"post","id":"p","author":"u","topic":"t","platform":"x","text":"good","sentiment":null}
{"kind":"comment","id":"c1","parent_post":"p","author":"u","text":"bad","sentiment":0.7}
{"kind":"comment","id":"c2","parent_post":"p","author":"u","text":"good","sentiment":null}"#;

    #[test]
    fn passthrough_and_fill() {
        let (ds, _) = ingest_str(DS);
        let l = lex(&[("good", 3)], &[("bad", 3)]);
        let out = resolve_sentiments(ds, Some(&l)).unwrap();
        assert_eq!(out.comments()[0].sentiment, Some(0.7));
        let filled = out.comments()[1].sentiment.unwrap();
        assert_eq!(filled, score_text("good", &l).value());
        assert!(out.posts()[0].sentiment.is_some());
    }

    #[test]
    fn missing_lexicon_is_an_error() {
        let (ds, _) = ingest_str(DS);
        assert!(matches!(
            resolve_sentiments(ds, None),
            Err(SentimentError::MissingLexicon { .. })
        ));
    }

    #[test]
    fn fully_precomputed_needs_no_lexicon() {
        let (ds, _) = ingest_str(&DS.replace("null", "0.1"));
        let out = resolve_sentiments(ds.clone(), None).unwrap();
        assert_eq!(out, ds);
    }

    fn arb_lexicon() -> impl Strategy<Value = Lexicon> {
        let words = prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]);
        let counts = prop::collection::btree_map(words.prop_map(String::from), 0u64..50, 0..6);
        (counts.clone(), counts, 0.1f64..3.0).prop_map(|(p, n, alpha)| Lexicon::new(p, n, alpha).unwrap())
    }

    proptest! {
        #[test]
        fn score_in_range_and_antisymmetric(
            l in arb_lexicon(),
            text in "[abcdefxy ,.]{0,40}",
        ) {
            let s = score_text(&text, &l).value();
            prop_assert!((-1.0..=1.0).contains(&s));
            let swapped = score_text(&text, &l.swapped()).value();
            prop_assert_eq!(swapped, -s);
        }
    }
}
