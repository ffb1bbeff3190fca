//! Run configuration file (TOML).
//!
//! ```toml
//! macro_weight = 0.6
//! outlier_k = 2.0
//! skewness = "adjusted"
//!
//! [trust_weights]
//! a1 = 0.35
//! a2 = 0.35
//! a3_fan = 0.05
//! a3_repost = 0.25
//!
//! [overrides.Douyin.trust_weights]   # optional, per platform
//! a1 = 0.4
//! a2 = 0.4
//! a3_fan = 0.05
//! a3_repost = 0.15
//!
//! [profiles.Weibo]
//! repost_is_internal = true
//! education_shares = { junior_high_or_below = 0.2, senior_high = 0.25, bachelor_or_above = 0.55 }
//! age_shares = { le25 = 0.4, a26_35 = 0.35, ge36 = 0.25 }
//!
//! [topic_keywords]
//! ChatGPT = ["chatgpt"]
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainConfig, ChainError, TrustWeights};
use crate::corpus::{validate_profile, CorpusError, PlatformProfile};
use crate::dynamics::SkewnessEstimator;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Chain(#[from] ChainError),
    #[error("config: {0}")]
    Profile(#[from] CorpusError),
}

fn default_macro_weight() -> f64 {
    ChainConfig::default().macro_weight
}

fn default_outlier_k() -> f64 {
    ChainConfig::default().outlier_k
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainOverride {
    pub trust_weights: Option<TrustWeights>,
    pub macro_weight: Option<f64>,
    pub outlier_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub trust_weights: TrustWeights,
    #[serde(default = "default_macro_weight")]
    pub macro_weight: f64,
    #[serde(default = "default_outlier_k")]
    pub outlier_k: f64,
    #[serde(default)]
    pub skewness: SkewnessEstimator,
    #[serde(default)]
    pub overrides: BTreeMap<String, ChainOverride>,
    #[serde(default)]
    pub profiles: BTreeMap<String, PlatformProfile>,
    #[serde(default)]
    pub topic_keywords: BTreeMap<String, Vec<String>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let chain = ChainConfig::default();
        Self {
            trust_weights: chain.trust_weights,
            macro_weight: chain.macro_weight,
            outlier_k: chain.outlier_k,
            skewness: SkewnessEstimator::default(),
            overrides: BTreeMap::new(),
            profiles: BTreeMap::new(),
            topic_keywords: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        for (name, profile) in config.profiles.iter_mut() {
            profile.platform = name.clone();
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.chain_config().validate()?;
        for platform in self.overrides.keys() {
            self.chain_config_for(platform).validate()?;
        }
        for profile in self.profiles.values() {
            validate_profile(profile.clone())?;
        }
        Ok(())
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            trust_weights: self.trust_weights,
            macro_weight: self.macro_weight,
            outlier_k: self.outlier_k,
        }
    }

    /// Base chain configuration with any platform override applied.
    pub fn chain_config_for(&self, platform: &str) -> ChainConfig {
        let mut config = self.chain_config();
        if let Some(o) = self.overrides.get(platform) {
            if let Some(w) = o.trust_weights {
                config.trust_weights = w;
            }
            if let Some(m) = o.macro_weight {
                config.macro_weight = m;
            }
            if let Some(k) = o.outlier_k {
                config.outlier_k = k;
            }
        }
        config
    }

    pub fn keywords_for(&self, topic: &str) -> Option<&[String]> {
        self.topic_keywords.get(topic).map(Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
macro_weight = 0.5

[trust_weights]
a1 = 0.35
a2 = 0.35
a3_fan = 0.05
a3_repost = 0.25

[overrides.Douyin]
trust_weights = { a1 = 0.4, a2 = 0.4, a3_fan = 0.05, a3_repost = 0.15 }

[profiles.Bilibili]
education_shares = { junior_high_or_below = 0.1, senior_high = 0.1, bachelor_or_above = 0.8 }
age_shares = { le25 = 0.746, a26_35 = 0.154, ge36 = 0.1 }

[topic_keywords]
ChatGPT = ["chatgpt", "gpt"]
"#;

    #[test]
    fn parses_sample() {
        let c = RunConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.macro_weight, 0.5);
        assert_eq!(c.outlier_k, 2.0);
        assert_eq!(c.skewness, SkewnessEstimator::Adjusted);
        assert_eq!(c.chain_config_for("Douyin").trust_weights.a3_repost, 0.15);
        assert_eq!(c.chain_config_for("Weibo").trust_weights.a3_repost, 0.25);
        assert_eq!(c.profiles["Bilibili"].platform, "Bilibili");
        assert_eq!(c.keywords_for("ChatGPT").unwrap().len(), 2);
    }

    #[test]
    fn missing_trust_weights() {
        let err = RunConfig::from_toml_str("macro_weight = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("trust_weights"), "{err}");
    }

    #[test]
    fn bad_weights_and_profiles() {
        let bad = SAMPLE.replace("a3_repost = 0.25", "a3_repost = 0.5");
        assert!(matches!(RunConfig::from_toml_str(&bad), Err(ConfigError::Chain(_))));
        let bad = SAMPLE.replace("ge36 = 0.1", "ge36 = 0.0");
        let err = RunConfig::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("age_shares"), "{err}");
    }
}
