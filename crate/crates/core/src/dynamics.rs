//! Group-dynamics analytics: polarity tallies, skewness, Pearson
//! correlation and the two platform-mechanism indicators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{InteractionDataset, PlatformProfile};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("length mismatch: {xs} x values vs {ys} y values")]
    LengthMismatch { xs: usize, ys: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityTally {
    pub positive_count: usize,
    pub negative_count: usize,
    pub positive_share: Option<f64>,
    pub negative_share: Option<f64>,
}

impl PolarityTally {
    pub fn total(&self) -> usize {
        self.positive_count + self.negative_count
    }
}

/// Positive means strictly above zero; zero itself counts as negative.
pub fn tally_polarity(post_values: &[f64]) -> PolarityTally {
    let positive_count = post_values.iter().filter(|&&v| v > 0.0).count();
    let negative_count = post_values.len() - positive_count;
    let total = post_values.len();
    let share = |n: usize| (total > 0).then(|| n as f64 / total as f64);
    PolarityTally {
        positive_count,
        negative_count,
        positive_share: share(positive_count),
        negative_share: share(negative_count),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkewnessEstimator {
    /// Bias-corrected `G1 = g1 * sqrt(n(n-1)) / (n-2)`.
    #[default]
    Adjusted,
    /// Plain moment coefficient `g1 = m3 / m2^1.5`.
    Unadjusted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewnessResult {
    pub topic: String,
    pub platform: String,
    pub n: usize,
    pub coefficient: Option<f64>,
}

pub fn compute_skewness(values: &[f64]) -> Option<f64> {
    compute_skewness_with(values, SkewnessEstimator::Adjusted)
}

/// `None` when fewer than three values or all values are equal.
pub fn compute_skewness_with(values: &[f64], estimator: SkewnessEstimator) -> Option<f64> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= nf;
    m3 /= nf;
    if m2 == 0.0 {
        return None;
    }
    let g1 = m3 / m2.powf(1.5);
    Some(match estimator {
        SkewnessEstimator::Adjusted => g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0),
        SkewnessEstimator::Unadjusted => g1,
    })
}

/// Mean absolute coefficient over the defined rows; the platform-level
/// polarization degree.
pub fn mean_absolute_skewness(rows: &[SkewnessResult]) -> Option<f64> {
    let defined: Vec<f64> = rows.iter().filter_map(|r| r.coefficient).map(f64::abs).collect();
    if defined.is_empty() {
        return None;
    }
    Some(defined.iter().sum::<f64>() / defined.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub x_name: String,
    pub y_name: String,
    pub r: Option<f64>,
    pub n: usize,
}

impl CorrelationResult {
    pub fn named(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_name = x.into();
        self.y_name = y.into();
        self
    }
}

/// Sample Pearson correlation. `r` is `None` for fewer than two points or
/// when either side has zero variance.
pub fn compute_pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult, DynamicsError> {
    if xs.len() != ys.len() {
        return Err(DynamicsError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let n = xs.len();
    let mut result = CorrelationResult {
        x_name: String::new(),
        y_name: String::new(),
        r: None,
        n,
    };
    if n < 2 {
        return Ok(result);
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(result);
    }
    result.r = Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0));
    Ok(result)
}

/// Share of posts without a single first-level comment.
pub fn no_comment_share(dataset: &InteractionDataset) -> Option<f64> {
    let total = dataset.posts().len();
    if total == 0 {
        return None;
    }
    let commented = dataset.commented_posts();
    let silent = dataset
        .posts()
        .iter()
        .filter(|p| !commented.contains(p.id.as_str()))
        .count();
    Some(silent as f64 / total as f64)
}

/// Share of cluster-forming posts published by celebrity accounts.
pub fn celebrity_share(dataset: &InteractionDataset) -> Option<f64> {
    let commented = dataset.commented_posts();
    let forming: Vec<_> = dataset
        .posts()
        .iter()
        .filter(|p| commented.contains(p.id.as_str()))
        .collect();
    if forming.is_empty() {
        return None;
    }
    let celebrity = forming
        .iter()
        .filter(|p| dataset.account(&p.author).is_some_and(|a| a.is_celebrity))
        .count();
    Some(celebrity as f64 / forming.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub topic: String,
    pub platform: String,
    pub no_comment_share: Option<f64>,
    pub celebrity_share: Option<f64>,
}

pub fn indicator_row(dataset: &InteractionDataset) -> IndicatorRow {
    IndicatorRow {
        topic: dataset.topic().to_owned(),
        platform: dataset.platform().to_owned(),
        no_comment_share: no_comment_share(dataset),
        celebrity_share: celebrity_share(dataset),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemographicBucket {
    JuniorHighOrBelow,
    SeniorHigh,
    BachelorOrAbove,
    Le25,
    A26_35,
    Ge36,
}

impl DemographicBucket {
    pub const ALL: [DemographicBucket; 6] = [
        DemographicBucket::JuniorHighOrBelow,
        DemographicBucket::SeniorHigh,
        DemographicBucket::BachelorOrAbove,
        DemographicBucket::Le25,
        DemographicBucket::A26_35,
        DemographicBucket::Ge36,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DemographicBucket::JuniorHighOrBelow => "junior_high_or_below",
            DemographicBucket::SeniorHigh => "senior_high",
            DemographicBucket::BachelorOrAbove => "bachelor_or_above",
            DemographicBucket::Le25 => "le25",
            DemographicBucket::A26_35 => "a26_35",
            DemographicBucket::Ge36 => "ge36",
        }
    }

    pub fn share(self, profile: &PlatformProfile) -> f64 {
        let e = &profile.education_shares;
        let a = &profile.age_shares;
        match self {
            DemographicBucket::JuniorHighOrBelow => e.junior_high_or_below,
            DemographicBucket::SeniorHigh => e.senior_high,
            DemographicBucket::BachelorOrAbove => e.bachelor_or_above,
            DemographicBucket::Le25 => a.le25,
            DemographicBucket::A26_35 => a.a26_35,
            DemographicBucket::Ge36 => a.ge36,
        }
    }
}

/// Correlates one demographic bucket's share with the platform-average group
/// emotion, one point per platform.
pub fn correlate_demographics(
    profiles: &[PlatformProfile],
    platform_emotions: &[f64],
    bucket: DemographicBucket,
) -> Result<CorrelationResult, DynamicsError> {
    let shares: Vec<f64> = profiles.iter().map(|p| bucket.share(p)).collect();
    let result = compute_pearson(&shares, platform_emotions)?;
    if result.n < 4 {
        log::warn!(
            "correlation of {} over {} platforms has no computable significance",
            bucket.label(),
            result.n
        );
    }
    Ok(result.named(bucket.label(), "group_emotion"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Account, AgeShares, Comment, EducationShares, Post};
    use proptest::prelude::*;

    #[test]
    fn polarity_rule() {
        let t = tally_polarity(&[0.1, -0.2, 0.0]);
        assert_eq!((t.positive_count, t.negative_count), (1, 2));
        assert_eq!(tally_polarity(&[0.0014]).positive_count, 1);
        let empty = tally_polarity(&[]);
        assert_eq!(empty.total(), 0);
        assert_eq!(empty.positive_share, None);
    }

    #[test]
    fn skewness_examples() {
        assert!(compute_skewness(&[1.0, 2.0, 3.0]).unwrap().abs() < 1e-12);
        // m2 = 2/9, m3 = 2/27, g1 = 1/sqrt(2), G1 = g1 * sqrt(6) = sqrt(3)
        let g = compute_skewness(&[0.0, 0.0, 1.0]).unwrap();
        assert!((g - 3f64.sqrt()).abs() < 1e-9, "{g}");
        let g1 = compute_skewness_with(&[0.0, 0.0, 1.0], SkewnessEstimator::Unadjusted).unwrap();
        assert!((g1 - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(compute_skewness(&[0.0, 1.0]), None);
        assert_eq!(compute_skewness(&[0.3; 5]), None);
    }

    fn row(c: Option<f64>) -> SkewnessResult {
        SkewnessResult {
            topic: "t".into(),
            platform: "p".into(),
            n: 3,
            coefficient: c,
        }
    }

    #[test]
    fn mav() {
        assert_eq!(mean_absolute_skewness(&[row(Some(-2.0)), row(Some(2.0))]), Some(2.0));
        assert_eq!(mean_absolute_skewness(&[row(Some(3.0)), row(None)]), Some(3.0));
        assert_eq!(mean_absolute_skewness(&[row(None)]), None);
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(compute_pearson(&x, &[2.0, 4.0, 6.0]).unwrap().r, Some(1.0));
        assert_eq!(compute_pearson(&x, &[6.0, 4.0, 2.0]).unwrap().r, Some(-1.0));
        let r = compute_pearson(&x, &[1.0, 1.0, 2.0]).unwrap().r.unwrap();
        assert!((r - 3f64.sqrt() / 2.0).abs() < 1e-9);
        assert_eq!(compute_pearson(&x, &[1.0, 1.0, 1.0]).unwrap().r, None);
        assert_eq!(compute_pearson(&[1.0], &[1.0]).unwrap().r, None);
        assert!(compute_pearson(&x, &[1.0]).is_err());
    }

    fn dataset(posts: &[(&str, bool, bool)]) -> InteractionDataset {
        let accounts = vec![
            Account {
                id: "star".into(),
                display_name: String::new(),
                follower_count: 10,
                is_celebrity: true,
            },
            Account {
                id: "joe".into(),
                display_name: String::new(),
                follower_count: 1,
                is_celebrity: false,
            },
        ];
        let mut ps = Vec::new();
        let mut cs = Vec::new();
        for &(id, celebrity, commented) in posts {
            ps.push(Post {
                id: id.into(),
                author: if celebrity { "star" } else { "joe" }.into(),
                topic: "t".into(),
                platform: "x".into(),
                text: String::new(),
                like_count: 0,
                repost_count: 0,
                timestamp: None,
                sentiment: None,
            });
            if commented {
                cs.push(Comment {
                    id: format!("c-{id}"),
                    parent_post: id.into(),
                    parent_comment: None,
                    author: "joe".into(),
                    text: String::new(),
                    like_count: 0,
                    sentiment: None,
                });
            }
        }
        InteractionDataset::from_parts("x", "t", accounts, ps, cs).unwrap()
    }

    #[test]
    fn indicators() {
        let ds = dataset(&[
            ("a", true, true),
            ("b", false, false),
            ("c", false, false),
            ("d", true, false),
        ]);
        assert_eq!(no_comment_share(&ds), Some(0.75));
        assert_eq!(celebrity_share(&ds), Some(1.0));
        let ds = dataset(&[
            ("a", true, true),
            ("b", true, true),
            ("c", false, true),
            ("d", false, true),
        ]);
        assert_eq!(no_comment_share(&ds), Some(0.0));
        assert_eq!(celebrity_share(&ds), Some(0.5));
        let ds = dataset(&[("a", false, true), ("b", false, true)]);
        assert_eq!(celebrity_share(&ds), Some(0.0));
        let ds = dataset(&[("a", true, false)]);
        assert_eq!(no_comment_share(&ds), Some(1.0));
        assert_eq!(celebrity_share(&ds), None);
        assert_eq!(no_comment_share(&InteractionDataset::empty("x", "t")), None);
    }

    fn profile(edu: [f64; 3]) -> PlatformProfile {
        PlatformProfile {
            platform: String::new(),
            education_shares: EducationShares {
                junior_high_or_below: edu[0],
                senior_high: edu[1],
                bachelor_or_above: edu[2],
            },
            age_shares: AgeShares {
                le25: 0.3,
                a26_35: 0.3,
                ge36: 0.4,
            },
            repost_is_internal: false,
        }
    }

    #[test]
    fn demographics() {
        let profiles = [
            profile([0.2, 0.4, 0.4]),
            profile([0.5, 0.1, 0.4]),
            profile([0.8, 0.0, 0.2]),
        ];
        let r = correlate_demographics(&profiles, &[0.1, 0.2, 0.3], DemographicBucket::JuniorHighOrBelow).unwrap();
        assert!((r.r.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.x_name, "junior_high_or_below");
        let r = correlate_demographics(&profiles, &[0.1, 0.2, 0.3], DemographicBucket::Le25).unwrap();
        assert_eq!(r.r, None);

        // shares [0.1, 0.2, 0.4] vs [1, 1, 2]: means 7/30 and 4/3,
        // sxy = 0.5/3, sxx = 0.14/3, syy = 2/3, r = 0.5 / sqrt(0.28) = 0.944911182523068
        let profiles = [
            profile([0.1, 0.5, 0.4]),
            profile([0.2, 0.4, 0.4]),
            profile([0.4, 0.2, 0.4]),
        ];
        let r = correlate_demographics(&profiles, &[1.0, 1.0, 2.0], DemographicBucket::JuniorHighOrBelow).unwrap();
        assert!((r.r.unwrap() - 0.944_911_182_523_068).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn skewness_negation(xs in prop::collection::vec(-1.0f64..=1.0, 3..40)) {
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            match (compute_skewness(&xs), compute_skewness(&neg)) {
                (Some(a), Some(b)) => prop_assert_eq!(a, -b),
                (a, b) => prop_assert_eq!(a, b),
            }
        }

        #[test]
        fn pearson_affine(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30),
            a in 0.1f64..10.0,
            b in -5.0f64..5.0,
        ) {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let base = compute_pearson(&xs, &ys).unwrap().r;
            let pos: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let neg: Vec<f64> = xs.iter().map(|x| -a * x + b).collect();
            if let Some(r) = base {
                prop_assert!((compute_pearson(&pos, &ys).unwrap().r.unwrap() - r).abs() < 1e-9);
                prop_assert!((compute_pearson(&neg, &ys).unwrap().r.unwrap() + r).abs() < 1e-9);
            }
        }

        #[test]
        fn polarity_counts_add_up(xs in prop::collection::vec(-1.0f64..=1.0, 0..50)) {
            let t = tally_polarity(&xs);
            prop_assert_eq!(t.total(), xs.len());
        }
    }
}
