//! Per-topic reports and their table layouts.

mod bundle;

pub use bundle::{
    analyze_bundle, compute_reports, run_pipeline, BundleResults, CrossPlatformReport, InputDigest, Manifest,
    PipelineError, PipelineOptions, PlatformSummary, Stage,
};

use serde::{Deserialize, Serialize};

use crate::chain::{compute_topic_emotion, ChainError, PostGroupEmotion};
use crate::config::RunConfig;
use crate::corpus::{IngestSummary, InteractionDataset, PreprocessSummary};
use crate::dynamics::{
    compute_skewness_with, indicator_row, mean_absolute_skewness, tally_polarity, IndicatorRow, PolarityTally,
    SkewnessResult,
};

/// One point of the rank vs. normalized cluster size plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub rank: usize,
    pub post_id: String,
    pub normalized_size: f64,
    pub emotion_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub topic: String,
    pub platform: String,
    pub group_emotion: Option<f64>,
    pub polarity: PolarityTally,
    pub skewness: SkewnessResult,
    pub indicators: IndicatorRow,
    pub cluster_rows: Vec<ClusterRow>,
    pub posts: Vec<PostGroupEmotion>,
    #[serde(default)]
    pub ingest: Option<IngestSummary>,
    #[serde(default)]
    pub preprocess: Option<PreprocessSummary>,
}

/// Sorts posts ascending by group emotion (ties by post id) and attaches
/// each post's macro in-degree normalized by the largest in the topic.
pub fn cluster_rows(posts: &[PostGroupEmotion]) -> Vec<ClusterRow> {
    let max_ind = posts.iter().map(|p| p.macro_cluster.ind).max().unwrap_or(0).max(1);
    let mut sorted: Vec<&PostGroupEmotion> = posts.iter().collect();
    sorted.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.post_id.cmp(&b.post_id)));
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, p)| ClusterRow {
            rank: i + 1,
            post_id: p.post_id.clone(),
            normalized_size: p.macro_cluster.ind as f64 / max_ind as f64,
            emotion_value: p.value,
        })
        .collect()
}

/// Computes every per-topic analytic for a dataset with resolved sentiments.
pub fn build_topic_report(dataset: &InteractionDataset, config: &RunConfig) -> Result<TopicReport, ChainError> {
    let chain = compute_topic_emotion(dataset, &config.chain_config_for(dataset.platform()))?;
    let values: Vec<f64> = chain.posts.iter().map(|p| p.value).collect();
    Ok(TopicReport {
        topic: chain.topic.clone(),
        platform: chain.platform.clone(),
        group_emotion: chain.value,
        polarity: tally_polarity(&values),
        skewness: SkewnessResult {
            topic: chain.topic.clone(),
            platform: chain.platform.clone(),
            n: values.len(),
            coefficient: compute_skewness_with(&values, config.skewness),
        },
        indicators: indicator_row(dataset),
        cluster_rows: cluster_rows(&chain.posts),
        posts: chain.posts,
        ingest: None,
        preprocess: None,
    })
}

/// Fixed four-decimal rendering; `None` renders as an em dash.
pub fn format_value(value: Option<f64>) -> String {
    match value {
        None => "—".to_owned(),
        Some(v) => {
            let s = format!("{v:.4}");
            if s == "-0.0000" {
                "0.0000".to_owned()
            } else {
                s
            }
        }
    }
}

/// A rendered table: header plus string cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Cells joined by two spaces, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&row.join("  "));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen: Vec<&str> = Vec::new();
    for item in items {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

/// Topic rows by platform columns, in first-appearance order, with a summary
/// row computed from the non-null cells of each column.
fn topic_platform_table(
    reports: &[TopicReport],
    cell: impl Fn(&TopicReport) -> Option<f64>,
    summary_label: &str,
    summary: impl Fn(&[Option<f64>]) -> Option<f64>,
) -> Table {
    let topics = first_seen(reports.iter().map(|r| r.topic.as_str()));
    let platforms = first_seen(reports.iter().map(|r| r.platform.as_str()));
    let lookup = |t: &str, p: &str| reports.iter().find(|r| r.topic == t && r.platform == p).and_then(&cell);
    let mut header = vec!["Topic".to_owned()];
    header.extend(platforms.iter().map(|p| p.to_string()));
    let mut rows = Vec::new();
    for t in &topics {
        let mut row = vec![t.to_string()];
        row.extend(platforms.iter().map(|p| format_value(lookup(t, p))));
        rows.push(row);
    }
    let mut last = vec![summary_label.to_owned()];
    for p in &platforms {
        let column: Vec<Option<f64>> = topics.iter().map(|t| lookup(t, p)).collect();
        last.push(format_value(summary(&column)));
    }
    rows.push(last);
    Table { header, rows }
}

pub fn column_mean(column: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = column.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Group emotion per topic and platform with an `Average` row.
pub fn emotion_table(reports: &[TopicReport]) -> Table {
    topic_platform_table(reports, |r| r.group_emotion, "Average", column_mean)
}

pub fn format_emotion_table(reports: &[TopicReport]) -> String {
    emotion_table(reports).to_text()
}

/// Skewness coefficient per topic and platform with a mean-absolute-value row.
pub fn skewness_table(reports: &[TopicReport]) -> Table {
    topic_platform_table(
        reports,
        |r| r.skewness.coefficient,
        "MAV",
        |column| {
            let rows: Vec<SkewnessResult> = column
                .iter()
                .map(|c| SkewnessResult {
                    topic: String::new(),
                    platform: String::new(),
                    n: 0,
                    coefficient: *c,
                })
                .collect();
            mean_absolute_skewness(&rows)
        },
    )
}

pub fn polarity_table(reports: &[TopicReport]) -> Table {
    let header = [
        "topic",
        "platform",
        "positive_count",
        "negative_count",
        "positive_share",
        "negative_share",
    ];
    Table {
        header: header.iter().map(|h| h.to_string()).collect(),
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    r.topic.clone(),
                    r.platform.clone(),
                    r.polarity.positive_count.to_string(),
                    r.polarity.negative_count.to_string(),
                    format_value(r.polarity.positive_share),
                    format_value(r.polarity.negative_share),
                ]
            })
            .collect(),
    }
}

pub fn indicator_table(reports: &[TopicReport]) -> Table {
    let header = ["topic", "platform", "no_comment_share", "celebrity_share"];
    Table {
        header: header.iter().map(|h| h.to_string()).collect(),
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    r.topic.clone(),
                    r.platform.clone(),
                    format_value(r.indicators.no_comment_share),
                    format_value(r.indicators.celebrity_share),
                ]
            })
            .collect(),
    }
}

/// `rank,normalized_size,emotion_value` rows, ascending by emotion value.
/// Values are written at full precision.
pub fn export_cluster_plot_data(report: &TopicReport) -> String {
    let table = Table {
        header: vec!["rank".into(), "normalized_size".into(), "emotion_value".into()],
        rows: report
            .cluster_rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    r.normalized_size.to_string(),
                    r.emotion_value.to_string(),
                ]
            })
            .collect(),
    };
    table.to_csv()
}

/// File-name-safe form of a label.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".to_owned()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ClusterEmotion;
    use crate::dynamics::PolarityTally;

    fn report(topic: &str, platform: &str, value: Option<f64>) -> TopicReport {
        TopicReport {
            topic: topic.into(),
            platform: platform.into(),
            group_emotion: value,
            polarity: tally_polarity(&[]),
            skewness: SkewnessResult {
                topic: topic.into(),
                platform: platform.into(),
                n: 0,
                coefficient: None,
            },
            indicators: IndicatorRow {
                topic: topic.into(),
                platform: platform.into(),
                no_comment_share: None,
                celebrity_share: None,
            },
            cluster_rows: vec![],
            posts: vec![],
            ingest: None,
            preprocess: None,
        }
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(Some(0.02684444)), "0.0268");
        assert_eq!(format_value(Some(-0.041888)), "-0.0419");
        assert_eq!(format_value(Some(-0.00001)), "0.0000");
        assert_eq!(format_value(None), "—");
    }

    #[test]
    fn single_cell_table() {
        let text = format_emotion_table(&[report("ChatGPT", "Weibo", Some(0.12345))]);
        assert_eq!(text, "Topic  Weibo\nChatGPT  0.1235\nAverage  0.1235\n");
    }

    #[test]
    fn null_cells_and_average() {
        let reports = [
            report("a", "X", Some(0.1)),
            report("a", "Y", None),
            report("b", "X", Some(0.3)),
            report("b", "Y", Some(-0.2)),
        ];
        let t = emotion_table(&reports);
        assert_eq!(t.rows[0], ["a", "0.1000", "—"]);
        assert_eq!(t.rows[2], ["Average", "0.2000", "-0.2000"]);
        assert!(t.to_csv().starts_with("Topic,X,Y\na,0.1000,—\n"));
    }

    fn post(id: &str, ind: u64, value: f64) -> PostGroupEmotion {
        PostGroupEmotion {
            post_id: id.into(),
            macro_cluster: ClusterEmotion {
                root_id: id.into(),
                ind,
                member_count: 1,
                density: 0.0,
                trust: 0.0,
                mean_emotion: 0.0,
                value,
                t1: 0.0,
                t2: 0.0,
                t3_fan: 0.0,
                t3_repost: 0.0,
            },
            micros: vec![],
            value,
        }
    }

    #[test]
    fn plot_rows() {
        let rows = cluster_rows(&[post("p1", 10, -0.2), post("p2", 5, 0.4)]);
        assert_eq!(
            (rows[0].rank, rows[0].normalized_size, rows[0].emotion_value),
            (1, 1.0, -0.2)
        );
        assert_eq!(
            (rows[1].rank, rows[1].normalized_size, rows[1].emotion_value),
            (2, 0.5, 0.4)
        );

        let rows = cluster_rows(&[post("p9", 3, 0.25)]);
        assert_eq!((rows[0].rank, rows[0].normalized_size), (1, 1.0));

        let rows = cluster_rows(&[post("b", 2, 0.1), post("a", 4, 0.1), post("c", 1, -0.1)]);
        let ids: Vec<&str> = rows.iter().map(|r| r.post_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);

        let mut r = report("t", "p", Some(0.1));
        r.cluster_rows = cluster_rows(&[post("p1", 10, -0.2), post("p2", 5, 0.4)]);
        assert_eq!(
            export_cluster_plot_data(&r),
            "rank,normalized_size,emotion_value\n1,1,-0.2\n2,0.5,0.4\n"
        );
    }

    #[test]
    fn polarity_and_indicator_tables() {
        let mut r = report("t", "p", Some(0.1));
        r.polarity = PolarityTally {
            positive_count: 1,
            negative_count: 3,
            positive_share: Some(0.25),
            negative_share: Some(0.75),
        };
        r.indicators.no_comment_share = Some(0.75);
        assert_eq!(
            polarity_table(&[r.clone()]).rows[0],
            ["t", "p", "1", "3", "0.2500", "0.7500"]
        );
        assert_eq!(indicator_table(&[r]).rows[0], ["t", "p", "0.7500", "—"]);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("AI painting"), "AI_painting");
        assert_eq!(slug("New/Bing"), "New_Bing");
        assert_eq!(slug(""), "_");
    }
}
