use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use group_emotion::chain::compute_topic_emotion;
use group_emotion::config::RunConfig;
use group_emotion::corpus::{ingest_dataset, preprocess};
use group_emotion::reporting::{analyze_bundle, run_pipeline, PipelineOptions};
use group_emotion::sentiment::{resolve_sentiments, Lexicon};
use group_emotion::synth::{generate, oracle_recompute, SynthSpec};

const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "group-emotion",
    version,
    about = "Group emotion over social media communication chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LexiconArgs {
    /// JSON lexicon with `positive` and `negative` token counts
    #[arg(long, conflicts_with_all = ["lexicon_pos", "lexicon_neg"])]
    lexicon: Option<PathBuf>,
    /// token<TAB>count file for the positive class
    #[arg(long, requires = "lexicon_neg")]
    lexicon_pos: Option<PathBuf>,
    /// token<TAB>count file for the negative class
    #[arg(long, requires = "lexicon_pos")]
    lexicon_neg: Option<PathBuf>,
    /// Laplace smoothing for TSV lexicons
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

impl LexiconArgs {
    fn load(&self) -> Result<Option<Lexicon>, String> {
        let lexicon = match (&self.lexicon, &self.lexicon_pos, &self.lexicon_neg) {
            (Some(path), _, _) => Some(Lexicon::from_json_file(path)),
            (None, Some(pos), Some(neg)) => Some(Lexicon::from_tsv_files(pos, neg, self.alpha)),
            _ => None,
        };
        lexicon.transpose().map_err(|e| format!("[sentiment] {e}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write an output bundle
    Compute {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
    },
    /// Cross-platform analytics over a computed bundle
    Dynamics {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Generate a seeded synthetic dataset
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare engine output with the brute-force oracle
    OracleCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
    },
}

fn truth_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".truth.json");
    out.with_file_name(name)
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Compute {
            input,
            config,
            out,
            lexicon,
        } => {
            let options = PipelineOptions {
                inputs: input,
                config,
                out_dir: out.clone(),
                lexicon: lexicon.load()?,
            };
            let manifest = run_pipeline(&options).map_err(|e| e.to_string())?;
            println!("wrote {} files to {}", manifest.outputs.len() + 1, out.display());
        }
        Command::Dynamics { bundle } => {
            let report = analyze_bundle(&bundle).map_err(|e| e.to_string())?;
            print!("{}", report.platform_table().to_text());
            println!();
            print!("{}", report.correlation_table().to_text());
            if report.platforms.len() < 4 {
                println!(
                    "note: correlations over {} platforms carry no significance estimate",
                    report.platforms.len()
                );
            }
        }
        Command::Synth { spec, seed, out } => {
            let mut spec = SynthSpec::from_file(&spec).map_err(|e| e.to_string())?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let (dataset, truth) = generate(&spec).map_err(|e| e.to_string())?;
            let write_err = |e: std::io::Error| format!("[output] {}: {e}", out.display());
            let mut w = BufWriter::new(File::create(&out).map_err(write_err)?);
            dataset.write_jsonl(&mut w).map_err(write_err)?;
            w.flush().map_err(write_err)?;
            let truth_file = truth_path(&out);
            let mut json = serde_json::to_string_pretty(&truth).expect("serializable truth");
            json.push('\n');
            std::fs::write(&truth_file, json).map_err(|e| format!("[output] {}: {e}", truth_file.display()))?;
            println!(
                "{} posts, {} comments -> {}",
                dataset.posts().len(),
                dataset.comments().len(),
                out.display()
            );
        }
        Command::OracleCheck { input, config, lexicon } => {
            let config = RunConfig::from_file(&config).map_err(|e| format!("[config] {e}"))?;
            let (dataset, _) = ingest_dataset(&input).map_err(|e| format!("[ingest] {e}"))?;
            let keywords = config.keywords_for(dataset.topic()).map(<[String]>::to_vec);
            let (dataset, _) = preprocess(dataset, keywords.as_deref());
            let dataset =
                resolve_sentiments(dataset, lexicon.load()?.as_ref()).map_err(|e| format!("[sentiment] {e}"))?;
            let chain_config = config.chain_config_for(dataset.platform());
            let engine = compute_topic_emotion(&dataset, &chain_config).map_err(|e| format!("[chain] {e}"))?;
            let oracle = oracle_recompute(&dataset, &chain_config).map_err(|e| format!("[oracle] {e}"))?;
            if engine.posts.len() != oracle.posts.len() {
                return Err(format!(
                    "engine has {} post clusters, oracle {}",
                    engine.posts.len(),
                    oracle.posts.len()
                ));
            }
            let mut worst: f64 = 0.0;
            for (e, o) in engine.posts.iter().zip(&oracle.posts) {
                if e.post_id != o.post_id {
                    return Err(format!("post order differs: {} vs {}", e.post_id, o.post_id));
                }
                worst = worst.max((e.value - o.value).abs());
            }
            match (engine.value, oracle.topic) {
                (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
                (None, None) => {}
                (a, b) => return Err(format!("topic value differs: {a:?} vs {b:?}")),
            }
            println!("posts: {}  max |engine - oracle|: {worst:e}", engine.posts.len());
            if worst > ORACLE_TOLERANCE {
                return Err(format!("difference {worst:e} exceeds {ORACLE_TOLERANCE:e}"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GROUP_EMOTION_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
