//! `irony`: train, apply and evaluate the tweet irony ensemble.
//!
//! Exit codes: 0 ok, 2 usage, 3 I/O, 4 parse/validation, 5 missing
//! resource, 6 configuration, 7 task mismatch, 8 model file integrity or
//! version, 9 internal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use irony_core::brown::{collect_bigram_stats, train_brown};
use irony_core::config::{ConfigFile, FeaturesSection, MlpSection, PathsSection, RunConfig};
use irony_core::corpus::{load_dataset, load_unlabeled, write_dataset, RawTweet, Task};
use irony_core::ensemble::{read_predictions, write_predictions};
use irony_core::metrics::{evaluate_with, MacroF1};
use irony_core::normalize::Normalizer;
use irony_core::persist::{load_model, save_model};
use irony_core::resources::ResourceBundle;
use irony_core::tagger::read_sidecar_tags;
use irony_core::tokenize::tokenize;
use irony_core::workflow::{self, check_task, load_resources, predict_tweets, resource_dir};
use irony_core::{IronyError, Result};

#[derive(Parser)]
#[command(name = "irony", version, about = "Irony detection for English tweets")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the feature pipeline and the voting ensemble, write a model file.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Output model file.
        #[arg(short, long)]
        model: Option<PathBuf>,
        /// Directory for per-member training curves (CSV).
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
    /// Predict labels for a dataset with a trained model.
    Predict {
        #[arg(short, long)]
        model: PathBuf,
        /// `index \t text` or `index \t label \t text` rows.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Fail unless the model was trained for this task.
        #[arg(long)]
        task: Option<Task>,
        /// Pre-computed POS tags (`id \t tags`).
        #[arg(long)]
        tags: Option<PathBuf>,
    },
    /// Score a predictions file against gold labels.
    Evaluate {
        #[arg(short, long)]
        predictions: PathBuf,
        #[arg(short, long)]
        gold: PathBuf,
        #[arg(long)]
        task: Task,
        #[arg(long, value_enum, default_value_t = MacroArg::MeanOfF1)]
        r#macro: MacroArg,
        /// Also write the report as TSV.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Write the normalized text of every tweet.
    Normalize {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        resources: Option<PathBuf>,
    },
    /// Brown-cluster the normalized tokens of a dataset.
    Brown {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(short = 'c', long, default_value_t = 100)]
        clusters: usize,
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[arg(long)]
        resources: Option<PathBuf>,
    },
    /// Export the scaled feature matrix a model computes for a dataset.
    Features {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        tags: Option<PathBuf>,
    },
    /// Repeated k-fold cross-validation of the whole training procedure.
    Cv {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Per-fold results as TSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MacroArg {
    MeanOfF1,
    F1OfMeans,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    task: Option<Task>,
    /// Labeled training dataset.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    resources: Option<PathBuf>,
    #[arg(long)]
    tagger: Option<PathBuf>,
    /// Whitespace-separated `word v1 v2 ...` embedding file.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    embedding_dim: Option<usize>,
    #[arg(long)]
    tags: Option<PathBuf>,
    /// Extra tokenized sentences for Brown clustering.
    #[arg(long)]
    brown_corpus: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble members trained concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Hidden layer sizes, e.g. `800,400`.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    no_lexical: bool,
    #[arg(long)]
    no_syntactic: bool,
    #[arg(long)]
    no_semantic: bool,
    #[arg(long)]
    no_polarity: bool,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    lsi_rank: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    brown_clusters: Option<Vec<usize>>,
    #[arg(long)]
    brown_min_count: Option<u64>,
    /// `randomized` or `dense`.
    #[arg(long)]
    svd: Option<String>,
}

fn off(flag: bool) -> Option<bool> {
    flag.then_some(false)
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            task: self.task,
            seed: self.seed,
            jobs: self.jobs,
            folds: self.folds,
            paths: PathsSection {
                train: self.train.clone(),
                test: None,
                model: None,
                resources: self.resources.clone(),
                tagger: self.tagger.clone(),
                embeddings: self.embeddings.clone(),
                embedding_dim: self.embedding_dim,
                tags: self.tags.clone(),
                brown_corpus: self.brown_corpus.clone(),
            },
            mlp: MlpSection {
                hidden: match self.hidden.as_deref() {
                    None => None,
                    Some(&[h1, h2]) => Some([h1, h2]),
                    Some(_) => {
                        return Err(IronyError::Config(
                            "--hidden takes two sizes, e.g. 800,400".into(),
                        ))
                    }
                },
                learning_rate: self.learning_rate,
                l2: self.l2,
                max_epochs: self.epochs,
                patience: self.patience,
                batch_size: self.batch_size,
            },
            features: FeaturesSection {
                lexical: off(self.no_lexical),
                syntactic: off(self.no_syntactic),
                semantic: off(self.no_semantic),
                polarity: off(self.no_polarity),
                ngram_top_k: self.top_k,
                lsi_rank: self.lsi_rank,
                brown_clusters: self.brown_clusters.clone(),
                brown_min_count: self.brown_min_count,
                svd: self.svd.clone(),
            },
        };
        file.overlay(flags).resolve(None)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| IronyError::io(path, e))
}

fn plain_resources(dir: Option<PathBuf>) -> Result<ResourceBundle> {
    let paths = PathsSection {
        resources: dir,
        ..Default::default()
    };
    Ok(load_resources(&paths, 0)?.0)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            run,
            model,
            log_dir,
        } => {
            let cfg = run.resolve()?;
            let out = model
                .or_else(|| cfg.paths.model.clone())
                .ok_or_else(|| IronyError::Config("no output model path (--model)".into()))?;
            let trained = workflow::train_from_config(&cfg)?;
            save_model(&trained, &out)?;
            if let Some(dir) = log_dir {
                fs::create_dir_all(&dir).map_err(|e| IronyError::io(&dir, e))?;
                for (i, log) in trained.logs.iter().enumerate() {
                    write_text(&dir.join(format!("member-{i}.csv")), &log.to_csv())?;
                }
            }
            eprintln!(
                "trained task {} ensemble: {} members, {} features -> {}",
                trained.task,
                trained.members.len(),
                trained.pipeline.width(),
                out.display()
            );
        }
        Command::Predict {
            model,
            input,
            output,
            task,
            tags,
        } => {
            let model = load_model(&model)?;
            let tweets = load_unlabeled(&input)?;
            check_task(&model, task, &tweets)?;
            let sidecar = tags.map(read_sidecar_tags).transpose()?;
            let preds = predict_tweets(&model, &tweets, sidecar.as_ref())?;
            write_predictions(&output, &preds, model.members.len(), model.num_classes())?;
        }
        Command::Evaluate {
            predictions,
            gold,
            task,
            r#macro,
            tsv,
        } => {
            let preds = read_predictions(&predictions)?;
            let gold_corpus = load_dataset(&gold, task)?;
            let predicted: Vec<(u64, u32)> = preds;
            if let Some((id, l)) = predicted.iter().find(|(_, l)| !task.is_valid_label(*l)) {
                return Err(IronyError::TaskMismatch(format!(
                    "prediction {l} for tweet {id} is not a task {task} label"
                )));
            }
            let by_id: std::collections::BTreeMap<u64, u32> = predicted.iter().copied().collect();
            let mut gold_labels = Vec::new();
            let mut pred_labels = Vec::new();
            for t in &gold_corpus.tweets {
                let p = by_id.get(&t.id).ok_or_else(|| {
                    IronyError::Validation(format!("no prediction for tweet {}", t.id))
                })?;
                gold_labels.push(t.label.unwrap_or_default());
                pred_labels.push(*p);
            }
            if by_id.len() != gold_labels.len() {
                return Err(IronyError::Validation(format!(
                    "{} predictions for {} gold tweets",
                    by_id.len(),
                    gold_labels.len()
                )));
            }
            let macro_f1 = match r#macro {
                MacroArg::MeanOfF1 => MacroF1::MeanOfF1,
                MacroArg::F1OfMeans => MacroF1::F1OfMeans,
            };
            let report = evaluate_with(&gold_labels, &pred_labels, task, macro_f1)?;
            print!("{}", report.to_table());
            if let Some(p) = tsv {
                report.write_tsv(p)?;
            }
        }
        Command::Normalize {
            input,
            output,
            resources,
        } => {
            let bundle = plain_resources(resources)?;
            let normalizer = Normalizer::new(&bundle);
            let tweets: Vec<RawTweet> = load_unlabeled(&input)?
                .iter()
                .map(|t| RawTweet::new(t.id, normalizer.normalize(t).text, t.label))
                .collect();
            write_dataset(&output, &tweets)?;
        }
        Command::Brown {
            input,
            output,
            clusters,
            min_count,
            resources,
        } => {
            let bundle = plain_resources(resources)?;
            let normalizer = Normalizer::new(&bundle);
            let sentences: Vec<Vec<String>> = load_unlabeled(&input)?
                .iter()
                .map(|t| tokenize(&normalizer.normalize(t).text))
                .collect();
            let stats = collect_bigram_stats(sentences.iter().map(|s| s.as_slice()), min_count)?;
            let clustering = train_brown(&stats, clusters)?;
            clustering.export_tsv(&output)?;
            eprintln!(
                "{} words in {} clusters, AMI {:.6}",
                stats.vocab_size(),
                clustering.distinct_clusters(),
                clustering.ami
            );
        }
        Command::Features {
            model,
            input,
            output,
            tags,
        } => {
            let model = load_model(&model)?;
            let tweets = load_unlabeled(&input)?;
            check_task(&model, None, &tweets)?;
            let sidecar = tags.map(read_sidecar_tags).transpose()?;
            let prepared = model.pipeline.prepare(&tweets, sidecar.as_ref())?;
            let x = model.pipeline.transform_batch(&prepared)?;
            let ids: Vec<u64> = tweets.iter().map(|t| t.id).collect();
            model.pipeline.export_matrix(&output, &ids, &x)?;
        }
        Command::Cv {
            run,
            repeats,
            k,
            output,
        } => {
            let cfg = run.resolve()?;
            let train =
                cfg.paths.train.as_ref().ok_or_else(|| {
                    IronyError::Config("no training dataset given (--train)".into())
                })?;
            let corpus = load_dataset(train, cfg.task)?;
            let (resources, tagger) = load_resources(&cfg.paths, cfg.embedding_dim)?;
            log::info!("resources from {}", resource_dir(&cfg.paths).display());
            let summary =
                workflow::cross_validate(&corpus, &resources, &tagger, &cfg.ensemble, repeats, k)?;
            println!(
                "{repeats}x{k} cross-validation on {} tweets: accuracy {:.4}, f1 {:.4}, majority baseline {:.4}",
                corpus.len(),
                summary.mean_accuracy(),
                summary.mean_f1(),
                summary.mean_baseline()
            );
            if let Some(p) = output {
                write_text(&p, &summary.to_tsv())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
