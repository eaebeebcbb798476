//! Command-line front end: train, classify, eval, ablate, inspect.
//!
//! Exit codes: 0 success, 1 usage or configuration errors, 2 data or model
//! errors. Results go to stdout, diagnostics to stderr. Every run prints
//! its seed in a `#` header line so it can be reproduced.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wsd_core::classifier::TrainedModel;
use wsd_core::corpus::Dataset;
use wsd_core::eval::{ablate, instance_rng, run_trials, EvalError, TrialConfig};
use wsd_core::features::{FeatureSchema, FeatureSources, SchemaParams, COLLOCATION_OFFSETS};

#[derive(Parser)]
#[command(
    name = "wsd",
    version,
    about = "Exemplar-based word sense disambiguation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a per-word model from a sense-tagged corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Where to write the model file.
        #[arg(long)]
        out: PathBuf,
        /// Minimum conditional probability for value selection.
        #[arg(long, default_value_t = 0.8)]
        m1: f64,
        /// Minimum per-sense co-occurrence count.
        #[arg(long, default_value_t = 5)]
        m2: u32,
        /// Per-sense cap on selected values.
        #[arg(long, default_value_t = 5)]
        m3: u32,
    },
    /// Classify every instance of a corpus against a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run repeated random train/test trials and report accuracies.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "test-size", default_value_t = 600)]
        test_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated knowledge sources: pos,words,colloc,verb.
        #[arg(long, default_value = "pos,words,colloc,verb")]
        features: String,
        #[arg(long, default_value_t = 0.8)]
        m1: f64,
        #[arg(long, default_value_t = 5)]
        m2: u32,
        #[arg(long, default_value_t = 5)]
        m3: u32,
    },
    /// Run the trial protocol once per single knowledge source.
    Ablate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "test-size", default_value_t = 600)]
        test_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        m1: f64,
        #[arg(long, default_value_t = 5)]
        m2: u32,
        #[arg(long, default_value_t = 5)]
        m3: u32,
    },
    /// Print a trained model's schema in human-readable form.
    Inspect {
        #[arg(long)]
        model: PathBuf,
    },
}

enum CliError {
    /// Usage or configuration problem: exit 1.
    Usage(String),
    /// Data or model problem: exit 2.
    Data(String),
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Config(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train {
            corpus,
            out,
            m1,
            m2,
            m3,
        } => {
            let params = check_params(m1, m2, m3)?;
            let dataset = read_corpus(&corpus)?;
            let refs: Vec<_> = dataset.instances.iter().collect();
            let schema = FeatureSchema::induce(
                &dataset.word,
                dataset.pos,
                &dataset.senses,
                &refs,
                params,
                FeatureSources::ALL,
            )
            .map_err(|e| CliError::Data(e.to_string()))?;
            let examples = refs
                .iter()
                .map(|inst| schema.encode(inst))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Data(e.to_string()))?;
            let model =
                TrainedModel::train(schema, examples).map_err(|e| CliError::Data(e.to_string()))?;
            fs::write(&out, model.save())
                .map_err(|e| CliError::Data(format!("cannot write {}: {e}", out.display())))?;
            eprintln!(
                "trained `{}`/{}: {} exemplars, {} senses -> {}",
                model.word,
                model.pos,
                model.exemplars.len(),
                model.senses.len(),
                out.display()
            );
            Ok(())
        }
        Command::Classify {
            model,
            corpus,
            seed,
        } => {
            let model = read_model(&model)?;
            let dataset = read_corpus(&corpus)?;
            if dataset.word != model.word || dataset.pos != model.pos {
                return Err(CliError::Data(format!(
                    "corpus is for `{}`/{} but model is for `{}`/{}",
                    dataset.word, dataset.pos, model.word, model.pos
                )));
            }
            let mut out = String::new();
            out.push_str(&format!("# seed={seed}\n"));
            for inst in &dataset.instances {
                let encoded = model
                    .schema
                    .encode(inst)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let mut rng = instance_rng(seed, &inst.id);
                let got = model
                    .classify(&encoded, &mut rng)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                out.push_str(&format!(
                    "{}\t{}\t{:.4}\n",
                    inst.id, got.sense, got.distance
                ));
            }
            print!("{out}");
            Ok(())
        }
        Command::Eval {
            corpus,
            trials,
            test_size,
            seed,
            features,
            m1,
            m2,
            m3,
        } => {
            let params = check_params(m1, m2, m3)?;
            let sources = FeatureSources::parse_flags(&features).map_err(CliError::Usage)?;
            let dataset = read_corpus(&corpus)?;
            let config = TrialConfig {
                n_trials: trials,
                test_size,
                seed,
                sources,
                params,
            };
            let report = run_trials(&dataset, &config)?;
            println!(
                "# seed={seed} trials={trials} test-size={test_size} features={} m1={m1} m2={m2} m3={m3}",
                sources.flags()
            );
            print!("{}", report.to_tsv());
            Ok(())
        }
        Command::Ablate {
            corpus,
            trials,
            test_size,
            seed,
            m1,
            m2,
            m3,
        } => {
            let params = check_params(m1, m2, m3)?;
            let dataset = read_corpus(&corpus)?;
            let config = TrialConfig {
                n_trials: trials,
                test_size,
                seed,
                sources: FeatureSources::ALL,
                params,
            };
            println!("# seed={seed} trials={trials} test-size={test_size} m1={m1} m2={m2} m3={m3}");
            for (source, report) in ablate(&dataset, &config)? {
                println!("# features={source}");
                print!("{}", report.to_tsv());
                println!();
            }
            Ok(())
        }
        Command::Inspect { model } => {
            let model = read_model(&model)?;
            print!("{}", render_schema(&model));
            Ok(())
        }
    }
}

fn check_params(m1: f64, m2: u32, m3: u32) -> Result<SchemaParams, CliError> {
    if !(0.0..=1.0).contains(&m1) {
        return Err(CliError::Usage(format!("--m1 must be in [0,1], got {m1}")));
    }
    if m2 == 0 || m3 == 0 {
        return Err(CliError::Usage(
            "--m2 and --m3 must be positive".to_string(),
        ));
    }
    Ok(SchemaParams { m1, m2, m3 })
}

fn read_corpus(path: &Path) -> Result<Dataset, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Dataset::parse(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> Result<TrainedModel, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    TrainedModel::load(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn render_schema(model: &TrainedModel) -> String {
    let schema = &model.schema;
    let mut out = String::new();
    out.push_str(&format!("word: {}\n", model.word));
    out.push_str(&format!("pos: {}\n", model.pos));
    out.push_str(&format!("senses: {}\n", model.senses.join(" ")));
    out.push_str(&format!("exemplars: {}\n", model.exemplars.len()));
    out.push_str(&format!(
        "params: m1={} m2={} m3={}\n",
        schema.params.m1, schema.params.m2, schema.params.m3
    ));
    out.push_str(&format!("sources: {}\n", schema.sources.flags()));
    out.push_str(&format!(
        "keywords ({}): {}\n",
        schema.keywords.len(),
        schema.keywords.join(" ")
    ));
    for (j, (l, r)) in COLLOCATION_OFFSETS.iter().enumerate() {
        let values: Vec<String> = schema.colloc_values[j]
            .iter()
            .map(|v| format!("\"{v}\""))
            .collect();
        out.push_str(&format!(
            "collocations C{}({l},{r}) ({}): {}\n",
            j + 1,
            values.len(),
            values.join(" ")
        ));
    }
    if schema.verbs.is_empty() {
        out.push_str("verbs: (none)\n");
    } else {
        let verbs: Vec<&str> = schema.verbs.iter().map(String::as_str).collect();
        out.push_str(&format!("verbs: {}\n", verbs.join(" ")));
    }
    out
}
