use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctsev::classifiers::ModelKind;
use ctsev::commands::*;
use ctsev::config::RunConfig;
use ctsev::phantom::CorpusParams;
use ctsev::Result;

#[derive(Parser)]
#[command(name = "ctsev", version, about = "CT severity classification from lung infection rates")]
struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable); wins over --config
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Worker thread cap; results do not depend on it
    #[arg(long, env = "CTSEV_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Directory with one subdirectory of slices per scan
    #[arg(long, conflicts_with = "rates", required_unless_present = "rates")]
    scan_root: Option<PathBuf>,
    /// Directory with one lung-mask subdirectory per scan
    #[arg(long, requires = "scan_root")]
    mask_root: Option<PathBuf>,
    /// Rates CSVs from `segment` (repeatable)
    #[arg(long, num_args = 1..)]
    rates: Vec<PathBuf>,
}

impl Inputs {
    fn source(self) -> ScanSource {
        match self.scan_root {
            Some(root) => ScanSource::ScanRoot {
                root,
                mask_root: self.mask_root,
            },
            None => ScanSource::Rates(self.rates),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Segment infection on every slice of one scan
    Segment {
        scan: PathBuf,
        #[arg(long)]
        masks: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write per-slice infection masks
        #[arg(long)]
        write_masks: bool,
        /// Write intermediate images of retained slices here
        #[arg(long)]
        debug_dir: Option<PathBuf>,
    },
    /// Build the 80-column feature CSV
    Featurize {
        #[command(flatten)]
        inputs: Inputs,
        /// CSV with id and class columns
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train a model on a labeled feature CSV
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "ensemble")]
        model: ModelKind,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Predict classes for a feature CSV
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train and score models on stratified splits
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        /// Comma-separated model kinds
        #[arg(long, value_delimiter = ',', default_value = "ert,gboost,svm,ensemble")]
        models: Vec<ModelKind>,
        /// Hold-out size (ignored with --folds)
        #[arg(long, default_value_t = 50)]
        test_size: usize,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, default_value_t = 1)]
        split_seed: u64,
        /// WAM CSV to score on the same rows
        #[arg(long)]
        wam: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Rule-based WAM classes
    Wam {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Generate a labeled phantom corpus
    Phantom {
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        slices: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(cli.set.iter().map(String::as_str))?;
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.validate()?;
    let threads = cfg.threads;
    with_threads(threads, move || match cli.command {
        Command::Segment {
            scan,
            masks,
            out,
            write_masks,
            debug_dir,
        } => {
            let s = cmd_segment(
                &SegmentArgs {
                    scan,
                    masks,
                    out,
                    write_masks,
                    debug_dir,
                },
                &cfg,
            )?;
            println!("{} slices, {} retained", s.slices, s.retained);
            Ok(())
        }
        Command::Featurize { inputs, labels, out } => {
            let s = cmd_featurize(
                &FeaturizeArgs {
                    source: inputs.source(),
                    labels,
                    out,
                },
                &cfg,
            )?;
            println!("{} rows, {} excluded", s.rows, s.excluded.len());
            Ok(())
        }
        Command::Train { features, model, out } => {
            cmd_train(&TrainArgs { features, kind: model, out }, &cfg)?;
            Ok(())
        }
        Command::Predict { model, features, out } => {
            cmd_predict(&PredictArgs { model, features, out })?;
            Ok(())
        }
        Command::Evaluate {
            features,
            models,
            test_size,
            folds,
            split_seed,
            wam,
            out,
        } => {
            let protocol = match folds {
                Some(k) => Protocol::KFold { k },
                None => Protocol::Holdout { test_size },
            };
            let args = EvaluateArgs {
                features,
                models,
                protocol,
                split_seed,
                wam,
                out_dir: out,
            };
            cmd_evaluate(&args, &cfg)?;
            print!("{}", std::fs::read_to_string(args.out_dir.join("report.txt")).unwrap_or_default());
            Ok(())
        }
        Command::Wam { inputs, out } => {
            cmd_wam(
                &WamArgs {
                    source: inputs.source(),
                    out,
                },
                &cfg,
            )?;
            Ok(())
        }
        Command::Phantom {
            out,
            per_class,
            seed,
            slices,
            size,
            noise,
        } => {
            let mut p = CorpusParams::new(per_class, seed);
            p.n_slices = slices.unwrap_or(p.n_slices);
            p.size = size.unwrap_or(p.size);
            p.noise = noise.unwrap_or(p.noise);
            let n = cmd_phantom(&p, &out)?;
            println!("{n} scans");
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ctsev: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
