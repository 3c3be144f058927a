//! `rfmap`: dataset pipeline driver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rfmap_core::corruption::CorruptedDocument;
use rfmap_core::metrics::{markdown_table, write_samples_csv, TableRow};
use rfmap_core::pipeline::{
    self, read_json, to_pretty_json, write_if_changed, LabelSource, MapSource, PipelineConfig,
    PipelineError, Split,
};
use rfmap_core::refine::{CurveSet, RefinementConfig};
use rfmap_core::rfsim::{Granularity, NoiseSetting, RfDocument};

#[derive(Parser, Debug)]
#[command(
    name = "rfmap",
    version,
    about = "Corrupt, refine and evaluate building maps with RF observations"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Pipeline config, TOML or JSON. Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset root directory.
    #[arg(long, global = true)]
    root: Option<PathBuf>,
    /// Global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Corruption severity level: 1, 1.5 or 2.
    #[arg(long, global = true)]
    severity: Option<String>,
    #[arg(long, global = true, value_parser = parse_granularity)]
    granularity: Option<Granularity>,
    #[arg(long, global = true, value_parser = parse_noise)]
    noise: Option<NoiseSetting>,
}

fn parse_granularity(s: &str) -> Result<Granularity, String> {
    match s {
        "r1" => Ok(Granularity::R1),
        "r2" => Ok(Granularity::R2),
        _ => Err("expected r1 or r2".into()),
    }
}

fn parse_noise(s: &str) -> Result<NoiseSetting, String> {
    match s {
        "none" => Ok(NoiseSetting::None),
        "28ghz" => Ok(NoiseSetting::Ghz28),
        "73ghz" => Ok(NoiseSetting::Ghz73),
        _ => Err("expected none, 28ghz or 73ghz".into()),
    }
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse().map_err(|e: PipelineError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate environments and index.json.
    Gen {
        /// Scale factor on the reference 8403/596/1000 split.
        #[arg(long)]
        scale: Option<f64>,
        /// Explicit split sizes, TRAIN,VAL,TEST.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
    },
    /// Write rf.json for every environment.
    SynthRf,
    /// Write corrupted.json for every environment.
    Corrupt,
    /// Refine corrupted maps, either for a dataset split or a single file set.
    Refine(RefineArgs),
    /// Score predicted maps against truth.
    Eval(EvalArgs),
    /// Write SVG overlays of input, prediction and truth contours.
    Render {
        #[arg(long, default_value = "test", value_parser = parse_split)]
        split: Split,
        /// Prediction source: truth, corrupted, refined or a predictions directory.
        #[arg(long, default_value = "refined")]
        prediction: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pack environments into one JSON-lines file for training.
    Export {
        #[arg(long)]
        out: PathBuf,
        /// Splits to include; all by default.
        #[arg(long, value_delimiter = ',', value_parser = parse_split)]
        split: Vec<Split>,
        /// Minimum number of radio tokens per training sample.
        #[arg(long, default_value_t = 10)]
        subset_min: usize,
    },
}

#[derive(Args, Debug)]
struct RefineArgs {
    #[arg(long, default_value = "classified", value_parser = |s: &str| s.parse::<LabelSource>().map_err(|e| e.to_string()))]
    labels: LabelSource,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    split: Split,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Single-file mode: corrupted.json to refine.
    #[arg(long, requires_all = ["rf", "out"])]
    input: Option<PathBuf>,
    /// Single-file mode: rf.json with the pair observations.
    #[arg(long, requires = "input")]
    rf: Option<PathBuf>,
    /// Single-file mode: output path.
    #[arg(long, requires = "input")]
    out: Option<PathBuf>,
    /// Single-file mode: curves.json, needed for classified labels.
    #[arg(long, requires = "input")]
    curves: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// truth, corrupted, refined, or a directory of <env_id>.json predictions.
    #[arg(long)]
    pred: String,
    #[arg(long, default_value = "truth")]
    truth: String,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    split: Split,
    /// Per-sample CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Labels for the summary table.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value = "yes")]
    map_column: String,
    #[arg(long, default_value = "none")]
    rf_column: String,
}

fn load_config(g: &GlobalArgs) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(r) = &g.root {
        cfg.root = r.clone();
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(s) = &g.severity {
        cfg.corruption.severity = s.clone();
        cfg.corruption.params = None;
    }
    if let Some(x) = g.granularity {
        cfg.granularity = x;
    }
    if let Some(x) = g.noise {
        cfg.noise = x;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn refine_single(
    args: &RefineArgs,
    cfg: &PipelineConfig,
    seed: Option<u64>,
) -> Result<(), PipelineError> {
    let (input, rf, out) = (
        args.input.as_ref().unwrap(),
        args.rf.as_ref().unwrap(),
        args.out.as_ref().unwrap(),
    );
    let corrupted: CorruptedDocument = read_json(input, "corrupted map")?;
    let rf: RfDocument = read_json(rf, "rf observations")?;
    let curves: Option<CurveSet> = match &args.curves {
        Some(p) => Some(read_json(p, "fitted curves")?),
        None => None,
    };
    let rcfg = RefinementConfig {
        seed: seed.unwrap_or(cfg.refinement.seed),
        ..cfg.refinement.clone()
    };
    let doc = pipeline::refine_one(&corrupted, &rf, args.labels, curves.as_ref(), &rcfg)?;
    write_if_changed(out, &to_pretty_json(&doc))?;
    let s = &doc.summary;
    println!(
        "refined {}: {} iterations, {} stamps, violations {:?} -> {:?}",
        doc.env_id,
        s.iterations,
        s.accepted.len(),
        s.initial_violations,
        s.final_violations
    );
    Ok(())
}

fn eval(args: &EvalArgs, cfg: &PipelineConfig) -> Result<(), PipelineError> {
    let pred: MapSource = args.pred.parse()?;
    let truth: MapSource = args.truth.parse()?;
    let report = pipeline::evaluate(cfg, &pred, &truth, args.split)?;
    if let Some(p) = &args.csv {
        let mut buf = Vec::new();
        write_samples_csv(&report, &mut buf)?;
        write_if_changed(p, &String::from_utf8(buf).expect("csv is utf-8"))?;
    }
    if let Some(p) = &args.json {
        write_if_changed(p, &to_pretty_json(&report))?;
    }
    let method = args.method.clone().unwrap_or_else(|| args.pred.clone());
    print!(
        "{}",
        markdown_table(&[TableRow {
            method: &method,
            map: &args.map_column,
            rf: &args.rf_column,
            report: &report,
        }])
    );
    if report.distance_exclusions > 0 {
        println!(
            "\n{} samples excluded from distance means (empty foreground)",
            report.distance_exclusions
        );
    }
    let groups = report.group_table_markdown();
    if !groups.is_empty() {
        println!("\n{groups}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Gen { scale, counts } => {
            if let Some(s) = scale {
                cfg.splits.scale = s;
                cfg.splits.counts = None;
            }
            if let Some(c) = counts {
                let c: [usize; 3] = c.try_into().map_err(|_| {
                    PipelineError::Config("--counts takes exactly TRAIN,VAL,TEST".into())
                })?;
                cfg.splits.counts = Some(c);
            }
            let idx = pipeline::generate_dataset(&cfg)?;
            println!(
                "generated {} environments in {} (train {}, val {}, test {})",
                idx.train.len() + idx.val.len() + idx.test.len(),
                cfg.root.display(),
                idx.train.len(),
                idx.val.len(),
                idx.test.len()
            );
        }
        Command::SynthRf => println!(
            "wrote rf.json for {} environments",
            pipeline::synthesize_dataset(&cfg)?
        ),
        Command::Corrupt => println!(
            "wrote corrupted.json for {} environments",
            pipeline::corrupt_dataset(&cfg)?
        ),
        Command::Refine(args) => {
            if let Some(t) = args.max_iters {
                cfg.refinement.max_iterations = t;
            }
            if args.input.is_some() {
                refine_single(&args, &cfg, cli.global.seed)?;
            } else {
                let n = pipeline::refine_dataset(&cfg, args.labels, args.split)?;
                println!("wrote refined.json for {n} environments");
            }
        }
        Command::Eval(args) => eval(&args, &cfg)?,
        Command::Render {
            split,
            prediction,
            out,
        } => {
            let n = pipeline::render_dataset(&cfg, split, &prediction.parse()?, &out)?;
            println!("wrote {n} SVG files to {}", out.display());
        }
        Command::Export {
            out,
            split,
            subset_min,
        } => {
            let splits = if split.is_empty() {
                vec![Split::Train, Split::Val, Split::Test]
            } else {
                split
            };
            let n = pipeline::export_dataset(&cfg, &splits, subset_min, Path::new(&out))?;
            println!("exported {n} records to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
