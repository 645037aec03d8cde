//! Command-line front end: glyph generation, training, classification, and
//! the recognition-rate experiment.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data/format error.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use hebchar::harness::{self, DatasetManifest, ExperimentConfig};
use hebchar::net::{KnowledgeBase, LabelTable, NetError, TargetVector};
use hebchar::pnm::{parse_pnm, write_pnm, PnmImage};
use hebchar::preprocess::{pipeline, PreprocessConfig};

#[derive(Parser)]
#[command(
    name = "hebchar",
    version,
    about = "Handwritten character recognition with an outer-product knowledge base",
    after_help = "Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data/format error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the 52 built-in prototype glyphs as P1 files plus a manifest
    Gen {
        /// Output directory for <label>.pbm files and manifest.csv
        #[arg(long, default_value = "glyphs")]
        out: PathBuf,
    },
    /// Train a fresh knowledge base from a manifest of labeled images
    Train {
        /// Manifest CSV (paths are resolved relative to the manifest)
        #[arg(long)]
        manifest: PathBuf,
        /// Knowledge base output path
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Classify one image against a trained knowledge base
    Classify {
        /// Knowledge base file written by `train`
        #[arg(long)]
        kb: PathBuf,
        /// Image to classify (P1/P2/P4/P5)
        image: PathBuf,
        /// Membership threshold on the normalized score
        #[arg(long, default_value_t = 0.5)]
        membership: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Train on the built-in prototypes and evaluate perturbed patterns
    Experiment {
        /// key=value config file; explicit flags override its entries
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.txt and report.csv
        #[arg(long)]
        out: Option<PathBuf>,
        /// Feature grid rows [default: 8]
        #[arg(long)]
        rows: Option<usize>,
        /// Feature grid columns [default: 6]
        #[arg(long)]
        cols: Option<usize>,
        /// Binarization threshold [default: 128]
        #[arg(long)]
        threshold: Option<u32>,
        /// Membership threshold [default: 0.5]
        #[arg(long)]
        membership: Option<f64>,
        /// Comma-separated cell flip probabilities [default: 0,0.05,0.1,0.2,0.3]
        #[arg(long = "flip-rates", value_delimiter = ',')]
        flip_rates: Option<Vec<f64>>,
        /// Test patterns per class per flip rate [default: 100]
        #[arg(long)]
        trials: Option<u32>,
        /// Experiment seed [default: 42]
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Feature grid rows
    #[arg(long, default_value_t = 8)]
    rows: usize,
    /// Feature grid columns
    #[arg(long, default_value_t = 6)]
    cols: usize,
    /// Binarization threshold for grayscale inputs [default: (max_value+1)/2]
    #[arg(long)]
    threshold: Option<u32>,
}

impl GridArgs {
    fn preprocess_config(&self) -> PreprocessConfig {
        PreprocessConfig {
            rows: self.rows,
            cols: self.cols,
            threshold: self.threshold,
        }
    }
}

enum CliError {
    Usage(String),
    Io(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("hebchar: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { out } => cmd_gen(&out),
        Command::Train {
            manifest,
            out,
            grid,
        } => cmd_train(&manifest, &out, &grid),
        Command::Classify {
            kb,
            image,
            membership,
            grid,
        } => cmd_classify(&kb, &image, membership, &grid),
        Command::Experiment {
            config,
            out,
            rows,
            cols,
            threshold,
            membership,
            flip_rates,
            trials,
            seed,
        } => {
            let mut merged = ExperimentConfig::default();
            let mut out_dir = PathBuf::from("report");
            if let Some(path) = config {
                apply_config_file(&path, &mut merged, &mut out_dir)?;
            }
            if let Some(v) = rows {
                merged.rows = v;
            }
            if let Some(v) = cols {
                merged.cols = v;
            }
            if let Some(v) = threshold {
                merged.threshold = v;
            }
            if let Some(v) = membership {
                merged.membership = v;
            }
            if let Some(v) = flip_rates {
                merged.flip_rates = v;
            }
            if let Some(v) = trials {
                merged.trials = v;
            }
            if let Some(v) = seed {
                merged.seed = v;
            }
            if let Some(v) = out {
                out_dir = v;
            }
            cmd_experiment(&merged, &out_dir)
        }
    }
}

/// Writes to stdout in one shot; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(err) if err.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(err) => Err(CliError::Io(format!("cannot write to stdout: {err}"))),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display())))
}

fn cmd_gen(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)
        .map_err(|err| CliError::Io(format!("cannot create {}: {err}", out.display())))?;
    let labels = LabelTable::english_alphabet();
    let mut entries = Vec::with_capacity(labels.len());
    for label in labels.iter() {
        let grid = harness::prototype(label).expect("built-in prototype");
        let file = format!("{label}.pbm");
        let bytes = write_pnm(&PnmImage::Bitmap(grid.to_image()), true);
        write_file(&out.join(&file), &bytes)?;
        entries.push((PathBuf::from(file), label.to_string()));
    }
    let manifest = DatasetManifest { entries };
    write_file(&out.join("manifest.csv"), manifest.to_csv().as_bytes())?;
    emit(&format!(
        "wrote {} glyphs and manifest.csv to {}\n",
        labels.len(),
        out.display()
    ))
}

fn load_image(path: &Path) -> Result<PnmImage, CliError> {
    let bytes = read_file(path)?;
    parse_pnm(&bytes).map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
}

fn cmd_train(manifest_path: &Path, out: &Path, grid: &GridArgs) -> Result<(), CliError> {
    let text = read_file(manifest_path)?;
    let text = String::from_utf8(text)
        .map_err(|_| CliError::Data(format!("{}: not valid UTF-8", manifest_path.display())))?;
    let manifest = DatasetManifest::parse(&text)
        .map_err(|err| CliError::Data(format!("{}: {err}", manifest_path.display())))?;
    if manifest.entries.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no training data",
            manifest_path.display()
        )));
    }

    let base_dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let labels = LabelTable::english_alphabet();
    let config = grid.preprocess_config();
    let mut kb = KnowledgeBase::new(config.rows * config.cols, labels.clone());
    for (rel_path, label) in &manifest.entries {
        let index = labels.index_of(label).ok_or_else(|| {
            CliError::Data(format!(
                "unknown label {label:?} in {}",
                manifest_path.display()
            ))
        })?;
        let path = base_dir.join(rel_path);
        let image = load_image(&path)?;
        let features = pipeline(&image, &config)
            .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?;
        kb.train(
            &features,
            &TargetVector::new(index, labels.len()).expect("valid index"),
        )
        .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?;
    }
    write_file(out, &kb.to_bytes())?;
    let mut summary = format!(
        "trained {} samples over {} classes -> {}\n",
        manifest.entries.len(),
        kb.counts().iter().filter(|&&n| n > 0).count(),
        out.display()
    );
    for (index, label) in labels.iter().enumerate() {
        summary.push_str(&format!("{label} {}\n", kb.count(index)));
    }
    emit(&summary)
}

fn cmd_classify(
    kb_path: &Path,
    image_path: &Path,
    membership: f64,
    grid: &GridArgs,
) -> Result<(), CliError> {
    let kb = KnowledgeBase::from_bytes(&read_file(kb_path)?)
        .map_err(|err| CliError::Data(format!("{}: {err}", kb_path.display())))?;
    if grid.rows * grid.cols != kb.dim() {
        return Err(CliError::Usage(format!(
            "grid {}x{} = {} features does not match knowledge base dimension {}",
            grid.rows,
            grid.cols,
            grid.rows * grid.cols,
            kb.dim()
        )));
    }
    let image = load_image(image_path)?;
    let features = pipeline(&image, &grid.preprocess_config())
        .map_err(|err| CliError::Data(format!("{}: {err}", image_path.display())))?;
    let result = kb
        .classify(&features, membership)
        .map_err(|err: NetError| CliError::Data(err.to_string()))?;
    let best = result.normalized[result.predicted_index];
    emit(&format!(
        "{} normalized={:.4} member={}\n",
        result.predicted, best, result.member
    ))
}

fn cmd_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    config
        .validate()
        .map_err(|err| CliError::Data(err.to_string()))?;
    let report = harness::run_experiment(config).map_err(|err| CliError::Data(err.to_string()))?;
    fs::create_dir_all(out_dir)
        .map_err(|err| CliError::Io(format!("cannot create {}: {err}", out_dir.display())))?;
    write_file(&out_dir.join("report.txt"), report.to_text().as_bytes())?;
    write_file(&out_dir.join("report.csv"), report.to_csv().as_bytes())?;
    let mut summary = String::new();
    for table in &report.tables {
        summary.push_str(&format!(
            "flip_rate {} overall {:.2}%\n",
            table.flip_rate,
            table.overall_rate()
        ));
    }
    summary.push_str(&format!("reports written to {}\n", out_dir.display()));
    emit(&summary)
}

/// Flat key=value experiment configuration. Unknown keys and malformed
/// values are data errors naming the offending field.
fn apply_config_file(
    path: &Path,
    config: &mut ExperimentConfig,
    out_dir: &mut PathBuf,
) -> Result<(), CliError> {
    let text = String::from_utf8(read_file(path)?)
        .map_err(|_| CliError::Data(format!("{}: not valid UTF-8", path.display())))?;
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Data(format!(
                "{}:{}: expected key=value",
                path.display(),
                number + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad_value = |field: &str| {
            CliError::Data(format!(
                "{}:{}: invalid value {value:?} for {field}",
                path.display(),
                number + 1
            ))
        };
        match key {
            "rows" => config.rows = value.parse().map_err(|_| bad_value("rows"))?,
            "cols" => config.cols = value.parse().map_err(|_| bad_value("cols"))?,
            "threshold" => config.threshold = value.parse().map_err(|_| bad_value("threshold"))?,
            "membership" => {
                config.membership = value.parse().map_err(|_| bad_value("membership"))?
            }
            "flip_rates" => {
                config.flip_rates = value
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad_value("flip_rates"))?
            }
            "trials" => config.trials = value.parse().map_err(|_| bad_value("trials"))?,
            "seed" => config.seed = value.parse().map_err(|_| bad_value("seed"))?,
            "out" => *out_dir = PathBuf::from(value),
            _ => {
                return Err(CliError::Data(format!(
                    "{}:{}: unknown config key {key:?}",
                    path.display(),
                    number + 1
                )))
            }
        }
    }
    Ok(())
}
