//! Evaluation harness: built-in prototype glyphs, seeded noise
//! perturbation, recognition-rate evaluation, and the end-to-end experiment
//! driver.
//!
//! All randomness flows through ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! from the experiment seed, so identical configurations produce
//! byte-identical reports.

mod glyphs;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::net::{KnowledgeBase, LabelTable, NetError, TargetVector};
use crate::preprocess::{encode, to_grid, BinaryGrid, FeatureVector};

pub use glyphs::{GLYPH_COLS, GLYPH_ROWS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("flip_rate {0} out of range [0, 1]")]
    InvalidFlipRate(f64),
    #[error("trials must be at least 1")]
    InvalidTrials,
    #[error("rows and cols must be at least 1")]
    InvalidGrid,
    #[error("membership threshold {0} out of range [-1, 1]")]
    InvalidMembership(f64),
    #[error("flip_rates must contain at least one entry")]
    EmptyFlipRates,
    #[error("manifest line {line}: {detail}")]
    BadManifest { line: usize, detail: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// The built-in 8x6 glyph for one of the 52 letters.
pub fn prototype(label: &str) -> Result<BinaryGrid, HarnessError> {
    glyphs::GLYPHS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, rows)| glyphs::glyph_grid(rows))
        .ok_or_else(|| HarnessError::UnknownLabel(label.to_string()))
}

/// Toggles each cell independently with probability `flip_rate`, drawing
/// from a ChaCha8 stream seeded with `seed`; the same arguments always
/// produce the same output.
pub fn perturb(grid: &BinaryGrid, flip_rate: f64, seed: u64) -> BinaryGrid {
    debug_assert!((0.0..=1.0).contains(&flip_rate));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = grid
        .cells()
        .iter()
        .map(|&cell| {
            if rng.gen::<f64>() < flip_rate {
                cell ^ 1
            } else {
                cell
            }
        })
        .collect();
    BinaryGrid::new(grid.rows(), grid.cols(), cells)
}

/// Per-class tallies of one evaluation pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassStats {
    pub label: String,
    pub tested: u32,
    pub correct: u32,
    /// Labels wrongly predicted for patterns of this class; never contains
    /// the class itself.
    pub false_matches: BTreeSet<String>,
}

impl ClassStats {
    /// `100 * correct / tested`, or 0 when untested.
    pub fn rate_percent(&self) -> f64 {
        if self.tested > 0 {
            100.0 * f64::from(self.correct) / f64::from(self.tested)
        } else {
            0.0
        }
    }
}

/// One recognition-rate table (fixed noise level) over every class.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub flip_rate: f64,
    pub per_class: Vec<ClassStats>,
}

impl RateTable {
    /// `100 * total correct / total tested` across all classes.
    pub fn overall_rate(&self) -> f64 {
        let tested: u64 = self.per_class.iter().map(|s| u64::from(s.tested)).sum();
        let correct: u64 = self.per_class.iter().map(|s| u64::from(s.correct)).sum();
        if tested > 0 {
            100.0 * correct as f64 / tested as f64
        } else {
            0.0
        }
    }
}

/// Classifies every `(pattern, true label)` pair and tallies per-class
/// recognition counts and false-match sets. Order of the test sequence
/// does not affect the result.
pub fn evaluate(
    kb: &KnowledgeBase,
    tests: &[(FeatureVector, String)],
    membership_threshold: f64,
) -> Result<Vec<ClassStats>, HarnessError> {
    let mut stats: Vec<ClassStats> = kb
        .labels()
        .iter()
        .map(|label| ClassStats {
            label: label.to_string(),
            tested: 0,
            correct: 0,
            false_matches: BTreeSet::new(),
        })
        .collect();
    for (pattern, label) in tests {
        let index = kb
            .labels()
            .index_of(label)
            .ok_or_else(|| HarnessError::UnknownLabel(label.clone()))?;
        let result = kb.classify(pattern, membership_threshold)?;
        stats[index].tested += 1;
        if result.predicted_index == index {
            stats[index].correct += 1;
        } else {
            stats[index].false_matches.insert(result.predicted);
        }
    }
    Ok(stats)
}

/// Experiment parameters; every field is echoed into the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    /// Binarization threshold echo (applies when images are preprocessed).
    pub threshold: u32,
    pub membership: f64,
    pub flip_rates: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rows: 8,
            cols: 6,
            threshold: 128,
            membership: 0.5,
            flip_rates: vec![0.0, 0.05, 0.1, 0.2, 0.3],
            trials: 100,
            seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.rows < 1 || self.cols < 1 {
            return Err(HarnessError::InvalidGrid);
        }
        if !(-1.0..=1.0).contains(&self.membership) {
            return Err(HarnessError::InvalidMembership(self.membership));
        }
        if self.flip_rates.is_empty() {
            return Err(HarnessError::EmptyFlipRates);
        }
        for &rate in &self.flip_rates {
            if !(0.0..=1.0).contains(&rate) {
                return Err(HarnessError::InvalidFlipRate(rate));
            }
        }
        if self.trials < 1 {
            return Err(HarnessError::InvalidTrials);
        }
        Ok(())
    }
}

/// Recognition rates over the configured noise sweep, one table per flip
/// rate, with the configuration and seed echoed for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionReport {
    pub config: ExperimentConfig,
    pub tables: Vec<RateTable>,
}

impl RecognitionReport {
    /// Plain-text rendering with one results table per noise level.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        writeln!(out, "hebchar recognition report").unwrap();
        writeln!(
            out,
            "seed {}  grid {}x{}  binarize-threshold {}  membership {}  trials/class {}",
            c.seed, c.rows, c.cols, c.threshold, c.membership, c.trials
        )
        .unwrap();
        for table in &self.tables {
            writeln!(out).unwrap();
            writeln!(
                out,
                "flip_rate {}  overall {:.2}%",
                table.flip_rate,
                table.overall_rate()
            )
            .unwrap();
            let header = format!("{:<11}{:<24}", "Character", "Recognition Rate (%)");
            writeln!(out, "{header}False Matching with other Character").unwrap();
            for stats in &table.per_class {
                let false_matches = if stats.false_matches.is_empty() {
                    "-".to_string()
                } else {
                    stats
                        .false_matches
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                writeln!(
                    out,
                    "{:<11}{:<24}{}",
                    stats.label,
                    format!("{:.2}", stats.rate_percent()),
                    false_matches
                )
                .unwrap();
            }
        }
        out
    }

    /// Machine-readable CSV: a versioned header comment, the configuration
    /// echo, one column header, then per noise level a `# flip_rate=` block
    /// of rows `label,tested,correct,rate_percent,false_matches`.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let rates: Vec<String> = c.flip_rates.iter().map(f64::to_string).collect();
        let mut out = String::new();
        writeln!(out, "# hebchar-report v1").unwrap();
        writeln!(
            out,
            "# seed={} rows={} cols={} threshold={} membership={} trials={} flip_rates={}",
            c.seed,
            c.rows,
            c.cols,
            c.threshold,
            c.membership,
            c.trials,
            rates.join(",")
        )
        .unwrap();
        writeln!(out, "label,tested,correct,rate_percent,false_matches").unwrap();
        for table in &self.tables {
            writeln!(
                out,
                "# flip_rate={} overall={:.2}",
                table.flip_rate,
                table.overall_rate()
            )
            .unwrap();
            for stats in &table.per_class {
                let false_matches: Vec<&str> =
                    stats.false_matches.iter().map(String::as_str).collect();
                writeln!(
                    out,
                    "{},{},{},{:.2},{}",
                    stats.label,
                    stats.tested,
                    stats.correct,
                    stats.rate_percent(),
                    false_matches.join(";")
                )
                .unwrap();
            }
        }
        out
    }
}

/// Prototype regridded onto the configured feature grid (identity for the
/// native 8x6 shape).
fn prototype_on_grid(label: &str, rows: usize, cols: usize) -> Result<BinaryGrid, HarnessError> {
    let glyph = prototype(label)?;
    if glyph.rows() == rows && glyph.cols() == cols {
        Ok(glyph)
    } else {
        Ok(to_grid(&glyph.to_image(), rows, cols))
    }
}

/// Trains a fresh knowledge base on the 52 prototypes, generates
/// `trials x 52` perturbed patterns per flip rate, and evaluates them.
///
/// Per-pattern seeds are drawn from a ChaCha8 stream seeded with
/// `config.seed`, iterating flip rates, then classes, then trials, so the
/// whole experiment is reproducible from the configuration alone.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RecognitionReport, HarnessError> {
    config.validate()?;
    let labels = LabelTable::english_alphabet();
    let dim = config.rows * config.cols;

    let mut kb = KnowledgeBase::new(dim, labels.clone());
    let mut base_grids = Vec::with_capacity(labels.len());
    for (index, label) in labels.iter().enumerate() {
        let grid = prototype_on_grid(label, config.rows, config.cols)?;
        kb.train(&encode(&grid), &TargetVector::new(index, labels.len())?)?;
        base_grids.push(grid);
    }

    let mut seed_stream = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tables = Vec::with_capacity(config.flip_rates.len());
    for &flip_rate in &config.flip_rates {
        let mut tests = Vec::with_capacity(labels.len() * config.trials as usize);
        for (index, label) in labels.iter().enumerate() {
            for _ in 0..config.trials {
                let pattern_seed = seed_stream.gen::<u64>();
                let noisy = perturb(&base_grids[index], flip_rate, pattern_seed);
                tests.push((encode(&noisy), label.to_string()));
            }
        }
        let per_class = evaluate(&kb, &tests, config.membership)?;
        tables.push(RateTable {
            flip_rate,
            per_class,
        });
    }
    Ok(RecognitionReport {
        config: config.clone(),
        tables,
    })
}

/// Labeled image paths for training, serialized as `path,label` CSV rows
/// under a versioned header comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub entries: Vec<(PathBuf, String)>,
}

impl DatasetManifest {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# hebchar-manifest v1\npath,label\n");
        for (path, label) in &self.entries {
            writeln!(out, "{},{}", path.display(), label).unwrap();
        }
        out
    }

    /// Parses the manifest format; `#` lines are comments and the first
    /// data line must be the `path,label` header. Paths must be unique.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries: Vec<(PathBuf, String)> = Vec::new();
        let mut saw_header = false;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "path,label" {
                    return Err(HarnessError::BadManifest {
                        line: number + 1,
                        detail: "expected header \"path,label\"".to_string(),
                    });
                }
                saw_header = true;
                continue;
            }
            let (path, label) = line.rsplit_once(',').ok_or(HarnessError::BadManifest {
                line: number + 1,
                detail: "expected \"path,label\"".to_string(),
            })?;
            if path.is_empty() || label.is_empty() {
                return Err(HarnessError::BadManifest {
                    line: number + 1,
                    detail: "path and label must be non-empty".to_string(),
                });
            }
            if entries.iter().any(|(p, _)| p == &PathBuf::from(path)) {
                return Err(HarnessError::BadManifest {
                    line: number + 1,
                    detail: format!("duplicate path {path:?}"),
                });
            }
            entries.push((PathBuf::from(path), label.to_string()));
        }
        if !saw_header {
            return Err(HarnessError::BadManifest {
                line: 1,
                detail: "missing \"path,label\" header".to_string(),
            });
        }
        Ok(Self { entries })
    }
}
