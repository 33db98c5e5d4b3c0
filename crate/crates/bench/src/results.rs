//! Result rows and their JSON and CSV files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use subcons::{Bound, SolveReport};

use crate::algos::Problem;

pub const FORMAT_TAG: &str = "subcons-results";
pub const FORMAT_VERSION: u32 = 1;

/// One `(instance, seed, algorithm, bound)` outcome. Flat so that the CSV
/// and JSON forms carry the same columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub instance: String,
    pub seed: u64,
    pub algorithm: String,
    pub problem: Problem,
    pub bound: f64,
    pub bound_frac: Option<f64>,
    pub f_value: Option<f64>,
    pub g_value: Option<f64>,
    pub feasible: Option<bool>,
    pub size: Option<usize>,
    pub iterations: Option<usize>,
    pub wall_time_ns: u64,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub reference_bound: Option<f64>,
    pub relative_to_weights: Option<bool>,
    pub formula: Option<String>,
    pub brute_force_opt: Option<f64>,
    /// Objective over the brute-force optimum: `f/OPT` for covers, `g/OPT`
    /// for budgets.
    pub ratio: Option<f64>,
    pub baseline_draws: Option<usize>,
    pub feasible_fraction: Option<f64>,
    /// Space-separated element indices.
    pub solution: Option<String>,
    pub notes: Option<String>,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn blank(
        instance: &str,
        seed: u64,
        algorithm: &str,
        bound: Bound,
        frac: Option<f64>,
    ) -> Self {
        ResultRow {
            instance: instance.into(),
            seed,
            algorithm: algorithm.into(),
            problem: Problem::of(bound),
            bound: bound.value(),
            bound_frac: frac,
            f_value: None,
            g_value: None,
            feasible: None,
            size: None,
            iterations: None,
            wall_time_ns: 0,
            sigma: None,
            rho: None,
            reference_bound: None,
            relative_to_weights: None,
            formula: None,
            brute_force_opt: None,
            ratio: None,
            baseline_draws: None,
            feasible_fraction: None,
            solution: None,
            notes: None,
            error: None,
        }
    }

    pub fn fill(&mut self, r: &SolveReport) {
        let c = &r.certificate;
        self.f_value = Some(r.f_value);
        self.g_value = Some(r.g_value);
        self.feasible = Some(r.feasible);
        self.size = Some(r.solution.len());
        self.iterations = Some(r.iterations);
        self.sigma = Some(c.sigma);
        self.rho = Some(c.rho);
        self.reference_bound = c.reference_bound;
        self.relative_to_weights = Some(c.relative_to_weights);
        self.formula = Some(c.formula.clone());
        let ids: Vec<String> = r.solution.iter().map(|j| j.to_string()).collect();
        self.solution = Some(ids.join(" "));
        if !c.notes.is_empty() {
            self.notes = Some(c.notes.join("; "));
        }
    }

    pub fn is_baseline(&self) -> bool {
        self.algorithm.starts_with("random@")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub format: String,
    pub version: u32,
    pub rows: Vec<ResultRow>,
}

impl ResultFile {
    pub fn new(rows: Vec<ResultRow>) -> Self {
        ResultFile {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            rows,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// `.csv` files are CSV, everything else JSON.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn write_rows(path: &Path, rows: &[ResultRow], format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let text = subcons::json::to_string(&ResultFile::new(rows.to_vec()))?;
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        Format::Csv => {
            let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
            write_csv(BufWriter::new(file), rows)?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(w: W, rows: &[ResultRow]) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a result file in either format, rejecting anything that does not
/// match the row layout.
pub fn read_rows(path: &Path) -> anyhow::Result<Vec<ResultRow>> {
    let context = || format!("reading {}", path.display());
    match Format::from_path(path) {
        Format::Json => {
            let text = std::fs::read_to_string(path).with_context(context)?;
            let file: ResultFile = serde_json::from_str(&text)
                .with_context(|| format!("{}: not a result file", path.display()))?;
            if file.format != FORMAT_TAG || file.version != FORMAT_VERSION {
                bail!(
                    "{}: unsupported result format {} v{}",
                    path.display(),
                    file.format,
                    file.version
                );
            }
            Ok(file.rows)
        }
        Format::Csv => {
            let mut reader = csv::Reader::from_path(path).with_context(context)?;
            let expected: Vec<&str> = CSV_COLUMNS.to_vec();
            let headers: Vec<String> = reader.headers()?.iter().map(String::from).collect();
            if headers != expected {
                bail!(
                    "{}: CSV columns do not match the result layout",
                    path.display()
                );
            }
            reader
                .deserialize()
                .map(|r| r.with_context(|| format!("{}: bad row", path.display())))
                .collect()
        }
    }
}

pub const CSV_COLUMNS: [&str; 24] = [
    "instance",
    "seed",
    "algorithm",
    "problem",
    "bound",
    "bound_frac",
    "f_value",
    "g_value",
    "feasible",
    "size",
    "iterations",
    "wall_time_ns",
    "sigma",
    "rho",
    "reference_bound",
    "relative_to_weights",
    "formula",
    "brute_force_opt",
    "ratio",
    "baseline_draws",
    "feasible_fraction",
    "solution",
    "notes",
    "error",
];

/// Rows with timing fields zeroed, for determinism comparisons.
pub fn without_timing(rows: &[ResultRow]) -> Vec<ResultRow> {
    rows.iter()
        .cloned()
        .map(|mut r| {
            r.wall_time_ns = 0;
            r
        })
        .collect()
}
