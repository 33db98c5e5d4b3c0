//! Merging result files into a tidy table and plot series.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::ensure;
use serde::{Deserialize, Serialize};

use crate::algos::Problem;
use crate::results::{read_rows, ResultRow};

/// Rows of every file, stably sorted by `(instance, algorithm, bound)`.
pub fn merge(paths: &[&Path]) -> anyhow::Result<Vec<ResultRow>> {
    ensure!(!paths.is_empty(), "no result files given");
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (&a.instance, &a.algorithm)
            .cmp(&(&b.instance, &b.algorithm))
            .then(a.bound.total_cmp(&b.bound))
    });
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub seed: u64,
}

/// One line of a plot: `y` is `g` against the budget for knapsack rows and
/// `f` against the cover level for cover rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub instance: String,
    pub problem: Problem,
    pub algorithm: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<PlotPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub series: Vec<Series>,
}

/// Groups successful rows into series; rows that errored are left out.
pub fn plot_data(rows: &[ResultRow]) -> PlotData {
    let mut groups: BTreeMap<(String, Problem, String), Vec<PlotPoint>> = BTreeMap::new();
    for r in rows {
        let y = match r.problem {
            Problem::Budget => r.g_value,
            Problem::Cover => r.f_value,
        };
        let Some(y) = y else { continue };
        groups
            .entry((r.instance.clone(), r.problem, r.algorithm.clone()))
            .or_default()
            .push(PlotPoint {
                x: r.bound,
                y,
                seed: r.seed,
            });
    }
    let series = groups
        .into_iter()
        .map(|((instance, problem, algorithm), mut points)| {
            points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.seed.cmp(&b.seed)));
            let (x_label, y_label) = match problem {
                Problem::Budget => ("budget b", "g(X)"),
                Problem::Cover => ("cover level c", "f(X)"),
            };
            Series {
                instance,
                problem,
                algorithm,
                x_label: x_label.into(),
                y_label: y_label.into(),
                points,
            }
        })
        .collect();
    PlotData { series }
}
