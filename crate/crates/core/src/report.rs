//! Solver outputs and guarantee certificates.

use serde::{Deserialize, Serialize};

use crate::oracle::SetFunction;
use crate::subset::Subset;
use crate::TOL;

/// The constraint side of a problem: a cover level `c` (minimize `f`
/// subject to `g(X) ≥ c`) or a budget `b` (maximize `g` subject to
/// `f(X) ≤ b`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Cover(f64),
    Budget(f64),
}

impl Bound {
    pub fn value(&self) -> f64 {
        match *self {
            Bound::Cover(v) | Bound::Budget(v) => v,
        }
    }

    /// Whether `(f_value, g_value)` meets the constraint exactly (up to
    /// the global tolerance).
    pub fn satisfied(&self, f_value: f64, g_value: f64) -> bool {
        match *self {
            Bound::Cover(c) => g_value >= c - TOL,
            Bound::Budget(b) => f_value <= b + TOL,
        }
    }
}

/// A cardinality computed exactly or estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremal {
    pub value: usize,
    pub exact: bool,
}

/// Measured multiplicative sandwich `s(X) ≤ f(X) ≤ upper·s(X)`, written as
/// `lower·s ≤ f ≤ upper·s` with `lower ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    /// `min_X f(X)/s(X)` over the checked sets.
    pub lower: f64,
    /// `max_X f(X)/s(X)` over the checked sets.
    pub upper: f64,
    pub exhaustive: bool,
    pub checked: u64,
}

impl Sandwich {
    /// Worst-case distortion `upper/lower`.
    pub fn factor(&self) -> f64 {
        self.upper / self.lower
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ingredients {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_g_integral: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_g: Option<Extremal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_k_f: Option<Extremal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_k_f: Option<Extremal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich: Option<Sandwich>,
}

/// What a solver promises about its output.
///
/// For cover problems: `f(X) ≤ sigma·OPT` and `g(X) ≥ rho·c`. For
/// knapsack problems: `g(X) ≥ rho·OPT` and `f(X) ≤ sigma·b`, where `OPT`
/// is taken at `reference_bound` when that is set (otherwise at the
/// requested bound).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeCert {
    pub algorithm: String,
    pub sigma: f64,
    pub rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_bound: Option<f64>,
    /// Human-readable form of the guarantee.
    pub formula: String,
    /// Guarantee depends on a measured surrogate sandwich rather than a
    /// proven construction.
    pub relative_to_weights: bool,
    pub ingredients: Ingredients,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl GuaranteeCert {
    pub fn new(algorithm: &str, sigma: f64, rho: f64, formula: impl Into<String>) -> Self {
        GuaranteeCert {
            algorithm: algorithm.to_string(),
            sigma,
            rho,
            reference_bound: None,
            formula: formula.into(),
            relative_to_weights: false,
            ingredients: Ingredients::default(),
            notes: Vec::new(),
        }
    }

    pub fn exact(algorithm: &str) -> Self {
        GuaranteeCert::new(algorithm, 1.0, 1.0, "exact")
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub surrogate: String,
    pub f_value: f64,
    pub g_value: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub bound: Bound,
    pub solution: Subset,
    pub f_value: f64,
    pub g_value: f64,
    /// The solution meets the requested bound itself (not a relaxed one).
    pub feasible: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
    pub certificate: GuaranteeCert,
}

impl SolveReport {
    /// Builds a report, evaluating both functions at `solution` from scratch.
    pub fn new<F, G>(
        f: &F,
        g: &G,
        bound: Bound,
        solution: Subset,
        iterations: usize,
        trace: Vec<TraceEntry>,
        certificate: GuaranteeCert,
    ) -> Self
    where
        F: SetFunction + ?Sized,
        G: SetFunction + ?Sized,
    {
        let f_value = f.eval(&solution);
        let g_value = g.eval(&solution);
        SolveReport {
            algorithm: certificate.algorithm.clone(),
            bound,
            feasible: bound.satisfied(f_value, g_value),
            solution,
            f_value,
            g_value,
            iterations,
            trace,
            certificate,
        }
    }
}
