//! Set-function oracles and the built-in function catalog.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{GroundSet, Subset};
use crate::TOL;

/// A set function over `{0, .., n-1}`.
///
/// Implementations must be pure: the same subset always yields the same
/// value, bit for bit. Every function used as a cost or coverage oracle is
/// expected to be normalized, monotone and submodular; [`crate::props`]
/// checks those properties.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    fn eval(&self, x: &Subset) -> f64;

    /// Marginal value `f(j | X) = f(X ∪ {j}) - f(X)`.
    fn gain(&self, j: usize, x: &Subset) -> f64 {
        if x.contains(j) {
            return 0.0;
        }
        self.eval(&x.with(j)) - self.eval(x)
    }

    /// The weight vector when the function is known to be modular.
    fn modular_weights(&self) -> Option<Vec<f64>> {
        None
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, x: &Subset) -> f64 {
        (**self).eval(x)
    }
    fn gain(&self, j: usize, x: &Subset) -> f64 {
        (**self).gain(j, x)
    }
    fn modular_weights(&self) -> Option<Vec<f64>> {
        (**self).modular_weights()
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, x: &Subset) -> f64 {
        (**self).eval(x)
    }
    fn gain(&self, j: usize, x: &Subset) -> f64 {
        (**self).gain(j, x)
    }
    fn modular_weights(&self) -> Option<Vec<f64>> {
        (**self).modular_weights()
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, x: &Subset) -> f64 {
        (**self).eval(x)
    }
    fn gain(&self, j: usize, x: &Subset) -> f64 {
        (**self).gain(j, x)
    }
    fn modular_weights(&self) -> Option<Vec<f64>> {
        (**self).modular_weights()
    }
}

/// Evaluates `f` at `x` after checking that `x` belongs to `f`'s ground set.
pub fn eval_checked<F: SetFunction + ?Sized>(f: &F, x: &Subset) -> Result<f64> {
    GroundSet::new(f.ground_size())?.check(x)?;
    Ok(f.eval(x))
}

/// Checked marginal gain.
pub fn gain_checked<F: SetFunction + ?Sized>(f: &F, j: usize, x: &Subset) -> Result<f64> {
    GroundSet::new(f.ground_size())?.check(x)?;
    if j >= f.ground_size() {
        return Err(Error::instance(format!("element {j} outside ground set")));
    }
    Ok(f.gain(j, x))
}

/// Singleton values `f({j})` for every element.
pub fn singletons<F: SetFunction + ?Sized>(f: &F) -> Vec<f64> {
    let n = f.ground_size();
    let empty = Subset::empty(n);
    (0..n).map(|j| f.eval(&empty.with(j))).collect()
}

/// A borrowed weight vector viewed as a modular set function.
#[derive(Clone, Copy, Debug)]
pub struct ModularFn<'a>(pub &'a [f64]);

impl SetFunction for ModularFn<'_> {
    fn ground_size(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, x: &Subset) -> f64 {
        x.iter().map(|j| self.0[j]).sum()
    }

    fn modular_weights(&self) -> Option<Vec<f64>> {
        Some(self.0.to_vec())
    }
}

/// A dense matrix given inline (row-major nested arrays) or by reference to
/// a headerless CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Matrix {
    Rows(Vec<Vec<f64>>),
    Csv { csv: PathBuf },
}

impl Matrix {
    pub fn rows(&self) -> Result<&[Vec<f64>]> {
        match self {
            Matrix::Rows(r) => Ok(r),
            Matrix::Csv { csv } => Err(Error::instance(format!(
                "matrix file {} not resolved; load the instance through InstanceSpec",
                csv.display()
            ))),
        }
    }

    /// Replaces a CSV reference with its contents, resolving relative paths
    /// against `base`.
    pub fn resolve(&self, base: &Path) -> Result<Matrix> {
        match self {
            Matrix::Rows(_) => Ok(self.clone()),
            Matrix::Csv { csv: path } => {
                let full = if path.is_relative() {
                    base.join(path)
                } else {
                    path.clone()
                };
                let mut reader = csv::ReaderBuilder::new()
                    .has_headers(false)
                    .trim(csv::Trim::All)
                    .from_path(&full)?;
                let mut rows = Vec::new();
                for record in reader.records() {
                    let record = record?;
                    let row = record
                        .iter()
                        .map(|s| {
                            s.parse::<f64>().map_err(|e| {
                                Error::instance(format!(
                                    "{}: bad number {s:?}: {e}",
                                    full.display()
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    rows.push(row);
                }
                Ok(Matrix::Rows(rows))
            }
        }
    }
}

/// Serializable description of a catalog function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogEntry {
    /// `f(X) = Σ_{j∈X} w_j`.
    Modular {
        weights: Vec<f64>,
    },
    /// `f(X) = Σ_i max_{j∈X} s_ij`; columns index the ground set.
    FacilityLocation {
        similarity: Matrix,
    },
    /// `f(X) = Σ_i min{Σ_{j∈X} s_ij, α Σ_{j∈V} s_ij}`.
    SaturatedSum {
        similarity: Matrix,
        alpha: f64,
    },
    /// Weighted size of the word neighbourhood `Γ(X)` in a bipartite
    /// utterance/word graph. `adjacency[j]` lists the words of utterance `j`.
    BipartiteNeighborhood {
        adjacency: Vec<Vec<usize>>,
        word_weights: Vec<f64>,
    },
    /// `f(X) = √(Σ_{j∈X} w_j)`.
    SqrtModular {
        weights: Vec<f64>,
    },
    /// `f(X) = min{|X|, cap}`.
    CardTruncation {
        n: usize,
        cap: f64,
    },
    /// `f(X) = min{inner(X), cap}`.
    Truncation {
        inner: Box<CatalogEntry>,
        cap: f64,
    },
    Sum {
        terms: Vec<CatalogEntry>,
    },
    /// `f(X) = κ min{|X|, α} + (1-κ)|X|`.
    HardnessPlain {
        n: usize,
        kappa: f64,
        alpha: usize,
    },
    /// `f_R(X) = κ min{β + |X ∩ R̄|, |X|, α} + (1-κ)|X|` with hidden set `R`, `|R| = α`.
    HardnessHidden {
        n: usize,
        kappa: f64,
        alpha: usize,
        beta: usize,
        hidden: Vec<usize>,
    },
}

impl CatalogEntry {
    pub fn kind(&self) -> &'static str {
        match self {
            CatalogEntry::Modular { .. } => "modular",
            CatalogEntry::FacilityLocation { .. } => "facility_location",
            CatalogEntry::SaturatedSum { .. } => "saturated_sum",
            CatalogEntry::BipartiteNeighborhood { .. } => "bipartite_neighborhood",
            CatalogEntry::SqrtModular { .. } => "sqrt_modular",
            CatalogEntry::CardTruncation { .. } => "card_truncation",
            CatalogEntry::Truncation { .. } => "truncation",
            CatalogEntry::Sum { .. } => "sum",
            CatalogEntry::HardnessPlain { .. } => "hardness_plain",
            CatalogEntry::HardnessHidden { .. } => "hardness_hidden",
        }
    }

    /// Resolves CSV matrix references relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<CatalogEntry> {
        Ok(match self {
            CatalogEntry::FacilityLocation { similarity } => CatalogEntry::FacilityLocation {
                similarity: similarity.resolve(base)?,
            },
            CatalogEntry::SaturatedSum { similarity, alpha } => CatalogEntry::SaturatedSum {
                similarity: similarity.resolve(base)?,
                alpha: *alpha,
            },
            CatalogEntry::Truncation { inner, cap } => CatalogEntry::Truncation {
                inner: Box::new(inner.resolve(base)?),
                cap: *cap,
            },
            CatalogEntry::Sum { terms } => CatalogEntry::Sum {
                terms: terms
                    .iter()
                    .map(|t| t.resolve(base))
                    .collect::<Result<_>>()?,
            },
            other => other.clone(),
        })
    }

    /// Restricts the function to the elements in `keep` (in that order).
    ///
    /// Only valid when every dropped element has zero singleton value: for a
    /// monotone submodular function such an element never changes any value,
    /// so dropping its column leaves all other values intact.
    fn drop_null_elements(&self, keep: &[usize]) -> Result<CatalogEntry> {
        let pick = |v: &[f64]| keep.iter().map(|&j| v[j]).collect::<Vec<_>>();
        let pick_cols = |m: &Matrix| -> Result<Matrix> {
            Ok(Matrix::Rows(m.rows()?.iter().map(|r| pick(r)).collect()))
        };
        Ok(match self {
            CatalogEntry::Modular { weights } => CatalogEntry::Modular {
                weights: pick(weights),
            },
            CatalogEntry::SqrtModular { weights } => CatalogEntry::SqrtModular {
                weights: pick(weights),
            },
            CatalogEntry::FacilityLocation { similarity } => CatalogEntry::FacilityLocation {
                similarity: pick_cols(similarity)?,
            },
            CatalogEntry::SaturatedSum { similarity, alpha } => CatalogEntry::SaturatedSum {
                similarity: pick_cols(similarity)?,
                alpha: *alpha,
            },
            CatalogEntry::BipartiteNeighborhood {
                adjacency,
                word_weights,
            } => CatalogEntry::BipartiteNeighborhood {
                adjacency: keep.iter().map(|&j| adjacency[j].clone()).collect(),
                word_weights: word_weights.clone(),
            },
            CatalogEntry::Truncation { inner, cap } => CatalogEntry::Truncation {
                inner: Box::new(inner.drop_null_elements(keep)?),
                cap: *cap,
            },
            CatalogEntry::Sum { terms } => CatalogEntry::Sum {
                terms: terms
                    .iter()
                    .map(|t| t.drop_null_elements(keep))
                    .collect::<Result<_>>()?,
            },
            CatalogEntry::CardTruncation { .. }
            | CatalogEntry::HardnessPlain { .. }
            | CatalogEntry::HardnessHidden { .. } => {
                return Err(Error::parameter(format!(
                    "{} has no per-element parameters to strip",
                    self.kind()
                )))
            }
        })
    }
}

#[derive(Clone, Debug)]
enum Kernel {
    Modular(Vec<f64>),
    FacilityLocation {
        cols: usize,
        data: Vec<f64>,
    },
    SaturatedSum {
        cols: usize,
        data: Vec<f64>,
        caps: Vec<f64>,
    },
    Bipartite {
        adjacency: Vec<Vec<u32>>,
        weights: Vec<f64>,
    },
    SqrtModular(Vec<f64>),
    CardTruncation {
        cap: f64,
    },
    Truncation {
        inner: Box<Kernel>,
        cap: f64,
    },
    Sum(Vec<Kernel>),
    Hardness {
        kappa: f64,
        alpha: usize,
        hidden: Option<(usize, Subset)>,
    },
}

impl Kernel {
    fn eval(&self, x: &Subset) -> f64 {
        match self {
            Kernel::Modular(w) => x.iter().map(|j| w[j]).sum(),
            Kernel::FacilityLocation { cols, data } => {
                if x.is_empty() {
                    return 0.0;
                }
                data.chunks_exact(*cols)
                    .map(|row| x.iter().map(|j| row[j]).fold(f64::NEG_INFINITY, f64::max))
                    .sum()
            }
            Kernel::SaturatedSum { cols, data, caps } => data
                .chunks_exact(*cols)
                .zip(caps)
                .map(|(row, &cap)| x.iter().map(|j| row[j]).sum::<f64>().min(cap))
                .sum(),
            Kernel::Bipartite { adjacency, weights } => {
                let mut seen = vec![false; weights.len()];
                let mut total = 0.0;
                for j in x.iter() {
                    for &w in &adjacency[j] {
                        let w = w as usize;
                        if !seen[w] {
                            seen[w] = true;
                            total += weights[w];
                        }
                    }
                }
                total
            }
            Kernel::SqrtModular(w) => x.iter().map(|j| w[j]).sum::<f64>().sqrt(),
            Kernel::CardTruncation { cap } => (x.len() as f64).min(*cap),
            Kernel::Truncation { inner, cap } => inner.eval(x).min(*cap),
            Kernel::Sum(terms) => terms.iter().map(|t| t.eval(x)).sum(),
            Kernel::Hardness {
                kappa,
                alpha,
                hidden,
            } => {
                let size = x.len();
                let curved = match hidden {
                    None => size.min(*alpha),
                    Some((beta, r)) => {
                        let outside = x.difference(r).len();
                        (beta + outside).min(size).min(*alpha)
                    }
                };
                kappa * curved as f64 + (1.0 - kappa) * size as f64
            }
        }
    }
}

fn check_weights(name: &str, w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::instance(format!("{name}: empty weight vector")));
    }
    if let Some(bad) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::instance(format!(
            "{name}: weight {bad} is not a finite non-negative number"
        )));
    }
    Ok(())
}

fn dense(name: &str, m: &Matrix) -> Result<(usize, Vec<f64>)> {
    let rows = m.rows()?;
    let cols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || cols == 0 {
        return Err(Error::instance(format!("{name}: empty similarity matrix")));
    }
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::instance(format!(
                "{name}: row {i} has {} entries, expected {cols}",
                r.len()
            )));
        }
        check_weights(name, r)?;
        data.extend_from_slice(r);
    }
    Ok((cols, data))
}

fn build(entry: &CatalogEntry) -> Result<(usize, Kernel)> {
    Ok(match entry {
        CatalogEntry::Modular { weights } => {
            check_weights("modular", weights)?;
            (weights.len(), Kernel::Modular(weights.clone()))
        }
        CatalogEntry::SqrtModular { weights } => {
            check_weights("sqrt_modular", weights)?;
            (weights.len(), Kernel::SqrtModular(weights.clone()))
        }
        CatalogEntry::FacilityLocation { similarity } => {
            let (cols, data) = dense("facility_location", similarity)?;
            (cols, Kernel::FacilityLocation { cols, data })
        }
        CatalogEntry::SaturatedSum { similarity, alpha } => {
            if !(*alpha > 0.0 && *alpha <= 1.0) {
                return Err(Error::parameter(format!(
                    "saturated_sum: alpha {alpha} outside (0, 1]"
                )));
            }
            let (cols, data) = dense("saturated_sum", similarity)?;
            let caps = data
                .chunks_exact(cols)
                .map(|row| alpha * row.iter().sum::<f64>())
                .collect();
            (cols, Kernel::SaturatedSum { cols, data, caps })
        }
        CatalogEntry::BipartiteNeighborhood {
            adjacency,
            word_weights,
        } => {
            if adjacency.is_empty() {
                return Err(Error::instance("bipartite_neighborhood: no utterances"));
            }
            check_weights("bipartite_neighborhood", word_weights)?;
            let vocab = word_weights.len();
            let adjacency = adjacency
                .iter()
                .map(|words| {
                    let mut ws: Vec<u32> = Vec::with_capacity(words.len());
                    for &w in words {
                        if w >= vocab {
                            return Err(Error::instance(format!(
                                "bipartite_neighborhood: word {w} outside vocabulary of {vocab}"
                            )));
                        }
                        ws.push(w as u32);
                    }
                    ws.sort_unstable();
                    ws.dedup();
                    Ok(ws)
                })
                .collect::<Result<Vec<_>>>()?;
            (
                adjacency.len(),
                Kernel::Bipartite {
                    adjacency,
                    weights: word_weights.clone(),
                },
            )
        }
        CatalogEntry::CardTruncation { n, cap } => {
            if *n == 0 {
                return Err(Error::instance("card_truncation: n must be positive"));
            }
            if !(*cap > 0.0) {
                return Err(Error::parameter(format!(
                    "card_truncation: cap {cap} must be positive"
                )));
            }
            (*n, Kernel::CardTruncation { cap: *cap })
        }
        CatalogEntry::Truncation { inner, cap } => {
            let (n, k) = build(inner)?;
            if !(*cap > 0.0) {
                return Err(Error::parameter(format!(
                    "truncation: cap {cap} must be positive"
                )));
            }
            let top = k.eval(&Subset::full(n));
            if *cap > top + TOL {
                return Err(Error::parameter(format!(
                    "truncation: cap {cap} exceeds inner value {top} at V"
                )));
            }
            (
                n,
                Kernel::Truncation {
                    inner: Box::new(k),
                    cap: *cap,
                },
            )
        }
        CatalogEntry::Sum { terms } => {
            if terms.is_empty() {
                return Err(Error::parameter("sum: empty term list"));
            }
            let built = terms.iter().map(build).collect::<Result<Vec<_>>>()?;
            let n = built[0].0;
            if built.iter().any(|(m, _)| *m != n) {
                return Err(Error::instance("sum: terms disagree on ground set size"));
            }
            (n, Kernel::Sum(built.into_iter().map(|(_, k)| k).collect()))
        }
        CatalogEntry::HardnessPlain { n, kappa, alpha } => {
            check_hardness(*n, *kappa, *alpha)?;
            (
                *n,
                Kernel::Hardness {
                    kappa: *kappa,
                    alpha: *alpha,
                    hidden: None,
                },
            )
        }
        CatalogEntry::HardnessHidden {
            n,
            kappa,
            alpha,
            beta,
            hidden,
        } => {
            check_hardness(*n, *kappa, *alpha)?;
            let r = Subset::from_elements(*n, hidden.iter().copied())?;
            if r.len() != *alpha {
                return Err(Error::parameter(format!(
                    "hardness_hidden: |R| = {} but alpha = {alpha}",
                    r.len()
                )));
            }
            (
                *n,
                Kernel::Hardness {
                    kappa: *kappa,
                    alpha: *alpha,
                    hidden: Some((*beta, r)),
                },
            )
        }
    })
}

fn check_hardness(n: usize, kappa: f64, alpha: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::instance("hardness: n must be positive"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::parameter(format!(
            "hardness: kappa {kappa} outside [0, 1]"
        )));
    }
    if alpha == 0 || alpha > n {
        return Err(Error::parameter(format!(
            "hardness: alpha {alpha} outside [1, n]"
        )));
    }
    Ok(())
}

/// A validated catalog function.
///
/// Construction checks the catalog parameters plus normalization
/// (`f(∅) = 0`) and strictly positive singletons. Monotonicity and
/// submodularity are properties of the catalog formulas; [`crate::props`]
/// verifies them.
#[derive(Clone, Debug)]
pub struct FunctionOracle {
    entry: CatalogEntry,
    n: usize,
    kernel: Kernel,
}

impl FunctionOracle {
    pub fn new(entry: CatalogEntry) -> Result<Self> {
        let (n, kernel) = build(&entry)?;
        let oracle = FunctionOracle { entry, n, kernel };
        let empty = oracle.eval(&Subset::empty(n));
        if empty.abs() > TOL {
            return Err(Error::instance(format!(
                "{}: f(∅) = {empty}, expected 0",
                oracle.kind()
            )));
        }
        if let Some((j, v)) = singletons(&oracle)
            .into_iter()
            .enumerate()
            .find(|(_, v)| !(*v > 0.0))
        {
            return Err(Error::instance(format!(
                "{}: singleton value f({{{j}}}) = {v} is not positive; strip such elements first",
                oracle.kind()
            )));
        }
        Ok(oracle)
    }

    pub fn entry(&self) -> &CatalogEntry {
        &self.entry
    }

    pub fn kind(&self) -> &'static str {
        self.entry.kind()
    }

    pub fn ground_set(&self) -> GroundSet {
        GroundSet::new(self.n).expect("validated oracle has n >= 1")
    }
}

impl SetFunction for FunctionOracle {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Subset) -> f64 {
        debug_assert_eq!(x.ground_size(), self.n, "subset from another ground set");
        self.kernel.eval(x)
    }

    fn modular_weights(&self) -> Option<Vec<f64>> {
        match &self.kernel {
            Kernel::Modular(w) => Some(w.clone()),
            _ => None,
        }
    }
}

impl Serialize for FunctionOracle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entry.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionOracle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entry = CatalogEntry::deserialize(d)?;
        FunctionOracle::new(entry).map_err(serde::de::Error::custom)
    }
}

/// Caps a function: `g'(X) = min{g(X), α}`.
///
/// `{g(X) ≥ α}` holds exactly when `g'(X) = g'(V)`.
pub fn truncate(oracle: &FunctionOracle, alpha: f64) -> Result<FunctionOracle> {
    if !(alpha > 0.0) {
        return Err(Error::parameter(format!(
            "truncation cap {alpha} must be positive"
        )));
    }
    FunctionOracle::new(CatalogEntry::Truncation {
        inner: Box::new(oracle.entry().clone()),
        cap: alpha,
    })
}

/// Result of [`strip_null_elements`].
#[derive(Clone, Debug)]
pub struct Stripped {
    pub f: CatalogEntry,
    pub g: CatalogEntry,
    /// Original indices of the retained elements, in new index order.
    pub kept: Vec<usize>,
    /// Elements with `f(j) = 0` but `g(j) > 0`: free coverage the caller may
    /// add to any solution at no cost.
    pub free: Vec<usize>,
}

/// Removes elements whose singleton value is zero under `f` or `g`.
///
/// Operates on unvalidated entries, since [`FunctionOracle::new`] rejects
/// such inputs.
pub fn strip_null_elements(f: &CatalogEntry, g: &CatalogEntry) -> Result<Stripped> {
    let (nf, kf) = build(f)?;
    let (ng, kg) = build(g)?;
    if nf != ng {
        return Err(Error::instance(format!("f has {nf} elements, g has {ng}")));
    }
    let empty = Subset::empty(nf);
    let mut kept = Vec::new();
    let mut free = Vec::new();
    for j in 0..nf {
        let s = empty.with(j);
        let (fj, gj) = (kf.eval(&s), kg.eval(&s));
        if fj > 0.0 && gj > 0.0 {
            kept.push(j);
        } else if gj > 0.0 {
            free.push(j);
        }
    }
    if kept.is_empty() {
        return Err(Error::instance(
            "no element has positive singleton values under both f and g",
        ));
    }
    Ok(Stripped {
        f: f.drop_null_elements(&kept)?,
        g: g.drop_null_elements(&kept)?,
        kept,
        free,
    })
}
