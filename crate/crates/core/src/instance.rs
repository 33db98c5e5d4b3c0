//! Problem instances: the serializable description, its validated form, and
//! seeded synthetic generators.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Zipf};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{singletons, CatalogEntry, FunctionOracle, Matrix, SetFunction};
use crate::report::Bound;
use crate::subset::Subset;
use crate::TOL;

/// Which generator produced an instance, and with what parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generator: GenKind,
    pub params: GenParams,
}

/// Serializable problem description.
///
/// ```json
/// {"n": 3,
///  "f": {"kind": "modular", "weights": [1, 2, 3]},
///  "g": {"kind": "card_truncation", "n": 3, "cap": 2},
///  "bound": {"cover": 2},
///  "seed": 0}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub f: CatalogEntry,
    pub g: CatalogEntry,
    pub bound: Bound,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl InstanceSpec {
    /// Reads a spec, inlining CSV matrices referenced relative to the file.
    pub fn load(path: &Path) -> Result<InstanceSpec> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: InstanceSpec = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(InstanceSpec {
            f: spec.f.resolve(base)?,
            g: spec.g.resolve(base)?,
            ..spec
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, crate::json::to_string(self)?).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Identifier used in result rows: the explicit name, else
    /// `{generator}-n{n}-s{seed}`, else `instance-n{n}-s{seed}`.
    pub fn id(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let prefix = self
            .meta
            .as_ref()
            .map_or("instance".to_string(), |m| m.generator.to_string());
        format!("{prefix}-n{}-s{}", self.n, self.seed)
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        self.build_with(self.bound)
    }

    /// Builds the instance with a different constraint value.
    pub fn build_with(&self, bound: Bound) -> Result<ProblemInstance> {
        let f = FunctionOracle::new(self.f.clone())?;
        let g = FunctionOracle::new(self.g.clone())?;
        if f.ground_size() != self.n || g.ground_size() != self.n {
            return Err(Error::instance(format!(
                "declared n = {}, but f has {} and g has {} elements",
                self.n,
                f.ground_size(),
                g.ground_size()
            )));
        }
        ProblemInstance::new(f, g, bound)
    }
}

/// A validated problem: cost `f`, coverage `g`, and a non-degenerate bound.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub f: FunctionOracle,
    pub g: FunctionOracle,
    pub bound: Bound,
}

impl ProblemInstance {
    /// Requires `min_j g(j) ≤ c ≤ g(V)` for a cover level and
    /// `min_j f(j) ≤ b ≤ f(V)` for a budget. A cover level above `g(V)`
    /// is reported as infeasible, every other violation as a parameter
    /// error.
    pub fn new(f: FunctionOracle, g: FunctionOracle, bound: Bound) -> Result<ProblemInstance> {
        let n = f.ground_size();
        if g.ground_size() != n {
            return Err(Error::instance(format!(
                "f has {n} elements, g has {}",
                g.ground_size()
            )));
        }
        let (name, h) = match bound {
            Bound::Cover(_) => ("cover", &g),
            Bound::Budget(_) => ("budget", &f),
        };
        let (lo, hi) = bound_range(h);
        let v = bound.value();
        if matches!(bound, Bound::Cover(_)) && v > hi + TOL {
            return Err(Error::infeasible(format!("cover {v} exceeds g(V) = {hi}")));
        }
        if !v.is_finite() || v < lo - TOL || v > hi + TOL {
            return Err(Error::parameter(format!("{name} {v} outside [{lo}, {hi}]")));
        }
        Ok(ProblemInstance { f, g, bound })
    }

    pub fn n(&self) -> usize {
        self.f.ground_size()
    }
}

/// `[min_j h(j), h(V)]`, the range of non-degenerate bounds on `h`.
pub fn bound_range<H: SetFunction + ?Sized>(h: &H) -> (f64, f64) {
    let lo = singletons(h).into_iter().fold(f64::INFINITY, f64::min);
    (lo, h.eval(&Subset::full(h.ground_size())))
}

/// Synthetic instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Cost: vocabulary size of a Zipf bipartite utterance/word graph.
    /// Coverage: facility location over a random symmetric similarity.
    SpeechLike,
    /// As `SpeechLike` with a saturated-sum coverage.
    SpeechSat,
    /// Integer-weighted modular cost and coverage.
    ModularPair,
    /// Hidden-set hardness cost with cardinality coverage `|X| ≥ α`.
    HardnessPair,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::SpeechLike,
        GenKind::SpeechSat,
        GenKind::ModularPair,
        GenKind::HardnessPair,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            GenKind::SpeechLike => "speech-like",
            GenKind::SpeechSat => "speech-sat",
            GenKind::ModularPair => "modular-pair",
            GenKind::HardnessPair => "hardness-pair",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<GenKind> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::parameter(format!("unknown generator {s:?}")))
    }
}

/// Generator parameters; unset fields take per-family defaults, and the
/// resolved values are recorded in the instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Saturation fraction of the saturated-sum coverage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
    /// Zipf exponent of word frequencies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zipf: Option<f64>,
    /// Curvature of the hardness cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Hardness scale `x²`, giving `α = ⌊x√n/5⌋` and `β = ⌊x²/5⌋`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    /// Bound as a fraction of `f(V)` (budget) or `g(V)` (cover).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_frac: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover_frac: Option<f64>,
}

pub const DEFAULT_SATURATION: f64 = 0.5;
pub const DEFAULT_ZIPF: f64 = 1.1;
pub const DEFAULT_BUDGET_FRAC: f64 = 0.5;
const WORDS_PER_UTTERANCE: (usize, usize) = (3, 8);

/// Deterministic in `(kind, n, seed, params)`.
pub fn generate(kind: GenKind, n: usize, seed: u64, params: &GenParams) -> Result<InstanceSpec> {
    if n == 0 {
        return Err(Error::parameter("n must be positive"));
    }
    if params.budget_frac.is_some() && params.cover_frac.is_some() {
        return Err(Error::parameter(
            "give either a budget or a cover fraction, not both",
        ));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut resolved = params.clone();
    let (f, g) = match kind {
        GenKind::SpeechLike | GenKind::SpeechSat => {
            let zipf = *resolved.zipf.get_or_insert(DEFAULT_ZIPF);
            let f = bipartite_words(n, zipf, &mut rng)?;
            let similarity = Matrix::Rows(symmetric_similarity(n, &mut rng));
            let g = if kind == GenKind::SpeechSat {
                let alpha = *resolved.saturation.get_or_insert(DEFAULT_SATURATION);
                CatalogEntry::SaturatedSum { similarity, alpha }
            } else {
                CatalogEntry::FacilityLocation { similarity }
            };
            (f, g)
        }
        GenKind::ModularPair => {
            let f = (0..n).map(|_| rng.random_range(1..=10) as f64).collect();
            let g = (0..n).map(|_| rng.random_range(1..=10) as f64).collect();
            (
                CatalogEntry::Modular { weights: f },
                CatalogEntry::Modular { weights: g },
            )
        }
        GenKind::HardnessPair => {
            let kappa = *resolved.kappa.get_or_insert(1.0);
            let (alpha, beta) = hardness_sizes(n, &resolved)?;
            resolved.alpha = Some(alpha);
            resolved.beta = Some(beta);
            let mut hidden = sample(&mut rng, n, alpha).into_vec();
            hidden.sort_unstable();
            let f = CatalogEntry::HardnessHidden {
                n,
                kappa,
                alpha,
                beta,
                hidden,
            };
            (
                f,
                CatalogEntry::Modular {
                    weights: vec![1.0; n],
                },
            )
        }
    };
    let fo = FunctionOracle::new(f.clone())?;
    let go = FunctionOracle::new(g.clone())?;
    let bound = match (kind, resolved.budget_frac, resolved.cover_frac) {
        (_, Some(frac), _) => Bound::Budget(frac * bound_range(&fo).1),
        (_, None, Some(frac)) => Bound::Cover(frac * bound_range(&go).1),
        (GenKind::HardnessPair, None, None) => {
            Bound::Cover(resolved.alpha.expect("set above") as f64)
        }
        (_, None, None) => {
            resolved.budget_frac = Some(DEFAULT_BUDGET_FRAC);
            Bound::Budget(DEFAULT_BUDGET_FRAC * bound_range(&fo).1)
        }
    };
    ProblemInstance::new(fo, go, bound)?;
    Ok(InstanceSpec {
        n,
        f,
        g,
        bound,
        seed,
        name: None,
        meta: Some(Meta {
            generator: kind,
            params: resolved,
        }),
    })
}

/// One seeded entry of every catalog kind on `n ≥ 3` elements, with the
/// hardness pair at curvature 0.5 so that every kind but the modular ones
/// has curvature strictly between 0 and 1 or equal to 1.
pub fn catalog_examples(n: usize, seed: u64) -> Result<Vec<CatalogEntry>> {
    if n < 3 {
        return Err(Error::parameter(
            "catalog examples need at least 3 elements",
        ));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let similarity = symmetric_similarity(n, &mut rng);
    let words = bipartite_words(n, DEFAULT_ZIPF, &mut rng)?;
    let facility = CatalogEntry::FacilityLocation {
        similarity: Matrix::Rows(similarity.clone()),
    };
    let facility_top = FunctionOracle::new(facility.clone())?.eval(&Subset::full(n));
    let alpha = (n / 3).max(1);
    let mut hidden = sample(&mut rng, n, alpha).into_vec();
    hidden.sort_unstable();
    Ok(vec![
        CatalogEntry::Modular {
            weights: weights.clone(),
        },
        facility.clone(),
        CatalogEntry::SaturatedSum {
            similarity: Matrix::Rows(similarity),
            alpha: DEFAULT_SATURATION,
        },
        words,
        CatalogEntry::SqrtModular {
            weights: weights.clone(),
        },
        CatalogEntry::CardTruncation {
            n,
            cap: (n / 2) as f64,
        },
        CatalogEntry::Truncation {
            inner: Box::new(facility.clone()),
            cap: 0.8 * facility_top,
        },
        CatalogEntry::Sum {
            terms: vec![facility, CatalogEntry::SqrtModular { weights }],
        },
        CatalogEntry::HardnessPlain {
            n,
            kappa: 0.5,
            alpha,
        },
        CatalogEntry::HardnessHidden {
            n,
            kappa: 0.5,
            alpha,
            beta: alpha.div_ceil(2),
            hidden,
        },
    ])
}

/// `(α, β)` from explicit values or from `x²`.
fn hardness_sizes(n: usize, p: &GenParams) -> Result<(usize, usize)> {
    let (alpha, beta) = match (p.alpha, p.beta, p.x2) {
        (Some(a), Some(b), _) => (a, b),
        (None, None, Some(x2)) if x2 > 0.0 => {
            let alpha = (x2.sqrt() * (n as f64).sqrt() / 5.0).floor() as usize;
            (alpha, (x2 / 5.0).floor() as usize)
        }
        _ => {
            return Err(Error::parameter(
                "hardness-pair needs both alpha and beta, or a positive x2",
            ))
        }
    };
    if alpha == 0 || alpha > n {
        return Err(Error::parameter(format!(
            "alpha = {alpha} must lie in [1, {n}]"
        )));
    }
    if beta == 0 || beta > alpha {
        return Err(Error::parameter(format!(
            "beta = {beta} must lie in [1, alpha = {alpha}]"
        )));
    }
    Ok((alpha, beta))
}

/// Utterances as word sets: each draws 3 to 8 distinct words from a
/// vocabulary of `max(2n, 16)` with Zipf frequencies; unit word weights.
fn bipartite_words(n: usize, zipf: f64, rng: &mut Xoshiro256PlusPlus) -> Result<CatalogEntry> {
    let vocab = (2 * n).max(16);
    let dist = Zipf::new(vocab as f64, zipf)
        .map_err(|e| Error::parameter(format!("zipf exponent {zipf}: {e}")))?;
    let adjacency = (0..n)
        .map(|_| {
            let k = rng.random_range(WORDS_PER_UTTERANCE.0..=WORDS_PER_UTTERANCE.1);
            let mut words: Vec<usize> = Vec::with_capacity(k);
            while words.len() < k {
                let w = dist.sample(rng) as usize - 1;
                if !words.contains(&w) {
                    words.push(w);
                }
            }
            words.sort_unstable();
            words
        })
        .collect();
    Ok(CatalogEntry::BipartiteNeighborhood {
        adjacency,
        word_weights: vec![1.0; vocab],
    })
}

/// Symmetric `n × n` matrix with entries uniform on `(0, 1]`.
#[allow(clippy::needless_range_loop)]
fn symmetric_similarity(n: usize, rng: &mut Xoshiro256PlusPlus) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = 1.0 - rng.random::<f64>();
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}
