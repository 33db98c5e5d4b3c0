//! Modular and ellipsoid-shaped surrogates of submodular functions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{singletons, SetFunction};
use crate::props::EXHAUSTIVE_MAX_N;
use crate::report::Sandwich;
use crate::subset::Subset;

/// Total curvature `κ_f = 1 - min_j f(j | V∖j) / f(j)`, clamped to `[0, 1]`.
///
/// Functions that report modular weights have curvature exactly 0.
pub fn curvature<F: SetFunction + ?Sized>(f: &F) -> Result<f64> {
    let n = f.ground_size();
    let single = singletons(f);
    if let Some((j, v)) = single.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::precondition(format!(
            "curvature needs positive singletons; f({{{j}}}) = {v}"
        )));
    }
    if f.modular_weights().is_some() {
        return Ok(0.0);
    }
    let full = Subset::full(n);
    let top = f.eval(&full);
    let min_ratio = (0..n)
        .map(|j| (top - f.eval(&full.without(j))) / single[j])
        .fold(f64::INFINITY, f64::min);
    Ok((1.0 - min_ratio).clamp(0.0, 1.0))
}

/// A permutation of the ground set, read as the chain
/// `∅ ⊂ {π(0)} ⊂ {π(0), π(1)} ⊂ ..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    order: Vec<usize>,
    /// Length of the leading block the permutation was built to place
    /// first; the matching subgradient is tight at that prefix.
    anchor_len: usize,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || seen[j] {
                return Err(Error::parameter(format!(
                    "{order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation {
            order,
            anchor_len: 0,
        })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            anchor_len: 0,
        }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Permutation {
            order,
            anchor_len: 0,
        }
    }

    /// Elements of `y` first, then the rest; each block ascending.
    pub fn placing_first(y: &Subset) -> Self {
        let order = y.iter().chain(y.complement().iter()).collect();
        Permutation {
            order,
            anchor_len: y.len(),
        }
    }

    /// Elements of `y` first, then the rest, each block shuffled.
    pub fn random_placing_first<R: Rng>(y: &Subset, rng: &mut R) -> Self {
        let mut head: Vec<usize> = y.iter().collect();
        let mut tail: Vec<usize> = y.complement().iter().collect();
        head.shuffle(rng);
        tail.shuffle(rng);
        head.extend(tail);
        Permutation {
            order: head,
            anchor_len: y.len(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The chain prefix `S^π_i`.
    pub fn prefix(&self, i: usize) -> Subset {
        let mut s = Subset::empty(self.order.len());
        for &j in &self.order[..i] {
            s.insert(j);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// Which modular upper bound to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// Removal gains at `X`, singleton gains outside.
    M1,
    /// Removal gains at `V`, addition gains at `X` outside.
    #[default]
    M2,
}

impl BoundVariant {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundVariant::M1 => "m1",
            BoundVariant::M2 => "m2",
        }
    }
}

/// An affine set function `offset + Σ_{j∈X} weights[j]` bounding some `f`
/// from one side, tight at `anchor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularSurrogate {
    pub weights: Vec<f64>,
    pub offset: f64,
    pub anchor: Subset,
    pub direction: Direction,
}

impl ModularSurrogate {
    pub fn value(&self, x: &Subset) -> f64 {
        self.offset + x.iter().map(|j| self.weights[j]).sum::<f64>()
    }
}

impl SetFunction for ModularSurrogate {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, x: &Subset) -> f64 {
        self.value(x)
    }

    fn modular_weights(&self) -> Option<Vec<f64>> {
        (self.offset == 0.0).then(|| self.weights.clone())
    }
}

/// The chain lower bound `h^π`: `weights[π(i)] = f(S^π_i) - f(S^π_{i-1})`.
pub fn subgradient<F: SetFunction + ?Sized>(f: &F, pi: &Permutation) -> Result<ModularSurrogate> {
    let n = f.ground_size();
    if pi.len() != n {
        return Err(Error::parameter(format!(
            "permutation over {} elements for a function over {n}",
            pi.len()
        )));
    }
    let mut weights = vec![0.0; n];
    let mut s = Subset::empty(n);
    let mut prev = f.eval(&s);
    for &j in pi.order() {
        s.insert(j);
        let cur = f.eval(&s);
        weights[j] = cur - prev;
        prev = cur;
    }
    Ok(ModularSurrogate {
        weights,
        offset: 0.0,
        anchor: pi.prefix(pi.anchor_len),
        direction: Direction::Lower,
    })
}

/// `m¹_X(Y) = f(X) - Σ_{j∈X∖Y} f(j | X∖j) + Σ_{j∈Y∖X} f(j | ∅)`.
pub fn upper_bound_1<F: SetFunction + ?Sized>(f: &F, x: &Subset) -> Result<ModularSurrogate> {
    upper_bound(f, x, BoundVariant::M1)
}

/// `m²_X(Y) = f(X) - Σ_{j∈X∖Y} f(j | V∖j) + Σ_{j∈Y∖X} f(j | X)`.
pub fn upper_bound_2<F: SetFunction + ?Sized>(f: &F, x: &Subset) -> Result<ModularSurrogate> {
    upper_bound(f, x, BoundVariant::M2)
}

pub fn upper_bound<F: SetFunction + ?Sized>(
    f: &F,
    x: &Subset,
    variant: BoundVariant,
) -> Result<ModularSurrogate> {
    let n = f.ground_size();
    if x.ground_size() != n {
        return Err(Error::instance(format!(
            "anchor over {} elements for a function over {n}",
            x.ground_size()
        )));
    }
    let fx = f.eval(x);
    let empty = Subset::empty(n);
    let full = Subset::full(n);
    let f_full = f.eval(&full);
    let mut weights = vec![0.0; n];
    let mut removed = 0.0;
    for (j, w) in weights.iter_mut().enumerate() {
        *w = if x.contains(j) {
            let g = match variant {
                BoundVariant::M1 => fx - f.eval(&x.without(j)),
                BoundVariant::M2 => f_full - f.eval(&full.without(j)),
            };
            // cancellation can leave a monotone gain a few ulps below zero
            let g = g.max(0.0);
            removed += g;
            g
        } else {
            match variant {
                BoundVariant::M1 => f.eval(&empty.with(j)),
                BoundVariant::M2 => (f.eval(&x.with(j)) - fx).max(0.0),
            }
        };
    }
    Ok(ModularSurrogate {
        weights,
        offset: fx - removed,
        anchor: x.clone(),
        direction: Direction::Upper,
    })
}

/// `f^κ(X) = [f(X) - (1-κ) Σ_{j∈X} f(j)] / κ`.
#[derive(Clone, Debug)]
pub struct CurveNormalized<F> {
    inner: F,
    kappa: f64,
    singletons: Vec<f64>,
}

impl<F: SetFunction> CurveNormalized<F> {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: SetFunction> SetFunction for CurveNormalized<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn eval(&self, x: &Subset) -> f64 {
        let linear: f64 = x.iter().map(|j| self.singletons[j]).sum();
        (self.inner.eval(x) - (1.0 - self.kappa) * linear) / self.kappa
    }
}

pub fn curve_normalize<F: SetFunction>(f: F) -> Result<CurveNormalized<F>> {
    let kappa = curvature(&f)?;
    if kappa == 0.0 {
        return Err(Error::precondition(
            "curvature is 0: the function is modular and needs no normalization",
        ));
    }
    let singletons = singletons(&f);
    Ok(CurveNormalized {
        inner: f,
        kappa,
        singletons,
    })
}

/// `f^ea(X) = κ √(w(X)) + (1-κ) Σ_{j∈X} f(j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EASurrogate {
    pub kappa: f64,
    pub ea_weights: Vec<f64>,
    pub singleton_weights: Vec<f64>,
}

impl EASurrogate {
    pub fn new(kappa: f64, ea_weights: Vec<f64>, singleton_weights: Vec<f64>) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::precondition(format!(
                "surrogate needs curvature in (0, 1], got {kappa}; use the modular cost directly"
            )));
        }
        if ea_weights.len() != singleton_weights.len() {
            return Err(Error::parameter("weight vectors differ in length"));
        }
        if let Some(w) = ea_weights
            .iter()
            .chain(&singleton_weights)
            .find(|w| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::parameter(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
        Ok(EASurrogate {
            kappa,
            ea_weights,
            singleton_weights,
        })
    }

    pub fn root_part(&self, x: &Subset) -> f64 {
        x.iter().map(|j| self.ea_weights[j]).sum::<f64>().sqrt()
    }

    pub fn linear_part(&self, x: &Subset) -> f64 {
        x.iter().map(|j| self.singleton_weights[j]).sum()
    }

    pub fn value(&self, x: &Subset) -> f64 {
        if self.kappa == 1.0 {
            return self.root_part(x);
        }
        self.kappa * self.root_part(x) + (1.0 - self.kappa) * self.linear_part(x)
    }
}

impl SetFunction for EASurrogate {
    fn ground_size(&self) -> usize {
        self.ea_weights.len()
    }

    fn eval(&self, x: &Subset) -> f64 {
        self.value(x)
    }
}

/// Assembles the surrogate for `f` from caller-supplied weights.
pub fn ea_surrogate<F: SetFunction + ?Sized>(f: &F, ea_weights: Vec<f64>) -> Result<EASurrogate> {
    if ea_weights.len() != f.ground_size() {
        return Err(Error::parameter(format!(
            "{} weights for a function over {} elements",
            ea_weights.len(),
            f.ground_size()
        )));
    }
    EASurrogate::new(curvature(f)?, ea_weights, singletons(f))
}

/// Default weights `w_j = f^κ({j})²`, which equals `f({j})²`.
pub fn default_ea_weights<F: SetFunction + ?Sized>(f: &F) -> Result<Vec<f64>> {
    let normalized = curve_normalize(f)?;
    Ok(singletons(&normalized).into_iter().map(|v| v * v).collect())
}

/// Measures `min` and `max` of `f(X)/s(X)` over non-empty `X`: every
/// subset when `n ≤ 16`, otherwise `samples` seeded random subsets.
pub fn measure_sandwich<F, S>(f: &F, s: &S, samples: usize, seed: u64) -> Sandwich
where
    F: SetFunction + ?Sized,
    S: SetFunction + ?Sized,
{
    let n = f.ground_size();
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    let mut checked = 0u64;
    let mut visit = |x: &Subset| {
        let (fv, sv) = (f.eval(x), s.eval(x));
        let r = fv / sv;
        lower = lower.min(r);
        upper = upper.max(r);
        checked += 1;
    };
    let exhaustive = n <= EXHAUSTIVE_MAX_N;
    if exhaustive {
        for m in 1..1u64 << n {
            visit(&Subset::from_mask(n, m));
        }
    } else {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        for j in 0..n {
            visit(&Subset::empty(n).with(j));
        }
        visit(&Subset::full(n));
        for _ in 0..samples {
            let p: f64 = rng.random();
            let mut x = Subset::empty(n);
            for j in 0..n {
                if rng.random_bool(p) {
                    x.insert(j);
                }
            }
            if !x.is_empty() {
                visit(&x);
            }
        }
    }
    Sandwich {
        lower,
        upper,
        exhaustive,
        checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{CatalogEntry, FunctionOracle, ModularFn};
    use crate::props::{check_submodular, CheckMode};

    fn card_trunc(n: usize, cap: f64) -> FunctionOracle {
        FunctionOracle::new(CatalogEntry::CardTruncation { n, cap }).unwrap()
    }

    #[test]
    fn curvature_of_simple_functions() {
        let w = [1.0, 2.0, 3.0];
        assert_eq!(curvature(&ModularFn(&w)).unwrap(), 0.0);
        assert_eq!(curvature(&card_trunc(2, 1.0)).unwrap(), 1.0);
        assert_eq!(curvature(&card_trunc(4, 4.0)).unwrap(), 0.0);
    }

    #[test]
    fn subgradient_of_truncation_saturates() {
        let h = subgradient(&card_trunc(4, 2.0), &Permutation::identity(4)).unwrap();
        assert_eq!(h.weights, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(h.direction, Direction::Lower);
    }

    #[test]
    fn subgradient_of_modular_is_itself() {
        let w = [0.5, 2.0, 1.5, 3.0];
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        for _ in 0..5 {
            let pi = Permutation::random(4, &mut rng);
            assert_eq!(
                subgradient(&ModularFn(&w), &pi).unwrap().weights,
                w.to_vec()
            );
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        let y = Subset::from_elements(5, [1, 3]).unwrap();
        let pi = Permutation::placing_first(&y);
        assert_eq!(pi.order(), &[1, 3, 0, 2, 4]);
        assert_eq!(pi.prefix(2), y);
    }

    #[test]
    fn upper_bounds_at_empty_are_singletons() {
        let f = card_trunc(4, 2.0);
        let empty = Subset::empty(4);
        for variant in [BoundVariant::M1, BoundVariant::M2] {
            let m = upper_bound(&f, &empty, variant).unwrap();
            assert_eq!(m.offset, 0.0);
            assert_eq!(m.weights, vec![1.0; 4]);
        }
    }

    #[test]
    fn upper_bound_tight_at_anchor() {
        let f = card_trunc(5, 3.0);
        let x = Subset::from_elements(5, [0, 2, 4]).unwrap();
        for variant in [BoundVariant::M1, BoundVariant::M2] {
            let m = upper_bound(&f, &x, variant).unwrap();
            assert_eq!(m.value(&x), f.eval(&x));
        }
    }

    #[test]
    fn curve_normalize_full_curvature_is_identity() {
        let f = card_trunc(4, 2.0);
        let fk = curve_normalize(&f).unwrap();
        assert_eq!(fk.kappa(), 1.0);
        for m in 0..16 {
            let x = Subset::from_mask(4, m);
            assert_eq!(fk.eval(&x), f.eval(&x));
        }
    }

    #[test]
    fn curve_normalize_rejects_modular() {
        let w = [1.0, 2.0];
        assert!(curve_normalize(ModularFn(&w)).is_err());
    }

    #[test]
    fn ea_surrogate_basics() {
        let f = card_trunc(6, 2.0);
        let w = vec![4.0, 1.0, 9.0, 1.0, 1.0, 1.0];
        let s = ea_surrogate(&f, w).unwrap();
        assert_eq!(s.value(&Subset::from_elements(6, [2]).unwrap()), 3.0);
        assert!(ea_surrogate(&f, vec![-1.0; 6]).is_err());
        let m = [1.0, 1.0];
        assert!(ea_surrogate(&ModularFn(&m), vec![1.0; 2]).is_err());
    }

    #[test]
    fn ea_surrogate_is_submodular() {
        let s = EASurrogate::new(
            0.4,
            vec![0.3, 2.0, 1.0, 5.0, 0.1, 0.7],
            vec![1.0, 0.5, 2.0, 0.2, 1.0, 3.0],
        )
        .unwrap();
        assert!(check_submodular(&s, CheckMode::Exhaustive).passed());
    }

    #[test]
    fn default_weights_on_truncation_give_root_cardinality() {
        let (n, alpha) = (12, 3.0);
        let f = card_trunc(n, alpha);
        let w = default_ea_weights(&f).unwrap();
        assert!(w.iter().all(|&v| v == 1.0));
        let s = ea_surrogate(&f, w).unwrap();
        let sw = measure_sandwich(&f, &s, 0, 0);
        assert!(sw.exhaustive);
        assert_eq!(sw.checked, (1 << n) - 1);
        // min{|X|, α} / √|X| ranges over [α/√n, √α]
        assert!((sw.lower - alpha / (n as f64).sqrt()).abs() < 1e-12);
        assert!((sw.upper - alpha.sqrt()).abs() < 1e-12);
        assert!(sw.factor() <= (n as f64).sqrt());
    }
}
