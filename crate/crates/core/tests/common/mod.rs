#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use subcons::{CatalogEntry, FunctionOracle, Matrix, SetFunction, Subset, TOL};

pub type TestRng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn subsets(n: usize) -> impl Iterator<Item = Subset> {
    (0..1u64 << n).map(move |m| Subset::from_mask(n, m))
}

pub fn oracle(e: CatalogEntry) -> FunctionOracle {
    FunctionOracle::new(e).unwrap()
}

/// Entries uniform in `(0, 1]`.
pub fn matrix(rng: &mut TestRng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| 1.0 - rng.random::<f64>()).collect())
        .collect()
}

pub fn facility(rng: &mut TestRng, n: usize) -> FunctionOracle {
    oracle(CatalogEntry::FacilityLocation {
        similarity: Matrix::Rows(matrix(rng, n, n)),
    })
}

pub fn saturated(rng: &mut TestRng, n: usize, alpha: f64) -> FunctionOracle {
    oracle(CatalogEntry::SaturatedSum {
        similarity: Matrix::Rows(matrix(rng, n, n)),
        alpha,
    })
}

/// Each element gets 1 to 3 distinct words out of `words`.
pub fn adjacency(rng: &mut TestRng, n: usize, words: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let k = rng.random_range(1..=3.min(words));
            let mut w: Vec<usize> = rand::seq::index::sample(rng, words, k).into_vec();
            w.sort_unstable();
            w
        })
        .collect()
}

pub fn bipartite(rng: &mut TestRng, n: usize, words: usize, unit: bool) -> FunctionOracle {
    let word_weights = (0..words)
        .map(|_| if unit { 1.0 } else { 0.5 + rng.random::<f64>() })
        .collect();
    oracle(CatalogEntry::BipartiteNeighborhood {
        adjacency: adjacency(rng, n, words),
        word_weights,
    })
}

pub fn int_modular(rng: &mut TestRng, n: usize, hi: u32) -> FunctionOracle {
    oracle(CatalogEntry::Modular {
        weights: (0..n).map(|_| rng.random_range(1..=hi) as f64).collect(),
    })
}

pub fn real_modular(rng: &mut TestRng, n: usize) -> FunctionOracle {
    oracle(CatalogEntry::Modular {
        weights: (0..n).map(|_| 0.5 + rng.random::<f64>()).collect(),
    })
}

pub fn random_subset(rng: &mut TestRng, n: usize) -> Subset {
    let mut x = Subset::empty(n);
    for j in 0..n {
        if rng.random_bool(0.5) {
            x.insert(j);
        }
    }
    x
}

/// `min {f(X) : g(X) ≥ c}` by enumeration.
pub fn opt_cover(f: &dyn SetFunction, g: &dyn SetFunction, c: f64) -> f64 {
    subsets(f.ground_size())
        .filter(|x| g.eval(x) >= c - TOL)
        .map(|x| f.eval(&x))
        .fold(f64::INFINITY, f64::min)
}

/// `max {g(X) : f(X) ≤ b}` by enumeration.
pub fn opt_knapsack(f: &dyn SetFunction, g: &dyn SetFunction, b: f64) -> f64 {
    subsets(f.ground_size())
        .filter(|x| f.eval(x) <= b + TOL)
        .map(|x| g.eval(&x))
        .fold(0.0, f64::max)
}

pub fn full_value(h: &dyn SetFunction) -> f64 {
    h.eval(&Subset::full(h.ground_size()))
}

pub fn min_singleton(h: &dyn SetFunction) -> f64 {
    let n = h.ground_size();
    (0..n)
        .map(|j| h.eval(&Subset::empty(n).with(j)))
        .fold(f64::INFINITY, f64::min)
}

/// A cover level uniform in `[min_j g(j), g(V)]`.
pub fn cover_level(rng: &mut TestRng, g: &dyn SetFunction) -> f64 {
    let (lo, hi) = (min_singleton(g), full_value(g));
    lo + rng.random::<f64>() * (hi - lo)
}

/// A budget uniform in `[min_j f(j), f(V)]`.
pub fn budget(rng: &mut TestRng, f: &dyn SetFunction) -> f64 {
    cover_level(rng, f)
}

/// `1 - min_j f(j | V∖j) / f(j)`, straight from the values.
pub fn naive_curvature(f: &dyn SetFunction) -> f64 {
    let n = f.ground_size();
    let full = Subset::full(n);
    let top = f.eval(&full);
    (0..n)
        .map(|j| 1.0 - (top - f.eval(&full.without(j))) / f.eval(&Subset::empty(n).with(j)))
        .fold(0.0, f64::max)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
