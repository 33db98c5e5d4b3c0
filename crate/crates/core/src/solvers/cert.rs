//! Ingredients of the guarantee certificates: harmonic factors and extremal
//! feasible-set cardinalities.

use crate::oracle::{singletons, SetFunction};
use crate::props::EXHAUSTIVE_MAX_N;
use crate::report::Extremal;
use crate::subset::Subset;
use crate::TOL;

pub const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// `H(d) = Σ_{i=1}^{d} 1/i`.
pub fn harmonic(d: u64) -> f64 {
    (1..=d).map(|i| 1.0 / i as f64).sum()
}

/// Set-cover factor of the greedy cover rule for coverage `g`.
///
/// Integral coverage (every singleton within tolerance of an integer) gives
/// `H(max_j g(j))`; otherwise `1 + ln(g(V)/1e-9)`, flagged by the returned
/// `false`.
pub fn h_g<G: SetFunction + ?Sized>(g: &G) -> (f64, bool) {
    let single = singletons(g);
    let integral = single.iter().all(|v| (v - v.round()).abs() <= TOL);
    if integral {
        let d = single.iter().fold(0.0f64, |a, &v| a.max(v.round()));
        (harmonic(d as u64), true)
    } else {
        let top = g.eval(&Subset::full(g.ground_size()));
        (1.0 + (top / TOL).ln(), false)
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Largest `t` such that the `t` smallest values sum to at most `limit`.
fn max_count_within(values: Vec<f64>, limit: f64) -> usize {
    let mut total = 0.0;
    let mut count = 0;
    for v in sorted(values) {
        total += v;
        if total > limit + TOL {
            break;
        }
        count += 1;
    }
    count
}

/// Removal gains `f(j | V∖j)`: `Σ_{j∈X} f(j|V∖j) ≤ f(X)` for submodular `f`.
fn removal_gains<F: SetFunction + ?Sized>(f: &F) -> Vec<f64> {
    let n = f.ground_size();
    let full = Subset::full(n);
    let top = f.eval(&full);
    (0..n)
        .map(|j| (top - f.eval(&full.without(j))).max(0.0))
        .collect()
}

/// `K_g = 1 + max{|X| : g(X) < c}`.
///
/// Exact by enumeration for small ground sets and by sorting for modular
/// `g`. Otherwise an upper bound from the modular lower bound
/// `Σ_{j∈X} g(j|V∖j) ≤ g(X)`; the certificate factors increase with `K_g`,
/// so the estimate keeps them valid.
pub fn k_g<G: SetFunction + ?Sized>(g: &G, c: f64) -> Extremal {
    let n = g.ground_size();
    if n <= EXHAUSTIVE_MAX_N {
        let mut best = 0;
        for m in 0..1u64 << n {
            let x = Subset::from_mask(n, m);
            if x.len() > best && g.eval(&x) < c - TOL {
                best = x.len();
            }
        }
        return Extremal {
            value: 1 + best,
            exact: true,
        };
    }
    // strict "< c" read as "<= c - 2 TOL" so the shared helper can be reused
    if let Some(w) = g.modular_weights() {
        return Extremal {
            value: 1 + max_count_within(w, c - 2.0 * TOL).min(n),
            exact: true,
        };
    }
    Extremal {
        value: 1 + max_count_within(removal_gains(g), c - 2.0 * TOL).min(n),
        exact: false,
    }
}

/// `K_f = max{|X| : f(X) ≤ b}`, exact when enumerable or modular; otherwise
/// an upper bound from `Σ_{j∈X} f(j|V∖j) ≤ f(X)`.
pub fn big_k_f<F: SetFunction + ?Sized>(f: &F, b: f64) -> Extremal {
    let n = f.ground_size();
    if n <= EXHAUSTIVE_MAX_N {
        let mut best = 0;
        for m in 0..1u64 << n {
            let x = Subset::from_mask(n, m);
            if x.len() > best && f.eval(&x) <= b + TOL {
                best = x.len();
            }
        }
        return Extremal {
            value: best,
            exact: true,
        };
    }
    match f.modular_weights() {
        Some(w) => Extremal {
            value: max_count_within(w, b),
            exact: true,
        },
        None => Extremal {
            value: max_count_within(removal_gains(f), b),
            exact: false,
        },
    }
}

/// `k_f = min{|X| : f(X) ≤ b and f(X ∪ j) > b for all j ∉ X}`, the size of
/// the smallest maximal feasible set.
///
/// Exact by enumeration for small ground sets. Otherwise a lower bound: a
/// maximal `X ≠ V` has some `j` with `b < f(X ∪ j) ≤ Σ_{i∈X∪j} f(i)`, so
/// the `|X|+1` largest singletons must exceed `b`.
pub fn small_k_f<F: SetFunction + ?Sized>(f: &F, b: f64) -> Extremal {
    let n = f.ground_size();
    if n <= EXHAUSTIVE_MAX_N {
        let table: Vec<f64> = (0..1u64 << n)
            .map(|m| f.eval(&Subset::from_mask(n, m)))
            .collect();
        let mut best = n;
        for (m, &v) in table.iter().enumerate() {
            if v > b + TOL || (m.count_ones() as usize) >= best {
                continue;
            }
            let maximal = (0..n).all(|j| m >> j & 1 == 1 || table[m | 1 << j] > b + TOL);
            if maximal {
                best = m.count_ones() as usize;
            }
        }
        return Extremal {
            value: best,
            exact: true,
        };
    }
    if f.eval(&Subset::full(n)) <= b + TOL {
        return Extremal {
            value: n,
            exact: true,
        };
    }
    let mut desc = sorted(singletons(f));
    desc.reverse();
    let mut total = 0.0;
    let mut t = 0;
    for v in desc {
        total += v;
        if total > b + TOL {
            break;
        }
        t += 1;
    }
    Extremal {
        value: t,
        exact: false,
    }
}

/// `K / (1 + (K - 1)(1 - κ))`, with the empty case mapped to 1.
pub fn curvature_ratio(k: usize, kappa: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let k = k as f64;
    k / (1.0 + (k - 1.0) * (1.0 - kappa))
}

/// `(1/κ_g)(1 - ((K_f - κ_g)/K_f)^{k_f})`, with the `κ_g → 0` limit
/// `k_f/K_f` and the value 1 when nothing fits.
pub fn gr_factor(big_k: usize, small_k: usize, kappa_g: f64) -> f64 {
    if big_k == 0 {
        return 1.0;
    }
    let (kk, k) = (big_k as f64, small_k as f64);
    if kappa_g <= 0.0 {
        return (k / kk).min(1.0);
    }
    ((1.0 - ((kk - kappa_g) / kk).powf(k)) / kappa_g).min(1.0)
}
