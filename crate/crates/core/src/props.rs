//! Structural property checks for set functions.
//!
//! Ground sets with at most [`EXHAUSTIVE_MAX_N`] elements are checked over
//! every subset; larger ones are probed with seeded random samples.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::oracle::SetFunction;
use crate::subset::Subset;
use crate::TOL;

pub const EXHAUSTIVE_MAX_N: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Normalized,
    PositiveSingletons,
    Monotone,
    Submodular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl CheckMode {
    /// Exhaustive when the ground set is small enough, otherwise 10 000
    /// seeded samples.
    pub fn auto(n: usize, seed: u64) -> Self {
        if n <= EXHAUSTIVE_MAX_N {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled {
                samples: 10_000,
                seed,
            }
        }
    }
}

/// A witnessing violation. For submodularity `S ⊆ T`, `j ∉ T` and
/// `f(j|S) < f(j|T)`; for monotonicity `f(S ∪ j) < f(S)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub s: Subset,
    pub t: Option<Subset>,
    pub j: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub mode: CheckMode,
    pub checked: u64,
    pub violation: Option<Violation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// All `2^n` values of `f`, indexed by bitmask.
pub fn value_table<F: SetFunction + ?Sized>(f: &F) -> Vec<f64> {
    let n = f.ground_size();
    assert!(n <= 24, "value table limited to 24 elements");
    (0..1u64 << n)
        .map(|m| f.eval(&Subset::from_mask(n, m)))
        .collect()
}

pub fn check_normalized<F: SetFunction + ?Sized>(f: &F) -> PropertyReport {
    let empty = Subset::empty(f.ground_size());
    let v = f.eval(&empty);
    PropertyReport {
        property: Property::Normalized,
        mode: CheckMode::Exhaustive,
        checked: 1,
        violation: (v.abs() > TOL).then(|| Violation {
            s: empty,
            t: None,
            j: None,
            lhs: v,
            rhs: 0.0,
        }),
    }
}

pub fn check_positive_singletons<F: SetFunction + ?Sized>(f: &F) -> PropertyReport {
    let n = f.ground_size();
    let empty = Subset::empty(n);
    let violation = (0..n).find_map(|j| {
        let v = f.eval(&empty.with(j));
        (!(v > 0.0)).then(|| Violation {
            s: empty.with(j),
            t: None,
            j: Some(j),
            lhs: v,
            rhs: 0.0,
        })
    });
    PropertyReport {
        property: Property::PositiveSingletons,
        mode: CheckMode::Exhaustive,
        checked: n as u64,
        violation,
    }
}

pub fn check_monotone<F: SetFunction + ?Sized>(f: &F, mode: CheckMode) -> PropertyReport {
    let n = f.ground_size();
    let mut checked = 0u64;
    let mut violation = None;
    match mode {
        CheckMode::Exhaustive => {
            let table = value_table(f);
            'outer: for m in 0..table.len() as u64 {
                for j in 0..n {
                    if m >> j & 1 == 1 {
                        continue;
                    }
                    checked += 1;
                    let (lo, hi) = (table[m as usize], table[(m | 1 << j) as usize]);
                    if hi < lo - TOL {
                        violation = Some(Violation {
                            s: Subset::from_mask(n, m),
                            t: None,
                            j: Some(j),
                            lhs: hi,
                            rhs: lo,
                        });
                        break 'outer;
                    }
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            for _ in 0..samples {
                let s = random_subset(n, &mut rng);
                if s.len() == n {
                    continue;
                }
                let j = random_outside(&s, &mut rng);
                checked += 1;
                let (lo, hi) = (f.eval(&s), f.eval(&s.with(j)));
                if hi < lo - TOL {
                    violation = Some(Violation {
                        s,
                        t: None,
                        j: Some(j),
                        lhs: hi,
                        rhs: lo,
                    });
                    break;
                }
            }
        }
    }
    PropertyReport {
        property: Property::Monotone,
        mode,
        checked,
        violation,
    }
}

/// Diminishing returns. The exhaustive mode checks the equivalent local
/// condition `f(j|S) ≥ f(j|S ∪ k)` for all `S` and distinct `j, k ∉ S`.
pub fn check_submodular<F: SetFunction + ?Sized>(f: &F, mode: CheckMode) -> PropertyReport {
    let n = f.ground_size();
    let mut checked = 0u64;
    let mut violation = None;
    match mode {
        CheckMode::Exhaustive => {
            let table = value_table(f);
            'outer: for m in 0..table.len() {
                for j in 0..n {
                    if m >> j & 1 == 1 {
                        continue;
                    }
                    let gain_s = table[m | 1 << j] - table[m];
                    for k in 0..n {
                        if k == j || m >> k & 1 == 1 {
                            continue;
                        }
                        checked += 1;
                        let t = m | 1 << k;
                        let gain_t = table[t | 1 << j] - table[t];
                        if gain_s < gain_t - TOL {
                            violation = Some(Violation {
                                s: Subset::from_mask(n, m as u64),
                                t: Some(Subset::from_mask(n, t as u64)),
                                j: Some(j),
                                lhs: gain_s,
                                rhs: gain_t,
                            });
                            break 'outer;
                        }
                    }
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            for _ in 0..samples {
                let t = random_subset(n, &mut rng);
                if t.len() == n {
                    continue;
                }
                let mut s = t.clone();
                for e in t.iter() {
                    if rng.random_bool(0.5) {
                        s.remove(e);
                    }
                }
                let j = random_outside(&t, &mut rng);
                checked += 1;
                let (gain_s, gain_t) = (f.gain(j, &s), f.gain(j, &t));
                if gain_s < gain_t - TOL {
                    violation = Some(Violation {
                        s,
                        t: Some(t),
                        j: Some(j),
                        lhs: gain_s,
                        rhs: gain_t,
                    });
                    break;
                }
            }
        }
    }
    PropertyReport {
        property: Property::Submodular,
        mode,
        checked,
        violation,
    }
}

/// Runs every property check.
pub fn check_all<F: SetFunction + ?Sized>(f: &F, seed: u64) -> Vec<PropertyReport> {
    let mode = CheckMode::auto(f.ground_size(), seed);
    vec![
        check_normalized(f),
        check_positive_singletons(f),
        check_monotone(f, mode),
        check_submodular(f, mode),
    ]
}

fn random_subset<R: Rng>(n: usize, rng: &mut R) -> Subset {
    let mut s = Subset::empty(n);
    for j in 0..n {
        if rng.random_bool(0.5) {
            s.insert(j);
        }
    }
    s
}

fn random_outside<R: Rng>(s: &Subset, rng: &mut R) -> usize {
    let outside: Vec<usize> = s.complement().iter().collect();
    outside[rng.random_range(0..outside.len())]
}
