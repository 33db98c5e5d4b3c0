//! Majorize-minimize schemes over modular upper bounds, and the cost-blind
//! knapsack greedy.

use serde::{Deserialize, Serialize};

use crate::bounds::{curvature, upper_bound, BoundVariant};
use crate::brute::same_ground;
use crate::error::Result;
use crate::oracle::SetFunction;
use crate::report::{Bound, GuaranteeCert, SolveReport, TraceEntry};
use crate::solvers::cert::{big_k_f, curvature_ratio, gr_factor, h_g, k_g, small_k_f};
use crate::solvers::greedy::{greedy_cover, greedy_knapsack, Enumeration};
use crate::subset::Subset;
use crate::TOL;

pub const DEFAULT_MAX_ITERS: usize = 50;

/// Settings shared by the iterative cover and knapsack schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterOptions {
    pub variant: BoundVariant,
    pub max_iters: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            variant: BoundVariant::M2,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Which guarantee the iterative knapsack scheme targets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IskMode {
    /// Stay within the budget; compete with the optimum at a shrunk budget.
    #[default]
    Feasible,
    /// Inflate the budget; compete with the optimum at the original budget.
    Type1,
}

/// Iterated cover: minimize the modular upper bound of `f` at the current
/// iterate subject to `g(X) ≥ c`, and repeat while the true cost strictly
/// improves.
pub fn issc<F, G>(f: &F, g: &G, c: f64, opts: IterOptions) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    let mut anchor = Subset::empty(n);
    let mut incumbent: Option<(Subset, f64)> = None;
    let mut trace = Vec::new();
    for t in 0..opts.max_iters.max(1) {
        let m = upper_bound(f, &anchor, opts.variant)?;
        let cand = greedy_cover(&m.weights, g, c)?;
        let fv = f.eval(&cand);
        let accepted = incumbent.as_ref().is_none_or(|(_, best)| fv < best - TOL);
        trace.push(TraceEntry {
            iteration: t + 1,
            surrogate: format!("{}@{}", opts.variant.tag(), anchor),
            f_value: fv,
            g_value: g.eval(&cand),
            accepted,
        });
        if !accepted {
            break;
        }
        anchor = cand.clone();
        incumbent = Some((cand, fv));
    }
    let (x, _) = incumbent.expect("first iterate is always accepted");
    let iterations = trace.iter().filter(|e| e.accepted).count();

    let kappa_f = curvature(f)?;
    let kg = k_g(g, c);
    let (h, integral) = h_g(g);
    let sigma = kg.value as f64 * h / (1.0 + (kg.value as f64 - 1.0) * (1.0 - kappa_f));
    let mut cert = GuaranteeCert::new("issc", sigma, 1.0, "K_g H_g / (1 + (K_g - 1)(1 - kappa_f))");
    cert.ingredients.h_g = Some(h);
    cert.ingredients.h_g_integral = Some(integral);
    cert.ingredients.k_g = Some(kg);
    cert.ingredients.kappa_f = Some(kappa_f);
    if !kg.exact {
        cert = cert.note("K_g estimated from above");
    }
    Ok(SolveReport::new(
        f,
        g,
        Bound::Cover(c),
        x,
        iterations,
        trace,
        cert,
    ))
}

/// Cost-blind greedy: add the element of largest `g` gain among those that
/// keep `f(X) ≤ b`, until nothing fits.
pub fn gr<F, G>(f: &F, g: &G, b: f64) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    let mut s = Subset::empty(n);
    let mut gs = g.eval(&s);
    loop {
        let mut best: Option<(f64, usize, f64)> = None;
        for j in 0..n {
            if s.contains(j) {
                continue;
            }
            let sj = s.with(j);
            if f.eval(&sj) > b + TOL {
                continue;
            }
            let gj = g.eval(&sj);
            let gain = gj - gs;
            if best.is_none_or(|(bg, _, _)| gain > bg + TOL) {
                best = Some((gain, j, gj));
            }
        }
        match best {
            Some((_, j, gj)) => {
                s.insert(j);
                gs = gj;
            }
            None => break,
        }
    }

    let kappa_g = curvature(g)?;
    let big = big_k_f(f, b);
    let small = small_k_f(f, b);
    let rho = gr_factor(big.value, small.value, kappa_g);
    let relaxed = if big.value == 0 {
        1.0
    } else {
        1.0 / big.value as f64
    };
    let mut cert = GuaranteeCert::new(
        "gr",
        1.0,
        rho,
        "(1/kappa_g)(1 - ((K_f - kappa_g)/K_f)^k_f) >= 1/K_f",
    );
    cert.ingredients.big_k_f = Some(big);
    cert.ingredients.small_k_f = Some(small);
    cert.ingredients.kappa_g = Some(kappa_g);
    cert = cert.note(format!("relaxed factor 1/K_f = {relaxed}"));
    if !big.exact || !small.exact {
        cert = cert.note("K_f estimated from above, k_f from below");
    }
    Ok(SolveReport::new(
        f,
        g,
        Bound::Budget(b),
        s,
        1,
        Vec::new(),
        cert,
    ))
}

/// Iterated knapsack: maximize `g` subject to the modular upper bound of
/// `f` at the current iterate fitting the budget, and repeat while `g`
/// strictly improves.
pub fn isk<F, G>(
    f: &F,
    g: &G,
    b: f64,
    opts: IterOptions,
    mode: IskMode,
    enumeration: Enumeration,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    let kappa_f = curvature(f)?;
    let big = big_k_f(f, b);
    let inflation = curvature_ratio(big.value, kappa_f);
    let budget = match mode {
        IskMode::Feasible => b,
        IskMode::Type1 => b * inflation,
    };

    let mut anchor = Subset::empty(n);
    let mut incumbent: Option<(Subset, f64)> = None;
    let mut trace = Vec::new();
    for t in 0..opts.max_iters.max(1) {
        let m = upper_bound(f, &anchor, opts.variant)?;
        let cand = greedy_knapsack(&m.weights, g, budget - m.offset, enumeration)?;
        let gv = g.eval(&cand);
        let fv = f.eval(&cand);
        let accepted =
            fv <= budget + TOL && incumbent.as_ref().is_none_or(|(_, best)| gv > best + TOL);
        trace.push(TraceEntry {
            iteration: t + 1,
            surrogate: format!("{}@{}", opts.variant.tag(), anchor),
            f_value: fv,
            g_value: gv,
            accepted,
        });
        if !accepted {
            break;
        }
        anchor = cand.clone();
        incumbent = Some((cand, gv));
    }
    let x = incumbent
        .map(|(x, _)| x)
        .unwrap_or_else(|| Subset::empty(n));
    let iterations = trace.iter().filter(|e| e.accepted).count();

    let rho = enumeration.factor();
    let mut cert = match mode {
        IskMode::Feasible => {
            let mut c = GuaranteeCert::new(
                "isk",
                1.0,
                rho,
                "g(X) >= rho g(OPT at b (1 + (K_f - 1)(1 - kappa_f)) / K_f)",
            );
            c.reference_bound = Some(b / inflation);
            c
        }
        IskMode::Type1 => {
            let mut c = GuaranteeCert::new(
                "isk-type1",
                inflation,
                rho,
                "[rho, K_f / (1 + (K_f - 1)(1 - kappa_f))]",
            );
            c.reference_bound = Some(b);
            c
        }
    };
    cert.ingredients.big_k_f = Some(big);
    cert.ingredients.kappa_f = Some(kappa_f);
    if !big.exact {
        cert = cert.note("K_f estimated from above");
    }
    if enumeration == Enumeration::None {
        cert = cert.note("inner knapsack greedy without partial enumeration");
    }
    Ok(SolveReport::new(
        f,
        g,
        Bound::Budget(b),
        x,
        iterations,
        trace,
        cert,
    ))
}
