//! Conversions between cover and knapsack solvers by searching over the
//! constraint level, and cover-constraint combinators.
//!
//! A cover solver with factors `[σ, ρ]` returns `X` with `f(X) ≤ σ·OPT` and
//! `g(X) ≥ ρ·c`; a knapsack solver with factors `[ρ, σ]` returns `X` with
//! `g(X) ≥ ρ·OPT` and `f(X) ≤ σ·b`.

use serde::{Deserialize, Serialize};

use crate::brute::{brute_force_scsc, brute_force_scsk, same_ground};
use crate::error::{Error, Result};
use crate::oracle::{singletons, truncate, CatalogEntry, FunctionOracle, SetFunction};
use crate::report::{Bound, GuaranteeCert, SolveReport, TraceEntry};
use crate::subset::Subset;
use crate::TOL;

pub const DEFAULT_EPS: f64 = 0.05;

/// Probe budgets are this multiple of the theoretical bound.
const CAP_MULTIPLIER: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiCriterion {
    pub sigma: f64,
    pub rho: f64,
    pub eps: f64,
}

impl BiCriterion {
    pub fn new(sigma: f64, rho: f64, eps: f64) -> Result<Self> {
        if !(sigma >= 1.0) || !(rho > 0.0 && rho <= 1.0) || !(eps > 0.0) {
            return Err(Error::parameter(format!(
                "invalid bicriteria factors sigma={sigma} rho={rho} eps={eps}"
            )));
        }
        Ok(BiCriterion { sigma, rho, eps })
    }
}

/// Solves `min {f(X) : g(X) ≥ c}` for any `c`, with fixed factors.
pub trait CoverSolver {
    fn label(&self) -> String;
    /// `(σ, ρ)`.
    fn factors(&self) -> (f64, f64);
    fn solve_cover(&self, c: f64) -> Result<SolveReport>;
}

/// Solves `max {g(X) : f(X) ≤ b}` for any `b`, with fixed factors.
pub trait KnapsackSolver {
    fn label(&self) -> String;
    /// `(σ, ρ)`.
    fn factors(&self) -> (f64, f64);
    fn solve_budget(&self, b: f64) -> Result<SolveReport>;
}

/// A cover or knapsack solver assembled from a closure.
pub struct FnSolver<S> {
    pub label: String,
    pub sigma: f64,
    pub rho: f64,
    pub solve: S,
}

impl<S> FnSolver<S> {
    pub fn new(label: impl Into<String>, sigma: f64, rho: f64, solve: S) -> Self {
        FnSolver {
            label: label.into(),
            sigma,
            rho,
            solve,
        }
    }
}

impl<S: Fn(f64) -> Result<SolveReport>> CoverSolver for FnSolver<S> {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn factors(&self) -> (f64, f64) {
        (self.sigma, self.rho)
    }
    fn solve_cover(&self, c: f64) -> Result<SolveReport> {
        (self.solve)(c)
    }
}

impl<S: Fn(f64) -> Result<SolveReport>> KnapsackSolver for FnSolver<S> {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn factors(&self) -> (f64, f64) {
        (self.sigma, self.rho)
    }
    fn solve_budget(&self, b: f64) -> Result<SolveReport> {
        (self.solve)(b)
    }
}

/// Exact cover solver by enumeration (`σ = ρ = 1`).
pub fn brute_force_cover<'a, F, G>(
    f: &'a F,
    g: &'a G,
) -> FnSolver<impl Fn(f64) -> Result<SolveReport> + 'a>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    FnSolver::new("brute-force", 1.0, 1.0, move |c| brute_force_scsc(f, g, c))
}

/// Exact knapsack solver by enumeration (`σ = ρ = 1`).
pub fn brute_force_knapsack<'a, F, G>(
    f: &'a F,
    g: &'a G,
) -> FnSolver<impl Fn(f64) -> Result<SolveReport> + 'a>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    FnSolver::new("brute-force", 1.0, 1.0, move |b| brute_force_scsk(f, g, b))
}

fn is_integral(v: f64) -> bool {
    (v - v.round()).abs() <= TOL
}

fn min_value(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `⌈log_{1/(1-ε)}(g(V)/min_j g(j))⌉ + 1`.
pub fn linear_cover_search_bound(g_full: f64, g_min: f64, eps: f64) -> usize {
    ((g_full / g_min).ln() / (1.0 / (1.0 - eps)).ln())
        .ceil()
        .max(0.0) as usize
        + 1
}

/// `⌈log_{1+ε}(f(V)/min_j f(j))⌉ + 1`.
pub fn linear_budget_search_bound(f_full: f64, f_min: f64, eps: f64) -> usize {
    ((f_full / f_min).ln() / (1.0 + eps).ln()).ceil().max(0.0) as usize + 1
}

/// Probe bound of the bisections: `⌈log₂(hi - lo)⌉ + 1` over integers,
/// `⌈log₂(hi/(ε·lo))⌉ + 1` otherwise.
pub fn binary_search_bound(hi: f64, lo: f64, eps: f64, integral: bool) -> usize {
    let span = if integral {
        (hi - lo).round()
    } else {
        hi / (eps * lo)
    };
    if span <= 1.0 {
        return 1;
    }
    span.log2().ceil() as usize + 1
}

struct Probes {
    count: usize,
    cap: usize,
    trace: Vec<TraceEntry>,
}

impl Probes {
    fn new(bound: usize) -> Self {
        Probes {
            count: 0,
            cap: CAP_MULTIPLIER * bound.max(1),
            trace: Vec::new(),
        }
    }

    fn record(&mut self, label: String, r: &SolveReport, accepted: bool) {
        self.count += 1;
        self.trace.push(TraceEntry {
            iteration: self.count,
            surrogate: label,
            f_value: r.f_value,
            g_value: r.g_value,
            accepted,
        });
    }

    fn check_cap(&self) -> Result<()> {
        if self.count >= self.cap {
            return Err(Error::SearchExhausted {
                probes: self.count,
                cap: self.cap,
            });
        }
        Ok(())
    }
}

fn finish<F, G>(
    f: &F,
    g: &G,
    bound: Bound,
    solution: Subset,
    probes: Probes,
    cert: GuaranteeCert,
) -> SolveReport
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    SolveReport::new(f, g, bound, solution, probes.count, probes.trace, cert)
}

fn check_eps(eps: f64, below_one: bool) -> Result<()> {
    if !(eps > 0.0) || (below_one && eps >= 1.0) {
        return Err(Error::parameter(format!("eps {eps} out of range")));
    }
    Ok(())
}

fn check_budget<F: SetFunction + ?Sized>(f: &F, b: f64) -> Result<(Vec<f64>, f64)> {
    let fs = singletons(f);
    let f_min = min_value(&fs);
    if b < f_min - TOL {
        return Err(Error::parameter(format!(
            "budget {b} below the cheapest element {f_min}; only the empty set is feasible"
        )));
    }
    Ok((fs, f_min))
}

fn check_cover<G: SetFunction + ?Sized>(g: &G, c: f64) -> Result<(f64, f64)> {
    let g_full = g.eval(&Subset::full(g.ground_size()));
    if c > g_full + TOL {
        return Err(Error::infeasible(format!(
            "cover {c} exceeds g(V) = {g_full}"
        )));
    }
    Ok((g_full, min_value(&singletons(g))))
}

/// Knapsack via a cover solver, shrinking the cover level geometrically
/// from `g(V)` until the cover solution fits `σ·b`. Factors
/// `[(1-ε)ρ, σ]`.
pub fn scsk_via_scsc_linear<F, G>(
    inner: &dyn CoverSolver,
    f: &F,
    g: &G,
    b: f64,
    eps: f64,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    check_eps(eps, true)?;
    check_budget(f, b)?;
    let (g_full, g_min) = check_cover(g, 0.0)?;
    let (sigma, rho) = inner.factors();
    let mut probes = Probes::new(linear_cover_search_bound(g_full, g_min, eps));
    let mut c = g_full;
    loop {
        let r = inner.solve_cover(c)?;
        let ok = r.f_value <= sigma * b + TOL;
        probes.record(format!("c={c:e}"), &r, ok);
        if ok {
            let cert = GuaranteeCert::new(
                &format!("linear-scsk({})", inner.label()),
                sigma,
                (1.0 - eps) * rho,
                "[(1 - eps) rho, sigma]",
            );
            return Ok(finish(f, g, Bound::Budget(b), r.solution, probes, cert));
        }
        probes.check_cap()?;
        c *= 1.0 - eps;
    }
}

/// Cover via a knapsack solver, growing the budget geometrically from the
/// cheapest singleton until the knapsack solution covers `ρ·c`. Factors
/// `[(1+ε)σ, ρ]`.
pub fn scsc_via_scsk_linear<F, G>(
    inner: &dyn KnapsackSolver,
    f: &F,
    g: &G,
    c: f64,
    eps: f64,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    check_eps(eps, false)?;
    check_cover(g, c)?;
    let f_min = min_value(&singletons(f));
    let f_full = f.eval(&Subset::full(n));
    let (sigma, rho) = inner.factors();
    let mut probes = Probes::new(linear_budget_search_bound(f_full, f_min, eps));
    let mut b = f_min;
    loop {
        let r = inner.solve_budget(b)?;
        let ok = r.g_value >= rho * c - TOL;
        probes.record(format!("b={b:e}"), &r, ok);
        if ok {
            let cert = GuaranteeCert::new(
                &format!("linear-scsc({})", inner.label()),
                (1.0 + eps) * sigma,
                rho,
                "[(1 + eps) sigma, rho]",
            );
            return Ok(finish(f, g, Bound::Cover(c), r.solution, probes, cert));
        }
        probes.check_cap()?;
        b *= 1.0 + eps;
    }
}

/// Knapsack via a cover solver, bisecting the cover level. Keeps
/// `f(X̂_lo) ≤ σb < f(X̂_hi)` and stops when `hi - lo < ε·hi`, or at unit
/// gap for integral `g`, where the factors tighten to `[ρ, σ]`.
pub fn scsk_via_scsc_binary<F, G>(
    inner: &dyn CoverSolver,
    f: &F,
    g: &G,
    b: f64,
    eps: f64,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    check_eps(eps, true)?;
    let (fs, _) = check_budget(f, b)?;
    let (g_full, g_min) = check_cover(g, 0.0)?;
    let gs = singletons(g);
    let integral = is_integral(g_full) && gs.iter().all(|&v| is_integral(v));
    let (sigma, rho) = inner.factors();
    let label = format!("binary-scsk({})", inner.label());
    let (cert_rho, formula) = if integral {
        (rho, "[rho, sigma] (integral g)")
    } else {
        ((1.0 - eps) * rho, "[(1 - eps) rho, sigma]")
    };
    let cert = || GuaranteeCert::new(&label, sigma, cert_rho, formula);
    let mut probes = Probes::new(binary_search_bound(g_full, g_min, eps, integral));

    // X̂ at the lowest level: the cheapest singleton covers any c ≤ min g(j)
    let cheapest = (0..n).fold(0, |a, j| if fs[j] < fs[a] { j } else { a });
    let mut lo_set = Subset::empty(n).with(cheapest);
    let (mut lo, mut hi) = if integral {
        (g_min.round(), g_full.round())
    } else {
        (g_min, g_full)
    };
    if hi <= lo {
        return Ok(finish(f, g, Bound::Budget(b), lo_set, probes, cert()));
    }

    let top = inner.solve_cover(hi)?;
    let top_ok = top.f_value <= sigma * b + TOL;
    probes.record(format!("c={hi:e}"), &top, top_ok);
    if top_ok {
        return Ok(finish(f, g, Bound::Budget(b), top.solution, probes, cert()));
    }
    let more = |lo: f64, hi: f64| {
        if integral {
            hi - lo > 1.0
        } else {
            hi - lo >= eps * hi
        }
    };
    while more(lo, hi) {
        let c = if integral {
            (lo + (hi - lo) / 2.0).floor()
        } else {
            0.5 * (lo + hi)
        };
        let r = inner.solve_cover(c)?;
        let ok = r.f_value <= sigma * b + TOL;
        probes.record(format!("c={c:e}"), &r, ok);
        if ok {
            lo = c;
            lo_set = r.solution;
        } else {
            hi = c;
        }
        debug_assert!(lo < hi, "bisection interval collapsed");
        assert!(
            f.eval(&lo_set) <= sigma * b + TOL,
            "lower end lost feasibility"
        );
        probes.check_cap()?;
    }
    Ok(finish(f, g, Bound::Budget(b), lo_set, probes, cert()))
}

/// Cover via a knapsack solver, bisecting the budget. Keeps
/// `g(X̂_lo) < ρc ≤ g(X̂_hi)` and stops when `hi - lo < ε·lo`, or at unit
/// gap for integral `f`, where the factors tighten to `[σ, ρ]`.
pub fn scsc_via_scsk_binary<F, G>(
    inner: &dyn KnapsackSolver,
    f: &F,
    g: &G,
    c: f64,
    eps: f64,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    check_eps(eps, false)?;
    check_cover(g, c)?;
    let fs = singletons(f);
    let f_min = min_value(&fs);
    let f_full = f.eval(&Subset::full(n));
    let integral = is_integral(f_full) && fs.iter().all(|&v| is_integral(v));
    let (sigma, rho) = inner.factors();
    let label = format!("binary-scsc({})", inner.label());
    let (cert_sigma, formula) = if integral {
        (sigma, "[sigma, rho] (integral f)")
    } else {
        ((1.0 + eps) * sigma, "[(1 + eps) sigma, rho]")
    };
    let cert = || GuaranteeCert::new(&label, cert_sigma, rho, formula);
    let mut probes = Probes::new(binary_search_bound(f_full, f_min, eps, integral));

    // X̂ at the highest level: V covers everything
    let mut hi_set = Subset::full(n);
    let (mut lo, mut hi) = if integral {
        (f_min.round(), f_full.round())
    } else {
        (f_min, f_full)
    };
    if hi <= lo {
        return Ok(finish(f, g, Bound::Cover(c), hi_set, probes, cert()));
    }

    let bottom = inner.solve_budget(lo)?;
    let bottom_ok = bottom.g_value >= rho * c - TOL;
    probes.record(format!("b={lo:e}"), &bottom, bottom_ok);
    if bottom_ok {
        return Ok(finish(
            f,
            g,
            Bound::Cover(c),
            bottom.solution,
            probes,
            cert(),
        ));
    }
    let more = |lo: f64, hi: f64| {
        if integral {
            hi - lo > 1.0
        } else {
            hi - lo >= eps * lo
        }
    };
    while more(lo, hi) {
        let b = if integral {
            (lo + (hi - lo) / 2.0).floor()
        } else {
            0.5 * (lo + hi)
        };
        let r = inner.solve_budget(b)?;
        let ok = r.g_value >= rho * c - TOL;
        probes.record(format!("b={b:e}"), &r, ok);
        if ok {
            hi = b;
            hi_set = r.solution;
        } else {
            lo = b;
        }
        debug_assert!(lo < hi, "bisection interval collapsed");
        assert!(g.eval(&hi_set) >= rho * c - TOL, "upper end lost coverage");
        probes.check_cap()?;
    }
    Ok(finish(f, g, Bound::Cover(c), hi_set, probes, cert()))
}

/// `Σ_i min{g_i(X), α_i}`: the combined function reaches its value at `V`
/// exactly when every `g_i(X) ≥ α_i`.
pub fn combine_covers(oracles: &[FunctionOracle], caps: &[f64]) -> Result<FunctionOracle> {
    if oracles.is_empty() {
        return Err(Error::parameter("combine_covers needs at least one oracle"));
    }
    if oracles.len() != caps.len() {
        return Err(Error::parameter(format!(
            "{} oracles but {} caps",
            oracles.len(),
            caps.len()
        )));
    }
    let terms = oracles
        .iter()
        .zip(caps)
        .map(|(o, &cap)| truncate(o, cap).map(|t| t.entry().clone()))
        .collect::<Result<Vec<_>>>()?;
    FunctionOracle::new(CatalogEntry::Sum { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ModularFn;

    #[test]
    fn theoretical_bounds() {
        assert_eq!(linear_cover_search_bound(100.0, 1.0, 0.1), 45);
        assert_eq!(binary_search_bound(64.0, 1.0, 0.05, true), 7);
        assert_eq!(binary_search_bound(3.0, 3.0, 0.05, true), 1);
    }

    #[test]
    fn linear_budget_at_full_scale_takes_one_probe() {
        let f = [1.0, 2.0, 3.0];
        let g = [2.0, 1.0, 1.0];
        let (fm, gm) = (ModularFn(&f), ModularFn(&g));
        let inner = brute_force_cover(&fm, &gm);
        let r = scsk_via_scsc_linear(&inner, &fm, &gm, 6.0, 0.1).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.solution, Subset::full(3));
    }

    #[test]
    fn linear_cover_singleton_suffices() {
        let f = [1.0, 2.0, 3.0];
        let g = [2.0, 1.0, 1.0];
        let (fm, gm) = (ModularFn(&f), ModularFn(&g));
        let inner = brute_force_knapsack(&fm, &gm);
        let r = scsc_via_scsk_linear(&inner, &fm, &gm, 2.0, 0.1).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.solution.to_vec(), vec![0]);
    }

    #[test]
    fn binary_degenerate_interval_returns_immediately() {
        let f = [2.0];
        let g = [5.0];
        let (fm, gm) = (ModularFn(&f), ModularFn(&g));
        let inner = brute_force_cover(&fm, &gm);
        let r = scsk_via_scsc_binary(&inner, &fm, &gm, 2.0, 0.1).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.solution.to_vec(), vec![0]);
        let inner = brute_force_knapsack(&fm, &gm);
        let r = scsc_via_scsk_binary(&inner, &fm, &gm, 5.0, 0.1).unwrap();
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn binary_integral_probe_count() {
        let n = 64;
        let f: Vec<f64> = (0..n).map(|j| 1.0 + (j % 5) as f64).collect();
        let g = vec![1.0; n];
        let (fm, gm) = (ModularFn(&f), ModularFn(&g));
        let inner = FnSolver::new("exact-modular", 1.0, 1.0, |c: f64| {
            // cheapest ceil(c) elements are optimal for unit coverage
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
            let k = (c - TOL).ceil() as usize;
            let x = Subset::from_elements(n, order[..k].iter().copied())?;
            Ok(SolveReport::new(
                &fm,
                &gm,
                Bound::Cover(c),
                x,
                1,
                Vec::new(),
                GuaranteeCert::exact("exact"),
            ))
        });
        for b in [1.0, 17.0, 50.0, 120.0, 191.0] {
            let r = scsk_via_scsc_binary(&inner, &fm, &gm, b, 0.05).unwrap();
            assert!(r.iterations <= 7, "b={b}: {} probes", r.iterations);
            assert!(r.f_value <= b + TOL);
        }
    }

    #[test]
    fn combine_covers_equivalence() {
        let a = FunctionOracle::new(CatalogEntry::Modular {
            weights: vec![1.0, 0.5, 0.25, 1.0],
        })
        .unwrap();
        let b = FunctionOracle::new(CatalogEntry::Modular {
            weights: vec![0.5, 1.0, 2.0, 0.5],
        })
        .unwrap();
        let combined = combine_covers(&[a.clone(), b.clone()], &[1.0, 2.0]).unwrap();
        let top = combined.eval(&Subset::full(4));
        for m in 0..16u64 {
            let x = Subset::from_mask(4, m);
            let both = a.eval(&x) >= 1.0 - TOL && b.eval(&x) >= 2.0 - TOL;
            assert_eq!(both, combined.eval(&x) >= top - TOL, "mask {m:b}");
        }
        assert!(combine_covers(&[], &[]).is_err());
    }

    #[test]
    fn combine_single_at_full_is_identity() {
        let a = FunctionOracle::new(CatalogEntry::CardTruncation { n: 4, cap: 3.0 }).unwrap();
        let combined = combine_covers(std::slice::from_ref(&a), &[3.0]).unwrap();
        for m in 0..16u64 {
            let x = Subset::from_mask(4, m);
            assert_eq!(combined.eval(&x), a.eval(&x));
        }
    }
}
