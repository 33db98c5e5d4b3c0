//! Solvers that replace the cost `f` by the ellipsoid-shaped surrogate
//! `f^ea(X) = κ √(w(X)) + (1-κ) Σ_{j∈X} f(j)`.
//!
//! The weight vector `w` is supplied by the caller or defaults to
//! `f(j)²`. Certificates measure how tightly the surrogate sandwiches `f`
//! and state their factors relative to that measurement.

use serde::{Deserialize, Serialize};

use crate::bounds::{curvature, default_ea_weights, measure_sandwich, EASurrogate};
use crate::brute::same_ground;
use crate::error::{Error, Result};
use crate::oracle::{singletons, SetFunction};
use crate::report::{Bound, GuaranteeCert, Sandwich, SolveReport};
use crate::solvers::cert::h_g;
use crate::solvers::greedy::{greedy_cover, greedy_knapsack, Enumeration};
use crate::subset::Subset;
use crate::transforms::{scsk_via_scsc_linear, FnSolver};
use crate::TOL;

pub const DEFAULT_GRID: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaOptions {
    /// Number of slopes in the parametric sweep.
    pub grid_size: usize,
    /// Random subsets used to measure the sandwich above 16 elements.
    pub sandwich_samples: usize,
    pub seed: u64,
    pub enumeration: Enumeration,
    /// Cover factor assumed for the inner cover solver of the knapsack
    /// conversion, replacing the measured one.
    pub inner_sigma: Option<f64>,
}

impl Default for EaOptions {
    fn default() -> Self {
        EaOptions {
            grid_size: DEFAULT_GRID,
            sandwich_samples: 2000,
            seed: 0,
            enumeration: Enumeration::None,
            inner_sigma: None,
        }
    }
}

struct Setup {
    surrogate: EASurrogate,
    sandwich: Sandwich,
    h: f64,
    integral: bool,
}

fn weights_for<F: SetFunction + ?Sized>(f: &F, ea_weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match ea_weights {
        Some(w) => {
            if w.len() != f.ground_size() {
                return Err(Error::parameter(format!(
                    "{} weights for {} elements",
                    w.len(),
                    f.ground_size()
                )));
            }
            Ok(w.to_vec())
        }
        None => default_ea_weights(f),
    }
}

/// `kappa = None` keeps only the root term.
fn setup<F, G>(
    f: &F,
    g: &G,
    kappa: Option<f64>,
    ea_weights: Option<&[f64]>,
    opts: &EaOptions,
) -> Result<Setup>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let w = weights_for(f, ea_weights)?;
    let surrogate = EASurrogate::new(kappa.unwrap_or(1.0), w, singletons(f))?;
    let sandwich = measure_sandwich(f, &surrogate, opts.sandwich_samples, opts.seed);
    let (h, integral) = h_g(g);
    Ok(Setup {
        surrogate,
        sandwich,
        h,
        integral,
    })
}

fn annotate(mut cert: GuaranteeCert, s: &Setup, kappa: Option<f64>) -> GuaranteeCert {
    cert.relative_to_weights = true;
    cert.ingredients.h_g = Some(s.h);
    cert.ingredients.h_g_integral = Some(s.integral);
    cert.ingredients.kappa_f = kappa;
    cert.ingredients.sandwich = Some(s.sandwich);
    if !s.sandwich.exhaustive {
        cert.notes
            .push("sandwich measured on sampled subsets".into());
    }
    cert
}

/// Geometric grid of slopes over the tangent range of `κ√t` for
/// `t ∈ [min_j w_j, Σ_j w_j]`, and the worst tangent slack between
/// neighbouring points.
fn slope_grid(kappa: f64, w: &[f64], size: usize) -> Result<(Vec<f64>, f64)> {
    if size == 0 {
        return Err(Error::parameter("grid size must be positive"));
    }
    if w.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::parameter(
            "parametric sweep needs strictly positive surrogate weights",
        ));
    }
    let total: f64 = w.iter().sum();
    let least = w.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = kappa / (2.0 * total.sqrt());
    let hi = kappa / (2.0 * least.sqrt());
    if size == 1 || hi <= lo {
        let mid = (lo * hi).sqrt();
        let q = hi / lo;
        let slack = (q.sqrt() + 1.0 / q.sqrt()) / 2.0;
        return Ok((vec![mid], slack));
    }
    let ratio = (hi / lo).powf(1.0 / (size - 1) as f64);
    let grid = (0..size).map(|i| lo * ratio.powi(i as i32)).collect();
    let slack = (ratio.sqrt() + 1.0 / ratio.sqrt()) / 2.0;
    Ok((grid, slack))
}

/// For each slope `μ`, greedily covers with the modular cost
/// `μ w_j + (1-κ) f(j)`; keeps the cover of least surrogate value, then
/// least true cost.
fn sweep<F, G>(f: &F, g: &G, c: f64, s: &Setup, grid: &[f64]) -> Result<Subset>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let sur = &s.surrogate;
    let mut best: Option<(f64, f64, Subset)> = None;
    for &mu in grid {
        let cost: Vec<f64> = sur
            .ea_weights
            .iter()
            .zip(&sur.singleton_weights)
            .map(|(w, fj)| mu * w + (1.0 - sur.kappa) * fj)
            .collect();
        let x = greedy_cover(&cost, g, c)?;
        let (sv, fv) = (sur.value(&x), f.eval(&x));
        let better = match &best {
            None => true,
            Some((bs, bf, _)) => sv < bs - TOL || (sv <= bs + TOL && fv < bf - TOL),
        };
        if better {
            best = Some((sv, fv, x));
        }
    }
    Ok(best.expect("grid is non-empty").2)
}

fn curved_kappa<F: SetFunction + ?Sized>(f: &F) -> Result<f64> {
    let kappa = curvature(f)?;
    if kappa == 0.0 {
        return Err(Error::precondition(
            "cost has curvature 0 (modular); use the plain greedy rules instead",
        ));
    }
    Ok(kappa)
}

/// Cover with the surrogate cost, by a parametric sweep over the slope of
/// the root term.
pub fn eassc<F, G>(
    f: &F,
    g: &G,
    c: f64,
    ea_weights: Option<&[f64]>,
    opts: &EaOptions,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let kappa = curved_kappa(f)?;
    if kappa == 1.0 {
        let mut r = eassc_c(f, g, c, ea_weights, opts)?;
        r.certificate.algorithm = "eassc".into();
        r.certificate
            .notes
            .push("curvature 1: solved with the root surrogate".into());
        r.algorithm = "eassc".into();
        return Ok(r);
    }
    let s = setup(f, g, Some(kappa), ea_weights, opts)?;
    let (grid, slack) = slope_grid(kappa, &s.surrogate.ea_weights, opts.grid_size)?;
    let x = sweep(f, g, c, &s, &grid)?;
    let sigma = s.h * slack * s.sandwich.factor();
    let cert = GuaranteeCert::new(
        "eassc",
        sigma,
        1.0,
        "O(sqrt(n) log n H_g / (1 + (sqrt(n) log n - 1)(1 - kappa_f))); measured sigma = H_g * grid slack * sandwich",
    )
    .note(format!("grid slack {slack}"));
    let cert = annotate(cert, &s, Some(kappa));
    Ok(SolveReport::new(
        f,
        g,
        Bound::Cover(c),
        x,
        grid.len(),
        Vec::new(),
        cert,
    ))
}

/// Cover with the modular cost `w`, dropping the linear term.
pub fn eassc_c<F, G>(
    f: &F,
    g: &G,
    c: f64,
    ea_weights: Option<&[f64]>,
    opts: &EaOptions,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let s = setup(f, g, None, ea_weights, opts)?;
    let x = greedy_cover(&s.surrogate.ea_weights, g, c)?;
    let sigma = s.h.sqrt() * s.sandwich.factor();
    let cert = GuaranteeCert::new(
        "eassc-c",
        sigma,
        1.0,
        "O(sqrt(n) log n sqrt(H_g)); measured sigma = sqrt(H_g) * sandwich",
    );
    let cert = annotate(cert, &s, curvature(f).ok());
    Ok(SolveReport::new(
        f,
        g,
        Bound::Cover(c),
        x,
        1,
        Vec::new(),
        cert,
    ))
}

/// Knapsack with the modular cost `w` and budget `b²`.
///
/// With `lower·√w(X) ≤ f(X) ≤ upper·√w(X)` measured, the output costs at
/// most `upper·b` and competes with the optimum at budget `lower·b`.
pub fn eask_c<F, G>(
    f: &F,
    g: &G,
    b: f64,
    ea_weights: Option<&[f64]>,
    opts: &EaOptions,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let s = setup(f, g, None, ea_weights, opts)?;
    let x = greedy_knapsack(&s.surrogate.ea_weights, g, b * b, opts.enumeration)?;
    let mut cert = GuaranteeCert::new(
        "eask-c",
        s.sandwich.upper.max(1.0),
        opts.enumeration.factor(),
        "[1 - 1/e, O(sqrt(n) log n)]; measured sigma = sandwich upper",
    );
    cert.reference_bound = Some(b * s.sandwich.lower.min(1.0));
    let cert = annotate(cert, &s, curvature(f).ok());
    Ok(SolveReport::new(
        f,
        g,
        Bound::Budget(b),
        x,
        1,
        Vec::new(),
        cert,
    ))
}

/// Knapsack by the linear cover-level search around the surrogate cover
/// sweep; the surrogate is built once and shared by every probe.
pub fn eask<F, G>(
    f: &F,
    g: &G,
    b: f64,
    ea_weights: Option<&[f64]>,
    eps: f64,
    opts: &EaOptions,
) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let kappa = curved_kappa(f)?;
    if kappa == 1.0 {
        let mut r = eask_c(f, g, b, ea_weights, opts)?;
        r.certificate.algorithm = "eask".into();
        r.certificate
            .notes
            .push("curvature 1: solved with the root surrogate".into());
        r.algorithm = "eask".into();
        return Ok(r);
    }
    let s = setup(f, g, Some(kappa), ea_weights, opts)?;
    let (grid, slack) = slope_grid(kappa, &s.surrogate.ea_weights, opts.grid_size)?;
    let measured = s.h * slack * s.sandwich.factor();
    let sigma = opts.inner_sigma.unwrap_or(measured);
    let inner = FnSolver::new("eassc", sigma, 1.0, |c: f64| {
        let x = sweep(f, g, c, &s, &grid)?;
        Ok(SolveReport::new(
            f,
            g,
            Bound::Cover(c),
            x,
            grid.len(),
            Vec::new(),
            GuaranteeCert::new("eassc", sigma, 1.0, "measured"),
        ))
    });
    let mut r = scsk_via_scsc_linear(&inner, f, g, b, eps)?;
    let mut cert = GuaranteeCert::new(
        "eask",
        sigma,
        r.certificate.rho,
        "[(1 - eps), sigma of the surrogate cover sweep]",
    );
    if opts.inner_sigma.is_some() {
        cert = cert.note(format!("inner sigma set by caller; measured {measured}"));
    }
    r.certificate = annotate(cert, &s, Some(kappa));
    r.algorithm = "eask".into();
    Ok(r)
}
