//! Exhaustive reference solvers for small ground sets.
//!
//! Masks are scanned in increasing numeric order and a candidate replaces
//! the incumbent only when strictly better by more than the tolerance, so
//! ties resolve to the numerically smallest mask.

use crate::error::{Error, Result};
use crate::oracle::SetFunction;
use crate::report::{Bound, GuaranteeCert, SolveReport};
use crate::subset::Subset;
use crate::TOL;

pub const BRUTE_FORCE_MAX_N: usize = 20;

pub(crate) fn same_ground<F, G>(f: &F, g: &G) -> Result<usize>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = f.ground_size();
    if n != g.ground_size() {
        return Err(Error::instance(format!(
            "f has {n} elements, g has {}",
            g.ground_size()
        )));
    }
    if n == 0 {
        return Err(Error::instance("empty ground set"));
    }
    Ok(n)
}

fn check_size(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::precondition(format!(
            "brute force limited to {BRUTE_FORCE_MAX_N} elements, got {n}"
        )));
    }
    Ok(())
}

/// Exact `argmin {f(X) : g(X) ≥ c}`.
pub fn brute_force_scsc<F, G>(f: &F, g: &G, c: f64) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    check_size(n)?;
    let top = g.eval(&Subset::full(n));
    if top < c - TOL {
        return Err(Error::infeasible(format!("cover {c} exceeds g(V) = {top}")));
    }
    let mut best: Option<(f64, u64)> = None;
    for m in 0..1u64 << n {
        let x = Subset::from_mask(n, m);
        if g.eval(&x) < c - TOL {
            continue;
        }
        let v = f.eval(&x);
        if best.is_none_or(|(b, _)| v < b - TOL) {
            best = Some((v, m));
        }
    }
    let (_, m) = best.expect("V is feasible");
    Ok(SolveReport::new(
        f,
        g,
        Bound::Cover(c),
        Subset::from_mask(n, m),
        1,
        Vec::new(),
        GuaranteeCert::exact("brute-force"),
    ))
}

/// Exact `argmax {g(X) : f(X) ≤ b}`. The empty set is always feasible.
pub fn brute_force_scsk<F, G>(f: &F, g: &G, b: f64) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let n = same_ground(f, g)?;
    check_size(n)?;
    let mut best = (g.eval(&Subset::empty(n)), 0u64);
    for m in 1..1u64 << n {
        let x = Subset::from_mask(n, m);
        if f.eval(&x) > b + TOL {
            continue;
        }
        let v = g.eval(&x);
        if v > best.0 + TOL {
            best = (v, m);
        }
    }
    Ok(SolveReport::new(
        f,
        g,
        Bound::Budget(b),
        Subset::from_mask(n, best.1),
        1,
        Vec::new(),
        GuaranteeCert::exact("brute-force"),
    ))
}
