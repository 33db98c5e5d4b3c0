//! Ratio greedy rules for modular costs.

use serde::{Deserialize, Serialize};

use crate::brute::same_ground;
use crate::error::{Error, Result};
use crate::oracle::SetFunction;
use crate::report::{Bound, GuaranteeCert, SolveReport};
use crate::solvers::cert::{h_g, ONE_MINUS_INV_E};
use crate::subset::Subset;
use crate::TOL;

/// Partial enumeration used by the knapsack greedy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enumeration {
    /// One greedy pass, compared against the best affordable singleton.
    #[default]
    None,
    /// Greedy completion of every affordable triple, compared against every
    /// affordable set of at most two elements and the plain greedy pass.
    Triples,
}

impl Enumeration {
    /// Worst-case ratio of the knapsack greedy under this mode.
    pub fn factor(&self) -> f64 {
        match self {
            Enumeration::None => ONE_MINUS_INV_E / 2.0,
            Enumeration::Triples => ONE_MINUS_INV_E,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Enumeration::None => "none",
            Enumeration::Triples => "triples",
        }
    }
}

pub(crate) fn check_costs(cost: &[f64], n: usize) -> Result<()> {
    if cost.len() != n {
        return Err(Error::instance(format!(
            "{} costs for {n} elements",
            cost.len()
        )));
    }
    if let Some(c) = cost.iter().find(|c| !c.is_finite() || **c < 0.0) {
        return Err(Error::parameter(format!(
            "cost {c} is not a finite non-negative number"
        )));
    }
    Ok(())
}

/// Greedy cover with modular `cost`: repeatedly adds the element minimizing
/// `cost(j) / (min{g(S∪j), c} - min{g(S), c})` until `g(S) ≥ c`.
///
/// Gains are truncated at `c`, as in the set-cover analysis: without the
/// cap a large-coverage element can win on ratio while contributing little
/// towards `c`. Elements with zero gain are skipped; ties go to the
/// smallest index.
pub fn greedy_cover<G: SetFunction + ?Sized>(cost: &[f64], g: &G, c: f64) -> Result<Subset> {
    let n = g.ground_size();
    check_costs(cost, n)?;
    let top = g.eval(&Subset::full(n));
    if top < c - TOL {
        return Err(Error::infeasible(format!("cover {c} exceeds g(V) = {top}")));
    }
    let mut s = Subset::empty(n);
    let mut gs = g.eval(&s);
    while gs < c - TOL {
        let base = gs.min(c);
        let mut best: Option<(f64, usize, f64)> = None;
        for (j, &cj) in cost.iter().enumerate() {
            if s.contains(j) {
                continue;
            }
            let gj = g.eval(&s.with(j));
            let gain = gj.min(c) - base;
            if gain <= 0.0 {
                continue;
            }
            let ratio = cj / gain;
            if best.is_none_or(|(r, _, _)| ratio < r - TOL) {
                best = Some((ratio, j, gj));
            }
        }
        let Some((_, j, gj)) = best else {
            return Err(Error::infeasible(format!(
                "every remaining element has zero gain at g(S) = {gs} < {c}"
            )));
        };
        s.insert(j);
        gs = gj;
    }
    Ok(s)
}

/// One greedy pass from `start`: repeatedly adds the affordable element
/// maximizing `g(j|S) / cost(j)`. Zero-cost elements with positive gain
/// rank first; zero-gain elements still fit, so an unbinding budget
/// returns `V`.
fn greedy_pass<G: SetFunction + ?Sized>(cost: &[f64], g: &G, budget: f64, start: Subset) -> Subset {
    let mut s = start;
    let mut spent: f64 = s.iter().map(|j| cost[j]).sum();
    let mut gs = g.eval(&s);
    loop {
        let mut best: Option<(f64, usize, f64)> = None;
        for (j, &cj) in cost.iter().enumerate() {
            if s.contains(j) || spent + cj > budget + TOL {
                continue;
            }
            let gj = g.eval(&s.with(j));
            let gain = gj - gs;
            let ratio = if cj > 0.0 {
                gain / cj
            } else if gain > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if best.is_none_or(|(r, _, _)| ratio > r + TOL) {
                best = Some((ratio, j, gj));
            }
        }
        match best {
            Some((_, j, gj)) => {
                s.insert(j);
                spent += cost[j];
                gs = gj;
            }
            None => return s,
        }
    }
}

/// Knapsack greedy with modular `cost`: `max g(X)` subject to
/// `Σ_{j∈X} cost(j) ≤ budget`.
pub fn greedy_knapsack<G: SetFunction + ?Sized>(
    cost: &[f64],
    g: &G,
    budget: f64,
    enumeration: Enumeration,
) -> Result<Subset> {
    let n = g.ground_size();
    check_costs(cost, n)?;
    let fits = |x: &Subset| x.iter().map(|j| cost[j]).sum::<f64>() <= budget + TOL;
    let mut best = Subset::empty(n);
    let mut best_g = g.eval(&best);
    let mut consider = |x: Subset| {
        let v = g.eval(&x);
        if v > best_g + TOL {
            best_g = v;
            best = x;
        }
    };
    match enumeration {
        Enumeration::None => {
            consider(greedy_pass(cost, g, budget, Subset::empty(n)));
            for j in 0..n {
                let x = Subset::empty(n).with(j);
                if fits(&x) {
                    consider(x);
                }
            }
        }
        Enumeration::Triples => {
            consider(greedy_pass(cost, g, budget, Subset::empty(n)));
            for i in 0..n {
                let x = Subset::empty(n).with(i);
                if !fits(&x) {
                    continue;
                }
                consider(x.clone());
                for j in i + 1..n {
                    let xj = x.with(j);
                    if fits(&xj) {
                        consider(xj);
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let t = Subset::from_elements(n, [i, j, k]).expect("indices in range");
                        if fits(&t) {
                            consider(greedy_pass(cost, g, budget, t));
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

fn modular_cost<F: SetFunction + ?Sized>(f: &F) -> Result<Vec<f64>> {
    f.modular_weights()
        .ok_or_else(|| Error::precondition("greedy ratio rules need a modular cost function"))
}

/// Greedy for `min {f(X) : g(X) ≥ c}` with modular `f`; guarantee `H_g`.
pub fn ssc_greedy<F, G>(f: &F, g: &G, c: f64) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let cost = modular_cost(f)?;
    let x = greedy_cover(&cost, g, c)?;
    let (h, integral) = h_g(g);
    let mut cert = GuaranteeCert::new("ssc-greedy", h, 1.0, "H_g");
    cert.ingredients.h_g = Some(h);
    cert.ingredients.h_g_integral = Some(integral);
    if !integral {
        cert = cert.note("non-integral coverage: H_g = 1 + ln(g(V)/1e-9)");
    }
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

/// Greedy for `max {g(X) : f(X) ≤ b}` with modular `f`.
pub fn sk_greedy<F, G>(f: &F, g: &G, b: f64, enumeration: Enumeration) -> Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    same_ground(f, g)?;
    let cost = modular_cost(f)?;
    let x = greedy_knapsack(&cost, g, b, enumeration)?;
    let formula = match enumeration {
        Enumeration::None => "(1 - 1/e)/2",
        Enumeration::Triples => "1 - 1/e",
    };
    let cert = GuaranteeCert::new("sk-greedy", 1.0, enumeration.factor(), formula);
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
