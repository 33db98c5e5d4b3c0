//! Property checks and solver-versus-optimum assertions on small instances.

use anyhow::ensure;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use subcons::brute::{brute_force_scsc, brute_force_scsk};
use subcons::instance::bound_range;
use subcons::props::{check_all, PropertyReport, EXHAUSTIVE_MAX_N};
use subcons::{Bound, Error, InstanceSpec, SetFunction, SolveReport, TOL};

use crate::algos::{self, Algo, Problem, SolverParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub params: SolverParams,
    pub algorithms: Vec<Algo>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 20,
            seed: 0,
            params: SolverParams::default(),
            algorithms: Algo::ALL
                .into_iter()
                .filter(|a| *a != Algo::BruteForce)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgoTally {
    pub algorithm: Algo,
    pub runs: usize,
    /// Runs refused by a precondition, e.g. a greedy rule on a non-modular
    /// cost.
    pub skipped: usize,
    pub worst_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckedProperty {
    /// `"f"` or `"g"`.
    pub function: String,
    #[serde(flatten)]
    pub report: PropertyReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub instance: String,
    pub n: usize,
    pub trials: usize,
    pub properties: Vec<CheckedProperty>,
    pub algorithms: Vec<AlgoTally>,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Property checks on one function, labelled `name`.
pub fn check_function<F: SetFunction + ?Sized>(
    name: &str,
    f: &F,
    seed: u64,
) -> Vec<CheckedProperty> {
    check_all(f, seed)
        .into_iter()
        .map(|report| CheckedProperty {
            function: name.to_string(),
            report,
        })
        .collect()
}

/// One failure per violated property, with the witness as JSON.
pub fn property_failures(props: &[CheckedProperty]) -> Vec<Failure> {
    props
        .iter()
        .filter(|p| !p.report.passed())
        .map(|p| Failure {
            check: format!("{}: {:?}", p.function, p.report.property),
            detail: serde_json::to_string(&p.report.violation).unwrap_or_default(),
        })
        .collect()
}

/// Compares one report against the exact optimum. Returns the empirical
/// ratio (objective over optimum) on success.
fn check_claims<F, G>(
    algo: Algo,
    f: &F,
    g: &G,
    r: &SolveReport,
    p: &SolverParams,
) -> Result<Option<f64>, String>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let cert = &r.certificate;
    match r.bound {
        Bound::Cover(c) => {
            let opt = brute_force_scsc(f, g, c)
                .map_err(|e| e.to_string())?
                .f_value;
            if r.g_value < cert.rho * c - TOL {
                return Err(format!(
                    "g = {} below rho c = {} * {c}",
                    r.g_value, cert.rho
                ));
            }
            if r.f_value > cert.sigma * opt + TOL {
                return Err(format!(
                    "f = {} above sigma OPT = {} * {opt}",
                    r.f_value, cert.sigma
                ));
            }
            if algo == Algo::Issc {
                check_trace(r, p, |a, b| b < a - TOL)?;
            }
            Ok(Some(r.f_value / opt))
        }
        Bound::Budget(b) => {
            let reference = cert.reference_bound.unwrap_or(b);
            let opt = brute_force_scsk(f, g, reference)
                .map_err(|e| e.to_string())?
                .g_value;
            if r.f_value > cert.sigma * b + TOL {
                return Err(format!(
                    "f = {} above sigma b = {} * {b}",
                    r.f_value, cert.sigma
                ));
            }
            if r.g_value < cert.rho * opt - TOL {
                return Err(format!(
                    "g = {} below rho OPT({reference}) = {} * {opt}",
                    r.g_value, cert.rho
                ));
            }
            if matches!(algo, Algo::Isk | Algo::IskType1) {
                check_trace(r, p, |a, b| b > a + TOL)?;
            }
            Ok((opt > 0.0).then(|| r.g_value / opt))
        }
    }
}

/// Accepted iterates must improve strictly and stay within the cap.
fn check_trace(
    r: &SolveReport,
    p: &SolverParams,
    improves: impl Fn(f64, f64) -> bool,
) -> Result<(), String> {
    if r.iterations > p.max_iters {
        return Err(format!(
            "{} iterations exceed the cap {}",
            r.iterations, p.max_iters
        ));
    }
    let accepted: Vec<_> = r.trace.iter().filter(|e| e.accepted).collect();
    for w in accepted.windows(2) {
        let (a, b) = match r.bound {
            Bound::Cover(_) => (w[0].f_value, w[1].f_value),
            Bound::Budget(_) => (w[0].g_value, w[1].g_value),
        };
        if !improves(a, b) {
            return Err(format!(
                "trace does not improve at iteration {}",
                w[1].iteration
            ));
        }
    }
    Ok(())
}

/// Runs the property checks on `f` and `g`, then every algorithm on
/// `trials` random cover levels and budgets, each compared with the
/// exact optimum through its certificate.
pub fn verify(spec: &InstanceSpec, opts: &VerifyOptions) -> anyhow::Result<VerifyReport> {
    let inst = spec.build()?;
    let n = inst.n();
    ensure!(
        n <= EXHAUSTIVE_MAX_N,
        "verification needs n <= {EXHAUSTIVE_MAX_N}, got {n}"
    );
    let mut properties = check_function("f", &inst.f, opts.seed);
    properties.extend(check_function("g", &inst.g, opts.seed));
    let mut failures = property_failures(&properties);

    let (f_lo, f_hi) = bound_range(&inst.f);
    let (g_lo, g_hi) = bound_range(&inst.g);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(opts.seed);
    let bounds: Vec<(Bound, Bound)> = (0..opts.trials)
        .map(|_| {
            let c = g_lo + rng.random::<f64>() * (g_hi - g_lo);
            let b = f_lo + rng.random::<f64>() * (f_hi - f_lo);
            (Bound::Cover(c), Bound::Budget(b))
        })
        .collect();

    let mut tallies = Vec::new();
    for &algo in &opts.algorithms {
        let mut tally = AlgoTally {
            algorithm: algo,
            runs: 0,
            skipped: 0,
            worst_ratio: None,
        };
        for (t, &(cover, budget)) in bounds.iter().enumerate() {
            let bound = match algo.problem() {
                Some(Problem::Cover) | None => cover,
                Some(Problem::Budget) => budget,
            };
            let params = SolverParams {
                seed: opts.seed.wrapping_add(t as u64),
                ..opts.params
            };
            let check = format!(
                "{algo} trial {t} at {} {}",
                Problem::of(bound).tag(),
                bound.value()
            );
            match algos::run(algo, &inst.f, &inst.g, bound, &params) {
                Err(Error::Precondition(_)) => tally.skipped += 1,
                Err(e) => failures.push(Failure {
                    check,
                    detail: e.to_string(),
                }),
                Ok(r) => {
                    tally.runs += 1;
                    match check_claims(algo, &inst.f, &inst.g, &r, &params) {
                        Ok(Some(ratio)) => {
                            let worse = match bound {
                                Bound::Cover(_) => tally.worst_ratio.is_none_or(|w| ratio > w),
                                Bound::Budget(_) => tally.worst_ratio.is_none_or(|w| ratio < w),
                            };
                            if worse {
                                tally.worst_ratio = Some(ratio);
                            }
                        }
                        Ok(None) => {}
                        Err(detail) => failures.push(Failure { check, detail }),
                    }
                }
            }
        }
        tallies.push(tally);
    }
    Ok(VerifyReport {
        instance: spec.id(),
        n,
        trials: opts.trials,
        properties,
        algorithms: tallies,
        failures,
    })
}
