//! Sweeps of algorithms over constraint values, with brute-force optima and
//! a random baseline.

use std::time::Instant;

use anyhow::{bail, ensure, Context};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use subcons::brute::BRUTE_FORCE_MAX_N;
use subcons::instance::bound_range;
use subcons::{Bound, InstanceSpec, ProblemInstance, SetFunction, SolveReport, Subset};

use crate::algos::{self, Algo, Problem, SolverParams};
use crate::results::ResultRow;

pub const DEFAULT_BASELINE_DRAWS: usize = 100;

/// Constraint values to sweep, absolute or as fractions of `f(V)` (budget)
/// or `g(V)` (cover).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub problem: Problem,
    pub values: Vec<f64>,
    pub fractions: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub instance: InstanceSpec,
    pub algorithms: Vec<Algo>,
    pub sweep: Sweep,
    pub seeds: Vec<u64>,
    pub params: SolverParams,
    /// Random sets drawn per solver row; 0 disables the baseline.
    pub baseline_draws: usize,
    /// Attach the exact optimum to every row when `n ≤ 20`.
    pub brute_force: bool,
}

impl RunConfig {
    pub fn new(instance: InstanceSpec, algorithms: Vec<Algo>, sweep: Sweep) -> Self {
        let seeds = vec![instance.seed];
        RunConfig {
            instance,
            algorithms,
            sweep,
            seeds,
            params: SolverParams::default(),
            baseline_draws: DEFAULT_BASELINE_DRAWS,
            brute_force: true,
        }
    }

    /// Sweep over the instance's own bound.
    pub fn at_instance_bound(instance: InstanceSpec, algorithms: Vec<Algo>) -> Self {
        let sweep = Sweep {
            problem: Problem::of(instance.bound),
            values: vec![instance.bound.value()],
            fractions: false,
        };
        RunConfig::new(instance, algorithms, sweep)
    }
}

struct Point {
    bound: Bound,
    frac: Option<f64>,
    inst: ProblemInstance,
    opt: Option<f64>,
}

fn resolve(config: &RunConfig) -> anyhow::Result<Vec<Point>> {
    ensure!(!config.algorithms.is_empty(), "no algorithms given");
    ensure!(!config.sweep.values.is_empty(), "empty sweep");
    ensure!(!config.seeds.is_empty(), "no seeds given");
    let base = config.instance.build().context("invalid instance")?;
    let full = match config.sweep.problem {
        Problem::Cover => bound_range(&base.g).1,
        Problem::Budget => bound_range(&base.f).1,
    };
    let exact = config.brute_force && base.n() <= BRUTE_FORCE_MAX_N;
    config
        .sweep
        .values
        .par_iter()
        .map(|&v| {
            let (value, frac) = if config.sweep.fractions {
                (v * full, Some(v))
            } else {
                (v, None)
            };
            let bound = config.sweep.problem.bound(value);
            let inst = config
                .instance
                .build_with(bound)
                .with_context(|| format!("sweep value {v}"))?;
            let opt = if exact {
                let r = algos::run(Algo::BruteForce, &inst.f, &inst.g, bound, &config.params)?;
                Some(match bound {
                    Bound::Cover(_) => r.f_value,
                    Bound::Budget(_) => r.g_value,
                })
            } else {
                None
            };
            Ok(Point {
                bound,
                frac,
                inst,
                opt,
            })
        })
        .collect()
}

fn objective(bound: Bound, f_value: f64, g_value: f64) -> f64 {
    match bound {
        Bound::Cover(_) => f_value,
        Bound::Budget(_) => g_value,
    }
}

fn solver_row(
    config: &RunConfig,
    seed: u64,
    p: &Point,
    algo: Algo,
) -> (ResultRow, Option<SolveReport>) {
    let params = SolverParams {
        seed,
        ..config.params
    };
    let mut row = ResultRow::blank(&config.instance.id(), seed, algo.tag(), p.bound, p.frac);
    row.brute_force_opt = p.opt;
    let start = Instant::now();
    let out = algos::run(algo, &p.inst.f, &p.inst.g, p.bound, &params);
    row.wall_time_ns = start.elapsed().as_nanos() as u64;
    match out {
        Ok(r) => {
            row.fill(&r);
            if let Some(opt) = p.opt {
                if opt > 0.0 {
                    row.ratio = Some(objective(p.bound, r.f_value, r.g_value) / opt);
                }
            }
            (row, Some(r))
        }
        Err(e) => {
            row.error = Some(e.to_string());
            (row, None)
        }
    }
}

/// Mean values over `draws` uniform random sets of the solver's cardinality.
fn baseline_row(
    config: &RunConfig,
    seed: u64,
    p: &Point,
    key: u64,
    algo: Algo,
    r: &SolveReport,
) -> ResultRow {
    let tag = format!("random@{}", algo.tag());
    let mut row = ResultRow::blank(&config.instance.id(), seed, &tag, p.bound, p.frac);
    let n = p.inst.n();
    let k = r.solution.len();
    let draws = config.baseline_draws;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let start = Instant::now();
    let (mut fs, mut gs, mut ok) = (0.0, 0.0, 0usize);
    for _ in 0..draws {
        let x = Subset::from_elements(n, sample(&mut rng, n, k)).expect("indices in range");
        let (fv, gv) = (p.inst.f.eval(&x), p.inst.g.eval(&x));
        fs += fv;
        gs += gv;
        ok += p.bound.satisfied(fv, gv) as usize;
    }
    row.wall_time_ns = start.elapsed().as_nanos() as u64;
    let (f_mean, g_mean) = (fs / draws as f64, gs / draws as f64);
    row.f_value = Some(f_mean);
    row.g_value = Some(g_mean);
    row.size = Some(k);
    row.feasible = Some(ok == draws);
    row.feasible_fraction = Some(ok as f64 / draws as f64);
    row.baseline_draws = Some(draws);
    row.brute_force_opt = p.opt;
    if let Some(opt) = p.opt.filter(|o| *o > 0.0) {
        row.ratio = Some(objective(p.bound, f_mean, g_mean) / opt);
    }
    row
}

/// Runs every `(seed, bound, algorithm)` triple. Rows come back in that
/// nesting order, each solver row followed by its random baseline, no
/// matter how the work was scheduled.
pub fn solve(config: &RunConfig) -> anyhow::Result<Vec<ResultRow>> {
    let points = resolve(config)?;
    let mut tasks = Vec::new();
    for (si, &seed) in config.seeds.iter().enumerate() {
        for (bi, p) in points.iter().enumerate() {
            for (ai, &algo) in config.algorithms.iter().enumerate() {
                tasks.push(((si, bi, ai), seed, p, algo));
            }
        }
    }
    let mut out: Vec<((usize, usize, usize), Vec<ResultRow>)> = tasks
        .into_par_iter()
        .map(|(key, seed, p, algo)| {
            let (row, report) = solver_row(config, seed, p, algo);
            let mut rows = vec![row];
            if let (Some(r), true) = (report, config.baseline_draws > 0) {
                let salt = ((key.1 as u64) << 32) | key.2 as u64;
                rows.push(baseline_row(config, seed, p, salt, algo, &r));
            }
            (key, rows)
        })
        .collect();
    out.sort_by_key(|(key, _)| *key);
    Ok(out.into_iter().flat_map(|(_, rows)| rows).collect())
}

/// Runs `work` on a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> anyhow::Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            bail!("thread count must be positive");
        }
        builder = builder.num_threads(t);
    }
    Ok(builder.build()?.install(work))
}
