//! Algorithm tags and dispatch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use subcons::bounds::BoundVariant;
use subcons::brute::{brute_force_scsc, brute_force_scsk};
use subcons::solvers::{
    eask, eask_c, eassc, eassc_c, gr, isk, issc, sk_greedy, ssc_greedy, EaOptions, Enumeration,
    IskMode, IterOptions,
};
use subcons::transforms::{scsc_via_scsk_binary, FnSolver, DEFAULT_EPS};
use subcons::{Bound, Error, SetFunction, SolveReport};

/// Which side of the problem pair an algorithm solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Cover,
    Budget,
}

impl Problem {
    pub fn of(bound: Bound) -> Problem {
        match bound {
            Bound::Cover(_) => Problem::Cover,
            Bound::Budget(_) => Problem::Budget,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Problem::Cover => "cover",
            Problem::Budget => "budget",
        }
    }

    pub fn bound(&self, v: f64) -> Bound {
        match self {
            Problem::Cover => Bound::Cover(v),
            Problem::Budget => Bound::Budget(v),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    SscGreedy,
    SscDual,
    Issc,
    Eassc,
    EasscC,
    SkGreedy,
    Gr,
    Isk,
    IskType1,
    Eask,
    EaskC,
    BruteForce,
}

impl Algo {
    pub const ALL: [Algo; 12] = [
        Algo::SscGreedy,
        Algo::SscDual,
        Algo::Issc,
        Algo::Eassc,
        Algo::EasscC,
        Algo::SkGreedy,
        Algo::Gr,
        Algo::Isk,
        Algo::IskType1,
        Algo::Eask,
        Algo::EaskC,
        Algo::BruteForce,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Algo::SscGreedy => "ssc-greedy",
            Algo::SscDual => "ssc-dual",
            Algo::Issc => "issc",
            Algo::Eassc => "eassc",
            Algo::EasscC => "eassc-c",
            Algo::SkGreedy => "sk-greedy",
            Algo::Gr => "gr",
            Algo::Isk => "isk",
            Algo::IskType1 => "isk-type1",
            Algo::Eask => "eask",
            Algo::EaskC => "eask-c",
            Algo::BruteForce => "brute-force",
        }
    }

    /// `None` for algorithms that handle both problems.
    pub fn problem(&self) -> Option<Problem> {
        match self {
            Algo::SscGreedy | Algo::SscDual | Algo::Issc | Algo::Eassc | Algo::EasscC => {
                Some(Problem::Cover)
            }
            Algo::SkGreedy | Algo::Gr | Algo::Isk | Algo::IskType1 | Algo::Eask | Algo::EaskC => {
                Some(Problem::Budget)
            }
            Algo::BruteForce => None,
        }
    }

    pub fn solves(&self, p: Problem) -> bool {
        self.problem().is_none_or(|q| q == p)
    }

    /// All tags solving `p`, brute force excluded.
    pub fn for_problem(p: Problem) -> Vec<Algo> {
        Algo::ALL
            .into_iter()
            .filter(|a| *a != Algo::BruteForce && a.solves(p))
            .collect()
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Algo, String> {
        Algo::ALL.into_iter().find(|a| a.tag() == s).ok_or_else(|| {
            let known: Vec<&str> = Algo::ALL.iter().map(|a| a.tag()).collect();
            format!("unknown algorithm {s:?}; known: {}", known.join(", "))
        })
    }
}

/// Parameters shared by every algorithm in a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub eps: f64,
    pub max_iters: usize,
    pub enumeration: Enumeration,
    pub variant: BoundVariant,
    pub grid_size: usize,
    /// Seeds the sandwich sampling of the surrogate solvers.
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            eps: DEFAULT_EPS,
            max_iters: subcons::solvers::iterative::DEFAULT_MAX_ITERS,
            enumeration: Enumeration::None,
            variant: BoundVariant::M2,
            grid_size: subcons::solvers::ea::DEFAULT_GRID,
            seed: 0,
        }
    }
}

impl SolverParams {
    fn iter(&self) -> IterOptions {
        IterOptions {
            variant: self.variant,
            max_iters: self.max_iters,
        }
    }

    fn ea(&self) -> EaOptions {
        EaOptions {
            grid_size: self.grid_size,
            seed: self.seed,
            enumeration: self.enumeration,
            ..EaOptions::default()
        }
    }
}

/// Runs `algo` on `(f, g)` at `bound`.
pub fn run<F, G>(
    algo: Algo,
    f: &F,
    g: &G,
    bound: Bound,
    p: &SolverParams,
) -> subcons::Result<SolveReport>
where
    F: SetFunction + ?Sized,
    G: SetFunction + ?Sized,
{
    let problem = Problem::of(bound);
    if !algo.solves(problem) {
        return Err(Error::Parameter(format!(
            "{algo} does not solve {} problems",
            problem.tag()
        )));
    }
    let v = bound.value();
    match algo {
        Algo::SscGreedy => ssc_greedy(f, g, v),
        Algo::SscDual => {
            if f.modular_weights().is_none() {
                return Err(Error::Precondition(
                    "ssc-dual needs a modular cost function".into(),
                ));
            }
            let e = p.enumeration;
            let inner = FnSolver::new("sk-greedy", 1.0, e.factor(), move |b| sk_greedy(f, g, b, e));
            let mut r = scsc_via_scsk_binary(&inner, f, g, v, p.eps)?;
            r.algorithm = algo.tag().into();
            Ok(r)
        }
        Algo::Issc => issc(f, g, v, p.iter()),
        Algo::Eassc => eassc(f, g, v, None, &p.ea()),
        Algo::EasscC => eassc_c(f, g, v, None, &p.ea()),
        Algo::SkGreedy => sk_greedy(f, g, v, p.enumeration),
        Algo::Gr => gr(f, g, v),
        Algo::Isk => isk(f, g, v, p.iter(), IskMode::Feasible, p.enumeration),
        Algo::IskType1 => isk(f, g, v, p.iter(), IskMode::Type1, p.enumeration),
        Algo::Eask => eask(f, g, v, None, p.eps, &p.ea()),
        Algo::EaskC => eask_c(f, g, v, None, &p.ea()),
        Algo::BruteForce => match bound {
            Bound::Cover(c) => brute_force_scsc(f, g, c),
            Bound::Budget(b) => brute_force_scsk(f, g, b),
        },
    }
}
