mod common;

use common::*;
use subcons::bounds::{default_ea_weights, ea_surrogate};
use subcons::solvers::cert::{harmonic, ONE_MINUS_INV_E};
use subcons::solvers::{
    eask, eask_c, eassc, eassc_c, gr, isk, issc, sk_greedy, ssc_greedy, EaOptions, Enumeration,
    IskMode, IterOptions,
};
use subcons::{CatalogEntry, FunctionOracle, SetFunction, SolveReport, Subset, TOL};

const INSTANCES: u64 = 200;

fn max_singleton(g: &dyn SetFunction) -> f64 {
    let n = g.ground_size();
    (0..n)
        .map(|j| g.eval(&Subset::empty(n).with(j)))
        .fold(0.0, f64::max)
}

/// `1 + max{|X| : g(X) < c}`.
fn naive_k_g(g: &dyn SetFunction, c: f64) -> usize {
    1 + subsets(g.ground_size())
        .filter(|x| g.eval(x) < c - TOL)
        .map(|x| x.len())
        .max()
        .unwrap_or(0)
}

/// `max{|X| : f(X) ≤ b}`.
fn naive_big_k_f(f: &dyn SetFunction, b: f64) -> usize {
    subsets(f.ground_size())
        .filter(|x| f.eval(x) <= b + TOL)
        .map(|x| x.len())
        .max()
        .unwrap_or(0)
}

fn assert_cover_claim(r: &SolveReport, f: &dyn SetFunction, g: &dyn SetFunction, c: f64) -> f64 {
    let opt = opt_cover(f, g, c);
    let cert = &r.certificate;
    assert!(
        r.g_value >= cert.rho * c - TOL,
        "{}: coverage {} < {} c",
        r.algorithm,
        r.g_value,
        cert.rho
    );
    assert!(
        r.f_value <= cert.sigma * opt + 1e-9,
        "{}: cost {} > {} x {opt}",
        r.algorithm,
        r.f_value,
        cert.sigma
    );
    r.f_value / opt
}

fn assert_budget_claim(r: &SolveReport, f: &dyn SetFunction, g: &dyn SetFunction, b: f64) -> f64 {
    let cert = &r.certificate;
    let reference = cert.reference_bound.unwrap_or(b);
    let opt = opt_knapsack(f, g, reference);
    assert!(
        r.f_value <= cert.sigma * b + TOL,
        "{}: cost {} > {} b",
        r.algorithm,
        r.f_value,
        cert.sigma
    );
    assert!(
        r.g_value >= cert.rho * opt - 1e-9,
        "{}: value {} < {} x {opt}",
        r.algorithm,
        r.g_value,
        cert.rho
    );
    if opt > 0.0 {
        r.g_value / opt
    } else {
        1.0
    }
}

#[test]
fn ssc_greedy_small_examples() {
    let ones = oracle(CatalogEntry::Modular {
        weights: vec![1.0; 3],
    });
    let r = ssc_greedy(&ones, &ones, 2.0).unwrap();
    assert_eq!(r.solution.to_vec(), vec![0, 1]);
    assert_eq!(r.f_value, 2.0);
    let one = oracle(CatalogEntry::Modular { weights: vec![2.5] });
    assert_eq!(
        ssc_greedy(&one, &one, 2.0).unwrap().solution.to_vec(),
        vec![0]
    );
    let g = oracle(CatalogEntry::Modular {
        weights: vec![3.0, 1.0, 2.0],
    });
    let r = ssc_greedy(&ones, &g, 4.0).unwrap();
    assert!((r.certificate.sigma - 11.0 / 6.0).abs() <= 1e-15);
}

#[test]
fn ssc_greedy_within_harmonic_factor() {
    let mut ratios = Vec::new();
    for seed in 0..INSTANCES {
        let mut r = rng(246_000 + seed);
        let f = int_modular(&mut r, 10, 10);
        let g = bipartite(&mut r, 10, 8, true);
        let c = cover_level(&mut r, &g).ceil();
        let rep = ssc_greedy(&f, &g, c).unwrap();
        let h = harmonic(max_singleton(&g) as u64);
        assert_eq!(rep.certificate.sigma, h);
        let opt = opt_cover(&f, &g, c);
        assert!(rep.g_value >= c - TOL);
        assert!(
            rep.f_value <= h * opt + 1e-9,
            "seed {seed}: {} > {h} x {opt}",
            rep.f_value
        );
        ratios.push(rep.f_value / opt);
    }
    assert!(median(ratios) < 1.1);
}

#[test]
fn sk_greedy_edges() {
    let mut r = rng(253);
    let f = real_modular(&mut r, 6);
    let g = facility(&mut r, 6);
    let total = full_value(&f);
    for e in [Enumeration::None, Enumeration::Triples] {
        assert_eq!(
            sk_greedy(&f, &g, total, e).unwrap().solution,
            Subset::full(6)
        );
        let tiny = sk_greedy(&f, &g, 0.5 * min_singleton(&f), e).unwrap();
        assert!(tiny.solution.is_empty());
        assert_eq!(tiny.g_value, 0.0);
    }
}

#[test]
fn sk_greedy_triples_within_one_minus_inv_e() {
    for seed in 0..INSTANCES {
        let mut r = rng(255_000 + seed);
        let f = real_modular(&mut r, 10);
        let g = if seed % 2 == 0 {
            facility(&mut r, 10)
        } else {
            saturated(&mut r, 10, 0.3)
        };
        let b = budget(&mut r, &f);
        let rep = sk_greedy(&f, &g, b, Enumeration::Triples).unwrap();
        let opt = opt_knapsack(&f, &g, b);
        assert!(rep.f_value <= b + TOL);
        assert!(rep.g_value >= (ONE_MINUS_INV_E - 1e-9) * opt, "seed {seed}");
        let simple = sk_greedy(&f, &g, b, Enumeration::None).unwrap();
        assert_budget_claim(&simple, &f, &g, b);
        assert!(simple.certificate.rho <= ONE_MINUS_INV_E / 2.0 + 1e-15);
    }
}

fn coverage(r: &mut TestRng, seed: u64) -> FunctionOracle {
    if seed.is_multiple_of(2) {
        facility(r, 10)
    } else {
        saturated(r, 10, 0.4)
    }
}

#[test]
fn issc_within_curvature_factor() {
    let mut ratios = Vec::new();
    for seed in 0..INSTANCES {
        let mut r = rng(264_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = coverage(&mut r, seed);
        let c = cover_level(&mut r, &g);
        let rep = issc(&f, &g, c, IterOptions::default()).unwrap();

        let k = naive_k_g(&g, c) as f64;
        let kappa = naive_curvature(&f).clamp(0.0, 1.0);
        let h = 1.0 + (full_value(&g) / TOL).ln();
        let factor = k * h / (1.0 + (k - 1.0) * (1.0 - kappa));
        assert!(
            (rep.certificate.sigma - factor).abs() <= 1e-9 * factor,
            "seed {seed}"
        );
        ratios.push(assert_cover_claim(&rep, &f, &g, c));

        assert!(rep.iterations <= 50);
        let accepted: Vec<f64> = rep
            .trace
            .iter()
            .filter(|t| t.accepted)
            .map(|t| t.f_value)
            .collect();
        assert!(
            accepted.windows(2).all(|w| w[1] < w[0] - TOL),
            "seed {seed}: {accepted:?}"
        );
        assert_eq!(*accepted.last().unwrap(), rep.f_value);
    }
    let m = median(ratios);
    assert!((1.0..2.0).contains(&m), "median ratio {m}");
}

#[test]
fn issc_on_modular_cost_is_one_greedy_pass() {
    let mut r = rng(262);
    let f = real_modular(&mut r, 9);
    let g = facility(&mut r, 9);
    let c = cover_level(&mut r, &g);
    let a = issc(&f, &g, c, IterOptions::default()).unwrap();
    let b = ssc_greedy(&f, &g, c).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.iterations, 1);
}

#[test]
fn gr_within_inverse_k_f() {
    for seed in 0..INSTANCES {
        let mut r = rng(273_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = coverage(&mut r, seed);
        let b = budget(&mut r, &f);
        let rep = gr(&f, &g, b).unwrap();
        let opt = opt_knapsack(&f, &g, b);
        let k = naive_big_k_f(&f, b).max(1) as f64;
        assert!(rep.f_value <= b + TOL);
        assert!(rep.g_value >= opt / k - 1e-9, "seed {seed}");
        assert_budget_claim(&rep, &f, &g, b);
    }
}

#[test]
fn gr_with_room_for_everything_returns_v() {
    let mut r = rng(272);
    let f = bipartite(&mut r, 8, 6, false);
    let g = facility(&mut r, 8);
    assert_eq!(
        gr(&f, &g, full_value(&f)).unwrap().solution,
        Subset::full(8)
    );
}

#[test]
fn isk_feasible_beats_shrunk_budget_optimum() {
    for seed in 0..INSTANCES {
        let mut r = rng(282_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = coverage(&mut r, seed);
        let b = budget(&mut r, &f);
        let rep = isk(
            &f,
            &g,
            b,
            IterOptions::default(),
            IskMode::Feasible,
            Enumeration::Triples,
        )
        .unwrap();

        let k = naive_big_k_f(&f, b) as f64;
        let kappa = naive_curvature(&f).clamp(0.0, 1.0);
        let shrunk = if k == 0.0 {
            b
        } else {
            b * (1.0 + (k - 1.0) * (1.0 - kappa)) / k
        };
        assert!((rep.certificate.reference_bound.unwrap() - shrunk).abs() <= 1e-9 * b);
        let opt = opt_knapsack(&f, &g, shrunk);
        assert!(rep.f_value <= b + TOL);
        assert!(rep.g_value >= ONE_MINUS_INV_E * opt - 1e-9, "seed {seed}");

        assert!(rep.iterations <= 50);
        let accepted: Vec<f64> = rep
            .trace
            .iter()
            .filter(|t| t.accepted)
            .map(|t| t.g_value)
            .collect();
        assert!(
            accepted.windows(2).all(|w| w[1] > w[0] + TOL),
            "seed {seed}: {accepted:?}"
        );
    }
}

#[test]
fn isk_type1_claims_hold() {
    for seed in 0..50 {
        let mut r = rng(283_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = coverage(&mut r, seed);
        let b = budget(&mut r, &f);
        let rep = isk(
            &f,
            &g,
            b,
            IterOptions::default(),
            IskMode::Type1,
            Enumeration::None,
        )
        .unwrap();
        assert_budget_claim(&rep, &f, &g, b);
    }
}

#[test]
fn isk_on_modular_cost_matches_sk_greedy() {
    let mut r = rng(280);
    let f = real_modular(&mut r, 9);
    let g = facility(&mut r, 9);
    let b = budget(&mut r, &f);
    let a = isk(
        &f,
        &g,
        b,
        IterOptions::default(),
        IskMode::Feasible,
        Enumeration::None,
    )
    .unwrap();
    let s = sk_greedy(&f, &g, b, Enumeration::None).unwrap();
    assert_eq!(a.solution, s.solution);
    assert_eq!(a.iterations, 1);
}

/// Unit-weight coverage plus a modular part: curvature strictly in (0, 1).
fn partly_curved(r: &mut TestRng, n: usize) -> FunctionOracle {
    let words = bipartite(r, n, 8, true).entry().clone();
    let linear = real_modular(r, n).entry().clone();
    oracle(CatalogEntry::Sum {
        terms: vec![words, linear],
    })
}

fn grid_slack(r: &SolveReport) -> f64 {
    r.certificate
        .notes
        .iter()
        .find_map(|n| n.strip_prefix("grid slack ")?.parse().ok())
        .expect("slack note")
}

#[test]
fn eassc_within_harmonic_factor_of_surrogate_optimum() {
    let opts = EaOptions::default();
    for seed in 0..INSTANCES {
        let mut r = rng(291_000 + seed);
        let f = partly_curved(&mut r, 10);
        let g = bipartite(&mut r, 10, 10, true);
        let c = cover_level(&mut r, &g).ceil();
        let rep = eassc(&f, &g, c, None, &opts).unwrap();
        assert!(rep.g_value >= c - TOL);
        let slack = grid_slack(&rep);
        assert!(slack <= 1.05);

        let s = ea_surrogate(&f, default_ea_weights(&f).unwrap()).unwrap();
        let best = subsets(10)
            .filter(|x| g.eval(x) >= c - TOL)
            .map(|x| s.value(&x))
            .fold(f64::INFINITY, f64::min);
        let h = harmonic(max_singleton(&g) as u64);
        assert!(
            s.value(&rep.solution) <= h * slack * best + 1e-9,
            "seed {seed}"
        );
        assert_cover_claim(&rep, &f, &g, c);
    }
}

#[test]
fn eassc_c_within_harmonic_factor_of_weight_optimum() {
    let opts = EaOptions::default();
    for seed in 0..INSTANCES {
        let mut r = rng(300_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = bipartite(&mut r, 10, 10, true);
        let c = cover_level(&mut r, &g).ceil();
        let rep = eassc_c(&f, &g, c, None, &opts).unwrap();
        let w = default_ea_weights(&f).unwrap();
        let weight = |x: &Subset| x.iter().map(|j| w[j]).sum::<f64>();
        let best = subsets(10)
            .filter(|x| g.eval(x) >= c - TOL)
            .map(|x| weight(&x))
            .fold(f64::INFINITY, f64::min);
        let h = harmonic(max_singleton(&g) as u64);
        assert!(rep.g_value >= c - TOL);
        assert!(weight(&rep.solution) <= h * best + 1e-9, "seed {seed}");
        assert_cover_claim(&rep, &f, &g, c);
    }
}

#[test]
fn eask_c_claims_hold() {
    let opts = EaOptions {
        enumeration: Enumeration::Triples,
        ..EaOptions::default()
    };
    for seed in 0..INSTANCES {
        let mut r = rng(308_000 + seed);
        let f = bipartite(&mut r, 10, 12, false);
        let g = coverage(&mut r, seed);
        let b = budget(&mut r, &f);
        let rep = eask_c(&f, &g, b, None, &opts).unwrap();
        assert!((rep.certificate.rho - ONE_MINUS_INV_E).abs() <= 1e-15);
        assert_budget_claim(&rep, &f, &g, b);
    }
    let mut r = rng(307);
    let f = bipartite(&mut r, 8, 10, false);
    let g = facility(&mut r, 8);
    let w = default_ea_weights(&f).unwrap();
    let roomy = w.iter().sum::<f64>().sqrt();
    assert_eq!(
        eask_c(&f, &g, roomy, None, &opts).unwrap().solution,
        Subset::full(8)
    );
    assert!(eask_c(&f, &g, 0.0, None, &opts)
        .unwrap()
        .solution
        .is_empty());
}

#[test]
fn eask_claims_hold() {
    let opts = EaOptions::default();
    for seed in 0..INSTANCES {
        let mut r = rng(318_000 + seed);
        let f = partly_curved(&mut r, 10);
        let g = coverage(&mut r, seed);
        let b = budget(&mut r, &f);
        let rep = eask(&f, &g, b, None, 0.05, &opts).unwrap();
        assert_budget_claim(&rep, &f, &g, b);
    }
    let mut r = rng(317);
    let f = real_modular(&mut r, 6);
    let g = facility(&mut r, 6);
    let err = eask(&f, &g, 1.0, None, 0.05, &opts).unwrap_err();
    assert!(
        err.to_string().contains("sk_greedy") || err.to_string().contains("modular"),
        "{err}"
    );
}

#[test]
fn cover_and_budget_invariants_on_catalog_pairs() {
    let opts = EaOptions::default();
    for seed in 0..40 {
        let mut r = rng(320_000 + seed);
        let f = partly_curved(&mut r, 10);
        let g = coverage(&mut r, seed);
        let c = cover_level(&mut r, &g);
        let b = budget(&mut r, &f);
        for rep in [
            issc(&f, &g, c, IterOptions::default()).unwrap(),
            eassc(&f, &g, c, None, &opts).unwrap(),
            eassc_c(&f, &g, c, None, &opts).unwrap(),
        ] {
            assert!(
                rep.g_value >= rep.certificate.rho * c - TOL,
                "{}",
                rep.algorithm
            );
            assert!(rep.feasible);
        }
        for rep in [
            gr(&f, &g, b).unwrap(),
            isk(
                &f,
                &g,
                b,
                IterOptions::default(),
                IskMode::Feasible,
                Enumeration::None,
            )
            .unwrap(),
        ] {
            assert_eq!(rep.certificate.sigma, 1.0);
            assert!(rep.f_value <= b + TOL, "{}", rep.algorithm);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let opts = EaOptions::default();
    let run = || {
        let mut r = rng(77);
        let f = partly_curved(&mut r, 10);
        let g = facility(&mut r, 10);
        let (c, b) = (0.6 * full_value(&g), 0.4 * full_value(&f));
        let reports = vec![
            issc(&f, &g, c, IterOptions::default()).unwrap(),
            eassc(&f, &g, c, None, &opts).unwrap(),
            gr(&f, &g, b).unwrap(),
            isk(
                &f,
                &g,
                b,
                IterOptions::default(),
                IskMode::Type1,
                Enumeration::Triples,
            )
            .unwrap(),
            eask(&f, &g, b, None, 0.05, &opts).unwrap(),
        ];
        serde_json::to_string(&reports).unwrap()
    };
    assert_eq!(run(), run());
}
