mod common;

use common::*;
use subcons::transforms::{
    binary_search_bound, brute_force_cover, brute_force_knapsack, combine_covers,
    linear_budget_search_bound, linear_cover_search_bound, scsc_via_scsk_binary,
    scsc_via_scsk_linear, scsk_via_scsc_binary, scsk_via_scsc_linear, BiCriterion,
};
use subcons::{CatalogEntry, SetFunction, TOL};

const EPS: f64 = 0.05;

#[test]
fn probe_bound_arithmetic() {
    // ⌈ln 100 / ln(1/0.9)⌉ = ⌈43.71⌉ = 44
    assert_eq!(linear_cover_search_bound(100.0, 1.0, 0.1), 45);
    // ⌈ln 100 / ln 1.1⌉ = ⌈48.32⌉ = 49
    assert_eq!(linear_budget_search_bound(100.0, 1.0, 0.1), 50);
    assert_eq!(binary_search_bound(64.0, 1.0, EPS, true), 7);
    assert_eq!(binary_search_bound(5.0, 5.0, EPS, true), 1);
}

#[test]
fn bicriterion_validation() {
    assert!(BiCriterion::new(1.0, 1.0, 0.1).is_ok());
    assert!(BiCriterion::new(0.9, 1.0, 0.1).is_err());
    assert!(BiCriterion::new(1.0, 1.2, 0.1).is_err());
    assert!(BiCriterion::new(1.0, 1.0, 0.0).is_err());
}

#[test]
fn conversions_with_exact_inner_solvers() {
    for seed in 0..100 {
        let mut r = rng(380_000 + seed);
        let f = if seed % 2 == 0 {
            bipartite(&mut r, 8, 10, false)
        } else {
            real_modular(&mut r, 8)
        };
        let g = if seed % 3 == 0 {
            int_modular(&mut r, 8, 9)
        } else {
            facility(&mut r, 8)
        };
        let b = budget(&mut r, &f);
        let c = cover_level(&mut r, &g);
        let (g_full, g_min) = (full_value(&g), min_singleton(&g));
        let (f_full, f_min) = (full_value(&f), min_singleton(&f));
        let opt_k = opt_knapsack(&f, &g, b);
        let opt_c = opt_cover(&f, &g, c);
        let cover = brute_force_cover(&f, &g);
        let knap = brute_force_knapsack(&f, &g);

        let lin_k = scsk_via_scsc_linear(&cover, &f, &g, b, EPS).unwrap();
        assert!(lin_k.f_value <= b + TOL, "seed {seed}");
        assert!(lin_k.g_value >= (1.0 - EPS) * opt_k - 1e-9, "seed {seed}");
        assert!(lin_k.iterations <= linear_cover_search_bound(g_full, g_min, EPS));

        let lin_c = scsc_via_scsk_linear(&knap, &f, &g, c, EPS).unwrap();
        assert!(lin_c.g_value >= c - TOL, "seed {seed}");
        assert!(lin_c.f_value <= (1.0 + EPS) * opt_c + 1e-9, "seed {seed}");
        assert!(lin_c.iterations <= linear_budget_search_bound(f_full, f_min, EPS));

        let bin_k = scsk_via_scsc_binary(&cover, &f, &g, b, EPS).unwrap();
        let integral_g = bin_k.certificate.formula.contains("integral");
        assert!(bin_k.f_value <= bin_k.certificate.sigma * b + TOL);
        assert!(
            bin_k.g_value >= bin_k.certificate.rho * opt_k - 1e-9,
            "seed {seed}"
        );
        assert!(bin_k.iterations <= binary_search_bound(g_full, g_min, EPS, integral_g));

        let bin_c = scsc_via_scsk_binary(&knap, &f, &g, c, EPS).unwrap();
        let integral_f = bin_c.certificate.formula.contains("integral");
        assert!(bin_c.g_value >= bin_c.certificate.rho * c - TOL);
        assert!(
            bin_c.f_value <= bin_c.certificate.sigma * opt_c + 1e-9,
            "seed {seed}"
        );
        assert!(bin_c.iterations <= binary_search_bound(f_full, f_min, EPS, integral_f));

        // same certificate class up to the ε rounding
        for (lin, bin) in [(&lin_k, &bin_k), (&lin_c, &bin_c)] {
            let (a, b) = (&lin.certificate, &bin.certificate);
            assert!((a.sigma - b.sigma).abs() <= EPS * a.sigma.max(b.sigma) + 1e-12);
            assert!((a.rho - b.rho).abs() <= EPS + 1e-12);
        }
    }
}

#[test]
fn binary_search_on_sixty_four_takes_seven_probes() {
    let g = oracle(CatalogEntry::Modular {
        weights: vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0],
    });
    assert_eq!(full_value(&g), 64.0);
    let mut r = rng(64);
    for _ in 0..20 {
        let f = real_modular(&mut r, 8);
        let b = budget(&mut r, &f);
        let rep = scsk_via_scsc_binary(&brute_force_cover(&f, &g), &f, &g, b, EPS).unwrap();
        assert!(rep.iterations <= 7, "{} probes", rep.iterations);
        assert_eq!(rep.certificate.rho, 1.0);
        assert_eq!(rep.g_value, opt_knapsack(&f, &g, b));
    }
}

#[test]
fn roomy_budget_is_one_probe() {
    let mut r = rng(368);
    let f = bipartite(&mut r, 7, 9, false);
    let g = facility(&mut r, 7);
    let rep =
        scsk_via_scsc_linear(&brute_force_cover(&f, &g), &f, &g, full_value(&f), EPS).unwrap();
    assert_eq!(rep.iterations, 1);
    let c = min_singleton(&g);
    let rep = scsc_via_scsk_linear(&brute_force_knapsack(&f, &g), &f, &g, c, EPS).unwrap();
    assert_eq!(rep.iterations, 1);
}

#[test]
fn combine_covers_matches_both_constraints() {
    let a = oracle(CatalogEntry::Modular {
        weights: vec![1.0, 0.5, 0.25, 2.0],
    });
    let b = oracle(CatalogEntry::Modular {
        weights: vec![0.5, 1.5, 1.0, 0.25],
    });
    let combined = combine_covers(&[a.clone(), b.clone()], &[1.0, 2.0]).unwrap();
    let top = full_value(&combined);
    assert_eq!(top, 3.0);
    for x in subsets(4) {
        let both = a.eval(&x) >= 1.0 && b.eval(&x) >= 2.0;
        assert_eq!(both, combined.eval(&x) >= top, "{x}");
    }
    assert!(combine_covers(&[], &[]).is_err());
    assert!(combine_covers(std::slice::from_ref(&a), &[1.0, 2.0]).is_err());

    let mut r = rng(412);
    let g = facility(&mut r, 6);
    let same = combine_covers(std::slice::from_ref(&g), &[full_value(&g)]).unwrap();
    for x in subsets(6) {
        assert_eq!(same.eval(&x), g.eval(&x));
    }
}

#[test]
fn infeasible_cover_is_reported() {
    let mut r = rng(9);
    let f = real_modular(&mut r, 5);
    let g = facility(&mut r, 5);
    let err = scsc_via_scsk_binary(
        &brute_force_knapsack(&f, &g),
        &f,
        &g,
        2.0 * full_value(&g),
        EPS,
    )
    .unwrap_err();
    assert!(err.is_infeasible());
}
