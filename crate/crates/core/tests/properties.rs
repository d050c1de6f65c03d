use std::f64::consts::PI;

use capspec::cap::{inner_product, CapDomain, RadialGrid};
use capspec::eigen::{eigen_closed_n3, find_eigenvalue, find_eigenvalue_on, shoot};
use capspec::gelfand::{minimal_solution, poisson_solve, IterationOptions, Nonlinearity};
use capspec::quadrature::integrate_adaptive;
use capspec::specfun::{digamma, gamma, hyp2f1, hyp2f1_near_one, Hyp2F1Params};
use capspec::torsion::torsion_greens;
use capspec::RadialFunction;
use proptest::prelude::*;

fn fast() -> ProptestConfig {
    ProptestConfig {
        cases: 12,
        ..ProptestConfig::default()
    }
}

proptest! {
    #[test]
    fn digamma_recurrence(z in prop_oneof![-7.9f64..-0.05, 0.05f64..60.0]) {
        prop_assume!((z - z.round()).abs() > 1e-3);
        let lhs = digamma(z + 1.0).unwrap();
        let rhs = digamma(z).unwrap() + 1.0 / z;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "z={}: {} vs {}", z, lhs, rhs);
    }

    #[test]
    fn gamma_recurrence(x in 0.1f64..30.0) {
        let g1 = gamma(x + 1.0).unwrap().value;
        let g0 = gamma(x).unwrap().value;
        prop_assert!((g1 - x * g0).abs() <= 1e-13 * g1.abs());
    }

    #[test]
    fn conversion_matches_series_on_overlap(
        a in -2.3f64..2.3,
        b in -2.3f64..2.3,
        c in 0.3f64..4.0,
        x in 0.3f64..0.5,
    ) {
        let gap = c - a - b;
        prop_assume!((gap - gap.round()).abs() > 0.05);
        let p = Hyp2F1Params::new(a, b, c, x);
        let direct = hyp2f1(p).unwrap();
        let converted = hyp2f1_near_one(p).unwrap();
        prop_assert!(
            (direct - converted).abs() <= 1e-9 * (1.0 + direct.abs()),
            "({a},{b},{c};{x}): {direct} vs {converted}"
        );
    }
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn orthonormality(dim in 2usize..6, eps in 0.05f64..0.6) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let pairs: Vec<_> = (1..=5).map(|j| find_eigenvalue_on(&grid, j).unwrap()).collect();
        for (i, a) in pairs.iter().enumerate() {
            for (k, b) in pairs.iter().enumerate() {
                let ip = inner_product(&a.phi, &b.phi).unwrap();
                let delta = if i == k { 1.0 } else { 0.0 };
                prop_assert!((ip - delta).abs() <= 1e-6, "N={dim} eps={eps} ({},{}) = {ip}", i + 1, k + 1);
            }
        }
    }

    #[test]
    fn sturm_ordering_and_zero_counts(dim in 2usize..6, eps in 0.05f64..0.6) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let mut prev = 0.0;
        for j in 1..=5 {
            let pair = find_eigenvalue_on(&grid, j).unwrap();
            prop_assert!(pair.lambda > prev);
            prev = pair.lambda;
            let v = pair.phi.values();
            let interior = &v[..v.len() - 1];
            let changes = interior.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            prop_assert_eq!(changes, j - 1, "N={} eps={} j={}", dim, eps, j);
            prop_assert!(pair.phi.at_pole() > 0.0);
            prop_assert_eq!(shoot(&dom, pair.lambda * 0.999).unwrap().zero_count, j - 1);
        }
    }

    #[test]
    fn principal_eigenvalue_domain_monotone(dim in 2usize..6, eps in 0.02f64..0.8, shrink in 0.3f64..0.95) {
        let big = find_eigenvalue(&CapDomain::new(dim, eps * shrink).unwrap(), 1).unwrap();
        let small = find_eigenvalue(&CapDomain::new(dim, eps).unwrap(), 1).unwrap();
        prop_assert!(big.lambda < small.lambda);
    }

    #[test]
    fn torsion_shape_and_strict_bound(dim in 2usize..7, eps in 0.02f64..0.8) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let t = torsion_greens(&grid).unwrap();
        let v = t.w.values();
        prop_assert!(v.iter().all(|&x| x >= 0.0));
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(t.max_value, v[0]);
        prop_assert!(v.last().unwrap().abs() < 1e-8);
        let lambda1 = find_eigenvalue_on(&grid, 1).unwrap().lambda;
        prop_assert!(t.max_value > 1.0 / lambda1);
    }

    #[test]
    fn greens_residual(dim in 2usize..7, eps in 0.05f64..0.8) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let t = torsion_greens(&RadialGrid::default_for(&dom)).unwrap();
        prop_assert!(t.residual.unwrap() <= 1e-6, "residual {}", t.residual.unwrap());
    }

    #[test]
    fn first_eigenfunction_positive_and_decreasing(dim in 2usize..6, eps in 0.01f64..0.7) {
        let pair = find_eigenvalue(&CapDomain::new(dim, eps).unwrap(), 1).unwrap();
        let v = pair.phi.values();
        prop_assert!(v[..v.len() - 1].iter().all(|&x| x > 0.0));
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn n3_shooting_matches_closed_form(eps in 0.03f64..0.5, j in 1usize..6) {
        let dom = CapDomain::new(3, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let shot = find_eigenvalue_on(&grid, j).unwrap();
        let exact = eigen_closed_n3(&grid, j).unwrap();
        prop_assert!((shot.lambda - exact.lambda).abs() <= 1e-8 * exact.lambda);
        for (a, b) in shot.phi.values().iter().zip(exact.phi.values()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn gelfand_sandwich_and_monotone_iterates(
        dim in 2usize..9,
        eps in 0.1f64..0.6,
        use_exp in any::<bool>(),
        frac in 0.05f64..1.0,
    ) {
        let f = if use_exp { Nonlinearity::exponential() } else { Nonlinearity::power(2.0).unwrap() };
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let w = torsion_greens(&grid).unwrap();
        let lower = 1.0 / (f.a_star() * w.max_value);
        let lambda = frac * lower;
        let sol = minimal_solution(&grid, &f, lambda, &IterationOptions::default()).unwrap();
        prop_assert!(sol.converged());
        prop_assert!(sol.monotone);
        prop_assert!(sol.residual.unwrap() <= 1e-6);
        let f0 = f.eval(0.0);
        for (u, wv) in sol.u.values().iter().zip(w.w.values()) {
            prop_assert!(lambda * f0 * wv <= u + 1e-9);
            prop_assert!(*u <= f.s_star() * wv / w.max_value + 1e-9);
        }
    }

    #[test]
    fn gelfand_branch_monotone(dim in 2usize..9, eps in 0.1f64..0.6, a in 0.05f64..0.9, b in 0.05f64..0.9) {
        let f = Nonlinearity::exponential();
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let lower = 1.0 / (f.a_star() * torsion_greens(&grid).unwrap().max_value);
        let (lo, hi) = (a.min(b) * lower, a.max(b) * lower);
        let opts = IterationOptions::default();
        let u_lo = minimal_solution(&grid, &f, lo, &opts).unwrap();
        let u_hi = minimal_solution(&grid, &f, hi, &opts).unwrap();
        for (x, y) in u_lo.u.values().iter().zip(u_hi.u.values()) {
            prop_assert!(x <= &(y + 1e-12));
        }
    }

    #[test]
    fn poisson_of_eigenfunction(dim in 2usize..6, eps in 0.1f64..0.7) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let pair = find_eigenvalue_on(&grid, 1).unwrap();
        let u = poisson_solve(&pair.phi.scaled(pair.lambda));
        for (a, b) in u.values().iter().zip(pair.phi.values()) {
            prop_assert!((a - b).abs() <= 1e-5);
        }
    }

    #[test]
    fn cap_area_matches_quadrature(dim in 2usize..8, eps in 0.01f64..0.99) {
        let dom = CapDomain::new(dim, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let one = RadialFunction::constant(grid.clone(), 1.0);
        let area = inner_product(&one, &one).unwrap();
        let oracle = integrate_adaptive(|t: f64| t.sin().powi(dim as i32 - 1), 0.0, dom.theta_max(), 1e-15, 1e-14, 500);
        let expected = dom.slice_area() * oracle.value;
        prop_assert!((area - expected).abs() <= 1e-11 * expected);
        prop_assert!(area < capspec::cap::surface_area_sphere(dim) + 1e-12);
        prop_assert!(dom.theta_max() < PI);
    }
}
