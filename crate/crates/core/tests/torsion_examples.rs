use std::f64::consts::{LN_2, PI};

use capspec::cap::{CapDomain, RadialGrid};
use capspec::eigen::find_eigenvalue_on;
use capspec::torsion::{
    closed_form_value, sharpness_gap, torsion_closed_form, torsion_greens, torsion_greens_at, torsion_spectral,
    TorsionError,
};

// w(0) for N = 3, ε = 0.1 from the closed form in 50-digit arithmetic
const N3_EPS01_POLE: f64 = 4.850_972_595_708_81;

#[test]
fn closed_form_pole_values() {
    let r = torsion_closed_form(&CapDomain::new(2, 0.5).unwrap()).unwrap();
    assert!((r.max_value - LN_2).abs() < 1e-14);
    let r = torsion_closed_form(&CapDomain::new(3, 0.5).unwrap()).unwrap();
    assert!((r.max_value - 0.5).abs() < 1e-14);
    let r = torsion_closed_form(&CapDomain::new(3, 0.1).unwrap()).unwrap();
    assert!((r.max_value - N3_EPS01_POLE).abs() < 1e-12);
    assert!(matches!(
        torsion_closed_form(&CapDomain::new(4, 0.1).unwrap()),
        Err(TorsionError::Dimension(4))
    ));
}

#[test]
fn greens_route_examples() {
    let dom = CapDomain::new(2, 0.5).unwrap();
    assert!((torsion_greens(&RadialGrid::default_for(&dom)).unwrap().max_value - LN_2).abs() < 1e-8);
    let dom = CapDomain::new(3, 0.1).unwrap();
    let g = torsion_greens(&RadialGrid::default_for(&dom)).unwrap();
    assert!((g.max_value - closed_form_value(&dom, 0.0).unwrap()).abs() < 1e-8);
    assert!((torsion_greens_at(&dom, 0.0).unwrap() - N3_EPS01_POLE).abs() < 1e-10);
}

#[test]
fn five_dimensional_anchor() {
    let dom = CapDomain::new(5, 0.2).unwrap();
    let g = torsion_greens(&RadialGrid::default_for(&dom)).unwrap();
    assert!(g.residual.unwrap() <= 1e-6);
    let direct = torsion_greens_at(&dom, 0.0).unwrap();
    assert!((g.max_value - direct).abs() < 1e-10 * direct);
    // grid independence of the anchor value
    let fine = torsion_greens(&RadialGrid::new(&dom, 2048).unwrap()).unwrap();
    assert!((fine.max_value - g.max_value).abs() < 1e-11 * g.max_value);
}

#[test]
fn spectral_first_term_dominates() {
    let dom = CapDomain::new(3, 0.1).unwrap();
    let grid = RadialGrid::default_for(&dom);
    let one = torsion_spectral(&grid, 1).unwrap();
    assert!((one.max_value - N3_EPS01_POLE).abs() < 0.05 * N3_EPS01_POLE);
}

#[test]
fn spectral_error_shrinks_with_modes() {
    let dom = CapDomain::new(3, 0.1).unwrap();
    let grid = RadialGrid::default_for(&dom);
    let mut prev = f64::INFINITY;
    for modes in 1..=12 {
        let s = torsion_spectral(&grid, modes).unwrap();
        let err = (s.max_value - N3_EPS01_POLE).abs();
        assert!(err < prev, "J={modes}");
        // a two-term power-law fit is too crude to bound the tail
        if modes >= 3 {
            assert!(err <= s.tail_estimate.unwrap(), "J={modes}");
        }
        prev = err;
    }
    assert!(matches!(torsion_spectral(&grid, 0), Err(TorsionError::InvalidModes(0))));
}

#[test]
fn two_dimensional_spectral_profile() {
    let dom = CapDomain::new(2, 0.3).unwrap();
    let grid = RadialGrid::default_for(&dom);
    let s = torsion_spectral(&grid, 8).unwrap();
    let dev = grid
        .nodes()
        .iter()
        .zip(s.w.values())
        .map(|(&t, &v)| (v - closed_form_value(&dom, t).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 1e-2, "{dev}");
}

#[test]
fn gap_examples() {
    let dom = CapDomain::new(3, 0.1).unwrap();
    let d = sharpness_gap(&dom).unwrap();
    assert!(d > 0.0 && d < 2.0);
    assert!((1.0 / find_eigenvalue_on(&RadialGrid::default_for(&dom), 1).unwrap().lambda - 0.81 / 0.19).abs() < 1e-8);
    for dim in 2..=6 {
        for &eps in &[0.4, 0.1, 0.03] {
            assert!(sharpness_gap(&CapDomain::new(dim, eps).unwrap()).unwrap() > 0.0);
        }
    }
}

#[test]
fn gap_stays_bounded_in_three_dimensions() {
    let mut prev = f64::INFINITY;
    for &eps in &[0.2, 0.1, 0.05, 0.02] {
        let dom = CapDomain::new(3, eps).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let lambda1 = find_eigenvalue_on(&grid, 1).unwrap().lambda;
        let d = torsion_greens(&grid).unwrap().max_value - 1.0 / lambda1;
        assert!(d > 0.0 && d <= 2.0);
        assert!(d * lambda1 < prev);
        prev = d * lambda1;
        // w(0) = 1/(2ε) + O(1)
        assert!((torsion_greens_at(&dom, 0.0).unwrap() - 0.5 / eps).abs() < 2.0);
    }
}

#[test]
fn two_dimensional_pole_matches_logarithm() {
    let eps = 0.01;
    let dom = CapDomain::new(2, eps).unwrap();
    let w0 = torsion_greens(&RadialGrid::default_for(&dom)).unwrap().max_value;
    let log = 2.0 * (2.0 / (PI * eps)).ln();
    assert!((w0 / log - 1.0).abs() < 1e-3);
}
