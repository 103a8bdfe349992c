//! Cross-module checks along the traced branch.

use ccfinder::continuation::{lambda_agreement, DEGENERACY_THRESHOLD};
use ccfinder::mass_solver::RANK_TOLERANCE;
use ccfinder::{
    build_configuration, cc_residual_direct, check_symmetry_relations, family_f, ift_certificate,
    lambda_of, mass_m1, mass_m2, solve_masses, solve_phi, trace_curve, FamilyParams, Termination,
};

const SQRT3: f64 = 1.7320508075688772;

#[test]
fn nullspace_masses_match_closed_form_along_trace() {
    let trace = trace_curve(1.3, 2.3, 0.01).unwrap();
    for p in &trace.points {
        let s = solve_masses(p.x, p.y, RANK_TOLERANCE).unwrap();
        assert_eq!(s.nullspace_dim, 1, "y = {}", p.y);
        assert!(s.valid);
        let m = s.masses.unwrap();
        for v in &m[..4] {
            assert!((v - 1.0).abs() < 1e-7);
        }
        assert!((m[4] - p.m).abs() < 1e-8 && (m[5] - p.m).abs() < 1e-8, "y = {}", p.y);
        assert!((s.lambda.unwrap() - p.lambda).abs() < 1e-8);
        assert!(s.residual_norm.unwrap() < 1e-10 * s.largest_singular_value());

        let sym = check_symmetry_relations(&m, p.y).unwrap();
        assert!(sym.max_defect() < 1e-8 && sym.max_gap() < 1e-8);
        assert!(!sym.degenerate_coefficients);
    }
}

#[test]
fn on_curve_points_are_central() {
    let trace = trace_curve(1.2, 2.6, 0.02).unwrap();
    for p in &trace.points {
        let m1 = mass_m1(p.x, p.y).unwrap();
        let m2 = mass_m2(p.x, p.y).unwrap();
        assert!((m1 - m2).abs() < 1e-10 && m1 > 0.0);
        let config = build_configuration(&p.params().unwrap()).translate_to_cm();
        let lambda = lambda_of(&config).unwrap().lambda;
        assert!(cc_residual_direct(&config, lambda).unwrap().max_norm < 1e-10);
        assert!(lambda_agreement(p).unwrap() < 1e-10);
        assert!(p.dfdx.abs() > DEGENERACY_THRESHOLD);
    }
}

#[test]
fn branch_has_no_jumps() {
    let trace = trace_curve(1.4, 2.1, 0.01).unwrap();
    let mut increments: Vec<f64> = trace
        .points
        .windows(2)
        .map(|w| (w[1].x - w[0].x).abs())
        .collect();
    let largest = increments.iter().copied().fold(0.0, f64::max);
    increments.sort_by(f64::total_cmp);
    let median = increments[increments.len() / 2];
    assert!(largest <= 10.0 * median, "largest {largest}, median {median}");
}

#[test]
fn anchor_certificate_matches_closed_forms() {
    let c = ift_certificate(1.0, SQRT3).unwrap();
    let exact = 0.5 * (9.0 - 16.0 * SQRT3) / (27.0 + 4.0 * SQRT3);
    assert!((c.dm1_dx - 0.25).abs() < 1e-6);
    assert!((c.dm2_dx - exact).abs() < 1e-6);
}

#[test]
fn root_solver_agrees_with_trace() {
    let trace = trace_curve(1.5, 2.0, 0.05).unwrap();
    for p in &trace.points {
        let q = solve_phi(p.y, p.x * 1.05, 1e-12).unwrap();
        assert!((q.x - p.x).abs() < 1e-10);
        assert!(family_f(q.x, q.y).unwrap().abs() < 1e-12);
    }
}

#[test]
fn long_trace_stays_on_a_single_branch() {
    let trace = trace_curve(1.05, 3.0, 0.01).unwrap();
    assert_eq!(trace.lower_termination, Termination::RangeExhausted);
    assert_eq!(trace.upper_termination, Termination::RangeExhausted);
    assert!(trace.points.iter().all(|p| p.m > 0.0));
    // apex mass increases with y along the traced branch
    assert!(trace.points.windows(2).all(|w| w[1].m > w[0].m));
}

#[test]
fn perturbed_masses_break_the_hexagon() {
    let hex = build_configuration(&FamilyParams::new(1.0, SQRT3, 2.0).unwrap());
    let lambda = lambda_of(&hex).unwrap().lambda;
    assert!(cc_residual_direct(&hex, lambda).unwrap().max_norm > 1e-3);
}
