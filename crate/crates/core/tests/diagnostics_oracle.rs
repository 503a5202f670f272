//! Diagnostics checks against hand-computable configurations: grid-norm
//! closed forms, quadrant moments of indicator data, explicit two-point
//! evaluations of the moment right-hand side, connected components with
//! periodic wrapping, and the discrete symmetry defect.

use reconnect2d_core::diagnostics::{
    log_log_slope, lp_norm, lp_norm_fractional, moment_rhs_oracle, overlap_integral,
    quadrant_moments, support_components, symmetry_defect, trichotomy_report, DiagnosticsRecord,
    Lp,
};
use reconnect2d_core::{Error, ScalarField, ScalarPair, Screening, TorusGrid};
use std::f64::consts::PI;

fn gaussian_field(grid: TorusGrid, cx: f64, cy: f64, rate: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| (-rate * ((x - cx).powi(2) + (y - cy).powi(2))).exp())
}

#[test]
fn norms_of_constant_and_gaussian_fields() {
    let grid = TorusGrid { n: 256, box_size: 12.8 };
    let c = ScalarField::from_fn(grid, |_, _| -0.3);
    let area = 12.8 * 12.8;
    assert!((lp_norm(&c, Lp::L1) - 0.3 * area).abs() < 1e-10);
    assert!((lp_norm(&c, Lp::L2) - 0.3 * 12.8).abs() < 1e-10);
    assert!((lp_norm(&c, Lp::LInf) - 0.3).abs() < 1e-15);
    // ∫ e^{−r²} dA = π; the tails are ~e^{−40} at this box size
    let g = gaussian_field(grid, 0.0, 0.0, 1.0);
    assert!((lp_norm(&g, Lp::L1) - PI).abs() < 1e-10, "Gaussian L1 = {}", lp_norm(&g, Lp::L1));
    // fractional p = 2 agrees with the L2 branch; p = 3/2 of a constant
    // is |c|·area^{2/3}
    assert!((lp_norm_fractional(&g, 2.0) - lp_norm(&g, Lp::L2)).abs() < 1e-12);
    assert!((lp_norm_fractional(&c, 1.5) - 0.3 * area.powf(2.0 / 3.0)).abs() < 1e-10);
}

#[test]
fn quadrant_moments_of_square_indicator() {
    // f = −1 on [1,2]²: E₁ = E₂ = −∫₁² x dx = −3/2; left-endpoint grid
    // quadrature at h = 1/128 lands within half a percent
    let grid = TorusGrid { n: 1024, box_size: 8.0 };
    let f = ScalarField::from_fn(grid, |x, y| {
        if (1.0..2.0).contains(&x) && (1.0..2.0).contains(&y) {
            -1.0
        } else {
            0.0
        }
    });
    let (e1, e2) = quadrant_moments(&f);
    assert!((e1 + 1.5).abs() < 0.02, "E1 = {e1}, want −1.5");
    assert!((e2 + 1.5).abs() < 0.02, "E2 = {e2}, want −1.5");
    // mass outside the open quadrant does not count
    let g = ScalarField::from_fn(grid, |x, y| if x < 0.0 && y > 0.0 { 5.0 } else { 0.0 });
    assert_eq!(quadrant_moments(&g), (0.0, 0.0));
}

#[test]
fn overlap_integral_of_matching_gaussians() {
    // ∫ e^{−r²}·e^{−r²} dA = π/2
    let grid = TorusGrid { n: 256, box_size: 12.8 };
    let sigma = ScalarPair::new(
        gaussian_field(grid, 0.0, 0.0, 1.0),
        gaussian_field(grid, 0.0, 0.0, 1.0),
        0.0,
    );
    let got = overlap_integral(&sigma);
    assert!((got - PI / 2.0).abs() < 1e-10, "overlap = {got}, want π/2");
}

#[test]
fn moment_rhs_matches_two_point_hand_sum() {
    // two support cells: σ₊ = 3 at (1, 2) and 2 at (2, 1)
    let grid = TorusGrid { n: 64, box_size: 8.0 };
    let mut plus = ScalarField::zeros(grid);
    *plus.at_mut(40, 48) = 3.0; // coord(40) = 1.0, coord(48) = 2.0
    *plus.at_mut(48, 40) = 2.0;
    let minus = ScalarField::zeros(grid);
    let sigma = ScalarPair::new(plus, minus, 0.0);

    let w = grid.cell_area();
    let pts = [(1.0, 2.0, 3.0 * w), (2.0, 1.0, 2.0 * w)];
    let (mut i1, mut i2) = (0.0, 0.0);
    for &(x1, x2, sx) in &pts {
        for &(y1, y2, sy) in &pts {
            let d1: f64 = x1 - y1;
            let s1: f64 = x1 + y1;
            let s2: f64 = x2 + y2;
            let den = s1 * s1 + s2 * s2;
            i1 += x1 * y1 * s2 / ((d1 * d1 + s2 * s2) * den) * sx * sy;
            i2 += s1 / den * sx * sy;
        }
    }
    i1 *= 2.0 / PI;
    i2 /= 2.0 * PI;
    let (e1, e2) = moment_rhs_oracle(&sigma, Screening::Unscreened, 1.0).unwrap();
    assert!((e1 - i1).abs() < 1e-12, "E1' = {e1}, hand sum {i1}");
    assert!((e2 - i2).abs() < 1e-12, "E2' = {e2}, hand sum {i2}");

    // screened variant adds (R/2)∬ K(R(x−y))·(σ₊+σ₋)(y) σ₊(x)
    let r_scale = 0.7;
    let (mut j1, mut j2) = (0.0, 0.0);
    for &(x1, x2, sx) in &pts {
        for &(y1, y2, fy) in &pts {
            let k = reconnect2d_core::bessel::kernel_calk([
                r_scale * (x1 - y1),
                r_scale * (x2 - y2),
            ]);
            j1 += k[0] * fy * sx;
            j2 += k[1] * fy * sx;
        }
    }
    let (s1, s2) = moment_rhs_oracle(&sigma, Screening::Screened, r_scale).unwrap();
    assert!(
        (s1 - (i1 + 0.5 * r_scale * j1)).abs() < 1e-12,
        "screened E1' = {s1}, hand {}",
        i1 + 0.5 * r_scale * j1
    );
    assert!(
        (s2 - (i2 + 0.5 * r_scale * j2)).abs() < 1e-12,
        "screened E2' = {s2}, hand {}",
        i2 + 0.5 * r_scale * j2
    );
}

#[test]
fn moment_rhs_rejects_hypothesis_violations() {
    let grid = TorusGrid { n: 64, box_size: 8.0 };
    // both signs at O(max) in the open quadrant
    let mut plus = ScalarField::zeros(grid);
    *plus.at_mut(40, 48) = 1.0;
    *plus.at_mut(48, 40) = -1.0;
    let sigma = ScalarPair::new(plus, ScalarField::zeros(grid), 0.0);
    match moment_rhs_oracle(&sigma, Screening::Unscreened, 1.0) {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("both signs"), "msg: {msg}"),
        other => panic!("expected hypothesis error, got {other:?}"),
    }
    // support leaking below the horizontal axis
    let mut plus = ScalarField::zeros(grid);
    *plus.at_mut(40, 48) = 1.0;
    *plus.at_mut(40, 16) = 0.5; // coord(16) = −2.0
    let sigma = ScalarPair::new(plus, ScalarField::zeros(grid), 0.0);
    match moment_rhs_oracle(&sigma, Screening::Unscreened, 1.0) {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("leaks"), "msg: {msg}"),
        other => panic!("expected hypothesis error, got {other:?}"),
    }
}

#[test]
fn screened_correction_vanishes_with_scale() {
    let grid = TorusGrid { n: 64, box_size: 8.0 };
    let mut plus = ScalarField::zeros(grid);
    *plus.at_mut(40, 48) = 3.0;
    *plus.at_mut(48, 40) = 2.0;
    let sigma = ScalarPair::new(plus, ScalarField::zeros(grid), 0.0);
    let (u1, u2) = moment_rhs_oracle(&sigma, Screening::Unscreened, 1.0).unwrap();
    let (s1, s2) = moment_rhs_oracle(&sigma, Screening::Screened, 1e-4).unwrap();
    assert!((u1 - s1).abs() < 1e-8 && (u2 - s2).abs() < 1e-8,
        "screened moments at tiny scale: ({s1}, {s2}) vs unscreened ({u1}, {u2})");
}

#[test]
fn support_components_counts_and_wraps() {
    let grid = TorusGrid { n: 128, box_size: 12.8 };
    let two = ScalarField::from_fn(grid, |x, y| {
        (-(x - 3.0).powi(2) - y * y).exp() + (-(x + 3.0).powi(2) - y * y).exp()
    });
    let (count, _) = support_components(&two, 0.1);
    assert_eq!(count, 2, "two separated bumps");
    // negation and scaling leave the count alone
    let neg = ScalarField::from_fn(grid, |x, y| {
        -2.5 * ((-(x - 3.0).powi(2) - y * y).exp() + (-(x + 3.0).powi(2) - y * y).exp())
    });
    assert_eq!(support_components(&neg, 0.25).0, 2);
    // a blob centered on the box corner is one component through the wrap
    let corner = ScalarField::from_fn(grid, |x, y| {
        (-(x.abs() - 6.4).powi(2) - (y.abs() - 6.4).powi(2)).exp()
    });
    assert_eq!(support_components(&corner, 0.5).0, 1, "corner blob must wrap into one");
    // zero field has no components
    assert_eq!(support_components(&ScalarField::zeros(grid), 1e-9).0, 0);
}

#[test]
fn trichotomy_branches_fire_on_designed_fields() {
    let grid = TorusGrid { n: 128, box_size: 12.8 };
    // tall field: branch (a), max |F| > 1/2
    let tall = gaussian_field(grid, 0.0, 0.0, 1.0); // max 1.0
    let rep = trichotomy_report(&tall);
    assert!(rep.branch_a && rep.any_branch(), "tall field: {rep:?}");
    // low bump: its peak is an interior critical value in (0, 1/2)
    let low = ScalarField::from_fn(grid, |x, y| 0.4 * (-(x * x + y * y)).exp());
    let rep = trichotomy_report(&low);
    assert!(!rep.branch_a, "max 0.4 must not trigger the half-level branch");
    assert!(rep.branch_c, "interior max 0.4 ∈ (0,1/2) must be seen: {rep:?}");
    // five bumps above 1/2: more than four crossing clusters
    let five = ScalarField::from_fn(grid, |x, y| {
        let mut v = 0.0;
        for (cx, cy) in [(3.0, 3.0), (-3.0, 3.0), (3.0, -3.0), (-3.0, -3.0), (0.0, 0.0)] {
            v += 0.8 * (-4.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp();
        }
        v
    });
    let rep = trichotomy_report(&five);
    assert!(rep.half_level_clusters >= 5, "five bumps: {rep:?}");
    assert!(rep.any_branch(), "crossing-cluster branch must fire: {rep:?}");
    // zero field: nothing fires
    let rep = trichotomy_report(&ScalarField::zeros(grid));
    assert!(!rep.any_branch(), "zero field fired a branch: {rep:?}");
}

#[test]
fn symmetry_defect_vanishes_on_odd_odd_data_and_sees_a_spike() {
    let grid = TorusGrid { n: 256, box_size: 12.8 };
    // rate-4 bumps keep the un-periodized tails at the box edge below
    // e^{−77}; the centered index mirror then cancels to the last bit
    let bump =
        |x: f64, y: f64, cx: f64, cy: f64| (-4.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp();
    let plus = ScalarField::from_fn(grid, |x, y| bump(x, y, -2.0, 2.0) - bump(x, y, 2.0, 2.0));
    let minus = ScalarField::from_fn(grid, |x, y| bump(x, y, -2.0, -2.0) - bump(x, y, 2.0, -2.0));
    let mut sigma = ScalarPair::new(plus, minus, 0.0);
    let d0 = symmetry_defect(&sigma);
    assert!(d0 < 1e-15, "defect {d0} on exactly symmetric data");
    *sigma.plus.at_mut(10, 20) += 3e-4;
    let d1 = symmetry_defect(&sigma);
    assert!((d1 - 3e-4).abs() < 1e-12, "defect {d1} after a 3e-4 spike");
}

#[test]
fn diagnostics_record_measures_clean_fields() {
    let grid = TorusGrid { n: 128, box_size: 12.8 };
    // rate-4 bumps: the saddle between same-sign bumps is ~e^{−16}, below
    // the 1e-6·max component floor, so the four lobes of F stay separate
    let bump =
        |x: f64, y: f64, cx: f64, cy: f64| (-4.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp();
    let plus = ScalarField::from_fn(grid, |x, y| bump(x, y, -2.0, 2.0) - bump(x, y, 2.0, 2.0));
    let minus = ScalarField::from_fn(grid, |x, y| bump(x, y, -2.0, -2.0) - bump(x, y, 2.0, -2.0));
    let sigma = ScalarPair::new(plus, minus, 0.0);
    let rec = DiagnosticsRecord::measure(&sigma);
    assert!(rec.is_finite());
    assert!(rec.l1_plus > 0.0 && rec.l2_plus > 0.0 && rec.linf_plus > 0.0);
    assert!(rec.components_f >= 4, "four bumps should appear in F: {}", rec.components_f);
    assert!(rec.symmetry_defect < 1e-14);
}

#[test]
fn log_log_slope_recovers_exact_powers() {
    let xs = [1.0, 0.5, 0.25, 0.125];
    let ys: Vec<f64> = xs.iter().map(|&x: &f64| 3.0 * x.powf(2.25)).collect();
    let slope = log_log_slope(&xs, &ys).unwrap();
    assert!((slope - 2.25).abs() < 1e-12, "slope {slope}");
    assert!(matches!(log_log_slope(&xs[..2], &ys[..1]), Err(Error::Config(_))));
    assert!(matches!(log_log_slope(&[1.0], &[2.0]), Err(Error::Config(_))));
}
