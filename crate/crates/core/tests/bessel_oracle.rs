//! Modified-Bessel kernel checks against three independent oracles:
//!
//! 1. reference values frozen from a 50-digit arbitrary-precision
//!    evaluation (literals below);
//! 2. the Wronskian identity I₀(r)K₁(r) + I₁(r)K₀(r) = 1/r, exact for
//!    the true functions at every r > 0;
//! 3. an ascending-series evaluation written directly from the standard
//!    expansions inside this file, independent of the library's
//!    cancellation-free rearrangements and its large-r Chebyshev branch.

use reconnect2d_core::bessel::{
    bessel_i0, bessel_i1, bessel_k0, bessel_k1, gbar, gtilde, k1_sub, kernel_calk, EULER_GAMMA,
};
use reconnect2d_core::Error;

/// 50-digit reference values, rounded to f64.
const K0_REF: [(f64, f64); 6] = [
    (0.1, 2.4270690247020166),
    (1.0, 0.42102443824070833),
    (2.0, 0.11389387274953344),
    (5.0, 0.0036910983340425943),
    (10.0, 1.7780062316167652e-5),
    (30.0, 2.1324774964630564e-14),
];
const K1_REF: [(f64, f64); 2] = [(0.1, 9.8538447808706061), (1.0, 0.60190723019723457)];

/// Plain ascending series for K₀, straight from
/// K₀ = −(log(r/2)+γ)I₀(r) + Σ_{k≥1} H_k (r²/4)^k / (k!)².
fn k0_series_oracle(r: f64) -> f64 {
    let u = 0.25 * r * r;
    let mut i0 = 1.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut h = 0.0;
    for k in 1..=40 {
        term *= u / ((k * k) as f64);
        i0 += term;
        h += 1.0 / k as f64;
        sum += h * term;
    }
    -((0.5 * r).ln() + EULER_GAMMA) * i0 + sum
}

/// Plain ascending series for K₁, straight from
/// K₁ = 1/r + log(r/2)I₁(r) − (r/4)Σ_{k≥0}(2H_k + 1/(k+1) − 2γ)(r²/4)^k/(k!(k+1)!).
fn k1_series_oracle(r: f64) -> f64 {
    let u = 0.25 * r * r;
    let mut i1 = 0.5 * r;
    let mut term = 0.5 * r;
    for k in 1..=40 {
        term *= u / ((k * (k + 1)) as f64);
        i1 += term;
    }
    let mut sum = 0.0;
    let mut t = 1.0; // u^k/(k!(k+1)!) at k=0
    let mut h = 0.0;
    for k in 0..=40 {
        if k > 0 {
            t *= u / ((k * (k + 1)) as f64);
            h += 1.0 / k as f64;
        }
        sum += (2.0 * h + 1.0 / (k + 1) as f64 - 2.0 * EULER_GAMMA) * t;
    }
    1.0 / r + (0.5 * r).ln() * i1 - 0.25 * r * sum
}

#[test]
fn k0_k1_match_frozen_references() {
    for &(r, want) in &K0_REF {
        let got = bessel_k0(r).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "K0({r}) = {got:e}, reference {want:e}"
        );
    }
    for &(r, want) in &K1_REF {
        let got = bessel_k1(r).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "K1({r}) = {got:e}, reference {want:e}"
        );
    }
}

#[test]
fn k0_k1_match_series_oracle_below_two() {
    let mut r = 1e-6;
    while r <= 2.0 {
        let k0 = bessel_k0(r).unwrap();
        let k1 = bessel_k1(r).unwrap();
        let o0 = k0_series_oracle(r);
        let o1 = k1_series_oracle(r);
        assert!(((k0 - o0) / o0).abs() < 1e-9, "K0({r}): {k0:e} vs oracle {o0:e}");
        assert!(((k1 - o1) / o1).abs() < 1e-9, "K1({r}): {k1:e} vs oracle {o1:e}");
        r *= 1.45;
    }
}

#[test]
fn wronskian_identity_holds_everywhere() {
    // I₀K₁ + I₁K₀ = 1/r ties all four functions together across both
    // evaluation branches
    let mut r = 0.05;
    while r < 25.0 {
        let lhs = bessel_i0(r) * bessel_k1(r).unwrap() + bessel_i1(r) * bessel_k0(r).unwrap();
        let rel = (lhs * r - 1.0).abs();
        assert!(rel < 1e-11, "Wronskian defect {rel:e} at r = {r}");
        r *= 1.13;
    }
}

#[test]
fn k1_is_negative_derivative_of_k0() {
    let h = 1e-5;
    let mut r = 0.1;
    while r <= 5.0 {
        let fd = -(bessel_k0(r + h).unwrap() - bessel_k0(r - h).unwrap()) / (2.0 * h);
        let k1 = bessel_k1(r).unwrap();
        assert!(
            ((fd - k1) / k1).abs() < 1e-6,
            "-dK0/dr = {fd:e} vs K1({r}) = {k1:e}"
        );
        r += 0.37;
    }
}

#[test]
fn series_and_chebyshev_branches_agree_at_the_seam() {
    // just above r = 2 the library switches to the Chebyshev branch while
    // the in-test ascending series still converges: same point, two
    // algorithms
    for r in [2.0 + 1e-12, 2.1, 2.5, 3.0, 4.0] {
        let cheb0 = bessel_k0(r).unwrap();
        let series0 = k0_series_oracle(r);
        assert!(
            ((cheb0 - series0) / series0).abs() < 1e-10,
            "K0({r}) branch disagreement: {cheb0:e} vs {series0:e}"
        );
        let cheb1 = bessel_k1(r).unwrap();
        let series1 = k1_series_oracle(r);
        assert!(
            ((cheb1 - series1) / series1).abs() < 1e-10,
            "K1({r}) branch disagreement: {cheb1:e} vs {series1:e}"
        );
    }
}

#[test]
fn k0_approaches_asymptotic_form() {
    // K₀(r) ≈ √(π/2r)e^{−r}: at r = 30 the first correction term 1/(8r)
    // leaves a ~4.1e-3 relative gap
    let r: f64 = 30.0;
    let asym = (std::f64::consts::PI / (2.0 * r)).sqrt() * (-r).exp();
    let ratio = bessel_k0(r).unwrap() / asym;
    assert!((ratio - 1.0).abs() < 5e-3, "asymptotic ratio {ratio} at r = 30");
}

#[test]
fn k_functions_reject_nonpositive_radius() {
    for r in [0.0, -1.0] {
        assert!(matches!(bessel_k0(r), Err(Error::Numeric(_))));
        assert!(matches!(bessel_k1(r), Err(Error::Numeric(_))));
    }
}

#[test]
fn gtilde_matches_identity_and_frozen_values() {
    // G̃(r) = K₀(r) + log(r/2) + γ, assembled without cancellation
    assert_eq!(gtilde(0.0).unwrap(), 0.0);
    let mut r = 0.01;
    while r < 1.0 {
        let direct = bessel_k0(r).unwrap() + (0.5 * r).ln() + EULER_GAMMA;
        let g = gtilde(r).unwrap();
        assert!(
            (g - direct).abs() < 1e-12 * (1.0 + direct.abs()),
            "G~({r}) = {g:e} vs identity {direct:e}"
        );
        r += 0.013;
    }
    let g01 = gtilde(0.1).unwrap();
    assert!((g01 - 0.00855241604956).abs() < 1e-12, "G~(0.1) = {g01}");
    let g05 = gtilde(0.5).unwrap();
    assert!((g05 - 0.115340375009).abs() < 1e-11, "G~(0.5) = {g05}");
}

#[test]
fn gtilde_obeys_quadratic_log_bound() {
    // |G̃(r)| ≤ r²(1 + |log r|) on (0, 1/2]
    for k in 1..=10_000 {
        let r = 0.5 * k as f64 / 10_000.0;
        let g = gtilde(r).unwrap().abs();
        let bound = r * r * (1.0 + r.ln().abs());
        assert!(g <= bound, "G~({r}) = {g:e} exceeds bound {bound:e}");
    }
}

#[test]
fn gtilde_rejects_radius_outside_domain() {
    assert!(matches!(gtilde(1.0), Err(Error::Numeric(_))));
    assert!(matches!(gtilde(1.5), Err(Error::Numeric(_))));
    assert!(matches!(gtilde(-0.1), Err(Error::Numeric(_))));
}

#[test]
fn gbar_matches_both_of_its_forms() {
    // definition: Ḡ(r) = −K₀(r) − log r; series form below r = 1:
    // Ḡ = (γ − log 2) − G̃
    let g01 = gbar(0.1).unwrap();
    assert!((g01 - (-0.124483931708)).abs() < 1e-11, "Gbar(0.1) = {g01}");
    let g1 = gbar(1.0).unwrap();
    assert!((g1 - (-0.421024438241)).abs() < 1e-11, "Gbar(1) = {g1}");
    let mut r = 0.05;
    while r < 1.0 {
        let series_form = gbar(r).unwrap();
        let direct = -bessel_k0(r).unwrap() - r.ln();
        assert!(
            (series_form - direct).abs() < 1e-12,
            "Gbar({r}): {series_form:e} vs −K0−log r = {direct:e}"
        );
        r += 0.011;
    }
    // seam at r = 1 between the two branches
    let below = gbar(1.0 - 1e-9).unwrap();
    let above = gbar(1.0 + 1e-9).unwrap();
    assert!((below - above).abs() < 1e-8, "Gbar seam jump {below} vs {above}");
}

#[test]
fn kernel_is_perpendicular_antisymmetric_and_frozen() {
    assert_eq!(kernel_calk([0.0, 0.0]), [0.0, 0.0]);
    let k = kernel_calk([0.1, 0.0]);
    // frozen: (1/2π)(1/r − K₁(r)) at r = 0.1 applied to x⊥
    assert!((k[0] - 0.0).abs() < 1e-15 && (k[1] - 0.0232613255831).abs() < 1e-12, "K(0.1,0) = {k:?}");
    let xs = [[0.3, -0.4], [0.01, 0.02], [1.7, 2.2], [5.0, 0.0]];
    for x in xs {
        let k = kernel_calk(x);
        let m = kernel_calk([-x[0], -x[1]]);
        assert!(
            (k[0] + m[0]).abs() < 1e-15 && (k[1] + m[1]).abs() < 1e-15,
            "kernel not antisymmetric at {x:?}"
        );
        let dot = k[0] * x[0] + k[1] * x[1];
        assert!(dot.abs() < 1e-14, "kernel not perpendicular at {x:?}: dot = {dot:e}");
    }
    // continuous vanishing at the origin (magnitude ~ r|log r|/4π) and
    // far-field decay of the 1/r-compensated magnitude
    let r = 1e-8_f64;
    let tiny = kernel_calk([r, 0.0]);
    assert!(
        tiny[1].abs() < r * r.ln().abs(),
        "kernel too large near origin: {tiny:?}"
    );
    let far = kernel_calk([40.0, 0.0]);
    // |K(x)| = (1/2π)(1/r − K₁(r)) → 1/(2πr) as r → ∞
    assert!(
        (far[1] - 1.0 / (2.0 * std::f64::consts::PI * 40.0)).abs() < 1e-12,
        "far-field kernel magnitude {far:?}"
    );
}

#[test]
fn k1_sub_is_cancellation_free_near_zero() {
    // k1_sub(r) = K₁(r) − 1/r ~ (r/2)(log(r/2) + γ − 1/2) near 0; the
    // subtracted form must stay smooth where direct subtraction loses
    // all digits
    let r = 1e-12;
    let v = k1_sub(r);
    let lead = 0.5 * r * ((0.5 * r).ln() + EULER_GAMMA - 0.5);
    assert!(
        ((v - lead) / lead).abs() < 1e-3,
        "k1_sub({r:e}) = {v:e}, leading term {lead:e}"
    );
}
