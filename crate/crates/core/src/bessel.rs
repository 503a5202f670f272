//! Scalar special-function kernels: K₀, K₁, the regularized kernel G̃,
//! its companion Ḡ, and the vector kernel 𝒦 of the screened Biot–Savart
//! correction. No external special-function dependency: ascending series
//! for r ≤ 2, hard-coded Chebyshev expansions of e^r√r·Kᵥ(r) for r > 2
//! (coefficients generated once from a 50-digit reference; certified
//! against an independent series oracle in tests).
//!
//! Definitions (γ₀ is Euler's constant):
//!
//! ```text
//! G̃(r) = K₀(r) + log r − log 2 + γ₀,   G̃(0) = 0 (removable)
//! Ḡ(r) = −K₀(r) − log r = (γ₀ − log 2) − G̃(r),  Ḡ(0⁺) = γ₀ − log 2
//! 𝒦(x) = (1/2π)·(1/|x| − K₁(|x|))·x⊥/|x|,  x⊥ = (−x₂, x₁),  𝒦(0) = 0
//! ```
//!
//! G̃ and the 𝒦 magnitude are computed cancellation-free near r = 0 by
//! folding the 1/r and log r parts into the series analytically.

use crate::{Error, Result};

/// Euler's constant γ₀.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_2: f64 = std::f64::consts::LN_2;

/// Chebyshev coefficients of e^r·√r·K₀(r) in s = 4/r − 1 on r ∈ [2, ∞).
const CHEB_K0: [f64; 22] = [
    1.220_151_541_032_977_7,
    -0.031_448_101_311_964_5,
    1.569_883_885_730_053_4e-3,
    -1.284_954_958_162_780_3e-4,
    1.394_981_371_887_65e-5,
    -1.831_755_522_719_119_5e-6,
    2.766_813_639_445_015e-7,
    -4.660_489_897_687_947e-8,
    8.574_034_017_414_207e-9,
    -1.697_534_509_389_011e-9,
    3.577_397_281_398_967e-10,
    -7.957_489_244_440_262e-11,
    1.855_949_114_852_58e-11,
    -4.514_597_880_522_585e-12,
    1.140_340_580_168_611_9e-12,
    -2.980_096_693_826_206_5e-13,
    8.032_884_150_457_84e-14,
    -2.227_493_935_790_243_2e-14,
    6.339_500_965_356_358e-15,
    -1.846_860_206_720_325e-15,
    5.459_051_661_692_56e-16,
    -1.513_473_066_356_474_3e-16,
];

/// Chebyshev coefficients of e^r·√r·K₁(r) in s = 4/r − 1 on r ∈ [2, ∞).
const CHEB_K1: [f64; 22] = [
    1.360_313_095_242_221_3,
    0.103_923_736_576_817_24,
    -2.857_816_859_622_779_4e-3,
    1.952_155_184_713_516_3e-4,
    -1.936_197_974_166_083e-5,
    2.406_484_947_837_217e-6,
    -3.501_960_603_087_812_5e-7,
    5.741_084_125_450_049e-8,
    -1.034_576_246_567_807_7e-8,
    2.015_049_755_196_981e-9,
    -4.190_354_759_340_473_5e-10,
    9.218_315_187_565_658e-11,
    -2.129_967_838_318_334_4e-11,
    5.139_639_670_427_586e-12,
    -1.289_173_952_325_340_9e-12,
    3.348_419_419_594_729e-13,
    -8.976_698_049_297_238e-14,
    2.477_133_505_094_329e-14,
    -7.019_214_924_686_034e-15,
    2.036_825_301_049_698_5e-15,
    -5.999_479_825_822_285e-16,
    1.658_688_470_454_41e-16,
];

/// Clenshaw evaluation of Σ cₖ·Tₖ(s).
fn cheb(cs: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in cs.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + cs[0]
}

/// I₀ by its ascending series (used for r ≤ 2; converges for all r).
fn i0_series(r: f64) -> f64 {
    // Σ (r²/4)^k / (k!)²
    let u = 0.25 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= u / ((k * k) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// I₁ by its ascending series.
fn i1_series(r: f64) -> f64 {
    // (r/2)·Σ (r²/4)^k / (k!(k+1)!)
    let u = 0.25 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= u / ((k * (k + 1)) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    0.5 * r * sum
}

/// K₀ for 0 < r ≤ 2 via the ascending series
/// K₀ = −(log(r/2) + γ₀)·I₀(r) + Σ_{k≥1} H_k·(r²/4)^k/(k!)².
fn k0_series(r: f64) -> f64 {
    let u = 0.25 * r * r;
    let mut term = 1.0; // u^k/(k!)²
    let mut h = 0.0; // harmonic number H_k
    let mut sum = 0.0;
    for k in 1..40 {
        term *= u / ((k * k) as f64);
        h += 1.0 / k as f64;
        sum += h * term;
        if h * term < 1e-18 * (sum + 1.0) {
            break;
        }
    }
    -((0.5 * r).ln() + EULER_GAMMA) * i0_series(r) + sum
}

/// K₁(r) − 1/r for 0 < r ≤ 2, cancellation-free:
/// log(r/2)·I₁(r) − (r/4)·Σ_{k≥0} (2H_k + 1/(k+1) − 2γ₀)·(r²/4)^k/(k!(k+1)!).
fn k1_sub_series(r: f64) -> f64 {
    let u = 0.25 * r * r;
    let mut term = 1.0; // u^k/(k!(k+1)!)
    let mut h = 0.0;
    let mut sum = (1.0 - 2.0 * EULER_GAMMA) * term;
    for k in 1..40 {
        term *= u / ((k * (k + 1)) as f64);
        h += 1.0 / k as f64;
        let coeff = 2.0 * h + 1.0 / (k + 1) as f64 - 2.0 * EULER_GAMMA;
        sum += coeff * term;
        if term * (2.0 * h + 1.0) < 1e-18 * (sum.abs() + 1.0) {
            break;
        }
    }
    (0.5 * r).ln() * i1_series(r) - 0.25 * r * sum
}

/// K₀(r) without domain checks (r must be > 0).
pub fn k0_raw(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    if r <= 2.0 {
        k0_series(r)
    } else {
        (-r).exp() / r.sqrt() * cheb(&CHEB_K0, 4.0 / r - 1.0)
    }
}

/// K₁(r) without domain checks (r must be > 0).
pub fn k1_raw(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    if r <= 2.0 {
        1.0 / r + k1_sub_series(r)
    } else {
        (-r).exp() / r.sqrt() * cheb(&CHEB_K1, 4.0 / r - 1.0)
    }
}

/// K₁(r) − 1/r, cancellation-free near 0; tends to 0 as r → 0⁺ and r → ∞.
pub fn k1_sub(r: f64) -> f64 {
    debug_assert!(r > 0.0);
    if r <= 2.0 {
        k1_sub_series(r)
    } else {
        k1_raw(r) - 1.0 / r
    }
}

/// Modified Bessel function of the second kind, K₀.
///
/// Relative error < 10⁻⁹ on [10⁻⁶, 30]; exponentially small asymptotic
/// values beyond. Errors for r ≤ 0.
pub fn bessel_k0(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Numeric(format!("bessel_k0: r must be > 0, got {r}")));
    }
    Ok(k0_raw(r))
}

/// Modified Bessel function of the second kind, K₁. Errors for r ≤ 0.
pub fn bessel_k1(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Numeric(format!("bessel_k1: r must be > 0, got {r}")));
    }
    Ok(k1_raw(r))
}

/// I₀ (first kind), exposed for recurrence/oracle checks.
pub fn bessel_i0(r: f64) -> f64 {
    i0_series(r)
}

/// I₁ (first kind), exposed for recurrence/oracle checks.
pub fn bessel_i1(r: f64) -> f64 {
    i1_series(r)
}

/// Domain bound r₀ of the regularized kernel G̃ (small-scale regime).
pub const GTILDE_R0: f64 = 1.0;

/// G̃ without domain checks (0 ≤ r < 1), cancellation-free:
/// G̃ = (log(r/2) + γ₀)·(1 − I₀(r)) + Σ_{k≥1} H_k·(r²/4)^k/(k!)²,
/// where 1 − I₀ is summed directly so both pieces are O(r²).
pub fn gtilde_raw(r: f64) -> f64 {
    debug_assert!((0.0..GTILDE_R0).contains(&r));
    if r == 0.0 {
        return 0.0;
    }
    let u = 0.25 * r * r;
    let mut term = 1.0;
    let mut h = 0.0;
    let mut i0m1 = 0.0; // I₀(r) − 1
    let mut hsum = 0.0;
    for k in 1..40 {
        term *= u / ((k * k) as f64);
        h += 1.0 / k as f64;
        i0m1 += term;
        hsum += h * term;
        if h * term < 1e-20 {
            break;
        }
    }
    -((0.5 * r).ln() + EULER_GAMMA) * i0m1 + hsum
}

/// Regularized kernel G̃(r) = K₀(r) + log r − log 2 + γ₀ on [0, 1).
///
/// G̃(0) = 0 exactly. Errors outside [0, 1): callers must be in the
/// small-scale regime.
pub fn gtilde(r: f64) -> Result<f64> {
    if !(0.0..GTILDE_R0).contains(&r) {
        return Err(Error::Numeric(format!(
            "gtilde: r must be in [0, {GTILDE_R0}), got {r}"
        )));
    }
    Ok(gtilde_raw(r))
}

/// Companion kernel Ḡ(r) = −K₀(r) − log r, finite limit γ₀ − log 2 at 0⁺.
///
/// Computed as (γ₀ − log 2) − G̃(r) for r < 1 (cancellation-free) and
/// directly beyond. Errors for r ≤ 0.
pub fn gbar(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Numeric(format!("gbar: r must be > 0, got {r}")));
    }
    if r < GTILDE_R0 {
        Ok((EULER_GAMMA - LN_2) - gtilde_raw(r))
    } else {
        Ok(-k0_raw(r) - r.ln())
    }
}

/// Vector kernel 𝒦(x) = (1/2π)·(1/|x| − K₁(|x|))·x⊥/|x| of the screened
/// Biot–Savart correction; 𝒦(0) = 0 (removable singularity).
///
/// Exactly perpendicular to x and antisymmetric. |𝒦| stays below 0.07
/// for all radii (the magnitude (1/2π)|K₁ − 1/r| peaks near r ≈ 1).
pub fn kernel_calk(x: [f64; 2]) -> [f64; 2] {
    let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let mag = -k1_sub(r) / (2.0 * std::f64::consts::PI * r);
    [-x[1] * mag, x[0] * mag]
}
