//! Discrete Fourier machinery and the velocity-law operators.
//!
//! Everything here acts spectrally with exact lattice wavenumbers
//! k = 2π/L · m, m ∈ {−n/2, …, n/2−1}². The operators are
//!
//! - 𝕌(f) = ∇⊥Δ⁻¹f   (mode symbol −i k⊥/|k|², zero mode projected out),
//! - 𝔹(f) = ∇⊥(𝕀−Δ)⁻¹f (symbol +i k⊥/(1+|k|²)),
//! - 𝕊(f) = 𝕌(f)+𝔹(f) = 2∇⊥𝕂(f) (symbol −i k⊥/(|k|²(1+|k|²))),
//!
//! with ∇⊥ = (−∂₂, ∂₁) and k⊥ = (−k₂, k₁). Signs are fixed by the
//! analytic single-mode evaluation on the 2π box:
//! Δ⁻¹ sin x₁ = −sin x₁, ∇⊥(−sin x₁) = (0, −cos x₁), so
//! 𝕌(sin x₁) = (0, −cos x₁); (𝕀−Δ)⁻¹ sin x₁ = sin x₁ / 2, so
//! 𝔹(sin x₁) = (0, +cos x₁ / 2); together 𝕊(sin x₁) = (0, −cos x₁ / 2).
//!
//! The four velocity laws (σ = (σ₊, σ₋), F = (σ₊+σ₋)/2, ω = (σ₊−σ₋)/2):
//!
//! | variant            | v₊                    | v₋                     |
//! |--------------------|-----------------------|------------------------|
//! | right + screened   | 𝕌(ω) + 𝔹(F)           | 𝕌(ω) − 𝔹(F)            |
//! | right + unscreened | −𝕌(σ₋)                | +𝕌(σ₊)                 |
//! | left + screened    | 𝕌(σ₊) − 𝕊(F)          | −𝕌(σ₋) + 𝕊(F)          |
//! | left + unscreened  | +𝕌(σ₊)                | −𝕌(σ₋)                 |
//!
//! Transforms are complex-to-complex (rustfft) on rows plus an explicit
//! transpose; the inverse carries the 1/n² normalization. All velocity
//! laws reduce to applying ∇⊥ to a single composed stream function per
//! scalar, so each velocity costs one spectral composition and two
//! inverse transforms.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::{Handedness, ModelVariant, ScalarField, ScalarPair, Screening, TorusGrid, VectorField};

pub type C64 = Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);

/// FFT plans, wavenumber tables and work storage for one grid size.
///
/// Methods take `&mut self` only to reuse internal scratch buffers; they
/// have no observable state and the type is `Send`.
pub struct SpectralOps {
    grid: TorusGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Physical wavenumber per spectral slot.
    k: Vec<f64>,
    /// 2/3-rule retention mask per slot (|mode| ≤ n/3).
    keep: Vec<bool>,
    fft_scratch: Vec<C64>,
    transpose_buf: Vec<C64>,
    work1: Vec<C64>,
    work2: Vec<C64>,
}

impl SpectralOps {
    pub fn new(grid: TorusGrid) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k: Vec<f64> = (0..n).map(|m| grid.wavenumber(m)).collect();
        let keep: Vec<bool> = (0..n).map(|m| 3 * grid.mode(m).abs() <= n as i64).collect();
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            grid,
            fwd,
            inv,
            k,
            keep,
            fft_scratch: vec![ZERO; scratch_len],
            transpose_buf: vec![ZERO; n * n],
            work1: Vec::new(),
            work2: Vec::new(),
        }
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn transform_2d(&mut self, data: &mut [C64], forward: bool) {
        let n = self.grid.n;
        let plan = if forward { &self.fwd } else { &self.inv };
        for row in data.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut self.fft_scratch);
        }
        // columns: transpose, transform rows, transpose back
        for i in 0..n {
            for j in 0..n {
                self.transpose_buf[j * n + i] = data[i * n + j];
            }
        }
        for row in self.transpose_buf.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut self.fft_scratch);
        }
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.transpose_buf[j * n + i];
            }
        }
    }

    /// Forward 2D transform of real samples into `out` (unnormalized).
    pub fn fft2(&mut self, real: &[f64], out: &mut Vec<C64>) {
        out.clear();
        out.extend(real.iter().map(|&v| C64::new(v, 0.0)));
        self.transform_2d(out, true);
    }

    /// Inverse 2D transform; writes the real part × 1/n² into `out`.
    /// The spectral buffer is consumed as in-place work storage.
    pub fn ifft2_real(&mut self, spec: &mut [C64], out: &mut [f64]) {
        self.transform_2d(spec, false);
        let norm = 1.0 / (self.grid.n * self.grid.n) as f64;
        for (o, s) in out.iter_mut().zip(spec.iter()) {
            *o = s.re * norm;
        }
    }

    /// Zero every mode with |m₁| > n/3 or |m₂| > n/3 (2/3 rule).
    pub fn dealias(&self, spec: &mut [C64]) {
        let n = self.grid.n;
        for a in 0..n {
            let row = &mut spec[a * n..(a + 1) * n];
            if !self.keep[a] {
                row.fill(ZERO);
            } else {
                for (b, v) in row.iter_mut().enumerate() {
                    if !self.keep[b] {
                        *v = ZERO;
                    }
                }
            }
        }
    }

    /// v = ∇⊥ψ from a composed spectral stream function:
    /// ψ̂(k) = c_a(|k|²)·â(k) [+ c_b(|k|²)·b̂(k)], v̂ = (−ik₂ψ̂, +ik₁ψ̂).
    fn perp_grad_composed(
        &mut self,
        a_hat: &[C64],
        b_hat: Option<&[C64]>,
        c_a: impl Fn(f64) -> f64,
        c_b: impl Fn(f64) -> f64,
        out: &mut VectorField,
    ) {
        let n = self.grid.n;
        let mut v1_hat = std::mem::take(&mut self.work1);
        let mut v2_hat = std::mem::take(&mut self.work2);
        v1_hat.clear();
        v1_hat.resize(n * n, ZERO);
        v2_hat.clear();
        v2_hat.resize(n * n, ZERO);
        for ia in 0..n {
            let k1 = self.k[ia];
            for ib in 0..n {
                let k2 = self.k[ib];
                let k_sq = k1 * k1 + k2 * k2;
                let s = ia * n + ib;
                let mut psi = a_hat[s] * c_a(k_sq);
                if let Some(bh) = b_hat {
                    psi += bh[s] * c_b(k_sq);
                }
                // ∇⊥ψ = (−∂₂ψ, ∂₁ψ)
                v1_hat[s] = C64::new(0.0, -k2) * psi;
                v2_hat[s] = C64::new(0.0, k1) * psi;
            }
        }
        self.ifft2_real(&mut v1_hat, &mut out.v1);
        self.ifft2_real(&mut v2_hat, &mut out.v2);
        self.work1 = v1_hat;
        self.work2 = v2_hat;
    }

    /// 𝕌(f) = ∇⊥Δ⁻¹f; the mean of f is projected out.
    pub fn op_u(&mut self, f: &ScalarField) -> VectorField {
        let mut f_hat = Vec::new();
        self.fft2(&f.values, &mut f_hat);
        let mut out = VectorField::zeros(self.grid);
        self.perp_grad_composed(&f_hat, None, inv_lap, |_| 0.0, &mut out);
        out
    }

    /// 𝔹(f) = ∇⊥(𝕀−Δ)⁻¹f.
    pub fn op_b(&mut self, f: &ScalarField) -> VectorField {
        let mut f_hat = Vec::new();
        self.fft2(&f.values, &mut f_hat);
        let mut out = VectorField::zeros(self.grid);
        self.perp_grad_composed(&f_hat, None, inv_helm, |_| 0.0, &mut out);
        out
    }

    /// 𝕊(f) = 𝕌(f) + 𝔹(f) = 2∇⊥𝕂(f), evaluated as one composed symbol.
    pub fn op_s(&mut self, f: &ScalarField) -> VectorField {
        let mut f_hat = Vec::new();
        self.fft2(&f.values, &mut f_hat);
        let mut out = VectorField::zeros(self.grid);
        self.perp_grad_composed(&f_hat, None, s_stream, |_| 0.0, &mut out);
        out
    }

    /// Spectral gradient ∇f = (∂₁f, ∂₂f) from an already-transformed field.
    pub fn gradient_from_spectrum(&mut self, f_hat: &[C64], out: &mut VectorField) {
        let n = self.grid.n;
        let mut g1_hat = std::mem::take(&mut self.work1);
        let mut g2_hat = std::mem::take(&mut self.work2);
        g1_hat.clear();
        g1_hat.resize(n * n, ZERO);
        g2_hat.clear();
        g2_hat.resize(n * n, ZERO);
        for ia in 0..n {
            let k1 = self.k[ia];
            for ib in 0..n {
                let s = ia * n + ib;
                g1_hat[s] = C64::new(0.0, k1) * f_hat[s];
                g2_hat[s] = C64::new(0.0, self.k[ib]) * f_hat[s];
            }
        }
        self.ifft2_real(&mut g1_hat, &mut out.v1);
        self.ifft2_real(&mut g2_hat, &mut out.v2);
        self.work1 = g1_hat;
        self.work2 = g2_hat;
    }

    /// Spectral gradient of a field.
    pub fn gradient(&mut self, f: &ScalarField) -> VectorField {
        let mut f_hat = Vec::new();
        self.fft2(&f.values, &mut f_hat);
        let mut out = VectorField::zeros(self.grid);
        self.gradient_from_spectrum(&f_hat, &mut out);
        out
    }

    /// Spectral divergence ∂₁v₁ + ∂₂v₂ (used to verify the velocity laws).
    pub fn divergence(&mut self, v: &VectorField) -> ScalarField {
        let n = self.grid.n;
        let mut a_hat = Vec::new();
        let mut b_hat = Vec::new();
        self.fft2(&v.v1, &mut a_hat);
        self.fft2(&v.v2, &mut b_hat);
        for ia in 0..n {
            let k1 = self.k[ia];
            for ib in 0..n {
                let s = ia * n + ib;
                a_hat[s] = C64::new(0.0, k1) * a_hat[s] + C64::new(0.0, self.k[ib]) * b_hat[s];
            }
        }
        let mut out = ScalarField::zeros(self.grid);
        self.ifft2_real(&mut a_hat, &mut out.values);
        out
    }

    /// Both transport velocities from already-transformed σ̂₊, σ̂₋.
    pub fn velocities_from_spectra(
        &mut self,
        p_hat: &[C64],
        m_hat: &[C64],
        variant: ModelVariant,
        v_plus: &mut VectorField,
        v_minus: &mut VectorField,
    ) {
        match (variant.handedness, variant.screening) {
            (Handedness::Right, Screening::Screened) => {
                // V± = 𝕌(ω) ± 𝔹(F): ψ̂± = Δ⁻¹(σ̂₊−σ̂₋)/2 ± (𝕀−Δ)⁻¹(σ̂₊+σ̂₋)/2.
                self.perp_grad_composed(
                    p_hat,
                    Some(m_hat),
                    |k2| 0.5 * (inv_lap(k2) + inv_helm(k2)),
                    |k2| 0.5 * (-inv_lap(k2) + inv_helm(k2)),
                    v_plus,
                );
                self.perp_grad_composed(
                    p_hat,
                    Some(m_hat),
                    |k2| 0.5 * (inv_lap(k2) - inv_helm(k2)),
                    |k2| 0.5 * (-inv_lap(k2) - inv_helm(k2)),
                    v_minus,
                );
            }
            (Handedness::Right, Screening::Unscreened) => {
                // v₊ = −𝕌(σ₋), v₋ = +𝕌(σ₊): one scalar drives the other.
                self.perp_grad_composed(m_hat, None, |k2| -inv_lap(k2), |_| 0.0, v_plus);
                self.perp_grad_composed(p_hat, None, inv_lap, |_| 0.0, v_minus);
            }
            (Handedness::Left, Screening::Screened) => {
                // v₊ = 𝕌(σ₊) − 𝕊(F), v₋ = −𝕌(σ₋) + 𝕊(F).
                self.perp_grad_composed(
                    p_hat,
                    Some(m_hat),
                    |k2| inv_lap(k2) - 0.5 * s_stream(k2),
                    |k2| -0.5 * s_stream(k2),
                    v_plus,
                );
                self.perp_grad_composed(
                    p_hat,
                    Some(m_hat),
                    |k2| 0.5 * s_stream(k2),
                    |k2| -inv_lap(k2) + 0.5 * s_stream(k2),
                    v_minus,
                );
            }
            (Handedness::Left, Screening::Unscreened) => {
                // v± = ±𝕌(σ±): the scalars do not interact.
                self.perp_grad_composed(p_hat, None, inv_lap, |_| 0.0, v_plus);
                self.perp_grad_composed(m_hat, None, |k2| -inv_lap(k2), |_| 0.0, v_minus);
            }
        }
    }

    /// Both transport velocities for the given model variant.
    pub fn compute_velocities(&mut self, sigma: &ScalarPair, variant: ModelVariant) -> (VectorField, VectorField) {
        let mut p_hat = Vec::new();
        let mut m_hat = Vec::new();
        self.fft2(&sigma.plus.values, &mut p_hat);
        self.fft2(&sigma.minus.values, &mut m_hat);
        let mut v_plus = VectorField::zeros(self.grid);
        let mut v_minus = VectorField::zeros(self.grid);
        self.velocities_from_spectra(&p_hat, &m_hat, variant, &mut v_plus, &mut v_minus);
        (v_plus, v_minus)
    }
}

/// Δ⁻¹ stream multiplier: −1/|k|², zero mode projected out.
#[inline]
fn inv_lap(k_sq: f64) -> f64 {
    if k_sq > 0.0 {
        -1.0 / k_sq
    } else {
        0.0
    }
}

/// (𝕀−Δ)⁻¹ stream multiplier: 1/(1+|k|²).
#[inline]
fn inv_helm(k_sq: f64) -> f64 {
    1.0 / (1.0 + k_sq)
}

/// 𝕊-stream multiplier: −1/(|k|²(1+|k|²)), zero mode projected out.
#[inline]
fn s_stream(k_sq: f64) -> f64 {
    if k_sq > 0.0 {
        -1.0 / (k_sq * (1.0 + k_sq))
    } else {
        0.0
    }
}
