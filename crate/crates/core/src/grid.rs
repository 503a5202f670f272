//! Periodic grids and the field types every module shares.
//!
//! Coordinates are centered: node `(i, j)` sits at
//! `x = (-L/2 + i·h, -L/2 + j·h)` with `h = L/n`, so the box is
//! `[-L/2, L/2)²` and the symmetry axes of the presets coincide with
//! the coordinate axes. Values are row-major with the first index along
//! x₁: `values[i*n + j] = f(x₁(i), x₂(j))`.

use crate::{Error, Result};

/// A square periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    /// Points per side; a power of two ≥ 16.
    pub n: usize,
    /// Side length L of the periodic box.
    pub box_size: f64,
}

impl TorusGrid {
    /// Construct a grid, validating the FFT-friendliness constraints.
    pub fn new(n: usize, box_size: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid.n must be a power of two >= 16, got {n}"
            )));
        }
        if !(box_size > 0.0) || !box_size.is_finite() {
            return Err(Error::Config(format!(
                "grid.box must be positive and finite, got {box_size}"
            )));
        }
        Ok(Self { n, box_size })
    }

    /// Grid spacing h = L/n.
    #[inline]
    pub fn h(&self) -> f64 {
        self.box_size / self.n as f64
    }

    /// Coordinate of node index `i` (same along either axis).
    ///
    /// Written as a single product so the index mirror i ↦ (n−i) mod n
    /// negates the coordinate exactly; symmetry diagnostics rely on that.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * self.n as f64) * self.h()
    }

    /// Signed integer mode index for spectral slot `m`: 0, 1, …, n/2−1, −n/2, …, −1.
    #[inline]
    pub fn mode(&self, m: usize) -> i64 {
        if m <= self.n / 2 - 1 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Physical wavenumber 2π/L · mode for spectral slot `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.box_size * self.mode(m) as f64
    }

    /// Quadrature weight of one node (h²).
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }
}

/// Real scalar samples on a [`TorusGrid`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    /// All-zero field.
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n * grid.n],
        }
    }

    /// Sample `f(x1, x2)` at every node.
    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let n = grid.n;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = grid.coord(i);
            for j in 0..n {
                values.push(f(x1, grid.coord(j)));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.values[i * self.grid.n + j]
    }

    /// True if every sample is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Max |f| over nodes.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Two real component arrays on one grid (a velocity field).
#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: TorusGrid,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            v1: vec![0.0; grid.n * grid.n],
            v2: vec![0.0; grid.n * grid.n],
        }
    }

    /// Max node speed max|v| = max √(v₁²+v₂²).
    pub fn max_speed(&self) -> f64 {
        self.v1
            .iter()
            .zip(&self.v2)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// The transported pair (σ₊, σ₋) at one instant.
#[derive(Debug, Clone)]
pub struct ScalarPair {
    pub plus: ScalarField,
    pub minus: ScalarField,
    pub time: f64,
}

impl ScalarPair {
    pub fn new(plus: ScalarField, minus: ScalarField, time: f64) -> Self {
        assert_eq!(plus.grid, minus.grid, "pair fields must share a grid");
        Self { plus, minus, time }
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.plus.grid
    }

    /// F = (σ₊ + σ₋)/2, the magnetic scalar.
    pub fn f_field(&self) -> ScalarField {
        let mut out = self.plus.clone();
        for (o, m) in out.values.iter_mut().zip(&self.minus.values) {
            *o = 0.5 * (*o + m);
        }
        out
    }

    /// ω = (σ₊ − σ₋)/2, the vorticity scalar.
    pub fn omega_field(&self) -> ScalarField {
        let mut out = self.plus.clone();
        for (o, m) in out.values.iter_mut().zip(&self.minus.values) {
            *o = 0.5 * (*o - m);
        }
        out
    }
}

/// Which equation of state couples the scalars to their velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Handedness {
    Right,
    Left,
}

/// Whether the magnetic operator is screened ((𝕀−Δ)⁻¹ present) or the
/// small-scale (unscreened) limit is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Screening {
    Screened,
    Unscreened,
}

/// One of the four model variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ModelVariant {
    pub handedness: Handedness,
    pub screening: Screening,
}

impl ModelVariant {
    pub const RIGHT_SCREENED: Self = Self {
        handedness: Handedness::Right,
        screening: Screening::Screened,
    };
    pub const RIGHT_UNSCREENED: Self = Self {
        handedness: Handedness::Right,
        screening: Screening::Unscreened,
    };
    pub const LEFT_SCREENED: Self = Self {
        handedness: Handedness::Left,
        screening: Screening::Screened,
    };
    pub const LEFT_UNSCREENED: Self = Self {
        handedness: Handedness::Left,
        screening: Screening::Unscreened,
    };
}

impl std::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let h = match self.handedness {
            Handedness::Right => "right",
            Handedness::Left => "left",
        };
        let s = match self.screening {
            Screening::Screened => "screened",
            Screening::Unscreened => "unscreened",
        };
        write!(f, "{h}-{s}")
    }
}
