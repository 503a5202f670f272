//! The 4-fold symmetric point-vortex configuration of the unscreened
//! right-handed system.
//!
//! The configuration is four signed deltas placed odd-odd symmetrically:
//! σ₊ = δ(x−x₀,y−y₀) − δ(x+x₀,y−y₀) plus mirror images below the axis,
//! so one representative in the quadrant x < 0, y > 0 determines the
//! whole state. Its self-consistent motion reduces to the exact ODE
//!
//! ```text
//! dx/dt = (1/4π)·x² / (y·(x² + y²)),   dy/dt = (1/4π)·x / (x² + y²)
//! ```
//!
//! with x/y a constant of motion and x² affine in time:
//! d(x²)/dt = C₀ = (1/2π) / ((y₀/x₀)(1 + y₀²/x₀²)) < 0, so the vortices
//! merge at the origin at the closed-form time T* = −x₀²/C₀.

use crate::{Error, Result};

use std::f64::consts::PI;

/// One representative vortex of the symmetric configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointVortexState {
    pub x: f64,
    pub y: f64,
    pub time: f64,
}

impl PointVortexState {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, time: 0.0 }
    }
}

/// Exact right-hand side (dx/dt, dy/dt).
///
/// Errors at y = 0 (the merger singularity) and at the origin.
pub fn pv_rhs(s: &PointVortexState) -> Result<[f64; 2]> {
    if s.y == 0.0 || (s.x == 0.0 && s.y == 0.0) {
        return Err(Error::Numeric(format!(
            "point-vortex singularity at (x, y) = ({}, {}): merger reached",
            s.x, s.y
        )));
    }
    let r2 = s.x * s.x + s.y * s.y;
    Ok([
        s.x * s.x / (s.y * r2) / (4.0 * PI),
        s.x / r2 / (4.0 * PI),
    ])
}

/// The constant d(x²)/dt = (1/2π) / ((y₀/x₀)(1 + y₀²/x₀²)).
pub fn pv_c0(x0: f64, y0: f64) -> Result<f64> {
    if !(x0 < 0.0 && y0 > 0.0) {
        return Err(Error::Config(format!(
            "point vortex must start in the quadrant x < 0, y > 0, got ({x0}, {y0})"
        )));
    }
    let ratio = y0 / x0;
    Ok(1.0 / (2.0 * PI) / (ratio * (1.0 + ratio * ratio)))
}

/// Closed-form merger time T* = −x₀²/C₀.
pub fn pv_merger_time(x0: f64, y0: f64) -> Result<f64> {
    Ok(-x0 * x0 / pv_c0(x0, y0)?)
}

/// Result of a point-vortex integration.
#[derive(Debug, Clone)]
pub struct PvTrajectory {
    /// (t, x, y) at every accepted step, starting with the initial state.
    pub samples: Vec<(f64, f64, f64)>,
    /// Time at which the trajectory entered the merger ball |x| < 10·dt.
    pub merger_time: Option<f64>,
}

/// RK4 integration with near-singularity step control.
///
/// The base step shrinks proportionally to the distance from the origin
/// once that distance falls below 1, and integration stops (merger
/// detected) when x² + y² < (10·dt)². The reported merger time is the
/// step time of detection, within O(dt) of the true root of x(t).
pub fn pv_integrate(s0: PointVortexState, dt: f64, t_end: f64) -> Result<PvTrajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let threshold2 = (10.0 * dt) * (10.0 * dt);
    let mut s = s0;
    let mut samples = vec![(s.time, s.x, s.y)];
    let mut merger_time = None;
    while s.time < t_end {
        let r2 = s.x * s.x + s.y * s.y;
        if r2 < threshold2 {
            merger_time = Some(s.time);
            break;
        }
        let step = dt * r2.sqrt().min(1.0);
        let k1 = pv_rhs(&s)?;
        let at = |p: &PointVortexState, k: [f64; 2], h: f64| PointVortexState {
            x: p.x + h * k[0],
            y: p.y + h * k[1],
            time: p.time + h,
        };
        let k2 = pv_rhs(&at(&s, k1, 0.5 * step))?;
        let k3 = pv_rhs(&at(&s, k2, 0.5 * step))?;
        let k4 = pv_rhs(&at(&s, k3, step))?;
        s.x += step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        s.y += step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        s.time += step;
        samples.push((s.time, s.x, s.y));
    }
    Ok(PvTrajectory { samples, merger_time })
}
