//! Boundary-integral evolution of patch solutions for the left-handed
//! system: the screened contour dynamics, its unscreened 2D-Euler
//! reduction, analytic rotating backgrounds, polygon overlap geometry,
//! and perturbation measurement against the backgrounds.
//!
//! Node velocities follow the reduced contour system: writing s = ±1 for
//! the patch sign,
//!
//! ```text
//! ∂ₜz_s(α) = s·(1/2π) ∮ log|z_s(α) − z_s(β)| ∂_βz_s dβ          (self)
//!          − s·(1/4π) ∮ G̃(|z_s(α) − z_s(β)|) ∂_βz_s dβ          (screened self)
//!          − s·(1/4π) ∮ G̃(|z_s(α) − z_{−s}(β)|) ∂_βz_{−s} dβ    (screened cross)
//! ```
//!
//! (unscreened mode keeps only the log self-term). The log singularity is
//! split as log(|z(α)−z(β)| / |2sin((α−β)/2)|) — smooth, trapezoid-summed
//! with the removable diagonal value log|∂_αz(α)| — plus the circular-log
//! part, evaluated exactly through the identity
//! (1/2π)∮ log|e^{iα}−e^{iβ}| ∂_βf dβ = ½(ℋf)(α) with the Hilbert
//! multiplier ℋe^{ikα} = −i·sgn(k)e^{ikα}, applied via FFT.
//!
//! On the unit circle the self-term evaluates to −(i/2)z, so the printed
//! sign convention spins the plus patch clockwise; the analytic ellipse
//! background (mode phase e^{−i(4/9)t}, shape rate 2/9 clockwise) is the
//! exact solution of the plus equation. Shape-level diagnostics are
//! insensitive to the absolute spin direction.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::bessel::{gtilde_raw, k0_raw, EULER_GAMMA, GTILDE_R0};
use crate::solver::StepError;
use crate::{Error, Result};

use std::f64::consts::PI;

pub type C64 = Complex<f64>;

/// G̃ on the full radius range (identity form beyond the series domain).
fn gtilde_full(r: f64) -> f64 {
    if r < GTILDE_R0 {
        gtilde_raw(r)
    } else {
        k0_raw(r) + r.ln() - std::f64::consts::LN_2 + EULER_GAMMA
    }
}

/// Which velocity law drives the contours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourMode {
    /// Log self-terms only (2D-Euler limit of vanishing patch scale).
    UnscreenedEuler,
    /// Log self-terms plus the G̃ self- and cross-corrections.
    ScreenedLeft,
}

/// Closed positively-oriented polygonal patch boundary.
#[derive(Debug, Clone)]
pub struct PatchContour {
    /// Nodes z_j at α_j = 2πj/M; z_M ≡ z_0 implied.
    pub nodes: Vec<C64>,
    /// Patch sign s ∈ {+1, −1} selecting the σ₊ or σ₋ patch.
    pub strength: f64,
}

impl PatchContour {
    pub fn new(nodes: Vec<C64>, strength: f64) -> Result<Self> {
        if nodes.len() < 64 {
            return Err(Error::Config(format!(
                "contour needs at least 64 nodes, got {}",
                nodes.len()
            )));
        }
        if strength != 1.0 && strength != -1.0 {
            return Err(Error::Config(format!(
                "patch strength must be +1 or -1, got {strength}"
            )));
        }
        Ok(Self { nodes, strength })
    }

    /// Counterclockwise circle.
    pub fn circle(center: C64, radius: f64, m: usize, strength: f64) -> Result<Self> {
        let nodes = (0..m)
            .map(|j| center + radius * C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
            .collect();
        Self::new(nodes, strength)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Signed shoelace area (positive for counterclockwise orientation).
    pub fn area(&self) -> f64 {
        polygon_area(&self.nodes)
    }

    pub fn perimeter(&self) -> f64 {
        let m = self.nodes.len();
        (0..m).map(|j| (self.nodes[(j + 1) % m] - self.nodes[j]).norm()).sum()
    }

    /// (min, max, mean) adjacent node spacing.
    pub fn spacing(&self) -> (f64, f64, f64) {
        let m = self.nodes.len();
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        let mut sum = 0.0;
        for j in 0..m {
            let d = (self.nodes[(j + 1) % m] - self.nodes[j]).norm();
            min = min.min(d);
            max = max.max(d);
            sum += d;
        }
        (min, max, sum / m as f64)
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let m = self.nodes.len();
        for i in 0..m {
            let (a1, a2) = (self.nodes[i], self.nodes[(i + 1) % m]);
            for j in i + 1..m {
                // skip shared-endpoint neighbours (including the wrap pair)
                if j == i || (j + 1) % m == i || (i + 1) % m == j {
                    continue;
                }
                let (b1, b2) = (self.nodes[j], self.nodes[(j + 1) % m]);
                if segments_cross(a1, a2, b1, b2).is_some() {
                    return false;
                }
            }
        }
        true
    }

    pub fn centroid(&self) -> C64 {
        let m = self.nodes.len() as f64;
        self.nodes.iter().sum::<C64>() / m
    }
}

/// The evolving pair of patch boundaries with its scale parameters.
#[derive(Debug, Clone)]
pub struct ContourPairState {
    pub plus: PatchContour,
    pub minus: PatchContour,
    pub time: f64,
    /// Patch scale R.
    pub r_scale: f64,
    /// Offset parameter d of the merger configuration.
    pub d_offset: f64,
}

/// Spectral derivative ∂_βz and ½·Hilbert transform of the node sequence.
fn derivative_and_half_hilbert(nodes: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let m = nodes.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut hat: Vec<C64> = nodes.to_vec();
    fwd.process(&mut hat);
    let mut dz = vec![C64::default(); m];
    let mut hz = vec![C64::default(); m];
    for (k, &c) in hat.iter().enumerate() {
        // signed frequency; zero the ambiguous Nyquist mode
        let ks = if 2 * k < m {
            k as i64
        } else if 2 * k == m {
            0
        } else {
            k as i64 - m as i64
        };
        dz[k] = c * C64::new(0.0, ks as f64);
        let sgn = (ks.signum()) as f64;
        hz[k] = c * C64::new(0.0, -0.5 * sgn);
    }
    inv.process(&mut dz);
    inv.process(&mut hz);
    let scale = 1.0 / m as f64;
    for v in dz.iter_mut().chain(hz.iter_mut()) {
        *v *= scale;
    }
    (dz, hz)
}

/// Node velocities (v_plus, v_minus) of the pair under the given mode.
///
/// Errors when either curve self-intersects.
pub fn contour_velocity(state: &ContourPairState, mode: ContourMode) -> Result<(Vec<C64>, Vec<C64>)> {
    for (name, c) in [("plus", &state.plus), ("minus", &state.minus)] {
        if !c.is_simple() {
            return Err(Error::Numeric(format!(
                "{name} contour self-intersects at t = {:.6}",
                state.time
            )));
        }
    }
    let (dz_p, hz_p) = derivative_and_half_hilbert(&state.plus.nodes);
    let (dz_m, hz_m) = derivative_and_half_hilbert(&state.minus.nodes);
    let v_plus = patch_velocity(&state.plus, &dz_p, &hz_p, &state.minus, &dz_m, mode);
    let v_minus = patch_velocity(&state.minus, &dz_m, &hz_m, &state.plus, &dz_p, mode);
    Ok((v_plus, v_minus))
}

fn patch_velocity(
    own: &PatchContour,
    dz: &[C64],
    half_hilbert: &[C64],
    other: &PatchContour,
    dz_other: &[C64],
    mode: ContourMode,
) -> Vec<C64> {
    let m = own.nodes.len();
    let s = own.strength;
    // |2 sin((α_i−α_j)/2)| depends only on i−j
    let sin_table: Vec<f64> = (0..m)
        .map(|k| (2.0 * (PI * k as f64 / m as f64).sin()).abs())
        .collect();
    let mut vel = vec![C64::default(); m];
    for i in 0..m {
        let zi = own.nodes[i];
        // smooth part of the log self-term, diagonal value log|∂_αz|
        let mut log_term = dz[i] * dz[i].norm().ln();
        for j in 0..m {
            if j == i {
                continue;
            }
            let r = (zi - own.nodes[j]).norm();
            log_term += dz[j] * (r / sin_table[(i + m - j) % m]).ln();
        }
        let mut v = s * (log_term / m as f64 + half_hilbert[i]);
        if mode == ContourMode::ScreenedLeft {
            let mut self_term = C64::default();
            for j in 0..m {
                if j == i {
                    continue; // G̃(0) = 0
                }
                self_term += dz[j] * gtilde_full((zi - own.nodes[j]).norm());
            }
            let mut cross_term = C64::default();
            for (j, &zj) in other.nodes.iter().enumerate() {
                let r = (zi - zj).norm();
                if r > 0.0 {
                    cross_term += dz_other[j] * gtilde_full(r);
                }
            }
            v -= s * 0.5
                * (self_term / m as f64 + cross_term / other.nodes.len() as f64);
        }
        vel[i] = v;
    }
    vel
}

/// One RK4 step of both contours.
///
/// Fails with a step-size error (state untouched) when dt exceeds
/// 0.5·(min node spacing)/(max |v|) at the first stage.
pub fn step_contours(state: &mut ContourPairState, dt: f64, mode: ContourMode) -> std::result::Result<(), StepError> {
    assert!(dt > 0.0, "dt must be positive");
    let k1 = match contour_velocity(state, mode) {
        Ok(v) => v,
        Err(_) => return Err(StepError::NonFinite),
    };
    let vmax = k1
        .0
        .iter()
        .chain(&k1.1)
        .map(|v| v.norm())
        .fold(0.0_f64, f64::max);
    let min_spacing = state.plus.spacing().0.min(state.minus.spacing().0);
    if vmax > 0.0 {
        let allowed = 0.5 * min_spacing / vmax;
        if dt > allowed * (1.0 + 1e-12) {
            return Err(StepError::Cfl { requested: dt, allowed });
        }
    }
    let displace = |base: &ContourPairState, k: &(Vec<C64>, Vec<C64>), h: f64| {
        let mut s = base.clone();
        for (n, v) in s.plus.nodes.iter_mut().zip(&k.0) {
            *n += h * v;
        }
        for (n, v) in s.minus.nodes.iter_mut().zip(&k.1) {
            *n += h * v;
        }
        s.time = base.time + h;
        s
    };
    let eval = |s: &ContourPairState| contour_velocity(s, mode).map_err(|_| StepError::NonFinite);
    let k2 = eval(&displace(state, &k1, 0.5 * dt))?;
    let k3 = eval(&displace(state, &k2, 0.5 * dt))?;
    let k4 = eval(&displace(state, &k3, dt))?;
    for i in 0..state.plus.nodes.len() {
        state.plus.nodes[i] += dt / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
    }
    for i in 0..state.minus.nodes.len() {
        state.minus.nodes[i] += dt / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]);
    }
    state.time += dt;
    let finite = state
        .plus
        .nodes
        .iter()
        .chain(&state.minus.nodes)
        .all(|z| z.re.is_finite() && z.im.is_finite());
    if finite { Ok(()) } else { Err(StepError::NonFinite) }
}

/// Equal-arclength redistribution of the nodes (periodic Catmull-Rom
/// through the existing nodes, parametrized by cumulative chord length).
pub fn reparametrize(c: &PatchContour) -> Result<PatchContour> {
    let resampled = resample_equal_arclength(&c.nodes, c.nodes.len(), 0.0)?;
    PatchContour::new(resampled, c.strength)
}

/// Sample `count` equal-arclength nodes along the closed Catmull-Rom
/// curve through `nodes`, starting `offset` ∈ [0,1) of one spacing after
/// the original first node.
fn resample_equal_arclength(nodes: &[C64], count: usize, offset: f64) -> Result<Vec<C64>> {
    let m = nodes.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for j in 0..m {
        let d = (nodes[(j + 1) % m] - nodes[j]).norm();
        cum.push(cum[j] + d);
    }
    let total = cum[m];
    if !(total > 0.0) {
        return Err(Error::Numeric("degenerate zero-length contour".into()));
    }
    let spline = |seg: usize, t: f64| -> C64 {
        let p0 = nodes[(seg + m - 1) % m];
        let p1 = nodes[seg];
        let p2 = nodes[(seg + 1) % m];
        let p3 = nodes[(seg + 2) % m];
        let t2 = t * t;
        let t3 = t2 * t;
        0.5 * ((2.0 * p1)
            + (p2 - p0) * t
            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2
            + (3.0 * (p1 - p2) + p3 - p0) * t3)
    };
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let target = (k as f64 + offset) / count as f64 * total;
        while seg + 1 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        out.push(spline(seg, t.clamp(0.0, 1.0)));
    }
    Ok(out)
}

/// The analytic rotating background pair.
///
/// Z₊ is the 2:1 ellipse (semi-axes 2R and R) centered at d+2R whose mode
/// phase advances as e^{−i(4/9)t} (shape angular velocity 2/9, clockwise);
/// Z₋ is the circle of radius R with phase e^{−it/2}.
#[derive(Debug, Clone)]
pub struct BackgroundState {
    pub time: f64,
    pub r_scale: f64,
    pub d_offset: f64,
    /// Z± sampled at α_j = 2πj/M.
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl BackgroundState {
    /// Z₊(α,t) = (R/2)e^{iπ/2}(3e^{−i(4/9)t}e^{iα} + e^{−iα}) + (d+2R).
    pub fn z_plus(&self, alpha: f64) -> C64 {
        let r = self.r_scale;
        let rot = C64::from_polar(1.0, -4.0 / 9.0 * self.time);
        let e = C64::from_polar(1.0, alpha);
        C64::new(0.0, 0.5 * r) * (3.0 * rot * e + e.conj())
            + C64::new(self.d_offset + 2.0 * r, 0.0)
    }

    /// Z₋(α,t) = R·e^{−it/2}e^{iα}.
    pub fn z_minus(&self, alpha: f64) -> C64 {
        let r = self.r_scale;
        r * C64::from_polar(1.0, alpha - 0.5 * self.time)
    }

    /// Parameter-derivatives ∂ₜZ± at the sample parameters (exactness checks).
    pub fn dt_z_plus(&self, alpha: f64) -> C64 {
        let r = self.r_scale;
        let rot = C64::from_polar(1.0, -4.0 / 9.0 * self.time);
        let e = C64::from_polar(1.0, alpha);
        C64::new(0.0, 0.5 * r) * (3.0 * C64::new(0.0, -4.0 / 9.0) * rot * e)
    }

    pub fn dt_z_minus(&self, alpha: f64) -> C64 {
        C64::new(0.0, -0.5) * self.z_minus(alpha)
    }
}

/// Sample the analytic background at `m` nodes per curve.
pub fn analytic_background(t: f64, r: f64, d: f64, m: usize) -> Result<BackgroundState> {
    if !(r > 0.0) {
        return Err(Error::Config(format!("background patch scale must be > 0, got {r}")));
    }
    let mut bg = BackgroundState {
        time: t,
        r_scale: r,
        d_offset: d,
        plus: Vec::with_capacity(m),
        minus: Vec::with_capacity(m),
    };
    for j in 0..m {
        let alpha = 2.0 * PI * j as f64 / m as f64;
        bg.plus.push(bg.z_plus(alpha));
        bg.minus.push(bg.z_minus(alpha));
    }
    Ok(bg)
}

/// Result of the polygon overlap test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OverlapResult {
    Disjoint,
    Overlap(f64),
}

impl OverlapResult {
    pub fn is_overlap(&self) -> bool {
        matches!(self, OverlapResult::Overlap(_))
    }

    pub fn area(&self) -> f64 {
        match self {
            OverlapResult::Disjoint => 0.0,
            OverlapResult::Overlap(a) => *a,
        }
    }
}

/// Proper intersection of open segments (a1,a2) and (b1,b2); returns the
/// parameter pair (t, u) ∈ (0,1)² when they cross transversally.
fn segments_cross(a1: C64, a2: C64, b1: C64, b2: C64) -> Option<(f64, f64)> {
    let da = a2 - a1;
    let db = b2 - b1;
    let denom = da.re * db.im - da.im * db.re;
    if denom == 0.0 {
        return None;
    }
    let w = b1 - a1;
    let t = (w.re * db.im - w.im * db.re) / denom;
    let u = (w.re * da.im - w.im * da.re) / denom;
    if t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0 {
        Some((t, u))
    } else {
        None
    }
}

/// Even-odd point-in-polygon test.
fn point_in_polygon(p: C64, poly: &[C64]) -> bool {
    let m = poly.len();
    let mut inside = false;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if p.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_area(poly: &[C64]) -> f64 {
    let m = poly.len();
    0.5 * (0..m)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % m];
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

/// Shoelace line-integral contribution of an open polyline.
fn polyline_area_term(points: &[C64]) -> f64 {
    0.5 * points
        .windows(2)
        .map(|w| w[0].re * w[1].im - w[1].re * w[0].im)
        .sum::<f64>()
}

/// Overlap classification of two simple closed polygons.
///
/// Detection is by edge crossing plus containment; the overlap area comes
/// from Green's theorem: each boundary arc between consecutive crossings
/// lies entirely inside or outside the other polygon, and the area of the
/// intersection is the sum of the shoelace line integrals of the inside
/// arcs of both boundaries. Robust to multiple intersection lobes without
/// any crossing-graph traversal.
pub fn contours_overlap(a: &PatchContour, b: &PatchContour) -> Result<OverlapResult> {
    for (name, c) in [("first", a), ("second", b)] {
        if c.nodes.len() < 3 || !(polygon_area(&c.nodes).abs() > 0.0) {
            return Err(Error::Numeric(format!("{name} contour is degenerate")));
        }
    }
    let pa = &a.nodes;
    let pb = &b.nodes;
    // crossing parameters per edge of each polygon
    let mut cuts_a: Vec<Vec<f64>> = vec![Vec::new(); pa.len()];
    let mut cuts_b: Vec<Vec<f64>> = vec![Vec::new(); pb.len()];
    let mut any = false;
    for i in 0..pa.len() {
        let (a1, a2) = (pa[i], pa[(i + 1) % pa.len()]);
        for j in 0..pb.len() {
            let (b1, b2) = (pb[j], pb[(j + 1) % pb.len()]);
            if let Some((t, u)) = segments_cross(a1, a2, b1, b2) {
                cuts_a[i].push(t);
                cuts_b[j].push(u);
                any = true;
            }
        }
    }
    if !any {
        // no crossings: one boundary point decides full containment
        if point_in_polygon(pa[0], pb) {
            return Ok(OverlapResult::Overlap(polygon_area(pa).abs()));
        }
        if point_in_polygon(pb[0], pa) {
            return Ok(OverlapResult::Overlap(polygon_area(pb).abs()));
        }
        // coincident boundaries leave both probes undecided; mutual
        // centroid containment catches the identical-contour case
        if point_in_polygon(a.centroid(), pb) && point_in_polygon(b.centroid(), pa) {
            let area = polygon_area(pa).abs().min(polygon_area(pb).abs());
            return Ok(OverlapResult::Overlap(area));
        }
        return Ok(OverlapResult::Disjoint);
    }
    let area = inside_arcs_area(pa, &mut cuts_a, pb) + inside_arcs_area(pb, &mut cuts_b, pa);
    Ok(OverlapResult::Overlap(area.max(0.0)))
}

/// Sum of shoelace terms of the arcs of `poly` (split at `cuts`) that lie
/// inside `other`.
fn inside_arcs_area(poly: &[C64], cuts: &mut [Vec<f64>], other: &[C64]) -> f64 {
    let m = poly.len();
    // flatten the split boundary into a cyclic point list with flags at cuts
    let mut points: Vec<C64> = Vec::new();
    let mut is_cut: Vec<bool> = Vec::new();
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        points.push(a);
        is_cut.push(false);
        cuts[i].sort_by(|x, y| x.partial_cmp(y).unwrap());
        for &t in cuts[i].iter() {
            points.push(a + t * (b - a));
            is_cut.push(true);
        }
    }
    let n = points.len();
    let starts: Vec<usize> = (0..n).filter(|&k| is_cut[k]).collect();
    let mut total = 0.0;
    for w in 0..starts.len() {
        let s = starts[w];
        let e = starts[(w + 1) % starts.len()];
        // collect the arc from cut s to cut e (cyclic)
        let mut arc = vec![points[s]];
        let mut k = (s + 1) % n;
        loop {
            arc.push(points[k]);
            if k == e {
                break;
            }
            k = (k + 1) % n;
        }
        // midpoint of the arc decides inside/outside
        let mid = if arc.len() > 2 {
            arc[arc.len() / 2]
        } else {
            0.5 * (arc[0] + arc[1])
        };
        if point_in_polygon(mid, other) {
            total += polyline_area_term(&arc);
        }
    }
    total
}

/// Perturbation (sup|ζ|, sup|ζ′|) of both patches against the analytic
/// background, ζ = (z − Z)/R.
///
/// Both curves are resampled to equal arclength; the background phase is
/// anchored by nearest-point projection of the state's node 0 onto the
/// background curve, and ζ′ is the first divided difference in α.
pub fn perturbation_norm(state: &ContourPairState, bg: &BackgroundState) -> Result<(f64, f64)> {
    if bg.plus.len() != state.plus.len() || bg.minus.len() != state.minus.len() {
        return Err(Error::Config(format!(
            "node-count mismatch between state ({}, {}) and background ({}, {})",
            state.plus.len(),
            state.minus.len(),
            bg.plus.len(),
            bg.minus.len()
        )));
    }
    let (zp, dzp) = patch_perturbation(&state.plus.nodes, &bg.plus, state.r_scale)?;
    let (zm, dzm) = patch_perturbation(&state.minus.nodes, &bg.minus, state.r_scale)?;
    Ok((zp.max(zm), dzp.max(dzm)))
}

fn patch_perturbation(nodes: &[C64], bg_nodes: &[C64], r: f64) -> Result<(f64, f64)> {
    let m = nodes.len();
    // both curves go through the same dense refinement so their arclength
    // measures (dense chord sums) are equally converged
    let dense = 16 * m;
    let state_dense = resample_equal_arclength(nodes, dense, 0.0)?;
    let state_eq = resample_equal_arclength(&state_dense, m, 0.0)?;
    let bg_dense = resample_equal_arclength(bg_nodes, dense, 0.0)?;
    // nearest-point projection of the state's first node onto the dense
    // background polyline anchors the phase
    let w0 = state_eq[0];
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, &z) in bg_dense.iter().enumerate() {
        let d = (z - w0).norm();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    // sub-sample refinement over the two segments adjacent to the winner
    let project = |a: C64, b: C64| -> (f64, f64) {
        let ab = b - a;
        let t = (((w0 - a).re * ab.re + (w0 - a).im * ab.im) / ab.norm_sqr()).clamp(0.0, 1.0);
        (t, (a + t * ab - w0).norm())
    };
    let prev = (best + dense - 1) % dense;
    let next = (best + 1) % dense;
    let (t_fwd, d_fwd) = project(bg_dense[best], bg_dense[next]);
    let (t_bwd, d_bwd) = project(bg_dense[prev], bg_dense[best]);
    let best_refined = if d_fwd <= d_bwd {
        best as f64 + t_fwd
    } else {
        prev as f64 + t_bwd
    };
    let offset = best_refined / 16.0; // in units of one target spacing
    let bg_eq = resample_equal_arclength(&bg_dense, m, offset.fract())?;
    let shift = offset.floor() as usize % m;
    let mut sup_z: f64 = 0.0;
    let mut zeta = Vec::with_capacity(m);
    for k in 0..m {
        let z = (state_eq[k] - bg_eq[(k + shift) % m]) / r;
        sup_z = sup_z.max(z.norm());
        zeta.push(z);
    }
    let dalpha = 2.0 * PI / m as f64;
    let mut sup_dz: f64 = 0.0;
    for k in 0..m {
        sup_dz = sup_dz.max((zeta[(k + 1) % m] - zeta[k]).norm() / dalpha);
    }
    Ok((sup_z, sup_dz))
}

/// Driver advancing a contour pair with reparametrization cadence and a
/// CFL-halving step loop.
pub struct ContourSim {
    pub state: ContourPairState,
    pub mode: ContourMode,
    /// Reparametrize both curves every this many accepted steps.
    pub reparam_every: u64,
    steps: u64,
}

impl ContourSim {
    pub fn new(state: ContourPairState, mode: ContourMode) -> Self {
        Self { state, mode, reparam_every: 10, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One accepted RK4 step of at most `dt_max` (halving on step-size
    /// errors), returning the dt actually taken.
    pub fn step_adaptive(&mut self, dt_max: f64) -> Result<f64> {
        let mut dt = dt_max;
        loop {
            match step_contours(&mut self.state, dt, self.mode) {
                Ok(()) => break,
                Err(StepError::Cfl { allowed, .. }) => {
                    dt = (dt / 2.0).min(allowed);
                    if !(dt > 0.0) {
                        return Err(Error::Numeric("contour step size collapsed".into()));
                    }
                }
                Err(StepError::NonFinite) => {
                    return Err(Error::Numeric(format!(
                        "contour step failed at t = {:.6}",
                        self.state.time
                    )));
                }
            }
        }
        self.steps += 1;
        if self.steps % self.reparam_every == 0 {
            self.state.plus = reparametrize(&self.state.plus)?;
            self.state.minus = reparametrize(&self.state.minus)?;
            let ratio_ok = |c: &PatchContour| {
                let (min, max, mean) = c.spacing();
                min > 0.0 && max / mean <= 3.0 && mean / min <= 3.0
            };
            if !ratio_ok(&self.state.plus) || !ratio_ok(&self.state.minus) {
                return Err(Error::Numeric(format!(
                    "node spacing degenerated at t = {:.6}",
                    self.state.time
                )));
            }
        }
        Ok(dt)
    }

    /// Advance to `t_target` (never overshooting).
    pub fn advance_to(&mut self, t_target: f64, dt_max: f64) -> Result<()> {
        while self.state.time < t_target - 1e-12 {
            let dt = (t_target - self.state.time).min(dt_max);
            self.step_adaptive(dt)?;
        }
        Ok(())
    }
}
