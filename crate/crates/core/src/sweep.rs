//! Parameter sweeps and the two quantitative scaling measurements built
//! on them: the screened-vs-unscreened gap in ε (with Lagrangian tracer
//! deviations) and the vanishing-resistivity convergence order in ν.
//!
//! Both measurements drive their run families in lockstep — one shared
//! step size, chosen once from the most restrictive initial CFL bound —
//! so that time-discretization error cancels in the differences being
//! fitted. If any member trips the CFL guard mid-run, the whole family
//! restarts with the step halved; differences are only ever taken
//! between states advanced by identical step sequences.

use crate::diagnostics::{log_log_slope, lp_norm_fractional};
use crate::grid::{ScalarField, ScalarPair, Screening};
use crate::scenario::{
    right_smooth_merger, right_smooth_merger_screened, support_radius, InitialData, Scenario,
    SmoothMergerSpec,
};
use crate::solver::{Solver, StepError, TracerSet};
use crate::{Error, Result};

/// One run per resistivity value, identical initial data.
pub fn nu_sweep(spec: &SmoothMergerSpec, nus: &[f64]) -> Result<Vec<Scenario>> {
    nus.iter()
        .map(|&nu| {
            if !(nu >= 0.0) || !nu.is_finite() {
                return Err(Error::Config(format!("nu values must be >= 0, got {nu}")));
            }
            let mut s = *spec;
            s.nu = nu;
            let mut sc = right_smooth_merger(&s)?;
            sc.name.push_str(&format!(" nu={nu}"));
            Ok(sc)
        })
        .collect()
}

/// One screened run per data scale ε.
pub fn eps_sweep(eps_values: &[f64], spec: &SmoothMergerSpec) -> Result<Vec<Scenario>> {
    eps_values
        .iter()
        .map(|&eps| right_smooth_merger_screened(eps, spec))
        .collect()
}

/// Worker cap for sweep fan-out: RECONNECT2D_THREADS when set (≥ 1),
/// otherwise the machine's available parallelism.
pub fn thread_budget() -> usize {
    std::env::var("RECONNECT2D_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run independent jobs through a pool bounded by [`thread_budget`],
/// returning results in job order.
pub fn run_many<T, F>(jobs: Vec<F>) -> Vec<Result<T>>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    let width = thread_budget();
    if width <= 1 {
        return jobs.into_iter().map(|j| j()).collect();
    }
    let mut out: Vec<Option<Result<T>>> = jobs.iter().map(|_| None).collect();
    let mut pending: Vec<(usize, F)> = jobs.into_iter().enumerate().collect();
    while !pending.is_empty() {
        let take = pending.len().min(width);
        let batch: Vec<(usize, F)> = pending.drain(..take).collect();
        let finished: Vec<(usize, Result<T>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .into_iter()
                .map(|(i, job)| scope.spawn(move || (i, job())))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        for (i, r) in finished {
            out[i] = Some(r);
        }
    }
    out.into_iter().map(|slot| slot.unwrap()).collect()
}

// ---------------------------------------------------------------------
// screened-vs-unscreened stability in ε
// ---------------------------------------------------------------------

/// One ε of the stability sweep.
#[derive(Debug, Clone, Copy)]
pub struct StabilityPoint {
    pub eps: f64,
    /// ‖σ̃₊−σ₊‖_{L^p} + ‖σ̃₋−σ₋‖_{L^p} at t_end (σ̃ screened, σ unscreened).
    pub gap_lp: f64,
    /// sup over tracers and both families of |X(t_end) − Y(t_end)|.
    pub tracer_dev: f64,
    /// Shared step size the pair actually ran with.
    pub dt: f64,
    pub steps: usize,
}

/// Stability sweep result: the gap’s fitted log-log slope in ε and the
/// tracer-deviation ratios between successive scales.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub p: f64,
    pub t_end: f64,
    /// Points in descending ε.
    pub points: Vec<StabilityPoint>,
    pub gap_slope: f64,
    /// tracer_dev(ε_k) / tracer_dev(ε_{k+1}) for consecutive points.
    pub tracer_ratios: Vec<f64>,
}

/// Measure ‖σ̃ − σ‖_{L^p}(t_end) between the screened and unscreened
/// right-handed systems started from identical data at each scale ε,
/// along with Lagrangian tracer deviations. `spec` fixes the grid and
/// bump shape; its scale is replaced by each ε in turn.
pub fn stability_sweep(
    eps_values: &[f64],
    spec: &SmoothMergerSpec,
    t_end: f64,
    p: f64,
) -> Result<StabilityReport> {
    if eps_values.len() < 2 {
        return Err(Error::Config(format!(
            "stability sweep needs >= 2 eps values, got {}",
            eps_values.len()
        )));
    }
    if !(t_end > 0.0) || !(1.0..2.0).contains(&p) {
        return Err(Error::Config(format!(
            "stability sweep needs t_end > 0 and p in [1, 2), got t_end={t_end}, p={p}"
        )));
    }
    let mut order: Vec<f64> = eps_values.to_vec();
    order.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut points = Vec::with_capacity(order.len());
    for &eps in &order {
        let sc = right_smooth_merger_screened(eps, spec)?;
        let InitialData::Fields(pair) = &sc.init else {
            unreachable!("smooth presets carry gridded fields");
        };
        // tracer ring riding the σ₊ bump at (2ε, 2ε), well inside its support
        let center = 2.0 * eps;
        let ring = 0.4 * support_radius() * eps;
        let mut labels = vec![[center, center]];
        for k in 0..8 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            labels.push([center + ring * a.cos(), center + ring * a.sin()]);
        }
        let (screened, unscreened, dt, steps) = run_locked_pair(pair, t_end, &labels)?;

        let mut gap = 0.0;
        for (a, b) in [
            (&screened.0.plus, &unscreened.0.plus),
            (&screened.0.minus, &unscreened.0.minus),
        ] {
            let mut diff = ScalarField::zeros(a.grid);
            for (slot, (x, y)) in diff.values.iter_mut().zip(a.values.iter().zip(b.values.iter()))
            {
                *slot = x - y;
            }
            gap += lp_norm_fractional(&diff, p);
        }
        let tracer_dev = tracer_deviation(&screened.1, &unscreened.1);
        points.push(StabilityPoint {
            eps,
            gap_lp: gap,
            tracer_dev,
            dt,
            steps,
        });
    }

    let gap_slope = log_log_slope(
        &points.iter().map(|q| q.eps).collect::<Vec<_>>(),
        &points.iter().map(|q| q.gap_lp).collect::<Vec<_>>(),
    )?;
    let tracer_ratios = points
        .windows(2)
        .map(|w| w[0].tracer_dev / w[1].tracer_dev)
        .collect();
    Ok(StabilityReport {
        p,
        t_end,
        points,
        gap_slope,
        tracer_ratios,
    })
}

fn tracer_deviation(a: &TracerSet, b: &TracerSet) -> f64 {
    let family = |xs: &[[f64; 2]], ys: &[[f64; 2]]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    };
    family(&a.pos_plus, &b.pos_plus).max(family(&a.pos_minus, &b.pos_minus))
}

/// Advance the screened and unscreened systems from the same data with
/// one shared fixed step; restart both with dt halved if either trips
/// the CFL guard. Returns final (state, tracers) per system.
fn run_locked_pair(
    pair: &ScalarPair,
    t_end: f64,
    labels: &[[f64; 2]],
) -> Result<((ScalarPair, TracerSet), (ScalarPair, TracerSet), f64, usize)> {
    use crate::grid::ModelVariant;
    let mut budget = {
        let mut a = Solver::new(pair.clone(), ModelVariant::RIGHT_SCREENED, 0.0, 0.0)?;
        let mut b = Solver::new(pair.clone(), ModelVariant::RIGHT_UNSCREENED, 0.0, 0.0)?;
        0.8 * a.cfl_dt().min(b.cfl_dt())
    };
    if !budget.is_finite() {
        budget = t_end;
    }
    'retry: loop {
        let steps = (t_end / budget).ceil().max(1.0) as usize;
        let dt = t_end / steps as f64;
        let mut a = Solver::new(pair.clone(), ModelVariant::RIGHT_SCREENED, 0.0, 0.0)?;
        let mut b = Solver::new(pair.clone(), ModelVariant::RIGHT_UNSCREENED, 0.0, 0.0)?;
        a.set_tracers(TracerSet::new(labels.to_vec()));
        b.set_tracers(TracerSet::new(labels.to_vec()));
        for _ in 0..steps {
            for solver in [&mut a, &mut b] {
                match solver.step_rk4(dt) {
                    Ok(()) => {}
                    Err(StepError::Cfl { .. }) => {
                        budget = dt / 2.0;
                        continue 'retry;
                    }
                    Err(StepError::NonFinite) => {
                        return Err(Error::Numeric(format!(
                            "stability pair produced non-finite values at t = {:.6}",
                            solver.state().time
                        )));
                    }
                }
            }
        }
        let ta = a.tracers().unwrap().clone();
        let tb = b.tracers().unwrap().clone();
        return Ok(((a.state().clone(), ta), (b.state().clone(), tb), dt, steps));
    }
}

// ---------------------------------------------------------------------
// vanishing-resistivity convergence order
// ---------------------------------------------------------------------

/// One ν of the inviscid sweep.
#[derive(Debug, Clone, Copy)]
pub struct ViscosityPoint {
    pub nu: f64,
    /// ‖σ^ν₊−σ₊‖_{L²} + ‖σ^ν₋−σ₋‖_{L²} against the ν = 0 run at t_end.
    pub gap_l2: f64,
    pub gap_l1: f64,
}

#[derive(Debug, Clone)]
pub struct InviscidReport {
    pub t_end: f64,
    pub points: Vec<ViscosityPoint>,
    /// Fitted log-log order of the L² gap in ν.
    pub order_l2: f64,
    pub order_l1: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Measure the convergence order of resistive runs toward the ideal
/// (ν = 0) run at t_end, all from the same smooth-merger data and with
/// one shared step size.
pub fn inviscid_order(spec: &SmoothMergerSpec, nus: &[f64], t_end: f64) -> Result<InviscidReport> {
    if nus.len() < 2 {
        return Err(Error::Config(format!(
            "inviscid sweep needs >= 2 nu values, got {}",
            nus.len()
        )));
    }
    if nus.iter().any(|&nu| !(nu > 0.0) || !nu.is_finite()) {
        return Err(Error::Config(
            "inviscid sweep nu values must be > 0 (the ν = 0 reference is implicit)".into(),
        ));
    }
    if !(t_end > 0.0) {
        return Err(Error::Config(format!(
            "inviscid sweep needs t_end > 0, got {t_end}"
        )));
    }
    let sc = right_smooth_merger(spec)?;
    let InitialData::Fields(pair) = &sc.init else {
        unreachable!("smooth presets carry gridded fields");
    };
    let variant = sc.variant;

    let mut order: Vec<f64> = nus.to_vec();
    order.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut budget = {
        let mut probe = Solver::new(pair.clone(), variant, 0.0, 0.0)?;
        0.8 * probe.cfl_dt()
    };
    if !budget.is_finite() {
        budget = t_end;
    }
    'retry: loop {
        let steps = (t_end / budget).ceil().max(1.0) as usize;
        let dt = t_end / steps as f64;
        let mut finals = Vec::with_capacity(order.len() + 1);
        for nu in std::iter::once(0.0).chain(order.iter().copied()) {
            let mut solver = Solver::new(pair.clone(), variant, nu, nu)?;
            for _ in 0..steps {
                match solver.step_rk4(dt) {
                    Ok(()) => {}
                    Err(StepError::Cfl { .. }) => {
                        budget = dt / 2.0;
                        continue 'retry;
                    }
                    Err(StepError::NonFinite) => {
                        return Err(Error::Numeric(format!(
                            "nu = {nu} run produced non-finite values at t = {:.6}",
                            solver.state().time
                        )));
                    }
                }
            }
            finals.push(solver.state().clone());
        }
        let reference = &finals[0];
        let mut points = Vec::with_capacity(order.len());
        for (k, &nu) in order.iter().enumerate() {
            let viscous = &finals[k + 1];
            let mut gap_l2 = 0.0;
            let mut gap_l1 = 0.0;
            for (a, b) in [
                (&viscous.plus, &reference.plus),
                (&viscous.minus, &reference.minus),
            ] {
                let mut diff = ScalarField::zeros(a.grid);
                for (slot, (x, y)) in
                    diff.values.iter_mut().zip(a.values.iter().zip(b.values.iter()))
                {
                    *slot = x - y;
                }
                gap_l2 += lp_norm_fractional(&diff, 2.0);
                gap_l1 += lp_norm_fractional(&diff, 1.0);
            }
            points.push(ViscosityPoint { nu, gap_l2, gap_l1 });
        }
        let xs: Vec<f64> = points.iter().map(|q| q.nu).collect();
        let order_l2 = log_log_slope(&xs, &points.iter().map(|q| q.gap_l2).collect::<Vec<_>>())?;
        let order_l1 = log_log_slope(&xs, &points.iter().map(|q| q.gap_l1).collect::<Vec<_>>())?;
        return Ok(InviscidReport {
            t_end,
            points,
            order_l2,
            order_l1,
            dt,
            steps,
        });
    }
}

/// Grid/shape preset the stability sweep is designed around: the bump
/// at the finest default scale ε = 1/16 still spans ≈ 20 cells, and the
/// centers (±2ε, ±2ε) are grid nodes for every default ε.
pub fn stability_sweep_spec() -> SmoothMergerSpec {
    SmoothMergerSpec {
        n: 512,
        box_size: 2.56,
        screening: Screening::Screened,
        ..SmoothMergerSpec::default()
    }
}
