//! Completeness radius of exponential systems `{e^{i lambda t}}` on `(-a, a)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::density::{upper_bm_bisection, upper_bm_density, DensityEstimate, DensityOptions};
use crate::error::{invalid, Error, Result};
use crate::sets::{DiscreteSet, PerturbMode};

pub const RIDGE: f64 = 1e-10;
pub const DEFAULT_TRIALS: usize = 16;
/// A residual at or below this counts as projected.
const COMPLETE_LEVEL: f64 = 1e-2;
const COMPLETE_RATIO: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectResult {
    pub a: f64,
    pub points: usize,
    pub trials: usize,
    /// Largest relative distance from a trial exponential to the span.
    pub residual: f64,
    /// Ridge added to the normal equations, relative to `2a`.
    pub ridge: f64,
}

fn kernel(a: f64, d: f64) -> f64 {
    if d.abs() < 1e-300 {
        2.0 * a
    } else {
        2.0 * libm::sin(a * d) / d
    }
}

/// Project the trial exponentials `e^{i beta m t}`, `beta = a/(2M)`, onto the
/// span of `e^{i lambda t}` over the `n` points of `set` nearest the origin.
pub fn completeness_defect_oracle(set: &DiscreteSet, a: f64, n: usize, trials: usize) -> Result<DefectResult> {
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    if trials == 0 || trials > 4096 {
        return Err(invalid("trials", "must be in 1..=4096"));
    }
    let pts = set.central(n);
    defect_for_points(&pts, a, trials)
}

pub fn defect_for_points(pts: &[f64], a: f64, trials: usize) -> Result<DefectResult> {
    let k = pts.len();
    let norm = 2.0 * a;
    if k == 0 {
        return Ok(DefectResult { a, points: 0, trials, residual: 1.0, ridge: RIDGE });
    }
    let gram = DMatrix::from_fn(k, k, |i, j| kernel(a, pts[i] - pts[j]) + if i == j { RIDGE * norm } else { 0.0 });
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::InternalConsistency(alloc::string::String::from("regularized Gram matrix not positive")))?;
    let beta = a / (2.0 * trials as f64);
    let mut worst = 0.0f64;
    for m in 0..trials {
        let t = beta * m as f64;
        let b = DVector::from_iterator(k, pts.iter().map(|p| kernel(a, p - t)));
        let x = chol.solve(&b);
        let proj = b.dot(&x);
        let r = libm::sqrt((1.0 - proj / norm).max(0.0));
        worst = worst.max(r);
    }
    Ok(DefectResult { a, points: k, trials, residual: worst, ridge: RIDGE })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectTrend {
    pub coarse: DefectResult,
    pub fine: DefectResult,
    pub complete: bool,
}

/// Complete when the residual at `n` points is small, or fell fivefold from `n/2`.
pub fn defect_trend(set: &DiscreteSet, a: f64, n: usize, trials: usize) -> Result<DefectTrend> {
    let fine = completeness_defect_oracle(set, a, n, trials)?;
    let coarse = completeness_defect_oracle(set, a, n / 2, trials)?;
    let complete = fine.points > 0
        && (fine.residual <= COMPLETE_LEVEL || fine.residual * COMPLETE_RATIO <= coarse.residual);
    Ok(DefectTrend { coarse, fine, complete })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusOptions {
    pub density: DensityOptions,
    pub window: usize,
    pub trials: usize,
    pub steps: usize,
    pub tolerance: f64,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        RadiusOptions { density: DensityOptions::default(), window: 256, trials: DEFAULT_TRIALS, steps: 12, tolerance: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusReport {
    /// `pi * D^BM`, with bracket.
    pub formula_route: DensityEstimate,
    pub defect_route: (f64, f64),
    pub defect_estimate: f64,
    pub relative_difference: f64,
    pub agreement: bool,
}

fn scaled(e: DensityEstimate, k: f64) -> DensityEstimate {
    DensityEstimate {
        estimate: e.estimate * k,
        bracket: (e.bracket.0 * k, e.bracket.1 * k),
        exact: e.exact.map(|x| x * k),
        ..e
    }
}

/// Bisection on `a` over the defect trend, capped at `pi/d + 1`.
pub fn defect_bisection(set: &DiscreteSet, opts: &RadiusOptions) -> Result<(f64, f64)> {
    if set.len() < 2 {
        return Ok((0.0, 0.0));
    }
    let d = set.separation()?;
    let (mut lo, mut hi) = (0.0, PI / d + 1.0);
    for _ in 0..opts.steps {
        let mid = 0.5 * (lo + hi);
        if defect_trend(set, mid, opts.window, opts.trials)?.complete {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Completeness radius by `pi * D^BM` and by the defect oracle.
pub fn radius_estimate(set: &DiscreteSet, opts: &RadiusOptions) -> Result<RadiusReport> {
    let formula_route = scaled(upper_bm_density(set, &opts.density)?, PI);
    let defect_route = if set.is_finite() { (0.0, 0.0) } else { defect_bisection(set, opts)? };
    let defect_estimate = 0.5 * (defect_route.0 + defect_route.1);
    let r = formula_route.estimate;
    let relative_difference = if r > 0.0 { (defect_estimate - r).abs() / r } else { defect_estimate };
    let slack = opts.tolerance * r;
    let agreement = r >= defect_route.0 - slack && r <= defect_route.1 + slack;
    Ok(RadiusReport { formula_route, defect_route, defect_estimate, relative_difference, agreement })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationCheck {
    pub baseline: f64,
    /// Width of the baseline formula-route bracket, in radius units.
    pub bracket_width: f64,
    pub radii: Vec<f64>,
    pub max_deviation: f64,
    pub within_bracket: bool,
}

/// Formula-route radius under `trials` perturbations with offsets uniform in `(-delta, delta)`.
pub fn perturbation_radius_check(
    set: &DiscreteSet,
    delta: f64,
    trials: usize,
    seed: u64,
    opts: &DensityOptions,
) -> Result<PerturbationCheck> {
    if !(delta >= 0.0) {
        return Err(invalid("delta", "must be nonnegative"));
    }
    if set.len() >= 2 {
        let limit = set.separation()? / 4.0;
        if delta >= limit {
            return Err(Error::PerturbationTooLarge { delta, limit });
        }
    }
    let base = upper_bm_bisection(set, opts)?;
    let baseline = PI * base.estimate;
    let bracket_width = PI * base.width();
    let mut radii = Vec::with_capacity(trials);
    for t in 0..trials {
        if delta == 0.0 {
            radii.push(baseline);
            continue;
        }
        let (p, _) = set.perturb(delta, PerturbMode::Uniform { seed: seed.wrapping_add(t as u64) })?;
        radii.push(PI * upper_bm_bisection(&p, opts)?.estimate);
    }
    let max_deviation = radii.iter().map(|r| (r - baseline).abs()).fold(0.0, f64::max);
    Ok(PerturbationCheck { baseline, bracket_width, radii, max_deviation, within_bracket: max_deviation <= bracket_width })
}
