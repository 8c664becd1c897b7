//! Upper and lower Beurling–Malliavin density estimates.
//!
//! Convergence of the defining integrals and series cannot be decided from a
//! truncation. Every verdict here comes from the slope of partial values
//! against `ln R` over the radii `R/8, R/4, R/2, R`: for lattice-type sets a
//! density mismatch `|a - D|` makes the partials grow like `2|a - D| ln R`,
//! while a matching `a` leaves them bounded.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::sets::DiscreteSet;
use crate::TOL;

/// Slope (per unit of `ln R`) at and above which partial values are called diverging.
pub const SLOPE_THRESHOLD: f64 = 0.05;
pub const BISECTION_STEPS: usize = 16;
pub const DEFAULT_RADIUS: f64 = 4096.0;
/// Brackets wider than this are flagged.
pub const WIDE_BRACKET: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl Verdict {
    fn from_slope(slope: f64, threshold: f64) -> Self {
        if slope >= threshold {
            Verdict::Diverging
        } else if slope < threshold / 2.0 {
            Verdict::Converging
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityDiagnostics {
    pub a: f64,
    /// `(R, ∫_{-R}^{R} |n(x) - a x| / (1 + x²) dx)`.
    pub partial_integrals: Vec<(f64, f64)>,
    pub slope: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RedhefferAssignment {
    pub a: f64,
    /// `(lambda_k, n_k)`, ascending in `lambda_k`.
    pub pairs: Vec<(f64, i64)>,
    /// `(R, sum over |lambda_k| <= R of |1/lambda_k - a/n_k|)`.
    pub partial_sums: Vec<(f64, f64)>,
    pub slope: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    FiniteSet,
    RedhefferBisection,
    ComplementIdentity,
    LatticeSnap,
    RegularSubsetBisection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub method: Method,
    /// Closed-form value for periodic generators.
    pub exact: Option<f64>,
    pub exact_in_bracket: Option<bool>,
    /// Bracket wider than [`WIDE_BRACKET`].
    pub wide: bool,
}

impl DensityEstimate {
    fn new(estimate: f64, bracket: (f64, f64), method: Method, exact: Option<f64>) -> Self {
        let exact_in_bracket = exact.map(|e| e >= bracket.0 - TOL && e <= bracket.1 + TOL);
        let wide = bracket.1 - bracket.0 > WIDE_BRACKET;
        DensityEstimate { estimate, bracket, method, exact, exact_in_bracket, wide }
    }

    fn finite() -> Self {
        Self::new(0.0, (0.0, 0.0), Method::FiniteSet, Some(0.0))
    }

    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOptions {
    pub radius: f64,
    pub steps: usize,
    pub threshold: f64,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions { radius: DEFAULT_RADIUS, steps: BISECTION_STEPS, threshold: SLOPE_THRESHOLD }
    }
}

fn checkpoints(radius: f64) -> [f64; 4] {
    [radius / 8.0, radius / 4.0, radius / 2.0, radius]
}

fn log_slope(partials: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = partials.iter().map(|(r, _)| libm::log(*r)).collect();
    let ys: Vec<f64> = partials.iter().map(|(_, v)| *v).collect();
    crate::numeric::fit_slope(&xs, &ys)
}

/// `∫_u^v |c - a t| / (1 + t²) dt` for `0 <= u <= v`, in closed form.
fn piece(c: f64, a: f64, u: f64, v: f64) -> f64 {
    if v <= u {
        return 0.0;
    }
    // ∫ (c - a t)/(1+t²) = c·atan t - (a/2)·ln(1+t²)
    let signed = |u: f64, v: f64| {
        let datan = libm::atan((v - u) / (1.0 + u * v));
        let dlog = libm::log1p((v - u) * (v + u) / (1.0 + u * u));
        c * datan - a / 2.0 * dlog
    };
    if a > 0.0 {
        let root = c / a;
        if root > u && root < v {
            return signed(u, root).abs() + signed(root, v).abs();
        }
    }
    signed(u, v).abs()
}

/// Integrate `|c(u) - a u|/(1+u²)` over `[0, X]` for each checkpoint `X`, where
/// `c(u)` counts the `breaks` below `u`.
fn side_integrals(breaks: &[f64], a: f64, marks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut total = 0.0;
    let mut u = 0.0;
    let mut count = 0usize;
    for &x in marks {
        while count < breaks.len() && breaks[count] <= x {
            total += piece(count as f64, a, u, breaks[count]);
            u = breaks[count];
            count += 1;
        }
        total += piece(count as f64, a, u, x);
        u = x;
        out.push(total);
    }
    out
}

fn regularity_partials(points: &[f64], a: f64, marks: &[f64]) -> Vec<f64> {
    let split = points.partition_point(|p| *p < 0.0);
    let pos = &points[split..];
    let neg: Vec<f64> = points[..split].iter().rev().map(|p| -p).collect();
    let p = side_integrals(pos, a, marks);
    let n = side_integrals(&neg, a, marks);
    p.iter().zip(&n).map(|(x, y)| x + y).collect()
}

fn working_set(set: &DiscreteSet, radius: f64) -> Result<DiscreteSet> {
    if set.is_finite() {
        return Ok(set.clone());
    }
    match set.extend(radius) {
        Ok(s) => Ok(s),
        Err(Error::OutsideTruncation { .. }) => set.extend(set.window_radius()),
        Err(e) => Err(e),
    }
}

fn effective_radius(set: &DiscreteSet, radius: f64) -> f64 {
    radius.min(set.window_radius())
}

/// Strong `a`-regularity integral of the counting function, computed exactly
/// piecewise, with partials at `R/8, R/4, R/2, R`.
pub fn regularity_integral(set: &DiscreteSet, a: f64, radius: f64) -> Result<RegularityDiagnostics> {
    regularity_integral_with(set, a, radius, SLOPE_THRESHOLD)
}

pub fn regularity_integral_with(
    set: &DiscreteSet,
    a: f64,
    radius: f64,
    threshold: f64,
) -> Result<RegularityDiagnostics> {
    if !(a >= 0.0) {
        return Err(invalid("a", "candidate density must be nonnegative"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    let set = if set.is_finite() { set.clone() } else { set.extend(radius)? };
    let marks = checkpoints(radius);
    let values = regularity_partials(set.points(), a, &marks);
    let partial_integrals: Vec<(f64, f64)> = marks.iter().copied().zip(values).collect();
    let slope = log_slope(&partial_integrals);
    Ok(RegularityDiagnostics { a, partial_integrals, slope, verdict: Verdict::from_slope(slope, threshold) })
}

/// Order-preserving injective assignment `n_k = round(a·lambda_k)`, with
/// collisions pushed outward and `0` excluded.
pub fn monotone_assignment(points: &[f64], a: f64) -> Vec<i64> {
    let split = points.partition_point(|p| *p < 0.0);
    let mut out = alloc::vec![0i64; points.len()];
    let mut prev = 0i64;
    for i in split..points.len() {
        let n = (libm::round(a * points[i]) as i64).max(prev + 1);
        out[i] = n;
        prev = n;
    }
    prev = 0;
    for i in (0..split).rev() {
        let n = (libm::round(a * points[i]) as i64).min(prev - 1);
        out[i] = n;
        prev = n;
    }
    out
}

fn redheffer_partials(points: &[f64], a: f64, marks: &[f64]) -> Vec<f64> {
    let assignment = monotone_assignment(points, a);
    let mut terms: Vec<(f64, f64)> = points
        .iter()
        .zip(&assignment)
        .map(|(l, n)| (l.abs(), (1.0 / l - a / *n as f64).abs()))
        .collect();
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::with_capacity(marks.len());
    let mut sum = 0.0;
    let mut i = 0;
    for &r in marks {
        while i < terms.len() && terms[i].0 <= r {
            sum += terms[i].1;
            i += 1;
        }
        out.push(sum);
    }
    out
}

/// Redheffer sum `sum |1/lambda_k - a/n_k|` under the monotone assignment.
pub fn redheffer_sum(set: &DiscreteSet, a: f64, radius: f64) -> Result<RedhefferAssignment> {
    redheffer_sum_with(set, a, radius, SLOPE_THRESHOLD)
}

pub fn redheffer_sum_with(set: &DiscreteSet, a: f64, radius: f64, threshold: f64) -> Result<RedhefferAssignment> {
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    let set = if set.is_finite() { set.clone() } else { set.extend(radius)? };
    if set.contains(0.0) {
        return Err(Error::ContainsZero);
    }
    let marks = checkpoints(radius);
    let assignment = monotone_assignment(set.points(), a);
    let values = redheffer_partials(set.points(), a, &marks);
    let partial_sums: Vec<(f64, f64)> = marks.iter().copied().zip(values).collect();
    let slope = log_slope(&partial_sums);
    Ok(RedhefferAssignment {
        a,
        pairs: set.points().iter().copied().zip(assignment).collect(),
        partial_sums,
        slope,
        verdict: Verdict::from_slope(slope, threshold),
    })
}

/// Shift a set off the origin by a fraction of its separation, if it contains 0.
fn avoid_zero(set: DiscreteSet) -> DiscreteSet {
    if !set.contains(0.0) {
        return set;
    }
    let d = set.separation().unwrap_or(1.0);
    set.translate(-core::f64::consts::FRAC_1_PI * d)
}

/// Infimum of the `a` whose Redheffer sums stay bounded, by bisection on the
/// slope verdict. The bracket is `[lo, hi + threshold/2]` plus a tenth of the
/// threshold for slack, since a slope of `threshold` is reached at `D - threshold/2`.
pub fn upper_bm_bisection(set: &DiscreteSet, opts: &DensityOptions) -> Result<DensityEstimate> {
    if set.is_finite() {
        return Ok(DensityEstimate::finite());
    }
    let work = working_set(set, opts.radius)?;
    let radius = effective_radius(&work, opts.radius);
    if work.len() < 2 {
        return Ok(DensityEstimate::new(0.0, (0.0, opts.threshold / 2.0), Method::RedhefferBisection, None));
    }
    let d = work.separation()?;
    let work = avoid_zero(work);
    let pts = work.points();
    let marks = checkpoints(radius.min(work.window_radius()));
    let diverging = |a: f64| {
        let partials: Vec<(f64, f64)> = marks.iter().copied().zip(redheffer_partials(pts, a, &marks)).collect();
        log_slope(&partials) >= opts.threshold
    };
    let (mut lo, mut hi) = (0.0, 1.0 / d + 0.5);
    if diverging(hi) {
        return Ok(DensityEstimate::new(hi, (hi, f64::INFINITY), Method::RedhefferBisection, None));
    }
    for _ in 0..opts.steps {
        let mid = 0.5 * (lo + hi);
        if diverging(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let half = opts.threshold / 2.0;
    Ok(DensityEstimate::new(hi + half, (lo, hi + half + opts.threshold / 10.0), Method::RedhefferBisection, None))
}

/// Upper Beurling–Malliavin density via the Redheffer characterization.
pub fn upper_bm_density(set: &DiscreteSet, opts: &DensityOptions) -> Result<DensityEstimate> {
    let mut est = upper_bm_bisection(set, opts)?;
    if let Some(exact) = set.exact_density() {
        est = DensityEstimate::new(est.estimate, est.bracket, est.method, Some(exact));
    }
    Ok(est)
}

/// Greedy subset tracking `a·x` from below: a point is taken when the running
/// count would stay within `a|x| + 1/2`.
pub fn regular_subset(set: &DiscreteSet, a: f64) -> DiscreteSet {
    let pts = set.points();
    let split = pts.partition_point(|p| *p < 0.0);
    let mut keep = Vec::new();
    let mut count = 0.0;
    for &l in pts[..split].iter().rev() {
        if count + 1.0 <= a * l.abs() + 0.5 {
            keep.push(l);
            count += 1.0;
        }
    }
    keep.reverse();
    count = 0.0;
    for &l in &pts[split..] {
        if count + 1.0 <= a * l + 0.5 {
            keep.push(l);
            count += 1.0;
        }
    }
    DiscreteSet::truncation(keep, set.window_radius().min(f64::MAX)).expect("subset of a separated set")
}

/// Supremum of the `a` for which the greedy subset is strongly `a`-regular.
pub fn witness_lower_density(set: &DiscreteSet, opts: &DensityOptions) -> Result<DensityEstimate> {
    if set.is_finite() {
        return Ok(DensityEstimate::new(0.0, (0.0, 0.0), Method::FiniteSet, Some(0.0)));
    }
    let work = working_set(set, opts.radius)?;
    let radius = effective_radius(&work, opts.radius);
    let exact = set.exact_density();
    if work.len() < 2 {
        return Ok(DensityEstimate::new(0.0, (0.0, opts.threshold / 2.0), Method::RegularSubsetBisection, exact));
    }
    let d = work.separation()?;
    let marks = checkpoints(radius);
    let diverging = |a: f64| {
        let sub = regular_subset(&work, a);
        let partials: Vec<(f64, f64)> =
            marks.iter().copied().zip(regularity_partials(sub.points(), a, &marks)).collect();
        log_slope(&partials) >= opts.threshold
    };
    let (mut lo, mut hi) = (0.0, 1.0 / d + 0.5);
    for _ in 0..opts.steps {
        let mid = 0.5 * (lo + hi);
        if diverging(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let half = opts.threshold / 2.0;
    let estimate = (lo - half).max(0.0);
    let bracket = ((lo - half - opts.threshold / 10.0).max(0.0), hi);
    Ok(DensityEstimate::new(estimate, bracket, Method::RegularSubsetBisection, exact))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerDensity {
    /// `1/alpha - D^BM(complement)`, after snapping to a lattice if needed.
    pub estimate: DensityEstimate,
    /// Direct search for a strongly regular subset.
    pub witness: DensityEstimate,
}

fn lower_via_complement(set: &DiscreteSet, alpha: f64, opts: &DensityOptions, method: Method) -> Result<DensityEstimate> {
    let complement = set.lattice_complement()?;
    let upper = upper_bm_bisection(&complement, opts)?;
    let inv = 1.0 / alpha;
    let bracket = ((inv - upper.bracket.1).max(0.0), inv - upper.bracket.0);
    Ok(DensityEstimate::new((inv - upper.estimate).max(0.0), bracket, method, None))
}

/// Lower Beurling–Malliavin density through lattice complementarity.
pub fn lower_bm_density(set: &DiscreteSet, opts: &DensityOptions) -> Result<LowerDensity> {
    if set.is_finite() {
        return Ok(LowerDensity { estimate: DensityEstimate::finite(), witness: DensityEstimate::finite() });
    }
    let work = working_set(set, opts.radius)?;
    let exact = set.exact_density();
    let mut estimate = match work.lattice_spacing() {
        Some(alpha) => lower_via_complement(&work, alpha, opts, Method::ComplementIdentity)?,
        None => {
            if work.len() < 2 {
                DensityEstimate::new(0.0, (0.0, 0.0), Method::LatticeSnap, None)
            } else {
                let delta = work.separation()? / 8.0;
                let alpha = delta / 4.0;
                let (snapped, _) = work.snap_to_lattice(delta, alpha)?;
                lower_via_complement(&snapped, alpha, opts, Method::LatticeSnap)?
            }
        }
    };
    if exact.is_some() {
        estimate = DensityEstimate::new(estimate.estimate, estimate.bracket, estimate.method, exact);
    }
    let witness = witness_lower_density(&work, opts)?;
    Ok(LowerDensity { estimate, witness })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplementarityReport {
    pub alpha: f64,
    /// Lower density of the set from the regular-subset witness.
    pub lower: DensityEstimate,
    /// Upper density of the complement in `alpha*Z` from Redheffer sums.
    pub upper_complement: DensityEstimate,
    /// `|lower + upper_complement - 1/alpha|`.
    pub residual: f64,
}

/// Residual of `D_BM(set) + D^BM(alpha*Z \ set) = 1/alpha` from two independent routes.
pub fn complementarity_check(set: &DiscreteSet, opts: &DensityOptions) -> Result<ComplementarityReport> {
    let alpha = set.lattice_spacing().ok_or(Error::NotLatticeSubset)?;
    let work = working_set(set, opts.radius)?;
    let lower = witness_lower_density(&work, opts)?;
    let complement = work.lattice_complement()?;
    let mut upper_complement = upper_bm_bisection(&complement, opts)?;
    if let Some(e) = complement.exact_density() {
        upper_complement =
            DensityEstimate::new(upper_complement.estimate, upper_complement.bracket, upper_complement.method, Some(e));
    }
    let residual = (lower.estimate + upper_complement.estimate - 1.0 / alpha).abs();
    Ok(ComplementarityReport { alpha, lower, upper_complement, residual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub upper: DensityEstimate,
    pub lower: DensityEstimate,
    pub lower_witness: DensityEstimate,
    /// Regularity diagnostics at the lower and upper estimates.
    pub diagnostics: Vec<RegularityDiagnostics>,
    pub one_sided: bool,
}

pub fn density_report(set: &DiscreteSet, opts: &DensityOptions) -> Result<DensityReport> {
    let upper = upper_bm_density(set, opts)?;
    let lower = lower_bm_density(set, opts)?;
    let radius = effective_radius(set, opts.radius);
    let radius = if radius.is_finite() { radius } else { opts.radius };
    let mut diagnostics = Vec::new();
    for a in [lower.estimate.estimate, upper.estimate] {
        diagnostics.push(regularity_integral_with(set, a, radius, opts.threshold)?);
    }
    Ok(DensityReport {
        upper,
        lower: lower.estimate,
        lower_witness: lower.witness,
        diagnostics,
        one_sided: set.is_one_sided(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Removal;
    use alloc::vec;
    use core::f64::consts::PI;

    /// Midpoint-rule quadrature of the regularity integrand, independent of the
    /// piecewise closed form.
    fn quadrature(set: &DiscreteSet, a: f64, radius: f64, per_unit: usize) -> f64 {
        let n = (2.0 * radius) as usize * per_unit;
        let h = 2.0 * radius / n as f64;
        (0..n)
            .map(|i| {
                let x = -radius + (i as f64 + 0.5) * h;
                let c = set.counting_function(x).unwrap() as f64;
                (c - a * x).abs() / (1.0 + x * x) * h
            })
            .sum()
    }

    #[test]
    fn regularity_matches_quadrature() {
        let z = DiscreteSet::lattice(1.0, 1000.0).unwrap();
        let diag = regularity_integral(&z, 1.0, 1000.0).unwrap();
        let value = diag.partial_integrals[3].1;
        let oracle = quadrature(&z, 1.0, 1000.0, 64);
        assert!((value - oracle).abs() < 1e-3, "{value} vs {oracle}");
        assert!((value - PI / 2.0).abs() < 0.05);
        assert_eq!(diag.verdict, Verdict::Converging);
        let s = DiscreteSet::explicit(vec![-2.5, -0.7, 0.0, 1.1, 3.0]).unwrap();
        for a in [0.0, 0.4, 1.3] {
            let v = regularity_integral(&s, a, 20.0).unwrap().partial_integrals[3].1;
            assert!((v - quadrature(&s, a, 20.0, 2000)).abs() < 1e-5);
        }
    }

    #[test]
    fn regularity_diverges_for_wrong_density() {
        let z = DiscreteSet::lattice(1.0, 1000.0).unwrap();
        let diag = regularity_integral(&z, 0.5, 1000.0).unwrap();
        assert_eq!(diag.verdict, Verdict::Diverging);
        // |n - x/2| ≈ |x|/2 on both sides: growth 2·(1/2)·ln R
        assert!((diag.slope - 1.0).abs() < 0.05, "slope {}", diag.slope);
        let w = diag.partial_integrals.windows(2).all(|w| w[1].1 >= w[0].1);
        assert!(w);
    }

    #[test]
    fn regularity_of_empty_set() {
        let e = DiscreteSet::explicit(vec![]).unwrap();
        let d = regularity_integral(&e, 0.0, 50.0).unwrap();
        assert_eq!(d.partial_integrals[3].1, 0.0);
        assert_eq!(d.verdict, Verdict::Converging);
        assert!(regularity_integral(&e, -1.0, 50.0).is_err());
    }

    #[test]
    fn redheffer_zero_identities() {
        let twoz = DiscreteSet::lattice_minus(2.0, Removal::Indices(vec![0]), 1000.0).unwrap();
        let r = redheffer_sum(&twoz, 0.5, 1000.0).unwrap();
        assert!(r.pairs.iter().all(|(l, n)| *n as f64 == l / 2.0));
        assert_eq!(r.partial_sums[3].1, 0.0);
        let z = DiscreteSet::lattice_minus(1.0, Removal::Indices(vec![0]), 500.0).unwrap();
        let r = redheffer_sum(&z, 1.0, 500.0).unwrap();
        assert_eq!(r.partial_sums[3].1, 0.0);
        for alpha in [0.25, 0.5, 3.0] {
            let s = DiscreteSet::lattice_minus(alpha, Removal::Indices(vec![0]), 300.0).unwrap();
            assert!(redheffer_sum(&s, 1.0 / alpha, 300.0).unwrap().partial_sums[3].1 < 1e-12);
        }
    }

    #[test]
    fn redheffer_diverges_below_density() {
        let twoz = DiscreteSet::lattice_minus(2.0, Removal::Indices(vec![0]), 1000.0).unwrap();
        let r = redheffer_sum(&twoz, 0.4, 1000.0).unwrap();
        assert_eq!(r.verdict, Verdict::Diverging);
        // direct summation: n_k = k is forced, each term is 0.1/k... per sign: |1/(2k) - 0.4/k| = 0.1/k
        let direct: f64 = (1..=500).map(|k| 2.0 * 0.1 / k as f64).sum();
        assert!((r.partial_sums[3].1 - direct).abs() < 1e-9);
        assert!((r.slope - 0.2).abs() < 0.01, "slope {}", r.slope);
    }

    #[test]
    fn redheffer_errors() {
        let z = DiscreteSet::lattice(1.0, 10.0).unwrap();
        assert_eq!(redheffer_sum(&z, 1.0, 10.0).unwrap_err(), Error::ContainsZero);
        let z = z.translate(0.5);
        assert!(redheffer_sum(&z, 0.0, 5.0).is_err());
    }

    #[test]
    fn lattice_upper_densities() {
        let opts = DensityOptions::default();
        for alpha in [0.5, 1.0, 2.0] {
            let s = DiscreteSet::lattice(alpha, 10.0).unwrap();
            let e = upper_bm_density(&s, &opts).unwrap();
            assert_eq!(e.exact, Some(1.0 / alpha));
            assert_eq!(e.exact_in_bracket, Some(true), "{alpha}: {:?}", e.bracket);
            assert!(e.width() <= 0.05);
        }
        let s = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus: 3, residues: vec![0] }, 10.0).unwrap();
        let e = upper_bm_density(&s, &opts).unwrap();
        assert_eq!(e.exact_in_bracket, Some(true), "{:?}", e.bracket);
        let f = DiscreteSet::explicit(vec![-1.0, 2.0, 5.0]).unwrap();
        assert_eq!(upper_bm_density(&f, &opts).unwrap().estimate, 0.0);
    }

    #[test]
    fn lower_densities() {
        let opts = DensityOptions::default();
        let twoz = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus: 2, residues: vec![1] }, 10.0).unwrap();
        let l = lower_bm_density(&twoz, &opts).unwrap();
        assert!((l.estimate.estimate - 0.5).abs() < 0.03, "{:?}", l.estimate);
        assert!((l.witness.estimate - 0.5).abs() < 0.03, "{:?}", l.witness);
        let z = DiscreteSet::lattice(1.0, 10.0).unwrap();
        let l = lower_bm_density(&z, &opts).unwrap();
        assert!((l.estimate.estimate - 1.0).abs() < 1e-12);
        let f = DiscreteSet::explicit(vec![0.0, 4.0]).unwrap();
        assert_eq!(lower_bm_density(&f, &opts).unwrap().estimate.estimate, 0.0);
    }

    #[test]
    fn lower_density_of_non_lattice_set_uses_snapping() {
        let opts = DensityOptions { radius: 1024.0, ..Default::default() };
        let base = DiscreteSet::lattice(1.0, 1024.0).unwrap();
        let (pert, _) = base.perturb(0.2, crate::sets::PerturbMode::Uniform { seed: 3 }).unwrap();
        let l = lower_bm_density(&pert, &opts).unwrap();
        assert_eq!(l.estimate.method, Method::LatticeSnap);
        assert!((l.estimate.estimate - 1.0).abs() < 0.05, "{:?}", l.estimate);
    }

    #[test]
    fn complementarity_examples() {
        let opts = DensityOptions::default();
        let z = DiscreteSet::lattice(1.0, 10.0).unwrap();
        let r = complementarity_check(&z, &opts).unwrap();
        assert!(r.residual <= 1e-3, "{r:?}");
        let s = DiscreteSet::lattice_minus(1.0, Removal::Residues { modulus: 3, residues: vec![0] }, 10.0).unwrap();
        let r = complementarity_check(&s, &opts).unwrap();
        assert!(r.residual <= 0.05, "{r:?}");
        assert!((r.lower.estimate - 2.0 / 3.0).abs() < 0.05);
        assert!((r.upper_complement.estimate - 1.0 / 3.0).abs() < 0.05);
        let e = DiscreteSet::explicit(vec![0.5, 1.5]).unwrap();
        assert_eq!(complementarity_check(&e, &opts).unwrap_err(), Error::NotLatticeSubset);
    }
}
