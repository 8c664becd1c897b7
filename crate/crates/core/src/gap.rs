//! Spectral gaps of atomic measures: transform scans, the Cauchy-transform
//! decay test, a Gram-matrix oracle, constructive gap measures on lattices and
//! the two bridges between gap measures and functions orthogonal to exponentials.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::density::{lower_bm_density, DensityEstimate, DensityOptions};
use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::measure::AtomicMeasure;
use crate::numeric::{geometric_grid, least_squares};
use crate::sets::{DiscreteSet, Generator};
use crate::TOL;

/// Transform size for coefficient computations.
pub const GRID: usize = 4096;
/// Scan sups at or below this multiple of the total variation count as vanishing.
pub const SCAN_ZERO: f64 = 1e-6;
/// Coefficients below this are dropped.
pub const COEFF_FLOOR: f64 = 1e-14;
pub const DEFAULT_Y_MAX: f64 = 64.0;
const Y_SAMPLES: usize = 80;
const Y_MIN: f64 = 2.0;
/// Cauchy samples below this multiple of the total variation are truncation noise.
const USABLE_FLOOR: f64 = 1e-11;
const MIN_USABLE: usize = 8;
const RATE_TOL: f64 = 0.05;
/// Gram eigenvalues below this multiple of `2a` count as near-null.
pub const NEAR_NULL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanResult {
    pub sup: f64,
    pub argmax: f64,
    pub samples: usize,
}

/// Largest scan step that resolves the transform of `mu`.
pub fn max_scan_step(mu: &AtomicMeasure) -> f64 {
    let m = mu.max_abs_support();
    if m > 0.0 {
        PI / (4.0 * m)
    } else {
        f64::INFINITY
    }
}

fn scan_grid(interval: (f64, f64), step: f64) -> impl Iterator<Item = f64> {
    let (l, r) = interval;
    let n = if r > l { libm::ceil((r - l) / step) as usize } else { 0 };
    (0..n).map(move |k| l + (k as f64 + 0.5) * step).filter(move |x| *x < r)
}

fn check_step(mu: &AtomicMeasure, step: f64) -> Result<()> {
    if !(step > 0.0) {
        return Err(invalid("grid_step", "must be positive"));
    }
    let max = max_scan_step(mu);
    if step > max {
        return Err(Error::StepTooLarge { step, max });
    }
    Ok(())
}

/// Sup of `|mu^(x)|` over a midpoint grid strictly inside `interval`.
pub fn ft_gap_scan(mu: &AtomicMeasure, interval: (f64, f64), step: f64) -> Result<ScanResult> {
    check_step(mu, step)?;
    let mut best = ScanResult { sup: 0.0, argmax: interval.0, samples: 0 };
    for x in scan_grid(interval, step) {
        let v = mu.fourier(x).norm();
        best.samples += 1;
        if v > best.sup {
            best.sup = v;
            best.argmax = x;
        }
    }
    Ok(best)
}

/// `(x, |mu^(x)|)` on the scan grid.
pub fn ft_scan_series(mu: &AtomicMeasure, interval: (f64, f64), step: f64) -> Result<Vec<(f64, f64)>> {
    check_step(mu, step)?;
    Ok(scan_grid(interval, step).map(|x| (x, mu.fourier(x).norm())).collect())
}

/// Whether the scan over `(-a, a)` stays below [`SCAN_ZERO`] relative to the total variation.
pub fn scan_shows_gap(mu: &AtomicMeasure, a: f64) -> Result<bool> {
    if mu.is_zero() {
        return Ok(true);
    }
    let step = max_scan_step(mu).min(a / 64.0);
    let r = ft_gap_scan(mu, (-a, a), step)?;
    Ok(r.sup <= SCAN_ZERO * mu.total_variation())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayVerdict {
    Decaying,
    NonDecaying,
    Inconclusive,
}

/// Fit of `ln|K(iy)| = -rate*y - power*ln y + C + D/y` on one imaginary half-axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideFit {
    pub rate: f64,
    pub power: f64,
    pub usable: usize,
    pub verdict: DecayVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyDecayTrace {
    pub b: f64,
    /// `(y, e^{b|y|} |K(iy)|)`: positive `y` ascending, then negative `y` with `|y|` ascending.
    pub samples: Vec<(f64, f64)>,
    pub upper: Option<SideFit>,
    pub lower: Option<SideFit>,
    pub verdict: DecayVerdict,
    /// The measure was zero.
    pub trivial: bool,
}

fn side_fit(mu: &AtomicMeasure, b: f64, ys: &[f64], sign: f64, samples: &mut Vec<(f64, f64)>) -> Option<SideFit> {
    let floor = USABLE_FLOOR * mu.total_variation();
    let mut y_used = Vec::new();
    let mut logk = Vec::new();
    for &y in ys {
        let k = mu.cauchy_unchecked(Complex64::new(0.0, sign * y)).norm();
        samples.push((sign * y, libm::exp(b * y) * k));
        if k > floor {
            y_used.push(y);
            logk.push(libm::log(k));
        }
    }
    if y_used.len() < MIN_USABLE {
        return None;
    }
    let cols = vec![
        y_used.iter().map(|y| -y).collect::<Vec<_>>(),
        y_used.iter().map(|y| -libm::log(*y)).collect(),
        vec![1.0; y_used.len()],
        y_used.iter().map(|y| 1.0 / y).collect(),
    ];
    let sol = least_squares(&cols, &logk)?;
    let (rate, power) = (sol[0], sol[1]);
    let excess = b - rate;
    let verdict = if excess < -RATE_TOL || (excess.abs() <= RATE_TOL && power > 0.5) {
        DecayVerdict::Decaying
    } else if excess > RATE_TOL {
        DecayVerdict::NonDecaying
    } else {
        DecayVerdict::Inconclusive
    };
    Some(SideFit { rate, power, usable: y_used.len(), verdict })
}

/// Decide whether `e^{b|y|} K_mu(iy)` tends to zero along both imaginary half-axes.
///
/// A finite measure only has approximate gaps, so the trace itself turns up
/// once `|K|` reaches the truncation floor. The verdict instead compares `b`
/// with the exponential rate fitted to `|K(iy)|` above that floor.
pub fn cauchy_gap_test(mu: &AtomicMeasure, b: f64, y_max: f64) -> Result<CauchyDecayTrace> {
    if !(b >= 0.0) {
        return Err(invalid("b", "must be nonnegative"));
    }
    if !(y_max > Y_MIN) {
        return Err(invalid("y_max", "must exceed 2"));
    }
    if b * y_max > 700.0 {
        return Err(invalid("y_max", "b*y_max overflows the trace"));
    }
    let ys = geometric_grid(Y_MIN, y_max, Y_SAMPLES);
    let mut samples = Vec::with_capacity(2 * ys.len());
    if mu.is_zero() {
        samples.extend(ys.iter().map(|y| (*y, 0.0)));
        samples.extend(ys.iter().map(|y| (-*y, 0.0)));
        return Ok(CauchyDecayTrace {
            b,
            samples,
            upper: None,
            lower: None,
            verdict: DecayVerdict::Decaying,
            trivial: true,
        });
    }
    let upper = side_fit(mu, b, &ys, 1.0, &mut samples);
    let lower = side_fit(mu, b, &ys, -1.0, &mut samples);
    let verdicts = [upper.map(|f| f.verdict), lower.map(|f| f.verdict)];
    let verdict = if verdicts.contains(&Some(DecayVerdict::NonDecaying)) {
        DecayVerdict::NonDecaying
    } else if verdicts.iter().all(|v| *v == Some(DecayVerdict::Decaying)) {
        DecayVerdict::Decaying
    } else {
        DecayVerdict::Inconclusive
    };
    Ok(CauchyDecayTrace { b, samples, upper, lower, verdict, trivial: false })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramSpectrum {
    pub a: f64,
    pub points: usize,
    pub lambda_min: f64,
    /// Eigenvalues below `NEAR_NULL * 2a`.
    pub near_null: usize,
}

fn sinc_kernel(a: f64, d: f64) -> f64 {
    if d.abs() < 1e-300 {
        2.0 * a
    } else {
        2.0 * libm::sin(a * d) / d
    }
}

/// Spectrum of `G_kl = ∫_{-a}^{a} e^{i(λ_k-λ_l)x} dx` for explicit points.
pub fn gram_spectrum(points: &[f64], a: f64) -> Result<GramSpectrum> {
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    let n = points.len();
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    let g = DMatrix::from_fn(n, n, |k, l| sinc_kernel(a, points[k] - points[l]));
    let eig = SymmetricEigen::new(g).eigenvalues;
    let lambda_min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let near_null = eig.iter().filter(|e| **e < NEAR_NULL * 2.0 * a).count();
    Ok(GramSpectrum { a, points: n, lambda_min, near_null })
}

/// Gram spectrum over the `n` points of `set` nearest the origin.
pub fn gram_gap_oracle(set: &DiscreteSet, a: f64, n: usize) -> Result<GramSpectrum> {
    if n < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: n });
    }
    gram_spectrum(&set.central(n), a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramTrend {
    pub coarse: GramSpectrum,
    pub fine: GramSpectrum,
    /// Near-null count grew by at least `max(2, n/64)` from `n/2` to `n` points.
    pub feasible: bool,
}

/// Compare the near-null eigenvalue counts at `n/2` and `n` points. A gap of
/// half-length `a` is feasible when the count keeps growing with the window.
pub fn gram_trend(set: &DiscreteSet, a: f64, n: usize) -> Result<GramTrend> {
    let fine = gram_gap_oracle(set, a, n)?;
    let coarse = gram_gap_oracle(set, a, (n / 2).max(4))?;
    let need = core::cmp::max(2, n / 64);
    let feasible = fine.near_null >= coarse.near_null + need;
    Ok(GramTrend { coarse, fine, feasible })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapOptions {
    pub density: DensityOptions,
    pub window: usize,
    pub steps: usize,
    /// Relative tolerance for the agreement flag.
    pub tolerance: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions { density: DensityOptions::default(), window: 256, steps: 12, tolerance: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub measure: AtomicMeasure,
    pub gap: f64,
    /// Scan sup over `(-gap, gap)` relative to the total variation.
    pub scan_sup: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// `pi * D_BM`, with bracket.
    pub density_route: DensityEstimate,
    /// Bisection bracket from the Gram trend.
    pub oracle_route: (f64, f64),
    pub oracle_estimate: f64,
    pub relative_difference: f64,
    /// The oracle bracket, widened by `tolerance * density_route`, contains the density route.
    pub agreement: bool,
    pub witness: Option<Witness>,
}

/// Bisection on `a` over the Gram trend verdict.
pub fn gram_bisection(set: &DiscreteSet, window: usize, steps: usize) -> Result<(f64, f64)> {
    if set.is_finite() && set.len() < window {
        return Ok((0.0, 0.0));
    }
    let d = set.separation()?;
    let (mut lo, mut hi) = (0.0, PI / d + 1.0);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if gram_trend(set, mid, window)?.feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

fn scale_estimate(e: DensityEstimate, k: f64) -> DensityEstimate {
    DensityEstimate {
        estimate: e.estimate * k,
        bracket: (e.bracket.0 * k, e.bracket.1 * k),
        exact: e.exact.map(|x| x * k),
        ..e
    }
}

/// Gap characteristic by the density formula and by the Gram oracle.
pub fn gap_characteristic_estimate(set: &DiscreteSet, opts: &GapOptions) -> Result<GapReport> {
    let density_route = scale_estimate(lower_bm_density(set, &opts.density)?.estimate, PI);
    let oracle_route = gram_bisection(set, opts.window, opts.steps)?;
    let oracle_estimate = 0.5 * (oracle_route.0 + oracle_route.1);
    let r1 = density_route.estimate;
    let relative_difference = if r1 > 0.0 { (oracle_estimate - r1).abs() / r1 } else { oracle_estimate };
    let slack = opts.tolerance * r1;
    let agreement = r1 >= oracle_route.0 - slack && r1 <= oracle_route.1 + slack;
    let witness = match set.generator() {
        Generator::Lattice { alpha } => {
            let gap = 0.8 * PI / alpha;
            let measure = build_gap_measure(set, gap, 4)?;
            let step = max_scan_step(&measure);
            let scan = ft_gap_scan(&measure, (-gap, gap), step)?;
            Some(Witness { scan_sup: scan.sup / measure.total_variation(), measure, gap })
        }
        _ => None,
    };
    Ok(GapReport { density_route, oracle_route, oracle_estimate, relative_difference, agreement, witness })
}

/// Normalize to total variation 1 and drop coefficients below [`COEFF_FLOOR`].
fn coefficients_to_measure(pairs: impl Iterator<Item = (f64, Complex64)>) -> Result<AtomicMeasure> {
    let all: Vec<(f64, Complex64)> = pairs.collect();
    let tv: f64 = all.iter().map(|(_, c)| c.norm()).sum();
    if !(tv > 0.0) {
        return Err(Error::TrivialMeasure);
    }
    AtomicMeasure::from_pairs(all.into_iter().map(|(x, c)| (x, c / tv)).filter(|(_, c)| c.norm() >= COEFF_FLOOR))
}

/// Gap measure on a full lattice `alpha*Z` whose transform vanishes on `(-a, a)`.
///
/// The transform is a `C^{m-1}` polynomial bump `(s(1-s))^m` on the complementary
/// arc of the period `2pi/alpha`; its coefficients, from a 4096-point transform,
/// are the weights at `alpha*n`.
pub fn build_gap_measure(set: &DiscreteSet, a: f64, m: u32) -> Result<AtomicMeasure> {
    let alpha = match set.generator() {
        Generator::Lattice { alpha } => *alpha,
        _ => return Err(Error::NotFullLattice),
    };
    let bound = PI / alpha;
    if a >= bound {
        return Err(Error::GapExceedsLatticeBound { gap: a, bound });
    }
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    if m == 0 {
        return Err(invalid("m", "smoothness order must be at least 1"));
    }
    let period = 2.0 * bound;
    let arc = period - 2.0 * a;
    let mut data: Vec<Complex64> = (0..GRID)
        .map(|j| {
            let s = (j as f64 * period / GRID as f64 - a) / arc;
            if s > 0.0 && s < 1.0 {
                Complex64::new(libm::pow(s * (1.0 - s), m as f64), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft::forward(&mut data);
    coefficients_to_measure(
        data.into_iter().enumerate().map(|(k, c)| (alpha * fft::signed_frequency(k, GRID) as f64, c)),
    )
}

/// Function samples at `t_j = 2*pi*j/4096` on `[0, 2*pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicSamples {
    pub values: Vec<Complex64>,
}

impl PeriodicSamples {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() != GRID {
            return Err(invalid("samples", "expected 4096 values"));
        }
        Ok(PeriodicSamples { values })
    }

    pub fn from_fn(f: impl Fn(f64) -> Complex64) -> Self {
        PeriodicSamples { values: (0..GRID).map(|j| f(grid_point(j))).collect() }
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(j, v)| (grid_point(j), *v))
    }

    /// Coefficients `c_n` with `f(t) = sum c_n e^{int}`, indexed by signed frequency.
    pub fn coefficients(&self) -> Vec<(i64, Complex64)> {
        let mut data = self.values.clone();
        fft::forward(&mut data);
        let scale = 1.0 / GRID as f64;
        data.into_iter().enumerate().map(|(k, c)| (fft::signed_frequency(k, GRID), c * scale)).collect()
    }
}

fn grid_point(j: usize) -> f64 {
    2.0 * PI * j as f64 / GRID as f64
}

/// The integer frequencies resolved by the grid.
pub fn window_integers() -> core::ops::Range<i64> {
    -(GRID as i64 / 2)..GRID as i64 / 2
}

fn exp_bump(s: f64) -> f64 {
    if s > 0.0 && s < 1.0 {
        libm::exp(-1.0 / (s * (1.0 - s)))
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardBridge {
    pub measure: AtomicMeasure,
    /// The transform vanishes on this arc of `[0, 2*pi)` (modulo `2*pi`).
    pub gap: (f64, f64),
    /// Largest orthogonality residual of the input against `Gamma`.
    pub orthogonality_residual: f64,
    /// Largest coefficient on `Gamma` after smoothing, relative to the largest coefficient.
    pub gamma_residual: f64,
    pub certificate: CauchyDecayTrace,
    pub scan_sup: f64,
}

/// From a function supported on the arc `(start, start + 2a)` and orthogonal
/// to `e^{i gamma t}` for `gamma` in `Gamma`, build a measure on `Z \ Gamma`
/// whose transform vanishes on the remaining arc, shortened by `eps`.
pub fn bridge_measure_from_function(
    gamma: &[i64],
    f: &PeriodicSamples,
    start: f64,
    a: f64,
    eps: f64,
) -> Result<ForwardBridge> {
    if !(a > 0.0) || !(eps > 0.0) {
        return Err(invalid("a/eps", "must be positive"));
    }
    if 2.0 * a + eps >= 2.0 * PI {
        return Err(invalid("eps", "2a + eps must stay below 2*pi"));
    }
    let coeffs = f.coefficients();
    let max = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::TrivialMeasure);
    }
    let at = |n: i64| coeffs[n.rem_euclid(GRID as i64) as usize].1;
    let mut worst = (0i64, 0.0f64);
    for &g in gamma.iter().filter(|g| window_integers().contains(g)) {
        let r = at(g).norm() / max;
        if r > worst.1 {
            worst = (g, r);
        }
    }
    if worst.1 >= 1e-8 {
        return Err(Error::OrthogonalityResidual { gamma: worst.0, residual: worst.1 });
    }
    let h = PeriodicSamples::from_fn(|t| {
        let s = ((t - start).rem_euclid(2.0 * PI) - 2.0 * a) / eps;
        Complex64::new(exp_bump(s), 0.0)
    });
    let hc = h.coefficients();
    // h sits right after the support of f, so g = f*h has the phase of
    // both; the rotation below moves h back to [0, eps].
    let shift = start + 2.0 * a;
    let h0 = hc[0].1 * Complex64::from_polar(1.0, 0.0);
    let smoothed: Vec<(i64, Complex64)> = coeffs
        .iter()
        .zip(&hc)
        .map(|((n, c), (_, hn))| {
            let rot = Complex64::from_polar(1.0, *n as f64 * shift);
            (*n, c * hn * rot / h0)
        })
        .collect();
    let gmax = smoothed.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let mut gamma_residual = 0.0f64;
    for &g in gamma.iter().filter(|g| window_integers().contains(g)) {
        gamma_residual = gamma_residual.max(smoothed[g.rem_euclid(GRID as i64) as usize].1.norm() / gmax);
    }
    if gamma_residual >= 1e-6 {
        return Err(Error::GapCertificateFailed(alloc::format!(
            "coefficients on Gamma reach {gamma_residual:e}"
        )));
    }
    let measure = coefficients_to_measure(
        smoothed.into_iter().filter(|(n, _)| gamma.binary_search(n).is_err()).map(|(n, c)| (n as f64, c)),
    )?;
    let lo = start + 2.0 * a + eps;
    let hi = start + 2.0 * PI;
    let half = (hi - lo) / 2.0;
    let centred = measure.modulate(lo + half);
    let certificate = cauchy_gap_test(&centred, (half - 0.1).max(0.0), DEFAULT_Y_MAX)?;
    if certificate.verdict != DecayVerdict::Decaying {
        return Err(Error::GapCertificateFailed(alloc::format!("gap of half-length {half} not certified")));
    }
    let step = max_scan_step(&centred).min(half / 64.0);
    let scan_sup = ft_gap_scan(&centred, (-half, half), step)?.sup / measure.total_variation();
    Ok(ForwardBridge { measure, gap: (lo, hi), orthogonality_residual: worst.1, gamma_residual, certificate, scan_sup })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackwardBridge {
    pub samples: PeriodicSamples,
    /// Window integers outside `Lambda`.
    pub gamma: Vec<i64>,
    /// Largest `|<g, e^{i gamma t}>|` over `Gamma`, relative to the largest coefficient.
    pub max_residual: f64,
    pub certificate: CauchyDecayTrace,
}

/// Sample the transform of a measure on `Lambda ⊂ Z` with a gap on `(0, 2a)`
/// and check that it is orthogonal to the exponentials missing from `Lambda`.
pub fn bridge_function_from_measure(mu: &AtomicMeasure, lambda: &DiscreteSet, a: f64) -> Result<BackwardBridge> {
    if mu.is_zero() {
        return Err(Error::TrivialMeasure);
    }
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    let half = (GRID / 2) as f64;
    let lambda = if lambda.is_finite() { lambda.clone() } else { lambda.extend(half)? };
    for atom in mu.atoms() {
        let n = libm::round(atom.support);
        if (atom.support - n).abs() > TOL || !window_integers().contains(&(n as i64)) || !lambda.contains(n) {
            return Err(Error::SupportMismatch(atom.support));
        }
    }
    let certificate = cauchy_gap_test(&mu.modulate(a), 0.9 * a, DEFAULT_Y_MAX)?;
    if certificate.verdict != DecayVerdict::Decaying {
        return Err(Error::GapCertificateFailed(alloc::format!("no gap on (0, {})", 2.0 * a)));
    }
    let samples = PeriodicSamples::from_fn(|t| mu.fourier(t));
    let coeffs = samples.coefficients();
    let max = coeffs.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let gamma: Vec<i64> = window_integers().filter(|n| !lambda.contains(*n as f64)).collect();
    let max_residual = gamma
        .iter()
        .map(|g| coeffs[g.rem_euclid(GRID as i64) as usize].1.norm() / max)
        .fold(0.0, f64::max);
    Ok(BackwardBridge { samples, gamma, max_residual, certificate })
}

/// The set with one more point.
pub fn insert_point(set: &DiscreteSet, x: f64) -> Result<DiscreteSet> {
    if set.contains(x) {
        return Err(Error::PointAlreadyPresent(x));
    }
    let mut points = set.points().to_vec();
    points.push(x);
    DiscreteSet::truncation(points, set.window_radius().max(x.abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TamedMeasure {
    pub measure: AtomicMeasure,
    /// Declared gap minus `eps`.
    pub certified_gap: f64,
}

/// `(sin(eps t/m) / (eps t/m))^m`: spectrum in `[-eps, eps]`, decay `|t|^{-m}`.
pub fn taming_factor(t: f64, eps: f64, m: u32) -> f64 {
    let u = eps * t / m as f64;
    let s = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { libm::sin(u) / u };
    libm::pow(s, m as f64)
}

/// Multiply weights by [`taming_factor`], trading `eps` of gap for `|t|^{-m}` decay.
pub fn tame_coefficients(mu: &AtomicMeasure, declared_gap: f64, eps: f64, m: u32) -> Result<TamedMeasure> {
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if eps >= declared_gap {
        return Err(invalid("eps", "must be smaller than the declared gap"));
    }
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    let measure = mu.map_weights(|at| at.weight * taming_factor(at.support, eps, m)).filter(|at| at.weight.norm() > 0.0);
    Ok(TamedMeasure { measure, certified_gap: declared_gap - eps })
}

/// Exponent `p` in `|c_lambda| <= C |lambda|^{-p}`, fitted to the largest
/// weight in each dyadic shell `2^k <= |lambda| < 2^{k+1}`.
pub fn decay_exponent(mu: &AtomicMeasure) -> Result<f64> {
    let mut shells: Vec<(i32, f64)> = Vec::new();
    for at in mu.atoms() {
        let s = at.support.abs();
        if s < 1.0 {
            continue;
        }
        let k = libm::floor(libm::log2(s)) as i32;
        let w = at.weight.norm();
        match shells.iter_mut().find(|(j, _)| *j == k) {
            Some(e) => e.1 = e.1.max(w),
            None => shells.push((k, w)),
        }
    }
    shells.retain(|(_, w)| *w > 0.0);
    if shells.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: shells.len() });
    }
    let xs: Vec<f64> = shells.iter().map(|(k, _)| *k as f64).collect();
    let ys: Vec<f64> = shells.iter().map(|(_, w)| libm::log2(*w)).collect();
    Ok(-crate::numeric::fit_slope(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Removal;

    fn z_witness() -> AtomicMeasure {
        build_gap_measure(&DiscreteSet::lattice(1.0, 10.0).unwrap(), 2.0, 4).unwrap()
    }

    /// Fourier coefficients of the bump by direct Riemann summation.
    fn direct_coefficient(alpha: f64, a: f64, m: u32, n: i64) -> Complex64 {
        let period = 2.0 * PI / alpha;
        let arc = period - 2.0 * a;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..GRID {
            let x = j as f64 * period / GRID as f64;
            let s = (x - a) / arc;
            if s > 0.0 && s < 1.0 {
                acc += Complex64::from_polar(libm::pow(s * (1.0 - s), m as f64), -alpha * n as f64 * x);
            }
        }
        acc / GRID as f64
    }

    #[test]
    fn witness_matches_direct_coefficients() {
        let alpha = 2.0;
        let set = DiscreteSet::lattice(alpha, 10.0).unwrap();
        let mu = build_gap_measure(&set, 1.2, 4).unwrap();
        let raw: Vec<Complex64> = (-3..=3).map(|n| direct_coefficient(alpha, 1.2, 4, n)).collect();
        let w0 = mu.weight_at(0.0).unwrap();
        let scale = raw[3] / w0;
        for (i, n) in (-3i64..=3).enumerate() {
            let w = mu.weight_at(alpha * n as f64).unwrap();
            assert!((w * scale - raw[i]).norm() < 1e-12 * raw[3].norm());
        }
    }

    #[test]
    fn witness_on_integers_has_gap() {
        let mu = z_witness();
        assert!(mu.total_variation() <= 1.0 && mu.total_variation() > 1.0 - 1e-9);
        let r = ft_gap_scan(&mu, (-1.9, 1.9), max_scan_step(&mu)).unwrap();
        assert!(r.sup < 1e-6, "{r:?}");
        let outside = ft_gap_scan(&mu, (2.5, 3.5), max_scan_step(&mu)).unwrap();
        assert!(outside.sup > 1e-3);
        let t = cauchy_gap_test(&mu, 1.5, DEFAULT_Y_MAX).unwrap();
        assert_eq!(t.verdict, DecayVerdict::Decaying);
        let rate = t.upper.unwrap().rate;
        assert!(rate > 1.9 && rate < 2.5, "{rate}");
    }

    #[test]
    fn witness_on_even_integers() {
        let set = DiscreteSet::lattice(2.0, 10.0).unwrap();
        let mu = build_gap_measure(&set, 1.2, 4).unwrap();
        assert!(mu.atoms().iter().all(|a| (a.support / 2.0).fract() == 0.0));
        assert!(ft_gap_scan(&mu, (-1.1, 1.1), max_scan_step(&mu)).unwrap().sup < 1e-6);
        let z = DiscreteSet::lattice(1.0, 10.0).unwrap();
        assert!(matches!(build_gap_measure(&z, 3.5, 4), Err(Error::GapExceedsLatticeBound { .. })));
        let thin = DiscreteSet::lattice_minus(1.0, Removal::Indices(vec![0]), 10.0).unwrap();
        assert_eq!(build_gap_measure(&thin, 1.0, 4).unwrap_err(), Error::NotFullLattice);
    }

    #[test]
    fn scan_examples() {
        let d1 = AtomicMeasure::dirac(1.0);
        let r = ft_gap_scan(&d1, (-1.0, 1.0), 0.01).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-15);
        assert_eq!(ft_gap_scan(&AtomicMeasure::zero(), (-1.0, 1.0), 0.1).unwrap().sup, 0.0);
        assert!(matches!(ft_gap_scan(&d1, (-1.0, 1.0), 1.0), Err(Error::StepTooLarge { .. })));
        let grid = ft_scan_series(&d1, (0.0, 1.0), 0.25).unwrap();
        assert_eq!(grid.len(), 4);
        assert!(grid.iter().all(|(x, _)| *x > 0.0 && *x < 1.0));
    }

    #[test]
    fn cauchy_examples() {
        let d1 = AtomicMeasure::dirac(1.0);
        assert_eq!(cauchy_gap_test(&d1, 0.5, 64.0).unwrap().verdict, DecayVerdict::NonDecaying);
        assert_eq!(cauchy_gap_test(&d1, 0.0, 64.0).unwrap().verdict, DecayVerdict::Decaying);
        assert_eq!(cauchy_gap_test(&z_witness(), 0.0, 64.0).unwrap().verdict, DecayVerdict::Decaying);
        let z = cauchy_gap_test(&AtomicMeasure::zero(), 3.0, 64.0).unwrap();
        assert!(z.trivial);
        assert_eq!(z.verdict, DecayVerdict::Decaying);
        let t = cauchy_gap_test(&z_witness(), 2.5, 64.0).unwrap();
        assert_eq!(t.verdict, DecayVerdict::NonDecaying);
        assert!(t.samples.iter().all(|(_, v)| v.is_finite()));
        assert!(cauchy_gap_test(&d1, -1.0, 64.0).is_err());
    }

    #[test]
    fn gram_translation_invariance_and_small_a() {
        let z = DiscreteSet::lattice(1.0, 40.0).unwrap();
        let pts = z.central(32);
        let shifted: Vec<f64> = pts.iter().map(|p| p - 0.37).collect();
        let a = gram_spectrum(&pts, 1.3).unwrap();
        let b = gram_spectrum(&shifted, 1.3).unwrap();
        assert!((a.lambda_min - b.lambda_min).abs() < 1e-12);
        for a in [1e-3, 1e-2] {
            assert!(gram_spectrum(&pts, a).unwrap().lambda_min <= 2.0 * a);
        }
        assert!(matches!(gram_spectrum(&pts[..3], 1.0), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn gram_trend_on_integers() {
        let z = DiscreteSet::lattice(1.0, 200.0).unwrap();
        assert!(gram_trend(&z, 0.8 * PI, 256).unwrap().feasible);
        assert!(!gram_trend(&z, 1.2 * PI, 256).unwrap().feasible);
    }

    #[test]
    fn insertion_never_raises_lambda_min() {
        let pts: Vec<f64> = (-10..10).map(|n| n as f64 + 0.5).collect();
        let base = gram_spectrum(&pts, 2.0).unwrap();
        let mut more = pts.clone();
        more.push(0.1);
        more.sort_by(f64::total_cmp);
        assert!(gram_spectrum(&more, 2.0).unwrap().lambda_min <= base.lambda_min + 1e-12);
        let set = DiscreteSet::explicit(pts).unwrap();
        assert!(insert_point(&set, 0.5).is_err());
        assert_eq!(insert_point(&set, 0.1).unwrap().len(), 21);
    }

    #[test]
    fn taming() {
        let mu = z_witness();
        let t = tame_coefficients(&mu, 2.0, 0.5, 2).unwrap();
        assert_eq!(t.certified_gap, 1.5);
        assert_eq!(t.measure.weight_at(0.0), mu.weight_at(0.0));
        assert!(decay_exponent(&t.measure).unwrap() >= 1.9);
        let s = ft_gap_scan(&t.measure, (-1.45, 1.45), max_scan_step(&t.measure)).unwrap();
        assert!(s.sup < 1e-5 * t.measure.total_variation());
        assert!(tame_coefficients(&mu, 2.0, 2.0, 2).is_err());
        assert!(tame_coefficients(&mu, 2.0, 0.5, 0).is_err());
        // sinc^2 envelope alone: exponent 2
        let flat = AtomicMeasure::from_pairs((8..4000).map(|n| (n as f64 + 0.5, Complex64::new(1.0, 0.0)))).unwrap();
        let p = decay_exponent(&tame_coefficients(&flat, 1.0, 0.5, 2).unwrap().measure).unwrap();
        assert!((p - 2.0).abs() < 0.2, "{p}");
    }

    #[test]
    fn bridges_close_the_loop() {
        let even = DiscreteSet::lattice(2.0, 10.0).unwrap();
        let mu0 = build_gap_measure(&even, 1.2, 4).unwrap();
        let mu1 = mu0.modulate(-1.2).filter(|a| a.support.abs() < 2048.0);
        let back = bridge_function_from_measure(&mu1, &even, 1.2).unwrap();
        assert!(back.max_residual < 1e-6);
        assert!(back.gamma.iter().all(|g| g % 2 != 0));
        let fwd = bridge_measure_from_function(&back.gamma, &back.samples, 2.4, PI - 1.2, 0.4).unwrap();
        assert!(fwd.measure.atoms().iter().all(|a| (a.support as i64) % 2 == 0));
        assert!(fwd.gamma_residual < 1e-6);
        assert!(fwd.scan_sup < 1e-5, "{}", fwd.scan_sup);
        assert_eq!(fwd.certificate.verdict, DecayVerdict::Decaying);

        let odd: Vec<i64> = window_integers().filter(|n| n % 2 != 0).collect();
        let f = PeriodicSamples::from_fn(|t| mu0.fourier(t + 1.2));
        let fwd = bridge_measure_from_function(&odd, &f, 0.0, PI - 1.2, 0.4).unwrap();
        assert!(fwd.scan_sup < 1e-5);
        assert!((fwd.gap.0 - (2.0 * PI - 2.0)).abs() < 1e-12);

        let zero = PeriodicSamples::from_fn(|_| Complex64::new(0.0, 0.0));
        assert_eq!(bridge_measure_from_function(&odd, &zero, 0.0, 1.0, 0.5).unwrap_err(), Error::TrivialMeasure);
        assert!(bridge_measure_from_function(&odd, &f, 0.0, PI - 1.2, 2.5).is_err());
        let bad = PeriodicSamples::from_fn(|t| Complex64::from_polar(1.0, t));
        assert!(matches!(
            bridge_measure_from_function(&odd, &bad, 0.0, 1.0, 0.5),
            Err(Error::OrthogonalityResidual { gamma: 1, .. })
        ));
        assert_eq!(bridge_function_from_measure(&AtomicMeasure::zero(), &even, 1.0).unwrap_err(), Error::TrivialMeasure);
        assert!(matches!(
            bridge_function_from_measure(&AtomicMeasure::dirac(0.0), &even, 1.0),
            Err(Error::GapCertificateFailed(_))
        ));
    }
}
