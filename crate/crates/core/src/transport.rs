//! Transport of gap measures from `Lambda` to an interlacing positive
//! perturbation `Lambda~` plus two anchor points, through the product
//! `phi(z) = -prod (1 - z/lambda_j) / (1 - z/lambda~_j)` and the residues of
//! `psi(z) = phi(z) K_mu(z) / ((z - x1)(z - x2))`.
//!
//! Windows are finite, so `phi` is rational and the Herglotz and
//! partial-fraction representations hold exactly up to roundoff; the checks
//! below measure that roundoff and the window-doubling trends.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::gap::{cauchy_gap_test, decay_exponent, ft_gap_scan, max_scan_step, DecayVerdict, DEFAULT_Y_MAX};
use crate::measure::AtomicMeasure;
use crate::numeric::seeded_rng;
use crate::sets::{DiscreteSet, PerturbMode};
use crate::TOL;

const TEST_POINTS: usize = 20;
const TEST_SEED: u64 = 0x5eed;
pub const RESIDUAL_LIMIT: f64 = 1e-3;
pub const ANCHOR_LEFT: f64 = 0.37;
pub const ANCHOR_RIGHT: f64 = 0.61;

#[derive(Clone, Debug, PartialEq)]
pub struct InterlacedPair {
    base: DiscreteSet,
    perturbed: DiscreteSet,
    offsets: Vec<f64>,
    delta: f64,
}

/// Check `delta < d/4`, `delta/2 < offset < delta`, `0` outside both sets and
/// strict interlacing `lambda_j < lambda~_j < lambda_{j+1}`. A pair with
/// `lambda_j < 0 < lambda~_j` is rejected: it flips the sign of `phi`.
pub fn validate_interlacing(base: &DiscreteSet, perturbed: &DiscreteSet, delta: f64) -> Result<InterlacedPair> {
    let (b, p) = (base.points(), perturbed.points());
    if b.len() != p.len() {
        return Err(Error::Interlacing {
            index: b.len().min(p.len()),
            reason: format!("cardinalities differ: {} vs {}", b.len(), p.len()),
        });
    }
    if b.len() >= 2 {
        let limit = base.separation()? / 4.0;
        if !(delta < limit) {
            return Err(Error::PerturbationTooLarge { delta, limit });
        }
    }
    if base.contains(0.0) || perturbed.contains(0.0) {
        return Err(Error::ContainsZero);
    }
    let mut offsets = Vec::with_capacity(b.len());
    for j in 0..b.len() {
        let e = p[j] - b[j];
        if !(e > delta / 2.0 && e < delta) {
            return Err(Error::Interlacing { index: j, reason: format!("offset {e} outside ({}, {delta})", delta / 2.0) });
        }
        if b[j] < 0.0 && p[j] > 0.0 {
            return Err(Error::Interlacing { index: j, reason: format!("({}, {}) straddles 0", b[j], p[j]) });
        }
        if j + 1 < b.len() && !(p[j] < b[j + 1]) {
            return Err(Error::Interlacing { index: j, reason: format!("{} is not below {}", p[j], b[j + 1]) });
        }
        offsets.push(e);
    }
    Ok(InterlacedPair { base: base.clone(), perturbed: perturbed.clone(), offsets, delta })
}

impl InterlacedPair {
    /// The `window` points of `base` nearest the origin, moved right by seeded
    /// offsets uniform in `(delta/2, delta)`.
    pub fn positive_perturbation(base: &DiscreteSet, window: usize, delta: f64, seed: u64) -> Result<Self> {
        let b = DiscreteSet::explicit(base.central(window))?;
        let (p, _) = b.perturb(delta, PerturbMode::Positive { seed })?;
        let p = DiscreteSet::explicit(p.points().to_vec())?;
        validate_interlacing(&b, &p, delta)
    }

    pub fn base(&self) -> &DiscreteSet {
        &self.base
    }

    pub fn perturbed(&self) -> &DiscreteSet {
        &self.perturbed
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Indices ordered by distance of the base point to the origin.
    fn symmetric_order(&self) -> Vec<usize> {
        let b = self.base.points();
        let mut idx: Vec<usize> = (0..b.len()).collect();
        idx.sort_by(|&i, &j| b[i].abs().total_cmp(&b[j].abs()).then(i.cmp(&j)));
        idx
    }

    fn paired_factor(&self, j: usize, z: Complex64) -> Complex64 {
        let (l, t) = (self.base.points()[j], self.perturbed.points()[j]);
        (Complex64::new(1.0, 0.0) - z / l) / (Complex64::new(1.0, 0.0) - z / t)
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if z.im == 0.0 && self.perturbed.contains(z.re) {
            return Err(Error::Pole(z.re));
        }
        Ok(())
    }

    /// `phi` over the whole pair.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.phi_eval(z, self.len())?.value)
    }

    /// `phi` over the `window` pairs nearest the origin, with the relative
    /// change from the product over half as many pairs.
    pub fn phi_eval(&self, z: Complex64, window: usize) -> Result<PhiValue> {
        self.check_pole(z)?;
        let order = self.symmetric_order();
        let window = window.min(order.len());
        let half = window / 2;
        let mut prod = Complex64::new(-1.0, 0.0);
        let mut at_half = prod;
        for (i, &j) in order[..window].iter().enumerate() {
            if i == half {
                at_half = prod;
            }
            prod *= self.paired_factor(j, z);
        }
        if window == half {
            at_half = prod;
        }
        let relative_change = if prod.norm() > 0.0 { (prod - at_half).norm() / prod.norm() } else { 0.0 };
        Ok(PhiValue { value: prod, half_window: at_half, relative_change })
    }

    /// Largest `|phi(iy)|/|y|` over `ys`, using the `window` central pairs.
    pub fn growth_ratio(&self, ys: &[f64], window: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for &y in ys {
            let v = self.phi_eval(Complex64::new(0.0, y), window)?.value;
            worst = worst.max(v.norm() / y.abs());
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiValue {
    pub value: Complex64,
    pub half_window: Complex64,
    pub relative_change: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzData {
    /// Residue weights `c_k`, one per perturbed point.
    pub c: Vec<f64>,
    pub b1: f64,
    pub b2: f64,
    /// `(R, sum over |lambda~_k| <= R of c_k / lambda~_k^2)` at `R/8, R/4, R/2, R`.
    pub weighted_sum_partials: Vec<(f64, f64)>,
    /// Relative growth of the weighted sum over the last radius doubling.
    pub weighted_sum_growth: f64,
    /// Largest relative error of `b1 z + b2 + sum c_k (1/(lambda~_k - z) - 1/lambda~_k)`
    /// against the product at the test points.
    pub reconstruction_residual: f64,
}

impl HerglotzData {
    pub fn eval(&self, pair: &InterlacedPair, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(self.b1, 0.0) * z + self.b2;
        for (c, t) in self.c.iter().zip(pair.perturbed.points()) {
            acc += *c * (Complex64::new(1.0, 0.0) / (Complex64::new(*t, 0.0) - z) - 1.0 / t);
        }
        acc
    }
}

/// Product over `j != k` evaluated at `lambda~_k`.
fn product_without(pair: &InterlacedPair, k: usize) -> f64 {
    let (b, p) = (pair.base.points(), pair.perturbed.points());
    let z = p[k];
    let mut prod = 1.0;
    for &j in &pair.symmetric_order() {
        if j != k {
            prod *= (1.0 - z / b[j]) / (1.0 - z / p[j]);
        }
    }
    prod
}

fn residues(pair: &InterlacedPair) -> Vec<f64> {
    let (b, p) = (pair.base.points(), pair.perturbed.points());
    (0..pair.len()).map(|k| -(1.0 - p[k] / b[k]) * p[k] * product_without(pair, k)).collect()
}

/// Deterministic off-axis points in both half-planes, spread over the central half of the window.
pub fn test_points(pair: &InterlacedPair) -> Vec<Complex64> {
    let pts = pair.perturbed.points();
    let span = if pts.is_empty() { 1.0 } else { (pts[pts.len() - 1] - pts[0]).abs() / 4.0 };
    let mut rng = seeded_rng(TEST_SEED);
    (0..TEST_POINTS)
        .map(|i| {
            let x = (rng.random::<f64>() * 2.0 - 1.0) * span;
            let y = 0.5 + rng.random::<f64>() * 4.5;
            Complex64::new(x, if i % 2 == 0 { y } else { -y })
        })
        .collect()
}

fn radius_marks(pair: &InterlacedPair) -> [f64; 4] {
    let r = pair.perturbed.points().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    [r / 8.0, r / 4.0, r / 2.0, r]
}

fn partials(points: &[f64], values: &[f64], marks: &[f64; 4]) -> (Vec<(f64, f64)>, f64) {
    let out: Vec<(f64, f64)> = marks
        .iter()
        .map(|r| (*r, points.iter().zip(values).filter(|(x, _)| x.abs() <= *r).map(|(_, v)| v).sum()))
        .collect();
    let growth = if out[2].1 > 0.0 { (out[3].1 - out[2].1) / out[2].1 } else { 0.0 };
    (out, growth)
}

/// Herglotz representation of `phi`: residues `c_k`, `b1` from `Im phi(iy)/y`
/// at the top of the `y` grid, `b2` from `phi(0)`.
pub fn herglotz_residues(pair: &InterlacedPair) -> Result<HerglotzData> {
    if pair.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let c = residues(pair);
    if let Some((k, v)) = c.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::InternalConsistency(format!("residue c_{k} = {v} is not positive")));
    }
    let top = 1e4;
    let b1 = (pair.phi(Complex64::new(0.0, top))?.im / top).max(0.0);
    let b2 = pair.phi(Complex64::new(0.0, 0.0))?.re;
    let pts = pair.perturbed.points();
    let weights: Vec<f64> = c.iter().zip(pts).map(|(c, t)| c / (t * t)).collect();
    let (weighted_sum_partials, weighted_sum_growth) = partials(pts, &weights, &radius_marks(pair));
    let mut data = HerglotzData { c, b1, b2, weighted_sum_partials, weighted_sum_growth, reconstruction_residual: 0.0 };
    let mut worst = 0.0f64;
    for z in test_points(pair) {
        let direct = pair.phi(z)?;
        worst = worst.max((data.eval(pair, z) - direct).norm() / direct.norm());
    }
    data.reconstruction_residual = worst;
    Ok(data)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    /// Weight `e_k` at each perturbed point.
    pub e: Vec<Complex64>,
    /// Weights at the anchors.
    pub f: [Complex64; 2],
    pub anchors: (f64, f64),
    /// `(R, sum over |lambda~_k| <= R of |e_k|)`.
    pub l1_partials: Vec<(f64, f64)>,
    /// Relative growth of the l1 partials over the last radius doubling.
    pub l1_growth: f64,
    /// Largest relative error of the partial-fraction expansion of `psi` at the test points.
    pub partial_fraction_residual: f64,
    pub measure: AtomicMeasure,
}

/// Default anchors: just outside both ends of the perturbed window.
pub fn default_anchors(pair: &InterlacedPair) -> Result<(f64, f64)> {
    let pts = pair.perturbed.points();
    if pts.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let d = if pair.len() >= 2 { pair.base.separation()? } else { 1.0 };
    Ok((pts[0] - ANCHOR_LEFT * d, pts[pts.len() - 1] + ANCHOR_RIGHT * d))
}

fn cauchy_real(d: &[Complex64], base: &[f64], z: Complex64) -> Complex64 {
    d.iter().zip(base).map(|(w, l)| w / (z - l)).sum()
}

/// Move `mu` (supported on the base points) onto the perturbed points and the anchors.
pub fn transport_measure(pair: &InterlacedPair, mu: &AtomicMeasure, anchors: Option<(f64, f64)>) -> Result<TransportResult> {
    let (x1, x2) = match anchors {
        Some(a) => a,
        None => default_anchors(pair)?,
    };
    if (x1 - x2).abs() <= TOL {
        return Err(Error::AnchorCollision(x1));
    }
    for x in [x1, x2] {
        if pair.base.contains(x) || pair.perturbed.contains(x) {
            return Err(Error::AnchorCollision(x));
        }
    }
    let base = pair.base.points();
    let pts = pair.perturbed.points();
    let mut d = alloc::vec![Complex64::new(0.0, 0.0); base.len()];
    for atom in mu.atoms() {
        let j = base.partition_point(|p| *p < atom.support - TOL);
        if j >= base.len() || (base[j] - atom.support).abs() > TOL {
            return Err(Error::SupportMismatch(atom.support));
        }
        d[j] = atom.weight;
    }
    if !mu.is_zero() {
        if let Ok(p) = decay_exponent(mu) {
            if p < 2.0 {
                return Err(Error::DecayPrecondition(p));
            }
        }
    }
    let c = residues(pair);
    let e: Vec<Complex64> = (0..pts.len())
        .map(|k| {
            let t = pts[k];
            let inner: Complex64 = d.iter().zip(base).map(|(w, l)| w / (l - t)).sum();
            inner * (c[k] / ((t - x1) * (t - x2)))
        })
        .collect();
    let z1 = Complex64::new(x1, 0.0);
    let z2 = Complex64::new(x2, 0.0);
    let f = [
        pair.phi(z1)? / (x1 - x2) * cauchy_real(&d, base, z1),
        pair.phi(z2)? / (x2 - x1) * cauchy_real(&d, base, z2),
    ];
    let abs_e: Vec<f64> = e.iter().map(|w| w.norm()).collect();
    let (l1_partials, l1_growth) = partials(pts, &abs_e, &radius_marks(pair));
    let mut worst = 0.0f64;
    for z in test_points(pair) {
        let psi = pair.phi(z)? * cauchy_real(&d, base, z) / ((z - x1) * (z - x2));
        let expansion: Complex64 =
            e.iter().zip(pts).map(|(w, t)| w / (z - t)).sum::<Complex64>() + f[0] / (z - x1) + f[1] / (z - x2);
        let scale = psi.norm();
        if scale > 0.0 {
            worst = worst.max((psi - expansion).norm() / scale);
        }
    }
    if worst >= RESIDUAL_LIMIT {
        return Err(Error::InternalConsistency(format!("partial-fraction residual {worst:e}")));
    }
    let mut atoms: Vec<(f64, Complex64)> = pts.iter().copied().zip(e.iter().copied()).collect();
    atoms.push((x1, f[0]));
    atoms.push((x2, f[1]));
    let measure = AtomicMeasure::from_pairs(atoms)?;
    Ok(TransportResult { e, f, anchors: (x1, x2), l1_partials, l1_growth, partial_fraction_residual: worst, measure })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportCertificate {
    pub a: f64,
    /// `(b, verdict)` per rung.
    pub rungs: Vec<(f64, DecayVerdict)>,
    /// Scan sup over `(-0.9a, 0.9a)` relative to the total variation.
    pub scan_sup: f64,
    pub first_failure: Option<f64>,
    pub passed: bool,
    /// The measure was zero; rejected as a witness.
    pub trivial: bool,
}

/// Certify a gap of half-length `a` at `b = 0.5a, 0.75a`.
pub fn verify_transport(nu: &AtomicMeasure, a: f64) -> Result<TransportCertificate> {
    verify_transport_ladder(nu, a, &[0.5 * a, 0.75 * a])
}

/// Certify with the Cauchy test at each `b` of `ladder` and a scan on `(-0.9a, 0.9a)`.
pub fn verify_transport_ladder(nu: &AtomicMeasure, a: f64, ladder: &[f64]) -> Result<TransportCertificate> {
    if !(a > 0.0) {
        return Err(invalid("a", "must be positive"));
    }
    if nu.is_zero() {
        let rungs = ladder.iter().map(|b| (*b, DecayVerdict::Decaying)).collect();
        return Ok(TransportCertificate { a, rungs, scan_sup: 0.0, first_failure: None, passed: false, trivial: true });
    }
    let mut rungs = Vec::with_capacity(ladder.len());
    for &b in ladder {
        rungs.push((b, cauchy_gap_test(nu, b, DEFAULT_Y_MAX)?.verdict));
    }
    let step = max_scan_step(nu).min(a / 64.0);
    let scan_sup = ft_gap_scan(nu, (-0.9 * a, 0.9 * a), step)?.sup / nu.total_variation();
    let first_failure = rungs.iter().find(|(_, v)| *v != DecayVerdict::Decaying).map(|(b, _)| *b);
    let passed = first_failure.is_none() && scan_sup < 1e-3;
    Ok(TransportCertificate { a, rungs, scan_sup, first_failure, passed, trivial: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::{build_gap_measure, tame_coefficients};
    use alloc::vec;

    fn half_integers(n: usize) -> DiscreteSet {
        DiscreteSet::lattice(1.0, 1e6).unwrap().translate(-0.5).extend(n as f64).unwrap()
    }

    fn constant_pair(n: usize) -> InterlacedPair {
        let b = DiscreteSet::explicit(half_integers(n).central(n)).unwrap();
        let p = DiscreteSet::explicit(b.points().iter().map(|x| x + 0.15).collect()).unwrap();
        validate_interlacing(&b, &p, 0.2).unwrap()
    }

    /// Central-difference estimate of the residue of `-phi` at `lambda~_k`.
    fn numeric_residue(pair: &InterlacedPair, k: usize) -> f64 {
        let t = pair.perturbed().points()[k];
        let h = 1e-7;
        let up = pair.phi(Complex64::new(t, h)).unwrap();
        // phi ~ c/(t - z) near t, so (t - z) phi -> c
        (Complex64::new(0.0, -h) * up).re
    }

    #[test]
    fn interlacing_examples() {
        let pair = constant_pair(64);
        assert!(pair.offsets().iter().all(|e| (e - 0.15).abs() < 1e-12));
        let b = pair.base().clone();
        let low = DiscreteSet::explicit(b.points().iter().map(|x| x + 0.05).collect()).unwrap();
        assert!(matches!(validate_interlacing(&b, &low, 0.2), Err(Error::Interlacing { index: 0, .. })));
        let p = DiscreteSet::explicit(b.points().iter().map(|x| x + 0.2).collect()).unwrap();
        assert!(matches!(validate_interlacing(&b, &p, 0.3), Err(Error::PerturbationTooLarge { .. })));
        let z = DiscreteSet::explicit(vec![-1.0, 0.0, 1.0]).unwrap();
        let zp = DiscreteSet::explicit(vec![-0.85, 0.15, 1.15]).unwrap();
        assert_eq!(validate_interlacing(&z, &zp, 0.2).unwrap_err(), Error::ContainsZero);
        let s = DiscreteSet::explicit(vec![-2.1, -1.1, -0.1, 0.9]).unwrap();
        let sp = DiscreteSet::explicit(vec![-1.95, -0.95, 0.05, 1.05]).unwrap();
        assert!(matches!(validate_interlacing(&s, &sp, 0.2), Err(Error::Interlacing { index: 2, .. })));
    }

    #[test]
    fn phi_is_herglotz() {
        let pair = InterlacedPair::positive_perturbation(&half_integers(300), 256, 0.2, 1).unwrap();
        assert!(pair.phi(Complex64::new(0.0, 1.0)).unwrap().im > 0.0);
        assert!(pair.phi(Complex64::new(0.0, 2.0)).unwrap().im > 0.0);
        assert!(pair.phi(Complex64::new(0.0, -1.0)).unwrap().im < 0.0);
        for i in 0..100 {
            let x = -60.0 + 1.2 * i as f64;
            let y = 0.1 + (i % 7) as f64;
            for s in [1.0, -1.0] {
                let v = pair.phi(Complex64::new(x, s * y)).unwrap();
                assert!(v.im * s > 0.0);
            }
        }
        let t = pair.perturbed().points()[10];
        assert_eq!(pair.phi(Complex64::new(t, 0.0)).unwrap_err(), Error::Pole(t));
    }

    #[test]
    fn residues_match_numeric_limit() {
        let pair = constant_pair(32);
        let h = herglotz_residues(&pair).unwrap();
        for k in [0, 7, 16, 31] {
            let n = numeric_residue(&pair, k);
            assert!((h.c[k] - n).abs() < 1e-5 * h.c[k].abs().max(1.0), "{k}: {} vs {n}", h.c[k]);
        }
        assert!(h.c.iter().all(|c| *c > 0.0));
        assert!((h.b2 + 1.0).abs() < 1e-12);
        assert!(h.reconstruction_residual < 1e-5, "{}", h.reconstruction_residual);
    }

    #[test]
    fn growth_ratio_does_not_increase_with_window() {
        let pair = InterlacedPair::positive_perturbation(&half_integers(600), 512, 0.2, 2).unwrap();
        let ys = [10.0, 100.0, 1e3, 1e4];
        let mut prev = f64::INFINITY;
        for w in [64, 128, 256, 512] {
            let g = pair.growth_ratio(&ys, w).unwrap();
            assert!(g <= prev * (1.0 + 1e-9), "{w}: {g} > {prev}");
            prev = g;
        }
    }

    fn source_witness(pair: &InterlacedPair) -> AtomicMeasure {
        let z = DiscreteSet::lattice(1.0, 10.0).unwrap();
        let mu = build_gap_measure(&z, 2.4, 4).unwrap();
        let tamed = tame_coefficients(&mu, 2.4, 0.4, 2).unwrap().measure.translate(-0.5);
        let r = pair.base().points().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let kept = tamed.filter(|a| a.support.abs() <= r);
        kept.scale(Complex64::new(1.0 / kept.total_variation(), 0.0))
    }

    #[test]
    fn transport_is_linear_and_kills_zero() {
        let pair = InterlacedPair::positive_perturbation(&half_integers(100), 64, 0.2, 0).unwrap();
        let zero = transport_measure(&pair, &AtomicMeasure::zero(), None).unwrap();
        assert!(zero.e.iter().all(|e| e.norm() == 0.0));
        assert_eq!(zero.f, [Complex64::new(0.0, 0.0); 2]);
        let b = pair.base().points();
        let m1 = AtomicMeasure::from_pairs([(b[3], Complex64::new(1.0, 0.5)), (b[40], Complex64::new(-0.2, 0.0))]).unwrap();
        let m2 = AtomicMeasure::from_pairs([(b[3], Complex64::new(0.3, 0.0)), (b[10], Complex64::new(0.0, 2.0))]).unwrap();
        let t1 = transport_measure(&pair, &m1, None).unwrap();
        let t2 = transport_measure(&pair, &m2, None).unwrap();
        let t12 = transport_measure(&pair, &m1.add(&m2), None).unwrap();
        for k in 0..pair.len() {
            assert!((t12.e[k] - t1.e[k] - t2.e[k]).norm() < 1e-10);
        }
        for j in 0..2 {
            assert!((t12.f[j] - t1.f[j] - t2.f[j]).norm() < 1e-10);
        }
        let off = AtomicMeasure::dirac(0.1);
        assert_eq!(transport_measure(&pair, &off, None).unwrap_err(), Error::SupportMismatch(0.1));
        assert!(matches!(transport_measure(&pair, &m1, Some((b[0], 3.3))), Err(Error::AnchorCollision(_))));
        let slow = AtomicMeasure::from_pairs(b.iter().map(|x| (*x, Complex64::new(1.0 / x.abs(), 0.0)))).unwrap();
        assert!(matches!(transport_measure(&pair, &slow, None), Err(Error::DecayPrecondition(_))));
    }

    #[test]
    fn transported_witness_keeps_its_gap() {
        let pair = InterlacedPair::positive_perturbation(&half_integers(300), 256, 0.2, 0).unwrap();
        let mu = source_witness(&pair);
        let t = transport_measure(&pair, &mu, None).unwrap();
        assert!(t.partial_fraction_residual < 1e-4, "{}", t.partial_fraction_residual);
        assert!(t.l1_growth < 0.01, "{}", t.l1_growth);
        let cert = verify_transport(&t.measure, 2.0).unwrap();
        assert!(cert.passed, "{cert:?}");
        let high = verify_transport_ladder(&t.measure, 2.0, &[3.0]).unwrap();
        assert_eq!(high.first_failure, Some(3.0));
        let z = verify_transport(&AtomicMeasure::zero(), 2.0).unwrap();
        assert!(z.trivial && !z.passed);
    }
}
