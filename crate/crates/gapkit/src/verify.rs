//! Verification suites: each runs a pipeline and compares residuals with fixed tolerances.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gapkit_core::completeness::perturbation_radius_check;
use gapkit_core::density::{complementarity_check, lower_bm_density, upper_bm_density, DensityOptions};
use gapkit_core::gap::{
    bridge_function_from_measure, bridge_measure_from_function, build_gap_measure, cauchy_gap_test,
    gap_characteristic_estimate, gram_bisection, scan_shows_gap, tame_coefficients, DecayVerdict, GapOptions,
    DEFAULT_Y_MAX,
};
use gapkit_core::transport::{
    herglotz_residues, transport_measure, HerglotzData, TransportCertificate, TransportResult, verify_transport, verify_transport_ladder, InterlacedPair, ANCHOR_LEFT, ANCHOR_RIGHT,
};
use gapkit_core::{AtomicMeasure, Complex64, DiscreteSet, Removal};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dsl::{BuildError, SetSpec};
use crate::report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Prop21,
    Prop22,
    Prop23,
    Prop24,
    TheoremGap,
    Lemma51,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Prop21, Suite::Prop22, Suite::Prop23, Suite::Prop24, Suite::TheoremGap, Suite::Lemma51];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop21 => "prop21",
            Suite::Prop22 => "prop22",
            Suite::Prop23 => "prop23",
            Suite::Prop24 => "prop24",
            Suite::TheoremGap => "theorem_gap",
            Suite::Lemma51 => "lemma51",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// How `value` compares against `limit`: `"<="`, `"<"`, `">"` or `"=="`.
    pub relation: &'static str,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, relation: &'static str, limit: f64, detail: Value) -> Self {
        let passed = match relation {
            "<=" => value <= limit,
            "<" => value < limit,
            ">" => value > limit,
            _ => value == limit,
        };
        Check { name: name.into(), value, limit, relation, passed, detail }
    }

    fn flag(name: impl Into<String>, ok: bool, detail: Value) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, "==", 1.0, detail)
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "limit": self.limit,
            "relation": self.relation,
            "passed": self.passed,
            "detail": self.detail,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        SuiteReport { suite, checks, passed }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "passed": self.passed,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub alpha: Option<f64>,
    pub removed: Option<Removal>,
    pub set: Option<SetSpec>,
    pub base: Option<SetSpec>,
    pub delta: Option<f64>,
    pub gap: Option<f64>,
    pub seed: u64,
    pub window: Option<usize>,
    pub radius: f64,
    pub trials: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            alpha: None,
            removed: None,
            set: None,
            base: None,
            delta: None,
            gap: None,
            seed: 0,
            window: None,
            radius: gapkit_core::density::DEFAULT_RADIUS,
            trials: 5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("{suite}: {source}")]
    Core { suite: Suite, source: gapkit_core::Error },
    #[error("{suite}: {source}")]
    Build { suite: Suite, source: BuildError },
    #[error("{suite}: {message}")]
    Params { suite: Suite, message: String },
}

type SuiteResult<T> = Result<T, VerifyError>;

trait Context<T> {
    fn ctx(self, suite: Suite) -> SuiteResult<T>;
}

impl<T> Context<T> for Result<T, gapkit_core::Error> {
    fn ctx(self, suite: Suite) -> SuiteResult<T> {
        self.map_err(|source| VerifyError::Core { suite, source })
    }
}

impl<T> Context<T> for Result<T, BuildError> {
    fn ctx(self, suite: Suite) -> SuiteResult<T> {
        self.map_err(|source| VerifyError::Build { suite, source })
    }
}

pub fn run_verify(suite: Suite, params: &VerifyParams) -> SuiteResult<SuiteReport> {
    let checks = match suite {
        Suite::Prop21 => prop21(params),
        Suite::Prop22 => prop22(params),
        Suite::Prop23 => prop23(params),
        Suite::Prop24 => prop24(params),
        Suite::TheoremGap => theorem_gap(params),
        Suite::Lemma51 => lemma51(params),
    }?;
    Ok(SuiteReport::new(suite, checks))
}

fn density_opts(p: &VerifyParams) -> DensityOptions {
    DensityOptions { radius: p.radius, ..Default::default() }
}

fn residues(modulus: u32, residues: &[u32]) -> Removal {
    Removal::Residues { modulus, residues: residues.to_vec() }
}

fn lattice_cases(p: &VerifyParams, defaults: &[Removal]) -> Vec<(f64, Removal)> {
    let alpha = p.alpha.unwrap_or(1.0);
    match &p.removed {
        Some(r) => vec![(alpha, r.clone())],
        None => defaults.iter().map(|r| (alpha, r.clone())).collect(),
    }
}

fn prop21(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::Prop21;
    let cases = lattice_cases(p, &[residues(2, &[1]), residues(3, &[0]), residues(5, &[0, 1])]);
    let opts = density_opts(p);
    cases
        .par_iter()
        .map(|(alpha, removal)| {
            let set = DiscreteSet::lattice_minus(*alpha, removal.clone(), 16.0).ctx(s)?;
            let r = complementarity_check(&set, &opts).ctx(s)?;
            let name = format!("residual {}", SetSpec::LatticeMinus { alpha: *alpha, removal: removal.clone() });
            Ok(Check::new(name, r.residual, "<=", 0.05, report::complementarity(&r)))
        })
        .collect()
}

/// `m` when `removal` keeps exactly the multiples of `m`.
fn sublattice(removal: &Removal) -> Option<u32> {
    match removal {
        Removal::Residues { modulus, residues } if *modulus >= 2 => {
            let mut r = residues.clone();
            r.sort_unstable();
            r.dedup();
            (r == (1..*modulus).collect::<Vec<_>>()).then_some(*modulus)
        }
        _ => None,
    }
}

fn prop22(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::Prop22;
    let opts = density_opts(p);
    let mut checks = Vec::new();
    for (alpha, removal) in lattice_cases(p, &[residues(2, &[1])]) {
        let label = SetSpec::LatticeMinus { alpha, removal: removal.clone() }.to_string();
        let set = DiscreteSet::lattice_minus(alpha, removal.clone(), 16.0).ctx(s)?;
        let complement = set.lattice_complement().ctx(s)?;
        let (g, r) = rayon::join(|| lower_bm_density(&set, &opts), || upper_bm_density(&complement, &opts));
        let (g, r) = (g.ctx(s)?.estimate, r.ctx(s)?);
        let residual = (PI * g.estimate + PI * r.estimate - PI / alpha).abs();
        let widths = PI * (g.width() + r.width());
        checks.push(Check::new(
            format!("identity residual {label}"),
            residual,
            "<=",
            0.15 * PI / alpha,
            json!({ "gap": PI * g.estimate, "radius_complement": PI * r.estimate, "combined_widths": widths }),
        ));
        if alpha == 1.0 {
            if let Some(m) = sublattice(&removal) {
                checks.extend(bridge_loop(m, &set).ctx(s)?);
            }
        }
    }
    Ok(checks)
}

/// Measure on `mZ` → function → measure, through both bridges.
pub fn bridge_loop(m: u32, set: &DiscreteSet) -> Result<Vec<Check>, gapkit_core::Error> {
    let a = 2.4 / m as f64;
    let lattice = DiscreteSet::lattice(m as f64, 16.0)?;
    let mu0 = build_gap_measure(&lattice, a, 4)?;
    let half = (gapkit_core::gap::GRID / 2) as f64;
    let mu1 = mu0.modulate(-a).filter(|x| x.support.abs() < half);
    let back = bridge_function_from_measure(&mu1, set, a)?;
    let eps = a.min(0.4);
    let fwd = bridge_measure_from_function(&back.gamma, &back.samples, 2.0 * a, PI - a, eps)?;
    let on_set = fwd.measure.atoms().iter().all(|x| (x.support / m as f64).fract() == 0.0);
    Ok(vec![
        Check::new("bridge backward gamma residual", back.max_residual, "<", 1e-6, json!({ "gamma": back.gamma.len() })),
        Check::new(
            "bridge forward gamma residual",
            fwd.gamma_residual,
            "<",
            1e-6,
            json!({ "gap": [fwd.gap.0, fwd.gap.1], "certificate": report::cauchy(&fwd.certificate), "scan_sup": fwd.scan_sup }),
        ),
        Check::flag("bridge output supported on the set", on_set, json!({ "atoms": fwd.measure.len() })),
    ])
}

/// A gap measure of half-length `gap` on `lattice + offset`: a lattice witness
/// built `taper` wider, tamed by `taper`, moved onto the base and restricted to it.
pub fn transport_source(
    alpha: f64,
    offset: f64,
    gap: f64,
    taper: f64,
    base: &DiscreteSet,
) -> Result<AtomicMeasure, gapkit_core::Error> {
    let lattice = DiscreteSet::lattice(alpha, 16.0)?;
    let wide = build_gap_measure(&lattice, gap + taper, 4)?;
    let tamed = tame_coefficients(&wide, gap + taper, taper, 2)?.measure.translate(-offset);
    let r = base.points().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let kept = tamed.filter(|x| x.support.abs() <= r + 1e-9 && base.contains(x.support));
    if kept.is_zero() {
        return Err(gapkit_core::Error::TrivialMeasure);
    }
    Ok(kept.scale(Complex64::new(1.0 / kept.total_variation(), 0.0)))
}

/// `(alpha, offset)` when the spec is a translated lattice.
pub fn translated_lattice(spec: &SetSpec) -> Option<(f64, f64)> {
    match spec {
        SetSpec::Translate { base, offset } => match base.as_ref() {
            SetSpec::Lattice { alpha } => Some((*alpha, *offset)),
            _ => None,
        },
        _ => None,
    }
}

pub fn default_transport_base() -> SetSpec {
    SetSpec::Translate { base: Box::new(SetSpec::Lattice { alpha: 1.0 }), offset: 0.5 }
}

/// Everything the transport command and the prop23 suite compute.
pub struct TransportRun {
    pub pair: InterlacedPair,
    pub source: AtomicMeasure,
    pub herglotz: HerglotzData,
    pub result: TransportResult,
    pub certificate: TransportCertificate,
    /// The same certificate ladder pushed above the source gap, at `1.5 * gap`.
    pub above: TransportCertificate,
}

pub fn run_transport(
    spec: &SetSpec,
    delta: f64,
    seed: u64,
    gap: f64,
    window: usize,
) -> Result<TransportRun, BuildError> {
    let (alpha, offset) = translated_lattice(spec).ok_or_else(|| {
        BuildError::Core(gapkit_core::Error::InvalidParameter {
            name: "base",
            reason: "must be translate:base=(lattice:alpha=A),offset=X".into(),
        })
    })?;
    let base = spec.build(window as f64 * alpha)?;
    let pair = InterlacedPair::positive_perturbation(&base, window, delta, seed)?;
    let source = transport_source(alpha, offset, gap, 0.4, pair.base())?;
    let herglotz = herglotz_residues(&pair)?;
    let result = transport_measure(&pair, &source, None)?;
    let certificate = verify_transport(&result.measure, gap)?;
    let above = verify_transport_ladder(&result.measure, gap, &[1.5 * gap])?;
    Ok(TransportRun { pair, source, herglotz, result, certificate, above })
}

fn prop23(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::Prop23;
    let spec = p.base.clone().unwrap_or_else(default_transport_base);
    let gap = p.gap.unwrap_or(2.0);
    let run = run_transport(&spec, p.delta.unwrap_or(0.2), p.seed, gap, p.window.unwrap_or(512)).ctx(s)?;
    let (pair, herg, t) = (&run.pair, &run.herglotz, &run.result);

    let phi_i = pair.phi(Complex64::new(0.0, 1.0)).ctx(s)?;
    let ys = [10.0, 100.0, 1e3, 1e4];
    let ratios: Vec<f64> =
        ys.iter().map(|y| pair.phi(Complex64::new(0.0, *y)).map(|v| v.norm() / y)).collect::<Result<_, _>>().ctx(s)?;
    let bounded = ratios.iter().all(|r| r.is_finite()) && ratios.windows(2).all(|w| w[1] <= w[0]);
    let c_min = herg.c.iter().copied().fold(f64::INFINITY, f64::min);

    let mut agree = true;
    let mut shadow = Vec::new();
    for b in [0.25 * gap, 0.5 * gap, 0.75 * gap] {
        let v0 = cauchy_gap_test(&run.source, b, DEFAULT_Y_MAX).ctx(s)?.verdict;
        let v1 = cauchy_gap_test(&t.measure, b, DEFAULT_Y_MAX).ctx(s)?.verdict;
        agree &= v0 == v1;
        shadow.push(json!({ "b": b, "source": report::decay(v0), "transported": report::decay(v1) }));
    }
    let (anchor_gap, plain_gap, step) = anchor_shadow(pair).ctx(s)?;

    Ok(vec![
        Check::new("min c_k", c_min, ">", 0.0, report::herglotz(herg)),
        Check::new("Im phi(i)", phi_i.im, ">", 0.0, json!({ "phi_i": [phi_i.re, phi_i.im] })),
        Check::flag("|phi(iy)|/y nonincreasing over 4 decades", bounded, json!({ "y": ys, "ratio": ratios })),
        Check::new("Herglotz reconstruction residual", herg.reconstruction_residual, "<", 1e-3, Value::Null),
        Check::new("weighted residue sum growth", herg.weighted_sum_growth, "<", 0.01, Value::Null),
        Check::new("partial-fraction residual", t.partial_fraction_residual, "<", 1e-3, report::transport(t)),
        Check::new("l1 growth of e_k", t.l1_growth, "<", 0.01, Value::Null),
        Check::flag("certificate at 0.5a and 0.75a", run.certificate.passed, report::certificate(&run.certificate)),
        Check::flag("certificate fails at 1.5a", run.above.first_failure.is_some(), report::certificate(&run.above)),
        Check::flag("source and transported verdicts agree below the gap", agree, Value::Array(shadow)),
        Check::new(
            "anchor deletion changes the oracle gap by",
            (anchor_gap - plain_gap).abs(),
            "<=",
            step,
            json!({ "with_anchors": anchor_gap, "without": plain_gap }),
        ),
    ])
}

/// Gram-oracle gap of the central perturbed points with and without the two
/// default anchors, and the bisection step.
fn anchor_shadow(pair: &InterlacedPair) -> Result<(f64, f64, f64), gapkit_core::Error> {
    const STEPS: usize = 6;
    let n = 128.min(pair.len());
    let core = DiscreteSet::explicit(pair.perturbed().central(n))?;
    let d = pair.base().separation()?;
    let pts = core.points();
    let mut with = vec![pts[0] - ANCHOR_LEFT * d];
    with.extend_from_slice(pts);
    with.push(pts[pts.len() - 1] + ANCHOR_RIGHT * d);
    let with = DiscreteSet::explicit(with)?;
    let step = (PI / core.separation()? + 1.0) / (1u32 << STEPS) as f64;
    let (l0, h0) = gram_bisection(&core, n, STEPS)?;
    let (l1, h1) = gram_bisection(&with, n + 2, STEPS)?;
    Ok((0.5 * (l1 + h1), 0.5 * (l0 + h0), step))
}

fn prop24(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::Prop24;
    let spec = p.set.clone().unwrap_or(SetSpec::Lattice { alpha: 1.0 });
    let set = spec.build(16.0).ctx(s)?;
    let delta = p.delta.unwrap_or(0.2);
    let c = perturbation_radius_check(&set, delta, p.trials, p.seed, &density_opts(p)).ctx(s)?;
    Ok(vec![
        Check::new(format!("max deviation {spec}"), c.max_deviation, "<=", c.bracket_width, report::perturbation(&c)),
        Check::new("bracket width", c.bracket_width, "<=", 0.1 * PI, Value::Null),
    ])
}

pub fn thinned_half_lattice() -> SetSpec {
    SetSpec::LatticeMinus { alpha: 0.5, removal: Removal::Thinned { fraction: 0.3, seed: 0 } }
}

fn theorem_gap(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::TheoremGap;
    let opts = GapOptions { density: density_opts(p), window: p.window.unwrap_or(256), ..Default::default() };
    let cases: Vec<(SetSpec, bool)> = match &p.set {
        Some(spec) => vec![(spec.clone(), true)],
        None => vec![
            (SetSpec::Lattice { alpha: 1.0 }, true),
            (SetSpec::Lattice { alpha: 2.0 }, true),
            (thinned_half_lattice(), false),
        ],
    };
    cases
        .par_iter()
        .map(|(spec, bracket)| {
            let set = spec.build(16.0).ctx(s)?;
            let r = gap_characteristic_estimate(&set, &opts).ctx(s)?;
            Ok(if *bracket {
                Check::flag(format!("oracle bracket within 15% of pi*D_BM for {spec}"), r.agreement, report::gap(&r))
            } else {
                Check::new(format!("route difference for {spec}"), r.relative_difference, "<=", 0.2, report::gap(&r))
            })
        })
        .collect()
}

/// A named measure and the rungs `b` at which both gap tests run.
pub struct Lemma51Case {
    pub name: String,
    pub measure: AtomicMeasure,
    pub rungs: Vec<f64>,
}

pub fn lemma51_cases(seed: u64) -> Result<Vec<Lemma51Case>, gapkit_core::Error> {
    let z = DiscreteSet::lattice(1.0, 16.0)?;
    let two = DiscreteSet::lattice(2.0, 16.0)?;
    let mut cases = Vec::new();
    for (name, set, gap) in [("Z gap 2", &z, 2.0), ("Z gap 1", &z, 1.0), ("Z gap 2.5", &z, 2.5), ("2Z gap 1.2", &two, 1.2)] {
        let measure = build_gap_measure(set, gap, 4)?;
        cases.push(Lemma51Case { name: name.into(), measure, rungs: vec![0.5 * gap, gap - 0.1, gap + 0.5] });
    }
    let wide = build_gap_measure(&z, 2.0, 4)?;
    let tamed = tame_coefficients(&wide, 2.0, 0.4, 2)?.measure;
    cases.push(Lemma51Case { name: "Z gap 2 tamed by 0.4".into(), measure: tamed, rungs: vec![0.8, 1.5, 2.1] });
    let gap_free = [0.5, 1.0, 2.0];
    cases.push(Lemma51Case { name: "delta_1".into(), measure: AtomicMeasure::dirac(1.0), rungs: gap_free.to_vec() });
    cases.push(Lemma51Case { name: "delta_0".into(), measure: AtomicMeasure::dirac(0.0), rungs: gap_free.to_vec() });
    let mut rng = gapkit_core::numeric::seeded_rng(seed);
    for k in 0..3 {
        let x0 = rng.random::<f64>() * 10.0 - 5.0;
        let x1 = x0 + 0.5 + rng.random::<f64>() * 4.0;
        let w0 = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let w1 = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let measure = AtomicMeasure::from_pairs([(x0, w0), (x1, w1)])?;
        cases.push(Lemma51Case { name: format!("random two-atom {k}"), measure, rungs: gap_free.to_vec() });
    }
    Ok(cases)
}

fn lemma51(p: &VerifyParams) -> SuiteResult<Vec<Check>> {
    let s = Suite::Lemma51;
    let cases = lemma51_cases(p.seed).ctx(s)?;
    cases
        .par_iter()
        .map(|case| {
            let mut disagreements = 0;
            let mut rungs = Vec::new();
            for &b in &case.rungs {
                let scan = scan_shows_gap(&case.measure, b).ctx(s)?;
                let decay = cauchy_gap_test(&case.measure, b, DEFAULT_Y_MAX).ctx(s)?;
                let agree = scan == (decay.verdict == DecayVerdict::Decaying)
                    && decay.verdict != DecayVerdict::Inconclusive;
                if !agree {
                    disagreements += 1;
                }
                rungs.push(json!({ "b": b, "scan_gap": scan, "cauchy": report::cauchy(&decay) }));
            }
            Ok(Check::new(
                format!("scan/Cauchy disagreements on {}", case.name),
                disagreements as f64,
                "==",
                0.0,
                Value::Array(rungs),
            ))
        })
        .collect()
}
