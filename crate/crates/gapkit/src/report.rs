//! JSON reports. Keys are emitted in sorted order and no timestamps are
//! recorded, so identical inputs give identical bytes.

use gapkit_core::completeness::{PerturbationCheck, RadiusReport};
use gapkit_core::density::{
    ComplementarityReport, DensityEstimate, DensityReport, Method, RegularityDiagnostics, Verdict,
};
use gapkit_core::gap::{CauchyDecayTrace, DecayVerdict, GapReport, SideFit};
use gapkit_core::transport::{HerglotzData, TransportCertificate, TransportResult};
use gapkit_core::AtomicMeasure;
use serde_json::{json, Value};

pub const SCHEMA: &str = "gapkit/1";

pub fn envelope(command: &str, config: Value, result: Value, passed: Option<bool>) -> Value {
    json!({ "schema": SCHEMA, "command": command, "config": config, "result": result, "passed": passed })
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

pub fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Converging => "converging",
        Verdict::Diverging => "diverging",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn decay(v: DecayVerdict) -> &'static str {
    match v {
        DecayVerdict::Decaying => "decaying",
        DecayVerdict::NonDecaying => "non-decaying",
        DecayVerdict::Inconclusive => "inconclusive",
    }
}

fn method(m: Method) -> &'static str {
    match m {
        Method::FiniteSet => "finite-set",
        Method::RedhefferBisection => "redheffer-bisection",
        Method::ComplementIdentity => "complement-identity",
        Method::LatticeSnap => "lattice-snap",
        Method::RegularSubsetBisection => "regular-subset-bisection",
    }
}

pub fn estimate(e: &DensityEstimate) -> Value {
    json!({
        "estimate": e.estimate,
        "bracket": [e.bracket.0, e.bracket.1],
        "method": method(e.method),
        "exact": e.exact,
        "exact_in_bracket": e.exact_in_bracket,
        "wide": e.wide,
    })
}

pub fn regularity(d: &RegularityDiagnostics) -> Value {
    json!({
        "a": d.a,
        "partials": d.partial_integrals.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
        "slope": d.slope,
        "verdict": verdict(d.verdict),
    })
}

pub fn density(r: &DensityReport) -> Value {
    json!({
        "upper": estimate(&r.upper),
        "lower": estimate(&r.lower),
        "lower_witness": estimate(&r.lower_witness),
        "diagnostics": r.diagnostics.iter().map(regularity).collect::<Vec<_>>(),
        "one_sided": r.one_sided,
    })
}

pub fn complementarity(r: &ComplementarityReport) -> Value {
    json!({
        "alpha": r.alpha,
        "lower": estimate(&r.lower),
        "upper_complement": estimate(&r.upper_complement),
        "residual": r.residual,
    })
}

pub fn gap(r: &GapReport) -> Value {
    json!({
        "density_route": estimate(&r.density_route),
        "oracle_route": [r.oracle_route.0, r.oracle_route.1],
        "oracle_estimate": r.oracle_estimate,
        "relative_difference": r.relative_difference,
        "agreement": r.agreement,
        "witness": r.witness.as_ref().map(|w| json!({
            "gap": w.gap,
            "atoms": w.measure.len(),
            "total_variation": w.measure.total_variation(),
            "scan_sup": w.scan_sup,
        })),
    })
}

pub fn radius(r: &RadiusReport) -> Value {
    json!({
        "formula_route": estimate(&r.formula_route),
        "defect_route": [r.defect_route.0, r.defect_route.1],
        "defect_estimate": r.defect_estimate,
        "relative_difference": r.relative_difference,
        "agreement": r.agreement,
    })
}

pub fn perturbation(c: &PerturbationCheck) -> Value {
    json!({
        "baseline": c.baseline,
        "bracket_width": c.bracket_width,
        "radii": c.radii,
        "max_deviation": c.max_deviation,
        "within_bracket": c.within_bracket,
    })
}

fn side(f: &Option<SideFit>) -> Value {
    match f {
        Some(f) => json!({ "rate": f.rate, "power": f.power, "usable": f.usable, "verdict": decay(f.verdict) }),
        None => Value::Null,
    }
}

pub fn cauchy(t: &CauchyDecayTrace) -> Value {
    json!({
        "b": t.b,
        "verdict": decay(t.verdict),
        "upper": side(&t.upper),
        "lower": side(&t.lower),
        "trivial": t.trivial,
        "samples": t.samples.len(),
    })
}

pub fn measure_summary(mu: &AtomicMeasure) -> Value {
    json!({ "atoms": mu.len(), "total_variation": mu.total_variation(), "max_abs_support": mu.max_abs_support() })
}

pub fn herglotz(h: &HerglotzData) -> Value {
    let min = h.c.iter().copied().fold(f64::INFINITY, f64::min);
    let max = h.c.iter().copied().fold(0.0, f64::max);
    json!({
        "c_min": min,
        "c_max": max,
        "b1": h.b1,
        "b2": h.b2,
        "weighted_sum_partials": h.weighted_sum_partials.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
        "weighted_sum_growth": h.weighted_sum_growth,
        "reconstruction_residual": h.reconstruction_residual,
    })
}

pub fn transport(t: &TransportResult) -> Value {
    json!({
        "anchors": [t.anchors.0, t.anchors.1],
        "f": [[t.f[0].re, t.f[0].im], [t.f[1].re, t.f[1].im]],
        "l1_partials": t.l1_partials.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
        "l1_growth": t.l1_growth,
        "partial_fraction_residual": t.partial_fraction_residual,
        "measure": measure_summary(&t.measure),
    })
}

pub fn certificate(c: &TransportCertificate) -> Value {
    json!({
        "a": c.a,
        "rungs": c.rungs.iter().map(|(b, v)| json!({ "b": b, "verdict": decay(*v) })).collect::<Vec<_>>(),
        "scan_sup": c.scan_sup,
        "first_failure": c.first_failure,
        "passed": c.passed,
        "trivial": c.trivial,
    })
}
