//! Command pipelines. Each returns a report body; writing files is left to [`emit`].

use std::path::{Path, PathBuf};

use gapkit_core::completeness::{radius_estimate, RadiusOptions};
use gapkit_core::density::{density_report, DensityOptions, DEFAULT_RADIUS};
use gapkit_core::gap::{
    cauchy_gap_test, ft_scan_series, gap_characteristic_estimate, max_scan_step, scan_shows_gap, GapOptions,
    DEFAULT_Y_MAX,
};
use gapkit_core::AtomicMeasure;
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig};
use crate::dsl::{parse_removal, parse_set_dsl, BuildError, DslError, SetSpec};
use crate::io::{self, IoError, SCAN_HEADER, TRACE_HEADER};
use crate::report;
use crate::verify::{self, default_transport_base, Suite, VerifyError, VerifyParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    Gap,
    Radius,
    Gaptest,
    Transport,
    Verify(Option<Suite>),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Gap => "gap",
            Command::Radius => "radius",
            Command::Gaptest => "gaptest",
            Command::Transport => "transport",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("--{key}: {source}")]
    Dsl { key: &'static str, source: DslError },
    #[error("missing --{0}")]
    Missing(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Core(#[from] gapkit_core::Error),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: IoError },
}

impl CliError {
    /// Bad input from the user, as opposed to a pipeline failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, CliError::Dsl { .. } | CliError::Missing(_) | CliError::Config(_))
    }
}

fn io_err(path: &Path) -> impl FnOnce(IoError) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// A finished run: the report, the CSV series and the measure file to write.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub passed: Option<bool>,
    pub csv: Option<(&'static str, Vec<(f64, f64)>)>,
    pub measure: Option<AtomicMeasure>,
}

fn spec(key: &'static str, text: Option<&String>) -> Result<Option<SetSpec>, CliError> {
    text.map(|t| parse_set_dsl(t).map_err(|source| CliError::Dsl { key, source })).transpose()
}

fn required_set(cfg: &RunConfig) -> Result<SetSpec, CliError> {
    spec("set", cfg.set.as_ref())?.ok_or(CliError::Missing("set"))
}

fn density_opts(cfg: &RunConfig) -> DensityOptions {
    DensityOptions { radius: cfg.radius.unwrap_or(DEFAULT_RADIUS), ..Default::default() }
}

/// The set argument is built to a truncation radius of 16 for generators that
/// extend on demand; explicit and file sets keep their own window.
const BUILD_RADIUS: f64 = 16.0;

/// Parse the configuration and run the pipeline; no files are written.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut out = Outcome { report: Value::Null, passed: None, csv: None, measure: None };
    out.report = match command {
        Command::Density => {
            let set = required_set(cfg)?.build(BUILD_RADIUS)?;
            let r = density_report(&set, &density_opts(cfg))?;
            out.csv = r.diagnostics.first().map(|d| ("r,partial", d.partial_integrals.clone()));
            report::density(&r)
        }
        Command::Gap => {
            let set = required_set(cfg)?.build(BUILD_RADIUS)?;
            let opts =
                GapOptions { density: density_opts(cfg), window: cfg.window.unwrap_or(256), ..Default::default() };
            let r = gap_characteristic_estimate(&set, &opts)?;
            if let Some(w) = &r.witness {
                let range = 1.5 * w.gap.max(1.0);
                let step = max_scan_step(&w.measure).min(range / 512.0);
                out.csv = Some((SCAN_HEADER, ft_scan_series(&w.measure, (-range, range), step)?));
                out.measure = Some(w.measure.clone());
            }
            report::gap(&r)
        }
        Command::Radius => {
            let set = required_set(cfg)?.build(BUILD_RADIUS)?;
            let opts = RadiusOptions {
                density: density_opts(cfg),
                window: cfg.window.unwrap_or(256),
                trials: cfg.trials.unwrap_or(gapkit_core::completeness::DEFAULT_TRIALS),
                ..Default::default()
            };
            report::radius(&radius_estimate(&set, &opts)?)
        }
        Command::Gaptest => {
            let path = cfg.measure.as_ref().ok_or(CliError::Missing("measure"))?;
            let mu = io::read_measure(path).map_err(io_err(path))?;
            let b = cfg.b.ok_or(CliError::Missing("b"))?;
            let trace = cauchy_gap_test(&mu, b, cfg.y_max.unwrap_or(DEFAULT_Y_MAX))?;
            let scan = scan_shows_gap(&mu, b)?;
            out.csv = Some((TRACE_HEADER, trace.samples.clone()));
            json!({ "measure": report::measure_summary(&mu), "cauchy": report::cauchy(&trace), "scan_gap": scan })
        }
        Command::Transport => {
            let base = spec("base", cfg.base.as_ref())?.unwrap_or_else(default_transport_base);
            let gap = cfg.gap.unwrap_or(2.0);
            let run = verify::run_transport(
                &base,
                cfg.delta.unwrap_or(0.2),
                cfg.seed(),
                gap,
                cfg.window.unwrap_or(512),
            )?;
            out.measure = Some(run.result.measure.clone());
            out.passed = Some(run.certificate.passed);
            json!({
                "herglotz": report::herglotz(&run.herglotz),
                "transport": report::transport(&run.result),
                "l1_partials": run.result.l1_partials.iter().map(|(r, v)| json!([r, v])).collect::<Vec<_>>(),
                "certificates": [report::certificate(&run.certificate), report::certificate(&run.above)],
            })
        }
        Command::Verify(suite) => {
            let params = verify_params(cfg)?;
            let suites = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
            let mut reports = Vec::new();
            let mut passed = true;
            for s in suites {
                let r = verify::run_verify(s, &params)?;
                passed &= r.passed;
                reports.push(r.to_json());
            }
            out.passed = Some(passed);
            Value::Array(reports)
        }
    };
    Ok(out)
}

pub fn verify_params(cfg: &RunConfig) -> Result<VerifyParams, CliError> {
    let removed = cfg
        .removed
        .as_ref()
        .map(|t| parse_removal(t).map_err(|source| CliError::Dsl { key: "removed", source }))
        .transpose()?;
    Ok(VerifyParams {
        alpha: cfg.alpha,
        removed,
        set: spec("set", cfg.set.as_ref())?,
        base: spec("base", cfg.base.as_ref())?,
        delta: cfg.delta,
        gap: cfg.gap,
        seed: cfg.seed(),
        window: cfg.window,
        radius: cfg.radius.unwrap_or(DEFAULT_RADIUS),
        trials: cfg.trials.unwrap_or(5),
    })
}

/// The full JSON document for an outcome.
pub fn document(command: Command, cfg: &RunConfig, out: &Outcome) -> String {
    let mut config = cfg.to_json();
    if let (Command::Verify(Some(s)), Value::Object(m)) = (command, &mut config) {
        m.insert("suite".into(), Value::String(s.name().into()));
    }
    report::to_text(&report::envelope(command.name(), config, out.report.clone(), out.passed))
}

/// Write the JSON report (to `--json` or stdout), the CSV series and the measure file.
pub fn emit(command: Command, cfg: &RunConfig, out: &Outcome, stdout: &mut impl std::io::Write) -> Result<(), CliError> {
    let text = document(command, cfg, out);
    match &cfg.json {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io { path: path.clone(), source: e.into() })?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e.into() })?,
    }
    if let (Some(path), Some((header, rows))) = (&cfg.csv, &out.csv) {
        io::write_csv(path, header, rows).map_err(io_err(path))?;
    }
    if let (Some(path), Some(mu)) = (&cfg.witness, &out.measure) {
        io::write_measure(path, mu).map_err(io_err(path))?;
    }
    Ok(())
}
