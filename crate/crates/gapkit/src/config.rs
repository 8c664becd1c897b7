//! Run configuration: a TOML file with the same keys as the flags; flags win.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub set: Option<String>,
    pub base: Option<String>,
    pub radius: Option<f64>,
    pub window: Option<usize>,
    pub delta: Option<f64>,
    pub gap: Option<f64>,
    pub b: Option<f64>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub removed: Option<String>,
    pub trials: Option<usize>,
    pub y_max: Option<f64>,
    pub measure: Option<PathBuf>,
    pub witness: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}: {1}")]
    Read(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Parse(PathBuf, toml::de::Error),
    #[error("{key} = {value} is out of range ({range})")]
    Range { key: &'static str, value: String, range: &'static str },
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => { $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )* };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(path.to_path_buf(), e))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn merged(&self, flags: &RunConfig) -> RunConfig {
        let mut out = self.clone();
        overlay!(out, flags, set, base, radius, window, delta, gap, b, seed, alpha, removed, trials, y_max, measure, witness, json, csv);
        out
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key, value: String, range| Err(ConfigError::Range { key, value, range });
        if let Some(r) = self.radius {
            if !(r > 0.0 && r <= 1e6) {
                return bad("radius", r.to_string(), "0 < radius <= 1e6");
            }
        }
        if let Some(w) = self.window {
            if !(8..=4096).contains(&w) {
                return bad("window", w.to_string(), "8..=4096");
            }
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0) {
                return bad("delta", d.to_string(), "delta >= 0");
            }
        }
        for (key, v) in [("gap", self.gap), ("alpha", self.alpha), ("y_max", self.y_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(key, v.to_string(), "positive");
                }
            }
        }
        if let Some(b) = self.b {
            if !(b >= 0.0 && b.is_finite()) {
                return bad("b", b.to_string(), "b >= 0");
            }
        }
        if let Some(t) = self.trials {
            if !(1..=1000).contains(&t) {
                return bad("trials", t.to_string(), "1..=1000");
            }
        }
        Ok(())
    }

    /// The knobs that affect results, for the report body (output paths excluded).
    pub fn to_json(&self) -> Value {
        let mut c = self.clone();
        c.json = None;
        c.csv = None;
        c.witness = None;
        serde_json::to_value(c).expect("config is serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let file: RunConfig = toml::from_str("set = \"lattice:alpha=1\"\nradius = 100.0\nseed = 3\n").unwrap();
        let flags = RunConfig { radius: Some(50.0), ..Default::default() };
        let m = file.merged(&flags);
        assert_eq!(m.radius, Some(50.0));
        assert_eq!(m.seed(), 3);
        assert_eq!(m.set.as_deref(), Some("lattice:alpha=1"));
        assert!(toml::from_str::<RunConfig>("sett = 1").is_err());
        assert!(RunConfig { window: Some(2), ..Default::default() }.validate().is_err());
    }
}
