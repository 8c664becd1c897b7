//! Set specification language.
//!
//! ```text
//! lattice:alpha=1
//! lattice-minus:alpha=1,residues=0 mod 3
//! lattice-minus:alpha=1,remove=0 1 2
//! lattice-minus:alpha=0.5,thin=0.3,seed=0
//! explicit:0,0.3,1.0
//! file:points.txt
//! perturb:base=(lattice:alpha=1),delta=0.2,mode=snap,alpha=0.05
//! translate:base=(lattice:alpha=1),offset=0.5
//! ```

use std::fmt;
use std::path::Path;

use gapkit_core::{DiscreteSet, PerturbMode, Removal};

#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    Lattice { alpha: f64 },
    LatticeMinus { alpha: f64, removal: Removal },
    Explicit { points: Vec<f64> },
    File { path: String },
    Perturb { base: Box<SetSpec>, delta: f64, mode: PerturbMode },
    /// Every point moved by `+offset`.
    Translate { base: Box<SetSpec>, offset: f64 },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("at position {position}: expected {expected}, found {found:?}")]
pub struct DslError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Core(#[from] gapkit_core::Error),
    #[error("{path}: {source}")]
    File { path: String, source: crate::io::IoError },
}

fn err(position: usize, expected: impl Into<String>, found: &str) -> DslError {
    DslError { position, expected: expected.into(), found: found.to_string() }
}

pub fn parse_set_dsl(text: &str) -> Result<SetSpec, DslError> {
    parse_at(text.trim(), text.len() - text.trim_start().len())
}

struct Field<'a> {
    key: &'a str,
    value: &'a str,
    pos: usize,
}

/// Split `k=v,k=v` at top-level commas; values wrapped in parentheses are unwrapped.
fn fields(body: &str, base: usize) -> Result<Vec<Field<'_>>, DslError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = body.as_bytes();
    for i in 0..=bytes.len() {
        let c = bytes.get(i).copied();
        match c {
            Some(b'(') => depth += 1,
            Some(b')') => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(base + i, "balanced parentheses", ")"));
                }
            }
            Some(b',') | None if depth == 0 => {
                let part = &body[start..i];
                if !part.trim().is_empty() {
                    let eq = part.find('=').ok_or_else(|| err(base + start, "key=value", part))?;
                    let key = part[..eq].trim();
                    let mut value = part[eq + 1..].trim();
                    let mut vpos = base + start + eq + 1;
                    if value.starts_with('(') && value.ends_with(')') {
                        value = &value[1..value.len() - 1];
                        vpos += 1;
                    }
                    out.push(Field { key, value, pos: vpos });
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err(base + body.len(), "closing parenthesis", ""));
    }
    Ok(out)
}

fn number(f: &Field) -> Result<f64, DslError> {
    f.value.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| err(f.pos, "a number", f.value))
}

fn positive(f: &Field) -> Result<f64, DslError> {
    let x = number(f)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(err(f.pos, "a positive number", f.value))
    }
}

fn unsigned(f: &Field) -> Result<u64, DslError> {
    f.value.parse::<u64>().map_err(|_| err(f.pos, "a nonnegative integer", f.value))
}

fn residues(f: &Field) -> Result<Removal, DslError> {
    let words: Vec<&str> = f.value.split_whitespace().collect();
    let m = words.iter().position(|w| *w == "mod").ok_or_else(|| err(f.pos, "'<residues> mod <modulus>'", f.value))?;
    if m == 0 || m + 2 != words.len() {
        return Err(err(f.pos, "'<residues> mod <modulus>'", f.value));
    }
    let modulus: u32 = words[m + 1].parse().ok().filter(|m| *m > 0).ok_or_else(|| err(f.pos, "a positive modulus", words[m + 1]))?;
    let mut list = Vec::new();
    for w in &words[..m] {
        let r: u32 = w.parse().ok().filter(|r| *r < modulus).ok_or_else(|| err(f.pos, format!("a residue below {modulus}"), w))?;
        list.push(r);
    }
    Ok(Removal::Residues { modulus, residues: list })
}

fn indices(f: &Field) -> Result<Removal, DslError> {
    let mut list = Vec::new();
    for w in f.value.split_whitespace() {
        list.push(w.parse::<i64>().map_err(|_| err(f.pos, "an integer index", w))?);
    }
    Ok(Removal::Indices(list))
}

fn fraction(f: &Field) -> Result<f64, DslError> {
    let x = number(f)?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(err(f.pos, "a fraction in [0, 1]", f.value))
    }
}

struct Keys<'a> {
    fields: Vec<Field<'a>>,
    end: usize,
}

impl<'a> Keys<'a> {
    fn check(&self, allowed: &[&str]) -> Result<(), DslError> {
        for f in &self.fields {
            if !allowed.contains(&f.key) {
                return Err(err(f.pos.saturating_sub(f.key.len() + 1), format!("one of {}", allowed.join(", ")), f.key));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Field<'a>> {
        self.fields.iter().find(|f| f.key == key)
    }

    fn need(&self, key: &str) -> Result<&Field<'a>, DslError> {
        self.get(key).ok_or_else(|| err(self.end, format!("key '{key}'"), ""))
    }
}

fn parse_at(text: &str, base: usize) -> Result<SetSpec, DslError> {
    let colon = text.find(':').ok_or_else(|| err(base + text.len(), "':' after the set kind", text))?;
    let kind = &text[..colon];
    let body = &text[colon + 1..];
    let bpos = base + colon + 1;
    match kind {
        "explicit" => {
            let mut points = Vec::new();
            let mut offset = 0;
            for part in body.split(',') {
                let t = part.trim();
                if !t.is_empty() {
                    let x = t.parse::<f64>().ok().filter(|x| x.is_finite());
                    points.push(x.ok_or_else(|| err(bpos + offset, "a number", t))?);
                }
                offset += part.len() + 1;
            }
            Ok(SetSpec::Explicit { points })
        }
        "file" => {
            if body.trim().is_empty() {
                return Err(err(bpos, "a path", ""));
            }
            Ok(SetSpec::File { path: body.trim().to_string() })
        }
        "lattice" | "lattice-minus" | "perturb" | "translate" => {
            let keys = Keys { fields: fields(body, bpos)?, end: base + text.len() };
            match kind {
                "lattice" => {
                    keys.check(&["alpha"])?;
                    Ok(SetSpec::Lattice { alpha: positive(keys.need("alpha")?)? })
                }
                "lattice-minus" => {
                    keys.check(&["alpha", "residues", "remove", "thin", "thin-complement", "seed"])?;
                    let alpha = positive(keys.need("alpha")?)?;
                    let seed = keys.get("seed").map(unsigned).transpose()?.unwrap_or(0);
                    let removal = if let Some(f) = keys.get("residues") {
                        residues(f)?
                    } else if let Some(f) = keys.get("remove") {
                        indices(f)?
                    } else if let Some(f) = keys.get("thin") {
                        Removal::Thinned { fraction: fraction(f)?, seed }
                    } else if let Some(f) = keys.get("thin-complement") {
                        Removal::ThinnedKept { fraction: fraction(f)?, seed }
                    } else {
                        return Err(err(keys.end, "one of residues, remove, thin, thin-complement", ""));
                    };
                    Ok(SetSpec::LatticeMinus { alpha, removal })
                }
                "perturb" => {
                    keys.check(&["base", "delta", "mode", "alpha", "seed"])?;
                    let b = keys.need("base")?;
                    let base_spec = parse_at(b.value, b.pos)?;
                    let delta = number(keys.need("delta")?)?;
                    if delta < 0.0 {
                        return Err(err(keys.need("delta")?.pos, "a nonnegative number", keys.need("delta")?.value));
                    }
                    let seed = keys.get("seed").map(unsigned).transpose()?.unwrap_or(0);
                    let m = keys.need("mode")?;
                    let mode = match m.value {
                        "snap" => PerturbMode::Snap { alpha: positive(keys.need("alpha")?)? },
                        "snap-random" => PerturbMode::SnapRandom { alpha: positive(keys.need("alpha")?)?, seed },
                        "uniform" => PerturbMode::Uniform { seed },
                        "positive" => PerturbMode::Positive { seed },
                        other => return Err(err(m.pos, "one of snap, snap-random, uniform, positive", other)),
                    };
                    Ok(SetSpec::Perturb { base: Box::new(base_spec), delta, mode })
                }
                _ => {
                    keys.check(&["base", "offset"])?;
                    let b = keys.need("base")?;
                    let base_spec = parse_at(b.value, b.pos)?;
                    Ok(SetSpec::Translate { base: Box::new(base_spec), offset: number(keys.need("offset")?)? })
                }
            }
        }
        other => Err(err(base, "one of lattice, lattice-minus, explicit, file, perturb, translate", other)),
    }
}

/// `"0 1 mod 5"` for residues, or a plain list of lattice indices.
pub fn parse_removal(text: &str) -> Result<Removal, DslError> {
    let f = Field { key: "removed", value: text.trim(), pos: 0 };
    if f.value.contains("mod") {
        residues(&f)
    } else {
        indices(&f)
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Lattice { alpha } => write!(f, "lattice:alpha={alpha}"),
            SetSpec::LatticeMinus { alpha, removal } => {
                write!(f, "lattice-minus:alpha={alpha},")?;
                match removal {
                    Removal::Residues { modulus, residues } => write!(f, "residues={} mod {modulus}", join(residues, " ")),
                    Removal::Indices(list) => write!(f, "remove={}", join(list, " ")),
                    Removal::Thinned { fraction, seed } => write!(f, "thin={fraction},seed={seed}"),
                    Removal::ThinnedKept { fraction, seed } => write!(f, "thin-complement={fraction},seed={seed}"),
                }
            }
            SetSpec::Explicit { points } => write!(f, "explicit:{}", join(points, ",")),
            SetSpec::File { path } => write!(f, "file:{path}"),
            SetSpec::Perturb { base, delta, mode } => {
                write!(f, "perturb:base=({base}),delta={delta},")?;
                match mode {
                    PerturbMode::Snap { alpha } => write!(f, "mode=snap,alpha={alpha}"),
                    PerturbMode::SnapRandom { alpha, seed } => write!(f, "mode=snap-random,alpha={alpha},seed={seed}"),
                    PerturbMode::Uniform { seed } => write!(f, "mode=uniform,seed={seed}"),
                    PerturbMode::Positive { seed } => write!(f, "mode=positive,seed={seed}"),
                }
            }
            SetSpec::Translate { base, offset } => write!(f, "translate:base=({base}),offset={offset}"),
        }
    }
}

impl SetSpec {
    /// Build the set with a truncation of radius `radius`; generated sets extend on demand.
    pub fn build(&self, radius: f64) -> Result<DiscreteSet, BuildError> {
        Ok(match self {
            SetSpec::Lattice { alpha } => DiscreteSet::lattice(*alpha, radius)?,
            SetSpec::LatticeMinus { alpha, removal } => DiscreteSet::lattice_minus(*alpha, removal.clone(), radius)?,
            SetSpec::Explicit { points } => DiscreteSet::explicit(points.clone())?,
            SetSpec::File { path } => {
                let points = crate::io::read_points(Path::new(path))
                    .map_err(|source| BuildError::File { path: path.clone(), source })?;
                DiscreteSet::explicit(points)?
            }
            SetSpec::Perturb { base, delta, mode } => base.build(radius)?.perturb(*delta, mode.clone())?.0,
            SetSpec::Translate { base, offset } => base.build(radius + offset.abs())?.translate(-*offset),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(parse_set_dsl("lattice:alpha=0.5").unwrap(), SetSpec::Lattice { alpha: 0.5 });
        let s = parse_set_dsl("lattice-minus:alpha=1,residues=0 mod 3").unwrap();
        let set = s.build(10.0).unwrap();
        assert!(set.points().iter().all(|p| (*p as i64) % 3 != 0));
        assert_eq!(set.len(), 14);
        let e = parse_set_dsl("lattice:alpha=-1").unwrap_err();
        assert_eq!(e.position, 14);
        assert!(e.expected.contains("positive"));
        let e = parse_set_dsl("lattice:beta=1").unwrap_err();
        assert_eq!(e.found, "beta");
        assert!(parse_set_dsl("lattice-minus:alpha=1,residues=3 mod 3").is_err());
        assert!(parse_set_dsl("lattice-minus:alpha=1,residues=0 mod").is_err());
        assert!(parse_set_dsl("cube:alpha=1").is_err());
        assert!(parse_set_dsl("explicit:0,x").is_err());
    }

    #[test]
    fn perturb_and_translate() {
        let s = parse_set_dsl("perturb:base=(lattice:alpha=1),delta=0.2,mode=snap,alpha=0.05").unwrap();
        let set = s.build(5.0).unwrap();
        assert!(set.points().iter().all(|p| ((p - p.floor()) - 0.15).abs() < 1e-9));
        let bare = parse_set_dsl("perturb:base=lattice:alpha=1,delta=0.2,mode=snap,alpha=0.05").unwrap();
        assert_eq!(bare, s);
        let t = parse_set_dsl("translate:base=(lattice:alpha=1),offset=0.5").unwrap().build(3.0).unwrap();
        assert_eq!(t.points()[0], -2.5);
    }

    #[test]
    fn round_trip() {
        for text in [
            "lattice:alpha=1",
            "lattice-minus:alpha=1,residues=0 1 mod 5",
            "lattice-minus:alpha=2,remove=0 -1 7",
            "lattice-minus:alpha=0.5,thin=0.3,seed=0",
            "lattice-minus:alpha=0.5,thin-complement=0.3,seed=4",
            "explicit:0,0.3,1",
            "file:/tmp/x.txt",
            "perturb:base=(lattice:alpha=1),delta=0.2,mode=snap,alpha=0.05",
            "perturb:base=(perturb:base=(lattice:alpha=2),delta=0.1,mode=uniform,seed=3),delta=0.05,mode=positive,seed=1",
            "perturb:base=(lattice:alpha=1),delta=0.2,mode=snap-random,alpha=0.05,seed=9",
            "translate:base=(lattice:alpha=1),offset=0.5",
        ] {
            let spec = parse_set_dsl(text).unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(parse_set_dsl(&spec.to_string()).unwrap(), spec);
        }
    }
}
