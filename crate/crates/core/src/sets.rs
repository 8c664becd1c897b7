//! Separated sequences, represented as finite truncations that remember the
//! law of the infinite set they come from.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numeric::{keyed_uniform, point_key};
use crate::TOL;

/// Which lattice indices a `lattice_minus` set drops.
#[derive(Clone, Debug, PartialEq)]
pub enum Removal {
    /// Drop `n` whenever `n mod modulus` is one of `residues`.
    Residues { modulus: u32, residues: Vec<u32> },
    /// Drop the listed indices.
    Indices(Vec<i64>),
    /// Drop each index independently with probability `fraction`.
    Thinned { fraction: f64, seed: u64 },
    /// Keep exactly the indices that `Thinned` with the same parameters drops.
    ThinnedKept { fraction: f64, seed: u64 },
}

impl Removal {
    pub fn removes(&self, n: i64) -> bool {
        match self {
            Removal::Residues { modulus, residues } => {
                let r = n.rem_euclid(*modulus as i64) as u32;
                residues.contains(&r)
            }
            Removal::Indices(list) => list.binary_search(&n).is_ok(),
            Removal::Thinned { fraction, seed } => thinned(*fraction, *seed, n),
            Removal::ThinnedKept { fraction, seed } => !thinned(*fraction, *seed, n),
        }
    }

    /// The removal whose kept indices are exactly the indices this one drops.
    /// `None` when that complement is a finite set.
    pub fn complement(&self) -> Option<Removal> {
        match self {
            Removal::Residues { modulus, residues } => Some(Removal::Residues {
                modulus: *modulus,
                residues: (0..*modulus).filter(|r| !residues.contains(r)).collect(),
            }),
            Removal::Indices(_) => None,
            Removal::Thinned { fraction, seed } => {
                Some(Removal::ThinnedKept { fraction: *fraction, seed: *seed })
            }
            Removal::ThinnedKept { fraction, seed } => {
                Some(Removal::Thinned { fraction: *fraction, seed: *seed })
            }
        }
    }

    fn normalized(self) -> Result<Removal> {
        match self {
            Removal::Residues { modulus, mut residues } => {
                if modulus == 0 {
                    return Err(invalid("modulus", "must be positive"));
                }
                if residues.iter().any(|r| *r >= modulus) {
                    return Err(invalid("residues", "each residue must be below the modulus"));
                }
                residues.sort_unstable();
                residues.dedup();
                Ok(Removal::Residues { modulus, residues })
            }
            Removal::Indices(mut list) => {
                list.sort_unstable();
                list.dedup();
                Ok(Removal::Indices(list))
            }
            Removal::Thinned { fraction, seed } | Removal::ThinnedKept { fraction, seed }
                if !(0.0..=1.0).contains(&fraction) =>
            {
                let _ = seed;
                Err(invalid("fraction", "must lie in [0, 1]"))
            }
            other => Ok(other),
        }
    }
}

fn thinned(fraction: f64, seed: u64, n: i64) -> bool {
    keyed_uniform(seed, n as u64) < fraction
}

/// How a perturbed set moves each base point.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbMode {
    /// Smallest point of `alpha*Z` strictly above `lambda + delta/2`.
    Snap { alpha: f64 },
    /// Uniform target in `(delta/2, delta)`, rounded into `alpha*Z` inside that interval.
    SnapRandom { alpha: f64, seed: u64 },
    /// Offsets uniform in `(-delta, delta)`.
    Uniform { seed: u64 },
    /// Offsets uniform in `(delta/2, delta)`.
    Positive { seed: u64 },
}

impl PerturbMode {
    fn offset(&self, delta: f64, lambda: f64) -> f64 {
        match *self {
            PerturbMode::Snap { alpha } => {
                let k = libm::floor((lambda + delta / 2.0) / alpha + 1e-9) + 1.0;
                k * alpha - lambda
            }
            PerturbMode::SnapRandom { alpha, seed } => {
                let u = keyed_uniform(seed, point_key(lambda));
                let target = lambda + delta / 2.0 + u * delta / 2.0;
                let mut k = libm::round(target / alpha);
                if k * alpha <= lambda + delta / 2.0 + TOL {
                    k += 1.0;
                }
                if k * alpha >= lambda + delta - TOL {
                    k -= 1.0;
                }
                k * alpha - lambda
            }
            PerturbMode::Uniform { seed } => {
                if delta == 0.0 {
                    return 0.0;
                }
                (2.0 * keyed_uniform(seed, point_key(lambda)) - 1.0) * delta
            }
            PerturbMode::Positive { seed } => {
                let u = keyed_uniform(seed, point_key(lambda));
                delta / 2.0 * (1.0 + 1e-9 + u * (1.0 - 2e-9))
            }
        }
    }

    fn lattice(&self) -> Option<f64> {
        match *self {
            PerturbMode::Snap { alpha } | PerturbMode::SnapRandom { alpha, .. } => Some(alpha),
            _ => None,
        }
    }
}

/// The infinite law behind a truncation.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// The points are the whole set (or a truncation that cannot be extended).
    Explicit,
    Lattice { alpha: f64 },
    LatticeMinus { alpha: f64, removal: Removal },
    Perturbed { base: Box<Generator>, delta: f64, mode: PerturbMode },
}

impl Generator {
    fn generate(&self, radius: f64, known: Option<&[f64]>) -> Result<Vec<f64>> {
        match self {
            Generator::Explicit => Err(Error::OutsideTruncation { x: radius, radius: 0.0 }),
            Generator::Lattice { alpha } => Ok(lattice_range(*alpha, radius).map(|n| *alpha * n as f64).collect()),
            Generator::LatticeMinus { alpha, removal } => Ok(lattice_range(*alpha, radius)
                .filter(|n| !removal.removes(*n))
                .map(|n| *alpha * n as f64)
                .collect()),
            Generator::Perturbed { base, delta, mode } => {
                let base_points = match (base.as_ref(), known) {
                    (Generator::Explicit, Some(pts)) => pts.to_vec(),
                    _ => base.generate(radius + delta.abs(), None)?,
                };
                Ok(base_points
                    .iter()
                    .map(|l| l + mode.offset(*delta, *l))
                    .filter(|x| x.abs() <= radius)
                    .collect())
            }
        }
    }

    /// Spacing `alpha` of a lattice containing every point of the set.
    pub fn lattice_spacing(&self) -> Option<f64> {
        match self {
            Generator::Lattice { alpha } | Generator::LatticeMinus { alpha, .. } => Some(*alpha),
            Generator::Perturbed { mode, .. } => mode.lattice(),
            Generator::Explicit => None,
        }
    }
}

fn lattice_range(alpha: f64, radius: f64) -> impl Iterator<Item = i64> {
    let hi = libm::floor(radius / alpha + 1e-9) as i64;
    -hi..=hi
}

/// Truncation control: a radius, plus an index half-count for lattice sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub radius: f64,
    pub half_count: Option<usize>,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        Ok(Window { radius, half_count: None })
    }

    pub fn lattice(alpha: f64, half_count: usize) -> Result<Self> {
        let mut w = Window::new(alpha * half_count as f64)?;
        w.half_count = Some(half_count);
        Ok(w)
    }
}

/// A separated, strictly increasing truncation of a real sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSet {
    points: Vec<f64>,
    generator: Generator,
    window_radius: f64,
}

fn check_separated(points: &[f64]) -> Result<()> {
    for (i, w) in points.windows(2).enumerate() {
        if !(w[1] - w[0] > TOL) {
            return Err(Error::NotSeparated(i + 1));
        }
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(invalid("points", "must be finite"));
    }
    Ok(())
}

impl DiscreteSet {
    /// A finite set: the points are the whole set, so the window is all of R.
    pub fn explicit(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(|a, b| a.total_cmp(b));
        check_separated(&points)?;
        Ok(DiscreteSet { points, generator: Generator::Explicit, window_radius: f64::INFINITY })
    }

    /// A truncation of an unknown infinite set, valid on `[-radius, radius]`.
    pub fn truncation(mut points: Vec<f64>, radius: f64) -> Result<Self> {
        Window::new(radius)?;
        points.sort_by(|a, b| a.total_cmp(b));
        check_separated(&points)?;
        Ok(DiscreteSet { points, generator: Generator::Explicit, window_radius: radius })
    }

    pub fn from_generator(generator: Generator, radius: f64) -> Result<Self> {
        let generator = validate_generator(generator)?;
        Window::new(radius)?;
        let points = generator.generate(radius, None)?;
        check_separated(&points)?;
        Ok(DiscreteSet { points, generator, window_radius: radius })
    }

    pub fn lattice(alpha: f64, radius: f64) -> Result<Self> {
        Self::from_generator(Generator::Lattice { alpha }, radius)
    }

    pub fn lattice_minus(alpha: f64, removal: Removal, radius: f64) -> Result<Self> {
        Self::from_generator(Generator::LatticeMinus { alpha, removal }, radius)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True for explicit sets with no truncation boundary.
    pub fn is_finite(&self) -> bool {
        matches!(self.generator, Generator::Explicit) && self.window_radius == f64::INFINITY
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.points.partition_point(|p| *p < x - TOL);
        i < self.points.len() && (self.points[i] - x).abs() <= TOL
    }

    /// True when the truncation has points on one side of 0 only.
    pub fn is_one_sided(&self) -> bool {
        !self.points.is_empty()
            && (self.points[0] > -TOL || self.points[self.points.len() - 1] < TOL)
    }

    /// Minimum gap between consecutive points.
    pub fn separation(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::UndefinedSeparation(self.points.len()));
        }
        Ok(self.points.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
    }

    /// Signed counting function: `#(set ∩ [0, x])` for `x >= 0`, `-#(set ∩ (x, 0))` for `x < 0`.
    pub fn counting_function(&self, x: f64) -> Result<i64> {
        if x.abs() > self.window_radius {
            return Err(Error::OutsideTruncation { x, radius: self.window_radius });
        }
        let zero = self.points.partition_point(|p| *p < 0.0);
        if x >= 0.0 {
            let upto = self.points.partition_point(|p| *p <= x);
            Ok((upto - zero) as i64)
        } else {
            let from = self.points.partition_point(|p| *p <= x);
            Ok(-((zero - from) as i64))
        }
    }

    /// The set `{lambda - x}`. The result is an explicit truncation.
    pub fn translate(&self, x: f64) -> DiscreteSet {
        let radius = if self.window_radius.is_infinite() {
            f64::INFINITY
        } else {
            (self.window_radius - x.abs()).max(TOL)
        };
        DiscreteSet {
            points: self.points.iter().map(|p| p - x).collect(),
            generator: Generator::Explicit,
            window_radius: radius,
        }
    }

    /// The same set truncated to `[-radius, radius]`, regenerating from the law when needed.
    pub fn extend(&self, radius: f64) -> Result<DiscreteSet> {
        Window::new(radius)?;
        if radius <= self.window_radius {
            let points = self.points.iter().copied().filter(|p| p.abs() <= radius).collect();
            let window_radius = if self.is_finite() { f64::INFINITY } else { radius };
            return Ok(DiscreteSet { points, generator: self.generator.clone(), window_radius });
        }
        match &self.generator {
            Generator::Explicit => Err(Error::OutsideTruncation { x: radius, radius: self.window_radius }),
            Generator::Perturbed { base, .. } if matches!(**base, Generator::Explicit) => {
                Err(Error::OutsideTruncation { x: radius, radius: self.window_radius })
            }
            g => {
                let points = g.generate(radius, None)?;
                check_separated(&points)?;
                Ok(DiscreteSet { points, generator: g.clone(), window_radius: radius })
            }
        }
    }

    /// The `n` points closest to the origin, ascending; extends generated sets as needed.
    /// Finite or non-extendable sets may return fewer points.
    pub fn central(&self, n: usize) -> Vec<f64> {
        let mut set = self.clone();
        let mut guard = 0;
        while set.points.len() < n && !set.is_finite() && guard < 60 {
            let next = if set.window_radius.is_finite() { set.window_radius * 2.0 } else { break };
            match set.extend(next) {
                Ok(s) => set = s,
                Err(_) => break,
            }
            guard += 1;
        }
        let mut idx: Vec<usize> = (0..set.points.len()).collect();
        idx.sort_by(|&i, &j| {
            let (a, b) = (set.points[i], set.points[j]);
            a.abs().total_cmp(&b.abs()).then(a.total_cmp(&b))
        });
        idx.truncate(n);
        idx.sort_unstable();
        idx.into_iter().map(|i| set.points[i]).collect()
    }

    /// Apply a perturbation law to every point.
    pub fn perturb(&self, delta: f64, mode: PerturbMode) -> Result<(DiscreteSet, Vec<f64>)> {
        if delta < 0.0 {
            return Err(invalid("delta", "must be nonnegative"));
        }
        let radius = self.window_radius;
        let (points, offsets): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .map(|l| {
                let e = mode.offset(delta, *l);
                (l + e, e)
            })
            .filter(|(p, _)| p.abs() <= radius)
            .unzip();
        check_separated(&points)?;
        let set = DiscreteSet {
            points,
            generator: Generator::Perturbed { base: Box::new(self.generator.clone()), delta, mode },
            window_radius: self.window_radius,
        };
        Ok((set, offsets))
    }

    /// Move every point to the smallest point of `alpha*Z` strictly above `lambda + delta/2`.
    /// Offsets land in `(delta/2, delta)`.
    pub fn snap_to_lattice(&self, delta: f64, alpha: f64) -> Result<(DiscreteSet, Vec<f64>)> {
        self.check_snap(delta, alpha)?;
        self.perturb(delta, PerturbMode::Snap { alpha })
    }

    /// Seeded variant of [`DiscreteSet::snap_to_lattice`].
    pub fn snap_to_lattice_random(&self, delta: f64, alpha: f64, seed: u64) -> Result<(DiscreteSet, Vec<f64>)> {
        self.check_snap(delta, alpha)?;
        self.perturb(delta, PerturbMode::SnapRandom { alpha, seed })
    }

    fn check_snap(&self, delta: f64, alpha: f64) -> Result<()> {
        if !(delta > 0.0) || !(alpha > 0.0) {
            return Err(invalid("delta/alpha", "must be positive"));
        }
        if self.points.len() >= 2 {
            let limit = self.separation()? / 4.0;
            if delta >= limit {
                return Err(Error::PerturbationTooLarge { delta, limit });
            }
        }
        if alpha > delta / 4.0 + TOL {
            return Err(Error::LatticeTooCoarse { alpha, limit: delta / 4.0 });
        }
        Ok(())
    }

    /// `alpha` such that the set lies in `alpha*Z`, when known from the generator.
    pub fn lattice_spacing(&self) -> Option<f64> {
        self.generator.lattice_spacing()
    }

    /// The complement `alpha*Z \ set`, with the same window.
    pub fn lattice_complement(&self) -> Result<DiscreteSet> {
        let alpha = self.lattice_spacing().ok_or(Error::NotLatticeSubset)?;
        match &self.generator {
            Generator::Lattice { .. } => DiscreteSet::lattice_minus(
                alpha,
                Removal::Residues { modulus: 1, residues: alloc::vec![0] },
                self.window_radius,
            ),
            Generator::LatticeMinus { removal, .. } => match removal.complement() {
                Some(c) => DiscreteSet::lattice_minus(alpha, c, self.window_radius),
                None => match removal {
                    Removal::Indices(list) => {
                        DiscreteSet::explicit(list.iter().map(|n| alpha * *n as f64).collect())
                    }
                    _ => Err(Error::NotLatticeSubset),
                },
            },
            _ => {
                let taken: Vec<i64> = self.points.iter().map(|p| libm::round(p / alpha) as i64).collect();
                let points = lattice_range(alpha, self.window_radius)
                    .filter(|n| taken.binary_search(n).is_err())
                    .map(|n| alpha * n as f64)
                    .collect();
                DiscreteSet::truncation(points, self.window_radius)
            }
        }
    }

    /// Density known in closed form from the generator, if any.
    pub fn exact_density(&self) -> Option<f64> {
        match &self.generator {
            Generator::Explicit if self.is_finite() => Some(0.0),
            Generator::Lattice { alpha } => Some(1.0 / alpha),
            Generator::LatticeMinus { alpha, removal } => match removal {
                Removal::Residues { modulus, residues } => {
                    Some((*modulus as usize - residues.len()) as f64 / (*modulus as f64 * alpha))
                }
                Removal::Indices(_) => Some(1.0 / alpha),
                _ => None,
            },
            _ => None,
        }
    }
}

fn validate_generator(g: Generator) -> Result<Generator> {
    match g {
        Generator::Lattice { alpha } | Generator::LatticeMinus { alpha, .. } if !(alpha > 0.0) => {
            Err(invalid("alpha", "must be positive"))
        }
        Generator::LatticeMinus { alpha, removal } => {
            Ok(Generator::LatticeMinus { alpha, removal: removal.normalized()? })
        }
        Generator::Perturbed { base, delta, mode } => {
            if !(delta >= 0.0) {
                return Err(invalid("delta", "must be nonnegative"));
            }
            if let Some(alpha) = mode.lattice() {
                if !(alpha > 0.0) {
                    return Err(invalid("alpha", "must be positive"));
                }
                if alpha > delta / 4.0 + TOL {
                    return Err(Error::LatticeTooCoarse { alpha, limit: delta / 4.0 });
                }
            }
            Ok(Generator::Perturbed { base: Box::new(validate_generator(*base)?), delta, mode })
        }
        g => Ok(g),
    }
}
