//! Finite measure-space models: atomic families, and uniform sampled
//! intervals standing in for non-atomic Lebesgue measure. Functions are
//! piecewise constant, one value per atom or cell, so every integral is a
//! finite weighted sum.

use std::ops::Range;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureSpace {
    Atomic {
        masses: Vec<f64>,
    },
    /// `[0, length]` cut into `cells` equal cells.
    Interval {
        length: f64,
        cells: usize,
    },
}

impl MeasureSpace {
    pub fn atomic(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidInput("atomic space needs at least one atom".into()));
        }
        if let Some(m) = masses.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput(format!("atom masses must be positive and finite, got {m}")));
        }
        Ok(MeasureSpace::Atomic { masses })
    }

    pub fn equal_atoms(count: usize, mass: f64) -> Result<Self> {
        Self::atomic(vec![mass; count])
    }

    pub fn interval(length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("interval length must be positive, got {length}")));
        }
        if cells == 0 {
            return Err(Error::InvalidInput("interval needs at least one cell".into()));
        }
        Ok(MeasureSpace::Interval { length, cells })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, MeasureSpace::Atomic { .. })
    }

    /// Number of atoms or cells.
    pub fn len(&self) -> usize {
        match self {
            MeasureSpace::Atomic { masses } => masses.len(),
            MeasureSpace::Interval { cells, .. } => *cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, i: usize) -> f64 {
        match self {
            MeasureSpace::Atomic { masses } => masses[i],
            MeasureSpace::Interval { length, cells } => length / *cells as f64,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            MeasureSpace::Atomic { masses } => masses.iter().sum(),
            MeasureSpace::Interval { length, .. } => *length,
        }
    }

    pub fn mass_of(&self, set: &Range<usize>) -> f64 {
        set.clone().map(|i| self.weight(i)).sum()
    }

    /// Cell midpoints of a sampled interval; atom indices for atomic spaces.
    pub fn sample_points(&self) -> Vec<f64> {
        match self {
            MeasureSpace::Atomic { masses } => (0..masses.len()).map(|i| i as f64).collect(),
            MeasureSpace::Interval { length, cells } => {
                let h = length / *cells as f64;
                (0..*cells).map(|i| (i as f64 + 0.5) * h).collect()
            }
        }
    }

    /// `Σ_i w_i · g(values_i)`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, f: &MeasurableFn) -> Result<f64> {
        if f.space.as_ref() != self {
            return Err(Error::DimensionMismatch("function lives on a different space".into()));
        }
        Ok(f.integrate(g))
    }
}

/// A piecewise-constant function: one value per atom or cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableFn {
    values: Vec<f64>,
    space: Arc<MeasureSpace>,
}

impl MeasurableFn {
    pub fn new(space: &Arc<MeasureSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a space of {} pieces",
                values.len(),
                space.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("function values must be finite, got {v}")));
        }
        Ok(MeasurableFn { values, space: Arc::clone(space) })
    }

    pub fn zero(space: &Arc<MeasureSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    pub fn constant(space: &Arc<MeasureSpace>, c: f64) -> Self {
        MeasurableFn { values: vec![c; space.len()], space: Arc::clone(space) }
    }

    /// `g` sampled at cell midpoints (or atom indices).
    pub fn sampled<G: Fn(f64) -> f64>(space: &Arc<MeasureSpace>, g: G) -> Result<Self> {
        let values = space.sample_points().into_iter().map(g).collect();
        Self::new(space, values)
    }

    /// `c · χ_set`.
    pub fn indicator(space: &Arc<MeasureSpace>, set: Range<usize>, c: f64) -> Result<Self> {
        if set.end > space.len() || set.start > set.end {
            return Err(Error::DimensionMismatch(format!("set {set:?} outside a space of {} pieces", space.len())));
        }
        let mut values = vec![0.0; space.len()];
        values[set].iter_mut().for_each(|v| *v = c);
        Ok(MeasurableFn { values, space: Arc::clone(space) })
    }

    /// Independent uniform values in `[low, high)`; deterministic per seed.
    pub fn random(space: &Arc<MeasureSpace>, seed: u64, low: f64, high: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(space, &mut rng, low, high)
    }

    pub fn random_with<R: Rng>(space: &Arc<MeasureSpace>, rng: &mut R, low: f64, high: f64) -> Self {
        let values = (0..space.len()).map(|_| rng.gen_range(low..high)).collect();
        MeasurableFn { values, space: Arc::clone(space) }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn same_space(&self, other: &MeasurableFn) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    fn check_same(&self, other: &MeasurableFn) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("functions live on different spaces".into()))
        }
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.values.iter().enumerate().map(|(i, &v)| self.space.weight(i) * g(v)).sum()
    }

    /// `∫|f| dμ`.
    pub fn l1_norm(&self) -> f64 {
        self.integrate(f64::abs)
    }

    pub fn map<G: Fn(f64) -> f64>(&self, g: G) -> MeasurableFn {
        MeasurableFn { values: self.values.iter().map(|&v| g(v)).collect(), space: Arc::clone(&self.space) }
    }

    pub fn scale(&self, a: f64) -> MeasurableFn {
        self.map(|v| a * v)
    }

    pub fn zip_with<G: Fn(f64, f64) -> f64>(&self, other: &MeasurableFn, g: G) -> Result<MeasurableFn> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect();
        Ok(MeasurableFn { values, space: Arc::clone(&self.space) })
    }

    pub fn add(&self, other: &MeasurableFn) -> Result<MeasurableFn> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MeasurableFn) -> Result<MeasurableFn> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `f · χ_set`.
    pub fn restrict(&self, set: &Range<usize>) -> MeasurableFn {
        let values = self.values.iter().enumerate().map(|(i, &v)| if set.contains(&i) { v } else { 0.0 }).collect();
        MeasurableFn { values, space: Arc::clone(&self.space) }
    }

    /// `f · χ_{X∖set}`.
    pub fn restrict_complement(&self, set: &Range<usize>) -> MeasurableFn {
        let values = self.values.iter().enumerate().map(|(i, &v)| if set.contains(&i) { 0.0 } else { v }).collect();
        MeasurableFn { values, space: Arc::clone(&self.space) }
    }
}

/// A prefix of cells whose ν-mass is within one cell's ν-mass of `t`.
///
/// Only sampled intervals qualify: an exact-mass subset needs the measure to
/// be divisible, which atoms are not.
pub fn find_subset_with_mass(space: &MeasureSpace, nu_weights: &[f64], t: f64) -> Result<Range<usize>> {
    if space.is_atomic() {
        return Err(Error::IndivisibleAtoms);
    }
    if nu_weights.len() != space.len() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} cells", nu_weights.len(), space.len())));
    }
    if let Some(w) = nu_weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidInput(format!("nu weights must be finite and >= 0, got {w}")));
    }
    let mut prefix = Vec::with_capacity(nu_weights.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &w in nu_weights {
        acc += w;
        prefix.push(acc);
    }
    let total = acc;
    if !(t >= 0.0 && t <= total * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("target mass {t} outside [0, {total}]")));
    }
    let j = prefix.partition_point(|&s| s < t);
    let end = if j == 0 {
        0
    } else if j >= prefix.len() {
        prefix.len() - 1
    } else if (prefix[j - 1] - t).abs() <= (prefix[j] - t).abs() {
        j - 1
    } else {
        j
    };
    Ok(0..end)
}

/// `f_n = sign(f)·min(⌊|f|·2ⁿ⌋/2ⁿ, n)`: dyadic quantisation at resolution
/// `2⁻ⁿ` with truncation at level `n`. `|f_n| <= |f|` and `|f_n|` increases
/// with `n`.
pub fn simple_approximation(f: &MeasurableFn, n: u32) -> MeasurableFn {
    let scale = 2f64.powi(n as i32);
    let cap = n as f64;
    f.map(|v| {
        let q = ((v.abs() * scale).floor() / scale).min(cap);
        q.copysign(v)
    })
}

/// `m` pairwise-disjoint pieces of positive measure: equal contiguous blocks
/// on intervals, single atoms on atomic spaces.
pub fn disjoint_positive_family(space: &MeasureSpace, m: usize) -> Result<Vec<Range<usize>>> {
    let available = space.len();
    if m > available {
        return Err(Error::Capacity { requested: m, available });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let block = if space.is_atomic() { 1 } else { available / m };
    Ok((0..m).map(|i| i * block..(i + 1) * block).collect())
}
