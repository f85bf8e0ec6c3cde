//! Point sets in the unit cube, their generators, and the homogeneity check.

mod homogeneity;
mod io;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub use homogeneity::{
    check_homogeneity, Cube, HomogeneityChecker, HomogeneityParams, HomogeneityReport, ScanMethod,
    DEFAULT_EXACT_WORK_LIMIT,
};
pub use io::{read_point_set, write_point_set};

/// How a point set was produced. Regenerating from the same provenance yields
/// the same point list bit for bit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub generator: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>) -> Self {
        Self {
            generator: generator.into(),
            params: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// A finite, ordered list of points in `[0,1]^d`, stored row-major.
///
/// Duplicates are allowed; they simply make the packing half of the
/// homogeneity check fail for small `k0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    provenance: Provenance,
}

impl PointSet {
    /// Builds a point set from explicit points. Every coordinate must lie in
    /// `[0,1]` and every point must have `dim` coordinates.
    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, Provenance::new("explicit"))
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::invalid(format!(
                "coordinate {} of point {} is outside [0,1]",
                coords[pos],
                pos / dim
            )));
        }
        Ok(Self {
            dim,
            coords,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Concatenation of two sets of the same dimension.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointSet {
            dim: self.dim,
            coords,
            provenance: Provenance::new("union"),
        })
    }
}

fn grid_coords(n: usize, dim: usize) -> Vec<f64> {
    let total = n.pow(dim as u32);
    let mut coords = Vec::with_capacity(total * dim);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        coords.extend(index.iter().map(|&i| (i as f64 + 0.5) / n as f64));
        // odometer, last axis fastest
        for axis in (0..dim).rev() {
            index[axis] += 1;
            if index[axis] < n {
                break;
            }
            index[axis] = 0;
        }
    }
    coords
}

fn check_grid_args(n: usize, dim: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("points per axis must be >= 1"));
    }
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
    }
    if n.checked_pow(dim as u32)
        .and_then(|t| t.checked_mul(dim))
        .is_none()
    {
        return Err(Error::invalid(format!("grid {n}^{dim} is too large")));
    }
    Ok(())
}

/// The `n^d` cell centres `((i_1+½)/n, …, (i_d+½)/n)`, last axis varying fastest.
pub fn generate_grid(n: usize, dim: usize) -> Result<PointSet> {
    check_grid_args(n, dim)?;
    let provenance = Provenance::new("grid")
        .with_param("n", n)
        .with_param("d", dim);
    Ok(PointSet {
        dim,
        coords: grid_coords(n, dim),
        provenance,
    })
}

/// Grid centres perturbed per coordinate by uniform noise in
/// `[-amplitude/n, amplitude/n]`, clamped to `[0,1]`.
///
/// `amplitude` is a fraction of the cell width and must lie in `[0, 0.5)`.
pub fn generate_jittered(n: usize, dim: usize, amplitude: f64, seed: u64) -> Result<PointSet> {
    check_grid_args(n, dim)?;
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::invalid(format!(
            "jitter amplitude must lie in [0, 0.5), got {amplitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = amplitude / n as f64;
    let coords = grid_coords(n, dim)
        .into_iter()
        .map(|c| {
            let u: f64 = rng.gen_range(-1.0..=1.0);
            (c + u * scale).clamp(0.0, 1.0)
        })
        .collect();
    let provenance = Provenance::new("jittered")
        .with_param("n", n)
        .with_param("d", dim)
        .with_param("amplitude", amplitude)
        .with_seed(seed);
    Ok(PointSet {
        dim,
        coords,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_grid() {
        let g = generate_grid(1, 2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.point(0), &[0.5, 0.5]);
    }

    #[test]
    fn two_by_two_grid() {
        let g = generate_grid(2, 2).unwrap();
        let pts: Vec<_> = g.iter().map(|p| p.to_vec()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.25, 0.25],
                vec![0.25, 0.75],
                vec![0.75, 0.25],
                vec![0.75, 0.75]
            ]
        );
    }

    #[test]
    fn grid_rejects_bad_args() {
        assert!(generate_grid(0, 2).is_err());
        assert!(generate_grid(3, 1).is_err());
    }

    #[test]
    fn zero_jitter_is_the_grid() {
        let g = generate_grid(7, 3).unwrap();
        let j = generate_jittered(7, 3, 0.0, 99).unwrap();
        assert_eq!(g.coords(), j.coords());
    }

    #[test]
    fn jitter_is_deterministic_in_seed() {
        let a = generate_jittered(16, 2, 0.3, 5).unwrap();
        let b = generate_jittered(16, 2, 0.3, 5).unwrap();
        let c = generate_jittered(16, 2, 0.3, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn jitter_amplitude_capped() {
        assert!(generate_jittered(4, 2, 0.5, 0).is_err());
        assert!(generate_jittered(4, 2, -0.1, 0).is_err());
    }

    #[test]
    fn jitter_stays_within_amplitude() {
        let n = 20;
        let g = generate_grid(n, 2).unwrap();
        let j = generate_jittered(n, 2, 0.4, 11).unwrap();
        for (a, b) in g.coords().iter().zip(j.coords()) {
            assert!((a - b).abs() <= 0.4 / n as f64 + 1e-15);
        }
    }

    #[test]
    fn from_points_validates_range() {
        assert!(PointSet::from_points(2, &[[0.5, 1.5]]).is_err());
        assert!(PointSet::from_points(2, &[vec![0.5]]).is_err());
        assert!(PointSet::from_points(1, &[[0.5]]).is_err());
    }
}
