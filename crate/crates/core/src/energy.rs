//! Discrete s-energy of a point set at scale δ:
//!
//! `total = N⁻² Σ_{a≠a'} |a - a'|^{-s} + N⁻¹ δ^{-s}`.
//!
//! The second term stands in for the self-interaction of the δ-mollified
//! measure. For homogeneous sets and `δ = N^{-1/s}` the total stays bounded
//! as `N` grows.

use rayon::prelude::*;

use crate::geometry::PointSet;
use crate::{Error, Result};

/// Rows per parallel block in the pairwise sum.
pub const DEFAULT_BLOCK_ROWS: usize = 64;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult {
    pub n: usize,
    pub s: f64,
    pub delta: f64,
    pub offdiag_sum: f64,
    pub diag_term: f64,
    pub total: f64,
}

fn find_duplicate(set: &PointSet) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..set.len()).collect();
    let cmp = |a: &usize, b: &usize| {
        set.point(*a)
            .iter()
            .zip(set.point(*b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    idx.sort_by(|a, b| cmp(a, b).then(a.cmp(b)));
    idx.windows(2)
        .find(|w| set.point(w[0]) == set.point(w[1]))
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

pub fn s_energy(set: &PointSet, s: f64, delta: f64) -> Result<EnergyResult> {
    s_energy_blocked(set, s, delta, DEFAULT_BLOCK_ROWS)
}

/// As [`s_energy`] with an explicit block size. The result is bit-identical
/// for a fixed block size regardless of thread count.
pub fn s_energy_blocked(
    set: &PointSet,
    s: f64,
    delta: f64,
    block_rows: usize,
) -> Result<EnergyResult> {
    let d = set.dim() as f64;
    if !(s > 0.0 && s < d) {
        return Err(Error::invalid(format!("s must lie in (0, {d}), got {s}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if set.is_empty() {
        return Err(Error::invalid("energy of an empty set"));
    }
    if let Some((first, second)) = find_duplicate(set) {
        return Err(Error::DuplicatePoint { first, second });
    }
    let n = set.len();
    let half_s = -0.5 * s;
    let block_rows = block_rows.max(1);
    let blocks: Vec<CompensatedSum> = (0..n.div_ceil(block_rows))
        .into_par_iter()
        .map(|b| {
            let mut acc = CompensatedSum::default();
            for i in b * block_rows..((b + 1) * block_rows).min(n) {
                let p = set.point(i);
                for j in (i + 1)..n {
                    let q = set.point(j);
                    let r2: f64 = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum();
                    acc.add(r2.powf(half_s));
                }
            }
            acc
        })
        .collect();
    let mut pairs = CompensatedSum::default();
    for b in &blocks {
        pairs.merge(b);
    }
    let nf = n as f64;
    let offdiag_sum = 2.0 * pairs.value() / (nf * nf);
    let diag_term = delta.powf(-s) / nf;
    Ok(EnergyResult {
        n,
        s,
        delta,
        offdiag_sum,
        diag_term,
        total: offdiag_sum + diag_term,
    })
}
