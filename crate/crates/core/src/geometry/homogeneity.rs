//! Packing/covering check for `(C0, c0, k0)`-homogeneous sets.
//!
//! Cubes are axis-aligned, half-open `[x, x+w)^d` and contained in `[0,1]^d`.
//!
//! * Packing: the largest number of points in any cube of side
//!   `c0·N^{-1/d}`. The exact scan only tries lower corners whose coordinates
//!   are coordinates of contained points: a maximal cube can be slid upward
//!   along each axis until its lower face touches a point without losing any.
//!   The conservative scan uses corners on a lattice of pitch `w/2` and is a
//!   lower bound on the maximum.
//! * Covering: `[0,1]^d` is cut into cells of side `(C0/2)·N^{-1/d}`; every
//!   cube of side `C0·N^{-1/d}` inside the unit cube contains a whole cell, so
//!   all full cells being occupied is sufficient.

use std::collections::{BTreeMap, HashSet};

use super::PointSet;
use crate::{Error, Result};

/// Default cap on `N·d` for the exact packing scan.
pub const DEFAULT_EXACT_WORK_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityParams {
    /// Covering constant `C0`.
    pub covering: f64,
    /// Packing constant `c0`.
    pub packing: f64,
    /// Maximum number of points allowed in a small cube.
    pub k0: usize,
}

impl HomogeneityParams {
    pub fn new(covering: f64, packing: f64, k0: usize) -> Result<Self> {
        let p = Self {
            covering,
            packing,
            k0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.packing > 0.0 && self.covering.is_finite()) {
            return Err(Error::invalid("homogeneity constants must be positive"));
        }
        if self.packing >= self.covering {
            return Err(Error::invalid(format!(
                "need c0 < C0, got c0 = {} and C0 = {}",
                self.packing, self.covering
            )));
        }
        if self.k0 == 0 {
            return Err(Error::invalid("k0 must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    Exact,
    Conservative,
}

impl std::fmt::Display for ScanMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScanMethod::Exact => "exact",
            ScanMethod::Conservative => "conservative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub lower: Vec<f64>,
    pub side: f64,
}

impl Cube {
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(&self.lower)
            .all(|(&x, &lo)| x >= lo && x < lo + self.side)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    pub passed: bool,
    pub max_small_cube_count: usize,
    /// A small cube attaining `max_small_cube_count` (lexicographically
    /// smallest lower corner among maximisers).
    pub max_witness: Cube,
    /// First empty covering cell in lexicographic order, if any.
    pub empty_large_cell: Option<Cube>,
    pub method: ScanMethod,
}

impl std::fmt::Display for HomogeneityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "homogeneity {} ({}): max small-cube count {} at {:?}",
            if self.passed { "passed" } else { "FAILED" },
            self.method,
            self.max_small_cube_count,
            self.max_witness.lower
        )?;
        if let Some(cell) = &self.empty_large_cell {
            write!(
                f,
                "; empty covering cell at {:?} side {}",
                cell.lower, cell.side
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HomogeneityChecker {
    pub exact_work_limit: usize,
}

impl Default for HomogeneityChecker {
    fn default() -> Self {
        Self {
            exact_work_limit: DEFAULT_EXACT_WORK_LIMIT,
        }
    }
}

pub fn check_homogeneity(
    set: &PointSet,
    params: &HomogeneityParams,
    method: ScanMethod,
) -> Result<HomogeneityReport> {
    HomogeneityChecker::default().check(set, params, method)
}

impl HomogeneityChecker {
    pub fn check(
        &self,
        set: &PointSet,
        params: &HomogeneityParams,
        method: ScanMethod,
    ) -> Result<HomogeneityReport> {
        params.validate()?;
        if set.is_empty() {
            return Err(Error::invalid("homogeneity check needs at least one point"));
        }
        let n = set.len();
        let d = set.dim();
        let scale = (n as f64).powf(-1.0 / d as f64);

        let small_side = params.packing * scale;
        let (max_count, max_witness) = match method {
            ScanMethod::Exact => {
                let work = n.saturating_mul(d);
                if work > self.exact_work_limit {
                    return Err(Error::WorkLimitExceeded {
                        work,
                        limit: self.exact_work_limit,
                    });
                }
                exact_packing(set, small_side)
            }
            ScanMethod::Conservative => lattice_packing(set, small_side),
        };

        let empty_large_cell = first_empty_cell(set, 0.5 * params.covering * scale);
        Ok(HomogeneityReport {
            passed: max_count <= params.k0 && empty_large_cell.is_none(),
            max_small_cube_count: max_count,
            max_witness,
            empty_large_cell,
            method,
        })
    }
}

fn exact_packing(set: &PointSet, side: f64) -> (usize, Cube) {
    let d = set.dim();
    let mut best = (0usize, Vec::new());
    let mut corner = Vec::with_capacity(d);
    let mut idx: Vec<usize> = (0..set.len()).collect();
    slab_scan(set, &mut idx, 0, side, &mut corner, &mut best);
    (
        best.0,
        Cube {
            lower: best.1,
            side,
        },
    )
}

// Recursion over axes: sort the surviving points along `axis`, slide a
// half-open window of width `side` whose left edge sits on each distinct
// coordinate, and recurse on the window. Ascending corners plus strict
// improvement keep the lexicographically smallest maximiser.
fn slab_scan(
    set: &PointSet,
    idx: &mut [usize],
    axis: usize,
    side: f64,
    corner: &mut Vec<f64>,
    best: &mut (usize, Vec<f64>),
) {
    if idx.len() <= best.0 {
        return;
    }
    if axis == set.dim() {
        *best = (idx.len(), corner.clone());
        return;
    }
    let coord = |i: usize| set.point(i)[axis];
    idx.sort_unstable_by(|&a, &b| coord(a).total_cmp(&coord(b)).then(a.cmp(&b)));
    let mut hi = 0;
    for lo in 0..idx.len() {
        let v = coord(idx[lo]);
        if lo > 0 && coord(idx[lo - 1]) == v {
            continue;
        }
        let upper = v + side;
        hi = hi.max(lo);
        while hi < idx.len() && coord(idx[hi]) < upper {
            hi += 1;
        }
        if hi - lo <= best.0 {
            continue;
        }
        let mut window = idx[lo..hi].to_vec();
        corner.push(v);
        slab_scan(set, &mut window, axis + 1, side, corner, best);
        corner.pop();
    }
}

fn lattice_packing(set: &PointSet, side: f64) -> (usize, Cube) {
    let d = set.dim();
    let pitch = 0.5 * side;
    let mut cells: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for p in set.iter() {
        let key: Vec<i64> = p.iter().map(|&x| (x / pitch).floor() as i64).collect();
        *cells.entry(key).or_default() += 1;
    }
    // Each anchored cube of side 2·pitch covers the 2^d cells `anchor + {0,1}^d`.
    let mut anchors: Vec<Vec<i64>> = Vec::new();
    for key in cells.keys() {
        for mask in 0..(1u32 << d) {
            let anchor: Vec<i64> = key
                .iter()
                .enumerate()
                .map(|(a, &k)| k - i64::from((mask >> a) & 1))
                .collect();
            if anchor.iter().all(|&k| k >= 0) {
                anchors.push(anchor);
            }
        }
    }
    anchors.sort_unstable();
    anchors.dedup();

    let mut best = (0usize, vec![0i64; d]);
    let mut probe = vec![0i64; d];
    for anchor in &anchors {
        let mut count = 0;
        for mask in 0..(1u32 << d) {
            for (a, slot) in probe.iter_mut().enumerate() {
                *slot = anchor[a] + i64::from((mask >> a) & 1);
            }
            count += cells.get(&probe).copied().unwrap_or(0);
        }
        if count > best.0 {
            best = (count, anchor.clone());
        }
    }
    (
        best.0,
        Cube {
            lower: best.1.iter().map(|&k| k as f64 * pitch).collect(),
            side,
        },
    )
}

fn first_empty_cell(set: &PointSet, side: f64) -> Option<Cube> {
    let d = set.dim();
    // full cells only: (k+1)·side <= 1
    let per_axis = ((1.0 / side) * (1.0 + 1e-12)).floor();
    if per_axis < 1.0 {
        return None;
    }
    let per_axis = per_axis as usize;
    let occupied: HashSet<Vec<usize>> = set
        .iter()
        .filter_map(|p| {
            p.iter()
                .map(|&x| {
                    let k = (x / side).floor() as usize;
                    (k < per_axis).then_some(k)
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect();

    let mut index = vec![0usize; d];
    loop {
        if !occupied.contains(&index) {
            return Some(Cube {
                lower: index.iter().map(|&k| k as f64 * side).collect(),
                side,
            });
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                return None;
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < per_axis {
                break;
            }
            index[axis] = 0;
        }
    }
}
