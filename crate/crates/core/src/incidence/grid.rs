//! Uniform-grid engine. Targets are bucketed into cubic cells of side
//! `h = max(δ, N^{-1/d})`; each query point visits only cells whose box can
//! meet the family's δ-neighbourhood, found by a per-axis descent that prunes
//! partial boxes. Membership uses the same predicate as the brute engine.

use rayon::prelude::*;

use super::{scan_all, Engine, IncidenceCount, IncidenceQuery, Tally};
use crate::families::{norm, Neighborhood};
use crate::geometry::PointSet;
use crate::{Error, Result};

// Slack on pruning bounds; absorbs rounding in cell assignment.
const PRUNE_MARGIN: f64 = 1e-9;

/// Compressed cell → point-index table over the unit cube.
#[derive(Debug, Clone)]
pub struct GridIndex {
    dim: usize,
    side: f64,
    per_axis: usize,
    cell_start: Vec<usize>,
    order: Vec<usize>,
}

impl GridIndex {
    pub fn build(set: &PointSet, side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid(format!(
                "cell side must be positive, got {side}"
            )));
        }
        let dim = set.dim();
        let per_axis = ((1.0 / side).ceil() as usize).max(1);
        let cells = per_axis
            .checked_pow(dim as u32)
            .filter(|&c| c <= 1 << 28)
            .ok_or_else(|| {
                Error::invalid(format!("grid of {per_axis}^{dim} cells is too large"))
            })?;
        let mut index = Self {
            dim,
            side,
            per_axis,
            cell_start: vec![0; cells + 1],
            order: vec![0; set.len()],
        };
        let ids: Vec<usize> = set.iter().map(|p| index.cell_of(p)).collect();
        for &c in &ids {
            index.cell_start[c + 1] += 1;
        }
        for c in 0..cells {
            index.cell_start[c + 1] += index.cell_start[c];
        }
        let mut fill = index.cell_start.clone();
        for (i, &c) in ids.iter().enumerate() {
            index.order[fill[c]] = i;
            fill[c] += 1;
        }
        Ok(index)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    fn axis_cell(&self, x: f64) -> usize {
        ((x / self.side).floor().max(0.0) as usize).min(self.per_axis - 1)
    }

    fn cell_of(&self, p: &[f64]) -> usize {
        p.iter()
            .fold(0, |acc, &x| acc * self.per_axis + self.axis_cell(x))
    }

    pub fn cell_points(&self, cell: usize) -> &[usize] {
        &self.order[self.cell_start[cell]..self.cell_start[cell + 1]]
    }

    fn interval(&self, c: usize) -> (f64, f64) {
        let lo = c as f64 * self.side;
        let hi = if c + 1 == self.per_axis {
            ((c + 1) as f64 * self.side).max(1.0)
        } else {
            (c + 1) as f64 * self.side
        };
        (lo, hi)
    }

    fn span(&self, lo: usize, hi: usize) -> (f64, f64) {
        (self.interval(lo).0, self.interval(hi).1)
    }

    /// Visits every cell in the index box `ranges` whose partial boxes survive
    /// `prune`, in lexicographic order.
    fn walk<P, L>(&self, ranges: &[(usize, usize)], prune: &P, leaf: &mut L) -> Result<()>
    where
        P: Fn(&[(f64, f64)]) -> bool,
        L: FnMut(usize) -> Result<()>,
    {
        let mut boxes: Vec<(f64, f64)> = ranges.iter().map(|&(l, h)| self.span(l, h)).collect();
        self.descend(0, 0, ranges, &mut boxes, prune, leaf)
    }

    fn descend<P, L>(
        &self,
        axis: usize,
        prefix: usize,
        ranges: &[(usize, usize)],
        boxes: &mut Vec<(f64, f64)>,
        prune: &P,
        leaf: &mut L,
    ) -> Result<()>
    where
        P: Fn(&[(f64, f64)]) -> bool,
        L: FnMut(usize) -> Result<()>,
    {
        let (lo, hi) = ranges[axis];
        let saved = boxes[axis];
        for c in lo..=hi {
            boxes[axis] = self.interval(c);
            if prune(boxes) {
                continue;
            }
            let id = prefix * self.per_axis + c;
            if axis + 1 == self.dim {
                leaf(id)?;
            } else {
                self.descend(axis + 1, id, ranges, boxes, prune, leaf)?;
            }
        }
        boxes[axis] = saved;
        Ok(())
    }
}

fn shell_pruned(a: &[f64], inner: f64, outer: f64, boxes: &[(f64, f64)]) -> bool {
    let (mut near, mut far) = (0.0, 0.0);
    for (&x, &(lo, hi)) in a.iter().zip(boxes) {
        let gap = if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            0.0
        };
        let reach = (x - lo).abs().max((hi - x).abs());
        near += gap * gap;
        far += reach * reach;
    }
    near.sqrt() > outer || far.sqrt() < inner
}

fn slab_pruned(normal: &[f64], lo: f64, hi: f64, boxes: &[(f64, f64)]) -> bool {
    let (mut smin, mut smax) = (0.0, 0.0);
    for (&n, &(l, u)) in normal.iter().zip(boxes) {
        let (p, q) = (n * l, n * u);
        smin += p.min(q);
        smax += p.max(q);
    }
    smax < lo || smin > hi
}

fn visit_cell(
    q: &IncidenceQuery<'_>,
    index: &GridIndex,
    a: &[f64],
    cell: usize,
    tally: &mut Tally,
) -> Result<()> {
    let targets = q.targets();
    for &j in index.cell_points(cell) {
        tally.visit(q, a, targets.point(j))?;
    }
    Ok(())
}

fn count_one(q: &IncidenceQuery<'_>, index: &GridIndex, a: &[f64]) -> Result<Tally> {
    let mut tally = Tally::default();
    let d = a.len();
    let n_targets = q.targets().len();
    let full = vec![(0, index.per_axis - 1); d];

    match q.family.neighborhood(a, q.threshold()) {
        Neighborhood::Shell { inner, outer } => {
            let margin = PRUNE_MARGIN * (1.0 + outer.abs());
            let (inner, outer) = (inner - margin, outer + margin);
            let ranges: Vec<(usize, usize)> = a
                .iter()
                .map(|&x| (index.axis_cell(x - outer), index.axis_cell(x + outer)))
                .collect();
            let cells = ranges
                .iter()
                .map(|&(l, h)| (h - l + 1) as f64)
                .product::<f64>();
            if cells > n_targets as f64 {
                tally.fallback += 1;
                scan_all(q, a, &mut tally)?;
            } else {
                index.walk(
                    &ranges,
                    &|b: &[(f64, f64)]| shell_pruned(a, inner, outer, b),
                    &mut |cell| visit_cell(q, index, a, cell, &mut tally),
                )?;
            }
        }
        Neighborhood::Slab { normal, lo, hi } => {
            let margin = PRUNE_MARGIN * (1.0 + norm(&normal));
            let (lo, hi) = (lo - margin, hi + margin);
            index.walk(
                &full,
                &|b: &[(f64, f64)]| slab_pruned(&normal, lo, hi, b),
                &mut |cell| visit_cell(q, index, a, cell, &mut tally),
            )?;
        }
        Neighborhood::Everything => {
            tally.fallback += 1;
            scan_all(q, a, &mut tally)?;
        }
    }
    Ok(tally)
}

/// Grid-accelerated count; returns exactly the brute-force count.
pub fn count_grid(q: &IncidenceQuery<'_>) -> Result<IncidenceCount> {
    let targets = q.targets();
    if targets.is_empty() || q.points.is_empty() {
        return Ok(Tally::default().finish(q, Engine::Grid));
    }
    let d = targets.dim();
    let side = q
        .delta
        .max((targets.len() as f64).powf(-1.0 / d as f64))
        .min(1.0);
    let index = GridIndex::build(targets, side)?;
    let tally = (0..q.points.len())
        .into_par_iter()
        .map(|i| count_one(q, &index, q.points.point(i)))
        .try_reduce(Tally::default, |x, y| Ok(x + y))?;
    Ok(tally.finish(q, Engine::Grid))
}
