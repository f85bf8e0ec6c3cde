//! Counting δ-thickened incidences `|{(a, b) ∈ A×B : b ∈ Γ_a^δ}|` over ordered
//! pairs, diagonal included.
//!
//! Membership is the closed condition `dist(b, Γ_a) <= max(δ, 1e-12)`, using
//! the family's exact distance when available and `|Φ|/|∇_yΦ|` otherwise.
//! Both engines apply the same predicate, so their counts agree exactly.

mod grid;

use std::fmt;

use rayon::prelude::*;

use crate::families::{norm, sub, Neighborhood, SphereFamily, SurfaceFamily};
use crate::geometry::PointSet;
use crate::{Error, Result};

pub use grid::{count_grid, GridIndex};

/// Distance tolerance standing in for exact incidence.
pub const EXACT_TOL: f64 = 1e-12;

/// Slack on shell bounds before a pair is rejected without a distance evaluation.
const SHELL_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Exact,
    /// First-order proxy `|Φ| / |∇_yΦ|`.
    Proxy,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Exact => "exact",
            Membership::Proxy => "proxy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Brute,
    Grid,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Brute => "brute",
            Engine::Grid => "grid",
        })
    }
}

#[derive(Clone, Copy)]
pub struct IncidenceQuery<'a> {
    pub points: &'a PointSet,
    targets: Option<&'a PointSet>,
    pub family: &'a dyn SurfaceFamily,
    pub delta: f64,
}

impl<'a> IncidenceQuery<'a> {
    pub fn new(points: &'a PointSet, family: &'a dyn SurfaceFamily, delta: f64) -> Result<Self> {
        Self::with_targets(points, None, family, delta)
    }

    /// Counts pairs `(a, b) ∈ A×B` instead of `A×A`.
    pub fn with_targets(
        points: &'a PointSet,
        targets: Option<&'a PointSet>,
        family: &'a dyn SurfaceFamily,
        delta: f64,
    ) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!(
                "delta must be finite and >= 0, got {delta}"
            )));
        }
        for set in std::iter::once(points).chain(targets) {
            if set.dim() != family.dim() {
                return Err(Error::DimensionMismatch {
                    expected: family.dim(),
                    actual: set.dim(),
                });
            }
        }
        Ok(Self {
            points,
            targets,
            family,
            delta,
        })
    }

    pub fn targets(&self) -> &'a PointSet {
        self.targets.unwrap_or(self.points)
    }

    pub fn membership(&self) -> Membership {
        if self.family.has_exact_distance() {
            Membership::Exact
        } else {
            Membership::Proxy
        }
    }

    pub(crate) fn threshold(&self) -> f64 {
        self.delta.max(EXACT_TOL)
    }

    /// The membership predicate shared by every engine.
    pub(crate) fn is_incident(&self, a: &[f64], b: &[f64]) -> Result<bool> {
        if let Neighborhood::Shell { inner, outer } = self.family.neighborhood(a, self.threshold())
        {
            let r = norm(&sub(b, a));
            if r < inner - SHELL_MARGIN || r > outer + SHELL_MARGIN {
                return Ok(false);
            }
        }
        let dist = match self.family.exact_distance(a, b)? {
            Some(d) => d,
            None => {
                let g = norm(&self.family.grad_y(a, b)?);
                if g == 0.0 {
                    f64::INFINITY
                } else {
                    self.family.phi(a, b).abs() / g
                }
            }
        };
        Ok(dist <= self.threshold())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncidenceCount {
    /// Ordered pairs.
    pub count: u64,
    pub engine: Engine,
    pub membership: Membership,
    pub candidate_pairs: u64,
    /// Incident pairs with `a = b` (as points).
    pub self_incidences: u64,
    /// Query points the grid engine handed to a full scan.
    pub fallback_points: u64,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Tally {
    pub count: u64,
    pub candidates: u64,
    pub self_incidences: u64,
    pub fallback: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            count: self.count + o.count,
            candidates: self.candidates + o.candidates,
            self_incidences: self.self_incidences + o.self_incidences,
            fallback: self.fallback + o.fallback,
        }
    }
}

impl Tally {
    pub(crate) fn visit(&mut self, q: &IncidenceQuery<'_>, a: &[f64], b: &[f64]) -> Result<()> {
        self.candidates += 1;
        if q.is_incident(a, b)? {
            self.count += 1;
            if a == b {
                self.self_incidences += 1;
            }
        }
        Ok(())
    }

    pub(crate) fn finish(self, q: &IncidenceQuery<'_>, engine: Engine) -> IncidenceCount {
        IncidenceCount {
            count: self.count,
            engine,
            membership: q.membership(),
            candidate_pairs: self.candidates,
            self_incidences: self.self_incidences,
            fallback_points: self.fallback,
        }
    }
}

pub(crate) fn scan_all(q: &IncidenceQuery<'_>, a: &[f64], tally: &mut Tally) -> Result<()> {
    for b in q.targets().iter() {
        tally.visit(q, a, b)?;
    }
    Ok(())
}

/// Examines every ordered pair.
pub fn count_brute(q: &IncidenceQuery<'_>) -> Result<IncidenceCount> {
    let tally = (0..q.points.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            scan_all(q, q.points.point(i), &mut t)?;
            Ok::<_, Error>(t)
        })
        .try_reduce(Tally::default, |x, y| Ok(x + y))?;
    Ok(tally.finish(q, Engine::Brute))
}

pub fn count(q: &IncidenceQuery<'_>, engine: Engine) -> Result<IncidenceCount> {
    match engine {
        Engine::Brute => count_brute(q),
        Engine::Grid => count_grid(q),
    }
}

/// Ordered pairs at distance exactly `r0` (up to [`EXACT_TOL`]).
pub fn unit_distance_count(points: &PointSet, r0: f64) -> Result<IncidenceCount> {
    if r0.is_nan() || r0 <= 0.0 {
        return Err(Error::invalid(format!(
            "distance must be positive, got {r0}"
        )));
    }
    let family = SphereFamily::constant(points.dim(), r0)?;
    count_grid(&IncidenceQuery::new(points, &family, 0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{HyperplaneFamily, RadiusField};
    use crate::geometry::generate_grid;

    #[test]
    fn two_points_at_radius() {
        let a = PointSet::from_points(2, &[[0.0, 0.0], [0.1, 0.0]]).unwrap();
        let f = SphereFamily::constant(2, 0.1).unwrap();
        let q = IncidenceQuery::new(&a, &f, 0.0).unwrap();
        assert_eq!(count_brute(&q).unwrap().count, 2);
        assert_eq!(count_grid(&q).unwrap().count, 2);
    }

    #[test]
    fn square_corners() {
        let a =
            PointSet::from_points(2, &[[0.2, 0.2], [0.2, 0.3], [0.3, 0.2], [0.3, 0.3]]).unwrap();
        assert_eq!(unit_distance_count(&a, 0.1).unwrap().count, 8);
    }

    #[test]
    fn saturation_counts_all_pairs() {
        let a = generate_grid(5, 2).unwrap();
        let f = SphereFamily::constant(2, 0.3).unwrap();
        let delta = 0.3 + 2f64.sqrt();
        let q = IncidenceQuery::new(&a, &f, delta).unwrap();
        for c in [count_brute(&q).unwrap(), count_grid(&q).unwrap()] {
            assert_eq!(c.count, 625);
            assert_eq!(c.self_incidences, 25);
        }
    }

    #[test]
    fn grid_unit_distances() {
        // oracle: direct enumeration with integer lattice offsets
        let n = 10i64;
        let oracle = |di: i64, dj: i64| -> u64 {
            let mut c = 0;
            for i in 0..n {
                for j in 0..n {
                    for (si, sj) in [(di, dj), (-di, -dj), (dj, -di), (-dj, di)] {
                        if (0..n).contains(&(i + si)) && (0..n).contains(&(j + sj)) {
                            c += 1;
                        }
                    }
                }
            }
            c
        };
        let g = generate_grid(10, 2).unwrap();
        assert_eq!(oracle(1, 0), 360);
        assert_eq!(unit_distance_count(&g, 0.1).unwrap().count, 360);
        assert_eq!(oracle(1, 1), 324);
        assert_eq!(
            unit_distance_count(&g, 0.1 * 2f64.sqrt()).unwrap().count,
            324
        );
        // half a diagonal step matches nothing on this grid
        assert_eq!(
            unit_distance_count(&g, 0.05 * 2f64.sqrt()).unwrap().count,
            0
        );
    }

    #[test]
    fn rejects_bad_queries() {
        let a = generate_grid(3, 2).unwrap();
        let f = SphereFamily::constant(3, 0.1).unwrap();
        assert!(IncidenceQuery::new(&a, &f, 0.0).is_err());
        let f = SphereFamily::constant(2, 0.1).unwrap();
        assert!(IncidenceQuery::new(&a, &f, -1.0).is_err());
        assert!(IncidenceQuery::new(&a, &f, f64::NAN).is_err());
        assert!(unit_distance_count(&a, 0.0).is_err());
    }

    #[test]
    fn two_set_variant() {
        let a = PointSet::from_points(2, &[[0.1, 0.1]]).unwrap();
        let b = PointSet::from_points(2, &[[0.3, 0.1], [0.1, 0.3], [0.5, 0.5]]).unwrap();
        let f = SphereFamily::constant(2, 0.2).unwrap();
        let q = IncidenceQuery::with_targets(&a, Some(&b), &f, 0.0).unwrap();
        assert_eq!(count_brute(&q).unwrap().count, 2);
        assert_eq!(count_grid(&q).unwrap().count, 2);
        assert_eq!(count_brute(&q).unwrap().candidate_pairs, 3);
    }

    #[derive(Debug)]
    struct ProxySpheres(SphereFamily);

    impl SurfaceFamily for ProxySpheres {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn label(&self) -> String {
            "proxy spheres".into()
        }
        fn phi(&self, x: &[f64], y: &[f64]) -> f64 {
            self.0.phi(x, y)
        }
        fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
            self.0.grad_x(x, y)
        }
        fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
            self.0.grad_y(x, y)
        }
        fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
            self.0.mixed_hessian(x, y)
        }
        fn bounding_radius(&self) -> Option<f64> {
            self.0.bounding_radius()
        }
        fn epsilon0(&self) -> f64 {
            self.0.epsilon0()
        }
    }

    #[test]
    fn proxy_membership_is_flagged_and_consistent() {
        let a = generate_grid(12, 2).unwrap();
        let f = ProxySpheres(SphereFamily::new(RadiusField::constant(2, 0.2).unwrap()).unwrap());
        let q = IncidenceQuery::new(&a, &f, 0.01).unwrap();
        let brute = count_brute(&q).unwrap();
        let grid = count_grid(&q).unwrap();
        assert_eq!(brute.membership, Membership::Proxy);
        assert_eq!(brute.count, grid.count);
        // no neighbourhood: every query point falls back
        assert_eq!(grid.fallback_points, 144);
    }

    #[test]
    fn hyperplane_origin_is_an_error() {
        let a = PointSet::from_points(2, &[[0.0, 0.0], [0.5, 0.5]]).unwrap();
        let f = HyperplaneFamily::new(2).unwrap();
        let q = IncidenceQuery::new(&a, &f, 0.1).unwrap();
        assert!(count_brute(&q).is_err());
    }
}
