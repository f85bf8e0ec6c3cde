//! Dilates of a fixed convex body: `Γ_x = x + r(x)·Γ` with `Γ = ∂K`.
//!
//! The defining function is `Φ(x, y) = f((y - x)/r(x))` with the profile
//! `f(u) = φ_K(u) - 1`, where `φ_K` is the Minkowski gauge of `K`. Only the
//! neighbourhood of `Γ` is ever evaluated, where this profile is smooth. With
//! this sign `u·∇f(u) = φ_K(u) = 1` on `Γ`.

use super::{check_dims, dot, norm, sub, FamilyKind, Neighborhood, RadiusField, SurfaceFamily};
use crate::{Error, Result};

/// Axis-aligned ellipsoid `Σ (u_i/s_i)² <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    semiaxes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(semiaxes: Vec<f64>) -> Result<Self> {
        if semiaxes.len() < 2 {
            return Err(Error::invalid("ellipsoid needs at least two semiaxes"));
        }
        if semiaxes.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid(format!(
                "semiaxes must be positive and finite, got {semiaxes:?}"
            )));
        }
        Ok(Self { semiaxes })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn semiaxes(&self) -> &[f64] {
        &self.semiaxes
    }

    pub fn dim(&self) -> usize {
        self.semiaxes.len()
    }

    pub fn is_sphere(&self) -> bool {
        self.semiaxes.iter().all(|&s| s == self.semiaxes[0])
    }

    /// `m = min_{u ∈ Γ} |u|`.
    pub fn min_norm(&self) -> f64 {
        self.semiaxes.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `M = max_{u ∈ Γ} |u|`.
    pub fn max_norm(&self) -> f64 {
        self.semiaxes.iter().copied().fold(0.0, f64::max)
    }

    pub fn gauge(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(&self.semiaxes)
            .map(|(x, s)| (x / s) * (x / s))
            .sum::<f64>()
            .sqrt()
    }

    pub fn gauge_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let g = self.gauge(u);
        if g == 0.0 {
            return Err(Error::Singular("gauge gradient at the origin".into()));
        }
        Ok(u.iter()
            .zip(&self.semiaxes)
            .map(|(x, s)| x / (s * s) / g)
            .collect())
    }

    /// Row-major Hessian of the gauge.
    pub fn gauge_hessian(&self, u: &[f64]) -> Result<Vec<f64>> {
        let g = self.gauge(u);
        if g == 0.0 {
            return Err(Error::Singular("gauge Hessian at the origin".into()));
        }
        let d = u.len();
        let w: Vec<f64> = u
            .iter()
            .zip(&self.semiaxes)
            .map(|(x, s)| x / (s * s))
            .collect();
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = -w[i] * w[j] / (g * g * g);
            }
            h[i * d + i] += 1.0 / (self.semiaxes[i] * self.semiaxes[i] * g);
        }
        Ok(h)
    }

    /// Profile `f(u) = φ_K(u) - 1`, vanishing exactly on `Γ`.
    pub fn profile(&self, u: &[f64]) -> f64 {
        self.gauge(u) - 1.0
    }

    pub fn profile_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.gauge_gradient(u)
    }

    /// On `Γ`, `∇f(u) = n/h(n)` with `h` the support function, so `|∇f|`
    /// ranges over `[1/M, 1/m]`.
    pub fn profile_gradient_range(&self) -> (f64, f64) {
        (1.0 / self.max_norm(), 1.0 / self.min_norm())
    }

    /// Euclidean distance from `z` to the boundary of this ellipsoid scaled
    /// by `scale`.
    pub fn boundary_distance(&self, z: &[f64], scale: f64) -> f64 {
        let e: Vec<f64> = self.semiaxes.iter().map(|s| s * scale).collect();
        let w: Vec<f64> = z.iter().map(|x| x.abs()).collect();
        let p = closest_boundary_point(&e, &w);
        norm(&sub(&p, &w))
    }
}

// Closest point on the ellipsoid with semiaxes `e` to `w >= 0`.
//
// Stationary points satisfy p_i = e_i² w_i / (t + e_i²) with
// F(t) = Σ (e_i w_i / (t + e_i²))² - 1 = 0; F is decreasing on
// (-min e_i², ∞). Outside points have the root in t > 0, inside points in
// (-min e_i², 0]. If w vanishes on every minor axis and F(-min e_i²) <= 1
// the closest point leaves the w-plane (degenerate case).
fn closest_boundary_point(e: &[f64], w: &[f64]) -> Vec<f64> {
    let d = e.len();
    let f = |t: f64| -> f64 {
        e.iter()
            .zip(w)
            .map(|(ei, wi)| {
                if *wi == 0.0 {
                    0.0
                } else {
                    let q = ei * wi / (t + ei * ei);
                    q * q
                }
            })
            .sum::<f64>()
            - 1.0
    };
    let point_at = |t: f64| -> Vec<f64> {
        e.iter()
            .zip(w)
            .map(|(ei, wi)| ei * ei * wi / (t + ei * ei))
            .collect()
    };
    let inside: f64 = e.iter().zip(w).map(|(ei, wi)| (wi / ei).powi(2)).sum();
    if inside == 1.0 {
        return w.to_vec();
    }

    let (lo, hi) = if inside > 1.0 {
        let emax = e.iter().copied().fold(0.0, f64::max);
        (0.0, emax * norm(w))
    } else {
        let emin_sq = e.iter().map(|x| x * x).fold(f64::INFINITY, f64::min);
        let minor_hit = e
            .iter()
            .zip(w)
            .any(|(ei, wi)| ei * ei == emin_sq && *wi > 0.0);
        if !minor_hit && f(-emin_sq) <= 0.0 {
            let mut p = vec![0.0; d];
            let mut rest = 1.0;
            let mut minor_axis = None;
            for i in 0..d {
                let ei2 = e[i] * e[i];
                if ei2 == emin_sq {
                    minor_axis.get_or_insert(i);
                } else {
                    p[i] = ei2 * w[i] / (ei2 - emin_sq);
                    rest -= (p[i] / e[i]).powi(2);
                }
            }
            let k = minor_axis.expect("some axis attains the minimum");
            p[k] = e[k] * rest.max(0.0).sqrt();
            return p;
        }
        (-emin_sq, 0.0)
    };

    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if f(hi).abs() < f(lo).abs() { hi } else { lo };
    point_at(t)
}

/// `Γ_x = x + r(x)·∂K` for an ellipsoid `K`.
#[derive(Debug, Clone)]
pub struct DilatedBody {
    body: Ellipsoid,
    radius: RadiusField,
}

impl DilatedBody {
    pub fn new(body: Ellipsoid, radius: RadiusField) -> Result<Self> {
        let mut radius = radius;
        radius.validate()?;
        if body.dim() != radius.dim() {
            return Err(Error::DimensionMismatch {
                expected: body.dim(),
                actual: radius.dim(),
            });
        }
        Ok(Self { body, radius })
    }

    pub fn body(&self) -> &Ellipsoid {
        &self.body
    }

    pub fn radius(&self) -> &RadiusField {
        &self.radius
    }

    // u = (y - x)/r(x)
    fn local(&self, x: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dims(self.dim(), x, y)?;
        let r = self.radius.value(x);
        let u: Vec<f64> = y.iter().zip(x).map(|(b, a)| (b - a) / r).collect();
        if u.iter().all(|&c| c == 0.0) {
            return Err(Error::Singular("dilated body derivative at y = x".into()));
        }
        Ok((r, u))
    }
}

impl SurfaceFamily for DilatedBody {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn label(&self) -> String {
        format!(
            "dilated ellipsoid(semiaxes {:?}, r = {})",
            self.body.semiaxes, self.radius
        )
    }

    fn kind(&self) -> FamilyKind<'_> {
        FamilyKind::DilatedBody(&self.body, &self.radius)
    }

    fn phi(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = self.radius.value(x);
        let u: Vec<f64> = y.iter().zip(x).map(|(b, a)| (b - a) / r).collect();
        self.body.profile(&u)
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (r, u) = self.local(x, y)?;
        Ok(self
            .body
            .profile_gradient(&u)?
            .into_iter()
            .map(|g| g / r)
            .collect())
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (r, u) = self.local(x, y)?;
        let gf = self.body.profile_gradient(&u)?;
        let gr = self.radius.gradient(x);
        let radial = dot(&u, &gf);
        Ok(gf
            .iter()
            .zip(&gr)
            .map(|(g, ri)| -(g + radial * ri) / r)
            .collect())
    }

    fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let (r, u) = self.local(x, y)?;
        let d = u.len();
        let gf = self.body.profile_gradient(&u)?;
        let hf = self.body.gauge_hessian(&u)?;
        let gr = self.radius.gradient(x);
        let hu: Vec<f64> = (0..d).map(|j| dot(&hf[j * d..(j + 1) * d], &u)).collect();
        let r2 = r * r;
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = -(gr[i] * gf[j] + hf[j * d + i] + gr[i] * hu[j]) / r2;
            }
        }
        Ok(h)
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn exact_distance(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        check_dims(self.dim(), x, y)?;
        let z = sub(y, x);
        Ok(Some(self.body.boundary_distance(&z, self.radius.value(x))))
    }

    fn bounding_radius(&self) -> Option<f64> {
        Some(self.radius.range().1 * self.body.max_norm())
    }

    fn epsilon0(&self) -> f64 {
        let rb = self.radius.bounds();
        let (gmin, gmax) = self.body.profile_gradient_range();
        // |∇_yΦ| = |∇f|/r; |∇_xΦ| = |∇f + ∇r|/r >= dist([inf,sup], [gmin,gmax])/r
        let gap = if rb.sup_grad_norm < gmin {
            gmin - rb.sup_grad_norm
        } else if rb.inf_grad_norm > gmax {
            rb.inf_grad_norm - gmax
        } else {
            0.0
        };
        let lower = (gmin / rb.max_value).min(gap / rb.max_value);
        let upper = ((gmax + rb.sup_grad_norm) / rb.min_value).max(gmax / rb.min_value);
        lower.min(1.0 / upper)
    }

    fn neighborhood(&self, x: &[f64], delta: f64) -> Neighborhood {
        let r = self.radius.value(x);
        Neighborhood::Shell {
            inner: r * self.body.min_norm() - delta,
            outer: r * self.body.max_norm() + delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::testing::*;
    use crate::families::SphereFamily;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm(&v);
            if n > 0.1 && n <= 1.0 {
                return v.into_iter().map(|c| c / n).collect();
            }
        }
    }

    #[test]
    fn unit_sphere_point() {
        let f = DilatedBody::new(
            Ellipsoid::unit_ball(3).unwrap(),
            RadiusField::constant(3, 1.0).unwrap(),
        )
        .unwrap();
        let x = [0.2, 0.3, 0.4];
        let y = [1.2, 0.3, 0.4];
        assert!(f.phi(&x, &y).abs() < 1e-15);
        assert!(f.exact_distance(&x, &y).unwrap().unwrap() < 1e-15);
    }

    #[test]
    fn axis_extremes() {
        let e = Ellipsoid::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(e.min_norm(), 1.0);
        assert_eq!(e.max_norm(), 2.0);
        assert!(Ellipsoid::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn gauge_is_one_homogeneous() {
        let e = Ellipsoid::new(vec![0.7, 1.9, 1.2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let u: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let t = rng.gen_range(0.01..10.0);
            let tu: Vec<f64> = u.iter().map(|c| c * t).collect();
            let (a, b) = (e.gauge(&tu), t * e.gauge(&u));
            assert!((a - b).abs() <= 1e-14 * b.max(1.0));
        }
    }

    #[test]
    fn euler_identity_and_gradient_range_on_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let axes: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..2.0)).collect();
            let e = Ellipsoid::new(axes).unwrap();
            let (gmin, gmax) = e.profile_gradient_range();
            for _ in 0..100 {
                let w = unit_direction(&mut rng, 3);
                let g = e.gauge(&w);
                let u: Vec<f64> = w.iter().map(|c| c / g).collect();
                let grad = e.profile_gradient(&u).unwrap();
                assert!((dot(&u, &grad) - 1.0).abs() < 1e-12);
                let n = norm(&grad);
                assert!(n >= gmin - 1e-12 && n <= gmax + 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = DilatedBody::new(
            Ellipsoid::new(vec![1.5, 0.8, 1.1]).unwrap(),
            RadiusField::quadratic(0.2, vec![0.05, -0.02, 0.03], 0.04).unwrap(),
        )
        .unwrap();
        let mut checked = 0;
        while checked < 300 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            if norm(&sub(&x, &y)) < 0.05 {
                continue;
            }
            checked += 1;
            assert!(rel_err(&f.grad_x(&x, &y).unwrap(), &fd_grad_x(&f, &x, &y)) < 1e-6);
            assert!(rel_err(&f.grad_y(&x, &y).unwrap(), &fd_grad_y(&f, &x, &y)) < 1e-6);
            assert!(rel_err(&f.mixed_hessian(&x, &y).unwrap(), &fd_mixed(&f, &x, &y)) < 1e-6);
        }
    }

    #[test]
    fn singular_at_center() {
        let f = DilatedBody::new(
            Ellipsoid::unit_ball(2).unwrap(),
            RadiusField::constant(2, 0.1).unwrap(),
        )
        .unwrap();
        assert!(f.grad_y(&[0.5, 0.5], &[0.5, 0.5]).is_err());
        assert!(f.grad_x(&[0.5, 0.5], &[0.5, 0.5]).is_err());
        // distance itself is fine: centre to sphere is the radius
        let d = f.exact_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap().unwrap();
        assert!((d - 0.1).abs() < 1e-15);
    }

    #[test]
    fn unit_ball_reproduces_spheres() {
        let r = RadiusField::affine(0.2, vec![0.1, 0.05, -0.05]).unwrap();
        let body = DilatedBody::new(Ellipsoid::unit_ball(3).unwrap(), r.clone()).unwrap();
        let sphere = SphereFamily::new(r.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let db = body.exact_distance(&x, &y).unwrap().unwrap();
            let ds = sphere.exact_distance(&x, &y).unwrap().unwrap();
            assert!((db - ds).abs() <= 1e-10);
            // Φ_sphere = r(|x-y| + r)·Φ_body
            let rx = r.value(&x);
            let factor = rx * (norm(&sub(&x, &y)) + rx);
            let (ps, pb) = (sphere.phi(&x, &y), body.phi(&x, &y));
            assert!((ps - factor * pb).abs() <= 1e-12 * ps.abs().max(1.0));
        }
    }

    #[test]
    fn ellipsoid_distance_against_dense_boundary_sampling() {
        // oracle: minimise |p - z| over a fine parametrisation of the boundary
        let e = Ellipsoid::new(vec![2.0, 0.7]).unwrap();
        let samples: Vec<[f64; 2]> = (0..200_000)
            .map(|k| {
                let t = k as f64 / 200_000.0 * std::f64::consts::TAU;
                [2.0 * t.cos(), 0.7 * t.sin()]
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..40 {
            let z = [rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)];
            let oracle = samples
                .iter()
                .map(|p| ((p[0] - z[0]).powi(2) + (p[1] - z[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            let got = e.boundary_distance(&z, 1.0);
            assert!(got <= oracle + 1e-12, "{got} > {oracle}");
            assert!(oracle - got < 1e-6, "{got} vs {oracle}");
        }
        // degenerate interior case: on the minor axis, closest point off-axis
        let z = [0.3, 0.0];
        let got = e.boundary_distance(&z, 1.0);
        let oracle = samples
            .iter()
            .map(|p| ((p[0] - z[0]).powi(2) + p[1].powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!((got - oracle).abs() < 1e-6);
    }

    #[test]
    fn distance_zero_on_zero_set() {
        let f = DilatedBody::new(
            Ellipsoid::new(vec![1.3, 0.6, 0.9]).unwrap(),
            RadiusField::affine(0.15, vec![0.02, 0.0, 0.01]).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let w = unit_direction(&mut rng, 3);
            let r = f.radius.value(&x);
            let g = f.body.gauge(&w);
            let y: Vec<f64> = x.iter().zip(&w).map(|(a, c)| a + r * c / g).collect();
            assert!(f.phi(&x, &y).abs() <= 1e-12);
            assert!(f.exact_distance(&x, &y).unwrap().unwrap() <= 1e-12);
        }
    }
}
