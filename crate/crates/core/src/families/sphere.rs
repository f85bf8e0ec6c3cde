use super::{check_dims, norm, sub, FamilyKind, Neighborhood, RadiusField, SurfaceFamily};
use crate::Result;

/// Spheres of variable radius, `Φ(x, y) = |x - y|² - r(x)²`.
#[derive(Debug, Clone)]
pub struct SphereFamily {
    radius: RadiusField,
}

impl SphereFamily {
    pub fn new(radius: RadiusField) -> Result<Self> {
        let mut radius = radius;
        radius.validate()?;
        Ok(Self { radius })
    }

    pub fn constant(dim: usize, r0: f64) -> Result<Self> {
        Self::new(RadiusField::constant(dim, r0)?)
    }

    pub fn radius(&self) -> &RadiusField {
        &self.radius
    }
}

impl SurfaceFamily for SphereFamily {
    fn dim(&self) -> usize {
        self.radius.dim()
    }

    fn label(&self) -> String {
        format!("spheres(r = {})", self.radius)
    }

    fn kind(&self) -> FamilyKind<'_> {
        FamilyKind::Spheres(&self.radius)
    }

    fn phi(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = self.radius.value(x);
        let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        sq - r * r
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim(), x, y)?;
        let r = self.radius.value(x);
        let gr = self.radius.gradient(x);
        Ok((0..x.len())
            .map(|i| 2.0 * (x[i] - y[i]) - 2.0 * r * gr[i])
            .collect())
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim(), x, y)?;
        Ok(x.iter().zip(y).map(|(a, b)| 2.0 * (b - a)).collect())
    }

    fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim(), x, y)?;
        let d = x.len();
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            h[i * d + i] = -2.0;
        }
        Ok(h)
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn exact_distance(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        check_dims(self.dim(), x, y)?;
        Ok(Some((norm(&sub(x, y)) - self.radius.value(x)).abs()))
    }

    fn bounding_radius(&self) -> Option<f64> {
        Some(self.radius.range().1)
    }

    fn epsilon0(&self) -> f64 {
        let b = self.radius.bounds();
        // |∇_yΦ| = 2r; |∇_xΦ| = 2r·|û - ∇r| ∈ [2r·dist(1, [inf,sup]), 2r(1 + sup)]
        let gap = if b.sup_grad_norm < 1.0 {
            1.0 - b.sup_grad_norm
        } else if b.inf_grad_norm > 1.0 {
            b.inf_grad_norm - 1.0
        } else {
            0.0
        };
        let lower = 2.0 * b.min_value * gap.min(1.0);
        let upper = 2.0 * b.max_value * (1.0 + b.sup_grad_norm);
        lower.min(1.0 / upper)
    }

    fn neighborhood(&self, x: &[f64], delta: f64) -> Neighborhood {
        let r = self.radius.value(x);
        Neighborhood::Shell {
            inner: r - delta,
            outer: r + delta,
        }
    }
}
