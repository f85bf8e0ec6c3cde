use super::{check_dims, dot, norm, FamilyKind, Neighborhood, SurfaceFamily};
use crate::{Error, Result};

/// `Γ_x = {y : x·y = 1}`, i.e. `Φ(x, y) = x·y - 1`.
#[derive(Debug, Clone)]
pub struct HyperplaneFamily {
    dim: usize,
}

impl HyperplaneFamily {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }
}

impl SurfaceFamily for HyperplaneFamily {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> String {
        "hyperplanes(x·y = 1)".to_string()
    }

    fn kind(&self) -> FamilyKind<'_> {
        FamilyKind::Hyperplanes
    }

    fn phi(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, y) - 1.0
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim, x, y)?;
        Ok(y.to_vec())
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim, x, y)?;
        Ok(x.to_vec())
    }

    fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dims(self.dim, x, y)?;
        let d = self.dim;
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            h[i * d + i] = 1.0;
        }
        Ok(h)
    }

    fn has_exact_distance(&self) -> bool {
        true
    }

    fn exact_distance(&self, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        check_dims(self.dim, x, y)?;
        let nx = norm(x);
        if nx == 0.0 {
            return Err(Error::Singular(
                "hyperplane x·y = 1 is empty for x = 0".into(),
            ));
        }
        Ok(Some((dot(x, y) - 1.0).abs() / nx))
    }

    fn bounding_radius(&self) -> Option<f64> {
        None
    }

    /// For `x`, `y` in the unit cube with `x·y = 1`, both `|x|` and `|y|`
    /// lie in `[1/√d, √d]`.
    fn epsilon0(&self) -> f64 {
        1.0 / (self.dim as f64).sqrt()
    }

    fn neighborhood(&self, x: &[f64], delta: f64) -> Neighborhood {
        let width = delta * norm(x);
        Neighborhood::Slab {
            normal: x.to_vec(),
            lo: 1.0 - width,
            hi: 1.0 + width,
        }
    }
}
