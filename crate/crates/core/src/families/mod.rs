//! Families of hypersurfaces `Γ_x = {y : Φ(x, y) = 0}` with analytic first
//! derivatives and mixed second derivatives.

mod body;
mod hyperplane;
mod radius;
mod sphere;

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use body::{DilatedBody, Ellipsoid};
pub use hyperplane::HyperplaneFamily;
pub use radius::{RadiusBounds, RadiusField};
pub use sphere::SphereFamily;

/// Region that contains every point within `delta` of `Γ_x`. Used by the grid
/// engines to skip pairs; it never accepts a pair by itself.
#[derive(Debug, Clone, PartialEq)]
pub enum Neighborhood {
    /// `inner <= |y - x| <= outer`.
    Shell {
        inner: f64,
        outer: f64,
    },
    /// `lo <= normal·y <= hi`.
    Slab {
        normal: Vec<f64>,
        lo: f64,
        hi: f64,
    },
    Everything,
}

/// Structural view of a family, used where a closed form exists.
#[derive(Debug, Clone, Copy)]
pub enum FamilyKind<'a> {
    Spheres(&'a RadiusField),
    Hyperplanes,
    DilatedBody(&'a Ellipsoid, &'a RadiusField),
    Custom,
}

pub trait SurfaceFamily: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> String;

    fn kind(&self) -> FamilyKind<'_> {
        FamilyKind::Custom
    }

    fn phi(&self, x: &[f64], y: &[f64]) -> f64;

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    /// Row-major `d×d` matrix with entry `[i*d + j] = ∂²Φ/∂x_i∂y_j`.
    fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    /// Whether [`SurfaceFamily::exact_distance`] returns `Some`.
    fn has_exact_distance(&self) -> bool {
        false
    }

    /// Euclidean distance from `y` to `Γ_x`, when the family can compute it.
    fn exact_distance(&self, _x: &[f64], _y: &[f64]) -> Result<Option<f64>> {
        Ok(None)
    }

    /// `R` with `Γ_x ⊂ ball(x, R)` for all `x` in the unit cube; `None` when
    /// the surfaces are unbounded.
    fn bounding_radius(&self) -> Option<f64>;

    /// Declared `ε0` with `|∇_xΦ|, |∇_yΦ| ∈ [ε0, 1/ε0]` on the zero set.
    fn epsilon0(&self) -> f64;

    fn neighborhood(&self, _x: &[f64], _delta: f64) -> Neighborhood {
        Neighborhood::Everything
    }
}

/// Serializable description of a shipped family, as used in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Spheres {
        radius: RadiusSpec,
    },
    Hyperplanes,
    DilatedEllipsoid {
        semiaxes: Vec<f64>,
        radius: RadiusSpec,
    },
}

/// `r(x) = offset + linear·x + (curvature/2)|x|²`; a missing `linear` means zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSpec {
    pub offset: f64,
    #[serde(default)]
    pub linear: Vec<f64>,
    #[serde(default)]
    pub curvature: f64,
}

impl RadiusSpec {
    pub fn build(&self, dim: usize) -> Result<RadiusField> {
        let linear = if self.linear.is_empty() {
            vec![0.0; dim]
        } else if self.linear.len() == dim {
            self.linear.clone()
        } else {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: self.linear.len(),
            });
        };
        RadiusField::quadratic(self.offset, linear, self.curvature)
    }
}

impl FamilySpec {
    pub fn build(&self, dim: usize) -> Result<Arc<dyn SurfaceFamily>> {
        Ok(match self {
            FamilySpec::Spheres { radius } => Arc::new(SphereFamily::new(radius.build(dim)?)?),
            FamilySpec::Hyperplanes => Arc::new(HyperplaneFamily::new(dim)?),
            FamilySpec::DilatedEllipsoid { semiaxes, radius } => {
                if semiaxes.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: semiaxes.len(),
                    });
                }
                Arc::new(DilatedBody::new(
                    Ellipsoid::new(semiaxes.clone())?,
                    radius.build(dim)?,
                )?)
            }
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_dims(dim: usize, x: &[f64], y: &[f64]) -> Result<()> {
    for v in [x, y] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
    }
    Ok(())
}
