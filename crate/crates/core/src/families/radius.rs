use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A positive radius function on `[0,1]^d` of the form
/// `r(x) = offset + linear·x + (curvature/2)·|x|²`.
///
/// The form is separable per coordinate, so the value range and the range of
/// `|∇r|` over the unit cube are computed exactly rather than sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusField {
    pub offset: f64,
    pub linear: Vec<f64>,
    #[serde(default)]
    pub curvature: f64,
    #[serde(skip)]
    bounds: Option<RadiusBounds>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBounds {
    pub min_value: f64,
    pub max_value: f64,
    pub inf_grad_norm: f64,
    pub sup_grad_norm: f64,
}

impl RadiusField {
    pub fn constant(dim: usize, r0: f64) -> Result<Self> {
        Self::quadratic(r0, vec![0.0; dim], 0.0)
    }

    pub fn affine(offset: f64, linear: Vec<f64>) -> Result<Self> {
        Self::quadratic(offset, linear, 0.0)
    }

    pub fn quadratic(offset: f64, linear: Vec<f64>, curvature: f64) -> Result<Self> {
        let mut field = Self {
            offset,
            linear,
            curvature,
            bounds: None,
        };
        field.validate()?;
        Ok(field)
    }

    /// Checks finiteness and positivity and caches the certified bounds.
    /// Needed after deserialisation.
    pub fn validate(&mut self) -> Result<()> {
        if self.linear.len() < 2 {
            return Err(Error::invalid(
                "radius field needs a linear term per axis (d >= 2)",
            ));
        }
        let finite = self.offset.is_finite()
            && self.curvature.is_finite()
            && self.linear.iter().all(|g| g.is_finite());
        if !finite {
            return Err(Error::invalid("radius field coefficients must be finite"));
        }
        let b = self.compute_bounds();
        if b.min_value <= 0.0 {
            return Err(Error::invalid(format!(
                "radius field must be positive on [0,1]^d, minimum is {}",
                b.min_value
            )));
        }
        self.bounds = Some(b);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.linear.iter().zip(x).map(|(g, xi)| g * xi).sum();
        let sq: f64 = x.iter().map(|xi| xi * xi).sum();
        self.offset + lin + 0.5 * self.curvature * sq
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.linear
            .iter()
            .zip(x)
            .map(|(g, xi)| g + self.curvature * xi)
            .collect()
    }

    pub fn bounds(&self) -> RadiusBounds {
        self.bounds.unwrap_or_else(|| self.compute_bounds())
    }

    /// Value range `[a, b]` over the unit cube.
    pub fn range(&self) -> (f64, f64) {
        let b = self.bounds();
        (b.min_value, b.max_value)
    }

    pub fn is_constant(&self) -> bool {
        self.curvature == 0.0 && self.linear.iter().all(|&g| g == 0.0)
    }

    fn compute_bounds(&self) -> RadiusBounds {
        let q = self.curvature;
        let (mut lo, mut hi) = (self.offset, self.offset);
        let (mut inf_sq, mut sup_sq) = (0.0, 0.0);
        for &g in &self.linear {
            // h(t) = g t + q t²/2 on [0,1]
            let h = |t: f64| g * t + 0.5 * q * t * t;
            let mut cands = vec![h(0.0), h(1.0)];
            if q != 0.0 {
                let t = -g / q;
                if t > 0.0 && t < 1.0 {
                    cands.push(h(t));
                }
            }
            lo += cands.iter().copied().fold(f64::INFINITY, f64::min);
            hi += cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);

            // gradient component g + q t ranges over [glo, ghi]
            let (glo, ghi) = (g + q.min(0.0), g + q.max(0.0));
            sup_sq += glo.abs().max(ghi.abs()).powi(2);
            if glo > 0.0 {
                inf_sq += glo * glo;
            } else if ghi < 0.0 {
                inf_sq += ghi * ghi;
            }
        }
        RadiusBounds {
            min_value: lo,
            max_value: hi,
            inf_grad_norm: inf_sq.sqrt(),
            sup_grad_norm: sup_sq.sqrt(),
        }
    }
}

impl std::fmt::Display for RadiusField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.offset)?;
        if self.linear.iter().any(|&c| c != 0.0) {
            write!(f, " + {:?}·x", self.linear)?;
        }
        if self.curvature != 0.0 {
            write!(f, " + {}/2·|x|²", self.curvature)?;
        }
        Ok(())
    }
}
