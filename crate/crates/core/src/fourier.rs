//! Fourier transform of the surface measure on the unit sphere,
//! `σ̂(ξ) = ∫_{S^{d-1}} e^{-2πi x·ξ} dσ(x)`, and checks of its decay
//! `|σ̂(ξ)| ≲ |ξ|^{-(d-1)/2}`.
//!
//! By rotation invariance only `ρ = |ξ|` matters, and the integral reduces to
//! one polar angle: `∫_0^{2π} e^{-2πiρ cos θ} dθ` for circles and
//! `2π ∫_0^π e^{-2πiρ cos θ} sin θ dθ` for spheres in `R³`.

use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Stop once doubling the node count changes the value by less than this.
    pub tolerance: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            min_nodes: 32,
            max_nodes: 1 << 22,
        }
    }
}

/// Complex value `(re, im)` of `σ̂` at `|ξ| = rho`.
pub fn sphere_fourier_value(d: usize, rho: f64, opts: &QuadratureOptions) -> Result<(f64, f64)> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "|xi| must be finite and >= 0, got {rho}"
        )));
    }
    match d {
        2 => circle_transform(rho, opts),
        3 => sphere3_transform(rho, opts),
        _ => Err(Error::invalid(format!(
            "sphere transform supports d = 2, 3; got {d}"
        ))),
    }
}

/// `|σ̂(ξ)|` at `|ξ| = rho`.
pub fn sphere_fourier_transform(d: usize, rho: f64, opts: &QuadratureOptions) -> Result<f64> {
    let (re, im) = sphere_fourier_value(d, rho, opts)?;
    Ok(re.hypot(im))
}

// Periodic trapezoid rule; converges geometrically, and each doubling reuses
// the previous nodes.
fn circle_transform(rho: f64, opts: &QuadratureOptions) -> Result<(f64, f64)> {
    let w = TAU * rho;
    let f = |theta: f64| {
        let phase = -w * theta.cos();
        (phase.cos(), phase.sin())
    };
    let mut n = opts.min_nodes.max(4);
    let (mut sre, mut sim) = (0.0, 0.0);
    for k in 0..n {
        let (a, b) = f(TAU * k as f64 / n as f64);
        sre += a;
        sim += b;
    }
    let mut prev = (TAU * sre / n as f64, TAU * sim / n as f64);
    let mut change = f64::INFINITY;
    while n < opts.max_nodes {
        for k in 0..n {
            let (a, b) = f(TAU * (k as f64 + 0.5) / n as f64);
            sre += a;
            sim += b;
        }
        n *= 2;
        let next = (TAU * sre / n as f64, TAU * sim / n as f64);
        change = (next.0 - prev.0).hypot(next.1 - prev.1);
        prev = next;
        if change < opts.tolerance {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureFailed {
        last_change: change,
        points: n,
    })
}

const GL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

// Composite Gauss–Legendre in the polar angle, panel count doubling.
fn sphere3_transform(rho: f64, opts: &QuadratureOptions) -> Result<(f64, f64)> {
    let rule = gauss_legendre(GL_ORDER);
    let w = TAU * rho;
    let integrate = |panels: usize| {
        let h = PI / panels as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for &(x, wt) in &rule {
                let theta = mid + 0.5 * h * x;
                let phase = -w * theta.cos();
                let weight = wt * theta.sin();
                re += weight * phase.cos();
                im += weight * phase.sin();
            }
        }
        (TAU * 0.5 * h * re, TAU * 0.5 * h * im)
    };
    let mut panels = (opts.min_nodes / GL_ORDER).max(1);
    let mut prev = integrate(panels);
    let mut change = f64::INFINITY;
    while panels * GL_ORDER < opts.max_nodes {
        panels *= 2;
        let next = integrate(panels);
        change = (next.0 - prev.0).hypot(next.1 - prev.1);
        prev = next;
        if change < opts.tolerance {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureFailed {
        last_change: change,
        points: panels * GL_ORDER,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub d: usize,
    pub xi_magnitudes: Vec<f64>,
    pub sigma_hat_values: Vec<f64>,
    /// `|ξ|^{(d-1)/2} |σ̂(ξ)|`.
    pub normalized_products: Vec<f64>,
    /// `|ξ|^{(d-1)/2} |ξ·∇σ̂(ξ)| / |ξ|`, radial derivative by central differences.
    pub derivative_products: Vec<f64>,
    pub sup_product: f64,
    pub sup_derivative_product: f64,
}

/// Relative step for the radial derivative.
pub const DERIVATIVE_STEP: f64 = 1e-4;

pub fn check_decay(d: usize, xi_grid: &[f64]) -> Result<DecayResult> {
    check_decay_with(d, xi_grid, &QuadratureOptions::default())
}

pub fn check_decay_with(
    d: usize,
    xi_grid: &[f64],
    opts: &QuadratureOptions,
) -> Result<DecayResult> {
    if let Some(bad) = xi_grid.iter().find(|&&r| !(1.0..=1e3).contains(&r)) {
        return Err(Error::invalid(format!("|xi| = {bad} outside [1, 1000]")));
    }
    let power = 0.5 * (d as f64 - 1.0);
    let mut sigma = Vec::with_capacity(xi_grid.len());
    let mut products = Vec::with_capacity(xi_grid.len());
    let mut deriv = Vec::with_capacity(xi_grid.len());
    for &rho in xi_grid {
        let value = sphere_fourier_transform(d, rho, opts)?;
        let h = DERIVATIVE_STEP * rho;
        let up = sphere_fourier_value(d, rho + h, opts)?;
        let down = sphere_fourier_value(d, rho - h, opts)?;
        let slope = (up.0 - down.0).hypot(up.1 - down.1) / (2.0 * h);
        let scale = rho.powf(power);
        sigma.push(value);
        products.push(scale * value);
        deriv.push(scale * slope);
    }
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(DecayResult {
        d,
        xi_magnitudes: xi_grid.to_vec(),
        sup_product: sup(&products),
        sup_derivative_product: sup(&deriv),
        sigma_hat_values: sigma,
        normalized_products: products,
        derivative_products: deriv,
    })
}
