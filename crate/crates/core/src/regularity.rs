//! Sample-based certification of the regularity hypotheses of a surface
//! family: gradient lower bounds on the zero set, nonvanishing of the bordered
//! (Monge–Ampère) determinant, and the dilation regime of a radius field.
//! Also holds the table of incidence exponents per regime.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::families::{dot, norm, sub, Ellipsoid, FamilyKind, RadiusField, SurfaceFamily};
use crate::{Error, Result};

pub type Rational = Ratio<i64>;

/// Default pass threshold for `min |det M(Φ)|`.
pub const DEFAULT_DET_THRESHOLD: f64 = 1e-6;

/// Zero-set tolerance used by the sampler.
pub const ZERO_SET_TOL: f64 = 1e-12;

/// Relative slack when comparing sampled gradient norms with `epsilon0`.
pub const GRADIENT_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ZeroSetSamples {
    pub samples: Vec<ZeroSetSample>,
    /// Rays without a bracketed sign change, or bisections that did not reach
    /// the tolerance.
    pub skipped: usize,
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn along(x: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, b)| a + t * b).collect()
}

/// Draws `count` base points `x` uniformly in the unit cube and finds a point
/// of `Γ_x` for each. Deterministic in `seed`.
///
/// Bounded families bisect `t ↦ Φ(x, x + tω)` on `[0, 1.001·R]` along a
/// random direction ω. Hyperplanes project a random cube point onto
/// `{y : x·y = 1}`; `x` is redrawn until that plane meets the cube.
pub fn sample_zero_set(
    family: &dyn SurfaceFamily,
    count: usize,
    seed: u64,
) -> Result<ZeroSetSamples> {
    let d = family.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut skipped = 0;

    if let FamilyKind::Hyperplanes = family.kind() {
        for _ in 0..count {
            let x = loop {
                let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                if x.iter().sum::<f64>() >= 1.0 {
                    break x;
                }
            };
            let p: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let shift = (1.0 - dot(&x, &p)) / dot(&x, &x);
            let y = along(&p, &x, shift);
            if family.phi(&x, &y).abs() <= ZERO_SET_TOL {
                samples.push(ZeroSetSample { x, y });
            } else {
                skipped += 1;
            }
        }
        return Ok(ZeroSetSamples { samples, skipped });
    }

    let reach = family
        .bounding_radius()
        .ok_or_else(|| Error::invalid("zero-set sampling needs a bounded family or hyperplanes"))?;
    let reach = reach * 1.001 + 1e-9;
    for _ in 0..count {
        let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let dir = random_unit(&mut rng, d);
        match ray_root(family, &x, &dir, reach) {
            Some(y) => samples.push(ZeroSetSample { x, y }),
            None => skipped += 1,
        }
    }
    Ok(ZeroSetSamples { samples, skipped })
}

/// Bisects `t ↦ Φ(x, x + tω)` on `[0, reach]`.
fn ray_root(family: &dyn SurfaceFamily, x: &[f64], dir: &[f64], reach: f64) -> Option<Vec<f64>> {
    let phi_at = |t: f64| family.phi(x, &along(x, dir, t));
    let (mut lo, mut hi) = (0.0, reach);
    let (f_lo, f_hi) = (phi_at(lo), phi_at(hi));
    if f_lo == 0.0 || f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (phi_at(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if phi_at(lo).abs() <= phi_at(hi).abs() {
        lo
    } else {
        hi
    };
    let y = along(x, dir, t);
    (family.phi(x, &y).abs() <= ZERO_SET_TOL).then_some(y)
}

/// Directions scanned per base point by [`search_degeneracy`].
pub const SCAN_DIRECTIONS: usize = 256;

/// Hunts for zero-set points where `det M(Φ)` vanishes.
///
/// At each of `bases` random base points the zero set is traced along a
/// random great circle of directions; wherever the determinant changes sign
/// between neighbouring directions the arc is bisected. Returns one refined
/// sample per sign change. Unbounded families yield nothing.
pub fn search_degeneracy(
    family: &dyn SurfaceFamily,
    bases: usize,
    seed: u64,
) -> Result<Vec<ZeroSetSample>> {
    let Some(reach) = family.bounding_radius() else {
        return Ok(Vec::new());
    };
    let reach = reach * 1.001 + 1e-9;
    let d = family.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_de6e);
    let plan: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..bases)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let e1 = random_unit(&mut rng, d);
            let e2 = loop {
                let v = random_unit(&mut rng, d);
                let w = along(&v, &e1, -dot(&v, &e1));
                let n = norm(&w);
                if n > 1e-3 {
                    break w.into_iter().map(|c| c / n).collect::<Vec<f64>>();
                }
            };
            (x, e1, e2)
        })
        .collect();
    let found: Vec<Vec<ZeroSetSample>> = plan
        .par_iter()
        .map(|(x, e1, e2)| {
            let at = |theta: f64| -> Result<Option<(f64, ZeroSetSample)>> {
                let dir: Vec<f64> = e1
                    .iter()
                    .zip(e2)
                    .map(|(a, b)| a * theta.cos() + b * theta.sin())
                    .collect();
                let Some(y) = ray_root(family, x, &dir, reach) else {
                    return Ok(None);
                };
                let det = monge_ampere_det(family, x, &y)?.numeric;
                Ok(Some((det, ZeroSetSample { x: x.clone(), y })))
            };
            let step = std::f64::consts::TAU / SCAN_DIRECTIONS as f64;
            let mut out = Vec::new();
            let mut prev = at(0.0)?;
            for k in 1..=SCAN_DIRECTIONS {
                let theta = k as f64 * step;
                let cur = at(theta)?;
                if let (Some((da, _)), Some((db, _))) = (&prev, &cur) {
                    if da.signum() != db.signum() {
                        let (mut lo, mut hi, lo_sign) = (theta - step, theta, da.signum());
                        let mut best = if da.abs() <= db.abs() {
                            prev.clone()
                        } else {
                            cur.clone()
                        };
                        for _ in 0..80 {
                            let mid = 0.5 * (lo + hi);
                            if mid <= lo || mid >= hi {
                                break;
                            }
                            match at(mid)? {
                                Some((dm, s)) => {
                                    if best.as_ref().is_none_or(|b| dm.abs() < b.0.abs()) {
                                        best = Some((dm, s));
                                    }
                                    if dm.signum() == lo_sign {
                                        lo = mid;
                                    } else {
                                        hi = mid;
                                    }
                                }
                                None => break,
                            }
                        }
                        out.extend(best.map(|b| b.1));
                    }
                }
                prev = cur;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MongeAmpere {
    /// Determinant of the bordered matrix built from the family's derivatives.
    pub numeric: f64,
    /// Closed form `(-1)^d 2^{d+1} D_d` for sphere families.
    pub closed_form: Option<f64>,
}

impl MongeAmpere {
    pub fn relative_gap(&self) -> Option<f64> {
        self.closed_form
            .map(|c| (self.numeric - c).abs() / c.abs().max(self.numeric.abs()).max(1e-300))
    }
}

/// Bordered matrix `[[0, ∇_xΦᵀ], [∇_yΦ, (∂²Φ/∂x_i∂y_j)]]` with row `j+1`,
/// column `i+1` holding `∂²Φ/∂x_i∂y_j`.
pub fn bordered_matrix(family: &dyn SurfaceFamily, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
    let d = family.dim();
    let gx = family.grad_x(x, y)?;
    let gy = family.grad_y(x, y)?;
    let h = family.mixed_hessian(x, y)?;
    let mut m = DMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        m[(0, i + 1)] = gx[i];
        m[(i + 1, 0)] = gy[i];
    }
    for i in 0..d {
        for j in 0..d {
            m[(j + 1, i + 1)] = h[i * d + j];
        }
    }
    Ok(m)
}

/// `D_d = -|x-y|² + r(x)(x-y)·∇r(x)`.
pub fn sphere_reduced_det(radius: &RadiusField, x: &[f64], y: &[f64]) -> f64 {
    let diff = sub(x, y);
    -dot(&diff, &diff) + radius.value(x) * dot(&diff, &radius.gradient(x))
}

/// `D_d = r²(û·∇r - 1)` with `û = (x-y)/r`, valid on the zero set only.
pub fn sphere_factored_det(radius: &RadiusField, x: &[f64], y: &[f64]) -> f64 {
    let r = radius.value(x);
    let u: Vec<f64> = sub(x, y).into_iter().map(|c| c / r).collect();
    r * r * (dot(&u, &radius.gradient(x)) - 1.0)
}

fn sphere_closed_form(radius: &RadiusField, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len() as i32;
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2f64.powi(d + 1) * sphere_reduced_det(radius, x, y)
}

pub fn monge_ampere_det(family: &dyn SurfaceFamily, x: &[f64], y: &[f64]) -> Result<MongeAmpere> {
    let numeric = bordered_matrix(family, x, y)?.determinant();
    let closed_form = match family.kind() {
        FamilyKind::Spheres(radius) => Some(sphere_closed_form(radius, x, y)),
        _ => None,
    };
    Ok(MongeAmpere {
        numeric,
        closed_form,
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Minimum of `value` over the samples, ties broken by lexicographic `(x, y)`.
fn min_over<F>(samples: &[ZeroSetSample], value: F) -> Result<(f64, usize)>
where
    F: Fn(&ZeroSetSample) -> Result<f64> + Sync,
{
    let values: Vec<f64> = samples.par_iter().map(&value).collect::<Result<_>>()?;
    let best = (0..samples.len())
        .min_by(|&i, &j| {
            values[i]
                .total_cmp(&values[j])
                .then_with(|| lex_cmp(&samples[i].x, &samples[j].x))
                .then_with(|| lex_cmp(&samples[i].y, &samples[j].y))
        })
        .ok_or_else(|| Error::invalid("no zero-set samples"))?;
    Ok((values[best], best))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhongSteinCheck {
    pub passed: bool,
    pub min_abs_det: f64,
    pub witness: ZeroSetSample,
    pub threshold: f64,
    pub sample_count: usize,
}

/// Passes iff `min |det M(Φ)| >= threshold` over the samples.
pub fn verify_phong_stein(
    family: &dyn SurfaceFamily,
    samples: &[ZeroSetSample],
    threshold: f64,
) -> Result<PhongSteinCheck> {
    if samples.is_empty() {
        return Err(Error::invalid("Phong–Stein verification needs samples"));
    }
    let (min_abs_det, at) = min_over(samples, |s| {
        Ok(monge_ampere_det(family, &s.x, &s.y)?.numeric.abs())
    })?;
    Ok(PhongSteinCheck {
        passed: min_abs_det >= threshold,
        min_abs_det,
        witness: samples[at].clone(),
        threshold,
        sample_count: samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    PhongStein,
    ExpansiveDilate,
    ContractiveDilate,
    Indeterminate,
    Fail,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PhongStein => "phong-stein",
            Regime::ExpansiveDilate => "expansive-dilate",
            Regime::ContractiveDilate => "contractive-dilate",
            Regime::Indeterminate => "indeterminate",
            Regime::Fail => "fail",
        })
    }
}

/// Dilation regime of `Γ_x = x + r(x)·∂K`.
///
/// `∇_xΦ` is proportional to `∇f(u) + ∇r(x)` on the zero set, and `|∇f|`
/// ranges over `[1/M, 1/m]` there, so the gradient stays away from zero when
/// `sup|∇r| < 1/M` (contractive) or `inf|∇r| > 1/m` (expansive). For the unit
/// sphere both thresholds are 1.
pub fn classify_radius_regime(radius: &RadiusField, body: &Ellipsoid) -> Regime {
    let b = radius.bounds();
    let (gmin, gmax) = body.profile_gradient_range();
    if b.sup_grad_norm < gmin {
        Regime::ContractiveDilate
    } else if b.inf_grad_norm > gmax {
        Regime::ExpansiveDilate
    } else {
        Regime::Indeterminate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub gamma: Rational,
    /// Open interval of admissible `s`; `None` when empty.
    pub s_range: Option<(Rational, Rational)>,
    /// Exponent of `N` in the exact-incidence bound.
    pub incidence_exponent: Rational,
    /// Set when only the trivial bound `2 - 1/d` is available.
    pub trivial: bool,
}

impl Prediction {
    pub fn admits(&self, s: f64) -> bool {
        self.s_range
            .is_some_and(|(lo, hi)| s > to_f64(lo) && s < to_f64(hi))
    }
}

pub fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Incidence exponent `2 - 1/(d - γ)` and admissible range `(d - γ, d)`.
pub fn predicted_exponent(regime: Regime, d: usize) -> Result<Prediction> {
    if d < 2 {
        return Err(Error::invalid(format!("dimension must be >= 2, got {d}")));
    }
    let di = d as i64;
    let dq = Rational::from_integer(di);
    let two = Rational::from_integer(2);
    let gamma = match regime {
        Regime::PhongStein => Rational::new(di - 1, 2),
        Regime::ExpansiveDilate | Regime::ContractiveDilate => Rational::new(di - 2, 2),
        Regime::Indeterminate | Regime::Fail => {
            return Err(Error::invalid(format!("no exponent for regime {regime}")))
        }
    };
    let threshold = dq - gamma;
    if threshold >= dq {
        // γ = 0: the s-range is empty and only the trivial bound holds
        return Ok(Prediction {
            gamma,
            s_range: None,
            incidence_exponent: two - Rational::new(1, di),
            trivial: true,
        });
    }
    Ok(Prediction {
        gamma,
        s_range: Some((threshold, dq)),
        incidence_exponent: two - threshold.recip(),
        trivial: false,
    })
}

/// As [`predicted_exponent`], routing contractive dilates of a round body
/// through the Phong–Stein case.
pub fn predicted_exponent_for_body(
    regime: Regime,
    d: usize,
    body: Option<&Ellipsoid>,
) -> Result<Prediction> {
    match (regime, body) {
        (Regime::ContractiveDilate, Some(b)) if b.is_sphere() => {
            predicted_exponent(Regime::PhongStein, d)
        }
        _ => predicted_exponent(regime, d),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub det_threshold: f64,
    /// Base points for the sign-change search; 0 disables it.
    pub search_bases: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 2000,
            seed: 0,
            det_threshold: DEFAULT_DET_THRESHOLD,
            search_bases: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub family: String,
    pub dim: usize,
    pub min_grad_x: f64,
    pub min_grad_y: f64,
    pub min_abs_ma_det: f64,
    pub ma_witness: ZeroSetSample,
    pub regime: Regime,
    pub gamma: Option<Rational>,
    pub prediction: Option<Prediction>,
    pub sample_count: usize,
    pub skipped: usize,
    pub epsilon0_used: f64,
    /// Set whenever `regime == Fail`.
    pub fail_witness: Option<(ZeroSetSample, String)>,
}

impl RegularityReport {
    /// `key: value` lines.
    pub fn to_kv_lines(&self) -> Vec<String> {
        let fmt_q = |q: Rational| q.to_string();
        let mut lines = vec![
            format!("family: {}", self.family),
            format!("dimension: {}", self.dim),
            format!("regime: {}", self.regime),
            format!(
                "gamma: {}",
                self.gamma.map(fmt_q).unwrap_or_else(|| "none".into())
            ),
        ];
        match &self.prediction {
            Some(p) => {
                let range = p
                    .s_range
                    .map(|(lo, hi)| format!("({}, {})", fmt_q(lo), fmt_q(hi)))
                    .unwrap_or_else(|| "empty".into());
                lines.push(format!("s_range: {range}"));
                lines.push(format!(
                    "incidence_exponent: {}",
                    fmt_q(p.incidence_exponent)
                ));
                lines.push(format!("trivial_bound: {}", p.trivial));
            }
            None => lines.push("incidence_exponent: none".into()),
        }
        lines.extend([
            format!("min_grad_x: {:e}", self.min_grad_x),
            format!("min_grad_y: {:e}", self.min_grad_y),
            format!("min_abs_ma_det: {:e}", self.min_abs_ma_det),
            format!(
                "ma_witness: x={:?} y={:?}",
                self.ma_witness.x, self.ma_witness.y
            ),
            format!("epsilon0: {:e}", self.epsilon0_used),
            format!("samples: {}", self.sample_count),
            format!("skipped: {}", self.skipped),
        ]);
        if let Some((w, why)) = &self.fail_witness {
            lines.push(format!("fail_witness: x={:?} y={:?} ({why})", w.x, w.y));
        }
        lines
    }
}

impl fmt::Display for RegularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.to_kv_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Samples the zero set, measures gradient and determinant minima, and
/// decides which regime (hence which exponent) applies.
pub fn verify_family(family: &dyn SurfaceFamily, opts: &VerifyOptions) -> Result<RegularityReport> {
    let d = family.dim();
    let drawn = sample_zero_set(family, opts.samples, opts.seed)?;
    let mut samples = drawn.samples;
    if samples.is_empty() {
        return Err(Error::invalid("no zero-set samples could be bracketed"));
    }
    samples.extend(search_degeneracy(family, opts.search_bases, opts.seed)?);
    let (min_gx, at_gx) = min_over(&samples, |s| Ok(norm(&family.grad_x(&s.x, &s.y)?)))?;
    let (min_gy, at_gy) = min_over(&samples, |s| Ok(norm(&family.grad_y(&s.x, &s.y)?)))?;
    let ps = verify_phong_stein(family, &samples, opts.det_threshold)?;
    let eps0 = family.epsilon0();

    // epsilon0 is attained exactly by constant-radius spheres; allow rounding
    let floor = eps0 * (1.0 - GRADIENT_RTOL);
    let gradient_failure = if min_gx < floor || eps0 <= 0.0 && min_gx < opts.det_threshold {
        Some((
            samples[at_gx].clone(),
            format!("|grad_x Phi| = {min_gx:e} below epsilon0"),
        ))
    } else if min_gy < floor || eps0 <= 0.0 && min_gy < opts.det_threshold {
        Some((
            samples[at_gy].clone(),
            format!("|grad_y Phi| = {min_gy:e} below epsilon0"),
        ))
    } else {
        None
    };
    let det_failure = || {
        Some((
            ps.witness.clone(),
            format!(
                "|det M(Phi)| = {:e} below {:e}",
                ps.min_abs_det, ps.threshold
            ),
        ))
    };

    let mut body = None;
    let (regime, fail_witness) = match family.kind() {
        FamilyKind::Spheres(radius) => {
            let unit = Ellipsoid::unit_ball(d)?;
            if ps.passed && gradient_failure.is_none() {
                (Regime::PhongStein, None)
            } else if classify_radius_regime(radius, &unit) == Regime::ExpansiveDilate
                && gradient_failure.is_none()
            {
                (Regime::ExpansiveDilate, None)
            } else {
                (Regime::Fail, gradient_failure.or_else(det_failure))
            }
        }
        FamilyKind::DilatedBody(ellipsoid, radius) => {
            body = Some(ellipsoid.clone());
            match (classify_radius_regime(radius, ellipsoid), gradient_failure) {
                (_, Some(w)) => (Regime::Fail, Some(w)),
                (Regime::ContractiveDilate, None) if ellipsoid.is_sphere() && ps.passed => {
                    (Regime::PhongStein, None)
                }
                (regime, _) => (regime, None),
            }
        }
        FamilyKind::Hyperplanes | FamilyKind::Custom => {
            if ps.passed && gradient_failure.is_none() {
                (Regime::PhongStein, None)
            } else {
                (Regime::Fail, gradient_failure.or_else(det_failure))
            }
        }
    };

    let prediction = match regime {
        Regime::Fail | Regime::Indeterminate => None,
        r => Some(predicted_exponent_for_body(r, d, body.as_ref())?),
    };
    Ok(RegularityReport {
        family: family.label(),
        dim: d,
        min_grad_x: min_gx,
        min_grad_y: min_gy,
        min_abs_ma_det: ps.min_abs_det,
        ma_witness: ps.witness,
        regime,
        gamma: prediction.map(|p| p.gamma),
        prediction,
        sample_count: samples.len(),
        skipped: drawn.skipped,
        epsilon0_used: eps0,
        fail_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{DilatedBody, HyperplaneFamily, SphereFamily};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn constant_circle_samples_lie_on_circle() {
        let f = SphereFamily::constant(2, 0.1).unwrap();
        let s = sample_zero_set(&f, 500, 1).unwrap();
        assert_eq!(s.samples.len(), 500);
        for p in &s.samples {
            assert!((norm(&sub(&p.x, &p.y)) - 0.1).abs() <= 1e-12);
        }
    }

    #[test]
    fn hyperplane_samples_on_plane() {
        let f = HyperplaneFamily::new(3).unwrap();
        let s = sample_zero_set(&f, 500, 2).unwrap();
        assert_eq!(s.samples.len(), 500);
        for p in &s.samples {
            assert!((dot(&p.x, &p.y) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dilated_ellipsoid_samples_converge() {
        let f = DilatedBody::new(
            Ellipsoid::new(vec![1.4, 0.6, 0.9]).unwrap(),
            RadiusField::affine(0.1, vec![0.02, 0.01, 0.0]).unwrap(),
        )
        .unwrap();
        let s = sample_zero_set(&f, 500, 3).unwrap();
        assert_eq!(s.skipped, 0);
        for p in &s.samples {
            assert!(f.phi(&p.x, &p.y).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = SphereFamily::constant(3, 0.2).unwrap();
        let a = sample_zero_set(&f, 50, 9).unwrap();
        let b = sample_zero_set(&f, 50, 9).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn constant_circle_determinant() {
        let f = SphereFamily::constant(2, 0.1).unwrap();
        let ma = monge_ampere_det(&f, &[0.5, 0.5], &[0.6, 0.5]).unwrap();
        assert!((ma.closed_form.unwrap() + 0.08).abs() < 1e-15);
        assert!((ma.numeric + 0.08).abs() < 1e-14);
    }

    #[test]
    fn hyperplane_determinant_is_minus_one() {
        let f = HyperplaneFamily::new(3).unwrap();
        for s in sample_zero_set(&f, 200, 4).unwrap().samples {
            let ma = monge_ampere_det(&f, &s.x, &s.y).unwrap();
            assert!((ma.numeric + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn factored_form_matches_reduced_form() {
        let r = RadiusField::affine(0.2, vec![0.05, 0.0]).unwrap();
        let f = SphereFamily::new(r.clone()).unwrap();
        for s in sample_zero_set(&f, 1000, 5).unwrap().samples {
            let a = sphere_reduced_det(&r, &s.x, &s.y);
            let b = sphere_factored_det(&r, &s.x, &s.y);
            assert!((a - b).abs() <= 1e-10);
            let ma = monge_ampere_det(&f, &s.x, &s.y).unwrap();
            assert!(ma.relative_gap().unwrap() <= 1e-8);
        }
    }

    #[test]
    fn phong_stein_pass_and_fail() {
        let good = SphereFamily::new(RadiusField::affine(0.3, vec![0.5, 0.5]).unwrap()).unwrap();
        let s = sample_zero_set(&good, 2000, 6).unwrap().samples;
        assert!(
            verify_phong_stein(&good, &s, DEFAULT_DET_THRESHOLD)
                .unwrap()
                .passed
        );

        let steep = SphereFamily::new(RadiusField::affine(0.2, vec![2.0, 0.0]).unwrap()).unwrap();
        let s = sample_zero_set(&steep, 20_000, 7).unwrap().samples;
        let check = verify_phong_stein(&steep, &s, 1e-2).unwrap();
        assert!(!check.passed);
        assert!(check.min_abs_det < 1e-2);
        assert!(verify_phong_stein(&steep, &[], 1e-2).is_err());
    }

    #[test]
    fn regime_table() {
        let ball = Ellipsoid::unit_ball(3).unwrap();
        let slow = RadiusField::affine(1.0, vec![0.3, 0.4, 0.0]).unwrap();
        assert_eq!(
            classify_radius_regime(&slow, &ball),
            Regime::ContractiveDilate
        );
        let fast = RadiusField::affine(1.0, vec![3.0, 0.0, 0.0]).unwrap();
        let ell = Ellipsoid::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(classify_radius_regime(&fast, &ell), Regime::ExpansiveDilate);
        // |∇r| ranges over [0.5, ~4.6]
        let mixed = RadiusField::quadratic(4.0, vec![0.5, 0.0, 0.0], 2.5).unwrap();
        let b = mixed.bounds();
        assert_eq!(b.inf_grad_norm, 0.5);
        assert!(b.sup_grad_norm > 3.0);
        assert_eq!(classify_radius_regime(&mixed, &ball), Regime::Indeterminate);
    }

    #[test]
    fn exponent_table() {
        let p = predicted_exponent(Regime::PhongStein, 2).unwrap();
        assert_eq!(p.incidence_exponent, q(4, 3));
        assert_eq!(p.s_range, Some((q(3, 2), q(2, 1))));
        assert_eq!(p.gamma, q(1, 2));
        let p = predicted_exponent(Regime::PhongStein, 3).unwrap();
        assert_eq!(p.incidence_exponent, q(3, 2));
        let p = predicted_exponent(Regime::ExpansiveDilate, 3).unwrap();
        assert_eq!(p.incidence_exponent, q(8, 5));
        assert_eq!(p.s_range, Some((q(5, 2), q(3, 1))));
        let p = predicted_exponent(Regime::ExpansiveDilate, 2).unwrap();
        assert!(p.trivial && p.s_range.is_none());
        assert_eq!(p.incidence_exponent, q(3, 2));
        assert!(predicted_exponent(Regime::Indeterminate, 3).is_err());
        assert!(predicted_exponent(Regime::PhongStein, 1).is_err());

        let ball = Ellipsoid::unit_ball(3).unwrap();
        let p = predicted_exponent_for_body(Regime::ContractiveDilate, 3, Some(&ball)).unwrap();
        assert_eq!(p.incidence_exponent, q(3, 2));
    }

    #[test]
    fn report_regimes() {
        let opts = VerifyOptions {
            samples: 3000,
            ..Default::default()
        };
        let ps = SphereFamily::new(RadiusField::affine(0.3, vec![0.5, 0.5]).unwrap()).unwrap();
        let rep = verify_family(&ps, &opts).unwrap();
        assert_eq!(rep.regime, Regime::PhongStein);
        assert_eq!(rep.gamma, Some(q(1, 2)));

        let hp = HyperplaneFamily::new(3).unwrap();
        assert_eq!(
            verify_family(&hp, &opts).unwrap().regime,
            Regime::PhongStein
        );

        let fast = DilatedBody::new(
            Ellipsoid::new(vec![1.0, 0.8, 0.9]).unwrap(),
            RadiusField::affine(0.1, vec![2.0, 0.5, 0.0]).unwrap(),
        )
        .unwrap();
        let rep = verify_family(&fast, &opts).unwrap();
        assert_eq!(rep.regime, Regime::ExpansiveDilate);
        assert_eq!(rep.prediction.unwrap().incidence_exponent, q(8, 5));

        let rep = verify_family(
            &SphereFamily::new(RadiusField::affine(0.2, vec![1.0, 0.0]).unwrap()).unwrap(),
            &VerifyOptions {
                samples: 20_000,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(rep.regime, Regime::Fail);
        assert!(rep.fail_witness.is_some());
        assert!(rep.gamma.is_none());
        let text = rep.to_string();
        assert!(text.contains("regime: fail"));
    }

    #[test]
    fn threshold_monotone() {
        let f = SphereFamily::new(RadiusField::affine(0.3, vec![0.5, 0.5]).unwrap()).unwrap();
        let s = sample_zero_set(&f, 500, 1).unwrap().samples;
        let min = verify_phong_stein(&f, &s, 0.0).unwrap().min_abs_det;
        for t in [min * 0.5, min, min * 0.999] {
            assert!(verify_phong_stein(&f, &s, t).unwrap().passed);
        }
        assert!(!verify_phong_stein(&f, &s, min * 1.001).unwrap().passed);
    }

    #[test]
    fn sign_change_search_pins_degeneracy() {
        let steep = SphereFamily::new(RadiusField::affine(0.2, vec![2.0, 0.0]).unwrap()).unwrap();
        let found = search_degeneracy(&steep, 8, 4).unwrap();
        assert!(!found.is_empty());
        for s in &found {
            assert!(steep.phi(&s.x, &s.y).abs() <= ZERO_SET_TOL);
            assert!(monge_ampere_det(&steep, &s.x, &s.y).unwrap().numeric.abs() < 1e-9);
        }
        let tame = SphereFamily::new(RadiusField::affine(0.3, vec![0.5, 0.5]).unwrap()).unwrap();
        assert!(search_degeneracy(&tame, 8, 4).unwrap().is_empty());
        assert!(search_degeneracy(&HyperplaneFamily::new(2).unwrap(), 8, 4)
            .unwrap()
            .is_empty());
    }
}
