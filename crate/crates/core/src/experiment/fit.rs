use crate::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub residual_max: f64,
    /// Pairs left out because `y <= 0`.
    pub dropped: usize,
}

pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<LogLogFit> {
    if pairs.iter().any(|&(x, _)| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("fit abscissae must be positive"));
    }
    let logs: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|&&(_, y)| y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let dropped = pairs.len() - logs.len();
    if logs.is_empty() {
        return Err(Error::invalid("all counts are zero; nothing to fit"));
    }
    if logs.len() < 2 {
        return Err(Error::invalid(
            "need at least two positive counts to fit a slope",
        ));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_max = logs
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(LogLogFit {
        slope,
        intercept,
        residual_max,
        dropped,
    })
}

/// Measured growth of incidence counts against the `N^{2-1/s}` bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub pairs: Vec<(usize, u64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_max: f64,
    /// Zero counts were present and left out of the fit.
    pub zero_counts_dropped: bool,
    pub predicted_exponent: f64,
    pub slack: f64,
    pub bound_respected: bool,
}

impl ScalingFit {
    pub fn new(pairs: Vec<(usize, u64)>, s: f64, slack: f64) -> Result<Self> {
        let raw: Vec<(f64, f64)> = pairs.iter().map(|&(n, c)| (n as f64, c as f64)).collect();
        let fit = fit_exponent(&raw)?;
        let predicted_exponent = 2.0 - 1.0 / s;
        Ok(Self {
            pairs,
            slope: fit.slope,
            intercept: fit.intercept,
            residual_max: fit.residual_max,
            zero_counts_dropped: fit.dropped > 0,
            predicted_exponent,
            slack,
            bound_respected: fit.slope <= predicted_exponent + slack,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_cube() {
        let f = fit_exponent(&[(2.0, 8.0), (4.0, 64.0)]).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-14);
        assert!(f.residual_max < 1e-14);
    }

    #[test]
    fn constant_counts() {
        let f = fit_exponent(&[(10.0, 5.0), (100.0, 5.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(usize, u64)> = (1..6u32).map(|k| (8usize.pow(k), 16u64.pow(k))).collect();
        let f = ScalingFit::new(pairs, 1.5, 0.1).unwrap();
        assert!((f.slope - 4.0 / 3.0).abs() < 1e-9);
        assert!(f.bound_respected);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let n = 2f64.powi(6 + k);
                (n, n.powf(1.3) * (1.0 + rng.gen_range(-0.01..0.01)))
            })
            .collect();
        let f = fit_exponent(&pairs).unwrap();
        assert!((f.slope - 1.3).abs() < 0.02);
    }

    #[test]
    fn zero_counts() {
        let f = ScalingFit::new(vec![(4, 0), (16, 3), (64, 12)], 1.6, 0.1).unwrap();
        assert!(f.zero_counts_dropped);
        assert_eq!(f.pairs.len(), 3);
        assert!(fit_exponent(&[(4.0, 0.0), (16.0, 0.0)]).is_err());
        assert!(fit_exponent(&[(4.0, 0.0), (16.0, 2.0)]).is_err());
    }
}
