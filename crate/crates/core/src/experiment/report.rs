use std::fmt::Write as _;

use crate::energy::EnergyResult;
use crate::regularity::{Rational, Regime, RegularityReport};
use crate::Error;

use super::config::ExperimentConfig;
use super::sweep::SweepRun;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;

/// Exit code for an error that stopped a run.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => {
            EXIT_INVALID_CONFIG
        }
        _ => EXIT_FAILURE,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub exit_code: i32,
}

fn ratio(q: Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn report(cfg: &ExperimentConfig, runs: &[SweepRun], regularity: &RegularityReport) -> Report {
    let d = cfg.dimension;
    let mut t = String::new();
    let _ = writeln!(t, "family: {} (d = {d})", regularity.family);
    let _ = writeln!(t, "regime: {}", regularity.regime);
    let _ = writeln!(
        t,
        "gamma: {}",
        regularity.gamma.map(ratio).unwrap_or_else(|| "none".into())
    );
    let trivial = format!(
        "2 − 1/d = {}",
        ratio(Rational::new(2 * d as i64 - 1, d as i64))
    );
    match &regularity.prediction {
        Some(p) if !p.trivial => {
            let (lo, hi) = p.s_range.expect("non-trivial prediction has a range");
            let _ = writeln!(t, "admissible s: ({}, {})", ratio(lo), ratio(hi));
            let _ = writeln!(t, "predicted exponent: {}", ratio(p.incidence_exponent));
            if !p.admits(cfg.s) {
                let _ = writeln!(t, "warning: s = {} outside the admissible range", cfg.s);
            }
        }
        Some(_) => {
            let _ = writeln!(t, "admissible s: empty");
            let _ = writeln!(t, "predicted exponent: trivial bound {trivial}");
        }
        None => {
            let _ = writeln!(
                t,
                "predicted exponent: no paper exponent; trivial bound {trivial}"
            );
        }
    }
    if regularity.regime == Regime::Fail {
        if let Some((w, why)) = &regularity.fail_witness {
            let _ = writeln!(t, "regularity witness: x={:?} y={:?} ({why})", w.x, w.y);
        }
    }
    let _ = writeln!(t, "s: {}", cfg.s);
    let mut ok = true;
    for run in runs {
        let f = &run.fit;
        ok &= f.bound_respected;
        let _ = writeln!(
            t,
            "c = {}: measured slope {:.4} vs 2 - 1/s = {:.4} (+{} slack); residual max {:.3e}{}; bound_respected = {}",
            run.coefficient,
            f.slope,
            f.predicted_exponent,
            f.slack,
            f.residual_max,
            if f.zero_counts_dropped { "; zero counts dropped" } else { "" },
            f.bound_respected
        );
    }
    Report {
        text: t,
        exit_code: if ok { EXIT_OK } else { EXIT_FAILURE },
    }
}

pub const ENERGY_COLUMNS: &str = "N,s,delta,offdiag,diag,total";

pub fn energy_csv(rows: &[EnergyResult]) -> String {
    let mut out = format!("{ENERGY_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.s, r.delta, r.offdiag_sum, r.diag_term, r.total
        );
    }
    out
}
