use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::geometry::{HomogeneityChecker, HomogeneityReport, PointSet, ScanMethod};
use crate::incidence::{count, Engine, IncidenceCount, IncidenceQuery};
use crate::regularity::{verify_family, RegularityReport, VerifyOptions, DEFAULT_DET_THRESHOLD};
use crate::{Error, Result};

use super::config::{EngineChoice, ExperimentConfig, ScanChoice};
use super::fit::ScalingFit;

pub const CSV_COLUMNS: &str = "N,delta,count,engine,candidate_pairs,self_incidences,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub delta: f64,
    pub count: u64,
    pub engine: EngineChoice,
    pub candidate_pairs: u64,
    pub self_incidences: u64,
    pub wall_ms: Option<f64>,
}

/// All rows for one delta coefficient, and their fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub coefficient: f64,
    pub rows: Vec<SweepRow>,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub config_hash: String,
    pub regularity: RegularityReport,
    pub homogeneity: Vec<HomogeneityReport>,
    pub runs: Vec<SweepRun>,
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let d = cfg.dimension;
    let family = cfg.family.build(d)?;
    let regularity = verify_family(
        family.as_ref(),
        &VerifyOptions {
            samples: cfg.verify.samples,
            seed: cfg.verify.seed,
            det_threshold: DEFAULT_DET_THRESHOLD,
            ..Default::default()
        },
    )?;

    let params = cfg.homogeneity.params()?;
    let checker = HomogeneityChecker::default();
    let mut sets: Vec<PointSet> = Vec::with_capacity(cfg.n_list.len());
    let mut homogeneity = Vec::with_capacity(cfg.n_list.len());
    for &target in &cfg.n_list {
        let set = cfg.generator.generate(target, d)?;
        let method = match cfg.homogeneity.method {
            ScanChoice::Exact => ScanMethod::Exact,
            ScanChoice::Conservative => ScanMethod::Conservative,
            ScanChoice::Auto if set.len() * d <= checker.exact_work_limit => ScanMethod::Exact,
            ScanChoice::Auto => ScanMethod::Conservative,
        };
        let report = checker.check(&set, &params, method)?;
        if !report.passed {
            return Err(Error::HomogeneityFailed {
                n: set.len(),
                detail: report.to_string(),
            });
        }
        homogeneity.push(report);
        sets.push(set);
    }

    let mut runs = Vec::new();
    for c in cfg.delta_coefficient.values() {
        let mut rows = Vec::with_capacity(sets.len());
        for set in &sets {
            let n = set.len();
            let delta = c * (n as f64).powf(-1.0 / cfg.s);
            let query = IncidenceQuery::new(set, family.as_ref(), delta)?;
            let start = Instant::now();
            let result = count_with(&query, cfg.engine, n)?;
            let wall_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            rows.push(SweepRow {
                n,
                delta,
                count: result.count,
                engine: cfg.engine,
                candidate_pairs: result.candidate_pairs,
                self_incidences: result.self_incidences,
                wall_ms,
            });
        }
        let pairs = rows.iter().map(|r| (r.n, r.count)).collect();
        let fit = ScalingFit::new(pairs, cfg.s, cfg.slack)?;
        runs.push(SweepRun {
            coefficient: c,
            rows,
            fit,
        });
    }

    Ok(SweepOutcome {
        config_hash: cfg.hash(),
        regularity,
        homogeneity,
        runs,
    })
}

fn count_with(q: &IncidenceQuery<'_>, engine: EngineChoice, n: usize) -> Result<IncidenceCount> {
    match engine {
        EngineChoice::Brute => count(q, Engine::Brute),
        EngineChoice::Grid => count(q, Engine::Grid),
        EngineChoice::Both => {
            let grid = count(q, Engine::Grid)?;
            let brute = count(q, Engine::Brute)?;
            if grid.count != brute.count {
                return Err(Error::EngineMismatch {
                    n,
                    brute: brute.count,
                    grid: grid.count,
                });
            }
            Ok(grid)
        }
    }
}

impl SweepOutcome {
    /// The CSV document: `#` header lines, the column line, then one block
    /// of rows per delta coefficient in N order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# config_sha256={}", self.config_hash);
        for line in self.regularity.to_kv_lines() {
            let _ = writeln!(out, "# regularity {line}");
        }
        for h in &self.homogeneity {
            let _ = writeln!(out, "# {h}");
        }
        for run in &self.runs {
            let f = &run.fit;
            let _ = writeln!(
                out,
                "# delta_coefficient={} slope={} bound={} bound_respected={}",
                run.coefficient,
                f.slope,
                f.predicted_exponent + f.slack,
                f.bound_respected
            );
        }
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for run in &self.runs {
            for r in &run.rows {
                let wall = r
                    .wall_ms
                    .map(|ms| format!("{ms:.3}"))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    r.delta,
                    r.count,
                    r.engine.label(),
                    r.candidate_pairs,
                    r.self_incidences,
                    wall
                );
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn bounds_respected(&self) -> bool {
        self.runs.iter().all(|r| r.fit.bound_respected)
    }
}
