use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use incidence_core::energy::s_energy;
use incidence_core::experiment::{
    energy_csv, exit_code_for, report, run_sweep, ExperimentConfig, EXIT_FAILURE, EXIT_OK,
};
use incidence_core::families::{FamilySpec, RadiusSpec, SurfaceFamily};
use incidence_core::fourier::check_decay;
use incidence_core::geometry::{
    check_homogeneity, generate_grid, generate_jittered, read_point_set, write_point_set,
    HomogeneityParams, PointSet, ScanMethod,
};
use incidence_core::incidence::{count, Engine, IncidenceQuery};
use incidence_core::regularity::{verify_family, Regime, VerifyOptions};
use incidence_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "incidence-lab",
    version,
    about = "Thickened incidence counting experiments"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set.
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Points per axis.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Generator::Grid)]
        generator: Generator,
        #[arg(long, default_value_t = 0.25)]
        amplitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check (C0, c0, k0)-homogeneity of a point set.
    Check {
        points: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        covering: f64,
        #[arg(long, default_value_t = 0.4)]
        packing: f64,
        #[arg(long, default_value_t = 4)]
        k0: usize,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
    },
    /// Sample a family's zero set and report its regularity regime.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Count delta-thickened incidences for one point set.
    Count {
        points: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = EngineArg::Grid)]
        engine: EngineArg,
    },
    /// Discrete s-energy of a point set.
    Energy {
        points: PathBuf,
        #[arg(long)]
        s: f64,
        /// Defaults to N^{-1/s}.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Tabulate Fourier decay of the unit sphere's surface measure.
    Decay {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        xi_min: f64,
        #[arg(long, default_value_t = 100.0)]
        xi_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Run a configured N-sweep, write its CSV and print the summary.
    Sweep {
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Grid,
    Jittered,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Conservative,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Brute,
    Grid,
    Both,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FamilyArgs {
    /// TOML file describing the family (`kind = "spheres"`, ...).
    #[arg(long)]
    family: Option<PathBuf>,
    /// Shorthand for spheres of constant radius.
    #[arg(long)]
    sphere: Option<f64>,
}

impl FamilyArgs {
    fn build(&self, dim: usize) -> Result<Arc<dyn SurfaceFamily>> {
        let spec = match (&self.family, self.sphere) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                toml::from_str::<FamilySpec>(&text).map_err(|e| Error::Config(e.to_string()))?
            }
            (None, Some(r)) => FamilySpec::Spheres {
                radius: RadiusSpec {
                    offset: r,
                    linear: vec![],
                    curvature: 0.0,
                },
            },
            (None, None) => return Err(Error::Config("no family given".into())),
        };
        spec.build(dim)
    }
}

fn load_points(path: &Path) -> Result<PointSet> {
    read_point_set(BufReader::new(File::open(path)?))
}

fn run(cli: Cli) -> Result<i32> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.command {
        Command::Gen {
            dim,
            n,
            generator,
            amplitude,
            seed,
            output,
        } => {
            let set = match generator {
                Generator::Grid => generate_grid(n, dim)?,
                Generator::Jittered => generate_jittered(n, dim, amplitude, seed)?,
            };
            match output {
                Some(path) => write_point_set(&set, BufWriter::new(File::create(path)?))?,
                None => write_point_set(&set, &mut out)?,
            }
            EXIT_OK
        }
        Command::Check {
            points,
            covering,
            packing,
            k0,
            method,
        } => {
            let set = load_points(&points)?;
            let params = HomogeneityParams::new(covering, packing, k0)?;
            let method = match method {
                Method::Exact => ScanMethod::Exact,
                Method::Conservative => ScanMethod::Conservative,
            };
            let rep = check_homogeneity(&set, &params, method)?;
            writeln!(out, "N = {}, d = {}", set.len(), set.dim())?;
            writeln!(out, "{rep}")?;
            if rep.passed {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Command::Verify {
            family,
            dim,
            samples,
            seed,
        } => {
            let fam = family.build(dim)?;
            let rep = verify_family(
                fam.as_ref(),
                &VerifyOptions {
                    samples,
                    seed,
                    ..Default::default()
                },
            )?;
            write!(out, "{rep}")?;
            if rep.regime == Regime::Fail {
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
        Command::Count {
            points,
            family,
            delta,
            engine,
        } => {
            let set = load_points(&points)?;
            let fam = family.build(set.dim())?;
            let q = IncidenceQuery::new(&set, fam.as_ref(), delta)?;
            let result = match engine {
                EngineArg::Brute => count(&q, Engine::Brute)?,
                EngineArg::Grid => count(&q, Engine::Grid)?,
                EngineArg::Both => {
                    let g = count(&q, Engine::Grid)?;
                    let b = count(&q, Engine::Brute)?;
                    if g.count != b.count {
                        return Err(Error::EngineMismatch {
                            n: set.len(),
                            brute: b.count,
                            grid: g.count,
                        });
                    }
                    g
                }
            };
            writeln!(out, "count: {}", result.count)?;
            writeln!(out, "engine: {}", result.engine)?;
            writeln!(out, "membership: {}", result.membership)?;
            writeln!(out, "candidate_pairs: {}", result.candidate_pairs)?;
            writeln!(out, "self_incidences: {}", result.self_incidences)?;
            writeln!(out, "fallback_points: {}", result.fallback_points)?;
            EXIT_OK
        }
        Command::Energy { points, s, delta } => {
            let set = load_points(&points)?;
            let delta = delta.unwrap_or_else(|| (set.len() as f64).powf(-1.0 / s));
            let e = s_energy(&set, s, delta)?;
            write!(out, "{}", energy_csv(&[e]))?;
            EXIT_OK
        }
        Command::Decay {
            dim,
            xi_min,
            xi_max,
            steps,
        } => {
            if steps < 2 || xi_min.partial_cmp(&xi_max) != Some(std::cmp::Ordering::Less) {
                return Err(Error::InvalidArgument(
                    "need steps >= 2 and xi_min < xi_max".into(),
                ));
            }
            let grid: Vec<f64> = (0..steps)
                .map(|i| xi_min + (xi_max - xi_min) * i as f64 / (steps - 1) as f64)
                .collect();
            let r = check_decay(dim, &grid)?;
            writeln!(out, "xi,sigma_hat,product,derivative_product")?;
            for i in 0..grid.len() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.xi_magnitudes[i],
                    r.sigma_hat_values[i],
                    r.normalized_products[i],
                    r.derivative_products[i]
                )?;
            }
            writeln!(out, "# sup_product={}", r.sup_product)?;
            writeln!(out, "# sup_derivative_product={}", r.sup_derivative_product)?;
            EXIT_OK
        }
        Command::Sweep { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let outcome = run_sweep(&cfg)?;
            let summary = report(&cfg, &outcome.runs, &outcome.regularity);
            match output.or_else(|| cfg.output.clone()) {
                Some(path) => {
                    outcome.write_csv(&path)?;
                    write!(out, "{}", summary.text)?;
                    writeln!(out, "csv: {}", path.display())?;
                }
                None => {
                    eprint!("{}", summary.text);
                    write!(out, "{}", outcome.to_csv())?;
                }
            }
            summary.exit_code
        }
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
