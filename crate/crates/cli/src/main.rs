use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hhf_cli::classify::{invert_nu, mixed_fields, record_fields, NuOutcome, SectorFlags, Value};
use hhf_cli::fmt::Grid;
use hhf_cli::report::{cmd_boundary, cmd_compare, cmd_dos, default_tol};
use hhf_cli::sweep::{cmd_sweep, Coordinate, SweepSpec};
use hhf_cli::Format;
use hhf_core::boundary::{Boundary, BoundaryConfig, BoundaryKind};
use hhf_core::free_energy::FreeEnergy;
use hhf_core::{Error, ModelPoint, SolverConfig};

#[derive(Parser)]
#[command(name = "hhf", version, about = "Hartree-Fock phase diagram of the 2D Hubbard model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Output file; stdout if absent.
    #[arg(long, env = "HHF_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "HHF_FORMAT", default_value = "csv")]
    format: Format,
    /// Worker threads, 0 = one per core.
    #[arg(long, env = "HHF_PARALLELISM", default_value_t = 0)]
    parallelism: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate N0 and its two expansions.
    Dos {
        /// eps grid: lo:hi:count or a comma list; must avoid 0.
        #[arg(long, env = "HHF_EPS", allow_hyphen_values = true, default_value = "-4.5:4.5:180")]
        eps: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Classify one point given mu or a target doping nu.
    Classify {
        #[arg(long = "U", env = "HHF_U", allow_hyphen_values = true)]
        u: f64,
        #[arg(long, env = "HHF_MU", allow_hyphen_values = true, conflicts_with = "nu", required_unless_present = "nu")]
        mu: Option<f64>,
        #[arg(long, env = "HHF_NU", allow_hyphen_values = true)]
        nu: Option<f64>,
        /// Sector parameter delta for the membership report.
        #[arg(long, env = "HHF_DELTA", default_value_t = 1e-3)]
        delta: f64,
        /// Sector II half-width constant M.
        #[arg(long = "M", env = "HHF_M", default_value_t = 1.0)]
        m_bound: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Phase data over a (U, mu) or (U, nu) grid, one row per point, U-major.
    Sweep {
        /// U grid: lo:hi:count or a comma list.
        #[arg(long = "U", env = "HHF_U", allow_hyphen_values = true)]
        u: Grid,
        /// mu grid; bounds may be written U/2, U/2-0.001, ...
        #[arg(long, env = "HHF_MU", allow_hyphen_values = true, conflicts_with = "nu", required_unless_present = "nu")]
        mu: Option<Grid>,
        #[arg(long, env = "HHF_NU", allow_hyphen_values = true)]
        nu: Option<Grid>,
        #[command(flatten)]
        common: Common,
    },
    /// Trace a phase boundary over a U grid.
    Boundary {
        #[arg(long, env = "HHF_KIND")]
        kind: BoundaryKind,
        #[arg(long = "U", env = "HHF_U", allow_hyphen_values = true)]
        u: Grid,
        /// Crossing tolerance in mu; defaults to 1e-15 for F_P and 1e-11 otherwise.
        #[arg(long, env = "HHF_TOL")]
        tol: Option<f64>,
        /// Allow U outside the kind's window.
        #[arg(long, env = "HHF_EXPLORATORY")]
        exploratory: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Numeric crossings against the expansions, with a convergence fit.
    Compare {
        #[arg(long, env = "HHF_KIND")]
        kind: BoundaryKind,
        #[arg(long = "U", env = "HHF_U", allow_hyphen_values = true)]
        u: Grid,
        #[arg(long, env = "HHF_TOL")]
        tol: Option<f64>,
        #[arg(long, env = "HHF_EXPLORATORY")]
        exploratory: bool,
        #[command(flatten)]
        common: Common,
    },
}

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

enum Failure {
    Invalid(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn open(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Invalid(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn fixed_grid(g: &Grid) -> Result<Vec<f64>, Failure> {
    if g.depends_on_u() {
        return Err(Failure::Invalid("U/2 bounds are only meaningful for mu or nu grids".into()));
    }
    g.validate(0.0).map_err(Failure::Invalid)?;
    Ok(g.values(0.0))
}

fn partial(failed: usize) -> Result<(), Failure> {
    if failed > 0 {
        Err(Failure::Numeric(format!("{failed} point(s) failed; see the error column")))
    } else {
        Ok(())
    }
}

fn write_fields(fields: &[(&'static str, Value)], format: Format, mut w: impl Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["field", "value"])?;
            for (k, v) in fields {
                c.write_record([*k, &v.render()])?;
            }
            c.flush()
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
            let v = hhf_cli::fmt::json_g17(serde_json::Value::Object(map));
            serde_json::to_writer_pretty(&mut w, &v)?;
            writeln!(w)
        }
    }
}

fn boundary(exploratory: bool) -> Boundary {
    Boundary::new(
        SolverConfig::default(),
        BoundaryConfig {
            allow_exploratory: exploratory,
            ..Default::default()
        },
    )
}

fn run(cli: Cli) -> Result<(), Failure> {
    let io_fail = |e: io::Error| Failure::Numeric(format!("write failed: {e}"));
    match cli.cmd {
        Cmd::Dos { eps, common } => {
            let grid = fixed_grid(&eps)?;
            cmd_dos(&grid, common.format, open(&common.out)?)?;
        }
        Cmd::Classify {
            u,
            mu,
            nu,
            delta,
            m_bound,
            common,
        } => {
            let fe = FreeEnergy::default();
            let sectors = SectorFlags { delta, m_bound };
            let fields = match (mu, nu) {
                (Some(mu), _) => record_fields(&fe.classify(ModelPoint::new(u, mu)?)?, &sectors),
                (None, Some(nu)) => {
                    ModelPoint::new(u, 0.0)?;
                    match invert_nu(&fe, u, nu)? {
                        NuOutcome::Pure { record, .. } => {
                            let mut f = record_fields(&record, &sectors);
                            f.insert(2, ("nu", Value::Num(nu)));
                            f
                        }
                        NuOutcome::Mixed { report, .. } => mixed_fields(&report),
                    }
                }
                (None, None) => return Err(Failure::Invalid("one of --mu or --nu is required".into())),
            };
            write_fields(&fields, common.format, open(&common.out)?).map_err(io_fail)?;
        }
        Cmd::Sweep { u, mu, nu, common } => {
            let (second, coordinate) = match (mu, nu) {
                (Some(g), _) => (g, Coordinate::Mu),
                (None, Some(g)) => (g, Coordinate::Nu),
                (None, None) => return Err(Failure::Invalid("one of --mu or --nu is required".into())),
            };
            fixed_grid(&u)?;
            let spec = SweepSpec {
                u_range: u,
                second_range: second,
                coordinate,
                output_format: common.format,
                parallelism: common.parallelism,
            };
            spec.validate()?;
            partial(cmd_sweep(&FreeEnergy::default(), &spec, open(&common.out)?)?)?;
        }
        Cmd::Boundary {
            kind,
            u,
            tol,
            exploratory,
            common,
        } => {
            let grid = fixed_grid(&u)?;
            let tol = tol.unwrap_or(default_tol(kind));
            let b = boundary(exploratory);
            partial(cmd_boundary(&b, kind, &grid, tol, common.parallelism, common.format, open(&common.out)?)?)?;
        }
        Cmd::Compare {
            kind,
            u,
            tol,
            exploratory,
            common,
        } => {
            let grid = fixed_grid(&u)?;
            let tol = tol.unwrap_or(default_tol(kind));
            let b = boundary(exploratory);
            partial(cmd_compare(&b, kind, &grid, tol, common.parallelism, common.format, open(&common.out)?)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
