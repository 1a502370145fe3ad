use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde::Deserialize;
use serde_json::json;

use so3ni::coherent::{cs_coeffs, ni_to_cs, CSLabel, NIStateLabel};
use so3ni::geometry::{haar_grid, sphere_grid, GroupElement};
use so3ni::lambda::kernel_closed_form;
use so3ni::lie::{validate_structure, OrbitLabel, StructureConstants};
use so3ni::reduction::{
    reduced_spectrum, spectrum_distance, with_multiplicity, HamiltonianSpec, WignerOracle,
};
use so3ni::special::{spherical_y, wigner_d, WignerIndex};
use so3ni::verify::{reports_to_json, run_suite, Suite, VerifyConfig};
use so3ni::{Error, Result};

#[derive(Parser)]
#[command(
    name = "so3ni",
    version,
    about = "Non-commutative integration on SO(3)"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 3)]
    jmax: u32,
    /// Points per coordinate. Defaults: 64 for `verify`, 8 for tables.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check antisymmetry and Jacobi for a structure-constant file (so(3) by default).
    Validate {
        /// JSON `{"dim": n, "entries": [[a, b, c, value], ...]}`.
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// CSV of D^j_mn on the Haar grid.
    WignerTable {
        #[arg(long)]
        j: u32,
    },
    /// CSV of Y_jm on the sphere grid.
    HarmonicsTable {
        #[arg(long)]
        j: u32,
    },
    /// CSV of the kernel at one group element or over the Haar grid.
    Kernel {
        #[arg(long)]
        j: u32,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// `re,im` of q̄′
        #[arg(long, allow_hyphen_values = true)]
        qbar: String,
        /// `phi,theta,psi`
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
    },
    /// Coherent-state coefficients for ζ, or for the NI state at q.
    CsOverlap {
        #[arg(long)]
        j: u32,
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "q",
            required_unless_present = "q"
        )]
        zeta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
    /// Reduced spectrum with the Wigner-basis oracle comparison.
    Spectrum {
        #[arg(long)]
        j: Option<u32>,
        /// JSON `{"cAB": [[..]], "cA": [..], "j": n}`; `cAB = -diag(1,1,2)` when omitted.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Run invariant suites and emit a report array.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Record wall-clock times in `runtime_ms`.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Deserialize)]
struct HamiltonianFile {
    #[serde(rename = "cAB")]
    c_ab: [[f64; 3]; 3],
    #[serde(rename = "cA", default)]
    c_a: [f64; 3],
    j: Option<u32>,
}

fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(Error::Invalid(format!(
            "expected {n} comma-separated numbers, got '{s}'"
        ))),
    }
}

fn parse_complex(s: &str) -> Result<Complex<f64>> {
    let v = parse_reals(s, 2)?;
    Ok(Complex::new(v[0], v[1]))
}

fn orbit(j: u32) -> Result<OrbitLabel> {
    OrbitLabel::new(j as i64)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let table_grid = g.grid.unwrap_or(8);
    match cli.command {
        Command::Validate { structure } => {
            let c = match structure {
                Some(p) => StructureConstants::<f64>::from_json(&read(&p)?)?,
                None => StructureConstants::so3(),
            };
            let r = validate_structure(&c);
            let doc = json!({
                "dim": c.dim(),
                "antisymmetry_residual": r.antisymmetry_residual,
                "jacobi_residual": r.jacobi_residual,
                "antisymmetric": r.antisymmetric,
                "jacobi": r.jacobi,
                "pass": r.pass(),
            });
            emit_json(&g.out, &serde_json::to_string_pretty(&doc)?)?;
            Ok(r.pass())
        }
        Command::WignerTable { j } => {
            let grid = haar_grid::<f64>(table_grid, table_grid, table_grid)?;
            let mut w = csv::Writer::from_writer(sink(&g.out)?);
            w.write_record(["j", "m", "n", "phi", "theta", "psi", "ReD", "ImD"])?;
            for idx in WignerIndex::all(j) {
                for node in &grid.nodes {
                    let d = wigner_d(idx, node)?;
                    w.serialize((j, idx.m, idx.n, node.phi, node.theta, node.psi, d.re, d.im))?;
                }
            }
            w.flush()?;
            Ok(true)
        }
        Command::HarmonicsTable { j } => {
            let grid = sphere_grid::<f64>(table_grid, table_grid)?;
            let mut w = csv::Writer::from_writer(sink(&g.out)?);
            w.write_record(["j", "m", "phi", "theta", "ReY", "ImY"])?;
            let ji = j as i32;
            for m in -ji..=ji {
                for x in &grid.nodes {
                    let y = spherical_y(j, m, x)?;
                    w.serialize((j, m, x.phi, x.theta, y.re, y.im))?;
                }
            }
            w.flush()?;
            Ok(true)
        }
        Command::Kernel {
            j,
            q,
            qbar,
            g: elem,
        } => {
            let (q, qbar, label) = (parse_complex(&q)?, parse_complex(&qbar)?, orbit(j)?);
            let nodes = match elem {
                Some(s) => {
                    let v = parse_reals(&s, 3)?;
                    vec![GroupElement::new(v[0], v[1], v[2])]
                }
                None => haar_grid::<f64>(table_grid, table_grid, table_grid)?.nodes,
            };
            let mut w = csv::Writer::from_writer(sink(&g.out)?);
            w.write_record([
                "j", "Re_q", "Im_q", "Re_qbar", "Im_qbar", "phi", "theta", "psi", "ReK", "ImK",
            ])?;
            for node in &nodes {
                let k = kernel_closed_form(q, qbar, node, label);
                w.serialize((
                    j, q.re, q.im, qbar.re, qbar.im, node.phi, node.theta, node.psi, k.re, k.im,
                ))?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::CsOverlap { j, zeta, q } => {
            let label = orbit(j)?;
            let (scale, cs) = match (zeta, q) {
                (Some(z), _) => (
                    Complex::new(1.0, 0.0),
                    CSLabel::new(label, parse_complex(&z)?)?,
                ),
                (None, Some(q)) => ni_to_cs(&NIStateLabel::new(label, parse_complex(&q)?))?,
                (None, None) => {
                    return Err(Error::Invalid("one of --zeta or --q is required".into()))
                }
            };
            let u: Vec<[f64; 2]> = cs_coeffs(&cs).iter().map(|c| [c.re, c.im]).collect();
            let doc = json!({
                "j": j,
                "u_m": u,
                "scale": [scale.re, scale.im],
                "zeta": [cs.zeta.re, cs.zeta.im],
            });
            emit_json(&g.out, &serde_json::to_string_pretty(&doc)?)?;
            Ok(true)
        }
        Command::Spectrum { j, hamiltonian } => {
            let (spec, file_j) = match hamiltonian {
                Some(p) => {
                    let h: HamiltonianFile = serde_json::from_str(&read(&p)?)?;
                    (HamiltonianSpec::new(h.c_ab, h.c_a)?, h.j)
                }
                None => (
                    HamiltonianSpec::new(
                        [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -2.0]],
                        [0.0; 3],
                    )?,
                    None,
                ),
            };
            let j = j
                .or(file_j)
                .ok_or_else(|| Error::Invalid("--j is required".into()))?;
            let sols = reduced_spectrum(&spec, orbit(j)?)?;
            let oracle = WignerOracle::new(j)?.spectrum(&spec)?;
            let residual = spectrum_distance(&with_multiplicity(&sols), &oracle);
            let dim = (2 * j + 1) as usize;
            // each oracle level must recur in blocks of 2j+1
            let degenerate = oracle
                .chunks(dim)
                .all(|c| c.iter().all(|e| (e - c[0]).norm() < 1e-8));
            let doc = json!({
                "j": j,
                "energies": sols.iter().map(|s| s.energy.re).collect::<Vec<_>>(),
                "energies_imag": sols.iter().map(|s| s.energy.im).collect::<Vec<_>>(),
                "degeneracy_check": degenerate,
                "oracle_residual": residual,
            });
            emit_json(&g.out, &serde_json::to_string_pretty(&doc)?)?;
            Ok(degenerate && residual <= 1e-6 * g.tol_scale)
        }
        Command::Verify { suite, timings } => {
            let suite: Suite = suite.parse()?;
            let cfg = VerifyConfig {
                seed: g.seed,
                jmax: g.jmax,
                grid: g.grid.unwrap_or(64),
                tol_scale: g.tol_scale,
                timings,
            };
            let reports = run_suite(suite, &cfg);
            emit_json(&g.out, &reports_to_json(&reports)?)?;
            for r in reports.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {} residual {:e} > tolerance {:e}",
                    r.check_name, r.residual, r.tolerance
                );
            }
            Ok(reports.iter().all(|r| r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Invalid(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
