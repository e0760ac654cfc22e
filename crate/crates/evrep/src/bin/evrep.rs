//! Batch front-end for the expectation-value representation toolkit.
//!
//! Exit codes: 0 on success with all validations passing, 2 when a
//! requested validation or check fails, 1 on hard errors (bad input,
//! malformed files, ill-conditioned schemes).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use evrep::dynamics::{evolution_generator, exact_propagate, propagate_trajectory};
use evrep::io;
use evrep::quorum::{condition_report, DirectionScheme, Quorum};
use evrep::swcheck;
use evrep::tomography::{
    diagnostics, exact_probabilities, fidelity, psd_project, reconstruct_density, sample_counts,
    validate_probabilities, DensityMatrix,
};
use evrep::{EvrepError, TwoS};

#[derive(Parser)]
#[command(name = "evrep", version, about = "Spin state reconstruction and probability-space dynamics on coherent-state quorums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a measurement-direction scheme and write the quorum file.
    Quorum {
        #[arg(long = "two-s")]
        two_s: u32,
        #[arg(long, default_value = "quorum.json")]
        out: PathBuf,
        /// Override the cone opening angles (radians, comma separated).
        #[arg(long, value_delimiter = ',')]
        cone_thetas: Option<Vec<f64>>,
        /// Override the per-cone azimuth offsets (radians, comma separated).
        #[arg(long, value_delimiter = ',')]
        phi_offsets: Option<Vec<f64>>,
    },
    /// Compute (or sample) quorum probabilities of a state.
    Simulate {
        #[arg(long)]
        quorum: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "probabilities.csv")]
        out: PathBuf,
        /// Per-direction shot count; omit for exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        /// RNG seed; defaults to EVREP_SEED or 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Invert a probability CSV back into a density matrix.
    Reconstruct {
        #[arg(long)]
        quorum: PathBuf,
        #[arg(long)]
        probs: PathBuf,
        #[arg(long, default_value = "reconstructed.json")]
        out: PathBuf,
        /// Clip negative eigenvalues and renormalize before writing.
        #[arg(long)]
        psd_repair: bool,
        /// Reference state; when given, the Uhlmann fidelity is reported.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Run the kernel-axiom diagnostic suite on a quorum file.
    Check {
        #[arg(long)]
        quorum: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the probability-space dynamics and write a trajectory.
    Evolve {
        #[arg(long)]
        quorum: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
        /// Also propagate exactly and report the endpoint error.
        #[arg(long)]
        oracle: bool,
    },
}

fn default_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed.unwrap_or_else(|| {
        std::env::var("EVREP_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    })
}

#[derive(Serialize)]
struct ReconstructReport {
    trace: f64,
    lambda_min: f64,
    validation: evrep::tomography::ValidationReport,
    psd_repaired: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
}

#[derive(Serialize)]
struct EvolveReport {
    steps: usize,
    t: f64,
    dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_max_error: Option<f64>,
}

fn run(cli: Cli) -> Result<ExitCode, EvrepError> {
    match cli.command {
        Command::Quorum {
            two_s,
            out,
            cone_thetas,
            phi_offsets,
        } => {
            let two_s = TwoS::new(two_s)?;
            let scheme = match (cone_thetas, phi_offsets) {
                (None, None) => DirectionScheme::standard(two_s),
                (thetas, offsets) => {
                    let d = two_s.dim();
                    let standard = DirectionScheme::standard(two_s);
                    let thetas = thetas.unwrap_or_else(|| standard.cone_thetas().to_vec());
                    let offsets = offsets.unwrap_or_else(|| standard.cone_phi_offsets().to_vec());
                    if thetas.len() != d || offsets.len() != d {
                        return Err(EvrepError::InvalidArgument(format!(
                            "expected {d} cone angles and offsets"
                        )));
                    }
                    DirectionScheme::with_cones(two_s, thetas, offsets)?
                }
            };
            let report = condition_report(&scheme);
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            let q = Quorum::build(scheme)?;
            io::save_quorum(&q, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            quorum,
            state,
            out,
            shots,
            seed,
        } => {
            let q = io::load_quorum(&quorum)?;
            let (two_s, op) = io::load_state(&state)?;
            if two_s != q.two_s() {
                return Err(EvrepError::DimensionMismatch {
                    expected: q.two_s().dim(),
                    got: two_s.dim(),
                });
            }
            let rho = DensityMatrix::raw(op);
            let mut p = exact_probabilities(&q, &rho)?;
            if let Some(shots) = shots {
                p = sample_counts(&p, shots, default_seed(seed))?;
            }
            io::write_probability_csv(q.scheme(), &p, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reconstruct {
            quorum,
            probs,
            out,
            psd_repair,
            reference,
        } => {
            let q = io::load_quorum(&quorum)?;
            let p = io::read_probability_csv(&probs)?;
            let validation = validate_probabilities(&q, &p);
            let mut rho = reconstruct_density(&q, &p)?;
            if psd_repair {
                rho = psd_project(&rho)?;
            }
            let diag = diagnostics(&rho);
            let fid = match reference {
                Some(path) => {
                    let (_, ref_op) = io::load_state(&path)?;
                    let reference = DensityMatrix::raw(ref_op);
                    let estimate = if psd_repair {
                        rho.clone()
                    } else {
                        psd_project(&rho)?
                    };
                    Some(fidelity(&estimate, &reference)?)
                }
                None => None,
            };
            let report = ReconstructReport {
                trace: diag.trace,
                lambda_min: diag.lambda_min,
                validation,
                psd_repaired: psd_repair,
                fidelity: fid,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            io::save_state(q.two_s(), rho.op(), &out)?;
            if report.validation.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Check { quorum, out } => {
            let q = io::load_quorum(&quorum)?;
            let report = swcheck::run_all(&q)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(path, text)?;
            }
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Evolve {
            quorum,
            state,
            hamiltonian,
            t,
            dt,
            out,
            oracle,
        } => {
            let q = io::load_quorum(&quorum)?;
            let (state_two_s, rho_op) = io::load_state(&state)?;
            let (h_two_s, h) = io::load_state(&hamiltonian)?;
            if state_two_s != q.two_s() || h_two_s != q.two_s() {
                return Err(EvrepError::DimensionMismatch {
                    expected: q.two_s().dim(),
                    got: state_two_s.dim().max(h_two_s.dim()),
                });
            }
            let rho = DensityMatrix::raw(rho_op);
            let p0 = exact_probabilities(&q, &rho)?;
            let generator = evolution_generator(&q, &h)?;
            let rows = propagate_trajectory(&generator, &p0, t, dt)?;
            io::write_trajectory_csv(&rows, &out)?;
            let oracle_max_error = if oracle {
                let exact = exact_propagate(&q, &rho, &h, t)?;
                let (_, last) = rows.last().expect("trajectory has rows");
                Some(
                    last.iter()
                        .zip(exact.values())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max),
                )
            } else {
                None
            };
            let report = EvolveReport {
                steps: rows.len() - 1,
                t,
                dt,
                oracle_max_error,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
