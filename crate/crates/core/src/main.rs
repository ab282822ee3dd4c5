use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coh::coherence::{self, AlphaParam, BlochVector, MeasureKind};
use coh::discrimination::{self, DiscriminationResult, Strategy};
use coh::duality::{self, QuantonDetectorModel};
use coh::io::{self, format_value};
use coh::linalg::ComplexMatrix;
use coh::states;
use coh::verify;
use coh::{Error, Result};

const SUM_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "coh",
    version,
    about = "Coherence measures, state discrimination and path duality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence of a state read from a JSON file.
    Measure {
        file: PathBuf,
        /// alpha-affinity, affinity, qcb, l1 or geometric-qubit
        #[arg(long)]
        measure: String,
        /// Order of the alpha-affinity (default 0.5).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Discriminate the members of a pure-state ensemble.
    Qsd {
        file: PathBuf,
        /// lsm, helstrom or symmetric-optimal
        #[arg(long)]
        strategy: String,
    },
    /// Coherence and path distinguishability of a quanton/detector model.
    Duality {
        file: PathBuf,
        /// Replace the detectors by the equal-overlap family, e.g. overlap:0:1:0.01
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Run randomized verification suites.
    Verify {
        /// axioms, theorem2, theorem4, chains, symmetric, multicopy, duality, appendix or all
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Write a random instance as JSON.
    Random {
        /// state, ensemble or model
        #[arg(long)]
        kind: String,
        #[arg(long)]
        dim: usize,
        /// State rank, ensemble size, or the rank of a density quanton.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure {
            file,
            measure,
            alpha,
        } => cmd_measure(&file, &measure, alpha),
        Command::Qsd { file, strategy } => cmd_qsd(&file, &strategy),
        Command::Duality { file, sweep } => cmd_duality(&file, sweep.as_deref()),
        Command::Verify {
            suite,
            seed,
            trials,
        } => cmd_verify(&suite, seed, trials),
        Command::Random {
            kind,
            dim,
            rank,
            seed,
            out,
        } => cmd_random(&kind, dim, rank, seed, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_measure(file: &Path, measure: &str, alpha: Option<f64>) -> Result<ExitCode> {
    let kind = MeasureKind::parse(measure)
        .ok_or_else(|| Error::BadParam(format!("unknown measure {measure:?}")))?;
    if alpha.is_some() && kind != MeasureKind::AlphaAffinity {
        return Err(Error::BadParam(
            "--alpha only applies to alpha-affinity".into(),
        ));
    }
    let rho = io::read_state(file)?;
    println!("measure {kind}");
    match kind {
        MeasureKind::AlphaAffinity => {
            let a = match alpha {
                Some(x) => AlphaParam::new(x)?,
                None => AlphaParam::HALF,
            };
            println!("alpha {}", format_value(a.get()));
            print_report(&coherence::alpha_affinity_coherence(&rho, a)?);
        }
        MeasureKind::Affinity => print_report(&coherence::affinity_coherence(&rho)?),
        MeasureKind::Qcb => {
            let (value, argmax) = coherence::qcb_coherence_argmax(&rho)?;
            println!("value {}", format_value(value));
            println!("argmax_alpha {}", format_value(argmax));
        }
        MeasureKind::L1 => println!("value {}", format_value(coherence::l1_coherence(&rho))),
        MeasureKind::GeometricQubit => {
            let c = BlochVector::from_density(&rho)?;
            println!(
                "value {}",
                format_value(coherence::geometric_coherence_qubit(&c)?)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(r: &coherence::CoherenceReport) {
    println!("value {}", format_value(r.value));
    if let Some(s) = &r.closest_incoherent {
        let diag: Vec<String> = s.diag().iter().map(|&x| format_value(x)).collect();
        println!("closest_incoherent {}", diag.join(" "));
    }
}

fn cmd_qsd(file: &Path, strategy: &str) -> Result<ExitCode> {
    let strategy = Strategy::parse(strategy)
        .ok_or_else(|| Error::BadParam(format!("unknown strategy {strategy:?}")))?;
    let e = io::read_ensemble(file)?;
    let r = match strategy {
        Strategy::Lsm => discrimination::lsm(&e)?,
        Strategy::Helstrom => discrimination::helstrom_two_state(&e)?,
        Strategy::SymmetricOptimal => {
            let p = discrimination::detect_symmetric(&e).ok_or_else(|| {
                Error::BadParam(
                    "symmetric-optimal needs equal priors and one common real overlap".into(),
                )
            })?;
            discrimination::symmetric_optimal_for(&e, e.len(), p)?
        }
    };
    print_discrimination(&r);
    Ok(ExitCode::SUCCESS)
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_value(z.re)
    } else if z.re == 0.0 {
        format!("{}i", format_value(z.im))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", format_value(z.re), format_value(z.im.abs()))
    }
}

fn print_matrix(m: &ComplexMatrix) {
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&z| format_complex(z)).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn print_discrimination(r: &DiscriminationResult) {
    println!("strategy {}", r.strategy);
    println!("success {}", format_value(r.success_prob));
    println!("error {}", format_value(r.error_prob));
    for (i, m) in r.povm.elements().iter().enumerate() {
        println!("povm_element {i}");
        print_matrix(m);
    }
}

fn cmd_duality(file: &Path, sweep: Option<&str>) -> Result<ExitCode> {
    let model = io::read_model(file)?;
    match sweep {
        Some(sweep_arg) => duality_sweep(&model, sweep_arg),
        None => duality_single(&model),
    }
}

fn duality_single(model: &QuantonDetectorModel) -> Result<ExitCode> {
    let rho_s = duality::reduced_quanton(model)?;
    let c = coherence::alpha_coherence(&rho_s, AlphaParam::HALF)?;
    let dq = duality::path_distinguishability(model)?;
    let sum = c + dq;
    println!("coherence {}", format_value(c));
    println!("distinguishability {}", format_value(dq));
    println!("sum {}", format_value(sum));
    let (verdict, ok) = match model.quanton() {
        duality::Quanton::Pure(_) => {
            if (sum - 1.0).abs() <= SUM_TOL {
                ("VERIFIED (sum = 1)", true)
            } else {
                ("VIOLATED (sum != 1)", false)
            }
        }
        duality::Quanton::Mixed(rho) => {
            let lhs = duality::condition_lhs(rho.matrix());
            if lhs > 1.0 + duality::CONDITION_TOL {
                println!("condition_lhs {}", format_value(lhs));
                (
                    "UNVERIFIED (no incoherent channel construction applies)",
                    true,
                )
            } else if sum <= 1.0 + SUM_TOL {
                ("VERIFIED (sum <= 1)", true)
            } else {
                ("VIOLATED (sum > 1)", false)
            }
        }
    };
    println!("verdict {verdict}");
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Parses `overlap:start:stop:step` into the inclusive grid of overlaps.
fn parse_sweep(sweep_arg: &str) -> Result<Vec<f64>> {
    let bad = || {
        Error::BadParam(format!(
            "sweep must look like overlap:0:1:0.01, got {sweep_arg:?}"
        ))
    };
    let parts: Vec<&str> = sweep_arg.split(':').collect();
    if parts.len() != 4 || parts[0] != "overlap" {
        return Err(bad());
    }
    let nums: Vec<f64> = parts[1..]
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
        return Err(Error::BadParam(format!(
            "overlap range [{start}, {stop}] must lie inside [0, 1]"
        )));
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Error::BadParam(format!(
            "sweep step must be positive, got {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|k| (start + step * k as f64).min(stop))
        .collect())
}

fn duality_sweep(model: &QuantonDetectorModel, sweep_arg: &str) -> Result<ExitCode> {
    let grid = parse_sweep(sweep_arg)?;
    println!("overlap,coherence,distinguishability");
    for s in grid {
        let m = model.with_detectors(duality::symmetric_detectors(model.dim(), s)?)?;
        let c = coherence::alpha_coherence(&duality::reduced_quanton(&m)?, AlphaParam::HALF)?;
        let dq = duality::path_distinguishability(&m)?;
        println!(
            "{},{},{}",
            format_value(s),
            format_value(c),
            format_value(dq)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, seed: u64, trials: usize) -> Result<ExitCode> {
    let suites = verify::parse_suites(suite)
        .ok_or_else(|| Error::BadParam(format!("unknown suite {suite:?}")))?;
    let mut all_passed = true;
    for record in verify::run_suites(&suites, seed, trials) {
        println!("{record}");
        for (what, gap) in record.failures.iter().take(10) {
            println!("  {what}: gap {gap:.3e}");
        }
        all_passed &= record.passed();
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_random(
    kind: &str,
    dim: usize,
    rank: Option<usize>,
    seed: u64,
    out: &Path,
) -> Result<ExitCode> {
    if dim == 0 {
        return Err(Error::BadParam("--dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = match kind {
        "state" => {
            let rho = states::random_density_with(&mut rng, dim, rank.unwrap_or(dim))?;
            io::state_to_json(&rho)?
        }
        "ensemble" => {
            let members = rank.unwrap_or(dim);
            let e = states::random_ensemble(&mut rng, dim, members, members <= dim)?;
            io::ensemble_to_json(&e)?
        }
        "model" => {
            let detectors = (0..dim)
                .map(|_| states::random_unit_vector(&mut rng, dim))
                .collect();
            let m = match rank {
                None => QuantonDetectorModel::pure(
                    states::random_unit_vector(&mut rng, dim),
                    detectors,
                )?,
                Some(r) => QuantonDetectorModel::mixed(
                    states::random_density_with(&mut rng, dim, r)?,
                    detectors,
                )?,
            };
            io::model_to_json(&m)?
        }
        other => {
            return Err(Error::BadParam(format!(
                "unknown kind {other:?}; expected state, ensemble or model"
            )))
        }
    };
    io::write_text(out, &text)?;
    Ok(ExitCode::SUCCESS)
}
