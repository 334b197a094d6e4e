use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use khessian::besov::{besov_norm, BesovParams, NormMethod};
use khessian::constructions::{radial_identity_check, make_profile, RadialProfile};
use khessian::harness::continuity::{run_continuity_sweep, SweepConfig};
use khessian::harness::{default_grid, run_embedding_table, run_identities, run_scaling, write_scaling_report, Check, RunConfig};
use khessian::hessian::{pair_direct, pair_extension, pair_weak2, ExtensionForm, PairingMethod, PairingResult};
use khessian::smooth::StepProfile;
use khessian::{Error, GridField};

/// Relative tolerance of the radial identity check.
const RADIAL_TOLERANCE: f64 = 0.02;

#[derive(Parser)]
#[command(name = "khessian", version, about = "Distributional k-Hessian numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomised minor-algebra and Hessian identity suite.
    Identities {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Scaling study of one counterexample family.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write an SVG plot.
        #[arg(long)]
        plot: bool,
    },
    /// Besov norm of a field file.
    Norm {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "gagliardo")]
        method: String,
        #[arg(long, default_value_t = khessian::besov::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = khessian::besov::DEFAULT_SEED)]
        seed: u64,
    },
    /// Pairing of a field against a test function on the same grid.
    Pairing {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "direct")]
        method: String,
        /// Points per auxiliary axis for the extension method.
        #[arg(long, default_value_t = 20)]
        t_points: usize,
    },
    /// Embedding classification over the default (s, p) grid.
    Embedding {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radial identity check for both shipped profiles.
    #[command(name = "lemma31")]
    RadialIdentity {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Random sweep of the continuity-estimate ratio.
    Continuity {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 24)]
        points: usize,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Construction(_) | Error::Quadrature(_) => 1,
        Error::Domain(_) | Error::Parse(_) | Error::Io(_) | Error::Evaluation { .. } => 2,
    }
}

fn report(checks: &[Check]) -> u8 {
    for c in checks {
        println!("{}", c.line());
    }
    u8::from(!checks.iter().all(|c| c.passed))
}

fn run(cmd: Command) -> khessian::Result<u8> {
    match cmd {
        Command::Identities { seed, trials } => {
            let r = run_identities(seed, trials)?;
            print!("{}", r.to_text());
            Ok(u8::from(!r.passed()))
        }
        Command::Scaling { config, out, plot } => {
            let cfg = RunConfig::parse(&std::fs::read_to_string(&config)?)?;
            let r = run_scaling(&cfg)?;
            let files = write_scaling_report(&r, &out, plot)?;
            print!("{}", r.to_csv());
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(report(&r.checks()))
        }
        Command::Norm { field, s, p, method, budget, seed } => {
            let u = GridField::read_file(&field)?;
            let method: NormMethod = method.parse()?;
            let r = besov_norm(&u, BesovParams::new(s, p)?, method, budget, seed)?;
            println!("{}", khessian::besov::NormReport::CSV_HEADER);
            println!("{}", r.csv_row());
            Ok(0)
        }
        Command::Pairing { field, phi, k, method, t_points } => {
            let u = GridField::read_file(&field)?;
            let phi = GridField::read_file(&phi)?;
            let r: PairingResult = match method.parse()? {
                PairingMethod::Direct => pair_direct(&u, k, &phi)?,
                PairingMethod::Weak2 => {
                    if k != 2 {
                        return Err(Error::Domain(format!("the weak form is for k = 2, got {k}")));
                    }
                    pair_weak2(&u, &phi)?
                }
                PairingMethod::Extension => {
                    pair_extension(&u, k, &phi, StepProfile::standard(), t_points, ExtensionForm::Statement)?
                }
                PairingMethod::Separable => {
                    return Err(Error::Domain("the separable method needs a tensor-product field, not a field file".into()))
                }
            };
            println!("{}", PairingResult::CSV_HEADER);
            println!("{}", r.csv_row(0));
            Ok(0)
        }
        Command::Embedding { k, n, out } => {
            let (s, p) = default_grid();
            let t = run_embedding_table(&s, &p, k, n)?;
            std::fs::write(&out, t.to_csv())?;
            println!("wrote {} rows to {}", t.rows.len(), out.display());
            let bad = t.mismatches();
            Ok(report(&[Check::new("exact_agreement", bad == 0, format!("{bad} mismatches"))]))
        }
        Command::RadialIdentity { k, n, seed } => {
            let profiles = [make_profile(seed, k, n)?, RadialProfile::odd_reflected(k, n)?];
            let mut checks = Vec::new();
            for p in &profiles {
                let r = radial_identity_check(p, k, n)?;
                let err = r.relative_error();
                checks.push(Check::new(
                    format!("radial_{:?}", p.kind()).to_lowercase(),
                    err <= RADIAL_TOLERANCE,
                    format!("lhs {:.6e}, rhs {:.6e}, relative error {err:.3e}", r.lhs, r.rhs),
                ));
            }
            Ok(report(&checks))
        }
        Command::Continuity { samples, points, budget, seed, out } => {
            let cfg = SweepConfig { samples, points, budget, seed, ..SweepConfig::default() };
            let r = run_continuity_sweep(&cfg)?;
            if let Some(path) = out {
                std::fs::write(path, r.to_csv())?;
            }
            Ok(report(&[r.check()]))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
