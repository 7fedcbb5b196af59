//! `mfz`: command-line front end for the multifractal toolkit.
//!
//! Exit codes: 0 on success, 1 when a computation fails (budget exceeded,
//! unresolved certificate, failed verification), 2 on usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mfz_core::dims::certified_interior;
use mfz_core::spectra::{tau_curve, tau_hat_curve};
use mfz_core::verify::{check_ids, run_check};
use mfz_core::{
    abs_continuity_certificate, alpha_bar, alpha_lower_bracket, alpha_star_bracket, atom_masses,
    beta_k, dim_at_xi, dim_range_inner, dimension_report, entropy_sum, find_barrier,
    formalism_holds, gamma_bracket, iterate, multifractal_spectrum, periodic_dim, Budget,
    DigitSystem, EnumOptions, Error, LyapunovMode, Norm, QGrid, ReportOptions, Suite, SystemSpec,
    Word,
};

#[derive(Parser, Debug)]
#[command(
    name = "mfz",
    version,
    about = "Multifractal analysis of overlapping self-similar measures"
)]
struct Cli {
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "MFZ_THREADS")]
    threads: Option<usize>,

    /// Maximum atoms held in one level of the mass recursion.
    #[arg(long, global = true, default_value_t = 1u128 << 28)]
    max_atoms: u128,

    /// Maximum words visited by an exhaustive enumeration.
    #[arg(long, global = true, default_value_t = 1u128 << 28)]
    max_words: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// JSON system specification.
    #[arg(long)]
    config: PathBuf,

    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    q_min: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    q_max: f64,
    #[arg(long, default_value_t = 0.05)]
    q_step: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NormArg {
    Op1,
    Opinf,
    Tightest,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Op1 => Norm::Op1,
            NormArg::Opinf => Norm::OpInf,
            NormArg::Tightest => Norm::Tightest,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DumpArg {
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Fast,
    Paper,
    Full,
}

#[derive(Args, Debug)]
struct LyapArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Monte-Carlo seed; required with `--mode mc`.
    #[arg(long)]
    seed: Option<u64>,
}

impl LyapArgs {
    fn mode(&self) -> Result<LyapunovMode, Failure> {
        match self.mode {
            ModeArg::Exact => Ok(LyapunovMode::Exact),
            ModeArg::Mc => {
                let seed = self
                    .seed
                    .ok_or_else(|| Failure::usage("--seed is required with --mode mc"))?;
                if self.samples == 0 {
                    return Err(Failure::usage("--samples must be at least 1"));
                }
                Ok(LyapunovMode::MonteCarlo {
                    samples: self.samples,
                    seed,
                })
            }
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constants, regularity, formalism flag and barrier search of a system.
    Describe {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Level-k atom masses: a JSON summary, or every atom with `--dump csv`.
    Atoms {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum)]
        dump: Option<DumpArg>,
    },
    /// First level with barrier atoms.
    Barrier {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = mfz_core::ifs::DEFAULT_BARRIER_LEVEL)]
        max_level: u32,
    },
    /// The k-step iterate, as an explicit system specification.
    Iterate {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
    },
    /// Bracket for the smallest local dimension (or alpha* with `--restricted`).
    Bounds {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        /// Bracket alpha*, the smallest dimension away from the endpoints.
        #[arg(long)]
        restricted: bool,
        /// Branch-and-bound pruning of the maximum search.
        #[arg(long)]
        prune: bool,
        #[arg(long, value_enum, default_value_t = NormArg::Op1)]
        norm: NormArg,
    },
    /// Full dimension report.
    Dims {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        /// Level of the entropy sum (defaults to k).
        #[arg(long)]
        k_entropy: Option<u32>,
        /// Word length of the Lyapunov sum (defaults to k).
        #[arg(long)]
        k_lyap: Option<u32>,
        #[command(flatten)]
        lyap: LyapArgs,
        #[arg(long, value_enum, default_value_t = NormArg::Tightest)]
        norm: NormArg,
        #[arg(long)]
        prune: bool,
    },
    /// Almost sure dimension bracket.
    Gamma {
        #[command(flatten)]
        sys: SystemArgs,
        /// Word length of the Lyapunov sum.
        #[arg(long)]
        k: u32,
        /// Level of the entropy sum (defaults to k).
        #[arg(long)]
        k_entropy: Option<u32>,
        #[command(flatten)]
        lyap: LyapArgs,
        #[arg(long, value_enum, default_value_t = NormArg::Tightest)]
        norm: NormArg,
    },
    /// Finite-level L^q spectrum on a q grid, as CSV.
    Tau {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Restricted L^q spectrum on a q grid, as CSV.
    TauHat {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        b: Option<u32>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Multifractal spectrum as the conjugate of the restricted spectrum, as CSV.
    Fh {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        b: Option<u32>,
        #[command(flatten)]
        grid: GridArgs,
        /// Word length of the brackets that decide which points are trusted.
        #[arg(long, default_value_t = 3)]
        bracket_k: u32,
    },
    /// Interval of local dimensions attained by a separated sub-system.
    DimRange {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        b: Option<u32>,
    },
    /// Local dimension at a periodic point.
    Periodic {
        #[command(flatten)]
        sys: SystemArgs,
        /// Comma-separated digits of the period.
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<u32>,
    },
    /// Runs the reproduction checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
        suite: SuiteArg,
        /// Emit a JSON report instead of text lines.
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::NotABarrier { .. }
            | Error::BadSampleCount
            | Error::DegenerateWord => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(args: &SystemArgs, budget: &Budget) -> Result<DigitSystem, Failure> {
    let spec = SystemSpec::from_path(&args.config)?;
    spec.build(budget).map_err(|e| match e {
        // a preset can exceed the budget while iterating; that is not a usage error
        Error::Budget { .. } | Error::Overflow { .. } => Failure::from(e),
        other => Failure::usage(other.to_string()),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let io_fail = |e: io::Error| Failure {
        code: 1,
        message: format!("cannot write output: {e}"),
    };
    match out {
        Some(p) => fs::write(p, text).map_err(io_fail),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io_fail)
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    text.push('\n');
    emit(out, &text)
}

fn barrier_digit(b: Option<u32>) -> Result<u32, Failure> {
    b.ok_or_else(|| Failure::usage("barrier digit required: pass --b"))
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, Failure> {
    QGrid::new(g.q_min, g.q_max, g.q_step)
        .map(|q| q.points())
        .map_err(|e| Failure::usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let budget = Budget {
        max_atoms: cli.max_atoms,
        max_words: cli.max_words,
    };
    match cli.command {
        Command::Describe { sys: args } => {
            let sys = load(&args, &budget)?;
            let barrier = match find_barrier(&sys, mfz_core::ifs::DEFAULT_BARRIER_LEVEL) {
                Ok(b) => json!({"level": b.level, "atoms": b.atoms}),
                Err(e) => json!({"error": e.to_string()}),
            };
            let report = json!({
                "d": sys.d(),
                "m": sys.m(),
                "p": sys.weights().entries(),
                "delta": sys.delta(),
                "xi": sys.xi(),
                "theta": sys.theta(),
                "a": sys.a(),
                "xi_below_two": sys.xi_below_two(),
                "alpha_bar": alpha_bar(&sys),
                "dim_at_xi": dim_at_xi(&sys),
                "formalism_holds": formalism_holds(&sys),
                "abs_continuity_certificate": abs_continuity_certificate(&sys),
                "barrier": barrier,
            });
            emit_json(args.out.as_deref(), &report)
        }
        Command::Atoms { sys: args, k, dump } => {
            let sys = load(&args, &budget)?;
            let level = atom_masses(&sys, k, &budget)?;
            match dump {
                Some(DumpArg::Csv) => {
                    let mut text = String::from("j,mass_log\n");
                    for (j, l) in level.log_mass().iter().enumerate() {
                        text.push_str(&format!("{j},{l}\n"));
                    }
                    emit(args.out.as_deref(), &text)
                }
                None => {
                    let lm = level.log_mass();
                    let report = json!({
                        "k": k,
                        "atoms": lm.len(),
                        "log_total_mass": level.log_moment(1.0),
                        "max_mass_log": lm.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        "min_mass_log": lm.iter().copied().fold(f64::INFINITY, f64::min),
                        "entropy_sum": entropy_sum(&sys, k, &budget)?,
                    });
                    emit_json(args.out.as_deref(), &report)
                }
            }
        }
        Command::Barrier {
            sys: args,
            max_level,
        } => {
            let sys = load(&args, &budget)?;
            emit_json(args.out.as_deref(), &find_barrier(&sys, max_level)?)
        }
        Command::Iterate { sys: args, k } => {
            let sys = load(&args, &budget)?;
            let it = iterate(&sys, k, &budget)?;
            let spec = json!({"d": it.d(), "m": it.m(), "p": it.weights().entries()});
            emit_json(args.out.as_deref(), &spec)
        }
        Command::Bounds {
            sys: args,
            k,
            restricted,
            prune,
            norm,
        } => {
            let sys = load(&args, &budget)?;
            let (quantity, br, norm) = if restricted {
                ("alpha_star", alpha_star_bracket(&sys, k, &budget)?, None)
            } else {
                let opts = EnumOptions {
                    norm: norm.into(),
                    prune,
                    budget,
                };
                (
                    "alpha_lower",
                    alpha_lower_bracket(&sys, k, &opts)?,
                    Some(opts.norm),
                )
            };
            let report = json!({
                "quantity": quantity,
                "lower": br.lower,
                "upper": br.upper,
                "k": k,
                "norm": norm,
                "lower_method": br.meta.lower_method,
                "upper_method": br.meta.upper_method,
            });
            emit_json(args.out.as_deref(), &report)
        }
        Command::Dims {
            sys: args,
            k,
            k_entropy,
            k_lyap,
            lyap,
            norm,
            prune,
        } => {
            let sys = load(&args, &budget)?;
            let opts = ReportOptions {
                k,
                k_entropy: k_entropy.unwrap_or(k),
                k_lyap: k_lyap.unwrap_or(k),
                mode: lyap.mode()?,
                enumeration: EnumOptions {
                    norm: norm.into(),
                    prune,
                    budget,
                },
            };
            emit_json(args.out.as_deref(), &dimension_report(&sys, &opts)?)
        }
        Command::Gamma {
            sys: args,
            k,
            k_entropy,
            lyap,
            norm,
        } => {
            let sys = load(&args, &budget)?;
            let g = gamma_bracket(
                &sys,
                k_entropy.unwrap_or(k),
                k,
                lyap.mode()?,
                norm.into(),
                &budget,
            )?;
            emit_json(args.out.as_deref(), &g)
        }
        Command::Tau {
            sys: args,
            k,
            grid: g,
        } => {
            let sys = load(&args, &budget)?;
            let curve = tau_curve(&sys, k, &grid(&g)?, &budget)?;
            emit(args.out.as_deref(), &curve.to_csv())
        }
        Command::TauHat {
            sys: args,
            k,
            b,
            grid: g,
        } => {
            let b = barrier_digit(b)?;
            let sys = load(&args, &budget)?;
            let curve = tau_hat_curve(&sys, b, k, &grid(&g)?, &budget)?;
            emit(args.out.as_deref(), &curve.to_csv())
        }
        Command::Fh {
            sys: args,
            k,
            b,
            grid: g,
            bracket_k,
        } => {
            let b = barrier_digit(b)?;
            let sys = load(&args, &budget)?;
            let opts = EnumOptions {
                norm: Norm::Tightest,
                prune: false,
                budget,
            };
            let lower = alpha_lower_bracket(&sys, bracket_k, &opts)?;
            let star = alpha_star_bracket(&sys, bracket_k, &budget)?;
            let trusted = certified_interior(&lower, &star);
            let curve = multifractal_spectrum(&sys, b, k, &grid(&g)?, trusted, &budget)?;
            emit(args.out.as_deref(), &curve.to_csv())
        }
        Command::DimRange { sys: args, k, b } => {
            let b = barrier_digit(b)?;
            let sys = load(&args, &budget)?;
            let r = dim_range_inner(&sys, b, k, &budget)?;
            let beta = beta_k(&sys, b, k, &budget)?;
            let report = json!({
                "k": k,
                "b": b,
                "lo": r.lo,
                "hi": r.hi,
                "direction": "inner: every value in [lo, hi] is attained",
                "beta_k": r.beta_k,
                "beta_residual": beta.residual,
            });
            emit_json(args.out.as_deref(), &report)
        }
        Command::Periodic { sys: args, word } => {
            let sys = load(&args, &budget)?;
            let w = Word::new(word.clone(), &sys)?;
            let report = json!({
                "word": word,
                "dim": periodic_dim(&sys, &w)?,
                "direction": "exact up to the spectral radius tolerance",
            });
            emit_json(args.out.as_deref(), &report)
        }
        Command::Verify { suite, json, out } => {
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Paper => Suite::Paper,
                SuiteArg::Full => Suite::Full,
            };
            let mut outcomes = Vec::new();
            let mut text = String::new();
            for id in check_ids() {
                let o = run_check(id, suite, &budget).expect("listed id");
                if !json {
                    let line = format!("{o}\n");
                    if out.is_none() {
                        // stream progress when printing to the terminal
                        emit(None, &line)?;
                    }
                    text.push_str(&line);
                }
                outcomes.push(o);
            }
            let passed = outcomes.iter().all(|o| o.passed);
            if json {
                let report = mfz_core::VerifyReport {
                    suite,
                    passed,
                    outcomes,
                };
                emit_json(out.as_deref(), &report)?;
            } else if let Some(p) = out.as_deref() {
                emit(Some(p), &text)?;
            }
            if passed {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    message: "verification failed".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("mfz: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("mfz: cannot configure threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mfz: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
