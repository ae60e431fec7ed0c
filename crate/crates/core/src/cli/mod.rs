//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid modulus, 3 chain did not
//! mix, 4 internal invariant violation.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

pub use output::fmt_f64;
use output::{open_sink, write_csv, write_json};

use crate::bounds::{self, coupling_bound, spectrum};
use crate::circles::{validate_axioms, StructureTensor, DENSE_CACHE_GATE};
use crate::error::Error;
use crate::modular::{make_modulus, PrimeModulus};
use crate::walk::{
    self, build_kernel, default_max_steps, mixing_time, stationary, DEFAULT_EPSILON,
    EXACT_MIXING_GATE,
};

/// Largest p for the exhaustive axiom sweep without --force.
pub const AXIOM_GATE: u32 = 31;

/// Environment variable overriding the default worker count.
pub const JOBS_ENV: &str = "CIRCLE_WALK_JOBS";

#[derive(Debug, Parser)]
#[command(
    name = "circle-walk",
    version,
    about = "Random walks on the hypergroup of circles over F_p, p = 3 mod 4"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the exact structure constants n_ij^k.
    Constants {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the hypergroup axioms exhaustively.
    Axioms {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the stationary distribution.
    Stationary {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Measure the mixing time over all starting circles.
    Mix {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        /// Step budget; defaults to ten times the coupling bound.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Eigenvalues of the symmetrized kernel.
    Spectrum {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// All eigenvalue and mixing bounds for one prime.
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo walk on the plane F_p².
    Simulate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Mixing time and bounds across a range of primes.
    Scan {
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        /// Worker threads; 0 uses every core.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// One prime of a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: u32,
    /// `None` when p is above the exact-mixing gate.
    pub tau_measured: Option<usize>,
    pub coupling_tau: u64,
    pub gap: f64,
    pub alpha_star: f64,
    pub tau_over_p: Option<f64>,
    pub tau_over_log_p: Option<f64>,
    pub mixing_exact: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Lib(e) => match e {
                Error::NotPrime(_) | Error::WrongResidueClass(_) => 2,
                Error::NotMixed(_) => 3,
                Error::Gated { .. } | Error::EmptyRange(..) | Error::BadEpsilon(_) => 1,
                _ => 4,
            },
            Failure::Io(_) => 4,
            Failure::Invariant(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn gate(p: &PrimeModulus, limit: u32, force: bool, what: &'static str) -> Result<(), Error> {
    if p.p() > limit && !force {
        Err(Error::Gated {
            p: p.p(),
            gate: limit,
            what,
        })
    } else {
        Ok(())
    }
}

fn ratio_parts(r: &BigRational) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Constants { p, force, output } => {
            let m = make_modulus(p)?;
            gate(&m, DENSE_CACHE_GATE, force, "tensor export")?;
            let t = StructureTensor::new(&m);
            let n = m.order();
            let denom = (m.p() + 1).to_string();
            let rows = (0..n).flat_map(|i| {
                let t = &t;
                let denom = &denom;
                (0..n).flat_map(move |j| {
                    (0..n).map(move |k| {
                        let w = t.weight(i, j, k);
                        // 0 and 1 as integers, proper fractions over p + 1
                        let (num, den) = if w == 0 {
                            ("0".to_string(), "1".to_string())
                        } else if w == t.modulus().p() + 1 {
                            ("1".to_string(), "1".to_string())
                        } else {
                            (w.to_string(), denom.clone())
                        };
                        vec![i.to_string(), j.to_string(), k.to_string(), num, den]
                    })
                })
            });
            let sink = open_sink(output.as_deref())?;
            write_csv(sink, &["i", "j", "k", "numerator", "denominator"], rows)?;
        }
        Command::Axioms { p, force, out } => {
            let m = make_modulus(p)?;
            gate(&m, AXIOM_GATE, force, "exhaustive axiom check")?;
            let report = validate_axioms(&StructureTensor::new(&m));
            let sink = open_sink(out.output.as_deref())?;
            match out.format {
                Format::Json => write_json(sink, &report)?,
                Format::Csv => {
                    let rows = report.checks.iter().map(|c| {
                        let witness = c
                            .witness
                            .as_ref()
                            .map(|w| w.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
                            .unwrap_or_default();
                        vec![c.axiom.to_string(), c.passed.to_string(), witness]
                    });
                    write_csv(sink, &["axiom", "passed", "witness"], rows)?;
                }
            }
            if !report.all_passed() {
                return Err(Failure::Invariant("hypergroup axioms failed".into()));
            }
        }
        Command::Stationary { p, out } => {
            let m = make_modulus(p)?;
            let pi = stationary(&m);
            let weights = pi.as_exact().expect("exact stationary distribution");
            #[derive(Serialize)]
            struct Entry {
                k: usize,
                numerator: String,
                denominator: String,
                value: f64,
            }
            let entries: Vec<Entry> = weights
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let (numerator, denominator) = ratio_parts(w);
                    Entry {
                        k,
                        numerator,
                        denominator,
                        value: walk::ratio_to_f64(w),
                    }
                })
                .collect();
            let sink = open_sink(out.output.as_deref())?;
            match out.format {
                Format::Json => write_json(sink, &entries)?,
                Format::Csv => write_csv(
                    sink,
                    &["k", "numerator", "denominator", "value"],
                    entries.iter().map(|e| {
                        vec![
                            e.k.to_string(),
                            e.numerator.clone(),
                            e.denominator.clone(),
                            fmt_f64(e.value),
                        ]
                    }),
                )?,
            }
        }
        Command::Mix {
            p,
            eps,
            max_steps,
            force,
            out,
        } => {
            let m = make_modulus(p)?;
            gate(&m, EXACT_MIXING_GATE, force, "all-start mixing")?;
            let kernel = build_kernel(&StructureTensor::new(&m), 1)?;
            let steps = max_steps.unwrap_or_else(|| default_max_steps(&m));
            let report = mixing_time(&kernel, &stationary(&m), eps, steps)?;
            let sink = open_sink(out.output.as_deref())?;
            match out.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct MixOut<'a> {
                        p: u32,
                        #[serde(flatten)]
                        report: &'a walk::MixingReport,
                    }
                    write_json(
                        sink,
                        &MixOut {
                            p: m.p(),
                            report: &report,
                        },
                    )?
                }
                Format::Csv => write_csv(
                    sink,
                    &["t", "worst_tv", "worst_start"],
                    report
                        .tv_curve
                        .iter()
                        .zip(&report.curve_starts)
                        .enumerate()
                        .map(|(t, (tv, s))| vec![t.to_string(), fmt_f64(*tv), s.to_string()]),
                )?,
            }
        }
        Command::Spectrum { p, out } => {
            let m = make_modulus(p)?;
            let kernel = build_kernel(&StructureTensor::new(&m), 1)?;
            let spec = spectrum(&kernel, &stationary(&m))?;
            let sink = open_sink(out.output.as_deref())?;
            match out.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct SpecOut<'a> {
                        p: u32,
                        eigenvalues: &'a [f64],
                        alpha_star: f64,
                        gap: f64,
                    }
                    write_json(
                        sink,
                        &SpecOut {
                            p: m.p(),
                            eigenvalues: &spec.eigenvalues,
                            alpha_star: spec.alpha_star,
                            gap: spec.gap,
                        },
                    )?
                }
                Format::Csv => write_csv(
                    sink,
                    &["index", "eigenvalue"],
                    spec.eigenvalues
                        .iter()
                        .enumerate()
                        .map(|(i, l)| vec![i.to_string(), fmt_f64(*l)]),
                )?,
            }
        }
        Command::Bounds { p, eps, force, out } => {
            let m = make_modulus(p)?;
            let kernel = build_kernel(&StructureTensor::new(&m), 1)?;
            let tau = if m.p() <= EXACT_MIXING_GATE || force {
                let steps = default_max_steps(&m);
                Some(mixing_time(&kernel, &stationary(&m), eps, steps)?.tau)
            } else {
                None
            };
            let report = bounds::bound_report_for(&m, &kernel, tau)?;
            eprintln!("note: closed-form smallest-eigenvalue bound read as -1 + 2/(63(p+1))");
            let summary = report.summary();
            let sink = open_sink(out.output.as_deref())?;
            match out.format {
                Format::Json => write_json(sink, &summary)?,
                Format::Csv => write_csv(
                    sink,
                    &[
                        "p",
                        "lambda1",
                        "lambda_min",
                        "alpha_star",
                        "comparison_A",
                        "v",
                        "alpha1_upper_closed",
                        "alpha_min_lower_closed",
                        "coupling_n",
                        "coupling_tau",
                        "tau_measured",
                    ],
                    [vec![
                        summary.p.to_string(),
                        fmt_f64(summary.lambda1),
                        fmt_f64(summary.lambda_min),
                        fmt_f64(summary.alpha_star),
                        fmt_f64(summary.comparison_a),
                        fmt_f64(summary.v),
                        fmt_f64(summary.alpha1_upper_closed),
                        fmt_f64(summary.alpha_min_lower_closed),
                        summary.coupling_n.to_string(),
                        summary.coupling_tau.to_string(),
                        summary
                            .tau_measured
                            .map(|t| t.to_string())
                            .unwrap_or_default(),
                    ]],
                )?,
            }
            check_bound_chain(&report)?;
        }
        Command::Simulate {
            p,
            steps,
            trials,
            seed,
            out,
        } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be at least 1".into()));
            }
            let m = make_modulus(p)?;
            let result = walk::simulate(&m, steps, trials, seed, false);
            let sink = open_sink(out.output.as_deref())?;
            let freq = result.empirical().to_f64();
            match out.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct SimOut<'a> {
                        #[serde(flatten)]
                        result: &'a walk::SimulationResult,
                        frequencies: &'a [f64],
                    }
                    write_json(
                        sink,
                        &SimOut {
                            result: &result,
                            frequencies: &freq,
                        },
                    )?
                }
                Format::Csv => write_csv(
                    sink,
                    &["k", "count", "frequency"],
                    result
                        .counts
                        .iter()
                        .zip(&freq)
                        .enumerate()
                        .map(|(k, (c, f))| vec![k.to_string(), c.to_string(), fmt_f64(*f)]),
                )?,
            }
        }
        Command::Scan {
            p_min,
            p_max,
            eps,
            jobs,
            force,
            out,
        } => {
            if p_min > p_max {
                return Err(Failure::Usage("--p-min must not exceed --p-max".into()));
            }
            let jobs = jobs
                .or_else(|| std::env::var(JOBS_ENV).ok().and_then(|v| v.parse().ok()))
                .unwrap_or(0);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = pool.install(|| scan(p_min, p_max, eps, force))?;
            let max_ratio = rows
                .iter()
                .filter_map(|r| r.tau_over_p)
                .fold(f64::NAN, f64::max);
            let sink = open_sink(out.output.as_deref())?;
            write_scan(sink, &rows, out.format)?;
            eprintln!("max tau_over_p = {}", fmt_f64(max_ratio));
            if let Some(r) = rows
                .iter()
                .find(|r| r.tau_measured.is_some_and(|t| t as u64 > r.coupling_tau) || r.gap <= 0.0)
            {
                return Err(Failure::Invariant(format!(
                    "scan invariant violated at p = {}",
                    r.p
                )));
            }
        }
    }
    Ok(())
}

fn check_bound_chain(r: &bounds::BoundReport) -> Result<(), Failure> {
    const SLACK: f64 = 1e-9;
    let ok = r.lambda1 <= r.alpha1_upper + SLACK
        && r.lambda1 <= r.closed_form.alpha1_upper + SLACK
        && r.lambda_min >= r.alpha_min_lower - SLACK
        && r.lambda_min >= r.closed_form.alpha_min_lower - SLACK
        && r.tau_measured.is_none_or(|t| t as u64 <= r.coupling_tau);
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "bound chain violated for p = {}",
            r.p
        )))
    }
}

fn write_scan<W: Write>(sink: W, rows: &[ScanRow], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => write_json(sink, rows),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            write_csv(
                sink,
                &[
                    "p",
                    "tau_measured",
                    "coupling_tau",
                    "gap",
                    "alpha_star",
                    "tau_over_p",
                    "tau_over_log_p",
                    "mixing_exact",
                ],
                rows.iter().map(|r| {
                    vec![
                        r.p.to_string(),
                        r.tau_measured.map(|t| t.to_string()).unwrap_or_default(),
                        r.coupling_tau.to_string(),
                        fmt_f64(r.gap),
                        fmt_f64(r.alpha_star),
                        opt(r.tau_over_p),
                        opt(r.tau_over_log_p),
                        r.mixing_exact.to_string(),
                    ]
                }),
            )
        }
    }
}

/// Primes p = 3 (mod 4) in `[lo, hi]`, ascending.
pub fn qualifying_primes(lo: u64, hi: u64) -> Vec<PrimeModulus> {
    (lo..=hi).filter_map(|n| make_modulus(n).ok()).collect()
}

fn scan_one(m: &PrimeModulus, eps: f64, force: bool) -> Result<ScanRow, Error> {
    let kernel = build_kernel(&StructureTensor::new(m), 1)?;
    let pi = stationary(m);
    let spec = spectrum(&kernel, &pi)?;
    let coupling = coupling_bound(m, DEFAULT_EPSILON)?;
    let mixing_exact = m.p() <= EXACT_MIXING_GATE || force;
    let tau = if mixing_exact {
        Some(mixing_time(&kernel, &pi, eps, default_max_steps(m))?.tau)
    } else {
        None
    };
    let pf = m.p() as f64;
    Ok(ScanRow {
        p: m.p(),
        tau_measured: tau,
        coupling_tau: coupling.tau_bound,
        gap: spec.gap,
        alpha_star: spec.alpha_star,
        tau_over_p: tau.map(|t| t as f64 / pf),
        tau_over_log_p: tau.map(|t| t as f64 / pf.ln()),
        mixing_exact,
    })
}

/// One row per qualifying prime in `[p_min, p_max]`, sorted by p.
pub fn scan(p_min: u64, p_max: u64, eps: f64, force: bool) -> Result<Vec<ScanRow>, Error> {
    let primes = qualifying_primes(p_min, p_max);
    if primes.is_empty() {
        return Err(Error::EmptyRange(p_min, p_max));
    }
    let mut rows = primes
        .par_iter()
        .map(|m| scan_one(m, eps, force))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.p);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qualifying_primes_in_range() {
        let ps: Vec<u32> = qualifying_primes(7, 23).iter().map(|m| m.p()).collect();
        assert_eq!(ps, vec![7, 11, 19, 23]);
        assert!(qualifying_primes(24, 30).is_empty());
        assert!(matches!(
            scan(24, 30, DEFAULT_EPSILON, false),
            Err(Error::EmptyRange(24, 30))
        ));
    }

    #[test]
    fn scan_rows_respect_coupling() {
        let rows = scan(7, 31, DEFAULT_EPSILON, false).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert!(r.tau_measured.unwrap() as u64 <= r.coupling_tau);
            assert!(r.gap > 0.0);
            if r.p >= 23 {
                let ratio = r.coupling_tau as f64 / r.p as f64;
                assert!((4.0..=10.0).contains(&ratio), "p={} ratio={ratio}", r.p);
            }
        }
    }

    #[test]
    fn parse_errors_are_usage_errors() {
        assert_eq!(run(["circle-walk", "mix"]), 1);
        assert_eq!(run(["circle-walk", "bogus"]), 1);
        assert_eq!(run(["circle-walk", "--help"]), 0);
    }
}
