//! `repfn` — counting, expectation, asymptotics, sampling, and Monte Carlo
//! experiments for weighted additive representation functions.
//!
//! Exit codes: 0 success, 2 config error, 3 assertion failure, 4 budget
//! exceeded.

mod config;
mod manifest;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use repfn::asymptotics::{
    beta_sum, expected_r_closed_form, power_growth_profile, power_sum, zero_density_constant,
    SumMode,
};
use repfn::counting::{count_profile, expected_delta_small, expected_profile, ProfileKind};
use repfn::experiments::{
    delta_correlation, raikov_stohr_check, run_concentration, run_zero_density,
};
use repfn::model::{validate_regularity, Equation, GrowthSpec, MeasureSpec};
use repfn::report;
use repfn::sampler::SampledSet;

use config::{fnv1a64, parse_coeffs, parse_phi, RawConfig};
use manifest::RunManifest;

/// CLI-level error with its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Assertion(String),
    Budget(String),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Assertion(m) => write!(f, "assertion failure: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<repfn::Error> for CliError {
    fn from(e: repfn::Error) -> Self {
        match e {
            repfn::Error::BudgetExceeded { .. } | repfn::Error::MemoryBudget { .. } => {
                CliError::Budget(e.to_string())
            }
            repfn::Error::PrecisionLoss { .. } => CliError::Assertion(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "repfn",
    version,
    about = "weighted representation functions over random integer sets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count profile r_{A,l}(n) for n in [0, N] over a concrete set.
    Count(CountArgs),
    /// Exact expectation profile under the product measure.
    Expect(ExpectArgs),
    /// Gamma closed forms and their direct-summation counterparts.
    Asymptote {
        #[command(subcommand)]
        which: AsymptoteCmd,
    },
    /// Sample a random set from the product measure.
    Sample(SampleArgs),
    /// Monte Carlo experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCmd,
    },
    /// Raikov–Stöhr deterministic thin-basis check.
    Stohr(StohrArgs),
    /// Regularity validation of the derived growth function.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct MeasureFlags {
    /// Additive order h >= 2.
    #[arg(long, default_value_t = 2)]
    h: u32,
    /// Growth exponent kappa in [0, h-1].
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Slowly varying factor: const | log | exp-sqrt-log | plain-log.
    #[arg(long, default_value = "const")]
    phi: String,
    /// Measure constant c > 0.
    #[arg(long)]
    c: f64,
}

impl MeasureFlags {
    fn build(&self) -> Result<MeasureSpec, CliError> {
        Ok(MeasureSpec::new(
            GrowthSpec::new(self.h, self.kappa, parse_phi(&self.phi)?)?,
            self.c,
        )?)
    }

    fn label(&self) -> String {
        format!(
            "h = {}\nkappa = {}\nphi = {}\nc = {}\n",
            self.h, self.kappa, self.phi, self.c
        )
    }
}

#[derive(Args)]
struct CountArgs {
    /// Equation coefficients, comma separated (e.g. 1,2).
    #[arg(long)]
    eq: String,
    /// Profile length N.
    #[arg(long = "N")]
    n_max: u64,
    /// Read the set from an RLE file instead of sampling.
    #[arg(long)]
    set: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    h: u32,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value = "const")]
    phi: String,
    #[arg(long)]
    c: Option<f64>,
    /// Master seed (required when sampling).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpectArgs {
    #[arg(long)]
    eq: String,
    #[command(flatten)]
    measure: MeasureFlags,
    #[arg(long = "N")]
    n_max: u64,
    /// Profile kind: r | rho | delta-small.
    #[arg(long)]
    kind: String,
    /// Delta for --kind delta-small.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AsymptoteCmd {
    /// Congruence-restricted beta sum vs Gamma closed form.
    BetaSum {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "L")]
        modulus: u64,
        #[arg(long = "r")]
        residue: u64,
        #[arg(long)]
        n: u64,
    },
    /// Weighted power sum over positive solutions vs closed form.
    PowerSum {
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        eq: String,
        #[arg(long)]
        n: u64,
    },
    /// Leading coefficient of E(r) for the given measure.
    ClosedForm {
        #[arg(long)]
        eq: String,
        #[command(flatten)]
        measure: MeasureFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-growth main and error terms.
    PowerGrowth {
        #[arg(long = "C")]
        c_big: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        eq: String,
    },
    /// Zero-density constant c(eps, h, b).
    ZeroDensityConstant {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        eq: String,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    measure: MeasureFlags,
    #[arg(long = "N")]
    n_max: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentFlags {
    /// Config file (key = value sections); overrides the inline flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eq: Option<String>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "N")]
    n_max: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated checkpoint targets; defaults to 20 log-spaced.
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Concentration of r around its exact expectation.
    Concentration(ExperimentFlags),
    /// Zero density under the (x log x)^{1/h} measure.
    Zeros {
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Zero-density eps in (0, 1/2); builds the measure constant.
        #[arg(long)]
        eps: Option<f64>,
        /// Equation coefficients (alias of --eq).
        #[arg(long)]
        b: Option<String>,
    },
    /// Exact pair correlation Delta(n, m).
    Delta {
        #[arg(long)]
        eq: String,
        #[command(flatten)]
        measure: MeasureFlags,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StohrArgs {
    /// Depth K <= 12; targets n_k for k <= K, cover check up to 4^K - 1.
    #[arg(long = "K")]
    k_max: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 2)]
    h: u32,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value = "const")]
    phi: String,
    #[arg(long = "N", default_value_t = 1_000_000)]
    n_max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn threads() -> usize {
    std::env::var("REPFN_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn ensure_out(dir: &Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
    match dir {
        None => Ok(None),
        Some(d) => {
            std::fs::create_dir_all(d)?;
            Ok(Some(d.clone()))
        }
    }
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run() -> Result<(), CliError> {
    match Cli::parse().cmd {
        Cmd::Count(args) => cmd_count(args),
        Cmd::Expect(args) => cmd_expect(args),
        Cmd::Asymptote { which } => cmd_asymptote(which),
        Cmd::Sample(args) => cmd_sample(args),
        Cmd::Experiment { which } => cmd_experiment(which),
        Cmd::Stohr(args) => cmd_stohr(args),
        Cmd::Validate(args) => cmd_validate(args),
    }
}

fn cmd_count(args: CountArgs) -> Result<(), CliError> {
    let eq = Equation::new(parse_coeffs(&args.eq)?)?;
    let (set, provenance) = match &args.set {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            (
                SampledSet::from_rle(&text)?,
                format!("set = {}\n", path.display()),
            )
        }
        None => {
            let c = args
                .c
                .ok_or_else(|| CliError::config("--c required when sampling (no --set)"))?;
            let seed = args
                .seed
                .ok_or_else(|| CliError::config("--seed required when sampling (no --set)"))?;
            let m = MeasureSpec::new(
                GrowthSpec::new(args.h, args.kappa, parse_phi(&args.phi)?)?,
                c,
            )?;
            (
                SampledSet::sample(&m, args.n_max, seed, args.trial)?,
                format!(
                    "h = {}\nkappa = {}\nphi = {}\nc = {c}\nseed = {seed}\ntrial = {}\n",
                    args.h, args.kappa, args.phi, args.trial
                ),
            )
        }
    };
    let profile = count_profile(&set, &eq, args.n_max)?;
    let total: u64 = profile.counts().iter().sum();
    if let Some(dir) = ensure_out(&args.out)? {
        let csv = report::count_profile_csv(&profile);
        write_out(&dir, "count.csv", &csv)?;
        let config = format!(
            "[count]\neq = {}\nn_max = {}\n{provenance}",
            args.eq, args.n_max
        );
        let digest = fnv1a64(config.as_bytes());
        RunManifest::new("count", config, digest, args.seed, vec!["count.csv".into()])
            .write(&dir)?;
    }
    println!(
        "count: eq=({}) N={} nonzero={} total={}",
        eq,
        args.n_max,
        profile.counts().iter().filter(|&&c| c > 0).count(),
        total
    );
    Ok(())
}

fn cmd_expect(args: ExpectArgs) -> Result<(), CliError> {
    let eq = Equation::new(parse_coeffs(&args.eq)?)?;
    let measure = args.measure.build()?;
    let profile = match args.kind.as_str() {
        "r" => expected_profile(&measure, &eq, args.n_max, ProfileKind::R)?,
        "rho" => expected_profile(&measure, &eq, args.n_max, ProfileKind::Rho)?,
        "delta-small" => {
            let delta = args
                .delta
                .ok_or_else(|| CliError::config("--delta required for kind delta-small"))?;
            expected_delta_small(&measure, &eq, args.n_max, delta)?
        }
        other => return Err(CliError::config(format!("unknown kind `{other}`"))),
    };
    if let Some(dir) = ensure_out(&args.out)? {
        write_out(
            &dir,
            "expectation.csv",
            &report::expectation_profile_csv(&profile),
        )?;
        let config = format!(
            "[expect]\neq = {}\nn_max = {}\nkind = {}\n{}",
            args.eq,
            args.n_max,
            args.kind,
            args.measure.label()
        );
        let digest = fnv1a64(config.as_bytes());
        RunManifest::new(
            "expect",
            config,
            digest,
            None,
            vec!["expectation.csv".into()],
        )
        .write(&dir)?;
    }
    println!(
        "expect: eq=({}) kind={} N={} value_at_N={}",
        eq,
        profile.kind(),
        args.n_max,
        report::fmt_f64(profile.get(args.n_max))
    );
    Ok(())
}

fn cmd_asymptote(which: AsymptoteCmd) -> Result<(), CliError> {
    match which {
        AsymptoteCmd::BetaSum {
            alpha,
            beta,
            modulus,
            residue,
            n,
        } => {
            let direct = beta_sum(alpha, beta, modulus, residue, n, SumMode::Direct)?;
            let closed = beta_sum(alpha, beta, modulus, residue, n, SumMode::Closed)?;
            println!(
                "beta-sum: direct={} closed={} |diff|={}",
                report::fmt_f64(direct),
                report::fmt_f64(closed),
                report::fmt_f64((direct - closed).abs())
            );
        }
        AsymptoteCmd::PowerSum { omega, eq, n } => {
            let e = Equation::new(parse_coeffs(&eq)?)?;
            let direct = power_sum(omega, &e, n, SumMode::Direct)?;
            let closed = power_sum(omega, &e, n, SumMode::Closed)?;
            let ratio = if closed != 0.0 {
                direct / closed
            } else {
                f64::NAN
            };
            println!(
                "power-sum: direct={} closed={} ratio={}",
                report::fmt_f64(direct),
                report::fmt_f64(closed),
                report::fmt_f64(ratio)
            );
        }
        AsymptoteCmd::ClosedForm { eq, measure, out } => {
            let e = Equation::new(parse_coeffs(&eq)?)?;
            let m = measure.build()?;
            let cf = expected_r_closed_form(&m, &e)?;
            if let Some(dir) = ensure_out(&out)? {
                write_out(&dir, "closed_form.json", &(cf.to_json() + "\n"))?;
            }
            println!(
                "closed-form: coefficient={} exponent={} log_power={} error_exponent={}",
                report::fmt_f64(cf.coefficient),
                report::fmt_f64(cf.exponent),
                cf.log_power,
                report::fmt_f64(cf.error_exponent)
            );
        }
        AsymptoteCmd::PowerGrowth {
            c_big,
            kappa,
            h,
            eq,
        } => {
            let e = Equation::new(parse_coeffs(&eq)?)?;
            let p = power_growth_profile(c_big, kappa, h, &e)?;
            println!(
                "power-growth: main={} * n^{} ; error=n^{} * log^{}",
                report::fmt_f64(p.main.coefficient),
                report::fmt_f64(p.main.exponent),
                report::fmt_f64(p.error.exponent),
                p.error.log_power
            );
        }
        AsymptoteCmd::ZeroDensityConstant { eps, h, eq } => {
            let e = Equation::new(parse_coeffs(&eq)?)?;
            let c = zero_density_constant(eps, h, &e)?;
            println!("zero-density-constant: c={}", report::fmt_f64(c));
        }
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let measure = args.measure.build()?;
    let set = SampledSet::sample(&measure, args.n_max, args.seed, args.trial)?;
    let size = set.counting_function(args.n_max)?;
    if let Some(dir) = ensure_out(&args.out)? {
        write_out(&dir, "set.rle", &set.to_rle())?;
        let config = format!(
            "[sample]\nn_max = {}\nseed = {}\ntrial = {}\n{}",
            args.n_max,
            args.seed,
            args.trial,
            args.measure.label()
        );
        let digest = fnv1a64(config.as_bytes());
        RunManifest::new(
            "sample",
            config,
            digest,
            Some(args.seed),
            vec!["set.rle".into()],
        )
        .write(&dir)?;
    }
    println!(
        "sample: N={} seed={} trial={} size={}",
        args.n_max, args.seed, args.trial, size
    );
    Ok(())
}

fn experiment_config(
    flags: &ExperimentFlags,
    eps: Option<f64>,
    b: Option<&str>,
) -> Result<RawConfig, CliError> {
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)?;
        return RawConfig::parse(&text);
    }
    let coeffs = match (b, &flags.eq) {
        (Some(b), _) => parse_coeffs(b)?,
        (None, Some(eq)) => parse_coeffs(eq)?,
        (None, None) => return Err(CliError::config("missing --eq (or --b)")),
    };
    Ok(RawConfig {
        coeffs,
        h: flags.h.unwrap_or(2),
        kappa: flags.kappa.unwrap_or(0.0),
        phi: flags.phi.clone().unwrap_or_else(|| {
            if eps.is_some() {
                "plain-log".to_string()
            } else {
                "const".to_string()
            }
        }),
        c: flags.c,
        eps,
        n_max: flags.n_max.ok_or_else(|| CliError::config("missing --N"))?,
        trials: flags
            .trials
            .ok_or_else(|| CliError::config("missing --trials"))?,
        seed: flags
            .seed
            .ok_or_else(|| CliError::config("missing --seed"))?,
        delta: flags.delta,
        checkpoints: match &flags.checkpoints {
            None => Vec::new(),
            Some(text) => text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::config(format!("bad checkpoint `{s}`")))
                })
                .collect::<Result<_, _>>()?,
        },
    })
}

fn cmd_experiment(which: ExperimentCmd) -> Result<(), CliError> {
    match which {
        ExperimentCmd::Concentration(flags) => {
            let raw = experiment_config(&flags, None, None)?;
            let cfg = raw.to_experiment()?;
            let report_data = run_concentration(&cfg, threads())?;
            let flag_rate = report_data.flag_rate();
            let sandwich = report_data.sandwich_all();
            let decomp = report_data.decomposition_all();
            let pass = flag_rate <= 0.05 && sandwich && decomp;
            if let Some(dir) = ensure_out(&flags.out)? {
                write_out(
                    &dir,
                    "concentration.csv",
                    &report::concentration_csv(&report_data),
                )?;
                let summary = serde_json::json!({
                    "subcommand": "experiment-concentration",
                    "config_digest": raw.digest(),
                    "seeds": [raw.seed],
                    "assertions": [
                        {"name": "three_sigma_flag_rate<=0.05", "pass": flag_rate <= 0.05},
                        {"name": "h2_sandwich_all", "pass": sandwich},
                        {"name": "decomposition_all", "pass": decomp},
                    ],
                    "flag_rate": flag_rate,
                    "regime_warning": report_data.regime_warning,
                });
                write_out(
                    &dir,
                    "summary.json",
                    &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
                )?;
                RunManifest::new(
                    "experiment-concentration",
                    raw.canonical(),
                    raw.digest(),
                    Some(raw.seed),
                    vec!["concentration.csv".into(), "summary.json".into()],
                )
                .write(&dir)?;
            }
            if report_data.regime_warning {
                eprintln!(
                    "warning: growth F is not well above log N; concentration regime may not apply"
                );
            }
            println!(
                "experiment concentration: checkpoints={} flag_rate={} sandwich={} decomposition={}",
                report_data.rows.len(),
                report::fmt_f64(flag_rate),
                sandwich,
                decomp
            );
            if !pass {
                return Err(CliError::Assertion(format!(
                    "flag_rate={flag_rate} sandwich={sandwich} decomposition={decomp}"
                )));
            }
        }
        ExperimentCmd::Zeros { flags, eps, b } => {
            let mut raw = experiment_config(&flags, eps, b.as_deref())?;
            if raw.eps.is_none() {
                return Err(CliError::config("zeros experiment requires --eps"));
            }
            if raw.checkpoints.is_empty() {
                // start low so the enumerated product bound (n <= 2000) is populated
                raw.checkpoints = config::low_checkpoints(raw.n_max);
            }
            let cfg = raw.to_experiment()?;
            let report_data = run_zero_density(&cfg, threads())?;
            let j_cap = 16u32.min(cfg.n_max.ilog2());
            let windows_ok = report_data.windows_ok(j_cap, 0.8);
            let bound_ok = report_data.product_bound_ok(2.0);
            if let Some(dir) = ensure_out(&flags.out)? {
                write_out(
                    &dir,
                    "zero_windows.csv",
                    &report::zero_windows_csv(&report_data),
                )?;
                write_out(
                    &dir,
                    "zero_checkpoints.csv",
                    &report::zero_checkpoints_csv(&report_data),
                )?;
                let summary = serde_json::json!({
                    "subcommand": "experiment-zeros",
                    "config_digest": raw.digest(),
                    "seeds": [raw.seed],
                    "assertions": [
                        {"name": format!("windows_j<={j_cap}_zero_in_80pct"), "pass": windows_ok},
                        {"name": "product_lower_bound", "pass": bound_ok},
                    ],
                    "implied_one_minus_eps": report_data.implied_one_minus_eps,
                    "expectation_ratio_at_n_max": report_data.expectation_ratio_at_n_max,
                });
                write_out(
                    &dir,
                    "summary.json",
                    &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
                )?;
                RunManifest::new(
                    "experiment-zeros",
                    raw.canonical(),
                    raw.digest(),
                    Some(raw.seed),
                    vec![
                        "zero_windows.csv".into(),
                        "zero_checkpoints.csv".into(),
                        "summary.json".into(),
                    ],
                )
                .write(&dir)?;
            }
            println!(
                "experiment zeros: windows_ok={} product_bound_ok={} E(r(N))/logN={}",
                windows_ok,
                bound_ok,
                report::fmt_f64(report_data.expectation_ratio_at_n_max)
            );
            if !(windows_ok && bound_ok) {
                return Err(CliError::Assertion(format!(
                    "windows_ok={windows_ok} product_bound_ok={bound_ok}"
                )));
            }
        }
        ExperimentCmd::Delta {
            eq,
            measure,
            n,
            m,
            out,
        } => {
            let e = Equation::new(parse_coeffs(&eq)?)?;
            let spec = measure.build()?;
            let delta = delta_correlation(&spec, &e, n, m)?;
            if let Some(dir) = ensure_out(&out)? {
                let json = serde_json::json!({
                    "subcommand": "experiment-delta",
                    "eq": eq, "n": n, "m": m,
                    "delta": delta,
                });
                write_out(
                    &dir,
                    "delta.json",
                    &(serde_json::to_string_pretty(&json).unwrap() + "\n"),
                )?;
            }
            println!(
                "experiment delta: Delta({n},{m})={}",
                report::fmt_f64(delta)
            );
        }
    }
    Ok(())
}

fn cmd_stohr(args: StohrArgs) -> Result<(), CliError> {
    let report_data = raikov_stohr_check(args.k_max)?;
    let reps_ok = report_data.rows.iter().all(|r| r.ok);
    let ratio_ok = report_data.c_ratio <= 8.0;
    let pass = reps_ok && ratio_ok && report_data.cover_ok;
    if let Some(dir) = ensure_out(&args.out)? {
        write_out(&dir, "stohr.csv", &report::stohr_csv(&report_data))?;
        let summary = serde_json::json!({
            "subcommand": "stohr",
            "assertions": [
                {"name": "pair_counts>=2^(k-1)", "pass": reps_ok},
                {"name": "counting_ratio<=8", "pass": ratio_ok},
                {"name": "sumset_covers", "pass": report_data.cover_ok},
            ],
            "c_ratio": report_data.c_ratio,
            "set_size": report_data.set_size,
        });
        write_out(
            &dir,
            "summary.json",
            &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
        )?;
        let config = format!("[stohr]\nk_max = {}\n", args.k_max);
        let digest = fnv1a64(config.as_bytes());
        RunManifest::new(
            "stohr",
            config,
            digest,
            None,
            vec!["stohr.csv".into(), "summary.json".into()],
        )
        .write(&dir)?;
    }
    println!(
        "stohr: K={} set_size={} C={} reps_ok={} cover_ok={}",
        report_data.k_max,
        report_data.set_size,
        report::fmt_f64(report_data.c_ratio),
        reps_ok,
        report_data.cover_ok
    );
    if !pass {
        return Err(CliError::Assertion(format!(
            "reps_ok={reps_ok} ratio_ok={ratio_ok} cover_ok={}",
            report_data.cover_ok
        )));
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let growth = GrowthSpec::new(args.h, args.kappa, parse_phi(&args.phi)?)?;
    let regularity = validate_regularity(|x| growth.f(x), args.n_max)?;
    if let Some(dir) = ensure_out(&args.out)? {
        write_out(&dir, "regularity.csv", &report::regularity_csv(&regularity))?;
    }
    println!(
        "validate: {} window_median={} theta={}",
        if regularity.pass { "PASS" } else { "FAIL" },
        report::fmt_f64(regularity.window_median),
        report::fmt_f64(growth.potter_theta())
    );
    if !regularity.pass {
        return Err(CliError::Assertion("regularity check failed".into()));
    }
    Ok(())
}
