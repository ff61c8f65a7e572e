//! `selfsim` command-line front end.
//!
//! Exit codes: 0 pass, 1 verification failed, 2 numerical failure, 3 usage
//! error (including bad configs and unreadable inputs).

// `!(x >= y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use selfsim::certificates::{compute_constants, select_certificate, verify_decay, RateCertificate};
use selfsim::conjugate::{m_hat, phi_conjugate_bound, phi_conjugate_numeric, phi_conjugate_quadratic_bound, PhiFamily, SearchParams};
use selfsim::profile::{closed_form_profile, solve_profile_with, ProfileSolution};
use selfsim::runio::{self, parse_config, parse_config_with_overrides, RunManifest};
use selfsim::simulate::{run_with_profile, SimConfig};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Self-similar profiles, entropy diagnostics and decay certificates")]
struct Cli {
    /// Config file (`key = value`, see the README for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for `sweep`.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the profile and write profile.csv; prints the residual report.
    Profile,
    /// Run the simulation; writes diagnostics.csv, summary.json, manifest.json.
    Simulate,
    /// Judge a diagnostics CSV against a certificate JSON.
    Verify {
        #[arg(long)]
        diagnostics: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
    },
    /// Print the constants report for one entropy exponent.
    Constants {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Tables of the conjugate bounds and of m_hat.
    Conjugate {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.25, 1.5, 2.0, 3.0, 5.0])]
        alpha: Vec<f64>,
        /// Exponents for the m_hat table; default 1/2 and alpha - 1.
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        xi_min: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        xi_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Repeat `constants` or `simulate` over values of one config key.
    Sweep {
        /// Dotted config key, e.g. problem.A_plus.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        /// `start:stop:count`, endpoints included.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, value_enum, default_value_t = SweepMode::Constants)]
        mode: SweepMode,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SweepMode {
    Constants,
    Simulate,
}

enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<selfsim::Error>() {
            return if e.is_numerical() { 2 } else { 3 };
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Profile => cmd_profile(cli),
        Command::Simulate => cmd_simulate(cli),
        Command::Verify {
            diagnostics,
            certificate,
            slack,
        } => cmd_verify(cli, diagnostics, certificate, *slack),
        Command::Constants { p } => cmd_constants(cli, *p),
        Command::Conjugate {
            alpha,
            p,
            xi_min,
            xi_max,
            points,
        } => cmd_conjugate(cli, alpha, p, *xi_min, *xi_max, *points),
        Command::Sweep {
            param,
            values,
            range,
            mode,
        } => cmd_sweep(cli, param, values, range.as_deref(), *mode),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn config_text(cli: &Cli) -> anyhow::Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| usage("this command needs --config PATH"))?;
    read(path)
}

fn load_config(cli: &Cli) -> anyhow::Result<SimConfig> {
    Ok(parse_config(&config_text(cli)?)?)
}

fn out_dir(cli: &Cli, cfg: Option<&SimConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_path.clone()))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    runio::write_text(path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Prints `json` and, with `--out`, also stores it as `name`.
fn emit_json(cli: &Cli, name: &str, json: &str) -> anyhow::Result<()> {
    print!("{json}");
    if let Some(dir) = &cli.out {
        write(&dir.join(name), json)?;
    }
    Ok(())
}

fn solve(cfg: &SimConfig) -> anyhow::Result<ProfileSolution> {
    let grid = cfg.grid.build(&cfg.data)?;
    Ok(solve_profile_with(&cfg.data, &grid, &cfg.profile)?)
}

#[derive(Serialize)]
struct ProfileReport {
    residual_norm: f64,
    iterations: usize,
    invariants: Vec<selfsim::profile::InvariantCheck>,
    max_error_vs_closed_form: Option<f64>,
    profile_csv: PathBuf,
}

fn cmd_profile(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = load_config(cli)?;
    let t = Instant::now();
    let prof = solve(&cfg)?;
    log::info!("profile solved in {} iterations ({:.2}s)", prof.iterations, t.elapsed().as_secs_f64());
    let checks = prof.check_invariants(&cfg.data, cfg.profile.tol.max(1e-8));
    let max_err = if cfg.data.alpha == cfg.data.beta {
        let exact = closed_form_profile(&cfg.data, &prof.grid)?;
        let e = prof.u.iter().zip(&exact.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        log::info!("max |U - closed form| = {e:e}");
        Some(e)
    } else {
        None
    };
    let path = out_dir(cli, Some(&cfg)).join("profile.csv");
    write(&path, &runio::profile_csv(&prof))?;
    let pass = checks.iter().all(|c| c.pass);
    for c in checks.iter().filter(|c| !c.pass) {
        log::warn!("invariant failed: {} = {:e} > {:e}", c.name, c.value, c.limit);
    }
    let report = ProfileReport {
        residual_norm: prof.residual_norm,
        iterations: prof.iterations,
        invariants: checks,
        max_error_vs_closed_form: max_err,
        profile_csv: path,
    };
    print!("{}", runio::to_json(&report)?);
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_simulate(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = load_config(cli)?;
    let dir = out_dir(cli, Some(&cfg));
    let t = Instant::now();
    let prof = solve(&cfg)?;
    let out = run_with_profile(&cfg, &prof)?;
    let elapsed = t.elapsed().as_secs_f64();
    log::info!(
        "{} samples, {} steps ({} rejected) in {elapsed:.2}s",
        out.records.len(),
        out.accepted_steps,
        out.rejected_steps
    );
    let summary = runio::summarize(&cfg, &out);
    for note in &summary.notes {
        log::warn!("{note}");
    }
    let paths = [dir.join("diagnostics.csv"), dir.join("summary.json"), dir.join("manifest.json")];
    write(&paths[0], &runio::diagnostics_csv(&out.records, &cfg.p_values))?;
    write(&paths[1], &runio::to_json(&summary)?)?;
    let manifest = RunManifest::new(&cfg, &out, paths.to_vec(), elapsed);
    write(&paths[2], &runio::to_json(&manifest)?)?;
    for c in &summary.checks {
        if let Some(v) = &c.verdict {
            log::info!(
                "p = {}: {} (worst ratio {:.4}, fitted slope {:.4}) against {}",
                c.p,
                if v.pass { "PASS" } else { "FAIL" },
                v.worst_ratio,
                v.fitted_slope,
                v.certificate.regime_tag
            );
        }
    }
    Ok(if summary.pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_verify(cli: &Cli, diagnostics: &Path, certificate: &Path, slack: f64) -> anyhow::Result<Outcome> {
    let records = runio::read_diagnostics_csv(&read(diagnostics)?)?;
    let cert: RateCertificate = runio::read_certificate_json(&read(certificate)?)?;
    let curve = runio::entropy_column(&records, cert.p)?;
    let verdict = verify_decay(&curve, &cert, slack)?;
    emit_json(cli, "verdict.json", &runio::to_json(&verdict)?)?;
    Ok(if verdict.pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_constants(cli: &Cli, p: f64) -> anyhow::Result<Outcome> {
    let cfg = load_config(cli)?;
    let prof = solve(&cfg)?;
    let report = compute_constants(&prof, p)?;
    match select_certificate(&report, &cfg.data, p) {
        Ok(c) => log::info!("certificate: eta = {}, mu = {}, K = {}, gamma = {} ({})", c.eta, c.mu, c.forcing, c.gamma, c.regime_tag),
        Err(e) => log::warn!("no certificate ({}): {e}", e.kind()),
    }
    emit_json(cli, "constants.json", &runio::to_json(&report)?)?;
    Ok(Outcome::Pass)
}

fn default_ps(alpha: f64) -> Vec<f64> {
    let mut ps = vec![0.5];
    if alpha > 1.0 && alpha - 1.0 != 0.5 {
        ps.push(alpha - 1.0);
    }
    ps
}

fn cmd_conjugate(cli: &Cli, alphas: &[f64], ps: &[f64], xi_min: f64, xi_max: f64, points: usize) -> anyhow::Result<Outcome> {
    if points < 2 || !(xi_max > xi_min) {
        bail!(usage("need points >= 2 and xi_max > xi_min"));
    }
    let params = SearchParams::default();
    let mut bounds = String::from("alpha,xi,numeric,bound,quadratic_bound\n");
    let mut pass = true;
    for &a in alphas {
        for i in 0..points {
            let xi = xi_min + (xi_max - xi_min) * i as f64 / (points - 1) as f64;
            let numeric = phi_conjugate_numeric(PhiFamily::BoltzmannAlpha { alpha: a }, xi, &params);
            let bound = phi_conjugate_bound(a, xi)?;
            let quad = phi_conjugate_quadratic_bound(a, xi);
            pass &= numeric <= bound + 1e-9 && quad.is_none_or(|q| numeric <= q + 1e-9);
            let quad = quad.map(|q| q.to_string()).unwrap_or_default();
            let _ = writeln!(bounds, "{a},{xi},{numeric},{bound},{quad}");
        }
    }
    let mut table = String::from("p,alpha,m_hat\n");
    for &a in alphas {
        let list = if ps.is_empty() { default_ps(a) } else { ps.to_vec() };
        for p in list {
            let m = m_hat(p, a)?;
            let _ = writeln!(table, "{p},{a},{m}");
        }
    }
    match &cli.out {
        Some(dir) => {
            write(&dir.join("conjugate.csv"), &bounds)?;
            write(&dir.join("m_hat.csv"), &table)?;
        }
        None => print!("{bounds}\n{table}"),
    }
    if !pass {
        log::warn!("a numeric conjugate value exceeds its bound");
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn sweep_values(values: &[f64], range: Option<&str>) -> anyhow::Result<Vec<f64>> {
    let Some(r) = range else { return Ok(values.to_vec()) };
    if !values.is_empty() {
        bail!(usage("give either --values or --range"));
    }
    let parts: Vec<&str> = r.split(':').collect();
    let bad = || usage(format!("--range must be start:stop:count, got `{r}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| (a * (n - 1 - i) as f64 + b * i as f64) / (n - 1) as f64).collect(),
    })
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    theta: Option<f64>,
    lambda_star: Option<f64>,
    certificate: Option<RateCertificate>,
    note: Option<String>,
    pass: Option<bool>,
    fitted_slope: Option<f64>,
    final_e_b: Option<f64>,
    error: Option<String>,
    #[serde(skip)]
    numerical_failure: bool,
}

#[derive(Serialize)]
struct SweepAggregate {
    param: String,
    mode: SweepMode,
    rows: Vec<SweepRow>,
    /// First value whose theta is at least 1/2.
    first_theta_too_large: Option<f64>,
}

fn sweep_row(text: &str, param: &str, value: f64, mode: SweepMode) -> SweepRow {
    let mut row = SweepRow {
        value,
        theta: None,
        lambda_star: None,
        certificate: None,
        note: None,
        pass: None,
        fitted_slope: None,
        final_e_b: None,
        error: None,
        numerical_failure: false,
    };
    let result = (|| -> selfsim::Result<()> {
        let cfg = parse_config_with_overrides(text, &[(param.to_string(), value.to_string())])?;
        let grid = cfg.grid.build(&cfg.data)?;
        let prof = solve_profile_with(&cfg.data, &grid, &cfg.profile)?;
        let report = compute_constants(&prof, 1.0)?;
        row.theta = Some(report.theta);
        row.lambda_star = Some(report.lambda_star);
        match select_certificate(&report, &cfg.data, 1.0) {
            Ok(c) => row.certificate = Some(c),
            Err(e) => row.note = Some(format!("no certificate ({}): {e}", e.kind())),
        }
        if mode == SweepMode::Simulate {
            let out = run_with_profile(&cfg, &prof)?;
            let summary = runio::summarize(&cfg, &out);
            row.pass = Some(summary.pass);
            row.fitted_slope = Some(summary.fitted_slope);
            row.final_e_b = summary.final_e_b;
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.numerical_failure = e.is_numerical();
        row.error = Some(format!("{} ({})", e, e.kind()));
    }
    row
}

fn cmd_sweep(cli: &Cli, param: &str, values: &[f64], range: Option<&str>, mode: SweepMode) -> anyhow::Result<Outcome> {
    let text = config_text(cli)?;
    if !runio::is_known_key(param) {
        bail!(usage(format!("unknown config key `{param}`")));
    }
    let values = sweep_values(values, range)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| anyhow!("thread pool: {e}"))?;
    let rows: Vec<SweepRow> = pool.install(|| values.par_iter().map(|&v| sweep_row(&text, param, v, mode)).collect());
    let first_theta_too_large = rows.iter().find(|r| r.theta.is_some_and(|t| t >= 0.5)).map(|r| r.value);
    let numerical = rows.iter().any(|r| r.numerical_failure);
    let usage_error = rows.iter().find(|r| r.error.is_some() && !r.numerical_failure).and_then(|r| r.error.clone());
    let failed = rows.iter().any(|r| r.pass == Some(false));
    let agg = SweepAggregate {
        param: param.to_string(),
        mode,
        rows,
        first_theta_too_large,
    };
    emit_json(cli, "sweep.json", &runio::to_json(&agg)?)?;
    if let Some(e) = usage_error {
        return Err(usage(e));
    }
    if numerical {
        bail!("at least one sweep point failed numerically");
    }
    Ok(if failed { Outcome::Fail } else { Outcome::Pass })
}
