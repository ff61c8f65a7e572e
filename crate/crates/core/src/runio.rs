//! Config parsing and the CSV/JSON formats.
//!
//! The config is plain `key = value` text; keys are dotted (`problem.alpha`)
//! or grouped under `[section]` headers, and `#` starts a comment. Floats are
//! written with Rust's shortest round-trip formatting, so every file read back
//! gives the bitwise-identical values.
//!
//! | key | default |
//! |-----|---------|
//! | `problem.alpha`, `problem.beta`, `problem.d1`, `problem.d2`, `problem.A_minus`, `problem.A_plus` | required |
//! | `problem.k` | 1 |
//! | `grid.L` | `8 max(1, A₋, A₊)` |
//! | `grid.n` | 2001 |
//! | `profile.tol`, `profile.max_iter` | 1e-8, 200 |
//! | `time.tau_end` | required |
//! | `time.dtau`, `time.dtau_min`, `time.dtau_max` | 1e-4, 1e-9, 1e-3 |
//! | `ic.kind` | `gaussian_bump` (`profile_exact`, `shifted_erf`, `file`) |
//! | `ic.amplitude`, `ic.width`, `ic.center` | 0.2, 1, 0 |
//! | `ic.path` | none; CSV with columns `y, u, v` |
//! | `entropy.p` | `[0.5, α−1]` for `α = β` (`α−1` only when `α ≥ 2`), else `[]` |
//! | `output.path` | none |
//! | `output.sample_interval` | 0.01 |
//! | `verify.slack` | 0.05 |

use crate::certificates::{candidate_certificates, fitted_log_slope, verify_decay, RateCertificate, VerificationVerdict};
use crate::entropy::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::profile::{ProblemData, ProfileSolution};
use crate::simulate::{default_p_values, InitialConditionKind, RunOutput, SimConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            '\\' if in_quotes && !escaped => {
                escaped = true;
                continue;
            }
            '"' if !escaped => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
        escaped = false;
    }
    line
}

fn unquote(raw: &str, line: usize, key: &str) -> Result<String> {
    let Some(inner) = raw.strip_prefix('"') else {
        return Ok(raw.to_string());
    };
    let inner = inner
        .strip_suffix('"')
        .ok_or_else(|| parse_err(line, key, "unterminated string"))?;
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(e @ ('"' | '\\')) => out.push(e),
                Some('n') => out.push('\n'),
                other => return Err(parse_err(line, key, format!("bad escape \\{}", other.map(String::from).unwrap_or_default()))),
            }
        } else if c == '"' {
            return Err(parse_err(line, key, "stray quote inside string"));
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

const KNOWN_KEYS: &[&str] = &[
    "problem.alpha",
    "problem.beta",
    "problem.d1",
    "problem.d2",
    "problem.k",
    "problem.A_minus",
    "problem.A_plus",
    "grid.L",
    "grid.n",
    "profile.tol",
    "profile.max_iter",
    "time.tau_end",
    "time.dtau",
    "time.dtau_min",
    "time.dtau_max",
    "ic.kind",
    "ic.amplitude",
    "ic.width",
    "ic.center",
    "ic.path",
    "entropy.p",
    "output.path",
    "output.sample_interval",
    "verify.slack",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, body, "unterminated section header"))?
                    .trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(parse_err(line, name, "bad section name"));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| parse_err(line, body, "expected `key = value`"))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(parse_err(line, "", "empty key"));
            }
            let full = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if !KNOWN_KEYS.contains(&full.as_str()) {
                return Err(parse_err(line, &full, "unknown key"));
            }
            let value = unquote(v.trim(), line, &full)?;
            if map.insert(full.clone(), (line, value)).is_some() {
                return Err(parse_err(line, &full, "duplicate key"));
            }
        }
        Ok(Self(map))
    }

    fn line(&self, key: &str) -> usize {
        self.0.get(key).map_or(0, |(l, _)| *l)
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|(_, v)| v.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        let Some((line, v)) = self.0.get(key) else { return Ok(None) };
        v.parse::<f64>()
            .map(Some)
            .map_err(|_| parse_err(*line, key, format!("expected a number, got `{v}`")))
    }

    fn required_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| parse_err(0, key, "missing required key"))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        let Some((line, v)) = self.0.get(key) else { return Ok(None) };
        v.parse::<usize>()
            .map(Some)
            .map_err(|_| parse_err(*line, key, format!("expected a non-negative integer, got `{v}`")))
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((line, v)) = self.0.get(key) else { return Ok(None) };
        let inner = v.trim();
        let inner = inner.strip_prefix('[').map_or(Some(inner), |s| s.strip_suffix(']'));
        let inner = inner.ok_or_else(|| parse_err(*line, key, "unterminated list"))?;
        inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| parse_err(*line, key, format!("expected a number, got `{s}`"))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

/// Parses and validates a config. With `beta > alpha`, the species are
/// relabelled so that `alpha >= beta`.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_with_overrides(text, &[])
}

/// [`parse_config`] with `key = value` pairs replacing (or adding) entries,
/// as the sweep driver uses them.
pub fn parse_config_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<SimConfig> {
    let mut e = Entries::parse(text)?;
    for (k, v) in overrides {
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(parse_err(0, k, "unknown key"));
        }
        e.0.insert(k.clone(), (0, v.clone()));
    }
    from_entries(&e)
}

pub fn is_known_key(key: &str) -> bool {
    KNOWN_KEYS.contains(&key)
}

fn from_entries(e: &Entries) -> Result<SimConfig> {
    let raw = ProblemData {
        alpha: e.required_f64("problem.alpha")?,
        beta: e.required_f64("problem.beta")?,
        d1: e.required_f64("problem.d1")?,
        d2: e.required_f64("problem.d2")?,
        k: e.f64("problem.k")?.unwrap_or(1.0),
        a_minus: e.required_f64("problem.A_minus")?,
        a_plus: e.required_f64("problem.A_plus")?,
    };
    raw.validate()
        .map_err(|err| parse_err(e.line("problem.alpha"), "problem", err.to_string()))?;
    let (data, swapped) = raw.canonical();
    if swapped {
        log::info!(
            "beta > alpha: relabelled species so that alpha = {}, beta = {}, d1 = {}, d2 = {}",
            data.alpha,
            data.beta,
            data.d1,
            data.d2
        );
    }
    let mut cfg = SimConfig::new(data, e.required_f64("time.tau_end")?);
    cfg.grid.half_width = e.f64("grid.L")?;
    if let Some(n) = e.usize("grid.n")? {
        cfg.grid.n = n;
    }
    if let Some(t) = e.f64("profile.tol")? {
        cfg.profile.tol = t;
    }
    if let Some(m) = e.usize("profile.max_iter")? {
        cfg.profile.max_iter = m;
    }
    if let Some(x) = e.f64("time.dtau")? {
        cfg.dtau_initial = x;
    }
    if let Some(x) = e.f64("time.dtau_min")? {
        cfg.dtau_min = x;
    }
    if let Some(x) = e.f64("time.dtau_max")? {
        cfg.dtau_max = x;
    }
    if let Some(kind) = e.str("ic.kind") {
        cfg.initial_condition.kind = InitialConditionKind::from_name(kind)
            .ok_or_else(|| parse_err(e.line("ic.kind"), "ic.kind", format!("unknown initial condition `{kind}`")))?;
    }
    if let Some(x) = e.f64("ic.amplitude")? {
        cfg.initial_condition.amplitude = x;
    }
    if let Some(x) = e.f64("ic.width")? {
        cfg.initial_condition.width = x;
    }
    if let Some(x) = e.f64("ic.center")? {
        cfg.initial_condition.center = x;
    }
    cfg.initial_condition.path = e.str("ic.path").map(PathBuf::from);
    cfg.p_values = e.f64_list("entropy.p")?.unwrap_or_else(|| default_p_values(&data));
    cfg.output_path = e.str("output.path").map(PathBuf::from);
    if let Some(x) = e.f64("output.sample_interval")? {
        cfg.sample_interval = x;
    }
    if let Some(x) = e.f64("verify.slack")? {
        cfg.verify_slack = x;
    }
    if let Some(p) = cfg.p_values.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(parse_err(e.line("entropy.p"), "entropy.p", format!("p must be finite and >= 0, got {p}")));
    }
    if data.alpha != data.beta {
        if let Some(p) = cfg.p_values.iter().find(|p| **p != 1.0) {
            return Err(parse_err(
                e.line("entropy.p"),
                "entropy.p",
                Error::UnsupportedEntropy { p: *p }.to_string(),
            ));
        }
    }
    cfg.validate().map_err(|err| parse_err(0, "config", err.to_string()))?;
    Ok(cfg)
}

/// Writes every field, so the text parses back to an equal config.
pub fn serialize_config(cfg: &SimConfig) -> String {
    let d = &cfg.data;
    let ic = &cfg.initial_condition;
    let mut s = String::new();
    let _ = writeln!(s, "[problem]");
    let _ = writeln!(s, "alpha = {}\nbeta = {}\nd1 = {}\nd2 = {}\nk = {}", d.alpha, d.beta, d.d1, d.d2, d.k);
    let _ = writeln!(s, "A_minus = {}\nA_plus = {}", d.a_minus, d.a_plus);
    let _ = writeln!(s, "\n[grid]");
    if let Some(l) = cfg.grid.half_width {
        let _ = writeln!(s, "L = {l}");
    }
    let _ = writeln!(s, "n = {}", cfg.grid.n);
    let _ = writeln!(s, "\n[profile]\ntol = {}\nmax_iter = {}", cfg.profile.tol, cfg.profile.max_iter);
    let _ = writeln!(
        s,
        "\n[time]\ntau_end = {}\ndtau = {}\ndtau_min = {}\ndtau_max = {}",
        cfg.tau_end, cfg.dtau_initial, cfg.dtau_min, cfg.dtau_max
    );
    let _ = writeln!(
        s,
        "\n[ic]\nkind = {}\namplitude = {}\nwidth = {}\ncenter = {}",
        ic.kind.name(),
        ic.amplitude,
        ic.width,
        ic.center
    );
    if let Some(p) = &ic.path {
        let _ = writeln!(s, "path = {}", quote(&p.to_string_lossy()));
    }
    let ps: Vec<String> = cfg.p_values.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(s, "\n[entropy]\np = [{}]", ps.join(", "));
    let _ = writeln!(s, "\n[output]");
    if let Some(p) = &cfg.output_path {
        let _ = writeln!(s, "path = {}", quote(&p.to_string_lossy()));
    }
    let _ = writeln!(s, "sample_interval = {}", cfg.sample_interval);
    let _ = writeln!(s, "\n[verify]\nslack = {}", cfg.verify_slack);
    s
}

const TAIL_COLUMNS: [&str; 8] = [
    "I_Fisher",
    "D_react",
    "I_Lambda",
    "I_Lambda_1",
    "I_Lambda_2",
    "hellinger_sq",
    "D_B_total",
    "dissipation_residual",
];

pub fn diagnostics_header(p_values: &[f64]) -> String {
    let mut cols = vec!["tau".to_string(), "E_B".to_string()];
    cols.extend(p_values.iter().map(|p| format!("E_p({p})")));
    cols.extend(TAIL_COLUMNS.iter().map(|c| c.to_string()));
    cols.join(",")
}

/// One row per sample; `NaN`, `inf` and `-inf` for non-finite values.
pub fn diagnostics_csv(records: &[DiagnosticsRecord], p_values: &[f64]) -> String {
    let mut s = diagnostics_header(p_values);
    s.push('\n');
    for r in records {
        let mut vals = vec![r.tau, r.e_b];
        vals.extend(&r.e_p);
        vals.extend([
            r.i_fisher,
            r.d_react,
            r.i_lambda,
            r.i_lambda_1,
            r.i_lambda_2,
            r.hellinger_sq,
            r.d_b_total,
            r.dissipation_residual,
        ]);
        let row: Vec<String> = vals.iter().map(|x| x.to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn split_row(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_cell(cell: &str, line: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| parse_err(line, column, format!("expected a number, got `{cell}`")))
}

/// Reads back [`diagnostics_csv`] output.
pub fn read_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(parse_err(1, "header", "empty file"));
    };
    let cols = split_row(header);
    if cols.len() < 10 || cols[0] != "tau" || cols[1] != "E_B" {
        return Err(parse_err(1, "header", "expected columns tau,E_B,..."));
    }
    let np = cols.len() - 10;
    let mut p_values = Vec::with_capacity(np);
    for c in &cols[2..2 + np] {
        let p = c
            .strip_prefix("E_p(")
            .and_then(|s| s.strip_suffix(')'))
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| parse_err(1, c, "expected an E_p(<p>) column"))?;
        p_values.push(p);
    }
    if cols[2 + np..] != TAIL_COLUMNS {
        return Err(parse_err(1, "header", format!("trailing columns must be {}", TAIL_COLUMNS.join(","))));
    }
    let mut out = Vec::new();
    for (idx, l) in lines {
        let line = idx + 1;
        let cells = split_row(l);
        if cells.len() != cols.len() {
            return Err(parse_err(line, "row", format!("expected {} columns, got {}", cols.len(), cells.len())));
        }
        let v = cells
            .iter()
            .zip(&cols)
            .map(|(c, name)| parse_cell(c, line, name))
            .collect::<Result<Vec<f64>>>()?;
        let t = &v[2 + np..];
        out.push(DiagnosticsRecord {
            tau: v[0],
            e_b: v[1],
            p_values: p_values.clone(),
            e_p: v[2..2 + np].to_vec(),
            i_fisher: t[0],
            d_react: t[1],
            i_lambda: t[2],
            i_lambda_1: t[3],
            i_lambda_2: t[4],
            hellinger_sq: t[5],
            d_b_total: t[6],
            dissipation_residual: t[7],
        });
    }
    Ok(out)
}

/// `(τ, E_p)` from diagnostics; `p = 1` selects `E_B`.
pub fn entropy_column(records: &[DiagnosticsRecord], p: f64) -> Result<Vec<(f64, f64)>> {
    if p == 1.0 {
        return Ok(records.iter().map(|r| (r.tau, r.e_b)).collect());
    }
    let Some(first) = records.first() else { return Ok(Vec::new()) };
    let j = first
        .p_values
        .iter()
        .position(|q| *q == p)
        .ok_or_else(|| parse_err(1, &format!("E_p({p})"), "column not present"))?;
    Ok(records.iter().map(|r| (r.tau, r.e_p[j])).collect())
}

/// Columns `y, U, V, Lambda, U1, U2, V1, V2`.
pub fn profile_csv(profile: &ProfileSolution) -> String {
    let mut s = String::from("y,U,V,Lambda,U1,U2,V1,V2\n");
    for (i, y) in profile.grid.nodes().iter().enumerate() {
        let _ = writeln!(
            s,
            "{y},{},{},{},{},{},{},{}",
            profile.u[i], profile.v[i], profile.lambda[i], profile.u1[i], profile.u2[i], profile.v1[i], profile.v2[i]
        );
    }
    s
}

/// Reads the first three columns `y, u, v` of a CSV with a header row
/// (so a profile export can be used directly).
pub fn read_profile_table(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((_, header)) = lines.next() else {
        return Err(parse_err(1, "header", "empty file"));
    };
    let cols: Vec<String> = split_row(header).iter().map(|c| c.to_ascii_lowercase()).collect();
    if cols.len() < 3 || cols[0] != "y" || cols[1] != "u" || cols[2] != "v" {
        return Err(parse_err(1, "header", "expected leading columns y,u,v"));
    }
    let mut out = Vec::new();
    for (idx, l) in lines {
        let line = idx + 1;
        let cells = split_row(l);
        if cells.len() != cols.len() {
            return Err(parse_err(line, "row", format!("expected {} columns, got {}", cols.len(), cells.len())));
        }
        out.push((
            parse_cell(cells[0], line, "y")?,
            parse_cell(cells[1], line, "u")?,
            parse_cell(cells[2], line, "v")?,
        ));
    }
    Ok(out)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn read_certificate_json(text: &str) -> Result<RateCertificate> {
    let c: RateCertificate = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        key: "certificate".into(),
        message: e.to_string(),
    })?;
    RateCertificate::new(c.eta, c.mu, c.forcing, c.gamma, c.p, c.regime_tag)
}

/// Writes `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub p: f64,
    pub certificate: Option<RateCertificate>,
    pub verdict: Option<VerificationVerdict>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub data: ProblemData,
    pub samples: usize,
    pub tau_end: f64,
    pub final_e_b: Option<f64>,
    /// Keyed by `p` as written in the CSV header.
    pub final_e_p: BTreeMap<String, f64>,
    pub fitted_slope: f64,
    pub max_dissipation_residual: f64,
    pub final_constraint_defect: Option<f64>,
    pub moment_initial: Option<f64>,
    pub moment_final: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub checks: Vec<CertificateCheck>,
    /// Every available certificate verdict passed.
    pub pass: bool,
    pub notes: Vec<String>,
}

fn note_for(err: &Error) -> String {
    format!("no certificate ({}): {err}", err.kind())
}

/// Judges a finished run against every certificate that applies.
pub fn summarize(cfg: &SimConfig, out: &RunOutput) -> RunSummary {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for (p, cert) in candidate_certificates(&out.profile, &cfg.p_values) {
        match cert {
            Ok(cert) => {
                let curve = out.entropy_curve_p(p).unwrap_or_default();
                match verify_decay(&curve, &cert, cfg.verify_slack) {
                    Ok(v) => checks.push(CertificateCheck {
                        p,
                        certificate: Some(cert),
                        verdict: Some(v),
                        note: None,
                    }),
                    Err(e) => checks.push(CertificateCheck {
                        p,
                        certificate: Some(cert),
                        verdict: None,
                        note: Some(format!("not verified: {e}")),
                    }),
                }
            }
            Err(e) => {
                let note = note_for(&e);
                notes.push(format!("p = {p}: {note}"));
                checks.push(CertificateCheck {
                    p,
                    certificate: None,
                    verdict: None,
                    note: Some(note),
                });
            }
        }
    }
    let pass = checks.iter().all(|c| c.verdict.as_ref().is_none_or(|v| v.pass));
    let last = out.records.last();
    let final_e_p = last
        .map(|r| r.p_values.iter().zip(&r.e_p).map(|(p, e)| (p.to_string(), *e)).collect())
        .unwrap_or_default();
    RunSummary {
        data: cfg.data,
        samples: out.records.len(),
        tau_end: cfg.tau_end,
        final_e_b: last.map(|r| r.e_b),
        final_e_p,
        fitted_slope: fitted_log_slope(&out.entropy_curve(), 0.5),
        max_dissipation_residual: out
            .records
            .iter()
            .map(|r| r.dissipation_residual)
            .filter(|x| !x.is_nan())
            .fold(0.0, f64::max),
        final_constraint_defect: out.extras.last().map(|x| x.constraint_defect),
        moment_initial: out.extras.first().map(|x| x.moment),
        moment_final: out.extras.last().map(|x| x.moment),
        accepted_steps: out.accepted_steps,
        rejected_steps: out.rejected_steps,
        checks,
        pass,
        notes,
    }
}

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    /// Config echo in the text format accepted by [`parse_config`].
    pub config: String,
    pub grid_n: usize,
    pub half_width: f64,
    pub spacing: f64,
    pub dtau_initial: f64,
    pub dtau_min: f64,
    pub dtau_max: f64,
    pub sample_interval: f64,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(cfg: &SimConfig, out: &RunOutput, outputs: Vec<PathBuf>, wall_clock_seconds: f64) -> Self {
        let g = &out.profile.grid;
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: serialize_config(cfg),
            grid_n: g.len(),
            half_width: g.half_width(),
            spacing: g.spacing(),
            dtau_initial: cfg.dtau_initial,
            dtau_min: cfg.dtau_min,
            dtau_max: cfg.dtau_max,
            sample_interval: cfg.sample_interval,
            outputs,
            wall_clock_seconds,
        }
    }
}
