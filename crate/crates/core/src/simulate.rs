//! Time integration of the scaled reaction-diffusion system
//!
//! ```text
//! u_τ = d1 u_yy + (y/2) u_y + e^τ α k (v^β − u^α)
//! v_τ = d2 v_yy + (y/2) v_y − e^τ β k (v^β − u^α)
//! ```
//!
//! and of the scaled linear diffusion equation. Each step is a Lie splitting:
//! implicit Euler for diffusion and drift, then a pointwise implicit Euler
//! solve of the reaction. Diffusion acts on the deviation from the profile,
//! with the profile's own operator value `−αΛ` (resp. `βΛ`) added back
//! exactly, so that the profile is treated consistently with the fourth-order
//! profile solve.

use crate::entropy::{dissipation_total, f_p_unchecked, lambda_b_unchecked, DiagnosticsRecord, RelativeDensities, State};
use crate::error::{domain, Error, Result};
use crate::grids::{solve_tridiagonal, Grid};
use crate::profile::{linear_diffusion_profile, solve_profile_with, ProblemData, ProfileOptions, ProfileSolution};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialConditionKind {
    ProfileExact,
    GaussianBump,
    ShiftedErf,
    File,
}

impl InitialConditionKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ProfileExact => "profile_exact",
            Self::GaussianBump => "gaussian_bump",
            Self::ShiftedErf => "shifted_erf",
            Self::File => "file",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "profile_exact" => Self::ProfileExact,
            "gaussian_bump" => Self::GaussianBump,
            "shifted_erf" => Self::ShiftedErf,
            "file" => Self::File,
            _ => return None,
        })
    }
}

/// Initial data `u = U f`, `v = V f^{α/β}` for a perturbation factor `f`,
/// so that the data starts on `u^α = v^β` with the profile's end values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionSpec {
    pub kind: InitialConditionKind,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    /// CSV with columns `y, u, v` for [`InitialConditionKind::File`].
    pub path: Option<PathBuf>,
}

impl Default for InitialConditionSpec {
    fn default() -> Self {
        Self {
            kind: InitialConditionKind::GaussianBump,
            amplitude: 0.2,
            width: 1.0,
            center: 0.0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Half-width; `None` means `8 max(1, A₊, A₋)`.
    pub half_width: Option<f64>,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { half_width: None, n: 2001 }
    }
}

impl GridSpec {
    pub fn build(&self, data: &ProblemData) -> Result<Grid> {
        Grid::new(self.half_width.unwrap_or_else(|| data.default_half_width()), self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub data: ProblemData,
    pub grid: GridSpec,
    pub profile: ProfileOptions,
    pub tau_end: f64,
    pub dtau_initial: f64,
    pub dtau_min: f64,
    pub dtau_max: f64,
    pub sample_interval: f64,
    pub initial_condition: InitialConditionSpec,
    pub p_values: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub verify_slack: f64,
}

impl SimConfig {
    /// Defaults for everything except the problem data and final time.
    pub fn new(data: ProblemData, tau_end: f64) -> Self {
        Self {
            data,
            grid: GridSpec::default(),
            profile: ProfileOptions::default(),
            tau_end,
            dtau_initial: 1e-4,
            dtau_min: 1e-9,
            dtau_max: 1e-3,
            sample_interval: 0.01,
            initial_condition: InitialConditionSpec::default(),
            p_values: default_p_values(&data),
            output_path: None,
            verify_slack: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        if self.data.alpha < self.data.beta {
            return domain("alpha < beta; relabel the species first");
        }
        if !(self.tau_end.is_finite() && self.tau_end >= 0.0) {
            return domain(format!("tau_end must be >= 0, got {}", self.tau_end));
        }
        if !(self.dtau_min > 0.0 && self.dtau_min <= self.dtau_initial && self.dtau_initial <= self.dtau_max)
            || !self.dtau_max.is_finite()
        {
            return domain(format!(
                "need 0 < dtau_min <= dtau <= dtau_max, got {} / {} / {}",
                self.dtau_min, self.dtau_initial, self.dtau_max
            ));
        }
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return domain(format!("sample_interval must be positive, got {}", self.sample_interval));
        }
        if !(self.verify_slack >= 0.0) {
            return domain(format!("verify slack must be >= 0, got {}", self.verify_slack));
        }
        let ic = &self.initial_condition;
        if matches!(ic.kind, InitialConditionKind::GaussianBump | InitialConditionKind::ShiftedErf) && !(ic.width > 0.0) {
            return domain(format!("ic width must be positive, got {}", ic.width));
        }
        if ic.kind == InitialConditionKind::File && ic.path.is_none() {
            return domain("ic.kind = file needs ic.path");
        }
        Ok(())
    }
}

/// Power entropies tracked besides `E_B`: `1/2` and `α − 1` (when `α ≥ 2`)
/// for `α = β`, none otherwise.
pub fn default_p_values(data: &ProblemData) -> Vec<f64> {
    if data.alpha != data.beta {
        return Vec::new();
    }
    let mut ps = vec![0.5];
    let q = data.alpha - 1.0;
    if data.alpha >= 2.0 && q != 1.0 {
        ps.push(q);
    }
    ps
}

/// Builds the initial state on the profile's grid.
pub fn initial_state(spec: &InitialConditionSpec, profile: &ProfileSolution) -> Result<State> {
    let g = &profile.grid;
    let d = &profile.data;
    let ratio = d.alpha / d.beta;
    let factor: Vec<f64> = match spec.kind {
        InitialConditionKind::ProfileExact => return Ok(State::from_profile(profile, 0.0)),
        InitialConditionKind::GaussianBump => {
            g.sample(|y| 1.0 + spec.amplitude * (-((y - spec.center) / spec.width).powi(2)).exp())
        }
        InitialConditionKind::ShiftedErf => g.sample(|y| {
            1.0 + spec.amplitude * 0.5 * (libm::erf((y - spec.center) / spec.width) - libm::erf(y / spec.width))
        }),
        InitialConditionKind::File => {
            let path = spec.path.as_ref().ok_or_else(|| Error::Domain("ic.kind = file needs ic.path".into()))?;
            let table = crate::runio::read_profile_table(&std::fs::read_to_string(path)?)?;
            return state_from_table(&table, profile);
        }
    };
    if let Some((i, f)) = factor.iter().enumerate().find(|(_, f)| !(**f > 0.0)) {
        return Err(Error::PositivityLoss { node: i, value: *f });
    }
    let n = g.len();
    let mut u: Vec<f64> = profile.u.iter().zip(&factor).map(|(a, f)| a * f).collect();
    let mut v: Vec<f64> = profile.v.iter().zip(&factor).map(|(a, f)| a * f.powf(ratio)).collect();
    for i in [0, n - 1] {
        u[i] = profile.u[i];
        v[i] = profile.v[i];
    }
    State::new(g, u, v, 0.0)
}

/// Linear interpolation of tabulated `(y, u, v)` onto the profile grid; the
/// end values are replaced by the profile's.
pub fn state_from_table(table: &[(f64, f64, f64)], profile: &ProfileSolution) -> Result<State> {
    if table.len() < 2 {
        return domain("initial-condition table needs at least two rows");
    }
    if table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return domain("initial-condition table must have strictly increasing y");
    }
    let g = &profile.grid;
    let (y0, y1) = (table[0].0, table[table.len() - 1].0);
    if y0 > -g.half_width() || y1 < g.half_width() {
        return domain(format!(
            "initial-condition table covers [{y0}, {y1}], grid needs [-{L}, {L}]",
            L = g.half_width()
        ));
    }
    let mut u = Vec::with_capacity(g.len());
    let mut v = Vec::with_capacity(g.len());
    let mut j = 0;
    for &y in g.nodes() {
        while j + 2 < table.len() && table[j + 1].0 < y {
            j += 1;
        }
        let (a, b) = (table[j], table[j + 1]);
        let t = ((y - a.0) / (b.0 - a.0)).clamp(0.0, 1.0);
        u.push(a.1 + t * (b.1 - a.1));
        v.push(a.2 + t * (b.2 - a.2));
    }
    let n = g.len();
    for i in [0, n - 1] {
        u[i] = profile.u[i];
        v[i] = profile.v[i];
    }
    State::new(g, u, v, 0.0)
}

/// Implicit Euler for `w_τ = d w_yy + (y/2) w_y + s` with `w = 0` at both ends.
fn implicit_drift_diffusion(grid: &Grid, d: f64, dt: f64, w: &[f64], source: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let h = grid.spacing();
    let y = grid.nodes();
    let a = dt * d / (h * h);
    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..n - 1 {
        let b = dt * y[i] / (4.0 * h);
        lower[i] = -(a - b);
        diag[i] = 1.0 + 2.0 * a;
        upper[i] = -(a + b);
        rhs[i] = w[i] + dt * source[i];
    }
    solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
    rhs
}

fn diffusion_substep(state: &State, profile: &ProfileSolution, dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = &profile.data;
    let g = &profile.grid;
    let wu: Vec<f64> = state.u.iter().zip(&profile.u).map(|(a, b)| a - b).collect();
    let wv: Vec<f64> = state.v.iter().zip(&profile.v).map(|(a, b)| a - b).collect();
    let su: Vec<f64> = profile.lambda.iter().map(|l| -d.alpha * l).collect();
    let sv: Vec<f64> = profile.lambda.iter().map(|l| d.beta * l).collect();
    let wu = implicit_drift_diffusion(g, d.d1, dt, &wu, &su);
    let wv = implicit_drift_diffusion(g, d.d2, dt, &wv, &sv);
    let u: Vec<f64> = profile.u.iter().zip(&wu).map(|(a, b)| a + b).collect();
    let v: Vec<f64> = profile.v.iter().zip(&wv).map(|(a, b)| a + b).collect();
    for (i, (&a, &b)) in u.iter().zip(&v).enumerate() {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::PositivityLoss {
                node: i,
                value: a.min(b),
            });
        }
    }
    Ok((u, v))
}

/// Implicit Euler for the local reaction at one node:
/// `u = u0 + cα(v^β − u^α)`, `v = v0 − cβ(v^β − u^α)`.
///
/// Joint Newton on `(u, v)` first; if that stalls or leaves the positive
/// quadrant, a safeguarded root search on the invariant line
/// `βu + αv = βu0 + αv0`, where the root is unique in `(0, m/β)`.
pub fn reaction_node(u0: f64, v0: f64, alpha: f64, beta: f64, c: f64) -> Option<(f64, f64)> {
    let flux = |u: f64, v: f64| v.powf(beta) - u.powf(alpha);
    let scale = u0.abs() + v0.abs();
    if flux(u0, v0) == 0.0 {
        return Some((u0, v0));
    }
    let (mut u, mut v) = (u0, v0);
    for _ in 0..30 {
        let r = flux(u, v);
        let f1 = u - u0 - c * alpha * r;
        let f2 = v - v0 + c * beta * r;
        if f1.abs().max(f2.abs()) <= 1e-15 * scale {
            return Some((u, v));
        }
        let ua = alpha * u.powf(alpha - 1.0);
        let vb = beta * v.powf(beta - 1.0);
        let j11 = 1.0 + c * alpha * ua;
        let j12 = -c * alpha * vb;
        let j21 = -c * beta * ua;
        let j22 = 1.0 + c * beta * vb;
        let det = j11 * j22 - j12 * j21;
        if !(det.is_finite() && det != 0.0) {
            break;
        }
        let du = (f1 * j22 - f2 * j12) / det;
        let dv = (j11 * f2 - j21 * f1) / det;
        let (nu, nv) = (u - du, v - dv);
        if !(nu > 0.0 && nv > 0.0) {
            break;
        }
        if du.abs() <= 1e-16 * nu && dv.abs() <= 1e-16 * nv {
            return Some((nu, nv));
        }
        u = nu;
        v = nv;
    }
    reaction_on_line(u0, v0, alpha, beta, c)
}

fn reaction_on_line(u0: f64, v0: f64, alpha: f64, beta: f64, c: f64) -> Option<(f64, f64)> {
    let m = beta * u0 + alpha * v0;
    let v_of = |u: f64| ((m - beta * u) / alpha).max(0.0);
    let g = |u: f64| u - u0 - c * alpha * (v_of(u).powf(beta) - u.powf(alpha));
    let dg = |u: f64| 1.0 + c * beta * v_of(u).powf(beta - 1.0) + c * alpha * alpha * u.powf(alpha - 1.0);
    let (mut lo, mut hi) = (0.0, m / beta);
    let mut u = u0.clamp(lo, hi);
    for _ in 0..200 {
        let gu = g(u);
        if gu == 0.0 {
            break;
        }
        if gu < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let newton = u - gu / dg(u);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - u).abs() <= 1e-16 * u.abs().max(f64::MIN_POSITIVE) || hi - lo <= 1e-16 * hi {
            u = next;
            break;
        }
        u = next;
    }
    let v = v_of(u);
    (u > 0.0 && v > 0.0).then_some((u, v))
}

/// One splitting step from `state.tau` to `state.tau + dtau`.
pub fn step(state: &State, profile: &ProfileSolution, dtau: f64) -> Result<State> {
    if !(dtau > 0.0) {
        return domain(format!("dtau must be positive, got {dtau}"));
    }
    let d = &profile.data;
    let (mut u, mut v) = diffusion_substep(state, profile, dtau)?;
    let c = dtau * d.k * (state.tau + dtau).exp();
    let n = u.len();
    for i in 1..n - 1 {
        let (nu, nv) = reaction_node(u[i], v[i], d.alpha, d.beta, c).ok_or_else(|| Error::NewtonFailure {
            node: i,
            residual: (v[i].powf(d.beta) - u[i].powf(d.alpha)).abs(),
        })?;
        u[i] = nu;
        v[i] = nv;
    }
    Ok(State {
        grid: state.grid.clone(),
        u,
        v,
        tau: state.tau + dtau,
    })
}

/// `∫ β(u − U) + α(v − V) dy`.
pub fn conserved_moment(state: &State, profile: &ProfileSolution) -> f64 {
    let (a, b) = (profile.data.alpha, profile.data.beta);
    profile
        .grid
        .integrate_with(|i| b * (state.u[i] - profile.u[i]) + a * (state.v[i] - profile.v[i]))
}

/// Per-sample quantities that are not part of the diagnostics columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleExtras {
    pub tau: f64,
    pub moment: f64,
    /// `max |u^α − v^β|`
    pub constraint_defect: f64,
    /// `max(|U λ_B(ρ)|, |V λ_B(ζ)|)` at the two grid ends.
    pub boundary_integrand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub profile: ProfileSolution,
    pub records: Vec<DiagnosticsRecord>,
    pub extras: Vec<SampleExtras>,
    pub final_state: State,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl RunOutput {
    /// `(τ, E_B)` pairs.
    pub fn entropy_curve(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.tau, r.e_b)).collect()
    }

    /// `(τ, E_p)` pairs for a configured `p` (or `p = 1`).
    pub fn entropy_curve_p(&self, p: f64) -> Option<Vec<(f64, f64)>> {
        if p == 1.0 {
            return Some(self.entropy_curve());
        }
        let j = self.records.first()?.p_values.iter().position(|q| *q == p)?;
        Some(self.records.iter().map(|r| (r.tau, r.e_p[j])).collect())
    }
}

fn sample_times(tau_end: f64, interval: f64) -> Vec<f64> {
    if tau_end <= 0.0 {
        return Vec::new();
    }
    let count = (tau_end / interval - 1e-9).ceil() as usize;
    let mut t: Vec<f64> = (0..count).map(|j| j as f64 * interval).collect();
    t.push(tau_end);
    t
}

fn diagnostics(state: &State, profile: &ProfileSolution, p_values: &[f64]) -> Result<(DiagnosticsRecord, SampleExtras)> {
    let dens = RelativeDensities::new(state, profile)?;
    let rec = dissipation_total(&dens, state, profile, p_values)?;
    let d = &profile.data;
    let constraint_defect = state
        .u
        .iter()
        .zip(&state.v)
        .map(|(u, v)| (u.powf(d.alpha) - v.powf(d.beta)).abs())
        .fold(0.0, f64::max);
    let n = state.u.len();
    let boundary_integrand = [0, n - 1]
        .iter()
        .map(|&i| {
            (profile.u[i] * lambda_b_unchecked(dens.rho[i]))
                .abs()
                .max((profile.v[i] * lambda_b_unchecked(dens.zeta[i])).abs())
        })
        .fold(0.0, f64::max);
    Ok((
        rec,
        SampleExtras {
            tau: state.tau,
            moment: conserved_moment(state, profile),
            constraint_defect,
            boundary_integrand,
        },
    ))
}

/// Derivative of sampled values at every sample: three-point formulas on a
/// possibly non-uniform set, one-sided at the ends.
pub fn sampled_derivative(t: &[f64], e: &[f64]) -> Vec<f64> {
    let n = t.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![f64::NAN],
        2 => {
            let s = (e[1] - e[0]) / (t[1] - t[0]);
            return vec![s, s];
        }
        _ => {}
    }
    // derivative at t[k] of the quadratic through nodes i, i+1, i+2
    let quad = |i: usize, k: usize| {
        let (x0, x1, x2) = (t[i], t[i + 1], t[i + 2]);
        let x = t[k];
        e[i] * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2))
            + e[i + 1] * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2))
            + e[i + 2] * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1))
    };
    let mut out = Vec::with_capacity(n);
    out.push(quad(0, 0));
    for k in 1..n - 1 {
        out.push(quad(k - 1, k));
    }
    out.push(quad(n - 3, n - 1));
    out
}

/// Relative mismatch `|dE/dτ + D| / max(D, |dE/dτ|, floor)` per sample.
pub fn fill_dissipation_residuals(records: &mut [DiagnosticsRecord]) {
    let t: Vec<f64> = records.iter().map(|r| r.tau).collect();
    let e: Vec<f64> = records.iter().map(|r| r.e_b).collect();
    let de = sampled_derivative(&t, &e);
    let scale = records
        .iter()
        .zip(&de)
        .map(|(r, d)| r.d_b_total.abs().max(d.abs()))
        .fold(0.0, f64::max);
    let floor = (1e-12 * scale).max(f64::MIN_POSITIVE);
    for (r, d) in records.iter_mut().zip(&de) {
        r.dissipation_residual = (d + r.d_b_total).abs() / r.d_b_total.max(d.abs()).max(floor);
    }
}

/// Solves the profile and integrates the configured run.
pub fn run(config: &SimConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = config.grid.build(&config.data)?;
    let profile = solve_profile_with(&config.data, &grid, &config.profile)?;
    run_with_profile(config, &profile)
}

pub fn run_with_profile(config: &SimConfig, profile: &ProfileSolution) -> Result<RunOutput> {
    config.validate()?;
    let state0 = initial_state(&config.initial_condition, profile)?;
    run_from_state(config, profile, state0)
}

pub fn run_from_state(config: &SimConfig, profile: &ProfileSolution, mut state: State) -> Result<RunOutput> {
    config.validate()?;
    let times = sample_times(config.tau_end, config.sample_interval);
    let mut records = Vec::with_capacity(times.len());
    let mut extras = Vec::with_capacity(times.len());
    let mut dt = config.dtau_initial;
    let mut streak = 0;
    let (mut accepted, mut rejected) = (0, 0);
    for &target in &times {
        while target - state.tau > 1e-12 * target.max(1.0) {
            let h = dt.min(target - state.tau);
            match step(&state, profile, h) {
                Ok(next) => {
                    state = next;
                    accepted += 1;
                    streak += 1;
                    if streak >= 5 {
                        dt = (dt * 1.2).min(config.dtau_max);
                        streak = 0;
                    }
                }
                Err(e @ (Error::PositivityLoss { .. } | Error::NewtonFailure { .. })) => {
                    rejected += 1;
                    streak = 0;
                    if h <= config.dtau_min {
                        return Err(e);
                    }
                    dt = (h * 0.5).max(config.dtau_min);
                    log::debug!("step rejected at tau = {}: {e}; dtau -> {dt:e}", state.tau);
                }
                Err(e) => return Err(e),
            }
        }
        state.tau = target;
        let (rec, ex) = diagnostics(&state, profile, &config.p_values)?;
        records.push(rec);
        extras.push(ex);
    }
    fill_dissipation_residuals(&mut records);
    Ok(RunOutput {
        profile: profile.clone(),
        records,
        extras,
        final_state: state,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Entropy generator for the linear diffusion runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiKind {
    Boltzmann,
    Power { p: f64 },
    /// `(z − 1)²`
    Quadratic,
}

impl PhiKind {
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            PhiKind::Boltzmann => lambda_b_unchecked(z),
            PhiKind::Power { p } => f_p_unchecked(z, p),
            PhiKind::Quadratic => (z - 1.0) * (z - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRunConfig {
    pub grid: Grid,
    pub tau_end: f64,
    pub dtau: f64,
    pub sample_interval: f64,
    /// Additive perturbation `amplitude · exp(−((y − center)/width)²)`.
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
}

/// `u_τ = D u_yy + (y/2) u_y` from `u⁰ = U + bump`, sampling `∫ U φ(u/U) dy`.
pub fn run_linear(
    diffusivity: f64,
    a_minus: f64,
    a_plus: f64,
    phi: PhiKind,
    config: &LinearRunConfig,
) -> Result<Vec<(f64, f64)>> {
    if !(a_minus > 0.0 && a_plus > 0.0) {
        return domain("the relative entropy needs positive limits A_minus, A_plus");
    }
    if !(config.dtau > 0.0 && config.sample_interval > 0.0 && config.width > 0.0) {
        return domain("dtau, sample_interval and width must be positive");
    }
    let g = &config.grid;
    let big_u = linear_diffusion_profile(diffusivity, a_minus, a_plus, g)?;
    let n = g.len();
    let mut w = g.sample(|y| config.amplitude * (-((y - config.center) / config.width).powi(2)).exp());
    w[0] = 0.0;
    w[n - 1] = 0.0;
    let zero = vec![0.0; n];
    let entropy = |w: &[f64]| -> Result<f64> {
        let mut acc = Vec::with_capacity(n);
        for i in 0..n {
            let u = big_u[i] + w[i];
            if !(u > 0.0) {
                return Err(Error::PositivityLoss { node: i, value: u });
            }
            acc.push(big_u[i] * phi.eval(u / big_u[i]));
        }
        g.integrate(&acc)
    };
    let mut out = Vec::new();
    let mut tau = 0.0;
    for target in sample_times(config.tau_end, config.sample_interval) {
        while target - tau > 1e-12 * target.max(1.0) {
            let h = config.dtau.min(target - tau);
            w = implicit_drift_diffusion(g, diffusivity, h, &w, &zero);
            tau += h;
        }
        tau = target;
        out.push((tau, entropy(&w)?));
    }
    Ok(out)
}
