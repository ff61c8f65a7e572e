//! The convex families `Φ_α`, `Φ_{p,α}`, their numeric Legendre transforms,
//! the analytic upper bounds for `Φ_α^*` and the quadratic-bound constant
//! `M̂_{p,α}`.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiFamily {
    /// `Φ_α(z) = ((z+1)^α − 1) log((z+1)^α)`.
    BoltzmannAlpha { alpha: f64 },
    /// `Φ_{p,α}(z) = α/(p−1) ((z+1)^{(p−1)/p} − 1)((z+1)^{α/p} − 1)`.
    GeneralPAlpha { p: f64, alpha: f64 },
}

impl PhiFamily {
    pub fn alpha(&self) -> f64 {
        match *self {
            PhiFamily::BoltzmannAlpha { alpha } | PhiFamily::GeneralPAlpha { alpha, .. } => alpha,
        }
    }
}

/// Family value; `+∞` for `z ≤ −1`.
pub fn phi(fam: PhiFamily, z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z <= -1.0 {
        return f64::INFINITY;
    }
    let l = z.ln_1p();
    match fam {
        PhiFamily::BoltzmannAlpha { alpha } => boltzmann(alpha, l),
        PhiFamily::GeneralPAlpha { p, alpha } => {
            if p == 1.0 {
                boltzmann(alpha, l)
            } else {
                alpha / (p - 1.0) * ((p - 1.0) / p * l).exp_m1() * (alpha / p * l).exp_m1()
            }
        }
    }
}

fn boltzmann(alpha: f64, l: f64) -> f64 {
    let t = alpha * l;
    t.exp_m1() * t
}

/// Parameters of the numeric supremum search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Base points of the logarithmic grid.
    pub points: usize,
    /// Search starts at `−1 + lower_offset`.
    pub lower_offset: f64,
    /// Golden-section stopping width (relative to `max(1, |z|)`).
    pub tol: f64,
    /// Initial upper end; extended by decades as needed.
    pub z_max: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            points: 10_000,
            lower_offset: 1e-9,
            tol: 1e-10,
            z_max: 10.0,
        }
    }
}

fn log_space(lo_exp: f64, hi_exp: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 {
        (hi_exp - lo_exp) / (count - 1) as f64
    } else {
        0.0
    };
    (0..count).map(move |j| 10f64.powf(lo_exp + step * j as f64))
}

/// Sorted search nodes on `(−1 + offset, z_max]` including `0`.
fn search_nodes(params: &SearchParams, z_max: f64) -> Vec<f64> {
    let n = params.points.max(40);
    let low = params.lower_offset.log10();
    let n_lower = 3 * n / 10;
    let n_neg = n / 5;
    let n_pos = n - n_lower - n_neg;
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    z.extend(log_space(low, -1e-12, n_lower).map(|t| -1.0 + t));
    z.extend(log_space(low, 0.0, n_neg).map(|t| -t));
    z.push(0.0);
    z.extend(log_space(low, z_max.log10(), n_pos));
    z.retain(|x| *x > -1.0);
    z.sort_by(f64::total_cmp);
    z.dedup();
    z
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of `f` on `[a, b]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * 1f64.max(c.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Grid maximum followed by golden refinement in the neighbouring cells.
fn refine_max(f: &impl Fn(f64) -> f64, nodes: &[f64], tol: f64) -> (f64, f64) {
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &z) in nodes.iter().enumerate() {
        let v = f(z);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = nodes[best_i.saturating_sub(1)];
    let hi = nodes[(best_i + 1).min(nodes.len() - 1)];
    let (zr, vr) = golden_max(f, lo, hi, tol);
    if vr > best {
        (zr, vr)
    } else {
        (nodes[best_i], best)
    }
}

/// `Φ^*(ξ) = sup_z (ξ z − Φ(z))` by direct search.
pub fn phi_conjugate_numeric(fam: PhiFamily, xi: f64, params: &SearchParams) -> f64 {
    if !xi.is_finite() {
        return f64::NAN;
    }
    let objective = |z: f64| xi * z - phi(fam, z);
    let mut z_max = params.z_max.max(1.0);
    let mut decreasing = 0;
    let mut last = objective(z_max);
    for _ in 0..300 {
        if decreasing >= 3 {
            break;
        }
        let next = objective(z_max * 10.0);
        if next < last || next.is_nan() {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        last = next;
        z_max *= 10.0;
    }
    let nodes = search_nodes(params, z_max);
    let (_, v) = refine_max(&objective, &nodes, params.tol);
    v.max(0.0)
}

/// `c̃_α = (2/α²)^{1/(α−1)} (α−1)/α` for `α > 1`.
pub fn c_tilde(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return domain(format!("c_tilde needs alpha > 1, got {alpha}"));
    }
    Ok((2.0 / (alpha * alpha)).powf(1.0 / (alpha - 1.0)) * (alpha - 1.0) / alpha)
}

/// Analytic upper bound for `Φ_α^*(ξ)` from the three `α` regimes; at
/// `α = 2`, where two regimes meet, the smaller value is returned.
pub fn phi_conjugate_bound(alpha: f64, xi: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return domain(format!("alpha must be >= 1, got {alpha}"));
    }
    if alpha == 1.0 {
        return Ok(xi.exp() - xi - 1.0);
    }
    let c = c_tilde(alpha)?;
    let power = c * xi.abs().powf(alpha / (alpha - 1.0));
    let quad = xi * xi / (2.0 * alpha);
    Ok(if alpha < 2.0 {
        power.max(quad)
    } else if alpha == 2.0 {
        power.max(quad).min(power)
    } else {
        power
    })
}

/// `ξ²/(2α)`, valid for `|ξ| ≤ α`; `None` outside that window.
pub fn phi_conjugate_quadratic_bound(alpha: f64, xi: f64) -> Option<f64> {
    (alpha >= 1.0 && xi.abs() <= alpha).then(|| xi * xi / (2.0 * alpha))
}

fn check_m_hat_range(p: f64, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && p.is_finite() && p > 0.0) {
        return domain(format!("m_hat needs p > 0 and alpha > 0, got p = {p}, alpha = {alpha}"));
    }
    let upper = (alpha / 2.0).max(alpha - 1.0);
    if p > upper * (1.0 + 1e-12) {
        return domain(format!(
            "m_hat needs 0 < p <= max(alpha/2, alpha-1) = {upper}, got p = {p}"
        ));
    }
    Ok(())
}

/// End limits of `z ↦ (α²/4p²) z²/Φ_{p,α}(z)` at `z → 0`, `z → ∞`, `z → −1⁺`.
fn m_hat_limits(p: f64, alpha: f64) -> [f64; 3] {
    let pref = alpha * alpha / (4.0 * p * p);
    let at_zero = 0.25;
    let exponent = if p > 1.0 {
        2.0 - (p - 1.0) / p - alpha / p
    } else {
        2.0 - alpha / p
    };
    let at_inf = if exponent < -1e-12 || p == 1.0 {
        0.0
    } else if p > 1.0 {
        pref * (p - 1.0) / alpha
    } else {
        pref * (1.0 - p) / alpha
    };
    let at_minus_one = if p > 1.0 { pref * (p - 1.0) / alpha } else { 0.0 };
    [at_zero, at_inf, at_minus_one]
}

/// `M̂_{p,α} = sup_{z ≠ 0} (α²/4p²) z²/Φ_{p,α}(z)`.
pub fn m_hat(p: f64, alpha: f64) -> Result<f64> {
    check_m_hat_range(p, alpha)?;
    let fam = PhiFamily::GeneralPAlpha { p, alpha };
    let pref = alpha * alpha / (4.0 * p * p);
    let ratio = |z: f64| {
        // the removable singularity at 0 is covered by its limit value
        if z.abs() < 1e-4 {
            return f64::NEG_INFINITY;
        }
        let ph = phi(fam, z);
        if ph.is_finite() && ph > 0.0 {
            pref * z * z / ph
        } else {
            0.0
        }
    };
    let params = SearchParams {
        lower_offset: 1e-12,
        ..SearchParams::default()
    };
    let nodes = search_nodes(&params, 1e12);
    let (_, interior) = refine_max(&ratio, &nodes, params.tol);
    let limits = m_hat_limits(p, alpha);
    Ok(limits.iter().fold(interior, |m, &v| m.max(v)))
}
