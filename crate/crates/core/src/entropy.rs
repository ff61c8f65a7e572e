//! Entropy generators and the integral functionals of the relative entropy
//! method: relative entropies, Fisher information, reactive dissipation,
//! mixed terms and the Hellinger distance.

use crate::error::{domain, Error, Result};
use crate::grids::Grid;
use crate::profile::ProfileSolution;
use serde::{Deserialize, Serialize};

/// Scaled concentrations `(u, v)` at scaled time `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub tau: f64,
}

impl State {
    pub fn new(grid: &Grid, u: Vec<f64>, v: Vec<f64>, tau: f64) -> Result<Self> {
        grid.check(&u)?;
        grid.check(&v)?;
        for (i, (&a, &b)) in u.iter().zip(&v).enumerate() {
            if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
                return Err(Error::PositivityLoss {
                    node: i,
                    value: if a > 0.0 { b } else { a },
                });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            u,
            v,
            tau,
        })
    }

    /// The profile itself as a state.
    pub fn from_profile(profile: &ProfileSolution, tau: f64) -> Self {
        Self {
            grid: profile.grid.clone(),
            u: profile.u.clone(),
            v: profile.v.clone(),
            tau,
        }
    }

    /// Largest deviation of the end values from the profile end values.
    pub fn boundary_defect(&self, profile: &ProfileSolution) -> f64 {
        let n = self.u.len();
        [0, n - 1]
            .iter()
            .map(|&i| (self.u[i] - profile.u[i]).abs().max((self.v[i] - profile.v[i]).abs()))
            .fold(0.0, f64::max)
    }
}

/// `ρ = u/U`, `ζ = v/V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeDensities {
    pub rho: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl RelativeDensities {
    pub fn new(state: &State, profile: &ProfileSolution) -> Result<Self> {
        profile.grid.check(&state.u)?;
        profile.grid.check(&state.v)?;
        let rho: Vec<f64> = state.u.iter().zip(&profile.u).map(|(a, b)| a / b).collect();
        let zeta: Vec<f64> = state.v.iter().zip(&profile.v).map(|(a, b)| a / b).collect();
        let dens = Self { rho, zeta };
        dens.check_positive()?;
        Ok(dens)
    }

    fn check_positive(&self) -> Result<()> {
        for (i, (&r, &z)) in self.rho.iter().zip(&self.zeta).enumerate() {
            if !(r > 0.0 && z > 0.0 && r.is_finite() && z.is_finite()) {
                return domain(format!("nonpositive relative density at node {i}: rho = {r}, zeta = {z}"));
            }
        }
        Ok(())
    }

    /// Largest `|ρ − 1|`, `|ζ − 1|` at the two grid ends.
    pub fn boundary_defect(&self) -> f64 {
        let n = self.rho.len();
        [0, n - 1]
            .iter()
            .map(|&i| (self.rho[i] - 1.0).abs().max((self.zeta[i] - 1.0).abs()))
            .fold(0.0, f64::max)
    }
}

/// One sampling instant. `e_p[j]` belongs to `p_values[j]`; fields that do
/// not apply to the problem are NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub tau: f64,
    pub e_b: f64,
    pub p_values: Vec<f64>,
    pub e_p: Vec<f64>,
    pub i_fisher: f64,
    pub d_react: f64,
    pub i_lambda: f64,
    pub i_lambda_1: f64,
    pub i_lambda_2: f64,
    pub hellinger_sq: f64,
    pub d_b_total: f64,
    pub dissipation_residual: f64,
}

const SERIES_RADIUS: f64 = 0.1;

fn check_z(z: f64) -> Result<()> {
    if z.is_nan() || z < 0.0 {
        return domain(format!("argument must be >= 0, got {z}"));
    }
    Ok(())
}

/// `λ_B(1+ε)` by its Taylor series, for `|ε| < 0.1`.
fn lambda_b_series(eps: f64) -> f64 {
    // sum_{n>=2} (-1)^n eps^n / (n(n-1))
    let mut pow = eps * eps;
    let mut acc = 0.0;
    for n in 2..40 {
        let nf = n as f64;
        let term = pow / (nf * (nf - 1.0));
        acc += if n % 2 == 0 { term } else { -term };
        if term.abs() <= 1e-18 * acc.abs() {
            break;
        }
        pow *= eps;
    }
    acc
}

/// Boltzmann function `z log z − z + 1`, with value 1 at `z = 0`.
pub fn lambda_b(z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(lambda_b_unchecked(z))
}

pub(crate) fn lambda_b_unchecked(z: f64) -> f64 {
    let eps = z - 1.0;
    if eps.abs() < SERIES_RADIUS {
        lambda_b_series(eps)
    } else if z == 0.0 {
        1.0
    } else if z.is_infinite() {
        f64::INFINITY
    } else {
        z * z.ln() - z + 1.0
    }
}

/// Power entropy generator with `F_p'' = z^{p−2}`, `F_p(1) = F_p'(1) = 0`.
pub fn f_p(z: f64, p: f64) -> Result<f64> {
    check_z(z)?;
    if !p.is_finite() {
        return domain(format!("p must be finite, got {p}"));
    }
    if p <= 0.0 && z == 0.0 {
        return domain(format!("F_p(0) is infinite for p = {p}"));
    }
    Ok(f_p_unchecked(z, p))
}

pub(crate) fn f_p_unchecked(z: f64, p: f64) -> f64 {
    if p == 1.0 {
        return lambda_b_unchecked(z);
    }
    let eps = z - 1.0;
    if p == 0.0 {
        if eps.abs() < SERIES_RADIUS {
            // sum_{n>=2} (-eps)^n / n
            let mut pow = eps * eps;
            let mut acc = 0.0;
            for n in 2..40 {
                let term = pow / n as f64;
                acc += if n % 2 == 0 { term } else { -term };
                if term.abs() <= 1e-18 * acc.abs() {
                    break;
                }
                pow *= eps;
            }
            return acc;
        }
        return z - z.ln() - 1.0;
    }
    if eps.abs() < SERIES_RADIUS {
        // binomial series: sum_{n>=2} C(p, n) eps^n / (p (p-1))
        let mut coef = 0.5; // C(p,2) / (p(p-1))
        let mut pow = eps * eps;
        let mut acc = 0.0;
        for n in 2..200 {
            let term = coef * pow;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                break;
            }
            let nf = n as f64;
            coef *= (p - nf) / (nf + 1.0);
            pow *= eps;
        }
        return acc;
    }
    (z.powf(p) - p * z + p - 1.0) / (p * (p - 1.0))
}

/// Legendre transform `F_p^*(ζ) = sup_{z ≥ 0} (ζ z − F_p(z))`.
pub fn f_p_conjugate(zeta: f64, p: f64) -> Result<f64> {
    if !zeta.is_finite() || !p.is_finite() {
        return domain(format!("non-finite argument: zeta = {zeta}, p = {p}"));
    }
    if p == 1.0 {
        return Ok(zeta.exp_m1());
    }
    if p == 0.0 {
        if zeta >= 1.0 {
            return domain(format!("F_0^* is infinite for zeta = {zeta} >= 1"));
        }
        return Ok(-(-zeta).ln_1p());
    }
    if p == 0.5 {
        if zeta >= 2.0 {
            return domain(format!("F_1/2^* is infinite for zeta = {zeta} >= 2"));
        }
        return Ok(2.0 * zeta / (2.0 - zeta));
    }
    let s = (p - 1.0) * zeta;
    if s <= -1.0 {
        if p > 1.0 {
            // supremum attained at z = 0
            return Ok(-1.0 / p);
        }
        return domain(format!("F_p^* is infinite for p = {p}, zeta = {zeta}"));
    }
    // stationary point z^{p-1} = 1 + (p-1) zeta; value (w^{p/(p-1)} - 1)/p
    Ok((p / (p - 1.0) * s.ln_1p()).exp_m1() / p)
}

/// `Γ(a, b) = (a − b)(log a − log b)`, `0` at `(0, 0)`, `+∞` on the axes.
pub fn gamma_fn(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() || a < 0.0 || b < 0.0 {
        return f64::NAN;
    }
    if a == b {
        return 0.0;
    }
    if a == 0.0 || b == 0.0 || a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    let d = a - b;
    d * (d / b).ln_1p()
}

/// `Ψ(r) = α (r^{1/α} − 1)`.
pub fn psi(alpha: f64, r: f64) -> f64 {
    alpha * (r.ln() / alpha).exp_m1()
}

fn check_grid(profile: &ProfileSolution, f: &[f64]) -> Result<()> {
    profile.grid.check(f)
}

fn check_dens(dens: &RelativeDensities, profile: &ProfileSolution) -> Result<()> {
    check_grid(profile, &dens.rho)?;
    check_grid(profile, &dens.zeta)?;
    dens.check_positive()
}

fn general_p_allowed(profile: &ProfileSolution, p: f64) -> Result<()> {
    if p == 1.0 {
        return Ok(());
    }
    if profile.data.alpha != profile.data.beta {
        return Err(Error::UnsupportedEntropy { p });
    }
    if p == 0.0 || !p.is_finite() {
        return domain(format!("p = {p} is not admissible for the power-entropy functionals"));
    }
    Ok(())
}

/// `∫ U F_p(ρ) + V F_p(ζ) dy`; `p = 1` is the relative Boltzmann entropy.
pub fn relative_entropy(state: &State, profile: &ProfileSolution, p: f64) -> Result<f64> {
    let dens = RelativeDensities::new(state, profile)?;
    relative_entropy_dens(&dens, profile, p)
}

pub(crate) fn relative_entropy_dens(dens: &RelativeDensities, profile: &ProfileSolution, p: f64) -> Result<f64> {
    check_dens(dens, profile)?;
    if !p.is_finite() {
        return domain(format!("p must be finite, got {p}"));
    }
    Ok(profile.grid.integrate_with(|i| {
        profile.u[i] * f_p_unchecked(dens.rho[i], p) + profile.v[i] * f_p_unchecked(dens.zeta[i], p)
    }))
}

/// `∫ d1 U ρ^{p−2} ρ_y² + d2 V ζ^{p−2} ζ_y² dy`.
pub fn fisher_information(dens: &RelativeDensities, profile: &ProfileSolution, p: f64) -> Result<f64> {
    check_dens(dens, profile)?;
    let g = &profile.grid;
    let rho_y = g.derivative1_o4(&dens.rho)?;
    let zeta_y = g.derivative1_o4(&dens.zeta)?;
    let (d1, d2) = (profile.data.d1, profile.data.d2);
    let weight = |z: f64| if p == 1.0 { 1.0 / z } else { z.powf(p - 2.0) };
    Ok(g.integrate_with(|i| {
        d1 * profile.u[i] * weight(dens.rho[i]) * rho_y[i] * rho_y[i]
            + d2 * profile.v[i] * weight(dens.zeta[i]) * zeta_y[i] * zeta_y[i]
    }))
}

/// `∫ k U^α Γ(ρ^α, ζ^β) dy` for `p = 1`; the power-entropy analogue for `α = β`.
pub fn reactive_dissipation(dens: &RelativeDensities, profile: &ProfileSolution, p: f64) -> Result<f64> {
    check_dens(dens, profile)?;
    general_p_allowed(profile, p)?;
    let d = &profile.data;
    let (a, b, k) = (d.alpha, d.beta, d.k);
    let g = &profile.grid;
    if p == 1.0 {
        Ok(g.integrate_with(|i| {
            k * profile.u[i].powf(a) * gamma_fn(dens.rho[i].powf(a), dens.zeta[i].powf(b))
        }))
    } else {
        Ok(g.integrate_with(|i| {
            let (r, z) = (dens.rho[i], dens.zeta[i]);
            k * profile.u[i].powf(a) * a / (p - 1.0) * (z.powf(p - 1.0) - r.powf(p - 1.0)) * (z.powf(a) - r.powf(a))
        }))
    }
}

/// Sign-indefinite multiplier term: `∫ ((1−ρ)α − (1−ζ)β) Λ dy` for `p = 1`,
/// `∫ (ζ^p − ρ^p) α Λ / p dy` otherwise.
pub fn mixed_term(dens: &RelativeDensities, profile: &ProfileSolution, p: f64) -> Result<f64> {
    check_dens(dens, profile)?;
    general_p_allowed(profile, p)?;
    let (a, b) = (profile.data.alpha, profile.data.beta);
    let lam = &profile.lambda;
    let g = &profile.grid;
    if p == 1.0 {
        Ok(g.integrate_with(|i| ((1.0 - dens.rho[i]) * a - (1.0 - dens.zeta[i]) * b) * lam[i]))
    } else {
        Ok(g.integrate_with(|i| (dens.zeta[i].powf(p) - dens.rho[i].powf(p)) * a * lam[i] / p))
    }
}

/// Nodewise integrands `(Ψ(ζ^β) − Ψ(ρ^α)) Λ` and the remainder, whose
/// `ρ`-part vanishes identically.
fn split_integrands(dens: &RelativeDensities, profile: &ProfileSolution, i: usize) -> (f64, f64, f64) {
    let (a, b) = (profile.data.alpha, profile.data.beta);
    let (r, z) = (dens.rho[i], dens.zeta[i]);
    let psi_z = psi(a, z.powf(b));
    let psi_r = psi(a, r.powf(a));
    let lam = profile.lambda[i];
    let first = (psi_z - psi_r) * lam;
    let zeta_part = (z - 1.0 - psi_z / b) * b * lam;
    let rho_part = (r - 1.0 - psi_r / a) * a * lam;
    (first, zeta_part, rho_part)
}

/// Splitting of the Boltzmann mixed term for `α > β` into `(I_Λ,1, I_Λ,2)`.
pub fn split_mixed_term(dens: &RelativeDensities, profile: &ProfileSolution) -> Result<(f64, f64)> {
    check_dens(dens, profile)?;
    let (a, b) = (profile.data.alpha, profile.data.beta);
    if !(a > b) {
        return domain(format!("splitting needs alpha > beta, got alpha = {a}, beta = {b}"));
    }
    let g = &profile.grid;
    let i1 = g.integrate_with(|i| split_integrands(dens, profile, i).0);
    let i2 = g.integrate_with(|i| {
        let (_, zp, rp) = split_integrands(dens, profile, i);
        zp - rp
    });
    Ok((i1, i2))
}

/// Nodewise `α(ρ − 1 − Ψ(ρ^α)/α) Λ`, which is zero up to roundoff.
pub fn split_rho_part(dens: &RelativeDensities, profile: &ProfileSolution) -> Result<Vec<f64>> {
    check_dens(dens, profile)?;
    Ok((0..dens.rho.len()).map(|i| split_integrands(dens, profile, i).2).collect())
}

/// `‖√u − √U‖² + ‖√v − √V‖²`.
pub fn hellinger_sq(state: &State, profile: &ProfileSolution) -> Result<f64> {
    check_grid(profile, &state.u)?;
    check_grid(profile, &state.v)?;
    Ok(profile.grid.integrate_with(|i| {
        let du = state.u[i].sqrt() - profile.u[i].sqrt();
        let dv = state.v[i].sqrt() - profile.v[i].sqrt();
        du * du + dv * dv
    }))
}

/// Full entropy dissipation `I_Fisher + ½E_p − I_Λ + e^τ D_react` for one `p`.
pub fn dissipation_p(dens: &RelativeDensities, state: &State, profile: &ProfileSolution, p: f64) -> Result<f64> {
    let e = relative_entropy_dens(dens, profile, p)?;
    let fisher = fisher_information(dens, profile, p)?;
    let mixed = mixed_term(dens, profile, p)?;
    let react = reactive_dissipation(dens, profile, p)?;
    Ok(fisher + 0.5 * e - mixed + state.tau.exp() * react)
}

/// Assembles the diagnostics at `state.tau`. `dissipation_residual` is left NaN.
pub fn dissipation_total(
    dens: &RelativeDensities,
    state: &State,
    profile: &ProfileSolution,
    p_values: &[f64],
) -> Result<DiagnosticsRecord> {
    let e_b = relative_entropy_dens(dens, profile, 1.0)?;
    let e_p = p_values
        .iter()
        .map(|&p| relative_entropy_dens(dens, profile, p))
        .collect::<Result<Vec<_>>>()?;
    let i_fisher = fisher_information(dens, profile, 1.0)?;
    let d_react = reactive_dissipation(dens, profile, 1.0)?;
    let i_lambda = mixed_term(dens, profile, 1.0)?;
    let (i_lambda_1, i_lambda_2) = if profile.data.alpha > profile.data.beta {
        split_mixed_term(dens, profile)?
    } else {
        (f64::NAN, f64::NAN)
    };
    let hellinger = hellinger_sq(state, profile)?;
    let d_b_total = i_fisher + 0.5 * e_b - i_lambda + state.tau.exp() * d_react;
    Ok(DiagnosticsRecord {
        tau: state.tau,
        e_b,
        p_values: p_values.to_vec(),
        e_p,
        i_fisher,
        d_react,
        i_lambda,
        i_lambda_1,
        i_lambda_2,
        hellinger_sq: hellinger,
        d_b_total,
        dissipation_residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{closed_form_profile, solve_profile, ProblemData};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn flat_profile(alpha: f64, beta: f64, l: f64, n: usize) -> ProfileSolution {
        let data = ProblemData::new(alpha, beta, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let g = Grid::new(l, n).unwrap();
        ProfileSolution::from_values(data, &g, vec![1.0; n], vec![1.0; n], vec![0.0; n]).unwrap()
    }

    #[test]
    fn boltzmann_values() {
        assert_eq!(lambda_b(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(lambda_b(E).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(lambda_b(0.0).unwrap(), 1.0);
        assert!(lambda_b(-0.1).is_err());
        // series branch near 1 agrees with an expanded reference
        let eps: f64 = 1e-6;
        assert_relative_eq!(lambda_b(1.0 + eps).unwrap(), eps * eps / 2.0 - eps.powi(3) / 6.0, max_relative = 1e-12);
        // continuity across the series radius
        for z in [0.9, 1.1] {
            let direct = z * f64::ln(z) - z + 1.0;
            assert_relative_eq!(lambda_b_series(z - 1.0), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn power_family_values() {
        assert_abs_diff_eq!(f_p(3.0, 2.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f_p(4.0, 0.5).unwrap(), 2.0, epsilon = 1e-14);
        for z in [0.0, 0.3, 1.0, 1.05, 2.0, 7.5] {
            assert_eq!(f_p(z, 1.0).unwrap(), lambda_b(z).unwrap());
            assert_abs_diff_eq!(f_p(z, 0.5).unwrap(), 2.0 * (z.sqrt() - 1.0).powi(2), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(f_p(2.0, 0.0).unwrap(), 2.0 - 2f64.ln() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_p(0.0, 3.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(f_p(0.0, 0.0).is_err());
        assert!(f_p(0.0, -1.0).is_err());
        assert!(f_p(-1.0, 2.0).is_err());
        // series branches match the closed forms just inside the radius
        for p in [-1.5, 0.0, 0.25, 0.5, 2.0, 3.7, 10.0] {
            for z in [0.905, 0.95, 1.02, 1.095] {
                let direct = if p == 0.0 {
                    z - f64::ln(z) - 1.0
                } else {
                    (z.powf(p) - p * z + p - 1.0) / (p * (p - 1.0))
                };
                assert_relative_eq!(f_p(z, p).unwrap(), direct, max_relative = 1e-10);
            }
        }
    }

    fn grid_sup(zeta: f64, p: f64) -> f64 {
        // independent oracle: brute-force sup on a fine z grid
        let mut best = f64::NEG_INFINITY;
        for j in 0..=400_000 {
            let z = j as f64 * 1e-4;
            best = best.max(zeta * z - f_p(z, p).unwrap());
        }
        best
    }

    #[test]
    fn conjugate_values() {
        assert_abs_diff_eq!(f_p_conjugate(1.0, 0.5).unwrap(), 2.0, epsilon = 1e-15);
        for p in [0.25, 0.5, 1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(f_p_conjugate(0.0, p).unwrap(), 0.0, epsilon = 1e-15);
        }
        let z = std::f64::consts::FRAC_1_SQRT_2;
        let v = f_p_conjugate(z, 0.5).unwrap();
        assert_abs_diff_eq!(v, 2.0 * z / (2.0 - z), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 1.0938363213560542, epsilon = 1e-12);
        assert_abs_diff_eq!(v, grid_sup(z, 0.5), epsilon = 1e-6);
        for (zeta, p) in [(0.7, 0.25), (-1.3, 2.0), (0.4, 3.0), (-0.2, 0.75), (0.9, 1.0)] {
            assert_abs_diff_eq!(f_p_conjugate(zeta, p).unwrap(), grid_sup(zeta, p), epsilon = 1e-6);
        }
        assert_abs_diff_eq!(f_p_conjugate(-5.0, 2.0).unwrap(), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f_p_conjugate(0.5, 0.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(f_p_conjugate(2.0, 0.5).is_err());
        assert!(f_p_conjugate(4.0, 0.75).is_err());
        assert!(f_p_conjugate(1.0, 0.0).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(2.5, 2.5), 0.0);
        assert_eq!(gamma_fn(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(gamma_fn(E, 1.0), E - 1.0, epsilon = 1e-15);
        assert_eq!(gamma_fn(0.0, 1.0), f64::INFINITY);
        assert_eq!(gamma_fn(1.0, 0.0), f64::INFINITY);
        assert!(gamma_fn(-1.0, 1.0).is_nan());
        assert_relative_eq!(gamma_fn(1.0 + 1e-9, 1.0), 1e-18, max_relative = 1e-6);
    }

    #[test]
    fn entropy_functionals_on_flat_profile() {
        let prof = flat_profile(1.0, 1.0, 1.0, 101);
        let g = prof.grid.clone();
        let st = State::new(&g, vec![E; 101], vec![1.0; 101], 0.0).unwrap();
        assert_abs_diff_eq!(relative_entropy(&st, &prof, 1.0).unwrap(), 2.0, epsilon = 1e-13);
        let same = State::from_profile(&prof, 0.0);
        assert_eq!(relative_entropy(&same, &prof, 1.0).unwrap(), 0.0);
        assert_eq!(hellinger_sq(&same, &prof).unwrap(), 0.0);
        let st = State::new(&g, vec![4.0; 101], vec![1.0; 101], 0.0).unwrap();
        assert_abs_diff_eq!(hellinger_sq(&st, &prof).unwrap(), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn reactive_values() {
        let prof = flat_profile(2.0, 1.0, 1.0, 101);
        let dens = RelativeDensities {
            rho: vec![2.0; 101],
            zeta: vec![1.0; 101],
        };
        let d = reactive_dissipation(&dens, &prof, 1.0).unwrap();
        assert_abs_diff_eq!(d, 2.0 * 3.0 * 4f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(d, 8.317766166719343, epsilon = 1e-12);
        assert!(matches!(
            reactive_dissipation(&dens, &prof, 0.5),
            Err(Error::UnsupportedEntropy { .. })
        ));
        // rho^alpha = zeta^beta nodewise
        let on = RelativeDensities {
            rho: vec![1.3; 101],
            zeta: vec![1.69; 101],
        };
        assert_abs_diff_eq!(reactive_dissipation(&on, &prof, 1.0).unwrap(), 0.0, epsilon = 1e-13);
        let eq = flat_profile(2.0, 2.0, 1.0, 101);
        let same = RelativeDensities {
            rho: vec![1.7; 101],
            zeta: vec![1.7; 101],
        };
        for p in [0.5, 1.0, 2.0] {
            assert_eq!(reactive_dissipation(&same, &eq, p).unwrap(), 0.0);
        }
    }

    fn profile_with_lambda() -> ProfileSolution {
        let data = ProblemData::new(2.0, 2.0, 1.0, 3.0, 1.0, 1.0, 2.0).unwrap();
        closed_form_profile(&data, &Grid::new(8.0, 801).unwrap()).unwrap()
    }

    #[test]
    fn mixed_term_zeroes() {
        let prof = profile_with_lambda();
        let n = prof.grid.len();
        let ones = RelativeDensities {
            rho: vec![1.0; n],
            zeta: vec![1.0; n],
        };
        assert_eq!(mixed_term(&ones, &prof, 1.0).unwrap(), 0.0);
        let bump: Vec<f64> = prof.grid.sample(|y| 1.0 + 0.3 * (-y * y).exp());
        let same = RelativeDensities {
            rho: bump.clone(),
            zeta: bump.clone(),
        };
        for p in [0.5, 1.0, 3.0] {
            assert_eq!(mixed_term(&same, &prof, p).unwrap(), 0.0);
        }
        let flat = flat_profile(1.0, 1.0, 8.0, n);
        let dens = RelativeDensities {
            rho: bump,
            zeta: vec![1.0; n],
        };
        assert_eq!(mixed_term(&dens, &flat, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn split_adds_up_and_rho_part_vanishes() {
        let data = ProblemData::new(2.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.3).unwrap();
        let g = Grid::new(8.0, 401).unwrap();
        let prof = solve_profile(&data, &g, 1e-9).unwrap();
        let dens = RelativeDensities {
            rho: g.sample(|y| 1.0 + 0.2 * (-(y - 0.5).powi(2)).exp()),
            zeta: g.sample(|y| 1.0 - 0.1 * (-(y + 1.0).powi(2)).exp()),
        };
        let (i1, i2) = split_mixed_term(&dens, &prof).unwrap();
        let m = mixed_term(&dens, &prof, 1.0).unwrap();
        assert_relative_eq!(i1 + i2, m, max_relative = 1e-12);
        let scale = prof.lambda.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        for r in split_rho_part(&dens, &prof).unwrap() {
            assert!(r.abs() <= 1e-14 * scale.max(1.0));
        }
        let ones = RelativeDensities {
            rho: vec![1.0; 401],
            zeta: vec![1.0; 401],
        };
        assert_eq!(split_mixed_term(&ones, &prof).unwrap(), (0.0, 0.0));
        assert!(split_mixed_term(&ones, &flat_profile(2.0, 2.0, 8.0, 401)).is_err());
    }

    #[test]
    fn fisher_against_analytic_integrand() {
        let prof = flat_profile(1.0, 1.0, 8.0, 4001);
        let g = prof.grid.clone();
        let dens = RelativeDensities {
            rho: g.sample(|y| 1.0 + 0.1 * (-y * y).exp()),
            zeta: vec![1.0; 4001],
        };
        let num = fisher_information(&dens, &prof, 1.0).unwrap();
        let exact = g.integrate(&g.sample(|y| {
            let r = 1.0 + 0.1 * (-y * y).exp();
            let ry = -0.2 * y * (-y * y).exp();
            ry * ry / r
        }))
        .unwrap();
        assert_abs_diff_eq!(num, exact, epsilon = 1e-8);

        let mut data = prof.data;
        data.d1 = 2.0;
        let doubled = ProfileSolution { data, ..prof.clone() };
        assert_relative_eq!(fisher_information(&dens, &doubled, 1.0).unwrap(), 2.0 * num, max_relative = 1e-14);

        let ones = RelativeDensities {
            rho: vec![1.0; 4001],
            zeta: vec![1.0; 4001],
        };
        assert_eq!(fisher_information(&ones, &prof, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_entropy_converges_under_refinement() {
        let data = ProblemData::new(1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 2.0).unwrap();
        let value = |n: usize| {
            let g = Grid::new(8.0, n).unwrap();
            let prof = closed_form_profile(&data, &g).unwrap();
            let bump = g.sample(|y| 1.0 + 0.1 * (-y * y).exp());
            let u = prof.u.iter().zip(&bump).map(|(a, b)| a * b).collect();
            let st = State::new(&g, u, prof.v.clone(), 0.0).unwrap();
            relative_entropy(&st, &prof, 1.0).unwrap()
        };
        let coarse = value(2001);
        let fine = value(16001);
        assert!(coarse > 0.0);
        assert_relative_eq!(coarse, fine, max_relative = 1e-6);
    }

    #[test]
    fn hellinger_is_half_of_e_half() {
        let prof = profile_with_lambda();
        let g = prof.grid.clone();
        let u = prof.u.iter().zip(g.nodes()).map(|(a, y)| a * (1.0 + 0.4 * (-y * y).exp())).collect();
        let v = prof.v.iter().zip(g.nodes()).map(|(a, y)| a * (1.0 - 0.3 * (-(y - 1.0).powi(2)).exp())).collect();
        let st = State::new(&g, u, v, 0.0).unwrap();
        let h = hellinger_sq(&st, &prof).unwrap();
        assert_relative_eq!(h, 0.5 * relative_entropy(&st, &prof, 0.5).unwrap(), max_relative = 1e-10);
    }

    #[test]
    fn record_assembly() {
        let prof = profile_with_lambda();
        let g = prof.grid.clone();
        let u = prof.u.iter().zip(g.nodes()).map(|(a, y)| a * (1.0 + 0.2 * (-y * y).exp())).collect();
        let st = State::new(&g, u, prof.v.clone(), 0.7).unwrap();
        let dens = RelativeDensities::new(&st, &prof).unwrap();
        let rec = dissipation_total(&dens, &st, &prof, &[0.5, 2.0]).unwrap();
        assert_eq!(rec.e_p.len(), 2);
        assert!(rec.e_b >= 0.0 && rec.i_fisher >= 0.0 && rec.d_react >= 0.0 && rec.hellinger_sq >= 0.0);
        assert_eq!(rec.d_b_total, rec.i_fisher + 0.5 * rec.e_b - rec.i_lambda + 0.7f64.exp() * rec.d_react);
        assert!(rec.i_lambda_1.is_nan() && rec.dissipation_residual.is_nan());
        let dp = dissipation_p(&dens, &st, &prof, 1.0).unwrap();
        assert_relative_eq!(dp, rec.d_b_total, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn generators_are_nonnegative_and_vanish_at_one(z in 1e-6f64..50.0, p in -2.0f64..4.0) {
            let v = f_p(z, p).unwrap();
            prop_assert!(v >= -1e-15);
            prop_assert!(f_p(1.0, p).unwrap().abs() < 1e-15);
        }

        #[test]
        fn fenchel_young(z in 1e-3f64..20.0, zeta in -3.0f64..1.0, p in 0.1f64..3.0) {
            // zeta * z <= F_p(z) + F_p^*(zeta), inside the conjugate's domain
            if let Ok(c) = f_p_conjugate(zeta, p) {
                prop_assert!(zeta * z <= f_p(z, p).unwrap() + c + 1e-9 * (1.0 + z));
            }
        }

        #[test]
        fn gamma_is_symmetric_nonnegative(a in 1e-6f64..1e3, b in 1e-6f64..1e3) {
            let g = gamma_fn(a, b);
            prop_assert!(g >= 0.0);
            prop_assert!((g - gamma_fn(b, a)).abs() <= 1e-12 * g.max(1.0));
        }
    }
}
