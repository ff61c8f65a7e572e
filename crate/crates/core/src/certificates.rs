//! Explicit decay constants computed from a profile, the rate certificates
//! they feed, the Grönwall envelope and the check of measured entropy curves
//! against it.

use crate::conjugate::{c_tilde, m_hat};
use crate::entropy::f_p_conjugate;
use crate::error::{domain, Error, Result};
use crate::profile::{ProblemData, ProfileSolution};
use serde::{Deserialize, Serialize};

/// All constants of the decay estimates. `None` marks constants whose
/// regime does not match the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    /// `(2/α²)^{1/(α−1)} (α−1)/α`
    pub c_tilde_alpha: Option<f64>,
    /// `‖Λ/U‖_∞`
    pub lambda_star: f64,
    /// `(λ*)² e^{λ*/k} / (2k)`, `α = β = 1`
    pub mu0: Option<f64>,
    /// `e^{λ*/k}/k ∫ α²Λ²/U`, `α = β = 1`
    #[serde(rename = "K0")]
    pub k0: Option<f64>,
    /// `‖α²Λ²/U^{3−α}‖_∞ / k`, `1 < α < 2`
    pub mu1: Option<f64>,
    /// `∫ α²Λ²/(kU^{2−α}) + c̃_α k^{−1/(α−1)} |αΛ/U|^{α/(α−1)}`, `1 < α < 2`
    #[serde(rename = "K1")]
    pub k1: Option<f64>,
    /// `c̃_α k^{−1/(α−1)} ∫ |αΛ/U|^{α/(α−1)}`, `α ≥ 2`
    #[serde(rename = "K2")]
    pub k2: Option<f64>,
    /// `(α−β) ‖Λ/V‖_∞`
    pub theta: f64,
    /// `√(1+p−α)`, power entropies with `α = β`
    pub kappa: Option<f64>,
    pub m_hat: Option<f64>,
    pub mu_tilde: Option<f64>,
    #[serde(rename = "K_tilde")]
    pub k_tilde: Option<f64>,
    /// `‖Λ/U‖²_∞ / (k √8)`, `α = β = 1`
    pub mu_tilde_star: Option<f64>,
    /// `(11+√2)/(14k) ∫ Λ²/U`, `α = β = 1`
    #[serde(rename = "K_tilde_star")]
    pub k_tilde_star: Option<f64>,
    /// `|Λ(−L)|`, `|Λ(L)|`
    pub lambda_tails: (f64, f64),
}

fn sup_nodes(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).fold(0.0, f64::max)
}

/// Every constant that applies to `(α, β, p)`.
///
/// `p = 1` always works. Other `p` need `α = β` and `0 < p ≤ max(α/2, α−1)`;
/// the power-entropy constants are filled in when also `p ≥ α − 1`.
pub fn compute_constants(profile: &ProfileSolution, p: f64) -> Result<ConstantsReport> {
    let d = &profile.data;
    let (a, b, k) = (d.alpha, d.beta, d.k);
    let g = &profile.grid;
    let n = g.len();
    let (u, v, lam) = (&profile.u, &profile.v, &profile.lambda);
    if !p.is_finite() || p <= 0.0 {
        return domain(format!("p must be positive, got {p}"));
    }
    if p != 1.0 {
        if a != b {
            return Err(Error::UnsupportedEntropy { p });
        }
        let upper = (a / 2.0).max(a - 1.0);
        if p > upper * (1.0 + 1e-12) {
            return domain(format!(
                "p = {p} is outside (0, max(alpha/2, alpha-1)] = (0, {upper}]"
            ));
        }
    }

    let lambda_star = sup_nodes(n, |i| (lam[i] / u[i]).abs());
    let theta = (a - b) * sup_nodes(n, |i| (lam[i] / v[i]).abs());
    let c_t = if a > 1.0 { Some(c_tilde(a)?) } else { None };
    let power_integral = |c: f64| {
        let e = a / (a - 1.0);
        c / k.powf(1.0 / (a - 1.0)) * g.integrate_with(|i| (a * lam[i] / u[i]).abs().powf(e))
    };

    let (mut mu0, mut k0, mut mu1, mut k1, mut k2) = (None, None, None, None, None);
    if a == 1.0 {
        let ex = (lambda_star / k).exp();
        mu0 = Some(lambda_star * lambda_star * ex / (2.0 * k));
        k0 = Some(ex / k * g.integrate_with(|i| a * a * lam[i] * lam[i] / u[i]));
    } else if a < 2.0 {
        let c = c_t.expect("alpha > 1");
        mu1 = Some(sup_nodes(n, |i| a * a * lam[i] * lam[i] / u[i].powf(3.0 - a)) / k);
        k1 = Some(
            g.integrate_with(|i| a * a * lam[i] * lam[i] / (k * u[i].powf(2.0 - a))) + power_integral(c),
        );
    } else {
        k2 = Some(power_integral(c_t.expect("alpha > 1")));
    }

    let (mut kappa, mut mh, mut mu_tilde, mut k_tilde) = (None, None, None, None);
    if a == b && p >= a - 1.0 && p <= (a / 2.0).max(a - 1.0) * (1.0 + 1e-12) {
        let kap = (1.0 + p - a).max(0.0).sqrt();
        let int_lu = g.integrate_with(|i| lam[i] * lam[i] / u[i].powf(a));
        if a >= 2.0 {
            mu_tilde = Some(0.0);
            k_tilde = Some(int_lu / (4.0 * k));
            mh = Some(0.25);
        } else {
            let m = m_hat(p, a)?;
            mu_tilde = Some(kap / k * m * sup_nodes(n, |i| lam[i] * lam[i] / u[i].powf(a + 1.0)));
            k_tilde = Some(m / k * (kap * f_p_conjugate(kap, p)? + 1.0) * int_lu);
            mh = Some(m);
        }
        kappa = Some(kap);
    }

    let (mut mu_tilde_star, mut k_tilde_star) = (None, None);
    if a == 1.0 && b == 1.0 {
        mu_tilde_star = Some(lambda_star * lambda_star / (k * 8f64.sqrt()));
        k_tilde_star =
            Some((11.0 + 2f64.sqrt()) / (14.0 * k) * g.integrate_with(|i| lam[i] * lam[i] / u[i]));
    }

    Ok(ConstantsReport {
        alpha: a,
        beta: b,
        p,
        c_tilde_alpha: c_t,
        lambda_star,
        mu0,
        k0,
        mu1,
        k1,
        k2,
        theta,
        kappa,
        m_hat: mh,
        mu_tilde,
        k_tilde,
        mu_tilde_star,
        k_tilde_star,
        lambda_tails: profile.lambda_tails(),
    })
}

/// Constants `(η, μ, K, γ)` of `Ė ≤ −(η − μe^{−τ})E + K e^{−γτ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate {
    pub eta: f64,
    pub mu: f64,
    #[serde(rename = "K")]
    pub forcing: f64,
    pub gamma: f64,
    /// Entropy the certificate applies to (`1` is Boltzmann).
    pub p: f64,
    pub regime_tag: String,
}

impl RateCertificate {
    pub fn new(eta: f64, mu: f64, forcing: f64, gamma: f64, p: f64, regime_tag: impl Into<String>) -> Result<Self> {
        if !(eta > 0.0 && gamma > 0.0 && mu >= 0.0 && forcing >= 0.0) {
            return domain(format!(
                "certificate needs eta, gamma > 0 and mu, K >= 0; got eta = {eta}, mu = {mu}, K = {forcing}, gamma = {gamma}"
            ));
        }
        Ok(Self {
            eta,
            mu,
            forcing,
            gamma,
            p,
            regime_tag: regime_tag.into(),
        })
    }

    /// Effective rate `min(η, γ)`.
    pub fn sigma(&self) -> f64 {
        self.eta.min(self.gamma)
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::UnsupportedRegime(format!("{name} is not available for this problem")))
}

/// Picks the certificate matching `(α, β, d1, d2, p)`.
pub fn select_certificate(report: &ConstantsReport, data: &ProblemData, p: f64) -> Result<RateCertificate> {
    let (a, b) = (data.alpha, data.beta);
    if p == 1.0 {
        if a == b {
            if data.d1 == data.d2 {
                return RateCertificate::new(0.5, 0.0, 0.0, 1.0, 1.0, "equal diffusivities: pure exponential decay");
            }
            if a == 1.0 {
                return RateCertificate::new(0.5, need(report.mu0, "mu0")?, need(report.k0, "K0")?, 1.0, 1.0, "alpha = beta = 1, Boltzmann entropy");
            }
            if a < 2.0 {
                return RateCertificate::new(0.5, need(report.mu1, "mu1")?, need(report.k1, "K1")?, 1.0, 1.0, "1 < alpha = beta < 2, Boltzmann entropy");
            }
            return RateCertificate::new(0.5, 0.0, need(report.k2, "K2")?, 1.0 / (a - 1.0), 1.0, "alpha = beta >= 2, Boltzmann entropy");
        }
        if a < b {
            return Err(Error::UnsupportedRegime("alpha < beta; relabel the species first".into()));
        }
        if report.theta >= 0.5 {
            return Err(Error::ThetaTooLarge { theta: report.theta });
        }
        let eta = 0.5 - report.theta;
        if a < 2.0 {
            return RateCertificate::new(eta, need(report.mu1, "mu1")?, need(report.k1, "K1")?, 1.0, 1.0, "1 < alpha < 2, alpha > beta, Boltzmann entropy");
        }
        return RateCertificate::new(eta, 0.0, need(report.k2, "K2")?, 1.0 / (a - 1.0), 1.0, "alpha >= 2, alpha > beta, Boltzmann entropy");
    }
    if a != b {
        return Err(Error::UnsupportedEntropy { p });
    }
    if report.p != p {
        return domain(format!("report was computed for p = {}, not p = {p}", report.p));
    }
    if a == 1.0 && p == 0.5 {
        let mu_star = need(report.mu_tilde_star, "mu_tilde_star")?;
        if mu_star >= 0.5 {
            return Err(Error::UnsupportedRegime(format!(
                "mu_tilde_star = {mu_star} >= 1/2 leaves no decay rate"
            )));
        }
        return RateCertificate::new(0.5 - mu_star, 0.0, need(report.k_tilde_star, "K_tilde_star")?, 1.0, p, "alpha = beta = 1, Hellinger entropy p = 1/2");
    }
    RateCertificate::new(0.5, need(report.mu_tilde, "mu_tilde")?, need(report.k_tilde, "K_tilde")?, 1.0, p, format!("alpha = beta, power entropy p = {p}"))
}

/// All certificates that apply, keyed by entropy; failures are kept so
/// callers can report them.
pub fn candidate_certificates(
    profile: &ProfileSolution,
    p_values: &[f64],
) -> Vec<(f64, Result<RateCertificate>)> {
    let mut ps = vec![1.0];
    ps.extend(p_values.iter().copied().filter(|p| *p != 1.0));
    ps.into_iter()
        .map(|p| {
            let cert = compute_constants(profile, p).and_then(|r| select_certificate(&r, &profile.data, p));
            (p, cert)
        })
        .collect()
}

/// `∫₀^τ e^{xs} ds`.
fn exp_integral(x: f64, tau: f64) -> f64 {
    let t = x * tau;
    if t.abs() < 1e-12 {
        tau * (1.0 + 0.5 * t)
    } else {
        t.exp_m1() / x
    }
}

/// Upper bound on `E(τ)` for any `E` obeying the certificate's inequality.
pub fn gronwall_envelope(cert: &RateCertificate, e0: f64, tau: f64) -> f64 {
    let (eta, gamma, mu, k) = (cert.eta, cert.gamma, cert.mu, cert.forcing);
    let exact = (-eta * tau + mu).exp() * (e0 + k * exp_integral(eta - gamma, tau));
    let simple = if eta == gamma {
        (-eta * tau + mu).exp() * (e0 + k * tau)
    } else {
        (-eta.min(gamma) * tau + mu).exp() * (e0 + 2.0 * k / (eta - gamma).abs())
    };
    exact.min(simple)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationVerdict {
    pub pass: bool,
    /// `min_i ((1+slack) envelope_i − E_i)`
    pub worst_margin: f64,
    /// `max_i E_i / envelope_i`
    pub worst_ratio: f64,
    /// Least-squares slope of `log E` on the late window.
    pub fitted_slope: f64,
    pub samples: usize,
    pub violations: usize,
    pub first_violation_tau: Option<f64>,
    pub slack: f64,
    pub certificate: RateCertificate,
}

/// Least-squares slope of `log E` over `τ ∈ [t0 + f (t_end − t0), t_end]`.
pub fn fitted_log_slope(curve: &[(f64, f64)], window_start_fraction: f64) -> f64 {
    if curve.is_empty() {
        return f64::NAN;
    }
    let t0 = curve[0].0;
    let t_end = curve[curve.len() - 1].0;
    let start = t0 + window_start_fraction * (t_end - t0);
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(t, e)| *t >= start && *e > 0.0 && e.is_finite())
        .map(|&(t, e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// Checks `E(τ_i) ≤ (1+slack) envelope(E(τ_0), τ_i − τ_0)` at every sample.
pub fn verify_decay(curve: &[(f64, f64)], cert: &RateCertificate, slack: f64) -> Result<VerificationVerdict> {
    verify_decay_window(curve, cert, slack, 0.5)
}

pub fn verify_decay_window(
    curve: &[(f64, f64)],
    cert: &RateCertificate,
    slack: f64,
    window_start_fraction: f64,
) -> Result<VerificationVerdict> {
    if curve.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let (t0, e0) = curve[0];
    let mut worst_margin = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut first_violation_tau = None;
    for &(t, e) in curve {
        let env = gronwall_envelope(cert, e0, t - t0);
        let margin = (1.0 + slack) * env - e;
        worst_margin = worst_margin.min(margin);
        let ratio = if env > 0.0 {
            e / env
        } else if e > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst_ratio = worst_ratio.max(ratio);
        // NaN samples count as violations
        if !(margin >= 0.0) {
            violations += 1;
            first_violation_tau.get_or_insert(t);
        }
    }
    Ok(VerificationVerdict {
        pass: violations == 0,
        worst_margin,
        worst_ratio,
        fitted_slope: fitted_log_slope(curve, window_start_fraction),
        samples: curve.len(),
        violations,
        first_violation_tau,
        slack,
        certificate: cert.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::Grid;
    use crate::profile::{closed_form_profile, solve_profile};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(a: f64, b: f64, d1: f64, d2: f64, am: f64, ap: f64) -> ProblemData {
        ProblemData::new(a, b, d1, d2, 1.0, am, ap).unwrap()
    }

    #[test]
    fn flat_profile_gives_zero_constants() {
        let g = Grid::new(8.0, 201).unwrap();
        for (a, b) in [(1.0, 1.0), (1.5, 1.5), (2.0, 1.0), (3.0, 3.0)] {
            let prof = solve_profile(&data(a, b, 1.0, 2.0, 1.3, 1.3), &g, 1e-10).unwrap();
            let r = compute_constants(&prof, 1.0).unwrap();
            assert_eq!(r.lambda_star, 0.0);
            assert_eq!(r.theta, 0.0);
            for c in [r.mu0, r.k0, r.mu1, r.k1, r.k2, r.mu_tilde, r.k_tilde, r.mu_tilde_star, r.k_tilde_star]
                .into_iter()
                .flatten()
            {
                assert_eq!(c, 0.0);
            }
        }
    }

    #[test]
    fn k2_is_resolution_independent() {
        let d = data(2.0, 2.0, 1.0, 3.0, 1.0, 2.0);
        let k2 = |n| {
            let prof = closed_form_profile(&d, &Grid::new(8.0, n).unwrap()).unwrap();
            compute_constants(&prof, 1.0).unwrap()
        };
        let (coarse, fine) = (k2(2001), k2(4001));
        assert_abs_diff_eq!(coarse.c_tilde_alpha.unwrap(), 0.25, epsilon = 1e-15);
        assert!(coarse.k2.unwrap() > 0.0);
        assert_relative_eq!(coarse.k2.unwrap(), fine.k2.unwrap(), max_relative = 1e-6);
        assert!(coarse.mu1.is_none() && coarse.k0.is_none());
    }

    #[test]
    fn constants_grow_with_lambda() {
        let g = Grid::new(8.0, 801).unwrap();
        for (a, b) in [(1.0, 1.0), (1.5, 1.5), (3.0, 3.0), (2.0, 1.0)] {
            let prof = solve_profile(&data(a, b, 1.0, 2.0, 1.0, 1.2), &g, 1e-9).unwrap();
            let base = compute_constants(&prof, 1.0).unwrap();
            let mut scaled = prof.clone();
            scaled.lambda.iter_mut().for_each(|l| *l *= 1.5);
            let big = compute_constants(&scaled, 1.0).unwrap();
            for (x, y) in [(base.k0, big.k0), (base.k1, big.k1), (base.k2, big.k2)] {
                if let (Some(x), Some(y)) = (x, y) {
                    assert!(y >= x);
                }
            }
            assert!(big.theta >= base.theta);
        }
    }

    #[test]
    fn power_entropy_constants() {
        let g = Grid::new(8.0, 801).unwrap();
        let prof = closed_form_profile(&data(1.0, 1.0, 1.0, 3.0, 1.0, 2.0), &g).unwrap();
        let r = compute_constants(&prof, 0.5).unwrap();
        // the general formula at alpha = 1, p = 1/2 reduces to the alpha = 1 constants
        assert_relative_eq!(r.mu_tilde.unwrap(), r.mu_tilde_star.unwrap(), max_relative = 1e-6);
        assert_relative_eq!(r.k_tilde.unwrap(), r.k_tilde_star.unwrap(), max_relative = 1e-6);
        assert_abs_diff_eq!(r.kappa.unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(compute_constants(&prof, 0.7).is_err());

        let prof = closed_form_profile(&data(3.0, 3.0, 1.0, 3.0, 1.0, 1.3), &g).unwrap();
        let r = compute_constants(&prof, 2.0).unwrap();
        assert_eq!(r.mu_tilde, Some(0.0));
        let direct = prof.grid.integrate_with(|i| prof.lambda[i].powi(2) / prof.u[i].powi(3)) / 4.0;
        assert_relative_eq!(r.k_tilde.unwrap(), direct, max_relative = 1e-14);
        // in range for the quadratic bound but below alpha - 1
        let r = compute_constants(&prof, 1.5).unwrap();
        assert!(r.k_tilde.is_none());

        let prof = solve_profile(&data(2.0, 1.0, 1.0, 2.0, 1.0, 1.1), &g, 1e-9).unwrap();
        assert!(matches!(compute_constants(&prof, 0.5), Err(Error::UnsupportedEntropy { .. })));
    }

    #[test]
    fn certificate_selection() {
        let g = Grid::new(8.0, 401).unwrap();
        let d = data(2.0, 2.0, 1.5, 1.5, 1.0, 3.0);
        let r = compute_constants(&closed_form_profile(&d, &g).unwrap(), 1.0).unwrap();
        let c = select_certificate(&r, &d, 1.0).unwrap();
        assert_eq!((c.eta, c.mu, c.forcing), (0.5, 0.0, 0.0));

        let d = data(4.0, 4.0, 1.0, 3.0, 1.0, 1.2);
        let r = compute_constants(&closed_form_profile(&d, &g).unwrap(), 1.0).unwrap();
        let c = select_certificate(&r, &d, 1.0).unwrap();
        assert_abs_diff_eq!(c.gamma, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(c.forcing, r.k2.unwrap());

        let d = data(1.0, 1.0, 1.0, 3.0, 1.0, 1.2);
        let r = compute_constants(&closed_form_profile(&d, &g).unwrap(), 1.0).unwrap();
        let c = select_certificate(&r, &d, 1.0).unwrap();
        assert_eq!((c.mu, c.forcing, c.gamma), (r.mu0.unwrap(), r.k0.unwrap(), 1.0));

        let d = data(1.5, 1.5, 1.0, 3.0, 1.0, 1.2);
        let r = compute_constants(&closed_form_profile(&d, &g).unwrap(), 1.0).unwrap();
        let c = select_certificate(&r, &d, 1.0).unwrap();
        assert_eq!((c.mu, c.forcing), (r.mu1.unwrap(), r.k1.unwrap()));

        let d = data(2.0, 1.0, 1.0, 2.0, 1.0, 1.2);
        let mut r = compute_constants(&solve_profile(&d, &g, 1e-9).unwrap(), 1.0).unwrap();
        r.theta = 0.1;
        let c = select_certificate(&r, &d, 1.0).unwrap();
        assert_abs_diff_eq!(c.eta, 0.4, epsilon = 1e-15);
        assert_eq!(c.gamma, 1.0);
        r.theta = 0.5;
        assert!(matches!(select_certificate(&r, &d, 1.0), Err(Error::ThetaTooLarge { .. })));
        assert!(matches!(select_certificate(&r, &d, 2.0), Err(Error::UnsupportedEntropy { .. })));
    }

    #[test]
    fn equal_diffusivities_never_need_forcing() {
        let g = Grid::new(10.0, 401).unwrap();
        for (a, am, ap) in [(1.0, 1.0, 5.0), (2.0, 0.3, 2.0), (3.5, 2.0, 1.0)] {
            let d = data(a, a, 0.7, 0.7, am, ap);
            let r = compute_constants(&closed_form_profile(&d, &g).unwrap(), 1.0).unwrap();
            let c = select_certificate(&r, &d, 1.0).unwrap();
            assert_eq!((c.mu, c.forcing), (0.0, 0.0));
        }
    }

    #[test]
    fn envelope_examples() {
        let c = RateCertificate::new(0.5, 0.0, 0.0, 1.0, 1.0, "t").unwrap();
        assert_relative_eq!(gronwall_envelope(&c, 2.0, 3.0), 2.0 * (-1.5f64).exp(), max_relative = 1e-15);
        let c = RateCertificate::new(0.5, 0.0, 1.0, 0.5, 1.0, "t").unwrap();
        assert_abs_diff_eq!(gronwall_envelope(&c, 1.0, 2.0), 3.0 * (-1.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(gronwall_envelope(&c, 1.0, 2.0), 1.103_638_323_514_327, epsilon = 1e-12);

        let c = RateCertificate::new(0.5, 0.3, 2.0, 1.0, 1.0, "t").unwrap();
        let tau: f64 = 3.0;
        // trapezoid evaluation of R(tau) = K int_0^tau e^{(eta-gamma)s} ds
        let m = 100_000;
        let h = tau / m as f64;
        let r: f64 = h * (0..=m)
            .map(|j| {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                w * (-0.5 * j as f64 * h).exp()
            })
            .sum::<f64>();
        let integral_form = (-0.5 * tau + 0.3).exp() * (1.0 + 2.0 * r);
        let simplified = (-0.5 * tau + 0.3).exp() * (1.0 + 2.0 * 2.0 / 0.5);
        let env = gronwall_envelope(&c, 1.0, tau);
        assert_relative_eq!(env, integral_form, max_relative = 1e-9);
        assert!(env <= simplified);
    }

    #[test]
    fn verdicts() {
        let c = RateCertificate::new(0.5, 0.2, 0.3, 1.0, 1.0, "t").unwrap();
        let on_env: Vec<(f64, f64)> = (0..=50)
            .map(|j| {
                let t = 0.1 * j as f64;
                (t, if j == 0 { 1.0 } else { gronwall_envelope(&c, 1.0, t) })
            })
            .collect();
        assert!(verify_decay(&on_env, &c, 0.0).unwrap().pass);
        let doubled: Vec<(f64, f64)> = on_env.iter().map(|&(t, e)| (t, if t > 0.0 { 2.0 * e } else { e })).collect();
        let v = verify_decay(&doubled, &c, 0.5).unwrap();
        assert!(!v.pass);
        assert_eq!(v.first_violation_tau, Some(0.1));
        assert!(matches!(verify_decay(&[], &c, 0.0), Err(Error::EmptyCurve)));

        let pure: Vec<(f64, f64)> = (0..=40).map(|j| (0.25 * j as f64, 3.0 * (-0.7 * 0.25 * j as f64).exp())).collect();
        assert_abs_diff_eq!(fitted_log_slope(&pure, 0.5), -0.7, epsilon = 1e-12);
    }

    /// Classical RK4 on the equality ODE.
    fn integrate_equality(c: &RateCertificate, e0: f64, t_end: f64, steps: usize) -> Vec<(f64, f64)> {
        let f = |t: f64, e: f64| -(c.eta - c.mu * (-t).exp()) * e + c.forcing * (-c.gamma * t).exp();
        let h = t_end / steps as f64;
        let mut out = vec![(0.0, e0)];
        let mut e = e0;
        for j in 0..steps {
            let t = j as f64 * h;
            let k1 = f(t, e);
            let k2 = f(t + 0.5 * h, e + 0.5 * h * k1);
            let k3 = f(t + 0.5 * h, e + 0.5 * h * k2);
            let k4 = f(t + h, e + h * k3);
            e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            out.push((t + h, e));
        }
        out
    }

    #[test]
    fn envelope_dominates_equality_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for j in 0..12 {
            let eta = rng.gen_range(0.1..1.0);
            let gamma = match j % 3 {
                0 => eta,
                1 => eta * rng.gen_range(1.2..3.0),
                _ => eta * rng.gen_range(0.2..0.8),
            };
            let c = RateCertificate::new(eta, rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0), gamma, 1.0, "t").unwrap();
            let e0 = rng.gen_range(0.01..5.0);
            for (t, e) in integrate_equality(&c, e0, 10.0, 4000) {
                let env = gronwall_envelope(&c, e0, t);
                assert!(e <= env + 1e-8 * env.max(1.0), "{c:?} t={t}: {e} > {env}");
            }
        }
    }
}
