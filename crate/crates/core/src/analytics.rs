//! Closed-form covertness, reliability and spatial-throughput expressions.
//!
//! Every bound is evaluated in its leading-order form: the O(y^{-2δ})
//! correction of the CCDF expansion is dropped. Values that say nothing (a
//! probability bound above 1 or an error bound below 0) are returned as they
//! are, with `vacuous` set, so that sweeps show where a bound stops being
//! informative.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};

/// An evaluated closed-form bound together with the inputs that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub value: f64,
    pub vacuous: bool,
}

impl BoundReport {
    fn probability(name: &'static str, inputs: Vec<(&'static str, f64)>, value: f64) -> Self {
        BoundReport {
            name,
            inputs,
            value,
            vacuous: !(0.0..=1.0).contains(&value),
        }
    }

    pub fn input(&self, key: &str) -> Option<f64> {
        self.inputs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

/// Γ(1+δ)Γ(1−δ) = πδ / sin(πδ) (reflection formula).
pub fn gamma_product(delta: f64) -> f64 {
    PI * delta / (PI * delta).sin()
}

/// κ = π²δ/sin(πδ)·d², the Exp(1)-fading constant of the CCDF expansion.
pub fn kappa(delta: f64, d: f64) -> f64 {
    PI * gamma_product(delta) * d * d
}

/// κ = π·E[Ψ^δ]·E[Ψ^{−δ}]·d² for other fading laws.
pub fn kappa_general(e_psi_delta: f64, e_psi_neg_delta: f64, d: f64) -> f64 {
    PI * e_psi_delta * e_psi_neg_delta * d * d
}

fn check_delta(delta: f64) -> Result<()> {
    ensure(delta > 0.0 && delta < 1.0, "delta", "stability exponent must lie in (0, 1)")
}

fn check_epsilon(eps: f64) -> Result<()> {
    ensure(eps > 0.0 && eps < 1.0, "epsilon", "must lie in (0, 1)")
}

/// P_e ≥ 1/2 − √(D/8) for any test between distributions at relative entropy D (nats).
pub fn kl_error_lower_bound(divergence: f64) -> Result<BoundReport> {
    ensure(divergence >= 0.0, "divergence", "relative entropy is nonnegative")?;
    let value = 0.5 - (divergence / 8.0).sqrt();
    Ok(BoundReport {
        name: "kl_error_lower_bound",
        inputs: vec![("divergence", divergence)],
        value,
        vacuous: value < 0.0,
    })
}

/// Leading-order lower bound κλy^{−δ} on P{Y > y}, Y = σ²_I / (P_t Ψ_a d^{−α}).
pub fn ccdf_lower_bound_y(y: f64, lambda: f64, delta: f64, d_aw: f64) -> Result<BoundReport> {
    ensure(y > 0.0, "y", "must be positive")?;
    ensure(lambda >= 0.0, "lambda", "must be nonnegative")?;
    check_delta(delta)?;
    let value = kappa(delta, d_aw) * lambda * y.powf(-delta);
    Ok(BoundReport::probability(
        "ccdf_lower_bound_y",
        vec![("y", y), ("lambda", lambda), ("delta", delta), ("d_aw", d_aw)],
        value,
    ))
}

/// First point (κλ)^{1/δ}β of the support of the Pareto-type density bound.
pub fn interference_support_start(lambda: f64, delta: f64, beta: f64, d_aw: f64) -> f64 {
    (kappa(delta, d_aw) * lambda).powf(1.0 / delta) * beta
}

/// Density bound f^u(x) = κλβ^δ·δ·x^{−(δ+1)} on [(κλ)^{1/δ}β, ∞).
pub fn interference_pdf_upper(x: f64, lambda: f64, delta: f64, beta: f64, d_aw: f64) -> Result<f64> {
    check_delta(delta)?;
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    ensure(beta > 0.0, "beta", "must be positive")?;
    let start = interference_support_start(lambda, delta, beta, d_aw);
    ensure(x >= start, "x", "below the start of the support")?;
    Ok(kappa(delta, d_aw) * lambda * beta.powf(delta) * delta * x.powf(-(delta + 1.0)))
}

/// E[1/σ²_I] ≤ δ/(δ+1)·(κλ)^{−1/δ}·β^{−1}, the mean of 1/x under the density bound.
pub fn inv_power_mean_upper(lambda: f64, delta: f64, beta: f64, d_aw: f64) -> Result<BoundReport> {
    check_delta(delta)?;
    ensure(lambda > 0.0, "lambda", "the bound diverges at zero density")?;
    ensure(beta > 0.0, "beta", "must be positive")?;
    let value = delta / (delta + 1.0) * (kappa(delta, d_aw) * lambda).powf(-1.0 / delta) / beta;
    Ok(BoundReport {
        name: "inv_power_mean_upper",
        inputs: vec![("lambda", lambda), ("delta", delta), ("beta", beta), ("d_aw", d_aw)],
        value,
        vacuous: false,
    })
}

/// √(n/8)·δ/(2(δ+1))·(π²δλ/sin πδ)^{−1/δ}·d^{−2/δ}: the gap below 1/2.
fn willie_gap(n: f64, lambda: f64, delta: f64, d_aw: f64) -> f64 {
    (n / 8.0).sqrt() * delta / (2.0 * (delta + 1.0))
        * (PI * gamma_product(delta) * lambda).powf(-1.0 / delta)
        * d_aw.powf(-2.0 / delta)
}

/// Lower bound on Willie's average detection error. Transmit power cancels
/// out of the expression, so it is not an input.
pub fn willie_error_lower_bound(n: f64, lambda: f64, delta: f64, d_aw: f64) -> Result<BoundReport> {
    ensure(n >= 0.0, "n", "must be nonnegative")?;
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    ensure(d_aw > 0.0, "d_aw", "must be positive")?;
    check_delta(delta)?;
    let value = 0.5 - willie_gap(n, lambda, delta, d_aw);
    Ok(BoundReport {
        name: "willie_error_lower_bound",
        inputs: vec![("n", n), ("lambda", lambda), ("delta", delta), ("d_aw", d_aw)],
        value,
        vacuous: value < 0.0,
    })
}

/// The same bound assembled step by step with P_t kept explicit:
/// 1/2 − √(n/8)·P_t/(2d^α)·E[1/σ²_I]-bound with β = P_t d^{−α}.
pub fn willie_error_lower_bound_chain(n: f64, lambda: f64, delta: f64, d_aw: f64, pt: f64) -> Result<f64> {
    ensure(pt > 0.0, "pt", "must be positive")?;
    let alpha = 2.0 / delta;
    let received = pt * d_aw.powf(-alpha);
    let inv_mean = inv_power_mean_upper(lambda, delta, received, d_aw)?.value;
    Ok(0.5 - (n / 8.0).sqrt() * received / 2.0 * inv_mean)
}

/// c = √(1/8)·δ/(2(δ+1))·(π²δ/sin πδ)^{−1/δ}, the density-free covert constant.
pub fn covert_distance_constant(delta: f64) -> f64 {
    (1.0f64 / 8.0).sqrt() * delta / (2.0 * (delta + 1.0)) * (PI * gamma_product(delta)).powf(-1.0 / delta)
}

/// Smallest Alice–Willie distance for which the error bound stays ≥ 1/2 − ε:
/// d = (c·λ^{−1/δ}/ε)^{δ/2}·n^{δ/4}.
pub fn min_covert_distance(n: f64, eps: f64, lambda: f64, delta: f64) -> Result<f64> {
    ensure(n >= 1.0, "n", "need at least one channel use")?;
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    check_epsilon(eps)?;
    check_delta(delta)?;
    let c = covert_distance_constant(delta) * lambda.powf(-1.0 / delta);
    Ok((c / eps).powf(delta / 2.0) * n.powf(delta / 4.0))
}

/// Bob's average decoding-error bound for α = 4.
#[derive(Clone, Debug, PartialEq)]
pub struct BobErrorBound {
    /// The arctan closed form of the integral against the density bound.
    pub full: BoundReport,
    /// Large-n limit 2^{nR}·π^{7/2}λδ/(2√n).
    pub asymptotic: BoundReport,
}

/// E[Ψ^{1/2}] for Ψ ~ Exp(1).
pub const EXP1_SQRT_MEAN: f64 = 0.886_226_925_452_758; // √π/2

/// Evaluates the α = 4 closed form with a = nP_t/4, κ = (π²/2)d² and
/// β^δ = P_t^{1/2}·E[Ψ^{1/2}]·d^{−2}, and its asymptotic form.
pub fn bob_error_upper_bound(
    n: f64,
    rate: f64,
    lambda: f64,
    pt: f64,
    noise_b: f64,
    d_ab: f64,
    alpha: f64,
) -> Result<BobErrorBound> {
    ensure(alpha == 4.0, "alpha", "the closed form exists only for α = 4")?;
    ensure(n >= 1.0, "n", "need at least one channel use")?;
    ensure(rate >= 0.0, "rate", "must be nonnegative")?;
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    ensure(pt > 0.0, "pt", "must be positive")?;
    ensure(noise_b >= 0.0, "noise_b", "must be nonnegative")?;
    ensure(d_ab > 0.0, "d_ab", "must be positive")?;
    let delta = 0.5;
    let inputs = vec![
        ("n", n),
        ("rate", rate),
        ("lambda", lambda),
        ("pt", pt),
        ("noise_b", noise_b),
        ("d_ab", d_ab),
        ("alpha", alpha),
    ];
    let scale = (n * rate).exp2();
    let a = n * pt / 4.0;
    let beta_delta = pt.sqrt() * EXP1_SQRT_MEAN / (d_ab * d_ab);
    let k = kappa(delta, d_ab) * lambda * beta_delta;
    let b = a + noise_b;
    let b32 = b * b.sqrt();
    let bracket = PI * a / b32 - 2.0 * a * (k / b.sqrt()).atan() / b32 + 2.0 * noise_b / (k * b);
    let full = scale * k * delta * bracket;
    let asymptotic = scale * PI.powf(3.5) * lambda * delta / (2.0 * n.sqrt());
    Ok(BobErrorBound {
        full: BoundReport::probability("bob_error_upper_bound", inputs.clone(), full),
        asymptotic: BoundReport::probability("bob_error_upper_bound_asymptotic", inputs, asymptotic),
    })
}

/// Payload L = nR ≤ log₂(2ε√n/(π^{7/2}λδ)) bits decodable with error ≤ ε.
pub fn covert_capacity_bits(n: f64, eps: f64, lambda: f64, delta: f64) -> Result<f64> {
    ensure(n >= 1.0, "n", "need at least one channel use")?;
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    check_epsilon(eps)?;
    check_delta(delta)?;
    let argument = 2.0 * eps * n.sqrt() / (PI.powf(3.5) * lambda * delta);
    if argument <= 1.0 {
        return Err(Error::NoCovertCapacity { argument });
    }
    Ok(argument.log2())
}

/// τ^I(λ) = λ·exp{−πλξ^δ d² Γ(1+δ)Γ(1−δ)}.
pub fn spatial_throughput_interference(lambda: f64, xi: f64, d_ab: f64, delta: f64) -> Result<f64> {
    ensure(lambda >= 0.0, "lambda", "must be nonnegative")?;
    ensure(xi > 0.0, "xi", "SINR threshold must be positive")?;
    check_delta(delta)?;
    Ok(lambda * (-interference_exponent_rate(xi, d_ab, delta) * lambda).exp())
}

/// k in τ^I = λe^{−kλ}: k = πξ^δ d² Γ(1+δ)Γ(1−δ).
fn interference_exponent_rate(xi: f64, d_ab: f64, delta: f64) -> f64 {
    PI * xi.powf(delta) * d_ab * d_ab * gamma_product(delta)
}

/// dτ^I/dλ = e^{−kλ}(1 − kλ).
pub fn spatial_throughput_interference_derivative(lambda: f64, xi: f64, d_ab: f64, delta: f64) -> f64 {
    let k = interference_exponent_rate(xi, d_ab, delta);
    (-k * lambda).exp() * (1.0 - k * lambda)
}

/// Density λ* = 1/k that maximizes τ^I.
pub fn optimal_intensity(xi: f64, d_ab: f64, delta: f64) -> f64 {
    1.0 / interference_exponent_rate(xi, d_ab, delta)
}

/// τ^J ≤ λ·exp{−d^α ξ √n / (c λ^{α/2})} for the friendly-jammer scheme.
pub fn spatial_throughput_jamming_upper(lambda: f64, xi: f64, d_ab: f64, alpha: f64, n: f64, c: f64) -> Result<f64> {
    ensure(lambda > 0.0, "lambda", "must be positive")?;
    ensure(c > 0.0, "c", "must be positive")?;
    ensure(n >= 0.0, "n", "must be nonnegative")?;
    Ok(lambda * (-d_ab.powf(alpha) * xi * n.sqrt() / (c * lambda.powf(alpha / 2.0))).exp())
}

/// Smallest n at which the jamming throughput bound drops below τ^I,
/// found by bisection on log n.
pub fn jamming_crossover_n(lambda: f64, xi: f64, d_ab: f64, alpha: f64, c: f64) -> Result<f64> {
    let delta = 2.0 / alpha;
    let tau_i = spatial_throughput_interference(lambda, xi, d_ab, delta)?;
    let gap = |ln_n: f64| -> Result<f64> {
        Ok(spatial_throughput_jamming_upper(lambda, xi, d_ab, alpha, ln_n.exp(), c)? - tau_i)
    };
    let (mut lo, mut hi) = (-50.0f64, 0.0f64);
    if gap(lo)? <= 0.0 {
        return Ok(lo.exp());
    }
    while gap(hi)? > 0.0 {
        hi += 10.0;
        ensure(hi < 700.0, "n", "no crossover below e^700")?;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi.exp())
}
