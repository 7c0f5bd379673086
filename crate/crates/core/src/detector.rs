//! Willie's radiometer: statistic, thresholds, conditional moments, Chebyshev
//! error bounds and a Monte Carlo error-rate harness.
//!
//! The moment formulas hold conditionally on one fixed interference sequence
//! I_1..I_n, with only the background noise random. Unconditionally, with
//! Gaussian interference redrawn per use, Var[T | H0] is 2(σ²_w0 + σ²_I)²/n.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::analytics::BoundReport;
use crate::channel::{
    draw_fading, synthesize_per_sample_field, synthesize_with, FieldMode, Hypothesis, PathLossLaw, SampleTrace,
    SynthesisOptions, SystemConfig,
};
use crate::error::{ensure, Result};
use crate::ppp_field::sample_field;
use crate::rng::{Purpose, SeedStream};
use crate::scheduler::{build_mask, ScheduleMask, ScheduleProfile};
use crate::stats::binomial_se;

/// T(y) = (1/n)·Σ y_k².
pub fn radiometer_statistic(trace: &SampleTrace) -> f64 {
    mean_square(trace.samples())
}

pub fn mean_square(samples: &[f64]) -> f64 {
    samples.iter().map(|y| y * y).sum::<f64>() / samples.len() as f64
}

/// Conditional mean and variance of T given the interference mean square.
/// Under H1 Alice adds P_t/d^α to the conditioning power.
pub fn conditional_moments(
    hypothesis: Hypothesis,
    n: usize,
    noise_w: f64,
    interference_mean_square: f64,
    pt: f64,
    d_aw: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    ensure(d_aw > 0.0, "d_aw", "must be positive")?;
    let signal = match hypothesis {
        Hypothesis::H0 => 0.0,
        Hypothesis::H1 => pt / d_aw.powf(alpha),
    };
    moments_given_shift(n, noise_w, interference_mean_square + signal)
}

/// E[T] = σ²_w0 + m and Var[T] = (2σ⁴_w0 + 4mσ²_w0)/n for a frozen mean-shift power m.
pub fn moments_given_shift(n: usize, noise_w: f64, shift_power: f64) -> Result<(f64, f64)> {
    ensure(n >= 1, "n", "need at least one sample")?;
    ensure(noise_w >= 0.0, "noise_w", "must be nonnegative")?;
    ensure(shift_power >= 0.0, "interference_mean_square", "must be nonnegative")?;
    let mean = noise_w + shift_power;
    let var = (2.0 * noise_w * noise_w + 4.0 * shift_power * noise_w) / n as f64;
    Ok((mean, var))
}

/// Guard-zone shot-noise term 4πλP_t/ρ² that appears in the Chebyshev bounds.
fn guard_term(lambda: f64, rho: f64, pt: f64) -> f64 {
    4.0 * PI * lambda * pt / (rho * rho)
}

fn check_threshold_inputs(n: usize, noise_w: f64, lambda: f64, rho: f64, pt: f64) -> Result<()> {
    ensure(n >= 1, "n", "need at least one sample")?;
    ensure(noise_w >= 0.0, "noise_w", "must be nonnegative")?;
    ensure(lambda >= 0.0, "lambda", "must be nonnegative")?;
    ensure(rho > 0.0, "rho", "guard radius must be positive")?;
    ensure(pt >= 0.0, "pt", "must be nonnegative")
}

/// Smallest offset γ with fa_bound(γ) ≤ ε:
/// γ = σ_w0·√((4πλP_t/ρ² + 2σ²_w0)/(nε)).
pub fn chebyshev_threshold(eps: f64, n: usize, noise_w: f64, lambda: f64, rho: f64, pt: f64) -> Result<f64> {
    ensure(eps > 0.0 && eps < 1.0, "epsilon", "must lie in (0, 1)")?;
    check_threshold_inputs(n, noise_w, lambda, rho, pt)?;
    Ok(noise_w.sqrt() * ((guard_term(lambda, rho, pt) + 2.0 * noise_w) / (n as f64 * eps)).sqrt())
}

/// c = 2√(πλ)σ²_w0/ρ.
pub fn threshold_constant(noise_w: f64, lambda: f64, rho: f64) -> f64 {
    2.0 * (PI * lambda).sqrt() * noise_w / rho
}

/// Large-n threshold γ = c·√(P_t/n).
pub fn asymptotic_threshold(n: usize, noise_w: f64, lambda: f64, rho: f64, pt: f64) -> Result<f64> {
    check_threshold_inputs(n, noise_w, lambda, rho, pt)?;
    Ok(threshold_constant(noise_w, lambda, rho) * (pt / n as f64).sqrt())
}

/// E[P_FA] ≤ (2σ⁴_w0 + 4πλP_tσ²_w0/ρ²)/(nγ²).
pub fn fa_bound(n: usize, gamma: f64, noise_w: f64, lambda: f64, rho: f64, pt: f64) -> Result<BoundReport> {
    check_threshold_inputs(n, noise_w, lambda, rho, pt)?;
    ensure(gamma > 0.0, "gamma", "threshold offset must be positive")?;
    let value = (2.0 * noise_w * noise_w + guard_term(lambda, rho, pt) * noise_w) / (n as f64 * gamma * gamma);
    Ok(BoundReport {
        name: "fa_bound",
        inputs: vec![
            ("n", n as f64),
            ("gamma", gamma),
            ("noise_w", noise_w),
            ("lambda", lambda),
            ("rho", rho),
            ("pt", pt),
        ],
        value,
        vacuous: value > 1.0,
    })
}

fn md_inputs(n: usize, pt: f64, noise_w: f64, lambda: f64, rho: f64) -> Result<(f64, Vec<(&'static str, f64)>)> {
    check_threshold_inputs(n, noise_w, lambda, rho, pt)?;
    let c = threshold_constant(noise_w, lambda, rho);
    ensure(pt > c * c, "pt", "bound needs P_t > c²")?;
    let inputs = vec![
        ("n", n as f64),
        ("pt", pt),
        ("noise_w", noise_w),
        ("lambda", lambda),
        ("rho", rho),
    ];
    Ok((c, inputs))
}

/// E[P_MD] ≤ 2σ²_w0/(√P_t − c)²·(σ²_w0/P_t + 2/√n + 2πλ/ρ²) at the asymptotic threshold.
pub fn md_bound(n: usize, pt: f64, noise_w: f64, lambda: f64, rho: f64) -> Result<BoundReport> {
    let (c, inputs) = md_inputs(n, pt, noise_w, lambda, rho)?;
    let gap = pt.sqrt() - c;
    let value = 2.0 * noise_w / (gap * gap) * (noise_w / pt + 2.0 / (n as f64).sqrt() + 2.0 * PI * lambda / (rho * rho));
    Ok(BoundReport {
        name: "md_bound",
        inputs,
        value,
        vacuous: value > 1.0,
    })
}

/// n → ∞ form 4πλσ²_w0/(ρ²(√P_t − c)²).
pub fn md_bound_limit(pt: f64, noise_w: f64, lambda: f64, rho: f64) -> Result<BoundReport> {
    let (c, inputs) = md_inputs(1, pt, noise_w, lambda, rho)?;
    let gap = pt.sqrt() - c;
    let value = 4.0 * PI * lambda * noise_w / (rho * rho * gap * gap);
    Ok(BoundReport {
        name: "md_bound_limit",
        inputs,
        value,
        vacuous: value > 1.0,
    })
}

/// Noise-plus-interference level σ²_w that Willie compares T against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceMode {
    /// σ²_w0 plus the realized shot-noise power σ²_I of the trial's field.
    RealizedPower,
    /// σ²_w0 plus (1/n)·Σ I_i² of the trial (frozen-interference semantics).
    ConditionalMeanSquare,
    /// A fixed externally supplied σ²_w, e.g. from a calibration phase.
    Fixed(f64),
    /// No reference: γ is an absolute threshold on T.
    Absolute,
}

impl ReferenceMode {
    fn level(&self, config: &SystemConfig, trace: &SampleTrace) -> f64 {
        match *self {
            ReferenceMode::Fixed(v) => v,
            ReferenceMode::Absolute => 0.0,
            ReferenceMode::RealizedPower => {
                config.noise_w + trace.truth().map_or(0.0, |t| t.interference_power)
            }
            ReferenceMode::ConditionalMeanSquare => {
                config.noise_w + trace.truth().map_or(0.0, |t| t.interference_mean_square)
            }
        }
    }
}

/// Outcome of applying the decision rule to one trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub statistic: f64,
    /// Reference level plus γ.
    pub threshold: f64,
    pub decision: Hypothesis,
}

/// Accept H0 when T(y) < σ²_w + γ.
pub fn decide(statistic: f64, reference: f64, gamma: f64) -> Decision {
    let threshold = reference + gamma;
    Decision {
        statistic,
        threshold,
        decision: if statistic < threshold { Hypothesis::H0 } else { Hypothesis::H1 },
    }
}

/// Monte Carlo error-rate estimates at one threshold offset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionResult {
    pub gamma: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub p_e: f64,
    pub se_fa: f64,
    pub se_md: f64,
    pub se_e: f64,
    /// Trials per hypothesis.
    pub trials: usize,
}

/// Everything that defines one Monte Carlo detection experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRateSetup {
    pub config: SystemConfig,
    pub law: PathLossLaw,
    pub n: usize,
    /// Alice's schedule under H1; H0 always uses the all-off mask.
    pub schedule: ScheduleProfile,
    pub reference: ReferenceMode,
    pub field_mode: FieldMode,
    pub trials: usize,
}

/// Per-trial statistics and reference levels for both hypotheses.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticSamples {
    /// (T, σ²_w) per H0 trial.
    pub h0: Vec<(f64, f64)>,
    /// (T, σ²_w) per H1 trial.
    pub h1: Vec<(f64, f64)>,
}

impl StatisticSamples {
    pub fn rates(&self, gamma: f64) -> DetectionResult {
        let fa = self.h0.iter().filter(|(t, r)| decide(*t, *r, gamma).decision == Hypothesis::H1).count();
        let md = self.h1.iter().filter(|(t, r)| decide(*t, *r, gamma).decision == Hypothesis::H0).count();
        let p_fa = fa as f64 / self.h0.len() as f64;
        let p_md = md as f64 / self.h1.len() as f64;
        let se_fa = binomial_se(p_fa, self.h0.len());
        let se_md = binomial_se(p_md, self.h1.len());
        DetectionResult {
            gamma,
            p_fa,
            p_md,
            p_e: 0.5 * (p_fa + p_md),
            se_fa,
            se_md,
            se_e: 0.5 * (se_fa * se_fa + se_md * se_md).sqrt(),
            trials: self.h0.len().min(self.h1.len()),
        }
    }
}

/// One synthesized trial: a fresh field, fading, mask and trace.
pub fn synthesize_trial(setup: &ErrorRateSetup, hypothesis: Hypothesis, stream: SeedStream) -> Result<SampleTrace> {
    let mask = match hypothesis {
        Hypothesis::H0 => ScheduleMask::all_off(setup.n),
        Hypothesis::H1 => build_mask(&setup.schedule, setup.n, stream.derive(Purpose::Mask, 0))?,
    };
    let cfg = &setup.config;
    match setup.field_mode {
        FieldMode::Frozen => {
            let field = sample_field(cfg.lambda, &cfg.region, stream.derive(Purpose::Field, 0))?;
            let fading = draw_fading(&field, cfg.h_aw_fixed, stream.derive(Purpose::Fading, 0));
            synthesize_with(cfg, &field, &fading, &mask, &setup.law, stream, SynthesisOptions::default())
        }
        FieldMode::PerSample => {
            synthesize_per_sample_field(cfg, &mask, &setup.law, stream, SynthesisOptions::default())
        }
    }
}

/// (T, σ²_w) for `setup.trials` independent realizations of one hypothesis.
pub fn collect_hypothesis(setup: &ErrorRateSetup, hypothesis: Hypothesis, stream: SeedStream) -> Result<Vec<(f64, f64)>> {
    setup.config.validate()?;
    ensure(setup.trials >= 1, "trials", "need at least one trial")?;
    ensure(setup.n >= 1, "n", "need at least one sample")?;
    let index = match hypothesis {
        Hypothesis::H0 => 0,
        Hypothesis::H1 => 1,
    };
    let hs = stream.derive(Purpose::Hypothesis, index);
    (0..setup.trials as u64)
        .into_par_iter()
        .map(|t| {
            let trace = synthesize_trial(setup, hypothesis, hs.derive(Purpose::Trial, t))?;
            Ok((radiometer_statistic(&trace), setup.reference.level(&setup.config, &trace)))
        })
        .collect()
}

/// Runs `trials` independent realizations per hypothesis and keeps (T, σ²_w)
/// for each, so that any number of thresholds can be scored afterwards.
pub fn collect_statistics(setup: &ErrorRateSetup, stream: SeedStream) -> Result<StatisticSamples> {
    Ok(StatisticSamples {
        h0: collect_hypothesis(setup, Hypothesis::H0, stream)?,
        h1: collect_hypothesis(setup, Hypothesis::H1, stream)?,
    })
}

pub fn estimate_error_rates(setup: &ErrorRateSetup, gamma: f64, stream: SeedStream) -> Result<DetectionResult> {
    Ok(collect_statistics(setup, stream)?.rates(gamma))
}
