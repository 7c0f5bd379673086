//! Path loss, Rayleigh fading, shot-noise interference and received-sample
//! synthesis for Willie and Bob.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{ensure, Error, Result};
use crate::ppp_field::{sample_field, FieldRealization, Point, Region};
use crate::rng::{Purpose, SeedStream};
use crate::scheduler::ScheduleMask;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathLossKind {
    /// r^{-α}
    Unbounded,
    /// r^{-α} for r ≥ ρ, 0 inside the guard disc.
    GuardTruncated { rho: f64 },
    /// 1 / (1 + r^α)
    SmoothBounded,
    /// min{1, r^{-α}}
    MinBounded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossLaw {
    kind: PathLossKind,
    alpha: f64,
}

impl PathLossLaw {
    pub fn new(kind: PathLossKind, alpha: f64) -> Result<Self> {
        ensure(alpha.is_finite() && alpha > 2.0, "alpha", "path-loss exponent must exceed 2")?;
        if let PathLossKind::GuardTruncated { rho } = kind {
            ensure(rho.is_finite() && rho > 0.0, "rho", "guard radius must be positive")?;
        }
        Ok(PathLossLaw { kind, alpha })
    }

    pub fn unbounded(alpha: f64) -> Result<Self> {
        Self::new(PathLossKind::Unbounded, alpha)
    }

    pub fn guard_truncated(rho: f64, alpha: f64) -> Result<Self> {
        Self::new(PathLossKind::GuardTruncated { rho }, alpha)
    }

    pub fn smooth_bounded(alpha: f64) -> Result<Self> {
        Self::new(PathLossKind::SmoothBounded, alpha)
    }

    pub fn min_bounded(alpha: f64) -> Result<Self> {
        Self::new(PathLossKind::MinBounded, alpha)
    }

    pub fn kind(&self) -> PathLossKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn attenuation(&self, r: f64) -> Result<f64> {
        ensure(r >= 0.0, "r", "distance must be nonnegative")?;
        self.attenuation_sq(r * r)
    }

    /// Attenuation from a squared distance; avoids a square root per interferer.
    pub(crate) fn attenuation_sq(&self, r2: f64) -> Result<f64> {
        // r^{-α} = (r²)^{-α/2}; α = 4 is common enough to special-case
        let inv_pow = |r2: f64| {
            if self.alpha == 4.0 {
                1.0 / (r2 * r2)
            } else {
                r2.powf(-0.5 * self.alpha)
            }
        };
        match self.kind {
            PathLossKind::Unbounded => {
                if r2 == 0.0 {
                    Err(Error::Singularity)
                } else {
                    Ok(inv_pow(r2))
                }
            }
            PathLossKind::GuardTruncated { rho } => Ok(if r2 >= rho * rho { inv_pow(r2) } else { 0.0 }),
            PathLossKind::SmoothBounded => {
                let ra = if self.alpha == 4.0 { r2 * r2 } else { r2.powf(0.5 * self.alpha) };
                Ok(1.0 / (1.0 + ra))
            }
            PathLossKind::MinBounded => Ok(if r2 <= 1.0 { 1.0 } else { inv_pow(r2) }),
        }
    }
}

/// All scalar model parameters. δ = 2/α is derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    /// Interferer density λ (nodes/m²).
    pub lambda: f64,
    pub alpha: f64,
    /// Transmit power P_t, shared by Alice and every interferer.
    pub pt: f64,
    /// Background noise power at Willie, σ²_w0.
    pub noise_w: f64,
    /// Background noise power at Bob, σ²_b0.
    pub noise_b: f64,
    /// Guard radius ρ.
    pub rho: f64,
    pub d_aw: f64,
    pub d_ab: f64,
    /// Hold the Alice–Willie gain at h = 1 instead of drawing Rayleigh fading.
    pub h_aw_fixed: bool,
    pub region: Region,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            lambda: 1.0,
            alpha: 4.0,
            pt: 1.0,
            noise_w: 1.0,
            noise_b: 1.0,
            rho: 1.0,
            d_aw: 1.0,
            d_ab: 1.0,
            h_aw_fixed: true,
            region: Region::square(100.0).expect("positive side"),
        }
    }
}

impl SystemConfig {
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.lambda.is_finite() && self.lambda >= 0.0, "lambda", "must be nonnegative")?;
        ensure(self.alpha.is_finite() && self.alpha > 2.0, "alpha", "must exceed 2 so that δ ∈ (0, 1)")?;
        ensure(self.pt.is_finite() && self.pt >= 0.0, "pt", "must be nonnegative")?;
        ensure(self.noise_w.is_finite() && self.noise_w >= 0.0, "noise_w", "must be nonnegative")?;
        ensure(self.noise_b.is_finite() && self.noise_b >= 0.0, "noise_b", "must be nonnegative")?;
        ensure(self.rho.is_finite() && self.rho >= 0.0, "rho", "must be nonnegative")?;
        ensure(self.d_aw.is_finite() && self.d_aw > 0.0, "d_aw", "must be positive")?;
        ensure(self.d_ab.is_finite() && self.d_ab > 0.0, "d_ab", "must be positive")?;
        Ok(())
    }

    /// Willie sits at the center of the region.
    pub fn willie(&self) -> Point {
        self.region.center()
    }
}

/// Power gains Ψ = |h|², frozen for one field realization.
#[derive(Clone, Debug, PartialEq)]
pub struct FadingDraw {
    pub interferers: Vec<f64>,
    pub alice: f64,
}

/// Unit-mean exponential gains, one per field point, plus the Alice link.
pub fn draw_fading(field: &FieldRealization, alice_fixed: bool, stream: SeedStream) -> FadingDraw {
    let mut rng = stream.rng();
    let interferers = (0..field.len()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let alice = if alice_fixed { 1.0 } else { rng.sample(Exp1) };
    FadingDraw { interferers, alice }
}

/// Shot-noise power Σ_k P_t·l(d_k)·Ψ_k seen at `receiver`.
pub fn aggregate_interference_power(
    field: &FieldRealization,
    receiver: Point,
    law: &PathLossLaw,
    pt: f64,
    fading: &FadingDraw,
) -> Result<f64> {
    ensure(
        fading.interferers.len() == field.len(),
        "fading",
        "need exactly one gain per field point",
    )?;
    let mut total = 0.0;
    for (p, &psi) in field.points.iter().zip(&fading.interferers) {
        total += law.attenuation_sq(p.distance_sq(&receiver))? * psi;
    }
    Ok(pt * total)
}

/// Mean and variance of guard-zone shot noise in `dim` dimensions with
/// Exp(1) fading (E[Ψ] = 1, E[Ψ²] = 2) and constant transmit power.
pub fn interference_moments_guard(lambda: f64, alpha: f64, rho: f64, pt: f64, dim: u32) -> Result<(f64, f64)> {
    ensure(rho > 0.0, "rho", "moments diverge without a guard zone")?;
    ensure(lambda >= 0.0, "lambda", "must be nonnegative")?;
    let c_d = match dim {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => return Err(Error::invalid("dim", "only dimensions 1, 2 and 3 are supported")),
    };
    let d = f64::from(dim);
    ensure(alpha > d, "alpha", "must exceed the spatial dimension")?;
    let (e_psi, e_psi2) = (1.0, 2.0);
    let mean = lambda * d * c_d / (alpha - d) * e_psi * pt * rho.powf(d - alpha);
    let var = lambda * d * c_d / (2.0 * alpha - d) * e_psi2 * pt * pt * rho.powf(d - 2.0 * alpha);
    Ok((mean, var))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// Alice silent.
    H0,
    /// Alice transmitting in at least one slot.
    H1,
}

/// Whether the interference field is held for the whole trace or redrawn
/// for every channel use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FieldMode {
    #[default]
    Frozen,
    PerSample,
}

/// How the per-use aggregate interference I_i is produced.
///
/// Interferer symbols are i.i.d. N(0, 1), so given the field and fading I_i is
/// exactly N(0, σ²_I). `Aggregate` draws that single variate; `PerInterferer`
/// sums the individual terms and costs O(points) per channel use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InterferenceSynthesis {
    #[default]
    Aggregate,
    PerInterferer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SynthesisOptions {
    pub interference: InterferenceSynthesis,
    /// Negate Alice's codeword symbols (the antithetic partner of a run).
    pub antithetic: bool,
    /// Index of the background-noise substream. Changing only this redraws
    /// the noise and keeps interference and Alice's symbols frozen.
    pub noise_draw: u64,
}

/// What generated a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub hypothesis: Hypothesis,
    pub mask: ScheduleMask,
    /// Realized shot-noise power σ²_I (mean over samples in per-sample mode).
    pub interference_power: f64,
    /// (1/n)·Σ I_i², the frozen-interference conditioning value.
    pub interference_mean_square: f64,
    /// (1/n)·Σ (1_A(i)·a·s_i + I_i)², the mean-shift power under H1.
    pub mean_shift_power: f64,
    /// Received power of Alice when on: P_t·l(d_aw)·Ψ_a.
    pub alice_power: f64,
}

/// n received samples, with the generating ground truth when synthesized.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTrace {
    samples: Vec<f64>,
    truth: Option<GroundTruth>,
}

impl SampleTrace {
    /// Wraps observed samples with no ground truth attached.
    pub fn from_observations(samples: Vec<f64>) -> Result<Self> {
        ensure(!samples.is_empty(), "samples", "a trace needs at least one sample")?;
        Ok(SampleTrace { samples, truth: None })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn truth(&self) -> Option<&GroundTruth> {
        self.truth.as_ref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn alice_amplitude(config: &SystemConfig, law: &PathLossLaw, alice_gain: f64) -> Result<(f64, f64)> {
    let power = config.pt * law.attenuation(config.d_aw)? * alice_gain;
    Ok((power, power.sqrt()))
}

/// Willie's trace over a frozen field and fading with default options.
pub fn synthesize_receiver_samples(
    config: &SystemConfig,
    field: &FieldRealization,
    fading: &FadingDraw,
    mask: &ScheduleMask,
    n: usize,
    law: &PathLossLaw,
    stream: SeedStream,
) -> Result<SampleTrace> {
    ensure(mask.len() == n, "mask", "mask length must equal n")?;
    synthesize_with(config, field, fading, mask, law, stream, SynthesisOptions::default())
}

/// y_i = 1_A(i)·√(P_t l(d_aw))·h_a·s_i + I_i + z_i with field and fading frozen.
pub fn synthesize_with(
    config: &SystemConfig,
    field: &FieldRealization,
    fading: &FadingDraw,
    mask: &ScheduleMask,
    law: &PathLossLaw,
    stream: SeedStream,
    opts: SynthesisOptions,
) -> Result<SampleTrace> {
    let n = mask.len();
    ensure(n >= 1, "n", "a trace needs at least one sample")?;
    let willie = config.willie();
    let interference_power = aggregate_interference_power(field, willie, law, config.pt, fading)?;
    let (alice_power, a) = alice_amplitude(config, law, fading.alice)?;

    let interference: Vec<f64> = match opts.interference {
        InterferenceSynthesis::Aggregate => {
            let sd = interference_power.sqrt();
            let mut rng = stream.derive(Purpose::Interference, 0).rng();
            (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
        }
        InterferenceSynthesis::PerInterferer => {
            let coeffs = field
                .points
                .iter()
                .zip(&fading.interferers)
                .map(|(p, &psi)| Ok((config.pt * law.attenuation_sq(p.distance_sq(&willie))? * psi).sqrt()))
                .collect::<Result<Vec<f64>>>()?;
            let mut rng = stream.derive(Purpose::Interference, 1).rng();
            (0..n)
                .map(|_| coeffs.iter().map(|c| c * rng.sample::<f64, _>(StandardNormal)).sum())
                .collect()
        }
    };
    Ok(assemble(config, mask, a, alice_power, interference, interference_power, stream, opts))
}

/// Per-use network draws for the per-sample field mode, at unit transmit power.
#[derive(Clone, Debug, PartialEq)]
pub struct PerSampleNetwork {
    /// σ²_I of each use's fresh field and fading with P_t = 1.
    pub unit_powers: Vec<f64>,
    /// Alice-link gain Ψ_a of each use.
    pub alice_gains: Vec<f64>,
}

/// Draws a fresh field and fading for each of `n` channel uses. Shot-noise
/// power is linear in P_t, so one draw serves every transmit power.
pub fn draw_per_sample_network(
    config: &SystemConfig,
    law: &PathLossLaw,
    n: usize,
    stream: SeedStream,
) -> Result<PerSampleNetwork> {
    ensure(n >= 1, "n", "a trace needs at least one sample")?;
    let willie = config.willie();
    let mut unit_powers = Vec::with_capacity(n);
    let mut alice_gains = Vec::with_capacity(n);
    for i in 0..n {
        let s = stream.derive(Purpose::Sample, i as u64);
        let field = sample_field(config.lambda, &config.region, s.derive(Purpose::Field, 0))?;
        let fading = draw_fading(&field, config.h_aw_fixed, s.derive(Purpose::Fading, 0));
        unit_powers.push(aggregate_interference_power(&field, willie, law, 1.0, &fading)?);
        alice_gains.push(fading.alice);
    }
    Ok(PerSampleNetwork {
        unit_powers,
        alice_gains,
    })
}

/// Trace in which every channel use sees a freshly drawn network (field,
/// fading and Alice-link gain).
pub fn synthesize_per_sample_field(
    config: &SystemConfig,
    mask: &ScheduleMask,
    law: &PathLossLaw,
    stream: SeedStream,
    opts: SynthesisOptions,
) -> Result<SampleTrace> {
    let network = draw_per_sample_network(config, law, mask.len(), stream)?;
    synthesize_on_network(config, &network, mask, law, stream, opts)
}

/// Synthesis over pre-drawn per-use networks; `stream` must be the one the
/// network was drawn from for the result to equal [`synthesize_per_sample_field`].
pub fn synthesize_on_network(
    config: &SystemConfig,
    network: &PerSampleNetwork,
    mask: &ScheduleMask,
    law: &PathLossLaw,
    stream: SeedStream,
    opts: SynthesisOptions,
) -> Result<SampleTrace> {
    let n = mask.len();
    ensure(n >= 1, "n", "a trace needs at least one sample")?;
    ensure(network.unit_powers.len() == n, "mask", "mask length must equal the number of network draws")?;
    let mut rng = stream.derive(Purpose::Interference, 0).rng();
    let interference: Vec<f64> = network
        .unit_powers
        .iter()
        .map(|p| (config.pt * p).sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mean_power = config.pt * network.unit_powers.iter().sum::<f64>() / n as f64;

    let base = config.pt * law.attenuation(config.d_aw)?;
    let mut sym = stream.derive(Purpose::AliceSymbols, 0).rng();
    let mut noise = stream.derive(Purpose::Noise, opts.noise_draw).rng();
    let sigma0 = config.noise_w.sqrt();
    let sign = if opts.antithetic { -1.0 } else { 1.0 };
    let mut samples = Vec::with_capacity(n);
    let mut shift_sq = 0.0;
    for i in 0..n {
        let s: f64 = sym.sample(StandardNormal);
        let z: f64 = noise.sample(StandardNormal);
        let alice = if mask.is_on(i) {
            sign * (base * network.alice_gains[i]).sqrt() * s
        } else {
            0.0
        };
        let m = alice + interference[i];
        shift_sq += m * m;
        samples.push(m + sigma0 * z);
    }
    let alice_power = base * network.alice_gains.iter().sum::<f64>() / n as f64;
    Ok(SampleTrace {
        samples,
        truth: Some(GroundTruth {
            hypothesis: if mask.any_on() { Hypothesis::H1 } else { Hypothesis::H0 },
            mask: mask.clone(),
            interference_power: mean_power,
            interference_mean_square: interference.iter().map(|x| x * x).sum::<f64>() / n as f64,
            mean_shift_power: shift_sq / n as f64,
            alice_power,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    config: &SystemConfig,
    mask: &ScheduleMask,
    a: f64,
    alice_power: f64,
    interference: Vec<f64>,
    interference_power: f64,
    stream: SeedStream,
    opts: SynthesisOptions,
) -> SampleTrace {
    let n = mask.len();
    // symbols are drawn for every slot so the on/off pattern does not shift the stream
    let mut sym = stream.derive(Purpose::AliceSymbols, 0).rng();
    let mut noise = stream.derive(Purpose::Noise, opts.noise_draw).rng();
    let sigma0 = config.noise_w.sqrt();
    let amp = if opts.antithetic { -a } else { a };
    let mut samples = Vec::with_capacity(n);
    let mut shift_sq = 0.0;
    let mut interf_sq = 0.0;
    for (i, &interf) in interference.iter().enumerate() {
        let s: f64 = sym.sample(StandardNormal);
        let z: f64 = noise.sample(StandardNormal);
        let m = if mask.is_on(i) { amp * s } else { 0.0 } + interf;
        shift_sq += m * m;
        interf_sq += interf * interf;
        samples.push(m + sigma0 * z);
    }
    SampleTrace {
        samples,
        truth: Some(GroundTruth {
            hypothesis: if mask.any_on() { Hypothesis::H1 } else { Hypothesis::H0 },
            mask: mask.clone(),
            interference_power,
            interference_mean_square: interf_sq / n as f64,
            mean_shift_power: shift_sq / n as f64,
            alice_power,
        }),
    }
}
