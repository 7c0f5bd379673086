//! Figure protocols.
//!
//! fig4/fig5 rows (`mean_sweep`): `<sweep>, mean_silent, mean_alternating,
//! mean_transmit, se_silent, se_alternating, se_transmit,
//! se_diff_transmit_alternating, se_diff_alternating_silent`. Standard errors
//! are over independent units; a unit is one run, or one antithetic pair of
//! runs when `experiment.antithetic` is set. The three cases of a unit share
//! every random draw except the schedule mask.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytics;
use crate::channel::{
    aggregate_interference_power, draw_fading, draw_per_sample_network, synthesize_on_network, synthesize_with,
    FadingDraw, FieldMode, PathLossLaw, PerSampleNetwork, SampleTrace, SynthesisOptions, SystemConfig,
};
use crate::detector::{self, collect_statistics, radiometer_statistic, ErrorRateSetup};
use crate::error::{ensure, Error, Result};
use crate::ppp_field::{sample_field, FieldRealization, Region};
use crate::rng::{Purpose, SeedStream};
use crate::scheduler::{build_mask, ScheduleMask, ScheduleProfile};
use crate::stats::{self, five_number};

use super::{ExperimentId, ExperimentSpec, ResultTable};

/// Variables a sweep may vary, per experiment.
fn allowed_sweeps(id: ExperimentId) -> &'static [&'static str] {
    match id {
        ExperimentId::Fig4 | ExperimentId::Fig5 | ExperimentId::Fig6 | ExperimentId::Fig8 => {
            &["pt", "d_aw", "lambda", "noise_w"]
        }
        ExperimentId::Throughput => &["lambda"],
        ExperimentId::Bounds => &["n"],
        ExperimentId::Detection => &["gamma"],
        ExperimentId::Fig2 | ExperimentId::Fig3 | ExperimentId::Fig7 => &["none"],
    }
}

pub(super) fn check_sweep(spec: &ExperimentSpec) -> Result<()> {
    let var = spec.sweep_variable();
    if allowed_sweeps(spec.id).contains(&var) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{} cannot sweep `{var}`; allowed: {}",
            spec.id,
            allowed_sweeps(spec.id).join(", ")
        )))
    }
}

fn apply_sweep(cfg: &mut SystemConfig, var: &str, value: f64) -> Result<()> {
    match var {
        "pt" => cfg.pt = value,
        "d_aw" => cfg.d_aw = value,
        "lambda" => cfg.lambda = value,
        "noise_w" => cfg.noise_w = value,
        other => return Err(Error::Config(format!("cannot sweep `{other}`"))),
    }
    cfg.validate()
}

/// Field and fading behind one trace, frozen or redrawn per use.
enum Network {
    Frozen(FieldRealization, FadingDraw),
    PerSample(PerSampleNetwork),
}

impl Network {
    fn draw(cfg: &SystemConfig, law: &PathLossLaw, mode: FieldMode, n: usize, stream: SeedStream) -> Result<Self> {
        Ok(match mode {
            FieldMode::Frozen => {
                let field = sample_field(cfg.lambda, &cfg.region, stream.derive(Purpose::Field, 0))?;
                let fading = draw_fading(&field, cfg.h_aw_fixed, stream.derive(Purpose::Fading, 0));
                Network::Frozen(field, fading)
            }
            FieldMode::PerSample => Network::PerSample(draw_per_sample_network(cfg, law, n, stream)?),
        })
    }

    fn synthesize(
        &self,
        cfg: &SystemConfig,
        mask: &ScheduleMask,
        law: &PathLossLaw,
        stream: SeedStream,
        opts: SynthesisOptions,
    ) -> Result<SampleTrace> {
        match self {
            Network::Frozen(field, fading) => synthesize_with(cfg, field, fading, mask, law, stream, opts),
            Network::PerSample(net) => synthesize_on_network(cfg, net, mask, law, stream, opts),
        }
    }
}

/// Radiometer output averaged over the antithetic partners when requested.
fn unit_statistic(
    network: &Network,
    cfg: &SystemConfig,
    mask: &ScheduleMask,
    law: &PathLossLaw,
    stream: SeedStream,
    opts: SynthesisOptions,
    antithetic: bool,
) -> Result<f64> {
    let t = radiometer_statistic(&network.synthesize(cfg, mask, law, stream, opts)?);
    if !antithetic {
        return Ok(t);
    }
    let flipped = SynthesisOptions {
        antithetic: !opts.antithetic,
        ..opts
    };
    let u = radiometer_statistic(&network.synthesize(cfg, mask, law, stream, flipped)?);
    Ok(0.5 * (t + u))
}

/// Silent, mixed and transmitting statistics of one unit, in that order.
fn case_statistics(
    network: &Network,
    cfg: &SystemConfig,
    mixed: &ScheduleMask,
    law: &PathLossLaw,
    stream: SeedStream,
    opts: SynthesisOptions,
    antithetic: bool,
) -> Result<[f64; 3]> {
    let n = mixed.len();
    Ok([
        unit_statistic(network, cfg, &ScheduleMask::all_off(n), law, stream, opts, false)?,
        unit_statistic(network, cfg, mixed, law, stream, opts, antithetic)?,
        unit_statistic(network, cfg, &ScheduleMask::all_on(n), law, stream, opts, antithetic)?,
    ])
}

fn synthesis_options(spec: &ExperimentSpec) -> Result<SynthesisOptions> {
    Ok(SynthesisOptions {
        interference: spec.settings.synthesis()?,
        antithetic: false,
        ..Default::default()
    })
}

/// Noise and aggregate interference amplitudes, one realization per row.
pub fn fig2(spec: &ExperimentSpec) -> Result<ResultTable> {
    let cfg = spec.settings.system()?;
    let law = spec.settings.law()?;
    let mode = spec.settings.field_mode()?;
    let n = spec.n()?;
    let root = spec.root_stream()?;
    let willie = cfg.willie();
    let frozen_power = match mode {
        FieldMode::Frozen => {
            let field = sample_field(cfg.lambda, &cfg.region, root.derive(Purpose::Field, 0))?;
            let fading = draw_fading(&field, cfg.h_aw_fixed, root.derive(Purpose::Fading, 0));
            Some(aggregate_interference_power(&field, willie, &law, cfg.pt, &fading)?)
        }
        FieldMode::PerSample => None,
    };
    let rows = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = root.derive(Purpose::Sample, i);
            let power = match frozen_power {
                Some(p) => p,
                None => {
                    let field = sample_field(cfg.lambda, &cfg.region, s.derive(Purpose::Field, 0))?;
                    let fading = draw_fading(&field, cfg.h_aw_fixed, s.derive(Purpose::Fading, 0));
                    aggregate_interference_power(&field, willie, &law, cfg.pt, &fading)?
                }
            };
            let z: f64 = s.derive(Purpose::Noise, 0).rng().sample(StandardNormal);
            let g: f64 = s.derive(Purpose::Interference, 0).rng().sample(StandardNormal);
            Ok(vec![i as f64, cfg.noise_w.sqrt() * z, power.sqrt() * g])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["index", "noise", "interference"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Squared samples of `trials` traces in the three cases, long format.
pub fn fig3(spec: &ExperimentSpec) -> Result<ResultTable> {
    let cfg = spec.settings.system()?;
    let law = spec.settings.law()?;
    let mode = spec.settings.field_mode()?;
    let opts = synthesis_options(spec)?;
    let n = spec.n()?;
    let profile = spec.settings.schedule_with(None, n)?;
    let root = spec.root_stream()?;
    let traces = (0..spec.trials()? as u64)
        .into_par_iter()
        .map(|t| {
            let s = root.derive(Purpose::Trial, t);
            let network = Network::draw(&cfg, &law, mode, n, s)?;
            let mixed = build_mask(&profile, n, s.derive(Purpose::Mask, 0))?;
            let y = |mask: &ScheduleMask| -> Result<Vec<f64>> {
                Ok(network.synthesize(&cfg, mask, &law, s, opts)?.samples().iter().map(|v| v * v).collect())
            };
            Ok((y(&ScheduleMask::all_off(n))?, y(&ScheduleMask::all_on(n))?, y(&mixed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["trace", "index", "y2_silent", "y2_transmit", "y2_alternating"]);
    for (t, (silent, transmit, mixed)) in traces.into_iter().enumerate() {
        for i in 0..n {
            table.push(vec![t as f64, i as f64, silent[i], transmit[i], mixed[i]]);
        }
    }
    Ok(table)
}

/// Sweep of mean T in the three cases (fig4, fig5).
///
/// fig4 shares each unit's network and symbols across the grid (common
/// random numbers); fig5 gives every (grid point, unit) its own stream.
pub fn mean_sweep(spec: &ExperimentSpec) -> Result<ResultTable> {
    let base = spec.settings.system()?;
    let law = spec.settings.law()?;
    let mode = spec.settings.field_mode()?;
    let opts = synthesis_options(spec)?;
    let n = spec.n()?;
    let trials = spec.trials()?;
    let antithetic: bool = spec.settings.get("experiment.antithetic")?;
    let profile = spec.settings.schedule_with(None, n)?;
    let var = spec.sweep_variable().to_string();
    let grid = spec.grid()?;
    let root = spec.root_stream()?;
    let units = if antithetic {
        ensure(trials % 2 == 0, "trials", "antithetic runs come in pairs; use an even count")?;
        trials / 2
    } else {
        trials
    };
    ensure(units >= 2, "trials", "need at least two units for a standard error")?;
    let shared = spec.id == ExperimentId::Fig4;
    // the network does not depend on these, so one draw serves the whole grid
    let reuse_network = shared && matches!(var.as_str(), "pt" | "d_aw" | "noise_w");

    let configs = grid
        .iter()
        .map(|&v| {
            let mut c = base;
            apply_sweep(&mut c, &var, v)?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;

    // stats[unit][grid] = [silent, mixed, transmit]
    let stats: Vec<Vec<[f64; 3]>> = if shared {
        (0..units as u64)
            .into_par_iter()
            .map(|k| {
                let s = root.derive(Purpose::Trial, k);
                let mixed = build_mask(&profile, n, s.derive(Purpose::Mask, 0))?;
                let reused = if reuse_network {
                    Some(Network::draw(&base, &law, mode, n, s)?)
                } else {
                    None
                };
                configs
                    .iter()
                    .map(|cfg| {
                        let fresh;
                        let network = match &reused {
                            Some(net) => net,
                            None => {
                                fresh = Network::draw(cfg, &law, mode, n, s)?;
                                &fresh
                            }
                        };
                        case_statistics(network, cfg, &mixed, &law, s, opts, antithetic)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    } else {
        let flat: Vec<[f64; 3]> = (0..(units * configs.len()) as u64)
            .into_par_iter()
            .map(|idx| {
                let (g, k) = (idx / units as u64, idx % units as u64);
                let cfg = &configs[g as usize];
                let s = root.derive(Purpose::Grid, g).derive(Purpose::Trial, k);
                let mixed = build_mask(&profile, n, s.derive(Purpose::Mask, 0))?;
                let network = Network::draw(cfg, &law, mode, n, s)?;
                case_statistics(&network, cfg, &mixed, &law, s, opts, antithetic)
            })
            .collect::<Result<_>>()?;
        (0..units)
            .map(|k| (0..configs.len()).map(|g| flat[g * units + k]).collect())
            .collect()
    };

    let mut table = ResultTable::new(&[
        var.as_str(),
        "mean_silent",
        "mean_alternating",
        "mean_transmit",
        "se_silent",
        "se_alternating",
        "se_transmit",
        "se_diff_transmit_alternating",
        "se_diff_alternating_silent",
    ]);
    for (g, &v) in grid.iter().enumerate() {
        let case = |c: usize| stats.iter().map(|u| u[g][c]).collect::<Vec<f64>>();
        let diff = |a: usize, b: usize| stats.iter().map(|u| u[g][a] - u[g][b]).collect::<Vec<f64>>();
        let (s, m, t) = (case(0), case(1), case(2));
        table.push(vec![
            v,
            stats::mean(&s),
            stats::mean(&m),
            stats::mean(&t),
            stats::std_error(&s),
            stats::std_error(&m),
            stats::std_error(&t),
            stats::std_error(&diff(2, 1)),
            stats::std_error(&diff(1, 0)),
        ]);
    }
    Ok(table)
}

fn frozen_network(cfg: &SystemConfig, root: SeedStream) -> Result<(FieldRealization, FadingDraw)> {
    let field = sample_field(cfg.lambda, &cfg.region, root.derive(Purpose::Field, 0))?;
    let fading = draw_fading(&field, cfg.h_aw_fixed, root.derive(Purpose::Fading, 0));
    Ok((field, fading))
}

/// Five-number summaries of T over runs on one frozen network (fig6).
/// The `p` column is 0 for silent, 1 for transmitting and the schedule's
/// probability for the mixed case.
pub fn fig6(spec: &ExperimentSpec) -> Result<ResultTable> {
    let base = spec.settings.system()?;
    let law = spec.settings.law()?;
    let opts = synthesis_options(spec)?;
    let trials = spec.trials()? as u64;
    let var = spec.sweep_variable().to_string();
    let grid = spec.grid()?;
    let n_grid = spec.settings.list("experiment.n_grid")?;
    let p: f64 = spec.settings.get("scheduler.p")?;
    let root = spec.root_stream()?;
    let (field, fading) = frozen_network(&base, root)?;
    let mut table = ResultTable::new(&["n", var.as_str(), "p", "min", "q1", "median", "q3", "max", "mean"]);
    for (a, &nf) in n_grid.iter().enumerate() {
        ensure(nf >= 1.0 && nf.fract() == 0.0, "n_grid", "entries must be positive integers")?;
        let n = nf as usize;
        let profile = spec.settings.schedule_with(None, n)?;
        for (b, &v) in grid.iter().enumerate() {
            let mut cfg = base;
            apply_sweep(&mut cfg, &var, v)?;
            let cell = root.derive(Purpose::Grid, (a * grid.len() + b) as u64);
            let runs = (0..trials)
                .into_par_iter()
                .map(|r| {
                    let s = cell.derive(Purpose::Trial, r);
                    let mixed = build_mask(&profile, n, s.derive(Purpose::Mask, 0))?;
                    let t = |mask: &ScheduleMask| -> Result<f64> {
                        Ok(radiometer_statistic(&synthesize_with(&cfg, &field, &fading, mask, &law, s, opts)?))
                    };
                    Ok([t(&ScheduleMask::all_off(n))?, t(&mixed)?, t(&ScheduleMask::all_on(n))?])
                })
                .collect::<Result<Vec<[f64; 3]>>>()?;
            for (c, case_p) in [0.0, p, 1.0].into_iter().enumerate() {
                let ts: Vec<f64> = runs.iter().map(|r| r[c]).collect();
                let f = five_number(&ts);
                table.push(vec![nf, v, case_p, f.min, f.q1, f.median, f.q3, f.max, stats::mean(&ts)]);
            }
        }
    }
    Ok(table)
}

/// One realized schedule mask (fig7).
pub fn fig7(spec: &ExperimentSpec) -> Result<ResultTable> {
    let n = spec.n()?;
    let profile = spec.settings.schedule_with(None, n)?;
    let mask = build_mask(&profile, n, spec.root_stream()?.derive(Purpose::Mask, 0))?;
    let mut table = ResultTable::new(&["slot", "on"]);
    for (i, &on) in mask.slots().iter().enumerate() {
        table.push(vec![i as f64, if on { 1.0 } else { 0.0 }]);
    }
    Ok(table)
}

/// Calibrated threshold versus short sampling intervals (fig8).
///
/// Willie calibrates T over `detector.calibration_samples` samples while
/// Alice transmits with probability `detector.calibration_p`, sets the
/// threshold to that value plus `detector.gamma`, then scores `trials`
/// intervals of `detector.interval` samples for each p in `experiment.p_grid`.
pub fn fig8(spec: &ExperimentSpec) -> Result<ResultTable> {
    let base = spec.settings.system()?;
    let law = spec.settings.law()?;
    let opts = synthesis_options(spec)?;
    let trials = spec.trials()? as u64;
    let var = spec.sweep_variable().to_string();
    let grid = spec.grid()?;
    let p_grid = spec.settings.list("experiment.p_grid")?;
    let gamma: f64 = spec.settings.get("detector.gamma")?;
    let cal_n: usize = spec.settings.get("detector.calibration_samples")?;
    let cal_p: f64 = spec.settings.get("detector.calibration_p")?;
    let interval: usize = spec.settings.get("detector.interval")?;
    ensure(cal_n >= 1, "calibration_samples", "need at least one calibration sample")?;
    ensure(interval >= 1, "interval", "need at least one sample per interval")?;
    let root = spec.root_stream()?;
    let (field, fading) = frozen_network(&base, root)?;
    let mut table = ResultTable::new(&[var.as_str(), "p", "threshold", "mean", "q1", "median", "q3", "exceed_rate"]);
    for (g, &v) in grid.iter().enumerate() {
        let mut cfg = base;
        apply_sweep(&mut cfg, &var, v)?;
        let cal_stream = root.derive(Purpose::Calibration, 0);
        let cal_mask = build_mask(&ScheduleProfile::IidBernoulli { p: cal_p }, cal_n, cal_stream.derive(Purpose::Mask, 0))?;
        let calibrated = radiometer_statistic(&synthesize_with(&cfg, &field, &fading, &cal_mask, &law, cal_stream, opts)?);
        let threshold = calibrated + gamma;
        for (j, &p) in p_grid.iter().enumerate() {
            let profile = spec.settings.schedule_with(Some(p), interval)?;
            let cell = root.derive(Purpose::Grid, (g * p_grid.len() + j) as u64);
            let ts = (0..trials)
                .into_par_iter()
                .map(|r| {
                    let s = cell.derive(Purpose::Trial, r);
                    let mask = build_mask(&profile, interval, s.derive(Purpose::Mask, 0))?;
                    Ok(radiometer_statistic(&synthesize_with(&cfg, &field, &fading, &mask, &law, s, opts)?))
                })
                .collect::<Result<Vec<f64>>>()?;
            let f = five_number(&ts);
            let exceed = ts.iter().filter(|&&t| t > threshold).count() as f64 / ts.len() as f64;
            table.push(vec![v, p, threshold, stats::mean(&ts), f.q1, f.median, f.q3, exceed]);
        }
    }
    Ok(table)
}

/// Monte Carlo probability that SIR ≥ ξ for a link of length `d` with
/// Rayleigh fading on every link and no background noise. The receiver sits
/// at the region center and the transmitter is not part of the field.
pub fn sinr_success_rate(
    lambda: f64,
    xi: f64,
    d: f64,
    law: &PathLossLaw,
    region: &Region,
    trials: usize,
    stream: SeedStream,
) -> Result<(f64, f64)> {
    ensure(trials >= 1, "trials", "need at least one trial")?;
    ensure(xi > 0.0, "xi", "SINR threshold must be positive")?;
    let rx = region.center();
    let signal_gain = law.attenuation(d)?;
    let successes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = stream.derive(Purpose::Trial, t);
            let field = sample_field(lambda, region, s.derive(Purpose::Field, 0))?;
            let fading = draw_fading(&field, false, s.derive(Purpose::Fading, 0));
            let interference = aggregate_interference_power(&field, rx, law, 1.0, &fading)?;
            Ok(fading.alice * signal_gain >= xi * interference)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count();
    let rate = successes as f64 / trials as f64;
    Ok((rate, stats::binomial_se(rate, trials)))
}

/// Spatial throughput versus density: closed forms and a Monte Carlo check.
pub fn throughput(spec: &ExperimentSpec) -> Result<ResultTable> {
    let cfg = spec.settings.system()?;
    let xi: f64 = spec.settings.get("experiment.xi")?;
    let c: f64 = spec.settings.get("experiment.c")?;
    let n = spec.n()? as f64;
    let trials = spec.trials()?;
    let law = PathLossLaw::unbounded(cfg.alpha)?;
    let root = spec.root_stream()?;
    let mut table = ResultTable::new(&["lambda", "tau_i", "tau_i_mc", "se_tau_i_mc", "tau_j_upper"]);
    for (g, lambda) in spec.grid()?.into_iter().enumerate() {
        let (rate, se) = sinr_success_rate(
            lambda,
            xi,
            cfg.d_ab,
            &law,
            &cfg.region,
            trials,
            root.derive(Purpose::Grid, g as u64),
        )?;
        table.push(vec![
            lambda,
            analytics::spatial_throughput_interference(lambda, xi, cfg.d_ab, cfg.delta())?,
            lambda * rate,
            lambda * se,
            analytics::spatial_throughput_jamming_upper(lambda, xi, cfg.d_ab, cfg.alpha, n, c)?,
        ]);
    }
    Ok(table)
}

/// Closed-form covertness and reliability bounds versus n. Cells that have no
/// value at the given inputs are NaN.
pub fn bounds(spec: &ExperimentSpec) -> Result<ResultTable> {
    let cfg = spec.settings.system()?;
    let eps: f64 = spec.settings.get("detector.epsilon")?;
    let delta = cfg.delta();
    let mut table = ResultTable::new(&[
        "n",
        "willie_lb",
        "min_covert_distance",
        "capacity_bits",
        "bob_full",
        "bob_asymptotic",
        "cheb_gamma",
    ]);
    for n in spec.grid()? {
        ensure(n >= 1.0, "n", "grid entries must be at least 1")?;
        let capacity = match analytics::covert_capacity_bits(n, eps, cfg.lambda, delta) {
            Ok(bits) => bits,
            Err(Error::NoCovertCapacity { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        let (bob_full, bob_asym) = if cfg.alpha == 4.0 {
            let b = analytics::bob_error_upper_bound(n, 0.0, cfg.lambda, cfg.pt, cfg.noise_b, cfg.d_ab, cfg.alpha)?;
            (b.full.value, b.asymptotic.value)
        } else {
            (f64::NAN, f64::NAN)
        };
        let gamma = if cfg.rho > 0.0 {
            detector::chebyshev_threshold(eps, n as usize, cfg.noise_w, cfg.lambda, cfg.rho, cfg.pt)?
        } else {
            f64::NAN
        };
        table.push(vec![
            n,
            analytics::willie_error_lower_bound(n, cfg.lambda, delta, cfg.d_aw)?.value,
            analytics::min_covert_distance(n, eps, cfg.lambda, delta)?,
            capacity,
            bob_full,
            bob_asym,
            gamma,
        ]);
    }
    Ok(table)
}

/// Empirical radiometer error rates over a threshold sweep, next to the
/// covertness lower bound.
pub fn detection(spec: &ExperimentSpec) -> Result<ResultTable> {
    let cfg = spec.settings.system()?;
    let n = spec.n()?;
    let setup = ErrorRateSetup {
        config: cfg,
        law: spec.settings.law()?,
        n,
        schedule: spec.settings.schedule_with(None, n)?,
        reference: spec.settings.reference()?,
        field_mode: spec.settings.field_mode()?,
        trials: spec.trials()?,
    };
    let samples = collect_statistics(&setup, spec.root_stream()?)?;
    let bound = if cfg.lambda > 0.0 {
        analytics::willie_error_lower_bound(n as f64, cfg.lambda, cfg.delta(), cfg.d_aw)?.value
    } else {
        f64::NAN
    };
    let mut table = ResultTable::new(&["gamma", "p_fa", "p_md", "p_e", "se_e", "willie_lb"]);
    for gamma in spec.grid()? {
        let r = samples.rates(gamma);
        table.push(vec![gamma, r.p_fa, r.p_md, r.p_e, r.se_e, bound]);
    }
    Ok(table)
}
