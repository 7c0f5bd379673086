//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use shadownet::analytics::{
    bob_error_upper_bound, ccdf_lower_bound_y, covert_capacity_bits, kappa, willie_error_lower_bound,
    willie_error_lower_bound_chain,
};
use shadownet::channel::{
    aggregate_interference_power, draw_fading, synthesize_with, FieldMode, Hypothesis, PathLossLaw, SynthesisOptions,
    SystemConfig,
};
use shadownet::detector::{
    chebyshev_threshold, collect_hypothesis, conditional_moments, fa_bound, radiometer_statistic, ErrorRateSetup,
    ReferenceMode,
};
use shadownet::experiments::{self, ExperimentId, ExperimentSpec, ResultTable};
use shadownet::experiments::figures::sinr_success_rate;
use shadownet::ppp_field::{nearest_interferer_distance, sample_field, Region};
use shadownet::scheduler::{build_mask, ScheduleMask, ScheduleProfile};
use shadownet::stats::{binomial_se, mean, std_error, variance, weighted_slope};
use shadownet::{Purpose, SeedStream};

type Outcome = (bool, String);

fn root(tag: u64) -> SeedStream {
    SeedStream::from_master(0x5eed_0000 + tag)
}

fn within_time(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fields = 100_000u64;
    let region = Region::square(20.0).unwrap();
    let s = root(1);
    let hits: u64 = (0..fields)
        .into_par_iter()
        .map(|t| {
            let field = sample_field(1.0, &region, s.derive(Purpose::Field, t)).unwrap();
            match nearest_interferer_distance(&field, region.center()) {
                Some(r) if r < 1.0 => 1,
                _ => 0,
            }
        })
        .sum();
    let p = hits as f64 / fields as f64;
    let elapsed = start.elapsed();
    let pass = (p - 0.9568).abs() <= 0.01 && within_time(elapsed, 30.0);
    (pass, format!("P{{r1<1}} = {p:.5} (target 0.9568 ± 0.01), {:.1} s (< 30 s)", elapsed.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let fields = 10_000u64;
    let region = Region::square(100.0).unwrap();
    let law = PathLossLaw::guard_truncated(1.0, 4.0).unwrap();
    let s = root(2);
    let powers: Vec<f64> = (0..fields)
        .into_par_iter()
        .map(|t| {
            let fs = s.derive(Purpose::Trial, t);
            let field = sample_field(1.0, &region, fs.derive(Purpose::Field, 0)).unwrap();
            let fading = draw_fading(&field, true, fs.derive(Purpose::Fading, 0));
            aggregate_interference_power(&field, region.center(), &law, 1.0, &fading).unwrap()
        })
        .collect();
    let (m, v) = (mean(&powers), variance(&powers));
    let (tm, tv) = (PI, 2.0 * PI / 3.0);
    let elapsed = start.elapsed();
    let pass = ((m - tm) / tm).abs() <= 0.02 && ((v - tv) / tv).abs() <= 0.05 && within_time(elapsed, 60.0);
    (
        pass,
        format!(
            "mean {m:.4} vs π ({:+.2}%, tol 2%), variance {v:.4} vs 2π/3 ({:+.2}%, tol 5%), {:.1} s (< 60 s)",
            100.0 * (m - tm) / tm,
            100.0 * (v - tv) / tv,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let law = PathLossLaw::unbounded(4.0).unwrap();
    let region = Region::square(100.0).unwrap();
    let (rate, se) = sinr_success_rate(0.05, 1.0, 1.0, &law, &region, 100_000, root(3)).unwrap();
    let target = (-(PI * PI / 2.0) * 0.05).exp();
    let rel = (rate - target) / target;
    let elapsed = start.elapsed();
    let pass = rel.abs() <= 0.02 && within_time(elapsed, 60.0);
    (
        pass,
        format!(
            "success {rate:.5} ± {se:.5} vs exp(-π²/2·0.05) = {target:.5} ({:+.2}%, tol 2%), {:.1} s (< 60 s)",
            100.0 * rel,
            elapsed.as_secs_f64()
        ),
    )
}

/// Third-moment-free standard error of a sample variance.
fn variance_se(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2) / n).sqrt()
}

fn criterion_4() -> Outcome {
    let n = 100;
    let resamples = 10_000u64;
    let law = PathLossLaw::guard_truncated(1.0, 4.0).unwrap();
    // (σ²_w0, λ, P_t, d_aw)
    let grid = [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 10.0, 1.5), (0.5, 0.1, 100.0, 2.0)];
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (g, &(noise_w, lambda, pt, d_aw)) in grid.iter().enumerate() {
        let cfg = SystemConfig {
            noise_w,
            lambda,
            pt,
            d_aw,
            region: Region::square(30.0).unwrap(),
            ..SystemConfig::default()
        };
        let s = root(4).derive(Purpose::Grid, g as u64);
        let field = sample_field(lambda, &cfg.region, s.derive(Purpose::Field, 0)).unwrap();
        let fading = draw_fading(&field, cfg.h_aw_fixed, s.derive(Purpose::Fading, 0));
        for (hypothesis, mask) in [(Hypothesis::H0, ScheduleMask::all_off(n)), (Hypothesis::H1, ScheduleMask::all_on(n))] {
            let runs: Vec<(f64, f64, f64)> = (0..resamples)
                .into_par_iter()
                .map(|r| {
                    let opts = SynthesisOptions {
                        noise_draw: r,
                        ..Default::default()
                    };
                    let trace = synthesize_with(&cfg, &field, &fading, &mask, &law, s, opts).unwrap();
                    let truth = trace.truth().unwrap();
                    (radiometer_statistic(&trace), truth.mean_shift_power, truth.alice_power)
                })
                .collect();
            let (shift, alice) = (runs[0].1, runs[0].2);
            assert!(runs.iter().all(|r| r.1 == shift), "noise redraw must keep the mean shift frozen");
            let ims = match hypothesis {
                Hypothesis::H0 => shift,
                Hypothesis::H1 => shift - alice,
            };
            let (em, ev) = conditional_moments(hypothesis, n, noise_w, ims, pt, d_aw, 4.0).unwrap();
            let t: Vec<f64> = runs.iter().map(|r| r.0).collect();
            let zm = (mean(&t) - em) / std_error(&t);
            let zv = (variance(&t) - ev) / variance_se(&t);
            worst = worst.max(zm.abs()).max(zv.abs());
            pass &= zm.abs() <= 3.0 && zv.abs() <= 3.0;
            cases += 1;
        }
    }
    (pass, format!("{cases} configurations, largest deviation {worst:.2} s.e. (tol 3 s.e.)"))
}

fn criterion_5() -> Outcome {
    let n = 100;
    let trials = 10_000;
    let epsilons = [0.01, 0.05, 0.1];
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_roundtrip = 0.0f64;
    for (i, &lambda) in [0.1, 0.5, 1.0].iter().enumerate() {
        for (j, &pt) in [1.0, 10.0, 100.0].iter().enumerate() {
            let config = SystemConfig {
                lambda,
                pt,
                noise_w: 1.0,
                rho: 1.0,
                region: Region::square(40.0).unwrap(),
                ..SystemConfig::default()
            };
            let setup = ErrorRateSetup {
                config,
                law: PathLossLaw::guard_truncated(1.0, 4.0).unwrap(),
                n,
                schedule: ScheduleProfile::Continuous,
                reference: ReferenceMode::ConditionalMeanSquare,
                field_mode: FieldMode::Frozen,
                trials,
            };
            let s = root(5).derive(Purpose::Grid, (3 * i + j) as u64);
            let h0 = collect_hypothesis(&setup, Hypothesis::H0, s).unwrap();
            for &eps in &epsilons {
                let gamma = chebyshev_threshold(eps, n, 1.0, lambda, 1.0, pt).unwrap();
                let back = fa_bound(n, gamma, 1.0, lambda, 1.0, pt).unwrap().value;
                worst_roundtrip = worst_roundtrip.max((back - eps).abs());
                let alarms = h0.iter().filter(|(t, r)| *t >= r + gamma).count();
                let p_fa = alarms as f64 / trials as f64;
                let limit = eps + 3.0 * binomial_se(p_fa, trials);
                worst_margin = worst_margin.min(limit - p_fa);
                pass &= p_fa <= limit;
            }
        }
    }
    pass &= worst_roundtrip <= 1e-12;
    (
        pass,
        format!(
            "27 (λ, P_t, ε) points, smallest margin ε + 3 s.e. − P_FA = {worst_margin:.4}; \
             |fa_bound(chebyshev_threshold(ε)) − ε| ≤ {worst_roundtrip:.1e} (tol 1e-12)"
        ),
    )
}

fn geomspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn criterion_6() -> Outcome {
    let gammas = geomspace(1e-3, 1e2, 50);
    let mut pass = true;
    let mut parts = Vec::new();
    for d_aw in [2.0, 5.0, 10.0] {
        let mut spec = ExperimentSpec::new(ExperimentId::Detection);
        spec.set("experiment.seed", 6).unwrap();
        spec.set("experiment.trials", 10_000).unwrap();
        spec.set("experiment.n", 100).unwrap();
        spec.set("experiment.grid", list(&gammas)).unwrap();
        spec.set("system.lambda", 1.0).unwrap();
        spec.set("system.alpha", 4.0).unwrap();
        spec.set("system.d_aw", d_aw).unwrap();
        let table = experiments::run(&spec).unwrap();
        let p_e = table.column("p_e").unwrap();
        let se = table.column("se_e").unwrap();
        let best = (0..p_e.len()).min_by(|&a, &b| p_e[a].total_cmp(&p_e[b])).unwrap();
        let lb = willie_error_lower_bound(100.0, 1.0, 0.5, d_aw).unwrap().value;
        let ok = p_e[best] >= lb - 3.0 * se[best];
        pass &= ok;
        parts.push(format!("d={d_aw}: min P_e {:.5} ± {:.5} vs bound {lb:.5}", p_e[best], se[best]));
    }
    (pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let (n, lambda, delta, d_aw) = (100.0, 1.0, 0.5, 2.0);
    let closed = willie_error_lower_bound(n, lambda, delta, d_aw).unwrap().value;
    let chain: Vec<f64> = [0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&pt| willie_error_lower_bound_chain(n, lambda, delta, d_aw, pt).unwrap())
        .collect();
    let spread = chain.iter().map(|v| (v - closed).abs()).fold(0.0, f64::max);
    let exact_ok = spread <= 1e-12;

    let traces = 2000u64;
    let samples = 100;
    let law = PathLossLaw::guard_truncated(1.0, 4.0).unwrap();
    let base = SystemConfig {
        noise_w: 0.0,
        lambda,
        d_aw,
        region: Region::square(40.0).unwrap(),
        ..SystemConfig::default()
    };
    let s = root(7);
    let gaps: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&pt| {
            let cfg = SystemConfig { pt, ..base };
            let (t0, t1): (Vec<f64>, Vec<f64>) = (0..traces)
                .into_par_iter()
                .map(|t| {
                    let ts = s.derive(Purpose::Trial, t);
                    let field = sample_field(lambda, &cfg.region, ts.derive(Purpose::Field, 0)).unwrap();
                    let fading = draw_fading(&field, cfg.h_aw_fixed, ts.derive(Purpose::Fading, 0));
                    let y = |mask: &ScheduleMask| {
                        radiometer_statistic(
                            &synthesize_with(&cfg, &field, &fading, mask, &law, ts, Default::default()).unwrap(),
                        )
                    };
                    (y(&ScheduleMask::all_off(samples)), y(&ScheduleMask::all_on(samples)))
                })
                .unzip();
            let (m0, m1) = (mean(&t0), mean(&t1));
            (m1 - m0) / m0
        })
        .collect();
    let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let variation = (hi - lo) / lo;
    (
        exact_ok && variation < 0.05,
        format!(
            "bound {closed:.6} at P_t ∈ {{0.1,1,10,100}}, max deviation {spread:.1e} (tol 1e-12); \
             relative gaps {:.5}/{:.5}/{:.5}, variation {:.2e} (tol 5%)",
            gaps[0], gaps[1], gaps[2], variation
        ),
    )
}

fn criterion_8() -> Outcome {
    let fields = 100_000u64;
    let delta = 0.5;
    let law = PathLossLaw::unbounded(4.0).unwrap();
    let levels = [0.2, 0.15, 0.1, 0.05, 0.02, 0.01];
    let mut pass = true;
    let mut worst = f64::INFINITY;
    let mut at = (0.0, 0.0);
    for (i, &lambda) in [0.5, 1.0].iter().enumerate() {
        let region = Region::square(40.0).unwrap();
        let s = root(8).derive(Purpose::Grid, i as u64);
        let ys: Vec<f64> = (0..fields)
            .into_par_iter()
            .map(|t| {
                let fs = s.derive(Purpose::Trial, t);
                let field = sample_field(lambda, &region, fs.derive(Purpose::Field, 0)).unwrap();
                let fading = draw_fading(&field, false, fs.derive(Purpose::Fading, 0));
                aggregate_interference_power(&field, region.center(), &law, 1.0, &fading).unwrap() / fading.alice
            })
            .collect();
        for &b in &levels {
            let y = (kappa(delta, 1.0) * lambda / b).powf(1.0 / delta);
            let bound = ccdf_lower_bound_y(y, lambda, delta, 1.0).unwrap().value;
            let ccdf = ys.iter().filter(|&&v| v > y).count() as f64 / fields as f64;
            let ratio = ccdf / bound;
            if ratio < worst {
                worst = ratio;
                at = (lambda, bound);
            }
            pass &= ccdf >= 0.9 * bound;
        }
    }
    (
        pass,
        format!(
            "smallest CCDF/bound ratio {worst:.4} (need ≥ 0.9) at λ={}, bound {:.2}; bound levels 0.2..0.01",
            at.0, at.1
        ),
    )
}

fn criterion_9() -> Outcome {
    let (eps, lambda, delta) = (0.1, 0.1, 0.5);
    let worst_step = [1e4, 1e5, 1e6]
        .iter()
        .map(|&n| {
            let step = covert_capacity_bits(4.0 * n, eps, lambda, delta).unwrap()
                - covert_capacity_bits(n, eps, lambda, delta).unwrap();
            (step - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let mut rel = 0.0f64;
    let mut forms = (0.0, 0.0);
    for lam in [0.01, 0.1, 1.0] {
        let bob = bob_error_upper_bound(1e6, 0.0, lam, 1.0, 1.0, 1.0, 4.0).unwrap();
        let r = (bob.full.value - bob.asymptotic.value).abs() / bob.asymptotic.value;
        if r >= rel {
            rel = r;
            forms = (bob.full.value, bob.asymptotic.value);
        }
    }
    (
        worst_step <= 1e-12 && rel <= 0.10,
        format!(
            "capacity step deviation from 1 bit {worst_step:.1e}; Bob full vs asymptotic at λ ∈ {{0.01,0.1,1}}, \
             worst {:.4e} vs {:.4e} ({:.2}%, tol 10%)",
            forms.0,
            forms.1,
            100.0 * rel
        ),
    )
}

fn criterion_10() -> Outcome {
    let n = 100;
    let traces = 10_000u64;
    let cfg = SystemConfig {
        pt: 10.0,
        noise_w: 1.0,
        d_aw: 1.0,
        region: Region::square(40.0).unwrap(),
        ..SystemConfig::default()
    };
    let law = PathLossLaw::min_bounded(4.0).unwrap();
    let s = root(10);
    let field = sample_field(cfg.lambda, &cfg.region, s.derive(Purpose::Field, 0)).unwrap();
    let fading = draw_fading(&field, cfg.h_aw_fixed, s.derive(Purpose::Fading, 0));
    let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
    let (means, ses): (Vec<f64>, Vec<f64>) = ps
        .iter()
        .map(|&p| {
            let t: Vec<f64> = (0..traces)
                .into_par_iter()
                .map(|k| {
                    let ks = s.derive(Purpose::Trial, k);
                    let mask = build_mask(&ScheduleProfile::IidBernoulli { p }, n, ks.derive(Purpose::Mask, 0)).unwrap();
                    radiometer_statistic(&synthesize_with(&cfg, &field, &fading, &mask, &law, ks, Default::default()).unwrap())
                })
                .collect();
            (mean(&t), std_error(&t))
        })
        .unzip();
    let fit = weighted_slope(&ps, &means, &ses);
    let target = cfg.pt / cfg.d_aw.powf(cfg.alpha);
    let rel = (fit.slope - target) / target;
    (
        rel.abs() <= 0.05,
        format!(
            "slope {:.4} ± {:.4} vs P_t/d^α = {target} ({:+.2}%, tol 5%)",
            fit.slope,
            fit.slope_se,
            100.0 * rel
        ),
    )
}

fn ordered(table: &ResultTable, hi: &str, lo: &str, se: &str) -> bool {
    let (h, l, s) = (table.column(hi).unwrap(), table.column(lo).unwrap(), table.column(se).unwrap());
    h.iter().zip(&l).zip(&s).all(|((h, l), s)| h - l > 3.0 * s)
}

fn fig3_ordered(table: &ResultTable) -> bool {
    let trace = table.column("trace").unwrap();
    let cols = ["y2_silent", "y2_alternating", "y2_transmit"].map(|c| table.column(c).unwrap());
    let count = trace.iter().fold(0.0f64, |m, &t| m.max(t)) as usize + 1;
    let mut stats = vec![[0.0; 3]; count];
    let mut lens = vec![0usize; count];
    for (row, &t) in trace.iter().enumerate() {
        for c in 0..3 {
            stats[t as usize][c] += cols[c][row];
        }
        lens[t as usize] += 1;
    }
    let per_trace: Vec<[f64; 3]> = stats
        .iter()
        .zip(&lens)
        .map(|(s, &l)| s.map(|v| v / l as f64))
        .collect();
    let diff = |a: usize, b: usize| -> bool {
        let d: Vec<f64> = per_trace.iter().map(|t| t[a] - t[b]).collect();
        mean(&d) > 3.0 * std_error(&d)
    };
    diff(2, 1) && diff(1, 0)
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let mut tables = std::collections::HashMap::new();
    for id in [
        ExperimentId::Fig2,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::Fig5,
        ExperimentId::Fig6,
        ExperimentId::Fig7,
        ExperimentId::Fig8,
    ] {
        tables.insert(id, experiments::run(&ExperimentSpec::new(id)).unwrap());
    }
    let elapsed = start.elapsed();

    let fig5 = &tables[&ExperimentId::Fig5];
    let d = fig5.column("d_aw").unwrap();
    let silent = weighted_slope(&d, &fig5.column("mean_silent").unwrap(), &fig5.column("se_silent").unwrap());
    let slope_ok = silent.slope.abs() <= 3.0 * silent.slope_se;

    let fig6 = &tables[&ExperimentId::Fig6];
    let (ns, ps) = (fig6.column("n").unwrap(), fig6.column("p").unwrap());
    let iqr = fig6.column("q3").unwrap().iter().zip(fig6.column("q1").unwrap()).map(|(a, b)| a - b).collect::<Vec<_>>();
    let mut case_ps: Vec<f64> = ps.clone();
    case_ps.sort_by(f64::total_cmp);
    case_ps.dedup();
    let mean_iqr = |n: f64, p: f64| {
        let v: Vec<f64> = (0..iqr.len()).filter(|&r| ns[r] == n && ps[r] == p).map(|r| iqr[r]).collect();
        mean(&v)
    };
    let iqr_ok = case_ps.len() == 3 && case_ps.iter().all(|&p| mean_iqr(3000.0, p) < mean_iqr(1000.0, p));

    let order_ok = fig3_ordered(&tables[&ExperimentId::Fig3])
        && [ExperimentId::Fig4, ExperimentId::Fig5].iter().all(|id| {
            let t = &tables[id];
            ordered(t, "mean_transmit", "mean_alternating", "se_diff_transmit_alternating")
                && ordered(t, "mean_alternating", "mean_silent", "se_diff_alternating_silent")
        });
    let time_ok = within_time(elapsed, 15.0 * 60.0);
    (
        slope_ok && iqr_ok && order_ok && time_ok,
        format!(
            "fig5 silent slope {:.2e} ± {:.2e} ({}); fig6 IQR shrinks with n ({}); case ordering ({}); suite {:.1} s (< 900 s)",
            silent.slope,
            silent.slope_se,
            if slope_ok { "ok" } else { "off" },
            if iqr_ok { "ok" } else { "off" },
            if order_ok { "ok" } else { "off" },
            elapsed.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 nearest-interferer probability", criterion_1),
        ("2 guard-zone interference moments", criterion_2),
        ("3 SINR success closed form", criterion_3),
        ("4 frozen-interference moments", criterion_4),
        ("5 threshold soundness", criterion_5),
        ("6 error lower bound dominance", criterion_6),
        ("7 transmit-power invariance", criterion_7),
        ("8 CCDF bound", criterion_8),
        ("9 capacity log-law and Bob bound forms", criterion_9),
        ("10 scheduler linearity", criterion_10),
        ("11 figure regressions", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(&format!("{f} "))) {
            continue;
        }
        let (pass, detail) = check();
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
