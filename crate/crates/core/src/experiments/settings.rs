//! Layered `section.key = value` settings: figure defaults, then a config
//! file, then `--set` overrides, then explicit flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{FieldMode, InterferenceSynthesis, PathLossKind, PathLossLaw, SystemConfig};
use crate::detector::ReferenceMode;
use crate::error::{Error, Result};
use crate::ppp_field::Region;
use crate::scheduler::ScheduleProfile;

use super::ExperimentId;

/// Every key a setting may use, with its common default.
const COMMON: &[(&str, &str)] = &[
    ("system.lambda", "1"),
    ("system.alpha", "4"),
    ("system.pt", "1"),
    ("system.noise_w", "1"),
    ("system.noise_b", "1"),
    ("system.rho", "1"),
    ("system.d_aw", "1"),
    ("system.d_ab", "1"),
    ("system.h_aw_fixed", "true"),
    ("system.region_side", "100"),
    ("channel.law", "min_bounded"),
    ("channel.field_mode", "frozen"),
    ("channel.synthesis", "aggregate"),
    ("scheduler.profile", "alternating"),
    ("scheduler.p", "0.5"),
    ("scheduler.p_start", "0"),
    ("scheduler.p_end", "0.5"),
    ("scheduler.ramp_slots", "0"),
    ("scheduler.packet_slots", "1"),
    ("scheduler.gap_slots", "1"),
    ("detector.reference", "realized"),
    ("detector.reference_level", "0"),
    ("detector.gamma", "0"),
    ("detector.epsilon", "0.1"),
    ("detector.calibration_samples", "10000"),
    ("detector.calibration_p", "0"),
    ("detector.interval", "100"),
    ("experiment.seed", "1"),
    ("experiment.trials", "100"),
    ("experiment.n", "100"),
    ("experiment.sweep", "none"),
    ("experiment.grid", "0"),
    ("experiment.n_grid", "100"),
    ("experiment.p_grid", "0.5"),
    ("experiment.antithetic", "false"),
    ("experiment.xi", "1"),
    ("experiment.c", "1"),
];

fn figure_defaults(id: ExperimentId) -> &'static [(&'static str, &'static str)] {
    match id {
        ExperimentId::Fig2 => &[
            ("channel.law", "smooth_bounded"),
            ("channel.field_mode", "per_sample"),
            ("experiment.n", "1000"),
            ("experiment.trials", "1"),
        ],
        ExperimentId::Fig3 => &[("experiment.n", "100"), ("experiment.trials", "100")],
        ExperimentId::Fig4 => &[
            ("channel.field_mode", "per_sample"),
            ("experiment.n", "500"),
            ("experiment.sweep", "pt"),
            ("experiment.grid", "1,2,5,10,20,50,100"),
            ("experiment.antithetic", "true"),
        ],
        ExperimentId::Fig5 => &[
            ("system.pt", "10"),
            ("scheduler.profile", "bernoulli"),
            ("experiment.n", "500"),
            ("experiment.sweep", "d_aw"),
            ("experiment.grid", "1,2,3,4,5,6,7,8,9,10"),
            ("experiment.antithetic", "true"),
        ],
        ExperimentId::Fig6 => &[
            ("system.pt", "10"),
            ("scheduler.profile", "bernoulli"),
            ("experiment.trials", "20"),
            ("experiment.sweep", "d_aw"),
            ("experiment.grid", "0.5,1,1.5,2,2.5,3"),
            ("experiment.n_grid", "1000,3000"),
        ],
        ExperimentId::Fig7 => &[("scheduler.profile", "shaped"), ("experiment.n", "24"), ("experiment.trials", "1")],
        ExperimentId::Fig8 => &[
            ("system.pt", "10"),
            ("scheduler.profile", "bernoulli"),
            ("experiment.sweep", "d_aw"),
            ("experiment.grid", "0.5,1,1.5,2,2.5,3"),
            ("experiment.p_grid", "0.9,0.1,0.5"),
        ],
        ExperimentId::Throughput => &[
            ("experiment.sweep", "lambda"),
            ("experiment.grid", "0.01,0.02,0.05,0.1,0.2,0.5,1"),
            ("experiment.trials", "10000"),
            ("experiment.n", "100"),
        ],
        ExperimentId::Bounds => &[
            ("system.lambda", "0.01"),
            ("system.d_aw", "10"),
            ("experiment.sweep", "n"),
            ("experiment.grid", "100,1000,10000,100000,1000000"),
        ],
        ExperimentId::Detection => &[
            ("channel.law", "unbounded"),
            ("channel.synthesis", "aggregate"),
            ("scheduler.profile", "continuous"),
            ("system.d_aw", "2"),
            ("experiment.trials", "2000"),
            ("experiment.sweep", "gamma"),
            ("experiment.grid", "0.001,0.01,0.1,0.3,1,3,10,100"),
        ],
    }
}

/// Keys that are written as metadata but never read back as settings.
pub const META_PREFIX: &str = "meta.";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn defaults(id: ExperimentId) -> Self {
        let mut values: BTreeMap<String, String> =
            COMMON.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (k, v) in figure_defaults(id) {
            values.insert(k.to_string(), v.to_string());
        }
        Settings { values }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => Err(Error::Config(format!("unknown setting `{key}`"))),
        }
    }

    /// Applies a `section.key=value` override.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected section.key=value, got `{assignment}`")))?;
        self.set(k, v)
    }

    /// Applies every `[section] key = value` entry of an INI file.
    pub fn apply_ini_file(&mut self, path: &Path) -> Result<()> {
        let conf = ini::Ini::load_from_file(path).map_err(|e| match e {
            ini::Error::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            ini::Error::Parse(p) => Error::Config(format!("{}: {p}", path.display())),
        })?;
        for (section, props) in conf.iter() {
            let Some(section) = section else {
                if props.is_empty() {
                    continue;
                }
                return Err(Error::Config(format!("{}: keys must sit inside a [section]", path.display())));
            };
            for (k, v) in props.iter() {
                self.set(&format!("{section}.{k}"), v)?;
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("setting `{key}` missing from the defaults table"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|_| Error::Config(format!("cannot parse `{key}` = `{raw}`")))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.raw(key);
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("cannot parse `{key}` = `{raw}` as a list of numbers")))
            })
            .collect()
    }

    pub fn system(&self) -> Result<SystemConfig> {
        let side: f64 = self.get("system.region_side")?;
        let cfg = SystemConfig {
            lambda: self.get("system.lambda")?,
            alpha: self.get("system.alpha")?,
            pt: self.get("system.pt")?,
            noise_w: self.get("system.noise_w")?,
            noise_b: self.get("system.noise_b")?,
            rho: self.get("system.rho")?,
            d_aw: self.get("system.d_aw")?,
            d_ab: self.get("system.d_ab")?,
            h_aw_fixed: self.get("system.h_aw_fixed")?,
            region: Region::square(side)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn law(&self) -> Result<PathLossLaw> {
        let alpha: f64 = self.get("system.alpha")?;
        let kind = match self.raw("channel.law") {
            "unbounded" => PathLossKind::Unbounded,
            "guard_truncated" => PathLossKind::GuardTruncated {
                rho: self.get("system.rho")?,
            },
            "smooth_bounded" => PathLossKind::SmoothBounded,
            "min_bounded" => PathLossKind::MinBounded,
            other => return Err(Error::Config(format!("unknown path-loss law `{other}`"))),
        };
        PathLossLaw::new(kind, alpha)
    }

    pub fn field_mode(&self) -> Result<FieldMode> {
        match self.raw("channel.field_mode") {
            "frozen" => Ok(FieldMode::Frozen),
            "per_sample" => Ok(FieldMode::PerSample),
            other => Err(Error::Config(format!("unknown field mode `{other}`"))),
        }
    }

    pub fn synthesis(&self) -> Result<InterferenceSynthesis> {
        match self.raw("channel.synthesis") {
            "aggregate" => Ok(InterferenceSynthesis::Aggregate),
            "per_interferer" => Ok(InterferenceSynthesis::PerInterferer),
            other => Err(Error::Config(format!("unknown synthesis mode `{other}`"))),
        }
    }

    /// The configured schedule, with `scheduler.p` overridden by `p` when given.
    pub fn schedule_with(&self, p: Option<f64>, n: usize) -> Result<ScheduleProfile> {
        let p = match p {
            Some(p) => p,
            None => self.get("scheduler.p")?,
        };
        let ramp: usize = self.get("scheduler.ramp_slots")?;
        let ramp = if ramp == 0 { (n / 10).max(1) } else { ramp };
        let profile = match self.raw("scheduler.profile") {
            "silent" => ScheduleProfile::Silent,
            "continuous" => ScheduleProfile::Continuous,
            "bernoulli" => ScheduleProfile::IidBernoulli { p },
            "alternating" => ScheduleProfile::DeterministicAlternating,
            "shaped" => ScheduleProfile::Shaped {
                packet_slots: self.get("scheduler.packet_slots")?,
                gap_slots: self.get("scheduler.gap_slots")?,
            },
            "slow_start" => ScheduleProfile::SlowStart {
                p_start: self.get("scheduler.p_start")?,
                p_end: self.get("scheduler.p_end")?,
                ramp_slots: ramp,
            },
            "slow_stop" => ScheduleProfile::SlowStop {
                p_start: self.get("scheduler.p_start")?,
                p_end: self.get("scheduler.p_end")?,
                ramp_slots: ramp,
            },
            other => return Err(Error::Config(format!("unknown schedule profile `{other}`"))),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn reference(&self) -> Result<ReferenceMode> {
        match self.raw("detector.reference") {
            "realized" => Ok(ReferenceMode::RealizedPower),
            "conditional" => Ok(ReferenceMode::ConditionalMeanSquare),
            "fixed" => Ok(ReferenceMode::Fixed(self.get("detector.reference_level")?)),
            "absolute" => Ok(ReferenceMode::Absolute),
            other => Err(Error::Config(format!("unknown reference mode `{other}`"))),
        }
    }
}
