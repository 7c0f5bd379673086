//! Seeded, configuration-driven experiments that regenerate each figure's
//! data as a CSV table.
//!
//! | id | columns |
//! |----|---------|
//! | `fig2` | index, noise, interference |
//! | `fig3` | trace, index, y2_silent, y2_transmit, y2_alternating |
//! | `fig4`, `fig5` | sweep value, mean_*, se_*, se_diff_* (see [`figures`]) |
//! | `fig6` | n, d_aw, p, min, q1, median, q3, max, mean |
//! | `fig7` | slot, on |
//! | `fig8` | d_aw, p, threshold, mean, q1, median, q3, exceed_rate |
//! | `throughput` | lambda, tau_i, tau_i_mc, se_tau_i_mc, tau_j_upper |
//! | `bounds` | n, willie_lb, min_covert_distance, capacity_bits, bob_full, bob_asymptotic, cheb_gamma |
//! | `detection` | gamma, p_fa, p_md, p_e, se_e, willie_lb |

pub mod figures;
pub mod settings;
pub mod table;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::rng::SeedStream;

pub use settings::Settings;
pub use table::{emit_table, read_table, ResultTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Throughput,
    Bounds,
    Detection,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Fig2,
        ExperimentId::Fig3,
        ExperimentId::Fig4,
        ExperimentId::Fig5,
        ExperimentId::Fig6,
        ExperimentId::Fig7,
        ExperimentId::Fig8,
        ExperimentId::Throughput,
        ExperimentId::Bounds,
        ExperimentId::Detection,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Fig7 => "fig7",
            ExperimentId::Fig8 => "fig8",
            ExperimentId::Throughput => "throughput",
            ExperimentId::Bounds => "bounds",
            ExperimentId::Detection => "detection",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// One fully resolved experiment: its id and every setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub settings: Settings,
}

impl ExperimentSpec {
    /// The experiment's default settings.
    pub fn new(id: ExperimentId) -> Self {
        ExperimentSpec {
            id,
            settings: Settings::defaults(id),
        }
    }

    /// Rebuilds a spec from the metadata lines of an emitted table.
    pub fn from_metadata(metadata: &[(String, String)]) -> Result<Self> {
        let id = metadata
            .iter()
            .find(|(k, _)| k == "meta.experiment")
            .ok_or_else(|| Error::Config("metadata has no `meta.experiment` entry".into()))?
            .1
            .parse()?;
        let mut spec = ExperimentSpec::new(id);
        for (k, v) in metadata {
            if !k.starts_with(settings::META_PREFIX) {
                spec.settings.set(k, v)?;
            }
        }
        Ok(spec)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        self.settings.set(key, &value.to_string())
    }

    pub fn seed(&self) -> Result<u64> {
        self.settings.get("experiment.seed")
    }

    pub fn root_stream(&self) -> Result<SeedStream> {
        Ok(SeedStream::from_master(self.seed()?))
    }

    pub fn trials(&self) -> Result<usize> {
        self.settings.get("experiment.trials")
    }

    pub fn n(&self) -> Result<usize> {
        self.settings.get("experiment.n")
    }

    pub fn sweep_variable(&self) -> &str {
        self.settings.raw("experiment.sweep")
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.settings.list("experiment.grid")
    }

    /// Checks every setting the experiment reads.
    pub fn validate(&self) -> Result<()> {
        let s = &self.settings;
        ensure(self.trials()? >= 1, "trials", "need at least one trial")?;
        ensure(self.n()? >= 1, "n", "need at least one sample")?;
        ensure(!self.grid()?.is_empty(), "grid", "sweep grid must be non-empty")?;
        ensure(!s.list("experiment.n_grid")?.is_empty(), "n_grid", "must be non-empty")?;
        ensure(!s.list("experiment.p_grid")?.is_empty(), "p_grid", "must be non-empty")?;
        s.system()?;
        s.law()?;
        s.field_mode()?;
        s.synthesis()?;
        s.reference()?;
        s.schedule_with(None, self.n()?)?;
        s.get::<bool>("experiment.antithetic")?;
        s.get::<f64>("detector.gamma")?;
        s.get::<f64>("detector.epsilon")?;
        s.get::<f64>("detector.calibration_p")?;
        s.get::<usize>("detector.calibration_samples")?;
        s.get::<usize>("detector.interval")?;
        s.get::<f64>("experiment.xi")?;
        s.get::<f64>("experiment.c")?;
        figures::check_sweep(self)
    }

    /// Metadata that reproduces the table: id, version and every setting.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut m = vec![
            ("meta.experiment".to_string(), self.id.to_string()),
            ("meta.version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        m.extend(self.settings.iter().map(|(k, v)| (k.to_string(), v.to_string())));
        m
    }
}

/// Runs the experiment's protocol and attaches the reproducing metadata.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut table = match spec.id {
        ExperimentId::Fig2 => figures::fig2(spec),
        ExperimentId::Fig3 => figures::fig3(spec),
        ExperimentId::Fig4 | ExperimentId::Fig5 => figures::mean_sweep(spec),
        ExperimentId::Fig6 => figures::fig6(spec),
        ExperimentId::Fig7 => figures::fig7(spec),
        ExperimentId::Fig8 => figures::fig8(spec),
        ExperimentId::Throughput => figures::throughput(spec),
        ExperimentId::Bounds => figures::bounds(spec),
        ExperimentId::Detection => figures::detection(spec),
    }?;
    table.metadata = spec.metadata();
    Ok(table)
}

/// `<dir>/<id>.csv`
pub fn output_path(dir: &Path, id: ExperimentId) -> PathBuf {
    dir.join(format!("{id}.csv"))
}

/// Runs `spec` and writes its table into `dir`, returning the file path.
pub fn run_to_dir(spec: &ExperimentSpec, dir: &Path) -> Result<PathBuf> {
    let table = run(spec)?;
    let path = output_path(dir, spec.id);
    emit_table(&table, &path)?;
    Ok(path)
}
