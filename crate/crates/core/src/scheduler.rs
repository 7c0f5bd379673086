//! Alice's slot-level transmission schedules.

use rand::Rng;

use crate::error::{ensure, Result};
use crate::rng::SeedStream;

/// How Alice spreads her transmissions over the slots of one observation window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleProfile {
    Silent,
    Continuous,
    /// Each slot independently on with probability `p`.
    IidBernoulli { p: f64 },
    /// on, off, on, off, ... starting with the first slot.
    DeterministicAlternating,
    /// `packet_slots` on followed by `gap_slots` off, repeated.
    Shaped { packet_slots: usize, gap_slots: usize },
    /// Per-slot probability ramps linearly from `p_start` to `p_end` over the
    /// first `ramp_slots` slots and then holds `p_end`.
    SlowStart { p_start: f64, p_end: f64, ramp_slots: usize },
    /// Holds `p_start` and ramps linearly down to `p_end` over the last
    /// `ramp_slots` slots.
    SlowStop { p_start: f64, p_end: f64, ramp_slots: usize },
}

impl ScheduleProfile {
    /// Slow start with the default ramp of 10% of the window.
    pub fn slow_start(p_start: f64, p_end: f64, n: usize) -> Self {
        ScheduleProfile::SlowStart {
            p_start,
            p_end,
            ramp_slots: (n / 10).max(1),
        }
    }

    pub fn slow_stop(p_start: f64, p_end: f64, n: usize) -> Self {
        ScheduleProfile::SlowStop {
            p_start,
            p_end,
            ramp_slots: (n / 10).max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| ensure((0.0..=1.0).contains(&p), "p", "probability must lie in [0, 1]");
        match *self {
            ScheduleProfile::Silent
            | ScheduleProfile::Continuous
            | ScheduleProfile::DeterministicAlternating => Ok(()),
            ScheduleProfile::IidBernoulli { p } => prob(p),
            ScheduleProfile::Shaped {
                packet_slots,
                gap_slots,
            } => {
                ensure(packet_slots >= 1, "packet_slots", "must be at least 1")?;
                ensure(gap_slots >= 1, "gap_slots", "must be at least 1")
            }
            ScheduleProfile::SlowStart {
                p_start,
                p_end,
                ramp_slots,
            }
            | ScheduleProfile::SlowStop {
                p_start,
                p_end,
                ramp_slots,
            } => {
                prob(p_start)?;
                prob(p_end)?;
                ensure(ramp_slots >= 1, "ramp_slots", "must be at least 1")
            }
        }
    }

    /// Long-run fraction of on-slots (the transmission probability p).
    pub fn nominal_duty(&self) -> f64 {
        match *self {
            ScheduleProfile::Silent => 0.0,
            ScheduleProfile::Continuous => 1.0,
            ScheduleProfile::IidBernoulli { p } => p,
            ScheduleProfile::DeterministicAlternating => 0.5,
            ScheduleProfile::Shaped {
                packet_slots,
                gap_slots,
            } => packet_slots as f64 / (packet_slots + gap_slots) as f64,
            ScheduleProfile::SlowStart { p_end, .. } => p_end,
            ScheduleProfile::SlowStop { p_start, .. } => p_start,
        }
    }

    /// Per-slot transmission probability for the random profiles.
    fn slot_probability(&self, i: usize, n: usize) -> f64 {
        match *self {
            ScheduleProfile::IidBernoulli { p } => p,
            ScheduleProfile::SlowStart {
                p_start,
                p_end,
                ramp_slots,
            } => {
                let t = ((i + 1) as f64 / ramp_slots as f64).min(1.0);
                p_start + (p_end - p_start) * t
            }
            ScheduleProfile::SlowStop {
                p_start,
                p_end,
                ramp_slots,
            } => {
                let ramp_begin = n.saturating_sub(ramp_slots);
                if i < ramp_begin {
                    p_start
                } else {
                    let t = ((i - ramp_begin + 1) as f64 / ramp_slots as f64).min(1.0);
                    p_start + (p_end - p_start) * t
                }
            }
            _ => unreachable!("deterministic profile"),
        }
    }
}

/// Which slots carry Alice's signal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleMask {
    slots: Vec<bool>,
}

impl ScheduleMask {
    pub fn from_slots(slots: Vec<bool>) -> Self {
        ScheduleMask { slots }
    }

    pub fn all_off(n: usize) -> Self {
        ScheduleMask {
            slots: vec![false; n],
        }
    }

    pub fn all_on(n: usize) -> Self {
        ScheduleMask {
            slots: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[bool] {
        &self.slots
    }

    pub fn is_on(&self, i: usize) -> bool {
        self.slots[i]
    }

    pub fn on_count(&self) -> usize {
        self.slots.iter().filter(|&&b| b).count()
    }

    pub fn any_on(&self) -> bool {
        self.slots.iter().any(|&b| b)
    }

    pub fn duty_cycle(&self) -> f64 {
        if self.slots.is_empty() {
            0.0
        } else {
            self.on_count() as f64 / self.slots.len() as f64
        }
    }
}

pub fn build_mask(profile: &ScheduleProfile, n: usize, stream: SeedStream) -> Result<ScheduleMask> {
    ensure(n >= 1, "n", "need at least one slot")?;
    profile.validate()?;
    let slots = match *profile {
        ScheduleProfile::Silent => vec![false; n],
        ScheduleProfile::Continuous => vec![true; n],
        ScheduleProfile::DeterministicAlternating => (0..n).map(|i| i % 2 == 0).collect(),
        ScheduleProfile::Shaped {
            packet_slots,
            gap_slots,
        } => (0..n)
            .map(|i| i % (packet_slots + gap_slots) < packet_slots)
            .collect(),
        _ => {
            let mut rng = stream.rng();
            (0..n)
                .map(|i| rng.random_bool(profile.slot_probability(i, n)))
                .collect()
        }
    };
    Ok(ScheduleMask { slots })
}

/// Mean radiometer output when Alice transmits each slot with probability `p`:
/// σ²_w0 + σ²_I + p·P_t/d^α.
pub fn expected_statistic(p: f64, noise_power: f64, interference_power: f64, pt: f64, d_aw: f64, alpha: f64) -> f64 {
    noise_power + interference_power + p * pt / d_aw.powf(alpha)
}
