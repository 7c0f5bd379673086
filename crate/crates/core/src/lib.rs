//! Covert communication in aggregate network interference: Poisson
//! interference fields, radiometer detection, closed-form bounds and seeded
//! figure experiments.

pub mod analytics;
pub mod channel;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod ppp_field;
pub mod rng;
pub mod scheduler;
pub mod stats;

pub use error::{Error, Result};
pub use rng::{Purpose, SeedStream};
