//! Time sharing combined with hierarchical modulation for satellite
//! broadcast.
//!
//! The crate designs hierarchical 16-APSK constellations, estimates
//! per-stream decoding thresholds from constellation-constrained mutual
//! information, computes equal-rate allocations for receiver pairs and
//! populations, and simulates the throughput gain over a spot beam.

pub mod capacity;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod pairing;
pub mod rates;
pub mod sim;

pub use capacity::{CodeRate, ModCod, Modulation, Provenance, ThresholdTable};
pub use channel::{BeamConfig, Receiver, SpotBeam, TerminalClass, WeatherCdf};
pub use constellation::{Apsk16Params, Constellation, Qam16Params, StreamRole};
pub use error::{Error, Result};
pub use pairing::{PairingPlan, Strategy};
pub use rates::{evaluate_pair, PairEvaluation, RatePair};
pub use sim::{GainReport, Mode, ScenarioConfig, TrialOutcome};
