//! Capacity and outage analysis of a two-hop power-line / visible-light link
//! joined by a decode-and-forward relay, with a Monte Carlo cross-check.
//!
//! The first hop is a PLC channel with log-normal fading; the second an
//! indoor VLC downlink with a uniformly placed receiver under a Lambertian LED.

pub mod config;
pub mod error;
pub mod montecarlo;
pub mod plc;
pub mod relay;
pub mod specfun;
pub mod sweep;
pub mod vlc;

pub use config::{load_config, parse_config, Config};
pub use error::{Error, Result};
pub use montecarlo::{estimate, Estimate, McConfig, Metric};
pub use plc::PlcLinkParams;
pub use relay::{e2e_capacity, e2e_outage, rate_to_snr_threshold, RelaySystem, RelaySystemParams};
pub use sweep::{
    check_trends, compare_systems, evaluate, figure_preset, run_sweep, validate, Family,
    FigurePreset, RunReport, SweepRecord, SweepSpec, SweepVar, ValidationReport,
};
pub use vlc::{VlcLink, VlcLinkParams};
