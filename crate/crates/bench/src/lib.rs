//! Shared fixtures for the kernel benchmarks.

use plcvlc::{RelaySystem, RelaySystemParams};

/// The default two-hop system.
pub fn default_system() -> RelaySystem {
    RelaySystem::new(RelaySystemParams::default()).expect("defaults are valid")
}
