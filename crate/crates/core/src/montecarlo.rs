//! Sampling oracle for the analytic link metrics.
//!
//! Trial `i` draws a standard normal for the PLC fading and a uniform for the
//! VLC user position. Both come from ChaCha8 keyed by the run seed: the PLC
//! normal uses stream 0 at word offset `4 i` (two 64-bit outputs through
//! Box-Muller), the VLC uniform uses stream 1 at word offset `2 i`. A trial's
//! draws are therefore a pure function of `(seed, i)`.
//!
//! Trials are grouped into batches of `batch_size`. Each batch reduces to a
//! `(count, mean, M2)` partial in trial order, and partials are merged by a
//! fixed pairwise tree over batch index, so results do not depend on the
//! number of worker threads.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::plc::PlcLinkParams;
use crate::relay::RelaySystem;
use crate::vlc::VlcLink;

/// Estimates from fewer trials are refused.
pub const MIN_TRIALS: u64 = 1_000;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 20_190_501;
pub const DEFAULT_BATCH_SIZE: u64 = 8_192;

const PLC_STREAM: u64 = 0;
const VLC_STREAM: u64 = 1;
const PLC_WORDS_PER_TRIAL: u128 = 4;
const VLC_WORDS_PER_TRIAL: u128 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(invalid(format!(
                "at least {MIN_TRIALS} trials are required, got {}",
                self.trials
            )));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size must be positive"));
        }
        Ok(())
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    /// `|value - mean| <= k * std_error`.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (value - self.mean).abs() <= k * self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    PlcAvgCapacity,
    VlcAvgCapacity,
    E2eAvgCapacity,
    PlcOutage,
    VlcOutage,
    E2eOutage,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::PlcAvgCapacity,
        Metric::VlcAvgCapacity,
        Metric::E2eAvgCapacity,
        Metric::PlcOutage,
        Metric::VlcOutage,
        Metric::E2eOutage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PlcAvgCapacity => "plc_avg_capacity",
            Metric::VlcAvgCapacity => "vlc_avg_capacity",
            Metric::E2eAvgCapacity => "e2e_avg_capacity",
            Metric::PlcOutage => "plc_outage",
            Metric::VlcOutage => "vlc_outage",
            Metric::E2eOutage => "e2e_outage",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown metric {s:?}")))
    }
}

/// Relay SNR for a standard-normal fading draw `u`.
pub fn sample_plc_snr(p: &PlcLinkParams, u: f64) -> f64 {
    plc_snr(p.snr_scale(), p, u)
}

fn plc_snr(scale: f64, p: &PlcLinkParams, u: f64) -> f64 {
    scale * 10f64.powf((p.fading_mu_db + p.fading_sigma_db * u) / 5.0)
}

/// Destination SNR for a user placed by the uniform draw `v` in `[0, 1]`.
pub fn sample_vlc_snr(link: &VlcLink, v: f64) -> f64 {
    let r_k = link.params().cell_radius_m * v.sqrt();
    let h = link.gain_at(r_k);
    link.params().snr_scale() * h * h
}

/// Per-trial `(normal, uniform)` draws starting at a given trial index.
pub struct TrialDraws {
    plc: ChaCha8Rng,
    vlc: ChaCha8Rng,
}

impl TrialDraws {
    pub fn new(seed: u64, first_trial: u64) -> Self {
        let mut plc = ChaCha8Rng::seed_from_u64(seed);
        plc.set_stream(PLC_STREAM);
        plc.set_word_pos(first_trial as u128 * PLC_WORDS_PER_TRIAL);
        let mut vlc = ChaCha8Rng::seed_from_u64(seed);
        vlc.set_stream(VLC_STREAM);
        vlc.set_word_pos(first_trial as u128 * VLC_WORDS_PER_TRIAL);
        TrialDraws { plc, vlc }
    }

    /// Next trial's standard normal (PLC fading) and uniform in `[0, 1)` (VLC position).
    pub fn next_trial(&mut self) -> (f64, f64) {
        let u1 = open_unit(self.plc.next_u64());
        let u2 = half_open_unit(self.plc.next_u64());
        let normal = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        let uniform = half_open_unit(self.vlc.next_u64());
        (normal, uniform)
    }
}

impl Iterator for TrialDraws {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        Some(self.next_trial())
    }
}

/// `(0, 1]`
fn open_unit(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `[0, 1)`
fn half_open_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy)]
struct Partial {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Partial {
    const EMPTY: Partial = Partial {
        count: 0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Partial, b: Partial) -> Partial {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let (na, nb, n) = (a.count as f64, b.count as f64, count as f64);
        let delta = b.mean - a.mean;
        Partial {
            count,
            mean: a.mean + delta * (nb / n),
            m2: a.m2 + b.m2 + delta * delta * (na * nb / n),
        }
    }
}

fn tree_merge(parts: &[Partial]) -> Partial {
    match parts.len() {
        0 => Partial::EMPTY,
        1 => parts[0],
        n => {
            let (lo, hi) = parts.split_at(n / 2);
            Partial::merge(tree_merge(lo), tree_merge(hi))
        }
    }
}

/// Estimates `metric` for `system` from `cfg.trials` independent trials.
///
/// Capacities are `log2(1 + snr)` per hop and `theta * min(...)` end to end.
/// Outages are indicator means of `snr < 2^(R_th/theta) - 1` per hop and of
/// `min(snr_plc, snr_vlc)` below that threshold end to end.
pub fn estimate(metric: Metric, system: &RelaySystem, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let plc = system.plc();
    let vlc = system.vlc();
    let scale = plc.snr_scale();
    let theta = system.params().duplex_factor;
    let threshold = system.snr_threshold();

    let statistic = |u: f64, v: f64| -> f64 {
        match metric {
            Metric::PlcAvgCapacity => plc_snr(scale, plc, u).ln_1p() / LN_2,
            Metric::VlcAvgCapacity => sample_vlc_snr(vlc, v).ln_1p() / LN_2,
            Metric::E2eAvgCapacity => {
                let c1 = plc_snr(scale, plc, u).ln_1p() / LN_2;
                let c2 = sample_vlc_snr(vlc, v).ln_1p() / LN_2;
                crate::relay::e2e_capacity(c1, c2, theta)
            }
            Metric::PlcOutage => indicator(plc_snr(scale, plc, u) < threshold),
            Metric::VlcOutage => indicator(sample_vlc_snr(vlc, v) < threshold),
            Metric::E2eOutage => {
                indicator(plc_snr(scale, plc, u).min(sample_vlc_snr(vlc, v)) < threshold)
            }
        }
    };

    let batches = cfg.trials.div_ceil(cfg.batch_size);
    let partials: Vec<Partial> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let first = batch * cfg.batch_size;
            let count = cfg.batch_size.min(cfg.trials - first);
            let mut draws = TrialDraws::new(cfg.seed, first);
            let mut acc = Partial::EMPTY;
            for _ in 0..count {
                let (u, v) = draws.next_trial();
                acc.push(statistic(u, v));
            }
            acc
        })
        .collect();
    let total = tree_merge(&partials);
    let n = total.count as f64;
    let variance = if total.count > 1 {
        total.m2 / (n - 1.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean: total.mean,
        std_error: (variance.max(0.0) / n).sqrt(),
        trials: total.count,
        seed: cfg.seed,
    })
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}
