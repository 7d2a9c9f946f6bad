//! Decode-and-forward composition of the two hops.

use crate::error::{field_error, invalid, Result};
use crate::plc::{nonnegative, PlcLinkParams};
use crate::specfun::integrate_piecewise;
use crate::vlc::{VlcLink, VlcLinkParams};

/// Half-duplex time sharing between the two hops.
pub const DEFAULT_DUPLEX_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RelaySystemParams {
    pub plc: PlcLinkParams,
    pub vlc: VlcLinkParams,
    /// Fraction of time each hop is active, in `(0, 1]`.
    pub duplex_factor: f64,
    /// End-to-end rate threshold `R_th` in bits/s/Hz.
    pub rate_threshold_bits: f64,
}

impl Default for RelaySystemParams {
    fn default() -> Self {
        RelaySystemParams {
            plc: PlcLinkParams::default(),
            vlc: VlcLinkParams::default(),
            duplex_factor: DEFAULT_DUPLEX_FACTOR,
            rate_threshold_bits: 1.0,
        }
    }
}

impl RelaySystemParams {
    pub fn validate(&self) -> Result<()> {
        self.plc.validate()?;
        self.vlc.validate()?;
        if !(self.duplex_factor > 0.0 && self.duplex_factor <= 1.0) {
            return Err(field_error(
                "duplex_factor",
                format!("must lie in (0, 1], got {}", self.duplex_factor),
            ));
        }
        nonnegative("rate_threshold_bits", self.rate_threshold_bits)
    }
}

/// Instantaneous end-to-end capacity `theta * min(c_plc, c_vlc)`.
pub fn e2e_capacity(c_plc: f64, c_vlc: f64, duplex_factor: f64) -> f64 {
    duplex_factor * c_plc.min(c_vlc)
}

/// Per-hop SNR threshold `2^(R_th / theta) - 1` equivalent to a rate threshold.
pub fn rate_to_snr_threshold(rate_threshold: f64, duplex_factor: f64) -> f64 {
    (rate_threshold / duplex_factor).exp2() - 1.0
}

/// Outage of two cascaded independent hops: the first fails, or it succeeds and the second fails.
pub fn e2e_outage(p_plc: f64, p_vlc: f64) -> f64 {
    p_plc + (1.0 - p_plc) * p_vlc
}

/// A validated two-hop system.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaySystem {
    params: RelaySystemParams,
    vlc: VlcLink,
}

impl RelaySystem {
    pub fn new(params: RelaySystemParams) -> Result<Self> {
        params.validate()?;
        let vlc = VlcLink::new(params.vlc.clone())?;
        Ok(RelaySystem { params, vlc })
    }

    pub fn params(&self) -> &RelaySystemParams {
        &self.params
    }

    pub fn plc(&self) -> &PlcLinkParams {
        &self.params.plc
    }

    pub fn vlc(&self) -> &VlcLink {
        &self.vlc
    }

    pub fn snr_threshold(&self) -> f64 {
        rate_to_snr_threshold(self.params.rate_threshold_bits, self.params.duplex_factor)
    }

    /// End-to-end outage at the configured rate threshold.
    pub fn e2e_outage_analytic(&self) -> Result<f64> {
        self.e2e_outage_at(self.params.rate_threshold_bits)
    }

    pub fn e2e_outage_at(&self, rate_threshold: f64) -> Result<f64> {
        if rate_threshold.is_nan() || rate_threshold < 0.0 {
            return Err(invalid(format!(
                "rate threshold must be >= 0, got {rate_threshold}"
            )));
        }
        let snr = rate_to_snr_threshold(rate_threshold, self.params.duplex_factor);
        Ok(e2e_outage(self.plc().outage(snr)?, self.vlc.outage(snr)?))
    }

    pub fn plc_outage(&self) -> Result<f64> {
        self.plc().outage(self.snr_threshold())
    }

    pub fn vlc_outage(&self) -> Result<f64> {
        self.vlc.outage(self.snr_threshold())
    }

    pub fn plc_avg_capacity(&self) -> Result<f64> {
        self.plc().avg_capacity()
    }

    pub fn vlc_avg_capacity(&self) -> Result<f64> {
        self.vlc.avg_capacity_closed()
    }

    /// `theta * min(E[C_plc], E[C_vlc])`, an upper bound on the end-to-end average capacity.
    pub fn e2e_capacity_bound(&self) -> Result<f64> {
        Ok(e2e_capacity(
            self.plc_avg_capacity()?,
            self.vlc_avg_capacity()?,
            self.params.duplex_factor,
        ))
    }

    /// `theta * E[min(C_plc, C_vlc)]` for independent hops, as the integral over
    /// `c >= 0` of the product of the per-hop capacity survival functions, each
    /// taken from the hop's outage expression at SNR `2^c - 1`.
    pub fn e2e_avg_capacity(&self) -> Result<f64> {
        let b = self.vlc.params().snr_scale();
        let (t_min, t_max) = self.vlc.gain_sq_support();
        let c_floor = (b * t_min).ln_1p() / std::f64::consts::LN_2;
        let c_ceil = (b * t_max).ln_1p() / std::f64::consts::LN_2;
        let c_plc_median = self.plc().median_snr().ln_1p() / std::f64::consts::LN_2;
        let plc = self.plc();
        let survival = |c: f64| -> f64 {
            let snr = c.exp2() - 1.0;
            let s_plc = 1.0 - plc.outage(snr.max(0.0)).unwrap_or(1.0);
            let s_vlc = 1.0 - self.vlc.outage(snr.max(0.0)).unwrap_or(1.0);
            s_plc * s_vlc
        };
        let mean_min = integrate_piecewise(
            survival,
            0.0,
            c_ceil,
            &[c_floor, c_plc_median],
            1e-12,
            1e-300,
        )?;
        Ok(self.params.duplex_factor * mean_min)
    }
}
