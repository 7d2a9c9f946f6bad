//! Relay-to-user visible-light hop.
//!
//! A single ceiling LED with a Lambertian pattern serves a user placed
//! uniformly at random on a disc of radius `r`, a height `L` below. With
//! `h(r_k) = Q (m+1) L^(m+1) / (r_k^2 + L^2)^((m+3)/2)` the squared gain
//! `X = h^2` lives on `[t_min, t_max]` and has
//!
//! ```text
//! f(x) = C x^(-1/(m+3) - 1) / ((m+3) r^2),   C = ((m+1) Q L^(m+1))^(2/(m+3))
//! F(x) = 1 + L^2/r^2 - (C/r^2) x^(-1/(m+3))
//! ```
//!
//! Capacities here are per-hop spectral efficiencies; half-duplex sharing is
//! applied by [`crate::relay`].

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{invalid, Result};
use crate::plc::positive;
use crate::specfun::{hyp2f1, integrate};

/// Relative tolerance of the numeric capacity integral.
pub const CAPACITY_QUAD_REL_TOL: f64 = 1e-10;

/// Below this relative support width `(t_max - t_min) / t_max` both capacity
/// routes average over the user position directly, since the density
/// normalisation `C / r^2` cancels catastrophically.
pub const NARROW_SUPPORT_REL_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct VlcLinkParams {
    /// Relay (LED) transmit power `P_r`.
    pub tx_power_w: f64,
    /// Destination noise variance `sigma_d^2`.
    pub noise_variance: f64,
    /// Photodetector area, m^2.
    pub detector_area: f64,
    /// Optical filter gain, linear.
    pub filter_gain: f64,
    /// Optical concentrator gain, linear.
    pub concentrator_gain: f64,
    /// Photodetector responsivity, A/W.
    pub responsivity: f64,
    pub cell_radius_m: f64,
    /// Vertical distance from the LED to the user plane.
    pub height_m: f64,
    /// LED semi-angle at half power.
    pub semi_angle_rad: f64,
}

/// Destination noise variance used when none is configured.
pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-4;

impl Default for VlcLinkParams {
    fn default() -> Self {
        let seven_db = 10f64.powf(0.7);
        VlcLinkParams {
            tx_power_w: 0.1,
            noise_variance: DEFAULT_NOISE_VARIANCE,
            detector_area: 0.1,
            filter_gain: seven_db,
            concentrator_gain: seven_db,
            responsivity: 0.4,
            cell_radius_m: 3.6,
            height_m: 2.15,
            semi_angle_rad: 60f64.to_radians(),
        }
    }
}

/// Quantities fixed by a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlcDerived {
    pub lambertian_order: f64,
    pub front_end_q: f64,
    pub gain_sq_min: f64,
    pub gain_sq_max: f64,
}

/// Lambertian order `m = -1 / log2(cos(semi_angle))`.
pub fn lambertian_order(semi_angle_rad: f64) -> Result<f64> {
    if !(semi_angle_rad > 0.0 && semi_angle_rad < FRAC_PI_2) {
        return Err(invalid(format!(
            "semi-angle must lie strictly inside (0, pi/2), got {semi_angle_rad}"
        )));
    }
    Ok(-1.0 / semi_angle_rad.cos().log2())
}

impl VlcLinkParams {
    pub fn validate(&self) -> Result<()> {
        positive("vlc.tx_power_w", self.tx_power_w)?;
        positive("vlc.noise_variance", self.noise_variance)?;
        positive("vlc.detector_area", self.detector_area)?;
        positive("vlc.filter_gain", self.filter_gain)?;
        positive("vlc.concentrator_gain", self.concentrator_gain)?;
        positive("vlc.responsivity", self.responsivity)?;
        positive("vlc.cell_radius_m", self.cell_radius_m)?;
        positive("vlc.height_m", self.height_m)?;
        lambertian_order(self.semi_angle_rad)
            .map_err(|e| crate::error::field_error("vlc.semi_angle_rad", e.to_string()))?;
        Ok(())
    }

    /// Optical front-end constant `Q = A_d U g R_p / (2 pi)`.
    pub fn front_end_q(&self) -> f64 {
        self.detector_area * self.filter_gain * self.concentrator_gain * self.responsivity
            / (2.0 * PI)
    }

    /// `P_r / sigma_d^2`: SNR per unit squared channel gain.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power_w / self.noise_variance
    }
}

/// A validated VLC hop with its derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct VlcLink {
    params: VlcLinkParams,
    derived: VlcDerived,
}

impl VlcLink {
    pub fn new(params: VlcLinkParams) -> Result<Self> {
        params.validate()?;
        let m = lambertian_order(params.semi_angle_rad)?;
        let q = params.front_end_q();
        let mut link = VlcLink {
            params,
            derived: VlcDerived {
                lambertian_order: m,
                front_end_q: q,
                gain_sq_min: 0.0,
                gain_sq_max: 0.0,
            },
        };
        let edge = link.gain_at(link.params.cell_radius_m);
        let nadir = link.gain_at(0.0);
        link.derived.gain_sq_min = edge * edge;
        link.derived.gain_sq_max = nadir * nadir;
        Ok(link)
    }

    pub fn params(&self) -> &VlcLinkParams {
        &self.params
    }

    pub fn derived(&self) -> &VlcDerived {
        &self.derived
    }

    pub(crate) fn gain_at(&self, r_k: f64) -> f64 {
        let m = self.derived.lambertian_order;
        let l = self.params.height_m;
        self.derived.front_end_q * (m + 1.0) * l.powf(m + 1.0)
            / (r_k * r_k + l * l).powf((m + 3.0) / 2.0)
    }

    /// LOS channel gain for a user at horizontal distance `r_k` from the cell centre.
    pub fn channel_gain(&self, r_k: f64) -> Result<f64> {
        if !(0.0..=self.params.cell_radius_m).contains(&r_k) {
            return Err(invalid(format!(
                "user distance {r_k} outside [0, {}]",
                self.params.cell_radius_m
            )));
        }
        Ok(self.gain_at(r_k))
    }

    /// Support `(t_min, t_max)` of the squared channel gain.
    pub fn gain_sq_support(&self) -> (f64, f64) {
        (self.derived.gain_sq_min, self.derived.gain_sq_max)
    }

    fn shape_exponent(&self) -> f64 {
        1.0 / (self.derived.lambertian_order + 3.0)
    }

    /// `C = ((m+1) Q L^(m+1))^(2/(m+3))`.
    fn density_constant(&self) -> f64 {
        let m = self.derived.lambertian_order;
        ((m + 1.0) * self.derived.front_end_q * self.params.height_m.powf(m + 1.0))
            .powf(2.0 / (m + 3.0))
    }

    /// Density of the squared channel gain for a uniformly placed user.
    pub fn gain_sq_pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.gain_sq_support();
        if !(lo..=hi).contains(&x) {
            return 0.0;
        }
        let s = self.shape_exponent();
        let r2 = self.params.cell_radius_m.powi(2);
        self.density_constant() * s * x.powf(-s - 1.0) / r2
    }

    /// Distribution function of the squared channel gain.
    pub fn gain_sq_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.gain_sq_support();
        if x.is_nan() || x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let r2 = self.params.cell_radius_m.powi(2);
        let l2 = self.params.height_m.powi(2);
        let v = 1.0 + l2 / r2 - self.density_constant() / r2 * x.powf(-self.shape_exponent());
        v.clamp(0.0, 1.0)
    }

    /// Average capacity (bits/s/Hz) by adaptive quadrature of
    /// `log2(1 + b x) f(x)` over the support, integrated in `ln x`.
    pub fn avg_capacity_quad(&self) -> Result<f64> {
        let b = self.params.snr_scale();
        let (lo, hi) = self.gain_sq_support();
        if self.is_narrow() {
            return self.avg_capacity_over_position();
        }
        let nats = integrate(
            |u: f64| {
                let x = u.exp();
                (b * x).ln_1p() * self.gain_sq_pdf(x.clamp(lo, hi)) * x
            },
            lo.ln(),
            hi.ln(),
            CAPACITY_QUAD_REL_TOL,
            0.0,
        )?;
        Ok(nats / LN_2)
    }

    fn is_narrow(&self) -> bool {
        let (lo, hi) = self.gain_sq_support();
        hi - lo <= NARROW_SUPPORT_REL_WIDTH * hi
    }

    /// `E[log2(1 + b h(r sqrt(v))^2)]` for `v` uniform on `[0, 1]`.
    fn avg_capacity_over_position(&self) -> Result<f64> {
        let b = self.params.snr_scale();
        let r = self.params.cell_radius_m;
        let nats = integrate(
            |v: f64| (b * self.gain_at(r * v.sqrt()).powi(2)).ln_1p(),
            0.0,
            1.0,
            CAPACITY_QUAD_REL_TOL,
            0.0,
        )?;
        Ok(nats / LN_2)
    }

    /// Average capacity (bits/s/Hz) from the hypergeometric closed form
    ///
    /// ```text
    /// E[C] = C / (r^2 ln 2) [T(t_max) - T(t_min)]
    /// T(t) = t^(-s) ((m+3) 2F1(1, -s; 1-s; -b t) - (m+3) - ln(1 + b t)),  s = 1/(m+3)
    /// ```
    pub fn avg_capacity_closed(&self) -> Result<f64> {
        let b = self.params.snr_scale();
        let m = self.derived.lambertian_order;
        let s = self.shape_exponent();
        if self.is_narrow() {
            return self.avg_capacity_over_position();
        }
        let antiderivative = |t: f64| -> Result<f64> {
            let f = hyp2f1(1.0, -s, (m + 2.0) / (m + 3.0), -t * b)?;
            Ok(t.powf(-s) * (-(3.0 + m) + (3.0 + m) * f - (t * b).ln_1p()))
        };
        let (lo, hi) = self.gain_sq_support();
        let r2 = self.params.cell_radius_m.powi(2);
        let bracket = antiderivative(hi)? - antiderivative(lo)?;
        Ok(self.density_constant() / r2 * bracket / LN_2)
    }

    /// `P(gamma_d < snr_threshold)` with `gamma_d = (P_r / sigma_d^2) h^2`.
    pub fn outage(&self, snr_threshold: f64) -> Result<f64> {
        if snr_threshold.is_nan() || snr_threshold < 0.0 {
            return Err(invalid(format!(
                "SNR threshold must be nonnegative, got {snr_threshold}"
            )));
        }
        Ok(self.gain_sq_cdf(snr_threshold / self.params.snr_scale()))
    }
}
