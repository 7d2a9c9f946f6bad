//! Source-to-relay power-line hop.
//!
//! The cable attenuates the amplitude as `exp(-alpha d)` with
//! `alpha = a0 + a1 f^k`, and the channel amplitude `|h|` is log-normal.
//! `mu` and `sigma` are the mean and standard deviation of `10 log10 |h|`,
//! so the power gain `|h|^2` has dB mean `2 mu` and dB standard deviation
//! `2 sigma`. The relay SNR is `gamma_r = a |h|^2` with
//! `a = P_s exp(-2 alpha d) / sigma_r^2`.

use std::f64::consts::{LN_10, LN_2, PI};

use crate::error::{field_error, invalid, Error, Result};
use crate::specfun::{gauss_hermite, std_normal_cdf};

/// dB scaling constant `10 / ln 10`.
pub const ZETA: f64 = 10.0 / LN_10;

/// Gauss-Hermite order used when none is configured.
pub const DEFAULT_QUADRATURE_ORDER: usize = 30;

/// Relative agreement required between order `N` and `N + 10` quadrature.
pub const QUADRATURE_SELF_TEST_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PlcLinkParams {
    pub frequency_hz: f64,
    /// Exponent `k` of the frequency-dependent attenuation term.
    pub atten_k: f64,
    /// Constant attenuation `a0`, 1/m.
    pub atten_a0: f64,
    /// Frequency attenuation coefficient `a1`, 1/m per Hz^k.
    pub atten_a1: f64,
    pub distance_m: f64,
    pub tx_power_w: f64,
    /// Relay noise variance `sigma_r^2`.
    pub noise_variance: f64,
    pub fading_mu_db: f64,
    pub fading_sigma_db: f64,
    pub quadrature_order: usize,
}

impl Default for PlcLinkParams {
    /// Indoor in-building parameter set: 500 kHz, 30 m of cable, 0.1 W,
    /// with the relay noise chosen so the median relay SNR is 10 dB at zero fading mean.
    fn default() -> Self {
        let mut p = PlcLinkParams {
            frequency_hz: 5e5,
            atten_k: 0.7,
            atten_a0: 2.03e-3,
            atten_a1: 3.75e-7,
            distance_m: 30.0,
            tx_power_w: 0.1,
            noise_variance: 1.0,
            fading_mu_db: 0.0,
            fading_sigma_db: 3.0,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        };
        p.noise_variance = p.noise_for_input_snr_db(10.0);
        p
    }
}

impl PlcLinkParams {
    pub fn validate(&self) -> Result<()> {
        positive("plc.frequency_hz", self.frequency_hz)?;
        finite("plc.atten_k", self.atten_k)?;
        nonnegative("plc.atten_a0", self.atten_a0)?;
        nonnegative("plc.atten_a1", self.atten_a1)?;
        positive("plc.distance_m", self.distance_m)?;
        positive("plc.tx_power_w", self.tx_power_w)?;
        positive("plc.noise_variance", self.noise_variance)?;
        finite("plc.fading_mu_db", self.fading_mu_db)?;
        nonnegative("plc.fading_sigma_db", self.fading_sigma_db)?;
        if self.quadrature_order == 0 || self.quadrature_order > crate::specfun::MAX_HERMITE_ORDER {
            return Err(field_error(
                "plc.quadrature_order",
                format!(
                    "must be in 1..={}, got {}",
                    crate::specfun::MAX_HERMITE_ORDER,
                    self.quadrature_order
                ),
            ));
        }
        Ok(())
    }

    /// Attenuation factor `alpha = a0 + a1 f^k`, in 1/m.
    pub fn attenuation_coeff(&self) -> f64 {
        self.atten_a0 + self.atten_a1 * self.frequency_hz.powf(self.atten_k)
    }

    /// Deterministic SNR scale `a = P_s exp(-2 alpha d) / sigma_r^2`.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power_w * (-2.0 * self.attenuation_coeff() * self.distance_m).exp()
            / self.noise_variance
    }

    /// Median relay SNR `a 10^(mu/5)`.
    pub fn median_snr(&self) -> f64 {
        self.snr_scale() * 10f64.powf(self.fading_mu_db / 5.0)
    }

    /// Relay noise variance that makes the SNR scale `a` equal `snr_db`, i.e. the
    /// median relay SNR at zero fading mean, for the current power and cable.
    pub fn noise_for_input_snr_db(&self, snr_db: f64) -> f64 {
        let gain = self.tx_power_w * (-2.0 * self.attenuation_coeff() * self.distance_m).exp();
        gain / 10f64.powf(snr_db / 10.0)
    }

    /// Average capacity in bits/s/Hz, using the configured quadrature order.
    pub fn avg_capacity(&self) -> Result<f64> {
        self.avg_capacity_with_order(self.quadrature_order)
    }

    /// Average capacity `E[log2(1 + gamma_r)]` by Gauss-Hermite quadrature over
    /// the Gaussian dB fading.
    pub fn avg_capacity_with_order(&self, order: usize) -> Result<f64> {
        if self.fading_sigma_db == 0.0 {
            return Ok(self.median_snr().ln_1p() / LN_2);
        }
        let rule = gauss_hermite(order)?;
        let offset = 2.0 * self.fading_mu_db + ZETA * self.snr_scale().ln();
        let spread = 8f64.sqrt() * self.fading_sigma_db;
        let sum = rule.integrate(|x| softplus((spread * x + offset) / ZETA) / LN_2);
        Ok(sum / PI.sqrt())
    }

    /// Checks that the configured order agrees with order + 10 and returns the configured-order value.
    pub fn avg_capacity_checked(&self) -> Result<f64> {
        let value = self.avg_capacity()?;
        let order = self.quadrature_order;
        let reference =
            self.avg_capacity_with_order((order + 10).min(crate::specfun::MAX_HERMITE_ORDER))?;
        if (value - reference).abs() > QUADRATURE_SELF_TEST_TOL * reference.abs() {
            return Err(Error::QuadratureConvergence {
                order,
                value,
                reference,
            });
        }
        Ok(value)
    }

    /// `P(gamma_r < snr_threshold)` from the log-normal CDF.
    pub fn outage(&self, snr_threshold: f64) -> Result<f64> {
        if snr_threshold.is_nan() || snr_threshold < 0.0 {
            return Err(invalid(format!(
                "SNR threshold must be nonnegative, got {snr_threshold}"
            )));
        }
        if snr_threshold == 0.0 {
            return Ok(0.0);
        }
        if snr_threshold.is_infinite() {
            return Ok(1.0);
        }
        if self.fading_sigma_db == 0.0 {
            return Ok(if self.median_snr() >= snr_threshold {
                0.0
            } else {
                1.0
            });
        }
        let arg = (ZETA * snr_threshold.ln()
            - (2.0 * self.fading_mu_db + ZETA * self.snr_scale().ln()))
            / (2.0 * self.fading_sigma_db);
        Ok(std_normal_cdf(arg))
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field_error(
            field,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

pub(crate) fn nonnegative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(field_error(
            field,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

pub(crate) fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field_error(field, format!("must be finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn attenuation_default() {
        let p = PlcLinkParams::default();
        // 2.03e-3 + 3.75e-7 * 500000^0.7, evaluated via exp/ln separately.
        let oracle = 2.03e-3 + 3.75e-7 * (0.7 * 500_000f64.ln()).exp();
        assert_relative_eq!(p.attenuation_coeff(), oracle, max_relative = 1e-14);
        assert!((p.attenuation_coeff() - 5.689e-3).abs() < 5e-6);
    }

    #[test]
    fn attenuation_without_frequency_term() {
        let mut p = PlcLinkParams {
            atten_a1: 0.0,
            ..Default::default()
        };
        assert_eq!(p.attenuation_coeff(), p.atten_a0);
        let single = p.attenuation_coeff();
        p.atten_a0 *= 2.0;
        assert_eq!(p.attenuation_coeff(), 2.0 * single);
    }

    #[test]
    fn attenuation_increases_with_frequency() {
        let mut p = PlcLinkParams::default();
        let low = p.attenuation_coeff();
        p.frequency_hz *= 1.5;
        assert!(p.attenuation_coeff() > low);
    }

    #[test]
    fn default_snr_scale_is_ten() {
        let p = PlcLinkParams::default();
        assert_relative_eq!(p.snr_scale(), 10.0, max_relative = 1e-14);
        assert_relative_eq!(p.median_snr(), 10.0, max_relative = 1e-14);
    }

    #[test]
    fn snr_scale_limits() {
        let p = PlcLinkParams {
            distance_m: 1e-300,
            ..Default::default()
        };
        assert_relative_eq!(
            p.snr_scale(),
            p.tx_power_w / p.noise_variance,
            max_relative = 1e-14
        );

        let mut q = PlcLinkParams {
            atten_a0: 0.0,
            atten_a1: 0.0,
            ..Default::default()
        };
        let near = q.snr_scale();
        q.distance_m = 300.0;
        assert_eq!(q.snr_scale(), near);
    }

    #[test]
    fn degenerate_fading_capacity() {
        let p = PlcLinkParams {
            fading_sigma_db: 0.0,
            ..Default::default()
        };
        assert_relative_eq!(
            p.avg_capacity().unwrap(),
            (1.0 + p.snr_scale()).log2(),
            max_relative = 1e-15
        );

        let mut q = PlcLinkParams {
            fading_sigma_db: 0.0,
            fading_mu_db: 10.0,
            ..Default::default()
        };
        q.noise_variance = q.tx_power_w * (-2.0 * q.attenuation_coeff() * q.distance_m).exp();
        assert_relative_eq!(q.snr_scale(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            q.avg_capacity().unwrap(),
            101f64.log2(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn quadrature_collapses_when_sigma_is_tiny() {
        let p = PlcLinkParams {
            fading_sigma_db: 1e-9,
            ..Default::default()
        };
        assert_relative_eq!(p.avg_capacity().unwrap(), 11f64.log2(), max_relative = 1e-9);
    }

    #[test]
    fn self_test_passes_for_defaults() {
        let p = PlcLinkParams::default();
        assert_eq!(p.avg_capacity_checked().unwrap(), p.avg_capacity().unwrap());
    }

    #[test]
    fn self_test_flags_coarse_rule() {
        let p = PlcLinkParams {
            quadrature_order: 2,
            fading_sigma_db: 6.0,
            ..Default::default()
        };
        assert!(matches!(
            p.avg_capacity_checked(),
            Err(Error::QuadratureConvergence { order: 2, .. })
        ));
    }

    #[test]
    fn outage_median_and_limits() {
        let p = PlcLinkParams::default();
        assert_relative_eq!(p.outage(p.median_snr()).unwrap(), 0.5, max_relative = 1e-12);
        assert_eq!(p.outage(0.0).unwrap(), 0.0);
        assert!(p.outage(1e-12).unwrap() < 1e-12);
        assert!((p.outage(1e12).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.outage(-1.0).is_err());
    }

    #[test]
    fn outage_degenerate_step() {
        let p = PlcLinkParams {
            fading_sigma_db: 0.0,
            ..Default::default()
        };
        assert_eq!(p.outage(p.median_snr()).unwrap(), 0.0);
        assert_eq!(p.outage(p.median_snr() * 1.01).unwrap(), 1.0);
    }

    #[test]
    fn outage_at_five() {
        // P(10 * 10^(W/5) < 5) with W ~ N(0, 3^2)  <=>  W < 5 log10(0.5)
        let p = PlcLinkParams::default();
        let expected = std_normal_cdf(5.0 * 0.5f64.log10() / 3.0);
        assert_relative_eq!(p.outage(5.0).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn validation_names_field() {
        let p = PlcLinkParams {
            tx_power_w: -1.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "plc.tx_power_w"),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn params() -> impl Strategy<Value = PlcLinkParams> {
        (0.0f64..1.0, -6.0f64..6.0, 0.0f64..8.0, 1e-3f64..1e3).prop_map(|(pw, mu, sigma, noise)| {
            PlcLinkParams {
                tx_power_w: 0.01 + pw,
                fading_mu_db: mu,
                fading_sigma_db: sigma,
                noise_variance: noise * 1e-3,
                ..Default::default()
            }
        })
    }

    proptest! {
        #[test]
        fn quadrature_converges(p in params().prop_filter("sigma within 3 dB", |p| p.fading_sigma_db <= 3.0)) {
            // Beyond about 3 dB the softplus singularities at Im x = pi zeta / (sqrt(8) sigma)
            // sit close enough to the real axis that 30 nodes no longer reach 1e-8.
            let c30 = p.avg_capacity_with_order(30).unwrap();
            let c40 = p.avg_capacity_with_order(40).unwrap();
            prop_assert!((c30 - c40).abs() <= 1e-8 * c40);
        }

        #[test]
        fn jensen_bound(p in params()) {
            let second_moment = 10f64.powf(p.fading_mu_db / 5.0)
                * (2.0 * p.fading_sigma_db.powi(2) / (ZETA * ZETA)).exp();
            let bound = (1.0 + p.snr_scale() * second_moment).log2();
            prop_assert!(p.avg_capacity().unwrap() <= bound + 1e-9);
        }

        #[test]
        fn capacity_grows_with_power(p in params(), factor in 1.0f64..10.0) {
            let base = p.avg_capacity().unwrap();
            let louder = PlcLinkParams { tx_power_w: p.tx_power_w * factor, ..p.clone() };
            prop_assert!(base >= 0.0);
            prop_assert!(louder.avg_capacity().unwrap() >= base);
        }

        #[test]
        fn outage_is_a_cdf(p in params(), t in 1e-3f64..1e3, dt in 0.0f64..100.0) {
            let lo = p.outage(t).unwrap();
            let hi = p.outage(t + dt).unwrap();
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!(lo <= hi);
        }
    }
}
