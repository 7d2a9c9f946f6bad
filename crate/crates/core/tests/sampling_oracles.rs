//! Analytic values against independent sampling in the test itself
//! (own generator stream, own Box-Muller, own geometry).

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use plcvlc::montecarlo::{estimate, McConfig, Metric};
use plcvlc::{PlcLinkParams, RelaySystem, RelaySystemParams, VlcLink, VlcLinkParams};

const SAMPLES: usize = 10_000_000;

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Mean and standard error of `f` over `SAMPLES` draws.
fn mean_se(mut f: impl FnMut(&mut ChaCha8Rng) -> f64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let x = f(&mut rng);
        sum += x;
        sum_sq += x * x;
    }
    let n = SAMPLES as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let (u1, u2) = (unit(rng), unit(rng));
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).sin()
}

fn within(analytic: f64, (mean, se): (f64, f64)) -> bool {
    (analytic - mean).abs() <= 3.0 * se
}

#[test]
fn plc_capacity_and_outage_against_sampling() {
    let p = PlcLinkParams::default();
    assert!((p.snr_scale() - 10.0).abs() < 1e-12);
    let cap = mean_se(
        |r| (1.0 + 10.0 * 10f64.powf(3.0 * normal(r) / 5.0)).log2(),
        1,
    );
    assert!(
        within(p.avg_capacity().unwrap(), cap),
        "{} vs {cap:?}",
        p.avg_capacity().unwrap()
    );

    let below_five = mean_se(
        |r| f64::from(u8::from(10.0 * 10f64.powf(3.0 * normal(r) / 5.0) < 5.0)),
        2,
    );
    assert!(within(p.outage(5.0).unwrap(), below_five));
    assert_eq!(p.outage(10.0).unwrap(), 0.5);
}

fn squared_gain_sampler(p: &VlcLinkParams) -> impl Fn(&mut ChaCha8Rng) -> f64 + '_ {
    let m = -(2f64.ln()) / p.semi_angle_rad.cos().ln();
    let q = p.detector_area * p.filter_gain * p.concentrator_gain * p.responsivity / (2.0 * PI);
    move |rng| {
        // Uniform point on the disc by rejection from the square.
        let (x, y) = loop {
            let (x, y) = (2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
            if x * x + y * y <= 1.0 {
                break (x * p.cell_radius_m, y * p.cell_radius_m);
            }
        };
        let d2 = x * x + y * y + p.height_m * p.height_m;
        let cos = p.height_m / d2.sqrt();
        let h = q * (m + 1.0) * cos.powf(m) * cos / d2;
        h * h
    }
}

#[test]
fn vlc_cdf_and_outage_against_sampling() {
    let p = VlcLinkParams::default();
    let link = VlcLink::new(p.clone()).unwrap();
    let sample = squared_gain_sampler(&p);
    let below = mean_se(|r| f64::from(u8::from(sample(r) <= 1e-4)), 3);
    assert!(
        within(link.gain_sq_cdf(1e-4), below),
        "{} vs {below:?}",
        link.gain_sq_cdf(1e-4)
    );

    let b = p.tx_power_w / p.noise_variance;
    let outage = mean_se(|r| f64::from(u8::from(b * sample(r) < 1.0)), 4);
    assert!(within(link.outage(1.0).unwrap(), outage));

    let cap = mean_se(|r| (1.0 + b * sample(r)).log2(), 5);
    assert!(within(link.avg_capacity_closed().unwrap(), cap));
}

#[test]
fn e2e_outage_against_engine() {
    let sys = RelaySystem::new(RelaySystemParams::default()).unwrap();
    let est = estimate(Metric::E2eOutage, &sys, &McConfig::default()).unwrap();
    assert!(est.agrees_with(sys.e2e_outage_analytic().unwrap(), 3.0));
}
