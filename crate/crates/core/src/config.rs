//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; absent
//! keys take the defaults below. Gains and fading parameters are given in
//! dB, powers in W, angles in degrees; conversion to the linear units used
//! by the models happens here.
//!
//! The relay noise variance may be given directly (`plc_noise_variance`) or
//! derived from an input SNR (`plc_input_snr_db`, default 10 dB): the noise is
//! chosen so that `P_s exp(-2 alpha d) / sigma_r^2` equals the input SNR for
//! the loaded source power, cable length and attenuation. That is the median
//! relay SNR when the fading mean is 0 dB.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::McConfig;
use crate::plc::PlcLinkParams;
use crate::relay::RelaySystemParams;
use crate::vlc::VlcLinkParams;

pub const DEFAULT_PLC_INPUT_SNR_DB: f64 = 10.0;

/// Config keys paired with the parameter field they set.
const KEYS: &[(&str, &str)] = &[
    ("frequency_hz", "plc.frequency_hz"),
    ("atten_k", "plc.atten_k"),
    ("atten_a0", "plc.atten_a0"),
    ("atten_a1", "plc.atten_a1"),
    ("plc_distance_m", "plc.distance_m"),
    ("source_power_w", "plc.tx_power_w"),
    ("plc_noise_variance", "plc.noise_variance"),
    ("plc_input_snr_db", "plc.noise_variance"),
    ("fading_mu_db", "plc.fading_mu_db"),
    ("fading_sigma_db", "plc.fading_sigma_db"),
    ("quadrature_order", "plc.quadrature_order"),
    ("relay_power_w", "vlc.tx_power_w"),
    ("vlc_noise_variance", "vlc.noise_variance"),
    ("detector_area_m2", "vlc.detector_area"),
    ("filter_gain_db", "vlc.filter_gain"),
    ("concentrator_gain_db", "vlc.concentrator_gain"),
    ("responsivity_a_per_w", "vlc.responsivity"),
    ("cell_radius_m", "vlc.cell_radius_m"),
    ("led_height_m", "vlc.height_m"),
    ("semi_angle_deg", "vlc.semi_angle_rad"),
    ("duplex_factor", "duplex_factor"),
    ("rate_threshold_bits", "rate_threshold_bits"),
    ("trials", "mc.trials"),
    ("seed", "mc.seed"),
    ("batch_size", "mc.batch_size"),
];

/// Effective parameter set of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub system: RelaySystemParams,
    pub mc: McConfig,
    /// Input SNR the relay noise was derived from, if it was not given directly.
    pub plc_input_snr_db: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            system: RelaySystemParams::default(),
            mc: McConfig::default(),
            plc_input_snr_db: Some(DEFAULT_PLC_INPUT_SNR_DB),
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Entries(HashMap<String, Entry>);

impl Entries {
    fn real(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        e.value
            .parse::<f64>()
            .map(Some)
            .map_err(|_| config_error(e.line, key, format!("expected a number, got {:?}", e.value)))
    }

    fn integer(&self, key: &str) -> Result<Option<u64>> {
        let Some(e) = self.0.get(key) else {
            return Ok(None);
        };
        e.value
            .replace('_', "")
            .parse::<u64>()
            .map(Some)
            .map_err(|_| {
                config_error(
                    e.line,
                    key,
                    format!("expected a nonnegative integer, got {:?}", e.value),
                )
            })
    }

    fn set(&self, key: &str, target: &mut f64) -> Result<()> {
        if let Some(v) = self.real(key)? {
            *target = v;
        }
        Ok(())
    }

    fn set_db(&self, key: &str, target: &mut f64) -> Result<()> {
        if let Some(v) = self.real(key)? {
            *target = 10f64.powf(v / 10.0);
        }
        Ok(())
    }
}

fn config_error(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

/// Reads and parses a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_config(&text)
}

/// Parses config text, fills defaults and validates the result.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut entries = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(config_error(line, content, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(config_error(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(config_error(line, key, "missing value"));
        }
        if let Some(prev) = entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        ) {
            return Err(config_error(
                line,
                key,
                format!("duplicate key (first set on line {})", prev.line),
            ));
        }
    }
    let entries = Entries(entries);

    let mut plc = PlcLinkParams::default();
    entries.set("frequency_hz", &mut plc.frequency_hz)?;
    entries.set("atten_k", &mut plc.atten_k)?;
    entries.set("atten_a0", &mut plc.atten_a0)?;
    entries.set("atten_a1", &mut plc.atten_a1)?;
    entries.set("plc_distance_m", &mut plc.distance_m)?;
    entries.set("source_power_w", &mut plc.tx_power_w)?;
    entries.set("fading_mu_db", &mut plc.fading_mu_db)?;
    entries.set("fading_sigma_db", &mut plc.fading_sigma_db)?;
    if let Some(order) = entries.integer("quadrature_order")? {
        plc.quadrature_order = order as usize;
    }
    let direct_noise = entries.real("plc_noise_variance")?;
    let input_snr = entries.real("plc_input_snr_db")?;
    let plc_input_snr_db = match (direct_noise, input_snr) {
        (Some(_), Some(_)) => {
            let line = entries.0["plc_input_snr_db"].line;
            return Err(config_error(
                line,
                "plc_input_snr_db",
                "conflicts with plc_noise_variance; set only one",
            ));
        }
        (Some(noise), None) => {
            plc.noise_variance = noise;
            None
        }
        (None, snr) => {
            let snr = snr.unwrap_or(DEFAULT_PLC_INPUT_SNR_DB);
            plc.noise_variance = plc.noise_for_input_snr_db(snr);
            Some(snr)
        }
    };

    let mut vlc = VlcLinkParams::default();
    entries.set("relay_power_w", &mut vlc.tx_power_w)?;
    entries.set("vlc_noise_variance", &mut vlc.noise_variance)?;
    entries.set("detector_area_m2", &mut vlc.detector_area)?;
    entries.set_db("filter_gain_db", &mut vlc.filter_gain)?;
    entries.set_db("concentrator_gain_db", &mut vlc.concentrator_gain)?;
    entries.set("responsivity_a_per_w", &mut vlc.responsivity)?;
    entries.set("cell_radius_m", &mut vlc.cell_radius_m)?;
    entries.set("led_height_m", &mut vlc.height_m)?;
    if let Some(deg) = entries.real("semi_angle_deg")? {
        vlc.semi_angle_rad = deg.to_radians();
    }

    let mut system = RelaySystemParams {
        plc,
        vlc,
        ..Default::default()
    };
    entries.set("duplex_factor", &mut system.duplex_factor)?;
    entries.set("rate_threshold_bits", &mut system.rate_threshold_bits)?;

    let mut mc = McConfig::default();
    if let Some(v) = entries.integer("trials")? {
        mc.trials = v;
    }
    if let Some(v) = entries.integer("seed")? {
        mc.seed = v;
    }
    if let Some(v) = entries.integer("batch_size")? {
        mc.batch_size = v;
    }

    let config = Config {
        system,
        mc,
        plc_input_snr_db,
    };
    config.validate()?;
    Ok(config)
}

impl Config {
    /// Validates the parameter set and the Monte Carlo settings, naming the
    /// config key of an offending field.
    pub fn validate(&self) -> Result<()> {
        self.system.validate().map_err(rename_field)?;
        self.mc.validate().map_err(|e| match e {
            Error::InvalidArgument(message) => Error::Validation {
                field: "trials / batch_size (mc)".into(),
                message,
            },
            other => other,
        })
    }

    /// Every effective value as `key = value`, in a fixed order.
    pub fn echo_lines(&self) -> Vec<String> {
        let p = &self.system.plc;
        let v = &self.system.vlc;
        let db = |x: f64| 10.0 * x.log10();
        let mut out = vec![
            format!("frequency_hz = {}", p.frequency_hz),
            format!("atten_k = {}", p.atten_k),
            format!("atten_a0 = {}", p.atten_a0),
            format!("atten_a1 = {}", p.atten_a1),
            format!("plc_distance_m = {}", p.distance_m),
            format!("source_power_w = {}", p.tx_power_w),
            match self.plc_input_snr_db {
                Some(snr) => format!(
                    "plc_noise_variance = {}  # from plc_input_snr_db = {snr}",
                    p.noise_variance
                ),
                None => format!("plc_noise_variance = {}", p.noise_variance),
            },
        ];
        out.extend([
            format!("fading_mu_db = {}", p.fading_mu_db),
            format!("fading_sigma_db = {}", p.fading_sigma_db),
            format!("quadrature_order = {}", p.quadrature_order),
            format!("relay_power_w = {}", v.tx_power_w),
            format!("vlc_noise_variance = {}", v.noise_variance),
            format!("detector_area_m2 = {}", v.detector_area),
            format!("filter_gain_db = {}", db(v.filter_gain)),
            format!("concentrator_gain_db = {}", db(v.concentrator_gain)),
            format!("responsivity_a_per_w = {}", v.responsivity),
            format!("cell_radius_m = {}", v.cell_radius_m),
            format!("led_height_m = {}", v.height_m),
            format!("semi_angle_deg = {}", v.semi_angle_rad.to_degrees()),
            format!("duplex_factor = {}", self.system.duplex_factor),
            format!("rate_threshold_bits = {}", self.system.rate_threshold_bits),
            format!("trials = {}", self.mc.trials),
            format!("seed = {}", self.mc.seed),
            format!("batch_size = {}", self.mc.batch_size),
        ]);
        out
    }
}

fn rename_field(e: Error) -> Error {
    match e {
        Error::Validation { field, message } => {
            let field = match KEYS.iter().find(|(_, f)| *f == field) {
                Some((key, _)) => format!("{key} ({field})"),
                None => field,
            };
            Error::Validation { field, message }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, Config::default());
        let p = &c.system.plc;
        assert_eq!(p.frequency_hz, 5e5);
        assert_eq!(p.atten_k, 0.7);
        assert_eq!(p.atten_a0, 2.03e-3);
        assert_eq!(p.atten_a1, 3.75e-7);
        assert_eq!(p.distance_m, 30.0);
        assert_eq!(p.tx_power_w, 0.1);
        assert_eq!(p.fading_mu_db, 0.0);
        assert_eq!(p.fading_sigma_db, 3.0);
        assert_relative_eq!(p.median_snr(), 10.0, max_relative = 1e-14);
        let v = &c.system.vlc;
        assert_eq!(v.tx_power_w, 0.1);
        assert_eq!(v.detector_area, 0.1);
        assert_relative_eq!(v.filter_gain, 10f64.powf(0.7), max_relative = 1e-15);
        assert_relative_eq!(v.concentrator_gain, 10f64.powf(0.7), max_relative = 1e-15);
        assert_eq!(v.responsivity, 0.4);
        assert_eq!(v.cell_radius_m, 3.6);
        assert_eq!(v.height_m, 2.15);
        assert_relative_eq!(v.semi_angle_rad.to_degrees(), 60.0, max_relative = 1e-14);
        assert_eq!(c.system.duplex_factor, 0.5);
    }

    #[test]
    fn single_override() {
        let c = parse_config("# taller room\nled_height_m = 3.0   # metres\n").unwrap();
        let mut expected = Config::default();
        expected.system.vlc.height_m = 3.0;
        assert_eq!(c, expected);
    }

    #[test]
    fn negative_power_names_field() {
        match parse_config("source_power_w = -1") {
            Err(Error::Validation { field, .. }) => {
                assert!(field.contains("source_power_w"));
                assert!(field.contains("tx_power"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_and_key() {
        let err = parse_config("\n\nled_height_m = tall\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 3,
                key: "led_height_m".into(),
                message: "expected a number, got \"tall\"".into()
            }
        );
        assert!(matches!(
            parse_config("bogus = 1"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("seed 4"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("seed = 1\nseed = 2"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("plc_noise_variance = 1e-3\nplc_input_snr_db = 5"),
            Err(Error::Config { line: 2, .. })
        ));
    }

    #[test]
    fn noise_variance_sources() {
        let direct = parse_config("plc_noise_variance = 2e-3").unwrap();
        assert_eq!(direct.system.plc.noise_variance, 2e-3);
        assert_eq!(direct.plc_input_snr_db, None);
        let derived = parse_config("plc_input_snr_db = 20").unwrap();
        assert_relative_eq!(derived.system.plc.snr_scale(), 100.0, max_relative = 1e-13);
        let shifted = parse_config("fading_mu_db = 2").unwrap();
        assert_relative_eq!(shifted.system.plc.snr_scale(), 10.0, max_relative = 1e-13);
        assert_relative_eq!(
            shifted.system.plc.median_snr(),
            10.0 * 10f64.powf(0.4),
            max_relative = 1e-13
        );
    }

    #[test]
    fn trials_floor_enforced() {
        assert!(matches!(
            parse_config("trials = 10"),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config("led_height_m = 2.5\nfading_sigma_db = 6\nseed = 42").unwrap();
        let text = c.echo_lines().join("\n");
        let back = parse_config(&text).unwrap();
        assert_eq!(back.system.vlc.height_m, 2.5);
        assert_eq!(back.system.plc.fading_sigma_db, 6.0);
        assert_eq!(back.mc, c.mc);
        assert_relative_eq!(
            back.system.plc.noise_variance,
            c.system.plc.noise_variance,
            max_relative = 1e-14
        );
    }
}
