//! Parameter sweeps, figure presets and analytic-vs-sampled validation runs.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::montecarlo::{estimate, Estimate, McConfig, Metric};
use crate::relay::{RelaySystem, RelaySystemParams};

/// Agreement is declared when the analytic value lies within this many standard errors.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

/// Relative tolerance between the closed-form and quadrature VLC capacities in validation runs.
pub const CLOSED_VS_QUAD_REL_TOL: f64 = 1e-8;

/// Rate thresholds (bits/s/Hz) at which validation compares outage metrics.
pub const VALIDATION_RATE_THRESHOLDS: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVar {
    RelayPower,
    LedHeight,
    CellRadius,
    RateThreshold,
    SourcePower,
    PlcDistance,
}

impl SweepVar {
    pub const ALL: [SweepVar; 6] = [
        SweepVar::RelayPower,
        SweepVar::LedHeight,
        SweepVar::CellRadius,
        SweepVar::RateThreshold,
        SweepVar::SourcePower,
        SweepVar::PlcDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::RelayPower => "relay_power",
            SweepVar::LedHeight => "led_height",
            SweepVar::CellRadius => "cell_radius",
            SweepVar::RateThreshold => "rate_threshold",
            SweepVar::SourcePower => "source_power",
            SweepVar::PlcDistance => "plc_distance",
        }
    }

    pub fn apply(self, params: &mut RelaySystemParams, value: f64) {
        match self {
            SweepVar::RelayPower => params.vlc.tx_power_w = value,
            SweepVar::LedHeight => params.vlc.height_m = value,
            SweepVar::CellRadius => params.vlc.cell_radius_m = value,
            SweepVar::RateThreshold => params.rate_threshold_bits = value,
            SweepVar::SourcePower => params.plc.tx_power_w = value,
            SweepVar::PlcDistance => params.plc.distance_m = value,
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepVar::ALL.iter().map(|v| v.name()).collect();
                invalid(format!(
                    "unknown sweep variable {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// A second variable held at each of a list of values, one curve per value.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `name=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| invalid(format!("family must look like var=v1,v2,... got {s:?}")))?;
        let variable = name.trim().parse()?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("bad family value {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Family { variable, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub family: Option<Family>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(invalid(format!(
                "sweep range must satisfy start < stop, got {}..{}",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(invalid(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if let Some(family) = &self.family {
            if family.values.is_empty() {
                return Err(invalid("family value list is empty"));
            }
            if family.variable == self.variable {
                return Err(invalid(
                    "family variable must differ from the swept variable",
                ));
            }
        }
        Ok(())
    }

    /// Grid points, with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last as f64
                }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "{} from {} to {} in {} steps",
            self.variable, self.start, self.stop, self.steps
        );
        if let Some(f) = &self.family {
            let values: Vec<String> = f.values.iter().map(|v| v.to_string()).collect();
            let _ = write!(s, ", family {}={}", f.variable, values.join(","));
        }
        s
    }
}

/// One sweep grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub value: f64,
    pub family_value: Option<f64>,
    pub plc_capacity: f64,
    pub vlc_capacity: f64,
    /// `theta * min(E[C_plc], E[C_vlc])`.
    pub e2e_capacity_bound: f64,
    /// `theta * E[min(C_plc, C_vlc)]`.
    pub e2e_capacity: f64,
    pub e2e_outage: f64,
    pub mc_e2e_capacity: Estimate,
    pub mc_e2e_outage: Estimate,
}

impl SweepRecord {
    pub fn capacity_agrees(&self) -> bool {
        self.mc_e2e_capacity
            .agrees_with(self.e2e_capacity, AGREEMENT_SIGMAS)
    }

    pub fn outage_agrees(&self) -> bool {
        self.mc_e2e_outage
            .agrees_with(self.e2e_outage, AGREEMENT_SIGMAS)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub spec: SweepSpec,
    /// Family-major, grid order within each family.
    pub records: Vec<SweepRecord>,
}

fn evaluate_point(
    params: RelaySystemParams,
    value: f64,
    family_value: Option<f64>,
    mc: &McConfig,
) -> Result<SweepRecord> {
    let system = RelaySystem::new(params)?;
    let plc_capacity = system.plc_avg_capacity()?;
    let vlc_capacity = system.vlc_avg_capacity()?;
    Ok(SweepRecord {
        value,
        family_value,
        plc_capacity,
        vlc_capacity,
        e2e_capacity_bound: crate::relay::e2e_capacity(
            plc_capacity,
            vlc_capacity,
            system.params().duplex_factor,
        ),
        e2e_capacity: system.e2e_avg_capacity()?,
        e2e_outage: system.e2e_outage_analytic()?,
        mc_e2e_capacity: estimate(Metric::E2eAvgCapacity, &system, mc)?,
        mc_e2e_outage: estimate(Metric::E2eOutage, &system, mc)?,
    })
}

/// Evaluates every grid point (for every family value) analytically and by sampling.
///
/// Points run in parallel; each uses the same seed, so curves share their random draws.
pub fn run_sweep(spec: &SweepSpec, system: &RelaySystemParams, mc: &McConfig) -> Result<RunReport> {
    spec.validate()?;
    mc.validate()?;
    let family_values: Vec<Option<f64>> = match &spec.family {
        Some(f) => f.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for fv in &family_values {
        for x in spec.grid() {
            let mut params = system.clone();
            if let (Some(f), Some(v)) = (&spec.family, fv) {
                f.variable.apply(&mut params, *v);
            }
            spec.variable.apply(&mut params, x);
            jobs.push((params, x, *fv));
        }
    }
    let records = jobs
        .into_par_iter()
        .map(|(params, x, fv)| evaluate_point(params, x, fv, mc))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        spec: spec.clone(),
        records,
    })
}

impl RunReport {
    pub const COLUMNS: [&'static str; 11] = [
        "plc_capacity",
        "vlc_capacity",
        "e2e_capacity_bound",
        "e2e_capacity",
        "e2e_outage",
        "mc_e2e_capacity",
        "mc_e2e_capacity_se",
        "mc_e2e_outage",
        "mc_e2e_outage_se",
        "capacity_agrees",
        "outage_agrees",
    ];

    /// CSV with a `#` header block echoing `echo` (the effective parameter set).
    pub fn to_csv(&self, echo: &[String]) -> String {
        let mut out = String::new();
        for line in echo {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# sweep: {}", self.spec.describe());
        let family = self
            .spec
            .family
            .as_ref()
            .map(|f| f.variable.name())
            .unwrap_or("family");
        let _ = writeln!(
            out,
            "{},{},{}",
            self.spec.variable,
            family,
            Self::COLUMNS.join(",")
        );
        for r in &self.records {
            let fv = r.family_value.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.value,
                fv,
                r.plc_capacity,
                r.vlc_capacity,
                r.e2e_capacity_bound,
                r.e2e_capacity,
                r.e2e_outage,
                r.mc_e2e_capacity.mean,
                r.mc_e2e_capacity.std_error,
                r.mc_e2e_outage.mean,
                r.mc_e2e_outage.std_error,
                r.capacity_agrees(),
                r.outage_agrees(),
            );
        }
        out
    }

    /// Records of one family value, in grid order.
    pub fn curve(&self, family_value: Option<f64>) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.family_value == family_value)
            .collect()
    }
}

/// A report column that a figure preset makes a trend claim about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    VlcCapacity,
    E2eCapacity,
    E2eOutage,
}

impl Column {
    pub fn get(self, r: &SweepRecord) -> f64 {
        match self {
            Column::VlcCapacity => r.vlc_capacity,
            Column::E2eCapacity => r.e2e_capacity,
            Column::E2eOutage => r.e2e_outage,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Column::VlcCapacity => "vlc_capacity",
            Column::E2eCapacity => "e2e_capacity",
            Column::E2eOutage => "e2e_outage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn holds(self, before: f64, after: f64) -> bool {
        match self {
            Direction::Increasing => after >= before,
            Direction::Decreasing => after <= before,
        }
    }
}

/// Expected monotonicity of one column along the sweep and across family values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trend {
    pub column: Column,
    pub along_sweep: Direction,
    pub across_family: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub number: u8,
    pub title: &'static str,
    pub spec: SweepSpec,
    pub trends: Vec<Trend>,
}

/// The four figure scenarios: capacity versus relay power for several LED
/// heights (2) and cell radii (3), outage versus rate threshold for several
/// LED heights (4) and relay powers (5).
///
/// Outage ordering in the LED height only holds once the threshold is above
/// roughly a sixteenth of the peak squared gain, so preset 4 starts at 0.2
/// bits. Both outage ranges end near where the weakest curve reaches 1.
pub fn figure_preset(number: u8) -> Result<FigurePreset> {
    use Direction::*;
    let capacity_trends = |family_dir| {
        vec![
            Trend {
                column: Column::VlcCapacity,
                along_sweep: Increasing,
                across_family: family_dir,
            },
            Trend {
                column: Column::E2eCapacity,
                along_sweep: Increasing,
                across_family: family_dir,
            },
        ]
    };
    let outage_trend = |family_dir| {
        vec![Trend {
            column: Column::E2eOutage,
            along_sweep: Increasing,
            across_family: family_dir,
        }]
    };
    let preset = match number {
        2 => FigurePreset {
            number,
            title: "average capacity vs relay transmit power, several LED heights",
            spec: SweepSpec {
                variable: SweepVar::RelayPower,
                start: 0.02,
                stop: 0.5,
                steps: 25,
                family: Some(Family {
                    variable: SweepVar::LedHeight,
                    values: vec![2.15, 2.5, 3.0],
                }),
            },
            trends: capacity_trends(Decreasing),
        },
        3 => FigurePreset {
            number,
            title: "average capacity vs relay transmit power, several cell radii",
            spec: SweepSpec {
                variable: SweepVar::RelayPower,
                start: 0.02,
                stop: 0.5,
                steps: 25,
                family: Some(Family {
                    variable: SweepVar::CellRadius,
                    values: vec![2.5, 3.6, 5.0],
                }),
            },
            trends: capacity_trends(Decreasing),
        },
        4 => FigurePreset {
            number,
            title: "outage probability vs rate threshold, several LED heights",
            spec: SweepSpec {
                variable: SweepVar::RateThreshold,
                start: 0.2,
                stop: 1.2,
                steps: 21,
                family: Some(Family {
                    variable: SweepVar::LedHeight,
                    values: vec![2.15, 2.5, 3.0],
                }),
            },
            trends: outage_trend(Increasing),
        },
        5 => FigurePreset {
            number,
            title: "outage probability vs rate threshold, several relay powers",
            spec: SweepSpec {
                variable: SweepVar::RateThreshold,
                start: 0.0,
                stop: 1.5,
                steps: 16,
                family: Some(Family {
                    variable: SweepVar::RelayPower,
                    values: vec![0.05, 0.1, 0.2],
                }),
            },
            trends: outage_trend(Decreasing),
        },
        other => {
            return Err(invalid(format!(
                "no figure preset {other}; expected 2, 3, 4 or 5"
            )))
        }
    };
    Ok(preset)
}

/// Lists every trend violation in `report` (empty when all hold).
pub fn check_trends(report: &RunReport, trends: &[Trend]) -> Vec<String> {
    let mut problems = Vec::new();
    let family_values: Vec<Option<f64>> = match &report.spec.family {
        Some(f) => f.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let curves: Vec<Vec<&SweepRecord>> = family_values.iter().map(|fv| report.curve(*fv)).collect();
    for t in trends {
        for (fv, curve) in family_values.iter().zip(&curves) {
            for pair in curve.windows(2) {
                let (a, b) = (t.column.get(pair[0]), t.column.get(pair[1]));
                if !t.along_sweep.holds(a, b) {
                    problems.push(format!(
                        "{} not {:?} in {} between {} and {} (family {:?}): {a} -> {b}",
                        t.column.name(),
                        t.along_sweep,
                        report.spec.variable,
                        pair[0].value,
                        pair[1].value,
                        fv
                    ));
                }
            }
        }
        // Family values are compared in the order given, which presets list ascending.
        for pair in curves.windows(2) {
            for (lo, hi) in pair[0].iter().zip(&pair[1]) {
                let (a, b) = (t.column.get(lo), t.column.get(hi));
                if !t.across_family.holds(a, b) {
                    problems.push(format!(
                        "{} not {:?} across family at {} = {}: {a} ({:?}) -> {b} ({:?})",
                        t.column.name(),
                        t.across_family,
                        report.spec.variable,
                        lo.value,
                        lo.family_value,
                        hi.family_value
                    ));
                }
            }
        }
    }
    problems
}

/// One analytic-vs-reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label: String,
    pub analytic: f64,
    pub reference: f64,
    /// Standard error of the reference for sampled comparisons, `None` for deterministic ones.
    pub std_error: Option<f64>,
    pub agrees: bool,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.agrees { "ok  " } else { "FAIL" };
        match self.std_error {
            Some(se) => write!(
                f,
                "{status} {:<28} analytic {:<22} mc {:<22} se {:<12e} ({:.2} se)",
                self.label,
                self.analytic,
                self.reference,
                se,
                if se > 0.0 {
                    (self.analytic - self.reference).abs() / se
                } else {
                    0.0
                }
            ),
            None => write!(
                f,
                "{status} {:<28} closed {:<24} quad {:<24} rel {:e}",
                self.label,
                self.analytic,
                self.reference,
                ((self.analytic - self.reference) / self.reference).abs()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub comparisons: Vec<Comparison>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.agrees)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.agrees)
    }
}

fn analytic_metric(system: &RelaySystem, metric: Metric) -> Result<f64> {
    match metric {
        Metric::PlcAvgCapacity => system.plc_avg_capacity(),
        Metric::VlcAvgCapacity => system.vlc_avg_capacity(),
        Metric::E2eAvgCapacity => system.e2e_avg_capacity(),
        Metric::PlcOutage => system.plc_outage(),
        Metric::VlcOutage => system.vlc_outage(),
        Metric::E2eOutage => system.e2e_outage_analytic(),
    }
}

fn sampled_comparison(
    label: String,
    analytic: f64,
    metric: Metric,
    sampled: &RelaySystem,
    mc: &McConfig,
) -> Result<Comparison> {
    let est = estimate(metric, sampled, mc)?;
    Ok(Comparison {
        label,
        analytic,
        reference: est.mean,
        std_error: Some(est.std_error),
        agrees: est.agrees_with(analytic, AGREEMENT_SIGMAS),
    })
}

/// Compares all six metrics at `rate_thresholds` for outages, with the
/// analytic side computed from `analytic` and sampling done on `sampled`.
/// Passing two different systems is how fault-injection checks are built.
pub fn compare_systems(
    analytic: &RelaySystemParams,
    sampled: &RelaySystemParams,
    mc: &McConfig,
    rate_thresholds: &[f64],
) -> Result<ValidationReport> {
    mc.validate()?;
    let a_sys = RelaySystem::new(analytic.clone())?;
    let s_sys = RelaySystem::new(sampled.clone())?;
    let mut comparisons = Vec::new();
    for metric in [
        Metric::PlcAvgCapacity,
        Metric::VlcAvgCapacity,
        Metric::E2eAvgCapacity,
    ] {
        comparisons.push(sampled_comparison(
            metric.name().to_string(),
            analytic_metric(&a_sys, metric)?,
            metric,
            &s_sys,
            mc,
        )?);
    }
    for &rate in rate_thresholds {
        let a_sys = RelaySystem::new(RelaySystemParams {
            rate_threshold_bits: rate,
            ..analytic.clone()
        })?;
        let s_sys = RelaySystem::new(RelaySystemParams {
            rate_threshold_bits: rate,
            ..sampled.clone()
        })?;
        for metric in [Metric::PlcOutage, Metric::VlcOutage, Metric::E2eOutage] {
            comparisons.push(sampled_comparison(
                format!("{} @ R_th={rate}", metric.name()),
                analytic_metric(&a_sys, metric)?,
                metric,
                &s_sys,
                mc,
            )?);
        }
    }
    let closed = a_sys.vlc().avg_capacity_closed()?;
    let quad = a_sys.vlc().avg_capacity_quad()?;
    comparisons.push(Comparison {
        label: "vlc_capacity closed vs quad".into(),
        analytic: closed,
        reference: quad,
        std_error: None,
        agrees: (closed - quad).abs() <= CLOSED_VS_QUAD_REL_TOL * quad.abs(),
    });
    Ok(ValidationReport { comparisons })
}

/// Validates `system` at the standard thresholds plus its own configured threshold.
pub fn validate(system: &RelaySystemParams, mc: &McConfig) -> Result<ValidationReport> {
    let mut thresholds = VALIDATION_RATE_THRESHOLDS.to_vec();
    if !thresholds.contains(&system.rate_threshold_bits) {
        thresholds.push(system.rate_threshold_bits);
    }
    compare_systems(system, system, mc, &thresholds)
}

/// Single-point comparison at the configured threshold only.
pub fn evaluate(system: &RelaySystemParams, mc: &McConfig) -> Result<ValidationReport> {
    compare_systems(system, system, mc, &[system.rate_threshold_bits])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_mc() -> McConfig {
        McConfig {
            trials: 2_000,
            seed: 5,
            batch_size: 500,
        }
    }

    #[test]
    fn spec_validation() {
        let base = SweepSpec {
            variable: SweepVar::RelayPower,
            start: 0.1,
            stop: 0.2,
            steps: 2,
            family: None,
        };
        assert!(base.validate().is_ok());
        assert!(SweepSpec {
            steps: 1,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(SweepSpec {
            start: 0.3,
            ..base.clone()
        }
        .validate()
        .is_err());
        let empty = Family {
            variable: SweepVar::LedHeight,
            values: vec![],
        };
        assert!(SweepSpec {
            family: Some(empty),
            ..base.clone()
        }
        .validate()
        .is_err());
        let same = Family {
            variable: SweepVar::RelayPower,
            values: vec![1.0],
        };
        assert!(SweepSpec {
            family: Some(same),
            ..base
        }
        .validate()
        .is_err());
    }

    #[test]
    fn grid_endpoints() {
        let spec = SweepSpec {
            variable: SweepVar::RateThreshold,
            start: 0.1,
            stop: 0.7,
            steps: 7,
            family: None,
        };
        let g = spec.grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.7);
    }

    #[test]
    fn parse_family_and_vars() {
        let f: Family = "led_height=2.15, 2.5,3".parse().unwrap();
        assert_eq!(f.variable, SweepVar::LedHeight);
        assert_eq!(f.values, vec![2.15, 2.5, 3.0]);
        assert!("height=1".parse::<Family>().is_err());
        assert!("led_height".parse::<Family>().is_err());
        for v in SweepVar::ALL {
            assert_eq!(v.name().parse::<SweepVar>().unwrap(), v);
        }
    }

    #[test]
    fn minimal_sweep_record_count() {
        let spec = SweepSpec {
            variable: SweepVar::RelayPower,
            start: 0.05,
            stop: 0.2,
            steps: 2,
            family: Some(Family {
                variable: SweepVar::CellRadius,
                values: vec![2.0, 3.0, 4.0],
            }),
        };
        let report = run_sweep(&spec, &RelaySystemParams::default(), &quick_mc()).unwrap();
        assert_eq!(report.records.len(), 6);
        let csv = report.to_csv(&["seed = 5".into()]);
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 7);
        assert!(data[0].starts_with("relay_power,cell_radius,plc_capacity"));
        assert!(csv.starts_with("# seed = 5\n"));
    }

    #[test]
    fn sweep_variables_reach_their_fields() {
        let mut p = RelaySystemParams::default();
        for (var, v) in SweepVar::ALL.iter().zip([0.3, 2.7, 4.1, 1.5, 0.2, 45.0]) {
            var.apply(&mut p, v);
        }
        assert_eq!(p.vlc.tx_power_w, 0.3);
        assert_eq!(p.vlc.height_m, 2.7);
        assert_eq!(p.vlc.cell_radius_m, 4.1);
        assert_eq!(p.rate_threshold_bits, 1.5);
        assert_eq!(p.plc.tx_power_w, 0.2);
        assert_eq!(p.plc.distance_m, 45.0);
    }

    #[test]
    fn unknown_figure() {
        assert!(figure_preset(1).is_err());
        for n in 2..=5 {
            assert_eq!(figure_preset(n).unwrap().number, n);
        }
    }

    #[test]
    fn trend_checker_flags_violations() {
        let spec = SweepSpec {
            variable: SweepVar::RelayPower,
            start: 0.05,
            stop: 0.2,
            steps: 3,
            family: None,
        };
        let report = run_sweep(&spec, &RelaySystemParams::default(), &quick_mc()).unwrap();
        let ok = Trend {
            column: Column::VlcCapacity,
            along_sweep: Direction::Increasing,
            across_family: Direction::Decreasing,
        };
        assert!(check_trends(&report, &[ok]).is_empty());
        let wrong = Trend {
            along_sweep: Direction::Decreasing,
            ..ok
        };
        assert_eq!(check_trends(&report, &[wrong]).len(), 2);
    }

    #[test]
    fn injected_attenuation_fault_is_caught() {
        let truth = RelaySystemParams::default();
        // Negating alpha multiplies the SNR scale by exp(4 alpha d); expressed
        // through the noise variance so the corrupted set is still valid.
        let mut corrupted = truth.clone();
        let alpha = truth.plc.attenuation_coeff();
        corrupted.plc.noise_variance *= (-4.0 * alpha * truth.plc.distance_m).exp();
        let mc = McConfig {
            trials: 20_000,
            ..quick_mc()
        };
        let report = compare_systems(&corrupted, &truth, &mc, &[1.0]).unwrap();
        assert!(!report.passed());
        let plc_cap = report
            .comparisons
            .iter()
            .find(|c| c.label == "plc_avg_capacity")
            .unwrap();
        assert!(!plc_cap.agrees);
    }

    #[test]
    fn comparison_lines_render() {
        let c = Comparison {
            label: "x".into(),
            analytic: 1.0,
            reference: 1.1,
            std_error: Some(0.01),
            agrees: false,
        };
        assert!(c.to_string().starts_with("FAIL"));
    }
}
