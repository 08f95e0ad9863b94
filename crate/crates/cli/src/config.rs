//! Run and sweep configuration files. Strict JSON: unknown keys are errors and
//! nothing is defaulted except `n_max`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ioncat::engine::{CarrierMode, DispersiveRate, ProtocolKind, ProtocolOptions, PulseSpec};
use ioncat::wigner::Axis;
use ioncat::C64;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Either `{"lambda": λ}` or `{"rabi": Ω, "eta": η, "detuning": δ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
}

impl DispersiveConfig {
    pub fn rate(&self) -> Result<DispersiveRate, CliError> {
        let rate = match (self.lambda, self.rabi, self.eta, self.detuning) {
            (Some(lambda), None, None, None) => DispersiveRate::Direct { lambda },
            (None, Some(rabi), Some(eta), Some(detuning)) => DispersiveRate::Physical { rabi, eta, detuning },
            _ => {
                return Err(CliError::Config(
                    "dispersive: give either lambda, or all of rabi, eta and detuning".into(),
                ))
            }
        };
        rate.validate()?;
        Ok(rate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// Rabi frequency of the resonant bichromatic pulse.
    pub rabi: f64,
    /// Lamb–Dicke parameter of the resonant pulse.
    pub eta: f64,
    pub dispersive: DispersiveConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Branch outcome to plot, e.g. `all_excited`.
    pub branch: String,
    pub x: Axis,
    pub p: Axis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub n_ions: usize,
    /// `[re, im]`; only the magnitude sets the pulse duration.
    pub alpha_target: [f64; 2],
    pub pulse: PulseConfig,
    pub carrier: CarrierMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Explicit resonant duration instead of solving it from `alpha_target`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonant_duration: Option<f64>,
    /// Pulse list, only for the `sequence` protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<PulseSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingConfig>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_target[0], self.alpha_target[1])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_ions == 0 {
            return Err(CliError::Config("n_ions must be at least 1".into()));
        }
        if !self.alpha_target.iter().all(|v| v.is_finite()) {
            return Err(CliError::Config("alpha_target must be finite".into()));
        }
        if !(self.pulse.rabi.is_finite() && self.pulse.rabi > 0.0) {
            return Err(CliError::Config("pulse.rabi must be positive".into()));
        }
        if !(self.pulse.eta.is_finite() && self.pulse.eta > 0.0) {
            return Err(CliError::Config("pulse.eta must be positive".into()));
        }
        self.pulse.dispersive.rate()?;
        match (&self.protocol, &self.sequence) {
            (ProtocolKind::Sequence, None) => {
                return Err(CliError::Config("protocol sequence needs a sequence list".into()))
            }
            (ProtocolKind::Sequence, Some(list)) => {
                if list.is_empty() {
                    return Err(CliError::Config("sequence list is empty".into()));
                }
                for spec in list {
                    spec.validate()?;
                }
            }
            (_, Some(_)) => return Err(CliError::Config("sequence is only allowed with protocol sequence".into())),
            _ => {}
        }
        if let Some(grid) = &self.wigner {
            grid.x.validate()?;
            grid.p.validate()?;
        }
        if let Some(t) = self.resonant_duration {
            if !t.is_finite() {
                return Err(CliError::Config("resonant_duration must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn protocol_options(&self) -> Result<ProtocolOptions, CliError> {
        let mut options = ProtocolOptions::new(self.pulse.rabi, self.pulse.eta, self.pulse.dispersive.rate()?);
        options.n_max = self.n_max;
        options.carrier = self.carrier;
        options.resonant_duration = self.resonant_duration;
        options.sequence = self.sequence.clone().unwrap_or_default();
        options.sampling = self.sampling.as_ref().map(|s| (self.seed, s.shots));
        Ok(options)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NIons,
    Alpha,
    Eta,
    Delta,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::NIons => "n_ions",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Eta => "eta",
            SweepAxis::Delta => "delta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A base run plus one swept parameter. `eta` and `delta` sweeps vary the
/// dispersive drive, which must then be given in physical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub run: RunConfig,
    pub sweep: SweepSpec,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.run.validate()?;
        if self.sweep.values.is_empty() {
            return Err(CliError::Config("sweep values are empty".into()));
        }
        if !self.sweep.values.iter().all(|v| v.is_finite()) {
            return Err(CliError::Config("sweep values must be finite".into()));
        }
        match self.sweep.axis {
            SweepAxis::NIons => {
                if !self.sweep.values.iter().all(|v| *v >= 1.0 && v.fract() == 0.0) {
                    return Err(CliError::Config("n_ions sweep values must be positive integers".into()));
                }
            }
            SweepAxis::Eta | SweepAxis::Delta => {
                if !matches!(self.run.pulse.dispersive.rate()?, DispersiveRate::Physical { .. }) {
                    return Err(CliError::Config(
                        "eta/delta sweeps need the dispersive drive as rabi, eta and detuning".into(),
                    ));
                }
                if self.run.n_ions > ioncat::oracle::MAX_DETUNED_IONS {
                    return Err(CliError::Config(format!(
                        "eta/delta sweeps integrate the full register; n_ions must be at most {}",
                        ioncat::oracle::MAX_DETUNED_IONS
                    )));
                }
                if self.sweep.values.iter().any(|v| *v == 0.0) {
                    return Err(CliError::Config("eta/delta sweep values must be nonzero".into()));
                }
            }
            SweepAxis::Alpha => {}
        }
        Ok(())
    }
}

pub fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"{
        "protocol": "multi_cat",
        "n_ions": 3,
        "alpha_target": [0.0, 3.0],
        "pulse": {"rabi": 1.0, "eta": 0.1, "dispersive": {"lambda": 0.5}},
        "carrier": "auto",
        "seed": 1,
        "output_dir": "out",
        "format": "json"
    }"#;

    #[test]
    fn parses_minimal_config() {
        let c: RunConfig = parse(SAMPLE, "config").unwrap();
        c.validate().unwrap();
        assert_eq!(c.protocol, ProtocolKind::MultiCat);
        assert_eq!(c.n_max, None);
        assert_eq!(c.protocol_options().unwrap().n_max, None);
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        let extra = SAMPLE.replace("\"seed\": 1", "\"seed\": 1, \"colour\": 3");
        assert!(parse::<RunConfig>(&extra, "config").is_err());
        let missing = SAMPLE.replace("\"carrier\": \"auto\",", "");
        assert!(parse::<RunConfig>(&missing, "config").is_err());
        let nested = SAMPLE.replace("{\"lambda\": 0.5}", "{\"lambda\": 0.5, \"x\": 1}");
        assert!(parse::<RunConfig>(&nested, "config").is_err());
    }

    #[test]
    fn dispersive_forms() {
        let d = DispersiveConfig { lambda: None, rabi: Some(1.0), eta: Some(0.05), detuning: Some(1.0) };
        assert!((d.rate().unwrap().lambda() - 0.01).abs() < 1e-15);
        let both = DispersiveConfig { lambda: Some(1.0), ..d.clone() };
        assert!(both.rate().is_err());
        let partial = DispersiveConfig { detuning: None, ..d };
        assert!(partial.rate().is_err());
    }

    #[test]
    fn sequence_rules() {
        let mut c: RunConfig = parse(SAMPLE, "config").unwrap();
        c.protocol = ProtocolKind::Sequence;
        assert!(c.validate().is_err());
        c.sequence = Some(vec![PulseSpec::Carrier { theta: 1.0, phase: 0.0 }]);
        c.validate().unwrap();
        c.protocol = ProtocolKind::MultiCat;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sweep_validation() {
        let run: RunConfig = parse(SAMPLE, "config").unwrap();
        let mut s = SweepConfig { run, sweep: SweepSpec { axis: SweepAxis::NIons, values: vec![] } };
        assert!(s.validate().is_err());
        s.sweep.values = vec![1.0, 2.5];
        assert!(s.validate().is_err());
        s.sweep.values = vec![1.0, 2.0];
        s.validate().unwrap();
        s.sweep.axis = SweepAxis::Eta;
        assert!(s.validate().is_err(), "direct lambda cannot be swept in eta");
    }
}
