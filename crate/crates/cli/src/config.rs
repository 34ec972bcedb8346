//! Scenario files.
//!
//! A scenario is a TOML document with the sections `pulse`, `interferometer`,
//! `detector` (with a `detector.switching` table) and `sweep`, plus an
//! optional top-level `mode`. Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use udwi_core::ensemble::CoefficientMode;
use udwi_core::{DetectorSpec, Interferometer, PulseProfile, Switching};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSetting>,
    pub pulse: PulseConfig,
    pub interferometer: InterferometerConfig,
    pub detector: DetectorConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub k0: f64,
    pub delta: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerConfig {
    pub l1: f64,
    pub l2: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub energy_gap: f64,
    pub coupling: f64,
    #[serde(default)]
    pub switching: SwitchingConfig,
}

// `Eternal {}` rather than a unit variant: serde ignores stray keys next to
// the tag of a unit variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SwitchingConfig {
    Eternal {},
    Gaussian { t_chi: f64, delta_chi: f64 },
}

impl Default for SwitchingConfig {
    fn default() -> Self {
        SwitchingConfig::Eternal {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Theta,
    /// Sets `l2 = l1 + value`.
    DeltaL,
    DeltaChi,
    EnergyGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSetting {
    #[default]
    Corrected,
    PaperVerbatim,
}

impl ModeSetting {
    pub fn as_str(self) -> &'static str {
        self.coefficient_mode().as_str()
    }

    pub fn coefficient_mode(self) -> CoefficientMode {
        match self {
            ModeSetting::Corrected => CoefficientMode::Corrected,
            ModeSetting::PaperVerbatim => CoefficientMode::PaperVerbatim,
        }
    }
}

impl fmt::Display for ModeSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModeSetting {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "corrected" => Ok(ModeSetting::Corrected),
            "paper_verbatim" => Ok(ModeSetting::PaperVerbatim),
            other => Err(CliError::Validation(format!(
                "mode: expected \"corrected\" or \"paper_verbatim\", got {other:?}"
            ))),
        }
    }
}

/// Model objects for one point of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub pulse: PulseProfile,
    pub ifm: Interferometer,
    pub det: DetectorSpec,
    pub mode: CoefficientMode,
}

impl ScenarioConfig {
    /// Parses and validates a TOML document.
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serialises")
    }

    /// Hex SHA-256 of the serialised document.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn effective_mode(&self) -> ModeSetting {
        self.mode.unwrap_or_default()
    }

    fn numeric_fields(&self) -> Vec<(&'static str, f64)> {
        let mut fields = vec![
            ("pulse.k0", self.pulse.k0),
            ("pulse.delta", self.pulse.delta),
            ("pulse.mass", self.pulse.mass),
            ("interferometer.l1", self.interferometer.l1),
            ("interferometer.l2", self.interferometer.l2),
            ("interferometer.theta", self.interferometer.theta),
            ("detector.energy_gap", self.detector.energy_gap),
            ("detector.coupling", self.detector.coupling),
            ("sweep.start", self.sweep.start),
            ("sweep.stop", self.sweep.stop),
        ];
        if let SwitchingConfig::Gaussian { t_chi, delta_chi } = self.detector.switching {
            fields.push(("detector.switching.t_chi", t_chi));
            fields.push(("detector.switching.delta_chi", delta_chi));
        }
        fields
    }

    pub fn validate(&self) -> CliResult<()> {
        for (key, value) in self.numeric_fields() {
            if !value.is_finite() {
                return Err(CliError::Validation(format!(
                    "{key}: must be finite, got {value}"
                )));
            }
        }
        if self.sweep.steps < 2 {
            return Err(CliError::Validation(format!(
                "sweep.steps: must be at least 2, got {}",
                self.sweep.steps
            )));
        }
        if self.sweep.variable == SweepVariable::DeltaChi
            && matches!(self.detector.switching, SwitchingConfig::Eternal {})
        {
            return Err(CliError::Validation(
                "sweep.variable: delta_chi sweeps need detector.switching.kind = \"gaussian\""
                    .into(),
            ));
        }
        self.scenario()?;
        // Every swept quantity enters monotonically, so the endpoints suffice.
        self.at(self.sweep.start)?;
        self.at(self.sweep.stop)?;
        Ok(())
    }

    /// The configuration without the sweep applied.
    pub fn scenario(&self) -> CliResult<Scenario> {
        let p = &self.pulse;
        let pulse = PulseProfile::new(p.k0, p.delta, p.mass)
            .map_err(|e| CliError::from_model(e, "pulse"))?;
        let i = &self.interferometer;
        let ifm = Interferometer::new(i.l1, i.l2, i.theta)
            .map_err(|e| CliError::from_model(e, "interferometer"))?;
        let switching = match self.detector.switching {
            SwitchingConfig::Eternal {} => Switching::Eternal,
            SwitchingConfig::Gaussian { t_chi, delta_chi } => {
                Switching::Gaussian { t_chi, delta_chi }
            }
        };
        let section = match switching {
            Switching::Eternal => "detector",
            Switching::Gaussian { .. } => "detector.switching",
        };
        let det = DetectorSpec::new(self.detector.energy_gap, self.detector.coupling, switching)
            .map_err(|e| CliError::from_model(e, section))?;
        Ok(Scenario {
            pulse,
            ifm,
            det,
            mode: self.effective_mode().coefficient_mode(),
        })
    }

    /// The scenario with the swept variable set to `value`.
    pub fn at(&self, value: f64) -> CliResult<Scenario> {
        let mut s = self.scenario()?;
        let sweep_err = |e| CliError::from_model(e, "sweep");
        match self.sweep.variable {
            SweepVariable::Theta => s.ifm = s.ifm.with_theta(value).map_err(sweep_err)?,
            SweepVariable::DeltaL => s.ifm = s.ifm.with_delta_l(value).map_err(sweep_err)?,
            SweepVariable::DeltaChi => s.det = s.det.with_delta_chi(value).map_err(sweep_err)?,
            SweepVariable::EnergyGap => s.det = s.det.with_energy_gap(value).map_err(sweep_err)?,
        }
        Ok(s)
    }

    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn sweep_values(&self) -> Vec<f64> {
        let SweepConfig {
            start, stop, steps, ..
        } = self.sweep;
        let last = (steps - 1) as f64;
        (0..steps)
            .map(|i| {
                if i + 1 == steps {
                    stop
                } else {
                    start + (stop - start) * (i as f64 / last)
                }
            })
            .collect()
    }
}
