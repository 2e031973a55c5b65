//! JSON run configuration.

use std::path::{Path, PathBuf};

use icc_core::icc::{ChannelParams, Polarity, SideSelection, SweepConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Region,
    Hk,
    Gvbc,
    Relay,
    Ideal,
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Region => "region",
            Mode::Hk => "hk",
            Mode::Gvbc => "gvbc",
            Mode::Relay => "relay",
            Mode::Ideal => "ideal",
            Mode::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub p1: f64,
    pub p2: f64,
    pub a12: f64,
    pub a21: f64,
    /// Conferencing gain; required by `region` and `relay`.
    #[serde(default)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    Z1,
    Z2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayPolarity {
    Positive,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_sides")]
    pub sides: Sides,
    #[serde(default = "default_polarity")]
    pub polarity: RelayPolarity,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            resolution: default_resolution(),
            lambda_grid: default_lambda_grid(),
            sides: default_sides(),
            polarity: default_polarity(),
        }
    }
}

fn default_resolution() -> usize {
    SweepConfig::default().resolution
}

fn default_lambda_grid() -> Vec<f64> {
    SweepConfig::default().lambda_grid
}

fn default_sides() -> Sides {
    Sides::Both
}

fn default_polarity() -> RelayPolarity {
    RelayPolarity::Both
}

fn default_baseline_resolution() -> usize {
    17
}

fn default_plot() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelConfig,
    pub mode: Mode,
    #[serde(default)]
    pub sweep: SweepSection,
    /// Conferencing gains compared in `compare` mode.
    #[serde(default)]
    pub k_values: Option<Vec<f64>>,
    /// Grid of the HK and GVBC baselines in `compare` mode.
    #[serde(default = "default_baseline_resolution")]
    pub baseline_resolution: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_plot")]
    pub plot: bool,
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub no_plot: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::validation(
                if path == "." { "config".into() } else { path },
                e.into_inner().to_string(),
            )
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(out) = &o.out {
            self.output_dir = Some(out.clone());
        }
        if let Some(r) = o.resolution {
            self.sweep.resolution = r;
        }
        if o.no_plot {
            self.plot = false;
        }
    }

    /// Channel parameters with conferencing gain `k`.
    pub fn channel_with(&self, k: f64) -> Result<ChannelParams, CliError> {
        let c = &self.channel;
        ChannelParams::new(c.p1, c.p2, c.a12, c.a21, k)
            .map_err(|e| CliError::validation("channel", e.to_string()))
    }

    /// The single conferencing gain of the non-comparison modes.
    pub fn k(&self) -> f64 {
        self.channel.k.unwrap_or(0.0)
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            resolution: self.sweep.resolution,
            lambda_grid: self.sweep.lambda_grid.clone(),
            sides: match self.sweep.sides {
                Sides::Z1 => SideSelection::Z1,
                Sides::Z2 => SideSelection::Z2,
                Sides::Both => SideSelection::Both,
            },
            polarity: match self.sweep.polarity {
                RelayPolarity::Positive => Polarity::PositiveOnly,
                RelayPolarity::Both => Polarity::Both,
            },
        }
    }

    pub fn output_dir(&self) -> Result<&Path, CliError> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| CliError::validation("output_dir", "required (or pass --out)"))
    }

    /// Checks every field the selected mode needs.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.channel;
        let positive = [("channel.p1", c.p1), ("channel.p2", c.p2)];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::validation(
                    field,
                    format!("must be a positive number, got {v}"),
                ));
            }
        }
        let non_negative = [("channel.a12", c.a12), ("channel.a21", c.a21)];
        for (field, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::validation(
                    field,
                    format!("must be non-negative, got {v}"),
                ));
            }
        }
        if let Some(k) = c.k {
            if !(k.is_finite() && k >= 0.0) {
                return Err(CliError::validation(
                    "channel.k",
                    format!("must be non-negative, got {k}"),
                ));
            }
        }
        if matches!(self.mode, Mode::Region | Mode::Relay) && c.k.is_none() {
            return Err(CliError::validation(
                "channel.k",
                format!("required for mode {}", self.mode.name()),
            ));
        }
        if self.sweep.resolution < 2 {
            return Err(CliError::validation(
                "sweep.resolution",
                "must be at least 2",
            ));
        }
        if self.sweep.lambda_grid.is_empty()
            || self.sweep.lambda_grid.iter().any(|x| !x.is_finite())
        {
            return Err(CliError::validation(
                "sweep.lambda_grid",
                "must be a non-empty list of finite numbers",
            ));
        }
        if self.baseline_resolution < 2 {
            return Err(CliError::validation(
                "baseline_resolution",
                "must be at least 2",
            ));
        }
        if self.mode == Mode::Compare {
            match &self.k_values {
                None => {
                    return Err(CliError::validation(
                        "k_values",
                        "required for mode compare",
                    ))
                }
                Some(ks) if ks.is_empty() => {
                    return Err(CliError::validation("k_values", "must not be empty"))
                }
                Some(ks) => {
                    if let Some((i, k)) = ks
                        .iter()
                        .enumerate()
                        .find(|(_, k)| !(k.is_finite() && **k >= 0.0))
                    {
                        return Err(CliError::validation(
                            format!("k_values[{i}]"),
                            format!("must be non-negative, got {k}"),
                        ));
                    }
                }
            }
        }
        self.output_dir()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"{
        "channel": {"p1": 6, "p2": 1.5, "a12": 0.74, "a21": 0.74},
        "mode": "compare",
        "k_values": [1, 4],
        "output_dir": "out"
    }"#;

    #[test]
    fn defaults_fill_the_sweep() {
        let c = RunConfig::from_json(REFERENCE).unwrap();
        assert_eq!(c.sweep.resolution, 9);
        assert_eq!(c.sweep.lambda_grid, vec![0.0, 0.5, 1.0, 1.5]);
        assert_eq!(c.baseline_resolution, 17);
        assert!(c.plot);
        c.validate().unwrap();
    }

    #[test]
    fn parse_errors_name_the_field() {
        let bad = REFERENCE.replace("\"p2\": 1.5", "\"p2\": \"x\"");
        let err = RunConfig::from_json(&bad).unwrap_err();
        assert!(
            matches!(&err, CliError::Validation { field, .. } if field == "channel.p2"),
            "{err}"
        );
        let bad = REFERENCE.replace("\"compare\"", "\"plot\"");
        let err = RunConfig::from_json(&bad).unwrap_err();
        assert!(
            matches!(&err, CliError::Validation { field, .. } if field == "mode"),
            "{err}"
        );
    }

    #[test]
    fn mode_requirements() {
        let mut c = RunConfig::from_json(REFERENCE).unwrap();
        c.k_values = None;
        assert!(
            matches!(c.validate(), Err(CliError::Validation { field, .. }) if field == "k_values")
        );
        c.mode = Mode::Relay;
        assert!(
            matches!(c.validate(), Err(CliError::Validation { field, .. }) if field == "channel.k")
        );
        c.channel.k = Some(2.0);
        c.validate().unwrap();
        c.channel.p1 = -1.0;
        assert!(
            matches!(c.validate(), Err(CliError::Validation { field, .. }) if field == "channel.p1")
        );
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::from_json(REFERENCE).unwrap();
        c.apply(&Overrides {
            mode: Some(Mode::Hk),
            out: Some("elsewhere".into()),
            resolution: Some(3),
            no_plot: true,
        });
        assert_eq!(c.mode, Mode::Hk);
        assert_eq!(c.output_dir.as_deref(), Some(Path::new("elsewhere")));
        assert_eq!(c.sweep.resolution, 3);
        assert!(!c.plot);
    }
}
