//! Scenario files: one JSON document describing a channel, an analyzing
//! wavelet, a time-scale grid, and optionally a probe, a modem, and an
//! output directory.
//!
//! Unknown keys are rejected — a typo in a scenario should fail loudly, not
//! silently fall back to a default. SI units throughout: meters, seconds,
//! Hz, m/s.

use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

use scalewave::channel::{Channel, NoiseSpec, Ray, SPEED_OF_LIGHT};
use scalewave::grid::TimeScaleGrid;
use scalewave::modem::{Basis, Combiner, Modem, ModemConfig};
use scalewave::signal::TimeAxis;
use scalewave::wavelet::MotherWavelet;

/// A complete simulation scenario.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub channel: ChannelSpec,
    pub wavelet: WaveletSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub modem: Option<ModemSpec>,
    #[serde(default)]
    pub outputs: Option<OutputSpec>,
}

/// The multipath channel: rays plus optional receiver noise.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Propagation speed, m/s.
    #[serde(default = "default_c")]
    pub c: f64,
    pub rays: Vec<RaySpec>,
    #[serde(default)]
    pub noise: Option<NoiseSpecIn>,
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

/// One two-leg propagation path.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySpec {
    /// Initial range of the first leg, meters.
    pub r10_m: f64,
    /// Initial range of the second leg, meters.
    pub r20_m: f64,
    /// Radial speed of the first interface, m/s (positive = receding).
    pub v1_mps: f64,
    /// Radial speed of the second interface, m/s.
    pub v2_mps: f64,
    /// Path reflectivity, `0 < |pr| <= 1`.
    pub pr: f64,
}

/// Seeded receiver AWGN relative to the received signal power.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpecIn {
    pub snr_db: f64,
    pub seed: u64,
}

/// The analyzing wavelet family.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSpec {
    pub order: u32,
}

/// Time-scale analysis grid plus the sampling of the simulation itself.
///
/// The translation axis is `[0, duration_s]` stepped at the sample period,
/// i.e. `round(duration_s * fs_hz) + 1` points.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Smallest analyzed scale, seconds.
    pub s_min: f64,
    pub octaves: u32,
    pub voices: u32,
    /// Simulation sample rate, Hz.
    pub fs_hz: f64,
    /// Extent of the translation axis, seconds.
    pub duration_s: f64,
}

/// The sounding probe.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// Scale of the transmitted atom, seconds.
    pub scale: f64,
}

/// Multi-scale modem parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModemSpec {
    pub scales_used: u32,
    pub base_scale: u32,
    /// Symbols (= bits) per second.
    pub symbol_rate: f64,
    pub basis: BasisSpec,
    pub combiner: CombinerSpec,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisSpec {
    Haar,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinerSpec {
    EqualGain,
    MaxRatio,
}

/// Where artifacts go when the command line does not say otherwise.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

impl Scenario {
    /// Loads and parses a scenario file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse scenario file {}", path.display()))?;
        Ok(scenario)
    }

    /// Builds the validated channel.
    pub fn channel(&self) -> anyhow::Result<Channel> {
        let rays = self
            .channel
            .rays
            .iter()
            .map(|r| Ray::new(r.r10_m, r.r20_m, r.v1_mps, r.v2_mps, r.pr))
            .collect::<Result<Vec<_>, _>>()?;
        let mut channel = Channel::new(rays, self.channel.c)?;
        if let Some(noise) = self.channel.noise {
            channel = channel.with_noise(NoiseSpec { snr_db: noise.snr_db, seed: noise.seed });
        }
        Ok(channel)
    }

    /// Builds the analyzing wavelet.
    pub fn wavelet(&self) -> anyhow::Result<MotherWavelet> {
        Ok(MotherWavelet::new(self.wavelet.order)?)
    }

    /// Simulation sample rate, Hz.
    pub fn fs(&self) -> f64 {
        self.grid.fs_hz
    }

    /// Builds the time-scale grid (translations over `[0, duration_s]` at
    /// the sample period).
    pub fn grid(&self) -> anyhow::Result<TimeScaleGrid> {
        if !(self.grid.fs_hz.is_finite() && self.grid.fs_hz > 0.0) {
            anyhow::bail!("grid.fs_hz must be positive and finite, got {}", self.grid.fs_hz);
        }
        if !(self.grid.duration_s.is_finite() && self.grid.duration_s > 0.0) {
            anyhow::bail!(
                "grid.duration_s must be positive and finite, got {}",
                self.grid.duration_s
            );
        }
        let dt = 1.0 / self.grid.fs_hz;
        let len = (self.grid.duration_s * self.grid.fs_hz).round() as usize + 1;
        let translations = TimeAxis::new(0.0, dt, len)?;
        Ok(TimeScaleGrid::new(self.grid.s_min, self.grid.octaves, self.grid.voices, translations)?)
    }

    /// The probe scale, if the scenario declares a probe.
    pub fn probe_scale(&self) -> Option<f64> {
        self.probe.as_ref().map(|p| p.scale)
    }

    /// Builds the modem, if the scenario declares one.
    pub fn modem(&self) -> anyhow::Result<Option<Modem>> {
        let Some(spec) = &self.modem else {
            return Ok(None);
        };
        let config = ModemConfig {
            scales_used: spec.scales_used,
            base_scale: spec.base_scale,
            symbol_rate: spec.symbol_rate,
            basis: match spec.basis {
                BasisSpec::Haar => Basis::Haar,
            },
            combiner: match spec.combiner {
                CombinerSpec::EqualGain => Combiner::EqualGain,
                CombinerSpec::MaxRatio => Combiner::MaxRatio,
            },
        };
        Ok(Some(Modem::new(config)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "channel": {"rays": [{"r10_m": 1.5, "r20_m": 1.5, "v1_mps": 0.0, "v2_mps": 0.0, "pr": 1.0}]},
        "wavelet": {"order": 3},
        "grid": {"s_min": 2.5e-10, "octaves": 4, "voices": 8, "fs_hz": 1.6e10, "duration_s": 3.2e-8}
    }"#;

    #[test]
    fn minimal_scenario_parses_with_defaults() {
        let s: Scenario = serde_json::from_str(MINIMAL).unwrap();
        assert_eq!(s.channel.c, SPEED_OF_LIGHT);
        assert!(s.probe.is_none() && s.modem.is_none() && s.outputs.is_none());
        let grid = s.grid().unwrap();
        assert_eq!(grid.n_translations(), 513);
        assert_eq!(grid.n_scales(), 33);
        let ch = s.channel().unwrap();
        assert_eq!(ch.rays().len(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"order\": 3", "\"order\": 3, \"ordr\": 4");
        assert!(serde_json::from_str::<Scenario>(&bad).is_err());
        let bad = MINIMAL.replace("\"pr\": 1.0", "\"pr\": 1.0, \"phase\": 0.0");
        assert!(serde_json::from_str::<Scenario>(&bad).is_err());
    }

    #[test]
    fn combiner_and_basis_names_are_kebab_case() {
        let with_modem = MINIMAL.replace(
            "\"wavelet\"",
            r#""modem": {"scales_used": 2, "base_scale": 3, "symbol_rate": 1.0e6,
                          "basis": "haar", "combiner": "max-ratio"},
               "wavelet""#,
        );
        let s: Scenario = serde_json::from_str(&with_modem).unwrap();
        let modem = s.modem().unwrap().unwrap();
        assert_eq!(modem.config().combiner, Combiner::MaxRatio);
        assert!(serde_json::from_str::<Scenario>(
            &with_modem.replace("max-ratio", "maximal-ratio")
        )
        .is_err());
    }
}
