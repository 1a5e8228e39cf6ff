//! Full simulator configuration and its JSON form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detach::LipModel;
use crate::error::{Result, SimError};
use crate::frame::RenderOptions;
use crate::network::CupConfig;
use crate::scenario::{PalpationModel, SlideModel, TextureModel};
use crate::sensor::SensorModel;
use crate::surface::SurfaceCatalog;
use crate::wrench::WrenchModel;

/// Everything a scenario run depends on besides the scenario and seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub cup: CupConfig,
    pub surfaces: SurfaceCatalog,
    pub sensor: SensorModel,
    pub texture: TextureModel,
    pub slide: SlideModel,
    pub palpation: PalpationModel,
    pub lip: LipModel,
    pub wrench: WrenchModel,
    pub render: RenderOptions,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Cheap structural checks; network topology is checked when built.
    pub fn validate(&self) -> Result<()> {
        crate::network::build_network(&self.cup)?;
        let s = &self.surfaces;
        for (name, v) in [
            ("grit_600", s.grit_600),
            ("grit_120", s.grit_120),
            ("smooth", s.smooth),
            ("wavy", s.wavy),
            ("ribbed", s.ribbed),
            ("open", s.open),
            ("orifice", s.orifice),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SimError::Config(format!("surfaces.{name} must be finite and >= 0, got {v}")));
            }
        }
        if s.grit_120 <= s.grit_600 {
            return Err(SimError::Config("surfaces.grit_120 must exceed surfaces.grit_600".into()));
        }
        if !(0.0..=1.0).contains(&s.horizontal_fraction) {
            return Err(SimError::Config("surfaces.horizontal_fraction must lie in [0, 1]".into()));
        }
        if !(self.sensor.resolution > 0.0) || !(self.sensor.noise_rms >= 0.0) {
            return Err(SimError::Config("sensor resolution must be > 0 and noise >= 0".into()));
        }
        if !(self.lip.gap_max_mm > 0.0) {
            return Err(SimError::Config("lip.gap_max_mm must be > 0".into()));
        }
        Ok(())
    }
}
