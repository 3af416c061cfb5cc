//! Safety integrity level bands for low-demand operation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;

/// Environment variable naming a JSON file with threshold overrides.
pub const THRESHOLDS_ENV: &str = "SIS_PFD_THRESHOLDS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SilBand {
    #[serde(rename = "SIL4")]
    Sil4,
    #[serde(rename = "SIL3")]
    Sil3,
    #[serde(rename = "SIL2")]
    Sil2,
    #[serde(rename = "SIL1")]
    Sil1,
    #[serde(rename = "none")]
    None,
}

/// Band edges `[b0, b1, b2, b3, b4]`: SIL4 is `[b0, b1)`, SIL3 `[b1, b2)`,
/// SIL2 `[b2, b3)`, SIL1 `[b3, b4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds([f64; 5]);

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds([1e-5, 1e-4, 1e-3, 1e-2, 1e-1])
    }
}

impl Thresholds {
    pub fn new(edges: &[f64]) -> Result<Self, String> {
        let edges: [f64; 5] = edges
            .try_into()
            .map_err(|_| format!("expected 5 band edges, got {}", edges.len()))?;
        if !edges.iter().all(|e| e.is_finite() && *e > 0.0) {
            return Err("band edges must be positive and finite".into());
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) {
            return Err("band edges must be strictly increasing".into());
        }
        Ok(Thresholds(edges))
    }

    pub fn edges(&self) -> &[f64; 5] {
        &self.0
    }

    /// Thresholds from the config value if present, else from the file named
    /// by [`THRESHOLDS_ENV`], else the defaults.
    pub fn resolve(from_config: Option<&[f64]>) -> Result<Self, ConfigError> {
        if let Some(edges) = from_config {
            return Thresholds::new(edges).map_err(|e| ConfigError::new("sil_thresholds", e));
        }
        match std::env::var_os(THRESHOLDS_ENV) {
            Some(path) => Self::from_file(Path::new(&path)),
            None => Ok(Thresholds::default()),
        }
    }

    fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let located = |reason: String| ConfigError::new(format!("${THRESHOLDS_ENV}"), reason);
        let text = std::fs::read_to_string(path)
            .map_err(|e| located(format!("{}: {e}", path.display())))?;
        let edges: Vec<f64> =
            serde_json::from_str(&text).map_err(|e| located(format!("{}: {e}", path.display())))?;
        Thresholds::new(&edges).map_err(located)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SilClass {
    pub band: SilBand,
    /// The value lies below the lowest band edge.
    pub below_scale: bool,
}

/// Lower-inclusive band lookup. Values under the lowest edge are SIL4 with
/// `below_scale`; an exact zero (nothing can fail) is `none` with
/// `below_scale`, since no band describes it.
pub fn classify_sil(pfd_avg: f64, thresholds: &Thresholds) -> SilClass {
    let [b0, b1, b2, b3, b4] = thresholds.0;
    let (band, below_scale) = if pfd_avg == 0.0 {
        (SilBand::None, true)
    } else if pfd_avg < b0 {
        (SilBand::Sil4, true)
    } else if pfd_avg < b1 {
        (SilBand::Sil4, false)
    } else if pfd_avg < b2 {
        (SilBand::Sil3, false)
    } else if pfd_avg < b3 {
        (SilBand::Sil2, false)
    } else if pfd_avg < b4 {
        (SilBand::Sil1, false)
    } else {
        (SilBand::None, false)
    };
    SilClass { band, below_scale }
}
