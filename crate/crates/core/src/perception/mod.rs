//! From label images to the scalars the policy consumes.

mod metrics;
mod segment;
mod uv;

pub use metrics::{bag_area_fraction, opening_metrics, region_metrics, OpeningMetrics, E_MAX};
pub use segment::{NoisySegmenter, OracleSegmenter, Segmenter, ThresholdSegmenter};
pub use uv::{
    bag_mask_from_regular, render_pseudo_images, rgb_to_hsv, uv_threshold_label, ColorRange,
    UvRanges,
};

pub use crate::mask::{Label, SegMask};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-bag normalisers, in square pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BagCalibration {
    /// Largest rim hull area seen for this bag (opening held maximally open).
    pub max_hull_area: f64,
    /// Top-down area of the bag lying flat.
    pub max_bag_area: f64,
}

impl BagCalibration {
    pub fn new(max_hull_area: f64, max_bag_area: f64) -> Result<Self> {
        let c = BagCalibration {
            max_hull_area,
            max_bag_area,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_hull_area > 0.0 && self.max_bag_area > 0.0) {
            return Err(Error::config(0, "calibration areas must be positive"));
        }
        if self.max_hull_area > self.max_bag_area {
            return Err(Error::config(
                0,
                "calibration.max_hull_area exceeds calibration.max_bag_area",
            ));
        }
        Ok(())
    }
}
