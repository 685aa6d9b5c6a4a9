//! Label extraction from paired regular/UV images by colour thresholding.

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::raster::dilate_layer;
use crate::geometry::connected_components;
use crate::mask::{Label, SegMask};

/// Converts to 8-bit HSV with hue in `0..180` (degrees halved).
pub fn rgb_to_hsv([r, g, b]: [u8; 3]) -> [u8; 3] {
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let s = if max > 0.0 { 255.0 * delta / max } else { 0.0 };
    let h_deg = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * (gf - bf) / delta
    } else if max == gf {
        120.0 + 60.0 * (bf - rf) / delta
    } else {
        240.0 + 60.0 * (rf - gf) / delta
    };
    let h_deg = if h_deg < 0.0 { h_deg + 360.0 } else { h_deg };
    [
        ((h_deg / 2.0).round() as u32 % 180) as u8,
        s.round() as u8,
        max as u8,
    ]
}

/// Inclusive HSV box. Hue wraps through 0 when `h_lo > h_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRange {
    pub h_lo: u8,
    pub h_hi: u8,
    pub s_lo: u8,
    pub s_hi: u8,
    pub v_lo: u8,
    pub v_hi: u8,
}

impl ColorRange {
    pub fn validate(&self) -> Result<()> {
        if self.s_lo > self.s_hi || self.v_lo > self.v_hi {
            return Err(Error::config(0, "colour range has low bound above high bound"));
        }
        if self.h_lo >= 180 || self.h_hi >= 180 {
            return Err(Error::config(0, "hue bounds must be below 180"));
        }
        Ok(())
    }

    pub fn contains_hsv(&self, [h, s, v]: [u8; 3]) -> bool {
        let hue_ok = if self.h_lo <= self.h_hi {
            (self.h_lo..=self.h_hi).contains(&h)
        } else {
            h >= self.h_lo || h <= self.h_hi
        };
        hue_ok && (self.s_lo..=self.s_hi).contains(&s) && (self.v_lo..=self.v_hi).contains(&v)
    }

    pub fn contains_rgb(&self, rgb: [u8; 3]) -> bool {
        self.contains_hsv(rgb_to_hsv(rgb))
    }
}

/// Thresholds for the glow colours and for separating the bag from the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UvRanges {
    /// Green paint on the handles.
    pub handle: ColorRange,
    /// Red paint on the rim.
    pub rim: ColorRange,
    /// Bag colour in the regular-light image.
    pub bag: ColorRange,
}

impl Default for UvRanges {
    fn default() -> Self {
        UvRanges {
            handle: ColorRange { h_lo: 40, h_hi: 80, s_lo: 100, s_hi: 255, v_lo: 100, v_hi: 255 },
            rim: ColorRange { h_lo: 170, h_hi: 10, s_lo: 100, s_hi: 255, v_lo: 100, v_hi: 255 },
            bag: ColorRange { h_lo: 0, h_hi: 179, s_lo: 0, s_hi: 255, v_lo: 120, v_hi: 255 },
        }
    }
}

impl UvRanges {
    pub fn validate(&self) -> Result<()> {
        self.handle.validate()?;
        self.rim.validate()?;
        self.bag.validate()
    }
}

/// Bag-vs-table mask from the regular-light image.
pub fn bag_mask_from_regular(regular: &RgbImage, bag: &ColorRange) -> Vec<bool> {
    regular.pixels().map(|p| bag.contains_rgb(p.0)).collect()
}

fn drop_small(layer: &[bool], w: usize, h: usize, min_component: usize) -> Vec<bool> {
    if min_component <= 1 {
        return layer.to_vec();
    }
    let labels = layer
        .iter()
        .map(|&b| if b { Label::Rim } else { Label::Background })
        .collect();
    let m = SegMask::from_labels(w, h, labels).expect("sized");
    let mut out = vec![false; layer.len()];
    for comp in connected_components(&m, Label::Rim) {
        if comp.len() >= min_component {
            for &(x, y) in comp.points() {
                out[y as usize * w + x as usize] = true;
            }
        }
    }
    out
}

/// Builds a four-class mask from a UV-lit image.
///
/// Green glow becomes handle and red glow becomes rim. Each layer is dilated
/// by a disk of `dilation_radius`, then components smaller than
/// `min_component` pixels are discarded. Handle wins over rim where the two
/// overlap. Remaining `bag_mask` pixels are bag, the rest background.
pub fn uv_threshold_label(
    uv: &RgbImage,
    bag_mask: &[bool],
    ranges: &UvRanges,
    dilation_radius: u32,
    min_component: usize,
) -> Result<SegMask> {
    let (w, h) = (uv.width() as usize, uv.height() as usize);
    if bag_mask.len() != w * h {
        return Err(Error::DimensionMismatch {
            expected: (w, h),
            found: (bag_mask.len(), 1),
        });
    }
    let hsv: Vec<[u8; 3]> = uv.pixels().map(|p| rgb_to_hsv(p.0)).collect();
    let handle_raw: Vec<bool> = hsv.iter().map(|&c| ranges.handle.contains_hsv(c)).collect();
    let rim_raw: Vec<bool> = hsv
        .iter()
        .zip(&handle_raw)
        .map(|(&c, &hd)| !hd && ranges.rim.contains_hsv(c))
        .collect();
    let handle = drop_small(&dilate_layer(&handle_raw, w, h, dilation_radius), w, h, min_component);
    let rim = drop_small(&dilate_layer(&rim_raw, w, h, dilation_radius), w, h, min_component);
    let labels = (0..w * h)
        .map(|i| {
            if handle[i] {
                Label::Handle
            } else if rim[i] {
                Label::Rim
            } else if bag_mask[i] {
                Label::Bag
            } else {
                Label::Background
            }
        })
        .collect();
    SegMask::from_labels(w, h, labels)
}

pub(crate) const TABLE_RGB: [u8; 3] = [40, 40, 40];
pub(crate) const BAG_RGB: [u8; 3] = [220, 200, 150];
pub(crate) const DARK_RGB: [u8; 3] = [10, 10, 20];
pub(crate) const RIM_GLOW_RGB: [u8; 3] = [255, 30, 30];
pub(crate) const HANDLE_GLOW_RGB: [u8; 3] = [30, 255, 60];

/// Synthetic regular-light and UV-light images for a ground-truth mask.
pub fn render_pseudo_images(mask: &SegMask) -> (RgbImage, RgbImage) {
    let (w, h) = (mask.width() as u32, mask.height() as u32);
    let regular = RgbImage::from_fn(w, h, |x, y| {
        Rgb(if mask.get(x as i32, y as i32).is_bag_region() {
            BAG_RGB
        } else {
            TABLE_RGB
        })
    });
    let uv = RgbImage::from_fn(w, h, |x, y| {
        Rgb(match mask.get(x as i32, y as i32) {
            Label::Rim => RIM_GLOW_RGB,
            Label::Handle => HANDLE_GLOW_RGB,
            _ => DARK_RGB,
        })
    });
    (regular, uv)
}
