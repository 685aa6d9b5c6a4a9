use serde::{Deserialize, Serialize};

use super::BagCalibration;
use crate::geometry::{
    convex_hull, fill_polygon, pca_axes, polygon_area, AxisFrame, Point, Polygon,
};
use crate::mask::{Label, SegMask};
use crate::scalar::Scalar;

/// Cap on the elongation metric. Also the value reported for a closed opening.
pub const E_MAX: f64 = 100.0;

/// Normalised hull area and hull elongation of the detected rim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpeningMetrics<T> {
    pub a_ch: T,
    pub e_ch: T,
    /// Empty when no rim was detected.
    pub hull: Polygon<T>,
    /// Area centroid of the hull.
    pub center: Option<Point<T>>,
    /// Principal axes of the filled hull.
    pub frame: Option<AxisFrame<T>>,
    pub rim_pixel_count: usize,
}

impl<T: Scalar> OpeningMetrics<T> {
    pub fn closed() -> Self {
        OpeningMetrics {
            a_ch: T::zero(),
            e_ch: T::of(E_MAX),
            hull: Polygon::default(),
            center: None,
            frame: None,
            rim_pixel_count: 0,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.rim_pixel_count == 0
    }
}

/// Hull metrics of an arbitrary pixel set, with the hull area divided by `norm_area`.
///
/// Elongation is the PCA axis ratio over every lattice point of the filled hull,
/// capped at [`E_MAX`].
pub fn region_metrics<T: Scalar>(pixels: &[(i32, i32)], norm_area: f64) -> OpeningMetrics<T> {
    if pixels.is_empty() {
        return OpeningMetrics::closed();
    }
    let pts: Vec<Point<T>> = pixels.iter().map(|&p| Point::from_px(p)).collect();
    let hull = convex_hull(&pts).expect("non-empty");
    let a_ch = T::of(polygon_area(&hull).as_f64() / norm_area);
    let filled: Vec<Point<T>> = fill_polygon(&hull).into_iter().map(Point::from_px).collect();
    let frame = pca_axes(&filled).ok();
    let e_max = T::of(E_MAX);
    let e_ch = frame
        .and_then(|f| f.ratio())
        .map_or(e_max, |r| r.min(e_max).max(T::one()));
    OpeningMetrics {
        a_ch,
        e_ch,
        center: hull.area_centroid().ok(),
        hull,
        frame,
        rim_pixel_count: pixels.len(),
    }
}

/// Opening metrics over all rim pixels of the mask, merged into one hull.
pub fn opening_metrics<T: Scalar>(mask: &SegMask, cal: &BagCalibration) -> OpeningMetrics<T> {
    region_metrics(&mask.pixels_of(Label::Rim), cal.max_hull_area)
}

/// Bag-region pixel count (bag, rim and handle) over the flat-bag area.
pub fn bag_area_fraction(mask: &SegMask, cal: &BagCalibration) -> f64 {
    mask.bag_region_count() as f64 / cal.max_bag_area
}
