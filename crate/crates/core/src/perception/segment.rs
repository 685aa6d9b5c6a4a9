//! Mask providers standing in for a learned segmentation network.

use rand::Rng as _;

use super::uv::{bag_mask_from_regular, render_pseudo_images, uv_threshold_label, UvRanges};
use crate::geometry::erode_layer;
use crate::mask::{Label, SegMask};
use crate::rng::{stream, Purpose};

/// Produces the four-class mask the policy sees for one observation.
///
/// `call` identifies the observation within a trial; implementations with
/// noise derive their random stream from it, so re-running a call reproduces
/// its output exactly.
pub trait Segmenter: Send + Sync {
    fn segment(&self, truth: &SegMask, call: u64) -> SegMask;
}

/// Returns the ground-truth mask unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSegmenter;

impl Segmenter for OracleSegmenter {
    fn segment(&self, truth: &SegMask, _call: u64) -> SegMask {
        truth.clone()
    }
}

/// Corrupts the ground truth the way an unreliable rim detector does.
///
/// Rim is first eroded by `erosion_radius` (eroded pixels become bag), then
/// rim and handle pixels are dropped to bag with `p_drop`, then bag pixels on
/// the bag boundary are relabelled rim with `p_flip`.
#[derive(Debug, Clone, Copy)]
pub struct NoisySegmenter {
    pub p_drop: f64,
    pub p_flip: f64,
    pub erosion_radius: u32,
    pub seed: u64,
}

impl Segmenter for NoisySegmenter {
    fn segment(&self, truth: &SegMask, call: u64) -> SegMask {
        let (w, h) = (truth.width(), truth.height());
        let mut rng = stream(self.seed, Purpose::Segmenter, call);
        let mut out = truth.clone();

        if self.erosion_radius > 0 {
            let rim: Vec<bool> = truth.labels().iter().map(|&l| l == Label::Rim).collect();
            let kept = erode_layer(&rim, w, h, self.erosion_radius);
            for (i, (&was, &now)) in rim.iter().zip(&kept).enumerate() {
                if was && !now {
                    out.set((i % w) as i32, (i / w) as i32, Label::Bag);
                }
            }
        }

        for (x, y, _) in truth.iter() {
            if matches!(out.get(x, y), Label::Rim | Label::Handle) && rng.gen_bool(self.p_drop) {
                out.set(x, y, Label::Bag);
            }
        }

        let snapshot = out.clone();
        for (x, y, l) in snapshot.iter() {
            if l != Label::Bag {
                continue;
            }
            let on_boundary = (-1..=1).any(|dy| {
                (-1..=1).any(|dx| snapshot.try_get(x + dx, y + dy) == Some(Label::Background))
            });
            if on_boundary && rng.gen_bool(self.p_flip) {
                out.set(x, y, Label::Rim);
            }
        }
        out
    }
}

/// Labels synthetic paired images rendered from the ground truth.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSegmenter {
    pub ranges: UvRanges,
    pub dilation_radius: u32,
    pub min_component: usize,
}

impl ThresholdSegmenter {
    pub fn segment_images(
        &self,
        regular: &image::RgbImage,
        uv: &image::RgbImage,
    ) -> crate::Result<SegMask> {
        let bag = bag_mask_from_regular(regular, &self.ranges.bag);
        if regular.dimensions() != uv.dimensions() {
            return Err(crate::Error::DimensionMismatch {
                expected: (uv.width() as usize, uv.height() as usize),
                found: (regular.width() as usize, regular.height() as usize),
            });
        }
        uv_threshold_label(uv, &bag, &self.ranges, self.dilation_radius, self.min_component)
    }
}

impl Segmenter for ThresholdSegmenter {
    fn segment(&self, truth: &SegMask, _call: u64) -> SegMask {
        let (regular, uv) = render_pseudo_images(truth);
        self.segment_images(&regular, &uv)
            .expect("rendered images share dimensions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::{opening_metrics, BagCalibration, OpeningMetrics, E_MAX};

    fn scene() -> SegMask {
        let mut m = SegMask::new(40, 40);
        for y in 5..35 {
            for x in 5..35 {
                m.set(x, y, Label::Bag);
            }
        }
        for x in 10..30 {
            m.set(x, 10, Label::Rim);
            m.set(x, 11, Label::Rim);
            m.set(x, 20, Label::Rim);
        }
        for y in 30..33 {
            m.set(20, y, Label::Handle);
        }
        m
    }

    #[test]
    fn zero_noise_is_identity() {
        let s = NoisySegmenter { p_drop: 0.0, p_flip: 0.0, erosion_radius: 0, seed: 1 };
        assert_eq!(s.segment(&scene(), 0), scene());
        assert_eq!(OracleSegmenter.segment(&scene(), 0), scene());
    }

    #[test]
    fn full_drop_removes_rim() {
        let s = NoisySegmenter { p_drop: 1.0, p_flip: 0.0, erosion_radius: 0, seed: 1 };
        let m = s.segment(&scene(), 3);
        assert_eq!(m.count(Label::Rim), 0);
        let cal = BagCalibration::new(100.0, 1000.0).unwrap();
        let o: OpeningMetrics<f64> = opening_metrics(&m, &cal);
        assert_eq!((o.a_ch, o.e_ch), (0.0, E_MAX));
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let s = NoisySegmenter { p_drop: 0.3, p_flip: 0.2, erosion_radius: 0, seed: 7 };
        let a = s.segment(&scene(), 4);
        assert_eq!(a, s.segment(&scene(), 4));
        assert_ne!(a, scene());
    }

    #[test]
    fn erosion_removes_thin_rim() {
        let s = NoisySegmenter { p_drop: 0.0, p_flip: 0.0, erosion_radius: 1, seed: 0 };
        let m = s.segment(&scene(), 0);
        // Rows 10–11 and row 20 are at most two pixels thick.
        assert_eq!(m.count(Label::Rim), 0);
        assert_eq!(m.count(Label::Handle), 3);
    }

    #[test]
    fn threshold_segmenter_recovers_truth() {
        let t = ThresholdSegmenter { ranges: UvRanges::default(), dilation_radius: 0, min_component: 1 };
        assert_eq!(t.segment(&scene(), 0), scene());
    }
}
