//! Grasp-point heuristics over label images. Everything here is in pixels.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::geometry::{centroid, min_area_rectangle, PixelSet};
use crate::mask::{Label, SegMask};
use crate::rng::Rng;
use crate::Point;

const NEIGHBORS4: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Bag-region pixels with a 4-neighbour that is background or off-image.
pub fn bag_boundary(mask: &SegMask) -> Vec<(i32, i32)> {
    mask.iter()
        .filter(|&(x, y, l)| {
            l.is_bag_region()
                && NEIGHBORS4.iter().any(|&(dx, dy)| {
                    mask.try_get(x + dx, y + dy)
                        .map_or(true, |n| !n.is_bag_region())
                })
        })
        .map(|(x, y, _)| (x, y))
        .collect()
}

pub fn bag_centroid(mask: &SegMask) -> Result<Point> {
    centroid(&mask.bag_region_pixels()).map_err(|_| Error::EmptyBagMask)
}

/// A uniformly drawn bag-region pixel.
pub fn random_bag_pixel(mask: &SegMask, rng: &mut Rng) -> Result<Point> {
    let px = mask.bag_region_pixels();
    if px.is_empty() {
        return Err(Error::EmptyBagMask);
    }
    Ok(Point::from_px(px[rng.gen_range(0..px.len())]))
}

/// A uniformly drawn bag-boundary pixel.
pub fn random_boundary_pixel(mask: &SegMask, rng: &mut Rng) -> Result<Point> {
    let px = bag_boundary(mask);
    if px.is_empty() {
        return Err(Error::EmptyBagMask);
    }
    Ok(Point::from_px(px[rng.gen_range(0..px.len())]))
}

/// Leftmost and rightmost bag pixels on the row through the bag centroid.
///
/// Falls back to the global extremes when that row misses the bag.
pub fn horizontal_extremes(mask: &SegMask) -> Result<(Point, Point)> {
    let c = bag_centroid(mask)?;
    let row = c.y.round() as i32;
    let on_row: Vec<i32> = (0..mask.width() as i32)
        .filter(|&x| mask.try_get(x, row).is_some_and(Label::is_bag_region))
        .collect();
    if let (Some(&l), Some(&r)) = (on_row.first(), on_row.last()) {
        return Ok((Point::from_px((l, row)), Point::from_px((r, row))));
    }
    let px = mask.bag_region_pixels();
    let l = px.iter().min_by_key(|p| (p.0, p.1)).ok_or(Error::EmptyBagMask)?;
    let r = px.iter().max_by_key(|p| (p.0, -p.1)).ok_or(Error::EmptyBagMask)?;
    Ok((Point::from_px(*l), Point::from_px(*r)))
}

/// Handle components of at least `min_size` pixels, largest first.
pub fn handle_components(mask: &SegMask, min_size: usize) -> Vec<PixelSet> {
    crate::geometry::connected_components(mask, Label::Handle)
        .into_iter()
        .filter(|c| c.len() >= min_size)
        .collect()
}

fn rect_corners(mask: &SegMask) -> Result<Vec<Point>> {
    let pts: Vec<Point> = mask.bag_region_pixels().into_iter().map(Point::from_px).collect();
    if pts.is_empty() {
        return Err(Error::EmptyBagMask);
    }
    match min_area_rectangle(&pts) {
        Ok(r) => Ok(r.vertices),
        // Collinear bag: the extreme points stand in for the corners.
        Err(_) => {
            let a = pts[0];
            let b = *pts.iter().max_by(|p, q| p.dist(a).total_cmp(&q.dist(a))).unwrap_or(&a);
            Ok(vec![a, b])
        }
    }
}

/// Midpoint of the two corners with the largest `score`, walked toward the bag
/// centroid until it lands on the bag.
fn shrink_to_bag(mask: &SegMask, corners: &[Point], score: impl Fn(Point) -> f64) -> Result<Point> {
    let mut ranked: Vec<(f64, usize)> = corners.iter().enumerate().map(|(i, &c)| (score(c), i)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let (p, q) = (corners[ranked[0].1], corners[ranked.get(1).map_or(ranked[0].1, |r| r.1)]);
    let mid = (p + q) * 0.5;
    let c = bag_centroid(mask)?;
    let n = (mid.dist(c) * 2.0).ceil().max(1.0) as usize;
    for i in 0..=n {
        let pt = mid + (c - mid) * (i as f64 / n as f64);
        let (x, y) = pt.round_px();
        if mask.try_get(x, y).is_some_and(Label::is_bag_region) {
            return Ok(Point::from_px((x, y)));
        }
    }
    Ok(Point::from_px(c.round_px()))
}

/// The bag bottom: midpoint of the two bounding-rectangle corners farthest
/// from the rim, pulled onto the bag.
pub fn bottom_point(mask: &SegMask) -> Result<Point> {
    let rim = mask.pixels_of(Label::Rim);
    if mask.bag_region_count() == 0 {
        return Err(Error::EmptyBagMask);
    }
    if rim.is_empty() {
        return Err(Error::NoRim);
    }
    let corners = rect_corners(mask)?;
    shrink_to_bag(mask, &corners, |c| {
        rim.iter()
            .map(|&r| Point::from_px(r).dist(c))
            .fold(f64::INFINITY, f64::min)
    })
}

/// [`bottom_point`], falling back when no rim is visible to the corners
/// farthest from the last rim position seen, else farthest from the image top.
pub fn bottom_point_or_fallback(mask: &SegMask, last_rim: Option<Point>) -> Result<Point> {
    match bottom_point(mask) {
        Err(Error::NoRim) => {
            let corners = rect_corners(mask)?;
            match last_rim {
                Some(r) => shrink_to_bag(mask, &corners, |c| c.dist(r)),
                None => shrink_to_bag(mask, &corners, |c| c.y),
            }
        }
        other => other,
    }
}

/// (pin, pull) pixel pairs for the two Pin-Pull actions, left target first.
///
/// Targets are the two largest handle centroids, or the bag's horizontal
/// extremes when fewer than two handles are visible. Each pin sits `pin_inset`
/// pixels from its target toward the bag centroid.
pub fn pinpull_targets(
    mask: &SegMask,
    handles: &[PixelSet],
    pin_inset: f64,
) -> Result<[(Point, Point); 2]> {
    let c = bag_centroid(mask)?;
    let (mut a, mut b) = if handles.len() >= 2 {
        let h0: Point = centroid(handles[0].points())?;
        let h1: Point = centroid(handles[1].points())?;
        (h0, h1)
    } else {
        horizontal_extremes(mask)?
    };
    if b.x < a.x {
        std::mem::swap(&mut a, &mut b);
    }
    let pin = |t: Point| {
        let d = c - t;
        let n = d.norm();
        if n <= 1e-9 {
            t
        } else {
            t + d * (pin_inset.min(n) / n)
        }
    };
    Ok([(pin(a), a), (pin(b), b)])
}
