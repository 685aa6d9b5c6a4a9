use std::collections::VecDeque;

use super::{Point, Polygon};
use crate::mask::{Label, SegMask};
use crate::scalar::Scalar;

/// Set of pixel coordinates, kept sorted row-major and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PixelSet(Vec<(i32, i32)>);

impl PixelSet {
    pub fn new(mut points: Vec<(i32, i32)>) -> Self {
        points.sort_unstable_by_key(|&(x, y)| (y, x));
        points.dedup();
        PixelSet(points)
    }

    pub fn points(&self) -> &[(i32, i32)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_points<T: Scalar>(&self) -> Vec<Point<T>> {
        self.0.iter().map(|&p| Point::from_px(p)).collect()
    }

    pub fn contains(&self, p: (i32, i32)) -> bool {
        self.0.binary_search_by_key(&(p.1, p.0), |&(x, y)| (y, x)).is_ok()
    }
}

const NEIGHBORS8: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// 8-connected components of one class, largest first.
///
/// Components of equal size keep the row-major order of their first pixel.
pub fn connected_components(mask: &SegMask, class: Label) -> Vec<PixelSet> {
    let w = mask.width();
    let mut seen = vec![false; w * mask.height()];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for (x, y, l) in mask.iter() {
        let idx = y as usize * w + x as usize;
        if l != class || seen[idx] {
            continue;
        }
        seen[idx] = true;
        queue.push_back((x, y));
        let mut comp = Vec::new();
        while let Some((cx, cy)) = queue.pop_front() {
            comp.push((cx, cy));
            for (dx, dy) in NEIGHBORS8 {
                let (nx, ny) = (cx + dx, cy + dy);
                if !mask.in_bounds(nx, ny) {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if !seen[nidx] && mask.get(nx, ny) == class {
                    seen[nidx] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        out.push(PixelSet::new(comp));
    }
    out.sort_by_key(|c| std::cmp::Reverse(c.len()));
    out
}

/// Offsets `(dx, dy)` with `dx² + dy² <= r²`.
pub fn disk_offsets(radius: u32) -> Vec<(i32, i32)> {
    let r = radius as i32;
    let mut v = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                v.push((dx, dy));
            }
        }
    }
    v
}

fn overwritable(class: Label, existing: Label) -> bool {
    match class {
        Label::Background => false,
        Label::Bag => existing == Label::Background,
        Label::Rim | Label::Handle => matches!(existing, Label::Background | Label::Bag),
    }
}

/// Grows `class` by a disk of `radius`.
///
/// Growth claims background pixels, and bag pixels when `class` is rim or
/// handle. Pixels of any other foreground class are never overwritten.
pub fn dilate_mask(mask: &SegMask, class: Label, radius: u32) -> SegMask {
    let mut out = mask.clone();
    if radius == 0 {
        return out;
    }
    let disk = disk_offsets(radius);
    for (x, y, l) in mask.iter() {
        if l != class {
            continue;
        }
        for &(dx, dy) in &disk {
            let (nx, ny) = (x + dx, y + dy);
            if mask.in_bounds(nx, ny) && overwritable(class, mask.get(nx, ny)) {
                out.set(nx, ny, class);
            }
        }
    }
    out
}

/// Binary dilation of a boolean layer by a disk.
pub(crate) fn dilate_layer(layer: &[bool], w: usize, h: usize, radius: u32) -> Vec<bool> {
    if radius == 0 {
        return layer.to_vec();
    }
    let disk = disk_offsets(radius);
    let mut out = vec![false; layer.len()];
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            if !layer[y as usize * w + x as usize] {
                continue;
            }
            for &(dx, dy) in &disk {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                    out[ny as usize * w + nx as usize] = true;
                }
            }
        }
    }
    out
}

/// Binary erosion by a disk; neighbours outside the image are ignored.
pub fn erode_layer(layer: &[bool], w: usize, h: usize, radius: u32) -> Vec<bool> {
    if radius == 0 {
        return layer.to_vec();
    }
    let disk = disk_offsets(radius);
    let mut out = vec![false; layer.len()];
    for y in 0..h as i32 {
        for x in 0..w as i32 {
            let i = y as usize * w + x as usize;
            out[i] = layer[i]
                && disk.iter().all(|&(dx, dy)| {
                    let (nx, ny) = (x + dx, y + dy);
                    nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h
                        || layer[ny as usize * w + nx as usize]
                });
        }
    }
    out
}

/// Integer points inside or on a convex polygon, row by row.
pub fn fill_polygon<T: Scalar>(poly: &Polygon<T>) -> Vec<(i32, i32)> {
    if poly.is_empty() {
        return Vec::new();
    }
    let tol = T::of(1e-7);
    let to_i = |v: T| v.to_i32().unwrap_or(0);
    let (mut y0, mut y1) = (T::infinity(), T::neg_infinity());
    for p in &poly.vertices {
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let mut out = Vec::new();
    if poly.len() < 3 {
        // Points and segments: test the bounding box directly.
        let (mut x0, mut x1) = (T::infinity(), T::neg_infinity());
        for p in &poly.vertices {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
        }
        for y in to_i((y0 - tol).ceil())..=to_i((y1 + tol).floor()) {
            for x in to_i((x0 - tol).ceil())..=to_i((x1 + tol).floor()) {
                if poly.contains_convex(Point::new(T::of_px(x), T::of_px(y)), tol) {
                    out.push((x, y));
                }
            }
        }
        return out;
    }
    let n = poly.len();
    for y in to_i((y0 - tol).ceil())..=to_i((y1 + tol).floor()) {
        let yf = T::of_px(y);
        let (mut xl, mut xr) = (T::infinity(), T::neg_infinity());
        for i in 0..n {
            let (a, b) = (poly.vertices[i], poly.vertices[(i + 1) % n]);
            let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
            if yf < lo - tol || yf > hi + tol {
                continue;
            }
            if hi - lo <= tol {
                xl = xl.min(a.x.min(b.x));
                xr = xr.max(a.x.max(b.x));
            } else {
                let t = ((yf - a.y) / (b.y - a.y)).max(T::zero()).min(T::one());
                let x = a.x + (b.x - a.x) * t;
                xl = xl.min(x);
                xr = xr.max(x);
            }
        }
        if xl > xr {
            continue;
        }
        for x in to_i((xl - tol).ceil())..=to_i((xr + tol).floor()) {
            out.push((x, y));
        }
    }
    out
}
