use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use super::{BagState, OpeningDir, SimConfig};
use crate::error::{Error, Result};
use crate::mask::{Label, SegMask};
use crate::perception::{region_metrics, BagCalibration};
use crate::primitives::Workspace;
use crate::Point;

/// Flat bag size in cm, midpoints of the 28–30 × 49–54 cm bag.
pub const FLAT_BAG_WIDTH: f64 = 29.0;
pub const FLAT_BAG_LENGTH: f64 = 51.0;
/// Rim length of the flat bag: both layers across its width.
const RIM_CIRCUMFERENCE: f64 = 2.0 * FLAT_BAG_WIDTH;
/// Area of `|x/a|^4 + |y/b|^4 <= 1` is `K·a·b` with `K = 4Γ(5/4)²/Γ(3/2)`.
pub(crate) const SUPERELLIPSE_K: f64 = 3.708_149_354_602_744;

/// Largest opening: the rim pulled into a circle.
pub(crate) fn max_opening_area_cm2() -> f64 {
    RIM_CIRCUMFERENCE * RIM_CIRCUMFERENCE / (4.0 * PI)
}

pub(crate) fn flat_bag_area_cm2() -> f64 {
    SUPERELLIPSE_K * 0.25 * FLAT_BAG_WIDTH * FLAT_BAG_LENGTH
}

/// Calibration matching the simulated bag at the workspace scale.
pub fn sim_calibration(ws: &Workspace) -> BagCalibration {
    let k = ws.px_per_cm * ws.px_per_cm;
    BagCalibration {
        max_hull_area: max_opening_area_cm2() * k,
        max_bag_area: flat_bag_area_cm2() * k,
    }
}

/// Analytic footprint of a state, in workspace cm.
#[derive(Debug, Clone, PartialEq)]
pub struct BagGeometry {
    pub center: Point,
    /// Opening major axis.
    pub u: Point,
    /// Points from the bottom toward the opening end.
    pub t: Point,
    pub half_width: f64,
    pub half_length: f64,
    pub rim_center: Point,
    /// Semi-axes of the true opening; zero unless it faces up.
    pub rim_alpha: f64,
    pub rim_beta: f64,
    /// Left (−u) and right (+u) handle centres, when visible.
    pub handles: [Option<Point>; 2],
    pub handle_radius: f64,
}

impl BagGeometry {
    pub fn new(s: &BagState, cfg: &SimConfig) -> Self {
        let (sin, cos) = s.yaw.sin_cos();
        let u = Point::new(cos, sin);
        let t = Point::new(sin, -cos);
        let k = s.surface_fraction.max(0.0).sqrt();
        let half_width = 0.5 * FLAT_BAG_WIDTH * k;
        let half_length = 0.5 * FLAT_BAG_LENGTH * k;
        let rim_center = s.position + t * (cfg.rim_offset_frac * half_length);
        let (rim_alpha, rim_beta) = if s.opening_dir == OpeningDir::Up && s.opening_fraction > 0.0 {
            ellipse_axes(s.opening_fraction * max_opening_area_cm2(), s.elongation)
        } else {
            (0.0, 0.0)
        };
        let reach = if rim_alpha > 0.0 { rim_alpha } else { 0.8 * half_width };
        let off = reach + cfg.handle_radius + 0.5;
        let handles = [
            s.handles_visible.0.then(|| rim_center - u * off),
            s.handles_visible.1.then(|| rim_center + u * off),
        ];
        BagGeometry {
            center: s.position,
            u,
            t,
            half_width,
            half_length,
            rim_center,
            rim_alpha,
            rim_beta,
            handles,
            handle_radius: cfg.handle_radius,
        }
    }

    /// Coordinates of `p` along `(u, t)` relative to `origin`.
    fn local(&self, p: Point, origin: Point) -> (f64, f64) {
        let d = p - origin;
        (d.dot(self.u), d.dot(self.t))
    }

    pub fn in_body(&self, p: Point, slack: f64) -> bool {
        let (x, y) = self.local(p, self.center);
        let (a, b) = (self.half_width + slack, self.half_length + slack);
        a > 0.0 && b > 0.0 && (x / a).powi(4) + (y / b).powi(4) <= 1.0
    }

    /// On the body, in the third farthest from the opening.
    pub fn in_bottom_region(&self, p: Point, slack: f64) -> bool {
        let (_, y) = self.local(p, self.center);
        self.in_body(p, slack) && y <= -self.half_length / 3.0
    }

    pub fn near_handle(&self, p: Point, radius: f64) -> bool {
        self.handles
            .iter()
            .flatten()
            .any(|h| h.dist(p) <= self.handle_radius + radius)
    }

    /// Within `radius` of the true rim curve.
    pub fn near_rim(&self, p: Point, radius: f64) -> bool {
        if self.rim_alpha <= 0.0 {
            return false;
        }
        (0..360).any(|i| {
            let phi = i as f64 * TAU / 360.0;
            let q = self.rim_center
                + self.u * (self.rim_alpha * phi.cos())
                + self.t * (self.rim_beta * phi.sin());
            q.dist(p) <= radius
        })
    }

    /// Inside the true opening shrunk by `margin` on each semi-axis.
    pub fn in_opening(&self, p: Point, margin: f64) -> bool {
        let (a, b) = (self.rim_alpha - margin, self.rim_beta - margin);
        if a <= 0.0 || b <= 0.0 {
            return false;
        }
        let (x, y) = self.local(p, self.rim_center);
        (x / a).powi(2) + (y / b).powi(2) <= 1.0
    }
}

/// Semi-axes of the ellipse with the given area and axis ratio.
fn ellipse_axes(area: f64, ratio: f64) -> (f64, f64) {
    let r = ratio.max(1.0);
    ((area * r / PI).sqrt(), (area / (PI * r)).sqrt())
}

struct Ring {
    center: Point,
    u: Point,
    t: Point,
    alpha: f64,
    beta: f64,
    thickness: f64,
}

impl Ring {
    fn local(&self, x: i32, y: i32) -> (f64, f64) {
        let d = Point::new(x as f64, y as f64) - self.center;
        (d.dot(self.u), d.dot(self.t))
    }

    fn contains(&self, x: i32, y: i32) -> bool {
        let (lx, ly) = self.local(x, y);
        if (lx / self.alpha).powi(2) + (ly / self.beta).powi(2) > 1.0 {
            return false;
        }
        let (ia, ib) = (self.alpha - self.thickness, self.beta - self.thickness);
        ia <= 0.0 || ib <= 0.0 || (lx / ia).powi(2) + (ly / ib).powi(2) >= 1.0
    }

    fn pixels(&self) -> Vec<(i32, i32)> {
        let r = self.alpha.max(self.beta) + 1.0;
        let (x0, x1) = ((self.center.x - r).floor() as i32, (self.center.x + r).ceil() as i32);
        let (y0, y1) = ((self.center.y - r).floor() as i32, (self.center.y + r).ceil() as i32);
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                if self.contains(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Parametric angle of a pixel, in `[0, 2π)`.
    fn angle(&self, x: i32, y: i32) -> f64 {
        let (lx, ly) = self.local(x, y);
        (ly / self.beta).atan2(lx / self.alpha).rem_euclid(TAU)
    }
}

/// Radical-inverse sequence in base `b`, for deterministic sub-pixel offsets.
fn halton(mut i: u32, b: u32) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Rim ring whose lattice hull area and elongation hit the targets.
///
/// On the pixel lattice the hull metrics jump as whole rows of pixels enter
/// the ring, by several percent for small openings. The semi-axes are refined
/// against the measured metrics while the centre is nudged by at most half
/// a pixel, which makes the attainable values dense. Pixels for which
/// `shown` is false (off-image, under a handle) are left out of the
/// measurement. Keeps the best try.
#[allow(clippy::too_many_arguments)]
fn calibrated_ring(
    center: Point,
    u: Point,
    t: Point,
    a_target: f64,
    e_target: f64,
    thickness: f64,
    norm_area: f64,
    shown: &dyn Fn(i32, i32) -> bool,
) -> Ring {
    let (alpha, beta) = ellipse_axes(a_target * norm_area, e_target);
    let mut ring = Ring { center, u, t, alpha, beta, thickness };
    let mut best = (f64::INFINITY, alpha, beta, center);
    let mut best_ratio = (1.0, 1.0);
    for i in 0..CALIBRATION_TRIES {
        ring.center = center + Point::new(halton(i, 2) - 0.5, halton(i, 3) - 0.5);
        let px: Vec<(i32, i32)> = ring.pixels().into_iter().filter(|&(x, y)| shown(x, y)).collect();
        let m = region_metrics::<f64>(&px, norm_area);
        if m.a_ch <= 0.0 {
            ring.alpha *= 1.5;
            ring.beta *= 1.5;
            continue;
        }
        let ra = a_target / m.a_ch;
        let re = e_target / m.e_ch;
        let err = ((ra - 1.0).abs() / 0.02).max((re - 1.0).abs() / 0.05);
        if err < best.0 {
            best = (err, ring.alpha, ring.beta, ring.center);
            best_ratio = (ra, re);
        }
        if err < 0.25 {
            break;
        }
        // Step from the best axes so far, halfway in log space.
        let (ra, re) = best_ratio;
        ring.alpha = best.1 * (ra * re).powf(0.25);
        ring.beta = best.2 * (ra / re).powf(0.25);
    }
    ring.alpha = best.1;
    ring.beta = best.2;
    ring.center = best.3;
    ring
}

const CALIBRATION_TRIES: u32 = 48;

/// Ground-truth label image of a state. Handle over rim over bag.
pub fn rasterize(
    s: &BagState,
    ws: &Workspace,
    cal: &BagCalibration,
    cfg: &SimConfig,
) -> Result<SegMask> {
    if s.off_workspace || !ws.contains(s.position) {
        return Err(Error::StateOutOfWorkspace);
    }
    let (w, h) = ws.image_size();
    let mut mask = SegMask::new(w, h);
    let g = BagGeometry::new(s, cfg);
    let ppc = ws.px_per_cm;

    let c = ws.to_px(g.center);
    let r = g.half_length.max(g.half_width) * ppc + 2.0;
    let x0 = ((c.x - r).floor() as i32).max(0);
    let x1 = ((c.x + r).ceil() as i32).min(w as i32 - 1);
    let y0 = ((c.y - r).floor() as i32).max(0);
    let y1 = ((c.y + r).ceil() as i32).min(h as i32 - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if g.in_body(ws.to_cm(Point::new(x as f64, y as f64)), 0.0) {
                mask.set(x, y, Label::Bag);
            }
        }
    }

    let hr = g.handle_radius * ppc;
    let mut handle_px = Vec::new();
    for hc in g.handles.iter().flatten() {
        let hp = ws.to_px(*hc);
        let (xa, xb) = ((hp.x - hr).floor() as i32, (hp.x + hr).ceil() as i32);
        let (ya, yb) = ((hp.y - hr).floor() as i32, (hp.y + hr).ceil() as i32);
        for y in ya..=yb {
            for x in xa..=xb {
                if Point::new(x as f64, y as f64).dist(hp) <= hr {
                    handle_px.push((x, y));
                }
            }
        }
    }
    let covered: HashSet<(i32, i32)> = handle_px.iter().copied().collect();
    let shown = |x: i32, y: i32| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && !covered.contains(&(x, y))
    };

    if g.rim_alpha > 0.0 {
        let ring = calibrated_ring(
            ws.to_px(g.rim_center),
            g.u,
            g.t,
            s.opening_fraction,
            s.elongation,
            cfg.rim_thickness_px,
            cal.max_hull_area,
            &shown,
        );
        let v = s.rim_visible_fraction.clamp(0.0, 1.0);
        for (x, y) in ring.pixels() {
            let visible = v >= 1.0 || (ring.angle(x, y) - s.rim_arc_start).rem_euclid(TAU) < v * TAU;
            if visible {
                mask.put(x, y, Label::Rim);
            }
        }
    }

    for (x, y) in handle_px {
        mask.put(x, y, Label::Handle);
    }
    Ok(mask)
}
