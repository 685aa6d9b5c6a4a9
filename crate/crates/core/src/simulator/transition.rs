use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::draw::Draw;
use super::render::{flat_bag_area_cm2, max_opening_area_cm2, BagGeometry};
use super::{
    BagState, GraspedLayers, ObjectStatus, OpeningDir, SimConfig, SimEvent, StepEvents,
};
use crate::error::{Error, Result};
use crate::perception::{BagCalibration, E_MAX};
use crate::primitives::{validate_action, Action, Workspace};
use crate::rng::Rng;
use crate::Point;

const DIRS: [OpeningDir; 3] = [OpeningDir::Up, OpeningDir::Down, OpeningDir::Sideways];

/// Initial state of a difficulty tier.
pub fn init_tier(tier: u8, cal: &BagCalibration, cfg: &SimConfig, rng: &mut Rng) -> Result<BagState> {
    cal.validate()?;
    let mut d = Draw::new(rng, cfg.deterministic);
    let (dir, a, e, s) = match tier {
        1 => {
            let a = d.uniform(0.05, 0.15);
            let e = d.uniform(2.0, 6.0);
            (OpeningDir::Up, a, e, d.uniform(0.6, 0.8))
        }
        2 => (OpeningDir::Sideways, 0.0, 1.0, d.uniform(0.55, 0.8)),
        3 => {
            let dir = DIRS[d.index(3)];
            let s = d.uniform(0.2, 0.5);
            let (a, e) = if dir == OpeningDir::Up {
                (d.uniform(cfg.shake_a_lo, cfg.shake_a_hi), d.uniform(cfg.shake_e_lo, cfg.shake_e_hi))
            } else {
                (0.0, 1.0)
            };
            (dir, a, e, s)
        }
        t => return Err(Error::InvalidTier(t)),
    };
    let handles = if tier == 3 {
        (false, false)
    } else {
        let p = cfg.p_handle_visible * s;
        (d.bernoulli(p), d.bernoulli(p))
    };
    let yaw = d.uniform(-FRAC_PI_2, FRAC_PI_2);
    let position = Point::new(d.uniform(-3.0, 3.0), d.uniform(-3.0, 3.0));
    let mut st = BagState {
        position,
        yaw,
        surface_fraction: s,
        opening_dir: dir,
        opening_fraction: a,
        elongation: e,
        handles_visible: handles,
        bottom_flat: false,
        rim_visible_fraction: 1.0,
        rim_arc_start: 0.0,
        latent_opening: 0.0,
        grasped_layers: GraspedLayers::None,
        objects: Vec::new(),
        off_workspace: false,
    };
    normalize(&mut st);
    Ok(st)
}

/// Clamps every fraction into range and enforces the opening invariants.
fn normalize(s: &mut BagState) {
    s.surface_fraction = s.surface_fraction.clamp(0.0, 1.0);
    let a_cap = (s.surface_fraction * flat_bag_area_cm2() / max_opening_area_cm2()).min(1.0);
    s.opening_fraction = if s.opening_dir == OpeningDir::Up {
        s.opening_fraction.clamp(0.0, a_cap)
    } else {
        0.0
    };
    s.elongation = s.elongation.clamp(1.0, E_MAX);
    s.rim_visible_fraction = s.rim_visible_fraction.clamp(0.0, 1.0);
    s.rim_arc_start = s.rim_arc_start.rem_euclid(TAU);
    s.latent_opening = s.latent_opening.clamp(0.0, 1.0);
    s.yaw = wrap_angle(s.yaw);
}

/// Into `(−π, π]`.
fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn rotate_about(p: Point, pivot: Point, angle: f64) -> Point {
    let (sin, cos) = angle.sin_cos();
    let d = p - pivot;
    pivot + Point::new(cos * d.x - sin * d.y, sin * d.x + cos * d.y)
}

/// Exposes an opening that just turned to face up.
fn open_up(s: &mut BagState, a: f64, e: f64, cfg: &SimConfig, d: &mut Draw) {
    s.opening_dir = OpeningDir::Up;
    s.opening_fraction = a;
    s.elongation = e;
    if d.bernoulli(cfg.p_partial_rim) {
        s.rim_visible_fraction = d.uniform(cfg.partial_rim_lo, 1.0);
        s.rim_arc_start = d.uniform(0.0, TAU);
    } else {
        s.rim_visible_fraction = 1.0;
        s.rim_arc_start = 0.0;
    }
}

fn resample_handles(s: &mut BagState, cfg: &SimConfig, d: &mut Draw) {
    let p = (cfg.p_handle_visible * s.surface_fraction).clamp(0.0, 1.0);
    s.handles_visible = (d.bernoulli(p), d.bernoulli(p));
}

/// Applies one primitive. Invalid actions are rejected before any draw.
pub fn step(
    state: &BagState,
    a: &Action,
    cfg: &SimConfig,
    ws: &Workspace,
    rng: &mut Rng,
) -> Result<(BagState, StepEvents)> {
    let violations = validate_action(a, ws);
    if !violations.is_empty() {
        return Err(Error::InvalidAction(violations));
    }
    let mut d = Draw::new(rng, cfg.deterministic);
    let mut s = state.clone();
    let mut ev = StepEvents::new();
    let g = BagGeometry::new(state, cfg);

    match *a {
        Action::Recenter { .. } => {
            s.position = Point::new(0.0, 0.0);
            ev.push(SimEvent::Recentered);
        }
        Action::Rotate { x, y, gamma, .. } => {
            let jitter = Point::new(
                d.uniform(-cfg.rotate_jitter, cfg.rotate_jitter),
                d.uniform(-cfg.rotate_jitter, cfg.rotate_jitter),
            );
            s.position = rotate_about(s.position, Point::new(x, y), gamma) + jitter;
            s.yaw += gamma;
            ev.push(SimEvent::Rotated);
        }
        Action::Shake { x, y, .. } => {
            let grasp = Point::new(x, y);
            let mut p_up = cfg.p_up_shake;
            if g.near_handle(grasp, 0.0) {
                p_up = (p_up * cfg.shake_handle_multiplier).min(1.0 - cfg.p_down_shake);
                ev.push(SimEvent::HandleGraspShake);
            }
            s.surface_fraction += d.uniform(cfg.shake_s_lo, cfg.shake_s_hi);
            ev.push(SimEvent::SurfaceExpanded);
            let side = (1.0 - p_up - cfg.p_down_shake).max(0.0);
            let dir = DIRS[d.weighted(&[p_up, cfg.p_down_shake, side])];
            if dir == OpeningDir::Up {
                let a = d.uniform(cfg.shake_a_lo, cfg.shake_a_hi);
                let e = d.uniform(cfg.shake_e_lo, cfg.shake_e_hi);
                open_up(&mut s, a, e, cfg, &mut d);
            } else {
                s.opening_dir = dir;
                s.opening_fraction = 0.0;
            }
            ev.push(SimEvent::OpeningResampled);
            // The bag hangs from the gripper and lands around the grasp point.
            s.position = (s.position + grasp) * 0.5;
            s.yaw = d.uniform(-FRAC_PI_2, FRAC_PI_2);
            s.surface_fraction = s.surface_fraction.min(1.0);
            resample_handles(&mut s, cfg, &mut d);
            s.bottom_flat = false;
            s.latent_opening = 0.0;
        }
        Action::Fold { .. } => {
            s.surface_fraction =
                (s.surface_fraction - d.uniform(cfg.fold_s_lo, cfg.fold_s_hi)).max(cfg.min_surface);
            s.opening_fraction = 0.0;
            ev.push(SimEvent::Folded);
        }
        Action::Compress { x, y, .. } => {
            if g.in_bottom_region(Point::new(x, y), 1.0) {
                // Held by the bottom, the bag hangs opening-down while air fills it.
                let prior = if s.opening_dir == OpeningDir::Up { s.opening_fraction } else { 0.0 };
                s.bottom_flat = d.bernoulli(cfg.p_flatten);
                if s.bottom_flat {
                    ev.push(SimEvent::BottomFlattened);
                }
                s.latent_opening = prior + d.uniform(cfg.inflate_lo, cfg.inflate_hi);
                s.opening_dir = OpeningDir::Down;
                s.opening_fraction = 0.0;
                ev.push(SimEvent::Inflated);
            }
        }
        Action::Flip { .. } => {
            let latent = s.latent_opening;
            let up = if s.bottom_flat && s.opening_dir == OpeningDir::Down {
                d.bernoulli(cfg.p_flip_up)
            } else {
                let p = cfg.p_flip_up_unflat;
                let dir = DIRS[d.weighted(&[p, 0.5 * (1.0 - p), 0.5 * (1.0 - p)])];
                if dir != OpeningDir::Up {
                    s.opening_dir = dir;
                    s.opening_fraction = 0.0;
                }
                ev.push(SimEvent::FlipResampled);
                dir == OpeningDir::Up
            };
            if up {
                let a = if latent > 0.0 {
                    latent
                } else {
                    d.uniform(cfg.shake_a_lo, cfg.shake_a_hi)
                };
                let e = d.uniform(cfg.flip_e_lo, cfg.flip_e_hi);
                open_up(&mut s, a, e, cfg, &mut d);
                ev.push(SimEvent::FlippedUp);
            }
            resample_handles(&mut s, cfg, &mut d);
            s.latent_opening = 0.0;
        }
        Action::Dilate { x_l, y_l, x_r, y_r, theta, d: dist, .. } => {
            let (l, r) = (Point::new(x_l, y_l), Point::new(x_r, y_r));
            let pull = Point::new(theta.cos(), theta.sin());
            if d.bernoulli(cfg.p_slip) {
                // Torque stop never triggers: one gripper loses the rim and drags the bag.
                let sign = if d.bernoulli(0.5) { 1.0 } else { -1.0 };
                s.position = s.position + pull * (sign * dist);
                ev.push(SimEvent::DilateSlip);
            } else {
                let centred = l.dist(g.rim_center) <= cfg.dilate_radius
                    && r.dist(g.rim_center) <= cfg.dilate_radius;
                if centred && s.opening_dir == OpeningDir::Up && s.opening_fraction > 0.0 {
                    s.opening_fraction = (s.opening_fraction + cfg.dilate_delta_a).min(1.0);
                    s.elongation = (1.0 + (s.elongation - 1.0) * cfg.dilate_rho).max(1.0);
                    ev.push(SimEvent::DilateEnlarged);
                } else {
                    // One side of the rim is pulled across and the other compressed.
                    s.opening_fraction *= 0.5;
                    let mid = (l + r) * 0.5;
                    let off = mid - g.rim_center;
                    let dir = if off.norm() > 1e-9 { off * (1.0 / off.norm()) } else { pull };
                    s.position = s.position + dir * cfg.asym_drift;
                    ev.push(SimEvent::DilateAsymmetric);
                }
            }
            let hide = cfg.p_hide_handle;
            if s.handles_visible.0 && d.bernoulli(hide) {
                s.handles_visible.0 = false;
                ev.push(SimEvent::HandlesHidden);
            }
            if s.handles_visible.1 && d.bernoulli(hide) {
                s.handles_visible.1 = false;
                ev.push(SimEvent::HandlesHidden);
            }
        }
        Action::PinPull { .. } => {
            s.grasped_layers = if d.bernoulli(cfg.p_single_layer_pinpull) {
                ev.push(SimEvent::SingleLayer);
                GraspedLayers::Single
            } else {
                ev.push(SimEvent::DoubleLayer);
                GraspedLayers::Double
            };
        }
    }

    if d.bernoulli(cfg.p_bump_off_workspace) {
        s.off_workspace = true;
        ev.push(SimEvent::BumpedOffWorkspace);
    }
    normalize(&mut s);
    Ok((s, ev))
}

/// Drops a staged object at `at` (cm). It lands in the opening iff the point
/// clears the true rim by the object radius and the opening has room left.
pub fn place_object(s: &mut BagState, id: usize, at: Point, cfg: &SimConfig) -> Result<SimEvent> {
    let g = BagGeometry::new(s, cfg);
    let inside = s
        .objects
        .iter()
        .filter(|o| o.status == ObjectStatus::PlacedInOpening)
        .count();
    let room = (inside + 1) as f64 * cfg.area_per_object <= s.opening_fraction + 1e-9;
    let obj = s
        .objects
        .iter_mut()
        .find(|o| o.id == id)
        .ok_or(Error::DegenerateInput("unknown object id"))?;
    if obj.status != ObjectStatus::Staged {
        return Err(Error::DegenerateInput("object already placed"));
    }
    obj.position = at;
    if room && g.in_opening(at, cfg.object_radius) {
        obj.status = ObjectStatus::PlacedInOpening;
        Ok(SimEvent::ObjectPlacedInOpening)
    } else {
        obj.status = ObjectStatus::PlacedOutside;
        Ok(SimEvent::ObjectPlacedOutside)
    }
}
