use serde::{Deserialize, Serialize};

use super::draw::Draw;
use super::render::BagGeometry;
use super::{BagState, OpeningDir, GraspedLayers, ObjectStatus, SimConfig, SimEvent, StepEvents};
use crate::rng::Rng;
use crate::Point;

/// Where a lifting grasp landed on the bag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspZone {
    Handle,
    Rim,
    Bottom,
    Middle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftOutcome {
    pub lifted: bool,
    pub n_contained: usize,
    pub zones: [GraspZone; 2],
    pub events: StepEvents,
}

/// An upright bag stands on its bottom, so only a bag lying with its
/// opening down or sideways exposes the bottom to a top-down grasp.
fn classify(g: &BagGeometry, dir: OpeningDir, p: Point, cfg: &SimConfig) -> GraspZone {
    if g.near_handle(p, cfg.near_radius) {
        GraspZone::Handle
    } else if g.near_rim(p, cfg.near_radius) {
        GraspZone::Rim
    } else if dir != OpeningDir::Up && g.in_bottom_region(p, cfg.near_radius) {
        GraspZone::Bottom
    } else {
        GraspZone::Middle
    }
}

/// Lifts the bag by two grasps and settles every placed object.
///
/// A slipped grasp leaves the bag on the table. A grasp near the bottom turns
/// the bag over and empties it. Two grasps at the handles or rim keep the
/// opening up; anything else is a coin flip per lift.
pub fn lift(
    state: &BagState,
    grasps: [Point; 2],
    cfg: &SimConfig,
    rng: &mut Rng,
) -> (BagState, LiftOutcome) {
    let mut d = Draw::new(rng, cfg.deterministic);
    let g = BagGeometry::new(state, cfg);
    let zones = grasps.map(|p| classify(&g, state.opening_dir, p, cfg));
    let mut s = state.clone();
    let mut events = StepEvents::new();

    let layers = match s.grasped_layers {
        GraspedLayers::None => {
            if d.bernoulli(cfg.p_single_layer_plain) {
                GraspedLayers::Single
            } else {
                GraspedLayers::Double
            }
        }
        l => l,
    };
    let p_slip = match layers {
        GraspedLayers::Double => cfg.p_grasp_slip_double,
        _ => cfg.p_grasp_slip,
    };
    s.grasped_layers = GraspedLayers::None;
    if d.bernoulli(p_slip) {
        events.push(SimEvent::LiftSlip);
        let out = LiftOutcome { lifted: false, n_contained: 0, zones, events };
        return (s, out);
    }

    let held = if zones.contains(&GraspZone::Bottom) {
        false
    } else if zones
        .iter()
        .all(|z| matches!(z, GraspZone::Handle | GraspZone::Rim))
    {
        true
    } else {
        d.bernoulli(cfg.p_contain_middle)
    };

    let mut n = 0;
    for o in s.objects.iter_mut().filter(|o| o.status == ObjectStatus::PlacedInOpening) {
        if held {
            o.status = ObjectStatus::ContainedAfterLift;
            n += 1;
        } else {
            o.status = ObjectStatus::FallenOut;
        }
    }
    events.push(if held { SimEvent::ObjectsContained } else { SimEvent::ObjectsFellOut });
    (s, LiftOutcome { lifted: true, n_contained: n, zones, events })
}
