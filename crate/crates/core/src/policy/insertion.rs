use serde::{Deserialize, Serialize};

use super::grasp::pinpull_targets;
use super::Observation;
use crate::error::{Error, Result};
use crate::primitives::Action;
use crate::simulator::{LiftOutcome, SimEvent, Simulator, StepEvents};
use crate::{OpeningMetrics, Point};

/// Placement points (px) for `n` objects.
///
/// The hull is cut by chords perpendicular to its major axis into `n` slabs
/// of equal width; each point is a slab's area centroid.
pub fn insertion_plan(m: &OpeningMetrics, n: usize) -> Result<Vec<Point>> {
    if m.a_ch <= 0.0 || m.hull.len() < 3 {
        return Err(Error::ClosedOpening);
    }
    if n == 0 {
        return Err(Error::DegenerateInput("no objects to place"));
    }
    let axis = m.frame.ok_or(Error::ClosedOpening)?.major_dir;
    let proj: Vec<f64> = m.hull.vertices.iter().map(|v| v.dot(axis)).collect();
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = (hi - lo) / n as f64;
    (0..n)
        .map(|k| {
            let (a, b) = (lo + k as f64 * w, lo + (k + 1) as f64 * w);
            m.hull
                .clip_halfplane(axis, b)
                .clip_halfplane(axis * -1.0, -a)
                .area_centroid()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub id: usize,
    /// Target in workspace cm.
    pub at: Point,
    pub event: SimEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionReport {
    pub placements: Vec<Placement>,
    pub pinpulls: Vec<(Action, StepEvents)>,
    pub lift: LiftOutcome,
}

/// Places every staged object, runs both Pin-Pulls, then lifts by the pull points.
pub fn run_insertion(
    obs: &Observation,
    n_objects: usize,
    sim: &mut Simulator,
    pin_inset_cm: f64,
) -> Result<InsertionReport> {
    let ws = sim.ws;
    let plan = insertion_plan(&obs.metrics, n_objects)?;
    let mut placements = Vec::with_capacity(n_objects);
    for (id, p) in plan.into_iter().enumerate() {
        let at = ws.to_cm(p);
        let event = sim.place_object(id, at)?;
        placements.push(Placement { id, at, event });
    }
    let targets = pinpull_targets(&obs.mask, &obs.handle_components, pin_inset_cm * ws.px_per_cm)?;
    let mut pinpulls = Vec::with_capacity(2);
    let mut pulls = [Point::new(0.0, 0.0); 2];
    for (i, (pin, pull)) in targets.into_iter().enumerate() {
        let (pin, pull) = (ws.to_cm(pin), ws.to_cm(pull));
        let a = Action::PinPull { x_pin: pin.x, y_pin: pin.y, x_pull: pull.x, y_pull: pull.y };
        let ev = sim.step(&a)?;
        pinpulls.push((a, ev));
        pulls[i] = pull;
    }
    let lift = sim.lift(pulls);
    Ok(InsertionReport { placements, pinpulls, lift })
}
