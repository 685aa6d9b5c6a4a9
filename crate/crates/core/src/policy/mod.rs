//! Decision logic: the data-collection sampler, the two-stage opening state
//! machine with its ablations, grasp selection and insertion planning.
//!
//! Observations are in pixels; every emitted [`Action`] is in workspace cm.

mod grasp;
mod insertion;

pub use grasp::{
    bag_boundary, bag_centroid, bottom_point, bottom_point_or_fallback, handle_components,
    horizontal_extremes, pinpull_targets, random_bag_pixel, random_boundary_pixel,
};
pub use insertion::{insertion_plan, run_insertion, InsertionReport, Placement};

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PixelSet;
use crate::perception::{bag_area_fraction, opening_metrics, region_metrics, BagCalibration};
use crate::primitives::{Action, ActionKind, Phase, PrimitiveDefaults, Workspace};
use crate::rng::Rng;
use crate::{AxisFrame, OpeningMetrics, Point, SegMask};

/// Stage gates on bag area, opening area and opening elongation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyThresholds {
    pub s1: f64,
    pub a1: f64,
    pub e1: f64,
    pub a2: f64,
    pub e2: f64,
}

impl Default for PolicyThresholds {
    fn default() -> Self {
        PolicyThresholds { s1: 0.55, a1: 0.15, e1: 4.5, a2: 0.45, e2: 2.88 }
    }
}

impl PolicyThresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.a1
            && self.a1 <= self.a2
            && self.a2 <= 1.0
            && self.e2 <= self.e1
            && self.s1 > 0.0
            && self.s1 <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(0, "thresholds need 0 < a1 <= a2 <= 1, e2 <= e1 and 0 < s1 <= 1"))
        }
    }
}

/// AutoBag and its three ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "autobag")]
    AutoBag,
    /// Bag-region hull instead of the rim hull.
    #[serde(rename = "ab-p")]
    AbP,
    /// Elongation gates only.
    #[serde(rename = "ab-a")]
    AbA,
    /// Area gates only.
    #[serde(rename = "ab-e")]
    AbE,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::AutoBag, Variant::AbP, Variant::AbA, Variant::AbE];

    pub fn name(self) -> &'static str {
        match self {
            Variant::AutoBag => "autobag",
            Variant::AbP => "ab-p",
            Variant::AbA => "ab-a",
            Variant::AbE => "ab-e",
        }
    }

    fn uses_area(self) -> bool {
        self != Variant::AbA
    }

    fn uses_elongation(self) -> bool {
        self != Variant::AbE
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::config(0, format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Stage1,
    Stage2,
    Insertion,
    Lift,
    Done,
}

/// What the policy sees: one mask and the scalars derived from it.
#[derive(Debug, Clone)]
pub struct Observation {
    pub mask: SegMask,
    /// Rim hull metrics.
    pub metrics: OpeningMetrics,
    /// Same metrics over the whole bag region, normalised by the flat-bag area.
    pub bag_metrics: OpeningMetrics,
    pub bag_fraction: f64,
    /// Pixels; `None` for an empty mask.
    pub bag_centroid: Option<Point>,
    /// Handle blobs of at least the configured size, largest first.
    pub handle_components: Vec<PixelSet>,
}

impl Observation {
    pub fn new(mask: SegMask, cal: &BagCalibration, min_handle_component: usize) -> Self {
        let bag_px = mask.bag_region_pixels();
        Observation {
            metrics: opening_metrics(&mask, cal),
            bag_metrics: region_metrics(&bag_px, cal.max_bag_area),
            bag_fraction: bag_area_fraction(&mask, cal),
            bag_centroid: crate::geometry::centroid(&bag_px).ok(),
            handle_components: handle_components(&mask, min_handle_component),
            mask,
        }
    }

    fn centroid(&self) -> Result<Point> {
        self.bag_centroid.ok_or(Error::EmptyBagMask)
    }
}

/// Everything the policy is configured by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub variant: Variant,
    /// Non-Recenter action budget.
    pub budget: u32,
    /// Largest minor-axis tilt, degrees, left uncorrected before Dilate.
    pub align_tol_deg: f64,
    /// Smallest handle blob, px, that counts as a visible handle.
    pub min_handle_component: usize,
    /// Bag centroid distance from the workspace centre, cm, that triggers Recenter.
    pub recenter_radius: f64,
    /// Bag fraction from which data collection may Fold.
    pub collect_area_threshold: f64,
    /// Pin distance inward from each pull point, cm.
    pub pin_inset: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            variant: Variant::AutoBag,
            budget: 15,
            align_tol_deg: 5.0,
            min_handle_component: 20,
            recenter_radius: 5.0,
            collect_area_threshold: 0.55,
            pin_inset: 5.0,
        }
    }
}

/// Thresholds, tunables, primitive parameters and workspace, bundled.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolicyContext {
    pub thresholds: PolicyThresholds,
    pub config: PolicyConfig,
    pub primitives: PrimitiveDefaults,
    pub ws: Workspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    pub stage: Stage,
    /// Non-Recenter actions emitted so far.
    pub steps_used: u32,
    pub budget: u32,
    pub last_kind: Option<ActionKind>,
    pub variant: Variant,
    /// Whether the trial-start opening check has run.
    pub initial_checked: bool,
    /// Last rim hull centre seen, px.
    pub last_rim_center: Option<Point>,
}

impl PolicyState {
    pub fn new(variant: Variant, budget: u32) -> Self {
        PolicyState {
            stage: Stage::Stage1,
            steps_used: 0,
            budget,
            last_kind: None,
            variant,
            initial_checked: false,
            last_rim_center: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Act(Action),
    Advance(Stage),
}

/// Angle of the minor axis in image coordinates, folded into `(−π/2, π/2]`.
pub fn minor_axis_angle(frame: &AxisFrame) -> f64 {
    let mut a = frame.minor_dir.y.atan2(frame.minor_dir.x);
    while a <= -FRAC_PI_2 {
        a += PI;
    }
    while a > FRAC_PI_2 {
        a -= PI;
    }
    a
}

/// Recenter at the bag centroid when it strays beyond `radius` cm.
pub fn recenter_if_needed(obs: &Observation, ws: &Workspace, radius: f64) -> Option<Action> {
    let c = ws.to_cm(obs.bag_centroid?);
    (c.norm() > radius).then_some(Action::Recenter { x: c.x, y: c.y })
}

fn stage1_exit(v: Variant, m: &OpeningMetrics, th: &PolicyThresholds) -> bool {
    (!v.uses_area() || m.a_ch > th.a1) && (!v.uses_elongation() || m.e_ch < th.e1)
}

fn stage2_exit(v: Variant, m: &OpeningMetrics, th: &PolicyThresholds) -> bool {
    (!v.uses_area() || m.a_ch >= th.a2) && (!v.uses_elongation() || m.e_ch <= th.e2)
}

fn at(template: Action, p: Point) -> Action {
    template.with_grasps(&[p])
}

fn flip_at(obs: &Observation, ws: &Workspace, prim: &PrimitiveDefaults) -> Result<Action> {
    let (l, r) = horizontal_extremes(&obs.mask)?;
    Ok(prim
        .template(ActionKind::Flip, Phase::Execute)
        .with_grasps(&[ws.to_cm(l), ws.to_cm(r)]))
}

fn dilate_at(c: Point, prim: &PrimitiveDefaults, phase: Phase) -> Action {
    let dil = match phase {
        Phase::Collect => prim.dilate_collect,
        Phase::Execute => prim.dilate_exec,
    };
    let off = Point::new(dil.theta.cos(), dil.theta.sin()) * dil.center_offset;
    prim.template(ActionKind::Dilate, phase).with_grasps(&[c - off, c + off])
}

/// One decision of the two-stage opening machine.
///
/// `Advance` consumes no budget; the caller feeds the same observation back
/// in under the new stage.
pub fn autobag_step(
    obs: &Observation,
    ps: &PolicyState,
    ctx: &PolicyContext,
    rng: &mut Rng,
) -> Result<(Decision, PolicyState)> {
    let (th, prim, ws) = (&ctx.thresholds, &ctx.primitives, &ctx.ws);
    let align_tol = ctx.config.align_tol_deg.to_radians();
    let mut ps = ps.clone();
    let v = ps.variant;
    let m = if v == Variant::AbP { &obs.bag_metrics } else { &obs.metrics };
    if let Some(c) = obs.metrics.center.filter(|_| !obs.metrics.is_closed()) {
        ps.last_rim_center = Some(c);
    }

    let action = match ps.stage {
        Stage::Stage1 => {
            let first = !ps.initial_checked;
            ps.initial_checked = true;
            if first && stage1_exit(v, m, th) {
                ps.stage = Stage::Stage2;
                return Ok((Decision::Advance(Stage::Stage2), ps));
            }
            match ps.last_kind {
                Some(ActionKind::Compress) => flip_at(obs, ws, prim)?,
                Some(ActionKind::Flip) if stage1_exit(v, m, th) => {
                    ps.stage = Stage::Stage2;
                    return Ok((Decision::Advance(Stage::Stage2), ps));
                }
                last => {
                    let after_flip = last == Some(ActionKind::Flip);
                    if after_flip || obs.bag_fraction < th.s1 {
                        let p = match obs.handle_components.first() {
                            Some(h) => crate::geometry::centroid(h.points())?,
                            None => random_boundary_pixel(&obs.mask, rng)?,
                        };
                        at(prim.template(ActionKind::Shake, Phase::Execute), ws.to_cm(p))
                    } else {
                        let p = bottom_point_or_fallback(&obs.mask, ps.last_rim_center)?;
                        at(prim.template(ActionKind::Compress, Phase::Execute), ws.to_cm(p))
                    }
                }
            }
        }
        Stage::Stage2 => {
            if stage2_exit(v, m, th) {
                ps.stage = Stage::Insertion;
                return Ok((Decision::Advance(Stage::Insertion), ps));
            }
            let centroid = obs.centroid()?;
            let tilt = m.frame.filter(|_| !m.is_closed()).map(|f| minor_axis_angle(&f));
            match tilt {
                Some(t) if t.abs() > align_tol => {
                    let c = ws.to_cm(centroid);
                    Action::Rotate { x: c.x, y: c.y, alpha: 0.0, beta: 0.0, gamma: -t }
                }
                _ => {
                    let c = if v == Variant::AbP {
                        centroid
                    } else {
                        obs.metrics
                            .center
                            .filter(|_| !obs.metrics.is_closed())
                            .or(ps.last_rim_center)
                            .unwrap_or(centroid)
                    };
                    dilate_at(ws.to_cm(c), prim, Phase::Execute)
                }
            }
        }
        _ => return Err(Error::DegenerateInput("no opening decision outside Stage 1 and Stage 2")),
    };

    if ps.steps_used >= ps.budget {
        return Err(Error::StepBudgetExhausted(ps.budget));
    }
    ps.steps_used += 1;
    ps.last_kind = Some(action.kind());
    Ok((Decision::Act(action), ps))
}

/// One data-collection action.
///
/// Recenter when the bag strays; Flip right after Compress; otherwise a
/// uniform draw over Rotate, Shake, Fold, Compress and Flip, or over Rotate,
/// Shake and Compress while the bag is small.
pub fn collect_policy(
    obs: &Observation,
    last: Option<ActionKind>,
    ctx: &PolicyContext,
    rng: &mut Rng,
) -> Result<Action> {
    let (prim, ws) = (&ctx.primitives, &ctx.ws);
    obs.centroid()?;
    if let Some(a) = recenter_if_needed(obs, ws, ctx.config.recenter_radius) {
        return Ok(a);
    }
    if last == Some(ActionKind::Compress) {
        return flip_at(obs, ws, prim);
    }
    let kind = if obs.bag_fraction >= ctx.config.collect_area_threshold {
        COLLECT_LARGE[rng.gen_range(0..COLLECT_LARGE.len())]
    } else {
        COLLECT_SMALL[rng.gen_range(0..COLLECT_SMALL.len())]
    };
    let t = prim.template(kind, Phase::Collect);
    Ok(match kind {
        ActionKind::Rotate => {
            let p = ws.to_cm(random_bag_pixel(&obs.mask, rng)?);
            Action::Rotate { x: p.x, y: p.y, alpha: 0.0, beta: 0.0, gamma: rng.gen_range(-FRAC_PI_2..FRAC_PI_2) }
        }
        ActionKind::Shake | ActionKind::Fold => at(t, ws.to_cm(random_boundary_pixel(&obs.mask, rng)?)),
        ActionKind::Compress => at(t, ws.to_cm(random_bag_pixel(&obs.mask, rng)?)),
        _ => flip_at(obs, ws, prim)?,
    })
}

const COLLECT_LARGE: [ActionKind; 5] = [
    ActionKind::Rotate,
    ActionKind::Shake,
    ActionKind::Fold,
    ActionKind::Compress,
    ActionKind::Flip,
];
const COLLECT_SMALL: [ActionKind; 3] = [ActionKind::Rotate, ActionKind::Shake, ActionKind::Compress];
