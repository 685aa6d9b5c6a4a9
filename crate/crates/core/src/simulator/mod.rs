//! Abstract seeded bag model.
//!
//! The bag is a handful of scalars (pose, surface fraction, opening state)
//! rather than a mesh. Each primitive moves those scalars in the direction the
//! real primitive tends to move the bag, and [`rasterize`] renders the state
//! into a ground-truth label image so the policy only ever sees pixels.

mod draw;
mod lift;
mod render;
mod transition;

pub use lift::{lift, GraspZone, LiftOutcome};
pub use render::{rasterize, sim_calibration, BagGeometry, FLAT_BAG_LENGTH, FLAT_BAG_WIDTH};
pub use transition::{init_tier, place_object, step};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::perception::BagCalibration;
use crate::primitives::{Action, Workspace};
use crate::rng::{stream, Purpose};
use draw::Draw;
use crate::{Point, SegMask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningDir {
    Up,
    Down,
    Sideways,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspedLayers {
    None,
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectStatus {
    Staged,
    PlacedInOpening,
    PlacedOutside,
    ContainedAfterLift,
    FallenOut,
}

impl ObjectStatus {
    fn rank(self) -> u8 {
        match self {
            ObjectStatus::Staged => 0,
            ObjectStatus::PlacedInOpening | ObjectStatus::PlacedOutside => 1,
            ObjectStatus::ContainedAfterLift | ObjectStatus::FallenOut => 2,
        }
    }

    /// Whether `self -> next` follows staged → placed → {contained, fallen}.
    pub fn can_become(self, next: ObjectStatus) -> bool {
        next.rank() == self.rank() + 1
            && (self != ObjectStatus::PlacedOutside || next.rank() < 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: usize,
    pub position: Point,
    pub status: ObjectStatus,
}

/// Complete simulator state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagState {
    /// Bag centre, workspace cm.
    pub position: Point,
    /// Direction of the opening's major axis, radians in image coordinates.
    pub yaw: f64,
    /// Top-down bag area over flat-bag area.
    pub surface_fraction: f64,
    pub opening_dir: OpeningDir,
    /// True opening hull area over the calibrated maximum.
    pub opening_fraction: f64,
    pub elongation: f64,
    /// (left, right) handle along the opening's major axis.
    pub handles_visible: (bool, bool),
    pub bottom_flat: bool,
    pub rim_visible_fraction: f64,
    /// Start angle of the visible rim arc, radians.
    pub rim_arc_start: f64,
    /// Opening inflated by Compress while facing down, revealed by Flip.
    pub latent_opening: f64,
    pub grasped_layers: GraspedLayers,
    pub objects: Vec<ObjectState>,
    pub off_workspace: bool,
}

impl BagState {
    /// Workspace position of the true opening centre.
    pub fn opening_center(&self, cfg: &SimConfig) -> Point {
        BagGeometry::new(self, cfg).rim_center
    }
}

/// Stochastic branches taken by one transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimEvent {
    Recentered,
    Rotated,
    SurfaceExpanded,
    OpeningResampled,
    HandleGraspShake,
    Folded,
    BottomFlattened,
    Inflated,
    FlippedUp,
    FlipResampled,
    DilateEnlarged,
    DilateAsymmetric,
    DilateSlip,
    HandlesHidden,
    SingleLayer,
    DoubleLayer,
    BumpedOffWorkspace,
    ObjectPlacedInOpening,
    ObjectPlacedOutside,
    LiftSlip,
    ObjectsFellOut,
    ObjectsContained,
}

pub type StepEvents = Vec<SimEvent>;

/// Effect sizes and branch probabilities of every transition.
///
/// None of these are measured quantities; they only fix the direction and
/// rough size of each primitive's effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Every Bernoulli takes its more likely outcome and every uniform its midpoint.
    pub deterministic: bool,
    pub rng_seed: u64,

    pub shake_s_lo: f64,
    pub shake_s_hi: f64,
    pub p_up_shake: f64,
    pub p_down_shake: f64,
    /// Multiplier on `p_up_shake` when the grasp lands on a handle.
    pub shake_handle_multiplier: f64,
    pub shake_a_lo: f64,
    pub shake_a_hi: f64,
    pub shake_e_lo: f64,
    pub shake_e_hi: f64,
    /// Per-handle visibility probability at surface fraction 1.
    pub p_handle_visible: f64,

    pub fold_s_lo: f64,
    pub fold_s_hi: f64,
    pub min_surface: f64,

    pub rotate_jitter: f64,

    pub p_flatten: f64,
    pub inflate_lo: f64,
    pub inflate_hi: f64,

    pub p_flip_up: f64,
    pub p_flip_up_unflat: f64,
    pub flip_e_lo: f64,
    pub flip_e_hi: f64,
    pub p_partial_rim: f64,
    pub partial_rim_lo: f64,

    pub dilate_delta_a: f64,
    pub dilate_rho: f64,
    /// Both grippers must start within this many cm of the true opening centre.
    pub dilate_radius: f64,
    pub p_slip: f64,
    pub p_hide_handle: f64,
    pub asym_drift: f64,

    pub p_single_layer_pinpull: f64,
    pub p_single_layer_plain: f64,

    pub p_grasp_slip: f64,
    pub p_grasp_slip_double: f64,
    /// Grasp counts as on a handle or the rim within this many cm.
    pub near_radius: f64,
    pub p_contain_middle: f64,

    pub object_radius: f64,
    /// Each placement lands up to this many cm off target on either axis.
    pub placement_error: f64,
    /// Opening fraction each inserted object occupies.
    pub area_per_object: f64,

    pub p_bump_off_workspace: f64,

    /// Opening centre offset toward the top end, as a fraction of the body half-length.
    pub rim_offset_frac: f64,
    pub handle_radius: f64,
    pub rim_thickness_px: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            deterministic: false,
            rng_seed: 0,
            shake_s_lo: 0.10,
            shake_s_hi: 0.30,
            p_up_shake: 0.15,
            p_down_shake: 0.35,
            shake_handle_multiplier: 2.0,
            shake_a_lo: 0.02,
            shake_a_hi: 0.10,
            shake_e_lo: 4.0,
            shake_e_hi: 8.0,
            p_handle_visible: 0.8,
            fold_s_lo: 0.10,
            fold_s_hi: 0.25,
            min_surface: 0.15,
            rotate_jitter: 1.0,
            p_flatten: 0.85,
            inflate_lo: 0.10,
            inflate_hi: 0.30,
            p_flip_up: 0.8,
            p_flip_up_unflat: 0.2,
            flip_e_lo: 2.0,
            flip_e_hi: 4.5,
            p_partial_rim: 0.3,
            partial_rim_lo: 0.5,
            dilate_delta_a: 0.15,
            dilate_rho: 0.7,
            dilate_radius: 2.5,
            p_slip: 0.1,
            p_hide_handle: 0.0,
            asym_drift: 2.0,
            p_single_layer_pinpull: 0.9,
            p_single_layer_plain: 0.6,
            p_grasp_slip: 0.1,
            p_grasp_slip_double: 0.5,
            near_radius: 3.0,
            p_contain_middle: 0.5,
            object_radius: 2.0,
            placement_error: 1.5,
            area_per_object: 0.19,
            p_bump_off_workspace: 0.005,
            rim_offset_frac: 0.3,
            handle_radius: 2.5,
            rim_thickness_px: 2.0,
        }
    }
}

impl SimConfig {
    pub fn deterministic() -> Self {
        SimConfig {
            deterministic: true,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_up_shake", self.p_up_shake),
            ("p_down_shake", self.p_down_shake),
            ("p_handle_visible", self.p_handle_visible),
            ("p_flatten", self.p_flatten),
            ("p_flip_up", self.p_flip_up),
            ("p_flip_up_unflat", self.p_flip_up_unflat),
            ("p_partial_rim", self.p_partial_rim),
            ("p_slip", self.p_slip),
            ("p_hide_handle", self.p_hide_handle),
            ("p_single_layer_pinpull", self.p_single_layer_pinpull),
            ("p_single_layer_plain", self.p_single_layer_plain),
            ("p_grasp_slip", self.p_grasp_slip),
            ("p_grasp_slip_double", self.p_grasp_slip_double),
            ("p_contain_middle", self.p_contain_middle),
            ("p_bump_off_workspace", self.p_bump_off_workspace),
        ];
        for (k, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(crate::Error::config(0, format!("sim.{k} = {p} is not a probability")));
            }
        }
        if self.p_up_shake + self.p_down_shake > 1.0 {
            return Err(crate::Error::config(0, "sim.p_up_shake + sim.p_down_shake exceeds 1"));
        }
        let ranges = [
            ("shake_s", self.shake_s_lo, self.shake_s_hi),
            ("shake_a", self.shake_a_lo, self.shake_a_hi),
            ("shake_e", self.shake_e_lo, self.shake_e_hi),
            ("fold_s", self.fold_s_lo, self.fold_s_hi),
            ("inflate", self.inflate_lo, self.inflate_hi),
            ("flip_e", self.flip_e_lo, self.flip_e_hi),
        ];
        for (k, lo, hi) in ranges {
            if lo > hi {
                return Err(crate::Error::config(0, format!("sim.{k}_lo exceeds sim.{k}_hi")));
            }
        }
        if self.placement_error < 0.0 || self.object_radius < 0.0 {
            return Err(crate::Error::config(0, "sim.placement_error and sim.object_radius must be non-negative"));
        }
        if !(self.dilate_rho > 0.0 && self.dilate_rho < 1.0) {
            return Err(crate::Error::config(0, "sim.dilate_rho must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// One trial's bag, with its own random streams.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub state: BagState,
    pub cfg: SimConfig,
    pub ws: Workspace,
    pub cal: BagCalibration,
    seed: u64,
    steps: u64,
}

impl Simulator {
    pub fn new(
        tier: u8,
        cfg: SimConfig,
        ws: Workspace,
        cal: BagCalibration,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = stream(seed, Purpose::Init, 0);
        let state = init_tier(tier, &cal, &cfg, &mut rng)?;
        Ok(Simulator::from_state(state, cfg, ws, cal, seed))
    }

    pub fn from_state(
        state: BagState,
        cfg: SimConfig,
        ws: Workspace,
        cal: BagCalibration,
        seed: u64,
    ) -> Self {
        Simulator {
            state,
            cfg,
            ws,
            cal,
            seed,
            steps: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step(&mut self, a: &Action) -> Result<StepEvents> {
        let mut rng = stream(self.seed, Purpose::SimStep, self.steps);
        let (next, events) = step(&self.state, a, &self.cfg, &self.ws, &mut rng)?;
        self.steps += 1;
        self.state = next;
        Ok(events)
    }

    pub fn render(&self) -> Result<SegMask> {
        rasterize(&self.state, &self.ws, &self.cal, &self.cfg)
    }

    pub fn set_objects(&mut self, n: usize) {
        self.state.objects = (0..n)
            .map(|id| ObjectState {
                id,
                position: Point::new(0.0, 0.0),
                status: ObjectStatus::Staged,
            })
            .collect();
    }

    /// Places object `id` aimed at `at`; it lands within `placement_error`.
    pub fn place_object(&mut self, id: usize, at: Point) -> Result<SimEvent> {
        let mut rng = stream(self.seed, Purpose::Placement, id as u64);
        let mut d = Draw::new(&mut rng, self.cfg.deterministic);
        let e = self.cfg.placement_error;
        let landed = at + Point::new(d.uniform(-e, e), d.uniform(-e, e));
        place_object(&mut self.state, id, landed, &self.cfg)
    }

    pub fn lift(&mut self, grasps: [Point; 2]) -> LiftOutcome {
        let mut rng = stream(self.seed, Purpose::Lift, 0);
        let (state, out) = lift(&self.state, grasps, &self.cfg, &mut rng);
        self.state = state;
        out
    }
}
