//! Action vocabulary, default parameters and workspace checks.
//!
//! Positions are workspace centimetres with the origin at the workspace
//! centre, `x` to the right and `y` toward the bottom of the camera image.
//! Angles are radians, frequencies hertz.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Recenter,
    Rotate,
    Shake,
    Fold,
    Compress,
    Flip,
    Dilate,
    PinPull,
}

impl ActionKind {
    pub const ALL: [ActionKind; 8] = [
        ActionKind::Recenter,
        ActionKind::Rotate,
        ActionKind::Shake,
        ActionKind::Fold,
        ActionKind::Compress,
        ActionKind::Flip,
        ActionKind::Dilate,
        ActionKind::PinPull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Recenter => "Recenter",
            ActionKind::Rotate => "Rotate",
            ActionKind::Shake => "Shake",
            ActionKind::Fold => "Fold",
            ActionKind::Compress => "Compress",
            ActionKind::Flip => "Flip",
            ActionKind::Dilate => "Dilate",
            ActionKind::PinPull => "PinPull",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ActionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("pin-pull") && *k == ActionKind::PinPull))
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// One parameterised manipulation primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ActionRecord", try_from = "ActionRecord")]
pub enum Action {
    /// Grasp at `(x, y)` and carry the bag to the workspace centre.
    Recenter { x: f64, y: f64 },
    /// Grasp, lift, rotate the gripper by Euler angles, place.
    Rotate { x: f64, y: f64, alpha: f64, beta: f64, gamma: f64 },
    /// Grasp, lift, `k_s` wrist shakes of amplitude `amplitude` at `freq`.
    Shake { x: f64, y: f64, k_s: u32, amplitude: f64, freq: f64 },
    /// Grasp, lift, move outward by `d` then fold back down.
    Fold { x: f64, y: f64, d: f64 },
    /// Grasp, lift and press down `k_c` times.
    Compress { x: f64, y: f64, k_c: u32 },
    /// Bimanual grasp of opposite ends, rotate both grippers 180°, place.
    Flip { x_l: f64, y_l: f64, x_r: f64, y_r: f64, alpha: f64 },
    /// Grippers start together and pull apart along `theta` by `d` each.
    Dilate { x_l: f64, y_l: f64, x_r: f64, y_r: f64, alpha: f64, theta: f64, d: f64 },
    /// One gripper pins the bag, the other grasps and lifts.
    PinPull { x_pin: f64, y_pin: f64, x_pull: f64, y_pull: f64 },
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Recenter { .. } => ActionKind::Recenter,
            Action::Rotate { .. } => ActionKind::Rotate,
            Action::Shake { .. } => ActionKind::Shake,
            Action::Fold { .. } => ActionKind::Fold,
            Action::Compress { .. } => ActionKind::Compress,
            Action::Flip { .. } => ActionKind::Flip,
            Action::Dilate { .. } => ActionKind::Dilate,
            Action::PinPull { .. } => ActionKind::PinPull,
        }
    }

    /// Every gripper contact point the action uses.
    pub fn grasp_points(&self) -> Vec<Point> {
        match *self {
            Action::Recenter { x, y }
            | Action::Rotate { x, y, .. }
            | Action::Shake { x, y, .. }
            | Action::Fold { x, y, .. }
            | Action::Compress { x, y, .. } => vec![Point::new(x, y)],
            Action::Flip { x_l, y_l, x_r, y_r, .. } | Action::Dilate { x_l, y_l, x_r, y_r, .. } => {
                vec![Point::new(x_l, y_l), Point::new(x_r, y_r)]
            }
            Action::PinPull { x_pin, y_pin, x_pull, y_pull } => {
                vec![Point::new(x_pin, y_pin), Point::new(x_pull, y_pull)]
            }
        }
    }

    /// Flat parameter map used in logs.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            Action::Recenter { x, y } => vec![("x", x), ("y", y)],
            Action::Rotate { x, y, alpha, beta, gamma } => {
                vec![("x", x), ("y", y), ("alpha", alpha), ("beta", beta), ("gamma", gamma)]
            }
            Action::Shake { x, y, k_s, amplitude, freq } => vec![
                ("x", x),
                ("y", y),
                ("k_s", k_s as f64),
                ("l", amplitude),
                ("f", freq),
            ],
            Action::Fold { x, y, d } => vec![("x", x), ("y", y), ("d", d)],
            Action::Compress { x, y, k_c } => vec![("x", x), ("y", y), ("k_c", k_c as f64)],
            Action::Flip { x_l, y_l, x_r, y_r, alpha } => vec![
                ("x_l", x_l),
                ("y_l", y_l),
                ("x_r", x_r),
                ("y_r", y_r),
                ("alpha", alpha),
            ],
            Action::Dilate { x_l, y_l, x_r, y_r, alpha, theta, d } => vec![
                ("x_l", x_l),
                ("y_l", y_l),
                ("x_r", x_r),
                ("y_r", y_r),
                ("alpha", alpha),
                ("theta", theta),
                ("d", d),
            ],
            Action::PinPull { x_pin, y_pin, x_pull, y_pull } => vec![
                ("x_pin", x_pin),
                ("y_pin", y_pin),
                ("x_pull", x_pull),
                ("y_pull", y_pull),
            ],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn from_params(kind: ActionKind, p: &BTreeMap<String, f64>) -> Result<Action> {
        let get = |k: &str| -> Result<f64> {
            p.get(k)
                .copied()
                .ok_or_else(|| Error::config(0, format!("{kind} is missing parameter `{k}`")))
        };
        let count = |k: &str| -> Result<u32> {
            let v = get(k)?;
            if v.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&v) {
                return Err(Error::config(0, format!("{kind}.{k} must be a non-negative integer")));
            }
            Ok(v as u32)
        };
        let expected = match kind {
            ActionKind::Recenter => 2,
            ActionKind::Fold | ActionKind::Compress => 3,
            ActionKind::PinPull => 4,
            ActionKind::Rotate | ActionKind::Shake | ActionKind::Flip => 5,
            ActionKind::Dilate => 7,
        };
        if p.len() != expected {
            return Err(Error::config(0, format!("{kind} takes {expected} parameters, got {}", p.len())));
        }
        Ok(match kind {
            ActionKind::Recenter => Action::Recenter { x: get("x")?, y: get("y")? },
            ActionKind::Rotate => Action::Rotate {
                x: get("x")?,
                y: get("y")?,
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
            },
            ActionKind::Shake => Action::Shake {
                x: get("x")?,
                y: get("y")?,
                k_s: count("k_s")?,
                amplitude: get("l")?,
                freq: get("f")?,
            },
            ActionKind::Fold => Action::Fold { x: get("x")?, y: get("y")?, d: get("d")? },
            ActionKind::Compress => Action::Compress { x: get("x")?, y: get("y")?, k_c: count("k_c")? },
            ActionKind::Flip => Action::Flip {
                x_l: get("x_l")?,
                y_l: get("y_l")?,
                x_r: get("x_r")?,
                y_r: get("y_r")?,
                alpha: get("alpha")?,
            },
            ActionKind::Dilate => Action::Dilate {
                x_l: get("x_l")?,
                y_l: get("y_l")?,
                x_r: get("x_r")?,
                y_r: get("y_r")?,
                alpha: get("alpha")?,
                theta: get("theta")?,
                d: get("d")?,
            },
            ActionKind::PinPull => Action::PinPull {
                x_pin: get("x_pin")?,
                y_pin: get("y_pin")?,
                x_pull: get("x_pull")?,
                y_pull: get("y_pull")?,
            },
        })
    }

    /// Same action with every grasp point replaced, in `grasp_points` order.
    pub fn with_grasps(mut self, pts: &[Point]) -> Action {
        match &mut self {
            Action::Recenter { x, y }
            | Action::Rotate { x, y, .. }
            | Action::Shake { x, y, .. }
            | Action::Fold { x, y, .. }
            | Action::Compress { x, y, .. } => {
                *x = pts[0].x;
                *y = pts[0].y;
            }
            Action::Flip { x_l, y_l, x_r, y_r, .. } | Action::Dilate { x_l, y_l, x_r, y_r, .. } => {
                (*x_l, *y_l, *x_r, *y_r) = (pts[0].x, pts[0].y, pts[1].x, pts[1].y);
            }
            Action::PinPull { x_pin, y_pin, x_pull, y_pull } => {
                (*x_pin, *y_pin, *x_pull, *y_pull) = (pts[0].x, pts[0].y, pts[1].x, pts[1].y);
            }
        }
        self
    }
}

/// Log representation: kind name plus flat numeric parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionRecord {
    pub kind: ActionKind,
    pub params: BTreeMap<String, f64>,
}

impl From<Action> for ActionRecord {
    fn from(a: Action) -> Self {
        ActionRecord { kind: a.kind(), params: a.params() }
    }
}

impl TryFrom<ActionRecord> for Action {
    type Error = Error;

    fn try_from(r: ActionRecord) -> Result<Self> {
        Action::from_params(r.kind, &r.params)
    }
}

/// Data collection or policy execution; Dilate parameters differ between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Collect,
    Execute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilateDefaults {
    pub alpha: f64,
    pub theta: f64,
    pub d: f64,
    /// Gripper offset from the opening centre, cm per gripper.
    pub center_offset: f64,
    pub torque_stop: f64,
}

/// Hardware parameters of each primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveDefaults {
    pub shake_k_s: u32,
    /// Wrist amplitude in radians (40.1°).
    pub shake_amplitude: f64,
    pub shake_freq: f64,
    pub fold_d: f64,
    pub compress_k_c: u32,
    /// Seconds to let the bag settle after each press.
    pub compress_pause: f64,
    pub compress_angle: f64,
    pub flip_angle: f64,
    pub dilate_collect: DilateDefaults,
    pub dilate_exec: DilateDefaults,
    /// Pull height for Pin-Pull, cm.
    pub pinpull_height: f64,
}

impl Default for PrimitiveDefaults {
    fn default() -> Self {
        PrimitiveDefaults {
            shake_k_s: 3,
            shake_amplitude: 0.7,
            shake_freq: 0.4,
            fold_d: 28.0,
            compress_k_c: 4,
            compress_pause: 0.9,
            compress_angle: PI / 7.0,
            flip_angle: PI / 4.0,
            dilate_collect: DilateDefaults {
                alpha: PI / 3.0,
                theta: 0.0,
                d: 12.0,
                center_offset: 0.02,
                torque_stop: 0.05,
            },
            dilate_exec: DilateDefaults {
                alpha: PI / 3.0,
                theta: 0.0,
                d: 10.0,
                center_offset: 0.02,
                torque_stop: 0.02,
            },
            pinpull_height: 20.0,
        }
    }
}

impl PrimitiveDefaults {
    /// Template for `kind` with every grasp point at the origin.
    pub fn template(&self, kind: ActionKind, phase: Phase) -> Action {
        let dil = match phase {
            Phase::Collect => self.dilate_collect,
            Phase::Execute => self.dilate_exec,
        };
        match kind {
            ActionKind::Recenter => Action::Recenter { x: 0.0, y: 0.0 },
            ActionKind::Rotate => Action::Rotate { x: 0.0, y: 0.0, alpha: 0.0, beta: 0.0, gamma: 0.0 },
            ActionKind::Shake => Action::Shake {
                x: 0.0,
                y: 0.0,
                k_s: self.shake_k_s,
                amplitude: self.shake_amplitude,
                freq: self.shake_freq,
            },
            ActionKind::Fold => Action::Fold { x: 0.0, y: 0.0, d: self.fold_d },
            ActionKind::Compress => Action::Compress { x: 0.0, y: 0.0, k_c: self.compress_k_c },
            ActionKind::Flip => Action::Flip {
                x_l: -1.0,
                y_l: 0.0,
                x_r: 1.0,
                y_r: 0.0,
                alpha: self.flip_angle,
            },
            ActionKind::Dilate => Action::Dilate {
                x_l: -dil.center_offset,
                y_l: 0.0,
                x_r: dil.center_offset,
                y_r: 0.0,
                alpha: dil.alpha,
                theta: dil.theta,
                d: dil.d,
            },
            ActionKind::PinPull => Action::PinPull { x_pin: -1.0, y_pin: 0.0, x_pull: 1.0, y_pull: 0.0 },
        }
    }
}

/// Default parameters of a primitive for a phase, using the built-in defaults.
pub fn defaults_for(kind: &str, phase: Phase) -> Result<Action> {
    Ok(PrimitiveDefaults::default().template(kind.parse()?, phase))
}

/// Flat tabletop workspace viewed by the overhead camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub width: f64,
    pub height: f64,
    pub px_per_cm: f64,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace { width: 70.0, height: 90.0, px_per_cm: 4.0 }
    }
}

impl Workspace {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0 && self.px_per_cm > 0.0) {
            return Err(Error::config(0, "workspace dimensions must be positive"));
        }
        Ok(())
    }

    /// Mask size in pixels.
    pub fn image_size(&self) -> (usize, usize) {
        (
            (self.width * self.px_per_cm).round() as usize,
            (self.height * self.px_per_cm).round() as usize,
        )
    }

    /// Pixel coordinates of a workspace point; pixel `(i, j)` covers `[i, i+1) × [j, j+1)` shifted by half a pixel.
    pub fn to_px(&self, p: Point) -> Point {
        Point::new(
            (p.x + self.width / 2.0) * self.px_per_cm - 0.5,
            (p.y + self.height / 2.0) * self.px_per_cm - 0.5,
        )
    }

    pub fn to_cm(&self, p: Point) -> Point {
        Point::new(
            (p.x + 0.5) / self.px_per_cm - self.width / 2.0,
            (p.y + 0.5) / self.px_per_cm - self.height / 2.0,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x.abs() <= self.width / 2.0 && p.y.abs() <= self.height / 2.0
    }
}

/// Reasons an action cannot be executed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    GraspOutsideWorkspace { x: f64, y: f64 },
    NonPositiveCount,
    NonPositiveDistance,
    CoincidentGrippers,
    NonFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GraspOutsideWorkspace { x, y } => {
                write!(f, "grasp outside workspace at ({x}, {y})")
            }
            Violation::NonPositiveCount => f.write_str("repetition count must be at least 1"),
            Violation::NonPositiveDistance => f.write_str("distance must be positive"),
            Violation::CoincidentGrippers => f.write_str("coincident grippers"),
            Violation::NonFinite => f.write_str("non-finite parameter"),
        }
    }
}

/// Returns every reason `a` is not executable in `ws`; empty means valid.
pub fn validate_action(a: &Action, ws: &Workspace) -> Vec<Violation> {
    let mut v = Vec::new();
    if a.params().values().any(|x| !x.is_finite()) {
        v.push(Violation::NonFinite);
        return v;
    }
    for p in a.grasp_points() {
        if !ws.contains(p) {
            v.push(Violation::GraspOutsideWorkspace { x: p.x, y: p.y });
        }
    }
    match *a {
        Action::Shake { k_s: 0, .. } | Action::Compress { k_c: 0, .. } => {
            v.push(Violation::NonPositiveCount)
        }
        Action::Fold { d, .. } | Action::Dilate { d, .. } if d <= 0.0 => {
            v.push(Violation::NonPositiveDistance)
        }
        _ => {}
    }
    if let Action::Dilate { x_l, y_l, x_r, y_r, .. } = *a {
        if x_l == x_r && y_l == y_r {
            v.push(Violation::CoincidentGrippers);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recenter_at_origin_is_valid() {
        let ws = Workspace::default();
        assert!(validate_action(&Action::Recenter { x: 0.0, y: 0.0 }, &ws).is_empty());
    }

    #[test]
    fn shake_outside_workspace() {
        let ws = Workspace::default();
        let a = defaults_for("Shake", Phase::Collect).unwrap().with_grasps(&[Point::new(100.0, 0.0)]);
        assert_eq!(
            validate_action(&a, &ws),
            vec![Violation::GraspOutsideWorkspace { x: 100.0, y: 0.0 }]
        );
        assert_eq!(
            Violation::GraspOutsideWorkspace { x: 100.0, y: 0.0 }.to_string(),
            "grasp outside workspace at (100, 0)"
        );
    }

    #[test]
    fn coincident_dilate_grippers() {
        let a = Action::Dilate { x_l: 1.0, y_l: 2.0, x_r: 1.0, y_r: 2.0, alpha: 1.0, theta: 0.0, d: 10.0 };
        assert_eq!(validate_action(&a, &Workspace::default()), vec![Violation::CoincidentGrippers]);
    }

    #[test]
    fn zero_counts_and_distances() {
        let ws = Workspace::default();
        let a = Action::Compress { x: 0.0, y: 0.0, k_c: 0 };
        assert_eq!(validate_action(&a, &ws), vec![Violation::NonPositiveCount]);
        let a = Action::Fold { x: 0.0, y: 0.0, d: 0.0 };
        assert_eq!(validate_action(&a, &ws), vec![Violation::NonPositiveDistance]);
    }

    #[test]
    fn collect_and_execute_defaults() {
        match defaults_for("Shake", Phase::Collect).unwrap() {
            Action::Shake { k_s, amplitude, freq, .. } => {
                assert_eq!((k_s, amplitude, freq), (3, 0.7, 0.4));
            }
            a => panic!("{a:?}"),
        }
        match defaults_for("Dilate", Phase::Collect).unwrap() {
            Action::Dilate { d, theta, .. } => assert_eq!((d, theta), (12.0, 0.0)),
            a => panic!("{a:?}"),
        }
        match defaults_for("Dilate", Phase::Execute).unwrap() {
            Action::Dilate { d, alpha, .. } => assert_eq!((d, alpha), (10.0, PI / 3.0)),
            a => panic!("{a:?}"),
        }
        match defaults_for("Fold", Phase::Execute).unwrap() {
            Action::Fold { d, .. } => assert_eq!(d, 28.0),
            a => panic!("{a:?}"),
        }
        assert!(matches!(defaults_for("Fling", Phase::Collect), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn templates_are_valid() {
        let ws = Workspace::default();
        let d = PrimitiveDefaults::default();
        for k in ActionKind::ALL {
            for ph in [Phase::Collect, Phase::Execute] {
                assert!(validate_action(&d.template(k, ph), &ws).is_empty(), "{k} {ph:?}");
            }
        }
    }

    #[test]
    fn log_form() {
        let a = Action::Compress { x: 1.5, y: -2.0, k_c: 4 };
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"kind":"Compress","params":{"k_c":4.0,"x":1.5,"y":-2.0}}"#);
        let back: Action = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Action>(r#"{"kind":"Compress","params":{"x":1}}"#).is_err());
    }

    #[test]
    fn px_cm_round_trip() {
        let ws = Workspace::default();
        let p = Point::new(-12.25, 30.5);
        let q = ws.to_cm(ws.to_px(p));
        assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12);
        assert_eq!(ws.image_size(), (280, 360));
    }
}
