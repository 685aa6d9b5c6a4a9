//! Perception metrics, action primitives, opening policy and an abstract
//! seeded simulator for robotic plastic-bag opening and item insertion.
//!
//! The geometry kernel and the opening metrics are generic over the scalar
//! type (`f32` or `f64`); the aliases below fix them to `f64`, which is what
//! the simulator, policy and harness use.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod mask;
pub mod perception;
pub mod policy;
pub mod primitives;
pub mod rng;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use mask::{Label, SegMask};
pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type Polygon = geometry::Polygon<f64>;
pub type AxisFrame = geometry::AxisFrame<f64>;
pub type OpeningMetrics = perception::OpeningMetrics<f64>;
