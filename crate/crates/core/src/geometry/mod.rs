//! Planar geometry over pixel coordinates.
//!
//! Pixel `(x, y)` is the point `(x, y)`: column to the right, row downward.
//! "Counter-clockwise" means positive shoelace area in that coordinate system.

mod hull;
mod pca;
pub(crate) mod raster;
mod rect;

pub use hull::convex_hull;
pub use pca::{pca_axes, AxisFrame};
pub use raster::{
    connected_components, dilate_mask, disk_offsets, erode_layer, fill_polygon, PixelSet,
};
pub use rect::min_area_rectangle;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn from_px((x, y): (i32, i32)) -> Self {
        Point::new(T::of_px(x), T::of_px(y))
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Nearest pixel.
    pub fn round_px(self) -> (i32, i32) {
        (
            self.x.round().to_i32().unwrap_or(i32::MIN),
            self.y.round().to_i32().unwrap_or(i32::MIN),
        )
    }

    pub fn cast<U: Scalar>(self) -> Point<U> {
        Point::new(U::of(self.x.as_f64()), U::of(self.y.as_f64()))
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Point::new(self.x * k, self.y * k)
    }
}

/// `(b - a) × (c - a)`; positive when `a, b, c` turn counter-clockwise.
pub fn orient<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    (b - a).cross(c - a)
}

/// Ordered vertex list. Counter-clockwise when produced by this module.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon<T> {
    pub vertices: Vec<Point<T>>,
}

impl<T: Scalar> Polygon<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Self {
        Polygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace sum; positive for counter-clockwise order.
    pub fn signed_area(&self) -> T {
        if self.vertices.len() < 3 {
            return T::zero();
        }
        let twice = self
            .edges()
            .fold(T::zero(), |acc, (a, b)| acc + a.cross(b));
        twice / T::of(2.0)
    }

    /// Area centroid; falls back to the vertex mean for degenerate polygons.
    pub fn area_centroid(&self) -> Result<Point<T>> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyInput);
        }
        let a = self.signed_area();
        if a.abs() <= T::epsilon() {
            return vertex_mean(&self.vertices);
        }
        // Shift to the first vertex to keep the sums well-conditioned.
        let o = self.vertices[0];
        let (mut cx, mut cy) = (T::zero(), T::zero());
        for (p, q) in self.edges() {
            let (p, q) = (p - o, q - o);
            let w = p.cross(q);
            cx = cx + (p.x + q.x) * w;
            cy = cy + (p.y + q.y) * w;
        }
        let k = T::of(6.0) * a;
        Ok(Point::new(o.x + cx / k, o.y + cy / k))
    }

    /// Point-in-convex-polygon test, boundary inclusive up to `tol`.
    pub fn contains_convex(&self, p: Point<T>, tol: T) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].dist(p) <= tol,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let len = (b - a).norm();
                let t = (p - a).dot(b - a) / (len * len);
                (orient(a, b, p) / len).abs() <= tol
                    && t >= -tol / len
                    && t <= T::one() + tol / len
            }
            _ => self.edges().all(|(a, b)| {
                let len = (b - a).norm();
                len <= T::zero() || orient(a, b, p) / len >= -tol
            }),
        }
    }

    /// Keeps the part of a convex polygon where `normal · p <= offset`.
    pub fn clip_halfplane(&self, normal: Point<T>, offset: T) -> Polygon<T> {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let (dp, dq) = (normal.dot(p) - offset, normal.dot(q) - offset);
            if dp <= T::zero() {
                out.push(p);
            }
            if (dp < T::zero() && dq > T::zero()) || (dp > T::zero() && dq < T::zero()) {
                let t = dp / (dp - dq);
                out.push(p + (q - p) * t);
            }
        }
        Polygon::new(out)
    }

    pub fn cast<U: Scalar>(&self) -> Polygon<U> {
        Polygon::new(self.vertices.iter().map(|p| p.cast()).collect())
    }
}

/// Absolute shoelace area; zero for two or fewer vertices.
pub fn polygon_area<T: Scalar>(poly: &Polygon<T>) -> T {
    poly.signed_area().abs()
}

fn vertex_mean<T: Scalar>(points: &[Point<T>]) -> Result<Point<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = T::from_usize(points.len()).expect("count");
    let s = points
        .iter()
        .fold(Point::new(T::zero(), T::zero()), |acc, &p| acc + p);
    Ok(Point::new(s.x / n, s.y / n))
}

/// Arithmetic mean of a pixel set.
pub fn centroid<T: Scalar>(points: &[(i32, i32)]) -> Result<Point<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (sx, sy) = points
        .iter()
        .fold((0i64, 0i64), |(sx, sy), &(x, y)| (sx + x as i64, sy + y as i64));
    let n = points.len() as f64;
    Ok(Point::new(T::of(sx as f64 / n), T::of(sy as f64 / n)))
}
