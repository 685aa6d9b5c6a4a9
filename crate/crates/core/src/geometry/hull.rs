use std::cmp::Ordering;

use super::{orient, Point, Polygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn lex<T: Scalar>(a: &Point<T>, b: &Point<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
}

/// Andrew's monotone chain.
///
/// Output is counter-clockwise, strictly convex (collinear boundary points
/// dropped) and starts at the vertex with the smallest `y`, ties broken by the
/// smallest `x`. A single distinct input point gives a one-vertex polygon and
/// collinear input gives its two extreme points.
pub fn convex_hull<T: Scalar>(points: &[Point<T>]) -> Result<Polygon<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts = points.to_vec();
    pts.sort_by(lex);
    pts.dedup();
    if pts.len() < 3 {
        return Ok(canonical(pts));
    }

    let mut hull: Vec<Point<T>> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero()
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero()
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(canonical(hull))
}

fn canonical<T: Scalar>(mut v: Vec<Point<T>>) -> Polygon<T> {
    if let Some(start) = (0..v.len()).min_by(|&i, &j| {
        let (a, b) = (v[i], v[j]);
        a.y.partial_cmp(&b.y)
            .unwrap_or(Ordering::Equal)
            .then(a.x.partial_cmp(&b.x).unwrap_or(Ordering::Equal))
    }) {
        v.rotate_left(start);
    }
    Polygon::new(v)
}
