use super::{convex_hull, Point, Polygon};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum-area enclosing rectangle by rotating calipers.
///
/// One side of the result is collinear with an edge of the convex hull.
/// Vertices are counter-clockwise, starting at the lowest-then-leftmost corner.
pub fn min_area_rectangle<T: Scalar>(points: &[Point<T>]) -> Result<Polygon<T>> {
    let hull = convex_hull(points)?;
    let n = hull.len();
    if n < 3 {
        return Err(Error::DegenerateInput("rectangle fit needs non-collinear points"));
    }
    let v = &hull.vertices;
    let mut best: Option<(T, [Point<T>; 4])> = None;
    for i in 0..n {
        let e = v[(i + 1) % n] - v[i];
        let len = e.norm();
        if len <= T::zero() {
            continue;
        }
        let u = e * (T::one() / len);
        let w = Point::new(-u.y, u.x);
        let (mut u0, mut u1, mut w0, mut w1) = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
        for &p in v {
            let d = p - v[i];
            let (a, b) = (d.dot(u), d.dot(w));
            u0 = u0.min(a);
            u1 = u1.max(a);
            w0 = w0.min(b);
            w1 = w1.max(b);
        }
        let area = (u1 - u0) * (w1 - w0);
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            let at = |a: T, b: T| v[i] + u * a + w * b;
            best = Some((area, [at(u0, w0), at(u1, w0), at(u1, w1), at(u0, w1)]));
        }
    }
    let (_, corners) = best.ok_or(Error::DegenerateInput("zero-length hull edges"))?;
    let mut corners = corners.to_vec();
    let start = (0..4)
        .min_by(|&a, &b| {
            let (p, q) = (corners[a], corners[b]);
            p.y.partial_cmp(&q.y)
                .unwrap()
                .then(p.x.partial_cmp(&q.x).unwrap())
        })
        .unwrap();
    corners.rotate_left(start);
    Ok(Polygon::new(corners))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_area;

    #[test]
    fn axis_aligned_square() {
        let p: Vec<Point<f64>> = [(0, 0), (4, 0), (4, 4), (0, 4)].iter().map(|&q| Point::from_px(q)).collect();
        let r = min_area_rectangle(&p).unwrap();
        assert_eq!(r.vertices, p);
    }

    #[test]
    fn rotated_square_keeps_area() {
        let s = std::f64::consts::FRAC_1_SQRT_2 * 4.0;
        let p = vec![
            Point::new(0.0, -s),
            Point::new(s, 0.0),
            Point::new(0.0, s),
            Point::new(-s, 0.0),
        ];
        let r = min_area_rectangle(&p).unwrap();
        assert!((polygon_area(&r) - 16.0).abs() < 1e-9);
        for c in &r.vertices {
            assert!(p.iter().any(|q| q.dist(*c) < 1e-9));
        }
    }

    #[test]
    fn collinear_is_degenerate() {
        let p: Vec<Point<f64>> = [(0, 0), (1, 1), (3, 3)].iter().map(|&q| Point::from_px(q)).collect();
        assert!(matches!(min_area_rectangle(&p), Err(Error::DegenerateInput(_))));
    }
}
