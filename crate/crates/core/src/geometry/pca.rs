use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Principal axes of a point set. Lengths are standard deviations along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisFrame<T> {
    pub center: Point<T>,
    pub major_dir: Point<T>,
    pub minor_dir: Point<T>,
    pub major_len: T,
    pub minor_len: T,
}

impl<T: Scalar> AxisFrame<T> {
    /// `major_len / minor_len`, or `None` when the minor axis has zero length.
    pub fn ratio(&self) -> Option<T> {
        (self.minor_len > T::zero()).then(|| self.major_len / self.minor_len)
    }
}

/// Principal component analysis of a 2D point set.
///
/// The population covariance is diagonalised with a single Jacobi rotation.
/// `minor_dir` is `major_dir` rotated by +90°.
pub fn pca_axes<T: Scalar>(points: &[Point<T>]) -> Result<AxisFrame<T>> {
    if points.len() < 2 {
        return Err(Error::DegenerateInput("PCA needs at least two points"));
    }
    // Accumulate in f64 regardless of T; large pixel sets lose too much in f32.
    let n = points.len() as f64;
    let (mut mx, mut my) = (0.0f64, 0.0f64);
    for p in points {
        mx += p.x.as_f64();
        my += p.y.as_f64();
    }
    mx /= n;
    my /= n;
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let dx = p.x.as_f64() - mx;
        let dy = p.y.as_f64() - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    sxx /= n;
    syy /= n;
    sxy /= n;

    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (s, c) = theta.sin_cos();
    let l1 = c * c * sxx + 2.0 * c * s * sxy + s * s * syy;
    let l2 = s * s * sxx - 2.0 * c * s * sxy + c * c * syy;
    let (major, minor, lmaj, lmin) = if l1 >= l2 {
        ((c, s), (-s, c), l1, l2)
    } else {
        ((-s, c), (-c, -s), l2, l1)
    };
    Ok(AxisFrame {
        center: Point::new(T::of(mx), T::of(my)),
        major_dir: Point::new(T::of(major.0), T::of(major.1)),
        minor_dir: Point::new(T::of(minor.0), T::of(minor.1)),
        major_len: T::of(lmaj.max(0.0).sqrt()),
        minor_len: T::of(lmin.max(0.0).sqrt()),
    })
}
