//! Rigid 2D iterative-closest-point registration of contours followed by a
//! cyclic index pairing, so two contours of equal length can be blended
//! point by point.

use std::f64::consts::PI;

use super::contour::{Contour, Point};
use crate::error::{Error, Result};

/// Rotation about the origin followed by a translation: `p ↦ R·p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform {
    /// Radians, normalized to `(−π, π]`.
    pub rotation: f64,
    pub translation: Point,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: 0.0,
        translation: Point::new(0.0, 0.0),
    };

    pub fn new(rotation: f64, translation: Point) -> Self {
        Self {
            rotation: normalize_angle(rotation),
            translation,
        }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(angle: f64, center: Point) -> Self {
        let r = rotate(center, angle);
        Self::new(angle, center - r)
    }

    pub fn apply(&self, p: Point) -> Point {
        rotate(p, self.rotation) + self.translation
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &RigidTransform) -> RigidTransform {
        RigidTransform::new(
            self.rotation + next.rotation,
            rotate(self.translation, next.rotation) + next.translation,
        )
    }

    pub fn apply_all(&self, points: &[Point]) -> Vec<Point> {
        points.iter().map(|&p| self.apply(p)).collect()
    }
}

fn rotate(p: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

/// Maps any angle into `(−π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcpParams {
    pub max_iters: usize,
    /// Stop once an iteration improves the cost by less than this fraction.
    pub tol: f64,
    /// Evenly spaced initial rotations tried after centroid alignment.
    pub seed_rotations: usize,
}

impl Default for IcpParams {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-6,
            seed_rotations: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Registration {
    /// First contour after the transform, re-indexed so point `i` pairs with
    /// point `i` of the target.
    pub contour: Contour,
    pub transform: RigidTransform,
    /// Index of the source point paired with target point 0.
    pub shift: usize,
    /// Whether the source was traversed backwards for the pairing.
    pub reversed: bool,
    /// Sum of squared distances to the target outline at convergence.
    pub nearest_cost: f64,
    /// Sum of squared distances under the final pairing.
    pub paired_cost: f64,
    pub iterations: usize,
}

/// Aligns `p1` onto `p2` and pairs their points. See [`register_with`].
pub fn register(p1: &Contour, p2: &Contour) -> Result<(Contour, RigidTransform)> {
    let reg = register_with(p1, p2, &IcpParams::default())?;
    Ok((reg.contour, reg.transform))
}

/// Rigid ICP of `p1` onto `p2`, started from centroid alignment at each of
/// `params.seed_rotations` rotations; the run with the lowest
/// nearest-neighbour cost wins (earliest seed on ties). Points are then
/// paired by the cyclic shift and direction minimizing the summed squared
/// distance.
///
/// If the registered pairing is worse than pairing the untouched contours,
/// the identity transform is returned instead, so registration never raises
/// the paired cost.
pub fn register_with(p1: &Contour, p2: &Contour, params: &IcpParams) -> Result<Registration> {
    if p1.len() != p2.len() {
        return Err(Error::InvalidArgument(format!(
            "contours differ in length: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    let (src, dst) = (p1.points(), p2.points());
    let (c1, c2) = (p1.centroid(), p2.centroid());

    let seeds = params.seed_rotations.max(1);
    let mut best: Option<(RigidTransform, f64, usize)> = None;
    for k in 0..seeds {
        let angle = 2.0 * PI * k as f64 / seeds as f64;
        let init =
            RigidTransform::rotation_about(angle, c1).then(&RigidTransform::new(0.0, c2 - c1));
        let (t, cost, iters) = icp(src, dst, init, params);
        if best.as_ref().is_none_or(|b| cost < b.1) {
            best = Some((t, cost, iters));
        }
    }
    let (transform, nearest_cost, iterations) = best.expect("at least one seed");

    let moved = transform.apply_all(src);
    let (shift, reversed, cost) = best_pairing(&moved, dst);
    let (before_shift, before_rev, before_cost) = best_pairing(src, dst);

    let (transform, points, shift, reversed, paired) = if cost <= before_cost {
        (transform, moved, shift, reversed, cost)
    } else {
        (
            RigidTransform::IDENTITY,
            src.to_vec(),
            before_shift,
            before_rev,
            before_cost,
        )
    };
    Ok(Registration {
        contour: Contour::from_points_unchecked(reindex(&points, shift, reversed)),
        transform,
        shift,
        reversed,
        nearest_cost,
        paired_cost: paired,
        iterations,
    })
}

fn icp(
    src: &[Point],
    dst: &[Point],
    init: RigidTransform,
    params: &IcpParams,
) -> (RigidTransform, f64, usize) {
    let mut t = init;
    let mut moved = t.apply_all(src);
    let (mut cost, mut matched) = nearest(&moved, dst);
    let mut iters = 0;
    while iters < params.max_iters && cost > 0.0 {
        iters += 1;
        let delta = procrustes(&moved, &matched);
        let candidate = t.then(&delta);
        let cand_moved = candidate.apply_all(src);
        let (cand_cost, cand_matched) = nearest(&cand_moved, dst);
        if cand_cost > cost {
            break;
        }
        let improvement = cost - cand_cost;
        let previous = cost;
        t = candidate;
        moved = cand_moved;
        cost = cand_cost;
        matched = cand_matched;
        if improvement <= params.tol * previous {
            break;
        }
    }
    (t, cost, iters)
}

/// Closest point on the closed target polyline for each source point, with
/// the summed squared distance. Matching against edges rather than vertices
/// keeps the cost from snapping to the target's sampling.
fn nearest(src: &[Point], dst: &[Point]) -> (f64, Vec<Point>) {
    let n = dst.len();
    let mut cost = 0.0;
    let mut matched = Vec::with_capacity(src.len());
    for &p in src {
        let mut best = (f64::INFINITY, dst[0]);
        for i in 0..n {
            let q = closest_on_segment(p, dst[i], dst[(i + 1) % n]);
            let d = (p - q).norm_squared();
            if d < best.0 {
                best = (d, q);
            }
        }
        cost += best.0;
        matched.push(best.1);
    }
    (cost, matched)
}

fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).x * ab.x + (p - a).y * ab.y) / len2;
    a + ab * t.clamp(0.0, 1.0)
}

/// Least-squares rigid transform taking `a[i]` to `b[i]`.
fn procrustes(a: &[Point], b: &[Point]) -> RigidTransform {
    let n = a.len() as f64;
    let ca = a.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
    let cb = b.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
    let (mut sin, mut cos) = (0.0, 0.0);
    for (&p, &q) in a.iter().zip(b) {
        let (p, q) = (p - ca, q - cb);
        sin += p.x * q.y - p.y * q.x;
        cos += p.x * q.x + p.y * q.y;
    }
    let angle = sin.atan2(cos);
    RigidTransform::new(angle, cb - rotate(ca, angle))
}

fn reindex(points: &[Point], shift: usize, reversed: bool) -> Vec<Point> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let j = if reversed {
                (shift + n - i) % n
            } else {
                (shift + i) % n
            };
            points[j]
        })
        .collect()
}

/// Cyclic shift and direction pairing `src` with `dst` at least summed
/// squared distance: `(shift, reversed, cost)`. Forward shifts are tried
/// first, then reversed, lowest shift first; the first minimum wins.
fn best_pairing(src: &[Point], dst: &[Point]) -> (usize, bool, f64) {
    let n = src.len();
    let mut best = (0, false, f64::INFINITY);
    for reversed in [false, true] {
        for shift in 0..n {
            let mut cost = 0.0;
            for (i, &q) in dst.iter().enumerate() {
                let j = if reversed {
                    (shift + n - i) % n
                } else {
                    (shift + i) % n
                };
                cost += (src[j] - q).norm_squared();
                if cost >= best.2 {
                    break;
                }
            }
            if cost < best.2 {
                best = (shift, reversed, cost);
            }
        }
    }
    best
}

/// Summed squared distance between two contours under their best cyclic
/// pairing (the same rule [`register`] uses).
pub fn paired_cost(p1: &Contour, p2: &Contour) -> f64 {
    best_pairing(p1.points(), p2.points()).2
}
