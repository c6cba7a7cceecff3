use std::ops::{Add, Mul, Sub};

use super::Blob;
use crate::error::{Error, Result};

/// Minimum number of points on a contour.
pub const MIN_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_squared(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Closed polygon; the edge from the last point back to the first is
/// implicit. Coordinates are `x = column`, `y = row`, with pixel centers at
/// integer positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    points: Vec<Point>,
}

impl Contour {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "contour needs at least {MIN_POINTS} points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidArgument(
                "contour has non-finite point".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        polyline_length(&self.points)
    }

    /// Vertex centroid.
    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let s = self.points.iter().fold(Point::default(), |acc, &p| acc + p);
        s * (1.0 / n)
    }

    /// Shoelace area; positive when the points run counter-clockwise in
    /// `(x, y)` coordinates.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    pub(crate) fn from_points_unchecked(points: Vec<Point>) -> Self {
        Self { points }
    }
}

fn polyline_length(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n).map(|i| points[i].dist(points[(i + 1) % n])).sum()
}

pub(crate) fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut a = 0.0;
    for i in 0..n {
        let (p, q) = (points[i], points[(i + 1) % n]);
        a += p.x * q.y - q.x * p.y;
    }
    0.5 * a
}

// Moore neighbourhood, clockwise on screen (rows grow downward), from west.
const MOORE: [(i64, i64); 8] = [
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
];

fn moore_index(dr: i64, dc: i64) -> usize {
    MOORE
        .iter()
        .position(|&d| d == (dr, dc))
        .expect("offset is a Moore neighbour")
}

/// Outer boundary of the footprint by Moore-neighbour tracing, as pixel
/// centers in the blob's frame. The trace starts at the first foreground
/// pixel in raster order and stops on re-entering it the same way it first
/// left. Pixels on one-pixel-wide spurs appear once per pass.
pub fn trace_boundary(blob: &Blob) -> Vec<(i64, i64)> {
    let fp = blob.footprint();
    let Some(start) = fp.ones().next() else {
        return Vec::new();
    };
    let start = (start.0 as i64, start.1 as i64);

    // Clockwise scan around `cur` beginning after the backtrack direction.
    let step = |cur: (i64, i64), back: usize| -> Option<((i64, i64), usize)> {
        for k in 1..=8 {
            let d = (back + k) % 8;
            let n = (cur.0 + MOORE[d].0, cur.1 + MOORE[d].1);
            if fp.get_signed(n.0, n.1) {
                let prev = (back + k - 1) % 8;
                let b = (cur.0 + MOORE[prev].0, cur.1 + MOORE[prev].1);
                return Some((n, moore_index(b.0 - n.0, b.1 - n.1)));
            }
        }
        None
    };

    let mut out = vec![start];
    // West of the raster-first pixel is always background.
    let Some((first_next, first_back)) = step(start, 0) else {
        return offset_points(blob, out);
    };
    let (mut cur, mut back) = (first_next, first_back);
    let limit = 8 * blob.area() + 16;
    while out.len() <= limit {
        let (next, nb) = step(cur, back).expect("connected pixel has a neighbour");
        if cur == start && next == first_next {
            break;
        }
        out.push(cur);
        cur = next;
        back = nb;
    }
    offset_points(blob, out)
}

fn offset_points(blob: &Blob, local: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    let (or, oc) = blob.offset();
    local.into_iter().map(|(r, c)| (r + or, c + oc)).collect()
}

/// Samples `e` points at uniform arc length along the traced outer boundary
/// of `blob`.
///
/// The result runs counter-clockwise (positive shoelace area in `(x, y)`)
/// and starts at the traced boundary vertex with the smallest polar angle
/// around the pixel centroid, so the output is a pure function of the
/// footprint.
pub fn get_contour_points(blob: &Blob, e: usize) -> Result<Contour> {
    if e < MIN_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_POINTS} contour points, got {e}"
        )));
    }
    let traced = trace_boundary(blob);
    let mut poly: Vec<Point> = traced
        .iter()
        .map(|&(r, c)| Point::new(c as f64, r as f64))
        .collect();
    poly.dedup();
    let area = signed_area(&poly);
    if poly.len() < 3 || area.abs() < 1.0 {
        return Err(Error::DegenerateContour(format!(
            "boundary encloses area {:.2} over {} traced points",
            area.abs(),
            poly.len()
        )));
    }
    if area < 0.0 {
        poly.reverse();
    }

    let (cr, cc) = blob.centroid();
    let start = poly
        .iter()
        .enumerate()
        .map(|(i, p)| (i, (p.y - cr).atan2(p.x - cc)))
        .fold((0usize, f64::INFINITY), |best, (i, a)| {
            if a < best.1 {
                (i, a)
            } else {
                best
            }
        })
        .0;
    poly.rotate_left(start);

    Ok(Contour::from_points_unchecked(resample_closed(&poly, e)))
}

/// `e` points at equal arc-length steps along a closed polyline, starting at
/// its first vertex.
pub(crate) fn resample_closed(poly: &[Point], e: usize) -> Vec<Point> {
    let n = poly.len();
    let seg: Vec<f64> = (0..n).map(|i| poly[i].dist(poly[(i + 1) % n])).collect();
    let total: f64 = seg.iter().sum();
    let step = total / e as f64;
    let mut out = Vec::with_capacity(e);
    let (mut i, mut walked) = (0usize, 0.0);
    for k in 0..e {
        let target = k as f64 * step;
        while i < n - 1 && walked + seg[i] < target {
            walked += seg[i];
            i += 1;
        }
        let t = if seg[i] > 0.0 {
            ((target - walked) / seg[i]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        out.push(a + (b - a) * t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BitGrid;

    fn disk(radius: f64) -> Blob {
        let n = (2.0 * radius) as usize + 3;
        let c = (n / 2) as f64;
        let g = BitGrid::from_fn(n, n, |r, col| {
            let (dy, dx) = (r as f64 - c, col as f64 - c);
            dx * dx + dy * dy <= radius * radius
        });
        Blob::from_footprint(&g, (0, 0)).unwrap()
    }

    /// Arc-length position of a point on the boundary of `[0, s]²`, walking
    /// counter-clockwise in `(x, y)` from the origin.
    fn square_param(p: Point, s: f64) -> f64 {
        let eps = 1e-9;
        if p.y.abs() < eps {
            p.x
        } else if (p.x - s).abs() < eps {
            s + p.y
        } else if (p.y - s).abs() < eps {
            3.0 * s - p.x
        } else {
            assert!(p.x.abs() < eps, "{p:?} not on square");
            4.0 * s - p.y
        }
    }

    #[test]
    fn filled_square_spacing() {
        let sq = Blob::from_footprint(&BitGrid::filled(10, 10), (0, 0)).unwrap();
        let c = get_contour_points(&sq, 8).unwrap();
        assert_eq!(c.len(), 8);
        assert!(c.signed_area() > 0.0);
        let params: Vec<f64> = c.points().iter().map(|&p| square_param(p, 9.0)).collect();
        for i in 0..8 {
            let d = (params[(i + 1) % 8] - params[i]).rem_euclid(36.0);
            assert!((d - 4.5).abs() < 1e-9, "spacing {d}");
        }
    }

    #[test]
    fn disk_points_sit_on_the_radius() {
        let b = disk(20.0);
        let (cr, cc) = b.centroid();
        let c = get_contour_points(&b, 64).unwrap();
        for p in c.points() {
            let r = Point::new(p.x - cc, p.y - cr).norm();
            assert!((r - 20.0).abs() <= 1.5, "radius {r}");
        }
    }

    #[test]
    fn uniform_arc_length_on_the_traced_polyline() {
        let b = disk(9.0);
        let traced: Vec<Point> = trace_boundary(&b)
            .into_iter()
            .map(|(r, c)| Point::new(c as f64, r as f64))
            .collect();
        let per = polyline_length(&traced);
        let c = get_contour_points(&b, 40).unwrap();
        // Chords never exceed the arc they cut, and the arc step is per/E.
        for i in 0..40 {
            let d = c.points()[i].dist(c.points()[(i + 1) % 40]);
            assert!(d <= per / 40.0 * 1.01 + 1e-9);
        }
    }

    #[test]
    fn thin_line_is_degenerate() {
        let line = Blob::from_footprint(&BitGrid::filled(1, 30), (0, 0)).unwrap();
        assert_eq!(
            get_contour_points(&line, 16).unwrap_err().kind(),
            "degenerate_contour"
        );
        let px = Blob::from_footprint(&BitGrid::filled(1, 1), (0, 0)).unwrap();
        assert!(get_contour_points(&px, 16).is_err());
    }

    #[test]
    fn too_few_points_rejected() {
        let sq = Blob::from_footprint(&BitGrid::filled(10, 10), (0, 0)).unwrap();
        assert_eq!(
            get_contour_points(&sq, 7).unwrap_err().kind(),
            "invalid_argument"
        );
    }

    #[test]
    fn trace_visits_square_ring_once() {
        let sq = Blob::from_footprint(&BitGrid::filled(4, 5), (2, 3)).unwrap();
        let t = trace_boundary(&sq);
        assert_eq!(t.len(), 2 * (4 + 5) - 4);
        assert_eq!(t[0], (2, 3));
    }

    #[test]
    fn trace_handles_spur() {
        // A square with a one-pixel-wide tail: the tail is walked out and back.
        let g = BitGrid::from_fn(3, 6, |r, c| c < 3 || r == 1);
        let b = Blob::from_footprint(&g, (0, 0)).unwrap();
        let t = trace_boundary(&b);
        assert_eq!(t.iter().filter(|&&p| p == (1, 5)).count(), 1);
        assert_eq!(t.iter().filter(|&&p| p == (1, 4)).count(), 2);
    }
}
