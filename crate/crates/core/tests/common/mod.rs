#![allow(dead_code)]

use std::f64::consts::PI;

use nucleogen::blobs::{Blob, Contour, Point};
use nucleogen::grid::BitGrid;
use proptest::prelude::*;

pub fn disk(radius: f64) -> Blob {
    let n = 2 * radius.ceil() as usize + 3;
    let c = (n / 2) as f64;
    let g = BitGrid::from_fn(n, n, |r, col| {
        let (dy, dx) = (r as f64 - c, col as f64 - c);
        dx * dx + dy * dy <= radius * radius
    });
    Blob::from_footprint(&g, (0, 0)).unwrap()
}

pub fn ellipse(a: f64, b: f64, theta: f64) -> Blob {
    Blob::from_footprint(&nucleogen::demo::ellipse(a, b, theta), (0, 0)).unwrap()
}

/// Radius `base·(1 + depth·cos(k·a + phase))` around the grid center.
pub fn star(base: f64, depth: f64, k: u32, phase: f64) -> Blob {
    let half = (base * (1.0 + depth)).ceil() as usize + 2;
    let n = 2 * half + 1;
    let g = BitGrid::from_fn(n, n, |r, col| {
        let (dy, dx) = (r as f64 - half as f64, col as f64 - half as f64);
        (dx * dx + dy * dy).sqrt() <= base * (1.0 + depth * (k as f64 * dy.atan2(dx) + phase).cos())
    });
    Blob::from_footprint(&g.largest_component(), (0, 0)).unwrap()
}

/// Polygon with `n` vertices at radii `radii[i]` and even angles.
pub fn star_polygon(center: (f64, f64), radii: &[f64], phase: f64) -> Contour {
    let n = radii.len();
    Contour::new(
        radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let a = phase + 2.0 * PI * i as f64 / n as f64;
                Point::new(center.0 + r * a.cos(), center.1 + r * a.sin())
            })
            .collect(),
    )
    .unwrap()
}

pub fn convex_blob() -> impl Strategy<Value = Blob> {
    prop_oneof![
        (4.0f64..14.0).prop_map(disk),
        (3.0f64..8.0, 1.0f64..2.2, 0.0f64..PI).prop_map(|(b, k, t)| ellipse(b * k, b, t)),
    ]
}

pub fn any_shape() -> impl Strategy<Value = Blob> {
    prop_oneof![
        convex_blob(),
        (7.0f64..14.0, 0.05f64..0.3, 2u32..7, 0.0f64..2.0 * PI)
            .prop_map(|(b, d, k, p)| star(b, d, k, p)),
    ]
}
