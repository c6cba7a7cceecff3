//! Dense binary and real-valued raster helpers shared by every stage.

use std::collections::VecDeque;

/// Row-major binary raster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitGrid {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl BitGrid {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            bits: vec![false; height * width],
        }
    }

    pub fn filled(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            bits: vec![true; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self {
            height,
            width,
            bits,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Out-of-bounds reads are background.
    #[inline]
    pub fn get_signed(&self, row: i64, col: i64) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.get(row as usize, col as usize)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    /// Iterator over set pixels as `(row, col)` in raster order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / w, i % w))
    }

    /// Bounding box of set pixels as `(row0, col0, row1, col1)`, inclusive.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for (r, c) in self.ones() {
            bbox = Some(match bbox {
                None => (r, c, r, c),
                Some((r0, c0, r1, c1)) => (r0.min(r), c0.min(c), r1.max(r), c1.max(c)),
            });
        }
        bbox
    }

    pub fn crop(&self, row0: usize, col0: usize, height: usize, width: usize) -> BitGrid {
        BitGrid::from_fn(height, width, |r, c| self.get(row0 + r, col0 + c))
    }

    /// 4-connected components of the set pixels, each as a list of pixels in
    /// raster order of discovery. Components are ordered by their first
    /// pixel in raster order.
    pub fn components4(&self) -> Vec<Vec<(usize, usize)>> {
        let mut seen = vec![false; self.bits.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(i) = queue.pop_front() {
                let (r, c) = (i / self.width, i % self.width);
                comp.push((r, c));
                let mut visit = |j: usize| {
                    if self.bits[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                if r > 0 {
                    visit(i - self.width);
                }
                if r + 1 < self.height {
                    visit(i + self.width);
                }
                if c > 0 {
                    visit(i - 1);
                }
                if c + 1 < self.width {
                    visit(i + 1);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Keeps only the largest 4-connected component; ties go to the
    /// component found first in raster order.
    pub fn largest_component(&self) -> BitGrid {
        let mut best: Option<Vec<(usize, usize)>> = None;
        for comp in self.components4() {
            if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
                best = Some(comp);
            }
        }
        let mut out = BitGrid::new(self.height, self.width);
        for (r, c) in best.into_iter().flatten() {
            out.set(r, c, true);
        }
        out
    }

    /// Dilation with a 3×3 square structuring element; the grid grows by one
    /// pixel on every side so nothing is clipped.
    pub fn dilate3_grow(&self) -> BitGrid {
        let (h, w) = (self.height + 2, self.width + 2);
        BitGrid::from_fn(h, w, |r, c| {
            let (r, c) = (r as i64 - 1, c as i64 - 1);
            (-1..=1).any(|dr| (-1..=1).any(|dc| self.get_signed(r + dr, c + dc)))
        })
    }

    /// Erosion with a 3×3 square structuring element, shrinking the grid by
    /// one pixel on every side (inverse framing of [`Self::dilate3_grow`]).
    pub fn erode3_shrink(&self) -> BitGrid {
        let (h, w) = (self.height.saturating_sub(2), self.width.saturating_sub(2));
        BitGrid::from_fn(h, w, |r, c| {
            let (r, c) = (r as i64 + 1, c as i64 + 1);
            (-1..=1).all(|dr| (-1..=1).all(|dc| self.get_signed(r + dr, c + dc)))
        })
    }

    /// Morphological closing with a 3×3 square, same frame as the input.
    pub fn close3(&self) -> BitGrid {
        self.dilate3_grow().erode3_shrink()
    }
}

/// Row-major real-valued raster.
#[derive(Clone, Debug, PartialEq)]
pub struct RealGrid {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl RealGrid {
    pub fn from_bits(bits: &BitGrid) -> Self {
        Self {
            height: bits.height(),
            width: bits.width(),
            values: bits
                .as_slice()
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Separable Gaussian blur with mirrored borders. The kernel extends to
    /// `ceil(3σ)`; `sigma <= 0` returns a copy.
    pub fn gaussian_blur(&self, sigma: f64) -> RealGrid {
        if sigma <= 0.0 || self.values.is_empty() {
            return self.clone();
        }
        let radius = (3.0 * sigma).ceil() as i64;
        let mut kernel: Vec<f64> = (-radius..=radius)
            .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
            .collect();
        let norm: f64 = kernel.iter().sum();
        kernel.iter_mut().for_each(|k| *k /= norm);

        let (h, w) = (self.height, self.width);
        let mut tmp = vec![0.0; h * w];
        for r in 0..h {
            let row = &self.values[r * w..(r + 1) * w];
            for c in 0..w {
                let mut acc = 0.0;
                for (k, d) in kernel.iter().zip(-radius..=radius) {
                    acc += k * row[mirror(c as i64 + d, w)];
                }
                tmp[r * w + c] = acc;
            }
        }
        let mut out = vec![0.0; h * w];
        for r in 0..h {
            for c in 0..w {
                let mut acc = 0.0;
                for (k, d) in kernel.iter().zip(-radius..=radius) {
                    acc += k * tmp[mirror(r as i64 + d, h) * w + c];
                }
                out[r * w + c] = acc;
            }
        }
        RealGrid {
            height: h,
            width: w,
            values: out,
        }
    }
}

/// Reflect an index into `[0, n)` (half-sample symmetric, `d c b | a b c d`).
fn mirror(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * n;
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - 1 - i;
    }
    i as usize
}
