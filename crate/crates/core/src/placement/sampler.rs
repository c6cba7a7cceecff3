use rand::Rng;

use crate::priors::PriorMap;

/// Fixed-point scale applied to prior values. Integer weights keep the
/// running total exact under removals, so a zero total really means no
/// mass is left and a sampled pixel always carries positive weight.
pub const WEIGHT_SCALE: f64 = (1u64 << 24) as f64;

/// Categorical sampler over pixels backed by a Fenwick tree, with O(log n)
/// draws and removals.
#[derive(Clone, Debug)]
pub struct PixelSampler {
    tree: Vec<u64>,
    weights: Vec<u64>,
    width: usize,
}

impl PixelSampler {
    pub fn from_prior(prior: &PriorMap) -> Self {
        let weights: Vec<u64> = prior
            .values()
            .iter()
            .map(|&v| (v * WEIGHT_SCALE).round() as u64)
            .collect();
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i + 1];
            }
        }
        Self {
            tree,
            weights,
            width: prior.width(),
        }
    }

    pub fn total(&self) -> u64 {
        let mut i = self.weights.len();
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    pub fn weight(&self, index: usize) -> u64 {
        self.weights[index]
    }

    /// Drops a pixel's weight to zero.
    pub fn remove(&mut self, index: usize) {
        let w = self.weights[index];
        if w == 0 {
            return;
        }
        self.weights[index] = 0;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= w;
            i += i & i.wrapping_neg();
        }
    }

    /// Draws `(row, col)` with probability proportional to weight, or `None`
    /// when no weight is left.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(usize, usize)> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let mut target = rng.random_range(0..total);
        // Descend to the last position whose prefix sum is <= target.
        let n = self.weights.len();
        let mut pos = 0usize;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        debug_assert!(self.weights[pos] > 0);
        Some((pos / self.width, pos % self.width))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frequencies_follow_weights() {
        let prior = PriorMap::new(1, 4, vec![0.0, 0.25, 0.5, 0.25]).unwrap();
        let s = PixelSampler::from_prior(&prior);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0usize; 4];
        let n = 40_000;
        for _ in 0..n {
            counts[s.sample(&mut rng).unwrap().1] += 1;
        }
        assert_eq!(counts[0], 0);
        for (c, p) in counts.iter().zip([0.0, 0.25, 0.5, 0.25]) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.01);
        }
    }

    #[test]
    fn removal_is_exact() {
        let prior = PriorMap::new(3, 3, vec![0.3; 9]).unwrap();
        let mut s = PixelSampler::from_prior(&prior);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..8 {
            s.remove(i);
        }
        assert_eq!(s.total(), s.weight(8));
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), Some((2, 2)));
        }
        s.remove(8);
        assert_eq!(s.total(), 0);
        assert_eq!(s.sample(&mut rng), None);
    }
}
