//! Standard bit mutation with rate 1/n.
//!
//! The number of flipped bits is drawn from Binomial(n, 1/n) and the flipped
//! positions are then chosen uniformly without replacement, which has the same
//! distribution as flipping every bit independently.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::fitness::SearchPoint;

/// Flip counts up to this size use rejection sampling of positions.
const SMALL_FLIP_COUNT: usize = 16;

#[derive(Clone, Debug)]
pub struct Mutator {
    n: usize,
    flip_count: Binomial,
}

impl Mutator {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "mutation needs n >= 1");
        let flip_count = Binomial::new(n as u64, 1.0 / n as f64).expect("valid binomial parameters");
        Mutator { n, flip_count }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Writes distinct flip positions into `out` (cleared first).
    pub fn sample_flips<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        let k = self.flip_count.sample(rng) as usize;
        if k == 0 {
            return;
        }
        if k == self.n {
            out.extend(0..self.n);
        } else if k <= SMALL_FLIP_COUNT && 4 * k <= self.n {
            while out.len() < k {
                let p = rng.random_range(0..self.n);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        } else {
            out.extend(rand::seq::index::sample(rng, self.n, k).iter());
        }
    }

    /// Returns a mutated copy; the parent is left unchanged.
    pub fn mutate<R: Rng + ?Sized>(&self, x: &SearchPoint, rng: &mut R) -> SearchPoint {
        debug_assert_eq!(x.len(), self.n);
        let mut flips = Vec::new();
        self.sample_flips(rng, &mut flips);
        let mut child = x.clone();
        child.apply_flips(&flips);
        child
    }
}

/// Convenience wrapper around [`Mutator::mutate`].
pub fn mutate<R: Rng + ?Sized>(x: &SearchPoint, rng: &mut R) -> SearchPoint {
    Mutator::new(x.len()).mutate(x, rng)
}
