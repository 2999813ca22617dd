//! Counter-based randomness.
//!
//! Every edge gets its own uniform variate, computed as a keyed hash of the
//! edge's absolute position. Sampling is therefore independent of iteration
//! order and of the box, and thresholding the same variates at `p1 <= p2`
//! gives the monotone coupling of the two product measures.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th independent replica of an experiment.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(mix(master ^ GOLDEN).wrapping_add(index.wrapping_mul(GOLDEN)) ^ 0x5851_f42d_4c95_7f2d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRng {
    key: u64,
}

impl EdgeRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        EdgeRng {
            key: mix(mix(seed ^ GOLDEN) ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03)),
        }
    }

    /// Uniform variate in `[0, 1)` attached to the edge `(base, offset)`.
    #[inline]
    pub fn uniform(&self, base: &[i32], offset: usize) -> f64 {
        self.uniform_at(self.vertex_key(base), offset)
    }

    /// Hash of a base vertex; combine with [`EdgeRng::uniform_at`].
    #[inline]
    pub fn vertex_key(&self, base: &[i32]) -> u64 {
        base.iter().fold(self.key, |h, &c| Self::absorb(h, c))
    }

    /// Key before any coordinate has been absorbed.
    #[inline]
    pub fn root_key(&self) -> u64 {
        self.key
    }

    /// One step of [`EdgeRng::vertex_key`]: folds coordinate `c` into `h`.
    #[inline]
    pub fn absorb(h: u64, c: i32) -> u64 {
        mix(h ^ (c as u32 as u64).wrapping_add(GOLDEN))
    }

    #[inline]
    pub fn uniform_at(&self, vertex_key: u64, offset: usize) -> f64 {
        self.bits53_at(vertex_key, offset) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// The 53-bit integer behind [`EdgeRng::uniform_at`].
    #[inline]
    pub fn bits53_at(&self, vertex_key: u64, offset: usize) -> u64 {
        mix(vertex_key ^ (offset as u64).wrapping_mul(GOLDEN)) >> 11
    }
}

/// Integer threshold `t` with `bits53 < t` exactly when the matching
/// uniform is below `p`.
pub fn threshold53(p: f64) -> u64 {
    (p * (1u64 << 53) as f64).ceil() as u64
}

impl EdgeRng {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniforms_look_uniform() {
        let rng = EdgeRng::new(42, 0);
        let n = 200_000;
        let mut sum = 0.0;
        let mut below = 0;
        for i in 0..n {
            let u = rng.uniform(&[i % 100, i / 100], (i % 3) as usize);
            assert!((0.0..1.0).contains(&u));
            sum += u;
            if u < 0.25 {
                below += 1;
            }
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 4.0 * (1.0 / 12.0 / n as f64).sqrt());
        let frac = below as f64 / n as f64;
        assert!((frac - 0.25).abs() < 4.0 * (0.25 * 0.75 / n as f64).sqrt());
    }

    #[test]
    fn integer_threshold_matches_float_compare() {
        let rng = EdgeRng::new(3, 0);
        for p in [0.0, 1e-9, 0.1, 0.25, 0.4999999, 0.5, 0.7, 1.0 - 1e-16, 1.0] {
            let t = threshold53(p);
            for i in 0..20_000 {
                let key = rng.vertex_key(&[i, -i]);
                assert_eq!(rng.bits53_at(key, 1) < t, rng.uniform_at(key, 1) < p);
            }
        }
        assert_eq!(threshold53(0.5), 1 << 52);
        assert_eq!(threshold53(1.0), 1 << 53);
    }

    #[test]
    fn streams_and_seeds_differ() {
        let a = EdgeRng::new(1, 0).uniform(&[0, 0], 0);
        let b = EdgeRng::new(1, 1).uniform(&[0, 0], 0);
        let c = EdgeRng::new(2, 0).uniform(&[0, 0], 0);
        assert!(a != b && a != c && b != c);
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
    }
}
