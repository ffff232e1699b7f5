//! Deterministic random number generation.
//!
//! xoshiro256** seeded through splitmix64. Self-contained so that streams
//! are bit-identical across platforms and toolchain upgrades, which the
//! reproducibility guarantees depend on.
//!
//! Sub-seeding scheme: every generator remembers the 64-bit root it was
//! seeded with. `substream(tag)` derives an independent generator from
//! `mix64(root + GOLDEN * (tag + 1))`, and the derived generator's root is
//! that mixed value, so substreams nest: `root -> data -> batch[k]`.
//! Conventional tags used across the crate are in [`stream`].

/// Conventional substream tags so call sites agree on purposes.
pub mod stream {
    /// Parameter initialization (weights, TE).
    pub const WEIGHTS: u64 = 1;
    /// Task/batch generation.
    pub const DATA: u64 = 2;
    /// Pixel permutations (PS-MNIST) and epoch shuffles.
    pub const PERMUTE: u64 = 3;
    /// Held-out evaluation batches.
    pub const EVAL: u64 = 4;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer; also used as the substream mixing function.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// xoshiro256** generator with a remembered root seed for substreams.
#[derive(Clone, Debug)]
pub struct Rng {
    root: u64,
    s: [u64; 4],
    /// Cached second Box-Muller sample.
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        // splitmix64 chain expands the 64-bit seed into the 256-bit state.
        let mut z = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            z = z.wrapping_add(GOLDEN);
            *slot = mix64(z);
        }
        // xoshiro must not start from the all-zero state.
        if s == [0, 0, 0, 0] {
            s[0] = GOLDEN;
        }
        Rng {
            root: seed,
            s,
            spare_normal: None,
        }
    }

    /// Root seed this generator was created from.
    pub fn root(&self) -> u64 {
        self.root
    }

    /// Derive an independent generator for a distinct purpose.
    pub fn substream(&self, tag: u64) -> Rng {
        Rng::from_seed(mix64(
            self.root.wrapping_add(GOLDEN.wrapping_mul(tag.wrapping_add(1))),
        ))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, 1) as f32.
    #[inline]
    pub fn next_f32(&mut self) -> f32 {
        self.next_f64() as f32
    }

    /// Uniform integer in [0, bound) without modulo bias (bound > 0).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller; pairs are cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0,1] so ln is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A random permutation of 0..n.
    pub fn permutation(&mut self, n: usize) -> Vec<u32> {
        let mut p: Vec<u32> = (0..n as u32).collect();
        self.shuffle(&mut p);
        p
    }
}
